//! Solution evaluation: feasibility re-checks, objective consistency and
//! the reported indicator breakdowns (TDC, LCOH, GHG, risk, subsystem
//! splits, operating hours, water withdrawal).
//!
//! Everything here recomputes from the scenario data and the raw variable
//! values, independently of the objective vector the solver saw.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::model::build::{blended_price, discount_weights, stack_surcharge, BuiltModel};
use crate::model::vars::VarFamily;
use crate::scenario::Scenario;
use crate::solver::{BnbStats, InfeasibleCertificate, MilpStatus, RawMilpSolution};

/// Undiscounted horizon cost per subsystem (EUR).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CostBySubsystem {
    pub production: f64,
    pub storage: f64,
    pub station: f64,
    pub transport: f64,
    pub conversion: f64,
    pub electricity: f64,
    pub water: f64,
}

impl CostBySubsystem {
    pub fn total(&self) -> f64 {
        self.production + self.storage + self.station + self.transport + self.conversion + self.electricity + self.water
    }
}

/// Horizon-averaged daily emissions per subsystem (tCO2e/day).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GhgBySubsystem {
    pub production: f64,
    pub storage: f64,
    pub transport: f64,
}

impl GhgBySubsystem {
    pub fn total(&self) -> f64 {
        self.production + self.storage + self.transport
    }
}

/// Horizon-averaged risk index per subsystem.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RiskBySubsystem {
    pub production: f64,
    pub storage: f64,
    pub station: f64,
    pub transport: f64,
}

impl RiskBySubsystem {
    pub fn total(&self) -> f64 {
        self.production + self.storage + self.station + self.transport
    }
}

/// Water use of one grid-period-month cell.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterCell {
    pub grid: usize,
    pub period: usize,
    pub month: usize,
    /// m3/day withdrawn.
    pub cons_m3_day: f64,
    /// Vulnerability-indexed monthly withdrawal (the capped quantity).
    pub wcv: f64,
}

/// Indicator block attached to an evaluated solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Breakdowns {
    /// Total daily cost, thousand EUR per day, undiscounted horizon average.
    pub tdc_keur_per_day: f64,
    /// Discounted cost over discounted delivered mass.
    pub lcoh_eur_per_kg: f64,
    pub ghg_t_per_day: f64,
    pub risk_index: f64,
    pub cost: CostBySubsystem,
    pub ghg: GhgBySubsystem,
    pub risk: RiskBySubsystem,
    /// Undiscounted investment total (EUR).
    pub capex_total_eur: f64,
    /// Undiscounted operating total over the horizon (EUR).
    pub opex_total_eur: f64,
    /// Hydrogen delivered over the horizon (kg), retrofit use included.
    pub delivered_kg_total: f64,
    pub discounted_cost_eur: f64,
    pub discounted_kg: f64,
    /// Average electrolyzer operating hours per day.
    pub electrolyzer_hours_per_day: f64,
    pub water: Vec<WaterCell>,
}

/// Evaluated solver outcome.
#[derive(Debug, Clone)]
pub struct MilpSolution {
    pub status: MilpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    pub bound: f64,
    pub certificate: InfeasibleCertificate,
    pub stats: BnbStats,
    pub breakdowns: Option<Breakdowns>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    /// A constraint row is violated beyond tolerance at the solution.
    ResidualTooLarge { row: String, violation: f64 },
    /// Solver-reported objective disagrees with re-evaluation.
    ObjectiveMismatch { reported: f64, reevaluated: f64 },
}

impl core::fmt::Display for EvalError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            EvalError::ResidualTooLarge { row, violation } => {
                write!(f, "row '{row}' violated by {violation:.3e} at the solution")
            }
            EvalError::ObjectiveMismatch { reported, reevaluated } => {
                write!(f, "objective mismatch: solver {reported}, re-evaluated {reevaluated}")
            }
        }
    }
}

/// Discounted levelized cost: capex hits each period's first year, opex and
/// delivered mass discount per year. With zero rates this collapses to
/// total cost over total mass.
pub fn levelized_cost(capex: &[f64], opex_days: &[f64], kg_days: &[f64], inflation: f64, dr: f64) -> f64 {
    let base = (1.0 + inflation) * (1.0 + dr);
    let mut num = 0.0;
    let mut den = 0.0;
    for t in 0..capex.len() {
        let f = 1.0 / crate::float::powi(base, t as u32);
        num += capex[t] * f + opex_days[t] * f;
        den += kg_days[t] * f;
    }
    if den > 0.0 {
        num / den
    } else {
        f64::INFINITY
    }
}

/// Verifies the raw solution against the instance and attaches breakdowns.
pub fn evaluate(s: &Scenario, built: &BuiltModel, raw: RawMilpSolution) -> Result<MilpSolution, EvalError> {
    if raw.status != MilpStatus::Optimal && raw.status != MilpStatus::LimitReached || raw.x.is_empty() {
        return Ok(MilpSolution {
            status: raw.status,
            values: raw.x,
            objective: raw.objective,
            bound: raw.bound,
            certificate: raw.certificate,
            stats: raw.stats,
            breakdowns: None,
        });
    }
    let inst = &built.instance;
    let x = &raw.x;

    // residuals, scaled by each row's largest coefficient
    for row in &inst.rows {
        if row.rhs.is_infinite() {
            continue;
        }
        let scale = row.coeffs.iter().map(|&(_, a)| a.abs()).fold(1.0, f64::max);
        let v = row.violation(x) / scale;
        if v > 1e-6 {
            return Err(EvalError::ResidualTooLarge { row: row.label.clone(), violation: v });
        }
    }
    let reevaluated = inst.objective_value(x);
    if (reevaluated - raw.objective).abs() > 1e-6 * (1.0 + raw.objective.abs()) {
        return Err(EvalError::ObjectiveMismatch { reported: raw.objective, reevaluated });
    }

    let breakdowns = compute_breakdowns(s, built, x);
    Ok(MilpSolution {
        status: raw.status,
        values: raw.x,
        objective: raw.objective,
        bound: raw.bound,
        certificate: raw.certificate,
        stats: raw.stats,
        breakdowns: Some(breakdowns),
    })
}

fn compute_breakdowns(s: &Scenario, built: &BuiltModel, x: &[f64]) -> Breakdowns {
    let vars = &built.vars;
    let val = |fam: VarFamily, subs: &[usize]| x[vars.index(fam, subs)];
    let (ng, nt, nm) = (s.sets.n_grids(), s.sets.n_periods(), s.sets.n_months());
    let (np, nj, ni, nl) = (s.sets.n_tech(), s.sets.n_sizes(), s.sets.n_forms(), s.sets.n_modes());
    let w = discount_weights(s);
    let year_days: f64 = s.energy.days.iter().sum();
    let total_days: f64 = year_days * s.tech.i_capex.iter().sum::<f64>();
    let total_years: f64 = s.tech.i_capex.iter().sum();

    let mut cost = CostBySubsystem::default();
    let mut disc_cost = 0.0;
    let mut capex_total = 0.0;
    let mut ghg = GhgBySubsystem::default();
    let mut risk = RiskBySubsystem::default();
    let mut kg_total = 0.0;
    let mut disc_kg = 0.0;
    let mut energy_used_kwh_days = 0.0;
    let mut installed_kw_days = 0.0;

    let arc_live = |i: usize, l: usize, g: usize, g2: usize| {
        g != g2 && s.tech.transport[i][l].is_some() && !s.geo.export_ban[g]
    };

    for t in 0..nt {
        let years = s.tech.i_capex[t];
        let cf = w.capex_factor[t];
        let af = w.opex_factor[t];
        let price = blended_price(s, t);
        let vt = years / total_years;

        for g in 0..ng {
            for i in 0..ni {
                for p in 0..np {
                    for j in 0..nj {
                        let pt = &s.tech.production[p][j][i];
                        let unit_capex = pt.capex_per_kw * pt.p_elec;
                        let ip = val(VarFamily::Ip, &[p, j, i, g, t]);
                        capex_total += ip * unit_capex;
                        cost.production += ip * unit_capex;
                        disc_cost += ip * unit_capex * cf;
                        let np_units = val(VarFamily::Np, &[p, j, i, g, t]);
                        risk.production += pt.risk_per_unit * np_units * vt;
                        let op_kg = pt.opex_per_kg + stack_surcharge(s, p, j, i);
                        for m in 0..nm {
                            let pr = val(VarFamily::Pr, &[p, j, i, g, t, m]);
                            let days = s.energy.days[m];
                            cost.production += pr * op_kg * days * years;
                            disc_cost += pr * op_kg * days * af;
                            ghg.production += pt.ghg_per_kg * pr * days * years / total_days / 1000.0;
                            energy_used_kwh_days += pr * s.energy.gamma[p][j] * days * years;
                            installed_kw_days += np_units * pt.p_elec * days * years;
                        }
                    }
                }
                for j in 0..nj {
                    let st = &s.tech.storage[i][j];
                    let nsn = val(VarFamily::NsNew, &[i, j, g, t]);
                    let ns = val(VarFamily::Ns, &[i, j, g, t]);
                    let unit_capex = st.capex_per_kg * st.cap_kg;
                    capex_total += nsn * unit_capex;
                    cost.storage += nsn * unit_capex + ns * st.opex_per_kg * st.cap_kg * year_days * years;
                    disc_cost += nsn * unit_capex * cf + ns * st.opex_per_kg * st.cap_kg * year_days * af;
                    ghg.storage += st.ghg_per_kg_day * st.cap_kg * ns * year_days * years / total_days / 1000.0;
                    risk.storage += st.risk_per_unit * ns * vt;

                    let fst = &s.tech.station[i][j];
                    let nfsn = val(VarFamily::NfsNew, &[i, j, g, t]);
                    let nfs = val(VarFamily::Nfs, &[i, j, g, t]);
                    capex_total += nfsn * fst.capex;
                    cost.station += nfsn * fst.capex;
                    disc_cost += nfsn * fst.capex * cf;
                    risk.station += fst.risk_per_unit * nfs * vt;
                    for m in 0..nm {
                        let days = s.energy.days[m];
                        for i2 in 0..ni {
                            let fr = val(VarFamily::Fr, &[i, j, i2, g, t, m]);
                            cost.station += fr * fst.opex_per_kg * days * years;
                            disc_cost += fr * fst.opex_per_kg * days * af;
                        }
                    }
                }
                // conversion
                let conv = &s.tech.conversion[i];
                let cun = val(VarFamily::ConvNew, &[i, g, t]);
                capex_total += cun * conv.capex;
                cost.conversion += cun * conv.capex;
                disc_cost += cun * conv.capex * cf;
                for l in 0..nl {
                    for g2 in 0..ng {
                        if !arc_live(i, l, g, g2) {
                            continue;
                        }
                        let conv_kg = conv.opex_per_kg + conv.energy_kwh_per_kg * price;
                        for m in 0..nm {
                            let q = val(VarFamily::Q, &[i, l, g, g2, t, m]);
                            let days = s.energy.days[m];
                            cost.conversion += q * conv_kg * days * years;
                            disc_cost += q * conv_kg * days * af;
                            risk.transport += s.tech.risk_per_kg_transported * q * days / year_days * vt;
                        }
                    }
                }
            }
            for m in 0..nm {
                let days = s.energy.days[m];
                let esu = val(VarFamily::Esu, &[g, t, m]);
                cost.electricity += esu * price * days * years;
                disc_cost += esu * price * days * af;
                let wc = val(VarFamily::Watercons, &[g, t, m]);
                cost.water += wc * s.water.water_price * days * years;
                disc_cost += wc * s.water.water_price * days * af;
            }
        }

        // trucks
        for i in 0..ni {
            for l in 0..nl {
                let Some(tt) = &s.tech.transport[i][l] else { continue };
                let (capex, fuel_km, maint_km, ghg_km) = if s.options.retrofit {
                    let r = &s.tech.retrofit;
                    (r.capex, r.fuel_cost_km, r.maint_km, r.ghg_per_km)
                } else {
                    (tt.capex, tt.fuel_cost_km, tt.maint_km, tt.ghg_per_km)
                };
                for g in 0..ng {
                    for g2 in 0..ng {
                        if !arc_live(i, l, g, g2) {
                            continue;
                        }
                        let ad = s.tech.distances[g][g2];
                        let trn = val(VarFamily::TruckNew, &[i, l, g, g2, t]);
                        capex_total += trn * capex;
                        cost.transport += trn * capex;
                        disc_cost += trn * capex * cf;
                        let per_day =
                            tt.driver_wage * (2.0 * ad / tt.speed + tt.lut) + (fuel_km + maint_km) * 2.0 * ad + tt.general_day;
                        for m in 0..nm {
                            let ntu = val(VarFamily::Ntugrid, &[i, l, g, g2, t, m]);
                            let days = s.energy.days[m];
                            cost.transport += ntu * per_day * days * years;
                            disc_cost += ntu * per_day * days * af;
                            ghg.transport += ghg_km * 2.0 * ad * ntu * days * years / total_days / 1000.0;
                            risk.transport += tt.risk_per_truck * ntu * days / year_days * vt;
                        }
                    }
                }
            }
        }

        // delivered mass: demand plus retrofit self-consumption
        for m in 0..nm {
            let days = s.energy.days[m];
            let mut dt = 0.0;
            for g in 0..ng {
                dt += crate::demand::hydrogen_demand(s, g, t, m).unwrap_or(0.0);
                for i in 0..ni {
                    dt += val(VarFamily::Dretrofit, &[i, g, t, m]);
                }
            }
            kg_total += dt * days * years;
            disc_kg += dt * days * af;
        }
    }

    let opex_total = cost.total() - capex_total;
    let water: Vec<WaterCell> = (0..ng)
        .flat_map(|g| {
            (0..nt).flat_map(move |t| {
                (0..nm).map(move |m| (g, t, m))
            })
        })
        .map(|(g, t, m)| WaterCell {
            grid: g,
            period: t,
            month: m,
            cons_m3_day: val(VarFamily::Watercons, &[g, t, m]),
            wcv: val(VarFamily::Wcv, &[g, t, m]),
        })
        .collect();

    Breakdowns {
        tdc_keur_per_day: cost.total() / total_days / 1000.0,
        lcoh_eur_per_kg: if disc_kg > 0.0 { disc_cost / disc_kg } else { f64::INFINITY },
        ghg_t_per_day: ghg.total(),
        risk_index: risk.total(),
        cost,
        ghg,
        risk,
        capex_total_eur: capex_total,
        opex_total_eur: opex_total,
        delivered_kg_total: kg_total,
        discounted_cost_eur: disc_cost,
        discounted_kg: disc_kg,
        electrolyzer_hours_per_day: if installed_kw_days > 0.0 { energy_used_kwh_days / installed_kw_days } else { 0.0 },
        water,
    }
}

/// Formats a one-line indicator summary, handy for logs and reports.
pub fn summary_line(b: &Breakdowns) -> String {
    format!(
        "TDC {:.2} kEUR/day | LCOH {:.3} EUR/kg | GHG {:.3} t/day | risk {:.2}",
        b.tdc_keur_per_day, b.lcoh_eur_per_kg, b.ghg_t_per_day, b.risk_index
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levelized_cost_collapses_without_discounting() {
        // one period: capex 100, opex 10/day for 30 days, 1 kg/day
        let lcoh = levelized_cost(&[100.0], &[300.0], &[30.0], 0.0, 0.0);
        assert!((lcoh - 400.0 / 30.0).abs() < 1e-12);
    }

    #[test]
    fn levelized_cost_discounts_later_periods() {
        let flat = levelized_cost(&[100.0, 100.0], &[0.0, 0.0], &[10.0, 10.0], 0.0, 0.0);
        let disc = levelized_cost(&[100.0, 100.0], &[0.0, 0.0], &[10.0, 10.0], 0.0, 0.10);
        assert!((flat - 10.0).abs() < 1e-12);
        // both capex and mass shrink by the same factor in period 2, so the
        // ratio stays 10 exactly
        assert!((disc - 10.0).abs() < 1e-12);
        let asym = levelized_cost(&[200.0, 0.0], &[0.0, 0.0], &[10.0, 10.0], 0.0, 0.10);
        assert!(asym > 10.0);
    }
}
