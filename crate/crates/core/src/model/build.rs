//! MILP assembly: variables with bounds and integrality, constraint rows,
//! objective vectors and epsilon rows, all from one validated scenario.
//!
//! Geography and pathway restrictions are applied as variable fixings
//! (bounds collapsed to zero), which the solver's singleton elimination
//! treats as constants. Ceiling-type truck counting is linearized with the
//! rounding binary and a per-arc big-M equal to the truck cap; transported
//! quantities carry a demand-derived big-M, documented on
//! [`Builder::transport_big_m`].

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::demand::{demand_table, DemandSurface};
use crate::model::instance::{Criterion, MilpInstance, Sense};
use crate::model::vars::{VarFamily, VariableIndex};
use crate::resources::availability_per_kw;
use crate::scenario::{EnergySource, Scenario, WaterRestriction};

/// Optional caps on the non-primary criteria; the objective's own criterion
/// must stay unset.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EpsilonBounds {
    pub cost: Option<f64>,
    pub ghg: Option<f64>,
    pub risk: Option<f64>,
}

impl EpsilonBounds {
    pub fn ghg_risk(ghg: f64, risk: f64) -> Self {
        EpsilonBounds { cost: None, ghg: Some(ghg), risk: Some(risk) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BuildError {
    /// The scenario failed validation; violations listed.
    InvalidScenario(Vec<String>),
    /// gamma must be positive to convert power to production capacity.
    ZeroGamma { tech: usize, size: usize },
    /// A transport pair is allowed but the grids have no recorded distance.
    MissingDistance { from: String, to: String },
    /// A second objective was applied to the same build.
    ObjectiveAlreadySet,
    /// No objective was applied before finishing.
    ObjectiveMissing,
    /// An epsilon bound targets the primary criterion.
    EpsOnPrimary(Criterion),
    Structure(String),
}

impl core::fmt::Display for BuildError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            BuildError::InvalidScenario(v) => write!(f, "scenario invalid: {} violation(s)", v.len()),
            BuildError::ZeroGamma { tech, size } => {
                write!(f, "gamma is zero for technology {tech}, size {size}")
            }
            BuildError::MissingDistance { from, to } => {
                write!(f, "no distance recorded between grids '{from}' and '{to}'")
            }
            BuildError::ObjectiveAlreadySet => write!(f, "objective already set on this instance"),
            BuildError::ObjectiveMissing => write!(f, "no objective was applied"),
            BuildError::EpsOnPrimary(c) => {
                write!(f, "epsilon bound on the primary criterion '{}'", c.label())
            }
            BuildError::Structure(s) => write!(f, "{s}"),
        }
    }
}

/// Daily production capacity band of one electrolyzer class in one month:
/// `(ELCF / Nd) * PElec / gamma`, min with ELCFmin and max with ELCFmax.
pub fn production_bounds(
    s: &Scenario,
    p: usize,
    j: usize,
    i: usize,
    m: usize,
) -> Result<(f64, f64), BuildError> {
    let gamma = s.energy.gamma[p][j];
    if gamma == 0.0 {
        return Err(BuildError::ZeroGamma { tech: p, size: j });
    }
    let pt = &s.tech.production[p][j][i];
    let days = s.energy.days[m];
    let lo = (pt.elcf_min / days) * pt.p_elec / gamma;
    let hi = (pt.elcf_max / days) * pt.p_elec / gamma;
    Ok((lo, hi))
}

/// The assembled model: instance plus the variable catalog needed to read
/// solutions back.
#[derive(Debug, Clone)]
pub struct BuiltModel {
    pub instance: MilpInstance,
    pub vars: VariableIndex,
}

/// Runs every builder step for the chosen primary objective.
pub fn assemble(
    s: &Scenario,
    objective: Criterion,
    eps: Option<EpsilonBounds>,
) -> Result<BuiltModel, BuildError> {
    let mut b = Builder::new(s)?;
    b.add_capacity_linking()?;
    b.add_geography();
    b.add_transport_linking()?;
    b.add_balances()?;
    match objective {
        Criterion::Cost => b.objective_cost()?,
        Criterion::Ghg => b.objective_ghg()?,
        Criterion::Risk => b.objective_risk()?,
    }
    if let Some(eps) = eps {
        b.add_epsilon(eps)?;
    }
    b.finish()
}

/// Stepwise model builder; [`assemble`] is the usual entry point.
pub struct Builder<'a> {
    s: &'a Scenario,
    vars: VariableIndex,
    inst: MilpInstance,
    surface: DemandSurface,
    /// Days in one model year (sum of the listed months' days).
    year_days: f64,
    /// Total days over the horizon, period lengths included.
    total_days: f64,
    unit_cap: f64,
    truck_cap: f64,
    objective_set: Option<Criterion>,
}

pub(crate) struct Weights {
    /// Discount divisor applied to capex of period t.
    pub capex_factor: Vec<f64>,
    /// Sum of discount divisors over the years of period t (annuity).
    pub opex_factor: Vec<f64>,
}

/// Discount factors per period: capex discounts at each year's start, opex
/// accumulates one divisor per year of the period.
pub(crate) fn discount_weights(s: &Scenario) -> Weights {
    let nt = s.sets.n_periods();
    let base = (1.0 + s.tech.inflation) * (1.0 + s.tech.dr);
    let mut capex_factor = Vec::with_capacity(nt);
    let mut opex_factor = Vec::with_capacity(nt);
    let mut year_start = 0u32;
    for t in 0..nt {
        capex_factor.push(1.0 / crate::float::powi(base, year_start));
        let years = s.tech.i_capex[t] as u32;
        let mut af = 0.0;
        for y in 0..years {
            af += 1.0 / crate::float::powi(base, year_start + y);
        }
        opex_factor.push(af);
        year_start += years;
    }
    Weights { capex_factor, opex_factor }
}

/// Blended renewable electricity tariff of a period: consumption is not
/// source-attributed, so the PV and wind prices average.
pub(crate) fn blended_price(s: &Scenario, t: usize) -> f64 {
    (s.energy.elec_price[0][t] + s.energy.elec_price[1][t]) / 2.0
}

/// Per-kg surcharge amortizing electrolyzer stack replacements:
/// `share * capex_per_kw * gamma / lifetime_hours`.
pub(crate) fn stack_surcharge(s: &Scenario, p: usize, j: usize, i: usize) -> f64 {
    s.tech.replacement_share * s.tech.production[p][j][i].capex_per_kw * s.energy.gamma[p][j]
        / s.tech.lifetime_hours[p]
}

impl<'a> Builder<'a> {
    pub fn new(s: &'a Scenario) -> Result<Builder<'a>, BuildError> {
        let report = crate::scenario::validate(s);
        if !report.is_valid() {
            return Err(BuildError::InvalidScenario(
                report.violations.iter().map(|v| v.detail.clone()).collect(),
            ));
        }
        let vars = VariableIndex::new(s);
        let surface = demand_table(s);
        let year_days: f64 = s.energy.days.iter().sum();
        let total_days = year_days * s.tech.i_capex.iter().sum::<f64>();

        let peak = surface.peak_total().max(1e-9);
        let unit_cap = if s.options.unit_cap > 0 {
            s.options.unit_cap as f64
        } else {
            // enough units of the smallest class to cover the system peak
            let mut worst: f64 = 1.0;
            for p in 0..s.sets.n_tech() {
                for j in 0..s.sets.n_sizes() {
                    for i in 0..s.sets.n_forms() {
                        for m in 0..s.sets.n_months() {
                            let (_, hi) = production_bounds(s, p, j, i, m)?;
                            if hi > 0.0 {
                                worst = worst.max(crate::float::ceil(peak / hi) + 1.0);
                            }
                        }
                    }
                }
            }
            for (i, forms) in s.tech.storage.iter().enumerate() {
                let _ = i;
                for st in forms {
                    worst = worst.max(crate::float::ceil(s.options.storage_autonomy_days * peak / st.cap_kg) + 1.0);
                }
            }
            for forms in &s.tech.station {
                for st in forms {
                    worst = worst.max(crate::float::ceil(peak / st.cap_kg_day) + 1.0);
                }
            }
            worst
        };
        let truck_cap = if s.options.truck_cap > 0 {
            s.options.truck_cap as f64
        } else {
            let mut worst: f64 = 1.0;
            for i in 0..s.sets.n_forms() {
                for l in 0..s.sets.n_modes() {
                    if let Some(tt) = &s.tech.transport[i][l] {
                        let mut ad_max: f64 = 0.0;
                        for g in 0..s.sets.n_grids() {
                            for g2 in 0..s.sets.n_grids() {
                                ad_max = ad_max.max(s.tech.distances[g][g2]);
                            }
                        }
                        let tf = (2.0 * ad_max / tt.speed + tt.lut) / (tt.tma * tt.tcap);
                        worst = worst.max(crate::float::ceil(tf * 2.0 * peak) + 1.0);
                    }
                }
            }
            worst
        };

        let mut b = Builder {
            s,
            vars,
            inst: MilpInstance::new(),
            surface,
            year_days,
            total_days,
            unit_cap,
            truck_cap,
            objective_set: None,
        };
        b.create_variables();
        Ok(b)
    }

    pub fn demand_surface(&self) -> &DemandSurface {
        &self.surface
    }

    fn idx(&self, f: VarFamily, subs: &[usize]) -> u32 {
        self.vars.index(f, subs) as u32
    }

    fn create_variables(&mut self) {
        let s = self.s;
        let n = self.vars.n_vars();
        for flat in 0..n {
            let (family, _) = self.vars.decode(flat);
            let name = self.vars.name(s, flat);
            let (lb, ub) = match family {
                VarFamily::Epsilon | VarFamily::Xe => (0.0, 1.0),
                VarFamily::Ntugrid => (0.0, self.truck_cap),
                VarFamily::Np
                | VarFamily::Ip
                | VarFamily::Ns
                | VarFamily::NsNew
                | VarFamily::Nfs
                | VarFamily::NfsNew => (0.0, self.unit_cap),
                _ => (0.0, f64::INFINITY),
            };
            self.inst.push_var(name, lb, ub, family.is_integer());
        }
        // source-specific installable power caps
        for g in 0..s.sets.n_grids() {
            for m in 0..s.sets.n_months() {
                for (e, _) in EnergySource::ALL.iter().enumerate() {
                    let j = self.vars.index(VarFamily::Esp, &[g, m, e]);
                    self.inst.upper[j] = s.energy.esp_cap[g][e];
                }
            }
        }
        // transported quantities: demand-derived big-M (see transport_big_m)
        for i in 0..s.sets.n_forms() {
            for l in 0..s.sets.n_modes() {
                for g in 0..s.sets.n_grids() {
                    for g2 in 0..s.sets.n_grids() {
                        for t in 0..s.sets.n_periods() {
                            for m in 0..s.sets.n_months() {
                                let j = self.vars.index(VarFamily::Q, &[i, l, g, g2, t, m]);
                                self.inst.upper[j] = self.transport_big_m(t, m);
                            }
                        }
                    }
                }
            }
        }
        // retrofit consumption exists only in the retrofit scenario
        if !s.options.retrofit {
            for i in 0..s.sets.n_forms() {
                for g in 0..s.sets.n_grids() {
                    for t in 0..s.sets.n_periods() {
                        for m in 0..s.sets.n_months() {
                            let j = self.vars.index(VarFamily::Dretrofit, &[i, g, t, m]);
                            self.inst.fix_var(j, 0.0);
                        }
                    }
                }
            }
        }
    }

    /// Upper bound on any single transported quantity in `(t, m)`: total
    /// system demand plus the largest possible retrofit self-consumption
    /// (every arc at its truck cap). Cycles only add cost, so no optimum is
    /// cut off.
    pub fn transport_big_m(&self, t: usize, m: usize) -> f64 {
        let s = self.s;
        let mut retro_margin = 0.0;
        if s.options.retrofit {
            let mut ad_max: f64 = 0.0;
            for g in 0..s.sets.n_grids() {
                for g2 in 0..s.sets.n_grids() {
                    ad_max = ad_max.max(s.tech.distances[g][g2]);
                }
            }
            let arcs = (s.sets.n_forms() * s.sets.n_modes() * s.sets.n_grids() * (s.sets.n_grids().saturating_sub(1))) as f64;
            retro_margin = arcs * self.truck_cap * 2.0 * ad_max * s.tech.retrofit.fcev_cons / 100.0;
        }
        self.surface.total(t, m) + retro_margin + 1.0
    }

    /// Unit-count telescoping (`N_t = N_{t-1} + new_t`) and capacity bands
    /// for production, storage and stations.
    pub fn add_capacity_linking(&mut self) -> Result<(), BuildError> {
        let s = self.s;
        let (ng, nt, nm) = (s.sets.n_grids(), s.sets.n_periods(), s.sets.n_months());
        let (np, nj, ni) = (s.sets.n_tech(), s.sets.n_sizes(), s.sets.n_forms());

        for p in 0..np {
            for j in 0..nj {
                for i in 0..ni {
                    for g in 0..ng {
                        for t in 0..nt {
                            let npv = self.idx(VarFamily::Np, &[p, j, i, g, t]);
                            let ipv = self.idx(VarFamily::Ip, &[p, j, i, g, t]);
                            let mut coeffs = alloc::vec![(npv, 1.0), (ipv, -1.0)];
                            if t > 0 {
                                coeffs.push((self.idx(VarFamily::Np, &[p, j, i, g, t - 1]), -1.0));
                            }
                            self.row(format!("np_link[{p},{j},{i},{g},{t}]"), coeffs, Sense::Eq, 0.0)?;
                            for m in 0..nm {
                                let (lo, hi) = production_bounds(s, p, j, i, m)?;
                                let pr = self.idx(VarFamily::Pr, &[p, j, i, g, t, m]);
                                self.row(
                                    format!("pr_cap_hi[{p},{j},{i},{g},{t},{m}]"),
                                    alloc::vec![(pr, 1.0), (npv, -hi)],
                                    Sense::Le,
                                    0.0,
                                )?;
                                if lo > 0.0 {
                                    self.row(
                                        format!("pr_cap_lo[{p},{j},{i},{g},{t},{m}]"),
                                        alloc::vec![(pr, 1.0), (npv, -lo)],
                                        Sense::Ge,
                                        0.0,
                                    )?;
                                }
                            }
                        }
                    }
                }
            }
        }

        for i in 0..ni {
            for j in 0..nj {
                for g in 0..ng {
                    for t in 0..nt {
                        let ns = self.idx(VarFamily::Ns, &[i, j, g, t]);
                        let nsn = self.idx(VarFamily::NsNew, &[i, j, g, t]);
                        let mut coeffs = alloc::vec![(ns, 1.0), (nsn, -1.0)];
                        if t > 0 {
                            coeffs.push((self.idx(VarFamily::Ns, &[i, j, g, t - 1]), -1.0));
                        }
                        self.row(format!("ns_link[{i},{j},{g},{t}]"), coeffs, Sense::Eq, 0.0)?;

                        let nfs = self.idx(VarFamily::Nfs, &[i, j, g, t]);
                        let nfsn = self.idx(VarFamily::NfsNew, &[i, j, g, t]);
                        let mut coeffs = alloc::vec![(nfs, 1.0), (nfsn, -1.0)];
                        if t > 0 {
                            coeffs.push((self.idx(VarFamily::Nfs, &[i, j, g, t - 1]), -1.0));
                        }
                        self.row(format!("nfs_link[{i},{j},{g},{t}]"), coeffs, Sense::Eq, 0.0)?;
                    }
                }
            }
        }

        for i in 0..ni {
            for g in 0..ng {
                for t in 0..nt {
                    for m in 0..nm {
                        // held stock fits the installed storage capacity
                        let st = self.idx(VarFamily::St, &[i, g, t, m]);
                        let mut coeffs = alloc::vec![(st, 1.0)];
                        for j in 0..nj {
                            coeffs.push((self.idx(VarFamily::Ns, &[i, j, g, t]), -s.tech.storage[i][j].cap_kg));
                        }
                        self.row(format!("st_cap[{i},{g},{t},{m}]"), coeffs, Sense::Le, 0.0)?;
                        // station throughput fits installed dispensing capacity
                        for j in 0..nj {
                            let mut coeffs: Vec<(u32, f64)> = Vec::new();
                            for i2 in 0..ni {
                                coeffs.push((self.idx(VarFamily::Fr, &[i, j, i2, g, t, m]), 1.0));
                            }
                            coeffs.push((self.idx(VarFamily::Nfs, &[i, j, g, t]), -s.tech.station[i][j].cap_kg_day));
                            self.row(format!("fr_cap[{i},{j},{g},{t},{m}]"), coeffs, Sense::Le, 0.0)?;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies the geographic masks as variable fixings: installation bans,
    /// source eligibility, centralized-size restrictions, export bans and
    /// station eligibility. Dead transport arcs (diagonal, banned exporter,
    /// missing pair) are zeroed here as well.
    pub fn add_geography(&mut self) {
        let s = self.s;
        let (ng, nt, nm) = (s.sets.n_grids(), s.sets.n_periods(), s.sets.n_months());
        let (np, nj, ni, nl) = (s.sets.n_tech(), s.sets.n_sizes(), s.sets.n_forms(), s.sets.n_modes());

        for g in 0..ng {
            // renewable source eligibility
            for m in 0..nm {
                if !s.energy.pv_mask[g] {
                    let j = self.vars.index(VarFamily::Esp, &[g, m, 0]);
                    self.inst.fix_var(j, 0.0);
                }
                if !s.energy.wind_mask[g] {
                    let j = self.vars.index(VarFamily::Esp, &[g, m, 1]);
                    self.inst.fix_var(j, 0.0);
                }
                // no grid imports
                let j = self.vars.index(VarFamily::Esp, &[g, m, 2]);
                self.inst.fix_var(j, 0.0);
            }
            for t in 0..nt {
                for p in 0..np {
                    for j in 0..nj {
                        for i in 0..ni {
                            let banned_period = s.geo.prod_ban[g][t];
                            let banned_size = s.sets.sizes[j].is_central() && !s.geo.central_grids[g];
                            if banned_period || banned_size {
                                let ip = self.vars.index(VarFamily::Ip, &[p, j, i, g, t]);
                                self.inst.fix_var(ip, 0.0);
                            }
                            // a unit count can only be zero while no install
                            // was ever allowed
                            let never_allowed = (0..=t).all(|tt| {
                                s.geo.prod_ban[g][tt] || (s.sets.sizes[j].is_central() && !s.geo.central_grids[g])
                            });
                            if never_allowed {
                                let np_ = self.vars.index(VarFamily::Np, &[p, j, i, g, t]);
                                self.inst.fix_var(np_, 0.0);
                            }
                        }
                    }
                }
                // stations only where demand exists
                if !s.geo.demand_grids[g] {
                    for i in 0..ni {
                        for j in 0..nj {
                            for fam in [VarFamily::Nfs, VarFamily::NfsNew] {
                                let v = self.vars.index(fam, &[i, j, g, t]);
                                self.inst.fix_var(v, 0.0);
                            }
                        }
                    }
                }
            }
        }

        // transport arcs
        for i in 0..ni {
            for l in 0..nl {
                for g in 0..ng {
                    for g2 in 0..ng {
                        if self.arc_live(i, l, g, g2) {
                            continue;
                        }
                        for t in 0..nt {
                            for fam in [VarFamily::Epsilon, VarFamily::Xe, VarFamily::TruckFleet, VarFamily::TruckNew] {
                                let v = self.vars.index(fam, &[i, l, g, g2, t]);
                                self.inst.fix_var(v, 0.0);
                            }
                            for m in 0..nm {
                                for fam in [VarFamily::Q, VarFamily::Ntugrid] {
                                    let v = self.vars.index(fam, &[i, l, g, g2, t, m]);
                                    self.inst.fix_var(v, 0.0);
                                }
                            }
                        }
                    }
                }
            }
        }
        // cross-form station throughput is meaningless
        for fs in 0..ni {
            for j in 0..nj {
                for i2 in 0..ni {
                    if fs == i2 {
                        continue;
                    }
                    for g in 0..ng {
                        for t in 0..nt {
                            for m in 0..nm {
                                let v = self.vars.index(VarFamily::Fr, &[fs, j, i2, g, t, m]);
                                self.inst.fix_var(v, 0.0);
                            }
                        }
                    }
                }
            }
        }
    }

    fn arc_live(&self, i: usize, l: usize, g: usize, g2: usize) -> bool {
        g != g2 && self.s.tech.transport[i][l].is_some() && !self.s.geo.export_ban[g]
    }

    /// Trip-count linearization, direction exclusivity, fleet accounting and
    /// retrofit self-consumption.
    pub fn add_transport_linking(&mut self) -> Result<(), BuildError> {
        let s = self.s;
        let (ng, nt, nm) = (s.sets.n_grids(), s.sets.n_periods(), s.sets.n_months());
        let (ni, nl) = (s.sets.n_forms(), s.sets.n_modes());

        for i in 0..ni {
            for l in 0..nl {
                let Some(tt) = &s.tech.transport[i][l] else { continue };
                for g in 0..ng {
                    for g2 in 0..ng {
                        if !self.arc_live(i, l, g, g2) {
                            continue;
                        }
                        let ad = s.tech.distances[g][g2];
                        if ad <= 0.0 {
                            return Err(BuildError::MissingDistance {
                                from: s.sets.grids[g].clone(),
                                to: s.sets.grids[g2].clone(),
                            });
                        }
                        // trucks needed per kg/day: round-trip hours over
                        // daily payload capacity
                        let tf = (2.0 * ad / tt.speed + tt.lut) / (tt.tma * tt.tcap);
                        for t in 0..nt {
                            let eps = self.idx(VarFamily::Epsilon, &[i, l, g, g2, t]);
                            let xe = self.idx(VarFamily::Xe, &[i, l, g, g2, t]);
                            let trf = self.idx(VarFamily::TruckFleet, &[i, l, g, g2, t]);
                            let trn = self.idx(VarFamily::TruckNew, &[i, l, g, g2, t]);
                            for m in 0..nm {
                                let q = self.idx(VarFamily::Q, &[i, l, g, g2, t, m]);
                                let ntu = self.idx(VarFamily::Ntugrid, &[i, l, g, g2, t, m]);
                                self.row(
                                    format!("ntu_lb[{i},{l},{g},{g2},{t},{m}]"),
                                    alloc::vec![(ntu, 1.0), (q, -tf)],
                                    Sense::Ge,
                                    0.0,
                                )?;
                                // with XE on, the integer count exceeds the
                                // fractional trips by at most the rounding
                                // binary; with XE off the big-M releases it
                                let big_m = self.truck_cap;
                                self.row(
                                    format!("ntu_ub[{i},{l},{g},{g2},{t},{m}]"),
                                    alloc::vec![(ntu, 1.0), (q, -tf), (eps, -1.0), (xe, big_m)],
                                    Sense::Le,
                                    big_m,
                                )?;
                                let mq = self.transport_big_m(t, m);
                                self.row(
                                    format!("q_dir[{i},{l},{g},{g2},{t},{m}]"),
                                    alloc::vec![(q, 1.0), (xe, -mq)],
                                    Sense::Le,
                                    0.0,
                                )?;
                                self.row(
                                    format!("fleet[{i},{l},{g},{g2},{t},{m}]"),
                                    alloc::vec![(trf, 1.0), (ntu, -1.0)],
                                    Sense::Ge,
                                    0.0,
                                )?;
                            }
                            let mut coeffs = alloc::vec![(trn, 1.0), (trf, -1.0)];
                            if t > 0 {
                                coeffs.push((self.idx(VarFamily::TruckFleet, &[i, l, g, g2, t - 1]), 1.0));
                            }
                            self.row(format!("fleet_new[{i},{l},{g},{g2},{t}]"), coeffs, Sense::Ge, 0.0)?;
                        }
                    }
                }
            }
        }

        // one direction per arc pair, per form/mode/period
        for i in 0..ni {
            for l in 0..nl {
                for g in 0..ng {
                    for g2 in (g + 1)..ng {
                        let fwd = self.arc_live(i, l, g, g2);
                        let bwd = self.arc_live(i, l, g2, g);
                        if !fwd || !bwd {
                            continue;
                        }
                        for t in 0..nt {
                            let a = self.idx(VarFamily::Xe, &[i, l, g, g2, t]);
                            let b = self.idx(VarFamily::Xe, &[i, l, g2, g, t]);
                            self.row(
                                format!("xe_excl[{i},{l},{g},{g2},{t}]"),
                                alloc::vec![(a, 1.0), (b, 1.0)],
                                Sense::Le,
                                1.0,
                            )?;
                        }
                    }
                }
            }
        }

        // retrofit trucks burn delivered hydrogen at the exporting grid
        if s.options.retrofit {
            for i in 0..ni {
                for g in 0..ng {
                    for t in 0..nt {
                        for m in 0..nm {
                            let d = self.idx(VarFamily::Dretrofit, &[i, g, t, m]);
                            let mut coeffs = alloc::vec![(d, 1.0)];
                            for l in 0..nl {
                                for g2 in 0..ng {
                                    if !self.arc_live(i, l, g, g2) {
                                        continue;
                                    }
                                    let rate = 2.0 * s.tech.distances[g][g2] * s.tech.retrofit.fcev_cons / 100.0;
                                    coeffs.push((self.idx(VarFamily::Ntugrid, &[i, l, g, g2, t, m]), -rate));
                                }
                            }
                            self.row(format!("retrofit[{i},{g},{t},{m}]"), coeffs, Sense::Eq, 0.0)?;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Demand balances, storage autonomy, station coverage, energy supply
    /// and the water accounting rows.
    pub fn add_balances(&mut self) -> Result<(), BuildError> {
        let s = self.s;
        let (ng, nt, nm) = (s.sets.n_grids(), s.sets.n_periods(), s.sets.n_months());
        let (np, nj, ni, nl) = (s.sets.n_tech(), s.sets.n_sizes(), s.sets.n_forms(), s.sets.n_modes());
        let autonomy = s.options.storage_autonomy_days;

        for g in 0..ng {
            for t in 0..nt {
                for m in 0..nm {
                    let dh2 = self.surface.value(g, t, m);

                    // mass balance: production + imports - exports
                    //   = demand + retrofit self-consumption
                    let mut coeffs: Vec<(u32, f64)> = Vec::new();
                    for p in 0..np {
                        for j in 0..nj {
                            for i in 0..ni {
                                coeffs.push((self.idx(VarFamily::Pr, &[p, j, i, g, t, m]), 1.0));
                            }
                        }
                    }
                    for i in 0..ni {
                        for l in 0..nl {
                            for g2 in 0..ng {
                                if g2 == g {
                                    continue;
                                }
                                coeffs.push((self.idx(VarFamily::Q, &[i, l, g2, g, t, m]), 1.0));
                                coeffs.push((self.idx(VarFamily::Q, &[i, l, g, g2, t, m]), -1.0));
                            }
                        }
                        coeffs.push((self.idx(VarFamily::Dretrofit, &[i, g, t, m]), -1.0));
                    }
                    self.row(format!("balance[{g},{t},{m}]"), coeffs, Sense::Eq, dh2)?;

                    // local buffer requirement
                    if autonomy > 0.0 && dh2 > 0.0 {
                        let coeffs: Vec<(u32, f64)> =
                            (0..ni).map(|i| (self.idx(VarFamily::St, &[i, g, t, m]), 1.0)).collect();
                        self.row(format!("autonomy[{g},{t},{m}]"), coeffs, Sense::Ge, autonomy * dh2)?;
                    }

                    // every delivered kilogram passes through a station
                    let mut coeffs: Vec<(u32, f64)> = Vec::new();
                    for fs in 0..ni {
                        for j in 0..nj {
                            for i in 0..ni {
                                coeffs.push((self.idx(VarFamily::Fr, &[fs, j, i, g, t, m]), 1.0));
                            }
                        }
                    }
                    self.row(format!("fr_demand[{g},{t},{m}]"), coeffs, Sense::Eq, dh2)?;

                    // electricity use and renewable availability
                    let esu = self.idx(VarFamily::Esu, &[g, t, m]);
                    let mut coeffs = alloc::vec![(esu, 1.0)];
                    for p in 0..np {
                        for j in 0..nj {
                            for i in 0..ni {
                                coeffs.push((self.idx(VarFamily::Pr, &[p, j, i, g, t, m]), -s.energy.gamma[p][j]));
                            }
                        }
                    }
                    self.row(format!("esu_def[{g},{t},{m}]"), coeffs, Sense::Eq, 0.0)?;

                    let mut coeffs = alloc::vec![(esu, 1.0 + s.energy.margin)];
                    for (e, &src) in EnergySource::ALL.iter().enumerate() {
                        let per_kw = availability_per_kw(s, g, t, m, src);
                        if per_kw > 0.0 {
                            coeffs.push((self.idx(VarFamily::Esp, &[g, m, e]), -per_kw));
                        }
                    }
                    self.row(format!("esu_cap[{g},{t},{m}]"), coeffs, Sense::Le, 0.0)?;

                    // water accounting
                    let wc = self.idx(VarFamily::Watercons, &[g, t, m]);
                    let mut coeffs = alloc::vec![(wc, 1.0)];
                    for p in 0..np {
                        for j in 0..nj {
                            for i in 0..ni {
                                coeffs.push((self.idx(VarFamily::Pr, &[p, j, i, g, t, m]), -s.water.elwuc / 1000.0));
                            }
                        }
                    }
                    self.row(format!("wcons_def[{g},{t},{m}]"), coeffs, Sense::Eq, 0.0)?;

                    let wcv = self.idx(VarFamily::Wcv, &[g, t, m]);
                    let (_, vul_sn) = crate::resources::water_vulnerability(s, g, m).unwrap();
                    self.row(
                        format!("wcv_def[{g},{t},{m}]"),
                        alloc::vec![(wcv, 1.0), (wc, -s.energy.days[m] * vul_sn)],
                        Sense::Eq,
                        0.0,
                    )?;
                    if s.options.water_restriction == WaterRestriction::Capped {
                        let (lo, hi) = crate::resources::water_bounds(s, g, t, m).unwrap();
                        self.row(format!("wcv_hi[{g},{t},{m}]"), alloc::vec![(wcv, 1.0)], Sense::Le, hi)?;
                        if lo > 0.0 {
                            self.row(format!("wcv_lo[{g},{t},{m}]"), alloc::vec![(wcv, 1.0)], Sense::Ge, lo)?;
                        }
                    }
                }
            }
        }

        // average daily water bill per period (reporting variable)
        for t in 0..nt {
            let wcost = self.idx(VarFamily::Watercost, &[t]);
            let mut coeffs = alloc::vec![(wcost, 1.0)];
            for g in 0..ng {
                for m in 0..nm {
                    coeffs.push((
                        self.idx(VarFamily::Watercons, &[g, t, m]),
                        -s.water.water_price * s.energy.days[m] / 365.0,
                    ));
                }
            }
            self.row(format!("wcost_def[{t}]"), coeffs, Sense::Eq, 0.0)?;
        }

        // conversion units sized to the monthly export peak
        for i in 0..ni {
            for g in 0..ng {
                if s.geo.export_ban[g] {
                    for t in 0..nt {
                        let cu = self.vars.index(VarFamily::ConvUnits, &[i, g, t]);
                        let cun = self.vars.index(VarFamily::ConvNew, &[i, g, t]);
                        self.inst.fix_var(cu, 0.0);
                        self.inst.fix_var(cun, 0.0);
                    }
                    continue;
                }
                for t in 0..nt {
                    let cu = self.idx(VarFamily::ConvUnits, &[i, g, t]);
                    let cun = self.idx(VarFamily::ConvNew, &[i, g, t]);
                    let conv = &s.tech.conversion[i];
                    for m in 0..nm {
                        let mut coeffs: Vec<(u32, f64)> = Vec::new();
                        for l in 0..nl {
                            for g2 in 0..ng {
                                if self.arc_live(i, l, g, g2) {
                                    coeffs.push((self.idx(VarFamily::Q, &[i, l, g, g2, t, m]), 1.0));
                                }
                            }
                        }
                        if coeffs.is_empty() {
                            continue;
                        }
                        coeffs.push((cu, -conv.cap_kg_day));
                        self.row(format!("conv_cap[{i},{g},{t},{m}]"), coeffs, Sense::Le, 0.0)?;
                    }
                    let mut coeffs = alloc::vec![(cun, 1.0), (cu, -1.0)];
                    if t > 0 {
                        coeffs.push((self.idx(VarFamily::ConvUnits, &[i, g, t - 1]), 1.0));
                    }
                    self.row(format!("conv_new[{i},{g},{t}]"), coeffs, Sense::Ge, 0.0)?;
                }
            }
        }
        Ok(())
    }

    fn effective_transport(&self, i: usize, l: usize) -> Option<TransportCost> {
        let tt = self.s.tech.transport[i][l].as_ref()?;
        let r = &self.s.tech.retrofit;
        Some(if self.s.options.retrofit {
            TransportCost {
                capex: r.capex,
                fuel_km: r.fuel_cost_km,
                maint_km: r.maint_km,
                ghg_km: r.ghg_per_km,
                driver_wage: tt.driver_wage,
                general_day: tt.general_day,
                speed: tt.speed,
                lut: tt.lut,
                risk_per_truck: tt.risk_per_truck,
            }
        } else {
            TransportCost {
                capex: tt.capex,
                fuel_km: tt.fuel_cost_km,
                maint_km: tt.maint_km,
                ghg_km: tt.ghg_per_km,
                driver_wage: tt.driver_wage,
                general_day: tt.general_day,
                speed: tt.speed,
                lut: tt.lut,
                risk_per_truck: tt.risk_per_truck,
            }
        })
    }

    /// Discounted system cost over the horizon: capex at each year's start
    /// plus monthly operating cost (production incl. stack amortization,
    /// storage and station upkeep, truck operation, conversion, electricity
    /// at the blended tariff, water).
    pub fn objective_cost(&mut self) -> Result<(), BuildError> {
        self.claim_objective(Criterion::Cost)?;
        let coeffs = self.cost_coefficients();
        for (j, c) in coeffs {
            self.inst.objective[j] += c;
        }
        Ok(())
    }

    /// Horizon-averaged daily emissions (tCO2e/day) over production,
    /// storage capacity and truck mileage.
    pub fn objective_ghg(&mut self) -> Result<(), BuildError> {
        self.claim_objective(Criterion::Ghg)?;
        let coeffs = self.ghg_coefficients();
        for (j, c) in coeffs {
            self.inst.objective[j] += c;
        }
        Ok(())
    }

    /// Horizon-averaged risk index over unit counts, truck counts and
    /// transported quantities.
    pub fn objective_risk(&mut self) -> Result<(), BuildError> {
        self.claim_objective(Criterion::Risk)?;
        let coeffs = self.risk_coefficients();
        for (j, c) in coeffs {
            self.inst.objective[j] += c;
        }
        Ok(())
    }

    fn claim_objective(&mut self, c: Criterion) -> Result<(), BuildError> {
        if self.objective_set.is_some() {
            return Err(BuildError::ObjectiveAlreadySet);
        }
        self.objective_set = Some(c);
        self.inst.meta.objective = c;
        Ok(())
    }

    pub(crate) fn cost_coefficients(&self) -> Vec<(usize, f64)> {
        let s = self.s;
        let w = discount_weights(s);
        let (ng, nt, nm) = (s.sets.n_grids(), s.sets.n_periods(), s.sets.n_months());
        let (np, nj, ni, nl) = (s.sets.n_tech(), s.sets.n_sizes(), s.sets.n_forms(), s.sets.n_modes());
        let mut out: Vec<(usize, f64)> = Vec::new();

        for t in 0..nt {
            let cf = w.capex_factor[t];
            let af = w.opex_factor[t];
            let price = blended_price(s, t);
            for g in 0..ng {
                for i in 0..ni {
                    for p in 0..np {
                        for j in 0..nj {
                            let pt = &s.tech.production[p][j][i];
                            out.push((self.vars.index(VarFamily::Ip, &[p, j, i, g, t]), pt.capex_per_kw * pt.p_elec * cf));
                            let op_kg = pt.opex_per_kg + stack_surcharge(s, p, j, i);
                            for m in 0..nm {
                                out.push((
                                    self.vars.index(VarFamily::Pr, &[p, j, i, g, t, m]),
                                    op_kg * s.energy.days[m] * af,
                                ));
                            }
                        }
                    }
                    for j in 0..nj {
                        let st = &s.tech.storage[i][j];
                        out.push((self.vars.index(VarFamily::NsNew, &[i, j, g, t]), st.capex_per_kg * st.cap_kg * cf));
                        // upkeep on installed capacity
                        out.push((
                            self.vars.index(VarFamily::Ns, &[i, j, g, t]),
                            st.opex_per_kg * st.cap_kg * self.year_days * af,
                        ));
                        let fs = &s.tech.station[i][j];
                        out.push((self.vars.index(VarFamily::NfsNew, &[i, j, g, t]), fs.capex * cf));
                        for m in 0..nm {
                            for i2 in 0..ni {
                                out.push((
                                    self.vars.index(VarFamily::Fr, &[i, j, i2, g, t, m]),
                                    fs.opex_per_kg * s.energy.days[m] * af,
                                ));
                            }
                        }
                    }
                    // conversion before export
                    let conv = &s.tech.conversion[i];
                    out.push((self.vars.index(VarFamily::ConvNew, &[i, g, t]), conv.capex * cf));
                    for l in 0..nl {
                        for g2 in 0..ng {
                            if !self.arc_live(i, l, g, g2) {
                                continue;
                            }
                            let conv_kg = conv.opex_per_kg + conv.energy_kwh_per_kg * price;
                            for m in 0..nm {
                                out.push((
                                    self.vars.index(VarFamily::Q, &[i, l, g, g2, t, m]),
                                    conv_kg * s.energy.days[m] * af,
                                ));
                            }
                        }
                    }
                }
                for m in 0..nm {
                    out.push((self.vars.index(VarFamily::Esu, &[g, t, m]), price * s.energy.days[m] * af));
                    out.push((
                        self.vars.index(VarFamily::Watercons, &[g, t, m]),
                        s.water.water_price * s.energy.days[m] * af,
                    ));
                }
            }
            // trucks: purchase on fleet growth, daily operation per truck
            for i in 0..ni {
                for l in 0..nl {
                    let Some(tc) = self.effective_transport(i, l) else { continue };
                    for g in 0..ng {
                        for g2 in 0..ng {
                            if !self.arc_live(i, l, g, g2) {
                                continue;
                            }
                            let ad = s.tech.distances[g][g2];
                            out.push((self.vars.index(VarFamily::TruckNew, &[i, l, g, g2, t]), tc.capex * cf));
                            let per_day = tc.driver_wage * (2.0 * ad / tc.speed + tc.lut)
                                + (tc.fuel_km + tc.maint_km) * 2.0 * ad
                                + tc.general_day;
                            for m in 0..nm {
                                out.push((
                                    self.vars.index(VarFamily::Ntugrid, &[i, l, g, g2, t, m]),
                                    per_day * s.energy.days[m] * af,
                                ));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub(crate) fn ghg_coefficients(&self) -> Vec<(usize, f64)> {
        let s = self.s;
        let (ng, nt, nm) = (s.sets.n_grids(), s.sets.n_periods(), s.sets.n_months());
        let (np, nj, ni, nl) = (s.sets.n_tech(), s.sets.n_sizes(), s.sets.n_forms(), s.sets.n_modes());
        let mut out: Vec<(usize, f64)> = Vec::new();
        for t in 0..nt {
            let years = s.tech.i_capex[t];
            for g in 0..ng {
                for i in 0..ni {
                    for m in 0..nm {
                        // kg emitted per day, weighted to a horizon average,
                        // reported in tonnes
                        let wm = s.energy.days[m] * years / self.total_days / 1000.0;
                        for p in 0..np {
                            for j in 0..nj {
                                out.push((
                                    self.vars.index(VarFamily::Pr, &[p, j, i, g, t, m]),
                                    s.tech.production[p][j][i].ghg_per_kg * wm,
                                ));
                            }
                        }
                    }
                    let wt = self.year_days * years / self.total_days / 1000.0;
                    for j in 0..nj {
                        out.push((
                            self.vars.index(VarFamily::Ns, &[i, j, g, t]),
                            s.tech.storage[i][j].ghg_per_kg_day * s.tech.storage[i][j].cap_kg * wt,
                        ));
                    }
                }
            }
            for i in 0..ni {
                for l in 0..nl {
                    let Some(tc) = self.effective_transport(i, l) else { continue };
                    for g in 0..ng {
                        for g2 in 0..ng {
                            if !self.arc_live(i, l, g, g2) {
                                continue;
                            }
                            let km = 2.0 * s.tech.distances[g][g2];
                            for m in 0..nm {
                                let wm = s.energy.days[m] * years / self.total_days / 1000.0;
                                out.push((
                                    self.vars.index(VarFamily::Ntugrid, &[i, l, g, g2, t, m]),
                                    tc.ghg_km * km * wm,
                                ));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub(crate) fn risk_coefficients(&self) -> Vec<(usize, f64)> {
        let s = self.s;
        let (ng, nt, nm) = (s.sets.n_grids(), s.sets.n_periods(), s.sets.n_months());
        let (np, nj, ni, nl) = (s.sets.n_tech(), s.sets.n_sizes(), s.sets.n_forms(), s.sets.n_modes());
        let total_years: f64 = s.tech.i_capex.iter().sum();
        let mut out: Vec<(usize, f64)> = Vec::new();
        for t in 0..nt {
            let vt = s.tech.i_capex[t] / total_years;
            for g in 0..ng {
                for i in 0..ni {
                    for p in 0..np {
                        for j in 0..nj {
                            out.push((
                                self.vars.index(VarFamily::Np, &[p, j, i, g, t]),
                                s.tech.production[p][j][i].risk_per_unit * vt,
                            ));
                        }
                    }
                    for j in 0..nj {
                        out.push((self.vars.index(VarFamily::Ns, &[i, j, g, t]), s.tech.storage[i][j].risk_per_unit * vt));
                        out.push((self.vars.index(VarFamily::Nfs, &[i, j, g, t]), s.tech.station[i][j].risk_per_unit * vt));
                    }
                }
            }
            for i in 0..ni {
                for l in 0..nl {
                    let Some(tc) = self.effective_transport(i, l) else { continue };
                    for g in 0..ng {
                        for g2 in 0..ng {
                            if !self.arc_live(i, l, g, g2) {
                                continue;
                            }
                            for m in 0..nm {
                                let wm = s.energy.days[m] / self.year_days * vt;
                                out.push((self.vars.index(VarFamily::Ntugrid, &[i, l, g, g2, t, m]), tc.risk_per_truck * wm));
                                out.push((
                                    self.vars.index(VarFamily::Q, &[i, l, g, g2, t, m]),
                                    s.tech.risk_per_kg_transported * wm,
                                ));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Linear expression of a criterion as row coefficients.
    fn criterion_coefficients(&self, c: Criterion) -> Vec<(usize, f64)> {
        match c {
            Criterion::Cost => self.cost_coefficients(),
            Criterion::Ghg => self.ghg_coefficients(),
            Criterion::Risk => self.risk_coefficients(),
        }
    }

    /// Adds epsilon rows for the non-primary criteria. An infinite bound
    /// still adds its (vacuous) row, keeping the row set comparable across
    /// sweep cells.
    pub fn add_epsilon(&mut self, eps: EpsilonBounds) -> Result<(), BuildError> {
        let primary = self.objective_set.ok_or(BuildError::ObjectiveMissing)?;
        for (criterion, bound) in [
            (Criterion::Cost, eps.cost),
            (Criterion::Ghg, eps.ghg),
            (Criterion::Risk, eps.risk),
        ] {
            let Some(bound) = bound else { continue };
            if criterion == primary {
                return Err(BuildError::EpsOnPrimary(criterion));
            }
            let coeffs = self.criterion_coefficients(criterion);
            let mut merged: Vec<(u32, f64)> = coeffs.into_iter().map(|(j, c)| (j as u32, c)).collect();
            merged.retain(|&(_, c)| c != 0.0);
            self.row(format!("eps_{}", criterion.label()), merged, Sense::Le, bound)?;
            match criterion {
                Criterion::Cost => self.inst.meta.eps_cost = Some(bound),
                Criterion::Ghg => self.inst.meta.eps_ghg = Some(bound),
                Criterion::Risk => self.inst.meta.eps_risk = Some(bound),
            }
        }
        Ok(())
    }

    pub fn finish(self) -> Result<BuiltModel, BuildError> {
        if self.objective_set.is_none() {
            return Err(BuildError::ObjectiveMissing);
        }
        self.inst.check_structure().map_err(|e| BuildError::Structure(e.0))?;
        Ok(BuiltModel { instance: self.inst, vars: self.vars })
    }

    fn row(&mut self, label: String, coeffs: Vec<(u32, f64)>, sense: Sense, rhs: f64) -> Result<(), BuildError> {
        self.inst.add_row(label, coeffs, sense, rhs).map_err(|e| BuildError::Structure(e.0))?;
        Ok(())
    }
}

struct TransportCost {
    capex: f64,
    fuel_km: f64,
    maint_km: f64,
    ghg_km: f64,
    driver_wage: f64,
    general_day: f64,
    speed: f64,
    lut: f64,
    risk_per_truck: f64,
}
