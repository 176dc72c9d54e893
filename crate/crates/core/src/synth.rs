//! Synthetic desk-scale scenarios.
//!
//! These builders produce small, fully validated scenarios used across the
//! test-suite: a two-grid reference mirroring the `data/desk` bundle and a
//! family of tiny instances whose integer domains are small enough for
//! exhaustive enumeration.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::scenario::{
    ConversionTech, DemandParams, EnergyParams, Form, GeographyMasks, ProductionTech,
    RetrofitParams, Scenario, ScenarioOptions, Sets, SizeClass, StationTech, StorageTech,
    Technology, TechnoEconomics, TransportMode, TransportTech, WaterParams, WaterRestriction,
};

fn production_tech(
    p: Technology,
    capex_per_kw: f64,
    opex_per_kg: f64,
    ghg_per_kg: f64,
    risk_per_unit: f64,
) -> ProductionTech {
    let _ = p;
    ProductionTech {
        p_elec: 300.0,
        capex_per_kw,
        opex_per_kg,
        elcf_min: 0.0,
        elcf_max: 660.0,
        ghg_per_kg,
        risk_per_unit,
    }
}

fn tube_trailer() -> TransportTech {
    TransportTech {
        tcap: 670.0,
        capex: 500_000.0,
        speed: 50.0,
        lut: 1.5,
        tma: 18.0,
        driver_wage: 20.47,
        fuel_cost_km: 0.45,
        maint_km: 0.04,
        general_day: 7.32,
        ghg_per_km: 0.35,
        risk_per_truck: 5.0,
    }
}

fn retrofit() -> RetrofitParams {
    RetrofitParams {
        fcev_cons: 13.2,
        capex: 510_000.0,
        fuel_cost_km: 0.0,
        maint_km: 0.03,
        ghg_per_km: 0.0,
    }
}

fn gas_compressor() -> ConversionTech {
    ConversionTech { cap_kg_day: 3024.0, capex: 213_000.0, opex_per_kg: 0.007, energy_kwh_per_kg: 2.66 }
}

/// Two grids ("north" is water-stressed, "south" is not), two periods, two
/// months (February and August), alkaline vs PEM minis, gas pathway with a
/// single tube-trailer mode. The in-code twin of the `data/desk` bundle.
///
/// The default options carry the 0.1% water withdrawal cap so that the
/// summer month forces some south-to-north transport.
pub fn desk_reference() -> Scenario {
    let sets = Sets {
        grids: vec!["north".into(), "south".into()],
        period_years: vec![2025, 2026],
        months: vec![2, 8],
        technologies: vec![Technology::Alkaline, Technology::Pem],
        sizes: vec![SizeClass::Mini],
        forms: vec![Form::Gas],
        modes: vec![TransportMode::TubeTrailer],
    };
    let demand = DemandParams {
        fc_res: 0.009,
        fc_gds: 0.003,
        fc_tour: 0.003,
        tpop: vec![vec![0.7, 0.7], vec![0.3, 0.3]],
        sfc_tour: vec![vec![0.2, 0.8], vec![0.2, 0.8]],
        g_tour: vec![0.5, 0.5],
        etoe: 11_630.0,
        fhv: 33.33,
        r_sub: 0.025,
        growth: vec![1.0, 1.25],
        tour_growth: vec![1.0, 1.25],
        pci_multiplies: false,
    };
    let energy = EnergyParams {
        esp_cap: vec![vec![4000.0, 0.0, 0.0], vec![0.0, 4000.0, 0.0]],
        pv_cf: vec![0.12, 0.24],
        wind_cf: vec![0.30, 0.18],
        month_hours: vec![672.0, 744.0],
        days: vec![28.0, 31.0],
        e_co: vec![vec![1.0, 1.0, 0.0], vec![1.1, 1.1, 0.0]],
        margin: 0.0,
        gamma: vec![vec![50.0], vec![52.0]],
        pv_mask: vec![true, false],
        wind_mask: vec![false, true],
        elec_price: vec![vec![0.034, 0.034], vec![0.025, 0.025], vec![0.06, 0.06]],
    };
    let water = WaterParams {
        srf_vul: vec![3.0, 1.0],
        sot_vul: vec![3.0, 1.0],
        vul_saison: vec![vec![1.0, 2.0], vec![1.0, 1.0]],
        surface_share: 0.8,
        ground_share: 0.2,
        elwuc: 9.0,
        clean_water: vec![0.02, 0.02],
        min_cw: 0.0,
        max_cw: 0.001,
        vul_min: 1.0,
        vul_max: 5.0,
        water_price: 2.18,
    };
    let tech = TechnoEconomics {
        production: vec![
            vec![vec![production_tech(Technology::Alkaline, 3200.0, 0.15, 1.4, 1.0)]],
            vec![vec![production_tech(Technology::Pem, 3500.0, 0.22, 0.8, 1.4)]],
        ],
        lifetime_hours: vec![90_000.0, 80_000.0],
        replacement_share: 0.35,
        storage: vec![vec![StorageTech {
            cap_kg: 350.0,
            capex_per_kg: 500.0,
            opex_per_kg: 0.02,
            ghg_per_kg_day: 0.45,
            risk_per_unit: 2.0,
        }]],
        station: vec![vec![StationTech {
            cap_kg_day: 150.0,
            capex: 410_000.0,
            opex_per_kg: 0.39,
            risk_per_unit: 0.5,
        }]],
        transport: vec![vec![Some(tube_trailer())]],
        retrofit: retrofit(),
        conversion: vec![gas_compressor()],
        risk_per_kg_transported: 0.002,
        dr: 0.06,
        inflation: 0.02,
        i_capex: vec![1.0, 1.0],
        distances: vec![vec![0.0, 60.0], vec![60.0, 0.0]],
    };
    let geo = GeographyMasks {
        prod_ban: vec![vec![false, false], vec![false, false]],
        central_grids: vec![true, true],
        export_ban: vec![false, false],
        demand_grids: vec![true, true],
    };
    Scenario {
        sets,
        demand,
        energy,
        water,
        tech,
        geo,
        options: ScenarioOptions {
            retrofit: false,
            water_restriction: WaterRestriction::Capped,
            storage_autonomy_days: 3.0,
            unit_cap: 3,
            truck_cap: 3,
        },
    }
}

/// A single-grid scenario with one technology/size/form; the smallest
/// structure that still exercises every constraint family except transport.
pub fn tiny_single_grid(months: &[u32], demand_scale: f64, water_cap: bool, unit_cap: u32) -> Scenario {
    let nm = months.len();
    let month_days = |m: u32| -> f64 {
        match m {
            2 => 28.0,
            4 | 6 | 9 | 11 => 30.0,
            _ => 31.0,
        }
    };
    let days: Vec<f64> = months.iter().map(|&m| month_days(m)).collect();
    let hours: Vec<f64> = days.iter().map(|d| 24.0 * d).collect();
    let sets = Sets {
        grids: vec!["solo".into()],
        period_years: vec![2025],
        months: months.to_vec(),
        technologies: vec![Technology::Alkaline],
        sizes: vec![SizeClass::Mini],
        forms: vec![Form::Gas],
        modes: vec![TransportMode::TubeTrailer],
    };
    let demand = DemandParams {
        fc_res: 0.006 * demand_scale,
        fc_gds: 0.002 * demand_scale,
        fc_tour: 0.002 * demand_scale,
        tpop: vec![vec![1.0]],
        sfc_tour: vec![even_shares(nm)],
        g_tour: vec![1.0],
        etoe: 11_630.0,
        fhv: 33.33,
        r_sub: 0.025,
        growth: vec![1.0],
        tour_growth: vec![1.0],
        pci_multiplies: false,
    };
    let energy = EnergyParams {
        esp_cap: vec![vec![3000.0, 0.0, 0.0]],
        pv_cf: vec![0.2; nm],
        wind_cf: vec![0.2; nm],
        month_hours: hours,
        days,
        e_co: vec![vec![1.0, 1.0, 0.0]],
        margin: 0.0,
        gamma: vec![vec![50.0]],
        pv_mask: vec![true],
        wind_mask: vec![false],
        elec_price: vec![vec![0.03], vec![0.03], vec![0.06]],
    };
    let water = WaterParams {
        srf_vul: vec![1.0],
        sot_vul: vec![1.0],
        vul_saison: vec![vec![1.0; nm]],
        surface_share: 0.8,
        ground_share: 0.2,
        elwuc: 9.0,
        clean_water: vec![0.02],
        min_cw: 0.0,
        max_cw: 0.001,
        vul_min: 1.0,
        vul_max: 5.0,
        water_price: 2.18,
    };
    let tech = TechnoEconomics {
        production: vec![vec![vec![production_tech(Technology::Alkaline, 3200.0, 0.15, 1.4, 1.0)]]],
        lifetime_hours: vec![90_000.0],
        replacement_share: 0.35,
        storage: vec![vec![StorageTech {
            cap_kg: 350.0,
            capex_per_kg: 500.0,
            opex_per_kg: 0.02,
            ghg_per_kg_day: 0.45,
            risk_per_unit: 2.0,
        }]],
        station: vec![vec![StationTech {
            cap_kg_day: 150.0,
            capex: 410_000.0,
            opex_per_kg: 0.39,
            risk_per_unit: 0.5,
        }]],
        transport: vec![vec![Some(tube_trailer())]],
        retrofit: retrofit(),
        conversion: vec![gas_compressor()],
        risk_per_kg_transported: 0.002,
        dr: 0.06,
        inflation: 0.02,
        i_capex: vec![1.0],
        distances: vec![vec![0.0]],
    };
    let geo = GeographyMasks {
        prod_ban: vec![vec![false]],
        central_grids: vec![true],
        export_ban: vec![false],
        demand_grids: vec![true],
    };
    Scenario {
        sets,
        demand,
        energy,
        water,
        tech,
        geo,
        options: ScenarioOptions {
            retrofit: false,
            water_restriction: if water_cap { WaterRestriction::Capped } else { WaterRestriction::Off },
            storage_autonomy_days: 3.0,
            unit_cap,
            truck_cap: 1,
        },
    }
}

/// Two grids where only the first may produce and the second may not export;
/// the importing grid is served entirely by transport. Integer domains stay
/// enumerable.
pub fn tiny_two_grid(months: &[u32], demand_scale: f64, retrofit_on: bool, distance_km: f64) -> Scenario {
    let mut s = tiny_single_grid(months, demand_scale, false, 1);
    let nm = months.len();
    s.sets.grids = vec!["maker".into(), "taker".into()];
    s.demand.tpop = vec![vec![0.6], vec![0.4]];
    s.demand.g_tour = vec![0.6, 0.4];
    s.energy.esp_cap = vec![vec![3000.0, 0.0, 0.0], vec![0.0, 0.0, 0.0]];
    s.energy.pv_mask = vec![true, false];
    s.energy.wind_mask = vec![false, false];
    s.water.srf_vul = vec![1.0, 1.0];
    s.water.sot_vul = vec![1.0, 1.0];
    s.water.vul_saison = vec![vec![1.0; nm], vec![1.0; nm]];
    s.tech.distances = vec![vec![0.0, distance_km], vec![distance_km, 0.0]];
    s.geo = GeographyMasks {
        // the taker grid never hosts production units
        prod_ban: vec![vec![false], vec![true]],
        central_grids: vec![true, true],
        export_ban: vec![false, true],
        demand_grids: vec![true, true],
    };
    s.options.retrofit = retrofit_on;
    s.options.unit_cap = 1;
    s.options.truck_cap = 1;
    // one unit must cover both grids plus retrofit losses
    s.demand.fc_res *= 0.9;
    s.demand.fc_gds *= 0.9;
    s.demand.fc_tour *= 0.9;
    s
}

fn even_shares(n: usize) -> Vec<f64> {
    let mut v = vec![1.0 / n as f64; n];
    let sum: f64 = v.iter().sum();
    let last = v.len() - 1;
    v[last] += 1.0 - sum;
    v
}

/// Named desk-scale instances for the solver-vs-enumeration equivalence
/// suite. Every instance keeps the product of its integer domains well under
/// 1e5; a couple are deliberately infeasible.
pub fn tiny_scenarios() -> Vec<(String, Scenario)> {
    let mut out: Vec<(String, Scenario)> = Vec::new();

    for (k, &scale) in [0.6, 1.0, 1.5].iter().enumerate() {
        out.push((format!("solo-jan-x{k}"), tiny_single_grid(&[1], scale, false, 2)));
        out.push((format!("solo-feb-water-x{k}"), tiny_single_grid(&[2], scale, true, 2)));
        out.push((format!("solo-two-months-x{k}"), tiny_single_grid(&[2, 8], scale, false, 2)));
    }
    // two periods, unit counts capped at one
    for (k, &scale) in [0.8, 1.2].iter().enumerate() {
        let mut s = tiny_single_grid(&[7], scale, false, 1);
        s.sets.period_years = vec![2025, 2026];
        s.demand.tpop = vec![vec![1.0, 1.0]];
        s.demand.sfc_tour = vec![vec![1.0], vec![1.0]];
        s.demand.growth = vec![1.0, 1.1];
        s.demand.tour_growth = vec![1.0, 1.1];
        s.energy.e_co = vec![vec![1.0, 1.0, 0.0], vec![1.1, 1.1, 0.0]];
        s.energy.elec_price = vec![vec![0.03, 0.03], vec![0.03, 0.03], vec![0.06, 0.06]];
        s.water.clean_water = vec![0.02, 0.02];
        s.tech.i_capex = vec![1.0, 1.0];
        s.geo.prod_ban = vec![vec![false, false]];
        out.push((format!("solo-two-periods-x{k}"), s));
    }
    // transport-coupled pairs
    for (k, &(scale, dist)) in [(0.7, 40.0), (1.0, 60.0), (1.3, 90.0)].iter().enumerate() {
        out.push((format!("pair-thermal-x{k}"), tiny_two_grid(&[6], scale, false, dist)));
        out.push((format!("pair-retrofit-x{k}"), tiny_two_grid(&[6], scale, true, dist)));
    }
    for (k, &scale) in [0.8, 1.1].iter().enumerate() {
        out.push((format!("pair-two-months-x{k}"), tiny_two_grid(&[2, 8], scale, false, 70.0)));
    }
    // richer discount structure
    let mut disc = tiny_single_grid(&[5], 1.0, false, 2);
    disc.tech.dr = 0.10;
    disc.tech.inflation = 0.03;
    out.push(("solo-discounted".into(), disc));
    // a real minimum-load band (a fully forced band would clash with the
    // equality balance on a grid that cannot export)
    let mut band = tiny_single_grid(&[3], 0.9, false, 2);
    band.tech.production[0][0][0].elcf_min = 300.0;
    out.push(("solo-min-load".into(), band));
    // water cap loose vs tight but still feasible
    let mut tight = tiny_single_grid(&[8], 0.8, true, 2);
    tight.water.clean_water = vec![0.005];
    out.push(("solo-water-tight".into(), tight));
    // infeasible: energy availability below what demand requires
    let mut starved = tiny_single_grid(&[4], 1.0, false, 2);
    starved.energy.esp_cap = vec![vec![10.0, 0.0, 0.0]];
    out.push(("solo-energy-starved".into(), starved));
    // infeasible: water cap below the demand-implied withdrawal
    let mut dry = tiny_single_grid(&[9], 1.0, true, 2);
    dry.water.clean_water = vec![0.0004];
    out.push(("solo-water-starved".into(), dry));

    out
}
