//! Scenario data model: index sets, parameter tables, validation rules and
//! demand calibration.
//!
//! A [`Scenario`] is the complete immutable input of a model run. It is
//! normally produced by the bundle loader in the `hsc-cli` crate, but can be
//! built directly for tests and synthetic instances. After construction it
//! must pass [`validate`] before being handed to the model builder.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

/// Electricity source feeding the electrolyzers. `Grid` exists in the index
/// set but imports are fixed to zero: the chain runs on renewables only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnergySource {
    Pv,
    Wind,
    Grid,
}

impl EnergySource {
    pub const ALL: [EnergySource; 3] = [EnergySource::Pv, EnergySource::Wind, EnergySource::Grid];

    pub fn label(self) -> &'static str {
        match self {
            EnergySource::Pv => "PV",
            EnergySource::Wind => "Wind",
            EnergySource::Grid => "Grid",
        }
    }
}

/// Electrolysis technology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Technology {
    Pem,
    Alkaline,
}

impl Technology {
    pub fn label(self) -> &'static str {
        match self {
            Technology::Pem => "PEM",
            Technology::Alkaline => "AE",
        }
    }
}

/// Facility size class, shared by production, storage and station units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SizeClass {
    Mini,
    Small,
    Medium,
    Large,
}

impl SizeClass {
    pub fn label(self) -> &'static str {
        match self {
            SizeClass::Mini => "mini",
            SizeClass::Small => "small",
            SizeClass::Medium => "medium",
            SizeClass::Large => "large",
        }
    }

    pub fn is_central(self) -> bool {
        matches!(self, SizeClass::Medium | SizeClass::Large)
    }
}

/// Physical form of the hydrogen. Storage and station technologies mirror
/// this set one-to-one (gas storage serves gaseous hydrogen and so on), so
/// the same type indexes all three.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Form {
    Gas,
    Liquid,
}

impl Form {
    pub fn label(self) -> &'static str {
        match self {
            Form::Gas => "gas",
            Form::Liquid => "liquid",
        }
    }
}

/// Road transport mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransportMode {
    TubeTrailer,
    TankerTruck,
}

impl TransportMode {
    pub fn label(self) -> &'static str {
        match self {
            TransportMode::TubeTrailer => "tube",
            TransportMode::TankerTruck => "tanker",
        }
    }
}

/// Index sets of one scenario. Grids and periods are data-defined; the
/// technology-style sets are subsets of the fixed enums above so that desk
/// instances can shrink them.
#[derive(Debug, Clone, PartialEq)]
pub struct Sets {
    /// Grid labels, one per spatial zone.
    pub grids: Vec<String>,
    /// Calendar year labels of the planning periods.
    pub period_years: Vec<u32>,
    /// Calendar month numbers (1..=12). Full-year datasets list all twelve;
    /// desk instances may keep a subset.
    pub months: Vec<u32>,
    pub technologies: Vec<Technology>,
    pub sizes: Vec<SizeClass>,
    pub forms: Vec<Form>,
    pub modes: Vec<TransportMode>,
}

impl Sets {
    pub fn n_grids(&self) -> usize {
        self.grids.len()
    }
    pub fn n_periods(&self) -> usize {
        self.period_years.len()
    }
    pub fn n_months(&self) -> usize {
        self.months.len()
    }
    pub fn n_tech(&self) -> usize {
        self.technologies.len()
    }
    pub fn n_sizes(&self) -> usize {
        self.sizes.len()
    }
    pub fn n_forms(&self) -> usize {
        self.forms.len()
    }
    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }
}

/// Hydrogen demand drivers (Ch. "key data": fuel consumptions, population and
/// tourist concentration, seasonality, unit conversions).
#[derive(Debug, Clone, PartialEq)]
pub struct DemandParams {
    /// Resident transport fuel consumption (ktoe, daily-normalized scale).
    pub fc_res: f64,
    /// Goods transport fuel consumption (same scale as `fc_res`).
    /// Nomenclature ambiguity: some sources label this FCmar; both name the
    /// goods-transport term and are treated as one parameter.
    pub fc_gds: f64,
    /// Tourist transport fuel consumption (same scale).
    pub fc_tour: f64,
    /// Resident concentration rate per `[grid][period]`; columns sum to 1.
    pub tpop: Vec<Vec<f64>>,
    /// Seasonal tourist fuel share per `[period][month]`; rows sum to 1.
    pub sfc_tour: Vec<Vec<f64>>,
    /// Tourist concentration rate per grid; sums to 1 (±1e-3, the published
    /// column only carries two decimals).
    pub g_tour: Vec<f64>,
    /// kWh per tonne of oil equivalent (11,630).
    pub etoe: f64,
    /// Lower heating value of hydrogen (kWh/kg). One parameter also known as
    /// PCI; both symbols denote the same heating value.
    pub fhv: f64,
    /// Hydrogen substitution rate for transport fuel (0.025).
    pub r_sub: f64,
    /// Demographic growth multiplier per period, applied to the resident and
    /// goods terms.
    pub growth: Vec<f64>,
    /// Tourism growth multiplier per period, applied to the tourist term.
    pub tour_growth: Vec<f64>,
    /// When true the demand formula multiplies by the heating value instead
    /// of dividing, reproducing the printed form of the equation verbatim.
    /// The default (false) is the dimensionally consistent reading.
    pub pci_multiplies: bool,
}

/// Renewable energy availability parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyParams {
    /// Installable power capacity per `[grid][source]` (kW).
    pub esp_cap: Vec<Vec<f64>>,
    /// Monthly PV capacity factor.
    pub pv_cf: Vec<f64>,
    /// Monthly wind capacity factor.
    pub wind_cf: Vec<f64>,
    /// Hours per month.
    pub month_hours: Vec<f64>,
    /// Days per month.
    pub days: Vec<f64>,
    /// Capacity evolution multiplier per `[period][source]`, nondecreasing
    /// in the period for each source.
    pub e_co: Vec<Vec<f64>>,
    /// Margin of error on energy consumption (the `er` safety factor).
    pub margin: f64,
    /// Electricity use of the electrolyzers per `[technology][size]`
    /// (kWh per kg of hydrogen).
    pub gamma: Vec<Vec<f64>>,
    /// PV eligibility per grid (false = banned).
    pub pv_mask: Vec<bool>,
    /// Wind eligibility per grid.
    pub wind_mask: Vec<bool>,
    /// Electricity price per `[source][period]` (EUR/kWh).
    pub elec_price: Vec<Vec<f64>>,
}

/// Water vulnerability and withdrawal parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterParams {
    /// Surface water vulnerability index per grid, integral in {1,2,3}.
    pub srf_vul: Vec<f64>,
    /// Groundwater vulnerability index per grid, integral in {1,2,3}.
    pub sot_vul: Vec<f64>,
    /// Precipitation deficit index per `[grid][month]`, integral in {1,2}.
    pub vul_saison: Vec<Vec<f64>>,
    /// Share of surface water in total use (0.8 for Corsica).
    pub surface_share: f64,
    /// Share of groundwater (0.2).
    pub ground_share: f64,
    /// Electrolysis water use (liters per kg of hydrogen), default 9.
    pub elwuc: f64,
    /// Potable water distributed per period (million m3), default 50.
    pub clean_water: Vec<f64>,
    /// Minimum withdrawal rate (fraction of `clean_water`), default 0.
    pub min_cw: f64,
    /// Maximum withdrawal rate (fraction of `clean_water`).
    pub max_cw: f64,
    /// Lower bound of the final vulnerability index in the withdrawal
    /// constraint, default 1.
    pub vul_min: f64,
    /// Upper bound of the final vulnerability index, default 5.
    pub vul_max: f64,
    /// Water price (EUR/m3), default 2.18.
    pub water_price: f64,
}

impl WaterParams {
    pub const DEFAULT_ELWUC: f64 = 9.0;
    pub const DEFAULT_CLEAN_WATER: f64 = 50.0;
    pub const DEFAULT_VUL_MIN: f64 = 1.0;
    pub const DEFAULT_VUL_MAX: f64 = 5.0;
    pub const DEFAULT_WATER_PRICE: f64 = 2.18;
    pub const DEFAULT_SURFACE_SHARE: f64 = 0.8;
    pub const DEFAULT_GROUND_SHARE: f64 = 0.2;
}

/// One electrolyzer class (technology x size x hydrogen form).
#[derive(Debug, Clone, PartialEq)]
pub struct ProductionTech {
    /// Assigned electrical power (kW).
    pub p_elec: f64,
    /// Investment cost (EUR per kW).
    pub capex_per_kw: f64,
    /// Operating cost (EUR per kg produced).
    pub opex_per_kg: f64,
    /// Minimum capacity factor (hours per month).
    pub elcf_min: f64,
    /// Maximum capacity factor (hours per month).
    pub elcf_max: f64,
    /// Emission factor (kgCO2e per kg produced). Calibrated placeholder, see
    /// the dataset notes.
    pub ghg_per_kg: f64,
    /// Risk index contribution per installed unit.
    pub risk_per_unit: f64,
}

/// One storage class (form x size).
#[derive(Debug, Clone, PartialEq)]
pub struct StorageTech {
    /// Capacity per unit (kg).
    pub cap_kg: f64,
    /// Investment cost (EUR per kg of capacity).
    pub capex_per_kg: f64,
    /// Operating cost (EUR per kg held and day).
    pub opex_per_kg: f64,
    /// Emission factor (kgCO2e per kg held and day). Calibrated placeholder.
    pub ghg_per_kg_day: f64,
    /// Risk index contribution per installed unit.
    pub risk_per_unit: f64,
}

/// One refuelling station class (form x size).
#[derive(Debug, Clone, PartialEq)]
pub struct StationTech {
    /// Dispensing capacity per unit (kg/day).
    pub cap_kg_day: f64,
    /// Investment cost (EUR per station).
    pub capex: f64,
    /// Operating cost (EUR per kg dispensed).
    pub opex_per_kg: f64,
    /// Risk index contribution per installed unit.
    pub risk_per_unit: f64,
}

/// One transport option (form x mode). A `None` entry in the table bans the
/// combination outright.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportTech {
    /// Payload per trip (kg).
    pub tcap: f64,
    /// Truck investment cost (EUR).
    pub capex: f64,
    /// Average speed (km/h).
    pub speed: f64,
    /// Load/unload time (hours per trip).
    pub lut: f64,
    /// Daily availability (hours per day).
    pub tma: f64,
    /// Driver wage (EUR/h).
    pub driver_wage: f64,
    /// Fuel cost (EUR/km).
    pub fuel_cost_km: f64,
    /// Maintenance cost (EUR/km).
    pub maint_km: f64,
    /// General expenses (EUR per truck and day).
    pub general_day: f64,
    /// Usage-phase emissions (kgCO2e/km). Calibrated placeholder.
    pub ghg_per_km: f64,
    /// Risk index contribution per truck in service.
    pub risk_per_truck: f64,
}

/// Retrofitted fuel-cell truck parameters. When the retrofit option is on,
/// every transport mode switches to these cost/emission figures and the
/// trucks consume delivered hydrogen.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrofitParams {
    /// Hydrogen consumption (kg per 100 km).
    pub fcev_cons: f64,
    /// Truck investment cost (EUR).
    pub capex: f64,
    /// Fuel cost (EUR/km); zero because the fuel is self-supplied hydrogen
    /// already accounted as production.
    pub fuel_cost_km: f64,
    /// Maintenance cost (EUR/km).
    pub maint_km: f64,
    /// Usage-phase emissions (kgCO2e/km).
    pub ghg_per_km: f64,
}

/// Compressor (gas) or liquefier (liquid) attached to exporting grids.
#[derive(Debug, Clone, PartialEq)]
pub struct ConversionTech {
    /// Throughput per unit (kg/day).
    pub cap_kg_day: f64,
    /// Investment cost (EUR per unit).
    pub capex: f64,
    /// Operating cost (EUR per kg converted).
    pub opex_per_kg: f64,
    /// Electricity use (kWh per kg converted), charged at the blended
    /// renewable tariff.
    pub energy_kwh_per_kg: f64,
}

/// Techno-economic parameter block.
#[derive(Debug, Clone, PartialEq)]
pub struct TechnoEconomics {
    /// Production classes per `[technology][size][form]`.
    pub production: Vec<Vec<Vec<ProductionTech>>>,
    /// Electrolyzer stack lifetime per technology (hours).
    pub lifetime_hours: Vec<f64>,
    /// Share of the unit capex spent on a stack replacement; amortized as a
    /// per-kg operating surcharge to keep the model linear.
    pub replacement_share: f64,
    /// Storage classes per `[form][size]`.
    pub storage: Vec<Vec<StorageTech>>,
    /// Station classes per `[form][size]`.
    pub station: Vec<Vec<StationTech>>,
    /// Transport options per `[form][mode]`; `None` = banned pair.
    pub transport: Vec<Vec<Option<TransportTech>>>,
    pub retrofit: RetrofitParams,
    /// Conversion units per form (compressor for gas, liquefier for liquid).
    pub conversion: Vec<ConversionTech>,
    /// Risk index contribution per kg transported (on top of the per-truck
    /// weight).
    pub risk_per_kg_transported: f64,
    /// Discount rate.
    pub dr: f64,
    /// Inflation rate.
    pub inflation: f64,
    /// Years per period; the reference datasets fix one year per period.
    pub i_capex: Vec<f64>,
    /// Inter-grid distances (km), symmetric with zero diagonal.
    pub distances: Vec<Vec<f64>>,
}

/// Geographic restriction masks.
#[derive(Debug, Clone, PartialEq)]
pub struct GeographyMasks {
    /// Production installation ban per `[grid][period]`, expanded to every
    /// technology/size/form.
    pub prod_ban: Vec<Vec<bool>>,
    /// Grids that may host medium/large (centralized) production units.
    pub central_grids: Vec<bool>,
    /// Grids forbidden to export hydrogen.
    pub export_ban: Vec<bool>,
    /// Grids eligible for refuelling stations (those with nonzero demand).
    pub demand_grids: Vec<bool>,
}

/// Water restriction switch of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaterRestriction {
    Off,
    /// Withdrawal capped; the rate itself lives in [`WaterParams::max_cw`].
    Capped,
}

/// Scenario switches.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOptions {
    /// Replace the thermal truck fleet by hydrogen retrofits.
    pub retrofit: bool,
    pub water_restriction: WaterRestriction,
    /// Local buffer requirement (days of demand), default 3.
    pub storage_autonomy_days: f64,
    /// Upper bound on every unit-count integer variable; 0 = derive from
    /// peak demand.
    pub unit_cap: u32,
    /// Upper bound on per-arc truck counts; 0 = derive from peak demand.
    pub truck_cap: u32,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        ScenarioOptions {
            retrofit: false,
            water_restriction: WaterRestriction::Off,
            storage_autonomy_days: 3.0,
            unit_cap: 0,
            truck_cap: 0,
        }
    }
}

/// The complete immutable input dataset of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub sets: Sets,
    pub demand: DemandParams,
    pub energy: EnergyParams,
    pub water: WaterParams,
    pub tech: TechnoEconomics,
    pub geo: GeographyMasks,
    pub options: ScenarioOptions,
}

/// One validation finding: the violated rule plus the offending index.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Stable rule identifier, e.g. `tpop_sum`.
    pub rule: &'static str,
    pub detail: String,
}

/// Outcome of [`validate`]; empty means the scenario is usable.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, rule: &'static str, detail: String) {
        self.violations.push(Violation { rule, detail });
    }
}

fn check_len(report: &mut ValidationReport, rule: &'static str, what: &str, got: usize, want: usize) {
    if got != want {
        report.push(rule, format!("{what}: expected {want} entries, found {got}"));
    }
}

fn check_matrix(
    report: &mut ValidationReport,
    rule: &'static str,
    what: &str,
    m: &[Vec<f64>],
    rows: usize,
    cols: usize,
) {
    check_len(report, rule, what, m.len(), rows);
    for (i, row) in m.iter().enumerate() {
        if row.len() != cols {
            report.push(rule, format!("{what}: row {i} has {} entries, expected {cols}", row.len()));
        }
    }
}

fn is_integral(v: f64) -> bool {
    (v - crate::float::round(v)).abs() < 1e-9
}

/// Checks every declared invariant and returns the full list of violations.
/// Violations are data, not failures: the function itself never errors.
pub fn validate(s: &Scenario) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let sets = &s.sets;
    let (ng, nt, nm) = (sets.n_grids(), sets.n_periods(), sets.n_months());

    // --- Sets ---
    if ng == 0 {
        rep.push("sets_nonempty", "grid set is empty".into());
    }
    if nt == 0 {
        rep.push("sets_nonempty", "period set is empty".into());
    }
    if nm == 0 {
        rep.push("sets_nonempty", "month set is empty".into());
    }
    for s in [
        (sets.technologies.is_empty(), "technology"),
        (sets.sizes.is_empty(), "size"),
        (sets.forms.is_empty(), "form"),
        (sets.modes.is_empty(), "mode"),
    ] {
        if s.0 {
            rep.push("sets_nonempty", format!("{} set is empty", s.1));
        }
    }
    for (i, gi) in sets.grids.iter().enumerate() {
        for gj in sets.grids.iter().skip(i + 1) {
            if gi == gj {
                rep.push("grid_unique", format!("duplicate grid identifier '{gi}'"));
            }
        }
    }
    for &m in &sets.months {
        if !(1..=12).contains(&m) {
            rep.push("month_range", format!("month number {m} outside 1..=12"));
        }
    }

    // --- Demand ---
    let d = &s.demand;
    check_matrix(&mut rep, "table_shape", "Tpop", &d.tpop, ng, nt);
    check_matrix(&mut rep, "table_shape", "SFCtour", &d.sfc_tour, nt, nm);
    check_len(&mut rep, "table_shape", "Gtour", d.g_tour.len(), ng);
    check_len(&mut rep, "table_shape", "growth", d.growth.len(), nt);
    check_len(&mut rep, "table_shape", "tour_growth", d.tour_growth.len(), nt);
    if d.tpop.len() == ng && d.tpop.iter().all(|r| r.len() == nt) {
        for t in 0..nt {
            let sum: f64 = d.tpop.iter().map(|row| row[t]).sum();
            if (sum - 1.0).abs() > 1e-9 {
                rep.push("tpop_sum", format!("Tpop sum != 1 at t={} (sum={sum:.12})", sets.period_years[t]));
            }
        }
    }
    let gsum: f64 = d.g_tour.iter().sum();
    if (gsum - 1.0).abs() > 1e-3 {
        rep.push("gtour_sum", format!("Gtour sum != 1 (sum={gsum:.6})"));
    }
    for (g, row) in d.tpop.iter().enumerate() {
        for (t, &v) in row.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                rep.push("fraction_range", format!("Tpop[{},{}]={v} outside [0,1]", sets.grids[g], t));
            }
        }
    }
    for (t, row) in d.sfc_tour.iter().enumerate() {
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            rep.push("sfctour_sum", format!("SFCtour sum != 1 at t={t} (sum={sum:.9})"));
        }
        for (m, &v) in row.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                rep.push("fraction_range", format!("SFCtour[{t},{m}]={v} outside [0,1]"));
            }
        }
    }
    for (g, &v) in d.g_tour.iter().enumerate() {
        if !(0.0..=1.0).contains(&v) {
            rep.push("fraction_range", format!("Gtour[{}]={v} outside [0,1]", sets.grids[g]));
        }
    }
    if d.etoe <= 0.0 {
        rep.push("positive_param", format!("Etoe={} must be > 0", d.etoe));
    }
    if d.fhv <= 0.0 {
        rep.push("positive_param", format!("FHV={} must be > 0", d.fhv));
    }
    if !(d.r_sub > 0.0 && d.r_sub < 1.0) {
        rep.push("rsub_range", format!("Rsub={} outside (0,1)", d.r_sub));
    }

    // --- Energy ---
    let e = &s.energy;
    check_matrix(&mut rep, "table_shape", "ESPcap", &e.esp_cap, ng, 3);
    check_len(&mut rep, "table_shape", "PVCF", e.pv_cf.len(), nm);
    check_len(&mut rep, "table_shape", "WindCF", e.wind_cf.len(), nm);
    check_len(&mut rep, "table_shape", "Mh", e.month_hours.len(), nm);
    check_len(&mut rep, "table_shape", "Nd", e.days.len(), nm);
    check_matrix(&mut rep, "table_shape", "eCo", &e.e_co, nt, 3);
    check_len(&mut rep, "table_shape", "pv_mask", e.pv_mask.len(), ng);
    check_len(&mut rep, "table_shape", "wind_mask", e.wind_mask.len(), ng);
    check_matrix(&mut rep, "table_shape", "elec_price", &e.elec_price, 3, nt);
    for (m, &cf) in e.pv_cf.iter().chain(e.wind_cf.iter()).enumerate() {
        if !(0.0..=1.0).contains(&cf) {
            rep.push("cf_range", format!("capacity factor entry {m} = {cf} outside [0,1]"));
        }
    }
    if e.month_hours.len() == nm && e.days.len() == nm {
        if nm == 12 {
            let total: f64 = e.month_hours.iter().sum();
            if (total - 8760.0).abs() > 1e-6 && (total - 8784.0).abs() > 1e-6 {
                rep.push("month_hours_sum", format!("sum of Mh = {total}, expected 8760 or 8784"));
            }
        } else {
            // Partial month sets (desk instances) must at least stay
            // self-consistent.
            for (m, (&h, &d)) in e.month_hours.iter().zip(e.days.iter()).enumerate() {
                if (h - 24.0 * d).abs() > 1e-6 {
                    rep.push("month_hours_days", format!("Mh[{}] = {h} != 24*Nd = {}", sets.months[m], 24.0 * d));
                }
            }
        }
        for (m, &d) in e.days.iter().enumerate() {
            if !(28.0..=31.0).contains(&d) || !is_integral(d) {
                rep.push("days_range", format!("Nd[{}] = {d} outside {{28,29,30,31}}", sets.months[m]));
            }
        }
    }
    for src in 0..3 {
        let mut prev = f64::NEG_INFINITY;
        for t in 0..e.e_co.len().min(nt) {
            let v = e.e_co[t][src];
            if v < 0.0 {
                rep.push("eco_range", format!("eCo[{t},{}] = {v} negative", EnergySource::ALL[src].label()));
            }
            if v < prev - 1e-12 {
                rep.push(
                    "eco_monotone",
                    format!("eCo[{}] decreases at t={t}", EnergySource::ALL[src].label()),
                );
            }
            prev = v;
        }
    }
    check_matrix(&mut rep, "table_shape", "gamma", &e.gamma, sets.n_tech(), sets.n_sizes());
    for (p, row) in e.gamma.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v <= 0.0 {
                rep.push("positive_param", format!("gamma[{p},{j}] = {v} must be > 0"));
            }
        }
    }

    // --- Water ---
    let w = &s.water;
    check_len(&mut rep, "table_shape", "SRFWaterVul", w.srf_vul.len(), ng);
    check_len(&mut rep, "table_shape", "SOTWaterVul", w.sot_vul.len(), ng);
    check_matrix(&mut rep, "table_shape", "VulSaison", &w.vul_saison, ng, nm);
    check_len(&mut rep, "table_shape", "CleanWater", w.clean_water.len(), nt);
    if (w.surface_share + w.ground_share - 1.0).abs() > 1e-9 {
        rep.push(
            "water_shares",
            format!("surface+ground share = {} != 1", w.surface_share + w.ground_share),
        );
    }
    for (g, &v) in w.srf_vul.iter().enumerate() {
        if !(1.0..=3.0).contains(&v) || !is_integral(v) {
            rep.push("vul_range", format!("SRFWaterVul[{}] = {v} outside {{1,2,3}}", sets.grids[g]));
        }
    }
    for (g, &v) in w.sot_vul.iter().enumerate() {
        if !(1.0..=3.0).contains(&v) || !is_integral(v) {
            rep.push("vul_range", format!("SOTWaterVul[{}] = {v} outside {{1,2,3}}", sets.grids[g]));
        }
    }
    for (g, row) in w.vul_saison.iter().enumerate() {
        for (m, &v) in row.iter().enumerate() {
            if !(1.0..=2.0).contains(&v) || !is_integral(v) {
                rep.push("vul_range", format!("VulSaison[{},{m}] = {v} outside {{1,2}}", sets.grids[g]));
            }
        }
    }
    if w.elwuc <= 0.0 {
        rep.push("positive_param", format!("ELWUC = {} must be > 0", w.elwuc));
    }

    // --- Techno-economics ---
    let t = &s.tech;
    let (np, nj, ni, nl) = (sets.n_tech(), sets.n_sizes(), sets.n_forms(), sets.n_modes());
    if t.production.len() != np
        || t.production.iter().any(|a| a.len() != nj || a.iter().any(|b| b.len() != ni))
    {
        rep.push("table_shape", "production table is not complete over (p,j,i)".into());
    } else {
        for (p, a) in t.production.iter().enumerate() {
            for (j, b) in a.iter().enumerate() {
                for (i, pt) in b.iter().enumerate() {
                    let tag = format!(
                        "({},{},{})",
                        sets.technologies[p].label(),
                        sets.sizes[j].label(),
                        sets.forms[i].label()
                    );
                    if pt.p_elec <= 0.0 || pt.capex_per_kw <= 0.0 {
                        rep.push("positive_param", format!("production {tag}: PElec/capex must be > 0"));
                    }
                    if pt.elcf_min > pt.elcf_max {
                        rep.push("elcf_band", format!("production {tag}: ELCFmin > ELCFmax"));
                    }
                    for (m, &h) in e.month_hours.iter().enumerate() {
                        if pt.elcf_max > h + 1e-9 {
                            rep.push(
                                "elcf_band",
                                format!(
                                    "production {tag}: ELCFmax={} exceeds month hours Mh[{}]={h}",
                                    pt.elcf_max, sets.months[m]
                                ),
                            );
                        }
                    }
                }
            }
        }
    }
    if t.storage.len() != ni || t.storage.iter().any(|a| a.len() != nj) {
        rep.push("table_shape", "storage table is not complete over (s,j)".into());
    } else {
        for (i, a) in t.storage.iter().enumerate() {
            for (j, st) in a.iter().enumerate() {
                if st.cap_kg <= 0.0 || st.capex_per_kg <= 0.0 {
                    rep.push(
                        "positive_param",
                        format!("storage ({},{}) capacity/capex must be > 0", sets.forms[i].label(), sets.sizes[j].label()),
                    );
                }
            }
        }
    }
    if t.station.len() != ni || t.station.iter().any(|a| a.len() != nj) {
        rep.push("table_shape", "station table is not complete over (fs,j)".into());
    } else {
        for (i, a) in t.station.iter().enumerate() {
            for (j, st) in a.iter().enumerate() {
                if st.cap_kg_day <= 0.0 || st.capex <= 0.0 {
                    rep.push(
                        "positive_param",
                        format!("station ({},{}) capacity/capex must be > 0", sets.forms[i].label(), sets.sizes[j].label()),
                    );
                }
            }
        }
    }
    if t.transport.len() != ni || t.transport.iter().any(|a| a.len() != nl) {
        rep.push("table_shape", "transport table is not complete over (i,l)".into());
    } else {
        for (i, a) in t.transport.iter().enumerate() {
            for (l, tt) in a.iter().enumerate() {
                if let Some(tt) = tt {
                    if tt.tcap <= 0.0 || tt.speed <= 0.0 || tt.tma <= 0.0 {
                        rep.push(
                            "positive_param",
                            format!(
                                "transport ({},{}) capacity/speed/availability must be > 0",
                                sets.forms[i].label(),
                                sets.modes[l].label()
                            ),
                        );
                    }
                }
            }
        }
    }
    check_len(&mut rep, "table_shape", "lifetime_hours", t.lifetime_hours.len(), np);
    check_len(&mut rep, "table_shape", "conversion", t.conversion.len(), ni);
    check_len(&mut rep, "table_shape", "iCapex", t.i_capex.len(), nt);
    for (ti, &y) in t.i_capex.iter().enumerate() {
        if y < 1.0 || !is_integral(y) {
            rep.push("icapex_integral", format!("iCapex[{ti}] = {y} must be a whole number of years >= 1"));
        }
    }
    check_matrix(&mut rep, "table_shape", "AD", &t.distances, ng, ng);
    if t.distances.len() == ng && t.distances.iter().all(|r| r.len() == ng) {
        for g in 0..ng {
            if t.distances[g][g].abs() > 1e-12 {
                rep.push("ad_diagonal", format!("AD[{0},{0}] = {1} != 0", sets.grids[g], t.distances[g][g]));
            }
            for g2 in (g + 1)..ng {
                let (a, b) = (t.distances[g][g2], t.distances[g2][g]);
                if (a - b).abs() > 1e-9 {
                    rep.push(
                        "ad_symmetric",
                        format!("AD asymmetric for pair ({},{}): {a} vs {b}", sets.grids[g], sets.grids[g2]),
                    );
                }
            }
        }
    }

    // --- Geography ---
    check_matrix_bool(&mut rep, "table_shape", "prod_ban", &s.geo.prod_ban, ng, nt);
    check_len(&mut rep, "table_shape", "central_grids", s.geo.central_grids.len(), ng);
    check_len(&mut rep, "table_shape", "export_ban", s.geo.export_ban.len(), ng);
    check_len(&mut rep, "table_shape", "demand_grids", s.geo.demand_grids.len(), ng);

    // --- Options ---
    if s.options.storage_autonomy_days < 0.0 {
        rep.push("positive_param", "storage autonomy days negative".into());
    }

    rep
}

fn check_matrix_bool(
    report: &mut ValidationReport,
    rule: &'static str,
    what: &str,
    m: &[Vec<bool>],
    rows: usize,
    cols: usize,
) {
    check_len(report, rule, what, m.len(), rows);
    for (i, row) in m.iter().enumerate() {
        if row.len() != cols {
            report.push(rule, format!("{what}: row {i} has {} entries, expected {cols}", row.len()));
        }
    }
}

/// Errors from [`calibrate_demand_totals`].
#[derive(Debug, Clone, PartialEq)]
pub enum CalibrationError {
    /// All three fuel consumption terms are zero.
    ZeroBase,
    /// Target not strictly positive.
    NonPositiveTarget(f64),
    /// Period index out of range.
    PeriodOutOfRange(usize),
}

impl core::fmt::Display for CalibrationError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CalibrationError::ZeroBase => write!(f, "cannot calibrate from zero fuel data"),
            CalibrationError::NonPositiveTarget(v) => write!(f, "target total {v} must be > 0"),
            CalibrationError::PeriodOutOfRange(t) => write!(f, "period index {t} out of range"),
        }
    }
}

/// Scales the three fuel consumption terms jointly (preserving their ratios)
/// so that the grid-summed, month-averaged demand of `period` hits
/// `target_total` kg/day. The demand formula is linear in the fuel terms, so
/// a single factor suffices.
pub fn calibrate_demand_totals(
    s: &Scenario,
    target_total: f64,
    period: usize,
) -> Result<Scenario, CalibrationError> {
    if target_total <= 0.0 {
        return Err(CalibrationError::NonPositiveTarget(target_total));
    }
    if period >= s.sets.n_periods() {
        return Err(CalibrationError::PeriodOutOfRange(period));
    }
    let current = crate::demand::annual_average_total(s, period);
    if current <= 0.0 {
        return Err(CalibrationError::ZeroBase);
    }
    let factor = target_total / current;
    let mut out = s.clone();
    out.demand.fc_res *= factor;
    out.demand.fc_gds *= factor;
    out.demand.fc_tour *= factor;
    Ok(out)
}
