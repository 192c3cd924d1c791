//! Sweep and planning operations over coexistence scenarios: spectral
//! assignment scans, guardband sweeps, tradeoff tables, reach estimation,
//! regime-transition search, scattering calibration, and guardband
//! recommendation.
//!
//! Every operation takes an immutable base scenario and derives variants
//! from it, so results are reproducible functions of their inputs. Launch
//! powers cross this boundary in dBm per channel, the natural sweep
//! coordinate; everything below works in watts.

use crate::config::dbm_to_watts;
use crate::interference::{
    total_interference, FiberParams, InterferenceBreakdown, InterferenceError, RamanProfile,
    Toggles,
};
use crate::keyrate::{
    excess_noise, key_rate, transmittance, ChannelState, KeyRateError, KeyRateResult, QkdParams,
};
use crate::scenario::{ChannelPlan, Direction, Placement, ScenarioError};
use thiserror::Error;

/// Largest guardband width considered by sweeps and recommendations.
pub const GB_MAX: usize = 10;
/// Reach search range and resolution in km.
pub const REACH_MAX_KM: f64 = 30.0;
pub const REACH_STEP_KM: f64 = 0.25;
pub const REACH_TOL_KM: f64 = 0.01;
/// Transition-power search range in dBm and resolution in dB.
pub const TRANSITION_RANGE_DBM: (f64, f64) = (-20.0, 10.0);
/// Calibration factor search range.
pub const CALIBRATION_RANGE: (f64, f64) = (1e-26, 1e-18);

/// Errors from planning operations.
#[derive(Debug, Error)]
pub enum PlannerError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Interference(#[from] InterferenceError),
    #[error(transparent)]
    KeyRate(#[from] KeyRateError),
    /// Operation argument outside its valid range.
    #[error("invalid argument: {0}")]
    InvalidArg(String),
    /// No calibration factor in range reaches the requested window; the
    /// achievable key-rate bracket is reported instead.
    #[error(
        "calibration window [{}, {}] bit/s unattainable; achievable range [{}, {}] bit/s",
        window.0, window.1, achievable.0, achievable.1
    )]
    CalibrationOutOfRange {
        window: (f64, f64),
        achievable: (f64, f64),
    },
}

/// A complete coexistence scenario: channel plan, fiber, receiver, and
/// scattering profile, plus the load parameters used when sweeps rebuild
/// the plan at a different power or guardband.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub plan: ChannelPlan,
    pub fiber: FiberParams,
    pub qkd: QkdParams,
    pub raman: RamanProfile,
    /// Excess kurtosis applied when sweeps reload the grid.
    pub load_kurtosis: f64,
    /// Modulation label applied when sweeps reload the grid.
    pub load_format: String,
}

impl Scenario {
    /// Reference scenario: 88-slot 50 GHz grid, band-edge quantum channel,
    /// no guardband, every other slot loaded at -4.5 dBm, 10 km span.
    pub fn reference() -> Self {
        let plan = ChannelPlan::build_grid(88, 50e9, 191.5875e12)
            .expect("reference grid is valid")
            .place_quantum(Placement::BandEdge)
            .expect("band edge exists")
            .load_uniform(dbm_to_watts(-4.5), 0.0, "gaussian")
            .expect("reference load is valid");
        Scenario {
            plan,
            fiber: FiberParams::default(),
            qkd: QkdParams::default(),
            raman: RamanProfile::default(),
            load_kurtosis: 0.0,
            load_format: "gaussian".to_string(),
        }
    }

    /// Same scenario with a re-scaled scattering profile.
    pub fn with_raman_scale(&self, scale: f64) -> Self {
        Scenario {
            raman: self.raman.with_scale(scale),
            ..self.clone()
        }
    }

    /// Rebuild the channel plan on the same grid with a different quantum
    /// placement, guardband, and uniform launch power.
    pub fn plan_variant(
        &self,
        placement: Placement,
        n_gb: usize,
        power_w: f64,
    ) -> Result<ChannelPlan, ScenarioError> {
        ChannelPlan::build_grid(
            self.plan.n_slots,
            self.plan.spacing_hz,
            self.plan.band_start_hz,
        )?
        .place_quantum(placement)?
        .apply_guardband(n_gb)?
        .load_uniform(power_w, self.load_kurtosis, &self.load_format)
    }

    /// Scenario around a variant plan at a given span length, keeping the
    /// receiver carrier frequency in sync with the quantum slot.
    fn variant(&self, plan: ChannelPlan, length_m: f64) -> Result<Scenario, ScenarioError> {
        let f_q = plan.quantum_frequency()?;
        Ok(Scenario {
            plan,
            fiber: self.fiber.with_length(length_m),
            qkd: QkdParams {
                f_q,
                ..self.qkd.clone()
            },
            raman: self.raman.clone(),
            load_kurtosis: self.load_kurtosis,
            load_format: self.load_format.clone(),
        })
    }

    /// Evaluate interference, excess noise, and key rate for this scenario.
    pub fn evaluate(
        &self,
        direction: Direction,
        toggles: Toggles,
    ) -> Result<PointEval, PlannerError> {
        let breakdown = total_interference(
            &self.plan,
            &self.fiber,
            &self.raman,
            self.qkd.b_s,
            direction,
            toggles,
        )?;
        let t = transmittance(self.fiber.alpha, self.fiber.length);
        let xi = excess_noise(breakdown.total, t, self.qkd.f_q, self.qkd.b_s)?;
        let rate = key_rate(&self.qkd, &ChannelState::new(t, xi)?)?;
        Ok(PointEval {
            t,
            xi,
            breakdown,
            rate,
        })
    }
}

/// One point evaluation: channel state plus its key-rate outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEval {
    /// Channel transmittance.
    pub t: f64,
    /// Input-referred excess noise in shot-noise units.
    pub xi: f64,
    /// Interference power decomposition in watts.
    pub breakdown: InterferenceBreakdown,
    /// Key-rate outcome.
    pub rate: KeyRateResult,
}

/// Which sweep produced a result table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    /// Quantum slot scanned across the grid.
    Spectral,
    /// Guardband width scanned at fixed placement.
    Guardband,
    /// Guardband width against capacity loss per placement.
    Tradeoff,
    /// Span length scanned at fixed plan.
    Distance,
}

impl SweepKind {
    /// Whether the leading x column holds integers (slot or slot counts).
    pub fn x_is_integer(self) -> bool {
        matches!(
            self,
            SweepKind::Spectral | SweepKind::Guardband | SweepKind::Tradeoff
        )
    }

    pub fn label(self) -> &'static str {
        match self {
            SweepKind::Spectral => "spectral",
            SweepKind::Guardband => "guardband",
            SweepKind::Tradeoff => "tradeoff",
            SweepKind::Distance => "distance",
        }
    }
}

/// A sweep result: named columns, rows sorted ascending in the leading x
/// column, and the hash of the scenario that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub kind: SweepKind,
    /// Series label, safe for use in file names.
    pub label: String,
    /// Hash of the base scenario, echoed into output metadata.
    pub scenario_hash: u64,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepResult {
    /// Index of a named column.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Value at (row, column name).
    pub fn value(&self, row: usize, name: &str) -> Option<f64> {
        let col = self.column(name)?;
        self.rows.get(row)?.get(col).copied()
    }
}

/// File-name-safe label for a launch power: -4.5 dBm -> "m4p5dBm".
pub fn dbm_slug(power_dbm: f64) -> String {
    let sign = if power_dbm < 0.0 { "m" } else { "p" };
    let digits = format!("{}", power_dbm.abs()).replace('.', "p");
    format!("{sign}{digits}dBm")
}

fn direction_column(direction: Direction) -> &'static str {
    match direction {
        Direction::Co => "SKR-Fw",
        Direction::Counter => "SKR-Bw",
    }
}

fn placement_label(placement: Placement) -> String {
    match placement {
        Placement::BandEdge => "edge".to_string(),
        Placement::BandCenter => "center".to_string(),
        Placement::Custom(slot) => format!("slot{slot}"),
    }
}

/// Kilometre label without trailing zeros: 10000 m -> "10", 12500 m -> "12.5".
fn km_label(distance_m: f64) -> String {
    let km = distance_m / 1000.0;
    if (km - km.round()).abs() < 1e-9 {
        format!("{}", km.round() as i64)
    } else {
        format!("{km}")
    }
}

/// Scan the quantum channel across every grid slot, reloading the rest of
/// the grid uniformly, and record the key rate per assignment.
pub fn sweep_spectral(
    base: &Scenario,
    power_dbm: f64,
    distance_m: f64,
    direction: Direction,
    toggles: Toggles,
) -> Result<SweepResult, PlannerError> {
    let power_w = dbm_to_watts(power_dbm);
    let n_gb = base.plan.guardband;
    let mut rows = Vec::with_capacity(base.plan.n_slots);
    for slot in 1..=base.plan.n_slots {
        let plan = base.plan_variant(Placement::Custom(slot), n_gb, power_w)?;
        let loss = plan.capacity_loss_percent()?;
        let scenario = base.variant(plan, distance_m)?;
        let eval = scenario.evaluate(direction, toggles)?;
        rows.push(vec![
            slot as f64,
            eval.rate.skr_per_symbol,
            eval.rate.skr_bps,
            eval.xi,
            eval.breakdown.p_fwm_degenerate,
            eval.breakdown.p_fwm_nondegenerate,
            eval.breakdown.p_sprs,
            loss,
        ]);
    }
    Ok(SweepResult {
        kind: SweepKind::Spectral,
        label: format!("{}_{}", toggles.label(), dbm_slug(power_dbm)),
        scenario_hash: crate::output::scenario_hash(base),
        columns: [
            "Channel",
            "SKR_bits_symbol",
            "SKR_bps",
            "xi_snu",
            "P_fwm_deg_W",
            "P_fwm_nondeg_W",
            "P_sprs_W",
            "CapacityLoss_pct",
        ]
        .map(String::from)
        .to_vec(),
        rows,
    })
}

/// Sweep guardband width 0..=GB_MAX at each launch power, one result table
/// per power.
pub fn sweep_guardband(
    base: &Scenario,
    powers_dbm: &[f64],
    distance_m: f64,
    direction: Direction,
) -> Result<Vec<SweepResult>, PlannerError> {
    if powers_dbm.is_empty() {
        return Err(PlannerError::InvalidArg(
            "guardband sweep needs at least one launch power".to_string(),
        ));
    }
    let skr_col = format!("SKR_{}km", km_label(distance_m));
    let mut results = Vec::with_capacity(powers_dbm.len());
    for &power_dbm in powers_dbm {
        let power_w = dbm_to_watts(power_dbm);
        let mut rows = Vec::with_capacity(GB_MAX + 1);
        for n_gb in 0..=GB_MAX {
            let plan = base.plan_variant(base.plan.placement, n_gb, power_w)?;
            let loss = plan.capacity_loss_percent()?;
            let scenario = base.variant(plan, distance_m)?;
            let eval = scenario.evaluate(direction, Toggles::default())?;
            rows.push(vec![
                n_gb as f64,
                eval.rate.skr_bps,
                eval.rate.skr_per_symbol,
                eval.xi,
                eval.breakdown.p_fwm_degenerate,
                eval.breakdown.p_fwm_nondegenerate,
                eval.breakdown.p_sprs,
                loss,
            ]);
        }
        results.push(SweepResult {
            kind: SweepKind::Guardband,
            label: dbm_slug(power_dbm),
            scenario_hash: crate::output::scenario_hash(base),
            columns: vec![
                "QSpace".to_string(),
                skr_col.clone(),
                "SKR_bits_symbol".to_string(),
                "xi_snu".to_string(),
                "P_fwm_deg_W".to_string(),
                "P_fwm_nondeg_W".to_string(),
                "P_sprs_W".to_string(),
                "CapacityLoss_pct".to_string(),
            ],
            rows,
        });
    }
    Ok(results)
}

/// Pair the key rate per propagation direction with the capacity loss per
/// placement policy across guardband widths. Key rates are computed at the
/// base scenario's placement.
pub fn sweep_tradeoff(
    base: &Scenario,
    power_dbm: f64,
    distance_m: f64,
    placements: &[Placement],
    directions: &[Direction],
) -> Result<SweepResult, PlannerError> {
    if placements.is_empty() || directions.is_empty() {
        return Err(PlannerError::InvalidArg(
            "tradeoff sweep needs at least one placement and one direction".to_string(),
        ));
    }
    let power_w = dbm_to_watts(power_dbm);
    let mut columns = vec!["NGb".to_string()];
    columns.extend(directions.iter().map(|&d| direction_column(d).to_string()));
    columns.extend(
        placements
            .iter()
            .map(|&p| format!("CapacityLoss_{}_pct", placement_label(p))),
    );

    let mut rows = Vec::with_capacity(GB_MAX + 1);
    for n_gb in 0..=GB_MAX {
        let mut row = vec![n_gb as f64];
        for &direction in directions {
            let plan = base.plan_variant(base.plan.placement, n_gb, power_w)?;
            let scenario = base.variant(plan, distance_m)?;
            let eval = scenario.evaluate(direction, Toggles::default())?;
            row.push(eval.rate.skr_bps);
        }
        for &placement in placements {
            let plan = base.plan_variant(placement, n_gb, power_w)?;
            row.push(plan.capacity_loss_percent()?);
        }
        rows.push(row);
    }
    Ok(SweepResult {
        kind: SweepKind::Tradeoff,
        label: dbm_slug(power_dbm),
        scenario_hash: crate::output::scenario_hash(base),
        columns,
        rows,
    })
}

/// Key rate versus span length at fixed plan, one column per direction.
pub fn sweep_distance(
    base: &Scenario,
    power_dbm: f64,
    n_gb: usize,
    max_km: f64,
    step_km: f64,
    directions: &[Direction],
) -> Result<SweepResult, PlannerError> {
    if !(step_km > 0.0) || !(max_km >= step_km) || directions.is_empty() {
        return Err(PlannerError::InvalidArg(format!(
            "distance sweep needs step > 0 and max >= step, got step {step_km} km, max {max_km} km"
        )));
    }
    let power_w = dbm_to_watts(power_dbm);
    let plan = base.plan_variant(base.plan.placement, n_gb, power_w)?;
    let steps = (max_km / step_km + 1e-9).floor() as usize;

    let mut columns = vec!["z".to_string()];
    columns.extend(directions.iter().map(|&d| direction_column(d).to_string()));
    columns.extend(directions.iter().map(|&d| format!("xi_{}", d.label())));

    let mut rows = Vec::with_capacity(steps);
    for i in 1..=steps {
        let z_km = i as f64 * step_km;
        let scenario = base.variant(plan.clone(), z_km * 1000.0)?;
        let mut row = vec![z_km];
        let mut xis = Vec::with_capacity(directions.len());
        for &direction in directions {
            let eval = scenario.evaluate(direction, Toggles::default())?;
            row.push(eval.rate.skr_bps);
            xis.push(eval.xi);
        }
        row.extend(xis);
        rows.push(row);
    }
    Ok(SweepResult {
        kind: SweepKind::Distance,
        label: format!("{}_gb{}", dbm_slug(power_dbm), n_gb),
        scenario_hash: crate::output::scenario_hash(base),
        columns,
        rows,
    })
}

/// Longest span length in km at which the key rate stays above
/// `skr_floor_bps`, searched on a 0..=30 km grid at 0.25 km steps and then
/// refined by bisection to 0.01 km.
///
/// Phase-matching revivals can make the rate non-monotonic in distance, so
/// the scan keeps the last alive grid point rather than the first death.
/// Returns 0 when the rate is already below the floor at every grid point.
pub fn reach(
    base: &Scenario,
    power_dbm: f64,
    n_gb: usize,
    direction: Direction,
    skr_floor_bps: f64,
) -> Result<f64, PlannerError> {
    if !skr_floor_bps.is_finite() || skr_floor_bps < 0.0 {
        return Err(PlannerError::InvalidArg(format!(
            "reach floor must be finite and >= 0, got {skr_floor_bps}"
        )));
    }
    let power_w = dbm_to_watts(power_dbm);
    let plan = base.plan_variant(base.plan.placement, n_gb, power_w)?;
    let alive = |z_km: f64| -> Result<bool, PlannerError> {
        let scenario = base.variant(plan.clone(), z_km * 1000.0)?;
        let eval = scenario.evaluate(direction, Toggles::default())?;
        Ok(eval.rate.skr_bps > skr_floor_bps)
    };

    let steps = (REACH_MAX_KM / REACH_STEP_KM).round() as usize;
    let mut best = 0.0;
    for i in 1..=steps {
        let z = i as f64 * REACH_STEP_KM;
        if alive(z)? {
            best = z;
        }
    }
    let (mut lo, mut hi) = (best, (best + REACH_STEP_KM).min(REACH_MAX_KM));
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if alive(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < REACH_TOL_KM {
            break;
        }
    }
    Ok(lo)
}

/// Launch power at which total FWM power overtakes total SpRS power at the
/// given span and guardband, found by bisection to 0.01 dB over
/// [-20, +10] dBm. Returns `None` when no crossing exists in range.
///
/// FWM grows with the cube of launch power and SpRS linearly, so their
/// difference crosses zero at most once.
pub fn find_transition_power(
    base: &Scenario,
    distance_m: f64,
    n_gb: usize,
) -> Result<Option<f64>, PlannerError> {
    let imbalance = |power_dbm: f64| -> Result<f64, PlannerError> {
        let plan = base.plan_variant(base.plan.placement, n_gb, dbm_to_watts(power_dbm))?;
        let scenario = base.variant(plan, distance_m)?;
        let b = scenario
            .evaluate(Direction::Co, Toggles::default())?
            .breakdown;
        Ok(b.p_fwm_degenerate + b.p_fwm_nondegenerate - b.p_sprs)
    };

    let (mut lo, mut hi) = TRANSITION_RANGE_DBM;
    let (f_lo, f_hi) = (imbalance(lo)?, imbalance(hi)?);
    if f_lo.signum() == f_hi.signum() {
        return Ok(None);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if imbalance(mid)?.signum() == f_hi.signum() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Calibration outcome: the factor, the key rate it achieves on the base
/// scenario, and the re-scaled profile ready for further planning.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub scale: f64,
    pub achieved_bps: f64,
    pub profile: RamanProfile,
}

/// Find the scattering calibration factor that places the base scenario's
/// co-propagating key rate at the midpoint of `window` (bit/s), by
/// geometric bisection over the factor.
///
/// The key rate decreases monotonically in the factor. If even the extreme
/// factors cannot bracket the midpoint, the achievable range is returned in
/// the error.
pub fn calibrate_raman(base: &Scenario, window: (f64, f64)) -> Result<Calibration, PlannerError> {
    let (win_lo, win_hi) = window;
    if !(win_lo.is_finite() && win_hi.is_finite() && 0.0 < win_lo && win_lo < win_hi) {
        return Err(PlannerError::InvalidArg(format!(
            "calibration window must satisfy 0 < lo < hi, got [{win_lo}, {win_hi}]"
        )));
    }
    let target = 0.5 * (win_lo + win_hi);
    let skr_at = |scale: f64| -> Result<f64, PlannerError> {
        let eval = base
            .with_raman_scale(scale)
            .evaluate(Direction::Co, Toggles::default())?;
        Ok(eval.rate.skr_bps)
    };

    let (mut lo, mut hi) = CALIBRATION_RANGE;
    let (skr_max, skr_min) = (skr_at(lo)?, skr_at(hi)?);
    if target > skr_max || target < skr_min {
        return Err(PlannerError::CalibrationOutOfRange {
            window,
            achievable: (skr_min, skr_max),
        });
    }
    for _ in 0..300 {
        let mid = (lo * hi).sqrt();
        if skr_at(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-12 {
            break;
        }
    }
    let scale = (lo * hi).sqrt();
    Ok(Calibration {
        scale,
        achieved_bps: skr_at(scale)?,
        profile: base.raman.with_scale(scale),
    })
}

/// Guardband recommendation: the chosen width, what it achieves, and
/// whether it met both the key-rate and budget targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuardbandAdvice {
    pub n_gb: usize,
    pub skr_bps: f64,
    pub capacity_loss_percent: f64,
    /// True when the recommendation reaches 99% of the best key rate within
    /// the capacity budget; false marks a best-effort fallback.
    pub meets_target: bool,
}

/// Smallest guardband reaching at least 99% of the best achievable key
/// rate while keeping capacity loss within `budget_percent`. When no width
/// satisfies both, falls back to the highest-rate width within budget.
pub fn recommend_guardband(
    base: &Scenario,
    power_dbm: f64,
    distance_m: f64,
    direction: Direction,
    budget_percent: f64,
) -> Result<GuardbandAdvice, PlannerError> {
    if !budget_percent.is_finite() || budget_percent < 0.0 {
        return Err(PlannerError::InvalidArg(format!(
            "capacity budget must be finite and >= 0, got {budget_percent}"
        )));
    }
    let power_w = dbm_to_watts(power_dbm);
    let mut evals = Vec::with_capacity(GB_MAX + 1);
    for n_gb in 0..=GB_MAX {
        let plan = base.plan_variant(base.plan.placement, n_gb, power_w)?;
        let loss = plan.capacity_loss_percent()?;
        let scenario = base.variant(plan, distance_m)?;
        let eval = scenario.evaluate(direction, Toggles::default())?;
        evals.push((n_gb, eval.rate.skr_bps, loss));
    }
    let best = evals.iter().map(|&(_, s, _)| s).fold(0.0, f64::max);
    // Zero guardband costs zero capacity, so the budget-feasible set is
    // never empty.
    let within_budget = |loss: f64| loss <= budget_percent + 1e-12;

    if let Some(&(n_gb, skr, loss)) = evals
        .iter()
        .find(|&&(_, skr, loss)| within_budget(loss) && skr >= 0.99 * best)
    {
        return Ok(GuardbandAdvice {
            n_gb,
            skr_bps: skr,
            capacity_loss_percent: loss,
            meets_target: true,
        });
    }
    let &(n_gb, skr, loss) = evals
        .iter()
        .filter(|&&(_, _, loss)| within_budget(loss))
        .reduce(|acc, e| if e.1 > acc.1 { e } else { acc })
        .expect("guardband 0 is always within budget");
    Ok(GuardbandAdvice {
        n_gb,
        skr_bps: skr,
        capacity_loss_percent: loss,
        meets_target: false,
    })
}
