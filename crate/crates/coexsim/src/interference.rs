//! In-band interference landing in the quantum slot: four-wave mixing (FWM)
//! between classical channel triples and spontaneous Raman scattering (SpRS)
//! from every classical channel.
//!
//! FWM is coherent and phase-matched, so it depends on the dispersion walk-
//! off of each contributing triple and only builds up co-propagating. SpRS
//! is broadband and incoherent, linear in pump power, thermally weighted
//! between the Stokes and anti-Stokes sides, and accumulates in both
//! directions with different path integrals.

use crate::keyrate::{H_PLANCK, K_BOLTZMANN};
use crate::scenario::{ChannelPlan, Direction, ScenarioError};
use std::path::Path;
use thiserror::Error;

/// Errors from fiber/profile validation and interference evaluation.
#[derive(Debug, Error)]
pub enum InterferenceError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    /// Fiber parameter outside its physical range.
    #[error("{name} must satisfy {constraint}, got {value}")]
    InvalidFiber {
        name: &'static str,
        constraint: &'static str,
        value: f64,
    },
    /// Scattering profile failed a structural check.
    #[error("scattering profile invalid: {0}")]
    InvalidProfile(String),
    /// Scattering profile CSV could not be parsed.
    #[error("profile CSV {path}, line {line}: {message}")]
    ProfileParse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("reading profile CSV: {0}")]
    Io(#[from] std::io::Error),
}

/// Fiber span parameters in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberParams {
    /// Attenuation in 1/m (natural log units).
    pub alpha: f64,
    /// Group-velocity dispersion in s^2/m; negative in the anomalous regime.
    pub beta2: f64,
    /// Nonlinear coefficient in 1/(W m).
    pub gamma: f64,
    /// Span length in m.
    pub length: f64,
    /// Fiber temperature in K, weighting the phonon occupation.
    pub temperature: f64,
}

impl Default for FiberParams {
    /// Standard single-mode fiber at room temperature, 10 km span:
    /// 0.2 dB/km, beta2 = -21.7 ps^2/km, gamma = 1.3 /(W km).
    fn default() -> Self {
        FiberParams {
            alpha: crate::keyrate::alpha_from_db_per_km(0.2),
            beta2: -21.7e-27,
            gamma: 1.3e-3,
            length: 10e3,
            temperature: 300.0,
        }
    }
}

impl FiberParams {
    /// Check every field against its physical range.
    pub fn validate(&self) -> Result<(), InterferenceError> {
        let checks: [(&str, &str, f64, bool); 4] = [
            ("alpha", "> 0", self.alpha, self.alpha > 0.0),
            ("gamma", ">= 0", self.gamma, self.gamma >= 0.0),
            ("length", "> 0", self.length, self.length > 0.0),
            (
                "temperature",
                "> 0",
                self.temperature,
                self.temperature > 0.0,
            ),
        ];
        for (name, constraint, value, ok) in checks {
            if !ok || !value.is_finite() {
                return Err(InterferenceError::InvalidFiber {
                    name,
                    constraint,
                    value,
                });
            }
        }
        if !self.beta2.is_finite() {
            return Err(InterferenceError::InvalidFiber {
                name: "beta2",
                constraint: "finite",
                value: self.beta2,
            });
        }
        Ok(())
    }

    /// Same fiber with a different span length.
    pub fn with_length(&self, length_m: f64) -> Self {
        FiberParams {
            length: length_m,
            ..*self
        }
    }

    /// Effective nonlinear length (1 - e^{-alpha L}) / alpha in m.
    pub fn effective_length(&self) -> f64 {
        (1.0 - (-self.alpha * self.length).exp()) / self.alpha
    }
}

/// Built-in spontaneous-scattering density: piecewise-linear in detuning,
/// relative units. Two narrow low-frequency lobes (boson-peak region) and
/// the broad main band peaking at 13.2 THz, truncated at 40 THz.
const DEFAULT_PROFILE: [(f64, f64); 27] = [
    (0.0, 0.0),
    (5.5e11, 0.0),
    (6.0e11, 6.291884552e-2),
    (6.5e11, 1.382063133e-1),
    (7.0e11, 2.068921037e-1),
    (7.5e11, 1.428161894e-1),
    (8.0e11, 6.580723454e-2),
    (8.5e11, 0.0),
    (3.55e12, 0.0),
    (3.6e12, 2.110219106e-1),
    (3.65e12, 4.955109553e-1),
    (3.7e12, 7.8e-1),
    (3.75e12, 5.689780894e-1),
    (3.8e12, 2.844890447e-1),
    (3.85e12, 0.0),
    (4.4e12, 0.0),
    (5.5e12, 5.0e-2),
    (8.0e12, 2.2e-1),
    (1.1e13, 5.5e-1),
    (1.25e13, 8.8e-1),
    (1.32e13, 1.0),
    (1.43e13, 7.4e-1),
    (1.58e13, 3.3e-1),
    (1.8e13, 1.2e-1),
    (2.4e13, 5.0e-2),
    (3.2e13, 2.0e-2),
    (4.0e13, 0.0),
];

/// Default calibration factor converting the relative density into an
/// absolute scattering efficiency, chosen so the reference scenario
/// (-4.5 dBm/ch, 10 km, band-edge, co-propagating) yields 200 Mbit/s.
pub const DEFAULT_RAMAN_SCALE: f64 = 2.34483474e-22;

/// Spontaneous-scattering density versus pump-signal detuning.
#[derive(Debug, Clone, PartialEq)]
pub struct RamanProfile {
    /// (detuning Hz, relative density) knots, strictly increasing in
    /// detuning, spanning at least 0..40 THz.
    pub table: Vec<(f64, f64)>,
    /// Calibration factor; `scale * density` has units 1/(m Hz).
    pub scale: f64,
}

impl Default for RamanProfile {
    fn default() -> Self {
        RamanProfile {
            table: DEFAULT_PROFILE.to_vec(),
            scale: DEFAULT_RAMAN_SCALE,
        }
    }
}

impl RamanProfile {
    /// Build from explicit knots, validating structure.
    pub fn from_table(table: Vec<(f64, f64)>, scale: f64) -> Result<Self, InterferenceError> {
        let profile = RamanProfile { table, scale };
        profile.validate()?;
        Ok(profile)
    }

    /// Load knots from a two-column CSV (detuning_Hz, density). A single
    /// non-numeric header line is tolerated; `#` lines are comments.
    pub fn from_csv(path: &Path, scale: f64) -> Result<Self, InterferenceError> {
        let text = std::fs::read_to_string(path)?;
        let mut table = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let parse = |v: Option<&str>| v.and_then(|s| s.parse::<f64>().ok());
            match (parse(cols.next()), parse(cols.next())) {
                (Some(x), Some(y)) => table.push((x, y)),
                // Tolerate one header row, reject anything else malformed.
                _ if table.is_empty() && idx == 0 => continue,
                _ => {
                    return Err(InterferenceError::ProfileParse {
                        path: path.display().to_string(),
                        line: idx + 1,
                        message: format!("expected two numeric columns, got {line:?}"),
                    })
                }
            }
        }
        Self::from_table(table, scale)
    }

    /// Same profile with a different calibration factor.
    pub fn with_scale(&self, scale: f64) -> Self {
        RamanProfile {
            table: self.table.clone(),
            scale,
        }
    }

    /// Structural checks: enough knots, strictly increasing detunings,
    /// non-negative finite densities, broadband coverage through 40 THz,
    /// positive scale.
    pub fn validate(&self) -> Result<(), InterferenceError> {
        let err = |msg: String| Err(InterferenceError::InvalidProfile(msg));
        if self.table.len() < 2 {
            return err(format!("need at least 2 knots, got {}", self.table.len()));
        }
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return err(format!(
                "scale must be positive and finite, got {}",
                self.scale
            ));
        }
        let first = self.table[0].0;
        if !(0.0..=1e9).contains(&first) {
            return err(format!(
                "first knot must sit at zero detuning, got {first} Hz"
            ));
        }
        let last = self.table[self.table.len() - 1].0;
        if last < 40e12 {
            return err(format!(
                "knots must cover detunings through 40 THz, got {last} Hz"
            ));
        }
        for window in self.table.windows(2) {
            if !(window[1].0 > window[0].0) {
                return err(format!(
                    "detunings must be strictly increasing, got {} then {}",
                    window[0].0, window[1].0
                ));
            }
        }
        for &(x, y) in &self.table {
            if !x.is_finite() || !y.is_finite() || y < 0.0 {
                return err(format!("density must be finite and >= 0, got ({x}, {y})"));
            }
        }
        Ok(())
    }

    /// Relative density at |detuning|, linearly interpolated between knots,
    /// zero beyond the last knot.
    pub fn density(&self, detuning_hz: f64) -> f64 {
        let df = detuning_hz.abs();
        let table = &self.table;
        let last = table.len() - 1;
        if df >= table[last].0 {
            return 0.0;
        }
        if df <= table[0].0 {
            return table[0].1;
        }
        // partition_point finds the first knot strictly above df; the knot
        // before it exists because df > table[0].0.
        let hi = table.partition_point(|&(x, _)| x <= df);
        let (x0, y0) = table[hi - 1];
        let (x1, y1) = table[hi];
        y0 + (y1 - y0) * (df - x0) / (x1 - x0)
    }
}

/// Which interference mechanisms to include in a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Toggles {
    pub fwm: bool,
    pub sprs: bool,
}

impl Default for Toggles {
    fn default() -> Self {
        Toggles {
            fwm: true,
            sprs: true,
        }
    }
}

impl Toggles {
    pub fn fwm_only() -> Self {
        Toggles {
            fwm: true,
            sprs: false,
        }
    }

    pub fn sprs_only() -> Self {
        Toggles {
            fwm: false,
            sprs: true,
        }
    }

    /// Short label used in output file names.
    pub fn label(self) -> &'static str {
        match (self.fwm, self.sprs) {
            (true, true) => "both",
            (true, false) => "fwm",
            (false, true) => "sprs",
            (false, false) => "none",
        }
    }
}

impl std::str::FromStr for Toggles {
    type Err = String;

    /// Parse a comma-separated mechanism list: "fwm", "sprs", "fwm,sprs".
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut toggles = Toggles {
            fwm: false,
            sprs: false,
        };
        for part in s.split(',') {
            match part.trim().to_ascii_lowercase().as_str() {
                "fwm" => toggles.fwm = true,
                "sprs" | "raman" => toggles.sprs = true,
                "both" | "all" => {
                    toggles.fwm = true;
                    toggles.sprs = true;
                }
                other => return Err(format!("unknown mechanism {other:?}, expected fwm|sprs")),
            }
        }
        Ok(toggles)
    }
}

/// Interference power decomposition at the quantum slot, in watts at the
/// fiber output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceBreakdown {
    pub p_fwm_degenerate: f64,
    pub p_fwm_nondegenerate: f64,
    pub p_sprs: f64,
    pub total: f64,
    pub direction: Direction,
}

/// Phase mismatch of an FWM triple with pumps at `f_h`, `f_l` and signal at
/// `f_i`, to second order in dispersion: -beta2 (2 pi)^2 (f_i - f_h)(f_i - f_l).
pub fn delta_beta(f_i: f64, f_h: f64, f_l: f64, beta2: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    -beta2 * two_pi * two_pi * (f_i - f_h) * (f_i - f_l)
}

/// Phase-matching efficiency |integral of e^{(-alpha + i delta_beta) z}|^2
/// in m^2:
/// (1 - 2 e^{-alpha L} cos(delta_beta L) + e^{-2 alpha L}) / (alpha^2 + delta_beta^2).
///
/// The closed form is exact at delta_beta = 0 (alpha > 0 keeps the
/// denominator finite) where it equals L_eff^2.
pub fn fwm_efficiency(delta_beta: f64, alpha: f64, length: f64) -> f64 {
    let att = (-alpha * length).exp();
    let num = 1.0 - 2.0 * att * (delta_beta * length).cos() + att * att;
    num / (alpha * alpha + delta_beta * delta_beta)
}

/// FWM power falling into the quantum slot: (degenerate, non-degenerate)
/// watts at the fiber output.
///
/// On a uniform grid the idler condition f_k = f_h + f_l - f_i becomes slot
/// arithmetic k = h + l - i, exact in integers. Counter-propagating pumps
/// never phase-match, so that direction contributes zero.
pub fn fwm_power(
    plan: &ChannelPlan,
    fiber: &FiberParams,
    direction: Direction,
) -> Result<(f64, f64), InterferenceError> {
    fiber.validate()?;
    if direction == Direction::Counter {
        return Ok((0.0, 0.0));
    }
    let quantum = plan.quantum_slot.ok_or(ScenarioError::QuantumSlotUnset)?;
    let f_i = plan.slot_frequency(quantum)?;
    let n = plan.n_slots as isize;

    // Dense occupancy map so idler lookups are O(1).
    let mut power = vec![None::<&crate::scenario::ClassicalChannel>; plan.n_slots + 1];
    for ch in plan.classical.iter().filter(|c| c.slot != quantum) {
        power[ch.slot] = Some(ch);
    }
    let at = |slot: isize| -> Option<&crate::scenario::ClassicalChannel> {
        if (1..=n).contains(&slot) {
            power[slot as usize]
        } else {
            None
        }
    };

    let prefactor = 16.0 * fiber.gamma * fiber.gamma / 81.0;
    let att = (-fiber.alpha * fiber.length).exp();

    // Degenerate triples: two photons from pump h, idler at k = 2h - i.
    let mut deg = 0.0;
    for ch in plan.classical.iter().filter(|c| c.slot != quantum) {
        let k = 2 * ch.slot as isize - quantum as isize;
        let Some(idler) = at(k) else { continue };
        let f_h = plan.slot_frequency(ch.slot)?;
        let db = delta_beta(f_i, f_h, f_h, fiber.beta2);
        deg += (ch.kurtosis + 2.0)
            * ch.power_w
            * ch.power_w
            * idler.power_w
            * fwm_efficiency(db, fiber.alpha, fiber.length);
    }
    deg *= prefactor * att;

    // Non-degenerate triples: unordered pump pairs {h, l}, idler at
    // k = h + l - i, which must be occupied and distinct from both pumps.
    let mut nondeg = 0.0;
    let channels: Vec<_> = plan
        .classical
        .iter()
        .filter(|c| c.slot != quantum)
        .collect();
    for (a, ch_h) in channels.iter().enumerate() {
        for ch_l in channels.iter().skip(a + 1) {
            let k = ch_h.slot as isize + ch_l.slot as isize - quantum as isize;
            if k == ch_h.slot as isize || k == ch_l.slot as isize {
                continue;
            }
            let Some(idler) = at(k) else { continue };
            let f_h = plan.slot_frequency(ch_h.slot)?;
            let f_l = plan.slot_frequency(ch_l.slot)?;
            let db = delta_beta(f_i, f_h, f_l, fiber.beta2);
            nondeg += ch_h.power_w
                * ch_l.power_w
                * idler.power_w
                * fwm_efficiency(db, fiber.alpha, fiber.length);
        }
    }
    // Each unordered pair carries a field-degeneracy factor of 2, squared.
    nondeg *= prefactor * att * 4.0;

    Ok((deg, nondeg))
}

/// Scattering efficiency in 1/(m Hz) for a quantum signal detuned by
/// `delta_f = f_quantum - f_pump` from a pump at fiber temperature
/// `temperature`.
///
/// The quantum channel below the pump collects Stokes scattering, weighted
/// by n_th + 1; above the pump it collects anti-Stokes, weighted by n_th.
/// Zero detuning carries no scattering.
pub fn raman_efficiency(delta_f: f64, profile: &RamanProfile, temperature: f64) -> f64 {
    if delta_f == 0.0 {
        return 0.0;
    }
    let n_th = 1.0 / (H_PLANCK * delta_f.abs() / (K_BOLTZMANN * temperature)).exp_m1();
    let weight = if delta_f < 0.0 { n_th + 1.0 } else { n_th };
    profile.scale * profile.density(delta_f) * weight
}

/// SpRS power scattered into the quantum slot over bandwidth `b_s`, watts
/// at the quantum receiver.
///
/// Co-propagating pumps share the signal's attenuation, giving the
/// L e^{-alpha L} path integral; counter-propagating pumps integrate
/// (1 - e^{-2 alpha L}) / (2 alpha), which exceeds the forward value by
/// sinh(alpha L)/(alpha L).
pub fn sprs_power(
    plan: &ChannelPlan,
    fiber: &FiberParams,
    profile: &RamanProfile,
    b_s: f64,
    direction: Direction,
) -> Result<f64, InterferenceError> {
    fiber.validate()?;
    profile.validate()?;
    if !(b_s > 0.0) || !b_s.is_finite() {
        return Err(InterferenceError::InvalidFiber {
            name: "b_s",
            constraint: "> 0",
            value: b_s,
        });
    }
    let quantum = plan.quantum_slot.ok_or(ScenarioError::QuantumSlotUnset)?;
    let f_i = plan.slot_frequency(quantum)?;

    let mut density_sum = 0.0;
    for ch in plan.classical.iter().filter(|c| c.slot != quantum) {
        let f_h = plan.slot_frequency(ch.slot)?;
        density_sum += raman_efficiency(f_i - f_h, profile, fiber.temperature) * ch.power_w;
    }

    let path = match direction {
        Direction::Co => fiber.length * (-fiber.alpha * fiber.length).exp(),
        Direction::Counter => {
            (1.0 - (-2.0 * fiber.alpha * fiber.length).exp()) / (2.0 * fiber.alpha)
        }
    };
    Ok(density_sum * b_s * path)
}

/// Total interference at the quantum slot with per-mechanism breakdown.
pub fn total_interference(
    plan: &ChannelPlan,
    fiber: &FiberParams,
    profile: &RamanProfile,
    b_s: f64,
    direction: Direction,
    toggles: Toggles,
) -> Result<InterferenceBreakdown, InterferenceError> {
    let (p_deg, p_nondeg) = if toggles.fwm {
        fwm_power(plan, fiber, direction)?
    } else {
        (0.0, 0.0)
    };
    let p_sprs = if toggles.sprs {
        sprs_power(plan, fiber, profile, b_s, direction)?
    } else {
        0.0
    };
    Ok(InterferenceBreakdown {
        p_fwm_degenerate: p_deg,
        p_fwm_nondegenerate: p_nondeg,
        p_sprs,
        total: p_deg + p_nondeg + p_sprs,
        direction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Placement;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    fn plan(quantum: Placement, n_gb: usize, power_w: f64) -> ChannelPlan {
        ChannelPlan::build_grid(88, 50e9, 191.5875e12)
            .unwrap()
            .place_quantum(quantum)
            .unwrap()
            .apply_guardband(n_gb)
            .unwrap()
            .load_uniform(power_w, 0.0, "gaussian")
            .unwrap()
    }

    fn dbm(p: f64) -> f64 {
        10f64.powf((p - 30.0) / 10.0)
    }

    #[test]
    fn phase_mismatch_of_adjacent_degenerate_triple() {
        let fiber = FiberParams::default();
        let p = plan(Placement::BandEdge, 0, 1e-3);
        let f88 = p.slot_frequency(88).unwrap();
        let f87 = p.slot_frequency(87).unwrap();
        let db = delta_beta(f88, f87, f87, fiber.beta2);
        assert!(close(db, 2.141704155036391e-3, 1e-14), "db={db}");
    }

    #[test]
    fn matched_efficiency_equals_effective_length_squared() {
        let fiber = FiberParams::default();
        let l_eff = fiber.effective_length();
        assert!(close(l_eff, 8013.659443958737, 1e-14));
        let eff0 = fwm_efficiency(0.0, fiber.alpha, fiber.length);
        assert!(close(eff0, l_eff * l_eff, 1e-14));
        assert!(close(eff0, 6.421873768375e7, 1e-12));
        // One walk-off quantum in: four decades down.
        let eff1 = fwm_efficiency(2.141704155036391e-3, fiber.alpha, fiber.length);
        assert!(close(eff1, 5.355631559141e5, 1e-12), "eff1={eff1}");
    }

    #[test]
    fn fwm_sums_at_reference_power() {
        let fiber = FiberParams::default();
        let p = dbm(-4.5);

        let edge0 = plan(Placement::BandEdge, 0, p);
        let (deg, nondeg) = fwm_power(&edge0, &fiber, Direction::Co).unwrap();
        assert!(close(deg, 1.080758246955e-11, 1e-11), "deg={deg}");
        assert!(close(nondeg, 8.192043008760e-12, 1e-11), "nondeg={nondeg}");

        // Band-center doubles the degenerate mirror set and nearly
        // quadruples the non-degenerate one.
        let center0 = plan(Placement::BandCenter, 0, p);
        let (deg_c, nondeg_c) = fwm_power(&center0, &fiber, Direction::Co).unwrap();
        assert!(close(deg_c, 2.161480858439e-11, 1e-11));
        assert!(close(nondeg_c, 3.190521215735e-11, 1e-11));

        // Three empty slots push every surviving triple far off phase match.
        let edge3 = plan(Placement::BandEdge, 3, p);
        let (deg_g, nondeg_g) = fwm_power(&edge3, &fiber, Direction::Co).unwrap();
        assert!(close(deg_g, 5.782550962334e-14, 1e-11));
        assert!(close(nondeg_g, 3.871918871189e-13, 1e-11));
    }

    #[test]
    fn counter_propagation_carries_no_fwm() {
        let fiber = FiberParams::default();
        let p = plan(Placement::BandEdge, 0, dbm(-4.5));
        assert_eq!(
            fwm_power(&p, &fiber, Direction::Counter).unwrap(),
            (0.0, 0.0)
        );
    }

    #[test]
    fn default_profile_interpolates_between_knots() {
        let profile = RamanProfile::default();
        assert_eq!(profile.density(0.0), 0.0);
        assert_eq!(profile.density(0.3e12), 0.0);
        assert!(close(profile.density(0.70e12), 0.206892103700, 1e-12));
        assert!(close(profile.density(-0.70e12), 0.206892103700, 1e-12));
        assert!(close(profile.density(0.675e12), 0.172549208500, 1e-12));
        assert!(close(profile.density(3.70e12), 0.78, 1e-12));
        assert_eq!(profile.density(13.2e12), 1.0);
        assert_eq!(profile.density(41e12), 0.0);
        assert_eq!(profile.density(2.0e12), 0.0);
    }

    #[test]
    fn thermal_weighting_favors_stokes() {
        let profile = RamanProfile::default().with_scale(1.0);
        let df = 0.70e12;
        let x = H_PLANCK * df / (K_BOLTZMANN * 300.0);
        let n = 1.0 / x.exp_m1();
        assert!(close(n, 8.439309536031, 1e-12), "n={n}");
        let stokes = raman_efficiency(-df, &profile, 300.0);
        let anti = raman_efficiency(df, &profile, 300.0);
        assert!(close(stokes, 1.952918607385, 1e-12), "stokes={stokes}");
        assert!(close(anti, 1.746026503685, 1e-12), "anti={anti}");
        assert!(stokes > anti);
        // Detailed balance: anti/Stokes ratio is the Boltzmann factor.
        assert!(close(anti / stokes, (-x).exp(), 1e-12));
        assert_eq!(raman_efficiency(0.0, &profile, 300.0), 0.0);
    }

    #[test]
    fn scattered_power_in_both_directions() {
        let fiber = FiberParams::default();
        let profile = RamanProfile::default().with_scale(1e-22);
        let p = plan(Placement::BandEdge, 0, dbm(-4.5));
        let co = sprs_power(&p, &fiber, &profile, 3.5e10, Direction::Co).unwrap();
        let counter = sprs_power(&p, &fiber, &profile, 3.5e10, Direction::Counter).unwrap();
        assert!(close(co, 6.368916380107e-11, 1e-11), "co={co}");
        assert!(
            close(counter, 6.596431187563e-11, 1e-11),
            "counter={counter}"
        );
        // Path-integral ratio sinh(alpha L)/(alpha L), independent of load.
        let al = fiber.alpha * fiber.length;
        assert!(close(counter / co, al.sinh() / al, 1e-12));
        assert!(close(counter / co, 1.035722687170, 1e-12));
    }

    #[test]
    fn breakdown_adds_up_and_respects_toggles() {
        let fiber = FiberParams::default();
        let profile = RamanProfile::default();
        let p = plan(Placement::BandEdge, 0, dbm(-4.5));
        let both = total_interference(
            &p,
            &fiber,
            &profile,
            3.5e10,
            Direction::Co,
            Toggles::default(),
        )
        .unwrap();
        let fwm = total_interference(
            &p,
            &fiber,
            &profile,
            3.5e10,
            Direction::Co,
            Toggles::fwm_only(),
        )
        .unwrap();
        let sprs = total_interference(
            &p,
            &fiber,
            &profile,
            3.5e10,
            Direction::Co,
            Toggles::sprs_only(),
        )
        .unwrap();
        assert_eq!(fwm.p_sprs, 0.0);
        assert_eq!(sprs.p_fwm_degenerate + sprs.p_fwm_nondegenerate, 0.0);
        assert!(close(both.total, fwm.total + sprs.total, 1e-12));
        assert!(close(
            both.total,
            both.p_fwm_degenerate + both.p_fwm_nondegenerate + both.p_sprs,
            1e-15
        ));
    }

    #[test]
    fn profile_validation_rejects_malformed_tables() {
        assert!(RamanProfile::from_table(vec![(0.0, 0.0)], 1.0).is_err());
        assert!(RamanProfile::from_table(vec![(0.0, 0.0), (40e12, 0.0)], 0.0).is_err());
        assert!(
            RamanProfile::from_table(vec![(0.0, 0.0), (1e12, -0.1), (40e12, 0.0)], 1.0).is_err()
        );
        assert!(RamanProfile::from_table(
            vec![(0.0, 0.0), (1e12, 0.5), (1e12, 0.6), (40e12, 0.0)],
            1.0
        )
        .is_err());
        assert!(RamanProfile::from_table(vec![(0.0, 0.0), (30e12, 0.0)], 1.0).is_err());
        assert!(RamanProfile::from_table(vec![(5e12, 0.1), (40e12, 0.0)], 1.0).is_err());
        assert!(RamanProfile::from_table(vec![(0.0, 0.0), (40e12, 0.0)], 1.0).is_ok());
        assert!(RamanProfile::default().validate().is_ok());
    }

    #[test]
    fn guardband_never_changes_scattered_power_here() {
        // The profile's deadband below 0.55 THz means clearing up to ten
        // 50 GHz slots removes only channels that scatter nothing.
        let fiber = FiberParams::default();
        let profile = RamanProfile::default();
        let base = sprs_power(
            &plan(Placement::BandEdge, 0, dbm(-4.5)),
            &fiber,
            &profile,
            3.5e10,
            Direction::Co,
        )
        .unwrap();
        for n_gb in 1..=10 {
            let guarded = sprs_power(
                &plan(Placement::BandEdge, n_gb, dbm(-4.5)),
                &fiber,
                &profile,
                3.5e10,
                Direction::Co,
            )
            .unwrap();
            assert!(close(guarded, base, 1e-12), "n_gb={n_gb}");
        }
    }
}
