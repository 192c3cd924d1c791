//! Run configuration: TOML parsing, unit conversion, and validation.
//!
//! Config files carry field units in their names (dB/km, ps^2/km, GHz,
//! dBm); everything is converted to SI at the parse boundary so the rest
//! of the crate never sees mixed units. Unknown keys are errors, not
//! warnings, so typos cannot silently fall back to defaults. Every block
//! and every field is optional; omitted values take the reference-scenario
//! defaults.

use crate::interference::{FiberParams, RamanProfile, Toggles, DEFAULT_RAMAN_SCALE};
use crate::keyrate::{alpha_from_db_per_km, QkdParams};
use crate::planner::Scenario;
use crate::scenario::{format_kurtosis, ChannelPlan, Direction, Placement};
use serde::Deserialize;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Convert a launch power in dBm to watts.
pub fn dbm_to_watts(power_dbm: f64) -> f64 {
    10f64.powf((power_dbm - 30.0) / 10.0)
}

/// Convert a power in watts to dBm.
pub fn watts_to_dbm(power_w: f64) -> f64 {
    10.0 * power_w.log10() + 30.0
}

/// Errors from loading or validating a run configuration.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// TOML syntax error or unknown key, with location from the parser.
    #[error("parsing config: {0}")]
    Parse(#[from] toml::de::Error),
    /// A field parsed but failed range or consistency checks.
    #[error("config field {field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        message: message.into(),
    }
}

// Raw file schema. All fields optional; units still attached.

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    fiber: Option<FiberBlock>,
    grid: Option<GridBlock>,
    qkd: Option<QkdBlock>,
    scenario: Option<ScenarioBlock>,
    raman: Option<RamanBlock>,
    sweep: Option<SweepBlock>,
    output: Option<OutputBlock>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FiberBlock {
    alpha_db_per_km: Option<f64>,
    beta2_ps2_per_km: Option<f64>,
    gamma_per_w_per_km: Option<f64>,
    temperature_k: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridBlock {
    n_slots: Option<usize>,
    spacing_ghz: Option<f64>,
    band_start_thz: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct QkdBlock {
    v_a: Option<f64>,
    eta_b: Option<f64>,
    beta_rec: Option<f64>,
    v_el: Option<f64>,
    b_s_ghz: Option<f64>,
    r_s_baud: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioBlock {
    /// "edge" or "center"; mutually exclusive with `quantum_slot`.
    placement: Option<String>,
    quantum_slot: Option<usize>,
    guardband: Option<usize>,
    power_dbm: Option<f64>,
    /// Modulation label looked up for kurtosis unless `kurtosis` overrides.
    format: Option<String>,
    kurtosis: Option<f64>,
    direction: Option<String>,
    distance_km: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RamanBlock {
    /// Two-column CSV (detuning_Hz, density) replacing the built-in
    /// profile; resolved relative to the config file.
    csv_path: Option<String>,
    scale: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepBlock {
    powers_dbm: Option<Vec<f64>>,
    toggles: Option<String>,
    step_km: Option<f64>,
    max_distance_km: Option<f64>,
    skr_floor_bps: Option<f64>,
    budget_percent: Option<f64>,
    /// Calibration window in Mbit/s.
    window_mbps: Option<[f64; 2]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputBlock {
    dir: Option<String>,
    /// Significant digits for CSV values.
    precision: Option<usize>,
}

/// Sweep-layer settings shared by the CLI commands.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSettings {
    pub powers_dbm: Vec<f64>,
    pub toggles: Toggles,
    pub step_km: f64,
    pub max_distance_km: f64,
    pub skr_floor_bps: f64,
    pub budget_percent: f64,
    /// Calibration window in bit/s.
    pub window_bps: (f64, f64),
}

/// Output location and CSV precision.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputSettings {
    pub dir: PathBuf,
    pub precision: usize,
}

/// A fully resolved run configuration in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Base scenario: plan, fiber, receiver, scattering profile.
    pub scenario: Scenario,
    pub direction: Direction,
    /// Uniform launch power per classical channel in dBm.
    pub power_dbm: f64,
    /// Span length in m (mirrors `scenario.fiber.length`).
    pub distance_m: f64,
    pub sweep: SweepSettings,
    pub output: OutputSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::from_toml_str("", Path::new(".")).expect("empty config resolves to defaults")
    }
}

impl RunConfig {
    /// Load and resolve a TOML config file.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base_dir = path.parent().unwrap_or(Path::new("."));
        Self::from_toml_str(&text, base_dir)
    }

    /// Parse TOML text; relative profile paths resolve against `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let file: FileConfig = toml::from_str(text)?;
        resolve(file, base_dir)
    }

    /// Deterministic parameter echo for the run manifest, sorted by key.
    pub fn echo_lines(&self) -> Vec<(String, String)> {
        let plan = &self.scenario.plan;
        let fiber = &self.scenario.fiber;
        let qkd = &self.scenario.qkd;
        let mut lines: Vec<(String, String)> = vec![
            ("fiber.alpha_per_m".into(), format!("{:e}", fiber.alpha)),
            ("fiber.beta2_s2_per_m".into(), format!("{:e}", fiber.beta2)),
            ("fiber.gamma_per_w_m".into(), format!("{:e}", fiber.gamma)),
            ("fiber.length_m".into(), format!("{:e}", fiber.length)),
            (
                "fiber.temperature_k".into(),
                format!("{:e}", fiber.temperature),
            ),
            (
                "grid.band_start_hz".into(),
                format!("{:e}", plan.band_start_hz),
            ),
            ("grid.n_slots".into(), format!("{}", plan.n_slots)),
            ("grid.spacing_hz".into(), format!("{:e}", plan.spacing_hz)),
            ("qkd.b_s_hz".into(), format!("{:e}", qkd.b_s)),
            ("qkd.beta_rec".into(), format!("{}", qkd.beta_rec)),
            ("qkd.eta_b".into(), format!("{}", qkd.eta_b)),
            ("qkd.f_q_hz".into(), format!("{:e}", qkd.f_q)),
            ("qkd.r_s_baud".into(), format!("{:e}", qkd.r_s)),
            ("qkd.v_a".into(), format!("{}", qkd.v_a)),
            ("qkd.v_el".into(), format!("{}", qkd.v_el)),
            (
                "raman.knots".into(),
                format!("{}", self.scenario.raman.table.len()),
            ),
            (
                "raman.scale".into(),
                format!("{:e}", self.scenario.raman.scale),
            ),
            ("run.direction".into(), self.direction.label().to_string()),
            ("run.distance_m".into(), format!("{:e}", self.distance_m)),
            ("run.power_dbm".into(), format!("{}", self.power_dbm)),
            ("scenario.format".into(), self.scenario.load_format.clone()),
            ("scenario.guardband".into(), format!("{}", plan.guardband)),
            (
                "scenario.kurtosis".into(),
                format!("{}", self.scenario.load_kurtosis),
            ),
            (
                "scenario.quantum_slot".into(),
                plan.quantum_slot.map_or("unset".into(), |s| format!("{s}")),
            ),
            (
                "sweep.budget_percent".into(),
                format!("{}", self.sweep.budget_percent),
            ),
            (
                "sweep.max_distance_km".into(),
                format!("{}", self.sweep.max_distance_km),
            ),
            (
                "sweep.powers_dbm".into(),
                self.sweep
                    .powers_dbm
                    .iter()
                    .map(|p| format!("{p}"))
                    .collect::<Vec<_>>()
                    .join(";"),
            ),
            (
                "sweep.skr_floor_bps".into(),
                format!("{:e}", self.sweep.skr_floor_bps),
            ),
            ("sweep.step_km".into(), format!("{}", self.sweep.step_km)),
            (
                "sweep.toggles".into(),
                self.sweep.toggles.label().to_string(),
            ),
            (
                "sweep.window_bps".into(),
                format!(
                    "{:e};{:e}",
                    self.sweep.window_bps.0, self.sweep.window_bps.1
                ),
            ),
            (
                "output.precision".into(),
                format!("{}", self.output.precision),
            ),
        ];
        lines.sort();
        lines
    }
}

fn resolve(file: FileConfig, base_dir: &Path) -> Result<RunConfig, ConfigError> {
    let fiber_block = file.fiber.unwrap_or_default();
    let grid = file.grid.unwrap_or_default();
    let qkd_block = file.qkd.unwrap_or_default();
    let scen = file.scenario.unwrap_or_default();
    let raman_block = file.raman.unwrap_or_default();
    let sweep_block = file.sweep.unwrap_or_default();
    let output_block = file.output.unwrap_or_default();

    let distance_km = scen.distance_km.unwrap_or(10.0);
    if !(distance_km > 0.0) || !distance_km.is_finite() {
        return Err(invalid(
            "scenario.distance_km",
            format!("must be positive and finite, got {distance_km}"),
        ));
    }

    let fiber = FiberParams {
        alpha: alpha_from_db_per_km(fiber_block.alpha_db_per_km.unwrap_or(0.2)),
        // ps^2/km -> s^2/m: 1e-24 per ps^2, 1e-3 per km. Division by the
        // exact 1000.0 keeps converted defaults bit-identical to the SI
        // literals in FiberParams::default, so both paths hash the same.
        beta2: fiber_block.beta2_ps2_per_km.unwrap_or(-21.7) * 1e-27,
        gamma: fiber_block.gamma_per_w_per_km.unwrap_or(1.3) / 1000.0,
        length: distance_km * 1000.0,
        temperature: fiber_block.temperature_k.unwrap_or(300.0),
    };
    fiber
        .validate()
        .map_err(|e| invalid("fiber", e.to_string()))?;

    let plan = ChannelPlan::build_grid(
        grid.n_slots.unwrap_or(88),
        grid.spacing_ghz.unwrap_or(50.0) * 1e9,
        grid.band_start_thz.unwrap_or(191.5875) * 1e12,
    )
    .map_err(|e| invalid("grid", e.to_string()))?;

    let placement = match (scen.placement.as_deref(), scen.quantum_slot) {
        (Some(_), Some(_)) => {
            return Err(invalid(
                "scenario.placement",
                "mutually exclusive with scenario.quantum_slot",
            ))
        }
        (None, Some(slot)) => Placement::Custom(slot),
        (Some("edge"), None) | (None, None) => Placement::BandEdge,
        (Some("center"), None) => Placement::BandCenter,
        (Some(other), None) => {
            return Err(invalid(
                "scenario.placement",
                format!("expected \"edge\" or \"center\", got {other:?}"),
            ))
        }
    };

    let power_dbm = scen.power_dbm.unwrap_or(-4.5);
    if !power_dbm.is_finite() {
        return Err(invalid("scenario.power_dbm", "must be finite"));
    }
    let format = scen.format.unwrap_or_else(|| "gaussian".to_string());
    let kurtosis = match scen.kurtosis {
        Some(k) => k,
        None => format_kurtosis(&format).map_err(|e| invalid("scenario.format", e.to_string()))?,
    };

    let plan = plan
        .place_quantum(placement)
        .and_then(|p| p.apply_guardband(scen.guardband.unwrap_or(0)))
        .and_then(|p| p.load_uniform(dbm_to_watts(power_dbm), kurtosis, &format))
        .map_err(|e| invalid("scenario", e.to_string()))?;

    let qkd = QkdParams {
        v_a: qkd_block.v_a.unwrap_or(8.0),
        eta_b: qkd_block.eta_b.unwrap_or(0.6),
        beta_rec: qkd_block.beta_rec.unwrap_or(0.95),
        v_el: qkd_block.v_el.unwrap_or(0.01),
        b_s: qkd_block.b_s_ghz.unwrap_or(35.0) * 1e9,
        f_q: plan
            .quantum_frequency()
            .map_err(|e| invalid("scenario", e.to_string()))?,
        r_s: qkd_block.r_s_baud.unwrap_or(1.0e9),
    };
    qkd.validate().map_err(|e| {
        let field = match e {
            crate::keyrate::KeyRateError::InvalidParam { name, .. } => format!("qkd.{name}"),
            _ => "qkd".to_string(),
        };
        invalid(&field, e.to_string())
    })?;

    let scale = raman_block.scale.unwrap_or(DEFAULT_RAMAN_SCALE);
    let raman = match raman_block.csv_path {
        Some(rel) => RamanProfile::from_csv(&base_dir.join(rel), scale)
            .map_err(|e| invalid("raman.csv_path", e.to_string()))?,
        None => RamanProfile::default().with_scale(scale),
    };
    raman
        .validate()
        .map_err(|e| invalid("raman.scale", e.to_string()))?;

    let direction: Direction = scen
        .direction
        .as_deref()
        .unwrap_or("co")
        .parse()
        .map_err(|e: String| invalid("scenario.direction", e))?;

    let toggles: Toggles = sweep_block
        .toggles
        .as_deref()
        .unwrap_or("both")
        .parse()
        .map_err(|e: String| invalid("sweep.toggles", e))?;

    let powers_dbm = sweep_block
        .powers_dbm
        .unwrap_or_else(|| vec![-4.5, -1.5, 0.5]);
    if powers_dbm.is_empty() || powers_dbm.iter().any(|p| !p.is_finite()) {
        return Err(invalid(
            "sweep.powers_dbm",
            "must be a non-empty list of finite powers",
        ));
    }
    let step_km = sweep_block.step_km.unwrap_or(0.25);
    let max_distance_km = sweep_block.max_distance_km.unwrap_or(30.0);
    if !(step_km > 0.0) || !(max_distance_km >= step_km) {
        return Err(invalid(
            "sweep.step_km",
            format!("need 0 < step_km <= max_distance_km, got {step_km} and {max_distance_km}"),
        ));
    }
    let skr_floor_bps = sweep_block.skr_floor_bps.unwrap_or(0.0);
    if !(skr_floor_bps >= 0.0) || !skr_floor_bps.is_finite() {
        return Err(invalid("sweep.skr_floor_bps", "must be finite and >= 0"));
    }
    let budget_percent = sweep_block.budget_percent.unwrap_or(5.0);
    if !(budget_percent >= 0.0) || !budget_percent.is_finite() {
        return Err(invalid("sweep.budget_percent", "must be finite and >= 0"));
    }
    let window_mbps = sweep_block.window_mbps.unwrap_or([195.0, 205.0]);
    if !(window_mbps[0] > 0.0 && window_mbps[0] < window_mbps[1]) {
        return Err(invalid(
            "sweep.window_mbps",
            format!("must satisfy 0 < lo < hi, got {window_mbps:?}"),
        ));
    }

    let precision = output_block.precision.unwrap_or(9);
    if !(1..=17).contains(&precision) {
        return Err(invalid(
            "output.precision",
            format!("must be in 1..=17 significant digits, got {precision}"),
        ));
    }

    Ok(RunConfig {
        scenario: Scenario {
            plan,
            fiber,
            qkd,
            raman,
            load_kurtosis: kurtosis,
            load_format: format,
        },
        direction,
        power_dbm,
        distance_m: distance_km * 1000.0,
        sweep: SweepSettings {
            powers_dbm,
            toggles,
            step_km,
            max_distance_km,
            skr_floor_bps,
            budget_percent,
            window_bps: (window_mbps[0] * 1e6, window_mbps[1] * 1e6),
        },
        output: OutputSettings {
            dir: PathBuf::from(output_block.dir.unwrap_or_else(|| "out".to_string())),
            precision,
        },
    })
}
