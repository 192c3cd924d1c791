//! Deterministic result emission: CSV files with fixed significant-digit
//! formatting, a scenario fingerprint, and a run manifest listing every
//! output with its content hash.
//!
//! Nothing here depends on time, environment, or iteration order of
//! unordered containers, so identical runs produce byte-identical files.

use crate::planner::{Scenario, SweepResult};
use std::io;
use std::path::{Path, PathBuf};

/// Format a value with `sig` significant digits in scientific notation.
/// Zero collapses to "0" (covering negative zero); non-finite values format
/// as themselves.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    format!("{:.*e}", sig.max(1) - 1, x)
}

/// 64-bit FNV-1a hash.
pub fn fnv1a_64(bytes: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf29ce484222325;
    const PRIME: u64 = 0x100000001b3;
    bytes
        .iter()
        .fold(OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(PRIME))
}

/// Fingerprint of everything that determines a scenario's results: grid
/// geometry, quantum placement, every classical channel, fiber, receiver,
/// and scattering profile.
pub fn scenario_hash(scenario: &Scenario) -> u64 {
    use std::fmt::Write;
    let mut s = String::with_capacity(4096);
    let plan = &scenario.plan;
    let _ = write!(
        s,
        "grid:{}:{:.17e}:{:.17e};q:{};gb:{};",
        plan.n_slots,
        plan.spacing_hz,
        plan.band_start_hz,
        plan.quantum_slot.map_or(-1i64, |q| q as i64),
        plan.guardband,
    );
    for ch in &plan.classical {
        let _ = write!(
            s,
            "ch:{}:{:.17e}:{:.17e}:{};",
            ch.slot, ch.power_w, ch.kurtosis, ch.format
        );
    }
    let f = &scenario.fiber;
    let _ = write!(
        s,
        "fiber:{:.17e}:{:.17e}:{:.17e}:{:.17e}:{:.17e};",
        f.alpha, f.beta2, f.gamma, f.length, f.temperature
    );
    let q = &scenario.qkd;
    let _ = write!(
        s,
        "qkd:{:.17e}:{:.17e}:{:.17e}:{:.17e}:{:.17e}:{:.17e}:{:.17e};",
        q.v_a, q.eta_b, q.beta_rec, q.v_el, q.b_s, q.f_q, q.r_s
    );
    let _ = write!(s, "raman:{:.17e};", scenario.raman.scale);
    for &(x, y) in &scenario.raman.table {
        let _ = write!(s, "k:{x:.17e}:{y:.17e};");
    }
    let _ = write!(
        s,
        "load:{:.17e}:{}",
        scenario.load_kurtosis, scenario.load_format
    );
    fnv1a_64(s.as_bytes())
}

/// Render a sweep as CSV text: header row, then data rows sorted as the
/// planner produced them, every line `\n`-terminated. Slot-count x columns
/// print as integers, everything else with `precision` significant digits.
pub fn sweep_to_csv(sweep: &SweepResult, precision: usize) -> String {
    let mut out = String::with_capacity(64 * (sweep.rows.len() + 1));
    out.push_str(&sweep.columns.join(","));
    out.push('\n');
    for row in &sweep.rows {
        for (i, &v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            if i == 0 && sweep.kind.x_is_integer() {
                out.push_str(&format!("{}", v as i64));
            } else {
                out.push_str(&format_sig(v, precision));
            }
        }
        out.push('\n');
    }
    out
}

/// Collects output files for one run and finishes with a manifest that
/// echoes the inputs, the scenario fingerprint, and a content hash per
/// file.
pub struct OutputWriter {
    dir: PathBuf,
    precision: usize,
    files: Vec<(String, u64)>,
}

impl OutputWriter {
    /// Create the output directory (and parents) if needed.
    pub fn new(dir: &Path, precision: usize) -> io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(OutputWriter {
            dir: dir.to_path_buf(),
            precision,
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Write one sweep as `<kind>_<label>.csv`.
    pub fn write_sweep(&mut self, sweep: &SweepResult) -> io::Result<PathBuf> {
        let name = format!("{}_{}.csv", sweep.kind.label(), sweep.label);
        let content = sweep_to_csv(sweep, self.precision);
        self.write_named(&name, &content)
    }

    /// Write a small single-table CSV, e.g. a scalar result row.
    pub fn write_table(
        &mut self,
        name: &str,
        header: &[&str],
        rows: &[Vec<f64>],
    ) -> io::Result<PathBuf> {
        let mut content = String::new();
        content.push_str(&header.join(","));
        content.push('\n');
        for row in rows {
            let cells: Vec<String> = row.iter().map(|&v| format_sig(v, self.precision)).collect();
            content.push_str(&cells.join(","));
            content.push('\n');
        }
        self.write_named(name, &content)
    }

    fn write_named(&mut self, name: &str, content: &str) -> io::Result<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, content)?;
        self.files
            .push((name.to_string(), fnv1a_64(content.as_bytes())));
        Ok(path)
    }

    /// Write `run_manifest.txt` and return its path. The manifest contains
    /// no timestamps so reruns stay byte-identical.
    pub fn finish(
        self,
        command: &str,
        echo: &[(String, String)],
        scenario_fingerprint: u64,
    ) -> io::Result<PathBuf> {
        let mut m = String::with_capacity(2048);
        m.push_str("coexsim run manifest\n");
        m.push_str(&format!("version: {}\n", env!("CARGO_PKG_VERSION")));
        m.push_str(&format!("command: {command}\n"));
        m.push_str(&format!("scenario_hash: {scenario_fingerprint:016x}\n"));
        m.push_str("\n[parameters]\n");
        for (key, value) in echo {
            m.push_str(&format!("{key} = {value}\n"));
        }
        m.push_str("\n[outputs]\n");
        for (name, hash) in &self.files {
            m.push_str(&format!("{name} fnv64:{hash:016x}\n"));
        }
        let path = self.dir.join("run_manifest.txt");
        std::fs::write(&path, m)?;
        Ok(path)
    }
}
