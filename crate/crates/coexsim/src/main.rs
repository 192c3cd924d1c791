//! Command-line front end: loads a TOML run configuration, applies flag
//! overrides, runs one planning operation (or the full headline preset),
//! and writes CSV results plus a run manifest.

use anyhow::Context;
use clap::{Parser, Subcommand};
use coexsim::config::{dbm_to_watts, RunConfig};
use coexsim::interference::Toggles;
use coexsim::output::{scenario_hash, OutputWriter};
use coexsim::planner::{
    calibrate_raman, dbm_slug, find_transition_power, reach, recommend_guardband, sweep_distance,
    sweep_guardband, sweep_spectral, sweep_tradeoff,
};
use coexsim::scenario::{Direction, Placement};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "coexsim",
    version,
    about = "CV-QKD / DWDM coexistence simulator and guardband planner"
)]
struct Cli {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config's output.dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan the quantum channel across every grid slot.
    Spectral {
        /// Launch power per classical channel in dBm.
        #[arg(long, allow_negative_numbers = true)]
        power: Option<f64>,
        /// Span length in km.
        #[arg(long)]
        distance: Option<f64>,
        /// Classical direction: co or counter.
        #[arg(long)]
        direction: Option<String>,
        /// Mechanisms to include: fwm, sprs, or fwm,sprs.
        #[arg(long)]
        toggles: Option<String>,
    },
    /// Sweep guardband width 0..=10 at one or more launch powers.
    Guardband {
        /// Comma-separated launch powers in dBm.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        powers: Option<Vec<f64>>,
        #[arg(long)]
        distance: Option<f64>,
        #[arg(long)]
        direction: Option<String>,
    },
    /// Key rate per direction against capacity loss per placement.
    Tradeoff {
        #[arg(long, allow_negative_numbers = true)]
        power: Option<f64>,
        #[arg(long)]
        distance: Option<f64>,
    },
    /// Longest span keeping the key rate above a floor.
    Reach {
        #[arg(long, allow_negative_numbers = true)]
        power: Option<f64>,
        /// Guardband width in slots.
        #[arg(long)]
        gb: Option<usize>,
        #[arg(long)]
        direction: Option<String>,
        /// Key-rate floor in bit/s (default 0).
        #[arg(long)]
        floor: Option<f64>,
    },
    /// Launch power where FWM overtakes SpRS.
    Transition {
        #[arg(long)]
        distance: Option<f64>,
        #[arg(long)]
        gb: Option<usize>,
    },
    /// Fit the scattering calibration factor to a key-rate window.
    Calibrate {
        /// Window as lo,hi in Mbit/s (default 195,205).
        #[arg(long, value_delimiter = ',')]
        window: Option<Vec<f64>>,
    },
    /// Regenerate the full headline dataset: calibration, spectral scans
    /// per mechanism, guardband sweeps, tradeoff tables, and distance
    /// sweeps with and without a guardband.
    Fig1,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectral { .. } => "spectral",
            Command::Guardband { .. } => "guardband",
            Command::Tradeoff { .. } => "tradeoff",
            Command::Reach { .. } => "reach",
            Command::Transition { .. } => "transition",
            Command::Calibrate { .. } => "calibrate",
            Command::Fig1 => "fig1",
        }
    }
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path).context("loading config")?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    let mut writer = OutputWriter::new(&cfg.output.dir, cfg.output.precision)
        .context("creating output directory")?;

    match &cli.command {
        Command::Spectral {
            power,
            distance,
            direction,
            toggles,
        } => {
            apply_overrides(&mut cfg, *power, *distance, direction.as_deref(), None)?;
            let toggles = match toggles {
                Some(s) => s.parse::<Toggles>().map_err(anyhow::Error::msg)?,
                None => cfg.sweep.toggles,
            };
            let sweep = sweep_spectral(
                &cfg.scenario,
                cfg.power_dbm,
                cfg.distance_m,
                cfg.direction,
                toggles,
            )?;
            let skr_col = sweep.column("SKR_bps").expect("column exists");
            let (best_row, worst_row) = extrema_by(&sweep.rows, skr_col);
            report_file(&writer.write_sweep(&sweep)?);
            println!(
                "best slot {} at {:.4} Mbit/s, worst slot {} at {:.4} Mbit/s",
                sweep.rows[best_row][0],
                sweep.rows[best_row][skr_col] / 1e6,
                sweep.rows[worst_row][0],
                sweep.rows[worst_row][skr_col] / 1e6,
            );
        }
        Command::Guardband {
            powers,
            distance,
            direction,
        } => {
            apply_overrides(&mut cfg, None, *distance, direction.as_deref(), None)?;
            let powers = powers
                .clone()
                .unwrap_or_else(|| cfg.sweep.powers_dbm.clone());
            for sweep in sweep_guardband(&cfg.scenario, &powers, cfg.distance_m, cfg.direction)? {
                let skr_col = 1;
                println!(
                    "{}: guardband 0 -> {:.4} Mbit/s, guardband 10 -> {:.4} Mbit/s",
                    sweep.label,
                    sweep.rows[0][skr_col] / 1e6,
                    sweep.rows[10][skr_col] / 1e6,
                );
                report_file(&writer.write_sweep(&sweep)?);
            }
        }
        Command::Tradeoff { power, distance } => {
            apply_overrides(&mut cfg, *power, *distance, None, None)?;
            let sweep = sweep_tradeoff(
                &cfg.scenario,
                cfg.power_dbm,
                cfg.distance_m,
                &[Placement::BandEdge, Placement::BandCenter],
                &[Direction::Co, Direction::Counter],
            )?;
            report_file(&writer.write_sweep(&sweep)?);
            let advice = recommend_guardband(
                &cfg.scenario,
                cfg.power_dbm,
                cfg.distance_m,
                cfg.direction,
                cfg.sweep.budget_percent,
            )?;
            let slug = dbm_slug(cfg.power_dbm);
            let note = if advice.meets_target {
                ""
            } else {
                " (best effort within budget)"
            };
            println!(
                "{slug}: recommend guardband {} -> {:.4} Mbit/s, {:.3}% capacity loss{note}",
                advice.n_gb,
                advice.skr_bps / 1e6,
                advice.capacity_loss_percent,
            );
            report_file(&writer.write_table(
                &format!("recommendation_{slug}.csv"),
                &["n_gb", "skr_bps", "capacity_loss_pct", "meets_target"],
                &[vec![
                    advice.n_gb as f64,
                    advice.skr_bps,
                    advice.capacity_loss_percent,
                    advice.meets_target as u8 as f64,
                ]],
            )?);
        }
        Command::Reach {
            power,
            gb,
            direction,
            floor,
        } => {
            apply_overrides(&mut cfg, *power, None, direction.as_deref(), *gb)?;
            let n_gb = gb.unwrap_or(cfg.scenario.plan.guardband);
            let floor = floor.unwrap_or(cfg.sweep.skr_floor_bps);
            let km = reach(&cfg.scenario, cfg.power_dbm, n_gb, cfg.direction, floor)?;
            let name = format!(
                "reach_{}_gb{}_{}.csv",
                dbm_slug(cfg.power_dbm),
                n_gb,
                cfg.direction.label()
            );
            report_file(&writer.write_table(
                &name,
                &["power_dbm", "n_gb", "skr_floor_bps", "reach_km"],
                &[vec![cfg.power_dbm, n_gb as f64, floor, km]],
            )?);
            println!(
                "reach({} dBm, guardband {}, {}) = {:.2} km",
                cfg.power_dbm,
                n_gb,
                cfg.direction.label(),
                km
            );
        }
        Command::Transition { distance, gb } => {
            apply_overrides(&mut cfg, None, *distance, None, *gb)?;
            let n_gb = gb.unwrap_or(cfg.scenario.plan.guardband);
            let result = find_transition_power(&cfg.scenario, cfg.distance_m, n_gb)?;
            let value = match result {
                Some(dbm) => {
                    println!("FWM overtakes SpRS at {dbm:.3} dBm/ch");
                    dbm
                }
                None => {
                    println!("no FWM/SpRS crossing within [-20, 10] dBm/ch");
                    f64::NAN
                }
            };
            report_file(&writer.write_table(
                &format!("transition_gb{n_gb}.csv"),
                &["distance_km", "n_gb", "transition_dbm"],
                &[vec![cfg.distance_m / 1000.0, n_gb as f64, value]],
            )?);
        }
        Command::Calibrate { window } => {
            let window_bps = match window {
                Some(w) => {
                    anyhow::ensure!(
                        w.len() == 2,
                        "--window takes exactly lo,hi in Mbit/s, got {} values",
                        w.len()
                    );
                    (w[0] * 1e6, w[1] * 1e6)
                }
                None => cfg.sweep.window_bps,
            };
            let cal = calibrate_raman(&cfg.scenario, window_bps)?;
            cfg.scenario.raman = cal.profile.clone();
            report_file(&writer.write_table(
                "calibration.csv",
                &["scale", "achieved_bps", "window_lo_bps", "window_hi_bps"],
                &[vec![
                    cal.scale,
                    cal.achieved_bps,
                    window_bps.0,
                    window_bps.1,
                ]],
            )?);
            println!(
                "calibrated scale {:.6e} achieving {:.4} Mbit/s",
                cal.scale,
                cal.achieved_bps / 1e6
            );
        }
        Command::Fig1 => run_fig1(&mut cfg, &mut writer)?,
    }

    let manifest = writer.finish(
        cli.command.name(),
        &cfg.echo_lines(),
        scenario_hash(&cfg.scenario),
    )?;
    report_file(&manifest);
    Ok(())
}

/// Apply flag overrides onto the config and rebuild the base plan so the
/// scenario fingerprint reflects what actually runs.
fn apply_overrides(
    cfg: &mut RunConfig,
    power_dbm: Option<f64>,
    distance_km: Option<f64>,
    direction: Option<&str>,
    gb: Option<usize>,
) -> anyhow::Result<()> {
    if let Some(p) = power_dbm {
        anyhow::ensure!(p.is_finite(), "--power must be finite, got {p}");
        cfg.power_dbm = p;
    }
    if let Some(d) = distance_km {
        anyhow::ensure!(
            d > 0.0 && d.is_finite(),
            "--distance must be positive km, got {d}"
        );
        cfg.distance_m = d * 1000.0;
    }
    if let Some(s) = direction {
        cfg.direction = s.parse::<Direction>().map_err(anyhow::Error::msg)?;
    }
    let n_gb = gb.unwrap_or(cfg.scenario.plan.guardband);
    cfg.scenario.plan = cfg
        .scenario
        .plan_variant(
            cfg.scenario.plan.placement,
            n_gb,
            dbm_to_watts(cfg.power_dbm),
        )
        .context("rebuilding channel plan from overrides")?;
    cfg.scenario.fiber.length = cfg.distance_m;
    Ok(())
}

/// Row indices of the maximum and minimum of a column.
fn extrema_by(rows: &[Vec<f64>], col: usize) -> (usize, usize) {
    let mut best = 0;
    let mut worst = 0;
    for (i, row) in rows.iter().enumerate() {
        if row[col] > rows[best][col] {
            best = i;
        }
        if row[col] < rows[worst][col] {
            worst = i;
        }
    }
    (best, worst)
}

fn report_file(path: &std::path::Path) {
    if let Some(name) = path.file_name() {
        println!("wrote {}", name.to_string_lossy());
    }
}

/// The headline preset: calibrate, then regenerate every panel's data.
fn run_fig1(cfg: &mut RunConfig, writer: &mut OutputWriter) -> anyhow::Result<()> {
    let cal = calibrate_raman(&cfg.scenario, cfg.sweep.window_bps)?;
    cfg.scenario.raman = cal.profile.clone();
    writer.write_table(
        "calibration.csv",
        &["scale", "achieved_bps", "window_lo_bps", "window_hi_bps"],
        &[vec![
            cal.scale,
            cal.achieved_bps,
            cfg.sweep.window_bps.0,
            cfg.sweep.window_bps.1,
        ]],
    )?;
    println!(
        "calibrated scale {:.6e} achieving {:.4} Mbit/s",
        cal.scale,
        cal.achieved_bps / 1e6
    );

    // Spectral scans per mechanism at the reference power.
    for toggles in [
        Toggles::fwm_only(),
        Toggles::sprs_only(),
        Toggles::default(),
    ] {
        let sweep = sweep_spectral(
            &cfg.scenario,
            cfg.power_dbm,
            cfg.distance_m,
            Direction::Co,
            toggles,
        )?;
        report_file(&writer.write_sweep(&sweep)?);
    }
    // Guardband sweeps at every configured power.
    for sweep in sweep_guardband(
        &cfg.scenario,
        &cfg.sweep.powers_dbm,
        cfg.distance_m,
        Direction::Co,
    )? {
        report_file(&writer.write_sweep(&sweep)?);
    }
    // Rate/loss tradeoff tables.
    for &p in &cfg.sweep.powers_dbm.clone() {
        let sweep = sweep_tradeoff(
            &cfg.scenario,
            p,
            cfg.distance_m,
            &[Placement::BandEdge, Placement::BandCenter],
            &[Direction::Co, Direction::Counter],
        )?;
        report_file(&writer.write_sweep(&sweep)?);
    }
    // Distance sweeps, bare and guarded.
    for &p in &cfg.sweep.powers_dbm.clone() {
        for n_gb in [0usize, 3] {
            let sweep = sweep_distance(
                &cfg.scenario,
                p,
                n_gb,
                cfg.sweep.max_distance_km,
                cfg.sweep.step_km,
                &[Direction::Co, Direction::Counter],
            )?;
            report_file(&writer.write_sweep(&sweep)?);
        }
    }
    Ok(())
}
