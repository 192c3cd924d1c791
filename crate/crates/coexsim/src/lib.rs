//! Coexistence simulator for a continuous-variable QKD channel sharing a
//! fiber with classical DWDM traffic.
//!
//! The library is organized as a pipeline:
//!
//! * [`scenario`] describes the channel grid: which slot carries the quantum
//!   signal, which slots carry classical channels, and how wide the guardband
//!   around the quantum slot is.
//! * [`interference`] computes the in-band interference power falling into
//!   the quantum slot from four-wave mixing and spontaneous Raman scattering.
//! * [`keyrate`] converts channel transmittance and excess noise into an
//!   asymptotic secret key rate for Gaussian-modulated coherent states with
//!   homodyne detection.
//! * [`planner`] drives the three layers through parameter sweeps: spectral
//!   assignment scans, guardband sweeps, reach estimation, calibration, and
//!   guardband recommendation.
//! * [`config`] and [`output`] handle TOML run configuration and
//!   deterministic CSV/manifest emission for the CLI.

// Validators use `!(x > 0.0)` on purpose: unlike `x <= 0.0`, the negated
// form also rejects NaN without a separate check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod interference;
pub mod keyrate;
pub mod output;
pub mod planner;
pub mod scenario;
