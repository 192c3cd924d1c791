//! Independent numerical oracles for the interference model.
//!
//! Each test recomputes a library quantity by a different method: direct
//! quadrature for the phase-matching integral, an exhaustive O(N^3)
//! resonance scan for the FWM triple sum, and closed-form identities for
//! the scattering path integrals and thermal weighting. Agreement is
//! required to tight relative tolerances.

mod common;

use common::{fwm_by_resonance_scan, pair_rule_triples, rel_close, varied_plan};

use coexsim::interference::{
    fwm_efficiency, fwm_power, raman_efficiency, sprs_power, FiberParams, RamanProfile,
};
use coexsim::keyrate::{H_PLANCK, K_BOLTZMANN};
use coexsim::scenario::{ChannelPlan, Direction, Placement};

/// |integral_0^L e^{(-alpha + i db) z} dz|^2 by composite Simpson
/// quadrature on the real and imaginary parts.
fn efficiency_by_quadrature(db: f64, alpha: f64, length: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = length / n as f64;
    let f_re = |z: f64| (-alpha * z).exp() * (db * z).cos();
    let f_im = |z: f64| (-alpha * z).exp() * (db * z).sin();
    let mut re = f_re(0.0) + f_re(length);
    let mut im = f_im(0.0) + f_im(length);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        let z = k as f64 * h;
        re += w * f_re(z);
        im += w * f_im(z);
    }
    re *= h / 3.0;
    im *= h / 3.0;
    re * re + im * im
}

#[test]
fn phase_matching_efficiency_matches_quadrature() {
    let base = FiberParams::default();
    let db1 = 2.141704155036391e-3;
    let cases: [(f64, f64, f64); 8] = [
        (0.0, base.alpha, 10e3),
        (db1, base.alpha, 10e3),
        (-db1, base.alpha, 10e3),
        (10.0 * db1, base.alpha, 10e3),
        (14.0 * db1, base.alpha, 10e3),
        (db1, base.alpha, 25e3),
        (db1, 2.0 * base.alpha, 5e3),
        (3.7e-4, 1e-5, 1e3),
    ];
    for (db, alpha, length) in cases {
        // Resolution follows the total accumulated phase so each
        // oscillation is sampled densely enough for 1e-10 agreement.
        let cycles = (db * length).abs() / std::f64::consts::TAU;
        let intervals = 200_000 + 4_000 * cycles.ceil() as usize;
        let analytic = fwm_efficiency(db, alpha, length);
        let numeric = efficiency_by_quadrature(db, alpha, length, intervals);
        assert!(
            rel_close(analytic, numeric, 1e-10),
            "db={db}, alpha={alpha}, L={length}: analytic={analytic}, quadrature={numeric}"
        );
    }
}

#[test]
fn fwm_triple_sum_matches_exhaustive_resonance_scan() {
    let fiber = FiberParams::default();
    let mut nonzero_cases = 0;
    for n_slots in [4usize, 8, 12, 16] {
        for quantum in [1, n_slots / 2, n_slots] {
            for n_gb in 0..=3 {
                for sparse in [false, true] {
                    let plan = varied_plan(n_slots, quantum, n_gb, sparse);
                    let (deg, nondeg) = fwm_power(&plan, &fiber, Direction::Co).unwrap();
                    let (oracle_deg, oracle_nondeg, oracle_triples) =
                        fwm_by_resonance_scan(&plan, &fiber);
                    let label = format!("N={n_slots}, q={quantum}, gb={n_gb}, sparse={sparse}");
                    assert_eq!(
                        pair_rule_triples(&plan),
                        oracle_triples,
                        "triple sets diverge for {label}"
                    );
                    if oracle_deg == 0.0 {
                        assert_eq!(deg, 0.0, "{label}");
                    } else {
                        assert!(
                            rel_close(deg, oracle_deg, 1e-12),
                            "{label}: deg {deg} vs oracle {oracle_deg}"
                        );
                        nonzero_cases += 1;
                    }
                    if oracle_nondeg == 0.0 {
                        assert_eq!(nondeg, 0.0, "{label}");
                    } else {
                        assert!(
                            rel_close(nondeg, oracle_nondeg, 1e-12),
                            "{label}: nondeg {nondeg} vs oracle {oracle_nondeg}"
                        );
                    }
                }
            }
        }
    }
    // The sweep must actually exercise non-trivial sums.
    assert!(nonzero_cases > 20, "only {nonzero_cases} non-zero cases");
}

#[test]
fn full_grid_fwm_matches_the_scan_too() {
    // One 88-slot case ties the small-grid oracle to production size.
    let fiber = FiberParams::default();
    let plan = varied_plan(88, 88, 0, false);
    let (deg, nondeg) = fwm_power(&plan, &fiber, Direction::Co).unwrap();
    let (oracle_deg, oracle_nondeg, _) = fwm_by_resonance_scan(&plan, &fiber);
    assert!(rel_close(deg, oracle_deg, 1e-12));
    assert!(rel_close(nondeg, oracle_nondeg, 1e-12));
}

#[test]
fn thermal_weighting_obeys_detailed_balance() {
    let profile = RamanProfile::default().with_scale(1.0);
    for temperature in [200.0, 300.0, 400.0] {
        for df in [0.6e12, 0.7e12, 3.7e12, 13.2e12, 24.0e12] {
            let stokes = raman_efficiency(-df, &profile, temperature);
            let anti = raman_efficiency(df, &profile, temperature);
            if stokes == 0.0 {
                assert_eq!(anti, 0.0);
                continue;
            }
            let boltzmann = (-H_PLANCK * df / (K_BOLTZMANN * temperature)).exp();
            assert!(
                rel_close(anti / stokes, boltzmann, 1e-12),
                "T={temperature}, df={df}: ratio {} vs {boltzmann}",
                anti / stokes
            );
        }
    }
}

fn fully_loaded_plan() -> ChannelPlan {
    ChannelPlan::build_grid(88, 50e9, 191.5875e12)
        .unwrap()
        .place_quantum(Placement::BandEdge)
        .unwrap()
        .load_uniform(1e-3, 0.0, "gaussian")
        .unwrap()
}

#[test]
fn directional_path_integrals_obey_the_sinh_identity() {
    let profile = RamanProfile::default();
    let plan = fully_loaded_plan();
    for length in [1e3, 10e3, 50e3] {
        let fiber = FiberParams::default().with_length(length);
        let co = sprs_power(&plan, &fiber, &profile, 3.5e10, Direction::Co).unwrap();
        let counter = sprs_power(&plan, &fiber, &profile, 3.5e10, Direction::Counter).unwrap();
        let al = fiber.alpha * length;
        assert!(
            rel_close(counter / co, al.sinh() / al, 1e-12),
            "L={length}: ratio {}",
            counter / co
        );
        assert!(counter > co);
    }
}

#[test]
fn directions_coincide_in_the_transparent_fiber_limit() {
    let profile = RamanProfile::default();
    let plan = fully_loaded_plan();

    // alpha L ~ 5e-5: the leading correction (alpha L)^2 / 6 ~ 3.5e-10
    // still dominates the cancellation noise in 1 - e^{-2 alpha L}.
    let short = FiberParams::default().with_length(1.0);
    let co = sprs_power(&plan, &short, &profile, 3.5e10, Direction::Co).unwrap();
    let counter = sprs_power(&plan, &short, &profile, 3.5e10, Direction::Counter).unwrap();
    assert!(
        rel_close(co, counter, 1e-9),
        "ratio-1 = {}",
        counter / co - 1.0
    );

    // alpha L ~ 1e-3: the series term is resolvable and must match.
    let medium = FiberParams::default().with_length(21.7);
    let al = medium.alpha * medium.length;
    let co = sprs_power(&plan, &medium, &profile, 3.5e10, Direction::Co).unwrap();
    let counter = sprs_power(&plan, &medium, &profile, 3.5e10, Direction::Counter).unwrap();
    let series = al * al / 6.0;
    assert!(
        rel_close(counter / co - 1.0, series, 1e-4),
        "ratio-1 = {} vs series {series}",
        counter / co - 1.0
    );
}
