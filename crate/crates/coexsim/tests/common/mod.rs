//! Helpers shared by the integration suites: tolerance checks and the
//! exhaustive FWM oracle used both standalone and by the acceptance gate.
#![allow(dead_code)]

use coexsim::interference::{delta_beta, fwm_efficiency, FiberParams};
use coexsim::scenario::{ChannelPlan, ClassicalChannel, Placement};
use std::collections::BTreeSet;

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

/// Exhaustive FWM oracle: scan every ordered (a, b, c) triple of occupied
/// slots and keep those satisfying the resonance f_a + f_b - f_c = f_i with
/// the idler distinct from both pumps. Ordered pump pairs count twice,
/// reproducing the factor 4 on unordered pairs; coincident pumps form the
/// degenerate set with the (kurtosis + 2) statistics factor.
pub fn fwm_by_resonance_scan(
    plan: &ChannelPlan,
    fiber: &FiberParams,
) -> (f64, f64, BTreeSet<(usize, usize, usize)>) {
    let quantum = plan.quantum_slot.expect("quantum slot set");
    let f = |slot: usize| plan.slot_frequency(slot).unwrap();
    let channels: Vec<&ClassicalChannel> = plan.classical.iter().collect();
    let mut deg = 0.0;
    let mut nondeg = 0.0;
    let mut triples = BTreeSet::new();
    for a in &channels {
        for b in &channels {
            for c in &channels {
                if a.slot + b.slot != quantum + c.slot {
                    continue;
                }
                if c.slot == a.slot || c.slot == b.slot {
                    continue;
                }
                let rho = fwm_efficiency(
                    delta_beta(f(quantum), f(a.slot), f(b.slot), fiber.beta2),
                    fiber.alpha,
                    fiber.length,
                );
                let product = a.power_w * b.power_w * c.power_w * rho;
                if a.slot == b.slot {
                    deg += (a.kurtosis + 2.0) * product;
                } else {
                    nondeg += 2.0 * product;
                }
                triples.insert((a.slot.min(b.slot), a.slot.max(b.slot), c.slot));
            }
        }
    }
    let prefactor = 16.0 * fiber.gamma * fiber.gamma / 81.0 * (-fiber.alpha * fiber.length).exp();
    (deg * prefactor, nondeg * prefactor, triples)
}

/// Triple set predicted by the pair rule the library documents: degenerate
/// idlers at 2h - i, non-degenerate idlers at h + l - i.
pub fn pair_rule_triples(plan: &ChannelPlan) -> BTreeSet<(usize, usize, usize)> {
    let quantum = plan.quantum_slot.expect("quantum slot set");
    let occupied: BTreeSet<usize> = plan.classical.iter().map(|c| c.slot).collect();
    let in_grid = |k: isize| k >= 1 && k <= plan.n_slots as isize;
    let mut triples = BTreeSet::new();
    for &h in &occupied {
        let k = 2 * h as isize - quantum as isize;
        if in_grid(k) && occupied.contains(&(k as usize)) {
            triples.insert((h, h, k as usize));
        }
    }
    for &h in &occupied {
        for &l in occupied.range((h + 1)..) {
            let k = h as isize + l as isize - quantum as isize;
            if in_grid(k) && occupied.contains(&(k as usize)) && k != h as isize && k != l as isize
            {
                triples.insert((h, l, k as usize));
            }
        }
    }
    triples
}

/// Grid with deterministic non-uniform powers and mixed kurtosis so the
/// oracle exercises every factor, optionally thinned to sparse occupancy.
pub fn varied_plan(n_slots: usize, quantum: usize, n_gb: usize, sparse: bool) -> ChannelPlan {
    let mut plan = ChannelPlan::build_grid(n_slots, 50e9, 191.5875e12)
        .unwrap()
        .place_quantum(Placement::Custom(quantum))
        .unwrap()
        .apply_guardband(n_gb)
        .unwrap()
        .load_uniform(1e-3, 0.0, "gaussian")
        .unwrap();
    if sparse {
        plan.classical.retain(|c| c.slot % 3 != 0);
    }
    for ch in &mut plan.classical {
        ch.power_w = 1e-3 * (1.0 + 0.05 * ch.slot as f64);
        if ch.slot % 2 == 0 {
            ch.kurtosis = -0.5;
        }
    }
    plan
}
