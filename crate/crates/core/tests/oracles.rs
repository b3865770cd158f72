//! Exhaustive oracles for the most cohesive cluster search and the exact
//! audit.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use semicentroid::audit::deviation_value;
use semicentroid::mcc::{approx_mcc4, exact_mcc};
use semicentroid::random::{
    random_clustering, random_dual, random_integer_metric, random_weighted,
};
use semicentroid::{
    bruteforce_violation, exact_violation, Clustering, Criterion, Instance, LossModel,
};

/// Smallest max loss over every subset of size at least `θ` and every center.
fn all_sizes_mcc(inst: &Instance, model: &LossModel) -> f64 {
    let n = inst.n();
    let theta = inst.threshold();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << n) {
        if (mask.count_ones() as usize) < theta {
            continue;
        }
        let s: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        for y in 0..inst.m() {
            best = best.min(model.max_loss(&s, y));
        }
    }
    best
}

/// Largest deviation value over every coalition of size at least `θ`.
fn all_sizes_violation(inst: &Instance, model: &LossModel, x: &Clustering, c: Criterion) -> f64 {
    let n = inst.n();
    let theta = inst.threshold();
    let losses = model.clustering_losses(inst, x).unwrap();
    let mut best = 1.0f64;
    for mask in 1u32..(1 << n) {
        if (mask.count_ones() as usize) < theta {
            continue;
        }
        let s: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        for y in 0..inst.m() {
            best = best.max(deviation_value(model, &losses, c, &s, y));
        }
    }
    best
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn instance(kind: u8, rng: &mut ChaCha8Rng, n: usize, k: usize, lambda: f64) -> Instance {
    match kind {
        0 => random_weighted(rng, n, k, lambda),
        1 => random_integer_metric(rng, n, k, lambda),
        _ => random_dual(rng, n, k),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn exact_mcc_matches_all_sizes(seed in any::<u64>(), kind in 0u8..3, n in 1usize..9, k in 1usize..5, lambda in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = instance(kind, &mut rng, n, k.min(n), lambda);
        let model = LossModel::native(&inst);
        let pool: Vec<usize> = (0..n).collect();
        let r = exact_mcc(&inst, &model, &pool).unwrap();
        prop_assert!(close(r.max_loss, all_sizes_mcc(&inst, &model)));
        prop_assert_eq!(r.max_loss, model.max_loss(&r.members, r.center));
        let a = approx_mcc4(&inst, &model, &pool).unwrap();
        prop_assert!(a.max_loss <= 4.0 * r.max_loss + 1e-9 * r.max_loss.max(1.0));
    }

    #[test]
    fn size_threshold_audit_matches_all_sizes(seed in any::<u64>(), kind in 0u8..3, n in 2usize..9, k in 1usize..5, fjr in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = instance(kind, &mut rng, n, k.min(n), 0.4);
        let model = LossModel::native(&inst);
        let x = random_clustering(&mut rng, &inst);
        let c = if fjr { Criterion::Fjr } else { Criterion::Core };
        let brute = bruteforce_violation(&inst, &model, &x, c).unwrap();
        prop_assert!(close(brute.violation, all_sizes_violation(&inst, &model, &x, c)));
    }

    #[test]
    fn exact_audit_matches_bruteforce(seed in any::<u64>(), kind in 0u8..3, n in 2usize..13, k in 1usize..5, fjr in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = instance(kind, &mut rng, n, k.min(n), 0.6);
        let model = LossModel::native(&inst);
        let x = random_clustering(&mut rng, &inst);
        let c = if fjr { Criterion::Fjr } else { Criterion::Core };
        let brute = bruteforce_violation(&inst, &model, &x, c).unwrap();
        let exact = exact_violation(&inst, &model, &x, c).unwrap();
        prop_assert!(!exact.lower_bound);
        prop_assert!(close(brute.violation, exact.violation), "brute {} exact {}", brute.violation, exact.violation);
        if let Some(w) = &exact.witness {
            let losses = model.clustering_losses(&inst, &x).unwrap();
            prop_assert!(close(deviation_value(&model, &losses, c, &w.members, w.center), exact.violation));
        }
    }
}
