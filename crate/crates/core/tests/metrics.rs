mod common;

use common::{brute_force_wasserstein, lattice_diagram, real_diagram};
use cubmp::metrics::{aggregate_costs, matching_costs, wasserstein, Essentials};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn w(a: &[(f64, f64)], b: &[(f64, f64)], p: f64) -> f64 {
    wasserstein(a, b, p, Essentials::Exclude).unwrap().cost
}

#[test]
fn solver_equals_enumeration_on_lattice_diagrams() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..150 {
        let (a, b) = (lattice_diagram(&mut rng, 5), lattice_diagram(&mut rng, 5));
        for p in [1.0, 2.0, f64::INFINITY] {
            assert_eq!(
                w(&a, &b, p),
                brute_force_wasserstein(&a, &b, p),
                "trial {trial} p {p} {a:?} {b:?}"
            );
        }
    }
}

#[test]
fn solver_matches_enumeration_on_real_diagrams() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let (a, b) = (real_diagram(&mut rng, 5), real_diagram(&mut rng, 5));
        for p in [1.0, 1.5, 3.0, f64::INFINITY] {
            let (x, y) = (w(&a, &b, p), brute_force_wasserstein(&a, &b, p));
            assert!((x - y).abs() <= 1e-12 * y.max(1.0), "{x} vs {y}");
        }
    }
}

#[test]
fn matching_covers_every_point_once() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let (a, b) = (real_diagram(&mut rng, 6), real_diagram(&mut rng, 6));
        let r = wasserstein(&a, &b, 2.0, Essentials::Exclude).unwrap();
        let mut seen_a = vec![0; a.len()];
        let mut seen_b = vec![0; b.len()];
        for &(i, j) in &r.matching {
            if let Some(i) = i {
                seen_a[i] += 1;
            }
            if let Some(j) = j {
                seen_b[j] += 1;
            }
        }
        assert!(seen_a.iter().chain(&seen_b).all(|&c| c == 1));
        assert_eq!(r.cost, aggregate_costs(&matching_costs(&a, &b, &r.matching), 2.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn metric_axioms(seed in any::<u64>(), p in prop::sample::select(vec![1.0, 2.0, f64::INFINITY])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (real_diagram(&mut rng, 6), real_diagram(&mut rng, 6), real_diagram(&mut rng, 6));
        prop_assert_eq!(w(&a, &a, p), 0.0);
        prop_assert_eq!(w(&a, &b, p), w(&b, &a, p));
        prop_assert!(w(&a, &c, p) <= w(&a, &b, p) + w(&b, &c, p) + 1e-9);
    }

    #[test]
    fn order_of_points_is_irrelevant(seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (real_diagram(&mut rng, 6), real_diagram(&mut rng, 6));
        let mut a2 = a.clone();
        a2.shuffle(&mut rng);
        prop_assert_eq!(w(&a, &b, 1.0), w(&a2, &b, 1.0));
    }
}
