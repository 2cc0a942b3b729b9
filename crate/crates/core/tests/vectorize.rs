mod common;

use common::perslay_gradient_error;
use cubmp::filtration::random_monotone_cmf;
use cubmp::multipers::slice_compact;
use cubmp::vectorize::{
    betti_curve_default, landscape_vector, mp_vectorization, perslay_vector, psi_mp, silhouette, Aggregator,
    InducedBase, VectorizationParams, DEFAULT_BETTI_BINS,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bars_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0f64..8.0, 0.2f64..5.0).prop_map(|(b, l)| (b, b + l)), 1..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gradients_match_central_differences(bars in bars_strategy(), w in 0.5f64..2.5, offset in 0.0f64..0.5) {
        let samples: Vec<f64> = (0..14).map(|j| offset + j as f64 * 0.7).collect();
        if let Some(err) = perslay_gradient_error(&bars, w, &samples, 1e-5, 1e-4) {
            prop_assert!(err < 1e-5, "relative error {err}");
        }
    }

    #[test]
    fn landscapes_are_ordered_and_bounded(bars in bars_strategy()) {
        let samples: Vec<f64> = (0..30).map(|j| j as f64 * 0.45).collect();
        let l1 = landscape_vector(&bars, 1, &samples);
        let l2 = landscape_vector(&bars, 2, &samples);
        let total = perslay_vector(&bars, 0.0, &samples);
        for j in 0..samples.len() {
            prop_assert!(l1[j] >= l2[j] && l2[j] >= 0.0);
            prop_assert!(l1[j] <= total[j] + 1e-12);
        }
    }

    #[test]
    fn silhouette_is_a_weighted_average(bars in bars_strategy(), w in 0.0f64..2.0) {
        let samples: Vec<f64> = (0..30).map(|j| j as f64 * 0.45).collect();
        let s = silhouette(&bars, w, &samples);
        let l1 = landscape_vector(&bars, 1, &samples);
        for j in 0..samples.len() {
            prop_assert!(s[j] >= 0.0 && s[j] <= l1[j] + 1e-12);
        }
    }
}

#[test]
fn default_betti_curve_has_hundred_bins() {
    let (thresholds, counts) = betti_curve_default(&[(0.0, 3.0), (1.0, f64::INFINITY)]);
    assert_eq!((thresholds.len(), counts.len()), (DEFAULT_BETTI_BINS, 100));
    assert_eq!(counts[0], 1);
}

#[test]
fn eight_slices_sixteen_levels_give_1600_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cmf = random_monotone_cmf(&mut rng, 8, 16, 20, 20).unwrap();
    let sliced = slice_compact(&cmf, None).unwrap();
    let params = VectorizationParams::evenly_spaced(16.0, 100, 1.0).unwrap();
    let v = psi_mp(&sliced, &params).unwrap();
    assert_eq!(v.shape, [8, 2, 100]);
    assert_eq!(v.aggregate.len(), 1600);
    let mean = psi_mp(&sliced, &params.clone().with_aggregator(Aggregator::MeanOverSlices)).unwrap();
    assert_eq!(mean.aggregate.len(), 200);
    for base in [InducedBase::Betti, InducedBase::Silhouette, InducedBase::Landscape(2)] {
        assert_eq!(mp_vectorization(&sliced, base, &params).unwrap().values.len(), 1600);
    }
}

#[test]
fn sliced_vectorization_is_deterministic_under_pools() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let cmf = random_monotone_cmf(&mut rng, 4, 8, 30, 30).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let params = VectorizationParams::evenly_spaced(8.0, 25, 1.3).unwrap();
    let a = psi_mp(&slice_compact(&cmf, None).unwrap(), &params).unwrap();
    let b = psi_mp(&slice_compact(&cmf, Some(&pool)).unwrap(), &params).unwrap();
    assert_eq!(a, b);
}
