mod common;

use common::random_bifiltration;
use cubmp::filtration::{expand_bifiltration, random_monotone_cmf};
use cubmp::metrics::{mp_diagram_distance, Essentials};
use cubmp::multipers::{betti_numbers, hilbert_function, slice_bifiltration, slice_compact, SliceAxis};
use cubmp::persistence::{Dims, HomologyDim};
use cubmp::vectorize::{induced_mp_vectorization, Aggregator, InducedBase, VectorizationParams, Weights};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn induced_betti_equals_hilbert_function() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let (rows, cols) = (rng.gen_range(1..5), rng.gen_range(1..7));
        let (h, w) = (rng.gen_range(1..7), rng.gen_range(1..7));
        let bif = random_bifiltration(&mut rng, rows, cols, h, w);
        bif.check_monotone().unwrap();
        let sliced = slice_bifiltration(&bif, SliceAxis::Rows, None).unwrap();
        // column t of the bifiltration is level t + 1 of every slice
        let levels: Vec<f64> = (1..=cols).map(|l| l as f64).collect();
        let params = VectorizationParams::new(levels, Weights::Scalar(1.0), Aggregator::Flatten).unwrap();
        for dim in [HomologyDim::Zero, HomologyDim::One] {
            let hilbert = hilbert_function(&bif, dim).unwrap();
            let induced = induced_mp_vectorization(&sliced, InducedBase::Betti, dim, &params).unwrap();
            for s in 0..rows {
                for t in 0..cols {
                    assert_eq!(induced.get(s, t), hilbert.get(s, t) as f64);
                    assert_eq!(hilbert.get(s, t), betti_numbers(bif.get(s, t)).get(dim));
                }
            }
        }
    }
}

#[test]
fn compact_slicing_equals_expanded_slicing() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let cmf = random_monotone_cmf(&mut rng, 3, 5, 6, 5).unwrap();
        let a = slice_compact(&cmf, None).unwrap();
        let b = slice_bifiltration(&expand_bifiltration(&cmf).unwrap(), SliceAxis::Rows, None).unwrap();
        assert_eq!(a.levels, b.levels);
        for (x, y) in a.slices.iter().zip(&b.slices) {
            for dim in [HomologyDim::Zero, HomologyDim::One] {
                assert_eq!(x.sorted_bars(dim), y.sorted_bars(dim));
            }
        }
        assert_eq!(
            mp_diagram_distance(&a, &b, 1.0, Dims::Both, Essentials::Clip(5.0), None).unwrap(),
            0.0
        );
    }
}

#[test]
fn pooled_slicing_is_identical() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let bif = random_bifiltration(&mut rng, 6, 9, 12, 10);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    assert_eq!(
        slice_bifiltration(&bif, SliceAxis::Rows, None).unwrap(),
        slice_bifiltration(&bif, SliceAxis::Rows, Some(&pool)).unwrap()
    );
}
