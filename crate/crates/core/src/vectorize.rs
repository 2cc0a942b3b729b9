//! Fixed-size vectorizations of persistence diagrams.
//!
//! Every function here works on bars `(birth, death)`. Bars are put in a
//! canonical order before any floating-point accumulation, so the output does
//! not depend on the order in which pairs are supplied. Tent-based functions
//! need finite bars: use [`clip_bars`] (or the sliced helpers, which clip to
//! the top level) before calling them; bars with an infinite death are
//! skipped otherwise.

use crate::error::{Error, Result};
use crate::filtration::linspace;
use crate::multipers::SlicedDiagrams;
use crate::persistence::{HomologyDim, PersistenceDiagram};

/// Number of thresholds used by [`betti_curve_default`].
pub const DEFAULT_BETTI_BINS: usize = 100;

/// Tent function of a bar: `max(0, (d - b)/2 - |t - (b + d)/2|)`.
#[inline]
pub fn triangle(birth: f64, death: f64, t: f64) -> f64 {
    (0.5 * (death - birth) - (t - 0.5 * (birth + death)).abs()).max(0.0)
}

/// Replaces infinite deaths by `max_level` and drops bars that become empty.
pub fn clip_bars(bars: &[(f64, f64)], max_level: f64) -> Vec<(f64, f64)> {
    bars.iter()
        .map(|&(b, d)| (b, if d.is_finite() { d } else { max_level }))
        .filter(|&(b, d)| b < d)
        .collect()
}

fn canonical(bars: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = bars.iter().copied().filter(|(_, d)| d.is_finite()).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    v
}

/// Number of bars with `birth <= tau < death` at each threshold.
pub fn betti_curve(bars: &[(f64, f64)], thresholds: &[f64]) -> Vec<usize> {
    thresholds
        .iter()
        .map(|&tau| bars.iter().filter(|&&(b, d)| b <= tau && tau < d).count())
        .collect()
}

/// Thresholds spanning the finite values of `bars`.
pub fn default_betti_thresholds(bars: &[(f64, f64)], bins: usize) -> Vec<f64> {
    let finite = bars.iter().flat_map(|&(b, d)| [b, d]).filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo > hi {
        return vec![0.0; bins];
    }
    linspace(lo, hi, bins)
}

/// [`betti_curve`] over [`DEFAULT_BETTI_BINS`] thresholds across the value range.
pub fn betti_curve_default(bars: &[(f64, f64)]) -> (Vec<f64>, Vec<usize>) {
    let thresholds = default_betti_thresholds(bars, DEFAULT_BETTI_BINS);
    let curve = betti_curve(bars, &thresholds);
    (thresholds, curve)
}

/// `k`-th largest tent value at `t` (`k` is 1-based); 0 with fewer than `k` bars.
pub fn landscape(bars: &[(f64, f64)], k: usize, t: f64) -> f64 {
    assert!(k >= 1, "landscape level starts at 1");
    let mut vals: Vec<f64> = canonical(bars).iter().map(|&(b, d)| triangle(b, d, t)).collect();
    if vals.len() < k {
        return 0.0;
    }
    vals.sort_by(|a, b| b.total_cmp(a));
    vals[k - 1]
}

pub fn landscape_vector(bars: &[(f64, f64)], k: usize, samples: &[f64]) -> Vec<f64> {
    samples.iter().map(|&t| landscape(bars, k, t)).collect()
}

#[inline]
fn power_weight(b: f64, d: f64, w: f64) -> f64 {
    (d - b).abs().powf(w)
}

/// `sum_p |d - b|^w * triangle(p, t_j)` for each sample `t_j`.
pub fn perslay_vector(bars: &[(f64, f64)], weight_exponent: f64, samples: &[f64]) -> Vec<f64> {
    let bars = canonical(bars);
    samples
        .iter()
        .map(|&t| {
            bars.iter()
                .map(|&(b, d)| power_weight(b, d, weight_exponent) * triangle(b, d, t))
                .sum()
        })
        .collect()
}

/// Weighted mean of tents with weights `|d - b|^w`; zeros for an empty diagram.
pub fn silhouette(bars: &[(f64, f64)], weight_exponent: f64, samples: &[f64]) -> Vec<f64> {
    let total: f64 = canonical(bars)
        .iter()
        .map(|&(b, d)| power_weight(b, d, weight_exponent))
        .sum();
    let sums = perslay_vector(bars, weight_exponent, samples);
    if total == 0.0 {
        return vec![0.0; samples.len()];
    }
    sums.into_iter().map(|s| s / total).collect()
}

/// Weight exponents: one for all slices, or one per slice.
#[derive(Clone, Debug, PartialEq)]
pub enum Weights {
    Scalar(f64),
    PerSlice(Vec<f64>),
}

impl Weights {
    pub fn for_slice(&self, s: usize) -> f64 {
        match self {
            Self::Scalar(w) => *w,
            Self::PerSlice(ws) => ws[s],
        }
    }
}

/// How the `M x 2 x q` block is reduced to one vector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Aggregator {
    /// Row-major flattening over (slice, dimension, sample).
    #[default]
    Flatten,
    /// Mean over slices, giving `2 x q` values.
    MeanOverSlices,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorizationParams {
    samples: Vec<f64>,
    weights: Weights,
    aggregator: Aggregator,
}

impl VectorizationParams {
    pub fn new(samples: Vec<f64>, weights: Weights, aggregator: Aggregator) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("need at least one sample time".into()));
        }
        if samples.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidParameter("sample times must be finite".into()));
        }
        if samples.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NotIncreasing("sample times"));
        }
        let ws: &[f64] = match &weights {
            Weights::Scalar(w) => std::slice::from_ref(w),
            Weights::PerSlice(ws) => ws,
        };
        if ws.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidParameter(
                "weight exponents must be finite and >= 0".into(),
            ));
        }
        Ok(Self {
            samples,
            weights,
            aggregator,
        })
    }

    /// `q` evenly spaced samples over `[0, max_level]`, scalar weight `w`, flattening.
    pub fn evenly_spaced(max_level: f64, q: usize, w: f64) -> Result<Self> {
        if q == 1 {
            return Self::new(vec![max_level], Weights::Scalar(w), Aggregator::Flatten);
        }
        Self::new(linspace(0.0, max_level, q), Weights::Scalar(w), Aggregator::Flatten)
    }

    pub fn with_aggregator(mut self, aggregator: Aggregator) -> Self {
        self.aggregator = aggregator;
        self
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn aggregator(&self) -> Aggregator {
        self.aggregator
    }

    pub fn num_samples(&self) -> usize {
        self.samples.len()
    }

    fn check_slices(&self, m: usize) -> Result<()> {
        match &self.weights {
            Weights::PerSlice(ws) if ws.len() != m => Err(Error::Dimension(format!(
                "{} per-slice weights for {m} slices",
                ws.len()
            ))),
            _ => Ok(()),
        }
    }
}

/// Multiparameter vectorization: `values` has shape `M x 2 x q`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MPVectorization {
    pub shape: [usize; 3],
    pub values: Vec<f64>,
    pub aggregator: Aggregator,
    pub aggregate: Vec<f64>,
}

impl MPVectorization {
    pub fn get(&self, s: usize, dim: HomologyDim, j: usize) -> f64 {
        let [_, d, q] = self.shape;
        self.values[(s * d + dim.index()) * q + j]
    }

    /// Slice `s` as one row of length `2q`.
    pub fn row(&self, s: usize) -> &[f64] {
        let width = self.shape[1] * self.shape[2];
        &self.values[s * width..(s + 1) * width]
    }
}

/// Bars of one dimension with essential deaths clipped to `max_level`.
pub fn slice_bars(pd: &PersistenceDiagram, dim: HomologyDim, max_level: f64) -> Vec<(f64, f64)> {
    clip_bars(&pd.bars(dim), max_level)
}

/// Weighted tent vectorization of both dimensions of every slice, followed
/// by the aggregator.
pub fn psi_mp(sliced: &SlicedDiagrams, params: &VectorizationParams) -> Result<MPVectorization> {
    mp_vectorization(sliced, InducedBase::Perslay, params)
}

/// `base` applied to both dimensions of every slice, stacked into an
/// `M x 2 x q` block and aggregated.
pub fn mp_vectorization(
    sliced: &SlicedDiagrams,
    base: InducedBase,
    params: &VectorizationParams,
) -> Result<MPVectorization> {
    let m = sliced.num_slices();
    let q = params.num_samples();
    let dim0 = induced_mp_vectorization(sliced, base, HomologyDim::Zero, params)?;
    let dim1 = induced_mp_vectorization(sliced, base, HomologyDim::One, params)?;
    let mut values = Vec::with_capacity(m * 2 * q);
    for s in 0..m {
        values.extend_from_slice(dim0.row(s));
        values.extend_from_slice(dim1.row(s));
    }
    let aggregate = match params.aggregator {
        Aggregator::Flatten => values.clone(),
        Aggregator::MeanOverSlices => {
            let mut mean = vec![0.0; 2 * q];
            for row in values.chunks(2 * q) {
                for (acc, v) in mean.iter_mut().zip(row) {
                    *acc += v;
                }
            }
            if m > 0 {
                for v in &mut mean {
                    *v /= m as f64;
                }
            }
            mean
        }
    };
    Ok(MPVectorization {
        shape: [m, 2, q],
        values,
        aggregator: params.aggregator,
        aggregate,
    })
}

/// Single-parameter vectorization applied slice by slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InducedBase {
    /// Betti curve evaluated at the sample times.
    Betti,
    Silhouette,
    /// Landscape of the given level (1-based).
    Landscape(usize),
    Perslay,
}

/// Matrix with one row per slice.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedMatrix {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

impl InducedMatrix {
    pub fn row(&self, s: usize) -> &[f64] {
        &self.values[s * self.cols..(s + 1) * self.cols]
    }

    pub fn get(&self, s: usize, j: usize) -> f64 {
        self.values[s * self.cols + j]
    }
}

/// Row `s` is `base` applied to the `dim` diagram of slice `s`.
///
/// Betti rows count bars with infinite deaths as alive everywhere above
/// their birth; the tent-based bases clip them to the top level.
pub fn induced_mp_vectorization(
    sliced: &SlicedDiagrams,
    base: InducedBase,
    dim: HomologyDim,
    params: &VectorizationParams,
) -> Result<InducedMatrix> {
    let m = sliced.num_slices();
    params.check_slices(m)?;
    if let InducedBase::Landscape(0) = base {
        return Err(Error::InvalidParameter("landscape level starts at 1".into()));
    }
    let q = params.num_samples();
    let top = sliced.max_level();
    let mut values = Vec::with_capacity(m * q);
    for (s, pd) in sliced.slices.iter().enumerate() {
        let w = params.weights.for_slice(s);
        let samples = &params.samples;
        match base {
            InducedBase::Betti => values.extend(betti_curve(&pd.bars(dim), samples).into_iter().map(|c| c as f64)),
            InducedBase::Silhouette => values.extend(silhouette(&slice_bars(pd, dim, top), w, samples)),
            InducedBase::Landscape(k) => values.extend(landscape_vector(&slice_bars(pd, dim, top), k, samples)),
            InducedBase::Perslay => values.extend(perslay_vector(&slice_bars(pd, dim, top), w, samples)),
        }
    }
    Ok(InducedMatrix {
        rows: m,
        cols: q,
        values,
    })
}

/// Partial derivatives of [`perslay_vector`]. Per-pair arrays are `q x n`
/// row-major (sample-major) over the bars in the order supplied.
#[derive(Clone, Debug, PartialEq)]
pub struct PerslayGradients {
    pub num_samples: usize,
    pub num_bars: usize,
    pub d_birth: Vec<f64>,
    pub d_death: Vec<f64>,
    /// Output `j` depends only on `t_j`, so this is the diagonal.
    pub d_samples: Vec<f64>,
    pub d_weight_exponent: Vec<f64>,
}

impl PerslayGradients {
    pub fn d_birth(&self, j: usize, i: usize) -> f64 {
        self.d_birth[j * self.num_bars + i]
    }

    pub fn d_death(&self, j: usize, i: usize) -> f64 {
        self.d_death[j * self.num_bars + i]
    }
}

/// Tent partials `(d/db, d/dd, d/dt)`. On a support edge the result is the
/// mean of the one-sided slopes; at the apex `d/dt` is 0 and `d/db`, `d/dd`
/// are 1/2.
fn triangle_partials(b: f64, d: f64, t: f64) -> (f64, f64, f64) {
    let h = 0.5 * (d - b);
    let off = t - 0.5 * (b + d);
    let dist = off.abs();
    if dist > h || h <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let sign = if off > 0.0 {
        1.0
    } else if off < 0.0 {
        -1.0
    } else {
        0.0
    };
    let inside = (-0.5 + 0.5 * sign, 0.5 + 0.5 * sign, -sign);
    if dist == h {
        (0.5 * inside.0, 0.5 * inside.1, 0.5 * inside.2)
    } else {
        inside
    }
}

pub fn perslay_gradients(bars: &[(f64, f64)], weight_exponent: f64, samples: &[f64]) -> PerslayGradients {
    let n = bars.len();
    let q = samples.len();
    let w = weight_exponent;
    let mut g = PerslayGradients {
        num_samples: q,
        num_bars: n,
        d_birth: vec![0.0; q * n],
        d_death: vec![0.0; q * n],
        d_samples: vec![0.0; q],
        d_weight_exponent: vec![0.0; q],
    };
    for (j, &t) in samples.iter().enumerate() {
        for (i, &(b, d)) in bars.iter().enumerate() {
            if !d.is_finite() {
                continue;
            }
            let p = (d - b).abs();
            let weight = p.powf(w);
            let tent = triangle(b, d, t);
            let (tb, td, tt) = triangle_partials(b, d, t);
            let dweight_dp = if w == 0.0 || p == 0.0 { 0.0 } else { w * p.powf(w - 1.0) };
            let dp_dd = (d - b).signum();
            g.d_birth[j * n + i] = -dweight_dp * dp_dd * tent + weight * tb;
            g.d_death[j * n + i] = dweight_dp * dp_dd * tent + weight * td;
            g.d_samples[j] += weight * tt;
            if p > 0.0 {
                g.d_weight_exponent[j] += weight * p.ln() * tent;
            }
        }
    }
    g
}

/// Lipschitz constant of `p -> |d - b|^w * triangle(p, .)` per sample, with
/// respect to the 1-Wasserstein distance under the L-infinity ground metric,
/// for bars whose persistence lies in `[1, pmax]`.
fn weighted_tent_lipschitz(w: f64, pmax: f64) -> f64 {
    w * pmax * pmax.powf(w - 1.0).max(1.0) + pmax.powf(w)
}

/// Bound `C` with `||perslay(A) - perslay(B)||_2 <= C * W_1(A, B)` for
/// diagrams whose bars have persistence in `[1, pmax]` (e.g. integer-level
/// diagrams with zero-length bars removed).
pub fn perslay_lipschitz(q: usize, w: f64, pmax: f64) -> f64 {
    (q as f64).sqrt() * weighted_tent_lipschitz(w, pmax)
}

/// Same bound for [`silhouette`]. The normalization contributes the extra
/// term; a non-empty diagram has total weight at least 1.
pub fn silhouette_lipschitz(q: usize, w: f64, pmax: f64) -> f64 {
    let total_weight_slope = w.max(1.0) * pmax.powf(w - 1.0).max(1.0);
    (q as f64).sqrt() * (weighted_tent_lipschitz(w, pmax) + pmax * total_weight_slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn triangle_values() {
        assert_eq!(triangle(0.0, 2.0, 1.0), 1.0);
        assert_eq!(triangle(0.0, 2.0, 3.0), 0.0);
        assert_eq!(triangle(1.0, 3.0, 1.5), 0.5);
        assert_eq!(triangle(1.0, 3.0, 1.0), 0.0);
    }

    #[test]
    fn perslay_examples() {
        assert_eq!(perslay_vector(&[(0.0, 2.0)], 1.0, &[1.0]), vec![2.0]);
        assert_eq!(perslay_vector(&[], 1.0, &[0.0, 1.0]), vec![0.0, 0.0]);
        let bars = [(0.0, 2.0), (1.0, 3.0)];
        let samples = [1.0_f64, 2.0];
        let mut naive = vec![0.0_f64; 2];
        for (j, &t) in samples.iter().enumerate() {
            for &(b, d) in &bars {
                let tent = (0.5 * (d - b) - (t - 0.5 * (b + d)).abs()).max(0.0);
                naive[j] += (d - b) * tent;
            }
        }
        assert_eq!(perslay_vector(&bars, 1.0, &samples), naive);
        assert_eq!(naive, vec![2.0, 2.0]);
    }

    #[test]
    fn betti_curve_examples() {
        let bars = [(0.0, 2.0), (1.0, 3.0)];
        assert_eq!(betti_curve(&bars, &[0.0, 1.0, 2.0, 3.0]), vec![1, 2, 1, 0]);
        assert_eq!(betti_curve(&[], &[0.0, 1.0]), vec![0, 0]);
        let (thresholds, curve) = betti_curve_default(&[(0.0, 9.0), (2.0, f64::INFINITY)]);
        assert_eq!(thresholds.len(), 100);
        assert_eq!(curve.len(), 100);
        assert_eq!((thresholds[0], thresholds[99]), (0.0, 9.0));
        assert_eq!(curve[99], 1);
    }

    #[test]
    fn landscape_levels() {
        let one = [(0.0, 4.0)];
        let samples = [0.5, 1.0, 2.0, 3.5];
        let tents: Vec<f64> = samples.iter().map(|&t| triangle(0.0, 4.0, t)).collect();
        assert_eq!(landscape_vector(&one, 1, &samples), tents);
        assert_eq!(landscape_vector(&one, 2, &samples), vec![0.0; 4]);
        let two = [(0.0, 4.0), (1.0, 3.0)];
        let mut at_mid = [triangle(0.0, 4.0, 2.0), triangle(1.0, 3.0, 2.0)];
        at_mid.sort_by(|a, b| b.total_cmp(a));
        assert_eq!(landscape(&two, 2, 2.0), at_mid[1]);
        assert_eq!(landscape(&two, 2, 2.0), 1.0);
    }

    #[test]
    fn silhouette_of_single_bar_is_first_landscape() {
        let samples: Vec<f64> = (0..9).map(|i| i as f64 * 0.5).collect();
        for w in [0.0, 0.5, 1.0, 3.0] {
            let s = silhouette(&[(1.0, 3.5)], w, &samples);
            let l = landscape_vector(&[(1.0, 3.5)], 1, &samples);
            for (a, b) in s.iter().zip(&l) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        assert_eq!(silhouette(&[], 1.0, &[0.0, 1.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn clipping_essential_bars() {
        assert_eq!(
            clip_bars(&[(1.0, f64::INFINITY), (5.0, f64::INFINITY), (0.0, 2.0)], 5.0),
            vec![(1.0, 5.0), (0.0, 2.0)]
        );
        assert_eq!(perslay_vector(&[(0.0, f64::INFINITY)], 1.0, &[1.0]), vec![0.0]);
    }

    #[test]
    fn gradient_examples() {
        let g = perslay_gradients(&[(0.0, 2.0)], 1.0, &[1.0]);
        assert_eq!(g.d_samples, vec![0.0]);
        let g = perslay_gradients(&[(0.0, 2.0)], 0.0, &[1.0]);
        assert_eq!(g.d_death(0, 0), 0.5);
        let h = 1e-5;
        let f = |d: f64| perslay_vector(&[(0.0, d)], 0.0, &[1.0])[0];
        let fd = (f(2.0 + h) - f(2.0 - h)) / (2.0 * h);
        assert!((fd - 0.5).abs() < 1e-9);
    }

    #[test]
    fn params_validation() {
        assert!(VectorizationParams::new(vec![], Weights::Scalar(1.0), Aggregator::Flatten).is_err());
        assert!(VectorizationParams::new(vec![1.0, 1.0], Weights::Scalar(1.0), Aggregator::Flatten).is_err());
        assert!(VectorizationParams::new(vec![1.0], Weights::Scalar(-1.0), Aggregator::Flatten).is_err());
        let p = VectorizationParams::evenly_spaced(16.0, 100, 1.0).unwrap();
        assert_eq!(p.num_samples(), 100);
        assert_eq!((p.samples()[0], p.samples()[99]), (0.0, 16.0));
    }

    type SliceBars = (Vec<(f64, f64)>, Vec<(f64, f64)>);

    fn sliced_from(bars: &[SliceBars], top: f64) -> SlicedDiagrams {
        use crate::persistence::PersistencePair;
        let pair = |dim, (birth, death): (f64, f64), s| PersistencePair {
            dim,
            birth,
            death,
            birth_coord: crate::grid::PixelCoord::new(0, 0),
            death_coord: None,
            slice_index: s,
        };
        SlicedDiagrams {
            slices: bars
                .iter()
                .enumerate()
                .map(|(s, (b0, b1))| PersistenceDiagram {
                    pairs_dim0: b0.iter().map(|&b| pair(HomologyDim::Zero, b, s)).collect(),
                    pairs_dim1: b1.iter().map(|&b| pair(HomologyDim::One, b, s)).collect(),
                })
                .collect(),
            levels: (1..=top as usize).map(|l| l as f64).collect(),
        }
    }

    #[test]
    fn single_slice_reduces_to_perslay() {
        let b0 = vec![(1.0, 3.0), (2.0, f64::INFINITY)];
        let b1 = vec![(2.0, 4.0)];
        let sliced = sliced_from(&[(b0.clone(), b1.clone())], 5.0);
        let params = VectorizationParams::evenly_spaced(5.0, 11, 1.5).unwrap();
        let v = psi_mp(&sliced, &params).unwrap();
        assert_eq!(v.shape, [1, 2, 11]);
        let mut expected = perslay_vector(&clip_bars(&b0, 5.0), 1.5, params.samples());
        expected.extend(perslay_vector(&b1, 1.5, params.samples()));
        assert_eq!(v.values, expected);
        assert_eq!(v.aggregate, expected);
    }

    #[test]
    fn empty_slices_give_zeros() {
        let sliced = sliced_from(&vec![(Vec::new(), Vec::new()); 8], 50.0);
        let params = VectorizationParams::evenly_spaced(50.0, 100, 1.0).unwrap();
        let v = psi_mp(&sliced, &params).unwrap();
        assert_eq!(v.shape, [8, 2, 100]);
        assert_eq!(v.aggregate.len(), 1600);
        assert!(v.aggregate.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn mean_aggregator_averages_slices() {
        let sliced = sliced_from(
            &[(vec![(0.0, 2.0)], Vec::new()), (vec![(0.0, 4.0)], vec![(1.0, 3.0)])],
            4.0,
        );
        let params =
            VectorizationParams::new(vec![1.0, 2.0], Weights::Scalar(0.0), Aggregator::MeanOverSlices).unwrap();
        let v = psi_mp(&sliced, &params).unwrap();
        // slice 0: dim0 [1, 0], dim1 [0, 0]; slice 1: dim0 [1, 2], dim1 [0, 1]
        assert_eq!(v.values, vec![1.0, 0.0, 0.0, 0.0, 1.0, 2.0, 0.0, 1.0]);
        assert_eq!(v.aggregate, vec![1.0, 1.0, 0.0, 0.5]);
        assert_eq!(v.row(1), &[1.0, 2.0, 0.0, 1.0]);
        assert_eq!(v.get(1, HomologyDim::One, 1), 1.0);
    }

    #[test]
    fn per_slice_weights_must_match_slice_count() {
        let sliced = sliced_from(&vec![(Vec::new(), Vec::new()); 3], 4.0);
        let params =
            VectorizationParams::new(vec![1.0], Weights::PerSlice(vec![1.0, 2.0]), Aggregator::Flatten).unwrap();
        assert!(psi_mp(&sliced, &params).is_err());
    }

    fn bars_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-5.0f64..5.0, 0.01f64..6.0).prop_map(|(b, l)| (b, b + l)), 0..8)
    }

    proptest! {
        #[test]
        fn outputs_ignore_pair_order(bars in bars_strategy(), w in 0.0f64..3.0, seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let samples: Vec<f64> = (0..12).map(|i| -5.0 + i as f64).collect();
            let mut shuffled = bars.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(perslay_vector(&bars, w, &samples), perslay_vector(&shuffled, w, &samples));
            prop_assert_eq!(silhouette(&bars, w, &samples), silhouette(&shuffled, w, &samples));
            prop_assert_eq!(landscape_vector(&bars, 2, &samples), landscape_vector(&shuffled, 2, &samples));
            prop_assert_eq!(betti_curve(&bars, &samples), betti_curve(&shuffled, &samples));
        }

        #[test]
        fn zero_length_bars_change_nothing(bars in bars_strategy(), extra in prop::collection::vec(-5.0f64..5.0, 1..4), w in 0.1f64..3.0) {
            let samples: Vec<f64> = (0..12).map(|i| -5.0 + i as f64 * 0.9).collect();
            let mut with = bars.clone();
            with.extend(extra.iter().map(|&v| (v, v)));
            prop_assert_eq!(perslay_vector(&bars, w, &samples), perslay_vector(&with, w, &samples));
            prop_assert_eq!(silhouette(&bars, w, &samples), silhouette(&with, w, &samples));
            prop_assert_eq!(landscape_vector(&bars, 1, &samples), landscape_vector(&with, 1, &samples));
            prop_assert_eq!(betti_curve(&bars, &samples), betti_curve(&with, &samples));
        }

        #[test]
        fn unnormalized_silhouette_is_perslay(bars in bars_strategy(), w in 0.0f64..3.0) {
            let samples: Vec<f64> = (0..10).map(|i| -5.0 + i as f64 * 1.1).collect();
            let total: f64 = canonical(&bars).iter().map(|&(b, d)| (d - b).powf(w)).sum();
            let s = silhouette(&bars, w, &samples);
            let p = perslay_vector(&bars, w, &samples);
            for (a, b) in s.iter().zip(&p) {
                prop_assert!((a * total - b).abs() <= 1e-9 * b.abs().max(1.0));
            }
        }
    }
}
