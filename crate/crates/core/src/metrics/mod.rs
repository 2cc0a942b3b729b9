//! Distances between diagrams and between vectorizations.
//!
//! Diagrams are compared with the L-infinity ground metric; a point left
//! unmatched is sent to its nearest diagonal point at distance `(d - b)/2`.
//! The problem is solved exactly on the square matrix obtained by adding one
//! diagonal slot per point of the other diagram.

pub mod assignment;
pub mod stability;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::multipers::SlicedDiagrams;
use crate::persistence::{Dims, HomologyDim, PersistenceDiagram};
use crate::vectorize::{clip_bars, InducedMatrix, MPVectorization};

pub use stability::{run_stability_harness, stability_report, HarnessSummary, StabilityBase, StabilityReport};

/// What to do with bars whose death is infinite.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Essentials {
    #[default]
    Exclude,
    /// Replace infinite deaths by this level on both sides.
    Clip(f64),
}

impl Essentials {
    pub fn apply(self, bars: &[(f64, f64)]) -> Vec<(f64, f64)> {
        match self {
            Self::Exclude => bars.iter().copied().filter(|(b, d)| d.is_finite() && b < d).collect(),
            Self::Clip(level) => clip_bars(bars, level),
        }
    }
}

/// A matched pair; `None` stands for the diagonal.
pub type MatchedPair = (Option<usize>, Option<usize>);

#[derive(Clone, Debug, PartialEq)]
pub struct MatchingResult {
    pub cost: f64,
    /// Every off-diagonal point of either side appears exactly once.
    /// Indices refer to the bars after essential handling.
    pub matching: Vec<MatchedPair>,
}

#[inline]
pub fn linf(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

#[inline]
pub fn diagonal_distance(a: (f64, f64)) -> f64 {
    0.5 * (a.1 - a.0).abs()
}

/// Ground cost of each matched pair.
pub fn matching_costs(a: &[(f64, f64)], b: &[(f64, f64)], matching: &[MatchedPair]) -> Vec<f64> {
    matching
        .iter()
        .map(|m| match *m {
            (Some(i), Some(j)) => linf(a[i], b[j]),
            (Some(i), None) => diagonal_distance(a[i]),
            (None, Some(j)) => diagonal_distance(b[j]),
            (None, None) => 0.0,
        })
        .collect()
}

/// `(sum c^p)^(1/p)` summed in ascending order, or `max c` for `p = inf`, so
/// equal multisets of edge costs always give bit-identical totals.
pub fn aggregate_costs(costs: &[f64], p: f64) -> f64 {
    if costs.is_empty() {
        return 0.0;
    }
    if p.is_infinite() {
        return costs.iter().copied().fold(0.0, f64::max);
    }
    let mut powered: Vec<f64> = costs.iter().map(|c| if p == 1.0 { *c } else { c.powf(p) }).collect();
    powered.sort_by(f64::total_cmp);
    let total: f64 = powered.iter().sum();
    if p == 1.0 {
        total
    } else {
        total.powf(1.0 / p)
    }
}

fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || p <= 0.0 {
        return Err(Error::InvalidParameter(format!("p must be positive, got {p}")));
    }
    Ok(())
}

/// Augmented matrix layout: rows are `a` then one diagonal slot per `b`
/// point; columns are `b` then one diagonal slot per `a` point.
fn augmented_cost(a: &[(f64, f64)], b: &[(f64, f64)], r: usize, c: usize) -> f64 {
    let (na, nb) = (a.len(), b.len());
    match (r < na, c < nb) {
        (true, true) => linf(a[r], b[c]),
        (true, false) => diagonal_distance(a[r]),
        (false, true) => diagonal_distance(b[c]),
        (false, false) => 0.0,
    }
}

fn decode(na: usize, nb: usize, assignment: &[usize]) -> Vec<MatchedPair> {
    assignment
        .iter()
        .enumerate()
        .filter_map(|(r, &c)| match (r < na, c < nb) {
            (true, true) => Some((Some(r), Some(c))),
            (true, false) => Some((Some(r), None)),
            (false, true) => Some((None, Some(c))),
            (false, false) => None,
        })
        .collect()
}

/// Optimal matching between two finite diagrams for `p` in `(0, inf]`.
pub fn wasserstein_finite(a: &[(f64, f64)], b: &[(f64, f64)], p: f64) -> Result<MatchingResult> {
    check_p(p)?;
    if let Some(bad) = a.iter().chain(b).find(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite bar {bad:?}")));
    }
    let (na, nb) = (a.len(), b.len());
    let n = na + nb;
    let assignment = if p.is_infinite() {
        bottleneck_assignment(a, b)
    } else {
        let cost: Vec<f64> = (0..n * n)
            .map(|k| {
                let c = augmented_cost(a, b, k / n, k % n);
                if p == 1.0 {
                    c
                } else {
                    c.powf(p)
                }
            })
            .collect();
        assignment::hungarian(n, &cost)
    };
    let matching = decode(na, nb, &assignment);
    let cost = aggregate_costs(&matching_costs(a, b, &matching), p);
    Ok(MatchingResult { cost, matching })
}

fn bottleneck_assignment(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<usize> {
    let n = a.len() + b.len();
    if n == 0 {
        return Vec::new();
    }
    let mut candidates: Vec<f64> = (0..n * n).map(|k| augmented_cost(a, b, k / n, k % n)).collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let feasible = |theta: f64| assignment::perfect_matching(n, |r, c| augmented_cost(a, b, r, c) <= theta);
    // the largest candidate always admits a perfect matching
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    feasible(candidates[lo]).expect("feasible at the optimum")
}

/// `W_p` between bar lists after essential handling; `p = f64::INFINITY`
/// gives the bottleneck distance.
pub fn wasserstein(a: &[(f64, f64)], b: &[(f64, f64)], p: f64, essentials: Essentials) -> Result<MatchingResult> {
    wasserstein_finite(&essentials.apply(a), &essentials.apply(b), p)
}

pub fn bottleneck(a: &[(f64, f64)], b: &[(f64, f64)], essentials: Essentials) -> Result<MatchingResult> {
    wasserstein(a, b, f64::INFINITY, essentials)
}

/// [`wasserstein`] of one homology dimension of two diagrams.
pub fn diagram_distance(
    a: &PersistenceDiagram,
    b: &PersistenceDiagram,
    dim: HomologyDim,
    p: f64,
    essentials: Essentials,
) -> Result<f64> {
    Ok(wasserstein(&a.bars(dim), &b.bars(dim), p, essentials)?.cost)
}

/// `D_p`: sum over slices (and over the requested dimensions) of `W_p`.
pub fn mp_diagram_distance(
    a: &SlicedDiagrams,
    b: &SlicedDiagrams,
    p: f64,
    dims: Dims,
    essentials: Essentials,
    pool: Option<&rayon::ThreadPool>,
) -> Result<f64> {
    if a.num_slices() != b.num_slices() {
        return Err(Error::Dimension(format!(
            "{} slices vs {}",
            a.num_slices(),
            b.num_slices()
        )));
    }
    let wanted: Vec<HomologyDim> = [HomologyDim::Zero, HomologyDim::One]
        .into_iter()
        .filter(|&d| dims.contains(d))
        .collect();
    let per_slice = |s: usize| -> Result<f64> {
        wanted
            .iter()
            .map(|&d| diagram_distance(&a.slices[s], &b.slices[s], d, p, essentials))
            .sum()
    };
    let parts: Vec<Result<f64>> = match pool {
        Some(pool) => pool.install(|| (0..a.num_slices()).into_par_iter().map(per_slice).collect()),
        None => (0..a.num_slices()).map(per_slice).collect(),
    };
    parts.into_iter().sum()
}

/// Sum over rows of the Euclidean distance between corresponding rows.
pub fn row_l2_sum(a: &[f64], b: &[f64], row_len: usize) -> Result<f64> {
    if a.len() != b.len() || row_len == 0 || !a.len().is_multiple_of(row_len) {
        return Err(Error::Dimension(format!(
            "cannot compare {} and {} values in rows of {row_len}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.chunks(row_len)
        .zip(b.chunks(row_len))
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt())
        .sum())
}

/// `𝔇` between two multiparameter vectorizations; each slice is one row.
pub fn mp_vectorization_distance(a: &MPVectorization, b: &MPVectorization) -> Result<f64> {
    if a.shape != b.shape {
        return Err(Error::Dimension(format!("{:?} vs {:?}", a.shape, b.shape)));
    }
    row_l2_sum(&a.values, &b.values, a.shape[1] * a.shape[2])
}

/// `𝔇` between two induced matrices.
pub fn induced_distance(a: &InducedMatrix, b: &InducedMatrix) -> Result<f64> {
    if (a.rows, a.cols) != (b.rows, b.cols) {
        return Err(Error::Dimension(format!(
            "{}x{} vs {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    row_l2_sum(&a.values, &b.values, a.cols)
}
