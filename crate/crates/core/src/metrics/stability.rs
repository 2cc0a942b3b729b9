//! Empirical check of the stability bound `𝔇 <= C * D_1` for induced
//! multiparameter vectorizations.
//!
//! Diagrams come from compact multifiltrations, so every finite bar has
//! integer endpoints and persistence at least 1, and essential deaths are
//! clipped to the top level `N` both before vectorizing and before matching.
//! Under these conditions the constants of
//! [`crate::vectorize::perslay_lipschitz`] and
//! [`crate::vectorize::silhouette_lipschitz`] with `pmax = N` are valid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{mp_diagram_distance, row_l2_sum, Essentials};
use crate::error::{Error, Result};
use crate::filtration::{random_monotone_cmf, sort_slices_descending, CompactMultiFiltration, LevelGrid};
use crate::multipers::{slice_compact, SlicedDiagrams};
use crate::persistence::{Dims, HomologyDim};
use crate::vectorize::{
    perslay_lipschitz, perslay_vector, silhouette, silhouette_lipschitz, slice_bars, VectorizationParams, Weights,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StabilityBase {
    Perslay,
    Silhouette,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    /// `𝔇`: sum over slices of the l2 distance between slice vectors.
    pub vectorization_distance: f64,
    /// `D_1` over both dimensions with clipped essentials.
    pub diagram_distance: f64,
    /// Largest pixelwise level difference over all slices.
    pub sup_distance: f64,
    /// `𝔇 / D_1`, 0 when both vanish.
    pub diagram_ratio: f64,
    /// `𝔇 / sup`, 0 when both vanish.
    pub sup_ratio: f64,
    pub constant: f64,
    pub diagram_violation: bool,
    /// Only checked when a sup constant is supplied.
    pub sup_violation: bool,
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// Lipschitz constant of the chosen base with respect to `D_1`, using the
/// largest weight exponent of `params`.
pub fn lipschitz_constant(base: StabilityBase, params: &VectorizationParams, pmax: f64) -> f64 {
    let w = match params.weights() {
        Weights::Scalar(w) => *w,
        Weights::PerSlice(ws) => ws.iter().copied().fold(0.0, f64::max),
    };
    let q = params.num_samples();
    match base {
        StabilityBase::Perslay => perslay_lipschitz(q, w, pmax),
        StabilityBase::Silhouette => silhouette_lipschitz(q, w, pmax),
    }
}

/// Slice rows `[base(dim 0); base(dim 1)]`, concatenated.
pub fn slice_vectors(sliced: &SlicedDiagrams, base: StabilityBase, params: &VectorizationParams) -> Vec<f64> {
    let top = sliced.max_level();
    let mut out = Vec::with_capacity(sliced.num_slices() * 2 * params.num_samples());
    for (s, pd) in sliced.slices.iter().enumerate() {
        let w = params.weights().for_slice(s);
        for dim in [HomologyDim::Zero, HomologyDim::One] {
            let bars = slice_bars(pd, dim, top);
            out.extend(match base {
                StabilityBase::Perslay => perslay_vector(&bars, w, params.samples()),
                StabilityBase::Silhouette => silhouette(&bars, w, params.samples()),
            });
        }
    }
    out
}

fn level_sup_distance(a: &CompactMultiFiltration, b: &CompactMultiFiltration) -> f64 {
    a.slices()
        .iter()
        .zip(b.slices())
        .flat_map(|(x, y)| x.levels().iter().zip(y.levels()))
        .map(|(&u, &v)| f64::from(u.abs_diff(v)))
        .fold(0.0, f64::max)
}

/// Distances and ratios for one pair of compact multifiltrations.
pub fn stability_report(
    a: &CompactMultiFiltration,
    b: &CompactMultiFiltration,
    base: StabilityBase,
    params: &VectorizationParams,
    sup_constant: Option<f64>,
) -> Result<StabilityReport> {
    if a.num_slices() != b.num_slices() || a.num_levels() != b.num_levels() || a.shape() != b.shape() {
        return Err(Error::Dimension("multifiltrations differ in shape".into()));
    }
    let (sa, sb) = (slice_compact(a, None)?, slice_compact(b, None)?);
    let row = 2 * params.num_samples();
    let vectorization_distance = row_l2_sum(
        &slice_vectors(&sa, base, params),
        &slice_vectors(&sb, base, params),
        row,
    )?;
    let top = sa.max_level();
    let diagram_distance = mp_diagram_distance(&sa, &sb, 1.0, Dims::Both, Essentials::Clip(top), None)?;
    let sup_distance = level_sup_distance(a, b);
    let constant = lipschitz_constant(base, params, f64::from(a.num_levels()));
    let diagram_ratio = ratio(vectorization_distance, diagram_distance);
    let sup_ratio = ratio(vectorization_distance, sup_distance);
    let slack = |bound: f64| bound * (1.0 + 1e-12) + 1e-12;
    Ok(StabilityReport {
        vectorization_distance,
        diagram_distance,
        sup_distance,
        diagram_ratio,
        sup_ratio,
        constant,
        diagram_violation: vectorization_distance > slack(constant * diagram_distance),
        sup_violation: sup_constant.is_some_and(|c| vectorization_distance > slack(c * sup_distance)),
    })
}

#[derive(Clone, Debug)]
pub struct HarnessConfig {
    pub trials: usize,
    pub seed: u64,
    pub num_slices: usize,
    pub num_levels: u32,
    pub height: usize,
    pub width: usize,
    pub num_samples: usize,
    pub weight_exponent: f64,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            seed: 0,
            num_slices: 3,
            num_levels: 6,
            height: 6,
            width: 6,
            num_samples: 16,
            weight_exponent: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HarnessSummary {
    pub trials: usize,
    pub violations: usize,
    pub max_ratio: f64,
    pub constant: f64,
}

/// Small random edit of `cmf`: a few pixels shift by up to two levels, then
/// each pixel column is re-sorted so the result stays monotone.
pub fn perturb_cmf<R: Rng + ?Sized>(rng: &mut R, cmf: &CompactMultiFiltration) -> Result<CompactMultiFiltration> {
    let n = cmf.num_levels();
    let (h, w) = cmf.shape();
    let mut slices: Vec<Vec<u32>> = cmf.slices().iter().map(|s| s.levels().to_vec()).collect();
    let edits = rng.gen_range(1..=(h * w).max(1));
    for _ in 0..edits {
        let s = rng.gen_range(0..slices.len());
        let p = rng.gen_range(0..h * w);
        let shift: i64 = rng.gen_range(-2..=2);
        slices[s][p] = (i64::from(slices[s][p]) + shift).clamp(0, i64::from(n)) as u32;
    }
    sort_slices_descending(&mut slices);
    let grids = slices
        .into_iter()
        .map(|l| LevelGrid::new(h, w, l))
        .collect::<Result<Vec<_>>>()?;
    CompactMultiFiltration::new(n, grids)
}

/// Random pairs (half independent, half perturbed copies) checked against
/// the precomputed constant.
pub fn run_stability_harness(cfg: &HarnessConfig, base: StabilityBase) -> Result<HarnessSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let params = VectorizationParams::evenly_spaced(f64::from(cfg.num_levels), cfg.num_samples, cfg.weight_exponent)?;
    let mut summary = HarnessSummary {
        trials: cfg.trials,
        violations: 0,
        max_ratio: 0.0,
        constant: lipschitz_constant(base, &params, f64::from(cfg.num_levels)),
    };
    for _ in 0..cfg.trials {
        let a = random_monotone_cmf(&mut rng, cfg.num_slices, cfg.num_levels, cfg.height, cfg.width)?;
        let b = if rng.gen_bool(0.5) {
            random_monotone_cmf(&mut rng, cfg.num_slices, cfg.num_levels, cfg.height, cfg.width)?
        } else {
            perturb_cmf(&mut rng, &a)?
        };
        let report = stability_report(&a, &b, base, &params, None)?;
        summary.violations += usize::from(report.diagram_violation);
        summary.max_ratio = summary.max_ratio.max(report.diagram_ratio);
    }
    Ok(summary)
}
