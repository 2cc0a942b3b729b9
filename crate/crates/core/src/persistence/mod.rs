//! Union-find cubical persistence for 2D grids.
//!
//! Dimension 0 is computed on the grid padded with the infinity sentinel `T`
//! using 4-connectivity and the elder rule. Dimension 1 is computed on the
//! dual grid: pad with `T`, invert `v -> T - v`, pad with `T` again, then run
//! the same union-find with 8-connectivity. A finite dual pair `(b', d')`
//! becomes the dimension-1 pair `(T - d', T - b')`; the dual essential class
//! (the outer face) is discarded.
//!
//! Pair values are read back from the original grid through the recorded
//! pixel coordinates, so they are exact copies of pixel values.

mod edges;
mod union_find;

pub use edges::{enumerate_sorted_edges, offsets, Edge, SortedEdgeList, DUAL_OFFSETS, PRIMAL_OFFSETS};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtration::CompactMultiFiltration;
use crate::grid::{PixelCoord, ValueGrid};
use union_find::BirthUnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HomologyDim {
    Zero,
    One,
}

impl HomologyDim {
    pub fn index(self) -> usize {
        match self {
            Self::Zero => 0,
            Self::One => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            0 => Some(Self::Zero),
            1 => Some(Self::One),
            _ => None,
        }
    }

    /// Border width added around the original grid for this dimension.
    pub fn padding(self) -> usize {
        match self {
            Self::Zero => 1,
            Self::One => 2,
        }
    }
}

/// Which homology dimensions to compute.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Dims {
    Zero,
    One,
    #[default]
    Both,
}

impl Dims {
    pub fn contains(self, dim: HomologyDim) -> bool {
        matches!(
            (self, dim),
            (Dims::Both, _) | (Dims::Zero, HomologyDim::Zero) | (Dims::One, HomologyDim::One)
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PersistencePair {
    pub dim: HomologyDim,
    pub birth: f64,
    /// `f64::INFINITY` for essential classes.
    pub death: f64,
    /// Pixel whose value is the birth.
    pub birth_coord: PixelCoord,
    /// Pixel whose value is the death; `None` for essential classes.
    pub death_coord: Option<PixelCoord>,
    pub slice_index: usize,
}

impl PersistencePair {
    pub fn is_essential(&self) -> bool {
        self.death == f64::INFINITY
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PersistenceDiagram {
    pub pairs_dim0: Vec<PersistencePair>,
    pub pairs_dim1: Vec<PersistencePair>,
}

impl PersistenceDiagram {
    pub fn pairs(&self, dim: HomologyDim) -> &[PersistencePair] {
        match dim {
            HomologyDim::Zero => &self.pairs_dim0,
            HomologyDim::One => &self.pairs_dim1,
        }
    }

    /// All pairs, dimension 0 first.
    pub fn iter(&self) -> impl Iterator<Item = &PersistencePair> {
        self.pairs_dim0.iter().chain(&self.pairs_dim1)
    }

    pub fn len(&self) -> usize {
        self.pairs_dim0.len() + self.pairs_dim1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(birth, death)` of one dimension, essential deaths as infinity.
    pub fn bars(&self, dim: HomologyDim) -> Vec<(f64, f64)> {
        self.pairs(dim).iter().map(|p| (p.birth, p.death)).collect()
    }

    /// Bars sorted lexicographically, for multiset comparisons.
    pub fn sorted_bars(&self, dim: HomologyDim) -> Vec<(f64, f64)> {
        let mut bars = self.bars(dim);
        bars.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        bars
    }

    pub fn with_slice_index(mut self, slice_index: usize) -> Self {
        for p in self.pairs_dim0.iter_mut().chain(self.pairs_dim1.iter_mut()) {
            p.slice_index = slice_index;
        }
        self
    }
}

/// Pads `grid` for `dim`: once with `t` for dimension 0; pad, invert
/// `v -> t - v`, pad again for dimension 1.
pub fn pad_grid(grid: &ValueGrid, dim: HomologyDim, t: f64) -> ValueGrid {
    match dim {
        HomologyDim::Zero => grid.padded(t),
        HomologyDim::One => {
            let once = grid.padded(t);
            let inverted = ValueGrid::new(
                once.height(),
                once.width(),
                once.values().iter().map(|v| t - v).collect(),
            )
            .expect("finite");
            inverted.padded(t)
        }
    }
}

/// A union-find merge: the component born at pixel `birth_pixel` dies at the
/// edge whose larger endpoint is `death_pixel` (`None` for the final
/// dimension-0 component). Indices refer to the padded grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RawPair {
    pub birth_pixel: usize,
    pub death_pixel: Option<usize>,
}

/// Elder-rule pairing over `edges`, visited in ascending filtration order
/// (the descending list is walked from its tail).
pub fn joint_pairs(grid: &ValueGrid, edges: &SortedEdgeList, dim: HomologyDim) -> Vec<RawPair> {
    let values = grid.values();
    let mut uf = BirthUnionFind::new(values);
    let mut out = Vec::new();
    for &edge in edges.edges().iter().rev() {
        let (u, v) = edges.endpoints(edge);
        let (ru, rv) = (uf.find(u), uf.find(v));
        if ru == rv {
            continue;
        }
        let argmax = if values[u] >= values[v] { u } else { v };
        let (dying, survivor) = if uf.birth(ru) >= uf.birth(rv) {
            (ru, rv)
        } else {
            (rv, ru)
        };
        out.push(RawPair {
            birth_pixel: uf.birth_pixel(dying),
            death_pixel: Some(argmax),
        });
        uf.union(ru, rv, survivor);
    }
    if dim == HomologyDim::Zero && !values.is_empty() {
        let root = uf.find(0);
        out.push(RawPair {
            birth_pixel: uf.birth_pixel(root),
            death_pixel: None,
        });
    }
    out
}

/// Converts raw pairs on the padded grid into persistence pairs of the
/// original grid, dropping zero-persistence pairs.
pub fn extract_pairs(
    raw: &[RawPair],
    padded: &ValueGrid,
    original: &ValueGrid,
    dim: HomologyDim,
    slice_index: usize,
) -> Vec<PersistencePair> {
    let pad = dim.padding();
    let pw = padded.width();
    let (h, w) = original.shape();
    let unpad = |i: usize| -> Option<PixelCoord> {
        let (r, c) = (i / pw, i % pw);
        (r >= pad && c >= pad && r - pad < h && c - pad < w).then(|| PixelCoord::new(r - pad, c - pad))
    };
    let pv = padded.values();
    raw.iter()
        .filter_map(|rp| {
            let death_pixel = match rp.death_pixel {
                Some(d) if pv[d] == pv[rp.birth_pixel] => return None,
                other => other,
            };
            let created = unpad(rp.birth_pixel).expect("positive-persistence pair inside the image");
            let pair = match (dim, death_pixel) {
                (HomologyDim::Zero, None) => PersistencePair {
                    dim,
                    birth: original.at(created),
                    death: f64::INFINITY,
                    birth_coord: created,
                    death_coord: None,
                    slice_index,
                },
                (HomologyDim::Zero, Some(d)) => {
                    let killed = unpad(d).expect("finite pair inside the image");
                    PersistencePair {
                        dim,
                        birth: original.at(created),
                        death: original.at(killed),
                        birth_coord: created,
                        death_coord: Some(killed),
                        slice_index,
                    }
                }
                // dual roles swap: the dual edge creates the hole, the dual
                // component's birth pixel fills it
                (HomologyDim::One, Some(d)) => {
                    let born = unpad(d).expect("finite pair inside the image");
                    PersistencePair {
                        dim,
                        birth: original.at(born),
                        death: original.at(created),
                        birth_coord: born,
                        death_coord: Some(created),
                        slice_index,
                    }
                }
                (HomologyDim::One, None) => return None,
            };
            (pair.birth < pair.death).then_some(pair)
        })
        .collect()
}

/// Grid whose order is used to build the dual. When `t - v` is not an exact
/// order-reversing map on the values, dense ranks are used instead; pair
/// values are still read from the original grid.
fn dual_ordering(grid: &ValueGrid, t: f64) -> (ValueGrid, f64) {
    if grid.values().iter().all(|&v| t - (t - v) == v) {
        return (grid.clone(), t);
    }
    let mut distinct: Vec<f64> = grid.values().to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let ranks = grid
        .values()
        .iter()
        .map(|v| distinct.binary_search_by(|x| x.total_cmp(v)).expect("present") as f64)
        .collect();
    (
        ValueGrid::new(grid.height(), grid.width(), ranks).expect("shape"),
        distinct.len() as f64,
    )
}

/// Persistence of the sublevel filtration of one dimension.
pub fn compute_pd_dim(grid: &ValueGrid, dim: HomologyDim, t: f64, slice_index: usize) -> Result<Vec<PersistencePair>> {
    check_sentinel(grid, t)?;
    Ok(compute_dim_unchecked(grid, dim, t, slice_index))
}

fn compute_dim_unchecked(grid: &ValueGrid, dim: HomologyDim, t: f64, slice_index: usize) -> Vec<PersistencePair> {
    let padded = match dim {
        HomologyDim::Zero => pad_grid(grid, dim, t),
        HomologyDim::One => {
            let (ordering, t) = dual_ordering(grid, t);
            pad_grid(&ordering, dim, t)
        }
    };
    let edges = enumerate_sorted_edges(&padded, dim);
    let raw = joint_pairs(&padded, &edges, dim);
    extract_pairs(&raw, &padded, grid, dim, slice_index)
}

fn check_sentinel(grid: &ValueGrid, t: f64) -> Result<()> {
    let max = grid.max_value();
    if !t.is_finite() || t <= max {
        return Err(Error::SentinelTooSmall { sentinel: t, max });
    }
    Ok(())
}

/// Sublevel persistence diagram of `grid` in the requested dimensions.
/// `t` must be finite and strictly above every grid value.
pub fn compute_pd(grid: &ValueGrid, dims: Dims, t: f64) -> Result<PersistenceDiagram> {
    check_sentinel(grid, t)?;
    let mut pd = PersistenceDiagram::default();
    if dims.contains(HomologyDim::Zero) {
        pd.pairs_dim0 = compute_dim_unchecked(grid, HomologyDim::Zero, t, 0);
    }
    if dims.contains(HomologyDim::One) {
        pd.pairs_dim1 = compute_dim_unchecked(grid, HomologyDim::One, t, 0);
    }
    Ok(pd)
}

/// A sentinel strictly above every value of `grid`.
pub fn default_sentinel(grid: &ValueGrid) -> f64 {
    let max = grid.max_value();
    let bumped = max + 1.0;
    if bumped > max {
        bumped
    } else {
        max * 2.0
    }
}

/// [`compute_pd`] with [`default_sentinel`].
pub fn compute_pd_auto(grid: &ValueGrid, dims: Dims) -> PersistenceDiagram {
    compute_pd(grid, dims, default_sentinel(grid)).expect("sentinel above maximum")
}

/// Diagrams of every slice `Z'_s` of a compact multifiltration, with
/// sentinel `N + 1`. Slices are processed one after another.
pub fn compute_pd_batch(cmf: &CompactMultiFiltration, dims: Dims) -> Vec<PersistenceDiagram> {
    let t = f64::from(cmf.num_levels()) + 1.0;
    cmf.slices()
        .iter()
        .enumerate()
        .map(|(s, z)| {
            compute_pd(&z.to_value_grid(), dims, t)
                .expect("levels are below N + 1")
                .with_slice_index(s)
        })
        .collect()
}

/// [`compute_pd_batch`] with slices distributed over `pool`. The output is
/// identical to the sequential version.
pub fn compute_pd_batch_in(
    pool: &rayon::ThreadPool,
    cmf: &CompactMultiFiltration,
    dims: Dims,
) -> Vec<PersistenceDiagram> {
    let t = f64::from(cmf.num_levels()) + 1.0;
    pool.install(|| {
        cmf.slices()
            .par_iter()
            .enumerate()
            .map(|(s, z)| {
                compute_pd(&z.to_value_grid(), dims, t)
                    .expect("levels are below N + 1")
                    .with_slice_index(s)
            })
            .collect()
    })
}

/// Diagrams of many independent grids, one task per grid and dimension.
/// With `pool == None` everything runs on the calling thread.
pub fn compute_pd_many(
    grids: &[ValueGrid],
    dims: Dims,
    t: f64,
    pool: Option<&rayon::ThreadPool>,
) -> Result<Vec<PersistenceDiagram>> {
    for g in grids {
        check_sentinel(g, t)?;
    }
    let wanted: Vec<HomologyDim> = [HomologyDim::Zero, HomologyDim::One]
        .into_iter()
        .filter(|&d| dims.contains(d))
        .collect();
    let jobs: Vec<(usize, HomologyDim)> = (0..grids.len())
        .flat_map(|i| wanted.iter().map(move |&d| (i, d)))
        .collect();
    let run = |&(i, d): &(usize, HomologyDim)| compute_dim_unchecked(&grids[i], d, t, i);
    let results: Vec<Vec<PersistencePair>> = match pool {
        Some(pool) => pool.install(|| jobs.par_iter().map(run).collect()),
        None => jobs.iter().map(run).collect(),
    };
    let mut out = vec![PersistenceDiagram::default(); grids.len()];
    for ((i, d), pairs) in jobs.into_iter().zip(results) {
        match d {
            HomologyDim::Zero => out[i].pairs_dim0 = pairs,
            HomologyDim::One => out[i].pairs_dim1 = pairs,
        }
    }
    Ok(out)
}

/// Upstream gradient of a scalar loss with respect to one pair's values.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PairCotangent {
    pub d_birth: f64,
    pub d_death: f64,
}

/// Routes pair cotangents to the pixels that realize each birth and death.
///
/// `cotangents` follows [`PersistenceDiagram::iter`] order. Death cotangents
/// of essential pairs have no pixel and are ignored.
pub fn scatter_gradients(
    diagram: &PersistenceDiagram,
    cotangents: &[PairCotangent],
    shape: (usize, usize),
) -> Result<ValueGrid> {
    if cotangents.len() != diagram.len() {
        return Err(Error::Dimension(format!(
            "{} cotangents for {} pairs",
            cotangents.len(),
            diagram.len()
        )));
    }
    let (h, w) = shape;
    let mut acc = vec![0.0; h * w];
    let mut add = |c: PixelCoord, g: f64| -> Result<()> {
        if c.row >= h || c.col >= w {
            return Err(Error::CoordOutOfRange {
                row: c.row,
                col: c.col,
                height: h,
                width: w,
            });
        }
        acc[c.row * w + c.col] += g;
        Ok(())
    };
    for (pair, cot) in diagram.iter().zip(cotangents) {
        add(pair.birth_coord, cot.d_birth)?;
        if let Some(dc) = pair.death_coord {
            add(dc, cot.d_death)?;
        }
    }
    ValueGrid::new(h, w, acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::fixtures::toy_5x5;

    fn bars(pd: &PersistenceDiagram, dim: HomologyDim) -> Vec<(f64, f64)> {
        pd.sorted_bars(dim)
    }

    #[test]
    fn one_by_three_merge() {
        let g = ValueGrid::from_rows(&[[0.0, 5.0, 1.0]]).unwrap();
        let pd = compute_pd(&g, Dims::Zero, 6.0).unwrap();
        assert_eq!(bars(&pd, HomologyDim::Zero), vec![(0.0, f64::INFINITY), (1.0, 5.0)]);
        let young = pd.pairs_dim0.iter().find(|p| p.birth == 1.0).unwrap();
        assert_eq!(young.birth_coord, PixelCoord::new(0, 2));
        assert_eq!(young.death_coord, Some(PixelCoord::new(0, 1)));
        assert!(pd.pairs_dim1.is_empty());
    }

    #[test]
    fn ring_with_center() {
        let g = ValueGrid::from_rows(&[[0.0, 0.0, 0.0], [0.0, 5.0, 0.0], [0.0, 0.0, 0.0]]).unwrap();
        let pd = compute_pd(&g, Dims::Both, 6.0).unwrap();
        assert_eq!(bars(&pd, HomologyDim::One), vec![(0.0, 5.0)]);
        assert_eq!(bars(&pd, HomologyDim::Zero), vec![(0.0, f64::INFINITY)]);
        let hole = pd.pairs_dim1[0];
        assert_eq!(hole.death_coord, Some(PixelCoord::new(1, 1)));
        assert!(hole.birth_coord != PixelCoord::new(1, 1));
    }

    #[test]
    fn sentinel_must_exceed_max() {
        let g = ValueGrid::from_rows(&[[0.0, 5.0]]).unwrap();
        assert!(matches!(
            compute_pd(&g, Dims::Both, 5.0),
            Err(Error::SentinelTooSmall { .. })
        ));
        assert!(compute_pd(&g, Dims::Both, f64::INFINITY).is_err());
    }

    #[test]
    fn single_pixel_and_ramp() {
        let g = ValueGrid::from_rows(&[[3.0]]).unwrap();
        let pd = compute_pd_auto(&g, Dims::Both);
        assert_eq!(bars(&pd, HomologyDim::Zero), vec![(3.0, f64::INFINITY)]);
        assert!(pd.pairs_dim1.is_empty());
        let ramp = ValueGrid::from_rows(&[[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]]).unwrap();
        let pd = compute_pd_auto(&ramp, Dims::Both);
        assert_eq!(pd.len(), 1);
        assert!(pd.pairs_dim0[0].is_essential());
    }

    #[test]
    fn constant_grid_has_one_class() {
        let g = ValueGrid::constant(4, 5, 2.0).unwrap();
        let pd = compute_pd_auto(&g, Dims::Both);
        assert_eq!(bars(&pd, HomologyDim::Zero), vec![(2.0, f64::INFINITY)]);
        assert!(pd.pairs_dim1.is_empty());
    }

    #[test]
    fn toy_fixture_diagram() {
        let pd = compute_pd_auto(&toy_5x5(), Dims::Both);
        assert_eq!(
            bars(&pd, HomologyDim::Zero),
            vec![(1.0, 4.0), (1.0, f64::INFINITY), (2.0, 3.0)]
        );
        assert_eq!(bars(&pd, HomologyDim::One), vec![(2.0, 4.0), (3.0, 5.0)]);
    }

    #[test]
    fn diagonal_pixels_do_not_connect_in_dimension_zero() {
        // 4-connectivity keeps the two low pixels apart until a high one joins
        let g = ValueGrid::from_rows(&[[0.0, 7.0], [7.0, 1.0]]).unwrap();
        let pd = compute_pd_auto(&g, Dims::Both);
        assert_eq!(bars(&pd, HomologyDim::Zero), vec![(0.0, f64::INFINITY), (1.0, 7.0)]);
        assert!(pd.pairs_dim1.is_empty());
    }

    #[test]
    fn inexact_inversion_falls_back_to_ranks() {
        // 1e-17 and 0 collapse under t - v with t = 10
        let g = ValueGrid::from_rows(&[[1e-17, 1e-17, 1e-17], [1e-17, 0.0, 1e-17], [1e-17, 1e-17, 1e-17]]).unwrap();
        let pd = compute_pd(&g, Dims::Both, 10.0).unwrap();
        assert_eq!(bars(&pd, HomologyDim::Zero), vec![(0.0, f64::INFINITY)]);
        let h = ValueGrid::from_rows(&[[0.0, 0.0, 0.0], [0.0, 1e-17, 0.0], [0.0, 0.0, 0.0]]).unwrap();
        let pd = compute_pd(&h, Dims::Both, 10.0).unwrap();
        assert_eq!(bars(&pd, HomologyDim::One), vec![(0.0, 1e-17)]);
    }

    #[test]
    fn batch_matches_sequential_and_records_slice() {
        use crate::filtration::LevelGrid;
        let z = LevelGrid::new(2, 3, vec![0, 3, 1, 2, 0, 3]).unwrap();
        let cmf = CompactMultiFiltration::new(3, vec![z.clone(), z.clone(), z]).unwrap();
        let seq = compute_pd_batch(&cmf, Dims::Both);
        assert_eq!(seq.len(), 3);
        for (s, pd) in seq.iter().enumerate() {
            assert!(pd.iter().all(|p| p.slice_index == s));
            assert_eq!(pd.sorted_bars(HomologyDim::Zero), seq[0].sorted_bars(HomologyDim::Zero));
        }
        let pool = rayon::ThreadPoolBuilder::new().num_threads(2).build().unwrap();
        assert_eq!(compute_pd_batch_in(&pool, &cmf, Dims::Both), seq);
    }

    #[test]
    fn scatter_simple_cases() {
        let g = ValueGrid::from_rows(&[[0.0, 5.0, 1.0]]).unwrap();
        let pd = compute_pd_auto(&g, Dims::Zero);
        let cots: Vec<PairCotangent> = pd
            .iter()
            .map(|p| {
                if p.is_essential() {
                    PairCotangent::default()
                } else {
                    PairCotangent {
                        d_birth: 1.0,
                        d_death: 1.0,
                    }
                }
            })
            .collect();
        let grad = scatter_gradients(&pd, &cots, (1, 3)).unwrap();
        assert_eq!(grad.values(), &[0.0, 1.0, 1.0]);
        let zero = scatter_gradients(&pd, &vec![PairCotangent::default(); pd.len()], (1, 3)).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));
        assert!(matches!(
            scatter_gradients(&pd, &cots, (1, 2)),
            Err(Error::CoordOutOfRange { .. })
        ));
        assert!(scatter_gradients(&pd, &cots[..1], (1, 3)).is_err());
    }
}
