//! Multiparameter summaries: slicing, Betti numbers, Hilbert functions and
//! Betti tensors.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::filtration::{BiFiltration, CompactMultiFiltration, LevelGrid, MultiMembership};
use crate::grid::BinaryGrid;
use crate::persistence::{compute_pd, Dims, HomologyDim, PersistenceDiagram};

/// Per-slice diagrams of a bifiltration sliced along one axis.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SlicedDiagrams {
    pub slices: Vec<PersistenceDiagram>,
    /// Column levels `1..=N` shared by every slice.
    pub levels: Vec<f64>,
}

impl SlicedDiagrams {
    pub fn num_slices(&self) -> usize {
        self.slices.len()
    }

    /// Largest level, used to clip essential deaths.
    pub fn max_level(&self) -> f64 {
        self.levels.last().copied().unwrap_or(0.0)
    }
}

/// Which index is held fixed while slicing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SliceAxis {
    /// Fix the row `s`, vary the column `t`.
    #[default]
    Rows,
    Columns,
}

/// For row `s`, the first 1-based column at which each pixel is active,
/// `N + 1` when it never is.
pub fn first_activation_grid(bif: &BiFiltration, row: usize) -> LevelGrid {
    let (h, w) = bif.image_shape();
    let n = bif.cols();
    let mut levels = vec![n as u32 + 1; h * w];
    for t in (0..n).rev() {
        for (slot, &a) in levels.iter_mut().zip(bif.get(row, t).active()) {
            if a {
                *slot = t as u32 + 1;
            }
        }
    }
    LevelGrid::new(h, w, levels).expect("mask shape")
}

/// Diagram of a first-activation grid with levels in `1..=N+1`, where
/// `N + 1` means never active. Deaths at `N + 1` become essential and
/// never-active components are dropped.
pub fn activation_diagram(grid: &LevelGrid, n: u32, slice_index: usize) -> PersistenceDiagram {
    let never = f64::from(n) + 1.0;
    let pd = compute_pd(&grid.to_value_grid(), Dims::Both, never + 1.0)
        .expect("levels are at most N + 1")
        .with_slice_index(slice_index);
    let fix = |pairs: Vec<_>| {
        pairs
            .into_iter()
            .filter_map(|mut p: crate::persistence::PersistencePair| {
                if p.birth >= never {
                    return None;
                }
                if p.death >= never {
                    p.death = f64::INFINITY;
                    p.death_coord = None;
                }
                Some(p)
            })
            .collect()
    };
    PersistenceDiagram {
        pairs_dim0: fix(pd.pairs_dim0),
        pairs_dim1: fix(pd.pairs_dim1),
    }
}

fn levels_upto(n: usize) -> Vec<f64> {
    (1..=n).map(|t| t as f64).collect()
}

/// Row-wise slicing: one diagram per row, in row order.
pub fn slice_rows(bif: &BiFiltration) -> Result<SlicedDiagrams> {
    slice_bifiltration(bif, SliceAxis::Rows, None)
}

/// Slices `bif` along `axis`, optionally distributing slices over `pool`.
pub fn slice_bifiltration(
    bif: &BiFiltration,
    axis: SliceAxis,
    pool: Option<&rayon::ThreadPool>,
) -> Result<SlicedDiagrams> {
    bif.check_monotone()?;
    let transposed;
    let bif = match axis {
        SliceAxis::Rows => bif,
        SliceAxis::Columns => {
            transposed = bif.transpose();
            &transposed
        }
    };
    let n = bif.cols() as u32;
    let run = |s: usize| activation_diagram(&first_activation_grid(bif, s), n, s);
    let slices = match pool {
        Some(pool) => pool.install(|| (0..bif.rows()).into_par_iter().map(run).collect()),
        None => (0..bif.rows()).map(run).collect(),
    };
    Ok(SlicedDiagrams {
        slices,
        levels: levels_upto(bif.cols()),
    })
}

/// Sliced diagrams straight from a compact representation, without
/// expanding the masks. Equal to slicing [`crate::filtration::expand_bifiltration`].
pub fn slice_compact(cmf: &CompactMultiFiltration, pool: Option<&rayon::ThreadPool>) -> Result<SlicedDiagrams> {
    let violations = cmf.violation_count();
    if violations > 0 {
        return Err(Error::NotMonotone { violations });
    }
    let n = cmf.num_levels();
    let run = |(s, z): (usize, &LevelGrid)| {
        let shifted =
            LevelGrid::new(z.height(), z.width(), z.levels().iter().map(|l| l + 1).collect()).expect("same shape");
        activation_diagram(&shifted, n, s)
    };
    let slices = match pool {
        Some(pool) => pool.install(|| cmf.slices().par_iter().enumerate().map(run).collect()),
        None => cmf.slices().iter().enumerate().map(run).collect(),
    };
    Ok(SlicedDiagrams {
        slices,
        levels: levels_upto(n as usize),
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BettiNumbers {
    pub b0: usize,
    pub b1: usize,
}

impl BettiNumbers {
    pub fn get(&self, dim: HomologyDim) -> usize {
        match dim {
            HomologyDim::Zero => self.b0,
            HomologyDim::One => self.b1,
        }
    }
}

/// 4-connected components of the active pixels.
pub fn count_components(mask: &BinaryGrid) -> usize {
    let (h, w) = mask.shape();
    let active = mask.active();
    let mut seen = vec![false; h * w];
    let mut queue = VecDeque::new();
    let mut count = 0;
    for start in 0..h * w {
        if !active[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            let (r, c) = (p / w, p % w);
            let mut visit = |q: usize| {
                if active[q] && !seen[q] {
                    seen[q] = true;
                    queue.push_back(q);
                }
            };
            if r > 0 {
                visit(p - w);
            }
            if r + 1 < h {
                visit(p + w);
            }
            if c > 0 {
                visit(p - 1);
            }
            if c + 1 < w {
                visit(p + 1);
            }
        }
    }
    count
}

/// `b0` by component counting, `b1` as the number of finite dimension-1
/// pairs of the mask's indicator grid.
pub fn betti_numbers(mask: &BinaryGrid) -> BettiNumbers {
    let b0 = count_components(mask);
    let b1 = if b0 == 0 {
        0
    } else {
        compute_pd(&mask.indicator_grid(), Dims::One, 2.0)
            .expect("indicator values are 0 and 1")
            .pairs_dim1
            .len()
    };
    BettiNumbers { b0, b1 }
}

/// `rank H_k(K_{s,t})` over the whole grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertGrid {
    pub rows: usize,
    pub cols: usize,
    pub dim: HomologyDim,
    /// Row-major values.
    pub values: Vec<usize>,
}

impl HilbertGrid {
    pub fn get(&self, s: usize, t: usize) -> usize {
        self.values[s * self.cols + t]
    }
}

pub fn hilbert_function(bif: &BiFiltration, dim: HomologyDim) -> Result<HilbertGrid> {
    bif.check_monotone()?;
    Ok(HilbertGrid {
        rows: bif.rows(),
        cols: bif.cols(),
        dim,
        values: bif.masks().iter().map(|m| betti_numbers(m).get(dim)).collect(),
    })
}

/// Betti numbers over a multi-parameter membership array.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiTensor {
    pub shape: Vec<usize>,
    pub dim: HomologyDim,
    /// Row-major values.
    pub values: Vec<usize>,
}

impl BettiTensor {
    pub fn get(&self, index: &[usize]) -> usize {
        let flat = index.iter().zip(&self.shape).fold(0, |acc, (&i, &n)| acc * n + i);
        self.values[flat]
    }
}

/// `N1 x N2 x N3` Betti numbers of a three-parameter membership array.
pub fn color_betti_tensor(
    membership: &MultiMembership,
    dim: HomologyDim,
    pool: Option<&rayon::ThreadPool>,
) -> Result<BettiTensor> {
    if membership.shape().len() != 3 {
        return Err(Error::Dimension(format!(
            "expected 3 parameter axes, found {}",
            membership.shape().len()
        )));
    }
    let violations = membership.monotonicity_violations();
    if violations > 0 {
        return Err(Error::NotMonotone { violations });
    }
    let masks = membership.masks();
    let values = match pool {
        Some(pool) => pool.install(|| masks.par_iter().map(|m| betti_numbers(m).get(dim)).collect()),
        None => masks.iter().map(|m| betti_numbers(m).get(dim)).collect(),
    };
    Ok(BettiTensor {
        shape: membership.shape().to_vec(),
        dim,
        values,
    })
}
