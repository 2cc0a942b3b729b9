//! Single- and multi-parameter filtrations of images.
//!
//! A bifiltration is stored explicitly as an `M x N` array of binary masks
//! ([`BiFiltration`]) or compactly as `M` integer level grids
//! ([`CompactMultiFiltration`]); pixel `p` of slice `s` is active at column
//! `t` (1-based) iff `Z'_s(p) <= t - 1`.

use crate::error::{Error, Result};
use crate::grid::{sublevel_set, BinaryGrid, MultiChannelImage, ValueGrid};

/// Erosion levels used by the grayscale x erosion baseline.
pub const DEFAULT_EROSION_LEVELS: [u32; 10] = [0, 1, 2, 3, 5, 7, 9, 12, 15, 20];
/// Number of grayscale thresholds used by the grayscale x erosion baseline.
pub const DEFAULT_GRAY_THRESHOLDS: usize = 50;
/// Thresholds per channel for the color multifiltration baseline.
pub const DEFAULT_COLOR_THRESHOLDS: usize = 10;

/// An integer-valued grid of filtration levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelGrid {
    height: usize,
    width: usize,
    levels: Vec<u32>,
}

impl LevelGrid {
    pub fn new(height: usize, width: usize, levels: Vec<u32>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::EmptyGrid);
        }
        if levels.len() != height * width {
            return Err(Error::ShapeMismatch {
                height,
                width,
                len: levels.len(),
            });
        }
        Ok(Self { height, width, levels })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.levels[row * self.width + col]
    }

    pub fn max_level(&self) -> u32 {
        self.levels.iter().copied().max().unwrap_or(0)
    }

    pub fn to_value_grid(&self) -> ValueGrid {
        ValueGrid::new(
            self.height,
            self.width,
            self.levels.iter().map(|&l| f64::from(l)).collect(),
        )
        .expect("level grid shape is valid")
    }
}

/// `floor(N * z)` per pixel, with `z = 1` mapped to `N`.
pub fn staircase(z: &ValueGrid, num_levels: u32) -> Result<LevelGrid> {
    if num_levels == 0 {
        return Err(Error::InvalidParameter("staircase needs at least one level".into()));
    }
    let n = f64::from(num_levels);
    let levels = z
        .values()
        .iter()
        .enumerate()
        .map(|(index, &value)| {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::OutOfUnitRange { index, value });
            }
            Ok(((n * value).floor() as u32).min(num_levels))
        })
        .collect::<Result<Vec<_>>>()?;
    LevelGrid::new(z.height(), z.width(), levels)
}

/// Straight-through backward pass of [`staircase`]: the floor is treated as
/// the identity, so the upstream gradient is scaled by `N`.
pub fn staircase_backward(grad_levels: &ValueGrid, num_levels: u32) -> ValueGrid {
    let n = f64::from(num_levels);
    ValueGrid::new(
        grad_levels.height(),
        grad_levels.width(),
        grad_levels.values().iter().map(|g| g * n).collect(),
    )
    .expect("same shape")
}

/// Stack of `M` quantized level grids `Z'_1..Z'_M` with values in `0..=N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompactMultiFiltration {
    num_levels: u32,
    slices: Vec<LevelGrid>,
    valid_bifiltration: bool,
}

impl CompactMultiFiltration {
    pub fn new(num_levels: u32, slices: Vec<LevelGrid>) -> Result<Self> {
        if num_levels == 0 {
            return Err(Error::InvalidParameter("num_levels must be positive".into()));
        }
        let first = slices
            .first()
            .ok_or_else(|| Error::InvalidParameter("need at least one slice".into()))?;
        for s in &slices {
            if s.shape() != first.shape() {
                return Err(Error::Dimension(format!(
                    "slice shape {:?} differs from {:?}",
                    s.shape(),
                    first.shape()
                )));
            }
            if let Some(&bad) = s.levels.iter().find(|&&l| l > num_levels) {
                return Err(Error::InvalidParameter(format!(
                    "level {bad} exceeds num_levels {num_levels}"
                )));
            }
        }
        Ok(Self {
            num_levels,
            slices,
            valid_bifiltration: false,
        })
    }

    /// Quantizes decoder outputs in `[0, 1]` with [`staircase`], one grid per slice.
    pub fn from_unit_grids(z: &[ValueGrid], num_levels: u32) -> Result<Self> {
        let slices = z.iter().map(|g| staircase(g, num_levels)).collect::<Result<Vec<_>>>()?;
        Self::new(num_levels, slices)
    }

    pub fn num_slices(&self) -> usize {
        self.slices.len()
    }

    pub fn num_levels(&self) -> u32 {
        self.num_levels
    }

    pub fn slices(&self) -> &[LevelGrid] {
        &self.slices
    }

    pub fn shape(&self) -> (usize, usize) {
        self.slices[0].shape()
    }

    /// Set only by [`Self::validate`].
    pub fn is_valid_bifiltration(&self) -> bool {
        self.valid_bifiltration
    }

    /// Checks `Z'_s >= Z'_{s+1}` pixelwise and records the result.
    pub fn validate(&mut self) -> Result<()> {
        let violations = self.violation_count();
        self.valid_bifiltration = violations == 0;
        if violations == 0 {
            Ok(())
        } else {
            Err(Error::NotMonotone { violations })
        }
    }

    pub fn violation_count(&self) -> usize {
        self.slices
            .windows(2)
            .map(|w| w[0].levels.iter().zip(&w[1].levels).filter(|(a, b)| b > a).count())
            .sum()
    }
}

/// `sum_s sum_p max(0, Z'_{s+1}(p) - Z'_s(p))`; zero exactly on monotone stacks.
pub fn reg_penalty(cmf: &CompactMultiFiltration) -> f64 {
    cmf.slices
        .windows(2)
        .map(|w| {
            w[0].levels
                .iter()
                .zip(&w[1].levels)
                .map(|(&a, &b)| f64::from(b.saturating_sub(a)))
                .sum::<f64>()
        })
        .sum()
}

/// An `M x N` grid of nested binary images `K_{s,t}` (0-based indices here).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiFiltration {
    rows: usize,
    cols: usize,
    membership: Vec<BinaryGrid>,
}

impl BiFiltration {
    /// Row-major `rows x cols` masks. Monotonicity is not checked here; see
    /// [`Self::check_monotone`].
    pub fn new(rows: usize, cols: usize, membership: Vec<BinaryGrid>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter("bifiltration grid must be non-empty".into()));
        }
        if membership.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} masks for a {rows}x{cols} grid",
                membership.len()
            )));
        }
        let shape = membership[0].shape();
        if membership.iter().any(|m| m.shape() != shape) {
            return Err(Error::Dimension("masks differ in shape".into()));
        }
        Ok(Self { rows, cols, membership })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BinaryGrid) -> Result<Self> {
        let mut membership = Vec::with_capacity(rows * cols);
        for s in 0..rows {
            for t in 0..cols {
                membership.push(f(s, t));
            }
        }
        Self::new(rows, cols, membership)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Image shape of each mask.
    pub fn image_shape(&self) -> (usize, usize) {
        self.membership[0].shape()
    }

    #[inline]
    pub fn get(&self, s: usize, t: usize) -> &BinaryGrid {
        &self.membership[s * self.cols + t]
    }

    pub fn masks(&self) -> &[BinaryGrid] {
        &self.membership
    }

    /// Transposed grid: columns become rows.
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |s, t| self.get(t, s).clone()).expect("same masks")
    }

    /// Number of adjacent pairs violating `K_{s,t} ⊆ K_{s,t+1}` or `K_{s,t} ⊆ K_{s+1,t}`.
    pub fn monotonicity_violations(&self) -> usize {
        let mut bad = 0;
        for s in 0..self.rows {
            for t in 0..self.cols {
                if t + 1 < self.cols && !self.get(s, t).is_subset_of(self.get(s, t + 1)) {
                    bad += 1;
                }
                if s + 1 < self.rows && !self.get(s, t).is_subset_of(self.get(s + 1, t)) {
                    bad += 1;
                }
            }
        }
        bad
    }

    pub fn check_monotone(&self) -> Result<()> {
        match self.monotonicity_violations() {
            0 => Ok(()),
            violations => Err(Error::NotMonotone { violations }),
        }
    }
}

/// Expands a compact representation into its `M x N` masks; row `s` is
/// slice `s`, so `Z'_s >= Z'_{s+1}` gives `K_{s,t} ⊆ K_{s+1,t}`.
pub fn expand_bifiltration(cmf: &CompactMultiFiltration) -> Result<BiFiltration> {
    let violations = cmf.violation_count();
    if violations > 0 {
        return Err(Error::NotMonotone { violations });
    }
    let (h, w) = cmf.shape();
    let n = cmf.num_levels as usize;
    BiFiltration::from_fn(cmf.num_slices(), n, |row, t| {
        let slice = &cmf.slices[row];
        let t = t as u32;
        BinaryGrid::new(h, w, slice.levels.iter().map(|&z| z <= t).collect()).expect("shape")
    })
}

/// Manhattan distance of every pixel to the nearest active pixel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErosionField {
    height: usize,
    width: usize,
    distances: Vec<u32>,
}

impl ErosionField {
    pub fn distances(&self) -> &[u32] {
        &self.distances
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.distances[row * self.width + col]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }
}

/// Exact L1 distance transform by a forward and a backward raster sweep.
pub fn erosion_field(mask: &BinaryGrid) -> Result<ErosionField> {
    if mask.is_empty_mask() {
        return Err(Error::EmptyMask);
    }
    let (h, w) = mask.shape();
    let far = u32::MAX / 2;
    let mut d: Vec<u32> = mask.active().iter().map(|&a| if a { 0 } else { far }).collect();
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            if r > 0 {
                d[i] = d[i].min(d[i - w] + 1);
            }
            if c > 0 {
                d[i] = d[i].min(d[i - 1] + 1);
            }
        }
    }
    for r in (0..h).rev() {
        for c in (0..w).rev() {
            let i = r * w + c;
            if r + 1 < h {
                d[i] = d[i].min(d[i + w] + 1);
            }
            if c + 1 < w {
                d[i] = d[i].min(d[i + 1] + 1);
            }
        }
    }
    Ok(ErosionField {
        height: h,
        width: w,
        distances: d,
    })
}

/// Whether the erosion level test is `xi < n` or `xi <= n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ErosionInequality {
    #[default]
    Strict,
    NonStrict,
}

impl ErosionInequality {
    #[inline]
    fn admits(self, distance: u32, level: u32) -> bool {
        match self {
            Self::Strict => distance < level,
            Self::NonStrict => distance <= level,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ErosionBifiltration {
    /// Rows indexed by erosion level, columns by grayscale threshold.
    pub bifiltration: BiFiltration,
    /// Threshold indices whose sublevel set was empty; their masks are empty.
    pub empty_thresholds: Vec<usize>,
}

/// Grayscale sublevel x erosion bifiltration.
///
/// For threshold `tau_m` let `Omega_m` be the sublevel set and `xi_m` its L1
/// distance field; entry `(n, m)` holds the pixels with `xi_m < levels[n]`.
/// Rows follow the erosion levels and columns the thresholds, so the default
/// recipe yields a `10 x 50` grid.
pub fn erosion_bifiltration(
    gray: &ValueGrid,
    gray_thresholds: &[f64],
    erosion_levels: &[u32],
    inequality: ErosionInequality,
) -> Result<ErosionBifiltration> {
    if gray_thresholds.is_empty() || erosion_levels.is_empty() {
        return Err(Error::InvalidParameter(
            "threshold and level lists must be non-empty".into(),
        ));
    }
    if gray_thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::NotIncreasing("gray thresholds"));
    }
    if erosion_levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::NotIncreasing("erosion levels"));
    }
    let (h, w) = gray.shape();
    let mut empty_thresholds = Vec::new();
    let fields: Vec<Option<ErosionField>> = gray_thresholds
        .iter()
        .enumerate()
        .map(|(m, &tau)| {
            let omega = sublevel_set(gray, tau);
            match erosion_field(&omega) {
                Ok(f) => Some(f),
                Err(_) => {
                    empty_thresholds.push(m);
                    None
                }
            }
        })
        .collect();
    let bifiltration = BiFiltration::from_fn(erosion_levels.len(), gray_thresholds.len(), |n, m| match &fields[m] {
        Some(field) => BinaryGrid::new(
            h,
            w,
            field
                .distances
                .iter()
                .map(|&xi| inequality.admits(xi, erosion_levels[n]))
                .collect(),
        )
        .expect("shape"),
        None => BinaryGrid::filled(h, w, false).expect("shape"),
    })?;
    Ok(ErosionBifiltration {
        bifiltration,
        empty_thresholds,
    })
}

/// `count` evenly spaced thresholds from the grid minimum to its maximum.
pub fn linear_thresholds(grid: &ValueGrid, count: usize) -> Vec<f64> {
    linspace(grid.min_value(), grid.max_value(), count)
}

pub(crate) fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![hi],
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            (0..count)
                .map(|i| if i + 1 == count { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// A multi-parameter array of masks with one axis per channel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiMembership {
    shape: Vec<usize>,
    masks: Vec<BinaryGrid>,
}

impl MultiMembership {
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn masks(&self) -> &[BinaryGrid] {
        &self.masks
    }

    /// Mask at a multi-index (row-major over the axes).
    pub fn get(&self, index: &[usize]) -> &BinaryGrid {
        &self.masks[self.flat_index(index)]
    }

    pub fn flat_index(&self, index: &[usize]) -> usize {
        assert_eq!(index.len(), self.shape.len());
        index.iter().zip(&self.shape).fold(0, |acc, (&i, &n)| {
            assert!(i < n, "index out of range");
            acc * n + i
        })
    }

    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.shape.len()];
        for (slot, &n) in idx.iter_mut().zip(&self.shape).rev() {
            *slot = flat % n;
            flat /= n;
        }
        idx
    }

    /// Number of adjacent pairs along any axis that are not nested.
    pub fn monotonicity_violations(&self) -> usize {
        let mut bad = 0;
        for flat in 0..self.masks.len() {
            let idx = self.unflatten(flat);
            for axis in 0..idx.len() {
                if idx[axis] + 1 < self.shape[axis] {
                    let mut next = idx.clone();
                    next[axis] += 1;
                    if !self.masks[flat].is_subset_of(self.get(&next)) {
                        bad += 1;
                    }
                }
            }
        }
        bad
    }
}

/// `X_{i_1..i_k} = { p | channel_j(p) <= thresholds[j][i_j] for all j }`.
pub fn threshold_multifiltration(img: &MultiChannelImage, thresholds: &[Vec<f64>]) -> Result<MultiMembership> {
    if thresholds.len() != img.num_channels() {
        return Err(Error::ChannelCount {
            expected: thresholds.len(),
            found: img.num_channels(),
        });
    }
    if thresholds.iter().any(|t| t.is_empty()) {
        return Err(Error::InvalidParameter("empty threshold list".into()));
    }
    if thresholds.iter().any(|t| t.windows(2).any(|w| w[0] >= w[1])) {
        return Err(Error::NotIncreasing("channel thresholds"));
    }
    let shape: Vec<usize> = thresholds.iter().map(Vec::len).collect();
    let total: usize = shape.iter().product();
    let (h, w) = img.shape();
    let mut out = MultiMembership {
        shape,
        masks: Vec::with_capacity(total),
    };
    for flat in 0..total {
        let idx = out.unflatten(flat);
        let taus: Vec<f64> = idx.iter().zip(thresholds).map(|(&i, t)| t[i]).collect();
        let active = (0..h * w)
            .map(|p| img.channels().iter().zip(&taus).all(|(ch, &tau)| ch.values()[p] <= tau))
            .collect();
        out.masks.push(BinaryGrid::new(h, w, active)?);
    }
    Ok(out)
}

/// Three-parameter RGB multifiltration.
pub fn color_multifiltration(img: &MultiChannelImage, thresholds: &[Vec<f64>]) -> Result<MultiMembership> {
    if img.num_channels() != 3 {
        return Err(Error::ChannelCount {
            expected: 3,
            found: img.num_channels(),
        });
    }
    threshold_multifiltration(img, thresholds)
}

/// Random compact multifiltration: uniform levels in `0..=num_levels`,
/// sorted per pixel so that `Z'_s >= Z'_{s+1}`.
pub fn random_monotone_cmf<R: rand::Rng + ?Sized>(
    rng: &mut R,
    num_slices: usize,
    num_levels: u32,
    height: usize,
    width: usize,
) -> Result<CompactMultiFiltration> {
    let mut slices: Vec<Vec<u32>> = (0..num_slices)
        .map(|_| (0..height * width).map(|_| rng.gen_range(0..=num_levels)).collect())
        .collect();
    sort_slices_descending(&mut slices);
    let grids = slices
        .into_iter()
        .map(|l| LevelGrid::new(height, width, l))
        .collect::<Result<Vec<_>>>()?;
    let mut cmf = CompactMultiFiltration::new(num_levels, grids)?;
    cmf.validate()?;
    Ok(cmf)
}

/// Sorts each pixel's levels across slices in descending order.
pub(crate) fn sort_slices_descending(slices: &mut [Vec<u32>]) {
    let len = slices.first().map_or(0, Vec::len);
    let mut column = Vec::with_capacity(slices.len());
    for p in 0..len {
        column.clear();
        column.extend(slices.iter().map(|s| s[p]));
        column.sort_unstable_by(|a, b| b.cmp(a));
        for (s, &v) in slices.iter_mut().zip(&column) {
            s[p] = v;
        }
    }
}
