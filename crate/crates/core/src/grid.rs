//! Pixel grids shared by every other module.
//!
//! All grids are row-major with the origin in the top-left corner; a pixel is
//! addressed by `(row, col)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PixelCoord {
    pub row: usize,
    pub col: usize,
}

impl PixelCoord {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

/// A rectangular grid of finite real values, one per pixel.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueGrid {
    height: usize,
    width: usize,
    values: Vec<f64>,
}

impl ValueGrid {
    pub fn new(height: usize, width: usize, values: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::EmptyGrid);
        }
        if values.len() != height * width {
            return Err(Error::ShapeMismatch {
                height,
                width,
                len: values.len(),
            });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { height, width, values })
    }

    /// Builds a grid from nested rows. All rows must have the same length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(height * width);
        for row in rows {
            let row = row.as_ref();
            if row.len() != width {
                return Err(Error::ShapeMismatch {
                    height,
                    width,
                    len: values.len() + row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::new(height, width, values)
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                values.push(f(r, c));
            }
        }
        Self::new(height, width, values)
    }

    pub fn constant(height: usize, width: usize, value: f64) -> Result<Self> {
        Self::new(height, width, vec![value; height * width])
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

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    #[inline]
    pub fn at(&self, coord: PixelCoord) -> f64 {
        self.get(coord.row, coord.col)
    }

    pub fn contains(&self, coord: PixelCoord) -> bool {
        coord.row < self.height && coord.col < self.width
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// True when every value is an integer (the grid came from a quantized
    /// filtration or an 8-bit image).
    pub fn is_integer_valued(&self) -> bool {
        self.values.iter().all(|v| v.fract() == 0.0)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.height, self.width, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn negate(&self) -> Self {
        Self {
            height: self.height,
            width: self.width,
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    /// Surrounds the grid with a one-pixel border of `value`.
    pub fn padded(&self, value: f64) -> Self {
        let (h, w) = (self.height + 2, self.width + 2);
        let mut values = vec![value; h * w];
        for r in 0..self.height {
            let src = &self.values[r * self.width..(r + 1) * self.width];
            values[(r + 1) * w + 1..(r + 1) * w + 1 + self.width].copy_from_slice(src);
        }
        Self {
            height: h,
            width: w,
            values,
        }
    }

    /// Largest absolute pixelwise difference. Shapes must agree.
    pub fn sup_distance(&self, other: &ValueGrid) -> Result<f64> {
        if self.shape() != other.shape() {
            return Err(Error::Dimension(format!("{:?} vs {:?}", self.shape(), other.shape())));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn sublevel_set(&self, tau: f64) -> BinaryGrid {
        sublevel_set(self, tau)
    }

    pub fn superlevel_set(&self, tau: f64) -> BinaryGrid {
        superlevel_set(self, tau)
    }
}

/// Pixel membership of one binary image in a filtration.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryGrid {
    height: usize,
    width: usize,
    active: Vec<bool>,
}

impl BinaryGrid {
    pub fn new(height: usize, width: usize, active: Vec<bool>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::EmptyGrid);
        }
        if active.len() != height * width {
            return Err(Error::ShapeMismatch {
                height,
                width,
                len: active.len(),
            });
        }
        Ok(Self { height, width, active })
    }

    /// Parses rows of `'#'`/`'1'` (active) and `'.'`/`'0'` (inactive).
    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let mut active = Vec::with_capacity(height * width);
        for row in rows {
            if row.len() != width {
                return Err(Error::Format(format!("ragged mask row {row:?}")));
            }
            for ch in row.chars() {
                active.push(match ch {
                    '#' | '1' => true,
                    '.' | '0' => false,
                    other => return Err(Error::Format(format!("bad mask character {other:?}"))),
                });
            }
        }
        Self::new(height, width, active)
    }

    pub fn filled(height: usize, width: usize, value: bool) -> Result<Self> {
        Self::new(height, width, vec![value; height * width])
    }

    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut active = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                active.push(f(r, c));
            }
        }
        Self::new(height, width, active)
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

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.active[row * self.width + col]
    }

    pub fn count_active(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn is_empty_mask(&self) -> bool {
        !self.active.iter().any(|&a| a)
    }

    pub fn is_full(&self) -> bool {
        self.active.iter().all(|&a| a)
    }

    /// Pixelwise inclusion `self ⊆ other`. Shapes must agree.
    pub fn is_subset_of(&self, other: &BinaryGrid) -> bool {
        self.shape() == other.shape() && self.active.iter().zip(&other.active).all(|(&a, &b)| !a || b)
    }

    /// Active pixels as `0.0`, inactive as `1.0`: the indicator filtration
    /// whose level-0 sublevel set is this mask.
    pub fn indicator_grid(&self) -> ValueGrid {
        ValueGrid {
            height: self.height,
            width: self.width,
            values: self.active.iter().map(|&a| if a { 0.0 } else { 1.0 }).collect(),
        }
    }
}

impl std::fmt::Display for BinaryGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for r in 0..self.height {
            for c in 0..self.width {
                f.write_str(if self.get(r, c) { "#" } else { "." })?;
            }
            if r + 1 < self.height {
                f.write_str("\n")?;
            }
        }
        Ok(())
    }
}

/// An ordered stack of equally shaped channels, e.g. R, G, B.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiChannelImage {
    channels: Vec<ValueGrid>,
}

impl MultiChannelImage {
    pub fn new(channels: Vec<ValueGrid>) -> Result<Self> {
        let first = channels.first().ok_or(Error::ChannelCount { expected: 1, found: 0 })?;
        if let Some(bad) = channels.iter().find(|c| c.shape() != first.shape()) {
            return Err(Error::Dimension(format!(
                "channel shape {:?} differs from {:?}",
                bad.shape(),
                first.shape()
            )));
        }
        Ok(Self { channels })
    }

    pub fn channels(&self) -> &[ValueGrid] {
        &self.channels
    }

    pub fn channel(&self, index: usize) -> Option<&ValueGrid> {
        self.channels.get(index)
    }

    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.channels[0].shape()
    }

    /// ITU-R BT.601 luma for three-channel images; the single channel otherwise.
    pub fn luma(&self) -> ValueGrid {
        match self.channels.as_slice() {
            [r, g, b] => ValueGrid {
                height: r.height,
                width: r.width,
                values: r
                    .values
                    .iter()
                    .zip(&g.values)
                    .zip(&b.values)
                    .map(|((r, g), b)| (0.299 * r + 0.587 * g + 0.114 * b).round())
                    .collect(),
            },
            _ => self.channels[0].clone(),
        }
    }
}

/// Pixels with value `<= tau`.
pub fn sublevel_set(grid: &ValueGrid, tau: f64) -> BinaryGrid {
    BinaryGrid {
        height: grid.height,
        width: grid.width,
        active: grid.values.iter().map(|&v| v <= tau).collect(),
    }
}

/// Pixels with value `>= tau`.
pub fn superlevel_set(grid: &ValueGrid, tau: f64) -> BinaryGrid {
    BinaryGrid {
        height: grid.height,
        width: grid.width,
        active: grid.values.iter().map(|&v| v >= tau).collect(),
    }
}

/// Small grids used in examples and tests.
pub mod fixtures {
    use super::ValueGrid;

    /// A 5x5 toy image with five gray levels: three components (one isolated
    /// until level 4) and two holes.
    pub fn toy_5x5() -> ValueGrid {
        ValueGrid::from_rows(&[
            [1.0, 1.0, 2.0, 3.0, 3.0],
            [1.0, 4.0, 2.0, 5.0, 3.0],
            [2.0, 2.0, 2.0, 4.0, 3.0],
            [5.0, 4.0, 3.0, 3.0, 3.0],
            [5.0, 1.0, 4.0, 2.0, 2.0],
        ])
        .unwrap()
    }
}
