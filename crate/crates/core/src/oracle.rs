//! Brute-force ground truth: an explicit cubical complex and GF(2) reduction.
//!
//! Vertices are pixels, edges join 4-adjacent pixels and squares fill every
//! 2x2 block. A cell enters at the maximum value of its vertices. Cells are
//! ordered by value, then dimension, then position, and the boundary matrix
//! is reduced column by column. This is slow and only meant for small grids.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{PixelCoord, ValueGrid};
use crate::persistence::{compute_pd, Dims, HomologyDim, PersistenceDiagram, PersistencePair};

/// Largest side length accepted by [`oracle_pd`].
pub const ORACLE_MAX_SIDE: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub dim: usize,
    /// Pixel indices of the vertices, sorted ascending.
    pub vertices: Vec<usize>,
    pub value: f64,
}

#[derive(Clone, Debug)]
pub struct CubicalComplex {
    height: usize,
    width: usize,
    cells: Vec<Cell>,
    boundaries: Vec<Vec<usize>>,
}

impl CubicalComplex {
    pub fn new(grid: &ValueGrid) -> Result<Self> {
        let (h, w) = grid.shape();
        if h > ORACLE_MAX_SIDE || w > ORACLE_MAX_SIDE {
            return Err(Error::OracleTooLarge {
                height: h,
                width: w,
                limit: ORACLE_MAX_SIDE,
            });
        }
        let vals = grid.values();
        let value_of = |vs: &[usize]| vs.iter().map(|&v| vals[v]).fold(f64::NEG_INFINITY, f64::max);
        let mut cells: Vec<Cell> = Vec::new();
        for (p, &value) in vals.iter().enumerate() {
            cells.push(Cell {
                dim: 0,
                vertices: vec![p],
                value,
            });
        }
        for r in 0..h {
            for c in 0..w {
                let p = r * w + c;
                if c + 1 < w {
                    cells.push(Cell {
                        dim: 1,
                        vertices: vec![p, p + 1],
                        value: value_of(&[p, p + 1]),
                    });
                }
                if r + 1 < h {
                    cells.push(Cell {
                        dim: 1,
                        vertices: vec![p, p + w],
                        value: value_of(&[p, p + w]),
                    });
                }
            }
        }
        for r in 0..h.saturating_sub(1) {
            for c in 0..w.saturating_sub(1) {
                let p = r * w + c;
                let vs = vec![p, p + 1, p + w, p + w + 1];
                cells.push(Cell {
                    dim: 2,
                    value: value_of(&vs),
                    vertices: vs,
                });
            }
        }
        cells.sort_by(|a, b| {
            a.value
                .total_cmp(&b.value)
                .then(a.dim.cmp(&b.dim))
                .then_with(|| a.vertices.cmp(&b.vertices))
        });
        let position: std::collections::HashMap<Vec<usize>, usize> =
            cells.iter().enumerate().map(|(i, c)| (c.vertices.clone(), i)).collect();
        let boundaries = cells
            .iter()
            .map(|cell| {
                let mut faces: Vec<usize> = match cell.dim {
                    0 => Vec::new(),
                    1 => cell.vertices.iter().map(|v| position[&vec![*v]]).collect(),
                    _ => {
                        let [a, b, c, d] = [cell.vertices[0], cell.vertices[1], cell.vertices[2], cell.vertices[3]];
                        [vec![a, b], vec![c, d], vec![a, c], vec![b, d]]
                            .iter()
                            .map(|e| position[e])
                            .collect()
                    }
                };
                faces.sort_unstable();
                faces
            })
            .collect();
        Ok(Self {
            height: h,
            width: w,
            cells,
            boundaries,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    /// Cells in filtration order.
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Boundary of cell `i` as sorted indices into [`Self::cells`].
    pub fn boundary(&self, i: usize) -> &[usize] {
        &self.boundaries[i]
    }

    /// Every face precedes its coface and the boundary of a boundary vanishes.
    pub fn check_boundary(&self) -> bool {
        self.boundaries.iter().enumerate().all(|(i, faces)| {
            faces
                .iter()
                .all(|&f| f < i && self.cells[f].dim + 1 == self.cells[i].dim)
                && xor_all(faces.iter().map(|&f| self.boundaries[f].as_slice())).is_empty()
        })
    }

    /// `V - E + F` over cells with value `<= tau`.
    pub fn euler_characteristic(&self, tau: f64) -> i64 {
        self.cells
            .iter()
            .filter(|c| c.value <= tau)
            .map(|c| if c.dim % 2 == 0 { 1 } else { -1 })
            .sum()
    }

    fn coord_of(&self, cell: &Cell, values: &[f64]) -> PixelCoord {
        let p = *cell
            .vertices
            .iter()
            .find(|&&v| values[v] == cell.value)
            .expect("cell value is a vertex value");
        PixelCoord::new(p / self.width, p % self.width)
    }
}

fn xor_into(acc: &mut Vec<usize>, other: &[usize]) {
    let mut out = Vec::with_capacity(acc.len() + other.len());
    let (mut i, mut j) = (0, 0);
    while i < acc.len() && j < other.len() {
        match acc[i].cmp(&other[j]) {
            std::cmp::Ordering::Less => {
                out.push(acc[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(other[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&acc[i..]);
    out.extend_from_slice(&other[j..]);
    *acc = out;
}

fn xor_all<'a>(cols: impl Iterator<Item = &'a [usize]>) -> Vec<usize> {
    let mut acc = Vec::new();
    for c in cols {
        xor_into(&mut acc, c);
    }
    acc
}

/// Persistence pairs of the complex by standard column reduction, with
/// zero-persistence pairs dropped.
pub fn reduce(complex: &CubicalComplex, grid: &ValueGrid) -> PersistenceDiagram {
    let n = complex.cells.len();
    let mut columns: Vec<Vec<usize>> = complex.boundaries.clone();
    let mut low_owner: Vec<Option<usize>> = vec![None; n];
    let mut paired = vec![false; n];
    let mut pd = PersistenceDiagram::default();
    let vals = grid.values();
    for j in 0..n {
        while let Some(&low) = columns[j].last() {
            match low_owner[low] {
                Some(k) => {
                    let other = std::mem::take(&mut columns[k]);
                    xor_into(&mut columns[j], &other);
                    columns[k] = other;
                }
                None => break,
            }
        }
        if let Some(&low) = columns[j].last() {
            low_owner[low] = Some(j);
            paired[low] = true;
            paired[j] = true;
            let (b, d) = (&complex.cells[low], &complex.cells[j]);
            if b.value < d.value {
                push(
                    &mut pd,
                    PersistencePair {
                        dim: HomologyDim::from_index(b.dim).expect("dim 0 or 1"),
                        birth: b.value,
                        death: d.value,
                        birth_coord: complex.coord_of(b, vals),
                        death_coord: Some(complex.coord_of(d, vals)),
                        slice_index: 0,
                    },
                );
            }
        }
    }
    for (i, cell) in complex.cells.iter().enumerate() {
        if !paired[i] {
            push(
                &mut pd,
                PersistencePair {
                    dim: HomologyDim::from_index(cell.dim).expect("a rectangle has no essential 2-cycles"),
                    birth: cell.value,
                    death: f64::INFINITY,
                    birth_coord: complex.coord_of(cell, vals),
                    death_coord: None,
                    slice_index: 0,
                },
            );
        }
    }
    pd
}

fn push(pd: &mut PersistenceDiagram, pair: PersistencePair) {
    match pair.dim {
        HomologyDim::Zero => pd.pairs_dim0.push(pair),
        HomologyDim::One => pd.pairs_dim1.push(pair),
    }
}

/// Reference diagram of the sublevel filtration of `grid`.
pub fn oracle_pd(grid: &ValueGrid) -> Result<PersistenceDiagram> {
    let complex = CubicalComplex::new(grid)?;
    Ok(reduce(&complex, grid))
}

/// True when both diagrams hold the same multiset of bars in each dimension.
pub fn same_bars(a: &PersistenceDiagram, b: &PersistenceDiagram) -> bool {
    [HomologyDim::Zero, HomologyDim::One]
        .into_iter()
        .all(|d| a.sorted_bars(d) == b.sorted_bars(d))
}

/// Checks `chi(tau) = #alive dim-0 bars - #alive dim-1 bars` at every
/// distinct grid value. Returns the first failing `tau`.
pub fn euler_mismatch(grid: &ValueGrid, pd: &PersistenceDiagram) -> Result<Option<f64>> {
    let complex = CubicalComplex::new(grid)?;
    let mut taus = grid.values().to_vec();
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    let alive =
        |pairs: &[PersistencePair], tau: f64| pairs.iter().filter(|p| p.birth <= tau && tau < p.death).count() as i64;
    Ok(taus
        .into_iter()
        .find(|&tau| complex.euler_characteristic(tau) != alive(&pd.pairs_dim0, tau) - alive(&pd.pairs_dim1, tau)))
}

/// All `h x w` grids with entries drawn from `alphabet`, in lexicographic order.
pub fn exhaustive_grids(h: usize, w: usize, alphabet: &[f64]) -> impl Iterator<Item = ValueGrid> + '_ {
    let n = h * w;
    let k = alphabet.len();
    let total = k.checked_pow(n as u32).expect("enumeration too large");
    (0..total).map(move |mut code| {
        let mut values = vec![0.0; n];
        for slot in values.iter_mut().rev() {
            *slot = alphabet[code % k];
            code /= k;
        }
        ValueGrid::new(h, w, values).expect("non-empty")
    })
}

/// Random grid with side lengths in `1..=max_size` and integer values in `0..=9`.
pub fn random_grid<R: Rng + ?Sized>(rng: &mut R, max_size: usize) -> ValueGrid {
    let h = rng.gen_range(1..=max_size);
    let w = rng.gen_range(1..=max_size);
    ValueGrid::from_fn(h, w, |_, _| f64::from(rng.gen_range(0u8..=9))).expect("non-empty")
}

#[derive(Clone, Debug)]
pub struct OracleCheckConfig {
    pub trials: usize,
    pub max_size: usize,
    pub seed: u64,
    /// Deliberately corrupt one engine diagram so the checker must fail.
    pub inject_fault: bool,
}

impl Default for OracleCheckConfig {
    fn default() -> Self {
        Self {
            trials: 1000,
            max_size: 8,
            seed: 0,
            inject_fault: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OracleMismatch {
    pub grid: ValueGrid,
    pub reason: String,
}

#[derive(Clone, Debug, Default)]
pub struct OracleReport {
    pub exhaustive_checked: usize,
    pub random_checked: usize,
    pub mismatches: Vec<OracleMismatch>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares the engine against the oracle on one grid.
pub fn check_grid(grid: &ValueGrid, corrupt: bool) -> Result<Option<String>> {
    let t = crate::persistence::default_sentinel(grid);
    let mut engine = compute_pd(grid, Dims::Both, t)?;
    if corrupt {
        match engine.pairs_dim0.first_mut() {
            Some(p) => p.birth -= 1.0,
            None => unreachable!("every grid has an essential component"),
        }
    }
    let oracle = oracle_pd(grid)?;
    if !same_bars(&engine, &oracle) {
        return Ok(Some(format!(
            "engine dim0 {:?} dim1 {:?}, oracle dim0 {:?} dim1 {:?}",
            engine.sorted_bars(HomologyDim::Zero),
            engine.sorted_bars(HomologyDim::One),
            oracle.sorted_bars(HomologyDim::Zero),
            oracle.sorted_bars(HomologyDim::One)
        )));
    }
    if let Some(tau) = euler_mismatch(grid, &engine)? {
        return Ok(Some(format!("Euler characteristic differs at {tau}")));
    }
    Ok(None)
}

/// Exhaustive 2x2 and 2x3 grids over `{0, 1, 2}` followed by random grids.
pub fn run_oracle_check(cfg: &OracleCheckConfig) -> Result<OracleReport> {
    if cfg.max_size == 0 || cfg.max_size > ORACLE_MAX_SIDE {
        return Err(Error::InvalidParameter(format!(
            "max size must be in 1..={ORACLE_MAX_SIDE}"
        )));
    }
    let mut report = OracleReport::default();
    let mut record = |grid: ValueGrid, corrupt: bool| -> Result<()> {
        if let Some(reason) = check_grid(&grid, corrupt)? {
            report.mismatches.push(OracleMismatch { grid, reason });
        }
        Ok(())
    };
    let mut first = true;
    let alphabet = [0.0, 1.0, 2.0];
    for (h, w) in [(2, 2), (2, 3)] {
        for grid in exhaustive_grids(h, w, &alphabet) {
            record(grid, cfg.inject_fault && first)?;
            first = false;
            report.exhaustive_checked += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.trials {
        let grid = random_grid(&mut rng, cfg.max_size);
        record(grid, false)?;
        report.random_checked += 1;
    }
    Ok(report)
}
