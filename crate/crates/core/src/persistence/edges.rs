//! Edge enumeration over a (padded) pixel grid.

use super::HomologyDim;
use crate::grid::ValueGrid;

/// Row/column offsets of the 4-neighbourhood.
pub const PRIMAL_OFFSETS: [(isize, isize); 2] = [(1, 0), (0, 1)];
/// 4-neighbourhood plus both diagonals.
pub const DUAL_OFFSETS: [(isize, isize); 4] = [(1, 0), (0, 1), (1, 1), (1, -1)];

pub fn offsets(dim: HomologyDim) -> &'static [(isize, isize)] {
    match dim {
        HomologyDim::Zero => &PRIMAL_OFFSETS,
        HomologyDim::One => &DUAL_OFFSETS,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    /// `max` of the two endpoint values.
    pub value: f64,
    /// `pixel * num_offsets + offset_index`.
    pub index: u32,
}

/// Edges sorted by value descending, ties by ascending linear index.
#[derive(Clone, Debug)]
pub struct SortedEdgeList {
    width: usize,
    dim: HomologyDim,
    edges: Vec<Edge>,
}

impl SortedEdgeList {
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn dim(&self) -> HomologyDim {
        self.dim
    }

    /// Linear pixel indices of both endpoints.
    #[inline]
    pub fn endpoints(&self, edge: Edge) -> (usize, usize) {
        let k = offsets(self.dim).len();
        let pixel = edge.index as usize / k;
        let (dr, dc) = offsets(self.dim)[edge.index as usize % k];
        let (r, c) = (pixel / self.width, pixel % self.width);
        let other = (r as isize + dr) as usize * self.width + (c as isize + dc) as usize;
        (pixel, other)
    }

    /// Randomly reorders edges inside each run of equal values. The order
    /// stays a valid filtration order, so only coordinates may change.
    pub fn shuffle_ties<R: rand::Rng + ?Sized>(&mut self, rng: &mut R) {
        use rand::seq::SliceRandom;
        let mut start = 0;
        while start < self.edges.len() {
            let v = self.edges[start].value;
            let end = start + self.edges[start..].iter().take_while(|e| e.value == v).count();
            self.edges[start..end].shuffle(rng);
            start = end;
        }
    }
}

/// Enumerates every edge `(v, v + o)` for the offsets of `dim`, skipping
/// neighbours outside the grid, and sorts them descending.
pub fn enumerate_sorted_edges(grid: &ValueGrid, dim: HomologyDim) -> SortedEdgeList {
    let (h, w) = grid.shape();
    let offs = offsets(dim);
    let k = offs.len();
    let values = grid.values();
    let mut edges = Vec::with_capacity(h * w * k);
    for r in 0..h {
        for c in 0..w {
            let p = r * w + c;
            for (j, &(dr, dc)) in offs.iter().enumerate() {
                let (nr, nc) = (r as isize + dr, c as isize + dc);
                if nr < 0 || nc < 0 || nr as usize >= h || nc as usize >= w {
                    continue;
                }
                let q = nr as usize * w + nc as usize;
                edges.push(Edge {
                    value: values[p].max(values[q]),
                    index: (p * k + j) as u32,
                });
            }
        }
    }
    edges.sort_unstable_by(|a, b| b.value.total_cmp(&a.value).then(a.index.cmp(&b.index)));
    SortedEdgeList { width: w, dim, edges }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_primal() {
        let g = ValueGrid::from_rows(&[[0.0, 1.0], [2.0, 3.0]]).unwrap();
        let list = enumerate_sorted_edges(&g, HomologyDim::Zero);
        let vals: Vec<f64> = list.edges().iter().map(|e| e.value).collect();
        assert_eq!(vals, vec![3.0, 3.0, 2.0, 1.0]);
        // (0,1)-(1,1) is index 1*2+0 = 2, (1,0)-(1,1) is 2*2+1 = 5
        assert_eq!(list.edges()[0].index, 2);
        assert_eq!(list.edges()[1].index, 5);
        assert_eq!(list.endpoints(list.edges()[0]), (1, 3));
        assert_eq!(list.endpoints(list.edges()[1]), (2, 3));
    }

    #[test]
    fn constant_grid_orders_by_index() {
        let g = ValueGrid::constant(3, 3, 4.0).unwrap();
        let list = enumerate_sorted_edges(&g, HomologyDim::Zero);
        assert_eq!(list.len(), 12);
        assert!(list.edges().windows(2).all(|w| w[0].index < w[1].index));
    }

    #[test]
    fn dual_edges_of_three_by_three_match_neighbour_scan() {
        let g = ValueGrid::from_rows(&[[5.0, 1.0, 7.0], [2.0, 9.0, 3.0], [8.0, 0.0, 4.0]]).unwrap();
        let list = enumerate_sorted_edges(&g, HomologyDim::One);
        assert_eq!(list.len(), 20);
        let mut expected = Vec::new();
        for r in 0..3i32 {
            for c in 0..3i32 {
                for dr in -1..=1i32 {
                    for dc in -1..=1i32 {
                        let (nr, nc) = (r + dr, c + dc);
                        if (dr, dc) == (0, 0) || !(0..3).contains(&nr) || !(0..3).contains(&nc) {
                            continue;
                        }
                        if (r, c) < (nr, nc) {
                            expected.push(g.get(r as usize, c as usize).max(g.get(nr as usize, nc as usize)));
                        }
                    }
                }
            }
        }
        expected.sort_by(|a, b| b.total_cmp(a));
        let got: Vec<f64> = list.edges().iter().map(|e| e.value).collect();
        assert_eq!(got, expected);
        for e in list.edges() {
            let (a, b) = list.endpoints(*e);
            assert_eq!(e.value, g.values()[a].max(g.values()[b]));
        }
    }
}
