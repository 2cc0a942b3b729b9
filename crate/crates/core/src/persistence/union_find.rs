//! Disjoint sets over pixels, each root carrying the birth of its component.

#[derive(Clone, Debug)]
pub(crate) struct BirthUnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
    /// Birth value of the component; meaningful on roots only.
    birth: Vec<f64>,
    /// Pixel that created the component; meaningful on roots only.
    birth_pixel: Vec<u32>,
}

impl BirthUnionFind {
    pub(crate) fn new(births: &[f64]) -> Self {
        let n = births.len();
        Self {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
            birth: births.to_vec(),
            birth_pixel: (0..n as u32).collect(),
        }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] as usize != root {
            root = self.parent[root] as usize;
        }
        let mut node = x;
        while self.parent[node] as usize != root {
            let next = self.parent[node] as usize;
            self.parent[node] = root as u32;
            node = next;
        }
        root
    }

    #[inline]
    pub(crate) fn birth(&self, root: usize) -> f64 {
        self.birth[root]
    }

    #[inline]
    pub(crate) fn birth_pixel(&self, root: usize) -> usize {
        self.birth_pixel[root] as usize
    }

    /// Links two distinct roots by rank; the merged root inherits the birth of
    /// `survivor` (one of `a`, `b`).
    pub(crate) fn union(&mut self, a: usize, b: usize, survivor: usize) {
        debug_assert!(a != b && (survivor == a || survivor == b));
        let (birth, pixel) = (self.birth[survivor], self.birth_pixel[survivor]);
        let (hi, lo) = if self.rank[a] >= self.rank[b] { (a, b) } else { (b, a) };
        self.parent[lo] = hi as u32;
        if self.rank[hi] == self.rank[lo] {
            self.rank[hi] = self.rank[hi].saturating_add(1);
        }
        self.birth[hi] = birth;
        self.birth_pixel[hi] = pixel;
    }
}
