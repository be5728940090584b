//! Geometry of the triangular region: coordinates, cyclic neighborhoods,
//! boundary, columns and the left-to-right, top-to-bottom vertex ordering.
//!
//! A vertex is `(col, row)` with `1 <= row <= col <= n`. Column 1 holds the
//! single leftmost corner and column `n` is the vertical right edge.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("side length must be at least 3, got {0}")]
    TooSmall(usize),
    #[error("side length {0} is too large (at most {max})", max = MAX_SIDE)]
    TooLarge(usize),
    #[error("vertex ({col},{row}) is not in the region of side {n}")]
    NotInRegion { col: usize, row: usize, n: usize },
}

/// Largest supported side length. Labels are addressed by `u16` ids.
pub const MAX_SIDE: usize = 300;

/// Ordering follows `ordering_index`: column first, then row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub col: usize,
    pub row: usize,
}

impl Vertex {
    pub const fn new(col: usize, row: usize) -> Self {
        Vertex { col, row }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.col, self.row)
    }
}

/// 1-based position in the left-to-right, top-to-bottom order.
pub fn ordering_index(v: Vertex) -> usize {
    v.col * (v.col - 1) / 2 + v.row
}

/// The six lattice directions, indexed in clockwise slot order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    Up = 0,
    UpperRight = 1,
    LowerRight = 2,
    Down = 3,
    LowerLeft = 4,
    UpperLeft = 5,
}

impl Direction {
    pub const ALL: [Direction; 6] = [
        Direction::Up,
        Direction::UpperRight,
        Direction::LowerRight,
        Direction::Down,
        Direction::LowerLeft,
        Direction::UpperLeft,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Direction {
        Direction::ALL[i % 6]
    }

    pub fn opposite(self) -> Direction {
        Direction::from_index(self.index() + 3)
    }

    /// Offset `(dcol, drow)`.
    pub fn offset(self) -> (isize, isize) {
        match self {
            Direction::Up => (0, -1),
            Direction::UpperRight => (1, 0),
            Direction::LowerRight => (1, 1),
            Direction::Down => (0, 1),
            Direction::LowerLeft => (-1, 0),
            Direction::UpperLeft => (-1, -1),
        }
    }
}

/// Content of one neighbor position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    In(Vertex),
    Outside,
}

impl Slot {
    pub fn vertex(self) -> Option<Vertex> {
        match self {
            Slot::In(v) => Some(v),
            Slot::Outside => None,
        }
    }
}

/// Vertex ids are `ordering_index - 1`.
pub type VId = usize;

/// Sentinel for an out-of-region slot in the id tables.
pub const OUTSIDE: u16 = u16::MAX;

/// The triangle of side `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriRegion {
    n: usize,
    verts: Vec<Vertex>,
    nbr: Vec<[u16; 6]>,
    on_boundary: Vec<bool>,
}

pub fn build_region(n: usize) -> Result<TriRegion, LatticeError> {
    TriRegion::new(n)
}

impl TriRegion {
    pub fn new(n: usize) -> Result<Self, LatticeError> {
        if n < 3 {
            return Err(LatticeError::TooSmall(n));
        }
        if n > MAX_SIDE {
            return Err(LatticeError::TooLarge(n));
        }
        let mut verts = Vec::with_capacity(n * (n + 1) / 2);
        for col in 1..=n {
            for row in 1..=col {
                verts.push(Vertex { col, row });
            }
        }
        let contains = |c: isize, r: isize| c >= 1 && r >= 1 && r <= c && c <= n as isize;
        let mut nbr = Vec::with_capacity(verts.len());
        let mut on_boundary = Vec::with_capacity(verts.len());
        for v in &verts {
            let mut slots = [OUTSIDE; 6];
            for d in Direction::ALL {
                let (dc, dr) = d.offset();
                let (c, r) = (v.col as isize + dc, v.row as isize + dr);
                if contains(c, r) {
                    slots[d.index()] = (ordering_index(Vertex::new(c as usize, r as usize)) - 1) as u16;
                }
            }
            on_boundary.push(slots.contains(&OUTSIDE));
            nbr.push(slots);
        }
        Ok(TriRegion { n, verts, nbr, on_boundary })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v.row >= 1 && v.row <= v.col && v.col <= self.n
    }

    pub fn check(&self, v: Vertex) -> Result<VId, LatticeError> {
        if self.contains(v) {
            Ok(self.id(v))
        } else {
            Err(LatticeError::NotInRegion { col: v.col, row: v.row, n: self.n })
        }
    }

    /// Id of an in-region vertex. Panics on out-of-region input in debug builds.
    pub fn id(&self, v: Vertex) -> VId {
        debug_assert!(self.contains(v), "{v} outside region");
        ordering_index(v) - 1
    }

    pub fn vertex(&self, id: VId) -> Vertex {
        self.verts[id]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.verts
    }

    /// Raw slot table for id-based code; `OUTSIDE` marks missing neighbors.
    pub fn slots(&self, id: VId) -> &[u16; 6] {
        &self.nbr[id]
    }

    pub fn slot(&self, id: VId, d: Direction) -> Option<VId> {
        let s = self.nbr[id][d.index()];
        (s != OUTSIDE).then_some(s as VId)
    }

    /// In-region neighbor ids in slot order.
    pub fn neighbor_ids(&self, id: VId) -> impl Iterator<Item = VId> + '_ {
        self.nbr[id].iter().filter(|&&s| s != OUTSIDE).map(|&s| s as VId)
    }

    pub fn neighbors_cyclic(&self, v: Vertex) -> [Slot; 6] {
        let id = self.id(v);
        let mut out = [Slot::Outside; 6];
        for (k, &s) in self.nbr[id].iter().enumerate() {
            if s != OUTSIDE {
                out[k] = Slot::In(self.verts[s as usize]);
            }
        }
        out
    }

    pub fn line_step(&self, v: Vertex, d: Direction) -> Slot {
        let (dc, dr) = d.offset();
        let (c, r) = (v.col as isize + dc, v.row as isize + dr);
        if c >= 1 && r >= 1 && r <= c && c <= self.n as isize {
            Slot::In(Vertex::new(c as usize, r as usize))
        } else {
            Slot::Outside
        }
    }

    pub fn is_boundary(&self, id: VId) -> bool {
        self.on_boundary[id]
    }

    pub fn boundary(&self) -> Vec<Vertex> {
        self.verts.iter().copied().filter(|&v| self.on_boundary[self.id(v)]).collect()
    }

    /// Boundary vertices in cyclic order starting at `(1,1)`, going along the
    /// top edge, down the right edge and back along the bottom edge.
    pub fn boundary_cycle(&self) -> Vec<VId> {
        let n = self.n;
        let mut out = Vec::with_capacity(3 * (n - 1));
        for c in 1..=n {
            out.push(self.id(Vertex::new(c, 1)));
        }
        for r in 2..=n {
            out.push(self.id(Vertex::new(n, r)));
        }
        for c in (2..n).rev() {
            out.push(self.id(Vertex::new(c, c)));
        }
        out
    }

    pub fn column(&self, i: usize) -> Vec<Vertex> {
        if i == 0 || i > self.n {
            return Vec::new();
        }
        (1..=i).map(|r| Vertex::new(i, r)).collect()
    }

    pub fn corners(&self) -> [Vertex; 3] {
        [Vertex::new(1, 1), Vertex::new(self.n, 1), Vertex::new(self.n, self.n)]
    }

    pub fn corner_ids(&self) -> [VId; 3] {
        self.corners().map(|v| self.id(v))
    }

    /// Slot index of `u` in `v`'s neighborhood, if adjacent.
    pub fn direction_to(&self, v: VId, u: VId) -> Option<Direction> {
        self.nbr[v].iter().position(|&s| s as usize == u && s != OUTSIDE).map(Direction::from_index)
    }

    pub fn adjacent(&self, a: VId, b: VId) -> bool {
        self.direction_to(a, b).is_some()
    }

    /// The (at most two) in-region vertices adjacent to both `a` and `b`.
    pub fn common_neighbors(&self, a: VId, b: VId) -> Vec<VId> {
        self.neighbor_ids(a).filter(|&x| self.adjacent(x, b)).collect()
    }
}

/// One of the six automorphisms of the triangle, acting on the barycentric
/// coordinates `(n-col, row-1, col-row)` by permutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Symmetry {
    /// New coordinate `k` takes old coordinate `perm[k]`.
    perm: [u8; 3],
}

impl Symmetry {
    pub const IDENTITY: Symmetry = Symmetry { perm: [0, 1, 2] };

    pub fn all() -> [Symmetry; 6] {
        [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]].map(|perm| Symmetry { perm })
    }

    /// The reflection that swaps the top and bottom edges and fixes `(1,1)`.
    pub fn mirror() -> Symmetry {
        Symmetry { perm: [0, 2, 1] }
    }

    pub fn inverse(self) -> Symmetry {
        let mut inv = [0u8; 3];
        for (k, &p) in self.perm.iter().enumerate() {
            inv[p as usize] = k as u8;
        }
        Symmetry { perm: inv }
    }

    pub fn is_identity(self) -> bool {
        self == Symmetry::IDENTITY
    }

    pub fn apply(self, n: usize, v: Vertex) -> Vertex {
        let bary = [n - v.col, v.row - 1, v.col - v.row];
        let b = [bary[self.perm[0] as usize], bary[self.perm[1] as usize], bary[self.perm[2] as usize]];
        Vertex::new(n - b[0], b[1] + 1)
    }

    /// The symmetry that sends `corner` to `(1,1)`.
    pub fn corner_to_origin(n: usize, corner: Vertex) -> Symmetry {
        let target = Vertex::new(1, 1);
        for s in Symmetry::all() {
            if s.apply(n, corner) == target {
                return s;
            }
        }
        unreachable!("{corner} is not a corner")
    }

    /// Permutation of ids induced on `region`.
    pub fn id_map(self, region: &TriRegion) -> Vec<VId> {
        region.vertices().iter().map(|&v| region.id(self.apply(region.n(), v))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_boundary() {
        let r = build_region(8).unwrap();
        assert_eq!(r.len(), 36);
        assert_eq!(r.boundary().len(), 21);
        assert_eq!(build_region(3).unwrap().len(), 6);
        assert_eq!(build_region(2), Err(LatticeError::TooSmall(2)));
        assert_eq!(r.boundary_cycle().len(), 21);
    }

    #[test]
    fn slots_of_interior_and_corner() {
        let r = build_region(5).unwrap();
        let got: Vec<_> = r.neighbors_cyclic(Vertex::new(3, 2)).iter().map(|s| s.vertex().unwrap()).collect();
        let want = [(3, 1), (4, 2), (4, 3), (3, 3), (2, 2), (2, 1)].map(|(c, r)| Vertex::new(c, r));
        assert_eq!(got, want);

        let corner = r.neighbors_cyclic(Vertex::new(1, 1));
        let inside: Vec<_> = corner.iter().filter_map(|s| s.vertex()).collect();
        assert_eq!(inside, vec![Vertex::new(2, 1), Vertex::new(2, 2)]);

        let edge = r.neighbors_cyclic(Vertex::new(5, 3));
        let outside: Vec<_> = (0..6).filter(|&k| edge[k] == Slot::Outside).collect();
        assert_eq!(outside, vec![1, 2]);
    }

    #[test]
    fn ordering_and_steps() {
        assert_eq!(ordering_index(Vertex::new(3, 2)), 5);
        let r = build_region(5).unwrap();
        assert_eq!(r.line_step(Vertex::new(3, 2), Direction::Down), Slot::In(Vertex::new(3, 3)));
        assert_eq!(r.line_step(Vertex::new(3, 3), Direction::Down), Slot::Outside);
        assert_eq!(r.corners(), [Vertex::new(1, 1), Vertex::new(5, 1), Vertex::new(5, 5)]);
    }

    #[test]
    fn symmetries_are_automorphisms() {
        let r = build_region(6).unwrap();
        for s in Symmetry::all() {
            let map = s.id_map(&r);
            let mut seen = vec![false; r.len()];
            for &m in &map {
                assert!(!seen[m]);
                seen[m] = true;
            }
            for a in 0..r.len() {
                for b in r.neighbor_ids(a) {
                    assert!(r.adjacent(map[a], map[b]));
                }
                assert_eq!(r.is_boundary(a), r.is_boundary(map[a]));
            }
            let inv = s.inverse();
            for &v in r.vertices() {
                assert_eq!(inv.apply(6, s.apply(6, v)), v);
            }
        }
        for c in r.corners() {
            assert_eq!(Symmetry::corner_to_origin(6, c).apply(6, c), Vertex::new(1, 1));
        }
    }
}
