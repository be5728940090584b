//! Three-district partitions of the triangle and their structural predicates.

use crate::lattice::{TriRegion, VId, Vertex, OUTSIDE};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// District label, 1, 2 or 3.
pub type District = u8;

pub const DISTRICTS: [District; 3] = [1, 2, 3];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("label array has length {got}, region has {want} vertices")]
    WrongLength { got: usize, want: usize },
    #[error("label {label} at position {index} is not a district (1, 2 or 3)")]
    BadLabel { index: usize, label: u8 },
    #[error("size targets sum to {sum}, region has {want} vertices")]
    TargetSum { sum: usize, want: usize },
    #[error("target k{district} = {k} is below the side length {n}")]
    TargetTooSmall { district: District, k: usize, n: usize },
    #[error("{0:?} is not a permutation of 1, 2, 3")]
    BadPerm([District; 3]),
    #[error("case dispatch matched {0:?}; exactly one case must hold")]
    Dispatch(Vec<RebalanceCase>),
    #[error("corner (1,1) is not in district 1")]
    CornerNotInFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SizeTargets {
    pub k: [usize; 3],
}

impl SizeTargets {
    pub fn new(k1: usize, k2: usize, k3: usize) -> Self {
        SizeTargets { k: [k1, k2, k3] }
    }

    pub fn get(&self, d: District) -> usize {
        self.k[d as usize - 1]
    }

    pub fn total(&self) -> usize {
        self.k.iter().sum()
    }

    pub fn check(&self, region: &TriRegion) -> Result<(), PartitionError> {
        if self.total() != region.len() {
            return Err(PartitionError::TargetSum { sum: self.total(), want: region.len() });
        }
        Ok(())
    }

    /// The extra requirement of the constructive procedures.
    pub fn check_constructive(&self, region: &TriRegion) -> Result<(), PartitionError> {
        self.check(region)?;
        for d in DISTRICTS {
            if self.get(d) < region.n() {
                return Err(PartitionError::TargetTooSmall { district: d, k: self.get(d), n: region.n() });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BalanceClass {
    Balanced,
    NearlyBalanced,
    OutsideOmega,
}

impl BalanceClass {
    pub fn in_omega(self) -> bool {
        self != BalanceClass::OutsideOmega
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidityReport {
    pub sizes: [usize; 3],
    pub simply_connected: [bool; 3],
    pub in_window: [bool; 3],
}

impl ValidityReport {
    pub fn valid(&self) -> bool {
        self.simply_connected.iter().all(|&b| b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RebalanceCase {
    A,
    B,
    C,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chirality {
    Clockwise,
    CounterClockwise,
}

/// A lattice face whose three vertices lie in three different districts.
/// `vertices` are listed clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TricolorTriangle {
    pub vertices: [Vertex; 3],
    pub chirality: Chirality,
}

#[derive(Clone)]
pub struct Partition {
    region: Arc<TriRegion>,
    labels: Vec<District>,
    targets: SizeTargets,
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        self.region.n() == other.region.n() && self.targets == other.targets && self.labels == other.labels
    }
}

impl Eq for Partition {}

impl std::hash::Hash for Partition {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.region.n().hash(state);
        self.labels.hash(state);
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition(n={}, k={:?}, ", self.region.n(), self.targets.k)?;
        for &l in &self.labels {
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Partition {
    /// One line per row, columns left to right; blanks where the row
    /// does not reach a column.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.region.n();
        for row in 1..=n {
            let line: String = (1..=n)
                .map(|col| if row <= col { (b'0' + self.label(Vertex::new(col, row))) as char } else { ' ' })
                .collect();
            writeln!(f, "{}", line.trim_end())?;
        }
        Ok(())
    }
}

impl Partition {
    pub fn new(region: Arc<TriRegion>, labels: Vec<District>, targets: SizeTargets) -> Result<Self, PartitionError> {
        if labels.len() != region.len() {
            return Err(PartitionError::WrongLength { got: labels.len(), want: region.len() });
        }
        if let Some((index, &label)) = labels.iter().enumerate().find(|(_, &l)| !(1..=3).contains(&l)) {
            return Err(PartitionError::BadLabel { index, label });
        }
        targets.check(&region)?;
        Ok(Partition { region, labels, targets })
    }

    /// Same region and targets, new labels. Caller guarantees well-formed labels.
    pub(crate) fn with_labels(&self, labels: Vec<District>) -> Partition {
        debug_assert_eq!(labels.len(), self.labels.len());
        Partition { region: self.region.clone(), labels, targets: self.targets }
    }

    pub fn region(&self) -> &TriRegion {
        &self.region
    }

    pub fn region_arc(&self) -> &Arc<TriRegion> {
        &self.region
    }

    pub fn targets(&self) -> SizeTargets {
        self.targets
    }

    pub fn labels(&self) -> &[District] {
        &self.labels
    }

    pub(crate) fn labels_mut(&mut self) -> &mut Vec<District> {
        &mut self.labels
    }

    pub fn label(&self, v: Vertex) -> District {
        self.labels[self.region.id(v)]
    }

    pub fn label_of(&self, id: VId) -> District {
        self.labels[id]
    }

    pub fn size(&self, d: District) -> usize {
        self.labels.iter().filter(|&&l| l == d).count()
    }

    pub fn sizes(&self) -> [usize; 3] {
        let mut s = [0; 3];
        for &l in &self.labels {
            s[l as usize - 1] += 1;
        }
        s
    }

    pub fn district(&self, d: District) -> Vec<Vertex> {
        self.district_ids(d).into_iter().map(|i| self.region.vertex(i)).collect()
    }

    pub fn district_ids(&self, d: District) -> Vec<VId> {
        (0..self.labels.len()).filter(|&i| self.labels[i] == d).collect()
    }

    /// Relabel districts: old label `l` becomes `map[l-1]`.
    pub fn relabeled(&self, map: [District; 3]) -> Partition {
        self.with_labels(self.labels.iter().map(|&l| map[l as usize - 1]).collect())
    }

    /// Labels as a compact digit string in ordering order.
    pub fn label_string(&self) -> String {
        self.labels.iter().map(|&l| (b'0' + l) as char).collect()
    }
}

// ---------------------------------------------------------------------------
// Connectivity primitives on membership masks.

/// Connected components of `member` in id order of their smallest vertex.
pub(crate) fn components(region: &TriRegion, member: &[bool]) -> Vec<Vec<VId>> {
    let mut seen = vec![false; member.len()];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in 0..member.len() {
        if !member[start] || seen[start] {
            continue;
        }
        let mut comp = Vec::new();
        seen[start] = true;
        stack.push(start);
        while let Some(v) = stack.pop() {
            comp.push(v);
            for u in region.neighbor_ids(v) {
                if member[u] && !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Nonempty, connected, and every non-member reaches the outside through
/// non-members.
pub(crate) fn simply_connected_mask(region: &TriRegion, member: &[bool]) -> bool {
    let total = member.iter().filter(|&&m| m).count();
    let Some(first) = member.iter().position(|&m| m) else {
        return false;
    };
    let mut seen = vec![false; member.len()];
    let mut stack = vec![first];
    seen[first] = true;
    let mut count = 0;
    while let Some(v) = stack.pop() {
        count += 1;
        for u in region.neighbor_ids(v) {
            if member[u] && !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    if count != total {
        return false;
    }
    let outside_total = member.len() - total;
    let mut reached = 0;
    for v in 0..member.len() {
        if !member[v] && region.is_boundary(v) {
            seen[v] = true;
            stack.push(v);
        }
    }
    while let Some(v) = stack.pop() {
        reached += 1;
        for u in region.neighbor_ids(v) {
            if !member[u] && !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    reached == outside_total
}

pub(crate) fn district_simply_connected(region: &TriRegion, labels: &[District], d: District) -> bool {
    let member: Vec<bool> = labels.iter().map(|&l| l == d).collect();
    simply_connected_mask(region, &member)
}

/// Bit `k` set when slot `k` of `v` is in district `d`.
pub(crate) fn nbhd_mask(region: &TriRegion, labels: &[District], v: VId, d: District) -> u8 {
    let mut mask = 0u8;
    for (k, &s) in region.slots(v).iter().enumerate() {
        if s != OUTSIDE && labels[s as usize] == d {
            mask |= 1 << k;
        }
    }
    mask
}

/// A slot mask is connected when its set bits form one cyclic arc.
pub(crate) fn arc_connected(mask: u8) -> bool {
    let prev = ((mask << 1) | (mask >> 5)) & 0x3f;
    (mask & !prev).count_ones() <= 1
}

pub(crate) fn nbhd_connected(region: &TriRegion, labels: &[District], v: VId, d: District) -> bool {
    arc_connected(nbhd_mask(region, labels, v, d))
}

// ---------------------------------------------------------------------------
// Public predicates.

pub fn is_simply_connected(region: &TriRegion, vset: &[Vertex]) -> bool {
    let mut member = vec![false; region.len()];
    for &v in vset {
        if !region.contains(v) {
            return false;
        }
        member[region.id(v)] = true;
    }
    simply_connected_mask(region, &member)
}

pub fn validity(p: &Partition) -> ValidityReport {
    let sizes = p.sizes();
    let mut simply_connected = [false; 3];
    let mut in_window = [false; 3];
    for d in DISTRICTS {
        let i = d as usize - 1;
        simply_connected[i] = district_simply_connected(p.region(), p.labels(), d);
        let k = p.targets.get(d);
        in_window[i] = sizes[i] + 1 >= k && sizes[i] <= k + 1;
    }
    ValidityReport { sizes, simply_connected, in_window }
}

pub fn classify(p: &Partition) -> (BalanceClass, ValidityReport) {
    let report = validity(p);
    let class = if !report.valid() || !report.in_window.iter().all(|&b| b) {
        BalanceClass::OutsideOmega
    } else if (0..3).all(|i| report.sizes[i] == p.targets.k[i]) {
        BalanceClass::Balanced
    } else {
        BalanceClass::NearlyBalanced
    };
    (class, report)
}

pub fn balance_class(p: &Partition) -> BalanceClass {
    classify(p).0
}

pub fn d_neighborhood(p: &Partition, v: Vertex, d: District) -> (Vec<Vertex>, bool) {
    let id = p.region().id(v);
    let set = p.region().neighbor_ids(id).filter(|&u| p.labels[u] == d).map(|u| p.region().vertex(u)).collect();
    (set, nbhd_connected(p.region(), p.labels(), id, d))
}

pub fn is_cut_vertex(p: &Partition, v: Vertex) -> bool {
    let id = p.region().id(v);
    !nbhd_connected(p.region(), p.labels(), id, p.labels[id])
}

pub(crate) fn is_exposed_id(p: &Partition, v: VId) -> bool {
    let d = p.labels[v];
    p.region().neighbor_ids(v).any(|u| p.labels[u] != d)
}

pub fn exposed_vertices(p: &Partition, d: District) -> Vec<Vertex> {
    (0..p.labels.len())
        .filter(|&v| p.labels[v] == d && is_exposed_id(p, v))
        .map(|v| p.region().vertex(v))
        .collect()
}

/// All lattice faces, each listed clockwise.
pub(crate) fn faces(region: &TriRegion) -> Vec<[VId; 3]> {
    use crate::lattice::Direction::*;
    let mut out = Vec::new();
    for v in 0..region.len() {
        if let (Some(a), Some(b)) = (region.slot(v, UpperRight), region.slot(v, LowerRight)) {
            out.push([v, a, b]);
        }
        if let (Some(a), Some(b)) = (region.slot(v, LowerRight), region.slot(v, Down)) {
            out.push([v, a, b]);
        }
    }
    out
}

pub fn tricolor_triangles(p: &Partition) -> Vec<TricolorTriangle> {
    let mut out = Vec::new();
    for f in faces(p.region()) {
        let l = f.map(|v| p.labels[v]);
        if l[0] == l[1] || l[1] == l[2] || l[0] == l[2] {
            continue;
        }
        let rot = [[1, 2, 3], [2, 3, 1], [3, 1, 2]];
        let chirality = if rot.contains(&l) { Chirality::Clockwise } else { Chirality::CounterClockwise };
        out.push(TricolorTriangle { vertices: f.map(|v| p.region().vertex(v)), chirality });
    }
    out
}

pub(crate) fn touches_boundary(p: &Partition, d: District) -> bool {
    (0..p.labels.len()).any(|v| p.labels[v] == d && p.region().is_boundary(v))
}

pub(crate) fn districts_adjacent(p: &Partition, a: District, b: District) -> bool {
    (0..p.labels.len())
        .any(|v| p.labels[v] == a && p.region().neighbor_ids(v).any(|u| p.labels[u] == b))
}

/// Consecutive boundary vertices `(a, b)` with `a` in district `da` and `b`
/// in district `db`, in boundary-cycle order.
pub(crate) fn boundary_pairs(p: &Partition, da: District, db: District) -> Vec<(VId, VId)> {
    let cyc = p.region().boundary_cycle();
    let m = cyc.len();
    let mut out = Vec::new();
    for k in 0..m {
        let (x, y) = (cyc[k], cyc[(k + 1) % m]);
        if p.labels[x] == da && p.labels[y] == db {
            out.push((x, y));
        }
        if p.labels[y] == da && p.labels[x] == db {
            out.push((y, x));
        }
    }
    out
}

/// Which of the four rebalancing cases holds. Requires `(1,1)` in district 1.
pub fn case_dispatch(p: &Partition) -> Result<RebalanceCase, PartitionError> {
    if p.labels[0] != 1 {
        return Err(PartitionError::CornerNotInFirst);
    }
    let mut hits = Vec::new();
    if !boundary_pairs(p, 2, 3).is_empty() {
        hits.push(RebalanceCase::A);
    }
    if !touches_boundary(p, 2) {
        hits.push(RebalanceCase::B);
    }
    if !touches_boundary(p, 3) {
        hits.push(RebalanceCase::C);
    }
    if !districts_adjacent(p, 2, 3) {
        hits.push(RebalanceCase::D);
    }
    if hits.len() == 1 {
        Ok(hits[0])
    } else {
        Err(PartitionError::Dispatch(hits))
    }
}

pub fn check_perm(perm: [District; 3]) -> Result<(), PartitionError> {
    let mut s = perm;
    s.sort_unstable();
    if s == [1, 2, 3] {
        Ok(())
    } else {
        Err(PartitionError::BadPerm(perm))
    }
}

/// Parse "123"-style permutations.
pub fn parse_perm(s: &str) -> Option<[District; 3]> {
    let b = s.as_bytes();
    if b.len() != 3 {
        return None;
    }
    let perm = [b[0].wrapping_sub(b'0'), b[1].wrapping_sub(b'0'), b[2].wrapping_sub(b'0')];
    check_perm(perm).ok().map(|_| perm)
}

/// Ordering blocks of sizes `k[perm[0]], k[perm[1]], k[perm[2]]`.
pub fn ground_state(region: Arc<TriRegion>, targets: SizeTargets, perm: [District; 3]) -> Result<Partition, PartitionError> {
    check_perm(perm)?;
    targets.check_constructive(&region)?;
    let mut labels = Vec::with_capacity(region.len());
    for d in perm {
        labels.extend(std::iter::repeat_n(d, targets.get(d)));
    }
    Partition::new(region, labels, targets)
}

pub const ALL_PERMS: [[District; 3]; 6] = [[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_region;

    fn v(c: usize, r: usize) -> Vertex {
        Vertex::new(c, r)
    }

    fn ground5() -> Partition {
        ground_state(Arc::new(build_region(5).unwrap()), SizeTargets::new(5, 5, 5), [1, 2, 3]).unwrap()
    }

    #[test]
    fn simple_connectivity_examples() {
        let r = build_region(5).unwrap();
        assert!(is_simply_connected(&r, &r.column(5)));
        let ring: Vec<_> = r.neighbors_cyclic(v(3, 2)).iter().filter_map(|s| s.vertex()).collect();
        assert!(!is_simply_connected(&r, &ring));
        assert!(!is_simply_connected(&r, &[v(1, 1), v(3, 1)]));
        assert!(!is_simply_connected(&r, &[]));
    }

    #[test]
    fn arc_masks() {
        assert!(arc_connected(0));
        assert!(arc_connected(0x3f));
        assert!(arc_connected(0b100001));
        assert!(arc_connected(0b000110));
        assert!(!arc_connected(0b000101));
        assert!(!arc_connected(0b010010));
    }

    #[test]
    fn ground_state_layout() {
        let p = ground5();
        assert_eq!(p.district(1), vec![v(1, 1), v(2, 1), v(2, 2), v(3, 1), v(3, 2)]);
        assert_eq!(balance_class(&p), BalanceClass::Balanced);

        let r8 = Arc::new(build_region(8).unwrap());
        let g8 = ground_state(r8.clone(), SizeTargets::new(12, 12, 12), [1, 2, 3]).unwrap();
        let mut want: Vec<Vertex> = (1..=4).flat_map(|c| r8.column(c)).collect();
        want.extend([v(5, 1), v(5, 2)]);
        assert_eq!(g8.district(1), want);
        assert_eq!(balance_class(&g8), BalanceClass::Balanced);
        for perm in ALL_PERMS {
            let g = ground_state(r8.clone(), SizeTargets::new(12, 12, 12), perm).unwrap();
            assert_eq!(balance_class(&g), BalanceClass::Balanced);
        }
        assert!(ground_state(r8, SizeTargets::new(4, 16, 16), [1, 2, 3]).is_err());
    }

    #[test]
    fn neighborhoods_of_ground_state() {
        let p = ground5();
        let (set, conn) = d_neighborhood(&p, v(3, 2), 1);
        assert_eq!(set, vec![v(3, 1), v(2, 2), v(2, 1)]);
        assert!(conn);
        let (set, conn) = d_neighborhood(&p, v(3, 2), 2);
        assert_eq!(set, vec![v(4, 2), v(4, 3), v(3, 3)]);
        assert!(conn);
        assert!(!is_cut_vertex(&p, v(3, 3)));
        let (empty, conn) = d_neighborhood(&p, v(1, 1), 3);
        assert!(empty.is_empty() && conn);
    }

    #[test]
    fn flipped_ground_state_is_nearly_balanced() {
        let p = ground5();
        let mut labels = p.labels().to_vec();
        labels[p.region().id(v(3, 2))] = 2;
        let q = p.with_labels(labels);
        let (class, report) = classify(&q);
        assert_eq!(report.sizes, [4, 6, 5]);
        assert_eq!(class, BalanceClass::NearlyBalanced);
    }

    #[test]
    fn exposed_and_tricolor_and_dispatch() {
        let p = ground5();
        let exposed = exposed_vertices(&p, 3);
        let want: Vec<Vertex> = p
            .district(3)
            .into_iter()
            .filter(|&x| p.region().neighbors_cyclic(x).iter().any(|s| s.vertex().is_some_and(|u| u.col == 4)))
            .collect();
        assert_eq!(exposed, want);
        assert!(tricolor_triangles(&p).is_empty());
        assert_eq!(case_dispatch(&p), Ok(RebalanceCase::A));
        let pairs = boundary_pairs(&p, 2, 3);
        let r = p.region();
        assert!(pairs.contains(&(r.id(v(4, 1)), r.id(v(5, 1)))));
    }

    #[test]
    fn display_rows() {
        let p = ground5();
        let s = p.to_string();
        assert_eq!(s.lines().next().unwrap(), "11123");
        assert_eq!(s.lines().last().unwrap(), "    3");
    }
}
