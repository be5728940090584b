//! Local geometry used by the case analysis: walks around a vertex, arcs of
//! a district in a neighborhood, district paths and enclosed components.

use crate::lattice::{TriRegion, VId, OUTSIDE};
use crate::partition::District;
use crate::toolkit::{components_without, enclosed, shortest_path, Work};

/// The six slots around `v` starting at `start` (a neighbor) and walking
/// clockwise (`step = 1`) or counterclockwise (`step = 5`).
pub(crate) fn walk(region: &TriRegion, v: VId, start: VId, step: usize) -> [Option<VId>; 6] {
    let slots = region.slots(v);
    let k0 = region.direction_to(v, start).expect("start must be a neighbor").index();
    let mut out = [None; 6];
    for (j, o) in out.iter_mut().enumerate() {
        let s = slots[(k0 + step * j) % 6];
        *o = (s != OUTSIDE).then_some(s as VId);
    }
    out
}

/// Walk direction from `from` that reaches `to` in one step around `v`.
pub(crate) fn step_towards(region: &TriRegion, v: VId, from: VId, to: VId) -> usize {
    let ring = walk(region, v, from, 1);
    if ring[1] == Some(to) {
        1
    } else {
        debug_assert_eq!(walk(region, v, from, 5)[1], Some(to));
        5
    }
}

/// Maximal runs of `v`'s neighbors in district `d`, cyclically. Runs are
/// listed clockwise starting after the first slot outside `d`.
pub(crate) fn arcs(w: &Work, v: VId, d: District) -> Vec<Vec<VId>> {
    let region = w.region();
    let slots = region.slots(v);
    let member = |k: usize| slots[k % 6] != OUTSIDE && w.label(slots[k % 6] as usize) == d;
    let Some(gap) = (0..6).find(|&k| !member(k)) else {
        return vec![slots.iter().map(|&s| s as VId).collect()];
    };
    let mut out: Vec<Vec<VId>> = Vec::new();
    let mut current = Vec::new();
    for k in gap + 1..=gap + 6 {
        if member(k) {
            current.push(slots[k % 6] as VId);
        } else if !current.is_empty() {
            out.push(std::mem::take(&mut current));
        }
    }
    out
}

/// The common neighbor of `a` and `b` in the region other than `not`.
pub(crate) fn other_common(region: &TriRegion, a: VId, b: VId, not: Option<VId>) -> Option<VId> {
    region.common_neighbors(a, b).into_iter().find(|&x| Some(x) != not)
}

/// Shortest path from `from` to `to` whose interior lies in district `d`.
pub(crate) fn district_path(w: &Work, d: District, from: VId, to: VId) -> Option<Vec<VId>> {
    shortest_path(w.region(), &w.mask(d), from, to)
}

/// The component of `d` minus `removed` containing `v`.
pub(crate) fn component_with(w: &Work, d: District, removed: &[VId], v: VId) -> Option<Vec<VId>> {
    components_without(w, d, removed).into_iter().find(|c| c.contains(&v))
}

/// Components of `d` minus `removed` lying entirely inside `cycle`.
pub(crate) fn components_inside(w: &Work, d: District, removed: &[VId], cycle: &[VId]) -> Vec<Vec<VId>> {
    let inside = enclosed(w.region(), cycle);
    components_without(w, d, removed).into_iter().filter(|c| c.iter().all(|&v| inside[v])).collect()
}

pub(crate) fn all_inside(inside: &[bool], set: &[VId]) -> bool {
    set.iter().all(|&v| inside[v])
}

pub(crate) fn any_boundary(region: &TriRegion, set: &[VId]) -> bool {
    set.iter().any(|&v| region.is_boundary(v))
}

/// Breadth-first distances inside `member` from `root`.
pub(crate) fn distances_within(region: &TriRegion, member: &[bool], root: VId) -> Vec<usize> {
    let mut dist = vec![usize::MAX; member.len()];
    let mut queue = std::collections::VecDeque::from([root]);
    dist[root] = 0;
    while let Some(v) = queue.pop_front() {
        for u in region.neighbor_ids(v) {
            if member[u] && dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    dist
}
