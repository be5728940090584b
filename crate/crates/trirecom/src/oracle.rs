//! Brute-force state space: enumerate every valid partition of a small
//! instance and build the recombination graph over them.
//!
//! Works on `u64` vertex masks, so regions are limited to 64 vertices
//! (side length at most 10). Nothing here calls the pathfinder.

use crate::lattice::TriRegion;
use crate::partition::{District, Partition, SizeTargets};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("region has {0} vertices; the oracle supports at most 64")]
    TooLarge(usize),
    #[error("enumeration exceeded the work bound of {0} search nodes")]
    WorkBound(u64),
    #[error("slack must be 0 or 1, got {0}")]
    BadSlack(usize),
    #[error(transparent)]
    Targets(#[from] crate::partition::PartitionError),
}

pub const DEFAULT_WORK_BOUND: u64 = 2_000_000_000;

/// Bitmask view of a region.
#[derive(Debug, Clone)]
struct MaskGeometry {
    adj: Vec<u64>,
    boundary: u64,
    full: u64,
}

impl MaskGeometry {
    fn new(region: &TriRegion) -> Self {
        let n = region.len();
        let adj = (0..n).map(|v| region.neighbor_ids(v).fold(0u64, |m, u| m | (1 << u))).collect();
        let boundary = (0..n).filter(|&v| region.is_boundary(v)).fold(0u64, |m, v| m | (1 << v));
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        MaskGeometry { adj, boundary, full }
    }

    fn spread(&self, mut mask: u64) -> u64 {
        let mut out = 0;
        while mask != 0 {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            out |= self.adj[b];
        }
        out
    }

    /// Closure of `seed` inside `within`.
    fn flood(&self, seed: u64, within: u64) -> u64 {
        let mut reach = seed & within;
        let mut frontier = reach;
        while frontier != 0 {
            let next = self.spread(frontier) & within & !reach;
            reach |= next;
            frontier = next;
        }
        reach
    }

    fn simply_connected(&self, set: u64) -> bool {
        if set == 0 {
            return false;
        }
        let low = set & set.wrapping_neg();
        if self.flood(low, set) != set {
            return false;
        }
        let rest = self.full & !set;
        self.flood(rest & self.boundary, rest) == rest
    }
}

/// Each connected subset of `allowed` with size in `[lo, hi]`, once.
struct ConnectedSubsets<'a> {
    geo: &'a MaskGeometry,
    lo: u32,
    hi: u32,
    nodes: u64,
    bound: u64,
}

impl ConnectedSubsets<'_> {
    fn run(&mut self, allowed: u64, emit: &mut dyn FnMut(u64)) -> Result<(), OracleError> {
        let mut roots = allowed;
        while roots != 0 {
            let r = roots.trailing_zeros();
            roots &= roots - 1;
            // Sets whose smallest vertex is r.
            let above = allowed & !((2u64 << r) - 1);
            let rb = 1u64 << r;
            self.grow(rb, self.geo.adj[r as usize] & above, 0, above, emit)?;
        }
        Ok(())
    }

    fn grow(&mut self, set: u64, ext: u64, forbidden: u64, above: u64, emit: &mut dyn FnMut(u64)) -> Result<(), OracleError> {
        self.nodes += 1;
        if self.nodes > self.bound {
            return Err(OracleError::WorkBound(self.bound));
        }
        let size = set.count_ones();
        if size >= self.lo {
            emit(set);
        }
        if size >= self.hi {
            return Ok(());
        }
        let mut ext = ext;
        let mut forbidden = forbidden;
        while ext != 0 {
            let w = ext.trailing_zeros() as usize;
            let wb = 1u64 << w;
            ext &= !wb;
            let next = (ext | (self.geo.adj[w] & above)) & !set & !forbidden & !wb;
            self.grow(set | wb, next, forbidden, above, emit)?;
            forbidden |= wb;
        }
        Ok(())
    }
}

/// Enumerate every partition into three simply connected districts with
/// `|P_i|` within `slack` of `k_i`. States are in lexicographic order of
/// their district-1 mask, then district-2 mask.
pub fn enumerate_omega(region: &TriRegion, targets: SizeTargets, slack: usize) -> Result<Vec<Partition>, OracleError> {
    enumerate_omega_bounded(region, targets, slack, DEFAULT_WORK_BOUND)
}

pub fn enumerate_omega_bounded(
    region: &TriRegion,
    targets: SizeTargets,
    slack: usize,
    bound: u64,
) -> Result<Vec<Partition>, OracleError> {
    let masks = enumerate_masks(region, targets, slack, bound)?;
    let arc = Arc::new(region.clone());
    Ok(masks.into_iter().map(|m| masks_to_partition(&arc, targets, m)).collect())
}

fn window(k: usize, slack: usize) -> (u32, u32) {
    (k.saturating_sub(slack).max(1) as u32, (k + slack) as u32)
}

fn enumerate_masks(region: &TriRegion, targets: SizeTargets, slack: usize, bound: u64) -> Result<Vec<[u64; 2]>, OracleError> {
    if slack > 1 {
        return Err(OracleError::BadSlack(slack));
    }
    if region.len() > 64 {
        return Err(OracleError::TooLarge(region.len()));
    }
    targets.check(region)?;
    let geo = MaskGeometry::new(region);
    let (lo1, hi1) = window(targets.k[0], slack);
    let (lo2, hi2) = window(targets.k[1], slack);
    let (lo3, hi3) = window(targets.k[2], slack);

    let mut firsts = Vec::new();
    let mut outer = ConnectedSubsets { geo: &geo, lo: lo1, hi: hi1, nodes: 0, bound };
    outer.run(geo.full, &mut |s| {
        if geo.simply_connected(s) {
            firsts.push(s);
        }
    })?;
    firsts.sort_unstable();

    let mut nodes = outer.nodes;
    let mut out = Vec::new();
    for p1 in firsts {
        let rest = geo.full & !p1;
        let mut inner = ConnectedSubsets { geo: &geo, lo: lo2, hi: hi2, nodes, bound };
        let mut seconds = Vec::new();
        inner.run(rest, &mut |s| {
            let p3 = rest & !s;
            let n3 = p3.count_ones();
            if n3 >= lo3 && n3 <= hi3 && geo.simply_connected(s) && geo.simply_connected(p3) {
                seconds.push(s);
            }
        })?;
        nodes = inner.nodes;
        seconds.sort_unstable();
        out.extend(seconds.into_iter().map(|p2| [p1, p2]));
    }
    Ok(out)
}

fn masks_to_partition(region: &Arc<TriRegion>, targets: SizeTargets, m: [u64; 2]) -> Partition {
    let labels = (0..region.len())
        .map(|v| if m[0] >> v & 1 == 1 { 1 } else if m[1] >> v & 1 == 1 { 2 } else { 3 })
        .collect();
    Partition::new(region.clone(), labels, targets).expect("well-formed labels")
}

fn label_mask(labels: &[District], d: District) -> u64 {
    labels.iter().enumerate().filter(|(_, &l)| l == d).fold(0u64, |m, (i, _)| m | (1 << i))
}

/// Ω with recombination adjacency. Two states are adjacent when they share
/// one district exactly, so every district set induces a clique; the graph
/// is stored as those cliques.
#[derive(Debug, Clone)]
pub struct StateGraph {
    states: Vec<Partition>,
    index: HashMap<Vec<District>, u32>,
    /// `groups[g]` lists the states containing one particular district set.
    groups: Vec<Vec<u32>>,
    /// Group ids of each state's three districts.
    member_of: Vec<[u32; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub states: usize,
    pub edges: u64,
    pub components: usize,
    pub min_degree: usize,
    pub max_degree: usize,
    /// States whose only moves are district relabelings.
    pub rigid: usize,
    /// Exact when every state was used as a source.
    pub diameter: Option<usize>,
    /// Largest eccentricity seen over the sampled sources.
    pub max_eccentricity_seen: usize,
    pub min_eccentricity_seen: usize,
    pub sources: usize,
}

pub fn build_state_graph(states: Vec<Partition>) -> StateGraph {
    let mut index = HashMap::with_capacity(states.len());
    let mut group_of: HashMap<(District, u64), u32> = HashMap::new();
    let mut groups: Vec<Vec<u32>> = Vec::new();
    let mut member_of = Vec::with_capacity(states.len());
    for (i, s) in states.iter().enumerate() {
        index.insert(s.labels().to_vec(), i as u32);
        let mut ids = [0u32; 3];
        for d in 1..=3u8 {
            let key = (d, label_mask(s.labels(), d));
            let g = *group_of.entry(key).or_insert_with(|| {
                groups.push(Vec::new());
                (groups.len() - 1) as u32
            });
            groups[g as usize].push(i as u32);
            ids[d as usize - 1] = g;
        }
        member_of.push(ids);
    }
    StateGraph { states, index, groups, member_of }
}

impl StateGraph {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Partition] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &Partition {
        &self.states[i]
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.index.get(p.labels()).map(|&i| i as usize)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.member_of[i].iter().map(|&g| self.groups[g as usize].len() - 1).sum()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.member_of[i]
            .iter()
            .flat_map(move |&g| self.groups[g as usize].iter().map(|&j| j as usize))
            .filter(move |&j| j != i)
    }

    /// Neighbors that differ from state `i` by more than a relabeling of two
    /// districts. A label swap keeps every district shape, so it is not
    /// counted as a move when judging rigidity.
    pub fn shape_neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let shapes = self.shapes(i);
        self.neighbors(i).filter(move |&j| self.shapes(j) != shapes)
    }

    pub fn shape_degree(&self, i: usize) -> usize {
        self.shape_neighbors(i).count()
    }

    fn shapes(&self, i: usize) -> [u64; 3] {
        let labels = self.states[i].labels();
        let mut m = [label_mask(labels, 1), label_mask(labels, 2), label_mask(labels, 3)];
        m.sort_unstable();
        m
    }

    pub fn edge_count(&self) -> u64 {
        self.groups.iter().map(|g| (g.len() as u64) * (g.len() as u64 - 1) / 2).sum()
    }

    /// Component label per state; labels are dense and ordered by first state.
    pub fn component_labels(&self) -> Vec<u32> {
        let mut uf = UnionFind::new(self.states.len());
        for g in &self.groups {
            for w in g.windows(2) {
                uf.union(w[0] as usize, w[1] as usize);
            }
        }
        let mut dense = HashMap::new();
        (0..self.states.len())
            .map(|i| {
                let root = uf.find(i);
                let next = dense.len() as u32;
                *dense.entry(root).or_insert(next)
            })
            .collect()
    }

    /// Breadth-first distances from `source`; `u32::MAX` when unreachable.
    pub fn distances(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.states.len()];
        let mut group_done = vec![false; self.groups.len()];
        let mut queue = std::collections::VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            for &g in &self.member_of[v] {
                // A clique only needs expanding once: every member gets the
                // same distance from the first member popped.
                if std::mem::replace(&mut group_done[g as usize], true) {
                    continue;
                }
                for &u in &self.groups[g as usize] {
                    if dist[u as usize] == u32::MAX {
                        dist[u as usize] = dist[v] + 1;
                        queue.push_back(u as usize);
                    }
                }
            }
        }
        dist
    }
}

pub fn check_connected(g: &StateGraph) -> (bool, usize) {
    let labels = g.component_labels();
    let count = labels.iter().copied().max().map_or(0, |m| m as usize + 1);
    (count == 1, count)
}

/// States admitting no move that changes any district's vertex set.
pub fn rigid_states(g: &StateGraph) -> Vec<Partition> {
    (0..g.len()).filter(|&i| g.shape_degree(i) == 0).map(|i| g.state(i).clone()).collect()
}

/// Degree and eccentricity summary. Uses every state as a BFS source when
/// there are at most `max_sources` states, otherwise an evenly spaced sample.
pub fn eccentricity_stats(g: &StateGraph, max_sources: usize) -> GraphSummary {
    let (_, components) = check_connected(g);
    let degrees: Vec<usize> = (0..g.len()).map(|i| g.degree(i)).collect();
    let exact = g.len() <= max_sources;
    let sources: Vec<usize> = if exact {
        (0..g.len()).collect()
    } else {
        let step = g.len() as f64 / max_sources as f64;
        (0..max_sources).map(|k| (k as f64 * step) as usize).collect()
    };
    let mut max_ecc = 0;
    let mut min_ecc = usize::MAX;
    for &s in &sources {
        let dist = g.distances(s);
        let ecc = dist.iter().filter(|&&d| d != u32::MAX).max().copied().unwrap_or(0) as usize;
        max_ecc = max_ecc.max(ecc);
        min_ecc = min_ecc.min(ecc);
    }
    GraphSummary {
        states: g.len(),
        edges: g.edge_count(),
        components,
        min_degree: degrees.iter().copied().min().unwrap_or(0),
        max_degree: degrees.iter().copied().max().unwrap_or(0),
        rigid: (0..g.len()).filter(|&i| g.shape_degree(i) == 0).count(),
        diameter: (exact && components == 1).then_some(max_ecc),
        max_eccentricity_seen: max_ecc,
        min_eccentricity_seen: if sources.is_empty() { 0 } else { min_ecc },
        sources: sources.len(),
    }
}

/// Serializable export: label strings plus explicit adjacency.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphExport {
    pub n: usize,
    pub k: [usize; 3],
    pub states: Vec<String>,
    pub adjacency: Vec<Vec<u32>>,
}

pub fn export(g: &StateGraph) -> Option<GraphExport> {
    let first = g.states.first()?;
    let mut adjacency = Vec::with_capacity(g.len());
    for i in 0..g.len() {
        let mut nb: Vec<u32> = g.neighbors(i).map(|j| j as u32).collect();
        nb.sort_unstable();
        adjacency.push(nb);
    }
    Some(GraphExport {
        n: first.region().n(),
        k: first.targets().k,
        states: g.states.iter().map(Partition::label_string).collect(),
        adjacency,
    })
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
