//! Invariant checks shared by the property tests and the acceptance suite.
//!
//! Each check takes a state plus random choices and returns `Ok(true)` when
//! the case exercised the invariant, `Ok(false)` when its precondition did not
//! hold, and `Err` with a description on a violation.

use super::{inland_samples, samples};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;
use std::sync::OnceLock;
use trirecom::oracle::{build_state_graph, enumerate_omega, StateGraph};
use trirecom::toolkit::{bfs_last_order, build_tower, check_tower_structure, execute_tower};
use trirecom::{
    apply_recom, balance_class, build_region, flip_valid, is_cut_vertex, is_simply_connected, neighborhood_flip_test,
    recom_valid, reverse, tricolor_triangles, BalanceClass, Direction, FlipStep, Partition, RecomStep, SizeTargets,
    TriRegion, Vertex,
};

pub type Outcome = Result<bool, String>;

pub fn graph5() -> &'static StateGraph {
    static G: OnceLock<StateGraph> = OnceLock::new();
    G.get_or_init(|| {
        build_state_graph(enumerate_omega(&build_region(5).unwrap(), SizeTargets::new(5, 5, 5), 1).unwrap())
    })
}

/// All of the n=5 and n=6 state spaces plus walk samples at n=8.
pub fn pool() -> &'static [Partition] {
    static POOL: OnceLock<Vec<Partition>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut out = graph5().states().to_vec();
        out.extend(enumerate_omega(&build_region(6).unwrap(), SizeTargets::new(7, 7, 7), 1).unwrap());
        out.extend(samples(8, SizeTargets::new(12, 12, 12), 60, 21));
        out
    })
}

/// Walk samples at n=8 and n=9 with district 3 away from the boundary.
pub fn inland_pool() -> &'static [Partition] {
    static POOL: OnceLock<Vec<Partition>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut out = inland_samples(8, SizeTargets::new(12, 12, 12), 40, 5);
        out.extend(inland_samples(9, SizeTargets::new(15, 15, 15), 40, 6));
        out
    })
}

fn label_string(p: &Partition) -> String {
    format!("n={} {}", p.region().n(), p.label_string())
}

/// Connectivity of `member` by plain breadth-first search. Empty counts as
/// connected.
fn connected(region: &TriRegion, member: &[bool]) -> bool {
    let Some(start) = member.iter().position(|&m| m) else {
        return true;
    };
    let mut seen = vec![false; member.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for u in region.neighbor_ids(v) {
            if member[u] && !seen[u] {
                seen[u] = true;
                count += 1;
                queue.push_back(u);
            }
        }
    }
    count == member.iter().filter(|&&m| m).count()
}

/// Number of maximal runs of `true` around the cycle of six slots.
fn cyclic_runs(slots: [bool; 6]) -> usize {
    if slots.iter().all(|&s| s) {
        return 1;
    }
    (0..6).filter(|&k| slots[k] && !slots[(k + 5) % 6]).count()
}

/// Cut vertex detection agrees with removing the vertex and searching.
pub fn cut_vertex(p: &Partition, pick: usize) -> Outcome {
    let region = p.region();
    let v = pick % region.len();
    let d = p.label_of(v);
    let member: Vec<bool> = (0..region.len()).map(|u| u != v && p.label_of(u) == d).collect();
    let splits = !connected(region, &member);
    let claimed = is_cut_vertex(p, region.vertex(v));
    if splits != claimed {
        return Err(format!("{}: vertex {v} splits={splits} but reported {claimed}", label_string(p)));
    }
    Ok(true)
}

/// The local neighborhood test never accepts a flip the full check rejects.
pub fn local_flip_test(p: &Partition, pick: usize, shift: usize) -> Outcome {
    let region = p.region();
    let v = pick % region.len();
    let from = p.label_of(v);
    let to = 1 + (from + (shift % 2) as u8) % 3;
    let step = FlipStep { vertex: region.vertex(v), from, to };
    if !neighborhood_flip_test(p, &step) {
        return Ok(false);
    }
    if !flip_valid(p, &step) {
        return Err(format!("{}: local test accepts {v} -> {to}, full check rejects", label_string(p)));
    }
    Ok(true)
}

/// A random connected set of at most `max` vertices grown from one vertex.
pub fn random_connected_set(region: &TriRegion, max: usize, seed: u64) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = rng.gen_range(1..=max.min(region.len()));
    let mut member = vec![false; region.len()];
    let mut set = vec![rng.gen_range(0..region.len())];
    member[set[0]] = true;
    while set.len() < size {
        let frontier: Vec<usize> =
            set.iter().flat_map(|&v| region.neighbor_ids(v)).filter(|&u| !member[u]).collect();
        let u = frontier[rng.gen_range(0..frontier.len())];
        member[u] = true;
        set.push(u);
    }
    member
}

/// Breadth-first order of a simply connected set: every prefix is connected
/// and the last vertex has a connected, non-full neighborhood in the set.
pub fn bfs_order(region: &TriRegion, member: &[bool], pick: usize) -> Outcome {
    let set: Vec<Vertex> = (0..region.len()).filter(|&v| member[v]).map(|v| region.vertex(v)).collect();
    if set.len() < 2 || !is_simply_connected(region, &set) {
        return Ok(false);
    }
    let root = set[pick % set.len()];
    let order = bfs_last_order(region, &set, root, None);
    let mut sorted: Vec<usize> = order.iter().map(|&v| region.id(v)).collect();
    sorted.sort_unstable();
    let mut expected: Vec<usize> = set.iter().map(|&v| region.id(v)).collect();
    expected.sort_unstable();
    if sorted != expected || order[0] != root {
        return Err(format!("order {order:?} is not a rooted ordering of {set:?}"));
    }
    let mut placed = vec![false; region.len()];
    placed[region.id(root)] = true;
    for &v in &order[1..] {
        let id = region.id(v);
        if !region.neighbor_ids(id).any(|u| placed[u]) {
            return Err(format!("prefix before {v:?} does not reach it in {set:?}"));
        }
        placed[id] = true;
    }
    let last = *order.last().unwrap();
    let slots = region.neighbors_cyclic(last).map(|s| s.vertex().is_some_and(|u| member[region.id(u)]));
    let count = slots.iter().filter(|&&s| s).count();
    if count == 6 || cyclic_runs(slots) != 1 {
        return Err(format!("last vertex {last:?} has neighborhood {slots:?} in {set:?}"));
    }
    Ok(true)
}

/// A district of a state as a membership mask.
pub fn district_mask(p: &Partition, pick: usize) -> Vec<bool> {
    let d = 1 + (pick % 3) as u8;
    p.labels().iter().map(|&l| l == d).collect()
}

/// Recombination steps along state-graph edges are symmetric and undone by
/// their reverse.
pub fn recom_reversible(g: &StateGraph, index: usize, pick: usize) -> Outcome {
    let i = index % g.len();
    let degree = g.degree(i);
    if degree == 0 {
        return Ok(false);
    }
    let j = g.neighbors(i).nth(pick % degree).unwrap();
    let (p, q) = (g.state(i), g.state(j));
    if !recom_valid(p, q) || !recom_valid(q, p) {
        return Err(format!("edge {} -- {} is not valid both ways", p.label_string(), q.label_string()));
    }
    let untouched = (1..=3u8)
        .find(|&d| p.labels().iter().zip(q.labels()).all(|(&a, &b)| (a == d) == (b == d)))
        .ok_or("edge without a shared district")?;
    let step = RecomStep { untouched, after: q.labels().to_vec() };
    let forward = apply_recom(p, &step).map_err(|e| e.to_string())?;
    if forward != *q {
        return Err("forward step lands elsewhere".into());
    }
    let back = apply_recom(q, &reverse(p, &step)).map_err(|e| e.to_string())?;
    if back != *p {
        return Err(format!("reverse of {} -> {} does not return", p.label_string(), q.label_string()));
    }
    Ok(true)
}

/// A valid flip that keeps every size in the window is a valid
/// recombination step.
pub fn flip_is_recom(p: &Partition, pick: usize, shift: usize) -> Outcome {
    let region = p.region();
    let v = pick % region.len();
    let from = p.label_of(v);
    let to = 1 + (from + (shift % 2) as u8) % 3;
    let step = FlipStep { vertex: region.vertex(v), from, to };
    if !flip_valid(p, &step) {
        return Ok(false);
    }
    let mut labels = p.labels().to_vec();
    labels[v] = to;
    let q = Partition::new(p.region_arc().clone(), labels, p.targets()).map_err(|e| e.to_string())?;
    if !balance_class(&q).in_omega() {
        return Ok(false);
    }
    let lifted = step.lift(p);
    match apply_recom(p, &lifted) {
        Ok(r) if r == q && recom_valid(p, &q) => Ok(true),
        Ok(_) => Err(format!("{}: lift of {v} -> {to} lands elsewhere", label_string(p))),
        Err(e) => Err(format!("{}: lift of {v} -> {to} rejected: {e}", label_string(p))),
    }
}

/// No four consecutive boundary vertices alternate between two districts.
pub fn boundary_alternation(p: &Partition) -> Outcome {
    let cycle = p.region().boundary_cycle();
    let m = cycle.len();
    for s in 0..m {
        let [a, b, c, d] = [0, 1, 2, 3].map(|k| p.label_of(cycle[(s + k) % m]));
        if a == c && b == d && a != b {
            return Err(format!("{}: boundary alternates from position {s}", label_string(p)));
        }
    }
    Ok(true)
}

/// A district away from the boundary is met by exactly two tricolor faces of
/// opposite orientation.
pub fn tricolor_pair(p: &Partition) -> Outcome {
    let region = p.region();
    let inland = (1..=3u8).any(|d| (0..region.len()).all(|v| p.label_of(v) != d || !region.is_boundary(v)));
    if !inland {
        return Ok(false);
    }
    let tri = tricolor_triangles(p);
    if tri.len() != 2 || tri[0].chirality == tri[1].chirality {
        return Err(format!("{}: tricolor faces {tri:?}", label_string(p)));
    }
    Ok(true)
}

/// Whether `(v1, v2)` meets the tower precondition, checked from scratch.
fn tower_ready(p: &Partition, v1: usize, v2: usize) -> bool {
    let region = p.region();
    let top = p.label_of(v1);
    let common: Vec<usize> = region.neighbor_ids(v1).filter(|&x| region.neighbor_ids(x).any(|y| y == v2)).collect();
    let step = FlipStep { vertex: region.vertex(v2), from: p.label_of(v2), to: top };
    p.label_of(v2) != top && common.len() == 2 && common.iter().all(|&c| p.label_of(c) == top) && !flip_valid(p, &step)
}

/// Every `(state, v1, direction)` in the pool meeting the tower precondition.
pub fn tower_starts() -> &'static [(usize, usize, usize)] {
    static STARTS: OnceLock<Vec<(usize, usize, usize)>> = OnceLock::new();
    STARTS.get_or_init(|| {
        let mut out = Vec::new();
        for (i, p) in pool().iter().enumerate() {
            let region = p.region();
            for v1 in 0..region.len() {
                for dir in 0..6 {
                    if region.slot(v1, Direction::from_index(dir)).is_some_and(|v2| tower_ready(p, v1, v2)) {
                        out.push((i, v1, dir));
                    }
                }
            }
        }
        out
    })
}

/// Every tower built from a valid start has the required neighborhood
/// structure and ends inside the region; on balanced states its execution
/// verifies and moves one unit of size from the next vertex's district to the
/// top's, with no district leaving the one-step window on the way.
pub fn tower(p: &Partition, pick: usize, dir: usize) -> Outcome {
    let region = p.region();
    let v1 = pick % region.len();
    let Some(v2) = region.slot(v1, Direction::from_index(dir)) else {
        return Ok(false);
    };
    if !tower_ready(p, v1, v2) {
        return Ok(false);
    }
    let name = label_string(p);
    let t = build_tower(p, region.vertex(v1), region.vertex(v2)).map_err(|e| format!("{name}: {e}"))?;
    check_tower_structure(p, &t).map_err(|e| format!("{name}: {e}"))?;
    if !region.contains(t.next) {
        return Err(format!("{name}: tower ends outside the region"));
    }
    if balance_class(p) != BalanceClass::Balanced {
        return Ok(true);
    }
    let mut trace = execute_tower(p, &t).map_err(|e| format!("{name}: execution: {e}"))?;
    let report = trace.verify().map_err(|e| format!("{name}: {e}"))?;
    let (top, donor) = (p.label_of(v1), p.label(t.next));
    let before = p.sizes();
    let mut expected = before;
    expected[top as usize - 1] += 1;
    expected[donor as usize - 1] -= 1;
    if report.last.sizes() != expected {
        return Err(format!("{name}: sizes {:?} -> {:?}", before, report.last.sizes()));
    }
    if report.last.label_of(v2) != top {
        return Err(format!("{name}: v2 did not join the top district"));
    }
    let targets = p.targets();
    let mut labels = p.labels().to_vec();
    for step in &trace.steps {
        labels.clone_from(&step.after);
        for d in 1..=3u8 {
            let size = labels.iter().filter(|&&l| l == d).count();
            if size.abs_diff(targets.get(d)) > 1 {
                return Err(format!("{name}: district {d} reaches size {size}"));
            }
        }
    }
    Ok(true)
}
