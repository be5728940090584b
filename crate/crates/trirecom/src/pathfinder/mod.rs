//! Explicit recombination paths between any two states of the state space.
//!
//! Every endpoint is first repaired to a balanced state, then swept so that
//! the district holding the leftmost vertex fills whole columns from the
//! left, then driven to a ground state. Ground states are bridged by block
//! transpositions, and the second half is replayed backwards.
//!
//! All procedures run on a [`Work`] in a role frame where the district of
//! the leftmost vertex is district 1; emitted steps use concrete labels.

mod case_b;
mod case_c;
mod case_d;
mod frame;
mod geom;
mod ground;
mod nearly;
mod rebalance;

use crate::lattice::Symmetry;
use crate::partition::{balance_class, ground_state, BalanceClass, District, Partition};
use crate::toolkit::{Failure, Work};
use crate::trace::{Trace, VerifyError};
use frame::Frame;
use rebalance::Rebalancer;
use std::collections::{HashMap, VecDeque};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("precondition: {0}")]
    Precondition(String),
    #[error(transparent)]
    Failed(#[from] Failure),
    #[error("emitted trace does not verify: {0}")]
    Verify(#[from] VerifyError),
}

fn require(ok: bool, msg: impl FnOnce() -> String) -> Result<(), PathError> {
    if ok {
        Ok(())
    } else {
        Err(PathError::Precondition(msg()))
    }
}

/// Region and sizes the constructive procedures can handle.
pub fn supported(p: &Partition) -> Result<(), PathError> {
    let n = p.region().n();
    require(n >= 5, || format!("side length {n} is below 5"))?;
    let k = p.targets().k;
    require(k.iter().all(|&ki| ki >= n), || format!("targets {k:?} must each be at least {n}"))
}

/// Roles with the district of the leftmost vertex first and the others in
/// label order.
fn leftmost_roles(p: &Partition) -> [District; 3] {
    let first = p.label_of(0);
    let mut role_of = [0; 3];
    let mut next = 2;
    for l in 1..=3 {
        if l == first {
            role_of[l as usize - 1] = 1;
        } else {
            role_of[l as usize - 1] = next;
            next += 1;
        }
    }
    role_of
}

fn finish(source: &Partition, w: Work) -> Result<Trace, PathError> {
    let mut t = Trace::from_log(source.clone(), w.into_log());
    t.verify()?;
    Ok(t)
}

/// Run `body` in the leftmost-first role frame.
fn in_leftmost_frame<T>(
    w: &mut Work,
    body: impl FnOnce(&mut Work) -> Result<T, Failure>,
) -> Result<(T, Frame), PathError> {
    let frame = Frame::roles(w.part(), leftmost_roles(w.part()));
    let mut inner = frame.enter(w);
    let out = body(&mut inner)?;
    frame.leave(w, inner)?;
    Ok((out, frame))
}

/// Column prefix condition: columns before `i` belong to the district of the
/// leftmost vertex, which still reaches past column `i`.
fn sweep_precondition(p: &Partition, i: usize) -> Result<(), PathError> {
    let region = p.region();
    let first = p.label_of(0);
    require(i >= 1 && i <= region.n(), || format!("column {i} out of range"))?;
    let before = (1..i).flat_map(|c| region.column(c)).all(|v| p.label(v) == first);
    require(before, || format!("columns before {i} are not all in district {first}"))?;
    let open = region.column(i).into_iter().any(|v| p.label(v) != first);
    require(open, || format!("column {i} already lies in district {first}"))?;
    let beyond = (i + 1..=region.n()).flat_map(|c| region.column(c)).any(|v| p.label(v) == first);
    require(beyond, || format!("district {first} does not reach past column {i}"))
}

/// Add one vertex of column `i` to the district of the leftmost vertex.
pub fn increase_column(p: &Partition, i: usize) -> Result<Trace, PathError> {
    supported(p)?;
    require(balance_class(p) == BalanceClass::Balanced, || "partition is not balanced".into())?;
    sweep_precondition(p, i)?;
    let mut w = Work::new(p.clone());
    in_leftmost_frame(&mut w, |inner| {
        inner.set_lock_column(i);
        ground::increase_column(inner, i)
    })?;
    finish(p, w)
}

/// Restore balance after the district of the leftmost vertex grew by one,
/// keeping that district fixed in columns `..=i`.
pub fn rebalance(p: &Partition, i: usize) -> Result<Trace, PathError> {
    supported(p)?;
    let k = p.targets().k;
    let sizes = p.sizes();
    let first = p.label_of(0);
    require(sizes[first as usize - 1] == k[first as usize - 1] + 1, || {
        format!("district {first} of the leftmost vertex is not one too large")
    })?;
    let deficit = (1..=3).find(|&d: &District| sizes[d as usize - 1] + 1 == k[d as usize - 1]);
    let deficit = deficit.ok_or_else(|| PathError::Precondition("no district is one short".into()))?;
    let region = p.region();
    let before = (1..i).flat_map(|c| region.column(c)).all(|v| p.label(v) == first);
    require(before, || format!("columns before {i} are not all in district {first}"))?;
    let mut w = Work::new(p.clone());
    let frame = Frame::for_imbalance(p, Symmetry::IDENTITY, first, deficit);
    let mut inner = frame.enter(&w);
    inner.set_lock_column(i);
    Rebalancer::new(&mut inner).run()?;
    frame.leave(&mut w, inner)?;
    finish(p, w)
}

/// Sweep the district of the leftmost vertex into a column prefix.
pub fn sweep(p: &Partition) -> Result<Trace, PathError> {
    supported(p)?;
    require(balance_class(p) == BalanceClass::Balanced, || "partition is not balanced".into())?;
    let mut w = Work::new(p.clone());
    in_leftmost_frame(&mut w, ground::sweep)?;
    finish(p, w)
}

/// From a swept state, reach the ground state with the district of the
/// leftmost vertex first and the other two in label order.
pub fn finish_ground(p: &Partition) -> Result<Trace, PathError> {
    supported(p)?;
    require(balance_class(p) == BalanceClass::Balanced, || "partition is not balanced".into())?;
    let mut w = Work::new(p.clone());
    in_leftmost_frame(&mut w, ground::finish_ground)?;
    finish(p, w)
}

/// Repair a nearly balanced state to a balanced one.
pub fn balance_nearly(p: &Partition) -> Result<Trace, PathError> {
    supported(p)?;
    let class = balance_class(p);
    require(class.in_omega(), || "partition is outside the state space".into())?;
    let mut w = Work::new(p.clone());
    nearly::balance_nearly(&mut w)?;
    finish(p, w)
}

/// The ground state reached from `p` together with the flip-level trace.
fn to_ground(p: &Partition) -> Result<(Trace, [District; 3]), PathError> {
    let mut w = Work::new(p.clone());
    nearly::balance_nearly(&mut w)?;
    let (_, frame) = in_leftmost_frame(&mut w, |inner| {
        ground::sweep(inner)?;
        ground::finish_ground(inner)
    })?;
    let perm = [frame.label_of(1), frame.label_of(2), frame.label_of(3)];
    Ok((Trace::from_log(p.clone(), w.into_log()), perm))
}

/// Swap blocks `j` and `j + 1` of a ground-state order.
fn transposed(perm: [District; 3], j: usize) -> [District; 3] {
    let mut out = perm;
    out.swap(j, j + 1);
    out
}

/// Steps between two ground states, one adjacent block swap per step.
pub fn ground_path(source: &Partition, perm_a: [District; 3], perm_b: [District; 3]) -> Result<Trace, PathError> {
    let region = source.region_arc().clone();
    let targets = source.targets();
    let ground = |perm| ground_state(region.clone(), targets, perm).map_err(|e| PathError::Precondition(e.to_string()));
    let start = ground(perm_a)?;
    ground(perm_b)?;
    // Breadth-first search over the six orders.
    let mut prev: HashMap<[District; 3], ([District; 3], usize)> = HashMap::new();
    let mut queue = VecDeque::from([perm_a]);
    let mut seen = vec![perm_a];
    while let Some(cur) = queue.pop_front() {
        if cur == perm_b {
            break;
        }
        for j in 0..2 {
            let next = transposed(cur, j);
            if !seen.contains(&next) {
                seen.push(next);
                prev.insert(next, (cur, j));
                queue.push_back(next);
            }
        }
    }
    let mut chain = vec![perm_b];
    let mut cur = perm_b;
    while cur != perm_a {
        cur = prev[&cur].0;
        chain.push(cur);
    }
    chain.reverse();
    let mut w = Work::new(start.clone());
    for pair in chain.windows(2) {
        let (_, j) = prev[&pair[1]];
        let kept = pair[0][2 - j * 2];
        w.recombine(kept, ground(pair[1])?.labels().to_vec(), "ground-state swap")?;
    }
    finish(&start, w)
}

/// Step granularity of an emitted path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Granularity {
    /// The construction log as produced: mostly single-vertex flips.
    Flip,
    /// Runs keeping the same district fixed merged into one step.
    Recom,
}

/// A verified, compressed sequence of recombination steps from `sigma` to
/// `tau`.
pub fn path(sigma: &Partition, tau: &Partition) -> Result<Trace, PathError> {
    path_with(sigma, tau, Granularity::Recom)
}

pub fn path_with(sigma: &Partition, tau: &Partition, granularity: Granularity) -> Result<Trace, PathError> {
    require(sigma.region() == tau.region(), || "partitions live on different regions".into())?;
    require(sigma.targets() == tau.targets(), || "partitions have different size targets".into())?;
    supported(sigma)?;
    for (name, p) in [("source", sigma), ("target", tau)] {
        require(balance_class(p).in_omega(), || format!("{name} is outside the state space"))?;
    }
    if sigma.labels() == tau.labels() {
        return Ok(Trace::empty(sigma.clone()));
    }
    let (mut out, perm_a) = to_ground(sigma)?;
    let (back, perm_b) = to_ground(tau)?;
    let bridge = ground_path(sigma, perm_a, perm_b)?;
    out.extend(bridge);
    out.extend(back.reversed());
    if granularity == Granularity::Recom {
        out = out.compressed();
    }
    out.verify()?;
    Ok(out)
}
