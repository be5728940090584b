//! Single-vertex flips and recombination steps.

use crate::lattice::{VId, Vertex};
use crate::partition::{
    arc_connected, classify, district_simply_connected, nbhd_mask, BalanceClass, District, Partition, DISTRICTS,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("step assignment has length {got}, expected {want}")]
    WrongLength { got: usize, want: usize },
    #[error("untouched district {0} changed")]
    UntouchedChanged(District),
    #[error("step does not change the partition")]
    NoChange,
    #[error("result is outside the state space (sizes {sizes:?})")]
    OutsideOmega { sizes: [usize; 3] },
    #[error("bad district label {0}")]
    BadLabel(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FlipStep {
    pub vertex: Vertex,
    pub from: District,
    pub to: District,
}

/// One recombination move. `after` is the complete label array of the
/// resulting partition; entries of the untouched district are unchanged.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RecomStep {
    pub untouched: District,
    pub after: Vec<District>,
}

impl FlipStep {
    /// The flip as a recombination step keeping the third district fixed.
    pub fn lift(&self, p: &Partition) -> RecomStep {
        let mut after = p.labels().to_vec();
        after[p.region().id(self.vertex)] = self.to;
        RecomStep { untouched: 6 - self.from - self.to, after }
    }
}

/// Ids-based validity of moving `v` into district `to`, ignoring sizes.
pub(crate) fn flip_valid_id(p: &Partition, v: VId, to: District) -> bool {
    let from = p.label_of(v);
    if from == to || !(1..=3).contains(&to) {
        return false;
    }
    let region = p.region();
    // Cheap rejections before full recomputation.
    if nbhd_mask(region, p.labels(), v, to) == 0 {
        return false;
    }
    let mut labels = p.labels().to_vec();
    labels[v] = to;
    district_simply_connected(region, &labels, from) && district_simply_connected(region, &labels, to)
}

pub(crate) fn neighborhood_test_id(p: &Partition, v: VId, to: District) -> bool {
    let from = p.label_of(v);
    if from == to {
        return false;
    }
    let own = nbhd_mask(p.region(), p.labels(), v, from);
    let target = nbhd_mask(p.region(), p.labels(), v, to);
    arc_connected(own) && target != 0 && arc_connected(target)
}

/// Authoritative flip check by recomputation. Size windows are the caller's
/// concern.
pub fn flip_valid(p: &Partition, step: &FlipStep) -> bool {
    let Ok(v) = p.region().check(step.vertex) else {
        return false;
    };
    p.label_of(v) == step.from && flip_valid_id(p, v, step.to)
}

/// Sufficient local condition: both neighborhoods connected, target nonempty.
pub fn neighborhood_flip_test(p: &Partition, step: &FlipStep) -> bool {
    let Ok(v) = p.region().check(step.vertex) else {
        return false;
    };
    p.label_of(v) == step.from && neighborhood_test_id(p, v, step.to)
}

/// Whether `p` and `q` are joined by one recombination step.
pub fn recom_valid(p: &Partition, q: &Partition) -> bool {
    if p.region().n() != q.region().n() || p.targets() != q.targets() || p.labels() == q.labels() {
        return false;
    }
    if !classify(p).0.in_omega() || !classify(q).0.in_omega() {
        return false;
    }
    shared_district(p, q).is_some()
}

/// A district whose vertex set is identical in `p` and `q`.
pub fn shared_district(p: &Partition, q: &Partition) -> Option<District> {
    DISTRICTS.into_iter().find(|&d| {
        p.labels().iter().zip(q.labels()).all(|(&a, &b)| (a == d) == (b == d))
    })
}

pub fn apply_recom(p: &Partition, step: &RecomStep) -> Result<Partition, MoveError> {
    if step.after.len() != p.labels().len() {
        return Err(MoveError::WrongLength { got: step.after.len(), want: p.labels().len() });
    }
    if let Some(&bad) = step.after.iter().find(|&&l| !(1..=3).contains(&l)) {
        return Err(MoveError::BadLabel(bad));
    }
    let d = step.untouched;
    if !(1..=3).contains(&d) {
        return Err(MoveError::BadLabel(d));
    }
    if p.labels().iter().zip(&step.after).any(|(&a, &b)| (a == d) != (b == d)) {
        return Err(MoveError::UntouchedChanged(d));
    }
    if p.labels() == step.after.as_slice() {
        return Err(MoveError::NoChange);
    }
    let q = p.with_labels(step.after.clone());
    let (class, report) = classify(&q);
    if class == BalanceClass::OutsideOmega {
        return Err(MoveError::OutsideOmega { sizes: report.sizes });
    }
    Ok(q)
}

/// The step that undoes `step` when applied to its result.
pub fn reverse(before: &Partition, step: &RecomStep) -> RecomStep {
    RecomStep { untouched: step.untouched, after: before.labels().to_vec() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_region;
    use crate::partition::{ground_state, SizeTargets};
    use std::sync::Arc;

    fn ground(n: usize, k: usize, perm: [u8; 3]) -> Partition {
        ground_state(Arc::new(build_region(n).unwrap()), SizeTargets::new(k, k, k), perm).unwrap()
    }

    #[test]
    fn flip_examples() {
        let p = ground(5, 5, [1, 2, 3]);
        let ok = FlipStep { vertex: Vertex::new(3, 2), from: 1, to: 2 };
        assert!(neighborhood_flip_test(&p, &ok));
        assert!(flip_valid(&p, &ok));
        let corner = FlipStep { vertex: Vertex::new(1, 1), from: 1, to: 2 };
        assert!(!flip_valid(&p, &corner));
        assert!(!neighborhood_flip_test(&p, &corner));
        // A district shaped as a straight path: its middle vertex is a cut vertex.
        let mut labels = p.labels().to_vec();
        for (i, l) in labels.iter_mut().enumerate() {
            let v = p.region().vertex(i);
            *l = if v.col == 5 { 3 } else if v.row == 1 && v.col <= 4 { 2 } else { 1 };
        }
        let path = p.with_labels(labels);
        let mid = FlipStep { vertex: Vertex::new(2, 1), from: 2, to: 1 };
        assert!(crate::partition::is_cut_vertex(&path, mid.vertex));
        assert!(!flip_valid(&path, &mid));
    }

    #[test]
    fn transposition_is_one_step() {
        let a = ground(8, 12, [1, 2, 3]);
        let b = ground(8, 12, [2, 1, 3]);
        assert!(recom_valid(&a, &b));
        assert!(recom_valid(&b, &a));
        assert_eq!(shared_district(&a, &b), Some(3));
        assert!(!recom_valid(&a, &a));
        let step = RecomStep { untouched: 3, after: b.labels().to_vec() };
        let got = apply_recom(&a, &step).unwrap();
        assert_eq!(got, b);
        let back = reverse(&a, &step);
        assert_eq!(apply_recom(&got, &back).unwrap(), a);
    }

    #[test]
    fn apply_rejects_bad_steps() {
        let a = ground(5, 5, [1, 2, 3]);
        let same = RecomStep { untouched: 3, after: a.labels().to_vec() };
        assert_eq!(apply_recom(&a, &same), Err(MoveError::NoChange));
        let b = ground(5, 5, [2, 1, 3]);
        let wrong = RecomStep { untouched: 1, after: b.labels().to_vec() };
        assert_eq!(apply_recom(&a, &wrong), Err(MoveError::UntouchedChanged(1)));
    }

    #[test]
    fn lifted_flip_reverses() {
        let p = ground(5, 5, [1, 2, 3]);
        let f = FlipStep { vertex: Vertex::new(3, 2), from: 1, to: 2 };
        let step = f.lift(&p);
        assert_eq!(step.untouched, 3);
        let q = apply_recom(&p, &step).unwrap();
        let back = reverse(&p, &step);
        assert_eq!(apply_recom(&q, &back).unwrap(), p);
        let opposite = FlipStep { vertex: f.vertex, from: 2, to: 1 }.lift(&q);
        assert_eq!(opposite, back);
    }
}
