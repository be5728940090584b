//! Role frames: run a procedure on a relabeled, possibly rotated copy of the
//! partition and map its steps back.

use crate::lattice::{Symmetry, VId};
use crate::partition::{District, Partition, SizeTargets};
use crate::toolkit::{Failure, Work};

#[derive(Debug, Clone)]
pub(crate) struct Frame {
    /// Concrete id to frame id.
    to_frame: Vec<VId>,
    /// Frame id to concrete id.
    from_frame: Vec<VId>,
    geometric: bool,
    /// Concrete label to role.
    role_of: [District; 3],
    /// Role to concrete label.
    label_of: [District; 3],
}

impl Frame {
    pub fn new(part: &Partition, sym: Symmetry, role_of: [District; 3]) -> Frame {
        let to_frame = sym.id_map(part.region());
        let mut from_frame = vec![0; to_frame.len()];
        for (v, &f) in to_frame.iter().enumerate() {
            from_frame[f] = v;
        }
        let mut label_of = [0; 3];
        for (l, &r) in role_of.iter().enumerate() {
            label_of[r as usize - 1] = l as District + 1;
        }
        debug_assert!(label_of.iter().all(|&l| l != 0));
        Frame { to_frame, from_frame, geometric: !sym.is_identity(), role_of, label_of }
    }

    /// Pure relabeling without moving vertices.
    pub fn roles(part: &Partition, role_of: [District; 3]) -> Frame {
        Frame::new(part, Symmetry::IDENTITY, role_of)
    }

    /// Roles chosen so that `oversized` becomes 1, `deficit` becomes 3.
    pub fn for_imbalance(part: &Partition, sym: Symmetry, oversized: District, deficit: District) -> Frame {
        let mut role_of = [2; 3];
        role_of[oversized as usize - 1] = 1;
        role_of[deficit as usize - 1] = 3;
        Frame::new(part, sym, role_of)
    }

    pub fn label_of(&self, role: District) -> District {
        self.label_of[role as usize - 1]
    }

    pub fn role_of(&self, label: District) -> District {
        self.role_of[label as usize - 1]
    }

    pub fn labels_in(&self, concrete: &[District]) -> Vec<District> {
        let mut out = vec![0; concrete.len()];
        for (v, &l) in concrete.iter().enumerate() {
            out[self.to_frame[v]] = self.role_of(l);
        }
        out
    }

    pub fn labels_out(&self, framed: &[District]) -> Vec<District> {
        let mut out = vec![0; framed.len()];
        for (f, &r) in framed.iter().enumerate() {
            out[self.from_frame[f]] = self.label_of(r);
        }
        out
    }

    pub fn targets_in(&self, t: SizeTargets) -> SizeTargets {
        SizeTargets::new(t.get(self.label_of(1)), t.get(self.label_of(2)), t.get(self.label_of(3)))
    }

    pub fn partition_in(&self, p: &Partition) -> Partition {
        Partition::new(p.region_arc().clone(), self.labels_in(p.labels()), self.targets_in(p.targets()))
            .expect("relabeling preserves well-formedness")
    }

    /// A fresh work on the framed partition. The column lock carries over only
    /// when the frame keeps both geometry and role 1.
    pub fn enter(&self, outer: &Work) -> Work {
        let part = self.partition_in(outer.part());
        let mut locked = vec![false; part.labels().len()];
        let keeps_lock = !self.geometric && self.role_of(1) == 1;
        for v in 0..locked.len() {
            let frozen = if keeps_lock { outer.locked_mask()[v] } else { outer.is_locked(v) };
            locked[self.to_frame[v]] = frozen;
        }
        let lock_col = if keeps_lock { outer.lock_column() } else { 0 };
        Work::with_locks(part, locked, lock_col)
    }

    /// Replay the inner log on `outer`, re-checking every step there.
    pub fn leave(&self, outer: &mut Work, inner: Work) -> Result<(), Failure> {
        for entry in inner.into_log() {
            outer.recombine(self.label_of(entry.untouched), self.labels_out(&entry.after), entry.note)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_region, Vertex};
    use crate::partition::ground_state;
    use std::sync::Arc;

    #[test]
    fn round_trip_through_rotation() {
        let region = Arc::new(build_region(6).unwrap());
        let p = ground_state(region.clone(), SizeTargets::new(6, 7, 8), [2, 3, 1]).unwrap();
        let corner = Vertex::new(6, 6);
        let f = Frame::for_imbalance(&p, Symmetry::corner_to_origin(6, corner), 1, 3);
        let q = f.partition_in(&p);
        assert_eq!(q.label_of(0), f.role_of(p.label(corner)));
        assert_eq!(q.targets(), SizeTargets::new(6, 7, 8));
        assert_eq!(f.labels_out(q.labels()), p.labels());
        let mut outer = Work::new(p.clone());
        let mut inner = f.enter(&outer);
        // Move one vertex inside the frame and replay it outside.
        let target = (0..q.labels().len()).find(|&v| inner.can_flip(v, 2)).unwrap();
        inner.flip(target, 2, "test").unwrap();
        f.leave(&mut outer, inner).unwrap();
        assert_eq!(outer.log().len(), 1);
        assert_eq!(outer.label(f.from_frame[target]), f.label_of(2));
    }
}
