//! Case C: district 3 stays away from the boundary.

use super::geom::{all_inside, any_boundary, component_with, walk};
use super::rebalance::{Rebalancer, Step, ANCHOR};
use crate::lattice::VId;
use crate::partition::{tricolor_triangles, Chirality, District};
use crate::toolkit::{components_without, cycle_recombine_work, enclosed, shrink_vertex, Failure, UnwindOutcome};

/// Where the work around `e` ended.
enum Reached {
    Balanced,
    /// `e` joined district 2, leaving district 2 one too large.
    EJoined,
}

/// `a`'s ring walked from `c` away from `b`, split into runs.
struct Around {
    d: VId,
    /// Last vertex of the district-2 run starting at `d`.
    d_last: VId,
    e: VId,
}

impl Rebalancer<'_> {
    pub(crate) fn case_c(&mut self) -> Step {
        const STAGE: &str = "case C";
        self.enter(STAGE)?;
        let region = self.w.region();
        let mut tris: Vec<(VId, VId, VId, Chirality)> = tricolor_triangles(self.w.part())
            .iter()
            .map(|t| {
                let ids = t.vertices.map(|v| region.id(v));
                let pick = |d: District| *ids.iter().find(|&&v| self.label(v) == d).unwrap();
                (pick(2), pick(3), pick(1), t.chirality)
            })
            .collect();
        tris.sort_by_key(|t| t.3 != Chirality::Clockwise);
        self.require(!tris.is_empty(), STAGE, "no three-district triangle")?;
        for &(a, b, _, _) in &tris {
            if !self.conn(a, 3) {
                return self.split_three(a);
            }
            if self.conn(a, 2) {
                return self.both_connected(a, b);
            }
        }
        for &(a, b, c, _) in &tris {
            if self.on_boundary(a) {
                return self.c_boundary_a(a, b, c);
            }
        }
        for &(a, b, c, _) in &tris {
            let around = self.around(a, b, c, STAGE)?;
            let s2 = self.some(component_with(self.w, 2, &[a], around.d), STAGE, "d vanished")?;
            if !any_boundary(self.w.region(), &s2) {
                return self.c_main(a, b, c);
            }
        }
        Err(self.fail(STAGE, "every candidate piece of district 2 reaches the boundary"))
    }

    fn around(&self, a: VId, b: VId, c: VId, stage: &'static str) -> Result<Around, Failure> {
        let region = self.w.region();
        let step = if walk(region, a, c, 1)[5] == Some(b) { 1 } else { 5 };
        let ring: Vec<VId> = walk(region, a, c, step).into_iter().flatten().collect();
        let start = self.some(ring.iter().position(|&v| self.label(v) == 2), stage, "a has no district-2 neighbor")?;
        let mut end = start;
        while end + 1 < ring.len() && self.label(ring[end + 1]) == 2 {
            end += 1;
        }
        let e = self.some(ring.get(end + 1).copied(), stage, "ring ends inside district 2")?;
        self.require(self.label(e) == 1, stage, "district-2 run is not followed by district 1")?;
        Ok(Around { d: ring[start], d_last: ring[end], e })
    }

    /// The triangle's district-2 vertex lies on the boundary.
    fn c_boundary_a(&mut self, a: VId, b: VId, c: VId) -> Step {
        const STAGE: &str = "case C, a on the boundary";
        if self.trivial_exit()? {
            return Ok(());
        }
        if !self.conn(c, 3) {
            return self.split_three(c);
        }
        if self.conn(c, 1) {
            self.flip(c, 3, STAGE)?;
            return self.finish(STAGE);
        }
        let region = self.w.region();
        let f = self.some(super::geom::other_common(region, c, b, Some(a)), STAGE, "missing f")?;
        let g = self.some(super::geom::other_common(region, c, f, Some(b)), STAGE, "missing g")?;
        self.require(self.label(f) == 1 && self.label(g) == 2, STAGE, "expected f in 1 and g in 2")?;
        let cycle = self.some(self.cycle(2, g, a, c), STAGE, "no district-2 path from g to a")?;
        let inside = enclosed(self.w.region(), &cycle);
        let s1 = components_without(self.w, 1, &[c]).into_iter().find(|comp| all_inside(&inside, comp));
        let s1 = self.some(s1, STAGE, "no piece of district 1 inside the cycle")?;
        let s2 = components_without(self.w, 2, &[a]).into_iter().find(|comp| !comp.iter().any(|v| cycle.contains(v)));
        let s2 = self.some(s2, STAGE, "no piece of district 2 off the path")?;
        match self.unwind(&s1, c, &s2, a, None)? {
            UnwindOutcome::Balanced => self.finish(STAGE),
            UnwindOutcome::FirstArmGone => {
                self.flip(c, 3, STAGE)?;
                self.finish(STAGE)
            }
            UnwindOutcome::SecondArmGone => self.both_connected(a, b),
        }
    }

    /// The chosen triangle has an enclosed piece of district 2 at `d`.
    fn c_main(&mut self, a: VId, b: VId, c: VId) -> Step {
        const STAGE: &str = "case C, enclosed piece";
        self.enter(STAGE)?;
        if self.w.is_balanced() {
            return Ok(());
        }
        if self.trivial_exit()? {
            return Ok(());
        }
        if self.conn(a, 2) {
            return self.both_connected(a, b);
        }
        let around = self.around(a, b, c, STAGE)?;
        if let Reached::Balanced = self.c_toward_e(a, b, c, &around)? {
            return self.finish(STAGE);
        }
        if self.conn(a, 2) {
            self.flip(a, 3, STAGE)?;
            return self.finish(STAGE);
        }
        // One vertex of e's run is left; trim district 2 behind the run end.
        let around = self.around(a, b, c, STAGE)?;
        let d_bar = around.d_last;
        let s2 = self.some(component_with(self.w, 2, &[a], around.d), STAGE, "d vanished")?;
        if s2.len() > 1 {
            let pick = components_without(self.w, 2, &[a, d_bar])
                .into_iter()
                .filter(|comp| comp.iter().all(|v| s2.contains(v)))
                .find_map(|comp| shrink_vertex(self.w, 2, &[a, d_bar], &comp));
            let pick = self.some(pick, STAGE, "enclosed piece has no shrink vertex")?;
            if pick.can_go(3) {
                self.flip(pick.vertex, 3, STAGE)?;
                return self.finish(STAGE);
            }
            self.flip(pick.vertex, 1, STAGE)?;
            return self.c_main(a, b, c);
        }
        if self.w.can_flip(d_bar, 3) {
            self.flip(d_bar, 3, STAGE)?;
            return self.finish(STAGE);
        }
        self.flip(d_bar, 1, STAGE)?;
        self.both_connected(a, b)
    }

    fn c_toward_e(&mut self, a: VId, b: VId, c: VId, around: &Around) -> Result<Reached, Failure> {
        const STAGE: &str = "case C, toward e";
        let e = around.e;
        if self.locked_col(e) {
            if self.w.can_flip(c, 3) {
                self.flip(c, 3, STAGE)?;
                return Ok(Reached::Balanced);
            }
            if !self.conn(c, 3) {
                self.split_three(c)?;
                return Ok(Reached::Balanced);
            }
            let s1 = components_without(self.w, 1, &[c]).into_iter().find(|comp| !comp.contains(&e));
            let s1 = self.some(s1, STAGE, "c does not cut district 1")?;
            self.require(!s1.contains(&ANCHOR), STAGE, "the anchor is cut off from e")?;
            self.claim_c(a, b, c, e, around.d, &s1)?;
            return Ok(Reached::Balanced);
        }
        if self.w.can_flip(e, 2) {
            self.flip(e, 2, STAGE)?;
            return Ok(Reached::EJoined);
        }
        if self.conn(e, 1) {
            self.flip(e, 3, STAGE)?;
            return Ok(Reached::Balanced);
        }
        let s_e = components_without(self.w, 1, &[e]).into_iter().find(|comp| !comp.contains(&c));
        let s_e = self.some(s_e, STAGE, "e does not cut district 1")?;
        if self.locked_col(c) {
            self.require(!s_e.contains(&ANCHOR), STAGE, "the anchor is cut off from c")?;
            return self.claim_e(a, b, c, e, around.d_last, &s_e);
        }
        if self.w.can_flip(c, 3) {
            self.flip(c, 3, STAGE)?;
            return Ok(Reached::Balanced);
        }
        if !self.conn(c, 3) {
            self.split_three(c)?;
            return Ok(Reached::Balanced);
        }
        let s_c = components_without(self.w, 1, &[c]).into_iter().find(|comp| !comp.contains(&e));
        let s_c = self.some(s_c, STAGE, "c does not cut district 1")?;
        if !s_c.contains(&ANCHOR) {
            self.claim_c(a, b, c, e, around.d, &s_c)?;
            return Ok(Reached::Balanced);
        }
        self.require(!s_e.contains(&ANCHOR), STAGE, "both pieces hold the anchor")?;
        self.claim_e(a, b, c, e, around.d_last, &s_e)
    }

    /// `c` cuts off `s1` from the rest of district 1.
    fn claim_c(&mut self, a: VId, b: VId, c: VId, e: VId, d: VId, s1: &[VId]) -> Step {
        const STAGE: &str = "case C, c cuts district 1";
        let cycle = self.some(self.cycle(1, e, c, a), STAGE, "no district-1 path from e to c")?;
        let inside = enclosed(self.w.region(), &cycle);
        if all_inside(&inside, s1) {
            cycle_recombine_work(self.w, &cycle, a, c, None)?;
            self.flip(c, 3, STAGE)?;
            return self.finish(STAGE);
        }
        let s2 = self.some(component_with(self.w, 2, &[a], d), STAGE, "d vanished")?;
        match self.unwind(s1, c, &s2, a, None)? {
            UnwindOutcome::Balanced => self.finish(STAGE),
            UnwindOutcome::FirstArmGone => {
                self.flip(c, 3, STAGE)?;
                self.finish(STAGE)
            }
            UnwindOutcome::SecondArmGone => self.both_connected(a, b),
        }
    }

    /// `e` cuts off `s1`; keep `d_last` in district 2 throughout.
    fn claim_e(&mut self, a: VId, b: VId, c: VId, e: VId, d_last: VId, s1: &[VId]) -> Result<Reached, Failure> {
        const STAGE: &str = "case C, e cuts district 1";
        let cycle = self.some(self.cycle(1, e, c, a), STAGE, "no district-1 path from e to c")?;
        let inside = enclosed(self.w.region(), &cycle);
        if all_inside(&inside, s1) {
            cycle_recombine_work(self.w, &cycle, a, e, Some(d_last))?;
            return self.settle_e(e);
        }
        let s2 = self.some(component_with(self.w, 2, &[a], d_last), STAGE, "d vanished")?;
        if s2.len() > 1 {
            match self.unwind(s1, e, &s2, a, Some(d_last))? {
                UnwindOutcome::Balanced => return Ok(Reached::Balanced),
                UnwindOutcome::FirstArmGone => return self.settle_e(e),
                UnwindOutcome::SecondArmGone => {}
            }
        }
        let rest = self.some(self.far_component(&[e]), STAGE, "no piece at e away from the anchor")?;
        let v1 = self.some(shrink_vertex(self.w, 1, &[e], &rest), STAGE, "piece at e has no shrink vertex")?;
        if v1.can_go(3) {
            self.flip(v1.vertex, 3, STAGE)?;
            return Ok(Reached::Balanced);
        }
        self.flip(v1.vertex, 2, STAGE)?;
        if self.w.can_flip(d_last, 3) {
            self.flip(d_last, 3, STAGE)?;
            return Ok(Reached::Balanced);
        }
        self.flip(d_last, 1, STAGE)?;
        self.both_connected(a, b)?;
        Ok(Reached::Balanced)
    }

    /// `e`'s 1-neighborhood is connected again; move it on.
    fn settle_e(&mut self, e: VId) -> Result<Reached, Failure> {
        const STAGE: &str = "case C, e freed";
        if self.w.can_flip(e, 3) {
            self.flip(e, 3, STAGE)?;
            return Ok(Reached::Balanced);
        }
        self.flip(e, 2, STAGE)?;
        Ok(Reached::EJoined)
    }
}
