//! Case B: district 2 stays away from the boundary.

use super::geom::{component_with, walk};
use super::rebalance::{Rebalancer, Step, ANCHOR};
use crate::lattice::VId;
use crate::partition::{tricolor_triangles, District};
use crate::toolkit::{components_without, shrink_vertex, UnwindOutcome};

/// Runs of equal labels around `a`, starting at `c` and walking away from `b`.
struct Ring {
    runs: Vec<(District, Vec<VId>)>,
}

impl Rebalancer<'_> {
    pub(crate) fn case_b(&mut self) -> Step {
        let tri = tricolor_triangles(self.w.part());
        let Some(t) = tri.first() else {
            return Err(self.fail("case B", "no three-district triangle"));
        };
        let region = self.w.region();
        let ids = t.vertices.map(|v| region.id(v));
        let pick = |d: District| *ids.iter().find(|&&v| self.label(v) == d).unwrap();
        let (a, b, c) = (pick(2), pick(3), pick(1));
        self.case_b_at(a, b, c)
    }

    fn case_b_at(&mut self, a: VId, b: VId, c: VId) -> Step {
        self.enter("case B")?;
        if self.w.is_balanced() {
            return Ok(());
        }
        if !self.conn(a, 3) {
            return self.split_three(a);
        }
        if self.conn(a, 2) {
            return self.both_connected(a, b);
        }
        self.b_split(a, b, c)
    }

    fn ring_from(&self, a: VId, b: VId, c: VId) -> Ring {
        let region = self.w.region();
        let step = if walk(region, a, c, 1)[5] == Some(b) { 1 } else { 5 };
        let mut runs: Vec<(District, Vec<VId>)> = Vec::new();
        for v in walk(region, a, c, step).into_iter().flatten() {
            let l = self.label(v);
            match runs.last_mut() {
                Some((d, run)) if *d == l => run.push(v),
                _ => runs.push((l, vec![v])),
            }
        }
        Ring { runs }
    }

    /// `a` interior, its 3-neighborhood connected and 2-neighborhood split.
    fn b_split(&mut self, a: VId, b: VId, c: VId) -> Step {
        const STAGE: &str = "case B, a split";
        self.enter(STAGE)?;
        if self.w.is_balanced() {
            return Ok(());
        }
        if self.trivial_exit()? {
            return Ok(());
        }
        let ring = self.ring_from(a, b, c);
        let labels: Vec<District> = ring.runs.iter().map(|r| r.0).collect();
        let shape_ok = labels == [1, 2, 1, 2, 3] || labels == [1, 2, 1, 2, 1, 3];
        self.require(shape_ok, STAGE, "unexpected ring around a")?;
        let d = *ring.runs[1].1.last().unwrap();
        let e_run = ring.runs[2].1.clone();
        let e = e_run[0];
        let f = ring.runs[3].1[0];
        if self.locked_col(e) {
            self.b_e_locked(a, b, c, e)
        } else if self.on_boundary(e) {
            self.b_e_boundary(a, b, d, &e_run, f)
        } else if e_run.len() == 1 {
            self.b_e_single(a, b, c, d, e, f)
        } else {
            self.b_e_double(a, b, c, d, e, e_run[1], f)
        }
    }

    fn b_e_locked(&mut self, a: VId, b: VId, c: VId, e: VId) -> Step {
        const STAGE: &str = "case B, e locked";
        if self.w.can_flip(c, 3) {
            self.flip(c, 3, STAGE)?;
            return self.finish(STAGE);
        }
        if !self.conn(c, 3) {
            return self.split_three(c);
        }
        let cycle = self.some(self.cycle(1, c, e, a), STAGE, "no district-1 path from c to e")?;
        let s1 = components_without(self.w, 1, &[c]).into_iter().find(|comp| !comp.iter().any(|v| cycle.contains(v)));
        let s1 = self.some(s1, STAGE, "every piece at c meets the cycle")?;
        let s2 = self.some(self.opposite_side(&cycle, &s1, &[a]), STAGE, "no district-2 piece opposite")?;
        match self.unwind(&s1, c, &s2, a, None)? {
            UnwindOutcome::Balanced => self.finish(STAGE),
            UnwindOutcome::FirstArmGone => {
                self.flip(c, 3, STAGE)?;
                self.finish(STAGE)
            }
            UnwindOutcome::SecondArmGone => self.both_connected(a, b),
        }
    }

    fn b_e_boundary(&mut self, a: VId, b: VId, d: VId, e_run: &[VId], f: VId) -> Step {
        const STAGE: &str = "case B, e on the boundary";
        let e = e_run[0];
        if self.w.can_flip(e, 3) {
            self.flip(e, 3, STAGE)?;
            return self.finish(STAGE);
        }
        let region = self.w.region();
        let side: Vec<VId> = region.neighbor_ids(e).filter(|&u| region.is_boundary(u)).collect();
        self.require(side.len() == 2, STAGE, "e must have two boundary neighbors")?;
        let g = if region.adjacent(side[0], f) { side[0] } else { side[1] };
        let h = if g == side[0] { side[1] } else { side[0] };
        self.require(self.label(g) == 1 && self.label(h) == 1, STAGE, "e's boundary neighbors must be in district 1")?;
        let s1 = self.some(self.far_component(&[e]), STAGE, "no piece at e away from the anchor")?;
        let s2 = if s1.contains(&g) {
            component_with(self.w, 2, &[a], d)
        } else if s1.contains(&h) {
            component_with(self.w, 2, &[a], f)
        } else {
            None
        };
        let s2 = self.some(s2, STAGE, "no second arm")?;
        match self.unwind(&s1, e, &s2, a, None)? {
            UnwindOutcome::Balanced => self.finish(STAGE),
            UnwindOutcome::FirstArmGone => self.run(),
            UnwindOutcome::SecondArmGone => self.both_connected(a, b),
        }
    }

    /// Arms for unwinding at `e` against `a`.
    fn b_arms(&self, a: VId, c: VId, e: VId, f: VId, stage: &'static str) -> Result<(Vec<VId>, Vec<VId>), crate::toolkit::Failure> {
        let comp_c = self.some(component_with(self.w, 1, &[e], c), stage, "c vanished")?;
        if comp_c.contains(&ANCHOR) {
            let cycle = self.some(self.cycle(1, c, e, a), stage, "no district-1 path from c to e")?;
            let s1 = components_without(self.w, 1, &[e]).into_iter().find(|comp| !comp.contains(&c));
            let s1 = self.some(s1, stage, "e does not cut district 1")?;
            let s2 = self.some(self.opposite_side(&cycle, &s1, &[a]), stage, "no district-2 piece opposite")?;
            Ok((s1, s2))
        } else {
            let s2 = self.some(component_with(self.w, 2, &[a], f), stage, "f vanished")?;
            Ok((comp_c, s2))
        }
    }

    fn b_e_single(&mut self, a: VId, b: VId, c: VId, d: VId, e: VId, f: VId) -> Step {
        const STAGE: &str = "case B, single e";
        if self.w.can_flip(e, 2) {
            return self.flip2((e, 2), (a, 3), STAGE);
        }
        if self.conn(e, 1) {
            self.flip(e, 3, STAGE)?;
            return self.finish(STAGE);
        }
        let (s1, s2) = self.b_arms(a, c, e, f, STAGE)?;
        let x = if s2.contains(&d) {
            d
        } else if s2.contains(&f) {
            f
        } else {
            return Err(self.fail(STAGE, "second arm holds neither d nor f"));
        };
        if s2.len() > 1 {
            match self.unwind(&s1, e, &s2, a, Some(x))? {
                UnwindOutcome::Balanced => return self.finish(STAGE),
                UnwindOutcome::FirstArmGone => return self.flip2((e, 2), (a, 3), STAGE),
                UnwindOutcome::SecondArmGone => {}
            }
        }
        self.b_single_x(a, b, e, x)
    }

    /// The second arm is down to `x`, a leaf of district 2 next to `a`.
    fn b_single_x(&mut self, a: VId, b: VId, e: VId, x: VId) -> Step {
        const STAGE: &str = "case B, lone x";
        let s1 = self.some(self.far_component(&[e]), STAGE, "no piece at e away from the anchor")?;
        let v1 = self.some(shrink_vertex(self.w, 1, &[e], &s1), STAGE, "first arm has no shrink vertex")?;
        if v1.can_go(3) {
            self.flip(v1.vertex, 3, STAGE)?;
            return self.finish(STAGE);
        }
        if self.w.can_flip(x, 3) {
            return self.flip2((x, 3), (v1.vertex, 2), STAGE);
        }
        self.flip(v1.vertex, 2, STAGE)?;
        self.flip(x, 1, STAGE)?;
        self.both_connected(a, b)
    }

    #[allow(clippy::too_many_arguments)]
    fn b_e_double(&mut self, a: VId, b: VId, c: VId, d: VId, e: VId, e2: VId, f: VId) -> Step {
        const STAGE: &str = "case B, double e";
        for u in [e, e2] {
            if self.w.can_flip(u, 2) {
                self.flip(u, 2, STAGE)?;
                return self.b_objective(a, b, c);
            }
        }
        let region = self.w.region();
        let step = super::geom::step_towards(region, e, a, d);
        let h = walk(region, e, a, step)[1..].iter().flatten().copied().find(|&u| self.label(u) != 2);
        self.require(h.is_some_and(|h| self.label(h) == 1), STAGE, "e's ring does not return to district 1")?;
        if self.conn(e, 1) {
            self.flip(e, 2, STAGE)?;
            return self.b_objective(a, b, c);
        }
        let (s1, s2) = self.b_arms(a, c, e, f, STAGE)?;
        let e2_first = s1.contains(&e2);
        match self.unwind(&s1, e, &s2, a, None)? {
            UnwindOutcome::Balanced => self.finish(STAGE),
            UnwindOutcome::SecondArmGone => {
                self.flip(a, 3, STAGE)?;
                self.finish(STAGE)
            }
            UnwindOutcome::FirstArmGone => {
                if self.w.can_flip(e, 3) {
                    self.flip(e, 3, STAGE)?;
                    return self.finish(STAGE);
                }
                self.flip(e, 2, STAGE)?;
                if e2_first {
                    self.flip(a, 3, STAGE)?;
                    self.finish(STAGE)
                } else {
                    self.b_objective(a, b, c)
                }
            }
        }
    }

    /// District 2 is one too large: shrink it away from `a` into 3, or hand
    /// the vertex back to district 1 and start over.
    fn b_objective(&mut self, a: VId, b: VId, c: VId) -> Step {
        const STAGE: &str = "case B, surplus in district 2";
        self.enter(STAGE)?;
        let mut home = vec![a];
        home.extend(self.w.region().neighbor_ids(a).filter(|&u| self.label(u) == 2));
        let pick = components_without(self.w, 2, &home).into_iter().find_map(|comp| shrink_vertex(self.w, 2, &home, &comp));
        let pick = self.some(pick, STAGE, "district 2 has no shrink vertex away from a")?;
        if pick.can_go(3) {
            self.flip(pick.vertex, 3, STAGE)?;
            return self.finish(STAGE);
        }
        self.flip(pick.vertex, 1, STAGE)?;
        if self.label(c) != 1 {
            return self.run();
        }
        self.case_b_at(a, b, c)
    }
}
