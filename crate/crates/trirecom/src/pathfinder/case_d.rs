//! Case D: districts 2 and 3 do not touch.

use super::geom::{all_inside, components_inside, other_common, step_towards, walk};
use super::rebalance::{Rebalancer, Step, ANCHOR};
use crate::lattice::VId;
use crate::partition::{boundary_pairs, districts_adjacent};
use crate::toolkit::{components_without, cycle_recombine_work, enclosed, shrink_vertex, UnwindOutcome};

impl Rebalancer<'_> {
    pub(crate) fn case_d(&mut self) -> Step {
        // Beside the anchor corner the corner itself is frozen, so such a
        // pair cannot be resolved through it.
        let region = self.w.region();
        let pair = boundary_pairs(self.w.part(), 1, 3)
            .into_iter()
            .find(|&(a, _)| !self.locked_col(a) && !region.adjacent(a, ANCHOR));
        let (a, b) = self.some(pair, "case D", "no unlocked district-1 vertex next to district 3 on the boundary")?;
        self.case_d_at(a, b)
    }

    /// Re-enter after a step that may have made districts 2 and 3 touch.
    fn d_again(&mut self, a: VId, b: VId) -> Step {
        if self.w.is_balanced() {
            return Ok(());
        }
        if districts_adjacent(self.w.part(), 2, 3) || self.label(a) != 1 {
            return self.run();
        }
        self.case_d_at(a, b)
    }

    fn case_d_at(&mut self, a: VId, b: VId) -> Step {
        const STAGE: &str = "case D";
        self.enter(STAGE)?;
        if self.w.is_balanced() {
            return Ok(());
        }
        if self.trivial_exit()? {
            return Ok(());
        }
        if !self.conn(a, 3) {
            return self.split_three(a);
        }
        let region = self.w.region();
        let inner = region.common_neighbors(a, b);
        self.require(inner.len() == 1, STAGE, "a and b are not consecutive on the boundary")?;
        let c = inner[0];
        let d = self.some(other_common(region, a, c, Some(b)), STAGE, "missing d")?;
        let e = self.some(other_common(region, a, d, Some(c)), STAGE, "missing e")?;
        self.require(
            self.label(c) == 1 && self.label(d) == 2 && self.label(e) == 1,
            STAGE,
            "expected c, e in district 1 and d in district 2",
        )?;
        if self.on_boundary(d) {
            return self.d_beside_corner(a, e);
        }
        if self.conn(d, 1) && self.conn(d, 2) {
            return self.d_movable(a, c, d, e);
        }
        let f = self.some(other_common(region, d, c, Some(a)), STAGE, "missing f")?;
        let g = self.some(other_common(region, d, f, Some(c)), STAGE, "missing g")?;
        let h = self.some(other_common(region, d, g, Some(f)), STAGE, "missing h")?;
        self.require(
            self.label(f) == 2 && self.label(g) == 1 && self.label(h) == 2,
            STAGE,
            "expected f, h in district 2 and g in district 1",
        )?;
        if self.conn(g, 1) && self.conn(g, 2) {
            self.g_movable(a, b, d, g)
        } else {
            self.g_stuck(a, b, d, g)
        }
    }

    /// `a` is next to the corner `e`, which hangs off `a` alone, so `d` lies
    /// on the boundary. Move `e` to district 2 and `a` to district 3; district
    /// 2 then holds a corner and is the one too large.
    fn d_beside_corner(&mut self, a: VId, e: VId) -> Step {
        const STAGE: &str = "case D, a beside a corner";
        self.require(self.w.region().corner_ids().contains(&e), STAGE, "d on the boundary but e is not a corner")?;
        self.flip(e, 2, STAGE)?;
        self.flip(a, 3, STAGE)?;
        super::nearly::balance_nearly(self.w)?;
        self.finish(STAGE)
    }

    /// `d` could join district 1 once district 1 gives up a vertex.
    fn d_movable(&mut self, a: VId, c: VId, d: VId, e: VId) -> Step {
        const STAGE: &str = "case D, d movable";
        let s1 = self.some(self.far_component(&[a]), STAGE, "a does not cut off a piece")?;
        let x = if s1.contains(&c) { c } else { e };
        let region = self.w.region();
        let ring = walk(region, d, a, step_towards(region, d, a, x));
        let mut y = None;
        for slot in ring[1..].iter().flatten() {
            if self.label(*slot) == 2 {
                break;
            }
            y = Some(*slot);
        }
        let y = self.some(y, STAGE, "no district-1 run after a around d")?;
        if self.conn(y, 1) {
            if self.w.can_flip(y, 3) {
                self.flip(y, 3, STAGE)?;
                return self.finish(STAGE);
            }
            self.flip(y, 2, STAGE)?;
        } else {
            let rest = components_without(self.w, 1, &[y]).into_iter().find(|comp| !comp.contains(&a));
            let rest = self.some(rest, STAGE, "y does not cut district 1")?;
            let pick = self.some(shrink_vertex(self.w, 1, &[y], &rest), STAGE, "piece at y has no shrink vertex")?;
            if pick.can_go(3) {
                self.flip(pick.vertex, 3, STAGE)?;
                return self.finish(STAGE);
            }
            self.flip(pick.vertex, 2, STAGE)?;
        }
        self.flip2((d, 1), (a, 3), STAGE)
    }

    /// `g` (across `d` from `a`) can move to district 2.
    fn g_movable(&mut self, a: VId, b: VId, d: VId, g: VId) -> Step {
        const STAGE: &str = "case D, g movable";
        if !self.locked_col(g) {
            self.flip(g, 2, STAGE)?;
            return self.flip2((d, 1), (a, 3), STAGE);
        }
        let cycle = self.some(self.cycle(1, a, g, d), STAGE, "no district-1 path from a to g")?;
        let s1 = components_without(self.w, 1, &[a]).into_iter().find(|comp| !comp.iter().any(|v| cycle.contains(v)));
        let s1 = self.some(s1, STAGE, "a does not cut off a piece")?;
        let s2 = components_inside(self.w, 2, &[d], &cycle).into_iter().next();
        let s2 = self.some(s2, STAGE, "no piece of district 2 inside the cycle")?;
        match self.unwind(&s1, a, &s2, d, None)? {
            UnwindOutcome::Balanced => self.finish(STAGE),
            _ => self.d_again(a, b),
        }
    }

    /// `g` cuts district 1.
    fn g_stuck(&mut self, a: VId, b: VId, d: VId, g: VId) -> Step {
        const STAGE: &str = "case D, g stuck";
        let cycle = self.some(self.cycle(1, a, g, d), STAGE, "no district-1 path from a to g")?;
        let off_cycle = |removed: VId| {
            components_without(self.w, 1, &[removed]).into_iter().find(|comp| !comp.iter().any(|v| cycle.contains(v)))
        };
        let (s1, cut) = match (off_cycle(a), off_cycle(g)) {
            (Some(s), _) if !s.contains(&ANCHOR) => (s, a),
            (_, Some(s)) if !s.contains(&ANCHOR) => (s, g),
            _ => return Err(self.fail(STAGE, "no piece away from the anchor")),
        };
        let inside = enclosed(self.w.region(), &cycle);
        if all_inside(&inside, &s1) {
            self.require(cut == g, STAGE, "the piece at a is enclosed")?;
            cycle_recombine_work(self.w, &cycle, d, g, None)?;
            return self.d_again(a, b);
        }
        let s2 = components_inside(self.w, 2, &[d], &cycle).into_iter().next();
        let s2 = self.some(s2, STAGE, "no piece of district 2 inside the cycle")?;
        match self.unwind(&s1, cut, &s2, d, None)? {
            UnwindOutcome::Balanced => self.finish(STAGE),
            _ => self.d_again(a, b),
        }
    }
}
