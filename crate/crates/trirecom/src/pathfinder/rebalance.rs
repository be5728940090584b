//! Restoring balance after district 1 gained one vertex at the expense of
//! district 3, without touching district 1 inside the locked columns.
//!
//! Each method handles one configuration of the case analysis and either
//! reaches a balanced partition or reports the configuration it got stuck
//! in. Methods call each other when a configuration reduces to another one;
//! a fuel counter bounds the recursion.

use super::geom::{arcs, component_with, district_path, distances_within, other_common, walk};
use crate::lattice::VId;
use crate::partition::{boundary_pairs, case_dispatch, District, RebalanceCase};
use crate::toolkit::{components_without, enclosed, shrink_vertex, unwind_work, Failure, UnwindOutcome, Work};

pub(crate) type Step = Result<(), Failure>;

/// The vertex every district-1 path is measured from.
pub(crate) const ANCHOR: VId = 0;

pub(crate) struct Rebalancer<'w> {
    pub(crate) w: &'w mut Work,
    fuel: usize,
}

impl<'w> Rebalancer<'w> {
    pub fn new(w: &'w mut Work) -> Self {
        let fuel = 16 * w.region().len() + 64;
        Rebalancer { w, fuel }
    }

    /// Full dispatch on the current configuration.
    pub fn run(&mut self) -> Step {
        self.enter("rebalance")?;
        if self.w.is_balanced() {
            return Ok(());
        }
        if !self.oversized() {
            return Err(self.fail("rebalance", "sizes must be (k1+1, k2, k3-1)"));
        }
        if self.trivial_exit()? {
            return Ok(());
        }
        self.dispatch()
    }

    fn dispatch(&mut self) -> Step {
        match case_dispatch(self.w.part()) {
            Ok(RebalanceCase::A) => {
                let (a, b) = boundary_pairs(self.w.part(), 2, 3)[0];
                self.case_a(a, b)
            }
            Ok(RebalanceCase::B) => self.case_b(),
            Ok(RebalanceCase::C) => self.case_c(),
            Ok(RebalanceCase::D) => self.case_d(),
            Err(e) => Err(self.fail("rebalance", format!("no case applies: {e}"))),
        }
    }

    // -----------------------------------------------------------------------
    // Shared helpers.

    pub(crate) fn enter(&mut self, stage: &'static str) -> Step {
        if self.fuel == 0 {
            return Err(self.fail(stage, "recursion budget exhausted"));
        }
        self.fuel -= 1;
        Ok(())
    }

    pub(crate) fn fail(&self, stage: &str, detail: impl Into<String>) -> Failure {
        self.w.fail(stage, detail)
    }

    pub(crate) fn oversized(&self) -> bool {
        let k = self.w.part().targets().k;
        self.w.sizes() == [k[0] + 1, k[1], k[2] - 1]
    }

    pub(crate) fn finish(&self, stage: &'static str) -> Step {
        if self.w.is_balanced() {
            Ok(())
        } else {
            Err(self.fail(stage, format!("ended unbalanced with sizes {:?}", self.w.sizes())))
        }
    }

    pub(crate) fn flip(&mut self, v: VId, to: District, stage: &'static str) -> Step {
        self.w.flip(v, to, stage)
    }

    /// Two flips that together restore balance.
    pub(crate) fn flip2(&mut self, first: (VId, District), second: (VId, District), stage: &'static str) -> Step {
        self.flip(first.0, first.1, stage)?;
        self.flip(second.0, second.1, stage)?;
        self.finish(stage)
    }

    pub(crate) fn label(&self, v: VId) -> District {
        self.w.label(v)
    }

    pub(crate) fn conn(&self, v: VId, d: District) -> bool {
        self.w.nbhd_connected(v, d)
    }

    pub(crate) fn adjacent(&self, a: VId, b: VId) -> bool {
        self.w.region().adjacent(a, b)
    }

    pub(crate) fn on_boundary(&self, v: VId) -> bool {
        self.w.region().is_boundary(v)
    }

    pub(crate) fn locked_col(&self, v: VId) -> bool {
        self.w.region().vertex(v).col <= self.w.lock_column()
    }

    pub(crate) fn require(&self, ok: bool, stage: &'static str, detail: &str) -> Step {
        if ok {
            Ok(())
        } else {
            Err(self.fail(stage, detail))
        }
    }

    pub(crate) fn some<T>(&self, x: Option<T>, stage: &'static str, detail: &str) -> Result<T, Failure> {
        x.ok_or_else(|| self.fail(stage, detail))
    }

    /// District-1 vertices frozen by the column lock.
    pub(crate) fn locked_part(&self) -> Vec<VId> {
        self.w.members(1).into_iter().filter(|&v| self.w.is_locked(v)).collect()
    }

    /// A district-1 vertex that can go straight to district 3 finishes the job.
    pub(crate) fn trivial_exit(&mut self) -> Result<bool, Failure> {
        if !self.oversized() {
            return Ok(false);
        }
        if let Some(v) = self.w.members(1).into_iter().find(|&v| self.w.can_flip(v, 3)) {
            self.flip(v, 3, "trivial exit")?;
            return Ok(true);
        }
        Ok(false)
    }

    /// The smallest unlocked district-1 vertex that can move to district 2.
    pub(crate) fn removable(&self) -> Option<VId> {
        self.w.members(1).into_iter().find(|&v| self.w.can_flip(v, 2))
    }

    /// Among district-1 vertices that can move to district 2, the one
    /// farthest from the anchor inside district 1 (smallest id on ties).
    pub(crate) fn farthest_removable(&self) -> Option<VId> {
        let dist = distances_within(self.w.region(), &self.w.mask(1), ANCHOR);
        let mut best: Option<VId> = None;
        for v in self.w.members(1) {
            if self.w.can_flip(v, 2) && best.is_none_or(|b| dist[v] > dist[b]) {
                best = Some(v);
            }
        }
        best
    }

    /// The arc of `v`'s `d`-neighborhood containing `u`.
    pub(crate) fn arc_with(&self, v: VId, d: District, u: VId) -> Option<Vec<VId>> {
        arcs(self.w, v, d).into_iter().find(|arc| arc.contains(&u))
    }

    /// The first component of district 1 minus `removed` avoiding the anchor.
    pub(crate) fn far_component(&self, removed: &[VId]) -> Option<Vec<VId>> {
        components_without(self.w, 1, removed).into_iter().find(|c| !c.contains(&ANCHOR))
    }

    /// A cycle made of a shortest `d`-path from `from` to `to` closed by `via`.
    pub(crate) fn cycle(&self, d: District, from: VId, to: VId, via: VId) -> Option<Vec<VId>> {
        let mut path = district_path(self.w, d, from, to)?;
        path.push(via);
        Some(path)
    }

    /// Components of district 2 minus `removed` on the other side of `cycle`
    /// from the set `other`.
    pub(crate) fn opposite_side(&self, cycle: &[VId], other: &[VId], removed: &[VId]) -> Option<Vec<VId>> {
        let inside = enclosed(self.w.region(), cycle);
        let other_in = other.iter().all(|&v| inside[v]);
        components_without(self.w, 2, removed).into_iter().find(|c| c.iter().all(|&v| inside[v]) != other_in)
    }

    pub(crate) fn unwind(&mut self, s1: &[VId], w1: VId, s2: &[VId], w2: VId, keep: Option<VId>) -> Result<UnwindOutcome, Failure> {
        unwind_work(self.w, s1, w1, s2, w2, keep)
    }

    // -----------------------------------------------------------------------
    // Disconnected 3-neighborhoods.

    /// `x` (in district 1 or 2) sees district 3 in two separate arcs: a
    /// vertex of `x`'s district enclosed by the resulting cycle can move to
    /// district 3, after first moving a district-1 vertex to district 2 when
    /// `x` is in district 2.
    pub(crate) fn split_three(&mut self, x: VId) -> Step {
        const STAGE: &str = "disconnected 3-neighborhood";
        self.enter(STAGE)?;
        if self.trivial_exit()? {
            return Ok(());
        }
        let own = self.label(x);
        let threes = arcs(self.w, x, 3);
        self.require(threes.len() >= 2, STAGE, "3-neighborhood is connected")?;
        let cycle = self.some(self.cycle(3, threes[0][0], threes[1][0], x), STAGE, "no district-3 path")?;
        let inside = enclosed(self.w.region(), &cycle);
        let other = 3 - own;
        if self.w.members(other).iter().all(|&v| inside[v]) {
            return Err(self.fail(STAGE, format!("district {other} is enclosed by the cycle")));
        }
        let removable = if own == 2 { self.removable() } else { None };
        if own == 2 && removable.is_none() {
            return Err(self.fail(STAGE, "no district-1 vertex can move to district 2"));
        }
        let choice = components_without(self.w, own, &[x])
            .into_iter()
            .filter(|c| c.iter().all(|&v| inside[v]))
            .find_map(|c| shrink_vertex(self.w, own, &[x], &c).filter(|s| s.can_go(3)));
        let choice = self.some(choice, STAGE, "no enclosed vertex can move to district 3")?;
        match removable {
            Some(v) => self.flip2((v, 2), (choice.vertex, 3), STAGE),
            None => {
                self.flip(choice.vertex, 3, STAGE)?;
                self.finish(STAGE)
            }
        }
    }

    // -----------------------------------------------------------------------
    // Case A: districts 2 and 3 meet along the boundary at `a` (2), `b` (3).

    pub(crate) fn case_a(&mut self, a: VId, b: VId) -> Step {
        self.enter("case A")?;
        if self.w.is_balanced() {
            return Ok(());
        }
        if self.conn(a, 2) && self.conn(a, 3) {
            self.case_a_movable(a, b)
        } else {
            self.case_a_stuck(a, b)
        }
    }

    /// `a`'s neighbors `c, d, e` walking from `b` into the region.
    fn a_ring(&self, a: VId, b: VId) -> [Option<VId>; 3] {
        let region = self.w.region();
        let step = if walk(region, a, b, 1)[1].is_some_and(|c| region.adjacent(c, b)) { 1 } else { 5 };
        let ring = walk(region, a, b, step);
        [ring[1], ring[2], ring[3]]
    }

    /// `a` itself can move to district 3.
    fn case_a_movable(&mut self, a: VId, b: VId) -> Step {
        const STAGE: &str = "case A, a movable";
        if self.trivial_exit()? {
            return Ok(());
        }
        let v = self.some(self.removable(), STAGE, "no removable district-1 vertex")?;
        if !self.adjacent(v, a) {
            return self.flip2((v, 2), (a, 3), STAGE);
        }
        let near = self.some(self.arc_with(a, 1, v), STAGE, "v is not in a's 1-neighborhood")?;
        if near.len() == 1 {
            return self.flip2((v, 2), (a, 3), STAGE);
        }
        self.require(near.len() == 2, STAGE, "a's 1-neighborhood arc has more than two vertices")?;
        if let Some(far) = self.far_component(&near) {
            if components_without(self.w, 1, &near).len() >= 2 {
                let s = self.some(shrink_vertex(self.w, 1, &near, &far), STAGE, "far piece has no shrink vertex")?;
                if s.can_go(3) {
                    self.flip(s.vertex, 3, STAGE)?;
                    return self.finish(STAGE);
                }
                return self.flip2((s.vertex, 2), (a, 3), STAGE);
            }
        }
        let [c, d, e] = self.a_ring(a, b);
        if near.contains(&c.unwrap_or(usize::MAX)) && near.contains(&d.unwrap_or(usize::MAX)) {
            let c = c.unwrap();
            if v != c {
                return self.flip2((v, 2), (a, 3), STAGE);
            }
            if !self.conn(c, 3) {
                return self.split_three(c);
            }
            self.flip(c, 3, STAGE)?;
            return self.finish(STAGE);
        }
        let (d, e) = (self.some(d, STAGE, "missing d")?, self.some(e, STAGE, "missing e")?);
        self.require(near.contains(&d) && near.contains(&e), STAGE, "unexpected 1-neighborhood arc")?;
        if v != e {
            return self.flip2((v, 2), (a, 3), STAGE);
        }
        if self.w.can_flip(d, 3) {
            self.flip(d, 3, STAGE)?;
            return self.finish(STAGE);
        }
        if self.w.can_flip(d, 2) {
            return self.flip2((d, 2), (a, 3), STAGE);
        }
        // `e` is a corner, so `d` is on the boundary and cut. Hand `e` to
        // district 2, which then holds a corner and is the one too large.
        self.require(self.w.region().corner_ids().contains(&e), STAGE, "d cannot move to district 2")?;
        self.flip(e, 2, STAGE)?;
        super::nearly::balance_nearly(self.w)?;
        self.finish(STAGE)
    }

    /// `a` cannot move to district 3 directly.
    fn case_a_stuck(&mut self, a: VId, b: VId) -> Step {
        const STAGE: &str = "case A, a stuck";
        if !self.conn(a, 3) {
            return self.split_three(a);
        }
        if self.trivial_exit()? {
            return Ok(());
        }
        let [c, d, e] = self.a_ring(a, b);
        let (c, d, e) = match (c, d, e) {
            (Some(c), Some(d), Some(e)) => (c, d, e),
            _ => return Err(self.fail(STAGE, "a has fewer than four neighbors")),
        };
        self.require(
            self.label(c) == 2 && self.label(d) == 1 && self.label(e) == 2,
            STAGE,
            "expected c, e in district 2 and d in district 1",
        )?;
        if self.w.can_flip(d, 2) {
            return self.flip2((d, 2), (a, 3), STAGE);
        }
        let region = self.w.region();
        let f = self.some(other_common(region, d, c, Some(a)), STAGE, "missing f")?;
        let g = self.some(other_common(region, d, f, Some(c)), STAGE, "missing g")?;
        let h = self.some(other_common(region, d, g, Some(f)), STAGE, "missing h")?;
        let (s1, s2) = if !self.conn(d, 2) {
            self.require(self.label(g) == 2 && self.label(h) == 1, STAGE, "d: expected g in 2, h in 1")?;
            if self.label(f) == 3 {
                self.flip(d, 3, STAGE)?;
                return self.finish(STAGE);
            }
            self.require(self.label(f) == 1, STAGE, "d: expected f in district 1")?;
            let via_e = component_with(self.w, 2, &[a], g).is_some_and(|comp| comp.contains(&e));
            if via_e {
                (component_with(self.w, 1, &[d], h), component_with(self.w, 2, &[a], c))
            } else {
                (component_with(self.w, 1, &[d], f), component_with(self.w, 2, &[a], e))
            }
        } else {
            self.require(
                !self.conn(d, 1) && self.label(g) == 3 && self.label(f) == 1 && self.label(h) == 1,
                STAGE,
                "d: expected f, h in 1 and g in 3",
            )?;
            (component_with(self.w, 1, &[d], f), component_with(self.w, 2, &[a], e))
        };
        let s1 = self.some(s1, STAGE, "missing first arm")?;
        let s2 = self.some(s2, STAGE, "missing second arm")?;
        match self.unwind(&s1, d, &s2, a, None)? {
            UnwindOutcome::Balanced => self.finish(STAGE),
            _ => self.case_a(a, b),
        }
    }

    // -----------------------------------------------------------------------
    // `a` in district 2 next to `b` in district 3, not both on the boundary,
    // with both of `a`'s neighborhoods connected.

    pub(crate) fn both_connected(&mut self, a: VId, b: VId) -> Step {
        const STAGE: &str = "a fully connected";
        self.enter(STAGE)?;
        if self.w.is_balanced() {
            return Ok(());
        }
        if self.trivial_exit()? {
            return Ok(());
        }
        let v = self.some(self.farthest_removable(), STAGE, "no removable district-1 vertex")?;
        if !self.adjacent(v, a) {
            return self.flip2((a, 3), (v, 2), STAGE);
        }
        let mut probe = self.w.clone();
        probe.flip(a, 3, STAGE)?;
        if probe.can_flip(v, 2) {
            return self.flip2((a, 3), (v, 2), STAGE);
        }
        let twos: Vec<VId> = self.w.region().neighbor_ids(v).filter(|&u| self.label(u) == 2).collect();
        self.require(twos == [a], STAGE, "a should be v's only district-2 neighbor")?;
        let sees_three = self.w.has_neighbor_in(v, 3);
        if sees_three {
            return self.v_sees_three(v);
        }
        if !self.on_boundary(v) {
            return self.v_interior(a, v);
        }
        self.require(self.on_boundary(a), STAGE, "v on the boundary with a inside")?;
        let _ = b;
        self.v_and_a_boundary(a, v)
    }

    fn v_interior(&mut self, a: VId, v: VId) -> Step {
        const STAGE: &str = "a fully connected, v interior";
        let region = self.w.region();
        let q = self.some(district_path(self.w, 1, v, ANCHOR), STAGE, "v not joined to the anchor")?;
        let mut chosen = None;
        for step in [1, 5] {
            let ring = walk(region, v, a, step);
            let (c, d) = (ring[1].unwrap(), ring[2].unwrap());
            if !q.contains(&c) && !q.contains(&d) {
                chosen = Some((c, d));
                break;
            }
        }
        let (c, d) = self.some(chosen, STAGE, "shortest path uses both sides of v")?;
        let near = self.some(self.arc_with(a, 1, v), STAGE, "v not next to a")?;
        let mut blocked = q.clone();
        blocked.extend(self.locked_part());
        blocked.extend(near.iter().copied());
        let s = self.some(component_with(self.w, 1, &blocked, d), STAGE, "d is blocked")?;
        let step = super::geom::step_towards(region, c, v, d);
        let ring_c = walk(region, c, v, step);
        let stop = ring_c[1..].iter().find(|slot| slot.is_none_or(|u| self.label(u) != 1)).copied().flatten();
        if stop.is_none() {
            // c lies on the boundary and its walk leaves the region.
            let h = region
                .neighbor_ids(c)
                .find(|&u| u != d && u != a && u != v && region.is_boundary(u))
                .ok_or_else(|| self.fail(STAGE, "c has no second boundary neighbor"))?;
            return match self.label(h) {
                3 => {
                    self.flip(c, 3, STAGE)?;
                    self.finish(STAGE)
                }
                2 => self.flip2((a, 3), (c, 2), STAGE),
                _ => Err(self.fail(STAGE, "c is a cut vertex on the boundary")),
            };
        }
        let pick = self.some(shrink_vertex(self.w, 1, &blocked, &s), STAGE, "piece at d has no shrink vertex")?;
        if pick.can_go(3) {
            self.flip(pick.vertex, 3, STAGE)?;
            return self.finish(STAGE);
        }
        if !self.adjacent(pick.vertex, a) {
            return self.flip2((pick.vertex, 2), (a, 3), STAGE);
        }
        self.split_three(pick.vertex)
    }

    fn v_and_a_boundary(&mut self, a: VId, v: VId) -> Step {
        const STAGE: &str = "a fully connected, v and a on the boundary";
        let region = self.w.region();
        if region.corner_ids().contains(&v) {
            let c = self.some(region.neighbor_ids(v).find(|&u| u != a), STAGE, "corner has one neighbor")?;
            self.flip(v, 2, STAGE)?;
            let pick = components_without(self.w, 2, &[v]).into_iter().find_map(|comp| shrink_vertex(self.w, 2, &[v], &comp));
            let pick = self.some(pick, STAGE, "district 2 has no shrink vertex")?;
            if pick.can_go(3) {
                self.flip(pick.vertex, 3, STAGE)?;
                return self.finish(STAGE);
            }
            return self.flip2((pick.vertex, 1), (c, 3), STAGE);
        }
        let inner: Vec<VId> = region.common_neighbors(a, v);
        self.require(inner.len() == 1, STAGE, "a and v are not consecutive on the boundary")?;
        let c = inner[0];
        if !self.conn(c, 3) {
            return self.split_three(c);
        }
        if self.conn(c, 1) {
            self.flip(c, 3, STAGE)?;
            return self.finish(STAGE);
        }
        let s = self.some(self.far_component(&[v, c]), STAGE, "no piece away from the anchor")?;
        let pick = self.some(shrink_vertex(self.w, 1, &[v, c], &s), STAGE, "piece has no shrink vertex")?;
        if pick.can_go(3) {
            self.flip(pick.vertex, 3, STAGE)?;
            return self.finish(STAGE);
        }
        self.flip2((pick.vertex, 2), (a, 3), STAGE)
    }

    fn v_sees_three(&mut self, v: VId) -> Step {
        const STAGE: &str = "a fully connected, v next to 3";
        if self.conn(v, 3) {
            self.flip(v, 3, STAGE)?;
            return self.finish(STAGE);
        }
        let threes = arcs(self.w, v, 3);
        let (d, e) = (threes[0][0], threes[1][0]);
        let cycle = self.some(self.cycle(3, d, e, v), STAGE, "no district-3 path")?;
        let inside = enclosed(self.w.region(), &cycle);
        if self.w.members(2).iter().any(|&u| !inside[u]) {
            return self.split_three(v);
        }
        let region = self.w.region();
        let mut inner_path = None;
        for step in [1, 5] {
            let ring = walk(region, v, d, step);
            let end = ring.iter().position(|&s| s == Some(e)).unwrap();
            let mid: Vec<Option<VId>> = ring[1..end].to_vec();
            if mid.iter().all(|s| s.is_some_and(|u| inside[u])) {
                inner_path = Some(mid.into_iter().flatten().collect::<Vec<_>>());
                break;
            }
        }
        let inner_path = self.some(inner_path, STAGE, "no ring path inside the cycle")?;
        let h = self.some(inner_path.into_iter().find(|&u| self.label(u) == 2), STAGE, "no district 2 inside")?;
        let hh = self.some(self.arc_with(v, 2, h), STAGE, "h not in an arc")?;
        let pick = components_without(self.w, 2, &hh)
            .into_iter()
            .find_map(|comp| shrink_vertex(self.w, 2, &hh, &comp).filter(|s| s.can_go(3)));
        let pick = self.some(pick, STAGE, "district 2 has no vertex for district 3")?;
        self.flip2((v, 2), (pick.vertex, 3), STAGE)
    }
}
