//! Repairing a nearly balanced partition.
//!
//! With the oversized district holding a corner, the rebalancing cases run
//! in a rotated frame. Otherwise a single flip either finishes, or hands the
//! surplus to a district with a corner, or the surplus district meets the
//! deficit district on the boundary and the dedicated analysis below runs
//! with roles oversized = 1, neutral = 2, deficit = 3.

use super::frame::Frame;
use super::geom::{all_inside, any_boundary, arcs, components_inside, other_common, step_towards, walk};
use super::rebalance::Rebalancer;
use crate::lattice::{Symmetry, VId};
use crate::partition::{boundary_pairs, tricolor_triangles, Chirality, District};
use crate::toolkit::{components_without, cycle_recombine_work, enclosed, shrink_vertex, Failure, UnwindOutcome, Work};

pub(crate) fn balance_nearly(w: &mut Work) -> Result<(), Failure> {
    const STAGE: &str = "nearly balanced";
    let budget = 4 * w.region().len() + 16;
    for _ in 0..budget {
        if w.is_balanced() {
            return Ok(());
        }
        let k = w.part().targets().k;
        let sizes = w.sizes();
        let over = (1..=3).find(|&d: &District| sizes[d as usize - 1] == k[d as usize - 1] + 1);
        let short = (1..=3).find(|&d: &District| sizes[d as usize - 1] + 1 == k[d as usize - 1]);
        let (Some(over), Some(short)) = (over, short) else {
            return Err(w.fail(STAGE, format!("sizes {sizes:?} are not nearly balanced")));
        };
        let neutral = 6 - over - short;
        let corners = w.region().corner_ids();
        if let Some(&corner) = corners.iter().find(|&&c| w.label(c) == over) {
            let n = w.region().n();
            let sym = Symmetry::corner_to_origin(n, w.region().vertex(corner));
            let frame = Frame::for_imbalance(w.part(), sym, over, short);
            let mut inner = frame.enter(w);
            inner.set_lock_column(1);
            Rebalancer::new(&mut inner).run()?;
            frame.leave(w, inner)?;
            continue;
        }
        let members = w.members(over);
        if let Some(&v) = members.iter().find(|&&v| w.can_flip(v, short)) {
            w.flip(v, short, STAGE)?;
            continue;
        }
        if corners.iter().any(|&c| w.label(c) == neutral) {
            let v = members.iter().copied().find(|&v| w.can_flip(v, neutral));
            let v = v.ok_or_else(|| w.fail(STAGE, "oversized district has no removable vertex"))?;
            w.flip(v, neutral, STAGE)?;
            continue;
        }
        let frame = Frame::for_imbalance(w.part(), Symmetry::IDENTITY, over, short);
        let mut inner = frame.enter(w);
        Rebalancer::new(&mut inner).corners_in_deficit()?;
        frame.leave(w, inner)?;
    }
    Err(w.fail(STAGE, "step budget exhausted"))
}

impl Rebalancer<'_> {
    /// All corners lie in district 3. Returns with the partition balanced or
    /// after progress that calls for a fresh look from the caller.
    pub(crate) fn corners_in_deficit(&mut self) -> Result<(), Failure> {
        const STAGE: &str = "corners in deficit district";
        self.enter(STAGE)?;
        if self.trivial_exit()? {
            return Ok(());
        }
        let Some(&(a, b)) = boundary_pairs(self.w.part(), 1, 3).first() else {
            // District 2 meets district 3 on the boundary instead: hand it the surplus.
            let v = self.some(self.removable(), STAGE, "no removable district-1 vertex")?;
            return self.flip(v, 2, STAGE);
        };
        match (self.conn(a, 1), self.conn(a, 3)) {
            (false, false) => self.deficit_both_split(a),
            (false, true) => self.deficit_own_split(a, b),
            (true, false) => self.deficit_short_split(a, b),
            (true, true) => Err(self.fail(STAGE, "a has connected neighborhoods but cannot move")),
        }
    }

    /// `a` separates district 1 and sees district 3 twice.
    fn deficit_both_split(&mut self, a: VId) -> Result<(), Failure> {
        const STAGE: &str = "corners in deficit, a split twice";
        let mut comps = components_without(self.w, 1, &[a]);
        let region = self.w.region();
        comps.sort_by_key(|c| c.iter().any(|&v| region.neighbor_ids(v).any(|u| self.label(u) == 2)));
        let pick = comps.iter().find_map(|c| shrink_vertex(self.w, 1, &[a], c).filter(|s| s.can_go(3)));
        let pick = self.some(pick, STAGE, "no piece of district 1 can give a vertex to district 3")?;
        self.flip(pick.vertex, 3, STAGE)
    }

    /// `a` separates district 1; its 3-neighborhood is connected.
    fn deficit_own_split(&mut self, a: VId, b: VId) -> Result<(), Failure> {
        const STAGE: &str = "corners in deficit, a cuts district 1";
        let region = self.w.region();
        let inner = region.common_neighbors(a, b);
        self.require(inner.len() == 1, STAGE, "a and b are not consecutive on the boundary")?;
        let c = inner[0];
        let d = self.some(other_common(region, a, c, Some(b)), STAGE, "missing d")?;
        self.require(self.label(c) == 1 && self.label(d) == 2, STAGE, "expected c in 1 and d in 2")?;
        if self.conn(d, 1) && self.conn(d, 2) {
            let home: Vec<VId> = region.neighbor_ids(d).filter(|&u| self.label(u) == 1).collect();
            let pick = components_without(self.w, 1, &home).into_iter().find_map(|comp| shrink_vertex(self.w, 1, &home, &comp));
            let pick = self.some(pick, STAGE, "district 1 away from d has no shrink vertex")?;
            if pick.can_go(3) {
                return self.flip(pick.vertex, 3, STAGE);
            }
            self.flip(pick.vertex, 2, STAGE)?;
            self.flip(d, 1, STAGE)?;
            return self.flip(a, 3, STAGE);
        }
        let f = self.some(other_common(region, d, c, Some(a)), STAGE, "missing f")?;
        let g = self.some(other_common(region, d, f, Some(c)), STAGE, "missing g")?;
        let (cycle, s_own) = if !self.conn(d, 1) {
            self.require(self.label(g) == 1, STAGE, "expected g in district 1")?;
            let cycle = self.some(self.cycle(1, a, g, d), STAGE, "no district-1 path from a to g")?;
            let s = components_without(self.w, 1, &[a]).into_iter().find(|comp| !comp.iter().any(|v| cycle.contains(v)));
            (cycle, s)
        } else {
            self.require(self.label(f) == 2 && self.label(g) == 3, STAGE, "expected f in 2 and g in 3")?;
            let mut cycle = self.some(super::geom::district_path(self.w, 3, b, g), STAGE, "no district-3 path")?;
            cycle.extend([d, a]);
            let inside = enclosed(self.w.region(), &cycle);
            let s = components_without(self.w, 1, &[a]).into_iter().find(|comp| !all_inside(&inside, comp));
            (cycle, s)
        };
        let s_own = self.some(s_own, STAGE, "no piece of district 1 at a")?;
        let s_other = components_inside(self.w, 2, &[d], &cycle).into_iter().next();
        let s_other = self.some(s_other, STAGE, "no piece of district 2 inside the cycle")?;
        self.unwind(&s_own, a, &s_other, d, None)?;
        Ok(())
    }

    /// `a` sees district 3 in two arcs.
    fn deficit_short_split(&mut self, a: VId, b: VId) -> Result<(), Failure> {
        const STAGE: &str = "corners in deficit, a splits district 3";
        let threes = arcs(self.w, a, 3);
        let other = threes.iter().find(|arc| !arc.contains(&b)).map(|arc| arc[0]);
        let d = self.some(other, STAGE, "3-neighborhood is connected")?;
        let cycle = self.some(self.cycle(3, b, d, a), STAGE, "no district-3 path")?;
        let inside = enclosed(self.w.region(), &cycle);
        let rest: Vec<VId> = self.w.members(1).into_iter().filter(|&v| v != a).collect();
        let ones_in = rest.first().is_some_and(|&v| inside[v]);
        let twos_in = self.w.members(2).first().is_some_and(|&v| inside[v]);
        if ones_in != twos_in {
            let pick = components_without(self.w, 1, &[a])
                .into_iter()
                .find_map(|comp| shrink_vertex(self.w, 1, &[a], &comp).filter(|s| s.can_go(3)));
            let pick = self.some(pick, STAGE, "district 1 has no vertex for district 3")?;
            return self.flip(pick.vertex, 3, STAGE);
        }
        self.require(ones_in && twos_in, STAGE, "districts 1 and 2 both outside the cycle")?;
        self.deficit_tricolor()
    }

    /// District 2 is enclosed and district 1 touches the boundary only at
    /// one vertex: work from the two three-district triangles.
    fn deficit_tricolor(&mut self) -> Result<(), Failure> {
        const STAGE: &str = "corners in deficit, triangles";
        let region = self.w.region();
        let mut tris: Vec<(VId, VId, VId, Chirality)> = tricolor_triangles(self.w.part())
            .iter()
            .map(|t| {
                let ids = t.vertices.map(|v| region.id(v));
                let pick = |d: District| *ids.iter().find(|&&v| self.label(v) == d).unwrap();
                (pick(1), pick(3), pick(2), t.chirality)
            })
            .collect();
        tris.sort_by_key(|t| t.3 != Chirality::Clockwise);
        for &(a, _, _, _) in &tris {
            if self.w.can_flip(a, 3) {
                return self.flip(a, 3, STAGE);
            }
        }
        for &(a, _, _, _) in &tris {
            if !self.on_boundary(a) && self.conn(a, 1) {
                let home: Vec<VId> = self.w.region().neighbor_ids(a).filter(|&u| self.label(u) == 2).collect();
                let pick = components_without(self.w, 2, &home)
                    .into_iter()
                    .find_map(|comp| shrink_vertex(self.w, 2, &home, &comp).filter(|s| s.can_go(3)));
                let pick = self.some(pick, STAGE, "district 2 has no vertex for district 3")?;
                self.flip(pick.vertex, 3, STAGE)?;
                return self.flip(a, 2, STAGE);
            }
        }
        let mut interior = Vec::new();
        for &(a, b, c, _) in &tris {
            if self.on_boundary(a) {
                continue;
            }
            let e = self.some(self.beyond_split(a, b, c), STAGE, "no vertex between the pieces around a")?;
            if self.label(e) == 2 {
                return self.deficit_e_neutral(a, c, e);
            }
            interior.push(a);
        }
        for a in interior {
            let pick = components_without(self.w, 1, &[a])
                .into_iter()
                .filter(|comp| !any_boundary(self.w.region(), comp))
                .find_map(|comp| shrink_vertex(self.w, 1, &[a], &comp).filter(|s| s.can_go(3)));
            if let Some(pick) = pick {
                return self.flip(pick.vertex, 3, STAGE);
            }
        }
        Err(self.fail(STAGE, "no triangle leads to a move"))
    }

    /// Walking around `a` from `b` through `c`: the first vertex outside
    /// district 1 after the first district-1 run.
    fn beyond_split(&self, a: VId, b: VId, c: VId) -> Option<VId> {
        let region = self.w.region();
        let ring = walk(region, a, b, step_towards(region, a, b, c));
        let first = ring.iter().position(|s| s.is_some_and(|u| self.label(u) == 1))?;
        ring[first..].iter().flatten().copied().find(|&u| self.label(u) != 1)
    }

    /// `a` cuts district 1 and the vertex `e` separating its pieces is in
    /// district 2.
    fn deficit_e_neutral(&mut self, a: VId, c: VId, e: VId) -> Result<(), Failure> {
        const STAGE: &str = "corners in deficit, neutral vertex between pieces";
        let cycle = self.some(self.cycle(2, c, e, a), STAGE, "no district-2 path from c to e")?;
        let inner_piece = |w: &Work| components_inside(w, 1, &[a], &cycle).into_iter().next();
        let s1 = self.some(inner_piece(self.w), STAGE, "no piece of district 1 inside the cycle")?;
        if self.w.can_flip(c, 3) {
            self.flip(c, 3, STAGE)?;
            let pick = self.some(shrink_vertex(self.w, 1, &[a], &s1), STAGE, "enclosed piece has no shrink vertex")?;
            if pick.can_go(2) {
                return self.flip(pick.vertex, 2, STAGE);
            }
            // Moving it to 3 leaves district 3 oversized, which holds every corner.
            return self.flip(pick.vertex, 3, STAGE);
        }
        let s2 = components_without(self.w, 2, &[c]).into_iter().find(|comp| !comp.iter().any(|v| cycle.contains(v)));
        let s2 = self.some(s2, STAGE, "c does not cut district 2")?;
        let inside = enclosed(self.w.region(), &cycle);
        if !all_inside(&inside, &s2) {
            match self.unwind(&s1, a, &s2, c, None)? {
                UnwindOutcome::Balanced | UnwindOutcome::FirstArmGone => return Ok(()),
                UnwindOutcome::SecondArmGone => {}
            }
        } else {
            let frame = Frame::roles(self.w.part(), [2, 1, 3]);
            let mut swapped = frame.enter(self.w);
            cycle_recombine_work(&mut swapped, &cycle, a, c, None)?;
            frame.leave(self.w, swapped)?;
        }
        self.flip(c, 3, STAGE)?;
        let rest = self.some(inner_piece(self.w), STAGE, "enclosed piece vanished")?;
        let pick = self.some(shrink_vertex(self.w, 1, &[a], &rest), STAGE, "enclosed piece has no shrink vertex")?;
        self.flip(pick.vertex, 2, STAGE)
    }
}
