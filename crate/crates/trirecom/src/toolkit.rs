//! Reusable machinery for the constructive procedures: shrink-vertex search,
//! unwinding of two interlocked arms, breadth-first cycle recombination and
//! towers.
//!
//! Everything here mutates a [`Work`], which records every step and refuses
//! any step that would leave the state space or touch a locked vertex.

use crate::lattice::{Direction, TriRegion, VId, Vertex};
use crate::moves::{flip_valid_id, RecomStep};
use crate::partition::{
    arc_connected, classify, components, is_exposed_id, nbhd_connected, nbhd_mask, BalanceClass, District,
    Partition, DISTRICTS,
};
use crate::trace::Trace;
use std::collections::BTreeSet;
use thiserror::Error;

/// A constructive procedure reached a configuration it cannot handle.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{stage}: {detail} [state {labels}]")]
pub struct Failure {
    pub stage: String,
    pub detail: String,
    pub labels: String,
}

/// One recorded step of a [`Work`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogEntry {
    pub untouched: District,
    pub after: Vec<District>,
    pub note: &'static str,
}

/// Mutable partition plus step log and locked vertices.
#[derive(Debug, Clone)]
pub struct Work {
    part: Partition,
    locked: Vec<bool>,
    /// District-1 vertices in columns up to this one are frozen (0: none).
    lock_col: usize,
    log: Vec<LogEntry>,
}

impl Work {
    pub fn new(part: Partition) -> Self {
        let locked = vec![false; part.labels().len()];
        Work { part, locked, lock_col: 0, log: Vec::new() }
    }

    pub(crate) fn with_locks(part: Partition, locked: Vec<bool>, lock_col: usize) -> Self {
        assert_eq!(locked.len(), part.labels().len());
        Work { part, locked, lock_col, log: Vec::new() }
    }

    pub fn part(&self) -> &Partition {
        &self.part
    }

    pub(crate) fn locked_mask(&self) -> &[bool] {
        &self.locked
    }

    pub fn region(&self) -> &TriRegion {
        self.part.region()
    }

    pub fn label(&self, v: VId) -> District {
        self.part.label_of(v)
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    pub fn into_log(self) -> Vec<LogEntry> {
        self.log
    }

    pub fn set_locked(&mut self, locked: Vec<bool>) {
        assert_eq!(locked.len(), self.locked.len());
        self.locked = locked;
    }

    /// Freeze district 1 in columns `..=col` for every later step.
    pub fn set_lock_column(&mut self, col: usize) {
        self.lock_col = col;
    }

    pub fn lock_column(&self) -> usize {
        self.lock_col
    }

    pub fn is_locked(&self, v: VId) -> bool {
        self.locked[v] || (self.label(v) == 1 && self.region().vertex(v).col <= self.lock_col)
    }

    pub fn fail(&self, stage: &str, detail: impl Into<String>) -> Failure {
        Failure { stage: stage.to_string(), detail: detail.into(), labels: self.part.label_string() }
    }

    pub fn sizes(&self) -> [usize; 3] {
        self.part.sizes()
    }

    fn sizes_in_window(&self, sizes: [usize; 3]) -> bool {
        let k = self.part.targets().k;
        (0..3).all(|i| sizes[i] + 1 >= k[i] && sizes[i] <= k[i] + 1)
    }

    pub fn is_balanced(&self) -> bool {
        self.sizes() == self.part.targets().k
    }

    /// Whether flipping `v` into `to` is valid, keeps the sizes in the
    /// window and leaves locked vertices alone.
    pub fn can_flip(&self, v: VId, to: District) -> bool {
        if self.is_locked(v) || self.label(v) == to {
            return false;
        }
        let mut sizes = self.sizes();
        sizes[self.label(v) as usize - 1] -= 1;
        sizes[to as usize - 1] += 1;
        self.sizes_in_window(sizes) && flip_valid_id(&self.part, v, to)
    }

    pub fn flip(&mut self, v: VId, to: District, note: &'static str) -> Result<(), Failure> {
        if !self.can_flip(v, to) {
            let detail = format!(
                "flip of {} from {} to {} is not allowed{}",
                self.region().vertex(v),
                self.label(v),
                to,
                if self.is_locked(v) { " (locked)" } else { "" }
            );
            return Err(self.fail(note, detail));
        }
        let from = self.label(v);
        self.part.labels_mut()[v] = to;
        self.log.push(LogEntry { untouched: 6 - from - to, after: self.part.labels().to_vec(), note });
        Ok(())
    }

    /// Replace the whole assignment in one recombination step.
    pub fn recombine(&mut self, untouched: District, after: Vec<District>, note: &'static str) -> Result<(), Failure> {
        let before = self.part.labels();
        if before == after.as_slice() {
            return Ok(());
        }
        if before.iter().zip(&after).any(|(&a, &b)| (a == untouched) != (b == untouched)) {
            return Err(self.fail(note, format!("district {untouched} would change")));
        }
        if let Some(v) = (0..after.len()).find(|&v| self.is_locked(v) && after[v] != before[v]) {
            return Err(self.fail(note, format!("locked vertex {} would change", self.region().vertex(v))));
        }
        let next = self.part.with_labels(after);
        if classify(&next).0 == BalanceClass::OutsideOmega {
            return Err(self.fail(note, format!("recombination result {} leaves the state space", next.label_string())));
        }
        self.part = next;
        self.log.push(LogEntry { untouched, after: self.part.labels().to_vec(), note });
        Ok(())
    }

    /// Vertices of district `d`, ascending.
    pub fn members(&self, d: District) -> Vec<VId> {
        (0..self.part.labels().len()).filter(|&v| self.label(v) == d).collect()
    }

    pub fn mask(&self, d: District) -> Vec<bool> {
        self.part.labels().iter().map(|&l| l == d).collect()
    }

    pub fn is_cut(&self, v: VId) -> bool {
        !nbhd_connected(self.region(), self.part.labels(), v, self.label(v))
    }

    pub fn nbhd_connected(&self, v: VId, d: District) -> bool {
        nbhd_connected(self.region(), self.part.labels(), v, d)
    }

    pub fn nbhd_nonempty_connected(&self, v: VId, d: District) -> bool {
        let m = nbhd_mask(self.region(), self.part.labels(), v, d);
        m != 0 && arc_connected(m)
    }

    pub fn has_neighbor_in(&self, v: VId, d: District) -> bool {
        self.region().neighbor_ids(v).any(|u| self.label(u) == d)
    }

    pub fn is_exposed(&self, v: VId) -> bool {
        is_exposed_id(&self.part, v)
    }

    /// Valid flip targets for `v`, ascending.
    pub fn targets_of(&self, v: VId) -> Vec<District> {
        DISTRICTS.into_iter().filter(|&t| self.can_flip(v, t)).collect()
    }
}

/// Sets as membership masks.
pub(crate) fn mask_of(len: usize, ids: &[VId]) -> Vec<bool> {
    let mut m = vec![false; len];
    for &v in ids {
        m[v] = true;
    }
    m
}

/// Components of district `d` after deleting `removed`.
pub(crate) fn components_without(w: &Work, d: District, removed: &[VId]) -> Vec<Vec<VId>> {
    let mut member = w.mask(d);
    for &r in removed {
        member[r] = false;
    }
    components(w.region(), &member)
}

/// Shortest path from `from` to `to` inside `member` (both endpoints
/// included even if not members). Ties broken towards smaller ids.
pub(crate) fn shortest_path(region: &TriRegion, member: &[bool], from: VId, to: VId) -> Option<Vec<VId>> {
    let mut prev = vec![usize::MAX; member.len()];
    let mut queue = std::collections::VecDeque::new();
    prev[from] = from;
    queue.push_back(from);
    while let Some(v) = queue.pop_front() {
        if v == to {
            let mut path = vec![to];
            let mut cur = to;
            while cur != from {
                cur = prev[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        let mut nbrs: Vec<VId> = region.neighbor_ids(v).collect();
        nbrs.sort_unstable();
        for u in nbrs {
            if prev[u] == usize::MAX && (member[u] || u == to) {
                prev[u] = v;
                queue.push_back(u);
            }
        }
    }
    None
}

/// Vertices enclosed by the closed walk `cycle`: the components of the rest
/// of the region that do not contain a boundary vertex.
pub(crate) fn enclosed(region: &TriRegion, cycle: &[VId]) -> Vec<bool> {
    let on = mask_of(region.len(), cycle);
    let rest: Vec<bool> = on.iter().map(|&b| !b).collect();
    let mut inside = vec![false; region.len()];
    for comp in components(region, &rest) {
        if comp.iter().all(|&v| !region.is_boundary(v)) {
            for v in comp {
                inside[v] = true;
            }
        }
    }
    inside
}

// ---------------------------------------------------------------------------
// Shrink-vertex search.

/// Sufficient conditions under which a component is shrinkable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShrinkCondition {
    /// The component avoids the boundary.
    NoBoundary,
    /// An exposed vertex and at least two boundary vertices in the district.
    ExposedTwoBoundary,
    /// An exposed vertex and a corner in the district.
    ExposedCorner,
    /// The blocker is one cut vertex and the district has two boundary vertices.
    CutTwoBoundary,
    /// The blocker is one cut vertex and the district holds a corner.
    CutCorner,
}

impl ShrinkCondition {
    pub fn holds(self, p: &Partition, d: District, blocker: &[VId], comp: &[VId]) -> bool {
        let region = p.region();
        let bd_count = (0..region.len()).filter(|&v| p.label_of(v) == d && region.is_boundary(v)).count();
        let has_corner = region.corner_ids().iter().any(|&c| p.label_of(c) == d);
        let exposed = comp.iter().any(|&v| is_exposed_id(p, v));
        let single_cut =
            blocker.len() == 1 && !nbhd_connected(region, p.labels(), blocker[0], p.label_of(blocker[0]));
        match self {
            ShrinkCondition::NoBoundary => comp.iter().all(|&v| !region.is_boundary(v)),
            ShrinkCondition::ExposedTwoBoundary => exposed && bd_count >= 2,
            ShrinkCondition::ExposedCorner => exposed && has_corner,
            ShrinkCondition::CutTwoBoundary => single_cut && bd_count >= 2,
            ShrinkCondition::CutCorner => single_cut && has_corner,
        }
    }
}

/// A vertex that can leave its district, with every valid destination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShrinkChoice {
    pub vertex: VId,
    pub targets: Vec<District>,
}

impl ShrinkChoice {
    pub fn can_go(&self, d: District) -> bool {
        self.targets.contains(&d)
    }
}

/// Search `comp` (a component of district `d` minus `home`) for a removable
/// exposed vertex. Non-cut exposed vertices are tried in ordering order; if
/// none works, descend into the pieces cut off by exposed cut vertices.
pub fn shrink_vertex(w: &Work, d: District, home: &[VId], comp: &[VId]) -> Option<ShrinkChoice> {
    let mut visited = BTreeSet::new();
    shrink_rec(w, d, home, comp, &mut visited, 0)
}

fn shrink_rec(
    w: &Work,
    d: District,
    home: &[VId],
    comp: &[VId],
    visited: &mut BTreeSet<VId>,
    depth: usize,
) -> Option<ShrinkChoice> {
    let mut exposed: Vec<VId> = comp.iter().copied().filter(|&v| w.label(v) == d && w.is_exposed(v)).collect();
    exposed.sort_unstable();
    for &x in &exposed {
        if !w.is_cut(x) {
            let targets = w.targets_of(x);
            if !targets.is_empty() {
                return Some(ShrinkChoice { vertex: x, targets });
            }
        }
    }
    if depth > w.region().len() {
        return None;
    }
    for &cut in exposed.iter().filter(|&&x| w.is_cut(x)) {
        if !visited.insert(cut) {
            continue;
        }
        for piece in components_without(w, d, &[cut]) {
            if piece.iter().any(|v| home.contains(v)) || !piece.iter().all(|v| comp.contains(v)) {
                continue;
            }
            if let Some(found) = shrink_rec(w, d, &[cut], &piece, visited, depth + 1) {
                return Some(found);
            }
        }
    }
    None
}

/// Public form of [`shrink_vertex`] on vertex coordinates. Checks the stated
/// condition first.
pub fn find_shrink_vertex(
    p: &Partition,
    d: District,
    blocker: &[Vertex],
    component: &[Vertex],
    condition: ShrinkCondition,
) -> Result<(Vertex, Vec<District>), ToolkitError> {
    let region = p.region();
    let blocker: Vec<VId> = blocker.iter().map(|&v| region.id(v)).collect();
    let comp: Vec<VId> = component.iter().map(|&v| region.id(v)).collect();
    if comp.is_empty() || comp.iter().any(|&v| p.label_of(v) != d) {
        return Err(ToolkitError::Precondition("component is empty or leaves the district".into()));
    }
    if !condition.holds(p, d, &blocker, &comp) {
        return Err(ToolkitError::NoShrinkVertex);
    }
    let w = Work::new(p.clone());
    let found = shrink_vertex(&w, d, &blocker, &comp).ok_or(ToolkitError::NoShrinkVertex)?;
    Ok((region.vertex(found.vertex), found.targets))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ToolkitError {
    #[error("no removable vertex in the component")]
    NoShrinkVertex,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("tower structure violated: {0}")]
    Tower(String),
    #[error(transparent)]
    Failed(#[from] Failure),
}

// ---------------------------------------------------------------------------
// Unwinding.

/// How an unwinding run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnwindOutcome {
    /// District sizes reached their targets.
    Balanced,
    /// Every vertex of the first arm moved to district 2.
    FirstArmGone,
    /// Every vertex of the second arm (except the protected one) moved to
    /// district 1.
    SecondArmGone,
}

/// Alternately shrink `s1` (a piece of district 1 hanging off `w1`) into
/// district 2 and `s2` (a piece of district 2 hanging off `w2`) into district
/// 1, stopping as soon as a vertex can be handed to district 3. With
/// `protected`, that vertex of `s2` is kept and shrink vertices come from
/// the pieces of district 2 minus `{w2, protected}` inside `s2`.
pub fn unwind_work(
    w: &mut Work,
    s1: &[VId],
    w1: VId,
    s2: &[VId],
    w2: VId,
    protected: Option<VId>,
) -> Result<UnwindOutcome, Failure> {
    const STAGE: &str = "unwind";
    let mut arm1: BTreeSet<VId> = s1.iter().copied().collect();
    let mut arm2: BTreeSet<VId> = s2.iter().copied().collect();
    if arm1.is_empty() || arm2.is_empty() {
        return Err(w.fail(STAGE, "empty arm"));
    }
    if let Some(x) = protected {
        if !arm2.contains(&x) || arm2.len() < 2 {
            return Err(w.fail(STAGE, "protected vertex must sit in a second arm of size at least 2"));
        }
    }
    if arm1.iter().any(|&u| arm2.iter().any(|&v| w.region().adjacent(u, v))) {
        return Err(w.fail(STAGE, "arms are adjacent"));
    }
    loop {
        let a1: Vec<VId> = arm1.iter().copied().collect();
        let v1 = shrink_vertex(w, 1, &[w1], &a1).ok_or_else(|| w.fail(STAGE, "first arm has no shrink vertex"))?;
        if v1.can_go(3) {
            w.flip(v1.vertex, 3, STAGE)?;
            return Ok(UnwindOutcome::Balanced);
        }
        // District 1 has to shrink first, or the size window forbids moves into it.
        w.flip(v1.vertex, 2, STAGE)?;
        let v2 = match protected {
            None => {
                let a2: Vec<VId> = arm2.iter().copied().collect();
                shrink_vertex(w, 2, &[w2], &a2)
            }
            Some(x) => components_without(w, 2, &[w2, x])
                .into_iter()
                .filter(|c| c.iter().all(|v| arm2.contains(v)))
                .find_map(|c| shrink_vertex(w, 2, &[w2, x], &c)),
        }
        .ok_or_else(|| w.fail(STAGE, "second arm has no shrink vertex"))?;
        if v2.can_go(3) {
            w.flip(v2.vertex, 3, STAGE)?;
            return Ok(UnwindOutcome::Balanced);
        }
        w.flip(v2.vertex, 1, STAGE)?;
        arm1.remove(&v1.vertex);
        arm2.remove(&v2.vertex);
        if arm1.is_empty() {
            return Ok(UnwindOutcome::FirstArmGone);
        }
        let floor = usize::from(protected.is_some());
        if arm2.len() == floor {
            return Ok(UnwindOutcome::SecondArmGone);
        }
    }
}

/// Coordinate form of [`unwind_work`] returning the flip-level trace.
pub fn unwind(
    p: &Partition,
    s1: &[Vertex],
    w1: Vertex,
    s2: &[Vertex],
    w2: Vertex,
    protected: Option<Vertex>,
) -> Result<(Trace, UnwindOutcome), ToolkitError> {
    let region = p.region();
    let ids = |vs: &[Vertex]| vs.iter().map(|&v| region.id(v)).collect::<Vec<_>>();
    let (a1, a2) = (ids(s1), ids(s2));
    let (w1, w2) = (region.id(w1), region.id(w2));
    if p.label_of(w1) != 1 || p.label_of(w2) != 2 {
        return Err(ToolkitError::Precondition("w1 must lie in district 1 and w2 in district 2".into()));
    }
    let k = p.targets().k;
    if p.sizes() != [k[0] + 1, k[1], k[2] - 1] {
        return Err(ToolkitError::Precondition("sizes must be (k1+1, k2, k3-1)".into()));
    }
    let mut w = Work::new(p.clone());
    let outcome = unwind_work(&mut w, &a1, w1, &a2, w2, protected.map(|x| region.id(x)))?;
    Ok((Trace::from_log(p.clone(), w.into_log()), outcome))
}

// ---------------------------------------------------------------------------
// Breadth-first order and cycle recombination.

/// Breadth-first order of `member` from `root`; within a level vertices are
/// sorted by ordering index, except that `first_child` (a neighbor of the
/// root) opens the first level.
pub fn bfs_order_ids(region: &TriRegion, member: &[bool], root: VId, first_child: Option<VId>) -> Vec<VId> {
    let mut seen = vec![false; member.len()];
    seen[root] = true;
    let mut order = vec![root];
    let mut level = vec![root];
    let mut first = true;
    while !level.is_empty() {
        let mut next = BTreeSet::new();
        for &v in &level {
            for u in region.neighbor_ids(v) {
                if member[u] && !seen[u] {
                    next.insert(u);
                }
            }
        }
        let mut next: Vec<VId> = next.into_iter().collect();
        for &u in &next {
            seen[u] = true;
        }
        if first {
            if let Some(z) = first_child {
                if let Some(pos) = next.iter().position(|&u| u == z) {
                    next.remove(pos);
                    next.insert(0, z);
                }
            }
            first = false;
        }
        order.extend_from_slice(&next);
        level = next;
    }
    order
}

pub fn bfs_last_order(region: &TriRegion, set: &[Vertex], root: Vertex, first_child: Option<Vertex>) -> Vec<Vertex> {
    let member = mask_of(region.len(), &set.iter().map(|&v| region.id(v)).collect::<Vec<_>>());
    bfs_order_ids(region, &member, region.id(root), first_child.map(|z| region.id(z)))
        .into_iter()
        .map(|v| region.vertex(v))
        .collect()
}

/// A cycle made of district-1 vertices and one district-2 vertex `x`, with
/// a designated neighbor `y` of `x` on the cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleContext {
    /// Cycle vertices in order, including `x`.
    pub cycle: Vec<Vertex>,
    pub x: Vertex,
    pub y: Vertex,
    /// Optional neighbor of `x` inside the cycle that must stay in district 2.
    pub protect: Option<Vertex>,
}

/// `N(y)` restricted to vertices on or inside the cycle, as a slot mask of
/// district-1 membership.
fn inner_nbhd_p1_connected(w: &Work, on_or_inside: &[bool], y: VId) -> bool {
    let mut mask = 0u8;
    for (k, &s) in w.region().slots(y).iter().enumerate() {
        if s != crate::lattice::OUTSIDE && on_or_inside[s as usize] && w.label(s as usize) == 1 {
            mask |= 1 << k;
        }
    }
    arc_connected(mask)
}

/// Recombine districts 1 and 2 inside the cycle so that `y`'s inner
/// district-1 neighborhood becomes connected. Returns the recombined set.
pub fn cycle_recombine_work(
    w: &mut Work,
    cycle: &[VId],
    x: VId,
    y: VId,
    protect: Option<VId>,
) -> Result<Vec<VId>, Failure> {
    const STAGE: &str = "cycle-recombination";
    let region = w.region();
    if w.label(x) != 2 || cycle.iter().any(|&c| c != x && w.label(c) != 1) || !cycle.contains(&y) {
        return Err(w.fail(STAGE, "cycle must be district 1 except for x in district 2"));
    }
    if !region.adjacent(x, y) {
        return Err(w.fail(STAGE, "y must be adjacent to x"));
    }
    let inside = enclosed(region, cycle);
    if (0..inside.len()).any(|v| inside[v] && w.label(v) == 3) {
        return Err(w.fail(STAGE, "district 3 inside the cycle"));
    }
    let on = mask_of(region.len(), cycle);
    let on_or_inside: Vec<bool> = (0..on.len()).map(|v| on[v] || inside[v]).collect();
    // Walk N(y) from x towards the inside and take the first enclosed vertex.
    let slots = *region.slots(y);
    let kx = region.direction_to(y, x).expect("adjacent").index();
    let mut start = None;
    for step in [1usize, 5] {
        let mut arc = Vec::new();
        let mut ok = true;
        for j in 1..6 {
            let s = slots[(kx + step * j) % 6];
            if s == crate::lattice::OUTSIDE {
                ok = false;
                break;
            }
            let s = s as usize;
            if on[s] {
                break;
            }
            if !inside[s] {
                ok = false;
                break;
            }
            arc.push(s);
        }
        if ok && !arc.is_empty() {
            start = Some(arc[0]);
            break;
        }
    }
    let start = start.ok_or_else(|| w.fail(STAGE, "y has no neighbor inside the cycle next to x"))?;
    let interior: Vec<bool> = inside.clone();
    let comp = components(region, &interior)
        .into_iter()
        .find(|c| c.contains(&start))
        .expect("start is enclosed");
    if !comp.iter().any(|&v| region.adjacent(v, x)) {
        return Err(w.fail(STAGE, "component next to y does not touch x"));
    }
    let m = comp.iter().filter(|&&v| w.label(v) == 1).count();
    let mut member = mask_of(region.len(), &comp);
    member[x] = true;
    let order = bfs_order_ids(region, &member, x, protect);
    let mut after = w.part().labels().to_vec();
    for (pos, &v) in order.iter().enumerate().skip(1) {
        after[v] = if pos + m >= order.len() { 1 } else { 2 };
    }
    w.recombine(3, after, STAGE)?;
    if !inner_nbhd_p1_connected(w, &on_or_inside, y) {
        return Err(w.fail(STAGE, "inner neighborhood of y is still disconnected"));
    }
    if let Some(z) = protect {
        if w.label(z) != 2 {
            return Err(w.fail(STAGE, "protected vertex left district 2"));
        }
    }
    Ok(comp)
}

pub fn cycle_recombine(p: &Partition, ctx: &CycleContext) -> Result<(Partition, RecomStep), ToolkitError> {
    let region = p.region();
    let cycle: Vec<VId> = ctx.cycle.iter().map(|&v| region.id(v)).collect();
    let mut w = Work::new(p.clone());
    cycle_recombine_work(&mut w, &cycle, region.id(ctx.x), region.id(ctx.y), ctx.protect.map(|z| region.id(z)))?;
    let entry = w.log().last().cloned();
    let q = w.part().clone();
    let step = match entry {
        Some(e) => RecomStep { untouched: e.untouched, after: e.after },
        None => return Err(ToolkitError::Precondition("cycle recombination changed nothing".into())),
    };
    Ok((q, step))
}

// ---------------------------------------------------------------------------
// Towers.

/// A straight line of vertices in alternating districts, each blocked from
/// joining its predecessor's district, ending where the next vertex can join.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tower {
    pub direction: Direction,
    /// `v_1 .. v_t`.
    pub vertices: Vec<Vertex>,
    pub districts: Vec<District>,
    /// The vertex after the bottom, which can join the bottom's district.
    pub next: Vertex,
}

fn tower_err(msg: impl Into<String>) -> ToolkitError {
    ToolkitError::Tower(msg.into())
}

pub(crate) fn build_tower_ids(w: &Work, v1: VId, v2: VId) -> Result<(Direction, Vec<VId>, VId), ToolkitError> {
    let region = w.region();
    let dir = region.direction_to(v1, v2).ok_or_else(|| tower_err("v1 and v2 are not adjacent"))?;
    let top = w.label(v1);
    if region.common_neighbors(v1, v2).len() != 2 || region.common_neighbors(v1, v2).iter().any(|&c| w.label(c) != top) {
        return Err(tower_err("common neighbors of v1 and v2 must both share v1's district"));
    }
    if w.label(v2) == top {
        return Err(tower_err("v1 and v2 share a district"));
    }
    if flip_valid_id(w.part(), v2, top) {
        return Err(tower_err("v2 can join v1's district directly"));
    }
    let mut line = vec![v1, v2];
    loop {
        let last = *line.last().unwrap();
        let next = region.slot(last, dir).ok_or_else(|| tower_err("tower runs out of the region"))?;
        if w.label(next) == w.label(last) {
            return Err(tower_err("vertex after the bottom shares the bottom's district"));
        }
        if flip_valid_id(w.part(), next, w.label(last)) {
            return Ok((dir, line, next));
        }
        line.push(next);
    }
}

pub fn build_tower(p: &Partition, v1: Vertex, v2: Vertex) -> Result<Tower, ToolkitError> {
    let region = p.region();
    let w = Work::new(p.clone());
    let (direction, line, next) = build_tower_ids(&w, region.id(v1), region.id(v2))?;
    Ok(Tower {
        direction,
        vertices: line.iter().map(|&v| region.vertex(v)).collect(),
        districts: line.iter().map(|&v| p.label_of(v)).collect(),
        next: region.vertex(next),
    })
}

/// Check the neighborhood structure every tower must have: for each
/// consecutive pair both common neighbors lie in the region, at least one
/// shares the upper vertex's district and none shares the lower one's; the
/// vertex after the bottom lies in a different district than the bottom.
pub fn check_tower_structure(p: &Partition, t: &Tower) -> Result<(), String> {
    let region = p.region();
    let mut line: Vec<VId> = t.vertices.iter().map(|&v| region.id(v)).collect();
    line.push(region.id(t.next));
    for l in 0..line.len() - 1 {
        let (a, b) = (line[l], line[l + 1]);
        let common = region.common_neighbors(a, b);
        if common.len() != 2 {
            return Err(format!("pair {l}: a common neighbor lies outside the region"));
        }
        if !common.iter().any(|&c| p.label_of(c) == p.label_of(a)) {
            return Err(format!("pair {l}: no common neighbor shares the upper district"));
        }
        if common.iter().any(|&c| p.label_of(c) == p.label_of(b)) {
            return Err(format!("pair {l}: a common neighbor shares the lower district"));
        }
        if p.label_of(a) == p.label_of(b) {
            return Err(format!("pair {l}: consecutive vertices share a district"));
        }
    }
    Ok(())
}

pub(crate) fn execute_tower_ids(w: &mut Work, line: &[VId], next: VId) -> Result<(), Failure> {
    const STAGE: &str = "tower";
    let mut chain = line.to_vec();
    chain.push(next);
    let targets: Vec<District> = chain.iter().map(|&v| w.label(v)).collect();
    for l in (1..chain.len()).rev() {
        w.flip(chain[l], targets[l - 1], STAGE)?;
    }
    Ok(())
}

pub fn execute_tower(p: &Partition, t: &Tower) -> Result<Trace, ToolkitError> {
    let region = p.region();
    let line: Vec<VId> = t.vertices.iter().map(|&v| region.id(v)).collect();
    let mut w = Work::new(p.clone());
    execute_tower_ids(&mut w, &line, region.id(t.next))?;
    Ok(Trace::from_log(p.clone(), w.into_log()))
}
