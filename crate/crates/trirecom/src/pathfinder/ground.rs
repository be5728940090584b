//! Column sweep for district 1 and the final steps to a ground state.

use super::frame::Frame;
use super::rebalance::Rebalancer;
use crate::lattice::{Direction, TriRegion, VId, Vertex};
use crate::partition::{ground_state, District};
use crate::toolkit::{build_tower_ids, execute_tower_ids, Failure, Work};

fn column_ids(region: &TriRegion, i: usize) -> Vec<VId> {
    region.column(i).into_iter().map(|v| region.id(v)).collect()
}

/// The first column not entirely inside district 1.
pub(crate) fn open_column(w: &Work) -> usize {
    let region = w.region();
    (1..=region.n()).find(|&i| column_ids(region, i).iter().any(|&v| w.label(v) != 1)).unwrap_or(region.n() + 1)
}

/// Whether district 1 lies inside columns `..=i`.
pub(crate) fn settled_at(w: &Work, i: usize) -> bool {
    w.members(1).iter().all(|&v| w.region().vertex(v).col <= i)
}

/// Add one vertex of column `i` to district 1, leaving district 1 balanced
/// or one vertex too large.
pub(crate) fn increase_column(w: &mut Work, i: usize) -> Result<(), Failure> {
    const STAGE: &str = "increase column";
    let region = w.region();
    let col = column_ids(region, i);
    let pick = col.iter().copied().find_map(|v| {
        if w.label(v) == 1 {
            return None;
        }
        let above = region.slot(v, Direction::Up).filter(|&u| w.label(u) == 1);
        let below = region.slot(v, Direction::Down).filter(|&u| w.label(u) == 1);
        match (above, below) {
            (Some(_), _) => Some((v, true)),
            (None, Some(_)) => Some((v, false)),
            _ => None,
        }
    });
    let Some((v, member_above)) = pick else {
        return Err(w.fail(STAGE, format!("column {i} has no vertex next to district 1 vertically")));
    };
    if w.can_flip(v, 1) {
        return w.flip(v, 1, STAGE);
    }
    if region.is_boundary(v) {
        let side = if region.vertex(v).row == 1 { Direction::UpperRight } else { Direction::LowerRight };
        let x = region.slot(v, side).ok_or_else(|| w.fail(STAGE, "boundary vertex has no next-column neighbor"))?;
        let own = w.label(v);
        w.flip(x, own, STAGE)?;
        return w.flip(v, 1, STAGE);
    }
    let side = if member_above { Direction::UpperLeft } else { Direction::LowerLeft };
    let x = region.slot(v, side).ok_or_else(|| w.fail(STAGE, "interior vertex has no previous-column neighbor"))?;
    let (_, line, next) = build_tower_ids(w, x, v).map_err(|e| w.fail(STAGE, e.to_string()))?;
    execute_tower_ids(w, &line, next)
}

/// Restore balance after district 1 grew by one, swapping the roles of 2
/// and 3 when district 2 is the one short.
pub(crate) fn rebalance(w: &mut Work) -> Result<(), Failure> {
    if w.is_balanced() {
        return Ok(());
    }
    let k = w.part().targets().k;
    if w.sizes()[1] + 1 == k[1] {
        let frame = Frame::roles(w.part(), [1, 3, 2]);
        let mut inner = frame.enter(w);
        Rebalancer::new(&mut inner).run()?;
        frame.leave(w, inner)
    } else {
        Rebalancer::new(w).run()
    }
}

/// Fill columns with district 1 from the left until district 1 sits inside
/// columns `..=i` with every earlier column full. Returns `i`.
pub(crate) fn sweep(w: &mut Work) -> Result<usize, Failure> {
    const STAGE: &str = "sweep";
    let budget = w.region().len() * w.region().len() + 8;
    for _ in 0..budget {
        let i = open_column(w);
        if settled_at(w, i) {
            w.set_lock_column(0);
            return Ok(i);
        }
        w.set_lock_column(i);
        let before = column_ids(w.region(), i).iter().filter(|&&v| w.label(v) == 1).count();
        increase_column(w, i)?;
        rebalance(w)?;
        let after = column_ids(w.region(), i).iter().filter(|&&v| w.label(v) == 1).count();
        if after <= before {
            return Err(w.fail(STAGE, format!("column {i} did not gain a district-1 vertex")));
        }
    }
    Err(w.fail(STAGE, "step budget exhausted"))
}

/// Lattice distance between two vertices of the triangular lattice.
fn lattice_distance(a: Vertex, b: Vertex) -> usize {
    let dc = b.col as isize - a.col as isize;
    let dr = b.row as isize - a.row as isize;
    if dc * dr >= 0 {
        dc.unsigned_abs().max(dr.unsigned_abs())
    } else {
        dc.unsigned_abs() + dr.unsigned_abs()
    }
}

/// From a swept partition, reach the ground state with district order 1, 2, 3.
pub(crate) fn finish_ground(w: &mut Work) -> Result<(), Failure> {
    const STAGE: &str = "finish ground state";
    let i = open_column(w);
    if !settled_at(w, i) {
        return Err(w.fail(STAGE, "district 1 is not swept into a column prefix"));
    }
    let region_arc = w.part().region_arc().clone();
    let region = &*region_arc;
    let targets = w.part().targets();
    let goal = ground_state(region_arc.clone(), targets, [1, 2, 3]).map_err(|e| w.fail(STAGE, e.to_string()))?;
    let col = column_ids(region, i);
    let next_col = column_ids(region, i + 1);
    let m = col.iter().filter(|&&v| w.label(v) == 1).count();
    let k2 = targets.get(2);
    for _ in 0..=m {
        let j = col.iter().take_while(|&&v| w.label(v) == 1).count();
        if j == m {
            break;
        }
        let free = col.iter().filter(|&&v| w.label(v) != 1).count() + next_col.len();
        if free <= k2 {
            // District 3 takes the tail of the ordering; district 2 the rest.
            let mut after = w.part().labels().to_vec();
            let mut left3 = targets.get(3);
            for v in (0..after.len()).rev() {
                if after[v] != 1 {
                    after[v] = if left3 > 0 { 3 } else { 2 };
                    left3 = left3.saturating_sub(1);
                }
            }
            w.recombine(1, after, STAGE)?;
            return w.recombine(3, goal.labels().to_vec(), STAGE);
        }
        let v = col[j];
        let run = col[j..].iter().take_while(|&&x| w.label(x) != 1).count();
        let below = col[j + run];
        let u = region.slot(v, Direction::LowerRight).ok_or_else(|| w.fail(STAGE, "v has no lower-right neighbor"))?;
        let mut fill: Vec<VId> = col[j..j + run].to_vec();
        fill.push(u);
        let mut rest: Vec<VId> = col.iter().chain(next_col.iter()).copied().filter(|&x| w.label(x) != 1 && !fill.contains(&x)).collect();
        let uv = region.vertex(u);
        rest.sort_by_key(|&x| (lattice_distance(uv, region.vertex(x)), region.vertex(x).col != i, x));
        if fill.len() > k2 {
            return Err(w.fail(STAGE, "seed run is larger than district 2"));
        }
        let take = k2 - fill.len();
        fill.extend(rest.into_iter().take(take));
        let mut after: Vec<District> = w.part().labels().iter().map(|&l| if l == 1 { 1 } else { 3 }).collect();
        for &x in &fill {
            after[x] = 2;
        }
        w.recombine(1, after, STAGE)?;
        let mut swap = w.part().labels().to_vec();
        swap[v] = 1;
        swap[below] = 2;
        w.recombine(3, swap, STAGE)?;
    }
    w.recombine(1, goal.labels().to_vec(), STAGE)
}
