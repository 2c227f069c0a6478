use std::collections::HashMap;

use crate::geom::{within_unit, CellBuckets, GridIndex, Point};
use crate::scalar::Scalar;

use super::Envelope;

/// `answer[j]` is the smallest `i` with `v[j]` in the unit disk of `u[i]`.
pub type FirstCoverAnswer = Vec<Option<usize>>;

/// Below this many disks a range is resolved by scanning.
const SCAN_RANGE: usize = 4;

/// Rotations by multiples of 90 degrees that map each of the four outer
/// halfplanes of `U`'s bounding box onto `y >= baseline`. Exact in floating point.
#[derive(Debug, Clone, Copy)]
enum Frame {
    Top,
    Bottom,
    Left,
    Right,
}

impl Frame {
    #[inline]
    fn apply<T: Scalar>(self, p: Point<T>) -> Point<T> {
        match self {
            Frame::Top => p,
            Frame::Bottom => Point::new(-p.x, -p.y),
            Frame::Left => Point::new(p.y, -p.x),
            Frame::Right => Point::new(-p.y, p.x),
        }
    }
}

/// First-cover indices for disks whose centers fit in one side-1/2 cell.
///
/// A query covered by `u[0]` (in particular any query inside the cell) is
/// answered directly. Every other query lies beyond one of the four lines
/// bounding the centers (priority top, bottom, left, right); within that
/// halfplane it is resolved by halving the index range: build the envelope
/// of the first half, descend left if it covers the query, right otherwise.
pub fn first_cover<T: Scalar>(u: &[Point<T>], v: &[Point<T>]) -> FirstCoverAnswer {
    let mut ans = vec![None; v.len()];
    let Some(&u0) = u.first() else {
        return ans;
    };
    let (mut top, mut bottom, mut left, mut right) = (u0.y, u0.y, u0.x, u0.x);
    for p in &u[1..] {
        top = top.max(p.y);
        bottom = bottom.min(p.y);
        left = left.min(p.x);
        right = right.max(p.x);
    }
    let mut groups: [Vec<usize>; 4] = Default::default();
    for (j, &q) in v.iter().enumerate() {
        if within_unit(u0, q) {
            ans[j] = Some(0);
        } else if q.y >= top {
            groups[0].push(j);
        } else if q.y <= bottom {
            groups[1].push(j);
        } else if q.x <= left {
            groups[2].push(j);
        } else if q.x >= right {
            groups[3].push(j);
        } else {
            // Inside the centers' bounding box yet outside u[0]'s disk: only
            // possible when the precondition is violated. Stay correct anyway.
            ans[j] = u.iter().position(|&c| within_unit(c, q));
        }
    }
    let frames = [
        (Frame::Top, top),
        (Frame::Bottom, -bottom),
        (Frame::Left, -left),
        (Frame::Right, right),
    ];
    for (group, (frame, baseline)) in groups.into_iter().zip(frames) {
        if group.is_empty() {
            continue;
        }
        let cu: Vec<Point<T>> = u.iter().map(|&p| frame.apply(p)).collect();
        let cv: Vec<(usize, Point<T>)> = group.into_iter().map(|j| (j, frame.apply(v[j]))).collect();
        halve(&cu, baseline, 1, cu.len(), cv, &mut ans);
    }
    ans
}

/// Queries in `pending` are known not to be covered by `u[..lo]`.
fn halve<T: Scalar>(
    u: &[Point<T>],
    baseline: T,
    lo: usize,
    hi: usize,
    pending: Vec<(usize, Point<T>)>,
    ans: &mut [Option<usize>],
) {
    if pending.is_empty() || lo >= hi {
        return;
    }
    if hi - lo <= SCAN_RANGE {
        for (j, q) in pending {
            ans[j] = (lo..hi).find(|&i| within_unit(u[i], q));
        }
        return;
    }
    let mid = lo + (hi - lo).div_ceil(2);
    let mut env = Envelope::new(baseline);
    for (i, &c) in u.iter().enumerate().take(mid).skip(lo) {
        env.add_disk(c, i).expect("centers lie on the baseline's far side");
    }
    let (covered, rest): (Vec<_>, Vec<_>) = pending
        .into_iter()
        .partition(|&(_, q)| env.covers(q).expect("query lies in the halfplane"));
    drop(env);
    halve(u, baseline, lo, mid, covered, ans);
    halve(u, baseline, mid, hi, rest, ans);
}

/// First-cover indices for disks spread over several cells. `u` lists point
/// indices in their key order; answers are positions in `u`. Disks are
/// grouped by cell and each query consults only the (at most 25) groups in
/// its patch, keeping the smallest position.
pub fn first_cover_multicell<T: Scalar>(
    u: &[usize],
    v: &[usize],
    points: &[Point<T>],
    buckets: &CellBuckets<T>,
) -> FirstCoverAnswer {
    let mut ans: FirstCoverAnswer = vec![None; v.len()];
    let mut groups: HashMap<GridIndex, (Vec<usize>, Vec<usize>)> = HashMap::new();
    for (pos, &ui) in u.iter().enumerate() {
        let cell = buckets.cell_of(ui).expect("disk center is gridded");
        groups.entry(cell).or_default().0.push(pos);
    }
    if groups.is_empty() {
        return ans;
    }
    for (j, &vi) in v.iter().enumerate() {
        let Some(cv) = buckets.cell_of(vi) else {
            continue;
        };
        if groups.len() == 1 {
            // Skip the patch walk when one cell holds every disk.
            let (cell, group) = groups.iter_mut().next().expect("one group");
            if cv.in_patch(*cell) {
                group.1.push(j);
            }
            continue;
        }
        for cell in cv.patch() {
            if let Some(group) = groups.get_mut(&cell) {
                group.1.push(j);
            }
        }
    }
    for (positions, queries) in groups.into_values() {
        if queries.is_empty() {
            continue;
        }
        let cu: Vec<Point<T>> = positions.iter().map(|&pos| points[u[pos]]).collect();
        let cv: Vec<Point<T>> = queries.iter().map(|&j| points[v[j]]).collect();
        for (local, j) in first_cover(&cu, &cv).into_iter().zip(queries) {
            if let Some(li) = local {
                let global = positions[li];
                ans[j] = Some(ans[j].map_or(global, |cur: usize| cur.min(global)));
            }
        }
    }
    ans
}
