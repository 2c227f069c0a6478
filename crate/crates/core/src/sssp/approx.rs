use crate::envelope::first_cover_multicell;
use crate::geom::{within_unit, Grid, GridIndex, Point, PointSet};
use crate::scalar::Scalar;
use crate::wnn::{offline_answers, WeightedSite};

use super::exact::{static_update, update};
use super::{sorted_finite, CheckReport, Geometry, Phase, SolveError, SolveOptions, SsspResult, State, UpdateOutcome, REL_TOL};

/// Approximation parameter. The fine grid has side `eps / 8`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Epsilon<T>(T);

impl<T: Scalar> Epsilon<T> {
    pub fn new(value: T) -> Result<Self, SolveError> {
        if value.is_finite() && value > T::zero() {
            Ok(Epsilon(value))
        } else {
            Err(SolveError::BadEpsilon(value.to_f64().unwrap_or(f64::NAN)))
        }
    }

    pub fn value(self) -> T {
        self.0
    }

    pub fn fine_side(self) -> T {
        self.0 / T::lit(8.0)
    }
}

/// `(1 + eps)`-approximate shortest paths: `d(s, a) <= dist[a] <= (1 + eps) d(s, a)`.
pub fn sssp_approx<T: Scalar>(ps: &PointSet<T>, eps: Epsilon<T>) -> Result<SsspResult<T>, SolveError> {
    Ok(sssp_approx_with(ps, eps, &SolveOptions::default())?.0)
}

pub fn sssp_approx_with<'a, T: Scalar>(
    ps: &'a PointSet<T>,
    eps: Epsilon<T>,
    opts: &SolveOptions<'a, T>,
) -> Result<(SsspResult<T>, CheckReport), SolveError> {
    // Fine-grid indices reach 16n/eps on the translated square [0, 2n]^2;
    // past the mantissa the quotient no longer resolves single cells.
    let n = ps.len();
    let span = T::lit(16.0) * T::from_usize(n).expect("point count representable") / eps.value();
    if !(span * T::epsilon() < T::one()) {
        return Err(SolveError::EpsilonTooSmall { eps: eps.value().to_f64().unwrap_or(f64::NAN), n });
    }
    let mut st = State::new(ps, opts);
    let s = st.source();
    let pts = st.geo.points();
    let s_cell = st.geo.buckets().cell_of(s).expect("the source is gridded");
    for a in st.geo.buckets().patch_points(s_cell) {
        if a != s && within_unit(pts[s], pts[a]) {
            st.relax(a, pts[s].dist(pts[a]), s);
        }
    }
    while let Some(step) = st.next_step() {
        let cell = &step.members;
        let buckets = st.geo.buckets();
        let rest: Vec<usize> = step.patch.iter().copied().filter(|&i| buckets.cell_of(i) != Some(step.cell)).collect();
        if !opts.skip_first_update {
            let out = update(&st.geo, &st.dist, &rest, cell);
            st.apply(out, Phase::Exact, cell);
        }
        // The cell's points are pairwise adjacent, so every query's first
        // cover is the first disk and the stream reduces to one static query.
        let out = static_update(&st.geo, &st.dist, cell, cell);
        st.apply(out, Phase::Exact, cell);
        let out = approx_update(&st.geo, &st.dist, cell, &rest, eps, st.checks);
        st.apply(out, Phase::Approx, &rest);
        st.retire(cell);
    }
    Ok(st.finish())
}

/// For `sorted` points in their sort order, the positions of the last member
/// of each occupied fine-grid cell, ascending.
pub fn select_representatives<T: Scalar>(geo: &Geometry<'_, T>, sorted: &[usize], eps: Epsilon<T>) -> Vec<usize> {
    let grid = Grid::new(eps.fine_side(), geo.floor()).expect("epsilon is positive");
    let norm = geo.normalized().points.points();
    let mut keyed: Vec<(GridIndex, usize)> = sorted
        .iter()
        .enumerate()
        .map(|(pos, &i)| (grid.locate(norm[i]).expect("fine-grid index in range"), pos))
        .collect();
    keyed.sort_unstable();
    let mut reps: Vec<usize> = keyed
        .iter()
        .enumerate()
        .filter(|&(k, &(cell, _))| keyed.get(k + 1).is_none_or(|next| next.0 != cell))
        .map(|(_, &(_, pos))| pos)
        .collect();
    reps.sort_unstable();
    reps
}

/// Improves each `v` (disjoint from `u`, with `u` inside one coarse cell) by
/// some `dist[p] + |p - v|` with `p` in `u` adjacent to `v`, within `eps/2`
/// of the best such value. Only one disk per fine cell, the last in dist
/// order, enters the stream; an answer off `v`'s disk is replaced by `v`'s
/// first-cover disk.
pub fn approx_update<T: Scalar>(
    geo: &Geometry<'_, T>,
    dist: &[T],
    u: &[usize],
    v: &[usize],
    eps: Epsilon<T>,
    checks: bool,
) -> UpdateOutcome<T> {
    let pts = geo.points();
    let mut out = UpdateOutcome::default();
    let order = sorted_finite(dist, u);
    if order.is_empty() || v.is_empty() {
        return out;
    }
    debug_assert!(v.iter().all(|x| !u.contains(x)), "approximate update needs disjoint sets");
    if checks {
        out.pair_bound = pair_bound_violations(pts, dist, &order, v);
    }
    let first = first_cover_multicell(&order, v, pts, geo.buckets());
    let reps = select_representatives(geo, &order, eps);
    let sites: Vec<WeightedSite<T>> = reps
        .iter()
        .rev()
        .map(|&pos| WeightedSite::new(pts[order[pos]], dist[order[pos]], pos))
        .collect();
    let mut queries = Vec::new();
    let mut targets = Vec::new();
    for (&vi, fc) in v.iter().zip(first) {
        if let Some(i) = fc {
            // Representatives at positions >= i are already inserted.
            queries.push((reps.len() - reps.partition_point(|&r| r < i), pts[vi]));
            targets.push((vi, i));
        }
    }
    let answers = offline_answers(&sites, &queries);
    let half_eps = eps.value() * T::half();
    for ((vi, i), ans) in targets.into_iter().zip(answers) {
        let mut p = ans.map_or(order[i], |a| order[a.tag]);
        if !within_unit(pts[p], pts[vi]) {
            p = order[i];
        }
        let value = dist[p] + pts[p].dist(pts[vi]);
        if checks {
            let best = order
                .iter()
                .filter(|&&r| within_unit(pts[r], pts[vi]))
                .map(|&r| dist[r] + pts[r].dist(pts[vi]))
                .fold(T::infinity(), T::min);
            if value > best + half_eps + T::lit(REL_TOL) {
                out.slack += 1;
            }
        }
        if !within_unit(pts[p], pts[vi]) {
            out.off_disk += 1;
            continue;
        }
        out.offer(dist, vi, value, p);
    }
    out
}

/// Samples the entry condition `|h(u) - h(u')| <= 2|u - u'|` with
/// `h(x) = dist[x] + |x - a|`, over a spread of pairs from `order` and
/// anchors from `v`.
fn pair_bound_violations<T: Scalar>(pts: &[Point<T>], dist: &[T], order: &[usize], v: &[usize]) -> usize {
    const SAMPLES: usize = 8;
    let pick = |xs: &[usize]| -> Vec<usize> {
        let step = xs.len().div_ceil(SAMPLES).max(1);
        xs.iter().copied().step_by(step).collect()
    };
    let us = pick(order);
    let anchors = pick(v);
    let mut bad = 0;
    for &a in &anchors {
        let h = |x: usize| dist[x] + pts[x].dist(pts[a]);
        for (k, &x) in us.iter().enumerate() {
            for &y in &us[k + 1..] {
                let (hx, hy) = (h(x), h(y));
                let slack = T::lit(REL_TOL) * T::one().max(hx).max(hy);
                if (hx - hy).abs() > T::two() * pts[x].dist(pts[y]) + slack {
                    bad += 1;
                }
            }
        }
    }
    bad
}
