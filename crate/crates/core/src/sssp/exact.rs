use crate::envelope::first_cover_multicell;
use crate::geom::{within_unit, PointSet};
use crate::scalar::Scalar;
use crate::wnn::{offline_answers, KdWnn, StaticWnn, WeightedSite};

use super::{sorted_finite, CheckReport, Geometry, Phase, SolveOptions, SsspResult, State, UpdateOutcome};

/// Exact single-source shortest paths in the weighted unit-disk graph.
pub fn sssp_exact<T: Scalar>(ps: &PointSet<T>) -> SsspResult<T> {
    sssp_exact_with(ps, &SolveOptions::default()).0
}

pub fn sssp_exact_with<'a, T: Scalar>(ps: &'a PointSet<T>, opts: &SolveOptions<'a, T>) -> (SsspResult<T>, CheckReport) {
    let mut st = State::new(ps, opts);
    while let Some(step) = st.next_step() {
        if !opts.skip_first_update {
            let out = first_update(&st.geo, &st.dist, &step.patch, &step.members);
            st.apply(out, Phase::First, &step.members);
        }
        let out = update(&st.geo, &st.dist, &step.members, &step.patch);
        st.apply(out, Phase::Exact, &step.patch);
        st.retire(&step.members);
    }
    st.finish()
}

/// Improves each `r` in `cell` by `min over p in patch of dist[p] + |p - r|`
/// with one static structure and no disk constraint. Exact when the patch
/// holds the frontier minimum of `cell`'s cell: every site off `r`'s unit
/// disk then loses to that minimum. Off-disk answers are counted and dropped.
pub fn first_update<T: Scalar>(geo: &Geometry<'_, T>, dist: &[T], patch: &[usize], cell: &[usize]) -> UpdateOutcome<T> {
    static_update(geo, dist, patch, cell)
}

pub(crate) fn static_update<T: Scalar>(geo: &Geometry<'_, T>, dist: &[T], u: &[usize], v: &[usize]) -> UpdateOutcome<T> {
    let pts = geo.points();
    let mut out = UpdateOutcome::default();
    let sites: Vec<WeightedSite<T>> = u
        .iter()
        .filter(|&&i| dist[i].is_finite())
        .map(|&i| WeightedSite::new(pts[i], dist[i], i))
        .collect();
    if sites.is_empty() {
        return out;
    }
    let tree = KdWnn::build(&sites);
    for &r in v {
        let Some(a) = tree.query(pts[r]) else { continue };
        if !within_unit(pts[a.tag], pts[r]) {
            out.off_disk += 1;
            debug_assert!(false, "nearest site of {r} lies off its unit disk");
            continue;
        }
        out.offer(dist, r, a.value, a.tag);
    }
    out
}

/// Improves each `v` by `min over u in U adjacent to v of dist[u] + |u - v|`,
/// reading `dist` as it is on entry. `U` is inserted into one offline
/// insertion-only stream in decreasing dist order and each `v` is queried
/// right after its first-cover disk, so every site it sees weighs at least
/// as much as a disk that covers it and the winner therefore covers it too.
pub fn update<T: Scalar>(geo: &Geometry<'_, T>, dist: &[T], u: &[usize], v: &[usize]) -> UpdateOutcome<T> {
    let pts = geo.points();
    let mut out = UpdateOutcome::default();
    let order = sorted_finite(dist, u);
    if order.is_empty() || v.is_empty() {
        return out;
    }
    let m = order.len();
    let first = first_cover_multicell(&order, v, pts, geo.buckets());
    // Tags are sort positions, so equal keys resolve to the earliest disk.
    let sites: Vec<WeightedSite<T>> = (0..m)
        .rev()
        .map(|pos| WeightedSite::new(pts[order[pos]], dist[order[pos]], pos))
        .collect();
    let mut queries = Vec::new();
    let mut targets = Vec::new();
    for (&vi, fc) in v.iter().zip(first) {
        if let Some(i) = fc {
            queries.push((m - i, pts[vi]));
            targets.push(vi);
        }
    }
    let answers = offline_answers(&sites, &queries);
    for (vi, ans) in targets.into_iter().zip(answers) {
        let a = ans.expect("the first-cover disk precedes the query");
        let p = order[a.tag];
        if !within_unit(pts[p], pts[vi]) {
            out.off_disk += 1;
            debug_assert!(false, "update answer for {vi} lies off its unit disk");
            continue;
        }
        out.offer(dist, vi, a.value, p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{FloorMode, Point};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn apply(dist: &mut [f64], out: &UpdateOutcome<f64>) {
        for r in &out.relaxations {
            dist[r.target] = r.dist;
        }
    }

    /// `min(dist[v], min over u in U adjacent to v of dist[u] + |u - v|)`.
    fn brute(pts: &[Point<f64>], dist: &[f64], u: &[usize], v: usize) -> f64 {
        u.iter()
            .filter(|&&i| within_unit(pts[i], pts[v]))
            .map(|&i| dist[i] + pts[i].dist(pts[v]))
            .fold(dist[v], f64::min)
    }

    #[test]
    fn single_source_and_chain() {
        let ps = PointSet::from_xy(&[(0.0, 0.0)], 0).unwrap();
        let r = sssp_exact(&ps);
        assert_eq!((r.dist, r.pred), (vec![0.0], vec![None]));

        let ps = PointSet::from_xy(&[(0.0, 0.0), (0.8, 0.0), (1.6, 0.0)], 0).unwrap();
        let r = sssp_exact(&ps);
        assert_eq!(r.dist, vec![0.0, 0.8, 1.6]);
        assert_eq!(r.pred, vec![None, Some(0), Some(1)]);
    }

    #[test]
    fn unreachable_points_stay_infinite() {
        let ps = PointSet::from_xy(&[(0.0, 0.0), (0.5, 0.0), (3.0, 0.0), (3.5, 0.0), (100.0, 0.0)], 0).unwrap();
        let r = sssp_exact(&ps);
        assert_eq!(r.dist[1], 0.5);
        assert!(r.dist[2..].iter().all(|d: &f64| d.is_infinite()));
        assert!(r.pred[2..].iter().all(Option::is_none));
    }

    #[test]
    fn first_update_examples() {
        let ps = PointSet::from_xy(&[(0.1, 0.1), (0.3, 0.2), (0.2, 0.4)], 0).unwrap();
        let geo = Geometry::new(&ps, FloorMode::Native);
        let pts = ps.points();
        let dist = [1.0, f64::INFINITY, 5.0];
        let out = first_update(&geo, &dist, &[0], &[0, 1, 2]);
        let expect: Vec<_> = [1, 2].iter().map(|&r| (r, 1.0 + pts[0].dist(pts[r]), 0)).collect();
        let got: Vec<_> = out.relaxations.iter().map(|r| (r.target, r.dist, r.pred)).collect();
        assert_eq!(got, expect);
        // Infinite weights elsewhere in the patch change nothing.
        let out2 = first_update(&geo, &dist.map(|d| if d == 5.0 { f64::INFINITY } else { d }), &[0, 1, 2], &[0, 1, 2]);
        assert_eq!(out2.relaxations, out.relaxations);
    }

    #[test]
    fn update_examples() {
        let ps = PointSet::from_xy(&[(0.0, 0.0), (0.6, 0.0), (5.0, 5.0)], 0).unwrap();
        let geo = Geometry::new(&ps, FloorMode::Native);
        let dist = [0.25, 2.0, 9.0];
        let out = update(&geo, &dist, &[0], &[1, 2]);
        assert_eq!(out.relaxations.len(), 1);
        assert_eq!(out.relaxations[0].target, 1);
        assert_eq!(out.relaxations[0].dist, 0.25 + 0.6);
        // No improvement when the current value already wins.
        let out = update(&geo, &[0.25, 0.5, 9.0], &[0], &[1]);
        assert!(out.relaxations.is_empty());
    }

    #[test]
    fn update_matches_brute_force_on_random_subsets() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..60 {
            let n = 120;
            let xy: Vec<(f64, f64)> = (0..n).map(|_| (rng.random_range(0.0..3.0), rng.random_range(0.0..3.0))).collect();
            let ps = PointSet::from_xy(&xy, 0).unwrap();
            let geo = Geometry::new(&ps, FloorMode::Native);
            let dist: Vec<f64> = (0..n)
                .map(|_| if rng.random_bool(0.1) { f64::INFINITY } else { rng.random_range(0.0..2.0) })
                .collect();
            let u: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.4)).collect();
            let v: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
            let out = update(&geo, &dist, &u, &v);
            assert_eq!(out.off_disk, 0);
            let mut after = dist.clone();
            apply(&mut after, &out);
            for &vi in &v {
                assert_eq!(after[vi], brute(ps.points(), &dist, &u, vi), "vertex {vi}");
            }
        }
    }

    #[test]
    fn first_update_matches_brute_force_in_one_cell() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..60 {
            let n = 80;
            let xy: Vec<(f64, f64)> = (0..n).map(|_| (rng.random_range(0.0..2.5), rng.random_range(0.0..2.5))).collect();
            let ps = PointSet::from_xy(&xy, 0).unwrap();
            let geo = Geometry::new(&ps, FloorMode::Native);
            let b = geo.buckets();
            let c = rng.random_range(0..n);
            let cell_id = b.cell_of(c).unwrap();
            let cell = b.cell(cell_id).to_vec();
            let patch = b.patch_points(cell_id);
            // c is the minimum of its patch; every other weight is at least dist[c].
            let mut dist: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..3.0)).collect();
            dist[c] = 1.0;
            let out = first_update(&geo, &dist, &patch, &cell);
            assert_eq!(out.off_disk, 0);
            let mut after = dist.clone();
            apply(&mut after, &out);
            for &r in &cell {
                assert_eq!(after[r], brute(ps.points(), &dist, &patch, r));
            }
        }
    }
}
