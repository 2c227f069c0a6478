//! Batched Dijkstra over grid cells: the exact solver and the
//! `(1 + eps)`-approximate solver share the state, frontier and the generic
//! update defined here.

mod approx;
mod exact;

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::geom::{
    build_buckets, normalize_points, within_unit, CellBuckets, FloorMode, Grid, GridIndex, Normalized, Point, PointSet,
};
use crate::scalar::{cmp_scalar, rel_close, OrdScalar, Scalar};

pub use approx::{approx_update, select_representatives, sssp_approx, sssp_approx_with, Epsilon};
pub use exact::{first_update, sssp_exact, sssp_exact_with, update};

/// Relative tolerance for every distance comparison made during validation.
pub const REL_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("epsilon must be finite and positive, got {0}")]
    BadEpsilon(f64),
    #[error("epsilon {eps} is too small for {n} points: fine-grid indices lose precision")]
    EpsilonTooSmall { eps: f64, n: usize },
}

/// Distances and shortest-path-tree predecessors, indexed by point.
#[derive(Debug, Clone, PartialEq)]
pub struct SsspResult<T> {
    pub dist: Vec<T>,
    pub pred: Vec<Option<usize>>,
}

impl<T: Scalar> SsspResult<T> {
    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    /// Whether `a`'s pred link is a unit-disk edge whose length accounts for
    /// `dist[a]`. Vertices without a pred are trivially consistent.
    pub fn consistent_at(&self, points: &[Point<T>], a: usize) -> bool {
        link_consistent(&self.dist, &self.pred, points, a)
    }
}

/// Ordered set of `(dist, index)` over the active points.
#[derive(Debug, Clone)]
pub struct Frontier<T> {
    set: BTreeSet<(OrdScalar<T>, usize)>,
    key: Vec<Option<T>>,
}

impl<T: Scalar> Frontier<T> {
    pub fn new(n: usize) -> Self {
        Frontier { set: BTreeSet::new(), key: vec![None; n] }
    }

    pub fn insert(&mut self, i: usize, d: T) {
        if let Some(old) = self.key[i].replace(d) {
            self.set.remove(&(OrdScalar(old), i));
        }
        self.set.insert((OrdScalar(d), i));
    }

    /// Re-keys `i` if it is present.
    pub fn update(&mut self, i: usize, d: T) {
        if self.key[i].is_some() {
            self.insert(i, d);
        }
    }

    pub fn remove(&mut self, i: usize) {
        if let Some(old) = self.key[i].take() {
            self.set.remove(&(OrdScalar(old), i));
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.key[i].is_some()
    }

    /// Smallest dist, ties by smallest index.
    pub fn min(&self) -> Option<(T, usize)> {
        self.set.first().map(|&(OrdScalar(d), i)| (d, i))
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }
}

/// Knobs shared by both solvers.
#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOptions<'a, T> {
    pub floor: FloorMode,
    /// Run the per-iteration invariant checks and count violations.
    pub checks: bool,
    /// Fault injection: skip the update that corrects the chosen cell from its patch.
    pub skip_first_update: bool,
    /// Known exact distances; with `checks`, every retired point is compared to them.
    pub reference: Option<&'a [T]>,
}

/// Violation counts gathered when [`SolveOptions::checks`] is set. Some
/// counters are maintained unconditionally because the test is free.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub iterations: usize,
    /// First-update answers outside the query's unit disk.
    pub first_update_off_disk: usize,
    /// Update answers outside the query's unit disk.
    pub update_off_disk: usize,
    /// Approximate-update answers worse than the best covering disk by more than eps/2.
    pub approx_slack: usize,
    /// Pairs violating `|h(u) - h(u')| <= 2|u - u'|` at approximate-update entry.
    pub pair_bound: usize,
    /// A cell chosen twice.
    pub repeated_cell: usize,
    /// Pred links that do not account for their vertex's dist.
    pub inconsistent: usize,
    /// Retired points whose dist differs from the reference.
    pub early_retire: usize,
}

impl CheckReport {
    pub fn is_clean(&self) -> bool {
        self.first_update_off_disk == 0
            && self.update_off_disk == 0
            && self.approx_slack == 0
            && self.pair_bound == 0
            && self.repeated_cell == 0
            && self.inconsistent == 0
            && self.early_retire == 0
    }
}

/// The input points with the grid built over their translated copy.
/// Distances and edge tests use the caller's coordinates; grid location uses
/// the translated copy, so the graph is exactly the one the oracle sees.
#[derive(Debug, Clone)]
pub struct Geometry<'a, T> {
    points: &'a [Point<T>],
    normalized: Normalized<T>,
    buckets: CellBuckets<T>,
}

impl<'a, T: Scalar> Geometry<'a, T> {
    pub fn new(ps: &'a PointSet<T>, floor: FloorMode) -> Self {
        let normalized = normalize_points(ps);
        let buckets = build_buckets(&normalized, Grid::coarse(floor)).expect("normalized points lie in the grid range");
        Geometry { points: ps.points(), normalized, buckets }
    }

    pub fn points(&self) -> &'a [Point<T>] {
        self.points
    }

    /// Translated coordinates, used only for grid location.
    pub fn normalized(&self) -> &Normalized<T> {
        &self.normalized
    }

    pub fn buckets(&self) -> &CellBuckets<T> {
        &self.buckets
    }

    pub fn floor(&self) -> FloorMode {
        self.buckets.grid().floor_mode()
    }
}

/// `dist[target] <- dist, pred[target] <- pred`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Relaxation<T> {
    pub target: usize,
    pub dist: T,
    pub pred: usize,
}

/// Strict improvements found by one update plus the violations it observed.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateOutcome<T> {
    pub relaxations: Vec<Relaxation<T>>,
    /// Answers outside the query's unit disk (dropped).
    pub off_disk: usize,
    /// Approximate answers worse than the best covering disk by more than eps/2.
    pub slack: usize,
    /// Pairs violating `|h(u) - h(u')| <= 2|u - u'|` on entry.
    pub pair_bound: usize,
}

impl<T> Default for UpdateOutcome<T> {
    fn default() -> Self {
        UpdateOutcome { relaxations: Vec::new(), off_disk: 0, slack: 0, pair_bound: 0 }
    }
}

impl<T: Scalar> UpdateOutcome<T> {
    /// Records `d` via `p` for `v` if it beats the current value.
    pub(crate) fn offer(&mut self, dist: &[T], v: usize, d: T, p: usize) {
        if d < dist[v] {
            self.relaxations.push(Relaxation { target: v, dist: d, pred: p });
        }
    }
}

/// Finite-dist members of `u` sorted by `(dist, index)`.
pub(crate) fn sorted_finite<T: Scalar>(dist: &[T], u: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = u.iter().copied().filter(|&i| dist[i].is_finite()).collect();
    order.sort_unstable_by(|&a, &b| cmp_scalar(dist[a], dist[b]).then(a.cmp(&b)));
    order
}

/// The chosen cell of one iteration with its active members and active patch.
pub(crate) struct Step {
    pub cell: GridIndex,
    pub members: Vec<usize>,
    pub patch: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Phase {
    First,
    Exact,
    Approx,
}

pub(crate) struct State<'a, T: Scalar> {
    pub geo: Geometry<'a, T>,
    pub dist: Vec<T>,
    pub pred: Vec<Option<usize>>,
    pub frontier: Frontier<T>,
    pub checks: bool,
    pub reference: Option<&'a [T]>,
    pub report: CheckReport,
    source: usize,
    chosen: HashSet<GridIndex>,
}

impl<'a, T: Scalar> State<'a, T> {
    pub fn new(ps: &'a PointSet<T>, opts: &SolveOptions<'a, T>) -> Self {
        let geo = Geometry::new(ps, opts.floor);
        let n = ps.len();
        let mut frontier = Frontier::new(n);
        let mut dist = vec![T::infinity(); n];
        dist[ps.source()] = T::zero();
        for (i, &d) in dist.iter().enumerate() {
            if !geo.normalized.is_outside(i) {
                frontier.insert(i, d);
            }
        }
        State {
            geo,
            dist,
            pred: vec![None; n],
            frontier,
            checks: opts.checks,
            reference: opts.reference,
            report: CheckReport::default(),
            source: ps.source(),
            chosen: HashSet::new(),
        }
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn relax(&mut self, v: usize, d: T, p: usize) {
        if d < self.dist[v] {
            self.dist[v] = d;
            self.pred[v] = Some(p);
            self.frontier.update(v, d);
        }
    }

    /// Applies an update's improvements and folds its counters into the report.
    pub fn apply(&mut self, outcome: UpdateOutcome<T>, phase: Phase, touched: &[usize]) {
        match phase {
            Phase::First => self.report.first_update_off_disk += outcome.off_disk,
            Phase::Exact | Phase::Approx => self.report.update_off_disk += outcome.off_disk,
        }
        self.report.approx_slack += outcome.slack;
        self.report.pair_bound += outcome.pair_bound;
        for r in outcome.relaxations {
            self.relax(r.target, r.dist, r.pred);
        }
        self.check_consistency(touched);
    }

    /// Picks the cell of the frontier minimum, or `None` once every remaining
    /// point is unreachable.
    pub fn next_step(&mut self) -> Option<Step> {
        let (d, c) = self.frontier.min()?;
        if d.is_infinite() {
            return None;
        }
        let buckets = &self.geo.buckets;
        let cell = buckets.cell_of(c).expect("frontier points are gridded");
        if self.checks && !self.chosen.insert(cell) {
            self.report.repeated_cell += 1;
        }
        self.report.iterations += 1;
        let members = buckets.cell(cell).iter().copied().filter(|&i| self.frontier.contains(i)).collect();
        let mut patch = Vec::new();
        for pc in cell.patch() {
            patch.extend(buckets.cell(pc).iter().copied().filter(|&i| self.frontier.contains(i)));
        }
        Some(Step { cell, members, patch })
    }

    pub fn retire(&mut self, members: &[usize]) {
        for &a in members {
            self.frontier.remove(a);
            if self.checks {
                if let Some(r) = self.reference {
                    if !rel_close(self.dist[a], r[a], REL_TOL) {
                        self.report.early_retire += 1;
                    }
                }
            }
        }
    }

    pub fn check_consistency(&mut self, touched: &[usize]) {
        if !self.checks {
            return;
        }
        let pts = self.geo.points;
        let bad = touched
            .iter()
            .filter(|&&a| !link_consistent(&self.dist, &self.pred, pts, a))
            .count();
        self.report.inconsistent += bad;
    }

    pub fn finish(mut self) -> (SsspResult<T>, CheckReport) {
        if self.checks {
            let all: Vec<usize> = (0..self.dist.len()).collect();
            self.check_consistency(&all);
        }
        debug_assert_eq!(self.dist[self.source], T::zero());
        (SsspResult { dist: self.dist, pred: self.pred }, self.report)
    }
}

fn link_consistent<T: Scalar>(dist: &[T], pred: &[Option<usize>], points: &[Point<T>], a: usize) -> bool {
    match pred[a] {
        None => true,
        Some(p) => within_unit(points[p], points[a]) && rel_close(dist[a], dist[p] + points[p].dist(points[a]), REL_TOL),
    }
}
