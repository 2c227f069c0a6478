//! Ground truth: the explicit unit-disk graph, textbook Dijkstra, and a
//! validator for solver output.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;

use crate::geom::{within_unit, Point, PointSet};
use crate::scalar::{rel_close, OrdScalar, Scalar};
use crate::sssp::{Epsilon, SsspResult, REL_TOL};

/// How edges are enumerated. Both give the same graph; `Naive` shares no
/// code with the solvers beyond the edge predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeEnumeration {
    #[default]
    Grid,
    Naive,
}

/// Adjacency lists with Euclidean weights, each sorted by neighbor index.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitGraph<T> {
    adjacency: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> ExplicitGraph<T> {
    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, a: usize) -> &[(usize, T)] {
        &self.adjacency[a]
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn mean_degree(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        2.0 * self.num_edges() as f64 / self.len() as f64
    }
}

pub fn build_explicit_graph<T: Scalar>(ps: &PointSet<T>, how: EdgeEnumeration) -> ExplicitGraph<T> {
    let pts = ps.points();
    let mut adjacency: Vec<Vec<(usize, T)>> = vec![Vec::new(); pts.len()];
    let mut link = |a: usize, b: usize| {
        if within_unit(pts[a], pts[b]) {
            let w = pts[a].dist(pts[b]);
            adjacency[a].push((b, w));
            adjacency[b].push((a, w));
        }
    };
    match how {
        EdgeEnumeration::Naive => {
            for a in 0..pts.len() {
                for b in a + 1..pts.len() {
                    link(a, b);
                }
            }
        }
        EdgeEnumeration::Grid => {
            // Side-1 cells on the raw coordinates. Scanning two cells out
            // rather than one keeps every pair within rounding of distance 1.
            let cell = |p: Point<T>| (p.x.floor().to_i64().unwrap_or(0), p.y.floor().to_i64().unwrap_or(0));
            let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
            for (i, &p) in pts.iter().enumerate() {
                cells.entry(cell(p)).or_default().push(i);
            }
            for (a, &p) in pts.iter().enumerate() {
                let (cx, cy) = cell(p);
                for dx in -2..=2i64 {
                    for dy in -2..=2i64 {
                        let Some(list) = cells.get(&(cx.saturating_add(dx), cy.saturating_add(dy))) else {
                            continue;
                        };
                        for &b in list.iter().filter(|&&b| b > a) {
                            link(a, b);
                        }
                    }
                }
            }
        }
    }
    for list in &mut adjacency {
        list.sort_unstable_by_key(|&(b, _)| b);
        list.dedup_by_key(|e| e.0);
    }
    ExplicitGraph { adjacency }
}

/// Dijkstra with a binary heap; equal keys settle the smallest index first.
pub fn dijkstra_baseline<T: Scalar>(g: &ExplicitGraph<T>, s: usize) -> SsspResult<T> {
    let n = g.len();
    let mut dist = vec![T::infinity(); n];
    let mut pred = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[s] = T::zero();
    heap.push(Reverse((OrdScalar(T::zero()), s)));
    while let Some(Reverse((OrdScalar(d), a))) = heap.pop() {
        if done[a] || d > dist[a] {
            continue;
        }
        done[a] = true;
        for &(b, w) in g.neighbors(a) {
            let nd = d + w;
            if !done[b] && nd < dist[b] {
                dist[b] = nd;
                pred[b] = Some(a);
                heap.push(Reverse((OrdScalar(nd), b)));
            }
        }
    }
    SsspResult { dist, pred }
}

/// Builds the graph and runs Dijkstra from the set's source.
pub fn oracle_solve<T: Scalar>(ps: &PointSet<T>, how: EdgeEnumeration) -> SsspResult<T> {
    dijkstra_baseline(&build_explicit_graph(ps, how), ps.source())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Failure<T> {
    WrongLength { expected: usize, got: usize },
    SourceNotZero { dist: T },
    SourceHasPred,
    /// Finite dist without a pred, or a pred with infinite dist.
    PredMismatch { vertex: usize },
    PredOutOfRange { vertex: usize, pred: usize },
    PredEdgeTooLong { vertex: usize, pred: usize, length: T },
    Inconsistent { vertex: usize, dist: T, via_pred: T },
    /// Exact mode: differs from the reference.
    Mismatch { vertex: usize, got: T, expected: T },
    /// Approximate mode: below the reference.
    Underestimate { vertex: usize, got: T, reference: T },
    /// Approximate mode: above `(1 + eps)` times the reference.
    Overestimate { vertex: usize, got: T, bound: T },
}

impl<T: Scalar> fmt::Display for Failure<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::WrongLength { expected, got } => write!(f, "result has {got} rows, expected {expected}"),
            Failure::SourceNotZero { dist } => write!(f, "source dist is {dist}, expected 0"),
            Failure::SourceHasPred => write!(f, "source has a pred"),
            Failure::PredMismatch { vertex } => write!(f, "vertex {vertex}: dist finiteness disagrees with pred presence"),
            Failure::PredOutOfRange { vertex, pred } => write!(f, "vertex {vertex}: pred {pred} out of range"),
            Failure::PredEdgeTooLong { vertex, pred, length } => {
                write!(f, "vertex {vertex}: pred edge exceeds unit distance (pred {pred}, length {length})")
            }
            Failure::Inconsistent { vertex, dist, via_pred } => {
                write!(f, "vertex {vertex}: dist {dist} but pred chain gives {via_pred}")
            }
            Failure::Mismatch { vertex, got, expected } => write!(f, "vertex {vertex}: dist {got}, reference {expected}"),
            Failure::Underestimate { vertex, got, reference } => {
                write!(f, "vertex {vertex}: dist {got} below reference {reference}")
            }
            Failure::Overestimate { vertex, got, bound } => write!(f, "vertex {vertex}: dist {got} above bound {bound}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport<T> {
    pub failures: Vec<Failure<T>>,
}

impl<T> ValidationReport<T> {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `res` against the output contract and, with `reference`, against
/// known exact distances: equality within `REL_TOL` relative without `eps`,
/// `reference <= res <= (1 + eps) reference` with the same slack with it.
pub fn validate<T: Scalar>(
    res: &SsspResult<T>,
    ps: &PointSet<T>,
    eps: Option<Epsilon<T>>,
    reference: Option<&SsspResult<T>>,
) -> ValidationReport<T> {
    let pts = ps.points();
    let n = pts.len();
    let mut failures = Vec::new();
    if res.dist.len() != n || res.pred.len() != n {
        failures.push(Failure::WrongLength { expected: n, got: res.dist.len().min(res.pred.len()) });
        return ValidationReport { failures };
    }
    let s = ps.source();
    if res.dist[s] != T::zero() {
        failures.push(Failure::SourceNotZero { dist: res.dist[s] });
    }
    if res.pred[s].is_some() {
        failures.push(Failure::SourceHasPred);
    }
    for a in 0..n {
        let d = res.dist[a];
        match res.pred[a] {
            None if a != s && d.is_finite() => failures.push(Failure::PredMismatch { vertex: a }),
            None => {}
            Some(p) if p >= n => failures.push(Failure::PredOutOfRange { vertex: a, pred: p }),
            Some(p) => {
                let length = pts[p].dist(pts[a]);
                let via = res.dist[p] + length;
                if !d.is_finite() {
                    failures.push(Failure::PredMismatch { vertex: a });
                } else if !within_unit(pts[p], pts[a]) {
                    failures.push(Failure::PredEdgeTooLong { vertex: a, pred: p, length });
                } else if !rel_close(d, via, REL_TOL) {
                    failures.push(Failure::Inconsistent { vertex: a, dist: d, via_pred: via });
                }
            }
        }
    }
    if let Some(r) = reference {
        if r.dist.len() != n {
            failures.push(Failure::WrongLength { expected: n, got: r.dist.len() });
            return ValidationReport { failures };
        }
        for a in 0..n {
            let (got, want) = (res.dist[a], r.dist[a]);
            match eps {
                None => {
                    if !rel_close(got, want, REL_TOL) {
                        failures.push(Failure::Mismatch { vertex: a, got, expected: want });
                    }
                }
                Some(e) => {
                    if want.is_infinite() || got.is_infinite() {
                        if got != want {
                            failures.push(Failure::Mismatch { vertex: a, got, expected: want });
                        }
                        continue;
                    }
                    let slack = T::lit(REL_TOL) * T::one().max(want.abs());
                    let bound = (T::one() + e.value()) * want;
                    if got < want - slack {
                        failures.push(Failure::Underestimate { vertex: a, got, reference: want });
                    } else if got > bound + slack {
                        failures.push(Failure::Overestimate { vertex: a, got, bound });
                    }
                }
            }
        }
    }
    ValidationReport { failures }
}
