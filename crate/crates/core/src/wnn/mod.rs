//! Additively-weighted nearest neighbor: the site minimizing
//! `weight + |position - q|`.
//!
//! Ties on that key are broken by the smallest tag in every implementation,
//! so the brute-force scan, the static structures and the offline solver
//! agree exactly. Sites with infinite weight are legal and never returned.

mod kdtree;
mod offline;

pub use kdtree::KdWnn;
pub use offline::{offline_answers, offline_answers_with, offline_solve, offline_solve_with, Op, OpSequence, QueryId};

use std::cmp::Ordering;

use thiserror::Error;

use crate::geom::Point;
use crate::scalar::{cmp_scalar, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WnnError {
    #[error("query id {0} appears more than once")]
    DuplicateQueryId(QueryId),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedSite<T> {
    pub position: Point<T>,
    pub weight: T,
    pub tag: usize,
}

impl<T: Scalar> WeightedSite<T> {
    pub fn new(position: Point<T>, weight: T, tag: usize) -> Self {
        WeightedSite { position, weight, tag }
    }

    /// The comparison key. Every implementation evaluates this exact expression.
    #[inline]
    pub fn key(&self, q: Point<T>) -> T {
        self.weight + self.position.dist(q)
    }
}

/// Answer of a weighted nearest-neighbor query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nearest<T> {
    pub tag: usize,
    pub value: T,
}

impl<T: Scalar> Nearest<T> {
    #[inline]
    fn cmp_key(&self, other: &Self) -> Ordering {
        cmp_scalar(self.value, other.value).then(self.tag.cmp(&other.tag))
    }

    /// The better of two optional answers under (value, tag) order.
    #[inline]
    pub fn min_opt(a: Option<Self>, b: Option<Self>) -> Option<Self> {
        match (a, b) {
            (Some(x), Some(y)) => Some(if y.cmp_key(&x) == Ordering::Less { y } else { x }),
            (x, None) => x,
            (None, y) => y,
        }
    }
}

/// Linear scan reference.
pub fn wnn_brute<T: Scalar>(sites: &[WeightedSite<T>], q: Point<T>) -> Option<Nearest<T>> {
    let mut best: Option<Nearest<T>> = None;
    for s in sites {
        if !s.weight.is_finite() {
            continue;
        }
        let cand = Nearest { tag: s.tag, value: s.key(q) };
        best = Nearest::min_opt(best, Some(cand));
    }
    best
}

/// A structure over a fixed list of sites answering weighted NN queries
/// without any disk restriction.
pub trait StaticWnn<T: Scalar>: Sized {
    fn build(sites: &[WeightedSite<T>]) -> Self;
    fn query(&self, q: Point<T>) -> Option<Nearest<T>>;
}

/// Reference realization: keeps the finite sites and scans them.
#[derive(Debug, Clone)]
pub struct BruteWnn<T> {
    sites: Vec<WeightedSite<T>>,
}

impl<T: Scalar> StaticWnn<T> for BruteWnn<T> {
    fn build(sites: &[WeightedSite<T>]) -> Self {
        BruteWnn {
            sites: sites.iter().filter(|s| s.weight.is_finite()).copied().collect(),
        }
    }

    fn query(&self, q: Point<T>) -> Option<Nearest<T>> {
        wnn_brute(&self.sites, q)
    }
}

/// Builds the default accelerated structure.
pub fn static_build<T: Scalar>(sites: &[WeightedSite<T>]) -> KdWnn<T> {
    KdWnn::build(sites)
}

pub fn static_query<T: Scalar>(s: &KdWnn<T>, q: Point<T>) -> Option<Nearest<T>> {
    s.query(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn site(x: f64, y: f64, w: f64, tag: usize) -> WeightedSite<f64> {
        WeightedSite::new(Point::new(x, y), w, tag)
    }

    #[test]
    fn brute_examples() {
        let sites = [site(0.0, 0.0, 0.0, 0), site(2.0, 0.0, 0.0, 1)];
        assert_eq!(wnn_brute(&sites, Point::new(0.9, 0.0)), Some(Nearest { tag: 0, value: 0.9 }));
        assert_eq!(wnn_brute::<f64>(&[], Point::new(0.0, 0.0)), None);
        let sites = [site(0.0, 0.0, 5.0, 0), site(3.0, 0.0, 0.0, 1)];
        assert_eq!(wnn_brute(&sites, Point::new(0.0, 0.0)), Some(Nearest { tag: 1, value: 3.0 }));
    }

    #[test]
    fn brute_skips_infinite_and_breaks_ties_by_tag() {
        let sites = [site(0.0, 0.0, f64::INFINITY, 0), site(1.0, 0.0, 0.0, 7), site(-1.0, 0.0, 0.0, 3)];
        assert_eq!(wnn_brute(&sites, Point::new(0.0, 0.0)), Some(Nearest { tag: 3, value: 1.0 }));
        let all_inf = [site(0.0, 0.0, f64::INFINITY, 0)];
        assert_eq!(wnn_brute(&all_inf, Point::new(0.0, 0.0)), None);
    }

    #[test]
    fn static_examples() {
        let empty = static_build::<f64>(&[]);
        assert_eq!(static_query(&empty, Point::new(1.0, 2.0)), None);

        let one = static_build(&[site(0.3, 0.4, 1.0, 9)]);
        assert_eq!(static_query(&one, Point::new(0.0, 0.0)), Some(Nearest { tag: 9, value: 1.5 }));

        let s = static_build(&[site(0.3, 0.4, 0.0, 2), site(5.0, 5.0, 0.0, 1)]);
        assert_eq!(static_query(&s, Point::new(0.3, 0.4)), Some(Nearest { tag: 2, value: 0.0 }));

        let inf = static_build(&[site(0.0, 0.0, f64::INFINITY, 0), site(1.0, 0.0, f64::INFINITY, 1)]);
        assert_eq!(static_query(&inf, Point::new(0.0, 0.0)), None);
    }
}
