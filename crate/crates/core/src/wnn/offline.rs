//! Offline insertion-only weighted nearest neighbor.
//!
//! The operation stream is split at the insertion midpoint (first half
//! rounded up). Queries in the first half are answered recursively; queries
//! in the second half combine their recursive answer with one query against
//! a static structure built over all first-half insertions. Recursion depth
//! is `ceil(log2 m)` for `m` insertions, so a stream with few insertions
//! costs `O(n log^2 m)` no matter how many queries it carries.

use std::collections::{BTreeMap, HashSet};

use crate::geom::Point;
use crate::scalar::Scalar;

use super::{wnn_brute, KdWnn, Nearest, StaticWnn, WeightedSite, WnnError};

pub type QueryId = usize;

/// Below this many insertions a range is answered by scanning.
const SCAN_RANGE: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub enum Op<T> {
    Insert(WeightedSite<T>),
    Query { point: Point<T>, id: QueryId },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OpSequence<T> {
    pub ops: Vec<Op<T>>,
}

impl<T: Scalar> OpSequence<T> {
    pub fn new() -> Self {
        OpSequence { ops: Vec::new() }
    }

    pub fn insert(&mut self, site: WeightedSite<T>) {
        self.ops.push(Op::Insert(site));
    }

    pub fn query(&mut self, point: Point<T>, id: QueryId) {
        self.ops.push(Op::Query { point, id });
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn insertions(&self) -> usize {
        self.ops.iter().filter(|o| matches!(o, Op::Insert(_))).count()
    }

    /// Splits the stream into its insertion list and `(prefix, point)` queries,
    /// where `prefix` counts the insertions preceding the query.
    fn split(&self) -> Result<(Vec<WeightedSite<T>>, Vec<(usize, Point<T>)>, Vec<QueryId>), WnnError> {
        let mut sites = Vec::new();
        let mut queries = Vec::new();
        let mut ids = Vec::new();
        let mut seen = HashSet::new();
        for op in &self.ops {
            match *op {
                Op::Insert(s) => sites.push(s),
                Op::Query { point, id } => {
                    if !seen.insert(id) {
                        return Err(WnnError::DuplicateQueryId(id));
                    }
                    queries.push((sites.len(), point));
                    ids.push(id);
                }
            }
        }
        Ok((sites, queries, ids))
    }
}

/// Answers every query of `ops` against the sites inserted before it.
pub fn offline_solve<T: Scalar>(ops: &OpSequence<T>) -> Result<BTreeMap<QueryId, Option<Nearest<T>>>, WnnError> {
    offline_solve_with::<T, KdWnn<T>>(ops)
}

/// [`offline_solve`] over a chosen static structure.
pub fn offline_solve_with<T: Scalar, S: StaticWnn<T>>(
    ops: &OpSequence<T>,
) -> Result<BTreeMap<QueryId, Option<Nearest<T>>>, WnnError> {
    let (sites, queries, ids) = ops.split()?;
    let answers = offline_answers_with::<T, S>(&sites, &queries);
    Ok(ids.into_iter().zip(answers).collect())
}

/// Dense form: `queries[j] = (prefix, point)` sees `sites[..prefix]`.
pub fn offline_answers<T: Scalar>(sites: &[WeightedSite<T>], queries: &[(usize, Point<T>)]) -> Vec<Option<Nearest<T>>> {
    offline_answers_with::<T, KdWnn<T>>(sites, queries)
}

pub fn offline_answers_with<T: Scalar, S: StaticWnn<T>>(
    sites: &[WeightedSite<T>],
    queries: &[(usize, Point<T>)],
) -> Vec<Option<Nearest<T>>> {
    let mut out = vec![None; queries.len()];
    let pending: Vec<usize> = (0..queries.len()).filter(|&j| queries[j].0 > 0).collect();
    debug_assert!(queries.iter().all(|q| q.0 <= sites.len()));
    solve_range::<T, S>(sites, 0, sites.len(), pending, queries, &mut out);
    out
}

fn solve_range<T: Scalar, S: StaticWnn<T>>(
    sites: &[WeightedSite<T>],
    lo: usize,
    hi: usize,
    pending: Vec<usize>,
    queries: &[(usize, Point<T>)],
    out: &mut [Option<Nearest<T>>],
) {
    if pending.is_empty() {
        return;
    }
    if hi - lo <= SCAN_RANGE {
        for j in pending {
            let (prefix, q) = queries[j];
            out[j] = Nearest::min_opt(out[j], wnn_brute(&sites[lo..prefix], q));
        }
        return;
    }
    let mid = lo + (hi - lo).div_ceil(2);
    let (left, right): (Vec<usize>, Vec<usize>) = pending.into_iter().partition(|&j| queries[j].0 <= mid);
    if !right.is_empty() {
        let first_half = S::build(&sites[lo..mid]);
        for &j in &right {
            out[j] = Nearest::min_opt(out[j], first_half.query(queries[j].1));
        }
    }
    solve_range::<T, S>(sites, lo, mid, left, queries, out);
    solve_range::<T, S>(sites, mid, hi, right, queries, out);
}
