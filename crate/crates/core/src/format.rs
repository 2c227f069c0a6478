//! The `index,dist,pred` result table.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::scalar::Scalar;
use crate::sssp::SsspResult;

pub const CSV_HEADER: &str = "index,dist,pred";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormatError {
    #[error("missing header line {CSV_HEADER:?}")]
    MissingHeader,
    #[error("line {line}: {reason}")]
    Row { line: usize, reason: String },
}

/// One row per vertex in index order; `inf` for unreachable vertices and an
/// empty pred field where there is none. Distances use the shortest decimal
/// that parses back to the same value.
pub fn write_csv<T: Scalar>(res: &SsspResult<T>) -> String {
    let mut s = String::with_capacity(24 * res.len() + CSV_HEADER.len() + 1);
    s.push_str(CSV_HEADER);
    s.push('\n');
    for (i, (d, p)) in res.dist.iter().zip(&res.pred).enumerate() {
        let _ = write!(s, "{i},");
        if d.is_infinite() {
            s.push_str("inf");
        } else {
            let _ = write!(s, "{d}");
        }
        s.push(',');
        if let Some(p) = p {
            let _ = write!(s, "{p}");
        }
        s.push('\n');
    }
    s
}

pub fn parse_csv<T: Scalar + FromStr>(text: &str) -> Result<SsspResult<T>, FormatError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => return Err(FormatError::MissingHeader),
    }
    let mut res = SsspResult { dist: Vec::new(), pred: Vec::new() };
    for (k, line) in lines {
        let row = |reason: &str| FormatError::Row { line: k + 1, reason: reason.to_string() };
        let fields: Vec<&str> = line.trim().split(',').collect();
        let [idx, dist, pred] = fields[..] else {
            return Err(row("expected three fields"));
        };
        if idx.parse::<usize>().ok() != Some(res.dist.len()) {
            return Err(row("index out of order"));
        }
        let d = if dist == "inf" {
            T::infinity()
        } else {
            dist.parse::<T>().map_err(|_| row("bad dist"))?
        };
        let p = if pred.is_empty() {
            None
        } else {
            Some(pred.parse::<usize>().map_err(|_| row("bad pred"))?)
        };
        res.dist.push(d);
        res.pred.push(p);
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_rows() {
        let res = SsspResult { dist: vec![0.0, 0.8, 1.6, f64::INFINITY], pred: vec![None, Some(0), Some(1), None] };
        let text = write_csv(&res);
        assert_eq!(text, "index,dist,pred\n0,0,\n1,0.8,0\n2,1.6,1\n3,inf,\n");
        assert_eq!(parse_csv::<f64>(&text).unwrap(), res);
    }

    #[test]
    fn round_trips_awkward_values() {
        let res = SsspResult { dist: vec![0.1 + 0.2, 1e-300, 123456.789e10], pred: vec![None, Some(0), Some(1)] };
        assert_eq!(parse_csv::<f64>(&write_csv(&res)).unwrap(), res);
    }

    #[test]
    fn rejects_malformed_tables() {
        assert_eq!(parse_csv::<f64>("0,0,\n"), Err(FormatError::MissingHeader));
        assert!(parse_csv::<f64>("index,dist,pred\n1,0,\n").is_err());
        assert!(parse_csv::<f64>("index,dist,pred\n0,x,\n").is_err());
        assert!(parse_csv::<f64>("index,dist,pred\n0,0\n").is_err());
    }
}
