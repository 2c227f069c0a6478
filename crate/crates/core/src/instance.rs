//! Seeded random instances and the plain-text point format.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};
use thiserror::Error;

use crate::geom::Point;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    /// I.i.d. uniform in a square sized for the requested mean degree.
    Uniform,
    /// `ceil(sqrt(n))` Gaussian blobs, each spread for the requested mean degree.
    Clusters,
}

impl FromStr for Distribution {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Distribution::Uniform),
            "clusters" => Ok(Distribution::Clusters),
            other => Err(InstanceError::UnknownDistribution(other.to_string())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error("n must be at least 1")]
    Empty,
    #[error("density must be finite and positive, got {0}")]
    BadDensity(f64),
    #[error("unknown distribution {0:?} (expected uniform or clusters)")]
    UnknownDistribution(String),
    #[error("line {line}: expected two numbers, got {text:?}")]
    Parse { line: usize, text: String },
}

/// Generates `n` points; identical arguments give identical output.
pub fn generate<T: Scalar>(n: usize, dist: Distribution, density: f64, seed: u64) -> Result<Vec<Point<T>>, InstanceError> {
    if n == 0 {
        return Err(InstanceError::Empty);
    }
    if !(density.is_finite() && density > 0.0) {
        return Err(InstanceError::BadDensity(density));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xy: Vec<(f64, f64)> = match dist {
        Distribution::Uniform => {
            // Interior degree of a uniform point is (n - 1) * pi / side^2.
            let side = ((n - 1) as f64 * std::f64::consts::PI / density).sqrt().max(1.0);
            (0..n).map(|_| (rng.random_range(0.0..side), rng.random_range(0.0..side))).collect()
        }
        Distribution::Clusters => {
            let k = (n as f64).sqrt().ceil() as usize;
            let per = n.div_ceil(k);
            // Within a blob of std dev sigma, P(|a - b| <= 1) = 1 - exp(-1 / (4 sigma^2)).
            let p = (density / (per.max(2) - 1) as f64).min(1.0 - 1e-9);
            let sigma = (-0.25 / (1.0 - p).ln()).sqrt();
            let spacing = 6.0 * sigma + 2.0;
            let side = (k as f64).sqrt().ceil() * spacing;
            let normal = Normal::new(0.0, sigma).expect("positive sigma");
            let centers: Vec<(f64, f64)> = (0..k).map(|_| (rng.random_range(0.0..side), rng.random_range(0.0..side))).collect();
            (0..n)
                .map(|i| {
                    let (cx, cy) = centers[i % k];
                    (cx + normal.sample(&mut rng), cy + normal.sample(&mut rng))
                })
                .collect()
        }
    };
    Ok(xy
        .into_iter()
        .map(|(x, y)| Point::new(T::lit(x), T::lit(y)))
        .collect())
}

/// One point per line, two whitespace-separated numbers; `#` starts a
/// comment line and blank lines are skipped.
pub fn parse_points<T: Scalar + FromStr>(text: &str) -> Result<Vec<Point<T>>, InstanceError> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let bad = || InstanceError::Parse { line: k + 1, text: line.to_string() };
        let mut it = t.split_whitespace();
        let (Some(x), Some(y), None) = (it.next(), it.next(), it.next()) else {
            return Err(bad());
        };
        let (x, y) = (x.parse::<T>().map_err(|_| bad())?, y.parse::<T>().map_err(|_| bad())?);
        if !(x.is_finite() && y.is_finite()) {
            return Err(bad());
        }
        out.push(Point::new(x, y));
    }
    Ok(out)
}

/// Shortest round-trip decimal form, so parsing gives back the same values.
pub fn write_points<T: Scalar>(points: &[Point<T>], header: Option<&str>) -> String {
    let mut s = String::new();
    if let Some(h) = header {
        for line in h.lines() {
            let _ = writeln!(s, "# {line}");
        }
    }
    for p in points {
        let _ = writeln!(s, "{} {}", p.x, p.y);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let a = generate::<f64>(500, Distribution::Clusters, 8.0, 9).unwrap();
        assert_eq!(a, generate::<f64>(500, Distribution::Clusters, 8.0, 9).unwrap());
        assert_ne!(a, generate::<f64>(500, Distribution::Clusters, 8.0, 10).unwrap());
        assert_eq!(generate::<f64>(1, Distribution::Uniform, 10.0, 0).unwrap().len(), 1);
    }

    #[test]
    fn bad_parameters_rejected() {
        assert_eq!(generate::<f64>(0, Distribution::Uniform, 1.0, 0), Err(InstanceError::Empty));
        assert!(generate::<f64>(5, Distribution::Uniform, 0.0, 0).is_err());
        assert!("gauss".parse::<Distribution>().is_err());
    }

    #[test]
    fn text_round_trip() {
        let pts = generate::<f64>(200, Distribution::Uniform, 5.0, 1).unwrap();
        let text = write_points(&pts, Some("n=200\nseed=1"));
        assert!(text.starts_with("# n=200\n# seed=1\n"));
        assert_eq!(parse_points::<f64>(&text).unwrap(), pts);
        let err = parse_points::<f64>("0 0\n1 2 3\n").unwrap_err();
        assert_eq!(err, InstanceError::Parse { line: 2, text: "1 2 3".into() });
        assert!(parse_points::<f64>("nan 0\n").is_err());
        assert_eq!(parse_points::<f64>("\n# c\n 0.5\t-1 \n").unwrap(), vec![Point::new(0.5, -1.0)]);
    }
}
