//! Sequential wall-clock timing of the solvers on generated instances.

use std::time::Instant;

use crate::geom::PointSet;
use crate::instance::{generate, Distribution, InstanceError};
use crate::sssp::{sssp_approx, sssp_exact, Epsilon};

/// Mean degree of benchmark instances.
pub const BENCH_DENSITY: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BenchMode {
    Exact,
    Approx(Epsilon<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRun {
    pub n: usize,
    pub rep: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchReport {
    pub runs: Vec<BenchRun>,
    /// `(n, median seconds)` per size, in input order.
    pub medians: Vec<(usize, f64)>,
    /// `(n, t(n) / t(n / 2))` for every size that doubles its predecessor.
    pub ratios: Vec<(usize, f64)>,
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m == 0 {
        f64::NAN
    } else if m % 2 == 1 {
        v[m / 2]
    } else {
        (v[m / 2 - 1] + v[m / 2]) / 2.0
    }
}

/// Times one solve; only the solver call is inside the clock.
pub fn time_solve(ps: &PointSet<f64>, mode: BenchMode) -> f64 {
    let start = Instant::now();
    match mode {
        BenchMode::Exact => {
            std::hint::black_box(sssp_exact(ps));
        }
        BenchMode::Approx(eps) => {
            std::hint::black_box(sssp_approx(ps, eps).expect("epsilon accepted for benchmark size"));
        }
    }
    start.elapsed().as_secs_f64()
}

/// For each size, one uniform instance (seeded by `seed` and the size) is
/// solved `reps` times from point 0, strictly one run after another, after
/// one untimed warm-up solve. Reps are interleaved across sizes so a slow
/// stretch of the machine does not land on a single size.
pub fn run_bench(sizes: &[usize], reps: usize, mode: BenchMode, seed: u64) -> Result<BenchReport, InstanceError> {
    let instances = sizes
        .iter()
        .map(|&n| {
            let pts = generate::<f64>(n, Distribution::Uniform, BENCH_DENSITY, seed ^ (n as u64).rotate_left(32))?;
            Ok(PointSet::new(pts, 0).expect("generated points are finite and non-empty"))
        })
        .collect::<Result<Vec<_>, InstanceError>>()?;
    for ps in &instances {
        time_solve(ps, mode);
    }
    let mut times = vec![Vec::with_capacity(reps); sizes.len()];
    for _ in 0..reps {
        for (t, ps) in times.iter_mut().zip(&instances) {
            t.push(time_solve(ps, mode));
        }
    }
    let mut report = BenchReport::default();
    for (&n, t) in sizes.iter().zip(&times) {
        report.runs.extend(t.iter().enumerate().map(|(rep, &seconds)| BenchRun { n, rep, seconds }));
        report.medians.push((n, median(t)));
    }
    for w in report.medians.windows(2) {
        let ((n0, t0), (n1, t1)) = (w[0], w[1]);
        if n1 == 2 * n0 {
            report.ratios.push((n1, t1 / t0));
        }
    }
    Ok(report)
}
