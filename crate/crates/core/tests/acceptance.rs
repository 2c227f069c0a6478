//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the timing criterion has the machine to itself.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use udsp::bench::{median, run_bench, time_solve, BenchMode};
use udsp::envelope::{first_cover, Envelope};
use udsp::format::write_csv;
use udsp::geom::{simulated_floor, within_unit, FloorMode, Point};
use udsp::instance::{generate, Distribution};
use udsp::oracle::{oracle_solve, validate, EdgeEnumeration};
use udsp::sssp::{sssp_approx_with, sssp_exact_with, CheckReport, SsspResult};
use udsp::wnn::{offline_solve, wnn_brute, Op, OpSequence, WeightedSite};
use udsp::{Epsilon, PointSet, SolveOptions};

const SIZES: [usize; 4] = [50, 200, 1000, 5000];
const EPSILONS: [f64; 3] = [1.0, 0.1, 0.01];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// The 200 instances shared by the equivalence, sandwich and invariant criteria.
fn instances() -> Vec<(String, PointSet<f64>)> {
    (0..200u64)
        .map(|k| {
            let n = SIZES[(k % 4) as usize];
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + k);
            let (label, pts) = match k % 5 {
                0 | 1 => {
                    let density = [1.5, 5.0, 10.0, 25.0][(k / 5 % 4) as usize];
                    (format!("uniform d={density}"), generate(n, Distribution::Uniform, density, k).unwrap())
                }
                2 | 3 => {
                    let density = [3.0, 10.0, 30.0][(k / 5 % 3) as usize];
                    (format!("clusters d={density}"), generate(n, Distribution::Clusters, density, k).unwrap())
                }
                _ => ("cell clusters".to_string(), cell_clusters(&mut rng, n)),
            };
            let source = rng.random_range(0..n);
            (format!("#{k} n={n} {label}"), PointSet::new(pts, source).unwrap())
        })
        .collect()
}

/// Blobs of up to 100 points, each inside one half-unit square and hence
/// a complete subgraph, scattered densely enough to link up.
fn cell_clusters(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point<f64>> {
    let k = n.div_ceil(100);
    let side = (k as f64).sqrt() * 1.2;
    let corners: Vec<(f64, f64)> = (0..k).map(|_| (rng.random_range(0.0..side), rng.random_range(0.0..side))).collect();
    (0..n)
        .map(|i| {
            let (x, y) = corners[i % k];
            Point::new(x + rng.random_range(0.0..0.5), y + rng.random_range(0.0..0.5))
        })
        .collect()
}

fn add_checks(total: &mut CheckReport, r: &CheckReport) {
    total.iterations += r.iterations;
    total.first_update_off_disk += r.first_update_off_disk;
    total.update_off_disk += r.update_off_disk;
    total.approx_slack += r.approx_slack;
    total.pair_bound += r.pair_bound;
    total.repeated_cell += r.repeated_cell;
    total.inconsistent += r.inconsistent;
    total.early_retire += r.early_retire;
}

struct Shared {
    instances: Vec<(String, PointSet<f64>)>,
    oracles: Vec<SsspResult<f64>>,
    exact_checks: CheckReport,
    approx_checks: CheckReport,
}

fn criterion_exact(sh: &mut Shared) -> Outcome {
    let mut bad = Vec::new();
    let mut checks = CheckReport::default();
    for ((label, ps), oracle) in sh.instances.iter().zip(&sh.oracles) {
        let opts = SolveOptions { checks: true, reference: Some(&oracle.dist), ..Default::default() };
        let (res, report) = sssp_exact_with(ps, &opts);
        add_checks(&mut checks, &report);
        let v = validate(&res, ps, None, Some(oracle));
        if !v.is_ok() {
            bad.push(format!("{label}: {} ({} failures)", v.failures[0], v.failures.len()));
        }
    }
    sh.exact_checks = checks;
    let detail = format!("{} instances, {} mismatched{}", sh.instances.len(), bad.len(), first(&bad));
    outcome(bad.is_empty(), detail)
}

fn criterion_sandwich(sh: &mut Shared) -> Outcome {
    let mut bad = Vec::new();
    let mut checks = CheckReport::default();
    let mut worst: f64 = 0.0;
    for ((label, ps), oracle) in sh.instances.iter().zip(&sh.oracles) {
        for e in EPSILONS {
            let eps = Epsilon::new(e).unwrap();
            let opts = SolveOptions { checks: true, ..Default::default() };
            let (res, report) = sssp_approx_with(ps, eps, &opts).unwrap();
            add_checks(&mut checks, &report);
            for (&got, &want) in res.dist.iter().zip(&oracle.dist) {
                if want.is_finite() && want > 0.0 {
                    worst = worst.max((got / want - 1.0) / e);
                }
            }
            let v = validate(&res, ps, Some(eps), Some(oracle));
            if !v.is_ok() {
                bad.push(format!("{label} eps={e}: {} ({} failures)", v.failures[0], v.failures.len()));
            }
        }
    }
    sh.approx_checks = checks;
    let detail = format!(
        "{} solves, {} outside the sandwich, worst (ratio - 1) / eps = {worst:.3}{}",
        sh.instances.len() * EPSILONS.len(),
        bad.len(),
        first(&bad)
    );
    outcome(bad.is_empty(), detail)
}

fn criterion_oiwnn() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut bad = 0;
    let mut total_queries = 0;
    for _ in 0..500 {
        let n = rng.random_range(1..=2000);
        let m = rng.random_range(0..=n);
        let spread = if rng.random_bool(0.5) { 2.0 } else { 50.0 };
        let mut is_insert = vec![false; n];
        for slot in rand::seq::index::sample(&mut rng, n, m) {
            is_insert[slot] = true;
        }
        let mut ops = OpSequence::new();
        let mut tag = 0;
        for (id, &ins) in is_insert.iter().enumerate() {
            // Coarse coordinates and weights so equal keys actually occur.
            let pt = Point::new((rng.random_range(0.0..spread) * 8.0f64).round() / 8.0, (rng.random_range(0.0..spread) * 8.0f64).round() / 8.0);
            if ins {
                let w = if rng.random_bool(0.03) { f64::INFINITY } else { (rng.random_range(0.0..4.0) * 4.0f64).round() / 4.0 };
                ops.insert(WeightedSite::new(pt, w, tag));
                tag += 1;
            } else {
                ops.query(pt, id);
            }
        }
        let got = offline_solve(&ops).unwrap();
        let mut seen = Vec::new();
        for op in &ops.ops {
            match *op {
                Op::Insert(s) => seen.push(s),
                Op::Query { point, id } => {
                    total_queries += 1;
                    if got[&id] != wnn_brute(&seen, point) {
                        bad += 1;
                    }
                }
            }
        }
    }
    outcome(bad == 0, format!("500 sequences, {total_queries} queries, {bad} differ from replay"))
}

fn criterion_envelope() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut problems = Vec::new();
    let mut membership_queries = 0;
    let mut worst_created: f64 = 0.0;
    while membership_queries < 10_000 {
        let mut env = Envelope::new(0.5);
        let count = rng.random_range(1..=200);
        let centers: Vec<Point<f64>> = (0..count).map(|_| Point::new(rng.random_range(0.0..0.5), rng.random_range(0.0..0.5))).collect();
        for (tag, &c) in centers.iter().enumerate() {
            env.add_disk(c, tag).unwrap();
        }
        let arcs = env.arcs();
        let mut tags = HashSet::new();
        for w in arcs.windows(2) {
            let (a, b) = (w[0].owner.unwrap(), w[1].owner.unwrap());
            if a.center.x > b.center.x {
                problems.push(format!("arcs of {} and {} out of center order", a.tag, b.tag));
            }
        }
        for a in &arcs {
            if !tags.insert(a.owner.unwrap().tag) {
                problems.push(format!("disk {} owns two pieces", a.owner.unwrap().tag));
            }
        }
        worst_created = worst_created.max(env.created() as f64 / count as f64);
        if env.created() > 4 * count {
            problems.push(format!("{} pieces created for {count} disks", env.created()));
        }
        for _ in 0..500 {
            let q = Point::new(rng.random_range(-1.2..1.7), rng.random_range(0.5..1.6));
            membership_queries += 1;
            if env.covers(q).unwrap() != centers.iter().any(|&c| within_unit(c, q)) {
                problems.push(format!("membership of ({}, {}) wrong", q.x, q.y));
            }
        }
    }
    let mut fc_bad = 0;
    for _ in 0..200 {
        let (ox, oy) = (rng.random_range(0.0..10.0), rng.random_range(0.0..10.0));
        let nu = rng.random_range(1..=500);
        let nv = rng.random_range(1..=500);
        let u: Vec<Point<f64>> = (0..nu).map(|_| Point::new(ox + rng.random_range(0.0..0.5), oy + rng.random_range(0.0..0.5))).collect();
        let v: Vec<Point<f64>> = (0..nv).map(|_| Point::new(ox + rng.random_range(-1.5..2.0), oy + rng.random_range(-1.5..2.0))).collect();
        let got = first_cover(&u, &v);
        for (j, &q) in v.iter().enumerate() {
            if got[j] != u.iter().position(|&c| within_unit(c, q)) {
                fc_bad += 1;
            }
        }
    }
    let pass = problems.is_empty() && fc_bad == 0;
    let detail = format!(
        "{membership_queries} membership queries, 200 first-cover instances ({fc_bad} wrong answers), max created/|U| = {worst_created:.2}{}",
        first(&problems)
    );
    outcome(pass, detail)
}

fn criterion_invariants(sh: &Shared) -> Outcome {
    let (e, a) = (&sh.exact_checks, &sh.approx_checks);
    let pass = e.is_clean() && a.is_clean() && e.iterations > 0 && a.iterations > 0;
    let detail = format!(
        "exact: {} iterations, off-disk {}+{}, repeated cells {}, inconsistent {}, early retire {}; \
         approx: {} iterations, off-disk {}, slack {}, pair bound {}, repeated cells {}, inconsistent {}",
        e.iterations,
        e.first_update_off_disk,
        e.update_off_disk,
        e.repeated_cell,
        e.inconsistent,
        e.early_retire,
        a.iterations,
        a.update_off_disk,
        a.approx_slack,
        a.pair_bound,
        a.repeated_cell,
        a.inconsistent
    );
    outcome(pass, detail)
}

fn criterion_scaling() -> Outcome {
    let sizes: Vec<usize> = (12..=17).map(|k| 1usize << k).collect();
    let report = run_bench(&sizes, 5, BenchMode::Exact, 6).unwrap();
    let worst = report.ratios.iter().map(|r| r.1).fold(0.0, f64::max);
    let ratios: Vec<String> = report.ratios.iter().map(|(n, r)| format!("{n}:{r:.2}")).collect();

    let pts = generate(100_000, Distribution::Uniform, 10.0, 6).unwrap();
    let ps = PointSet::new(pts, 0).unwrap();
    let t = |e: f64| {
        let mode = BenchMode::Approx(Epsilon::new(e).unwrap());
        median(&(0..3).map(|_| time_solve(&ps, mode)).collect::<Vec<_>>())
    };
    let (coarse, fine) = (t(1.0), t(0.01));
    let eps_ratio = fine / coarse;
    let pass = report.ratios.len() == 5 && worst <= 2.6 && eps_ratio <= 4.0;
    let detail = format!(
        "exact doubling ratios [{}] (max {worst:.2}, limit 2.6); approx n=1e5 t(0.01)/t(1) = {fine:.3}s/{coarse:.3}s = {eps_ratio:.2} (limit 4)",
        ratios.join(" ")
    );
    outcome(pass, detail)
}

fn criterion_floor() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut floor_bad = 0;
    for k in 0..1_000_000u32 {
        // Mix wide-range values with values just around integers.
        let r: f64 = if k % 4 == 0 {
            let i = rng.random_range(0..(1u64 << 30)) as f64;
            [i, i - f64::EPSILON * i, i + 0.5, (i - 1e-9).max(0.0)][(k / 4 % 4) as usize]
        } else {
            rng.random_range(0.0..(1u64 << 30) as f64) / [1.0, 1e3, 1e6][(k % 3) as usize]
        };
        if simulated_floor(r).unwrap() != r.floor() as i64 {
            floor_bad += 1;
        }
    }
    let mut solve_bad = 0;
    for seed in 0..20u64 {
        let dist = if seed % 2 == 0 { Distribution::Uniform } else { Distribution::Clusters };
        let pts = generate::<f64>(2000, dist, 8.0, 500 + seed).unwrap();
        let ps = PointSet::new(pts, (seed as usize * 97) % 2000).unwrap();
        let native = sssp_exact_with(&ps, &SolveOptions { floor: FloorMode::Native, ..Default::default() }).0;
        let simulated = sssp_exact_with(&ps, &SolveOptions { floor: FloorMode::Simulated, ..Default::default() }).0;
        if write_csv(&native) != write_csv(&simulated) {
            solve_bad += 1;
        }
    }
    let detail = format!("10^6 floors ({floor_bad} differ), 20 solves ({solve_bad} not byte-identical)");
    outcome(floor_bad == 0 && solve_bad == 0, detail)
}

fn first(items: &[String]) -> String {
    items.first().map(|s| format!("; first: {s}")).unwrap_or_default()
}

fn run(name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f));
    let secs = start.elapsed().as_secs_f64();
    let (pass, detail) = match result {
        Ok(o) => (o.pass, o.detail),
        Err(e) => {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        }
    };
    println!("{} [PRIMARY] {name}: {detail} ({secs:.1}s)", if pass { "PASS" } else { "FAIL" });
    pass
}

fn main() -> ExitCode {
    let start = Instant::now();
    let instances = instances();
    let oracles = instances.iter().map(|(_, ps)| oracle_solve(ps, EdgeEnumeration::Naive)).collect();
    println!("built 200 instances and their oracle distances ({:.1}s)", start.elapsed().as_secs_f64());
    let mut sh = Shared { instances, oracles, exact_checks: CheckReport::default(), approx_checks: CheckReport::default() };
    let results = [
        run("1 exact solver equals the Dijkstra oracle", || criterion_exact(&mut sh)),
        run("2 approximate solver within the (1 + eps) sandwich", || criterion_sandwich(&mut sh)),
        run("3 offline insertion-only WNN equals brute-force replay", criterion_oiwnn),
        run("4 envelope structure, membership and first-cover", criterion_envelope),
        run("5 runtime invariant checks clean on criteria 1-2", || criterion_invariants(&sh)),
        run("6 scaling of exact and approximate solvers", criterion_scaling),
        run("7 floor-free grid location", criterion_floor),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
