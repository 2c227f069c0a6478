use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use udsp::bench::{run_bench, BenchMode, BenchReport};
use udsp::format::write_csv;
use udsp::instance::{generate, parse_points, write_points, Distribution};
use udsp::oracle::{oracle_solve, validate, EdgeEnumeration};
use udsp::sssp::{sssp_approx_with, sssp_exact_with};
use udsp::{Epsilon64, PointSet64, SolveOptions, SsspResult64};

#[derive(Parser, Debug)]
#[command(name = "udsp", version, about = "Shortest paths in weighted unit-disk graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random instance.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Dist::Uniform)]
        distribution: Dist,
        /// Target mean unit-disk degree.
        #[arg(long, default_value_t = 10.0, value_parser = positive)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Exact shortest paths.
    SolveExact(SolveArgs),
    /// (1 + eps)-approximate shortest paths.
    SolveApprox {
        #[command(flatten)]
        args: SolveArgs,
        #[arg(long, value_parser = positive)]
        eps: f64,
    },
    /// Dijkstra on the explicit graph.
    Oracle {
        #[command(flatten)]
        args: SolveArgs,
        /// Enumerate edges over all pairs instead of through a grid.
        #[arg(long)]
        naive: bool,
    },
    /// Check both solvers against the oracle; exit 1 on any violation.
    Compare {
        #[command(flatten)]
        args: SolveArgs,
        #[arg(long, default_value_t = 0.1, value_parser = positive)]
        eps: f64,
        #[arg(long, hide = true)]
        skip_first_update: bool,
    },
    /// Time solver runs on generated uniform instances.
    Bench {
        /// Comma-separated ascending sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        #[arg(long, default_value_t = 0.1, value_parser = positive)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(clap::Args, Debug)]
struct SolveArgs {
    /// Instance file: one `x y` pair per line.
    file: PathBuf,
    /// 0-based source index.
    #[arg(long, default_value_t = 0)]
    source: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(clap::Args, Debug)]
struct OutArgs {
    /// Output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Dist {
    Uniform,
    Clusters,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Exact,
    Approx,
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be finite and > 0, got {s}"))
    }
}

fn emit(out: &OutArgs, text: &str) -> Result<()> {
    match &out.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

struct Instance {
    points: PointSet64,
    seed: Option<u64>,
}

fn load(path: &Path, source: usize) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let pts = parse_points::<f64>(&text).with_context(|| format!("parsing {}", path.display()))?;
    let seed = text
        .lines()
        .filter_map(|l| l.strip_prefix('#'))
        .flat_map(str::split_whitespace)
        .find_map(|w| w.strip_prefix("seed=")?.parse().ok());
    let points = PointSet64::new(pts, source).with_context(|| format!("instance {}", path.display()))?;
    Ok(Instance { points, seed })
}

fn result_json(res: &SsspResult64, mode: &str, eps: Option<f64>, inst: &Instance) -> Value {
    let vertices: Vec<Value> = res
        .dist
        .iter()
        .zip(&res.pred)
        .enumerate()
        .map(|(i, (&d, &p))| {
            let dist = if d.is_finite() { json!(d) } else { json!("inf") };
            json!({ "index": i, "dist": dist, "pred": p })
        })
        .collect();
    json!({
        "meta": {
            "mode": mode,
            "eps": eps,
            "seed": inst.seed,
            "source": inst.points.source(),
            "n": inst.points.len(),
            "version": env!("CARGO_PKG_VERSION"),
        },
        "vertices": vertices,
    })
}

fn write_result(res: &SsspResult64, mode: &str, eps: Option<f64>, inst: &Instance, out: &OutArgs) -> Result<()> {
    match out.format {
        Format::Csv => emit(out, &write_csv(res)),
        Format::Json => emit(out, &(serde_json::to_string_pretty(&result_json(res, mode, eps, inst))? + "\n")),
    }
}

fn bench_output(report: &BenchReport, out: &OutArgs, mode: Mode, eps: f64, seed: u64) -> Result<()> {
    match out.format {
        Format::Csv => {
            let mut s = String::from("n,rep,seconds\n");
            for r in &report.runs {
                s += &format!("{},{},{}\n", r.n, r.rep, r.seconds);
            }
            for (n, m) in &report.medians {
                s += &format!("{n},median,{m}\n");
            }
            for (n, r) in &report.ratios {
                s += &format!("{n},ratio,{r}\n");
            }
            emit(out, &s)
        }
        Format::Json => {
            let v = json!({
                "meta": {
                    "mode": match mode { Mode::Exact => "exact", Mode::Approx => "approx" },
                    "eps": (mode == Mode::Approx).then_some(eps),
                    "seed": seed,
                    "version": env!("CARGO_PKG_VERSION"),
                },
                "runs": report.runs.iter().map(|r| json!({ "n": r.n, "rep": r.rep, "seconds": r.seconds })).collect::<Vec<_>>(),
                "medians": report.medians.iter().map(|(n, m)| json!({ "n": n, "median": m })).collect::<Vec<_>>(),
                "ratios": report.ratios.iter().map(|(n, r)| json!({ "n": n, "ratio": r })).collect::<Vec<_>>(),
            });
            emit(out, &(serde_json::to_string_pretty(&v)? + "\n"))
        }
    }
}

/// Returns whether every check passed.
fn compare(inst: &Instance, eps: f64, skip_first_update: bool, out: &OutArgs) -> Result<bool> {
    let ps = &inst.points;
    let eps = Epsilon64::new(eps)?;
    let oracle = oracle_solve(ps, EdgeEnumeration::Grid);
    let opts = SolveOptions { checks: true, skip_first_update, ..Default::default() };
    let (exact, exact_checks) = sssp_exact_with(ps, &opts);
    let (approx, approx_checks) = sssp_approx_with(ps, eps, &opts)?;
    let exact_report = validate(&exact, ps, None, Some(&oracle));
    let approx_report = validate(&approx, ps, Some(eps), Some(&oracle));
    let reachable = oracle.dist.iter().filter(|d| d.is_finite()).count();
    let mut s = format!("n={} source={} reachable={} eps={}\n", ps.len(), ps.source(), reachable, eps.value());
    let mut ok = true;
    for (name, report, checks) in [("exact", &exact_report, &exact_checks), ("approx", &approx_report, &approx_checks)] {
        let clean = report.is_ok() && checks.is_clean();
        ok &= clean;
        s += &format!("{name}: {} ({} failures)\n", if clean { "ok" } else { "FAIL" }, report.failures.len());
        for f in &report.failures {
            s += &format!("  {f}\n");
        }
        if !checks.is_clean() {
            s += &format!("  runtime checks: {checks:?}\n");
        }
    }
    emit(out, &s)?;
    Ok(ok)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen { n, distribution, density, seed, out } => {
            if out.format == Format::Json {
                bail!("gen writes the plain-text instance format only");
            }
            let dist = match distribution {
                Dist::Uniform => Distribution::Uniform,
                Dist::Clusters => Distribution::Clusters,
            };
            let pts = generate::<f64>(n, dist, density, seed)?;
            let name = format!("{dist:?}").to_lowercase();
            let header = format!("udsp gen n={n} distribution={name} density={density} seed={seed}");
            emit(&out, &write_points(&pts, Some(&header)))?;
        }
        Command::SolveExact(args) => {
            let inst = load(&args.file, args.source)?;
            let res = sssp_exact_with(&inst.points, &SolveOptions::default()).0;
            write_result(&res, "exact", None, &inst, &args.out)?;
        }
        Command::SolveApprox { args, eps } => {
            let inst = load(&args.file, args.source)?;
            let res = sssp_approx_with(&inst.points, Epsilon64::new(eps)?, &SolveOptions::default())?.0;
            write_result(&res, "approx", Some(eps), &inst, &args.out)?;
        }
        Command::Oracle { args, naive } => {
            let inst = load(&args.file, args.source)?;
            let how = if naive { EdgeEnumeration::Naive } else { EdgeEnumeration::Grid };
            let res = oracle_solve(&inst.points, how);
            write_result(&res, "oracle", None, &inst, &args.out)?;
        }
        Command::Compare { args, eps, skip_first_update } => {
            let inst = load(&args.file, args.source)?;
            if !compare(&inst, eps, skip_first_update, &args.out)? {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Bench { sizes, reps, mode, eps, seed, out } => {
            if sizes.windows(2).any(|w| w[0] > w[1]) {
                bail!("--sizes must be ascending");
            }
            if sizes.contains(&0) || reps == 0 {
                bail!("sizes and reps must be positive");
            }
            let bench_mode = match mode {
                Mode::Exact => BenchMode::Exact,
                Mode::Approx => BenchMode::Approx(Epsilon64::new(eps)?),
            };
            let report = run_bench(&sizes, reps, bench_mode, seed)?;
            bench_output(&report, &out, mode, eps, seed)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
