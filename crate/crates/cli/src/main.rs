//! `ramgrs`: RAM efficiency scores and global reference sets from a CSV dataset.

mod report;

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use ram_grs::grs::{build_system, recover_lambda_max, solve_model10, solve_model8};
use ram_grs::pipeline::{evaluate_unit, prepare, verify_unit};
use ram_grs::synth::uniform_dataset;
use ram_grs::{load_dataset, Dataset, Error, ErrorKind, GrsMethod, Tolerances};

#[derive(Parser, Debug)]
#[command(name = "ramgrs", version, about = "RAM efficiency and global reference set identification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Score units and report their global reference sets as JSON
    Evaluate(EvaluateArgs),
    /// Cross-check every program against the brute-force oracles
    Verify(VerifyArgs),
    /// Time the mixed 0-1 program against its LP relaxation on synthetic data
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct TolArgs {
    /// Feasibility tolerance
    #[arg(long)]
    tol_feas: Option<f64>,
    /// Threshold below which an intensity counts as zero
    #[arg(long)]
    tol_support: Option<f64>,
    /// Slack tolerance for RAM efficiency
    #[arg(long)]
    tol_eff: Option<f64>,
}

#[derive(Args, Debug)]
struct DataArgs {
    /// Dataset CSV with columns dmu, in:<label>..., out:<label>...
    #[arg(long)]
    data: PathBuf,
    /// Unit id to evaluate, or `all`
    #[arg(long, default_value = "all")]
    dmu: String,
    /// Output file (defaults to stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for `--dmu all`
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[command(flatten)]
    data: DataArgs,
    /// relaxed-lp, milp or mehdiloozad-lp
    #[arg(long, default_value = "relaxed-lp")]
    method: GrsMethod,
    /// Omit wall-clock timings so that reports are byte-identical across runs
    #[arg(long)]
    no_timings: bool,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Units per synthetic dataset
    #[arg(long, default_value_t = 30)]
    n: usize,
    /// Inputs per unit
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Outputs per unit
    #[arg(long, default_value_t = 2)]
    s: usize,
    /// Number of synthetic datasets
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (defaults to stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write each generated dataset to this directory as rep<i>.csv
    #[arg(long)]
    dump_data: Option<PathBuf>,
    #[command(flatten)]
    tol: TolArgs,
}

fn tolerances(t: &TolArgs) -> Result<Tolerances<f64>, Error> {
    let mut tol = Tolerances::default();
    if let Some(v) = t.tol_feas {
        tol = tol.with_feasibility_eps(v)?;
    }
    if let Some(v) = t.tol_support {
        tol = tol.with_support_eps(v)?;
    }
    if let Some(v) = t.tol_eff {
        tol = tol.with_efficiency_eps(v)?;
    }
    Ok(tol)
}

fn read_dataset(path: &Path) -> Result<Dataset<f64>, Error> {
    let file = File::open(path).map_err(|e| {
        Error::InvalidArgument(format!("cannot open {}: {e}", path.display()))
    })?;
    load_dataset(io::BufReader::new(file))
}

fn selected(ds: &Dataset<f64>, dmu: &str) -> Result<Vec<usize>, Error> {
    if dmu == "all" {
        Ok((0..ds.n()).collect())
    } else {
        Ok(vec![ds.index_of(dmu)?])
    }
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, Error> {
    if jobs == Some(0) {
        return Err(Error::InvalidArgument("jobs must be ≥ 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn json_text(v: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(v).expect("report serializes");
    text.push('\n');
    text
}

/// Results are computed in parallel but collected in dataset order; the
/// first failure in that order is the one reported.
fn per_unit<R: Send>(
    jobs: Option<usize>,
    units: &[usize],
    f: impl Fn(usize) -> Result<R, Error> + Sync + Send,
) -> Result<Vec<R>, Error> {
    let results: Vec<Result<R, Error>> = pool(jobs)?.install(|| units.par_iter().map(|&o| f(o)).collect());
    results.into_iter().collect()
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<ExitCode, Error> {
    let tol = tolerances(&args.tol)?;
    let ds = read_dataset(&args.data.data)?;
    let units = selected(&ds, &args.data.dmu)?;
    let prep = prepare(&ds, &tol)?;
    let records = per_unit(args.data.jobs, &units, |o| {
        evaluate_unit(&ds, &prep, o, args.method, &tol)
            .map(|e| report::evaluation(&e, &tol, !args.no_timings))
    })?;
    emit(&args.data.out, &json_text(&serde_json::Value::Array(records)))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode, Error> {
    let tol = tolerances(&args.tol)?;
    let ds = read_dataset(&args.data.data)?;
    let units = selected(&ds, &args.data.dmu)?;
    let prep = prepare(&ds, &tol)?;
    let results = per_unit(args.data.jobs, &units, |o| verify_unit(&ds, &prep, o, &tol))?;
    let passed = results.iter().all(|v| v.passed());
    let worst = |f: fn(&ram_grs::Verification<f64>) -> f64| results.iter().map(f).fold(0.0, f64::max);
    let doc = serde_json::json!({
        "passed": passed,
        "max_objective_gap": report::num(worst(|v| v.max_objective_gap)),
        "max_membership_residual": report::num(worst(|v| v.max_membership_residual)),
        "tolerances": report::tolerances(&tol),
        "units": results.iter().map(report::verification).collect::<Vec<_>>(),
    });
    emit(&args.data.out, &json_text(&doc))?;
    for v in results.iter().filter(|v| !v.passed()) {
        for c in v.checks.iter().filter(|c| !c.passed) {
            eprintln!("FAIL {} {}: {}", v.dmu, c.name, c.detail);
        }
    }
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn cmd_bench(args: &BenchArgs) -> Result<ExitCode, Error> {
    if args.reps == 0 {
        return Err(Error::InvalidArgument("reps must be ≥ 1".into()));
    }
    let tol = tolerances(&args.tol)?;
    if let Some(dir) = &args.dump_data {
        std::fs::create_dir_all(dir)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut csv = String::from(
        "rep,n,m,s,efficient,relaxed_total_ms,milp_total_ms,relaxed_median_ms,milp_median_ms,max_objective_gap,agreement\n",
    );
    let mut all_agree = true;
    for rep in 0..args.reps {
        let ds: Dataset<f64> = uniform_dataset(&mut rng, args.n, args.m, args.s, 1.0, 100.0)?;
        if let Some(dir) = &args.dump_data {
            ds.write_csv(BufWriter::new(File::create(dir.join(format!("rep{rep}.csv")))?))?;
        }
        let prep = prepare(&ds, &tol)?;
        let eff = &prep.efficient;
        let (mut t10, mut t8) = (Vec::with_capacity(ds.n()), Vec::with_capacity(ds.n()));
        let mut gap = 0.0f64;
        let mut agree = true;
        for o in 0..ds.n() {
            let sys = build_system(&ds, eff, o, &eff.ram[o], &prep.weights, &tol)
                .map_err(|e| at(&ds, o, e))?;
            let start = Instant::now();
            let ten = solve_model10(&sys, &tol).map_err(|e| at(&ds, o, e))?;
            t10.push(start.elapsed().as_secs_f64() * 1e3);
            let start = Instant::now();
            let eight = solve_model8(&sys, &tol).map_err(|e| at(&ds, o, e))?;
            t8.push(start.elapsed().as_secs_f64() * 1e3);
            let d = (ten.objective - eight.objective).abs();
            gap = gap.max(d);
            let s10 = recover_lambda_max(&sys, &ten, &tol).map_err(|e| at(&ds, o, e))?.support;
            let s8 = recover_lambda_max(&sys, &eight, &tol).map_err(|e| at(&ds, o, e))?.support;
            agree &= d <= tol.objective_eps() && s10 == s8;
        }
        all_agree &= agree;
        let (sum10, sum8): (f64, f64) = (t10.iter().sum(), t8.iter().sum());
        log::info!("rep {rep}: |E| = {}, relaxed {sum10:.3} ms, milp {sum8:.3} ms", eff.len());
        let _ = writeln!(
            csv,
            "{rep},{},{},{},{},{},{},{},{},{},{agree}",
            args.n,
            args.m,
            args.s,
            eff.len(),
            report::num(sum10),
            report::num(sum8),
            report::num(median(&mut t10)),
            report::num(median(&mut t8)),
            report::num(gap),
        );
    }
    emit(&args.out, &csv)?;
    Ok(if all_agree { ExitCode::SUCCESS } else { ExitCode::from(3) })
}

fn at(ds: &Dataset<f64>, o: usize, e: Error) -> Error {
    Error::AtDmu {
        id: ds.record(o).id.clone(),
        source: Box::new(e),
    }
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Input => 1,
        ErrorKind::Solver => 2,
        ErrorKind::TheoremViolation => 3,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.kind()))
        }
    }
}
