//! `ripsapprox`: build approximate Rips towers, compute barcodes and audit
//! the results.
//!
//! Exit codes: 0 success, 1 a requested check failed, 2 usage, 3 I/O,
//! 4 malformed input, 5 size guardrail.

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ripsapprox::persistence::{reduce, rips_filtration, tower_barcode};
use ripsapprox::pipeline::compare;
use ripsapprox::tower::{build_tower, stream_stats, survival_experiment, Status, TowerConfig};
use ripsapprox::{Barcode, Error, EventStream, Metric, Mode, PointCloud};

const MAX_POINTS: usize = 1000;
const MAX_K: usize = 8;
const DEFAULT_GUARD: u64 = 10_000_000;

#[derive(Parser)]
#[command(
    name = "ripsapprox",
    version,
    about = "Approximate Vietoris-Rips towers on shifted lattices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the event stream of a tower.
    Tower(TowerArgs),
    /// Exact Rips barcode of a point cloud.
    RipsBarcode(RipsArgs),
    /// Barcode of a tower event stream.
    TowerBarcode(TowerBarcodeArgs),
    /// Compare the rescaled tower barcode with the exact Rips barcode.
    Compare(CompareArgs),
    /// Size audits of a tower event stream.
    Stats(StatsArgs),
    /// Lifetime of a face under repeated application of the cubical map.
    Survival(SurvivalArgs),
}

#[derive(Args)]
struct Common {
    /// Point cloud file: one point per line, whitespace-separated coordinates.
    input: PathBuf,
    #[arg(long, default_value = "linf")]
    metric: Metric,
    #[arg(long, env = "RIPSAPPROX_SEED", default_value_t = 0)]
    seed: u64,
    /// Refuse to produce more simplices or cells than this.
    #[arg(long, default_value_t = DEFAULT_GUARD)]
    guard_cells: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TowerArgs {
    #[command(flatten)]
    common: Common,
    /// Largest simplex dimension kept.
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value = "simplicial")]
    mode: Mode,
    /// Override the base scale.
    #[arg(long)]
    lambda: Option<f64>,
    /// Upper limit on the number of scale steps.
    #[arg(long)]
    max_scales: Option<u32>,
}

#[derive(Args)]
struct RipsArgs {
    #[command(flatten)]
    common: Common,
    /// Largest homology dimension reported.
    #[arg(long, default_value_t = 1)]
    k: usize,
}

#[derive(Args)]
struct TowerBarcodeArgs {
    /// Event stream file.
    stream: PathBuf,
    /// Largest homology dimension reported.
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    common: Common,
    /// Largest homology dimension compared.
    #[arg(long, default_value_t = 1)]
    k: usize,
}

#[derive(Args)]
struct StatsArgs {
    /// Event stream file.
    stream: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SurvivalArgs {
    /// Ambient dimension.
    #[arg(long, default_value_t = 8)]
    d: usize,
    /// Dimension of the tracked face.
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, env = "RIPSAPPROX_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if let Some(err) = e.downcast_ref::<Error>() {
        return match err {
            Error::Io(_) => 3,
            Error::Guardrail { .. } | Error::UnsupportedDimension(_) => 5,
            Error::Internal(_) => 1,
            _ => 4,
        };
    }
    if e.downcast_ref::<io::Error>().is_some() {
        return 3;
    }
    1
}

fn guard(what: &'static str, needed: usize, limit: usize) -> Result<()> {
    if needed > limit {
        return Err(Error::Guardrail {
            what,
            needed: needed as u128,
            limit: limit as u128,
        }
        .into());
    }
    Ok(())
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let file = File::open(path)
        .map_err(Error::Io)
        .with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(file))
}

fn read_cloud(path: &Path) -> Result<PointCloud> {
    let cloud =
        PointCloud::read(open(path)?).with_context(|| format!("reading {}", path.display()))?;
    guard("points", cloud.len(), MAX_POINTS)?;
    Ok(cloud)
}

fn read_stream(path: &Path) -> Result<EventStream> {
    EventStream::read(open(path)?).with_context(|| format!("reading {}", path.display()))
}

/// Writes `text` to `out`, or to stdout when no file is given.
fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(Error::Io)
            .with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(Error::Io)?;
            stdout.flush().map_err(Error::Io)?;
            Ok(())
        }
    }
}

/// Summary line: to stdout when the payload went to a file, else stderr.
fn summary(out: Option<&Path>, line: &str) {
    if out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Tower(args) => cmd_tower(args),
        Command::RipsBarcode(args) => cmd_rips_barcode(args),
        Command::TowerBarcode(args) => cmd_tower_barcode(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Survival(args) => cmd_survival(args),
    }
}

fn cmd_tower(args: TowerArgs) -> Result<bool> {
    let c = &args.common;
    guard("skeleton dimension", args.k, MAX_K)?;
    if let Some(lambda) = args.lambda {
        if !(lambda.is_finite() && lambda > 0.0) {
            bail!(Error::InvalidParameter(format!(
                "--lambda must be positive, got {lambda}"
            )));
        }
    }
    let cloud = read_cloud(&c.input)?;
    let tower = build_tower(
        &cloud,
        &TowerConfig {
            mode: args.mode,
            k: args.k,
            seed: c.seed,
            shifts: None,
            lambda: args.lambda,
            max_scales: args.max_scales,
            guard_cells: c.guard_cells,
            metric: c.metric,
        },
    )?;
    let out = c.out.as_deref();
    emit(out, &tower.stream.to_text())?;
    let s = &tower.stream;
    summary(
        out,
        &format!(
            "scales {} includes {} contractions {} top {}",
            s.scale_count(),
            s.include_count(),
            s.contract_count(),
            tower.ladder.top()
        ),
    );
    Ok(true)
}

fn cmd_rips_barcode(args: RipsArgs) -> Result<bool> {
    let c = &args.common;
    guard("homology dimension", args.k, MAX_K)?;
    let cloud = read_cloud(&c.input)?;
    let filtration = rips_filtration(&cloud, c.metric, args.k, u128::from(c.guard_cells))?;
    let barcode = reduce(&filtration, args.k);
    emit(c.out.as_deref(), &barcode.to_text())?;
    summary(
        c.out.as_deref(),
        &format!("simplices {} intervals {}", filtration.len(), barcode.len()),
    );
    Ok(true)
}

fn cmd_tower_barcode(args: TowerBarcodeArgs) -> Result<bool> {
    guard("homology dimension", args.k, MAX_K)?;
    let stream = read_stream(&args.stream)?;
    let barcode: Barcode = tower_barcode(&stream, args.k)?;
    emit(args.out.as_deref(), &barcode.to_text())?;
    Ok(true)
}

fn cmd_compare(args: CompareArgs) -> Result<bool> {
    let c = &args.common;
    guard("homology dimension", args.k, MAX_K)?;
    let cloud = read_cloud(&c.input)?;
    let result = compare(&cloud, c.metric, args.k, c.seed, c.guard_cells)?;
    let mut report = format!("metric {} claimed {}\n", result.metric, result.claimed);
    for cert in &result.certificates {
        report += &format!(
            "dim {} achieved {} {}\n",
            cert.dim,
            cert.achieved.value(),
            if cert.pass { "pass" } else { "FAIL" }
        );
    }
    emit(c.out.as_deref(), &report)?;
    Ok(result.passed())
}

fn status(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "FAIL",
        Status::NotApplicable => "n/a",
    }
}

fn cmd_stats(args: StatsArgs) -> Result<bool> {
    let stream = read_stream(&args.stream)?;
    let stats = stream_stats(&stream);
    let h = &stats.header;
    let mut report = format!("mode {} n {} d {} k {}\n", h.mode, h.n, h.d, h.k);
    for row in &stats.scales {
        report += &format!(
            "scale {} includes {} contractions {}\n",
            row.alpha, row.includes, row.contractions
        );
    }
    for (dim, count) in stats.includes_by_dim.iter().enumerate() {
        report += &format!("dim {dim} includes {count}\n");
    }
    report += &format!("contractions {}\n", stats.contractions);
    for a in &stats.audits {
        let bound = a.bound.map_or_else(|| "-".to_string(), |b| b.to_string());
        report += &format!(
            "audit {:?} observed {} bound {} {}",
            a.name,
            a.observed,
            bound,
            status(a.status)
        );
        if !a.note.is_empty() {
            report += &format!(" ({})", a.note);
        }
        report.push('\n');
    }
    emit(args.out.as_deref(), &report)?;
    Ok(stats.passed())
}

fn cmd_survival(args: SurvivalArgs) -> Result<bool> {
    let r = survival_experiment(args.d, args.k, args.trials, args.seed)?;
    let mut report = format!(
        "d {} k {} trials {} mean {} max {} censored {}\n",
        r.d,
        r.k,
        r.trials,
        r.mean(),
        r.max_observed(),
        r.censored
    );
    for (j, count) in r.histogram.iter().enumerate() {
        report += &format!("{j} {count} {}\n", r.tail(j));
    }
    emit(args.out.as_deref(), &report)?;
    Ok(true)
}
