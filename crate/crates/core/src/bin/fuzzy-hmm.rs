use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use fuzzy_hmm::pipeline::{
    emit_report, parse_float_grid, parse_int_grid, parse_key_values, render_report, run_pipeline, sweep, Emit,
    PipelineConfig, ReportFormat, SweepGrid, Timing,
};
use fuzzy_hmm::preprocess::{load_csv, write_csv};
use fuzzy_hmm::synth::{generate_series, SynthConfig};
use fuzzy_hmm::{Error, Result};

/// Detect point anomalies in multivariate time series with fuzzy
/// aggregation and a supervised two-state HMM.
#[derive(Parser)]
#[command(name = "fuzzy-hmm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded synthetic labeled series as CSV.
    Gen(GenArgs),
    /// Run the detector once.
    Run(RunArgs),
    /// Run the detector over a parameter grid.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, short)]
    output: PathBuf,
    #[arg(long, default_value_t = 2000)]
    length: usize,
    #[arg(long, default_value_t = 3)]
    vars: usize,
    #[arg(long, default_value_t = 0.1)]
    anomaly_rate: f64,
    #[arg(long, default_value_t = 1.0)]
    noise_std: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-variable sine frequencies, comma separated.
    #[arg(long, value_delimiter = ',')]
    frequencies: Option<Vec<f64>>,
}

/// Detector settings. Every flag may also be given in the `--config` file
/// as `name = value`; flags win.
#[derive(Args)]
struct Common {
    /// `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Labeled CSV input.
    #[arg(long)]
    input: Option<PathBuf>,
    /// fcm | sugeno | choquet | pca | mean
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    clusters: Option<String>,
    #[arg(long)]
    fuzzifier: Option<String>,
    #[arg(long)]
    symbols: Option<String>,
    #[arg(long)]
    split: Option<String>,
    #[arg(long)]
    smoothing: Option<String>,
    /// uniform | label-corr | g1,g2,...
    #[arg(long)]
    densities: Option<String>,
    #[arg(long)]
    density_sum: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    /// json | csv
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Include wall-clock timing in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Cluster counts, `a:b[:step]` or a list (default 2:198).
    #[arg(long)]
    clusters_grid: Option<String>,
    /// Fuzzifiers, `a:b:step` or a list (default 1.1:2.9:0.1).
    #[arg(long)]
    fuzzifier_grid: Option<String>,
    /// Symbol counts, `a:b[:step]` or a list (default 2:80).
    #[arg(long)]
    symbols_grid: Option<String>,
}

struct Resolved {
    config: PipelineConfig,
    input: PathBuf,
    report: Option<PathBuf>,
    format: ReportFormat,
    extra: BTreeMap<String, String>,
}

fn resolve(common: &Common) -> Result<Resolved> {
    let mut file = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            parse_key_values(&text)?
        }
        None => BTreeMap::new(),
    };
    let flags = [
        ("method", &common.method),
        ("clusters", &common.clusters),
        ("fuzzifier", &common.fuzzifier),
        ("symbols", &common.symbols),
        ("split", &common.split),
        ("smoothing", &common.smoothing),
        ("densities", &common.densities),
        ("density-sum", &common.density_sum),
        ("seed", &common.seed),
    ];
    let mut config = PipelineConfig::default();
    for (key, flag) in flags {
        let from_file = file.remove(key);
        if let Some(v) = flag.clone().or(from_file) {
            config.set(key, &v)?;
        }
    }
    if let Some(v) = file.remove("density_sum") {
        if common.density_sum.is_none() {
            config.set("density-sum", &v)?;
        }
    }
    let input = common
        .input
        .clone()
        .or(file.remove("input").map(PathBuf::from))
        .ok_or_else(|| Error::InvalidParameter("--input is required".into()))?;
    let report = common.report.clone().or(file.remove("report").map(PathBuf::from));
    let format = common
        .format
        .clone()
        .or(file.remove("format"))
        .map(|f| f.parse())
        .transpose()?
        .unwrap_or(ReportFormat::Json);
    Ok(Resolved {
        config,
        input,
        report,
        format,
        extra: file,
    })
}

fn output(what: Emit<'_>, report: Option<&PathBuf>, format: ReportFormat) -> Result<()> {
    match report {
        Some(path) => emit_report(what, path, format),
        None => {
            print!("{}", render_report(what, format)?);
            Ok(())
        }
    }
}

fn reject_unknown(extra: &BTreeMap<String, String>, allowed: &[&str]) -> Result<()> {
    match extra.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::InvalidParameter(format!("unknown config key `{k}`"))),
        None => Ok(()),
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(args) => {
            let config = SynthConfig {
                length: args.length,
                n_vars: args.vars,
                anomaly_rate: args.anomaly_rate,
                noise_std: args.noise_std,
                seed: args.seed,
                frequencies: args.frequencies,
            };
            let (series, labels) = generate_series(&config)?;
            write_csv(&args.output, &series, Some(&labels))
        }
        Command::Run(args) => {
            let r = resolve(&args.common)?;
            reject_unknown(&r.extra, &[])?;
            let (data, labels) = load_csv(&r.input, true)?;
            let labels = labels.expect("labels requested");
            let start = Instant::now();
            let mut report = run_pipeline(&data, &labels, &r.config)?;
            if args.timing {
                report.timing = Some(Timing {
                    elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
                });
            }
            output(Emit::Run(&report), r.report.as_ref(), r.format)
        }
        Command::Sweep(args) => {
            let mut r = resolve(&args.common)?;
            let mut grid = SweepGrid::default();
            let mut pick = |flag: &Option<String>, key: &str| {
                let from_file = r.extra.remove(key);
                flag.clone().or(from_file)
            };
            let clusters = pick(&args.clusters_grid, "clusters-grid");
            let fuzzifiers = pick(&args.fuzzifier_grid, "fuzzifier-grid");
            let symbols = pick(&args.symbols_grid, "symbols-grid");
            if let Some(s) = clusters {
                grid.clusters = parse_int_grid(&s)?;
            }
            if let Some(s) = fuzzifiers {
                grid.fuzzifiers = parse_float_grid(&s)?;
            }
            if let Some(s) = symbols {
                grid.symbols = parse_int_grid(&s)?;
            }
            reject_unknown(&r.extra, &[])?;
            let (data, labels) = load_csv(&r.input, true)?;
            let labels = labels.expect("labels requested");
            let result = sweep(&data, &labels, &r.config, &grid)?;
            output(Emit::Sweep(&result), r.report.as_ref(), r.format)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
