//! Command-line front end: `analyze` a portfolio of price CSVs, or `synth`
//! a synthetic price series in the same CSV format.
//!
//! Every option can also be set in a flat `key = value` config file passed
//! with `--config`; keys are the long flag names without dashes prefix
//! (`dfa-s-min = 5`). Flags given on the command line win.
//!
//! Exit codes: 0 success, 1 one or more tickers failed (or output could not
//! be written), 2 usage or configuration error.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate, Weekday};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::config::AnalysisConfig;
use crate::efficiency::{analyze, cmp_rank, dh_fit};
use crate::error::Error;
use crate::report::ReportJson;
use crate::series::{log_returns, PriceSeries, MIN_RETURNS, RECOMMENDED_RETURNS};
use crate::synth::{generate, SynthKind, SynthSpec};

#[derive(Debug, Parser)]
#[command(name = "effidx", version, about = "Capital-market efficiency index for price series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze price CSVs (files or directories of *.csv) and write reports and plot data.
    Analyze(AnalyzeArgs),
    /// Write a synthetic price series as an ingestion CSV.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Both,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Args, Default)]
pub struct AnalyzeArgs {
    /// Input CSV files or directories.
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Concurrent per-ticker analyses.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long)]
    pub dfa_s_min: Option<usize>,
    #[arg(long)]
    pub dfa_s_max_divisor: Option<usize>,
    #[arg(long)]
    pub dfa_scales: Option<usize>,
    #[arg(long)]
    pub dma_lambda_min: Option<usize>,
    #[arg(long)]
    pub dma_lambda_max: Option<usize>,
    #[arg(long)]
    pub dma_lambda_step: Option<usize>,
    #[arg(long)]
    pub hhca_tau_max_lo: Option<usize>,
    #[arg(long)]
    pub hhca_tau_max_hi: Option<usize>,
    #[arg(long)]
    pub periodogram_exponent: Option<f64>,
    #[arg(long)]
    pub wavelet_level_offset: Option<usize>,
    #[arg(long)]
    pub wavelet_min_coeffs: Option<usize>,
    #[arg(long)]
    pub kpss_bandwidth: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthKindArg {
    Fgn,
    Ar1,
    WhiteNoise,
    RandomWalk,
}

impl FromStr for SynthKindArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Args, Default)]
pub struct SynthArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub kind: Option<SynthKindArg>,
    /// Hurst exponent (fgn).
    #[arg(long)]
    pub h: Option<f64>,
    /// AR coefficient (ar1).
    #[arg(long)]
    pub phi: Option<f64>,
    /// Number of returns.
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Standard deviation of the daily log return; the generators emit unit
    /// variance and are rescaled by this factor.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// First date of the business-day calendar.
    #[arg(long)]
    pub start_date: Option<NaiveDate>,
}

/// Errors surfaced by the command line; `Usage` maps to exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Run(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Run(_) => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Flat `key = value` configuration text.
#[derive(Debug, Default)]
struct FlatConfig {
    values: BTreeMap<String, String>,
}

impl FlatConfig {
    fn load(path: Option<&Path>, allowed: &[&str]) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, allowed)
    }

    fn parse(text: &str, allowed: &[&str]) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Usage(format!("config line {}: expected key = value", n + 1)));
            };
            let key = k.trim().replace('_', "-");
            if !allowed.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("config line {}: unknown key {key:?}", n + 1)));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { values })
    }

    /// The flag value if given, else the config value, else `None`.
    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.values
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| CliError::Usage(format!("config key {key}: invalid value {v:?}")))
            })
            .transpose()
    }
}

const ANALYZE_KEYS: &[&str] = &[
    "inputs",
    "out",
    "workers",
    "format",
    "dfa-s-min",
    "dfa-s-max-divisor",
    "dfa-scales",
    "dma-lambda-min",
    "dma-lambda-max",
    "dma-lambda-step",
    "hhca-tau-max-lo",
    "hhca-tau-max-hi",
    "periodogram-exponent",
    "wavelet-level-offset",
    "wavelet-min-coeffs",
    "kpss-bandwidth",
];

const SYNTH_KEYS: &[&str] = &["out", "kind", "h", "phi", "t", "seed", "sigma", "start-date"];

/// Default daily return volatility of synthetic prices.
pub const DEFAULT_SIGMA: f64 = 0.01;

/// Resolved settings of an `analyze` run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub out: PathBuf,
    pub workers: usize,
    pub format: OutputFormat,
    pub analysis: AnalysisConfig,
}

impl RunConfig {
    pub fn new(inputs: Vec<PathBuf>, out: PathBuf) -> Self {
        Self {
            inputs,
            out,
            workers: 1,
            format: OutputFormat::Both,
            analysis: AnalysisConfig::default(),
        }
    }

    pub fn resolve(args: AnalyzeArgs) -> CliResult<Self> {
        let cfg = FlatConfig::load(args.config.as_deref(), ANALYZE_KEYS)?;
        let mut inputs = args.inputs;
        if inputs.is_empty() {
            if let Some(list) = cfg.values.get("inputs") {
                inputs = list.split(',').map(|s| PathBuf::from(s.trim())).collect();
            }
        }
        let out = cfg
            .pick(args.out, "out")?
            .ok_or_else(|| CliError::Usage("--out is required".into()))?;
        let mut a = AnalysisConfig::default();
        macro_rules! set {
            ($field:expr, $flag:expr, $key:literal) => {
                if let Some(v) = cfg.pick($flag, $key)? {
                    $field = v;
                }
            };
        }
        set!(a.dfa.s_min, args.dfa_s_min, "dfa-s-min");
        set!(a.dfa.s_max_divisor, args.dfa_s_max_divisor, "dfa-s-max-divisor");
        set!(a.dfa.n_scales, args.dfa_scales, "dfa-scales");
        set!(a.dma.lambda_min, args.dma_lambda_min, "dma-lambda-min");
        set!(a.dma.lambda_max, args.dma_lambda_max, "dma-lambda-max");
        set!(a.dma.lambda_step, args.dma_lambda_step, "dma-lambda-step");
        set!(a.hhca.tau_max_lo, args.hhca_tau_max_lo, "hhca-tau-max-lo");
        set!(a.hhca.tau_max_hi, args.hhca_tau_max_hi, "hhca-tau-max-hi");
        set!(
            a.periodogram.exponent,
            args.periodogram_exponent,
            "periodogram-exponent"
        );
        set!(
            a.wavelet.level_offset,
            args.wavelet_level_offset,
            "wavelet-level-offset"
        );
        set!(a.wavelet.min_coeffs, args.wavelet_min_coeffs, "wavelet-min-coeffs");
        if let Some(b) = cfg.pick(args.kpss_bandwidth, "kpss-bandwidth")? {
            a.kpss.bandwidth = Some(b);
        }
        a.validate().map_err(|e| CliError::Usage(e.to_string()))?;

        let workers = cfg.pick(args.workers, "workers")?.unwrap_or(1);
        if workers == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        Ok(Self {
            inputs,
            out,
            workers,
            format: cfg.pick(args.format, "format")?.unwrap_or(OutputFormat::Both),
            analysis: a,
        })
    }
}

/// Outcome of an `analyze` run.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeSummary {
    pub succeeded: Vec<String>,
    /// `(ticker, message)` for every ticker that could not be analyzed.
    pub failed: Vec<(String, String)>,
}

impl AnalyzeSummary {
    pub fn exit_code(&self) -> u8 {
        if self.failed.is_empty() {
            0
        } else {
            1
        }
    }
}

/// Expands directories into their `*.csv` files (sorted); rejects empty sets
/// and duplicate tickers.
pub fn collect_inputs(inputs: &[PathBuf]) -> CliResult<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.is_file() && f.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")))
                .collect();
            found.sort();
            files.extend(found);
        } else if p.is_file() {
            files.push(p.clone());
        } else {
            return Err(CliError::Usage(format!("no such input: {}", p.display())));
        }
    }
    if files.is_empty() {
        return Err(CliError::Usage("no input CSV files".into()));
    }
    let mut seen = BTreeSet::new();
    for f in &files {
        let t = ticker_of(f);
        if !seen.insert(t.clone()) {
            return Err(CliError::Usage(format!("duplicate ticker {t:?}")));
        }
    }
    Ok(files)
}

fn ticker_of(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("unknown")
        .to_string()
}

fn analyze_file(path: &Path, cfg: &AnalysisConfig) -> crate::Result<ReportJson> {
    let prices = PriceSeries::from_csv_path(path)?;
    let returns = log_returns(&prices)?;
    if returns.len() < MIN_RETURNS {
        return Err(Error::InsufficientData {
            what: "analysis",
            needed: MIN_RETURNS,
            got: returns.len(),
        });
    }
    if returns.len() < RECOMMENDED_RETURNS {
        eprintln!(
            "warning: {}: only {} returns, estimates are unreliable below {RECOMMENDED_RETURNS}",
            prices.ticker(),
            returns.len()
        );
    }
    Ok(ReportJson::from(&analyze(&returns, cfg)?))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

/// Runs the full pipeline and writes reports and plot data under `cfg.out`.
pub fn run_analyze(cfg: &RunConfig) -> CliResult<AnalyzeSummary> {
    let files = collect_inputs(&cfg.inputs)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} workers: {e}", cfg.workers)))?;
    // collect keeps input order whatever the completion order
    let results: Vec<(String, crate::Result<ReportJson>)> = pool.install(|| {
        files
            .par_iter()
            .map(|f| (ticker_of(f), analyze_file(f, &cfg.analysis)))
            .collect()
    });

    let mut reports = Vec::new();
    let mut failed = Vec::new();
    for (ticker, r) in results {
        match r {
            Ok(rep) => reports.push(rep),
            Err(e) => {
                eprintln!("error: {ticker}: {e}");
                failed.push((ticker, e.to_string()));
            }
        }
    }
    reports.sort_by(|a, b| cmp_rank(a.ei, &a.ticker, b.ei, &b.ticker));

    write_outputs(&cfg.out, cfg.format, &reports).map_err(CliError::Run)?;
    Ok(AnalyzeSummary {
        succeeded: reports.iter().map(|r| r.ticker.clone()).collect(),
        failed,
    })
}

/// Writes per-ticker JSON and the plot CSVs. `reports` must already be in
/// ranking order; every CSV number is copied from the reports.
pub fn write_outputs(out: &Path, format: OutputFormat, reports: &[ReportJson]) -> crate::Result<()> {
    fs::create_dir_all(out)?;
    if matches!(format, OutputFormat::Json | OutputFormat::Both) {
        let dir = out.join("reports");
        fs::create_dir_all(&dir)?;
        for r in reports {
            fs::write(dir.join(format!("{}.json", r.ticker)), r.to_json_pretty())?;
        }
    }
    if matches!(format, OutputFormat::Json) {
        return Ok(());
    }

    let table = |header: &str, row: &dyn Fn(&ReportJson) -> String| {
        let mut s = format!("{header}\n");
        for r in reports {
            s.push_str(&row(r));
            s.push('\n');
        }
        s
    };
    fs::write(
        out.join("ranking.csv"),
        table("ticker,ei", &|r| format!("{},{}", r.ticker, r.ei)),
    )?;
    fs::write(
        out.join("hurst.csv"),
        table("ticker,mean_h", &|r| format!("{},{}", r.ticker, r.mean_h)),
    )?;
    fs::write(
        out.join("fractal.csv"),
        table("ticker,mean_d", &|r| format!("{},{}", r.ticker, r.mean_d)),
    )?;
    fs::write(
        out.join("dh_scatter.csv"),
        table("ticker,mean_h,mean_d", &|r| {
            format!("{},{},{}", r.ticker, r.mean_h, r.mean_d)
        }),
    )?;
    fs::write(
        out.join("shares.csv"),
        table("ticker,local_share,global_share", &|r| {
            format!("{},{},{}", r.ticker, fmt_opt(r.local_share), fmt_opt(r.global_share))
        }),
    )?;

    let pairs: Vec<(f64, f64)> = reports.iter().map(|r| (r.mean_h, r.mean_d)).collect();
    let mut fit = String::from("slope,intercept,r2\n");
    match dh_fit(&pairs) {
        Ok(f) => writeln!(fit, "{},{},{}", f.slope, f.intercept, f.r2),
        Err(_) => writeln!(fit, "NA,NA,NA"),
    }
    .expect("write to string");
    fs::write(out.join("dh_fit.csv"), fit)?;
    Ok(())
}

/// Resolved settings of a `synth` run.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub spec: SynthSpec,
    pub out: PathBuf,
    pub sigma: f64,
    pub start_date: NaiveDate,
}

fn default_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date")
}

impl SynthConfig {
    pub fn resolve(args: SynthArgs) -> CliResult<Self> {
        let cfg = FlatConfig::load(args.config.as_deref(), SYNTH_KEYS)?;
        let out = cfg
            .pick(args.out, "out")?
            .ok_or_else(|| CliError::Usage("--out is required".into()))?;
        let kind = cfg.pick(args.kind, "kind")?.unwrap_or(SynthKindArg::Fgn);
        let h = cfg.pick(args.h, "h")?;
        let phi = cfg.pick(args.phi, "phi")?;
        let kind = match kind {
            SynthKindArg::Fgn => SynthKind::Fgn {
                h: h.ok_or_else(|| CliError::Usage("--h is required for fgn".into()))?,
            },
            SynthKindArg::Ar1 => SynthKind::Ar1 {
                phi: phi.ok_or_else(|| CliError::Usage("--phi is required for ar1".into()))?,
            },
            SynthKindArg::WhiteNoise => SynthKind::WhiteNoise,
            SynthKindArg::RandomWalk => SynthKind::RandomWalk,
        };
        let t = cfg
            .pick(args.t, "t")?
            .ok_or_else(|| CliError::Usage("--t is required".into()))?;
        let seed = cfg.pick(args.seed, "seed")?.unwrap_or(0);
        let sigma = cfg.pick(args.sigma, "sigma")?.unwrap_or(DEFAULT_SIGMA);
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(CliError::Usage(format!("--sigma must be positive, got {sigma}")));
        }
        let start_date = cfg.pick(args.start_date, "start-date")?.unwrap_or_else(default_start);
        Ok(Self {
            spec: SynthSpec { kind, t, seed },
            out,
            sigma,
            start_date,
        })
    }
}

fn business_days(start: NaiveDate) -> impl Iterator<Item = NaiveDate> {
    start
        .iter_days()
        .filter(|d| !matches!(d.weekday(), Weekday::Sat | Weekday::Sun))
}

/// Renders synthetic returns as prices `exp(cumulative return)` on a
/// business-day calendar, starting from a close of 1.
pub fn synth_csv(returns: &[f64], start: NaiveDate) -> String {
    let mut s = String::from("date,close\n");
    let mut level = 0.0;
    let closes = std::iter::once(0.0).chain(returns.iter().map(|r| {
        level += r;
        level
    }));
    for (date, log_price) in business_days(start).zip(closes) {
        writeln!(s, "{},{}", date.format("%Y-%m-%d"), log_price.exp()).expect("write to string");
    }
    s
}

pub fn run_synth(cfg: &SynthConfig) -> CliResult<()> {
    let returns = generate(&cfg.spec)?.affine(cfg.sigma, 0.0)?;
    if let Some(dir) = cfg.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(Error::from)?;
    }
    fs::write(&cfg.out, synth_csv(returns.values(), cfg.start_date)).map_err(Error::from)?;
    Ok(())
}

/// Entry point shared by the binary and tests.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Analyze(a) => RunConfig::resolve(a).and_then(|c| run_analyze(&c)).map(|s| {
            eprintln!("analyzed {} ticker(s), {} failed", s.succeeded.len(), s.failed.len());
            s.exit_code()
        }),
        Command::Synth(a) => SynthConfig::resolve(a).and_then(|c| run_synth(&c)).map(|_| 0),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_config_parsing() {
        let c = FlatConfig::parse("# comment\nworkers = 3\ndfa_s_min=6  # trailing\n\n", ANALYZE_KEYS).unwrap();
        assert_eq!(c.pick::<usize>(None, "workers").unwrap(), Some(3));
        assert_eq!(c.pick::<usize>(Some(9), "workers").unwrap(), Some(9));
        assert_eq!(c.pick::<usize>(None, "dfa-s-min").unwrap(), Some(6));
        assert!(FlatConfig::parse("bogus = 1", ANALYZE_KEYS).is_err());
        assert!(FlatConfig::parse("workers 1", ANALYZE_KEYS).is_err());
        let c = FlatConfig::parse("workers = x", ANALYZE_KEYS).unwrap();
        assert!(c.pick::<usize>(None, "workers").is_err());
    }

    #[test]
    fn synth_csv_layout() {
        let start = NaiveDate::from_ymd_opt(2000, 1, 6).unwrap(); // Thursday
        let csv = synth_csv(&[0.0, 1.0, -1.0], start);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "date,close");
        assert_eq!(lines[1], "2000-01-06,1");
        assert_eq!(lines[2], "2000-01-07,1");
        assert_eq!(lines[3], format!("2000-01-10,{}", 1f64.exp()));
        assert_eq!(lines[4], "2000-01-11,1");
    }

    #[test]
    fn defaults_when_unset() {
        let args = AnalyzeArgs {
            inputs: vec!["x.csv".into()],
            out: Some("out".into()),
            ..Default::default()
        };
        let c = RunConfig::resolve(args).unwrap();
        assert_eq!(c.analysis, AnalysisConfig::default());
        assert_eq!(c.workers, 1);
        let bad = AnalyzeArgs {
            out: Some("out".into()),
            dma_lambda_min: Some(4),
            ..Default::default()
        };
        assert_eq!(RunConfig::resolve(bad).unwrap_err().exit_code(), 2);
    }
}
