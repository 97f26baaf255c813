//! `bis`: robust credible intervals and probability boxes from the command line.

mod input;

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use bis_core::baselines::{coverage_experiment, CoverageReport, CoverageSetup, Generator, Method};
use bis_core::dirichlet::{sample_unit_dp_grid, sample_unit_dp_stick};
use bis_core::pbox::expected_pbox;
use bis_core::{
    default_n_resample, interval_estimate, BisSampler, BoundingInterval, Error, ExtendedReal, Functional,
    ProbabilityBox, RngStream, WeightedStepCdf,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    fn numeric(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::IndeterminateSum | Error::InvalidWeights(_) | Error::Empty => CliError::numeric(e.to_string()),
            _ => CliError::input(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "bis", version, about = "Bayesian interval sampling: robust credible intervals and probability boxes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Credible interval for a population parameter.
    Infer(InferArgs),
    /// Expected probability box, optionally with sampled realisations.
    Pbox(PboxArgs),
    /// Coverage comparison of interval methods on synthetic data.
    Compare(CompareArgs),
    /// Realisations of the unit Dirichlet process.
    UdpSample(UdpArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Observations, one per line ("-" reads stdin).
    #[arg(long)]
    input: PathBuf,
    /// Read this column of a CSV file instead.
    #[arg(long)]
    column: Option<String>,
    /// Bounding interval of the population; "inf" and "-inf" are accepted.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], required = true, allow_negative_numbers = true, allow_hyphen_values = true)]
    bounds: Vec<ExtendedReal>,
}

impl DataArgs {
    fn interval(&self) -> Result<BoundingInterval, CliError> {
        Ok(BoundingInterval::new(self.bounds[0], self.bounds[1])?)
    }

    fn observations(&self) -> Result<Vec<f64>, CliError> {
        input::read_observations(&self.input, self.column.as_deref())
    }
}

#[derive(Args)]
struct InferArgs {
    #[command(flatten)]
    data: DataArgs,
    /// mean | median | quantile:p | trunc-mean:p | cvar:p
    #[arg(long, default_value = "median")]
    param: Functional,
    #[arg(long, default_value_t = 0.95)]
    credibility: f64,
    /// Number of realisations [default: ceil(100 / (1 - credibility))]
    #[arg(long)]
    resamples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the bounds' empirical CDFs as CSV (value, F_lower, F_upper).
    #[arg(long)]
    qbox: Option<PathBuf>,
}

#[derive(Args)]
struct PboxArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Number of sampled realisations to add as column pairs.
    #[arg(long, default_value_t = 0)]
    realisations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Preset {
    /// Lognormal(0, 1) truncated to [0, 50].
    Table3,
    /// As table3, plus the value 50 with probability 0.01.
    Table4,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long, value_enum, default_value = "table3")]
    preset: Preset,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 2000)]
    resamples: usize,
    #[arg(long, default_value_t = 50)]
    n_sample: usize,
    #[arg(long, default_value_t = 0.95)]
    credibility: f64,
    #[arg(long, default_value = "mean")]
    param: Functional,
    /// Bounding interval given to interval sampling.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values = ["0", "50"], allow_negative_numbers = true, allow_hyphen_values = true)]
    bounds: Vec<ExtendedReal>,
    /// True parameter value; required unless the parameter is the mean.
    #[arg(long)]
    true_value: Option<f64>,
    /// Generator overrides.
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    atom_prob: Option<f64>,
    /// Comma-separated: student-t, bootstrap, bayesian-bootstrap, bis.
    #[arg(long, value_delimiter = ',', default_value = "student-t,bootstrap,bis")]
    methods: Vec<Method>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct UdpArgs {
    /// Concentration.
    #[arg(long)]
    alpha: f64,
    /// Grid cells on [0, 1]; also the output resolution.
    #[arg(long, default_value_t = 200)]
    cells: usize,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Use truncated stick-breaking instead of the grid.
    #[arg(long)]
    stick: bool,
    /// Stick-breaking terms.
    #[arg(long, default_value_t = 100)]
    terms: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Echoed into every output so a result can be reproduced.
#[derive(Serialize)]
struct RunManifest {
    command: &'static str,
    args: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bounds: Option<[ExtendedReal; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    functional: Option<Functional>,
    #[serde(skip_serializing_if = "Option::is_none")]
    credibility: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_resample: Option<usize>,
    seed: u64,
    version: &'static str,
}

impl RunManifest {
    fn new(command: &'static str, seed: u64) -> Self {
        RunManifest {
            command,
            args: std::env::args().skip(1).collect(),
            input: None,
            bounds: None,
            functional: None,
            credibility: None,
            n_resample: None,
            seed,
            version: VERSION,
        }
    }

    fn with_data(mut self, data: &DataArgs) -> Self {
        self.input = Some(data.input.display().to_string());
        self.bounds = Some([data.bounds[0], data.bounds[1]]);
        self
    }

    fn csv_line(&self) -> String {
        format!("# manifest: {}\n", serde_json::to_string(self).expect("manifest serialises"))
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::input(format!("cannot write {}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::input(format!("cannot write to stdout: {e}"))),
    }
}

#[derive(Serialize)]
struct IntervalJson {
    lo: ExtendedReal,
    hi: ExtendedReal,
}

#[derive(Serialize)]
struct InferJson {
    interval: IntervalJson,
    credibility: f64,
    n_resample: usize,
    seed: u64,
    unbounded: bool,
    tail_resolution_warning: bool,
    manifest: RunManifest,
}

fn check_credibility(c: f64) -> Result<(), CliError> {
    if c > 0.0 && c < 1.0 {
        Ok(())
    } else {
        Err(CliError::input(format!("credibility must lie in (0, 1), got {c}")))
    }
}

fn infer(args: InferArgs) -> Result<(), CliError> {
    check_credibility(args.credibility)?;
    let interval = args.data.interval()?;
    let data = args.data.observations()?;
    let n_resample = match args.resamples {
        Some(0) => return Err(CliError::input("--resamples must be at least 1")),
        Some(n) => n,
        None => default_n_resample(args.credibility)?,
    };
    let sampler = BisSampler::new(&data, interval)?;
    let qs = sampler.run_par(args.param, n_resample, args.seed)?;
    let est = interval_estimate(&qs, args.credibility)?;

    if let Some(path) = &args.qbox {
        emit(Some(path), &pbox_csv(&qs.pbox()?, &[]))?;
    }
    let mut manifest = RunManifest::new("infer", args.seed).with_data(&args.data);
    manifest.functional = Some(args.param);
    manifest.credibility = Some(args.credibility);
    manifest.n_resample = Some(n_resample);
    let result = InferJson {
        interval: IntervalJson { lo: est.lo, hi: est.hi },
        credibility: args.credibility,
        n_resample,
        seed: args.seed,
        unbounded: est.is_unbounded(),
        tail_resolution_warning: n_resample < default_n_resample(args.credibility)?,
        manifest,
    };
    if result.tail_resolution_warning {
        eprintln!("warning: {n_resample} resamples is below the recommended 100 / (1 - c); tail quantiles are coarse");
    }
    let mut text = serde_json::to_string_pretty(&result).expect("result serialises");
    text.push('\n');
    emit(args.out.as_deref(), &text)
}

/// One row per breakpoint of `pbox`: `x, F_lower, F_upper`, followed by the
/// lower/upper pair of each extra box.
fn pbox_csv(pbox: &ProbabilityBox, extra: &[ProbabilityBox]) -> String {
    let mut xs = pbox.breakpoints();
    for b in extra {
        xs.extend(b.breakpoints());
    }
    xs.sort_unstable();
    xs.dedup();
    let mut s = String::from("x,F_lower,F_upper");
    for k in 1..=extra.len() {
        write!(s, ",lower_{k},upper_{k}").unwrap();
    }
    s.push('\n');
    for x in xs {
        write!(s, "{x},{},{}", pbox.lower().cdf(x), pbox.upper().cdf(x)).unwrap();
        for b in extra {
            write!(s, ",{},{}", b.lower().cdf(x), b.upper().cdf(x)).unwrap();
        }
        s.push('\n');
    }
    s
}

fn pbox(args: PboxArgs) -> Result<(), CliError> {
    let interval = args.data.interval()?;
    let data = args.data.observations()?;
    let sampler = BisSampler::new(&data, interval)?;
    let expected = expected_pbox(sampler.stats());
    let realisations: Vec<ProbabilityBox> = (0..args.realisations as u64)
        .map(|i| sampler.realization(&mut RngStream::substream(args.seed, i)).pbox())
        .collect();
    let manifest = RunManifest::new("pbox", args.seed).with_data(&args.data);
    let text = manifest.csv_line() + &pbox_csv(&expected, &realisations);
    emit(args.out.as_deref(), &text)
}

fn preset_generator(args: &CompareArgs) -> Result<Generator, CliError> {
    let base = Generator::TruncatedLognormal {
        mu: args.mu.unwrap_or(0.0),
        sigma: args.sigma.unwrap_or(1.0),
        lo: 0.0,
        hi: 50.0,
    };
    let atom_prob = match args.preset {
        Preset::Table3 => args.atom_prob,
        Preset::Table4 => Some(args.atom_prob.unwrap_or(0.01)),
    };
    let gen = match atom_prob {
        None => base,
        Some(p) => Generator::ExtremeMixture {
            base: Box::new(base),
            atom: 50.0,
            atom_prob: p,
        },
    };
    gen.validate()?;
    Ok(gen)
}

#[derive(Serialize)]
struct CompareJson {
    preset: Preset,
    generator: Generator,
    true_value: f64,
    n_sample: usize,
    reports: Vec<CoverageReport>,
    manifest: RunManifest,
}

fn compare(args: CompareArgs) -> Result<(), CliError> {
    check_credibility(args.credibility)?;
    if args.trials == 0 || args.resamples == 0 || args.n_sample < 2 {
        return Err(CliError::input("--trials and --resamples must be positive and --n-sample at least 2"));
    }
    if args.methods.is_empty() {
        return Err(CliError::input("no methods selected"));
    }
    let generator = preset_generator(&args)?;
    let true_value = match (args.true_value, args.param) {
        (Some(v), _) => v,
        (None, Functional::Mean) => generator.true_mean(),
        (None, f) => return Err(CliError::input(format!("--true-value is required for {f}"))),
    };
    let interval = BoundingInterval::new(args.bounds[0], args.bounds[1])?;
    let reports = args
        .methods
        .iter()
        .map(|&method| {
            coverage_experiment(&CoverageSetup {
                generator: generator.clone(),
                true_q: true_value,
                method,
                functional: args.param,
                n_sample: args.n_sample,
                credibility: args.credibility,
                n_trials: args.trials,
                n_resample: args.resamples,
                interval,
                seed: args.seed,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut manifest = RunManifest::new("compare", args.seed);
    manifest.bounds = Some([args.bounds[0], args.bounds[1]]);
    manifest.functional = Some(args.param);
    manifest.credibility = Some(args.credibility);
    manifest.n_resample = Some(args.resamples);
    let text = match args.format {
        Format::Csv => {
            let mut s = manifest.csv_line();
            s.push_str("method,credibility,n_trials,hit_rate,median_lo,median_hi\n");
            for r in &reports {
                writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    r.method, r.credibility, r.n_trials, r.hit_rate, r.median_lo, r.median_hi
                )
                .unwrap();
            }
            s
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&CompareJson {
                preset: args.preset,
                generator,
                true_value,
                n_sample: args.n_sample,
                reports,
                manifest,
            })
            .expect("report serialises");
            s.push('\n');
            s
        }
    };
    emit(args.out.as_deref(), &text)
}

fn udp_sample(args: UdpArgs) -> Result<(), CliError> {
    if args.cells == 0 || args.count == 0 {
        return Err(CliError::input("--cells and --count must be positive"));
    }
    let draws: Vec<WeightedStepCdf> = (0..args.count as u64)
        .map(|i| {
            let mut rng = RngStream::substream(args.seed, i);
            if args.stick {
                sample_unit_dp_stick(args.alpha, args.terms, &mut rng)
            } else {
                sample_unit_dp_grid(args.alpha, args.cells, &mut rng)
            }
        })
        .collect::<Result<_, _>>()?;
    let mut s = RunManifest::new("udp-sample", args.seed).csv_line();
    s.push('x');
    for k in 1..=args.count {
        write!(s, ",F_{k}").unwrap();
    }
    s.push('\n');
    for i in 1..=args.cells {
        let x = i as f64 / args.cells as f64;
        write!(s, "{x}").unwrap();
        let xe = ExtendedReal::finite(x)?;
        for d in &draws {
            write!(s, ",{}", d.cdf(xe)).unwrap();
        }
        s.push('\n');
    }
    emit(args.out.as_deref(), &s)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Infer(a) => infer(a),
        Command::Pbox(a) => pbox(a),
        Command::Compare(a) => compare(a),
        Command::UdpSample(a) => udp_sample(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
