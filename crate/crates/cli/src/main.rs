//! Command-line surface for permutation-space compression.
//!
//! Permutation files are plain text, one permutation per line, space-separated
//! 1-based values. All randomized subcommands take `--seed` and are
//! bit-reproducible; output goes to stdout unless `--out` names a file.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use permcode::geometry;
use permcode::harness::{
    self, csv_header, moment_reference, ExperimentConfig, MomentValue, CSV_SCHEMA_VERSION,
};
use permcode::mallows::{entropy, MallowsModel};
use permcode::quantize::{schedule, Mode, Regime};
use permcode::{LogBase, Metric, Permutation};

#[derive(Parser)]
#[command(
    name = "permcode",
    about = "Lossy compression in permutation spaces: distances, quantizers, ball sizes, Mallows model",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distances between consecutive line pairs of a permutation file.
    Dist(DistArgs),
    /// Encode permutations with a scheduled quantizer and print a summary.
    Quantize(QuantizeArgs),
    /// Mallows model: sampling, entropy, and pmf evaluation.
    #[command(subcommand)]
    Mallows(MallowsCmd),
    /// Rate-distortion sweep as CSV (per-delta experiments or a JSON config).
    Rdcurve(RdcurveArgs),
    /// Metric ball sizes as CSV.
    Ballsize(BallsizeArgs),
    /// Monte Carlo distance moments vs their references, as CSV.
    Moments(MomentsArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MetricArg {
    Footrule,
    Chebyshev,
    Tau,
    Invl1,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Metric {
        match m {
            MetricArg::Footrule => Metric::Footrule,
            MetricArg::Chebyshev => Metric::Chebyshev,
            MetricArg::Tau => Metric::KendallTau,
            MetricArg::Invl1 => Metric::InversionL1,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Worst,
    Average,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Worst => Mode::Worst,
            ModeArg::Average => Mode::Average,
        }
    }
}

/// Regime selection flags shared by quantize/rdcurve.
#[derive(Args, Debug)]
struct RegimeArgs {
    /// Small regime: target a*n^delta (needs --a and --delta).
    #[arg(long, conflicts_with_all = ["moderate", "large"])]
    small: bool,
    /// Moderate regime: target n^(1+delta), or n^delta for chebyshev (needs --delta).
    #[arg(long, conflicts_with = "large")]
    moderate: bool,
    /// Large regime: target b*n^2 (needs --b).
    #[arg(long)]
    large: bool,
    /// Small-regime coefficient a > 0.
    #[arg(long)]
    a: Option<f64>,
    /// Exponent 0 < delta <= 1.
    #[arg(long)]
    delta: Option<f64>,
    /// Large-regime coefficient 0 < b <= 1/2.
    #[arg(long)]
    b: Option<f64>,
}

impl RegimeArgs {
    fn to_regime(&self) -> Result<Regime> {
        match (self.small, self.moderate, self.large) {
            (true, false, false) => {
                let (Some(a), Some(delta)) = (self.a, self.delta) else {
                    bail!("--small needs both --a and --delta");
                };
                Ok(Regime::Small { a, delta })
            }
            (false, true, false) => {
                let Some(delta) = self.delta else {
                    bail!("--moderate needs --delta");
                };
                Ok(Regime::Moderate { delta })
            }
            (false, false, true) => {
                let Some(b) = self.b else {
                    bail!("--large needs --b");
                };
                Ok(Regime::Large { b })
            }
            _ => bail!("choose exactly one of --small / --moderate / --large"),
        }
    }
}

#[derive(Args)]
struct DistArgs {
    /// Distance measure.
    #[arg(long, value_enum)]
    metric: MetricArg,
    /// Input file; pairs are consecutive lines (1,2), (3,4), ...
    #[arg(long)]
    input: PathBuf,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct QuantizeArgs {
    /// Space the schedule optimizes for.
    #[arg(long, value_enum)]
    space: MetricArg,
    #[command(flatten)]
    regime: RegimeArgs,
    /// Worst-case or average-case schedule.
    #[arg(long, value_enum, default_value = "worst")]
    mode: ModeArg,
    /// Permutation size for generated input.
    #[arg(long, conflicts_with = "input")]
    n: Option<usize>,
    /// How many uniform permutations to generate.
    #[arg(long, default_value_t = 10, conflicts_with = "input")]
    count: u64,
    /// RNG seed for generated input.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Encode permutations from this file instead of generating.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Report logs in nats instead of bits.
    #[arg(long)]
    nats: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum MallowsCmd {
    /// Draw permutations from the model.
    Sample(MallowsSampleArgs),
    /// Closed-form entropy of the model.
    Entropy(MallowsEntropyArgs),
    /// Probability of one permutation under the model.
    Pmf(MallowsPmfArgs),
}

#[derive(Args)]
struct MallowsSampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    q: f64,
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Reference (mode) permutation; identity when omitted.
    #[arg(long)]
    reference: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MallowsEntropyArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    q: f64,
    /// Report in nats instead of bits.
    #[arg(long)]
    nats: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MallowsPmfArgs {
    #[arg(long)]
    q: f64,
    /// The permutation to evaluate, e.g. "1 5 4 2 3".
    #[arg(long)]
    perm: String,
    /// Reference (mode) permutation; identity when omitted.
    #[arg(long)]
    reference: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RdcurveArgs {
    /// Space for the per-delta sweep (ignored with --config).
    #[arg(long, value_enum, required_unless_present = "config")]
    space: Option<MetricArg>,
    #[arg(long, required_unless_present = "config")]
    n: Option<usize>,
    /// Comma-separated moderate-regime deltas, e.g. 0.1,0.3,0.5.
    #[arg(long, value_delimiter = ',', required_unless_present = "config")]
    deltas: Vec<f64>,
    #[arg(long, value_enum, default_value = "worst")]
    mode: ModeArg,
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON sweep config; overrides the flag-driven sweep.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BallsizeArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum)]
    metric: MetricArg,
    /// Emit one row per radius 0..=dmax.
    #[arg(long)]
    dmax: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MomentsArgs {
    #[arg(long, value_enum)]
    metric: MetricArg,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// One experiment in a JSON sweep file.
#[derive(Deserialize)]
struct SweepEntry {
    space: String,
    n: usize,
    regime: String,
    #[serde(default)]
    a: Option<f64>,
    #[serde(default)]
    delta: Option<f64>,
    #[serde(default)]
    b: Option<f64>,
    #[serde(default = "default_mode")]
    mode: String,
    #[serde(default = "default_trials")]
    trials: u64,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    mallows_q: Option<f64>,
}

fn default_mode() -> String {
    "worst".into()
}
fn default_trials() -> u64 {
    200
}

#[derive(Deserialize)]
struct SweepConfig {
    experiments: Vec<SweepEntry>,
}

fn parse_metric_name(s: &str) -> Result<Metric> {
    Ok(match s {
        "footrule" => Metric::Footrule,
        "chebyshev" => Metric::Chebyshev,
        "tau" => Metric::KendallTau,
        "invl1" => Metric::InversionL1,
        other => bail!("unknown space {other:?} (expected footrule/chebyshev/tau/invl1)"),
    })
}

impl SweepEntry {
    fn to_config(&self) -> Result<ExperimentConfig> {
        let space = parse_metric_name(&self.space)?;
        let regime = match self.regime.as_str() {
            "small" => Regime::Small {
                a: self.a.context("small regime needs \"a\"")?,
                delta: self.delta.context("small regime needs \"delta\"")?,
            },
            "moderate" => Regime::Moderate {
                delta: self.delta.context("moderate regime needs \"delta\"")?,
            },
            "large" => Regime::Large {
                b: self.b.context("large regime needs \"b\"")?,
            },
            other => bail!("unknown regime {other:?}"),
        };
        let mode = match self.mode.as_str() {
            "worst" => Mode::Worst,
            "average" => Mode::Average,
            other => bail!("unknown mode {other:?}"),
        };
        Ok(ExperimentConfig {
            space,
            n: self.n,
            regime,
            mode,
            trials: self.trials,
            seed: self.seed,
            mallows_q: self.mallows_q,
        })
    }
}

/// stdout or a file, chosen by --out.
struct Output {
    target: Box<dyn Write>,
}

impl Output {
    fn new(out: &Option<PathBuf>) -> Result<Self> {
        let target: Box<dyn Write> = match out {
            Some(path) => Box::new(
                fs::File::create(path)
                    .with_context(|| format!("cannot create {}", path.display()))?,
            ),
            None => Box::new(io::stdout().lock()),
        };
        Ok(Output { target })
    }

    fn line(&mut self, s: impl AsRef<str>) -> Result<()> {
        writeln!(self.target, "{}", s.as_ref())?;
        Ok(())
    }
}

fn read_permutation_file(path: &PathBuf) -> Result<Vec<Permutation>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut perms = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let p = Permutation::parse_line(line)
            .with_context(|| format!("{}: line {}", path.display(), i + 1))?;
        perms.push(p);
    }
    Ok(perms)
}

fn parse_inline_permutation(s: &str) -> Result<Permutation> {
    Permutation::parse_line(s).with_context(|| format!("bad permutation {s:?}"))
}

fn random_permutations(n: usize, count: u64, seed: u64) -> Vec<Permutation> {
    (0..count)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            let mut v: Vec<u32> = (1..=n as u32).collect();
            v.shuffle(&mut rng);
            Permutation::new(v).expect("shuffle preserves values")
        })
        .collect()
}

fn base_of(nats: bool) -> LogBase {
    if nats {
        LogBase::Natural
    } else {
        LogBase::Two
    }
}

fn cmd_dist(args: &DistArgs) -> Result<()> {
    let perms = read_permutation_file(&args.input)?;
    if perms.len() % 2 != 0 {
        bail!(
            "{}: expected an even number of permutations (pairs), got {}",
            args.input.display(),
            perms.len()
        );
    }
    let metric: Metric = args.metric.into();
    let mut out = Output::new(&args.out)?;
    for (i, pair) in perms.chunks(2).enumerate() {
        let d = metric
            .distance(&pair[0], &pair[1])
            .with_context(|| format!("pair {}", i + 1))?;
        out.line(d.to_string())?;
    }
    Ok(())
}

fn cmd_quantize(args: &QuantizeArgs) -> Result<()> {
    let regime = args.regime.to_regime()?;
    let space: Metric = args.space.into();
    let mode: Mode = args.mode.into();
    let inputs = match &args.input {
        Some(path) => read_permutation_file(path)?,
        None => {
            let n = args.n.context("need --n (or --input)")?;
            random_permutations(n, args.count, args.seed)
        }
    };
    if inputs.is_empty() {
        bail!("no input permutations");
    }
    let n = inputs[0].n();
    let sched = schedule(space, n, regime, mode)?;
    let base = base_of(args.nats);
    let mut out = Output::new(&args.out)?;
    let mut worst = 0u64;
    let mut total = 0u64;
    for (i, p) in inputs.iter().enumerate() {
        let coded = sched
            .encode(p)
            .with_context(|| format!("input {} has n = {}, schedule wants {}", i + 1, p.n(), n))?;
        let d = space.distance(p, &coded).expect("encoder preserves n");
        worst = worst.max(d);
        total += d;
        out.line(coded.to_string())?;
    }
    let unit = if args.nats { "nats" } else { "bits" };
    out.line(format!(
        "# scheme={} space={} mode={:?} n={} log_codebook={:.4}{unit} guaranteed_distortion={:.4} observed_worst={} observed_mean={:.4}",
        sched.describe(),
        space.name(),
        mode,
        n,
        sched.log_codebook_size(base),
        sched.guaranteed_distortion(),
        worst,
        total as f64 / inputs.len() as f64,
    ))?;
    Ok(())
}

fn cmd_mallows(cmd: &MallowsCmd) -> Result<()> {
    match cmd {
        MallowsCmd::Sample(a) => {
            let reference = match &a.reference {
                Some(s) => parse_inline_permutation(s)?,
                None => Permutation::identity(a.n),
            };
            if reference.n() != a.n {
                bail!("--reference has n = {}, but --n is {}", reference.n(), a.n);
            }
            let model = MallowsModel::new(a.q, reference)?;
            let mut out = Output::new(&a.out)?;
            for t in 0..a.count {
                let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
                rng.set_stream(t);
                out.line(model.sample(&mut rng).to_string())?;
            }
            Ok(())
        }
        MallowsCmd::Entropy(a) => {
            if a.q <= 0.0 {
                bail!("--q must be positive");
            }
            let e = entropy(a.n, a.q, base_of(a.nats));
            let mut out = Output::new(&a.out)?;
            out.line(format!("total {}", e.total))?;
            out.line(format!("linear_coefficient {}", e.linear_coefficient))?;
            out.line(format!("remainder {}", e.remainder))?;
            Ok(())
        }
        MallowsCmd::Pmf(a) => {
            let perm = parse_inline_permutation(&a.perm)?;
            let reference = match &a.reference {
                Some(s) => parse_inline_permutation(s)?,
                None => Permutation::identity(perm.n()),
            };
            let model = MallowsModel::new(a.q, reference)?;
            let p = model.pmf(&perm)?;
            Output::new(&a.out)?.line(format!("{p}"))?;
            Ok(())
        }
    }
}

fn cmd_rdcurve(args: &RdcurveArgs) -> Result<()> {
    let configs: Vec<ExperimentConfig> = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            let sweep: SweepConfig = serde_json::from_str(&text)
                .with_context(|| format!("{}: invalid sweep config", path.display()))?;
            sweep
                .experiments
                .iter()
                .map(SweepEntry::to_config)
                .collect::<Result<_>>()?
        }
        None => {
            let space: Metric = args.space.expect("required without --config").into();
            let n = args.n.expect("required without --config");
            args.deltas
                .iter()
                .map(|&delta| {
                    ExperimentConfig::uniform(
                        space,
                        n,
                        Regime::Moderate { delta },
                        args.mode.into(),
                        args.trials,
                        args.seed,
                    )
                })
                .collect()
        }
    };
    let mut out = Output::new(&args.out)?;
    out.line(format!("{},rate", csv_header()))?;
    for cfg in &configs {
        let record = harness::run_experiment(cfg)?;
        let rate = record.log2_codebook / geometry::log_factorial(record.n, LogBase::Two);
        out.line(format!("{},{rate}", record.to_csv_row()))?;
    }
    Ok(())
}

fn cmd_ballsize(args: &BallsizeArgs) -> Result<()> {
    let metric: Metric = args.metric.into();
    let mut out = Output::new(&args.out)?;
    out.line("schema_version,n,metric,d,count")?;
    for d in 0..=args.dmax {
        let count = match metric {
            // Kendall balls are center-independent; the cumulative Mahonian
            // count is exact at any n.
            Metric::KendallTau => geometry::cumulative_t(args.n, d)?,
            // No closed form: enumerate around the identity (small n only).
            _ => geometry::ball_brute(metric, &Permutation::identity(args.n), d)?,
        };
        out.line(format!(
            "{CSV_SCHEMA_VERSION},{},{},{d},{count}",
            args.n,
            metric.name()
        ))?;
    }
    Ok(())
}

fn cmd_moments(args: &MomentsArgs) -> Result<()> {
    if args.trials < 2 {
        bail!("--trials must be at least 2");
    }
    let metric: Metric = args.metric.into();
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for t in 0..args.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        rng.set_stream(t);
        let mut v1: Vec<u32> = (1..=args.n as u32).collect();
        let mut v2 = v1.clone();
        v1.shuffle(&mut rng);
        v2.shuffle(&mut rng);
        let d = metric
            .distance(
                &Permutation::new(v1).expect("shuffled"),
                &Permutation::new(v2).expect("shuffled"),
            )
            .expect("equal n") as f64;
        sum += d;
        sumsq += d * d;
    }
    let trials = args.trials as f64;
    let mean = sum / trials;
    let var = (sumsq - sum * sum / trials) / (trials - 1.0);
    let reference = moment_reference(metric, args.n);
    let kind = |v: MomentValue| match v {
        MomentValue::Exact(_) => "exact",
        MomentValue::LowerBound(_) => "lower_bound",
        MomentValue::UpperBound(_) => "upper_bound",
        MomentValue::Leading(_) => "leading",
    };
    let mut out = Output::new(&args.out)?;
    out.line("schema_version,metric,n,trials,seed,emp_mean,emp_var,ref_mean,ref_mean_kind,ref_var,ref_var_kind")?;
    out.line(format!(
        "{CSV_SCHEMA_VERSION},{},{},{},{},{mean},{var},{},{},{},{}",
        metric.name(),
        args.n,
        args.trials,
        args.seed,
        reference.mean.value(),
        kind(reference.mean),
        reference.variance.value(),
        kind(reference.variance),
    ))?;
    Ok(())
}

fn main() -> Result<()> {
    if let Ok(threads) = std::env::var("PERMCODE_THREADS") {
        let threads: usize = threads
            .parse()
            .context("PERMCODE_THREADS must be a positive integer")?;
        let _ = harness::set_thread_count(threads);
    }
    let cli = Cli::parse();
    match &cli.command {
        Command::Dist(a) => cmd_dist(a),
        Command::Quantize(a) => cmd_quantize(a),
        Command::Mallows(m) => cmd_mallows(m),
        Command::Rdcurve(a) => cmd_rdcurve(a),
        Command::Ballsize(a) => cmd_ballsize(a),
        Command::Moments(a) => cmd_moments(a),
    }
}
