//! Rate/distortion calculators, moment references, and the Monte Carlo
//! experiment runner.
//!
//! The limit rate of a permutation code is `log|C| / log n!`; for targets
//! `D_n = Θ(n^(1+δ))` it converges to `1 - δ` (Chebyshev measures against
//! `Θ(n^δ)`). On top of that limit, the small and large regimes admit
//! second-order bounds on `r(D_n) = log|C| - R·log n!`, evaluated here at
//! leading order.
//!
//! Experiments are reproducible bit-for-bit: trial `t` of a run draws from
//! stream `t` of a ChaCha generator seeded with the experiment seed, and all
//! aggregation is exact integer arithmetic, so the parallel reduction order
//! cannot change results.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::logs::{ln_factorial, LogBase};
use crate::mallows::MallowsModel;
use crate::metrics::{chebyshev, footrule, inversion_l1, kendall_tau, Metric, MetricError};
use crate::perm::Permutation;
use crate::quantize::{schedule, Mode, QuantizerError, Regime, Schedule};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum HarnessError {
    #[error(transparent)]
    Quantizer(#[from] QuantizerError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("higher-order bounds are defined for the small and large regimes of tau/inversion-l1, not {0}")]
    NoHigherOrderBounds(String),
    #[error("experiment needs trials >= 1")]
    NoTrials,
}

/// Cap the worker pool used for parallel trials. Only the first call in a
/// process takes effect; later calls return an error from the pool builder.
pub fn set_thread_count(threads: usize) -> Result<(), rayon::ThreadPoolBuildError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
}

/// Limit rate `R(D_n)` with the regime exponent inferred from the single
/// point `(n, D_n)`.
///
/// Diagnostic only: asymptotic order is not invertible at one point, so
/// schedules never use this inference (they take a declared `δ`). `D = 0`
/// means lossless, `R = 1`.
pub fn rate_function(space: Metric, n: usize, d: f64) -> f64 {
    assert!(d >= 0.0);
    if d == 0.0 {
        return 1.0;
    }
    let delta = match space {
        Metric::Chebyshev => d.ln() / (n as f64).ln(),
        _ => d.ln() / (n as f64).ln() - 1.0,
    };
    (1.0 - delta).clamp(0.0, 1.0)
}

/// Leading-order bounds on the higher-order rate term; the unspecified
/// `O(·)` remainders are dropped, which `leading_order_only` flags.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HigherOrderBounds {
    pub lower: f64,
    pub upper: f64,
    /// Always true: these are leading terms with unspecified remainders.
    pub leading_order_only: bool,
}

/// Second-order rate bounds for the Kendall tau and inversion-l1 spaces in
/// the small (`D = a·n^δ`) and large (`D = b·n²`) regimes.
pub fn higher_order_bounds(
    space: Metric,
    regime: Regime,
    n: usize,
    base: LogBase,
) -> Result<HigherOrderBounds, HarnessError> {
    let nf = n as f64;
    let (lower_ln, upper_ln) = match (space, regime) {
        (Metric::KendallTau | Metric::InversionL1, Regime::Small { a, delta }) => {
            if !(a > 0.0 && delta > 0.0 && delta <= 1.0) {
                return Err(HarnessError::NoHigherOrderBounds(format!(
                    "small regime with a = {a}, delta = {delta}"
                )));
            }
            let nd = nf.powf(delta);
            let mut lower = if delta < 1.0 {
                -a * (1.0 - delta) * nd * nf.ln()
            } else {
                -nf * ((1.0 + a) * (1.0 + a).ln() - a * a.ln())
            };
            if space == Metric::InversionL1 {
                lower -= nd * std::f64::consts::LN_2;
            }
            let upper = match space {
                Metric::KendallTau => {
                    if a < 1.0 {
                        -nd * a * std::f64::consts::LN_2 / 2.0
                    } else {
                        let m = (2.0 * a).floor() as u64;
                        -nd * ln_factorial(m) / m as f64
                    }
                }
                _ => {
                    if a > 1.0 {
                        -nd.floor() * (2.0 * a - 1.0).ln()
                    } else {
                        -(a * nd).ceil() * 3f64.ln()
                    }
                }
            };
            (lower, upper)
        }
        (Metric::KendallTau | Metric::InversionL1, Regime::Large { b }) => {
            if !(b > 0.0 && b <= 0.5) {
                return Err(HarnessError::NoHigherOrderBounds(format!(
                    "large regime with b = {b}"
                )));
            }
            let lower = (nf * (1.0 / (2.0 * b * std::f64::consts::E.powi(2))).ln()).max(0.0);
            let cells = match space {
                Metric::KendallTau => (1.0 / (2.0 * b)).ceil(),
                _ => (1.0 / (4.0 * b)).ceil(),
            };
            (lower, nf * cells.ln())
        }
        (space, regime) => {
            return Err(HarnessError::NoHigherOrderBounds(format!(
                "{:?} in the {} regime",
                space,
                regime.name()
            )))
        }
    };
    Ok(HigherOrderBounds {
        lower: base.from_ln(lower_ln),
        upper: base.from_ln(upper_ln),
        leading_order_only: true,
    })
}

/// Exactness class of a reference moment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MomentValue {
    Exact(f64),
    LowerBound(f64),
    UpperBound(f64),
    /// Leading term of an expansion with unspecified lower-order remainder.
    Leading(f64),
}

impl MomentValue {
    pub fn value(self) -> f64 {
        match self {
            MomentValue::Exact(v)
            | MomentValue::LowerBound(v)
            | MomentValue::UpperBound(v)
            | MomentValue::Leading(v) => v,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentReference {
    pub mean: MomentValue,
    pub variance: MomentValue,
}

/// Reference mean/variance of each distance between two uniform permutations.
pub fn moment_reference(metric: Metric, n: usize) -> MomentReference {
    let nf = n as f64;
    match metric {
        Metric::KendallTau => MomentReference {
            mean: MomentValue::Exact(nf * (nf - 1.0) / 4.0),
            variance: MomentValue::Exact(nf * (2.0 * nf + 5.0) * (nf - 1.0) / 72.0),
        },
        Metric::Footrule => MomentReference {
            mean: MomentValue::Exact((nf * nf - 1.0) / 3.0),
            variance: MomentValue::Leading(2.0 * nf.powi(3) / 45.0),
        },
        Metric::InversionL1 => MomentReference {
            mean: MomentValue::LowerBound(nf * (nf - 1.0) / 8.0),
            variance: MomentValue::UpperBound((nf + 1.0) * (nf + 2.0) * (2.0 * nf + 3.0) / 6.0),
        },
        Metric::Chebyshev => MomentReference {
            mean: MomentValue::UpperBound(nf),
            variance: MomentValue::Leading(nf),
        },
    }
}

/// Parameters of one Monte Carlo quantization run.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub space: Metric,
    pub n: usize,
    pub regime: Regime,
    pub mode: Mode,
    pub trials: u64,
    pub seed: u64,
    /// Draw inputs from a Mallows model with this parameter (centered on the
    /// identity) instead of uniformly.
    pub mallows_q: Option<f64>,
}

impl ExperimentConfig {
    pub fn uniform(space: Metric, n: usize, regime: Regime, mode: Mode, trials: u64, seed: u64) -> Self {
        ExperimentConfig {
            space,
            n,
            regime,
            mode,
            trials,
            seed,
            mallows_q: None,
        }
    }
}

/// Stable CSV row layout version; bump when columns change.
pub const CSV_SCHEMA_VERSION: u32 = 1;

/// Outcome of one experiment; one CSV row.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRecord {
    pub space: Metric,
    pub scheme: String,
    pub n: usize,
    pub delta: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub target_d: f64,
    pub log2_codebook: f64,
    /// Largest distortion observed over the sampled inputs — not the true
    /// maximum; the analytic guarantee lives in the schedule.
    pub worst_d: u64,
    pub mean_d: f64,
    pub trials: u64,
    pub seed: u64,
}

pub fn csv_header() -> &'static str {
    "schema_version,space,scheme,n,delta,a,b,target_d,log2_codebook,worst_d,mean_d,trials,seed"
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

impl ExperimentRecord {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            CSV_SCHEMA_VERSION,
            self.space.name(),
            self.scheme,
            self.n,
            opt(self.delta),
            opt(self.a),
            opt(self.b),
            self.target_d,
            self.log2_codebook,
            self.worst_d,
            self.mean_d,
            self.trials,
            self.seed,
        )
    }
}

fn rng_for_trial(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn sample_input(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Permutation {
    match cfg.mallows_q {
        Some(q) => MallowsModel::centered(cfg.n, q)
            .expect("validated before the trial loop")
            .sample(rng),
        None => {
            let mut v: Vec<u32> = (1..=cfg.n as u32).collect();
            v.shuffle(rng);
            Permutation::new(v).expect("shuffle preserves the value set")
        }
    }
}

/// Run the scheduled quantizer over sampled inputs and record distortions.
///
/// Trials execute in parallel; determinism comes from per-trial RNG streams
/// and exact integer aggregation.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentRecord, HarnessError> {
    if cfg.trials == 0 {
        return Err(HarnessError::NoTrials);
    }
    if let Some(q) = cfg.mallows_q {
        MallowsModel::centered(cfg.n, q).expect("mallows_q must be positive");
    }
    let sched: Schedule = schedule(cfg.space, cfg.n, cfg.regime, cfg.mode)?;
    let (worst_d, total): (u64, u64) = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_for_trial(cfg.seed, t);
            let input = sample_input(cfg, &mut rng);
            let coded = sched.encode(&input).expect("schedule matches n");
            cfg.space
                .distance(&input, &coded)
                .expect("encoder preserves n")
        })
        .fold(|| (0u64, 0u64), |(w, s), d| (w.max(d), s + d))
        .reduce(|| (0u64, 0u64), |(w1, s1), (w2, s2)| (w1.max(w2), s1 + s2));
    let (delta, a, b) = match cfg.regime {
        Regime::Small { a, delta } => (Some(delta), Some(a), None),
        Regime::Moderate { delta } => (Some(delta), None, None),
        Regime::Large { b } => (None, None, Some(b)),
    };
    Ok(ExperimentRecord {
        space: cfg.space,
        scheme: sched.describe(),
        n: cfg.n,
        delta,
        a,
        b,
        target_d: cfg.regime.target_distortion(cfg.space, cfg.n),
        log2_codebook: sched.log_codebook_size(LogBase::Two),
        worst_d,
        mean_d: total as f64 / cfg.trials as f64,
        trials: cfg.trials,
        seed: cfg.seed,
    })
}

/// Outcome of the inequality checks over sampled pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationshipReport {
    pub n: usize,
    pub samples: u64,
    /// Violations of the always-true chain — anything nonzero is a bug.
    pub chain_violations: u64,
    pub c1: f64,
    /// Failures of `c1·n·chebyshev <= footrule`; rate should decay like 1/n.
    pub c1_violations: u64,
    pub c2: f64,
    /// Failures of `c2·kendall_tau <= inversion_l1`; rate should decay like 1/n.
    pub c2_violations: u64,
}

impl RelationshipReport {
    pub fn c1_rate(&self) -> f64 {
        self.c1_violations as f64 / self.samples as f64
    }
    pub fn c2_rate(&self) -> f64 {
        self.c2_violations as f64 / self.samples as f64
    }
}

/// Check, on `samples` uniform pairs from `S_n`, the deterministic chain
/// `n·l∞ >= l1 >= tau(inverses) >= inversion-l1(inverses)` and `>= l1/2`,
/// `tau/(2n-3) <= inversion-l1 <= tau`, plus the probabilistic-side
/// constants `c1` (l∞ vs l1) and `c2` (tau vs inversion-l1).
///
/// The `2n-3` factor is exact: a single unit change in one inversion-vector
/// coordinate can move both the changed element and, transitively, the
/// elements it crosses, and `tau = (2n-3)·inversion-l1` is attained (for
/// example by `[1,3,4,2]` vs `[2,3,4,1]` at `n = 4`, where `tau = 5` against
/// an inversion-l1 distance of 1).
pub fn relationship_tests(
    n: usize,
    samples: u64,
    seed: u64,
    c1: f64,
    c2: f64,
) -> RelationshipReport {
    assert!(n >= 2 && samples >= 1);
    let (chain_violations, c1_violations, c2_violations) = (0..samples)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_for_trial(seed, t);
            let mut v1: Vec<u32> = (1..=n as u32).collect();
            let mut v2 = v1.clone();
            v1.shuffle(&mut rng);
            v2.shuffle(&mut rng);
            let s1 = Permutation::new(v1).expect("shuffled permutation");
            let s2 = Permutation::new(v2).expect("shuffled permutation");
            let linf = chebyshev(&s1, &s2).expect("equal n");
            let l1 = footrule(&s1, &s2).expect("equal n");
            let tau = kendall_tau(&s1, &s2).expect("equal n");
            let invl1 = inversion_l1(&s1, &s2).expect("equal n");
            let (i1, i2) = (s1.inverse(), s2.inverse());
            let tau_inv = kendall_tau(&i1, &i2).expect("equal n");
            let invl1_inv = inversion_l1(&i1, &i2).expect("equal n");

            let chain_ok = (n as u64) * linf >= l1
                && l1 >= tau_inv
                && 2 * tau_inv >= l1
                && tau_inv >= invl1_inv
                && tau <= (2 * n as u64 - 3) * invl1
                && invl1 <= tau;
            let c1_ok = c1 * (n as f64) * (linf as f64) <= l1 as f64;
            let c2_ok = c2 * (tau as f64) <= invl1 as f64;
            (
                u64::from(!chain_ok),
                u64::from(!c1_ok),
                u64::from(!c2_ok),
            )
        })
        .reduce(
            || (0, 0, 0),
            |x, y| (x.0 + y.0, x.1 + y.1, x.2 + y.2),
        );
    RelationshipReport {
        n,
        samples,
        chain_violations,
        c1,
        c1_violations,
        c2,
        c2_violations,
    }
}
