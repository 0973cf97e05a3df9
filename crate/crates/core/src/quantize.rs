//! Lossy quantizers on permutation spaces and their parameter schedules.
//!
//! Two constructions:
//!
//! * [`BlockSortCode`] — sort the first `k` length-`m` blocks of the
//!   permutation (or of its inverse). Sorting a block cannot be undone by the
//!   decoder, so the codebook shrinks from `n!` to `n!/(m!)^k` codewords while
//!   the distortion stays bounded by closed-form expressions per metric.
//! * [`ScalarQuantizerSpec`] — quantize each inversion-vector coordinate
//!   independently to one of `m_k` reproduction points. Because the
//!   inversion-vector map is a bijection onto a product space, any quantized
//!   vector decodes back to a valid permutation.
//!
//! [`schedule`] picks parameters for a target distortion expressed through a
//! [`Regime`] (small `a·n^δ`, moderate `n^(1+δ)`, large `b·n²`), so that the
//! quantizer's guaranteed distortion stays at or below the target.
//!
//! [`CounterexampleCode`] is the construction showing that a code good for the
//! footrule metric need not be good for Chebyshev: its l1 distortion is
//! `O(n^(1+δ))`, yet with high probability its l∞ distortion is `Θ(n)`.

use thiserror::Error;

use crate::logs::{ln_factorial, LogBase};
use crate::metrics::Metric;
use crate::perm::{InversionVector, Permutation};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum QuantizerError {
    #[error("block parameters out of range: n={n}, k={k}, m={m} (need 2 <= m <= n, k >= 1, k*m <= n)")]
    BadBlockParams { n: usize, k: usize, m: usize },
    #[error("size mismatch: quantizer built for n = {expected}, input has n = {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("no closed-form bound for {metric:?} in {mode:?} mode on this quantizer")]
    UnsupportedBound { metric: Metric, mode: Mode },
    #[error("level count #{index} is {value}, must be in 1..={max}")]
    BadLevel { index: usize, value: u32, max: u32 },
    #[error("no schedule for the {space:?} space in the {regime} regime")]
    UnsupportedSchedule { space: Metric, regime: &'static str },
    #[error("regime parameters out of range: {0}")]
    BadRegime(String),
    #[error("n = {n} is too small for this construction (need {need})")]
    TooSmallN { n: usize, need: String },
}

/// Whether a bound or schedule refers to worst-case or average-case
/// (uniform-input) distortion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Worst,
    Average,
}

/// Parameters of the block-sorting quantizer: sort the first `k` blocks of
/// length `m`, leave the tail `k*m+1..=n` untouched.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockSortCode {
    n: usize,
    k: usize,
    m: usize,
}

impl BlockSortCode {
    pub fn new(n: usize, k: usize, m: usize) -> Result<Self, QuantizerError> {
        if m < 2 || m > n || k < 1 || k * m > n {
            return Err(QuantizerError::BadBlockParams { n, k, m });
        }
        Ok(BlockSortCode { n, k, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn m(&self) -> usize {
        self.m
    }

    /// Sort each of the first `k` length-`m` blocks ascending.
    pub fn encode(&self, s: &Permutation) -> Result<Permutation, QuantizerError> {
        if s.n() != self.n {
            return Err(QuantizerError::SizeMismatch {
                expected: self.n,
                got: s.n(),
            });
        }
        let mut out = s.as_slice().to_vec();
        for block in 0..self.k {
            out[block * self.m..(block + 1) * self.m].sort_unstable();
        }
        Ok(Permutation::new(out).expect("sorting blocks preserves the value set"))
    }

    /// Apply [`BlockSortCode::encode`] in the inverse domain:
    /// `inverse(encode(inverse(s)))`. This is the variant whose footrule and
    /// Chebyshev distortion the closed-form bounds describe.
    pub fn encode_inverse_domain(&self, s: &Permutation) -> Result<Permutation, QuantizerError> {
        Ok(self.encode(&s.inverse())?.inverse())
    }

    /// Log-domain codebook shrinkage `k·log(m!)`.
    pub fn delta_log_size(&self, base: LogBase) -> f64 {
        self.k as f64 * base.from_ln(ln_factorial(self.m as u64))
    }

    /// `log(n!/(m!)^k)`, the log codebook cardinality.
    pub fn log_codebook_size(&self, base: LogBase) -> f64 {
        base.from_ln(ln_factorial(self.n as u64)) - self.delta_log_size(base)
    }

    /// Closed-form distortion bound for this code.
    ///
    /// Kendall tau bounds apply to [`BlockSortCode::encode`]; footrule and
    /// Chebyshev bounds apply to [`BlockSortCode::encode_inverse_domain`].
    /// Worst-case bounds hold for every input; average-case bounds are over a
    /// uniform input.
    pub fn distortion_bound(&self, metric: Metric, mode: Mode) -> Result<f64, QuantizerError> {
        let (k, m) = (self.k as f64, self.m as f64);
        let mm = self.m as u64;
        match (metric, mode) {
            (Metric::KendallTau, Mode::Worst) => Ok(k * m * (m - 1.0) / 2.0),
            (Metric::KendallTau, Mode::Average) => Ok(k * m * (m - 1.0) / 4.0),
            (Metric::Chebyshev, Mode::Worst) => Ok(m - 1.0),
            (Metric::Footrule, Mode::Worst) => Ok(k * ((mm * mm / 2) as f64)),
            (Metric::Footrule, Mode::Average) => Ok(k * (m * m - 1.0) / 3.0),
            (metric, mode) => Err(QuantizerError::UnsupportedBound { metric, mode }),
        }
    }
}

/// Per-coordinate level counts for scalar quantization of inversion vectors.
///
/// `levels[j]` is the number of reproduction points for the coordinate of
/// value `j + 2`, whose range is `[0 : j+1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarQuantizerSpec {
    levels: Vec<u32>,
}

/// Reproduction point of cell `c` when `[0:k-1]` is split into `m` balanced
/// contiguous cells (the first `k mod m` cells are one longer). The point is
/// the cell midpoint rounded down.
fn cell_rep(k: usize, m: u32, c: u32) -> u32 {
    let (base, rem) = (k / m as usize, k % m as usize);
    let (start, len) = if (c as usize) < rem {
        (c as usize * (base + 1), base + 1)
    } else {
        (rem * (base + 1) + (c as usize - rem) * base, base)
    };
    (start + (len - 1) / 2) as u32
}

fn cell_of(k: usize, m: u32, v: u32) -> u32 {
    let (base, rem) = (k / m as usize, k % m as usize);
    let split = rem * (base + 1);
    if (v as usize) < split {
        v / (base as u32 + 1)
    } else {
        (rem + (v as usize - split) / base) as u32
    }
}

/// Map `v` in `[0:k-1]` to the nearest of the `m` reproduction points, ties
/// toward the smaller point.
fn quantize_coord(k: usize, m: u32, v: u32) -> u32 {
    let c = cell_of(k, m, v);
    let mut best = cell_rep(k, m, c);
    let mut best_err = (v as i64 - best as i64).abs();
    // The nearest point overall lives in this cell or a neighbor.
    for cand in [c.checked_sub(1), (c + 1 < m).then_some(c + 1)].into_iter().flatten() {
        let rep = cell_rep(k, m, cand);
        let err = (v as i64 - rep as i64).abs();
        if err < best_err || (err == best_err && rep < best) {
            best = rep;
            best_err = err;
        }
    }
    best
}

/// Largest quantization error over `[0:k-1]` with `m` levels, by scan.
pub fn coordinate_max_error(k: usize, m: u32) -> u64 {
    (0..k as u32)
        .map(|v| (v as i64 - quantize_coord(k, m, v) as i64).unsigned_abs())
        .max()
        .unwrap_or(0)
}

/// Closed-form ceiling bound `⌈(k/m - 1)/2⌉` on the per-coordinate error.
pub fn max_error_bound(k: usize, m: u32) -> f64 {
    ((k as f64 / m as f64 - 1.0) / 2.0).ceil()
}

/// Fewest levels guaranteeing per-coordinate error at most `d`:
/// `⌈k/(2d+1)⌉`.
pub fn levels_for_error(k: usize, d: u64) -> u32 {
    let den = 2 * d + 1;
    ((k as u64 + den - 1) / den) as u32
}

impl ScalarQuantizerSpec {
    /// Validate level counts: `1 <= levels[j] <= j + 2`.
    pub fn new(levels: Vec<u32>) -> Result<Self, QuantizerError> {
        if levels.is_empty() {
            return Err(QuantizerError::BadLevel {
                index: 0,
                value: 0,
                max: 0,
            });
        }
        for (j, &m) in levels.iter().enumerate() {
            let max = j as u32 + 2;
            if m < 1 || m > max {
                return Err(QuantizerError::BadLevel {
                    index: j,
                    value: m,
                    max,
                });
            }
        }
        Ok(ScalarQuantizerSpec { levels })
    }

    /// Size of the permutations this spec quantizes.
    pub fn n(&self) -> usize {
        self.levels.len() + 1
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    /// Quantize every coordinate to its nearest reproduction point.
    pub fn encode(&self, x: &InversionVector) -> Result<InversionVector, QuantizerError> {
        if x.n() != self.n() {
            return Err(QuantizerError::SizeMismatch {
                expected: self.n(),
                got: x.n(),
            });
        }
        let out: Vec<u32> = x
            .as_slice()
            .iter()
            .zip(&self.levels)
            .enumerate()
            .map(|(j, (&v, &m))| {
                let k = j + 2;
                let q = quantize_coord(k, m, v);
                debug_assert!(
                    ((v as i64 - q as i64).abs() as f64) <= max_error_bound(k, m),
                    "coordinate error above its ceiling bound"
                );
                q
            })
            .collect();
        Ok(InversionVector::new(out).expect("reproduction points stay in range"))
    }

    /// Quantize a permutation by round-tripping through its inversion vector.
    pub fn encode_permutation(&self, s: &Permutation) -> Result<Permutation, QuantizerError> {
        if s.n() != self.n() {
            return Err(QuantizerError::SizeMismatch {
                expected: self.n(),
                got: s.n(),
            });
        }
        let x = s.to_inversion_vector().expect("spec enforces n >= 2");
        Ok(Permutation::from_inversion_vector(&self.encode(&x)?))
    }

    /// `Σ log m_k`, the log codebook cardinality.
    pub fn log_codebook_size(&self, base: LogBase) -> f64 {
        self.levels
            .iter()
            .map(|&m| base.from_ln((m as f64).ln()))
            .sum()
    }

    /// Exact worst-case total distortion of this grid: the coordinate errors
    /// are independent, so the worst case is the sum of per-coordinate maxima.
    pub fn worst_distortion(&self) -> u64 {
        self.levels
            .iter()
            .enumerate()
            .map(|(j, &m)| coordinate_max_error(j + 2, m))
            .sum()
    }
}

/// Target-distortion regime. `delta` is always a declared parameter: the
/// asymptotic order cannot be inferred from a single `(n, D)` point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Regime {
    /// `D_n = a·n^δ` with `a > 0`, `0 < δ <= 1`.
    Small { a: f64, delta: f64 },
    /// `D_n = n^(1+δ)` (or `n^δ` for Chebyshev) with `0 < δ < 1`.
    Moderate { delta: f64 },
    /// `D_n = b·n²` with `0 < b <= 1/2`.
    Large { b: f64 },
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Small { .. } => "small",
            Regime::Moderate { .. } => "moderate",
            Regime::Large { .. } => "large",
        }
    }

    fn validate(&self) -> Result<(), QuantizerError> {
        let bad = |msg: String| Err(QuantizerError::BadRegime(msg));
        match *self {
            Regime::Small { a, delta } => {
                if !(a > 0.0) {
                    return bad(format!("small regime needs a > 0, got a = {a}"));
                }
                if !(delta > 0.0 && delta <= 1.0) {
                    return bad(format!("small regime needs 0 < delta <= 1, got delta = {delta}"));
                }
            }
            Regime::Moderate { delta } => {
                if !(delta > 0.0 && delta < 1.0) {
                    return bad(format!("moderate regime needs 0 < delta < 1, got delta = {delta}"));
                }
            }
            Regime::Large { b } => {
                if !(b > 0.0 && b <= 0.5) {
                    return bad(format!("large regime needs 0 < b <= 1/2, got b = {b}"));
                }
            }
        }
        Ok(())
    }

    /// The distortion target `D_n` this regime stands for at size `n`.
    ///
    /// In the moderate regime the Chebyshev space scales as `n^δ` where the
    /// other three scale as `n^(1+δ)`.
    pub fn target_distortion(&self, space: Metric, n: usize) -> f64 {
        let nf = n as f64;
        match *self {
            Regime::Small { a, delta } => a * nf.powf(delta),
            Regime::Moderate { delta } => {
                if space == Metric::Chebyshev {
                    nf.powf(delta)
                } else {
                    nf.powf(1.0 + delta)
                }
            }
            Regime::Large { b } => b * nf * nf,
        }
    }
}

/// A quantizer chosen by [`schedule`], together with the space and mode it was
/// scheduled for.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub space: Metric,
    pub mode: Mode,
    pub quantizer: ScheduledQuantizer,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScheduledQuantizer {
    /// Block sorting applied directly (Kendall tau space).
    Block(BlockSortCode),
    /// Block sorting applied to the inverse (footrule / Chebyshev spaces).
    BlockInverseDomain(BlockSortCode),
    /// Per-coordinate scalar quantization (inversion-l1 space).
    Scalar(ScalarQuantizerSpec),
}

impl Schedule {
    pub fn encode(&self, s: &Permutation) -> Result<Permutation, QuantizerError> {
        match &self.quantizer {
            ScheduledQuantizer::Block(c) => c.encode(s),
            ScheduledQuantizer::BlockInverseDomain(c) => c.encode_inverse_domain(s),
            ScheduledQuantizer::Scalar(q) => q.encode_permutation(s),
        }
    }

    pub fn log_codebook_size(&self, base: LogBase) -> f64 {
        match &self.quantizer {
            ScheduledQuantizer::Block(c) | ScheduledQuantizer::BlockInverseDomain(c) => {
                c.log_codebook_size(base)
            }
            ScheduledQuantizer::Scalar(q) => q.log_codebook_size(base),
        }
    }

    /// The analytic distortion guarantee in the scheduled space and mode.
    ///
    /// For block codes this is the closed-form bound; for scalar quantizers it
    /// is the exact worst-case grid distortion (which also bounds the
    /// average).
    pub fn guaranteed_distortion(&self) -> f64 {
        match &self.quantizer {
            ScheduledQuantizer::Block(c) | ScheduledQuantizer::BlockInverseDomain(c) => c
                .distortion_bound(self.space, self.mode)
                .or_else(|_| c.distortion_bound(self.space, Mode::Worst))
                .expect("scheduled block codes have a bound"),
            ScheduledQuantizer::Scalar(q) => q.worst_distortion() as f64,
        }
    }

    /// One-line human-readable description for CLI summaries and CSV.
    pub fn describe(&self) -> String {
        match &self.quantizer {
            ScheduledQuantizer::Block(c) => {
                format!("block-sort k={} m={}", c.k(), c.m())
            }
            ScheduledQuantizer::BlockInverseDomain(c) => {
                format!("block-sort-inverse k={} m={}", c.k(), c.m())
            }
            ScheduledQuantizer::Scalar(q) => {
                format!("scalar n={}", q.n())
            }
        }
    }
}

/// Choose quantizer parameters for the given space, size, regime, and mode.
///
/// Supported combinations: moderate regime for all four spaces; small and
/// large regimes for Kendall tau and inversion-l1. The returned quantizer's
/// [`Schedule::guaranteed_distortion`] never exceeds
/// `regime.target_distortion(space, n)`.
pub fn schedule(
    space: Metric,
    n: usize,
    regime: Regime,
    mode: Mode,
) -> Result<Schedule, QuantizerError> {
    regime.validate()?;
    if n < 2 {
        return Err(QuantizerError::TooSmallN {
            n,
            need: "n >= 2".into(),
        });
    }
    let target = regime.target_distortion(space, n);
    let unsupported = || QuantizerError::UnsupportedSchedule {
        space,
        regime: regime.name(),
    };
    let quantizer = match (space, regime) {
        (Metric::Chebyshev, Regime::Moderate { .. }) => {
            let m = (target.floor() as usize + 1).min(n);
            let code = BlockSortCode::new(n, n / m, m)?;
            ScheduledQuantizer::BlockInverseDomain(code)
        }
        (Metric::KendallTau | Metric::Footrule, Regime::Moderate { .. }) => {
            // Guarantee needs m <= D/(alpha*n): worst-case distortion is then
            // k*m*(m-1)/2 <= n*m/2 <= D (tau, alpha=1/2) and likewise for the
            // other (space, mode) pairs with their alpha.
            let alpha = match (space, mode) {
                (Metric::KendallTau, Mode::Worst) => 0.5,
                (Metric::KendallTau, Mode::Average) => 0.25,
                (Metric::Footrule, Mode::Worst) => 0.5,
                (Metric::Footrule, Mode::Average) => 1.0 / 3.0,
                _ => unreachable!(),
            };
            let m = ((target / (alpha * n as f64)).floor() as usize).clamp(2, n);
            let code = BlockSortCode::new(n, n / m, m)?;
            if space == Metric::KendallTau {
                ScheduledQuantizer::Block(code)
            } else {
                ScheduledQuantizer::BlockInverseDomain(code)
            }
        }
        (Metric::InversionL1, Regime::Moderate { .. }) => {
            // Spread the budget proportionally to the coordinate range:
            // per-coordinate target k*D/(n+1)^2.
            let levels = (2..=n)
                .map(|k| {
                    let dk = k as f64 * target / ((n + 1) * (n + 1)) as f64;
                    let m = (k as f64 / (2.0 * dk + 1.0)).ceil() as u32;
                    m.clamp(1, k as u32)
                })
                .collect();
            ScheduledQuantizer::Scalar(build_scalar(levels, target))
        }
        (Metric::KendallTau, Regime::Small { a, delta }) => {
            let (m, k) = if a >= 1.0 {
                let m = (2.0 * a).floor() as usize;
                let m = m.min(n);
                (m, ((n as f64).powf(delta) / m as f64).floor() as usize)
            } else {
                (2, (target / 2.0).floor() as usize)
            };
            let k = k.min(n / m);
            if k < 1 {
                return Err(QuantizerError::BadRegime(format!(
                    "target distortion {target:.3} too small to sort even one block at n = {n}"
                )));
            }
            ScheduledQuantizer::Block(BlockSortCode::new(n, k, m)?)
        }
        (Metric::InversionL1, Regime::Small { a, delta }) => {
            let nd = (n as f64).powf(delta);
            let levels: Vec<u32> = if a > 1.0 {
                // Quantize only the top floor(n^delta) coordinates, each with
                // error at most a.
                let cut = n.saturating_sub(nd.floor() as usize);
                (2..=n)
                    .map(|k| {
                        if k <= cut {
                            k as u32
                        } else {
                            ((k as f64 / (2.0 * a - 1.0)).ceil() as u32).clamp(1, k as u32)
                        }
                    })
                    .collect()
            } else {
                // Error at most 1 on coordinates below ceil(D), exact above.
                let cut = target.ceil() as usize;
                (2..=n)
                    .map(|k| {
                        if k < cut {
                            (k as u32).div_ceil(3)
                        } else {
                            k as u32
                        }
                    })
                    .collect()
            };
            ScheduledQuantizer::Scalar(build_scalar(levels, target))
        }
        (Metric::KendallTau, Regime::Large { b }) => {
            let k = (1.0 / (2.0 * b)).ceil() as usize;
            let m = n / k;
            if m < 2 {
                return Err(QuantizerError::TooSmallN {
                    n,
                    need: format!("n >= 2*ceil(1/(2b)) = {}", 2 * k),
                });
            }
            ScheduledQuantizer::Block(BlockSortCode::new(n, k, m)?)
        }
        (Metric::InversionL1, Regime::Large { b }) => {
            let levels = (2..=n)
                .map(|k| {
                    let m = (k as f64 / (4.0 * b * (k as f64 - 1.0) + 1.0)).ceil() as u32;
                    m.clamp(1, k as u32)
                })
                .collect();
            ScheduledQuantizer::Scalar(build_scalar(levels, target))
        }
        _ => return Err(unsupported()),
    };
    Ok(Schedule {
        space,
        mode,
        quantizer,
    })
}

/// Assemble a scalar spec and repair rounding overshoot: the per-coordinate
/// ceilings can overshoot a real-valued budget by a little, so bump level
/// counts (largest offender first) until the exact grid distortion fits the
/// target.
fn build_scalar(levels: Vec<u32>, target: f64) -> ScalarQuantizerSpec {
    let mut levels = levels;
    let mut errs: Vec<u64> = levels
        .iter()
        .enumerate()
        .map(|(j, &m)| coordinate_max_error(j + 2, m))
        .collect();
    let mut total: u64 = errs.iter().sum();
    while (total as f64) > target {
        let j = errs
            .iter()
            .enumerate()
            .max_by_key(|&(_, e)| *e)
            .map(|(j, _)| j)
            .expect("levels are non-empty");
        levels[j] += 1;
        let e = coordinate_max_error(j + 2, levels[j]);
        total = total - errs[j] + e;
        errs[j] = e;
    }
    ScalarQuantizerSpec::new(levels).expect("repair keeps levels in range")
}

/// The l1-good / l∞-bad construction.
///
/// Values are grouped into `k` blocks of `m` consecutive values, with the
/// grouping shifted by one so that value 1 lands in the *last* block next to
/// the largest values. Encoding sorts, in the inverse domain, the positions
/// each value block occupies. Per block the l1 cost stays `O(m²)`, but value 1
/// inherits the smallest position held by the top value block, which with
/// probability about `1 - 1/m` forces a Chebyshev error of at least
/// `(k-1)·m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CounterexampleCode {
    n: usize,
    k: usize,
    m: usize,
}

impl CounterexampleCode {
    /// Build for the largest `n <= n_requested` divisible by `m = ⌈n_requested^δ⌉`.
    ///
    /// Check [`CounterexampleCode::n`] for the adjusted size.
    pub fn new(n_requested: usize, delta: f64) -> Result<Self, QuantizerError> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(QuantizerError::BadRegime(format!(
                "counterexample needs 0 < delta < 1, got {delta}"
            )));
        }
        let m = (n_requested as f64).powf(delta).ceil() as usize;
        if m < 2 || n_requested < 2 * m {
            return Err(QuantizerError::TooSmallN {
                n: n_requested,
                need: format!("n >= 2*ceil(n^delta) = {}", 2 * m.max(2)),
            });
        }
        let n = n_requested - n_requested % m;
        Ok(CounterexampleCode { n, k: n / m, m })
    }

    /// Possibly adjusted size (largest multiple of `m` at or below request).
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn m(&self) -> usize {
        self.m
    }

    /// The shifted value blocks, each in ascending order. Block `j < k` is
    /// `{(j-1)m+2, ..., jm+1}`; block `k` is `{1, (k-1)m+2, ..., n}`.
    pub fn blocks(&self) -> Vec<Vec<u32>> {
        let (k, m) = (self.k, self.m);
        let mut out = Vec::with_capacity(k);
        for j in 1..k {
            out.push(((j - 1) * m + 2..=j * m + 1).map(|v| v as u32).collect());
        }
        let mut last: Vec<u32> = vec![1];
        last.extend(((k - 1) * m + 2..=self.n).map(|v| v as u32));
        out.push(last);
        out
    }

    /// Sort, within each value block, the positions the block's values occupy
    /// (ascending value order gets ascending positions).
    pub fn encode(&self, s: &Permutation) -> Result<Permutation, QuantizerError> {
        if s.n() != self.n {
            return Err(QuantizerError::SizeMismatch {
                expected: self.n,
                got: s.n(),
            });
        }
        let inv = s.inverse();
        let mut out = inv.as_slice().to_vec();
        for block in self.blocks() {
            let mut positions: Vec<u32> =
                block.iter().map(|&v| out[v as usize - 1]).collect();
            positions.sort_unstable();
            for (&v, &p) in block.iter().zip(&positions) {
                out[v as usize - 1] = p;
            }
        }
        let encoded_inverse = Permutation::new(out).expect("positions are only permuted");
        Ok(encoded_inverse.inverse())
    }
}
