//! The Mallows distribution on `S_n`: `P(σ) ∝ q^d(σ, π)` where `d` is the
//! Kendall tau distance and `π` the reference (mode) permutation.
//!
//! Sampling uses the repeated-insertion process: each value is inserted into a
//! growing arrangement at a position drawn from a truncated geometric
//! distribution, which induces exactly the Mallows law. The insertion
//! positions map to inversion-vector coordinates (`a_i = i - e_i`), and those
//! coordinates are independent truncated geometrics — which is also what makes
//! the entropy decompose into a closed form per coordinate.

use rand::Rng;
use thiserror::Error;

use crate::logs::{binary_entropy_bits, ln_factorial, LogBase};
use crate::metrics::kendall_tau;
use crate::perm::{InsertionVector, Permutation};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum MallowsError {
    #[error("Mallows parameter must be positive, got q = {0}")]
    BadQ(f64),
    #[error("size mismatch: model has n = {expected}, permutation has n = {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("typical-set constant requires 0 < q < 1, got q = {0}")]
    QNotConcentrating(f64),
}

/// Log of the q-factorial `[n]_q! = Π_{i=1}^n (1-q^i)/(1-q)`, the Mallows
/// normalizer; reduces to `log n!` at `q = 1`.
pub fn log_q_factorial(n: usize, q: f64, base: LogBase) -> f64 {
    assert!(q > 0.0, "q-factorial needs q > 0");
    if q == 1.0 {
        return base.from_ln(ln_factorial(n as u64));
    }
    let ln_q = q.ln();
    let mut total = 0.0;
    for i in 1..=n {
        let ln_qnum = if q < 1.0 {
            // ln (1-q^i)/(1-q), both pieces via log1p for q near 1.
            (-(i as f64 * ln_q).exp()).ln_1p() - (-q).ln_1p()
        } else {
            // (q^i - 1)/(q - 1) = q^(i-1) (1 - q^-i)/(1 - 1/q)
            (i as f64 - 1.0) * ln_q + (-(-(i as f64) * ln_q).exp()).ln_1p()
                - (-1.0 / q).ln_1p()
        };
        total += ln_qnum;
    }
    base.from_ln(total)
}

/// Mallows model with parameter `q > 0` and a reference permutation.
#[derive(Clone, Debug, PartialEq)]
pub struct MallowsModel {
    q: f64,
    reference: Permutation,
}

impl MallowsModel {
    pub fn new(q: f64, reference: Permutation) -> Result<Self, MallowsError> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(MallowsError::BadQ(q));
        }
        Ok(MallowsModel { q, reference })
    }

    /// Model centered on the identity.
    pub fn centered(n: usize, q: f64) -> Result<Self, MallowsError> {
        MallowsModel::new(q, Permutation::identity(n))
    }

    pub fn n(&self) -> usize {
        self.reference.n()
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn reference(&self) -> &Permutation {
        &self.reference
    }

    /// Exact probability of `s`: `q^d(s, reference) / [n]_q!`.
    ///
    /// Right-invariance of the Kendall tau distance makes the normalizer
    /// independent of the reference.
    pub fn pmf(&self, s: &Permutation) -> Result<f64, MallowsError> {
        let d = kendall_tau(s, &self.reference).map_err(|_| MallowsError::SizeMismatch {
            expected: self.n(),
            got: s.n(),
        })?;
        let ln_z = log_q_factorial(self.n(), self.q, LogBase::Natural);
        Ok((d as f64 * self.q.ln() - ln_z).exp())
    }

    /// Draw one permutation by repeated insertion.
    ///
    /// Reproducibility contract: the draw consumes exactly `n - 1` uniforms
    /// from `rng`, so the same seeded stream yields the same sample. Callers
    /// running parallel trials should give each trial its own stream.
    pub fn sample(&self, rng: &mut impl Rng) -> Permutation {
        let n = self.n();
        if n == 1 {
            return self.reference.clone();
        }
        // Insertion positions: step i displaces value i by a truncated
        // geometric number of slots e_i, i.e. a_i = i - e_i.
        let mut positions = Vec::with_capacity(n);
        positions.push(1u32);
        for i in 2..=n {
            let e = truncated_geometric(rng, self.q, i as u32);
            positions.push(i as u32 - e);
        }
        let around_identity = InsertionVector::new(positions)
            .expect("positions stay in 1..=i")
            .simulate();
        // Recenter: d(t . ref, ref) = d(t, Id) by right-invariance.
        around_identity.compose(&self.reference)
    }
}

/// Sample from `{0, ..., limit-1}` with weights `q^j`.
///
/// Inverse-CDF with a single uniform; the CDF is evaluated through
/// `expm1`/`log1p` so precision survives `q` near 1. `q > 1` reuses the
/// `q < 1` path through the reversal `j -> limit-1-j`.
fn truncated_geometric(rng: &mut impl Rng, q: f64, limit: u32) -> u32 {
    if limit <= 1 {
        return 0;
    }
    if q == 1.0 {
        return rng.gen_range(0..limit);
    }
    if q > 1.0 {
        return limit - 1 - truncated_geometric(rng, 1.0 / q, limit);
    }
    let u: f64 = rng.gen();
    let ln_q = q.ln();
    // Smallest j with CDF(j) >= u, where CDF(j) = (1-q^(j+1))/(1-q^limit):
    // j = ceil(ln(1 - u(1-q^limit))/ln q) - 1.
    let ln_w = (u * (limit as f64 * ln_q).exp_m1()).ln_1p();
    let j = (ln_w / ln_q).ceil() as i64 - 1;
    j.clamp(0, limit as i64 - 1) as u32
}

/// Closed-form Mallows entropy, split into its linear-in-`n` part and the
/// bounded remainder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyResult {
    /// `H(M(q))` in the requested base.
    pub total: f64,
    /// Per-element asymptote `H_b(q)/(1-q)` (infinite at `q = 1`, where the
    /// entropy is `log n!` and grows superlinearly).
    pub linear_coefficient: f64,
    /// `n·linear_coefficient - total`; stays bounded in `n` for fixed
    /// `q != 1`.
    pub remainder: f64,
}

/// Entropy of the Mallows model with parameter `q` on `S_n`.
///
/// The insertion coordinates are independent truncated geometrics `G_k`
/// (support `0..=k`), each with entropy
/// `H_b(q)/(1-q) - H_b(Q_k)/Q_k`, `Q_k = 1 - q^(k+1)`, so the total is a
/// plain sum. Symmetric under `q <-> 1/q`; exactly `log n!` at `q = 1`.
pub fn entropy(n: usize, q: f64, base: LogBase) -> EntropyResult {
    assert!(q > 0.0, "entropy needs q > 0");
    if q == 1.0 {
        return EntropyResult {
            total: base.from_ln(ln_factorial(n as u64)),
            linear_coefficient: f64::INFINITY,
            remainder: f64::INFINITY,
        };
    }
    // q and 1/q induce the same entropy (reverse the reference).
    let q = if q > 1.0 { 1.0 / q } else { q };
    let lin_bits = binary_entropy_bits(q) / (1.0 - q);
    let ln_q = q.ln();
    let mut deduction_bits = 0.0;
    for k in 0..n {
        let qk = -((k as f64 + 1.0) * ln_q).exp_m1(); // Q_k = 1 - q^(k+1)
        deduction_bits += binary_entropy_bits(qk.min(1.0)) / qk;
    }
    let total_bits = n as f64 * lin_bits - deduction_bits;
    let factor = match base {
        LogBase::Two => 1.0,
        LogBase::Natural => std::f64::consts::LN_2,
    };
    EntropyResult {
        total: total_bits * factor,
        linear_coefficient: lin_bits * factor,
        remainder: deduction_bits * factor,
    }
}

/// Exponent `E(c, q) = (1+c)·H_b(1/(1+c)) - c·log2(1/q)` governing the Mallows
/// mass at Kendall radius `c·n` from the mode (in bits by definition).
pub fn typical_exponent(c: f64, q: f64) -> f64 {
    assert!(c > 0.0 && q > 0.0);
    (1.0 + c) * binary_entropy_bits(1.0 / (1.0 + c)) - c * (1.0 / q).log2()
}

/// Smallest `c` with `E(c, q) <= -epsilon`: samples concentrate inside
/// Kendall radius `c·n` of the mode. Defined for `0 < q < 1`.
///
/// `E(·, q)` peaks at `c = q/(1-q)` and decreases beyond, so a bisection on
/// the decreasing branch finds the root (tolerance 1e-9).
pub fn typical_radius_constant(q: f64, epsilon: f64) -> Result<f64, MallowsError> {
    if !(q > 0.0 && q < 1.0) {
        return Err(MallowsError::QNotConcentrating(q));
    }
    assert!(epsilon > 0.0);
    let peak = q / (1.0 - q);
    let mut lo = peak;
    let mut hi = peak + 1.0;
    while typical_exponent(hi, q) > -epsilon {
        hi *= 2.0;
    }
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if typical_exponent(mid, q) > -epsilon {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn q_factorial_values() {
        assert!((log_q_factorial(3, 1.0, LogBase::Natural) - 6f64.ln()).abs() < 1e-12);
        assert!((log_q_factorial(1, 0.5, LogBase::Natural)).abs() < 1e-12);
        // [2]_0.5! = 1 * 1.5
        assert!((log_q_factorial(2, 0.5, LogBase::Natural) - 1.5f64.ln()).abs() < 1e-12);
        // q and 1/q normalizers differ by q^(n(n-1)/2).
        let a = log_q_factorial(5, 2.0, LogBase::Two);
        let b = log_q_factorial(5, 0.5, LogBase::Two) + 10.0; // log2 2^10
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn pmf_two_elements() {
        let q = 0.37;
        let m = MallowsModel::centered(2, q).unwrap();
        let id = Permutation::identity(2);
        let swap = Permutation::new(vec![2, 1]).unwrap();
        assert!((m.pmf(&id).unwrap() - 1.0 / (1.0 + q)).abs() < 1e-12);
        assert!((m.pmf(&swap).unwrap() - q / (1.0 + q)).abs() < 1e-12);
    }

    #[test]
    fn pmf_uniform_at_q_one() {
        let m = MallowsModel::centered(4, 1.0).unwrap();
        let s = Permutation::new(vec![3, 1, 4, 2]).unwrap();
        assert!((m.pmf(&s).unwrap() - 1.0 / 24.0).abs() < 1e-12);
    }

    #[test]
    fn pmf_n3_normalizes() {
        let q = 0.5;
        let m = MallowsModel::centered(3, q).unwrap();
        let z = 1.0 * 1.5 * 1.75;
        // A permutation at Kendall distance 2 from the identity.
        let s = Permutation::new(vec![2, 3, 1]).unwrap();
        assert!((m.pmf(&s).unwrap() - 0.25 / z).abs() < 1e-12);
        let mut sum = 0.0;
        crate::geometry::for_each_permutation(3, |p| sum += m.pmf(p).unwrap());
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let m = MallowsModel::centered(6, 0.5).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            assert_eq!(m.sample(&mut a), m.sample(&mut b));
        }
    }

    #[test]
    fn tiny_q_returns_reference() {
        let reference = Permutation::new(vec![2, 4, 1, 3]).unwrap();
        let m = MallowsModel::new(1e-12, reference.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            assert_eq!(m.sample(&mut rng), reference);
        }
    }

    #[test]
    fn q_one_sampling_roughly_uniform() {
        let m = MallowsModel::centered(4, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let trials = 24_000;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..trials {
            *counts.entry(m.sample(&mut rng)).or_insert(0u32) += 1;
        }
        assert_eq!(counts.len(), 24);
        let expected = trials as f64 / 24.0;
        let chi2: f64 = counts
            .values()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // 23 degrees of freedom; 49.7 is the 0.1% tail.
        assert!(chi2 < 55.0, "chi2 = {chi2}");
    }

    #[test]
    fn entropy_special_cases() {
        assert!((entropy(3, 1.0, LogBase::Two).total - 6f64.log2()).abs() < 1e-12);
        assert!((entropy(1, 0.7, LogBase::Two).total).abs() < 1e-12);
        // n = 2: single binary coordinate with P(1) = q/(1+q).
        let q: f64 = 0.6;
        let direct = binary_entropy_bits(q / (1.0 + q));
        assert!((entropy(2, q, LogBase::Two).total - direct).abs() < 1e-9);
        // Symmetry in q <-> 1/q.
        let a = entropy(30, 0.4, LogBase::Two).total;
        let b = entropy(30, 2.5, LogBase::Two).total;
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn entropy_remainder_is_nonnegative_and_bounded() {
        let q = 0.7;
        let r10 = entropy(10, q, LogBase::Two).remainder;
        let r1000 = entropy(1000, q, LogBase::Two).remainder;
        assert!(r10 > 0.0);
        // The remainder converges; it must not grow with n.
        assert!(r1000 < r10 * 2.0);
        // Coarse analytic cap on the summed geometric-tail entropies.
        let cap = (2.0 * q - q * q) / ((1.0 - q) * (1.0 - q)) * (1.0 / (1.0 - q));
        assert!(r1000 < cap * 10.0);
    }

    #[test]
    fn typical_exponent_sign() {
        // Near c = 0 the entropy term dominates: positive for q close to 1.
        assert!(typical_exponent(0.5, 0.9) > 0.0);
        // At q = 0.5 the exponent is negative from c = 4 on.
        for c in [4.0, 5.0, 8.0, 16.0] {
            assert!(typical_exponent(c, 0.5) < 0.0);
        }
        let c0 = typical_radius_constant(0.5, 0.05).unwrap();
        assert!(c0 > 1.0 && c0 < 4.0, "c0 = {c0}");
        assert!(typical_exponent(c0 + 1e-6, 0.5) <= -0.05 + 1e-6);
        assert!(typical_radius_constant(1.5, 0.05).is_err());
    }
}
