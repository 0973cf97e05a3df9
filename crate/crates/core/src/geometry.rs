//! Exact combinatorics of permutation-space balls.
//!
//! The Mahonian number `K_n(k)` counts permutations of `n` with exactly `k`
//! inversions; its cumulative sum `T_n(D)` is the size of a Kendall tau ball
//! of radius `D` (those balls are center-independent). Everything here is
//! computed in arbitrary precision — `n!` overflows `u64` at `n = 21` — with
//! log-domain helpers for the asymptotic bounds.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::logs::{binary_entropy_bits, ln_factorial, LogBase};
use crate::metrics::Metric;
use crate::perm::Permutation;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum GeometryError {
    #[error("radius {d} out of range 0..={max} for n = {n}")]
    RadiusOutOfRange { n: usize, d: u64, max: u64 },
    #[error("n = {n} exceeds the brute-force enumeration limit {limit}")]
    OverEnumerationLimit { n: usize, limit: usize },
    #[error("bound requires {0}")]
    OutsideBoundRange(String),
}

/// Inversion-count distribution of `S_n`: `counts[k] = K_n(k)`.
///
/// Built by the full generating-function convolution
/// `Π_{i=0}^{n-1} (1 + z + ... + z^i)` using a sliding prefix-sum window, in
/// O(n·K) big-integer additions where `K = n(n-1)/2`. The textbook partial
/// recurrence `K_n(k) = K_n(k-1) + K_{n-1}(k)` only holds for `k < n` and is
/// used as a cross-check in tests, not for construction.
#[derive(Clone, Debug)]
pub struct MahonianTable {
    n: usize,
    counts: Vec<BigUint>,
}

impl MahonianTable {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut counts = vec![BigUint::one()];
        for i in 2..=n {
            // Convolve with the length-i window of ones: new[k] = sum of
            // old[k-i+1..=k], done as new[k] = new[k-1] + old[k] - old[k-i].
            let old = counts;
            let len = old.len() + i - 1;
            let mut new: Vec<BigUint> = Vec::with_capacity(len);
            for k in 0..len {
                let mut v = if k == 0 {
                    BigUint::zero()
                } else {
                    new[k - 1].clone()
                };
                if k < old.len() {
                    v += &old[k];
                }
                if k >= i {
                    v -= &old[k - i];
                }
                new.push(v);
            }
            counts = new;
        }
        MahonianTable { n, counts }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Largest inversion count, `n(n-1)/2`.
    pub fn max_inversions(&self) -> u64 {
        (self.n as u64) * (self.n as u64 - 1) / 2
    }

    /// `K_n(k)`; zero outside `0..=n(n-1)/2` by convention, which keeps
    /// cumulative sums and convolutions branch-free.
    pub fn count(&self, k: u64) -> BigUint {
        self.counts
            .get(k as usize)
            .cloned()
            .unwrap_or_else(BigUint::zero)
    }

    /// Cumulative count `T_n(D) = Σ_{k<=D} K_n(k)`.
    pub fn cumulative(&self, d: u64) -> BigUint {
        self.counts
            .iter()
            .take(d as usize + 1)
            .sum()
    }
}

/// `K_n(k)` without keeping the table.
pub fn mahonian(n: usize, k: u64) -> BigUint {
    MahonianTable::new(n).count(k)
}

/// `T_n(D)`, the Kendall tau ball size; equals `K_{n+1}(D)` whenever `D <= n`.
pub fn cumulative_t(n: usize, d: u64) -> Result<BigUint, GeometryError> {
    let table = MahonianTable::new(n);
    let max = table.max_inversions();
    if d > max {
        return Err(GeometryError::RadiusOutOfRange { n, d, max });
    }
    Ok(table.cumulative(d))
}

pub const BRUTE_FORCE_LIMIT: usize = 8;

/// `|B_d(center, D)|` by full enumeration of `S_n` (n at most
/// [`BRUTE_FORCE_LIMIT`]).
pub fn ball_brute(
    metric: Metric,
    center: &Permutation,
    d: u64,
) -> Result<BigUint, GeometryError> {
    let n = center.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(GeometryError::OverEnumerationLimit {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut count = 0u64;
    for_each_permutation(n, |p| {
        if metric.distance(p, center).expect("equal sizes") <= d {
            count += 1;
        }
    });
    Ok(BigUint::from(count))
}

/// Visit every permutation of `S_n` exactly once (lexicographic order).
pub fn for_each_permutation(n: usize, mut visit: impl FnMut(&Permutation)) {
    let mut values: Vec<u32> = (1..=n as u32).collect();
    loop {
        visit(&Permutation::new(values.clone()).expect("values stay a permutation"));
        // Next lexicographic arrangement, in place.
        let Some(i) = (0..values.len() - 1).rev().find(|&i| values[i] < values[i + 1]) else {
            return;
        };
        let j = (i + 1..values.len())
            .rev()
            .find(|&j| values[j] > values[i])
            .expect("successor exists");
        values.swap(i, j);
        values[i + 1..].reverse();
    }
}

/// Exact binomial coefficient `C(n, k)`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Kendall tau ball bound `T_n(D) <= C(n+D-1, D)`, valid for `D <= n`.
pub fn kt_ball_upper(n: usize, d: u64) -> Result<BigUint, GeometryError> {
    if d > n as u64 {
        return Err(GeometryError::OutsideBoundRange(format!(
            "D <= n (got D = {d}, n = {n})"
        )));
    }
    Ok(binomial(n as u64 + d - 1, d))
}

/// Inversion-l1 ball bound `2^min(n,D) · C(n+D, D)`.
pub fn inv_ball_upper(n: usize, d: u64) -> BigUint {
    let exp = (n as u64).min(d);
    binomial(n as u64 + d, d) << exp as usize
}

/// Mahonian bound `K_n(k) <= C(n+k-2, k)` for `1 <= k < n`.
pub fn mahonian_binomial_upper(n: usize, k: u64) -> Result<BigUint, GeometryError> {
    if k < 1 || k >= n as u64 {
        return Err(GeometryError::OutsideBoundRange(format!(
            "1 <= k < n (got k = {k}, n = {n})"
        )));
    }
    Ok(binomial(n as u64 + k - 2, k))
}

/// Log (in `base`) of the entropy-form Mahonian bound at `k = c·n`:
/// `2^(n(1+c)·H_b(1/(1+c))) / sqrt(2π n c/(1+c))`.
pub fn mahonian_entropy_upper(n: usize, k: u64, base: LogBase) -> f64 {
    assert!(k >= 1, "entropy bound needs k >= 1");
    let c = k as f64 / n as f64;
    let bits = n as f64 * (1.0 + c) * binary_entropy_bits(1.0 / (1.0 + c))
        - 0.5 * (2.0 * std::f64::consts::PI * n as f64 * c / (1.0 + c)).log2();
    base.from_ln(bits * std::f64::consts::LN_2)
}

/// Distortion regime selector for [`log_ball_upper`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BallRegime {
    /// `D = a·n^δ`, `0 < δ <= 1`.
    Small { a: f64, delta: f64 },
    /// `D = n^(1+δ)`, `0 < δ <= 1`.
    Moderate { delta: f64 },
    /// `D = b·n(n-1)`.
    Large { b: f64 },
}

/// Leading-order upper bound on `log N_d(D)` for Kendall tau or inversion-l1
/// balls; the unspecified lower-order remainders are dropped.
pub fn log_ball_upper(
    space: Metric,
    n: usize,
    regime: BallRegime,
    base: LogBase,
) -> Result<f64, GeometryError> {
    if !matches!(space, Metric::KendallTau | Metric::InversionL1) {
        return Err(GeometryError::OutsideBoundRange(
            "Kendall tau or inversion-l1 space".into(),
        ));
    }
    let nf = n as f64;
    let ln = match regime {
        BallRegime::Small { a, delta } => {
            if !(a > 0.0 && delta > 0.0 && delta <= 1.0) {
                return Err(GeometryError::OutsideBoundRange(
                    "a > 0 and 0 < delta <= 1".into(),
                ));
            }
            if delta < 1.0 {
                a * (1.0 - delta) * nf.powf(delta) * nf.ln()
            } else {
                let body = (1.0 + a) * (1.0 + a).ln() - a * a.ln();
                let extra = if space == Metric::InversionL1 {
                    2.0 * std::f64::consts::LN_2
                } else {
                    0.0
                };
                nf * (body + extra)
            }
        }
        BallRegime::Moderate { delta } => {
            if !(delta > 0.0 && delta <= 1.0) {
                return Err(GeometryError::OutsideBoundRange("0 < delta <= 1".into()));
            }
            delta * nf * nf.ln()
        }
        BallRegime::Large { b } => {
            if !(b > 0.0) {
                return Err(GeometryError::OutsideBoundRange("b > 0".into()));
            }
            nf * (2.0 * b * std::f64::consts::E * nf).ln()
        }
    };
    Ok(base.from_ln(ln))
}

/// `log(n!)` in the requested base.
pub fn log_factorial(n: usize, base: LogBase) -> f64 {
    base.from_ln(ln_factorial(n as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mahonian_small_values() {
        let t = MahonianTable::new(4);
        assert_eq!(t.count(0), BigUint::from(1u32));
        assert_eq!(t.count(1), BigUint::from(3u32)); // n - 1
        assert_eq!(t.count(2), BigUint::from(5u32)); // C(4,2) - 1
        assert_eq!(t.count(6), BigUint::from(1u32));
        assert_eq!(t.count(7), BigUint::zero());
        // Row sums to n! and is symmetric.
        assert_eq!(t.cumulative(6), BigUint::from(24u32));
        for k in 0..=6u64 {
            assert_eq!(t.count(k), t.count(6 - k));
        }
    }

    #[test]
    fn partial_recurrence_cross_check() {
        // K_n(k) = K_n(k-1) + K_{n-1}(k) for k < n.
        for n in 2..=9usize {
            let tn = MahonianTable::new(n);
            let tp = MahonianTable::new(n - 1);
            for k in 1..n as u64 {
                assert_eq!(tn.count(k), tn.count(k - 1) + tp.count(k));
            }
        }
    }

    #[test]
    fn cumulative_examples() {
        assert_eq!(cumulative_t(3, 1).unwrap(), BigUint::from(3u32)); // = K_4(1)
        assert_eq!(cumulative_t(5, 0).unwrap(), BigUint::one());
        assert_eq!(cumulative_t(4, 6).unwrap(), BigUint::from(24u32));
        assert!(cumulative_t(4, 7).is_err());
    }

    #[test]
    fn ball_sizes_small() {
        let id = Permutation::identity(4);
        assert_eq!(ball_brute(Metric::KendallTau, &id, 0).unwrap(), BigUint::one());
        assert_eq!(
            ball_brute(Metric::KendallTau, &id, 2).unwrap(),
            cumulative_t(4, 2).unwrap()
        );
        let big = Permutation::identity(9);
        assert!(ball_brute(Metric::KendallTau, &big, 1).is_err());
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(7, 3), BigUint::from(35u32));
        assert_eq!(binomial(5, 0), BigUint::one());
        assert_eq!(binomial(3, 5), BigUint::zero());
    }

    #[test]
    fn kt_ball_bound_dominates_exact() {
        // n=5, D=3: C(7,3) = 35 >= T_5(3)
        let bound = kt_ball_upper(5, 3).unwrap();
        assert_eq!(bound, BigUint::from(35u32));
        assert!(bound >= cumulative_t(5, 3).unwrap());
        assert_eq!(kt_ball_upper(5, 0).unwrap(), BigUint::one());
        assert!(kt_ball_upper(5, 6).is_err());
    }

    #[test]
    fn entropy_bound_dominates_table() {
        for n in 4..=12usize {
            let t = MahonianTable::new(n);
            for k in 1..=t.max_inversions() {
                let exact = t.count(k);
                if exact.is_zero() {
                    continue;
                }
                let log_exact = exact.to_string().parse::<f64>().unwrap().log2();
                let log_bound = mahonian_entropy_upper(n, k, LogBase::Two);
                assert!(
                    log_bound >= log_exact - 1e-9,
                    "n={n} k={k}: {log_bound} < {log_exact}"
                );
            }
        }
    }

    #[test]
    fn enumeration_count() {
        let mut count = 0;
        for_each_permutation(5, |_| count += 1);
        assert_eq!(count, 120);
    }

    #[test]
    fn log_ball_upper_shapes() {
        // Moderate-regime bound grows like delta * n log n.
        let v = log_ball_upper(
            Metric::KendallTau,
            1000,
            BallRegime::Moderate { delta: 0.5 },
            LogBase::Natural,
        )
        .unwrap();
        assert!((v - 0.5 * 1000.0 * 1000f64.ln()).abs() < 1e-9);
        // Inversion-l1 exceeds Kendall tau in the small delta=1 case by 2n bits.
        let kt = log_ball_upper(Metric::KendallTau, 100, BallRegime::Small { a: 1.0, delta: 1.0 }, LogBase::Two).unwrap();
        let inv = log_ball_upper(Metric::InversionL1, 100, BallRegime::Small { a: 1.0, delta: 1.0 }, LogBase::Two).unwrap();
        assert!((inv - kt - 200.0).abs() < 1e-9);
        assert!(log_ball_upper(Metric::Footrule, 100, BallRegime::Moderate { delta: 0.5 }, LogBase::Two).is_err());
    }
}
