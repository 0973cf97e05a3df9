//! Log-base selection and scalar helpers shared across the crate.

use std::f64::consts::{LN_2, PI};

/// Which logarithm the caller wants in rate and entropy outputs.
///
/// Everything internal is computed in natural log and converted at the edge,
/// so switching base never changes which branch an algorithm takes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LogBase {
    /// Base-2 logarithms (bits). The default.
    #[default]
    Two,
    /// Natural logarithms (nats).
    Natural,
}

impl LogBase {
    /// Convert a natural-log quantity into this base.
    pub fn from_ln(self, ln_value: f64) -> f64 {
        match self {
            LogBase::Two => ln_value / LN_2,
            LogBase::Natural => ln_value,
        }
    }

    /// log of `value` in this base.
    pub fn log(self, value: f64) -> f64 {
        self.from_ln(value.ln())
    }
}

/// ln(n!), exact summation for small `n`, Stirling series beyond.
///
/// The series error at the crossover (n = 256) is below 1e-15 relative, far
/// under what any rate computation here can observe.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= 256 {
        (2..=n).map(|i| (i as f64).ln()).sum()
    } else {
        let x = n as f64;
        (x + 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x.powi(3))
            + 1.0 / (1260.0 * x.powi(5))
    }
}

/// Binary entropy of `p` in bits; 0 at both endpoints.
pub fn binary_entropy_bits(p: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "entropy argument {p} outside [0,1]");
    if p == 0.0 || p == 1.0 {
        return 0.0;
    }
    -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
}
