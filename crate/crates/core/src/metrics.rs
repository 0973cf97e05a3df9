//! The four distortion measures on `S_n`.
//!
//! All four are integer-valued, which is why these functions return exact
//! `u64` counts instead of floats:
//!
//! * [`footrule`] — l1 distance between the permutation vectors, max `n²/2`;
//! * [`chebyshev`] — l∞ distance between the permutation vectors, max `n-1`;
//! * [`kendall_tau`] — minimum adjacent transpositions, max `n(n-1)/2`;
//! * [`inversion_l1`] — l1 distance between inversion vectors, max `n(n-1)/2`.
//!
//! Useful facts relied on elsewhere: all four are metrics; for every pair,
//! `n·chebyshev >= footrule >= kendall_tau(inverses) >= footrule/2` and
//! `kendall_tau/(n-1) <= inversion_l1 <= kendall_tau`; Kendall tau is
//! right-invariant; and `kendall_tau(s, Id)` equals both the inversion count
//! of `s` and `inversion_l1(s, Id)`.

use thiserror::Error;

use crate::perm::Permutation;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("size mismatch: left permutation has n = {left}, right has n = {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("inversion-l1 distance needs n >= 2, got n = {0}")]
    TooSmall(usize),
}

/// Which distortion measure to apply; doubles as the "space" selector for
/// quantizer schedules and rate calculations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    Footrule,
    Chebyshev,
    KendallTau,
    InversionL1,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::Footrule,
        Metric::Chebyshev,
        Metric::KendallTau,
        Metric::InversionL1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Footrule => "footrule",
            Metric::Chebyshev => "chebyshev",
            Metric::KendallTau => "tau",
            Metric::InversionL1 => "invl1",
        }
    }

    pub fn distance(self, a: &Permutation, b: &Permutation) -> Result<u64, MetricError> {
        match self {
            Metric::Footrule => footrule(a, b),
            Metric::Chebyshev => chebyshev(a, b),
            Metric::KendallTau => kendall_tau(a, b),
            Metric::InversionL1 => inversion_l1(a, b),
        }
    }

    /// Largest value the metric attains on `S_n`.
    pub fn max_value(self, n: usize) -> u64 {
        let n = n as u64;
        match self {
            Metric::Footrule => n * n / 2,
            Metric::Chebyshev => n - 1,
            Metric::KendallTau | Metric::InversionL1 => n * (n - 1) / 2,
        }
    }
}

fn check_sizes(a: &Permutation, b: &Permutation) -> Result<(), MetricError> {
    if a.n() != b.n() {
        return Err(MetricError::SizeMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    Ok(())
}

/// Spearman's footrule: `Σ_i |a(i) - b(i)|`.
pub fn footrule(a: &Permutation, b: &Permutation) -> Result<u64, MetricError> {
    check_sizes(a, b)?;
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(&x, &y)| (x as i64 - y as i64).unsigned_abs())
        .sum())
}

/// Chebyshev distance: `max_i |a(i) - b(i)|`.
pub fn chebyshev(a: &Permutation, b: &Permutation) -> Result<u64, MetricError> {
    check_sizes(a, b)?;
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(&x, &y)| (x as i64 - y as i64).unsigned_abs())
        .max()
        .unwrap_or(0))
}

/// Kendall tau distance: the minimum number of adjacent transpositions turning
/// one arrangement into the other, i.e. the number of value pairs whose
/// relative position order differs.
///
/// Computed as the inversion count of the relative permutation `b⁻¹ ∘ a` by
/// merge-counting in O(n log n). The convention (compose with the inverse of
/// the *second* argument) is fixed by the worked example in the tests; the
/// distance is symmetric either way.
pub fn kendall_tau(a: &Permutation, b: &Permutation) -> Result<u64, MetricError> {
    check_sizes(a, b)?;
    let rel = b.inverse().compose(a);
    Ok(inversion_count(&rel))
}

/// l1 distance between the inversion vectors of the two permutations.
pub fn inversion_l1(a: &Permutation, b: &Permutation) -> Result<u64, MetricError> {
    check_sizes(a, b)?;
    if a.n() < 2 {
        return Err(MetricError::TooSmall(a.n()));
    }
    let xa = a.to_inversion_vector().expect("n >= 2 checked");
    let xb = b.to_inversion_vector().expect("n >= 2 checked");
    Ok(xa
        .as_slice()
        .iter()
        .zip(xb.as_slice())
        .map(|(&x, &y)| (x as i64 - y as i64).unsigned_abs())
        .sum())
}

/// Number of inversions of `s` (pairs out of order); equals
/// `kendall_tau(s, Id)`.
pub fn inversion_count(s: &Permutation) -> u64 {
    let mut work = s.as_slice().to_vec();
    let mut buf = vec![0u32; work.len()];
    merge_count(&mut work, &mut buf)
}

/// Merge sort that counts the swapped pairs.
fn merge_count(v: &mut [u32], buf: &mut [u32]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let (left, right) = v.split_at_mut(mid);
    let mut count = merge_count(left, &mut buf[..mid]) + merge_count(right, &mut buf[mid..]);
    let (mut i, mut j) = (0, 0);
    for slot in buf[..n].iter_mut() {
        if i < left.len() && (j >= right.len() || left[i] <= right[j]) {
            *slot = left[i];
            i += 1;
        } else {
            *slot = right[j];
            j += 1;
            count += (left.len() - i) as u64;
        }
    }
    v.copy_from_slice(&buf[..n]);
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(v: &[u32]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn worked_pair() {
        let a = perm(&[1, 5, 4, 2, 3]);
        let b = perm(&[3, 4, 5, 1, 2]);
        assert_eq!(footrule(&a, &b), Ok(6));
        assert_eq!(chebyshev(&a, &b), Ok(2));
        assert_eq!(kendall_tau(&a, &b), Ok(7));
        assert_eq!(inversion_l1(&a, &b), Ok(3));
    }

    #[test]
    fn identical_arguments_give_zero() {
        let s = perm(&[2, 4, 1, 3]);
        for m in Metric::ALL {
            assert_eq!(m.distance(&s, &s), Ok(0));
        }
    }

    #[test]
    fn reversal_attains_footrule_and_chebyshev_maxima() {
        let a = perm(&[1, 2, 3]);
        let b = perm(&[3, 2, 1]);
        assert_eq!(footrule(&a, &b), Ok(4)); // floor(9/2)
        assert_eq!(chebyshev(&a, &b), Ok(2)); // n - 1
    }

    #[test]
    fn single_adjacent_swap() {
        let a = perm(&[2, 1, 3]);
        let id = Permutation::identity(3);
        assert_eq!(kendall_tau(&a, &id), Ok(1));
        assert_eq!(inversion_l1(&a, &id), Ok(1));
    }

    #[test]
    fn inversion_count_matches_distance_to_identity() {
        let s = perm(&[3, 1, 4, 5, 2]);
        assert_eq!(inversion_count(&s), 4);
        assert_eq!(kendall_tau(&s, &Permutation::identity(5)), Ok(4));
        assert_eq!(s.to_inversion_vector().unwrap().total(), 4);
    }

    #[test]
    fn size_mismatch_reported() {
        let a = perm(&[1, 2]);
        let b = perm(&[1, 2, 3]);
        for m in Metric::ALL {
            assert_eq!(
                m.distance(&a, &b),
                Err(MetricError::SizeMismatch { left: 2, right: 3 })
            );
        }
    }

    #[test]
    fn inversion_l1_rejects_singletons() {
        let a = perm(&[1]);
        assert_eq!(inversion_l1(&a, &a), Err(MetricError::TooSmall(1)));
    }
}
