//! Lossy compression in permutation spaces.
//!
//! The crate works with the symmetric group `S_n` under four distortion
//! measures (Spearman's footrule, Chebyshev, Kendall tau, and the l1 distance
//! between inversion vectors) and provides:
//!
//! * [`perm`] — permutation values plus the inversion-vector and
//!   insertion-vector coordinate systems;
//! * [`metrics`] — the four distances, all integer-valued;
//! * [`quantize`] — block-sorting and per-coordinate scalar quantizers with
//!   parameter schedules for the small/moderate/large distortion regimes;
//! * [`geometry`] — Mahonian numbers, metric-ball sizes, and their upper
//!   bounds, all in exact arbitrary precision;
//! * [`mallows`] — the Mallows distribution: pmf, repeated-insertion sampling,
//!   and closed-form entropy;
//! * [`harness`] — rate/distortion calculators, moment references, and a
//!   seeded Monte Carlo experiment runner with CSV output.

pub mod geometry;
pub mod harness;
pub mod logs;
pub mod mallows;
pub mod metrics;
pub mod perm;
pub mod quantize;

pub use logs::LogBase;
pub use metrics::Metric;
pub use perm::{InsertionVector, InversionVector, PermError, Permutation};
