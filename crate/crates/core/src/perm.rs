//! Permutations and their two alternative coordinate systems.
//!
//! A [`Permutation`] is an arrangement of `1..=n` in vector notation: `at(i)`
//! is the value in position `i` (1-based throughout the public API).
//!
//! An [`InversionVector`] is the Lehmer-style code with one coordinate per
//! value `v` in `2..=n`, counting how many smaller values sit to the right of
//! `v`'s position. The map is a bijection between `S_n` and the product space
//! `[0:1] x [0:2] x ... x [0:n-1]`, which is what makes per-coordinate scalar
//! quantization possible.
//!
//! An [`InsertionVector`] records the positions used by the repeated-insertion
//! process that builds a permutation one value at a time; it relates to the
//! inversion vector by `a_i = i - e_i` (with `e_1 = 0` prepended) and drives
//! Mallows-model sampling.

use std::fmt;

use thiserror::Error;

/// Validation and conversion failures for permutation-space values.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("empty input: a permutation needs at least one entry")]
    Empty,
    #[error("duplicate value {0}")]
    Duplicate(u32),
    #[error("value {value} out of range 1..={n}")]
    OutOfRange { value: u32, n: usize },
    #[error("operation needs n >= 2, got n = {0}")]
    TooSmall(usize),
    #[error("inversion vector entry #{index} is {value}, must be at most {max}")]
    BadInversionEntry { index: usize, value: u32, max: u32 },
    #[error("insertion vector entry #{index} is {value}, must be in 1..={max}")]
    BadInsertionEntry { index: usize, value: u32, max: u32 },
    #[error("cannot parse {0:?} as a positive integer")]
    Parse(String),
}

/// An arrangement of the values `1..=n`; `at(i)` is the value in position `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    entries: Vec<u32>,
}

impl Permutation {
    /// Validate a raw vector as a permutation of `1..=n` (n = length).
    ///
    /// Reports the first problem found: emptiness, an out-of-range value, or a
    /// duplicate.
    pub fn new(entries: Vec<u32>) -> Result<Self, PermError> {
        if entries.is_empty() {
            return Err(PermError::Empty);
        }
        let n = entries.len();
        let mut seen = vec![false; n];
        for &v in &entries {
            if v < 1 || v as usize > n {
                return Err(PermError::OutOfRange { value: v, n });
            }
            if seen[v as usize - 1] {
                return Err(PermError::Duplicate(v));
            }
            seen[v as usize - 1] = true;
        }
        Ok(Permutation { entries })
    }

    /// The identity arrangement `[1, 2, ..., n]`.
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "identity needs n >= 1");
        Permutation {
            entries: (1..=n as u32).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    /// Value in 1-based position `i`.
    pub fn at(&self, i: usize) -> u32 {
        self.entries[i - 1]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.entries
    }

    /// The inverse arrangement: `inverse().at(v) = i` whenever `at(i) = v`.
    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.entries.len()];
        for (pos0, &v) in self.entries.iter().enumerate() {
            inv[v as usize - 1] = pos0 as u32 + 1;
        }
        Permutation { entries: inv }
    }

    /// Composition `(self . inner)(i) = self(inner(i))`.
    ///
    /// Panics on size mismatch; callers working with untrusted pairs should
    /// check sizes first (the distance functions do).
    pub fn compose(&self, inner: &Permutation) -> Permutation {
        assert_eq!(self.n(), inner.n(), "compose needs equal sizes");
        let entries = inner
            .entries
            .iter()
            .map(|&v| self.entries[v as usize - 1])
            .collect();
        Permutation { entries }
    }

    /// The inversion-vector coordinates of this permutation.
    ///
    /// Coordinate for value `v` (stored at index `v - 2`) counts values
    /// `j < v` that appear to the right of `v`. Runs in O(n log n) using a
    /// binary indexed tree over values scanned in position order; a quadratic
    /// definition-level oracle lives in the test suite.
    ///
    /// Needs `n >= 2`: the coordinate list starts at value 2.
    pub fn to_inversion_vector(&self) -> Result<InversionVector, PermError> {
        let n = self.n();
        if n < 2 {
            return Err(PermError::TooSmall(n));
        }
        let mut out = vec![0u32; n - 1];
        let mut seen = Fenwick::new(n);
        for &v in &self.entries {
            // Of the v-1 values smaller than v, those not yet seen are to the
            // right of v's position, i.e. they are inversions led by v.
            if v >= 2 {
                let smaller_to_left = seen.prefix(v as usize - 1);
                out[v as usize - 2] = (v - 1) - smaller_to_left;
            }
            seen.add(v as usize);
        }
        Ok(InversionVector { entries: out })
    }

    /// Rebuild the unique permutation with the given inversion vector.
    ///
    /// Exact inverse of [`Permutation::to_inversion_vector`]. Works by turning
    /// the coordinates into insertion positions (`a_i = i - e_i`) and replaying
    /// the insertion process.
    pub fn from_inversion_vector(x: &InversionVector) -> Permutation {
        let n = x.n();
        let mut positions = Vec::with_capacity(n);
        positions.push(1u32); // e_1 = 0 always
        for (idx, &e) in x.entries.iter().enumerate() {
            let i = idx as u32 + 2;
            positions.push(i - e);
        }
        let a = InsertionVector { entries: positions };
        a.simulate()
    }

    /// Parse one space-separated line of 1-based values.
    pub fn parse_line(line: &str) -> Result<Self, PermError> {
        let mut values = Vec::new();
        for tok in line.split_whitespace() {
            let v: u32 = tok
                .parse()
                .map_err(|_| PermError::Parse(tok.to_string()))?;
            values.push(v);
        }
        Permutation::new(values)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Lehmer-style coordinates of a permutation in `S_n`.
///
/// `entries[j]` is the coordinate for value `j + 2` and lies in `[0:j+1]`;
/// the vector length is `n - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InversionVector {
    entries: Vec<u32>,
}

impl InversionVector {
    /// Validate coordinates: entry `j` (0-based) must be at most `j + 1`.
    pub fn new(entries: Vec<u32>) -> Result<Self, PermError> {
        if entries.is_empty() {
            return Err(PermError::Empty);
        }
        for (j, &e) in entries.iter().enumerate() {
            let max = j as u32 + 1;
            if e > max {
                return Err(PermError::BadInversionEntry {
                    index: j + 1,
                    value: e,
                    max,
                });
            }
        }
        Ok(InversionVector { entries })
    }

    /// Size of the permutation these coordinates describe.
    pub fn n(&self) -> usize {
        self.entries.len() + 1
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.entries
    }

    /// Sum of all coordinates = total inversion count of the permutation.
    pub fn total(&self) -> u64 {
        self.entries.iter().map(|&e| e as u64).sum()
    }
}

/// Positions chosen by the repeated-insertion process; `a_i` in `1..=i`.
///
/// Step `i` inserts value `i` just before the current element in position
/// `a_i` (inserting at position `i` means appending).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InsertionVector {
    entries: Vec<u32>,
}

impl InsertionVector {
    pub fn new(entries: Vec<u32>) -> Result<Self, PermError> {
        if entries.is_empty() {
            return Err(PermError::Empty);
        }
        for (idx, &a) in entries.iter().enumerate() {
            let max = idx as u32 + 1;
            if a < 1 || a > max {
                return Err(PermError::BadInsertionEntry {
                    index: idx + 1,
                    value: a,
                    max,
                });
            }
        }
        Ok(InsertionVector { entries })
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.entries
    }

    /// Convert insertion positions to inversion coordinates via `e_i = i - a_i`.
    ///
    /// The extended vector always starts with `e_1 = 0`, which is dropped;
    /// needs `n >= 2` so the remainder is non-empty.
    pub fn to_inversion_vector(&self) -> Result<InversionVector, PermError> {
        let n = self.n();
        if n < 2 {
            return Err(PermError::TooSmall(n));
        }
        let entries = self
            .entries
            .iter()
            .enumerate()
            .skip(1)
            .map(|(idx, &a)| idx as u32 + 1 - a)
            .collect();
        Ok(InversionVector { entries })
    }

    /// Literally replay the insertion process and return the result.
    pub fn simulate(&self) -> Permutation {
        let mut arr: Vec<u32> = Vec::with_capacity(self.n());
        for (idx, &a) in self.entries.iter().enumerate() {
            arr.insert(a as usize - 1, idx as u32 + 1);
        }
        Permutation { entries: arr }
    }
}

/// Binary indexed tree counting how many values in `1..=i` have been seen.
struct Fenwick {
    tree: Vec<u32>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick {
            tree: vec![0; n + 1],
        }
    }

    /// Mark value `v` (1-based) as seen.
    fn add(&mut self, mut v: usize) {
        while v < self.tree.len() {
            self.tree[v] += 1;
            v += v & v.wrapping_neg();
        }
    }

    /// Number of seen values in `1..=v`.
    fn prefix(&self, mut v: usize) -> u32 {
        let mut acc = 0;
        while v > 0 {
            acc += self.tree[v];
            v -= v & v.wrapping_neg();
        }
        acc
    }
}
