//! Minimal max-plus (tropical) linear algebra.
//!
//! Scalar addition `⊕` is `max`, scalar multiplication `⊗` is ordinary
//! addition. The `⊕`-identity is `-∞` and the `⊗`-identity is `0`.
//! `-∞` is represented explicitly by `f64::NEG_INFINITY` and absorbs
//! under `⊗`.

use std::ops::{Add, Mul};

use crate::{Error, Result};

/// A scalar of the max-plus semiring: a finite real or `-∞`.
#[derive(Copy, Clone, Debug, PartialEq, PartialOrd)]
pub struct TropicalScalar(f64);

impl TropicalScalar {
    /// The `⊕`-identity, `-∞`.
    pub const ZERO: TropicalScalar = TropicalScalar(f64::NEG_INFINITY);
    /// The `⊗`-identity, `0`.
    pub const ONE: TropicalScalar = TropicalScalar(0.0);

    /// Wraps a value. `-∞` is allowed; NaN is not a semiring element.
    pub fn new(value: f64) -> Self {
        assert!(!value.is_nan(), "tropical scalar must not be NaN");
        TropicalScalar(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_neg_infinity(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
}

impl Add for TropicalScalar {
    type Output = TropicalScalar;

    /// `⊕`: maximum.
    fn add(self, rhs: Self) -> Self {
        TropicalScalar(self.0.max(rhs.0))
    }
}

impl Mul for TropicalScalar {
    type Output = TropicalScalar;

    /// `⊗`: addition, with `-∞` absorbing.
    fn mul(self, rhs: Self) -> Self {
        if self.is_neg_infinity() || rhs.is_neg_infinity() {
            TropicalScalar::ZERO
        } else {
            TropicalScalar(self.0 + rhs.0)
        }
    }
}

/// A vector over the max-plus semiring; dimension is fixed at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct TropicalVector {
    entries: Vec<TropicalScalar>,
}

impl TropicalVector {
    pub fn new(entries: Vec<TropicalScalar>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::DimensionMismatch(
                "vector dimension must be at least 1".into(),
            ));
        }
        Ok(TropicalVector { entries })
    }

    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().copied().map(TropicalScalar::new).collect())
    }

    /// The all-zero vector, the model's initial state `z(0)`.
    pub fn origin(dim: usize) -> Result<Self> {
        Self::new(vec![TropicalScalar::ONE; dim])
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize) -> TropicalScalar {
        self.entries[i]
    }

    pub fn entries(&self) -> &[TropicalScalar] {
        &self.entries
    }

    /// Adds the constant `c` to every entry (`⊗` by a scalar).
    pub fn shift(&self, c: f64) -> Self {
        TropicalVector {
            entries: self
                .entries
                .iter()
                .map(|e| *e * TropicalScalar::new(c))
                .collect(),
        }
    }
}

/// A square matrix over the max-plus semiring, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct TropicalMatrix {
    dim: usize,
    entries: Vec<TropicalScalar>,
}

impl TropicalMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch("matrix must be square".into()));
        }
        Ok(TropicalMatrix {
            dim,
            entries: rows
                .iter()
                .flatten()
                .copied()
                .map(TropicalScalar::new)
                .collect(),
        })
    }

    /// The tropical identity: `0` on the diagonal, `-∞` elsewhere.
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![TropicalScalar::ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = TropicalScalar::ONE;
        }
        TropicalMatrix { dim, entries }
    }

    /// The model's transition matrix: diagonal `(alpha, beta)`,
    /// off-diagonal `0` (the `⊗`-identity, not `-∞`).
    pub fn model_matrix(alpha: f64, beta: f64) -> Self {
        TropicalMatrix {
            dim: 2,
            entries: vec![
                TropicalScalar::new(alpha),
                TropicalScalar::ONE,
                TropicalScalar::ONE,
                TropicalScalar::new(beta),
            ],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> TropicalScalar {
        self.entries[row * self.dim + col]
    }
}

/// Max-plus matrix-vector product: `result_i = max_j (A_ij + z_j)`.
pub fn tmul(a: &TropicalMatrix, z: &TropicalVector) -> Result<TropicalVector> {
    if a.dim() != z.dim() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {n}x{n} but vector has dimension {m}",
            n = a.dim(),
            m = z.dim()
        )));
    }
    let entries = (0..a.dim())
        .map(|i| {
            (0..a.dim())
                .map(|j| a.entry(i, j) * z.entry(j))
                .fold(TropicalScalar::ZERO, |acc, v| acc + v)
        })
        .collect();
    TropicalVector::new(entries)
}

/// Max-plus matrix-matrix product, used by the associativity checks.
pub fn matmul(a: &TropicalMatrix, b: &TropicalMatrix) -> Result<TropicalMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "cannot multiply a {}x{0} matrix by a {}x{1} matrix",
            a.dim(),
            b.dim()
        )));
    }
    let dim = a.dim();
    let mut entries = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let e = (0..dim)
                .map(|k| a.entry(i, k) * b.entry(k, j))
                .fold(TropicalScalar::ZERO, |acc, v| acc + v);
            entries.push(e);
        }
    }
    Ok(TropicalMatrix { dim, entries })
}

/// The idempotent norm: the maximum entry of `z`.
pub fn tnorm(z: &TropicalVector) -> TropicalScalar {
    z.entries()
        .iter()
        .copied()
        .fold(TropicalScalar::ZERO, |acc, v| acc + v)
}
