//! Brute-force matrix oracle.
//!
//! Generator matrices are assembled as Kronecker products of 2×2 factors:
//! the raising/lowering matrix on the target mode, `diag(1, −1)` on earlier
//! modes of the same sector and the identity everywhere else. None of this
//! touches the bit-string fast path in the parent module.
//!
//! Every generator matrix has at most one nonzero entry per column, so the
//! storage is column-compressed even though the semantics are those of a
//! full `2^K × 2^K` matrix.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::{Complex64, GenKind, Generator, SectorConfig};
use crate::error::{Error, Result};

/// Matrix with at most one `±1` entry per column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialMatrix {
    dim: usize,
    cols: Vec<Option<(usize, i8)>>,
}

impl MonomialMatrix {
    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            cols: (0..dim).map(|j| Some((j, 1))).collect(),
        }
    }

    fn raising() -> Self {
        Self {
            dim: 2,
            cols: vec![Some((1, 1)), None],
        }
    }

    fn lowering() -> Self {
        Self {
            dim: 2,
            cols: vec![None, Some((0, 1))],
        }
    }

    fn parity() -> Self {
        Self {
            dim: 2,
            cols: vec![Some((0, 1)), Some((1, -1))],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> i8 {
        match self.cols[col] {
            Some((r, v)) if r == row => v,
            _ => 0,
        }
    }

    /// Image of basis vector `col`: `(row, sign)` or `None` for zero.
    pub fn column(&self, col: usize) -> Option<(usize, i8)> {
        self.cols[col]
    }

    pub fn kron(&self, other: &MonomialMatrix) -> MonomialMatrix {
        let dim = self.dim * other.dim;
        let mut cols = Vec::with_capacity(dim);
        for a in 0..self.dim {
            for b in 0..other.dim {
                cols.push(match (self.cols[a], other.cols[b]) {
                    (Some((ra, va)), Some((rb, vb))) => Some((ra * other.dim + rb, va * vb)),
                    _ => None,
                });
            }
        }
        MonomialMatrix { dim, cols }
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &MonomialMatrix) -> MonomialMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch in product");
        let cols = other
            .cols
            .iter()
            .map(|c| c.and_then(|(k, v1)| self.cols[k].map(|(i, v2)| (i, v1 * v2))))
            .collect();
        MonomialMatrix {
            dim: self.dim,
            cols,
        }
    }

    pub fn transpose(&self) -> MonomialMatrix {
        let mut cols = vec![None; self.dim];
        for (j, c) in self.cols.iter().enumerate() {
            if let Some((i, v)) = *c {
                cols[i] = Some((j, v));
            }
        }
        MonomialMatrix {
            dim: self.dim,
            cols,
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (j, c) in self.cols.iter().enumerate() {
            if let Some((i, v)) = *c {
                m[(i, j)] = Complex64::new(f64::from(v), 0.0);
            }
        }
        m
    }
}

/// Exact integer entries of `a·b + sign·b·a`, keyed by `(row, col)`.
pub fn graded_bracket(
    a: &MonomialMatrix,
    b: &MonomialMatrix,
    sign: i64,
) -> BTreeMap<(usize, usize), i64> {
    let ab = a.mul(b);
    let ba = b.mul(a);
    let mut out = BTreeMap::new();
    for j in 0..a.dim {
        if let Some((i, v)) = ab.cols[j] {
            *out.entry((i, j)).or_insert(0) += i64::from(v);
        }
        if let Some((i, v)) = ba.cols[j] {
            *out.entry((i, j)).or_insert(0) += sign * i64::from(v);
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

/// Matrix of one generator in the dense computational basis.
pub fn dense_matrix(cfg: &SectorConfig, gen: Generator, ceiling: usize) -> Result<MonomialMatrix> {
    cfg.check_ceiling(ceiling)?;
    gen.mode.validate(cfg)?;
    let mut m = MonomialMatrix::identity(1);
    for mode in cfg.modes() {
        let factor = if mode == gen.mode {
            match gen.kind {
                GenKind::Create => MonomialMatrix::raising(),
                GenKind::Annihilate => MonomialMatrix::lowering(),
            }
        } else if mode.sector == gen.mode.sector && mode.serial < gen.mode.serial {
            MonomialMatrix::parity()
        } else {
            MonomialMatrix::identity(2)
        };
        m = m.kron(&factor);
    }
    Ok(m)
}

/// Complex matrix with full-matrix semantics and sparse storage.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OracleMatrix {
    dim: usize,
    entries: BTreeMap<(usize, usize), Complex64>,
}

impl OracleMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries.get(&(row, col)).copied().unwrap_or_default()
    }

    pub fn add_entry(&mut self, row: usize, col: usize, v: Complex64) {
        *self.entries.entry((row, col)).or_default() += v;
    }

    /// Adds `scale · m`.
    pub fn add_monomial(&mut self, m: &MonomialMatrix, scale: Complex64) {
        for j in 0..m.dim {
            if let Some((i, v)) = m.cols[j] {
                self.add_entry(i, j, scale * f64::from(v));
            }
        }
    }

    pub fn max_abs_diff(&self, other: &OracleMatrix) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::Shape(format!(
                "oracle matrices of dimension {} and {}",
                self.dim, other.dim
            )));
        }
        let mut worst = 0.0f64;
        for (k, v) in &self.entries {
            worst = worst.max((v - other.get(k.0, k.1)).norm());
        }
        for (k, v) in &other.entries {
            if !self.entries.contains_key(k) {
                worst = worst.max(v.norm());
            }
        }
        Ok(worst)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (&(i, j), v) in &self.entries {
            m[(i, j)] = *v;
        }
        m
    }
}
