use crate::error::{Error, Result};

/// Dense real symmetric matrix stored as its packed upper triangle.
///
/// Logical entries `(i, j)` and `(j, i)` address the same storage cell, so
/// no operation can produce an asymmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    data: Vec<f64>,
}

#[inline]
fn packed_index(dim: usize, i: usize, j: usize) -> usize {
    let (r, c) = if i <= j { (i, j) } else { (j, i) };
    r * dim - r * (r + 1) / 2 + c
}

impl SymmetricMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self {
            dim,
            data: vec![0.0; dim * (dim + 1) / 2],
        })
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let mut a = Self::zeros(diag.len())?;
        for (i, &d) in diag.iter().enumerate() {
            a.set(i, i, d);
        }
        Ok(a)
    }

    /// Builds from full rows; the upper triangle is read and the lower one
    /// must agree with it.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut a = Self::zeros(dim)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            for j in i..dim {
                if row[j] != rows[j][i] {
                    return Err(Error::Domain {
                        what: "asymmetric entry",
                        value: row[j] - rows[j][i],
                        expected: "rows[i][j] == rows[j][i]",
                    });
                }
                a.set(i, j, row[j]);
            }
        }
        Ok(a)
    }

    /// Builds from a packed upper triangle, row-major.
    pub fn from_packed(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if data.len() != dim * (dim + 1) / 2 {
            return Err(Error::DimensionMismatch {
                expected: dim * (dim + 1) / 2,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[packed_index(self.dim, i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let k = packed_index(self.dim, i, j);
        self.data[k] = value;
    }

    pub fn packed(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `tr(A B)` for symmetric `A`, `B`, i.e. the sum of all entrywise products.
    pub fn trace_product(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                let p = self.get(i, j) * other.get(i, j);
                s += if i == j { p } else { 2.0 * p };
            }
        }
        Ok(s)
    }

    /// `tr(A^2)`, the squared Frobenius norm.
    pub fn trace_sq(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                let v = self.get(i, j);
                s += if i == j { v * v } else { 2.0 * v * v };
            }
        }
        s
    }

    pub fn frobenius(&self) -> f64 {
        self.trace_sq().sqrt()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|x| c * x).collect(),
        }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, c: f64, other: &Self) -> Result<()> {
        self.check_dim(other)?;
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += c * y;
        }
        Ok(())
    }

    /// `Q A Q^T` for a square `q` given by rows.
    pub fn conjugate(&self, q: &[Vec<f64>]) -> Result<Self> {
        let m = self.dim;
        if q.len() != m || q.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: q.len(),
            });
        }
        let mut qa = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in 0..m {
                qa[i][j] = (0..m).map(|k| q[i][k] * self.get(k, j)).sum();
            }
        }
        let mut out = Self::zeros(m)?;
        for i in 0..m {
            for j in i..m {
                let v = (0..m).map(|k| qa[i][k] * q[j][k]).sum();
                out.set(i, j, v);
            }
        }
        Ok(out)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

/// `n` independent matrices of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixEnsemble {
    dim: usize,
    matrices: Vec<SymmetricMatrix>,
}

impl MatrixEnsemble {
    pub fn new(matrices: Vec<SymmetricMatrix>) -> Result<Self> {
        let dim = matrices.first().ok_or(Error::EmptyEnsemble)?.dim();
        if let Some(bad) = matrices.iter().find(|a| a.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(Self { dim, matrices })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[SymmetricMatrix] {
        &self.matrices
    }

    pub fn get(&self, i: usize) -> &SymmetricMatrix {
        &self.matrices[i]
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            matrices: self.matrices.iter().map(|a| a.scaled(c)).collect(),
        }
    }

    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: perm.len(),
            });
        }
        Self::new(perm.iter().map(|&p| self.matrices[p].clone()).collect())
    }
}

/// A sign vector in `{+1, -1}^n`; `true` encodes `+1`.
///
/// Ordering is lexicographic on the bit vector with `false < true`, which is
/// the tie-break used when several signings share the minimal norm.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signing {
    bits: Vec<bool>,
}

impl Signing {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn all_plus(n: usize) -> Self {
        Self {
            bits: vec![true; n],
        }
    }

    pub fn from_signs(signs: &[i8]) -> Self {
        Self {
            bits: signs.iter().map(|&s| s > 0).collect(),
        }
    }

    /// Bit `j` of `minus_mask` set means coordinate `j` is `-1`.
    pub fn from_minus_mask(n: usize, minus_mask: u64) -> Self {
        Self {
            bits: (0..n).map(|j| (minus_mask >> j) & 1 == 0).collect(),
        }
    }

    pub fn minus_mask(&self) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| !b)
            .fold(0u64, |acc, (j, _)| acc | (1 << j))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn sign(&self, i: usize) -> f64 {
        if self.bits[i] {
            1.0
        } else {
            -1.0
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    /// Representative of `{x, -x}` with the first coordinate `+1`.
    pub fn canonical(&self) -> Self {
        match self.bits.first() {
            Some(false) => self.negated(),
            _ => self.clone(),
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
    }

    /// Compact `+-+` rendering.
    pub fn to_sign_string(&self) -> String {
        self.bits.iter().map(|&b| if b { '+' } else { '-' }).collect()
    }
}

/// `sum_i x_i A_i`, divided by `sqrt(n)` when `normalize` is set.
pub fn signed_sum(
    ensemble: &MatrixEnsemble,
    x: &Signing,
    normalize: bool,
) -> Result<SymmetricMatrix> {
    if x.len() != ensemble.len() {
        return Err(Error::DimensionMismatch {
            expected: ensemble.len(),
            found: x.len(),
        });
    }
    let mut sum = SymmetricMatrix::zeros(ensemble.dim())?;
    for (i, a) in ensemble.matrices().iter().enumerate() {
        sum.add_scaled(x.sign(i), a)?;
    }
    if normalize {
        sum = sum.scaled(1.0 / (ensemble.len() as f64).sqrt());
    }
    Ok(sum)
}

/// Signed sum after flipping a coordinate whose current sign is `old_sign`:
/// `sum - 2 * old_sign * a_i`.
pub fn flip_update(
    sum: &SymmetricMatrix,
    a_i: &SymmetricMatrix,
    old_sign: f64,
) -> Result<SymmetricMatrix> {
    let mut out = sum.clone();
    flip_in_place(&mut out, a_i, old_sign)?;
    Ok(out)
}

pub fn flip_in_place(sum: &mut SymmetricMatrix, a_i: &SymmetricMatrix, old_sign: f64) -> Result<()> {
    sum.add_scaled(-2.0 * old_sign, a_i)
}
