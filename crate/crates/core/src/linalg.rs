//! Small dense complex matrices.
//!
//! Everything in this crate lives in at most 2^5 = 32 dimensions, so a plain
//! row-major `Vec<Complex64>` is both simple and fast enough. Eigen-decomposition
//! and linear solves are delegated to `nalgebra`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major data.
    ///
    /// Panics if `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length does not match shape");
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .flat_map(|row| {
                assert_eq!(row.len(), nc, "ragged rows");
                row.iter().copied()
            })
            .collect();
        Self::from_vec(nr, nc, data)
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        let mut m = Self::zeros(a.len(), b.len());
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                m[(i, j)] = ai * bj.conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[Complex64]) {
        assert_eq!(col.len(), self.rows);
        for (i, &v) in col.iter().enumerate() {
            self[(i, j)] = v;
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Matrix product; panics on incompatible shapes.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "incompatible shapes for product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Sum of squared entry moduli, `Σ|A_ij|²`.
    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Frobenius inner product `Tr(self† · other)`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    /// `‖U†U − I‖_max`; zero for unitary matrices.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.adjoint()
            .matmul(self)
            .max_abs_diff(&Self::identity(self.rows))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_deviation() <= tol
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Distance between two matrices after removing the best global phase,
    /// measured as the largest entrywise difference.
    pub fn phase_insensitive_diff(&self, other: &Self) -> f64 {
        let overlap = self.inner(other);
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            ONE
        };
        self.scale(phase).max_abs_diff(other)
    }

    pub fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<Complex64>) -> Self {
        let mut out = Self::zeros(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out[(i, j)] = m[(i, j)];
            }
        }
        out
    }

    /// Eigen-decomposition of a Hermitian matrix. Eigenvalues are returned in
    /// ascending order with eigenvectors as the matching columns.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, ComplexMatrix) {
        assert!(self.is_square());
        // symmetrize to remove round-off asymmetry before handing to nalgebra
        let sym = (self + &self.adjoint()).scale(r(0.5));
        let eig = sym.to_nalgebra().symmetric_eigen();
        let mut order: Vec<usize> = (0..self.rows).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let mut vectors = ComplexMatrix::zeros(self.rows, self.rows);
        for (dst, &k) in order.iter().enumerate() {
            for i in 0..self.rows {
                vectors[(i, dst)] = eig.eigenvectors[(i, k)];
            }
        }
        (values, vectors)
    }

    /// Solves `self · x = b` for square `self`. Returns `None` when singular.
    pub fn solve(&self, b: &[Complex64]) -> Option<Vec<Complex64>> {
        assert!(self.is_square());
        let lu = self.to_nalgebra().lu();
        let rhs = nalgebra::DVector::from_column_slice(b);
        let x = lu.solve(&rhs)?;
        if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return None;
        }
        Some(x.iter().copied().collect())
    }

    /// Smallest singular value, used as a conditioning check.
    pub fn min_singular_value(&self) -> f64 {
        let svd = self.to_nalgebra().svd(false, false);
        svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn check_square(&self, dim: usize) -> Result<()> {
        if self.rows != dim || self.cols != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: if self.rows != dim { self.rows } else { self.cols },
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Applies a `2^k × 2^k` operator to the listed qubits of every column of
/// `target`, i.e. `target ← (op on qubits) · target`.
///
/// Qubit 0 is the most significant bit of the basis label.
pub(crate) fn apply_local_left(
    target: &mut [Complex64],
    num_qubits: usize,
    ncols: usize,
    op: &ComplexMatrix,
    qubits: &[usize],
) {
    let k = qubits.len();
    let sub = 1usize << k;
    debug_assert_eq!(op.rows(), sub);
    let masks: Vec<usize> = qubits.iter().map(|&q| 1 << (num_qubits - 1 - q)).collect();
    let all: usize = masks.iter().sum();
    let dim = 1usize << num_qubits;
    let mut idx = vec![0usize; sub];
    let mut buf = vec![ZERO; sub];
    for base in 0..dim {
        if base & all != 0 {
            continue;
        }
        for (s, slot) in idx.iter_mut().enumerate() {
            let mut i = base;
            for (bit, m) in masks.iter().enumerate() {
                if s & (1 << (k - 1 - bit)) != 0 {
                    i |= m;
                }
            }
            *slot = i;
        }
        for col in 0..ncols {
            for (s, b) in buf.iter_mut().enumerate() {
                *b = target[idx[s] * ncols + col];
            }
            for (s, &row) in idx.iter().enumerate() {
                let mut acc = ZERO;
                for (t, b) in buf.iter().enumerate() {
                    acc += op[(s, t)] * b;
                }
                target[row * ncols + col] = acc;
            }
        }
    }
}

/// Right-multiplies every row of `target` by `op†` acting on the listed
/// qubits, i.e. `target ← target · (op on qubits)†`.
pub(crate) fn apply_local_right_adjoint(
    target: &mut [Complex64],
    num_qubits: usize,
    op: &ComplexMatrix,
    qubits: &[usize],
) {
    let k = qubits.len();
    let sub = 1usize << k;
    let masks: Vec<usize> = qubits.iter().map(|&q| 1 << (num_qubits - 1 - q)).collect();
    let all: usize = masks.iter().sum();
    let dim = 1usize << num_qubits;
    let mut idx = vec![0usize; sub];
    let mut buf = vec![ZERO; sub];
    for base in 0..dim {
        if base & all != 0 {
            continue;
        }
        for (s, slot) in idx.iter_mut().enumerate() {
            let mut i = base;
            for (bit, m) in masks.iter().enumerate() {
                if s & (1 << (k - 1 - bit)) != 0 {
                    i |= m;
                }
            }
            *slot = i;
        }
        for row in 0..dim {
            let off = row * dim;
            for (s, b) in buf.iter_mut().enumerate() {
                *b = target[off + idx[s]];
            }
            // (ρ U†)_{r, idx[s]} = Σ_t ρ_{r, idx[t]} conj(U_{s,t})
            for (s, &colidx) in idx.iter().enumerate() {
                let mut acc = ZERO;
                for (t, b) in buf.iter().enumerate() {
                    acc += b * op[(s, t)].conj();
                }
                target[off + colidx] = acc;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]])
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.kron(&i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn local_left_matches_kron() {
        // X on qubit 1 of 2 is I ⊗ X
        let x = pauli_x();
        let full = ComplexMatrix::identity(2).kron(&x);
        let mut m = ComplexMatrix::identity(4);
        apply_local_left(m.as_mut_slice(), 2, 4, &x, &[1]);
        assert!(m.max_abs_diff(&full) < 1e-15);
    }

    #[test]
    fn local_right_adjoint_matches_dense() {
        let y = ComplexMatrix::from_rows(&[&[ZERO, -I], &[I, ZERO]]);
        let full = y.kron(&ComplexMatrix::identity(2));
        let rho = ComplexMatrix::from_vec(4, 4, (0..16).map(|k| c(k as f64, -(k as f64) / 3.0)).collect());
        let expect = rho.matmul(&full.adjoint());
        let mut got = rho.clone();
        apply_local_right_adjoint(got.as_mut_slice(), 2, &y, &[0]);
        assert!(got.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn hermitian_eigen_sorted() {
        let m = ComplexMatrix::diagonal(&[r(3.0), r(-1.0), r(2.0)]);
        let (vals, _) = m.hermitian_eigen();
        assert_eq!(vals, vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn phase_insensitive_diff_ignores_global_phase() {
        let x = pauli_x();
        let y = x.scale(c(0.6, 0.8));
        assert!(x.phase_insensitive_diff(&y) < 1e-15);
    }
}
