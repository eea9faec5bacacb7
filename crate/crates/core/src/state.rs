//! Pure and mixed states of a small qubit register.
//!
//! Basis labels are big-endian: qubit 0 is the most significant bit, so the
//! ket `|10010⟩` of a five-qubit register is index `0b10010`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::linalg::{apply_local_left, apply_local_right_adjoint, r, ComplexMatrix, ONE, ZERO};

/// Tolerance for "is this a valid Kraus set".
pub const KRAUS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << num_qubits];
        amplitudes[0] = ONE;
        Self { num_qubits, amplitudes }
    }

    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << num_qubits];
        amplitudes[index] = ONE;
        Self { num_qubits, amplitudes }
    }

    /// Wraps raw amplitudes; the length must be a power of two. The vector is
    /// not renormalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: len.next_power_of_two(),
                found: len,
            });
        }
        Ok(Self { num_qubits: len.trailing_zeros() as usize, amplitudes })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm_sqr().sqrt();
        for a in &mut self.amplitudes {
            *a /= n;
        }
        self
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            num_qubits: self.num_qubits,
            amplitudes: self.amplitudes.iter().map(|a| a * s).collect(),
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self {
            num_qubits: self.num_qubits,
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|ψ⟩ ⊗ |φ⟩`.
    pub fn tensor(&self, other: &Self) -> Self {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Self { num_qubits: self.num_qubits + other.num_qubits, amplitudes }
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.apply_matrix(&gate.matrix(), &gate.targets);
        Ok(())
    }

    pub fn apply_matrix(&mut self, op: &ComplexMatrix, targets: &[usize]) {
        apply_local_left(&mut self.amplitudes, self.num_qubits, 1, op, targets);
    }

    /// Applies a full-register operator.
    pub fn apply_full(&self, op: &ComplexMatrix) -> Self {
        Self { num_qubits: self.num_qubits, amplitudes: op.mul_vec(&self.amplitudes) }
    }

    /// Relabels qubits: qubit `q` becomes qubit `map[q]`.
    pub fn permute_qubits(&self, map: &[usize]) -> Result<Self> {
        check_permutation(map, self.num_qubits)?;
        let mut amplitudes = vec![ZERO; self.dim()];
        for (i, &a) in self.amplitudes.iter().enumerate() {
            amplitudes[permute_index(i, self.num_qubits, map)] = a;
        }
        Ok(Self { num_qubits: self.num_qubits, amplitudes })
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            num_qubits: self.num_qubits,
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }

    /// Overlap `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn zero(num_qubits: usize) -> Self {
        StateVector::zero(num_qubits).to_density()
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1 << num_qubits;
        Self {
            num_qubits,
            matrix: ComplexMatrix::identity(dim).scale(r(1.0 / dim as f64)),
        }
    }

    /// Wraps a square matrix of power-of-two size. No physicality checks;
    /// see [`DensityMatrix::is_physical`].
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let dim = matrix.rows();
        if !matrix.is_square() || dim == 0 || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: dim.next_power_of_two(),
                found: matrix.cols(),
            });
        }
        Ok(Self { num_qubits: dim.trailing_zeros() as usize, matrix })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }

    /// Diagonal of the density matrix (computational-basis probabilities).
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    /// Hermitian, unit trace and positive semidefinite within `tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        if !self.matrix.is_hermitian(tol) || (self.trace() - ONE).norm() > tol {
            return false;
        }
        let (vals, _) = self.matrix.hermitian_eigen();
        vals.iter().all(|&v| v >= -tol)
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.apply_unitary_local(&gate.matrix(), &gate.targets);
        Ok(())
    }

    /// `ρ ← U ρ U†` with `U` acting on `targets`.
    pub fn apply_unitary_local(&mut self, op: &ComplexMatrix, targets: &[usize]) {
        let n = self.num_qubits;
        let dim = self.dim();
        let data = self.matrix.as_mut_slice();
        apply_local_left(data, n, dim, op, targets);
        apply_local_right_adjoint(data, n, op, targets);
    }

    /// `ρ ← U ρ U†` for a full-register operator.
    pub fn apply_full(&self, op: &ComplexMatrix) -> Self {
        Self {
            num_qubits: self.num_qubits,
            matrix: op.matmul(&self.matrix).matmul(&op.adjoint()),
        }
    }

    /// Applies the single-qubit channel `ρ ← Σ_k E_k ρ E_k†` on `target`.
    pub fn apply_channel(&mut self, kraus: &[ComplexMatrix], target: usize) -> Result<()> {
        if target >= self.num_qubits {
            return Err(Error::QubitOutOfRange { index: target, num_qubits: self.num_qubits });
        }
        check_kraus(kraus, 2)?;
        self.apply_channel_unchecked(kraus, target);
        Ok(())
    }

    pub(crate) fn apply_channel_unchecked(&mut self, kraus: &[ComplexMatrix], target: usize) {
        let n = self.num_qubits;
        let dim = self.dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for e in kraus {
            if e.frobenius_norm_sqr() == 0.0 {
                continue;
            }
            let mut term = self.matrix.clone();
            let data = term.as_mut_slice();
            apply_local_left(data, n, dim, e, &[target]);
            apply_local_right_adjoint(data, n, e, &[target]);
            for (a, t) in acc.as_mut_slice().iter_mut().zip(term.as_slice()) {
                *a += t;
            }
        }
        self.matrix = acc;
    }

    /// Reduced state on `keep` (output qubits ordered as listed).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::EmptyKeepSet);
        }
        let n = self.num_qubits;
        for (i, &q) in keep.iter().enumerate() {
            if q >= n {
                return Err(Error::QubitOutOfRange { index: q, num_qubits: n });
            }
            if keep[..i].contains(&q) {
                return Err(Error::DuplicateTargets(keep.to_vec()));
            }
        }
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let k = keep.len();
        let out_dim = 1 << k;
        let env_dim = 1 << traced.len();
        let compose = |sys: usize, env: usize| -> usize {
            let mut idx = 0usize;
            for (b, &q) in keep.iter().enumerate() {
                if sys & (1 << (k - 1 - b)) != 0 {
                    idx |= 1 << (n - 1 - q);
                }
            }
            for (b, &q) in traced.iter().enumerate() {
                if env & (1 << (traced.len() - 1 - b)) != 0 {
                    idx |= 1 << (n - 1 - q);
                }
            }
            idx
        };
        let mut out = ComplexMatrix::zeros(out_dim, out_dim);
        for i in 0..out_dim {
            for j in 0..out_dim {
                let mut acc = ZERO;
                for e in 0..env_dim {
                    acc += self.matrix[(compose(i, e), compose(j, e))];
                }
                out[(i, j)] = acc;
            }
        }
        Ok(DensityMatrix { num_qubits: k, matrix: out })
    }

    /// Relabels qubits: qubit `q` becomes qubit `map[q]`.
    pub fn permute_qubits(&self, map: &[usize]) -> Result<Self> {
        check_permutation(map, self.num_qubits)?;
        let n = self.num_qubits;
        let dim = self.dim();
        let idx: Vec<usize> = (0..dim).map(|i| permute_index(i, n, map)).collect();
        let mut matrix = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                matrix[(idx[i], idx[j])] = self.matrix[(i, j)];
            }
        }
        Ok(Self { num_qubits: n, matrix })
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with_pure(&self, psi: &StateVector) -> Result<f64> {
        state_fidelity(self, psi)
    }

    /// `Tr(ρ·O)` for a full-register operator.
    pub fn expectation_matrix(&self, op: &ComplexMatrix) -> Complex64 {
        // Tr(ρ O) = Σ_ij ρ_ij O_ji
        let dim = self.dim();
        let mut acc = ZERO;
        for i in 0..dim {
            for j in 0..dim {
                acc += self.matrix[(i, j)] * op[(j, i)];
            }
        }
        acc
    }

    /// `ρ₁ ⊗ ρ₂`.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            num_qubits: self.num_qubits + other.num_qubits,
            matrix: self.matrix.kron(&other.matrix),
        }
    }
}

/// Basis index after moving the bit of qubit `q` to qubit `map[q]`.
pub(crate) fn permute_index(index: usize, num_qubits: usize, map: &[usize]) -> usize {
    let mut out = 0usize;
    for (q, &to) in map.iter().enumerate() {
        if index & (1 << (num_qubits - 1 - q)) != 0 {
            out |= 1 << (num_qubits - 1 - to);
        }
    }
    out
}

fn check_permutation(map: &[usize], num_qubits: usize) -> Result<()> {
    if map.len() != num_qubits {
        return Err(Error::LengthMismatch { left: num_qubits, right: map.len() });
    }
    let mut seen = vec![false; num_qubits];
    for &to in map {
        if to >= num_qubits {
            return Err(Error::QubitOutOfRange { index: to, num_qubits });
        }
        if std::mem::replace(&mut seen[to], true) {
            return Err(Error::DuplicateTargets(map.to_vec()));
        }
    }
    Ok(())
}

/// Checks that `Σ E†E = I` within [`KRAUS_TOL`].
pub fn check_kraus(kraus: &[ComplexMatrix], dim: usize) -> Result<()> {
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for e in kraus {
        e.check_square(dim)?;
        sum = &sum + &e.adjoint().matmul(e);
    }
    let deviation = sum.max_abs_diff(&ComplexMatrix::identity(dim));
    if deviation > KRAUS_TOL {
        return Err(Error::NotTracePreserving { deviation });
    }
    Ok(())
}

/// `⟨ψ|ρ|ψ⟩`, the fidelity of a mixed state with a pure target.
pub fn state_fidelity(rho: &DensityMatrix, psi: &StateVector) -> Result<f64> {
    if rho.dim() != psi.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: psi.dim() });
    }
    let v = rho.matrix.mul_vec(psi.amplitudes());
    let f: Complex64 = psi.amplitudes().iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
    Ok(f.re.clamp(0.0, 1.0))
}
