//! Phase-tracked Pauli strings.
//!
//! The single convention everything else derives from is `Y = i·X·Z`.
//! Consequently `X·Z = −iY`, `Z·X = iY`, `X·Y = iZ`, `Y·Z = iX`.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, I, ONE, ZERO};
use crate::state::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    pub const NONTRIVIAL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    /// (x, z) bits of the symplectic representation.
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Single-qubit product `self · other` as `(i^k, letter)`.
    pub fn mul_with_phase(self, other: Pauli) -> (Phase, Pauli) {
        use Pauli::*;
        let k = match (self, other) {
            (X, Y) | (Y, Z) | (Z, X) => 1,
            (Y, X) | (Z, Y) | (X, Z) => 3,
            _ => 0,
        };
        let (x1, z1) = self.bits();
        let (x2, z2) = other.bits();
        (Phase(k), Pauli::from_bits(x1 ^ x2, z1 ^ z2))
    }

    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Pauli::I => ComplexMatrix::identity(2),
            Pauli::X => ComplexMatrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]),
            Pauli::Y => ComplexMatrix::from_rows(&[&[ZERO, -I], &[I, ZERO]]),
            Pauli::Z => ComplexMatrix::diagonal(&[ONE, -ONE]),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// An element `i^k` of the four-element phase group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Phase(u8);

impl Phase {
    pub const PLUS_ONE: Phase = Phase(0);
    pub const PLUS_I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u8) -> Self {
        Phase(k % 4)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => ONE,
            1 => I,
            2 => -ONE,
            _ => -I,
        }
    }

    pub fn conj(self) -> Self {
        Phase((4 - self.0) % 4)
    }
}

impl Mul for Phase {
    type Output = Phase;

    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        })
    }
}

/// `phase · P₀ ⊗ P₁ ⊗ … ⊗ P_{n-1}`, qubit 0 leftmost.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    phase: Phase,
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(phase: Phase, letters: Vec<Pauli>) -> Self {
        Self { phase, letters }
    }

    pub fn identity(n: usize) -> Self {
        Self { phase: Phase::PLUS_ONE, letters: vec![Pauli::I; n] }
    }

    /// A single letter on `qubit`, identity elsewhere.
    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.letters[qubit] = p;
        s
    }

    /// `p` on every qubit.
    pub fn uniform(n: usize, p: Pauli) -> Self {
        Self { phase: Phase::PLUS_ONE, letters: vec![p; n] }
    }

    pub fn num_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.num_qubits() != other.num_qubits() {
            return Err(Error::LengthMismatch { left: self.num_qubits(), right: other.num_qubits() });
        }
        Ok(())
    }

    /// Operator product `self · other` with the phase accumulated.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        let mut phase = self.phase * other.phase;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (ph, p) = a.mul_with_phase(b);
                phase = phase * ph;
                p
            })
            .collect();
        Ok(Self { phase, letters })
    }

    /// True iff the strings commute: an even number of positions carry
    /// different non-identity letters.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_len(other)?;
        let clashes = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count();
        Ok(clashes % 2 == 0)
    }

    /// Dense `2^n × 2^n` matrix, qubit 0 as the most significant factor.
    pub fn matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::identity(1);
        for p in &self.letters {
            m = m.kron(&p.matrix());
        }
        m.scale(self.phase.to_complex())
    }

    /// Masks describing the action on basis states: the string maps `|b⟩`
    /// to `coeff(b)·|b ⊕ x_mask⟩`.
    pub(crate) fn masks(&self) -> (usize, usize, usize) {
        let n = self.num_qubits();
        let (mut x, mut z, mut y) = (0usize, 0usize, 0usize);
        for (q, p) in self.letters.iter().enumerate() {
            let bit = 1 << (n - 1 - q);
            match p {
                Pauli::X => x |= bit,
                Pauli::Z => z |= bit,
                Pauli::Y => {
                    x |= bit;
                    z |= bit;
                    y += 1;
                }
                Pauli::I => {}
            }
        }
        (x, z, y)
    }

    /// `Tr(ρ·P)` without building the dense matrix. Complex in general.
    pub fn trace_with(&self, rho: &DensityMatrix) -> Result<Complex64> {
        let n = self.num_qubits();
        if rho.num_qubits() != n {
            return Err(Error::DimensionMismatch { expected: n, found: rho.num_qubits() });
        }
        let (x, z, ny) = self.masks();
        // Y = i·X·Z, so on |b⟩: P|b⟩ = phase · i^{#Y} · (−1)^{|b ∧ z|} |b ⊕ x⟩
        let base = self.phase * Phase::from_power((ny % 4) as u8);
        let m = rho.matrix();
        let mut acc = ZERO;
        for b in 0..(1usize << n) {
            let sign = if (b & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            // Tr(ρP) = Σ_b ⟨b|ρ P|b⟩ = Σ_b coeff(b) · ρ[b, b⊕x]
            acc += m[(b, b ^ x)] * sign;
        }
        Ok(acc * base.to_complex())
    }

    /// `Tr(ρ·P)` as an observable; fails for strings with an imaginary phase.
    pub fn expectation(&self, rho: &DensityMatrix) -> Result<f64> {
        if !self.phase.is_real() {
            return Err(Error::NonHermitianObservable(self.to_string()));
        }
        Ok(self.trace_with(rho)?.re)
    }

    /// Relabels qubits: letter on qubit `q` moves to qubit `map[q]`.
    pub fn permuted(&self, map: &[usize]) -> Self {
        let mut letters = vec![Pauli::I; self.num_qubits()];
        for (q, &p) in self.letters.iter().enumerate() {
            letters[map[q]] = p;
        }
        Self { phase: self.phase, letters }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.phase != Phase::PLUS_ONE {
            write!(f, "{}", self.phase)?;
        }
        for p in &self.letters {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses e.g. `"XZZXI"`, `"-XZZXI"`, `"+iYYYYY"`, `"-iZ"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, rest) = if let Some(r) = s.strip_prefix("+i") {
            (Phase::PLUS_I, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (Phase::MINUS_I, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (Phase::PLUS_ONE, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (Phase::MINUS_ONE, r)
        } else if let Some(r) = s.strip_prefix('i') {
            (Phase::PLUS_I, r)
        } else {
            (Phase::PLUS_ONE, s)
        };
        if rest.is_empty() {
            return Err(Error::PauliParse(s.to_string()));
        }
        let letters = rest
            .chars()
            .map(|c| Pauli::from_symbol(c).ok_or_else(|| Error::PauliParse(s.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { phase, letters })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn x_squared_is_identity() {
        let p = ps("X").multiply(&ps("X")).unwrap();
        assert_eq!(p, ps("I"));
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        assert_eq!(ps("X").multiply(&ps("Z")).unwrap(), ps("-iY"));
        assert_eq!(ps("Z").multiply(&ps("X")).unwrap(), ps("+iY"));
    }

    #[test]
    fn y_convention_matches_matrices() {
        let ixz = Pauli::X.matrix().matmul(&Pauli::Z.matrix()).scale(I);
        assert!(ixz.max_abs_diff(&Pauli::Y.matrix()) < 1e-15);
    }

    #[test]
    fn commutation_examples() {
        assert!(ps("XZZXI").commutes(&ps("IXZZX")).unwrap());
        assert!(!ps("X").commutes(&ps("Z")).unwrap());
        assert!(ps("XYZ").commutes(&ps("III")).unwrap());
        assert!(matches!(ps("X").commutes(&ps("XX")), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn display_and_parse_agree() {
        for s in ["XZZXI", "-XZZXI", "+iYYYYY", "-iZ"] {
            assert_eq!(ps(s).to_string(), s);
        }
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("-".parse::<PauliString>().is_err());
    }

    #[test]
    fn imaginary_phase_is_not_an_observable() {
        let rho = DensityMatrix::maximally_mixed(1);
        assert!(matches!(ps("iX").expectation(&rho), Err(Error::NonHermitianObservable(_))));
    }

    #[test]
    fn trace_with_matches_dense() {
        let mut rho = DensityMatrix::zero(3);
        rho.apply_gate(&crate::gate::Gate::h(0)).unwrap();
        rho.apply_gate(&crate::gate::Gate::cnot(0, 1)).unwrap();
        rho.apply_gate(&crate::gate::Gate::ry(2, 0.3)).unwrap();
        rho.apply_gate(&crate::gate::Gate::s(1)).unwrap();
        for s in ["XYZ", "YYI", "-iZXY", "ZZX", "IYX"] {
            let p = ps(s);
            let dense = rho.expectation_matrix(&p.matrix());
            assert!((p.trace_with(&rho).unwrap() - dense).norm() < 1e-13, "{s}");
        }
    }
}
