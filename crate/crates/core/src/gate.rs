//! Gate set.
//!
//! Rotation angles are stored in units of π: `RotZ(α)` is
//! `exp(-i·απ·σz/2)`. This is the convention used by the encoder drawings,
//! where `Z_{4/3}` is a z-rotation by 4π/3.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, r, ComplexMatrix, I, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    RotX,
    RotY,
    RotZ,
    H,
    S,
    Sdg,
    X,
    Y,
    Z,
    Cz,
    Cnot,
    Swap,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Cz | GateKind::Cnot | GateKind::Swap => 2,
            _ => 1,
        }
    }

    pub fn has_angle(self) -> bool {
        matches!(self, GateKind::RotX | GateKind::RotY | GateKind::RotZ)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::RotX => "rx",
            GateKind::RotY => "ry",
            GateKind::RotZ => "rz",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::Cz => "cz",
            GateKind::Cnot => "cnot",
            GateKind::Swap => "swap",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "rx" => GateKind::RotX,
            "ry" => GateKind::RotY,
            "rz" => GateKind::RotZ,
            "h" => GateKind::H,
            "s" => GateKind::S,
            "sdg" => GateKind::Sdg,
            "x" => GateKind::X,
            "y" => GateKind::Y,
            "z" => GateKind::Z,
            "cz" => GateKind::Cz,
            "cnot" => GateKind::Cnot,
            "swap" => GateKind::Swap,
            _ => return None,
        })
    }
}

/// A gate bound to its target qubits. For `Cnot` the first target is the
/// control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    /// Rotation angle in units of π; zero for fixed gates.
    pub angle: f64,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>, angle: f64) -> Result<Self> {
        let g = Self { kind, targets, angle };
        g.validate(usize::MAX)?;
        Ok(g)
    }

    fn one(kind: GateKind, q: usize) -> Self {
        Self { kind, targets: vec![q], angle: 0.0 }
    }

    pub fn rx(q: usize, angle: f64) -> Self {
        Self { kind: GateKind::RotX, targets: vec![q], angle }
    }
    pub fn ry(q: usize, angle: f64) -> Self {
        Self { kind: GateKind::RotY, targets: vec![q], angle }
    }
    pub fn rz(q: usize, angle: f64) -> Self {
        Self { kind: GateKind::RotZ, targets: vec![q], angle }
    }
    pub fn h(q: usize) -> Self {
        Self::one(GateKind::H, q)
    }
    pub fn s(q: usize) -> Self {
        Self::one(GateKind::S, q)
    }
    pub fn sdg(q: usize) -> Self {
        Self::one(GateKind::Sdg, q)
    }
    pub fn x(q: usize) -> Self {
        Self::one(GateKind::X, q)
    }
    pub fn y(q: usize) -> Self {
        Self::one(GateKind::Y, q)
    }
    pub fn z(q: usize) -> Self {
        Self::one(GateKind::Z, q)
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Self { kind: GateKind::Cz, targets: vec![a, b], angle: 0.0 }
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Self { kind: GateKind::Cnot, targets: vec![control, target], angle: 0.0 }
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Self { kind: GateKind::Swap, targets: vec![a, b], angle: 0.0 }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.kind.arity() == 2
    }

    /// Checks arity, distinct targets, range and a finite angle.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        if self.targets.len() != self.kind.arity() {
            return Err(Error::InvalidLayer {
                layer: 0,
                reason: format!(
                    "{} expects {} target(s), got {}",
                    self.kind.name(),
                    self.kind.arity(),
                    self.targets.len()
                ),
            });
        }
        if let Some(&q) = self.targets.iter().find(|&&q| q >= num_qubits) {
            return Err(Error::QubitOutOfRange { index: q, num_qubits });
        }
        if self.targets.len() == 2 && self.targets[0] == self.targets[1] {
            return Err(Error::DuplicateTargets(self.targets.clone()));
        }
        if !self.angle.is_finite() {
            return Err(Error::NotUnitary { deviation: f64::NAN });
        }
        Ok(())
    }

    /// The gate's matrix on its own targets (2×2 or 4×4, first target most
    /// significant).
    pub fn matrix(&self) -> ComplexMatrix {
        let h = FRAC_1_SQRT_2;
        let half = self.angle * PI / 2.0;
        let (cs, sn) = (half.cos(), half.sin());
        match self.kind {
            GateKind::RotX => ComplexMatrix::from_rows(&[&[r(cs), c(0.0, -sn)], &[c(0.0, -sn), r(cs)]]),
            GateKind::RotY => ComplexMatrix::from_rows(&[&[r(cs), r(-sn)], &[r(sn), r(cs)]]),
            GateKind::RotZ => ComplexMatrix::diagonal(&[c(cs, -sn), c(cs, sn)]),
            GateKind::H => ComplexMatrix::from_rows(&[&[r(h), r(h)], &[r(h), r(-h)]]),
            GateKind::S => ComplexMatrix::diagonal(&[ONE, I]),
            GateKind::Sdg => ComplexMatrix::diagonal(&[ONE, -I]),
            GateKind::X => ComplexMatrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]),
            GateKind::Y => ComplexMatrix::from_rows(&[&[ZERO, -I], &[I, ZERO]]),
            GateKind::Z => ComplexMatrix::diagonal(&[ONE, -ONE]),
            GateKind::Cz => ComplexMatrix::diagonal(&[ONE, ONE, ONE, -ONE]),
            GateKind::Cnot => ComplexMatrix::from_rows(&[
                &[ONE, ZERO, ZERO, ZERO],
                &[ZERO, ONE, ZERO, ZERO],
                &[ZERO, ZERO, ZERO, ONE],
                &[ZERO, ZERO, ONE, ZERO],
            ]),
            GateKind::Swap => ComplexMatrix::from_rows(&[
                &[ONE, ZERO, ZERO, ZERO],
                &[ZERO, ZERO, ONE, ZERO],
                &[ZERO, ONE, ZERO, ZERO],
                &[ZERO, ZERO, ZERO, ONE],
            ]),
        }
    }

    /// The inverse gate, expressed in the same gate set.
    pub fn inverse(&self) -> Self {
        let mut g = self.clone();
        match self.kind {
            GateKind::RotX | GateKind::RotY | GateKind::RotZ => g.angle = -self.angle,
            GateKind::S => g.kind = GateKind::Sdg,
            GateKind::Sdg => g.kind = GateKind::S,
            _ => {}
        }
        g
    }

    /// The same gate with targets renamed through `map` (`map[old] = new`).
    pub fn remapped(&self, map: &[usize]) -> Self {
        let mut g = self.clone();
        g.targets = self.targets.iter().map(|&q| map[q]).collect();
        g
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        if self.kind.has_angle() {
            write!(f, "({})", self.angle)?;
        }
        let t: Vec<String> = self.targets.iter().map(|q| q.to_string()).collect();
        write!(f, " {}", t.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_kinds() -> Vec<Gate> {
        vec![
            Gate::rx(0, 0.37),
            Gate::ry(0, -1.2),
            Gate::rz(0, 7.0 / 6.0),
            Gate::h(0),
            Gate::s(0),
            Gate::sdg(0),
            Gate::x(0),
            Gate::y(0),
            Gate::z(0),
            Gate::cz(0, 1),
            Gate::cnot(0, 1),
            Gate::swap(0, 1),
        ]
    }

    #[test]
    fn every_gate_is_unitary() {
        for g in all_kinds() {
            assert!(g.matrix().unitarity_deviation() < 1e-12, "{g}");
        }
    }

    #[test]
    fn inverse_undoes_gate() {
        for g in all_kinds() {
            let prod = g.inverse().matrix().matmul(&g.matrix());
            let dim = prod.rows();
            assert!(prod.max_abs_diff(&ComplexMatrix::identity(dim)) < 1e-12, "{g}");
        }
    }

    #[test]
    fn ry_pi_is_minus_i_sigma_y() {
        let m = Gate::ry(0, 1.0).matrix();
        let expect = Gate::y(0).matrix().scale(-I);
        assert!(m.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn rejects_bad_targets() {
        assert!(Gate::cz(1, 1).validate(5).is_err());
        assert!(Gate::h(5).validate(5).is_err());
        assert!(Gate::new(GateKind::Cz, vec![0], 0.0).is_err());
    }
}
