use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::linalg::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TemplateOp {
    /// A parameterized `Rz(α)·Ry(β)·Rz(γ)` on one wire.
    Slot(usize),
    Cz(usize, usize),
}

/// A fixed CZ skeleton with parameterized single-qubit slots.
///
/// Parameters are radians: slot `k` owns `θ[3k..3k+3] = (α, β, γ)` and the
/// last entry is the global phase `φ`, so the template realizes
/// `e^{iφ} · Π (ops in temporal order)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateTemplate {
    pub name: String,
    pub num_qubits: usize,
    pub ops: Vec<TemplateOp>,
}

impl GateTemplate {
    pub fn new(name: &str, num_qubits: usize, ops: Vec<TemplateOp>) -> Result<Self> {
        for op in &ops {
            let ok = match *op {
                TemplateOp::Slot(w) => w < num_qubits,
                TemplateOp::Cz(a, b) => a < num_qubits && b < num_qubits && a != b,
            };
            if !ok {
                return Err(Error::Compile { stage: "template", reason: format!("{op:?} invalid on {num_qubits} wires") });
            }
        }
        Ok(Self { name: name.to_string(), num_qubits, ops })
    }

    /// Two wires: three slot pairs around two CZs (19 parameters).
    pub fn block_b() -> Self {
        use TemplateOp::*;
        Self::new("b", 2, vec![Slot(0), Slot(1), Cz(0, 1), Slot(0), Slot(1), Cz(0, 1), Slot(0), Slot(1)])
            .expect("static template")
    }

    /// Three wires, four CZs alternating between the pairs (0,1) and (1,2),
    /// with trailing slots on all wires touched after the last CZ on each
    /// (34 parameters).
    pub fn block_a() -> Self {
        use TemplateOp::*;
        Self::new(
            "a",
            3,
            vec![
                Slot(0), Slot(1), Slot(2),
                Cz(0, 1), Slot(0), Slot(1),
                Cz(1, 2), Slot(1), Slot(2),
                Cz(0, 1), Slot(0), Slot(1),
                Cz(1, 2), Slot(1), Slot(2),
            ],
        )
        .expect("static template")
    }

    /// The nine-slot variant of [`Self::block_a`] without trailing slots
    /// (28 parameters). It cannot reach the block-(a) target; kept to
    /// document that.
    pub fn block_a_without_trailing() -> Self {
        let mut t = Self::block_a();
        t.ops.truncate(t.ops.len() - 2);
        t.name = "a-28".into();
        t
    }

    pub fn num_slots(&self) -> usize {
        self.ops.iter().filter(|o| matches!(o, TemplateOp::Slot(_))).count()
    }

    pub fn num_cz(&self) -> usize {
        self.ops.len() - self.num_slots()
    }

    /// `3·slots + 1`.
    pub fn num_params(&self) -> usize {
        3 * self.num_slots() + 1
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    fn check_params(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.num_params() {
            return Err(Error::ParameterCount { expected: self.num_params(), found: theta.len() });
        }
        Ok(())
    }

    /// `e^{iφ}` times the product of the skeleton and slot unitaries.
    pub fn unitary(&self, theta: &[f64]) -> Result<ComplexMatrix> {
        self.check_params(theta)?;
        let d = self.dim();
        let mut u = ComplexMatrix::identity(d);
        self.fill_unitary(theta, u.as_mut_slice());
        Ok(u)
    }

    /// Writes the template unitary into `out` (row-major, `dim × dim`,
    /// initialized to the identity by the caller).
    pub(crate) fn fill_unitary(&self, theta: &[f64], out: &mut [Complex64]) {
        let n = self.num_qubits;
        let d = 1usize << n;
        let mut slot = 0;
        for op in &self.ops {
            match *op {
                TemplateOp::Slot(w) => {
                    let m = slot_matrix(theta[3 * slot], theta[3 * slot + 1], theta[3 * slot + 2]);
                    slot += 1;
                    let bit = 1 << (n - 1 - w);
                    for r0 in 0..d {
                        if r0 & bit != 0 {
                            continue;
                        }
                        let r1 = r0 | bit;
                        for c in 0..d {
                            let (x0, x1) = (out[r0 * d + c], out[r1 * d + c]);
                            out[r0 * d + c] = m[0] * x0 + m[1] * x1;
                            out[r1 * d + c] = m[2] * x0 + m[3] * x1;
                        }
                    }
                }
                TemplateOp::Cz(a, b) => {
                    let mask = (1 << (n - 1 - a)) | (1 << (n - 1 - b));
                    for r in 0..d {
                        if r & mask == mask {
                            for c in 0..d {
                                out[r * d + c] = -out[r * d + c];
                            }
                        }
                    }
                }
            }
        }
        let phase = Complex64::from_polar(1.0, theta[theta.len() - 1]);
        for v in out.iter_mut() {
            *v *= phase;
        }
    }

    /// The same operation as a gate circuit. Slot angles become
    /// `Rz(γ), Ry(β), Rz(α)` in temporal order, converted to units of π;
    /// zero angles are skipped. The global phase is dropped.
    pub fn to_circuit(&self, theta: &[f64]) -> Result<Circuit> {
        self.check_params(theta)?;
        let mut gates = Vec::new();
        let mut slot = 0;
        for op in &self.ops {
            match *op {
                TemplateOp::Slot(w) => {
                    let (a, b, g) = (theta[3 * slot], theta[3 * slot + 1], theta[3 * slot + 2]);
                    slot += 1;
                    for gate in [Gate::rz(w, g / PI), Gate::ry(w, b / PI), Gate::rz(w, a / PI)] {
                        if gate.angle != 0.0 {
                            gates.push(gate);
                        }
                    }
                }
                TemplateOp::Cz(a, b) => gates.push(Gate::cz(a, b)),
            }
        }
        Circuit::from_gates(self.num_qubits, gates)
    }
}

/// Row-major entries of `Rz(α)·Ry(β)·Rz(γ)` with `Rz(t) = exp(−itσz/2)`,
/// `Ry(t) = exp(−itσy/2)`.
pub(crate) fn slot_matrix(alpha: f64, beta: f64, gamma: f64) -> [Complex64; 4] {
    let (s, c) = (beta / 2.0).sin_cos();
    let sum = (alpha + gamma) / 2.0;
    let diff = (alpha - gamma) / 2.0;
    [
        Complex64::from_polar(c, -sum),
        -Complex64::from_polar(s, -diff),
        Complex64::from_polar(s, diff),
        Complex64::from_polar(c, sum),
    ]
}

/// `Σ_ij |U_ij − V_ij|²`.
pub fn distance(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    if u.rows() != v.rows() || u.cols() != v.cols() {
        return Err(Error::DimensionMismatch { expected: u.rows() * u.cols(), found: v.rows() * v.cols() });
    }
    Ok(u.as_slice().iter().zip(v.as_slice()).map(|(a, b)| (a - b).norm_sqr()).sum())
}

/// The phase `φ` minimizing `distance(e^{iφ}U, T)`: `arg Tr(U†T)`.
pub fn best_phase(u: &ComplexMatrix, target: &ComplexMatrix) -> f64 {
    let overlap: Complex64 = u.as_slice().iter().zip(target.as_slice()).map(|(a, b)| a.conj() * b).sum();
    if overlap.norm() == 0.0 {
        0.0
    } else {
        overlap.arg()
    }
}

/// Sets the template's phase parameter to its optimal value.
pub fn with_best_phase(template: &GateTemplate, target: &ComplexMatrix, theta: &[f64]) -> Result<Vec<f64>> {
    let mut t = theta.to_vec();
    let last = t.len().checked_sub(1).ok_or(Error::ParameterCount { expected: template.num_params(), found: 0 })?;
    t[last] = 0.0;
    let u = template.unitary(&t)?;
    t[last] = best_phase(&u, target);
    Ok(t)
}
