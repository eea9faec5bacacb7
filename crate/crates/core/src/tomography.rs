//! Fidelity estimation, code-space projection, state and process
//! tomography.

use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::code::{logical_pauli, logical_state, stabilizers, LogicalAmplitudes, NUM_QUBITS};
use crate::error::{Error, Result};
use crate::linalg::{r, ComplexMatrix, I, ZERO};
use crate::pauli::{Pauli, PauliString};
use crate::readout::{estimate_pauli_with_error, sample_measurement, Estimate, ReadoutModel};
use crate::stabilizer::{expand_group, ExpansionTerm};
use crate::state::DensityMatrix;

/// The `2^{k+1}` expansion terms of the projector onto `amps`' logical state.
pub fn fidelity_terms(amps: &LogicalAmplitudes) -> Vec<ExpansionTerm> {
    expand_group(&stabilizers(), &amps.fifth_stabilizer()).expect("five-qubit operators throughout")
}

/// One nontrivial stabilizer-group element and its measured value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilizerExpectation {
    /// Generator subset; bit 4 is the state-specific fifth stabilizer.
    pub mask: u32,
    /// Human-readable operator, e.g. `XZZXI` or `0.707*XXXXX+0.707*YYYYY`.
    pub label: String,
    pub value: f64,
}

fn combination_label(term: &ExpansionTerm, scale: f64) -> String {
    if term.operator.terms.len() == 1 {
        let (w, p) = &term.operator.terms[0];
        let s = if w * scale < 0.0 { "-" } else { "" };
        return format!("{s}{p}");
    }
    term.operator
        .terms
        .iter()
        .map(|(w, p)| format!("{:.4}*{p}", w * scale))
        .collect::<Vec<_>>()
        .join("+")
}

/// Values of the `2^{k+1} − 1` nontrivial terms, unweighted.
pub fn stabilizer_expectations(rho: &DensityMatrix, amps: &LogicalAmplitudes) -> Result<Vec<StabilizerExpectation>> {
    let terms = fidelity_terms(amps);
    let scale = terms.len() as f64;
    terms
        .iter()
        .filter(|t| !t.is_identity())
        .map(|t| {
            let mut value = 0.0;
            for (w, p) in &t.operator.terms {
                value += w * scale * p.expectation(rho)?;
            }
            Ok(StabilizerExpectation { mask: t.mask, label: combination_label(t, scale), value })
        })
        .collect()
}

/// `⟨Ψ|ρ|Ψ⟩` evaluated as `Σ_j w_j Tr(ρ g_j)` over the expansion.
pub fn stabilizer_fidelity(rho: &DensityMatrix, amps: &LogicalAmplitudes) -> Result<f64> {
    let mut f = 0.0;
    for t in fidelity_terms(amps) {
        for (w, p) in &t.operator.terms {
            f += w * p.expectation(rho)?;
        }
    }
    Ok(f)
}

/// Shot-based [`stabilizer_expectations`]: every Pauli string of each
/// term is measured `shots` times in its own basis. Returns the values and
/// their standard errors.
pub fn sampled_stabilizer_expectations<R: Rng>(
    rho: &DensityMatrix,
    amps: &LogicalAmplitudes,
    shots: u64,
    readout: Option<&ReadoutModel>,
    rng: &mut R,
) -> Result<Vec<(StabilizerExpectation, f64)>> {
    let terms = fidelity_terms(amps);
    let scale = terms.len() as f64;
    let mut out = Vec::with_capacity(terms.len() - 1);
    for t in terms.iter().filter(|t| !t.is_identity()) {
        let mut value = 0.0;
        let mut var = 0.0;
        for (w, p) in &t.operator.terms {
            let e = estimate_pauli_with_error(rho, p, shots, readout, rng)?;
            value += w * scale * e.value;
            var += (w * scale * e.std_error).powi(2);
        }
        out.push((StabilizerExpectation { mask: t.mask, label: combination_label(t, scale), value }, var.sqrt()));
    }
    Ok(out)
}

/// Shot-based [`stabilizer_fidelity`], `F = (1 + Σ_j v_j)/2^{k+1}` over
/// [`sampled_stabilizer_expectations`]. Settings are sampled
/// independently, so their variances add.
pub fn sampled_stabilizer_fidelity<R: Rng>(
    rho: &DensityMatrix,
    amps: &LogicalAmplitudes,
    shots: u64,
    readout: Option<&ReadoutModel>,
    rng: &mut R,
) -> Result<Estimate> {
    let terms = sampled_stabilizer_expectations(rho, amps, shots, readout, rng)?;
    Ok(fidelity_from_terms(&terms))
}

/// Combines per-term values and errors into the fidelity estimate.
pub fn fidelity_from_terms(terms: &[(StabilizerExpectation, f64)]) -> Estimate {
    let scale = (terms.len() + 1) as f64;
    let value = (1.0 + terms.iter().map(|(e, _)| e.value).sum::<f64>()) / scale;
    let std_error = terms.iter().map(|(_, s)| s * s).sum::<f64>().sqrt() / scale;
    Estimate { value, std_error }
}

/// The product `Π_i (|p_i| + 1)/2` of per-generator success probabilities.
pub fn syndrome_success_probability(p: &[f64]) -> Result<f64> {
    p.iter().try_fold(1.0, |acc, &v| {
        if !(-1.0..=1.0).contains(&v) {
            return Err(Error::ExpectationOutOfRange(v));
        }
        Ok(acc * (v.abs() + 1.0) / 2.0)
    })
}

/// Logical Pauli expectations restricted to the code space and the
/// resulting logical density matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeSpaceProjection {
    /// Probability of the code space, `Tr(ρ Π)`.
    pub p_i: f64,
    pub p_x: f64,
    pub p_y: f64,
    pub p_z: f64,
    /// `(P_X, P_Y, P_Z) / P_I`.
    pub bloch: [f64; 3],
    pub rho_l: ComplexMatrix,
}

impl CodeSpaceProjection {
    /// `⟨ψ|ρ_L|ψ⟩` for `ψ = a|0⟩ + b|1⟩`.
    pub fn fidelity(&self, amps: &LogicalAmplitudes) -> f64 {
        let psi = amps.qubit_state();
        let v = self.rho_l.mul_vec(psi.amplitudes());
        let f: Complex64 = psi.amplitudes().iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
        f.re
    }

    pub fn logical_density(&self) -> DensityMatrix {
        DensityMatrix::from_matrix(self.rho_l.clone()).expect("2x2")
    }
}

/// `(I + x X + y Y + z Z)/2`.
pub fn bloch_to_density(b: [f64; 3]) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        &[r((1.0 + b[2]) / 2.0), Complex64::new(b[0] / 2.0, -b[1] / 2.0)],
        &[Complex64::new(b[0] / 2.0, b[1] / 2.0), r((1.0 - b[2]) / 2.0)],
    ])
}

/// `Tr(ρ σ Π)` with `Π = 2^{-k} Σ_{s ∈ S} s`, each term from `expect`.
fn projected_expectation<F>(sigma: &PauliString, group: &[PauliString], expect: &mut F) -> Result<Estimate>
where
    F: FnMut(&PauliString) -> Result<Estimate>,
{
    let mut acc = 0.0;
    let mut var = 0.0;
    for s in group {
        let e = expect(&sigma.multiply(s)?)?;
        acc += e.value;
        var += e.std_error * e.std_error;
    }
    let n = group.len() as f64;
    Ok(Estimate { value: acc / n, std_error: var.sqrt() / n })
}

fn projection_from<F>(expect: &mut F) -> Result<(CodeSpaceProjection, [f64; 4])>
where
    F: FnMut(&PauliString) -> Result<Estimate>,
{
    let group = stabilizers().group_elements();
    let id = projected_expectation(&PauliString::identity(NUM_QUBITS), &group, expect)?;
    if id.value <= 1e-9 {
        return Err(Error::OrthogonalToCodeSpace(id.value));
    }
    let x = projected_expectation(&logical_pauli(Pauli::X), &group, expect)?;
    let y = projected_expectation(&logical_pauli(Pauli::Y), &group, expect)?;
    let z = projected_expectation(&logical_pauli(Pauli::Z), &group, expect)?;
    let bloch = [x.value / id.value, y.value / id.value, z.value / id.value];
    let errors = [id.std_error, x.std_error, y.std_error, z.std_error];
    let rho_l = bloch_to_density(bloch);
    Ok((CodeSpaceProjection { p_i: id.value, p_x: x.value, p_y: y.value, p_z: z.value, bloch, rho_l }, errors))
}

/// Projects a five-qubit state onto the code space: `P_σ = Tr(ρ σ_L Π)`
/// and `ρ_L = (I + Σ_σ P_σ/P_I · σ)/2`. Fails when `P_I ≤ 1e-9`.
pub fn project_code_space(rho: &DensityMatrix) -> Result<CodeSpaceProjection> {
    if rho.num_qubits() != NUM_QUBITS {
        return Err(Error::DimensionMismatch { expected: NUM_QUBITS, found: rho.num_qubits() });
    }
    let mut exact = |p: &PauliString| -> Result<Estimate> { Ok(Estimate { value: p.expectation(rho)?, std_error: 0.0 }) };
    Ok(projection_from(&mut exact)?.0)
}

/// Shot-based [`project_code_space`]: each of the 63 strings `σ_L·s` is
/// measured `shots` times. Also returns the standard errors of
/// `(P_I, P_X, P_Y, P_Z)`.
pub fn sampled_project_code_space<R: Rng>(
    rho: &DensityMatrix,
    shots: u64,
    readout: Option<&ReadoutModel>,
    rng: &mut R,
) -> Result<(CodeSpaceProjection, [f64; 4])> {
    if rho.num_qubits() != NUM_QUBITS {
        return Err(Error::DimensionMismatch { expected: NUM_QUBITS, found: rho.num_qubits() });
    }
    let mut sampled = |p: &PauliString| -> Result<Estimate> {
        if p.is_identity() {
            return Ok(Estimate { value: p.phase().to_complex().re, std_error: 0.0 });
        }
        estimate_pauli_with_error(rho, p, shots, readout, rng)
    };
    projection_from(&mut sampled)
}

/// Embeds a logical `2×2` state into the code space.
pub fn lift_logical(rho_l: &ComplexMatrix) -> Result<DensityMatrix> {
    rho_l.check_square(2)?;
    let zero = logical_state(&LogicalAmplitudes::zero());
    let one = logical_state(&LogicalAmplitudes::one());
    let dim = 1 << NUM_QUBITS;
    let mut v = ComplexMatrix::zeros(dim, 2);
    v.set_column(0, zero.amplitudes());
    v.set_column(1, one.amplitudes());
    DensityMatrix::from_matrix(v.matmul(rho_l).matmul(&v.adjoint()))
}

/// Outcome frequencies `[p(0), p(1)]` of a single qubit in each Pauli
/// basis; raw counts are accepted and normalized.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SingleQubitData {
    pub x: Option<[f64; 2]>,
    pub y: Option<[f64; 2]>,
    pub z: Option<[f64; 2]>,
}

impl SingleQubitData {
    /// Exact Born probabilities of a one-qubit state.
    pub fn exact(rho: &DensityMatrix) -> Result<Self> {
        let e = |p: Pauli| -> Result<[f64; 2]> {
            let v = PauliString::single(1, 0, p).expectation(rho)?;
            Ok([(1.0 + v) / 2.0, (1.0 - v) / 2.0])
        };
        Ok(Self { x: Some(e(Pauli::X)?), y: Some(e(Pauli::Y)?), z: Some(e(Pauli::Z)?) })
    }

    /// Samples `shots` per basis, readout-corrected when a model is given.
    pub fn sampled<R: Rng>(rho: &DensityMatrix, shots: u64, readout: Option<&ReadoutModel>, rng: &mut R) -> Result<Self> {
        let mut e = |p: Pauli| -> Result<[f64; 2]> {
            let counts = sample_measurement(rho, &[p], shots, readout, rng)?;
            let f = match readout {
                Some(m) => m.correct(&counts.frequencies())?,
                None => counts.frequencies(),
            };
            Ok([f[0], f[1]])
        };
        Ok(Self { x: Some(e(Pauli::X)?), y: Some(e(Pauli::Y)?), z: Some(e(Pauli::Z)?) })
    }
}

/// Bloch vector from three-basis data, then [`mle_physical`].
pub fn qst_single_qubit(data: &SingleQubitData) -> Result<DensityMatrix> {
    let comp = |d: Option<[f64; 2]>, name: char| -> Result<f64> {
        let [p0, p1] = d.ok_or(Error::MissingBasis(name))?;
        let total = p0 + p1;
        if !(total > 0.0) {
            return Err(Error::MissingBasis(name));
        }
        Ok((p0 - p1) / total)
    };
    let b = [comp(data.x, 'X')?, comp(data.y, 'Y')?, comp(data.z, 'Z')?];
    DensityMatrix::from_matrix(mle_physical(&bloch_to_density(b))?)
}

/// Euclidean projection of `v` onto `{λ ≥ 0, Σλ = 1}`.
fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// The Frobenius-nearest positive semidefinite unit-trace matrix, obtained
/// by projecting the eigenvalues onto the probability simplex.
pub fn mle_physical(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.rows(), found: m.cols() });
    }
    let dev = m.hermiticity_deviation();
    if dev > 1e-8 {
        return Err(Error::NotHermitian(dev));
    }
    let (vals, vecs) = m.hermitian_eigen();
    let lam = project_to_simplex(&vals);
    let dim = m.rows();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (k, &l) in lam.iter().enumerate() {
        if l == 0.0 {
            continue;
        }
        let col = vecs.column(k);
        out = &out + &ComplexMatrix::outer(&col, &col).scale(r(l));
    }
    Ok(out)
}

/// Process matrix in the operator basis `{I, X, −iY, Z}`:
/// `ε(ρ) = Σ_mn χ_mn E_m ρ E_n†`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiMatrix {
    pub matrix: ComplexMatrix,
}

/// `{I, X, −iY, Z}`.
pub fn chi_basis() -> [ComplexMatrix; 4] {
    [
        ComplexMatrix::identity(2),
        Pauli::X.matrix(),
        Pauli::Y.matrix().scale(-I),
        Pauli::Z.matrix(),
    ]
}

impl ChiMatrix {
    /// `χ = e·e†` with `U = Σ_m e_m E_m`.
    pub fn from_unitary(u: &ComplexMatrix) -> Result<Self> {
        u.check_square(2)?;
        let e: Vec<Complex64> = chi_basis().iter().map(|b| b.inner(u) / 2.0).collect();
        Ok(Self { matrix: ComplexMatrix::outer(&e, &e) })
    }

    pub fn identity() -> Self {
        Self::from_unitary(&ComplexMatrix::identity(2)).expect("2x2")
    }

    /// The ideal χ of a Pauli gate.
    pub fn pauli(p: Pauli) -> Self {
        Self::from_unitary(&p.matrix()).expect("2x2")
    }

    /// Applies the process to a single-qubit state.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let basis = chi_basis();
        let mut out = ComplexMatrix::zeros(2, 2);
        for (m, em) in basis.iter().enumerate() {
            for (n, en) in basis.iter().enumerate() {
                let c = self.matrix[(m, n)];
                if c == ZERO {
                    continue;
                }
                out = &out + &em.matmul(rho).matmul(&en.adjoint()).scale(c);
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }
}

/// The standard input states `|0⟩, |1⟩, |+⟩, |+i⟩`.
pub fn standard_qpt_inputs() -> [LogicalAmplitudes; 4] {
    [
        LogicalAmplitudes::zero(),
        LogicalAmplitudes::one(),
        LogicalAmplitudes::plus(),
        LogicalAmplitudes::plus_i(),
    ]
}

/// Linear-inversion χ from input/output pairs, then [`mle_physical`].
/// Inputs must span the single-qubit operator space.
pub fn qpt_from_pairs(inputs: &[ComplexMatrix], outputs: &[ComplexMatrix]) -> Result<ChiMatrix> {
    if inputs.len() != outputs.len() {
        return Err(Error::LengthMismatch { left: inputs.len(), right: outputs.len() });
    }
    for m in inputs.iter().chain(outputs) {
        m.check_square(2)?;
    }
    let basis = chi_basis();
    let rows = 4 * inputs.len();
    let mut a = ComplexMatrix::zeros(rows, 16);
    let mut b = vec![ZERO; rows];
    for (k, (rin, rout)) in inputs.iter().zip(outputs).enumerate() {
        for m in 0..4 {
            for n in 0..4 {
                let t = basis[m].matmul(rin).matmul(&basis[n].adjoint());
                for i in 0..2 {
                    for j in 0..2 {
                        a[(4 * k + 2 * i + j, 4 * m + n)] = t[(i, j)];
                    }
                }
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                b[4 * k + 2 * i + j] = rout[(i, j)];
            }
        }
    }
    // normal equations keep the system square for any number of inputs
    let ah = a.adjoint();
    let normal = ah.matmul(&a);
    if normal.min_singular_value() < 1e-10 {
        return Err(Error::DegenerateInputs);
    }
    let x = normal.solve(&ah.mul_vec(&b)).ok_or(Error::DegenerateInputs)?;
    let chi = ComplexMatrix::from_vec(4, 4, x);
    let herm = (&chi + &chi.adjoint()).scale(r(0.5));
    Ok(ChiMatrix { matrix: mle_physical(&herm)? })
}

/// QPT with the standard inputs `|0⟩, |1⟩, |+⟩, |+i⟩`.
pub fn qpt(outputs: &[ComplexMatrix; 4]) -> Result<ChiMatrix> {
    let inputs: Vec<ComplexMatrix> = standard_qpt_inputs().iter().map(|a| a.qubit_state().to_density().into_matrix()).collect();
    qpt_from_pairs(&inputs, outputs)
}

/// `Tr(χ_ideal · χ_exp)`.
pub fn process_fidelity(chi_exp: &ChiMatrix, chi_ideal: &ChiMatrix) -> f64 {
    chi_ideal.matrix.matmul(&chi_exp.matrix).trace().re
}

/// Distinct Pauli strings appearing in the expansion of `amps`.
pub fn expansion_strings(amps: &LogicalAmplitudes) -> BTreeSet<String> {
    fidelity_terms(amps)
        .iter()
        .flat_map(|t| t.operator.terms.iter().map(|(_, p)| p.to_string()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;

    #[test]
    fn success_probability_examples() {
        assert_eq!(syndrome_success_probability(&[1.0; 4]).unwrap(), 1.0);
        assert!((syndrome_success_probability(&[0.9; 4]).unwrap() - 0.81450625).abs() < 1e-15);
        assert!(syndrome_success_probability(&[1.2]).is_err());
    }

    #[test]
    fn mle_truncates_negative_eigenvalue() {
        let m = ComplexMatrix::diagonal(&[r(1.1), r(-0.1)]);
        let out = mle_physical(&m).unwrap();
        assert!(out.max_abs_diff(&ComplexMatrix::diagonal(&[ONE, ZERO])) < 1e-12);
    }

    #[test]
    fn mle_rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows(&[&[ONE, ONE], &[ZERO, ZERO]]);
        assert!(matches!(mle_physical(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn qst_from_exact_probabilities() {
        let plus = LogicalAmplitudes::plus().qubit_state().to_density();
        let rho = qst_single_qubit(&SingleQubitData::exact(&plus).unwrap()).unwrap();
        assert!(rho.matrix().max_abs_diff(plus.matrix()) < 1e-12);
        let missing = SingleQubitData { x: Some([1.0, 0.0]), ..Default::default() };
        assert!(matches!(qst_single_qubit(&missing), Err(Error::MissingBasis('Y'))));
    }

    #[test]
    fn ideal_x_has_unit_chi_xx() {
        let chi = ChiMatrix::pauli(Pauli::X);
        assert!((chi.matrix[(1, 1)] - ONE).norm() < 1e-15);
        assert!((process_fidelity(&chi, &chi) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let z = LogicalAmplitudes::zero().qubit_state().to_density().into_matrix();
        let ins = vec![z.clone(), z.clone(), z.clone(), z.clone()];
        assert!(matches!(qpt_from_pairs(&ins, &ins), Err(Error::DegenerateInputs)));
    }

    #[test]
    fn identity_process_recovered() {
        let outs = standard_qpt_inputs().map(|a| a.qubit_state().to_density().into_matrix());
        let chi = qpt(&outs).unwrap();
        assert!(chi.matrix.max_abs_diff(&ChiMatrix::identity().matrix) < 1e-12);
    }
}
