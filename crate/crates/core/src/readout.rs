//! Shot sampling with per-qubit readout error, and its linear inversion.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::noise::DeviceParams;
use crate::pauli::{Pauli, PauliString};
use crate::state::DensityMatrix;

/// The random stream used for every sampled experiment.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Per-qubit confusion matrices `M[read][prepared]`; columns sum to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadoutModel {
    confusion: Vec<[[f64; 2]; 2]>,
}

impl ReadoutModel {
    /// Builds `[[f00, 1−f11], [1−f00, f11]]` per qubit.
    pub fn from_fidelities(f: &[(f64, f64)]) -> Result<Self> {
        let confusion = f.iter().map(|&(f00, f11)| [[f00, 1.0 - f11], [1.0 - f00, f11]]).collect();
        let m = Self { confusion };
        m.validate()?;
        Ok(m)
    }

    pub fn from_device(device: &DeviceParams) -> Result<Self> {
        let f: Vec<_> = device.qubits.iter().map(|q| (q.f00, q.f11)).collect();
        Self::from_fidelities(&f)
    }

    pub fn perfect(num_qubits: usize) -> Self {
        Self { confusion: vec![[[1.0, 0.0], [0.0, 1.0]]; num_qubits] }
    }

    pub fn validate(&self) -> Result<()> {
        for (q, m) in self.confusion.iter().enumerate() {
            let ok = m.iter().flatten().all(|v| (0.0..=1.0).contains(v))
                && (m[0][0] + m[1][0] - 1.0).abs() < 1e-12
                && (m[0][1] + m[1][1] - 1.0).abs() < 1e-12;
            if !ok {
                return Err(Error::InvalidDevice(format!("confusion matrix of qubit {q} is not stochastic")));
            }
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.confusion.len()
    }

    pub fn confusion(&self, q: usize) -> [[f64; 2]; 2] {
        self.confusion[q]
    }

    /// Same model with qubits reordered: entry `i` becomes entry `order[i]`.
    pub fn reordered(&self, order: &[usize]) -> Self {
        Self { confusion: order.iter().map(|&i| self.confusion[i]).collect() }
    }

    /// Pushes a probability vector through the confusion matrices.
    pub fn apply(&self, probs: &[f64]) -> Result<Vec<f64>> {
        self.check_len(probs.len())?;
        Ok(apply_per_qubit(probs, &self.confusion))
    }

    /// Applies the inverse confusion matrices to empirical frequencies.
    /// Entries may come out slightly negative.
    pub fn correct(&self, probs: &[f64]) -> Result<Vec<f64>> {
        self.check_len(probs.len())?;
        let mut inv = Vec::with_capacity(self.num_qubits());
        for (q, m) in self.confusion.iter().enumerate() {
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            if det.abs() < 1e-12 {
                return Err(Error::SingularConfusion(q));
            }
            inv.push([[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]);
        }
        Ok(apply_per_qubit(probs, &inv))
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != 1 << self.num_qubits() {
            return Err(Error::DimensionMismatch { expected: 1 << self.num_qubits(), found: len });
        }
        Ok(())
    }
}

/// `(⊗_q M_q)·p` with qubit 0 the most significant index bit.
fn apply_per_qubit(probs: &[f64], mats: &[[[f64; 2]; 2]]) -> Vec<f64> {
    let n = mats.len();
    let mut v = probs.to_vec();
    for (q, m) in mats.iter().enumerate() {
        let bit = 1 << (n - 1 - q);
        for i in 0..v.len() {
            if i & bit == 0 {
                let (p0, p1) = (v[i], v[i | bit]);
                v[i] = m[0][0] * p0 + m[0][1] * p1;
                v[i | bit] = m[1][0] * p0 + m[1][1] * p1;
            }
        }
    }
    v
}

/// Outcome histogram over `2^n` bitstrings, qubit 0 most significant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub num_qubits: usize,
    pub counts: Vec<u64>,
}

impl Counts {
    pub fn shots(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let total = self.shots().max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }
}

/// Born probabilities after rotating each qubit so that its requested
/// Pauli eigenbasis maps onto the computational basis. `I` reads out `Z`.
pub fn basis_probabilities(rho: &DensityMatrix, basis: &[Pauli]) -> Result<Vec<f64>> {
    if basis.len() != rho.num_qubits() {
        return Err(Error::LengthMismatch { left: rho.num_qubits(), right: basis.len() });
    }
    let mut r = rho.clone();
    for (q, p) in basis.iter().enumerate() {
        match p {
            Pauli::X => r.apply_gate(&Gate::h(q))?,
            Pauli::Y => {
                r.apply_gate(&Gate::sdg(q))?;
                r.apply_gate(&Gate::h(q))?;
            }
            Pauli::Z | Pauli::I => {}
        }
    }
    Ok(r.probabilities().into_iter().map(|p| p.max(0.0)).collect())
}

/// Draws `shots` outcomes in the given basis, each then flipped per qubit
/// according to `readout`.
pub fn sample_measurement<R: Rng>(
    rho: &DensityMatrix,
    basis: &[Pauli],
    shots: u64,
    readout: Option<&ReadoutModel>,
    rng: &mut R,
) -> Result<Counts> {
    if shots == 0 {
        return Err(Error::NoShots);
    }
    let n = rho.num_qubits();
    if let Some(m) = readout {
        m.check_len(1 << n)?;
    }
    let probs = basis_probabilities(rho, basis)?;
    let dist = WeightedIndex::new(&probs).map_err(|e| Error::InvalidDistribution(e.to_string()))?;
    let mut counts = vec![0u64; 1 << n];
    for _ in 0..shots {
        let mut outcome = dist.sample(rng);
        if let Some(m) = readout {
            for q in 0..n {
                let bit = 1 << (n - 1 - q);
                let prepared = usize::from(outcome & bit != 0);
                // probability of reading the other value
                let flip = m.confusion[q][1 - prepared][prepared];
                if rng.random::<f64>() < flip {
                    outcome ^= bit;
                }
            }
        }
        counts[outcome] += 1;
    }
    Ok(Counts { num_qubits: n, counts })
}

/// Normalizes counts and inverts the readout confusion.
pub fn confusion_correct(counts: &Counts, readout: &ReadoutModel) -> Result<Vec<f64>> {
    readout.correct(&counts.frequencies())
}

/// `⟨P⟩` from a distribution measured in the basis of `P`'s letters: the
/// parity of the non-identity qubits, times `P`'s sign.
pub fn pauli_expectation_from_probs(probs: &[f64], p: &PauliString) -> Result<f64> {
    let n = p.num_qubits();
    if probs.len() != 1 << n {
        return Err(Error::DimensionMismatch { expected: 1 << n, found: probs.len() });
    }
    if !p.phase().is_real() {
        return Err(Error::NonHermitianObservable(p.to_string()));
    }
    let mask: usize = p
        .letters()
        .iter()
        .enumerate()
        .filter(|(_, &l)| l != Pauli::I)
        .map(|(q, _)| 1usize << (n - 1 - q))
        .sum();
    let v: f64 = probs
        .iter()
        .enumerate()
        .map(|(i, &pr)| if (i & mask).count_ones().is_multiple_of(2) { pr } else { -pr })
        .sum();
    Ok(v * p.phase().to_complex().re)
}

/// A sampled value with its shot-noise standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// Samples `shots` in the basis of `p` and returns the estimated `⟨P⟩`,
/// readout-corrected when a model is given.
pub fn estimate_pauli<R: Rng>(
    rho: &DensityMatrix,
    p: &PauliString,
    shots: u64,
    readout: Option<&ReadoutModel>,
    rng: &mut R,
) -> Result<f64> {
    Ok(estimate_pauli_with_error(rho, p, shots, readout, rng)?.value)
}

/// [`estimate_pauli`] with its standard error. The estimate is linear in
/// the outcome frequencies, `v = Σ_k c_k f_k`, so the multinomial variance
/// is `(Σ_k c_k² f_k − v²)/shots`; readout inversion enters through `c`.
pub fn estimate_pauli_with_error<R: Rng>(
    rho: &DensityMatrix,
    p: &PauliString,
    shots: u64,
    readout: Option<&ReadoutModel>,
    rng: &mut R,
) -> Result<Estimate> {
    let counts = sample_measurement(rho, p.letters(), shots, readout, rng)?;
    let freqs = counts.frequencies();
    let dim = freqs.len();
    let mut coeff = Vec::with_capacity(dim);
    let mut unit = vec![0.0; dim];
    for k in 0..dim {
        unit[k] = 1.0;
        let column = match readout {
            Some(m) => m.correct(&unit)?,
            None => unit.clone(),
        };
        coeff.push(pauli_expectation_from_probs(&column, p)?);
        unit[k] = 0.0;
    }
    let value: f64 = coeff.iter().zip(&freqs).map(|(c, f)| c * f).sum();
    let second: f64 = coeff.iter().zip(&freqs).map(|(c, f)| c * c * f).sum();
    let std_error = ((second - value * value).max(0.0) / shots.max(1) as f64).sqrt();
    Ok(Estimate { value, std_error })
}
