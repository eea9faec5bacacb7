//! The [[5,1,3]] code: logical states, encoders, decoder and logical gates.
//!
//! Two qubit orderings appear. *Labels* `0..5` are the code's own qubit
//! names, in which the generators read `XZZXI, IXZZX, XIXZZ, ZXIXZ`. *Wires*
//! `0..5` are positions along the nearest-neighbour chain; wire `j` carries
//! label [`RelabelingMap::label_of_wire`]`(j)`. Hardware-facing circuits act
//! on wires. Every state returned by this module is in label order.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Layer};
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::linalg::{c, r, ComplexMatrix, ONE, ZERO};
use crate::noise::{evolve, NoiseParams};
use crate::pauli::{Pauli, PauliString};
use crate::stabilizer::{PauliCombination, StabilizerSet};
use crate::state::{DensityMatrix, StateVector};

pub const NUM_QUBITS: usize = 5;

/// Signed kets of `4·|0_L⟩`.
const ZERO_L: [(i8, &str); 16] = [
    (1, "00000"),
    (1, "10010"),
    (1, "01001"),
    (1, "10100"),
    (1, "01010"),
    (-1, "11011"),
    (-1, "00110"),
    (-1, "11000"),
    (-1, "11101"),
    (-1, "00011"),
    (-1, "11110"),
    (-1, "01111"),
    (-1, "10001"),
    (-1, "01100"),
    (-1, "10111"),
    (1, "00101"),
];

/// Signed kets of `4·|1_L⟩`.
const ONE_L: [(i8, &str); 16] = [
    (1, "11111"),
    (1, "01101"),
    (1, "10110"),
    (1, "01011"),
    (1, "10101"),
    (-1, "00100"),
    (-1, "11001"),
    (-1, "00111"),
    (-1, "00010"),
    (-1, "11100"),
    (-1, "00001"),
    (-1, "10000"),
    (-1, "01110"),
    (-1, "10011"),
    (-1, "01000"),
    (1, "11010"),
];

/// `(a, b)` with `|a|² + |b|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogicalAmplitudes {
    a: Complex64,
    b: Complex64,
}

impl LogicalAmplitudes {
    /// The seven states prepared in the experiments, by name.
    pub const NAMES: [&'static str; 7] = ["0", "1", "+", "-", "+i", "-i", "T"];

    /// Fails unless the pair is normalized within `1e-12`.
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        let n = a.norm_sqr() + b.norm_sqr();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::UnnormalizedAmplitudes(n));
        }
        Ok(Self { a, b })
    }

    /// Scales `(a, b)` to unit norm.
    pub fn normalized(a: Complex64, b: Complex64) -> Result<Self> {
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::UnnormalizedAmplitudes(n * n));
        }
        Ok(Self { a: a / n, b: b / n })
    }

    pub fn zero() -> Self {
        Self { a: ONE, b: ZERO }
    }

    pub fn one() -> Self {
        Self { a: ZERO, b: ONE }
    }

    pub fn plus() -> Self {
        Self { a: r(FRAC_1_SQRT_2), b: r(FRAC_1_SQRT_2) }
    }

    pub fn minus() -> Self {
        Self { a: r(FRAC_1_SQRT_2), b: r(-FRAC_1_SQRT_2) }
    }

    pub fn plus_i() -> Self {
        Self { a: r(FRAC_1_SQRT_2), b: c(0.0, FRAC_1_SQRT_2) }
    }

    pub fn minus_i() -> Self {
        Self { a: r(FRAC_1_SQRT_2), b: c(0.0, -FRAC_1_SQRT_2) }
    }

    /// `(|0⟩ + e^{iπ/4}|1⟩)/√2`.
    pub fn magic_t() -> Self {
        Self { a: r(FRAC_1_SQRT_2), b: Complex64::from_polar(FRAC_1_SQRT_2, PI / 4.0) }
    }

    /// One of [`Self::NAMES`].
    pub fn named(name: &str) -> Option<Self> {
        Some(match name {
            "0" => Self::zero(),
            "1" => Self::one(),
            "+" => Self::plus(),
            "-" => Self::minus(),
            "+i" => Self::plus_i(),
            "-i" => Self::minus_i(),
            "T" | "t" => Self::magic_t(),
            _ => return None,
        })
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    /// `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)` of `a|0⟩ + b|1⟩`.
    pub fn bloch(&self) -> [f64; 3] {
        let ab = self.a.conj() * self.b;
        [2.0 * ab.re, 2.0 * ab.im, self.a.norm_sqr() - self.b.norm_sqr()]
    }

    /// The single-qubit state `a|0⟩ + b|1⟩`.
    pub fn qubit_state(&self) -> StateVector {
        StateVector::from_amplitudes(vec![self.a, self.b]).expect("length 2")
    }

    /// Angles `(θ, φ)` in units of π with `Rz(φ)·Ry(θ)|0⟩ = a|0⟩ + b|1⟩`
    /// up to global phase.
    pub fn preparation_angles(&self) -> (f64, f64) {
        let theta = 2.0 * self.a.norm().clamp(0.0, 1.0).acos() / PI;
        let phi = if self.a.norm() < 1e-15 || self.b.norm() < 1e-15 {
            0.0
        } else {
            (self.b.arg() - self.a.arg()) / PI
        };
        (theta, phi)
    }

    /// `c_X X_L + c_Y Y_L + c_Z Z_L`, the extra stabilizer fixing the state
    /// inside the code space.
    pub fn fifth_stabilizer(&self) -> PauliCombination {
        let [x, y, z] = [logical_pauli(Pauli::X), logical_pauli(Pauli::Y), logical_pauli(Pauli::Z)];
        PauliCombination::bloch(self.bloch(), &x, &y, &z).expect("normalized amplitudes give a unit Bloch vector")
    }
}

/// Wire `j` of the chain carries code label `perm[j]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelabelingMap {
    wire_to_label: Vec<usize>,
}

impl RelabelingMap {
    pub fn new(wire_to_label: Vec<usize>) -> Result<Self> {
        let n = wire_to_label.len();
        let mut seen = vec![false; n];
        for &l in &wire_to_label {
            if l >= n || std::mem::replace(&mut seen[l], true) {
                return Err(Error::InvalidLayer { layer: 0, reason: format!("{wire_to_label:?} is not a permutation") });
            }
        }
        Ok(Self { wire_to_label })
    }

    /// `1'=1, 2'=5, 3'=2, 4'=4, 5'=3`.
    pub fn device() -> Self {
        Self { wire_to_label: vec![0, 4, 1, 3, 2] }
    }

    pub fn identity(n: usize) -> Self {
        Self { wire_to_label: (0..n).collect() }
    }

    pub fn label_of_wire(&self, wire: usize) -> usize {
        self.wire_to_label[wire]
    }

    pub fn wire_of_label(&self, label: usize) -> usize {
        self.wire_to_label.iter().position(|&l| l == label).expect("bijection")
    }

    /// `map[wire] = label`; moves wire-ordered data into label order.
    pub fn wire_to_label(&self) -> &[usize] {
        &self.wire_to_label
    }

    /// `map[label] = wire`; moves label-ordered data onto wires.
    pub fn label_to_wire(&self) -> Vec<usize> {
        (0..self.wire_to_label.len()).map(|l| self.wire_of_label(l)).collect()
    }

    /// A label-ordered Pauli string rewritten on wires.
    pub fn pauli_on_wires(&self, p: &PauliString) -> PauliString {
        p.permuted(&self.label_to_wire())
    }

    /// A circuit on labels rewritten on wires.
    pub fn circuit_on_wires(&self, circuit: &Circuit) -> Result<Circuit> {
        circuit.remapped(&self.label_to_wire())
    }

    /// The `2^n × 2^n` permutation taking label-ordered kets to wire order.
    pub fn permutation_matrix(&self) -> ComplexMatrix {
        let n = self.wire_to_label.len();
        let map = self.label_to_wire();
        let dim = 1 << n;
        let mut p = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            p[(crate::state::permute_index(i, n, &map), i)] = ONE;
        }
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncoderVariant {
    /// Minimal-CNOT encoder on labels, with long-range CNOTs.
    Reference,
    /// Wire-order encoder with six nearest-neighbour CNOTs and two SWAPs.
    NearestNeighbour,
    /// Eight nearest-neighbour CZs dressed with Y/Z rotations.
    Optimized,
}

impl EncoderVariant {
    pub const ALL: [EncoderVariant; 3] =
        [EncoderVariant::Reference, EncoderVariant::NearestNeighbour, EncoderVariant::Optimized];

    /// True when the circuit acts on wires rather than labels.
    pub fn on_wires(self) -> bool {
        !matches!(self, EncoderVariant::Reference)
    }
}

/// One entry of a per-wire gate sequence; `Cz` entries with equal tags on
/// two wires are the same gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum WireOp {
    Z(f64),
    Y(f64),
    H,
    S,
    Cz(char),
}

/// Turns per-wire sequences into a gate list in a valid temporal order:
/// each round flushes every wire up to its next CZ, then emits the ready
/// CZs in tag order.
pub(crate) fn weave(rows: &[Vec<WireOp>]) -> Result<Vec<Gate>> {
    let mut ptr = vec![0usize; rows.len()];
    let mut out = Vec::new();
    loop {
        let mut progressed = false;
        for (w, row) in rows.iter().enumerate() {
            while let Some(op) = row.get(ptr[w]) {
                let g = match *op {
                    WireOp::Z(a) => Gate::rz(w, a),
                    WireOp::Y(a) => Gate::ry(w, a),
                    WireOp::H => Gate::h(w),
                    WireOp::S => Gate::s(w),
                    WireOp::Cz(_) => break,
                };
                out.push(g);
                ptr[w] += 1;
                progressed = true;
            }
        }
        let mut heads: Vec<(char, usize)> = rows
            .iter()
            .enumerate()
            .filter_map(|(w, row)| match row.get(ptr[w]) {
                Some(WireOp::Cz(t)) => Some((*t, w)),
                _ => None,
            })
            .collect();
        heads.sort();
        for pair in heads.windows(2) {
            if pair[0].0 == pair[1].0 {
                out.push(Gate::cz(pair[0].1, pair[1].1));
                ptr[pair[0].1] += 1;
                ptr[pair[1].1] += 1;
                progressed = true;
            }
        }
        if ptr.iter().zip(rows).all(|(&p, row)| p == row.len()) {
            return Ok(out);
        }
        if !progressed {
            return Err(Error::Compile { stage: "weave", reason: "unmatched CZ tags".into() });
        }
    }
}

fn optimized_rows() -> Vec<Vec<WireOp>> {
    use WireOp::{Cz, Y, Z, H, S};
    vec![
        vec![Z(4. / 3.), Y(1.), Z(7. / 6.), Cz('a'), Z(7. / 6.), Y(0.5), Z(1.), Cz('e'), Z(1.), Y(0.5), Z(1.)],
        vec![
            H, Cz('A'), Z(5. / 6.), Y(1.), Z(7. / 6.), Cz('a'), Z(7. / 6.), Y(0.5), Z(1.), Cz('d'), Z(1.), Y(1.5),
            Z(0.75), Cz('e'), Z(0.75), Y(0.5), Z(0.75), Cz('f'), Z(0.75), Y(0.5), Z(1.),
        ],
        vec![
            H, Cz('A'), Z(1.25), Y(0.5), Z(1.), Cz('b'), Z(1.), Y(0.5), Z(1.25), Cz('c'), Z(0.25), Y(1.5), Cz('d'),
            Z(1.), Y(1.5), Z(0.75), Cz('f'), Z(0.75), Y(0.5), Z(1.5),
        ],
        vec![H, Cz('B'), Z(0.5), Y(0.5), Z(0.25), Cz('b'), Z(0.75), Y(0.5), Z(0.5), Cz('c'), Z(0.5), Y(1.5), Z(1.25)],
        vec![H, Cz('B'), S],
    ]
}

fn reference_gates() -> Vec<Gate> {
    vec![
        Gate::z(0),
        Gate::sdg(0),
        Gate::h(2),
        Gate::cnot(2, 4),
        Gate::h(3),
        Gate::cnot(3, 1),
        Gate::cnot(3, 4),
        Gate::h(1),
        Gate::sdg(4),
        Gate::cnot(1, 0),
        Gate::s(0),
        Gate::s(1),
        Gate::s(3),
        Gate::cnot(4, 0),
        Gate::h(4),
        Gate::cnot(4, 1),
        Gate::sdg(2),
        Gate::z(2),
    ]
}

fn nearest_neighbour_gates() -> Vec<Gate> {
    vec![
        Gate::s(0),
        Gate::h(2),
        Gate::cnot(2, 1),
        Gate::h(4),
        Gate::cnot(4, 3),
        Gate::cnot(2, 3),
        Gate::h(1),
        Gate::s(4),
        Gate::s(2),
        Gate::sdg(3),
        Gate::swap(2, 3),
        Gate::cnot(1, 0),
        Gate::s(0),
        Gate::s(1),
        Gate::swap(1, 2),
        Gate::cnot(1, 0),
        Gate::h(1),
        Gate::cnot(1, 2),
    ]
}

/// The encoder body acting on `(a|0⟩ + b|1⟩) ⊗ |0000⟩`, input on the
/// first qubit. Scheduled as soon as possible with one two-qubit gate per
/// layer.
pub fn build_encoder(variant: EncoderVariant) -> Circuit {
    let gates = match variant {
        EncoderVariant::Reference => reference_gates(),
        EncoderVariant::NearestNeighbour => nearest_neighbour_gates(),
        EncoderVariant::Optimized => weave(&optimized_rows()).expect("static rows are consistent"),
    };
    Circuit::from_gates(NUM_QUBITS, gates).expect("static gates are valid")
}

/// Two layers `Ry(θ)` then `Rz(φ)` on qubit 0 preparing `a|0⟩ + b|1⟩`.
pub fn preparation_layers(amps: &LogicalAmplitudes) -> Vec<Layer> {
    let (theta, phi) = amps.preparation_angles();
    vec![Layer::new(vec![Gate::ry(0, theta)]), Layer::new(vec![Gate::rz(0, phi)])]
}

/// Preparation followed by the encoder body, starting from `|00000⟩`.
pub fn build_prepared_encoder(variant: EncoderVariant, amps: &LogicalAmplitudes) -> Circuit {
    let mut c = Circuit::new(NUM_QUBITS);
    for l in preparation_layers(amps) {
        c.push_layer(l).expect("prep layers are valid");
    }
    c.extend(&build_encoder(variant)).expect("equal widths");
    c
}

/// The first column pair `U|0⟩|0000⟩, U|1⟩|0000⟩` of an encoder unitary,
/// as a `32 × 2` matrix.
pub fn encoder_isometry(circuit: &Circuit) -> ComplexMatrix {
    let n = circuit.num_qubits();
    let dim = 1 << n;
    let mut iso = ComplexMatrix::zeros(dim, 2);
    for (col, input) in [0usize, 1 << (n - 1)].into_iter().enumerate() {
        let mut psi = StateVector::basis(n, input);
        circuit.apply_to_state(&mut psi).expect("width matches");
        iso.set_column(col, psi.amplitudes());
    }
    iso
}

/// Inverse of the optimized body, pruned to the gates that can influence
/// wire 0 and rescheduled.
pub fn build_decoder() -> Circuit {
    let pruned = build_encoder(EncoderVariant::Optimized).inverse().prune_to_light_cone(&[0]);
    Circuit::from_gates(NUM_QUBITS, pruned.flatten()).expect("subset of a valid circuit")
}

/// Normalized `a|0_L⟩ + b|1_L⟩` in label order.
pub fn logical_state(amps: &LogicalAmplitudes) -> StateVector {
    let mut v = vec![ZERO; 1 << NUM_QUBITS];
    for (table, coeff) in [(&ZERO_L, amps.a), (&ONE_L, amps.b)] {
        for &(sign, ket) in table.iter() {
            let idx = usize::from_str_radix(ket, 2).expect("binary literal");
            v[idx] += coeff * (0.25 * sign as f64);
        }
    }
    StateVector::from_amplitudes(v).expect("32 amplitudes")
}

/// `σ⊗σ⊗σ⊗σ⊗σ`. With `Y = iXZ` per qubit, the `Y` string equals
/// `i·X_L·Z_L` on the code space.
pub fn logical_pauli(sigma: Pauli) -> PauliString {
    PauliString::uniform(NUM_QUBITS, sigma)
}

/// Noise parameters reordered from wire order to label order.
fn noise_on_labels(noise: Option<&NoiseParams>, map: &RelabelingMap) -> Option<NoiseParams> {
    noise.map(|n| n.reordered(&map.label_to_wire()))
}

/// Prepares and encodes `amps` with the given variant, decohering when
/// `noise` (wire order) is given. Returns the label-ordered state.
pub fn encode_with(variant: EncoderVariant, amps: &LogicalAmplitudes, noise: Option<&NoiseParams>) -> Result<DensityMatrix> {
    let circuit = build_prepared_encoder(variant, amps);
    let map = RelabelingMap::device();
    let mut rho = DensityMatrix::zero(NUM_QUBITS);
    if variant.on_wires() {
        evolve(&circuit, &mut rho, noise)?;
        rho.permute_qubits(map.wire_to_label())
    } else {
        evolve(&circuit, &mut rho, noise_on_labels(noise, &map).as_ref())?;
        Ok(rho)
    }
}

/// [`encode_with`] using the optimized encoder.
pub fn encode(amps: &LogicalAmplitudes, noise: Option<&NoiseParams>) -> Result<DensityMatrix> {
    encode_with(EncoderVariant::Optimized, amps, noise)
}

/// Runs the decoder on a label-ordered state and returns the reduced state
/// of the output qubit.
pub fn decode(rho: &DensityMatrix, noise: Option<&NoiseParams>) -> Result<DensityMatrix> {
    let map = RelabelingMap::device();
    let mut on_wires = rho.permute_qubits(&map.label_to_wire())?;
    evolve(&build_decoder(), &mut on_wires, noise)?;
    on_wires.partial_trace(&[0])
}

/// One transversal layer `σ` on every qubit, decohering for the layer's
/// duration when `noise` (wire order) is given.
pub fn apply_logical(rho: &DensityMatrix, sigma: Pauli, noise: Option<&NoiseParams>) -> Result<DensityMatrix> {
    let gates: Vec<Gate> = (0..NUM_QUBITS)
        .filter_map(|q| match sigma {
            Pauli::X => Some(Gate::x(q)),
            Pauli::Y => Some(Gate::y(q)),
            Pauli::Z => Some(Gate::z(q)),
            Pauli::I => None,
        })
        .collect();
    let circuit = Circuit::from_layers(NUM_QUBITS, vec![Layer::new(gates)])?;
    let mut out = rho.clone();
    evolve(&circuit, &mut out, noise_on_labels(noise, &RelabelingMap::device()).as_ref())?;
    Ok(out)
}

/// Applies perfect Pauli gates `(qubit, σ)`, at most two on distinct qubits.
pub fn inject_error(rho: &DensityMatrix, errors: &[(usize, Pauli)]) -> Result<DensityMatrix> {
    if errors.len() > 2 {
        return Err(Error::TooManyErrors(errors.len()));
    }
    if errors.len() == 2 && errors[0].0 == errors[1].0 {
        return Err(Error::DuplicateTargets(vec![errors[0].0, errors[1].0]));
    }
    let mut out = rho.clone();
    for &(q, p) in errors {
        if q >= rho.num_qubits() {
            return Err(Error::QubitOutOfRange { index: q, num_qubits: rho.num_qubits() });
        }
        out.apply_unitary_local(&p.matrix(), &[q]);
    }
    Ok(out)
}

/// Generators in label order.
pub fn stabilizers() -> StabilizerSet {
    StabilizerSet::standard()
}
