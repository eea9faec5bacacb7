use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::optimize::{check_target, run_restart, OptimizerConfig};
use super::snap::progressive_snap;
use super::template::{best_phase, distance, GateTemplate};
use crate::circuit::Circuit;
use crate::code::{build_encoder, encoder_isometry, EncoderVariant, RelabelingMap, NUM_QUBITS};
use crate::error::{Error, Result};
use crate::gate::{Gate, GateKind};
use crate::linalg::ComplexMatrix;

/// Merged angles closer than this to a multiple of `π/12` are rounded.
const MERGE_SNAP: f64 = 1e-9;
const CLIFFORD_MATCH: f64 = 1e-9;

/// `distance(e^{iφ}U, V)` at the best `φ`.
pub fn phase_aligned_distance(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    let phase = Complex64::from_polar(1.0, best_phase(u, v));
    distance(&u.scale(phase), v)
}

/// A swap-containing segment of the nearest-neighbour encoder and the
/// template that replaces it.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub name: &'static str,
    /// `wires[local] = global`.
    pub wires: Vec<usize>,
    /// Gates on local wires.
    pub gates: Vec<Gate>,
    pub template: GateTemplate,
}

impl Block {
    pub fn target(&self) -> ComplexMatrix {
        Circuit::from_gates(self.wires.len(), self.gates.clone()).expect("block gates are local").unitary()
    }
}

/// The nearest-neighbour encoder split into the pieces the compiler
/// rewrites. Replaying `prefix`, `commuting`, then each block on its wires
/// reproduces the encoder exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderSplit {
    pub prefix: Vec<Gate>,
    /// Single-qubit gates moved ahead of block (b); they act on other wires.
    pub commuting: Vec<Gate>,
    pub blocks: Vec<Block>,
}

impl EncoderSplit {
    pub fn standard() -> Self {
        let b = Block {
            name: "b",
            wires: vec![2, 3],
            gates: vec![Gate::cnot(0, 1), Gate::s(0), Gate::sdg(1), Gate::swap(0, 1)],
            template: GateTemplate::block_b(),
        };
        let a = Block {
            name: "a",
            wires: vec![0, 1, 2],
            gates: vec![
                Gate::cnot(1, 0),
                Gate::s(0),
                Gate::s(1),
                Gate::swap(1, 2),
                Gate::cnot(1, 0),
                Gate::h(1),
                Gate::cnot(1, 2),
            ],
            template: GateTemplate::block_a(),
        };
        Self {
            prefix: vec![Gate::s(0), Gate::h(2), Gate::cnot(2, 1), Gate::h(4), Gate::cnot(4, 3)],
            commuting: vec![Gate::h(1), Gate::s(4)],
            blocks: vec![b, a],
        }
    }

    /// The split reassembled with the blocks' original gates.
    pub fn reassembled(&self) -> Result<Circuit> {
        let mut gates = self.prefix.clone();
        gates.extend(self.commuting.iter().cloned());
        for block in &self.blocks {
            gates.extend(block.gates.iter().map(|g| g.remapped(&block.wires)));
        }
        Circuit::from_gates(NUM_QUBITS, gates)
    }
}

/// `CNOT(c→t) = H(t)·CZ(c,t)·H(t)`; other gates pass through. SWAPs are
/// rejected.
pub fn to_cz_basis(gates: &[Gate]) -> Result<Vec<Gate>> {
    let mut out = Vec::with_capacity(gates.len());
    for g in gates {
        match g.kind {
            GateKind::Cnot => {
                let (c, t) = (g.targets[0], g.targets[1]);
                out.extend([Gate::h(t), Gate::cz(c, t), Gate::h(t)]);
            }
            GateKind::Swap => {
                return Err(Error::Compile { stage: "cz-basis", reason: "swap left outside a block".into() });
            }
            _ => out.push(g.clone()),
        }
    }
    Ok(out)
}

fn up_to_phase(a: &ComplexMatrix, b: &ComplexMatrix) -> bool {
    let overlap: Complex64 = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x.conj() * y).sum();
    (overlap.norm() - 2.0).abs() < CLIFFORD_MATCH
}

/// In units of π, reduced to `[0, 2)` and rounded to a multiple of 1/12
/// when within [`MERGE_SNAP`].
fn tidy_angle(x: f64) -> f64 {
    let mut a = x.rem_euclid(2.0);
    let k = (a * 12.0).round();
    if (a * 12.0 - k).abs() < MERGE_SNAP * 12.0 {
        a = (k / 12.0).rem_euclid(2.0);
    }
    a
}

/// Gates equal to `m` up to phase: nothing for the identity, a named
/// Clifford when one matches, otherwise `Rz(γ), Ry(β), Rz(α)` with zero
/// angles dropped.
pub fn synthesize_single(q: usize, m: &ComplexMatrix) -> Vec<Gate> {
    if up_to_phase(&ComplexMatrix::identity(2), m) {
        return Vec::new();
    }
    for g in [Gate::h(q), Gate::s(q), Gate::sdg(q), Gate::x(q), Gate::y(q), Gate::z(q)] {
        if up_to_phase(&g.matrix(), m) {
            return vec![g];
        }
    }
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let v = m.scale(Complex64::from_polar(1.0, -det.arg() / 2.0));
    let (c, s) = (v[(0, 0)].norm(), v[(1, 0)].norm());
    let beta = 2.0 * s.atan2(c);
    let (alpha, gamma) = if s < 1e-12 {
        (2.0 * v[(1, 1)].arg(), 0.0)
    } else if c < 1e-12 {
        (2.0 * v[(1, 0)].arg(), 0.0)
    } else {
        let sum = 2.0 * v[(1, 1)].arg();
        let diff = 2.0 * v[(1, 0)].arg();
        ((sum + diff) / 2.0, (sum - diff) / 2.0)
    };
    [Gate::rz(q, gamma / PI), Gate::ry(q, beta / PI), Gate::rz(q, alpha / PI)]
        .into_iter()
        .map(|mut g| {
            g.angle = tidy_angle(g.angle);
            g
        })
        .filter(|g| g.angle != 0.0)
        .collect()
}

/// Fuses every maximal run of single-qubit gates on a wire into the
/// shortest equivalent from [`synthesize_single`]. Two-qubit gates are
/// kept in order.
pub fn merge_single_qubit_runs(num_qubits: usize, gates: &[Gate]) -> Vec<Gate> {
    let mut pending: Vec<Option<ComplexMatrix>> = vec![None; num_qubits];
    let mut out = Vec::new();
    let flush = |q: usize, pending: &mut Vec<Option<ComplexMatrix>>, out: &mut Vec<Gate>| {
        if let Some(m) = pending[q].take() {
            out.extend(synthesize_single(q, &m));
        }
    };
    for g in gates {
        if g.is_two_qubit() {
            for &q in &g.targets {
                flush(q, &mut pending, &mut out);
            }
            out.push(g.clone());
        } else {
            let q = g.targets[0];
            let m = g.matrix();
            pending[q] = Some(match pending[q].take() {
                Some(acc) => m.matmul(&acc),
                None => m,
            });
        }
    }
    for q in 0..num_qubits {
        flush(q, &mut pending, &mut out);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub name: String,
    pub wires: Vec<usize>,
    pub num_params: usize,
    /// Restart whose optimum snapped successfully.
    pub restart: usize,
    pub optimized_distance: f64,
    pub snapped_distance: f64,
    /// Snapped parameters, radians; the last is the global phase.
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompileReport {
    pub circuit: Circuit,
    pub blocks: Vec<BlockReport>,
    /// Two-qubit gates of the intermediate nearest-neighbour stage, SWAPs
    /// excluded.
    pub stage_nearest_neighbour_gates: usize,
    pub stage_swaps: usize,
    /// Phase-aligned distance between the compiled and the
    /// nearest-neighbour encoder unitaries.
    pub final_distance: f64,
    /// Phase-aligned distance between the compiled isometry and the
    /// relabeled reference encoder's isometry.
    pub reference_isometry_distance: f64,
    /// Phase-aligned distance to the transcribed optimized encoder.
    pub transcribed_distance: f64,
    pub cz_count: usize,
    pub single_qubit_count: usize,
    pub depth: usize,
}

/// Optimizes and snaps one block. Restarts run in order; the first whose
/// optimum both meets the threshold and snaps within tolerance is kept.
pub fn compile_block(block: &Block, config: &OptimizerConfig, seed: u64) -> Result<(BlockReport, Circuit)> {
    config.validate()?;
    let target = block.target();
    check_target(&target, &block.template)?;
    let mut best = f64::INFINITY;
    let mut last_snap_error = None;
    for r in 0..config.max_restarts {
        let res = run_restart(&target, &block.template, config, seed, r);
        best = best.min(res.value);
        if res.value >= config.threshold {
            continue;
        }
        match progressive_snap(&block.template, &target, &res.x, &config.denominators, config.snap_tolerance) {
            Ok(theta) => {
                let snapped_distance = distance(&block.template.unitary(&theta)?, &target)?;
                let local = block.template.to_circuit(&theta)?;
                let report = BlockReport {
                    name: block.name.to_string(),
                    wires: block.wires.clone(),
                    num_params: block.template.num_params(),
                    restart: r,
                    optimized_distance: res.value,
                    snapped_distance,
                    theta,
                };
                return Ok((report, local));
            }
            Err(e) => last_snap_error = Some(e),
        }
    }
    Err(last_snap_error.unwrap_or(Error::OptimizerExhausted {
        best,
        threshold: config.threshold,
        restarts: config.max_restarts,
    }))
}

/// Runs the full pipeline: relabeled reference, nearest-neighbour stage,
/// block replacement, snapping, CZ conversion and single-qubit merging.
/// Block `k` uses seed `seed + k`.
pub fn compile_encoder(config: &OptimizerConfig, seed: u64) -> Result<CompileReport> {
    let relabel = RelabelingMap::device();
    let reference = relabel.circuit_on_wires(&build_encoder(EncoderVariant::Reference))?;
    let stage = build_encoder(EncoderVariant::NearestNeighbour);
    let stage_swaps = stage.count_kind(GateKind::Swap);
    let stage_nearest_neighbour_gates = stage
        .gates()
        .filter(|g| g.is_two_qubit() && g.kind != GateKind::Swap && g.targets[0].abs_diff(g.targets[1]) == 1)
        .count();

    let check = |stage: &'static str, d: f64, tol: f64| -> Result<()> {
        if d > tol {
            return Err(Error::Compile { stage, reason: format!("distance {d:.3e} exceeds {tol:.1e}") });
        }
        Ok(())
    };
    let iso_ref = encoder_isometry(&reference);
    check("nearest-neighbour", phase_aligned_distance(&encoder_isometry(&stage), &iso_ref)?, config.snap_tolerance)?;

    let split = EncoderSplit::standard();
    let stage_u = stage.unitary();
    check("split", phase_aligned_distance(&split.reassembled()?.unitary(), &stage_u)?, config.snap_tolerance)?;

    let mut gates = to_cz_basis(&split.prefix)?;
    gates.extend(split.commuting.iter().cloned());
    let mut blocks = Vec::new();
    for (k, block) in split.blocks.iter().enumerate() {
        let (report, local) = compile_block(block, config, seed.wrapping_add(k as u64))?;
        gates.extend(local.flatten().iter().map(|g| g.remapped(&block.wires)));
        blocks.push(report);
    }
    let merged = merge_single_qubit_runs(NUM_QUBITS, &gates);
    let circuit = Circuit::from_gates(NUM_QUBITS, merged)?;

    let u = circuit.unitary();
    let final_distance = phase_aligned_distance(&u, &stage_u)?;
    check("final", final_distance, config.snap_tolerance)?;
    let reference_isometry_distance = phase_aligned_distance(&encoder_isometry(&circuit), &iso_ref)?;
    check("reference", reference_isometry_distance, config.snap_tolerance)?;
    let transcribed_distance = phase_aligned_distance(&u, &build_encoder(EncoderVariant::Optimized).unitary())?;

    Ok(CompileReport {
        cz_count: circuit.count_kind(GateKind::Cz),
        single_qubit_count: circuit.single_qubit_count(),
        depth: circuit.depth(),
        circuit,
        blocks,
        stage_nearest_neighbour_gates,
        stage_swaps,
        final_distance,
        reference_isometry_distance,
        transcribed_distance,
    })
}
