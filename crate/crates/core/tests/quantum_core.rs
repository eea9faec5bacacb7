use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use perfect_code::circuit::{Circuit, Layer};
use perfect_code::code::{build_encoder, EncoderVariant, RelabelingMap};
use perfect_code::error::Error;
use perfect_code::gate::{Gate, GateKind};
use perfect_code::linalg::{c, r, ComplexMatrix, ONE, ZERO};
use perfect_code::state::{state_fidelity, DensityMatrix, StateVector};
use proptest::prelude::*;

fn amplitude_damping(gamma: f64) -> Vec<ComplexMatrix> {
    vec![
        ComplexMatrix::diagonal(&[ONE, r((1.0 - gamma).sqrt())]),
        ComplexMatrix::from_rows(&[&[ZERO, r(gamma.sqrt())], &[ZERO, ZERO]]),
    ]
}

fn amplitudes(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
        .prop_filter("nonzero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(|v| v.into_iter().map(|(a, b)| c(a, b)).collect())
}

fn random_state(n: usize) -> impl Strategy<Value = StateVector> {
    amplitudes(n).prop_map(|v| StateVector::from_amplitudes(v).unwrap().normalized())
}

/// A mixture of two random pure states.
fn random_density(n: usize) -> impl Strategy<Value = DensityMatrix> {
    (random_state(n), random_state(n), 0.0f64..1.0).prop_map(|(a, b, p)| {
        let m = &a.to_density().matrix().scale(r(p)) + &b.to_density().matrix().scale(r(1.0 - p));
        DensityMatrix::from_matrix(m).unwrap()
    })
}

fn gate_strategy(n: usize) -> impl Strategy<Value = Gate> {
    let kinds = [
        GateKind::RotX,
        GateKind::RotY,
        GateKind::RotZ,
        GateKind::H,
        GateKind::S,
        GateKind::Sdg,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::Cz,
        GateKind::Cnot,
        GateKind::Swap,
    ];
    (prop::sample::select(kinds.to_vec()), 0..n, 1..n, -2.0f64..2.0).prop_map(move |(kind, a, off, angle)| {
        let b = (a + off) % n;
        let targets = if kind.arity() == 2 { vec![a, b] } else { vec![a] };
        Gate::new(kind, targets, if kind.has_angle() { angle } else { 0.0 }).unwrap()
    })
}

#[test]
fn hadamard_on_zero_gives_plus() {
    let mut psi = StateVector::zero(1);
    psi.apply_gate(&Gate::h(0)).unwrap();
    let a = psi.amplitudes();
    assert!((a[0] - r(FRAC_1_SQRT_2)).norm() < 1e-12);
    assert!((a[1] - r(FRAC_1_SQRT_2)).norm() < 1e-12);
}

#[test]
fn cz_flips_sign_of_eleven() {
    let mut psi = StateVector::basis(2, 3);
    psi.apply_gate(&Gate::cz(0, 1)).unwrap();
    assert!((psi.amplitudes()[3] + ONE).norm() < 1e-12);
}

#[test]
fn zyz_sequence_matches_hand_multiplied_matrices() {
    let half = PI / 4.0;
    let rz = [[c(half.cos(), -half.sin()), ZERO], [ZERO, c(half.cos(), half.sin())]];
    let ry = [[r(half.cos()), r(-half.sin())], [r(half.sin()), r(half.cos())]];
    let mul = |a: [[Complex64; 2]; 2], v: [Complex64; 2]| [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]];
    let expected = mul(rz, mul(ry, mul(rz, [ONE, ZERO])));

    let mut psi = StateVector::zero(1);
    for g in [Gate::rz(0, 0.5), Gate::ry(0, 0.5), Gate::rz(0, 0.5)] {
        psi.apply_gate(&g).unwrap();
    }
    for (a, b) in psi.amplitudes().iter().zip(expected) {
        assert!((a - b).norm() < 1e-12);
    }
}

#[test]
fn gates_reject_bad_targets() {
    let mut psi = StateVector::zero(2);
    assert!(matches!(psi.apply_gate(&Gate::h(2)), Err(Error::QubitOutOfRange { .. })));
    assert!(Gate::new(GateKind::Cz, vec![1, 1], 0.0).is_err());
    assert!(Gate::new(GateKind::RotZ, vec![0], f64::NAN).is_err());
}

#[test]
fn identity_channel_leaves_state_alone() {
    let mut rho = DensityMatrix::maximally_mixed(2);
    rho.apply_gate(&Gate::ry(0, 0.3)).unwrap();
    let before = rho.clone();
    rho.apply_channel(&[ComplexMatrix::identity(2)], 1).unwrap();
    assert!(rho.matrix().max_abs_diff(before.matrix()) < 1e-15);
}

#[test]
fn full_amplitude_damping_resets_to_ground() {
    let mut rho = DensityMatrix::zero(1);
    rho.apply_gate(&Gate::rx(0, 0.7)).unwrap();
    rho.apply_channel(&amplitude_damping(1.0), 0).unwrap();
    assert!(rho.matrix().max_abs_diff(DensityMatrix::zero(1).matrix()) < 1e-12);
}

#[test]
fn half_damping_of_excited_state() {
    let mut rho = StateVector::basis(1, 1).to_density();
    rho.apply_channel(&amplitude_damping(0.5), 0).unwrap();
    let want = ComplexMatrix::diagonal(&[r(0.5), r(0.5)]);
    assert!(rho.matrix().max_abs_diff(&want) < 1e-12);
}

#[test]
fn non_trace_preserving_kraus_is_rejected() {
    let mut rho = DensityMatrix::zero(1);
    let bad = vec![ComplexMatrix::diagonal(&[ONE, r(0.5)])];
    assert!(matches!(rho.apply_channel(&bad, 0), Err(Error::NotTracePreserving { .. })));
}

#[test]
fn partial_trace_examples() {
    let rho = DensityMatrix::zero(2);
    let kept = rho.partial_trace(&[0]).unwrap();
    assert!(kept.matrix().max_abs_diff(DensityMatrix::zero(1).matrix()) < 1e-15);

    let mut bell = StateVector::zero(2);
    bell.apply_gate(&Gate::h(0)).unwrap();
    bell.apply_gate(&Gate::cnot(0, 1)).unwrap();
    let marginal = bell.to_density().partial_trace(&[0]).unwrap();
    assert!(marginal.matrix().max_abs_diff(DensityMatrix::maximally_mixed(1).matrix()) < 1e-12);

    assert!(matches!(rho.partial_trace(&[]), Err(Error::EmptyKeepSet)));
}

#[test]
fn fidelity_examples() {
    let zero = DensityMatrix::zero(1);
    assert!((state_fidelity(&zero, &StateVector::zero(1)).unwrap() - 1.0).abs() < 1e-15);
    assert!(state_fidelity(&zero, &StateVector::basis(1, 1)).unwrap().abs() < 1e-15);
    let mut plus = StateVector::zero(1);
    plus.apply_gate(&Gate::h(0)).unwrap();
    let f = state_fidelity(&DensityMatrix::maximally_mixed(1), &plus).unwrap();
    assert!((f - 0.5).abs() < 1e-12);
    assert!(state_fidelity(&zero, &StateVector::zero(2)).is_err());
}

#[test]
fn circuit_unitary_examples() {
    let empty = Circuit::new(3);
    assert!(empty.unitary().max_abs_diff(&ComplexMatrix::identity(8)) < 1e-15);
    let cz = Circuit::from_gates(2, [Gate::cz(0, 1)]).unwrap();
    assert!(cz.unitary().max_abs_diff(&ComplexMatrix::diagonal(&[ONE, ONE, ONE, -ONE])) < 1e-15);
}

#[test]
fn nearest_neighbour_unitary_matches_relabeled_reference_on_inputs() {
    // The two constructions differ on the ancilla-nonzero inputs, so compare
    // the columns reached from |ψ⟩|0000⟩.
    let relabel = RelabelingMap::device();
    let reference = relabel.circuit_on_wires(&build_encoder(EncoderVariant::Reference)).unwrap().unitary();
    let nn = build_encoder(EncoderVariant::NearestNeighbour).unitary();
    let cols = |u: &ComplexMatrix| {
        let mut m = ComplexMatrix::zeros(32, 2);
        m.set_column(0, &u.column(0));
        m.set_column(1, &u.column(16));
        m
    };
    assert!(cols(&reference).phase_insensitive_diff(&cols(&nn)) < 1e-9);
}

#[test]
fn layers_forbid_overlap_and_double_entanglers() {
    let overlap = Layer::new(vec![Gate::h(0), Gate::x(0)]);
    assert!(Circuit::from_layers(2, vec![overlap]).is_err());
    let two = Layer::new(vec![Gate::cz(0, 1), Gate::cz(2, 3)]);
    assert!(Circuit::from_layers(4, vec![two]).is_err());
}

#[test]
fn scheduler_serializes_two_qubit_gates() {
    let c = Circuit::from_gates(4, [Gate::cz(0, 1), Gate::cz(2, 3), Gate::h(0), Gate::h(3)]).unwrap();
    assert_eq!(c.depth(), 3);
    for layer in c.layers() {
        assert!(layer.gates.iter().filter(|g| g.is_two_qubit()).count() <= 1);
    }
}

#[test]
fn serialization_round_trips_bit_exactly() {
    let c = build_encoder(EncoderVariant::Optimized);
    let back = Circuit::from_text(&c.to_text()).unwrap();
    assert_eq!(back, c);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_gate_is_unitary(g in gate_strategy(3)) {
        prop_assert!(g.matrix().is_unitary(1e-12));
    }

    #[test]
    fn gates_and_channels_preserve_trace_and_purity_bound(
        rho in random_density(3),
        gates in prop::collection::vec(gate_strategy(3), 1..12),
        gamma in 0.0f64..1.0,
        q in 0usize..3,
    ) {
        let mut rho = rho;
        for g in &gates {
            rho.apply_gate(g).unwrap();
        }
        rho.apply_channel(&amplitude_damping(gamma), q).unwrap();
        prop_assert!((rho.trace() - ONE).norm() < 1e-10);
        prop_assert!(rho.purity() <= 1.0 + 1e-10);
        prop_assert!(rho.matrix().hermiticity_deviation() < 1e-10);
    }

    #[test]
    fn unitaries_keep_vectors_normalized(psi in random_state(4), gates in prop::collection::vec(gate_strategy(4), 1..20)) {
        let mut psi = psi;
        for g in &gates {
            psi.apply_gate(g).unwrap();
        }
        prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn composition_multiplies_on_the_left(
        a in prop::collection::vec(gate_strategy(3), 0..8),
        b in prop::collection::vec(gate_strategy(3), 0..8),
    ) {
        let ca = Circuit::from_gates(3, a.clone()).unwrap();
        let cb = Circuit::from_gates(3, b.clone()).unwrap();
        let cab = Circuit::from_gates(3, a.into_iter().chain(b)).unwrap();
        let want = cb.unitary().matmul(&ca.unitary());
        prop_assert!(cab.unitary().max_abs_diff(&want) < 1e-10);
    }

    #[test]
    fn partial_trace_keeps_unit_trace(rho in random_density(3), keep in prop::sample::subsequence(vec![0usize, 1, 2], 1..3)) {
        let reduced = rho.partial_trace(&keep).unwrap();
        prop_assert_eq!(reduced.num_qubits(), keep.len());
        prop_assert!((reduced.trace() - ONE).norm() < 1e-12);
    }

    #[test]
    fn inverse_circuit_undoes_circuit(gates in prop::collection::vec(gate_strategy(3), 0..10)) {
        let c = Circuit::from_gates(3, gates).unwrap();
        let prod = c.inverse().unitary().matmul(&c.unitary());
        prop_assert!(prod.max_abs_diff(&ComplexMatrix::identity(8)) < 1e-10);
    }
}
