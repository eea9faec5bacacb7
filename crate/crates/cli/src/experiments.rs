//! The experiments behind each subcommand. Every function is pure in its
//! config: the same config yields the same record, bit for bit.

use perfect_code::code::{apply_logical, decode, encode, inject_error, logical_state, stabilizers, LogicalAmplitudes, NUM_QUBITS};
use perfect_code::linalg::ComplexMatrix;
use perfect_code::pauli::{Pauli, PauliString, Phase};
use perfect_code::readout::rng_from_seed;
use perfect_code::stabilizer::Syndrome;
use perfect_code::recompiler::compile_encoder;
use perfect_code::state::{state_fidelity, DensityMatrix};
use perfect_code::tomography::{
    fidelity_from_terms, process_fidelity, project_code_space, qpt, qpt_from_pairs, qst_single_qubit,
    sampled_project_code_space, sampled_stabilizer_expectations, stabilizer_expectations, standard_qpt_inputs,
    ChiMatrix, CodeSpaceProjection, SingleQubitData,
};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::record::ResultRecord;

/// File the compiled circuit is written to, inside the output directory.
pub const COMPILED_CIRCUIT_FILE: &str = "compiled_encoder.txt";

/// Input labels of the four-state process tomography, in input order.
pub const QPT_LABELS: [&str; 4] = ["0", "1", "+", "+i"];

// Each experiment draws from its own stream so records stay independent.
const STREAM_PREPARE: u64 = 0;
const STREAM_QPT: u64 = 16;
const STREAM_DECODE: u64 = 32;

fn rng(cfg: &ExperimentConfig, stream: u64) -> ChaCha8Rng {
    let mut r = rng_from_seed(cfg.seed);
    r.set_stream(stream);
    r
}

fn named_state(name: &str) -> Result<(usize, LogicalAmplitudes)> {
    let idx = LogicalAmplitudes::NAMES
        .iter()
        .position(|n| *n == name)
        .ok_or_else(|| Error::Config(format!("unknown state {name:?}; expected one of {:?}", LogicalAmplitudes::NAMES)))?;
    Ok((idx, LogicalAmplitudes::named(name).expect("listed name")))
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    let rows = 0..m.rows();
    let re: Vec<Vec<f64>> = rows.clone().map(|i| m.row(i).iter().map(|z| z.re).collect()).collect();
    let im: Vec<Vec<f64>> = rows.map(|i| m.row(i).iter().map(|z| z.im).collect()).collect();
    json!({ "re": re, "im": im })
}

/// Code-space projection, exact or sampled per the config, with the
/// standard error of `P_I` when sampled.
fn projection(rho: &DensityMatrix, cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<(CodeSpaceProjection, Option<f64>)> {
    if cfg.sampled {
        let readout = cfg.code_readout()?;
        let (p, errors) = sampled_project_code_space(rho, cfg.shots, readout.as_ref(), rng)?;
        Ok((p, Some(errors[0])))
    } else {
        Ok((project_code_space(rho)?, None))
    }
}

/// Encodes `state`, then reports the 31 stabilizer-group expectations, the
/// raw fidelity, the code-space fidelity `F_L` and `P_I`.
pub fn prepare(state: &str, cfg: &ExperimentConfig) -> Result<ResultRecord> {
    let (idx, amps) = named_state(state)?;
    let noise = cfg.noise()?;
    let rho = encode(&amps, noise.as_ref())?;
    let mut rng = rng(cfg, STREAM_PREPARE + idx as u64);

    let terms = if cfg.sampled {
        let readout = cfg.code_readout()?;
        sampled_stabilizer_expectations(&rho, &amps, cfg.shots, readout.as_ref(), &mut rng)?
    } else {
        stabilizer_expectations(&rho, &amps)?.into_iter().map(|e| (e, 0.0)).collect()
    };
    let fidelity = fidelity_from_terms(&terms);
    let (proj, p_i_err) = projection(&rho, cfg, &mut rng)?;
    let unc = |s: f64| cfg.sampled.then_some(s);

    let mut rec = ResultRecord::new("prepare", state, cfg);
    rec.push("fidelity", fidelity.value, unc(fidelity.std_error));
    rec.push("logical_fidelity", proj.fidelity(&amps), None);
    rec.push("p_i", proj.p_i, p_i_err);
    for (e, s) in terms.iter().filter(|(e, _)| e.mask.count_ones() == 1 && e.mask < 16) {
        rec.push(&format!("g{}", e.mask.trailing_zeros() + 1), e.value, unc(*s));
    }
    rec.data = json!({
        "state": state,
        "target_bloch": amps.bloch(),
        "expectations": terms.iter().map(|(e, s)| json!({
            "mask": e.mask,
            "label": e.label,
            "value": e.value,
            "uncertainty": unc(*s),
        })).collect::<Vec<_>>(),
        "logical_bloch": proj.bloch,
        "rho_l": matrix_json(&proj.rho_l),
    });
    Ok(rec)
}

/// All errors of the given weight as `(label, positions)`, labels 1-based.
/// A labelled error and the `(qubit, Pauli)` pairs it applies.
type PlacedError = (String, Vec<(usize, Pauli)>);

fn errors_of_weight(weight: usize) -> Result<Vec<PlacedError>> {
    let mut out = Vec::new();
    match weight {
        1 => {
            for q in 0..NUM_QUBITS {
                for p in Pauli::NONTRIVIAL {
                    out.push((format!("{}{}", p.symbol(), q + 1), vec![(q, p)]));
                }
            }
        }
        2 => {
            for a in 0..NUM_QUBITS {
                for b in a + 1..NUM_QUBITS {
                    for pa in Pauli::NONTRIVIAL {
                        for pb in Pauli::NONTRIVIAL {
                            out.push((format!("{}{}{}{}", pa.symbol(), a + 1, pb.symbol(), b + 1), vec![(a, pa), (b, pb)]));
                        }
                    }
                }
            }
        }
        w => return Err(Error::Config(format!("error weight must be 1 or 2, got {w}"))),
    }
    Ok(out)
}

/// Injects every error of `weight` into an ideally encoded `|T⟩_L` and
/// records the four generator expectations next to the sign pattern the
/// commutation rules predict.
pub fn syndrome_grid(weight: usize, cfg: &ExperimentConfig) -> Result<ResultRecord> {
    let errors = errors_of_weight(weight)?;
    let gens = stabilizers();
    let t = encode(&LogicalAmplitudes::magic_t(), None)?;
    let measure = |rho: &DensityMatrix| -> Result<Vec<f64>> {
        gens.generators().iter().map(|g| Ok(g.expectation(rho)?)).collect()
    };
    let reference = measure(&t)?;

    let mut rows = Vec::with_capacity(errors.len());
    let mut deviation: f64 = 0.0;
    let mut detected = 0;
    let mut distinct = std::collections::BTreeSet::new();
    for (label, positions) in &errors {
        let values = measure(&inject_error(&t, positions)?)?;
        let mut letters = vec![Pauli::I; NUM_QUBITS];
        for &(q, p) in positions {
            letters[q] = p;
        }
        let predicted = gens.syndrome_of(&PauliString::new(Phase::PLUS_ONE, letters))?;
        for (v, s) in values.iter().zip(predicted.signs()) {
            deviation = deviation.max((v - *s as f64).abs());
        }
        if values.iter().any(|v| *v < 0.0) {
            detected += 1;
        }
        distinct.insert(Syndrome::from_expectations(&values));
        rows.push(json!({ "error": label, "values": values, "predicted": predicted.signs() }));
    }

    let mut rec = ResultRecord::new("syndrome-grid", &format!("w{weight}"), cfg);
    rec.push("rows", rows.len() as f64, None);
    rec.push("detected_rows", detected as f64, None);
    rec.push("distinct_syndromes", distinct.len() as f64, None);
    rec.push("max_deviation", deviation, None);
    rec.data = json!({
        "weight": weight,
        "encoding": "ideal",
        "generators": gens.generators().iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        "no_error": reference,
        "rows": rows,
    });
    Ok(rec)
}

fn parse_gate(gate: &str) -> Result<Pauli> {
    match gate.trim_end_matches(['L', 'l', '_']) {
        "X" | "x" => Ok(Pauli::X),
        "Y" | "y" => Ok(Pauli::Y),
        "Z" | "z" => Ok(Pauli::Z),
        _ => Err(Error::Config(format!("unknown logical gate {gate:?}; expected X, Y or Z"))),
    }
}

/// Process tomography of a transversal logical Pauli inside the code
/// space. `process_fidelity` uses the nominal inputs, so preparation error
/// is included; `gate_process_fidelity` uses the measured input states and
/// isolates the gate layer.
pub fn logical_qpt(gate: &str, cfg: &ExperimentConfig) -> Result<ResultRecord> {
    let sigma = parse_gate(gate)?;
    let noise = cfg.noise()?;
    let stream = STREAM_QPT + Pauli::NONTRIVIAL.iter().position(|p| *p == sigma).expect("nontrivial") as u64;
    let mut rng = rng(cfg, stream);

    let mut ins = Vec::new();
    let mut outs = Vec::new();
    let mut p_i = Vec::new();
    for amps in standard_qpt_inputs() {
        let rho = encode(&amps, noise.as_ref())?;
        let (before, _) = projection(&rho, cfg, &mut rng)?;
        let (after, _) = projection(&apply_logical(&rho, sigma, noise.as_ref())?, cfg, &mut rng)?;
        p_i.push(after.p_i);
        ins.push(before);
        outs.push(after);
    }
    let out_rho: Vec<ComplexMatrix> = outs.iter().map(|p| p.rho_l.clone()).collect();
    let in_rho: Vec<ComplexMatrix> = ins.iter().map(|p| p.rho_l.clone()).collect();
    let chi = qpt(&out_rho.clone().try_into().expect("four outputs"))?;
    let gate_chi = qpt_from_pairs(&in_rho, &out_rho)?;
    let ideal = ChiMatrix::pauli(sigma);

    let mut rec = ResultRecord::new("logical-qpt", &sigma.symbol().to_string(), cfg);
    rec.push("process_fidelity", process_fidelity(&chi, &ideal), None);
    rec.push("gate_process_fidelity", process_fidelity(&gate_chi, &ideal), None);
    rec.push("mean_p_i", p_i.iter().sum::<f64>() / p_i.len() as f64, None);
    rec.data = json!({
        "gate": format!("{}_L", sigma.symbol()),
        "chi_basis": ["I", "X", "-iY", "Z"],
        "chi": matrix_json(&chi.matrix),
        "chi_ideal": matrix_json(&ideal.matrix),
        "inputs": QPT_LABELS.iter().zip(ins.iter().zip(&outs)).map(|(l, (a, b))| json!({
            "input": l,
            "bloch_in": a.bloch,
            "bloch_out": b.bloch,
            "p_i_out": b.p_i,
        })).collect::<Vec<_>>(),
    });
    Ok(rec)
}

/// Encode then decode the four tomography inputs; per-state fidelities and
/// the process fidelity against the identity.
pub fn decode_experiment(cfg: &ExperimentConfig) -> Result<ResultRecord> {
    let noise = cfg.noise()?;
    let readout = cfg.output_readout()?;
    let mut rng = rng(cfg, STREAM_DECODE);
    let mut outs = Vec::new();
    let mut fids = Vec::new();
    for amps in standard_qpt_inputs() {
        let out = decode(&encode(&amps, noise.as_ref())?, noise.as_ref())?;
        let out = if cfg.sampled {
            qst_single_qubit(&SingleQubitData::sampled(&out, cfg.shots, readout.as_ref(), &mut rng)?)?
        } else {
            out
        };
        fids.push(state_fidelity(&out, &amps.qubit_state())?);
        outs.push(out.into_matrix());
    }
    let chi = qpt(&outs.clone().try_into().expect("four outputs"))?;

    let mut rec = ResultRecord::new("decode", "", cfg);
    for (label, f) in QPT_LABELS.iter().zip(&fids) {
        rec.push(&format!("fidelity_{label}"), *f, None);
    }
    rec.push("average_fidelity", fids.iter().sum::<f64>() / fids.len() as f64, None);
    rec.push("process_fidelity", process_fidelity(&chi, &ChiMatrix::identity()), None);
    rec.data = json!({
        "chi_basis": ["I", "X", "-iY", "Z"],
        "chi": matrix_json(&chi.matrix),
        "outputs": QPT_LABELS.iter().zip(&outs).map(|(l, m)| json!({ "input": l, "rho": matrix_json(m) })).collect::<Vec<_>>(),
    });
    Ok(rec)
}

/// Runs the recompiler. Returns the record and the circuit text, which the
/// caller writes to [`COMPILED_CIRCUIT_FILE`].
pub fn compile(cfg: &ExperimentConfig) -> Result<(ResultRecord, String)> {
    let report = compile_encoder(&cfg.optimizer, cfg.seed)?;
    let text = report.circuit.to_text();
    let mut rec = ResultRecord::new("compile", "", cfg);
    rec.push("final_distance", report.final_distance, None);
    rec.push("reference_isometry_distance", report.reference_isometry_distance, None);
    rec.push("transcribed_distance", report.transcribed_distance, None);
    rec.push("cz_count", report.cz_count as f64, None);
    rec.push("single_qubit_count", report.single_qubit_count as f64, None);
    rec.push("depth", report.depth as f64, None);
    for b in &report.blocks {
        rec.push(&format!("block_{}_optimized_distance", b.name), b.optimized_distance, None);
        rec.push(&format!("block_{}_snapped_distance", b.name), b.snapped_distance, None);
    }
    rec.data = json!({
        "circuit_file": COMPILED_CIRCUIT_FILE,
        "circuit": text,
        "blocks": report.blocks,
        "stage_nearest_neighbour_gates": report.stage_nearest_neighbour_gates,
        "stage_swaps": report.stage_swaps,
    });
    Ok((rec, text))
}

/// Direct overlap `⟨Ψ_L|ρ|Ψ_L⟩`, independent of the stabilizer expansion.
pub fn direct_fidelity(state: &str, cfg: &ExperimentConfig) -> Result<f64> {
    let (_, amps) = named_state(state)?;
    let rho = encode(&amps, cfg.noise()?.as_ref())?;
    Ok(state_fidelity(&rho, &logical_state(&amps))?)
}
