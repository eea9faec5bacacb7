//! Layered circuits.
//!
//! A circuit is an ordered list of layers. Gates inside one layer act on
//! disjoint qubits and at most one of them is a two-qubit gate (the hardware
//! drives entangling gates one at a time). Layers run in temporal order, so
//! the circuit unitary is `U_L ⋯ U_2 · U_1`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::{Gate, GateKind};
use crate::linalg::{apply_local_left, ComplexMatrix};
use crate::state::{DensityMatrix, StateVector};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Layer {
    pub gates: Vec<Gate>,
    /// Explicit duration in seconds. When `None` the noise model derives it
    /// from its gate timings.
    pub duration: Option<f64>,
}

impl Layer {
    pub fn new(gates: Vec<Gate>) -> Self {
        Self { gates, duration: None }
    }

    pub fn has_two_qubit_gate(&self) -> bool {
        self.gates.iter().any(Gate::is_two_qubit)
    }

    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.gates.iter().flat_map(|g| g.targets.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    num_qubits: usize,
    layers: Vec<Layer>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self { num_qubits, layers: Vec::new() }
    }

    pub fn from_layers(num_qubits: usize, layers: Vec<Layer>) -> Result<Self> {
        let c = Self { num_qubits, layers };
        c.validate()?;
        Ok(c)
    }

    /// Schedules a gate sequence as-soon-as-possible into layers, keeping
    /// gate order on every qubit and at most one two-qubit gate per layer.
    pub fn from_gates(num_qubits: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut c = Self::new(num_qubits);
        for g in gates {
            c.schedule(g)?;
        }
        Ok(c)
    }

    /// Places `gate` in the earliest layer compatible with everything
    /// already scheduled on its qubits.
    pub fn schedule(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        let busy_until = gate
            .targets
            .iter()
            .map(|&q| self.last_layer_on(q).map_or(0, |l| l + 1))
            .max()
            .unwrap_or(0);
        let mut t = busy_until;
        while t < self.layers.len() && gate.is_two_qubit() && self.layers[t].has_two_qubit_gate() {
            t += 1;
        }
        if t == self.layers.len() {
            self.layers.push(Layer::default());
        }
        self.layers[t].gates.push(gate);
        Ok(())
    }

    fn last_layer_on(&self, q: usize) -> Option<usize> {
        self.layers
            .iter()
            .rposition(|l| l.gates.iter().any(|g| g.targets.contains(&q)))
    }

    pub fn push_layer(&mut self, layer: Layer) -> Result<()> {
        self.layers.push(layer);
        let idx = self.layers.len() - 1;
        if let Err(e) = self.validate_layer(idx) {
            self.layers.pop();
            return Err(e);
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.layers.iter().flat_map(|l| l.gates.iter())
    }

    pub fn gate_count(&self) -> usize {
        self.gates().count()
    }

    pub fn count_kind(&self, kind: GateKind) -> usize {
        self.gates().filter(|g| g.kind == kind).count()
    }

    pub fn single_qubit_count(&self) -> usize {
        self.gates().filter(|g| !g.is_two_qubit()).count()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates().filter(|g| g.is_two_qubit()).count()
    }

    /// Qubits acted on by at least one gate.
    pub fn qubits_touched(&self) -> BTreeSet<usize> {
        self.gates().flat_map(|g| g.targets.iter().copied()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        (0..self.layers.len()).try_for_each(|i| self.validate_layer(i))
    }

    fn validate_layer(&self, idx: usize) -> Result<()> {
        let layer = &self.layers[idx];
        let mut seen = BTreeSet::new();
        for g in &layer.gates {
            g.validate(self.num_qubits).map_err(|e| match e {
                Error::InvalidLayer { reason, .. } => Error::InvalidLayer { layer: idx, reason },
                other => other,
            })?;
            for &q in &g.targets {
                if !seen.insert(q) {
                    return Err(Error::InvalidLayer {
                        layer: idx,
                        reason: format!("qubit {q} targeted twice"),
                    });
                }
            }
        }
        if layer.gates.iter().filter(|g| g.is_two_qubit()).count() > 1 {
            return Err(Error::InvalidLayer {
                layer: idx,
                reason: "more than one two-qubit gate".into(),
            });
        }
        if let Some(d) = layer.duration {
            if !(d.is_finite() && d >= 0.0) {
                return Err(Error::InvalidLayer { layer: idx, reason: format!("bad duration {d}") });
            }
        }
        Ok(())
    }

    /// Appends the layers of `other`.
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, found: other.num_qubits });
        }
        self.layers.extend(other.layers.iter().cloned());
        Ok(())
    }

    /// The inverse circuit: layers reversed, every gate inverted.
    pub fn inverse(&self) -> Circuit {
        let layers = self
            .layers
            .iter()
            .rev()
            .map(|l| Layer {
                gates: l.gates.iter().map(Gate::inverse).collect(),
                duration: l.duration,
            })
            .collect();
        Circuit { num_qubits: self.num_qubits, layers }
    }

    /// Renames qubits through `map` (`map[old] = new`).
    pub fn remapped(&self, map: &[usize]) -> Result<Circuit> {
        let layers = self
            .layers
            .iter()
            .map(|l| Layer {
                gates: l.gates.iter().map(|g| g.remapped(map)).collect(),
                duration: l.duration,
            })
            .collect();
        Circuit::from_layers(self.num_qubits, layers)
    }

    /// Flat gate list in temporal order.
    pub fn flatten(&self) -> Vec<Gate> {
        self.gates().cloned().collect()
    }

    /// The full `2^n × 2^n` unitary, `U_L ⋯ U_1`.
    pub fn unitary(&self) -> ComplexMatrix {
        let dim = 1 << self.num_qubits;
        let mut u = ComplexMatrix::identity(dim);
        for g in self.gates() {
            apply_local_left(u.as_mut_slice(), self.num_qubits, dim, &g.matrix(), &g.targets);
        }
        u
    }

    pub fn apply_to_state(&self, psi: &mut StateVector) -> Result<()> {
        self.check_width(psi.num_qubits())?;
        for g in self.gates() {
            psi.apply_gate(g)?;
        }
        Ok(())
    }

    pub fn apply_to_density(&self, rho: &mut DensityMatrix) -> Result<()> {
        self.check_width(rho.num_qubits())?;
        for g in self.gates() {
            rho.apply_gate(g)?;
        }
        Ok(())
    }

    fn check_width(&self, n: usize) -> Result<()> {
        if n != self.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, found: n });
        }
        Ok(())
    }

    /// Keeps only the gates in the backward light cone of `outputs`: a gate
    /// survives if it touches a qubit whose later evolution can reach one of
    /// the output qubits. Everything else cannot change the reduced state on
    /// `outputs`.
    pub fn prune_to_light_cone(&self, outputs: &[usize]) -> Circuit {
        let mut cone: BTreeSet<usize> = outputs.iter().copied().collect();
        let mut kept: Vec<Vec<Gate>> = vec![Vec::new(); self.layers.len()];
        for (li, layer) in self.layers.iter().enumerate().rev() {
            // gates within one layer are disjoint, so their order is irrelevant
            let mut grow = Vec::new();
            for g in &layer.gates {
                if g.targets.iter().any(|q| cone.contains(q)) {
                    kept[li].push(g.clone());
                    grow.extend(g.targets.iter().copied());
                }
            }
            cone.extend(grow);
        }
        let gates: Vec<Gate> = kept.into_iter().flatten().collect();
        Circuit::from_gates(self.num_qubits, gates).expect("pruned gates stay valid")
    }

    /// Serializes to the line-based text format read by [`Circuit::from_text`].
    ///
    /// ```text
    /// qubits 2
    /// layer
    /// h 0
    /// ry 1 0.5
    /// layer 6e-8
    /// cz 0 1
    /// ```
    ///
    /// Angles are in units of π and printed in Rust's shortest round-trip
    /// form, so `from_text(to_text(c)) == c` bit for bit.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "qubits {}", self.num_qubits).unwrap();
        for layer in &self.layers {
            match layer.duration {
                Some(d) => writeln!(out, "layer {d:?}").unwrap(),
                None => writeln!(out, "layer").unwrap(),
            }
            for g in &layer.gates {
                write!(out, "{}", g.kind.name()).unwrap();
                for t in &g.targets {
                    write!(out, " {t}").unwrap();
                }
                if g.kind.has_angle() {
                    write!(out, " {:?}", g.angle).unwrap();
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Circuit> {
        let bad = |line: usize, msg: &str| Error::InvalidLayer {
            layer: line,
            reason: format!("line {}: {msg}", line + 1),
        };
        let mut num_qubits = None;
        let mut layers: Vec<Layer> = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let head = parts.next().unwrap();
            match head {
                "qubits" => {
                    let n = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| bad(ln, "expected qubit count"))?;
                    num_qubits = Some(n);
                }
                "layer" => {
                    let duration = match parts.next() {
                        Some(s) => Some(s.parse::<f64>().map_err(|_| bad(ln, "bad duration"))?),
                        None => None,
                    };
                    layers.push(Layer { gates: Vec::new(), duration });
                }
                name => {
                    let kind = GateKind::from_name(name).ok_or_else(|| bad(ln, "unknown gate"))?;
                    let mut targets = Vec::new();
                    for _ in 0..kind.arity() {
                        let t = parts
                            .next()
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| bad(ln, "missing target"))?;
                        targets.push(t);
                    }
                    let angle = if kind.has_angle() {
                        parts
                            .next()
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| bad(ln, "missing angle"))?
                    } else {
                        0.0
                    };
                    if parts.next().is_some() {
                        return Err(bad(ln, "trailing tokens"));
                    }
                    let layer = layers.last_mut().ok_or_else(|| bad(ln, "gate before first layer"))?;
                    layer.gates.push(Gate { kind, targets, angle });
                }
            }
        }
        let n = num_qubits.ok_or_else(|| bad(0, "missing qubits header"))?;
        Circuit::from_layers(n, layers)
    }
}
