//! Decoherence during circuit layers.
//!
//! Every layer is modelled as its ideal gates followed by an amplitude
//! damping and dephasing channel on every qubit, idle or not, for the
//! layer's duration. Times are in seconds.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Layer};
use crate::error::{Error, Result};
use crate::linalg::{r, ComplexMatrix, ZERO};
use crate::state::DensityMatrix;

/// How the dephasing time entering the channel is obtained from `T2*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TphiMode {
    /// `1/Tφ = 1/T2* − 1/(2·T1)`.
    #[default]
    PureDephasing,
    /// `Tφ = T2*`.
    T2star,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitParams {
    pub name: String,
    pub t1: f64,
    pub t2star: f64,
    /// Probability of reading 0 after preparing 0.
    pub f00: f64,
    /// Probability of reading 1 after preparing 1.
    pub f11: f64,
}

impl QubitParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| Err(Error::InvalidDevice(format!("{}: {reason}", self.name)));
        if !(self.t1 > 0.0) {
            return bad(format!("T1 must be positive, got {}", self.t1));
        }
        if !(self.t2star > 0.0) {
            return bad(format!("T2* must be positive, got {}", self.t2star));
        }
        if self.t2star > 2.0 * self.t1 * (1.0 + 1e-9) {
            return bad(format!("T2* = {} exceeds 2·T1 = {}", self.t2star, 2.0 * self.t1));
        }
        for (label, f) in [("f00", self.f00), ("f11", self.f11)] {
            if !(f > 0.5 && f <= 1.0) {
                return bad(format!("{label} = {f} outside (0.5, 1]"));
            }
        }
        Ok(())
    }
}

/// Per-qubit device parameters, listed in wire order along the chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    pub qubits: Vec<QubitParams>,
}

impl DeviceParams {
    pub fn new(qubits: Vec<QubitParams>) -> Result<Self> {
        let d = Self { qubits };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.qubits.is_empty() {
            return Err(Error::InvalidDevice("no qubits".into()));
        }
        self.qubits.iter().try_for_each(QubitParams::validate)
    }

    /// The measured five-qubit chain, wires `1'..5'` = `Q1, Q5, Q2, Q4, Q3`.
    pub fn reference() -> Self {
        let rows = [
            ("Q1", 27.5, 5.5, 0.982, 0.831),
            ("Q5", 34.0, 4.1, 0.932, 0.874),
            ("Q2", 33.0, 5.6, 0.931, 0.885),
            ("Q4", 36.8, 2.7, 0.934, 0.899),
            ("Q3", 48.6, 3.3, 0.963, 0.916),
        ];
        Self {
            qubits: rows
                .iter()
                .map(|&(name, t1, t2, f00, f11)| QubitParams {
                    name: name.to_string(),
                    t1: t1 / 1e6,
                    t2star: t2 / 1e6,
                    f00,
                    f11,
                })
                .collect(),
        }
    }

    /// The same device with `T2*` raised to `T1` on every qubit.
    pub fn with_long_t2(&self) -> Self {
        let mut d = self.clone();
        for q in &mut d.qubits {
            q.t2star = q.t1;
        }
        d
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    /// Reorders qubits: entry `i` of the result is entry `order[i]` here.
    pub fn reordered(&self, order: &[usize]) -> Self {
        Self { qubits: order.iter().map(|&i| self.qubits[i].clone()).collect() }
    }
}

/// `Tφ` from `1/Tφ = 1/T2* − 1/(2·T1)`. Infinite `T2*` gives infinite `Tφ`.
pub fn pure_dephasing_time(t1: f64, t2star: f64) -> Result<f64> {
    if t2star.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if !(t1 > 0.0 && t2star > 0.0) || t2star >= 2.0 * t1 {
        return Err(Error::NoPureDephasing { t1, t2star });
    }
    Ok(1.0 / (1.0 / t2star - 1.0 / (2.0 * t1)))
}

/// Kraus set `{E1·E3, E1·E4, E2·E3, E2·E4}` of amplitude damping with
/// `γ = k·t/T1` composed with dephasing `γφ = k′·t/Tφ`.
pub fn decoherence_kraus_scaled(t1: f64, tphi: f64, t: f64, k: f64, k_phi: f64) -> Result<Vec<ComplexMatrix>> {
    if !(t >= 0.0) {
        return Err(Error::NoiseOutOfRange { name: "t", value: t });
    }
    if !(t1 > 0.0) {
        return Err(Error::NoiseOutOfRange { name: "T1", value: t1 });
    }
    if !(tphi > 0.0) {
        return Err(Error::NoiseOutOfRange { name: "Tphi", value: tphi });
    }
    let gamma = k * t / t1;
    let gamma_phi = k_phi * t / tphi;
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::NoiseOutOfRange { name: "gamma", value: gamma });
    }
    if !(0.0..=1.0).contains(&gamma_phi) {
        return Err(Error::NoiseOutOfRange { name: "gamma_phi", value: gamma_phi });
    }
    let e1 = ComplexMatrix::diagonal(&[r(1.0), r((1.0 - gamma).sqrt())]);
    let e2 = ComplexMatrix::from_rows(&[&[ZERO, r(gamma.sqrt())], &[ZERO, ZERO]]);
    let e3 = ComplexMatrix::diagonal(&[r(1.0), r((1.0 - gamma_phi).sqrt())]);
    let e4 = ComplexMatrix::diagonal(&[ZERO, r(gamma_phi.sqrt())]);
    Ok(vec![e1.matmul(&e3), e1.matmul(&e4), e2.matmul(&e3), e2.matmul(&e4)])
}

/// [`decoherence_kraus_scaled`] with `k = 1`, `k′ = 2`.
pub fn decoherence_kraus(t1: f64, tphi: f64, t: f64) -> Result<Vec<ComplexMatrix>> {
    decoherence_kraus_scaled(t1, tphi, t, 1.0, 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub device: DeviceParams,
    /// Duration of a layer holding only single-qubit gates.
    pub t_1q: f64,
    /// Duration of a layer holding a two-qubit gate.
    pub t_2q: f64,
    pub k: f64,
    pub k_phi: f64,
    pub tphi_mode: TphiMode,
}

impl NoiseParams {
    pub const DEFAULT_T_1Q: f64 = 30e-9;
    pub const DEFAULT_T_2Q: f64 = 30e-9;

    pub fn new(device: DeviceParams) -> Self {
        Self {
            device,
            t_1q: Self::DEFAULT_T_1Q,
            t_2q: Self::DEFAULT_T_2Q,
            k: 1.0,
            k_phi: 2.0,
            tphi_mode: TphiMode::default(),
        }
    }

    pub fn reference() -> Self {
        Self::new(DeviceParams::reference())
    }

    pub fn reference_long_t2() -> Self {
        Self::new(DeviceParams::reference().with_long_t2())
    }

    pub fn with_mode(mut self, mode: TphiMode) -> Self {
        self.tphi_mode = mode;
        self
    }

    pub fn with_timings(mut self, t_1q: f64, t_2q: f64) -> Self {
        self.t_1q = t_1q;
        self.t_2q = t_2q;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.device.validate()?;
        for (name, v) in [("t_1q", self.t_1q), ("t_2q", self.t_2q), ("k", self.k), ("k_phi", self.k_phi)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::NoiseOutOfRange { name, value: v });
            }
        }
        for q in 0..self.device.num_qubits() {
            self.tphi(q)?;
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.device.num_qubits()
    }

    /// Dephasing time of qubit `q` under the configured mode.
    pub fn tphi(&self, q: usize) -> Result<f64> {
        let p = &self.device.qubits[q];
        match self.tphi_mode {
            TphiMode::PureDephasing => pure_dephasing_time(p.t1, p.t2star),
            TphiMode::T2star => Ok(p.t2star),
        }
    }

    pub fn kraus(&self, q: usize, t: f64) -> Result<Vec<ComplexMatrix>> {
        decoherence_kraus_scaled(self.device.qubits[q].t1, self.tphi(q)?, t, self.k, self.k_phi)
    }

    /// The layer's own duration if set, else the default for its gate mix.
    pub fn layer_duration(&self, layer: &Layer) -> f64 {
        layer.duration.unwrap_or(if layer.has_two_qubit_gate() { self.t_2q } else { self.t_1q })
    }

    /// Total time of a circuit.
    pub fn circuit_duration(&self, circuit: &Circuit) -> f64 {
        circuit.layers().iter().map(|l| self.layer_duration(l)).sum()
    }

    /// Decoheres every qubit of `rho` for `duration`.
    pub fn apply_layer_noise(&self, rho: &mut DensityMatrix, duration: f64) -> Result<()> {
        if rho.num_qubits() != self.num_qubits() {
            return Err(Error::DimensionMismatch { expected: self.num_qubits(), found: rho.num_qubits() });
        }
        if duration == 0.0 {
            return Ok(());
        }
        for q in 0..self.num_qubits() {
            let kraus = self.kraus(q, duration)?;
            rho.apply_channel_unchecked(&kraus, q);
        }
        Ok(())
    }

    /// Same parameters with qubits reordered; see [`DeviceParams::reordered`].
    pub fn reordered(&self, order: &[usize]) -> Self {
        Self { device: self.device.reordered(order), ..self.clone() }
    }
}

/// Runs `circuit` on `rho`, layer by layer, decohering after each layer when
/// `noise` is given.
pub fn evolve(circuit: &Circuit, rho: &mut DensityMatrix, noise: Option<&NoiseParams>) -> Result<()> {
    if rho.num_qubits() != circuit.num_qubits() {
        return Err(Error::DimensionMismatch { expected: circuit.num_qubits(), found: rho.num_qubits() });
    }
    for layer in circuit.layers() {
        for g in &layer.gates {
            rho.apply_gate(g)?;
        }
        if let Some(n) = noise {
            n.apply_layer_noise(rho, n.layer_duration(layer))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::check_kraus;

    #[test]
    fn zero_time_is_identity_channel() {
        let k = decoherence_kraus(30e-6, 5e-6, 0.0).unwrap();
        assert!(k[0].max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        for e in &k[1..] {
            assert_eq!(e.frobenius_norm_sqr(), 0.0);
        }
    }

    #[test]
    fn kraus_set_is_trace_preserving() {
        for &(t1, tphi, t) in &[(30e-6, 5e-6, 30e-9), (1e-6, 1e-6, 0.5e-6), (2e-6, 1e-6, 0.5e-6)] {
            check_kraus(&decoherence_kraus(t1, tphi, t).unwrap(), 2).unwrap();
        }
    }

    #[test]
    fn rejects_out_of_range_rates() {
        assert!(matches!(
            decoherence_kraus(1e-6, 1e-6, 2e-6),
            Err(Error::NoiseOutOfRange { name: "gamma", .. })
        ));
        assert!(decoherence_kraus(1e-6, -1.0, 0.0).is_err());
    }

    #[test]
    fn pure_dephasing_requires_t2_below_2t1() {
        assert!(pure_dephasing_time(1.0, 2.0).is_err());
        assert!(pure_dephasing_time(1.0, 1.5).unwrap() > 1.5);
        assert_eq!(pure_dephasing_time(1.0, f64::INFINITY).unwrap(), f64::INFINITY);
    }

    #[test]
    fn reference_device_is_valid() {
        NoiseParams::reference().validate().unwrap();
        NoiseParams::reference_long_t2().validate().unwrap();
        NoiseParams::reference().with_mode(TphiMode::T2star).validate().unwrap();
    }

    #[test]
    fn device_validation_catches_bad_rows() {
        let mut d = DeviceParams::reference();
        d.qubits[2].f00 = 0.4;
        assert!(d.validate().is_err());
        let mut d = DeviceParams::reference();
        d.qubits[0].t2star = 3.0 * d.qubits[0].t1;
        assert!(d.validate().is_err());
    }

    #[test]
    fn mode_round_trips_through_serde_names() {
        assert_eq!(serde_json::to_string(&TphiMode::T2star).unwrap(), "\"t2star\"");
        assert_eq!(serde_json::to_string(&TphiMode::PureDephasing).unwrap(), "\"pure-dephasing\"");
    }
}
