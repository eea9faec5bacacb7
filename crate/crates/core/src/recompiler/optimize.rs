use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::template::GateTemplate;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub max_restarts: usize,
    /// Simplex iterations per restart.
    pub max_iterations: usize,
    /// A restart succeeds once the distance drops below this.
    pub threshold: f64,
    pub snap_tolerance: f64,
    /// Snapping targets multiples of `π/d` for each `d` here.
    pub denominators: Vec<u32>,
    /// Edge length of the initial simplex, in radians.
    pub initial_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_restarts: 50,
            max_iterations: 5000,
            threshold: 1e-3,
            snap_tolerance: 1e-10,
            denominators: vec![1, 2, 3, 4, 6, 12],
            initial_step: 0.5,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |reason: &str| Err(Error::Compile { stage: "config", reason: reason.to_string() });
        if self.max_restarts == 0 || self.max_iterations == 0 {
            return bad("restart and iteration budgets must be positive");
        }
        if !(self.threshold > 0.0 && self.snap_tolerance > 0.0 && self.initial_step > 0.0) {
            return bad("thresholds and step must be positive");
        }
        if self.denominators.is_empty() || self.denominators.contains(&0) {
            return bad("denominator set must be nonempty and positive");
        }
        Ok(())
    }
}

/// Outcome of one simplex run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// Best value after each iteration; non-increasing.
    pub trace: Vec<f64>,
}

/// Nelder–Mead with dimension-adaptive coefficients. When the simplex
/// collapses above `target` it is rebuilt around the best vertex, until
/// `max_iterations` is spent.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: f64,
    max_iterations: usize,
    target: f64,
) -> SimplexResult {
    let n = x0.len();
    let nf = n as f64;
    let (rho, chi) = (1.0, 1.0 + 2.0 / nf);
    let (gamma, sigma) = (0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf.max(2.0));

    let build = |center: &[f64], f: &mut F| -> Vec<(Vec<f64>, f64)> {
        let mut s = Vec::with_capacity(n + 1);
        s.push((center.to_vec(), f(center)));
        for i in 0..n {
            let mut x = center.to_vec();
            x[i] += step;
            let v = f(&x);
            s.push((x, v));
        }
        s
    };
    let mut simplex = build(x0, &mut f);
    let mut trace = Vec::with_capacity(max_iterations);
    let mut centroid = vec![0.0; n];
    let mut iterations = 0;
    let mut last_rebuild: Option<f64> = None;

    while iterations < max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[0].1 < target {
            break;
        }
        let spread = simplex[n].1 - simplex[0].1;
        let size = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread <= 1e-15 * simplex[0].1 || size < 1e-12 {
            // rebuild around the best vertex; stop if that no longer helps
            if last_rebuild.is_some_and(|v| simplex[0].1 >= v) {
                break;
            }
            last_rebuild = Some(simplex[0].1);
            let best = simplex[0].0.clone();
            simplex = build(&best, &mut f);
            continue;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / nf;
            }
        }
        let worst = simplex[n].0.clone();
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&worst).map(|(c, w)| c + t * (c - w)).collect() };

        let xr = along(rho);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = along(rho * chi);
            let fe = f(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[n].1 {
                let xc = along(rho * gamma);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(-gamma);
                let fc = f(&xc);
                (xc, fc)
            };
            if fc < fr.min(simplex[n].1) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for (x, v) in simplex[1..].iter_mut() {
                    for (xi, bi) in x.iter_mut().zip(&best) {
                        *xi = bi + sigma * (*xi - bi);
                    }
                    *v = f(x);
                }
            }
        }
        let best = simplex.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
        trace.push(best);
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    SimplexResult { x, value, iterations, trace }
}

/// Squared Frobenius distance between a template and a target, as a
/// reusable closure with a preallocated buffer.
pub(crate) fn objective<'a>(template: &'a GateTemplate, target: &'a ComplexMatrix) -> impl FnMut(&[f64]) -> f64 + 'a {
    let d = template.dim();
    let mut buf = vec![num_complex::Complex64::new(0.0, 0.0); d * d];
    move |theta: &[f64]| {
        buf.iter_mut().for_each(|v| *v = num_complex::Complex64::new(0.0, 0.0));
        for i in 0..d {
            buf[i * d + i] = num_complex::Complex64::new(1.0, 0.0);
        }
        template.fill_unitary(theta, &mut buf);
        buf.iter().zip(target.as_slice()).map(|(a, b)| (a - b).norm_sqr()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOutcome {
    pub theta: Vec<f64>,
    pub distance: f64,
    /// Index of the restart that produced `theta`.
    pub restart: usize,
    pub restarts_used: usize,
    pub converged: bool,
    /// Best value per iteration of the winning restart.
    pub trace: Vec<f64>,
}

impl OptimizeOutcome {
    /// Turns an unconverged outcome into an error.
    pub fn require_converged(self, threshold: f64) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::OptimizerExhausted { best: self.distance, threshold, restarts: self.restarts_used })
        }
    }
}

/// The random stream for restart `r` under `seed`.
pub fn restart_rng(seed: u64, r: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r as u64);
    rng
}

/// One simplex run from the uniformly random start of restart `r`.
pub fn run_restart(target: &ComplexMatrix, template: &GateTemplate, config: &OptimizerConfig, seed: u64, r: usize) -> SimplexResult {
    let mut rng = restart_rng(seed, r);
    let x0: Vec<f64> = (0..template.num_params()).map(|_| rng.random::<f64>() * TAU).collect();
    nelder_mead(objective(template, target), &x0, config.initial_step, config.max_iterations, config.threshold)
}

/// Checks that `target` is a unitary of the template's dimension.
pub(crate) fn check_target(target: &ComplexMatrix, template: &GateTemplate) -> Result<()> {
    let d = template.dim();
    if target.rows() != d || target.cols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: target.rows() });
    }
    if !target.is_unitary(1e-9) {
        return Err(Error::NotUnitary { deviation: target.unitarity_deviation() });
    }
    Ok(())
}

/// Random-restart simplex search over all template parameters, the global
/// phase included. Restarts run in order; the first to reach
/// `config.threshold` wins, otherwise the best over all restarts is
/// returned with `converged = false`.
pub fn optimize(target: &ComplexMatrix, template: &GateTemplate, config: &OptimizerConfig, seed: u64) -> Result<OptimizeOutcome> {
    config.validate()?;
    check_target(target, template)?;
    let mut best: Option<OptimizeOutcome> = None;
    for r in 0..config.max_restarts {
        let res = run_restart(target, template, config, seed, r);
        let converged = res.value < config.threshold;
        let better = best.as_ref().is_none_or(|b| res.value < b.distance);
        if better || converged {
            best = Some(OptimizeOutcome {
                theta: res.x,
                distance: res.value,
                restart: r,
                restarts_used: r + 1,
                converged,
                trace: res.trace,
            });
        }
        if converged {
            break;
        }
    }
    let mut out = best.expect("at least one restart");
    if !out.converged {
        out.restarts_used = config.max_restarts;
    }
    Ok(out)
}
