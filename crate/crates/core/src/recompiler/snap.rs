use std::f64::consts::{PI, TAU};

use super::optimize::{nelder_mead, objective};
use super::template::{with_best_phase, GateTemplate};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Below this an angle already counts as on the grid.
const ON_GRID: f64 = 1e-9;
/// Candidates tried per progressive snapping step.
const CANDIDATES: usize = 6;
const REFINE_ITERATIONS: usize = 20_000;
const REFINE_TARGET: f64 = 1e-24;
const REFINE_ACCEPT: f64 = 1e-12;

/// Nearest value `kπ/d` over `d ∈ denominators`, reduced to `[0, 2π)`.
pub fn snap_angle(x: f64, denominators: &[u32]) -> f64 {
    let x = x.rem_euclid(TAU);
    let mut best = x;
    let mut gap = f64::INFINITY;
    for &d in denominators {
        let unit = PI / d as f64;
        let g = (x / unit).round() * unit;
        if (g - x).abs() < gap {
            gap = (g - x).abs();
            best = g;
        }
    }
    let best = best.rem_euclid(TAU);
    // rounding may land within an ulp of 2π
    if TAU - best < 1e-12 {
        0.0
    } else {
        best
    }
}

/// Distance from `x` to its snapped value, modulo 2π.
pub fn grid_offset(x: f64, denominators: &[u32]) -> f64 {
    let d = (x.rem_euclid(TAU) - snap_angle(x, denominators)).abs();
    d.min(TAU - d)
}

/// Snaps every slot angle; the trailing phase parameter is left alone.
pub fn snap_angles(theta: &[f64], denominators: &[u32]) -> Vec<f64> {
    let mut out = theta.to_vec();
    if let Some((_, angles)) = out.split_last_mut() {
        for a in angles {
            *a = snap_angle(*a, denominators);
        }
    }
    out
}

/// Snaps all angles at once, fixes the phase analytically and checks the
/// distance against `tolerance`. On failure, lists the angles that moved
/// by more than the on-grid slack.
pub fn snap_and_verify(
    template: &GateTemplate,
    target: &ComplexMatrix,
    theta: &[f64],
    denominators: &[u32],
    tolerance: f64,
) -> Result<Vec<f64>> {
    let snapped = with_best_phase(template, target, &snap_angles(theta, denominators))?;
    let distance = objective(template, target)(&snapped);
    if distance <= tolerance {
        return Ok(snapped);
    }
    let failed = (0..theta.len() - 1).filter(|&i| grid_offset(theta[i], denominators) > ON_GRID).collect();
    Err(Error::SnapRejected { distance, failed })
}

/// Snaps angles one at a time. Each step fixes the free angle nearest the
/// grid and re-optimizes the remaining free parameters to an exact fit;
/// if that fails the next-nearest candidate is tried. Ends with every
/// angle on the grid, the phase set analytically, and the result checked
/// against `tolerance`.
pub fn progressive_snap(
    template: &GateTemplate,
    target: &ComplexMatrix,
    theta: &[f64],
    denominators: &[u32],
    tolerance: f64,
) -> Result<Vec<f64>> {
    let num_angles = theta.len().saturating_sub(1);
    let mut cost = objective(template, target);
    let mut current = theta.to_vec();
    if cost(&current) >= REFINE_ACCEPT {
        let res = nelder_mead(&mut cost, &current, 1e-2, REFINE_ITERATIONS, REFINE_TARGET);
        if res.value >= REFINE_ACCEPT {
            return Err(Error::SnapRejected { distance: res.value, failed: (0..num_angles).collect() });
        }
        current = res.x;
    }
    let mut fixed = vec![false; num_angles];

    while fixed.iter().any(|f| !f) {
        let mut free: Vec<usize> = (0..num_angles).filter(|&i| !fixed[i]).collect();
        free.sort_by(|&a, &b| grid_offset(current[a], denominators).total_cmp(&grid_offset(current[b], denominators)));

        let on_grid: Vec<usize> = free.iter().copied().filter(|&i| grid_offset(current[i], denominators) < ON_GRID).collect();
        if !on_grid.is_empty() {
            for i in on_grid {
                current[i] = snap_angle(current[i], denominators);
                fixed[i] = true;
            }
            continue;
        }

        let mut accepted = false;
        for &i in free.iter().take(CANDIDATES) {
            let mut trial = current.clone();
            trial[i] = snap_angle(trial[i], denominators);
            let open: Vec<usize> = (0..theta.len()).filter(|&j| j == num_angles || (j != i && !fixed[j])).collect();
            let x0: Vec<f64> = open.iter().map(|&j| trial[j]).collect();
            let mut sub = |x: &[f64]| {
                let mut y = trial.clone();
                for (&j, &v) in open.iter().zip(x) {
                    y[j] = v;
                }
                cost(&y)
            };
            let res = nelder_mead(&mut sub, &x0, 1e-2, REFINE_ITERATIONS, REFINE_TARGET);
            if res.value < REFINE_ACCEPT {
                for (&j, &v) in open.iter().zip(&res.x) {
                    trial[j] = v;
                }
                current = trial;
                fixed[i] = true;
                accepted = true;
                break;
            }
        }
        if !accepted {
            let distance = cost(&snap_angles(&current, denominators));
            return Err(Error::SnapRejected { distance, failed: free });
        }
    }

    let snapped = with_best_phase(template, target, &current)?;
    let distance = cost(&snapped);
    if distance > tolerance {
        return Err(Error::SnapRejected { distance, failed: Vec::new() });
    }
    Ok(snapped)
}
