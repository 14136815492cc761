//! Norm-based comparison of discrete and continuous evolutions.
//!
//! "Norm" is the spectral norm (largest singular value) throughout.

use crate::error::{Error, Result};
use crate::kraus::{evolve_discrete, DiscreteOptions, JumpSpec};
use crate::linalg::CMatrix3;
use crate::model::{DensityMatrix, SystemParams};
use crate::propagator::evolve_analytic;

pub use crate::linalg::spectral_norm;

/// `‖a − b‖₂`.
pub fn distance(rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> f64 {
    spectral_norm(&(rho_a.matrix() - rho_b.matrix()))
}

/// `(‖ρ̃‖ − ‖ρ‖) / ‖ρ‖`, signed.
pub fn relative_error(rho_discrete: &DensityMatrix, rho_analytic: &DensityMatrix) -> Result<f64> {
    relative_error_of(rho_discrete.matrix(), rho_analytic.matrix())
}

pub fn relative_error_abs(rho_discrete: &DensityMatrix, rho_analytic: &DensityMatrix) -> Result<f64> {
    relative_error(rho_discrete, rho_analytic).map(f64::abs)
}

fn relative_error_of(discrete: &CMatrix3, analytic: &CMatrix3) -> Result<f64> {
    let reference = spectral_norm(analytic);
    if reference == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((spectral_norm(discrete) - reference) / reference)
}

/// The reference curve `ω² / n`.
pub fn re_approx(omega: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Parameter {
            field: "n",
            value: 0.0,
            reason: "step count must be at least 1",
        });
    }
    Ok(omega * omega / n as f64)
}

/// One discrete-vs-analytic comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionRecord {
    pub theta: f64,
    pub t: f64,
    /// Step count of the discrete run; 0 means analytic only.
    pub n: usize,
    pub norm_analytic: f64,
    pub norm_discrete: f64,
    pub distance: f64,
    /// Signed relative error.
    pub relative_error: f64,
    pub re_approx: f64,
}

impl EvolutionRecord {
    pub fn relative_error_abs(&self) -> f64 {
        self.relative_error.abs()
    }
}

/// Evolves `initial_state(theta)` to `t` both ways and compares.
pub fn compare(
    params: &SystemParams,
    theta: f64,
    t: f64,
    n: usize,
    jumps: &JumpSpec,
    opts: DiscreteOptions,
) -> Result<EvolutionRecord> {
    let rho0 = DensityMatrix::initial_state(theta)?;
    let analytic = evolve_analytic(params, &rho0, t)?;
    let discrete = evolve_discrete(params, &rho0, t, n, jumps, opts)?.state;
    Ok(EvolutionRecord {
        theta,
        t,
        n,
        norm_analytic: spectral_norm(analytic.matrix()),
        norm_discrete: spectral_norm(discrete.matrix()),
        distance: distance(&discrete, &analytic),
        relative_error: relative_error(&discrete, &analytic)?,
        re_approx: re_approx(params.omega, n)?,
    })
}

/// Least-squares slope of `ln y` against `ln x`. `None` with fewer than two
/// usable points.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}
