//! Reference engines for checking the closed forms: an RK4 integrator of the
//! nine component equations and a scaling-and-squaring matrix exponential.
//!
//! Nothing here depends on `propagator`, `kraus` or `genfun`.

use nalgebra::SMatrix;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix3, C64};
use crate::model::{validate_density, DensityMatrix, SystemParams, Tolerances};

/// Fixed-step RK4 settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntegratorConfig {
    pub steps: usize,
    /// Fail as soon as an intermediate state leaves the density-matrix set.
    pub validate_each_step: bool,
}

impl IntegratorConfig {
    pub fn with_steps(steps: usize) -> Self {
        Self {
            steps,
            validate_each_step: false,
        }
    }
}

/// `dρ/dt`, written component by component.
pub fn lindblad_rhs(params: &SystemParams, rho: &CMatrix3) -> CMatrix3 {
    let h = C64::new(0.5 * params.rabi, 0.0);
    let k = C64::new(params.kappa, 0.0);
    let hk = C64::new(0.5 * params.kappa, 0.0);
    let iw = C64::new(0.0, params.omega);
    let r = |a: usize, b: usize| rho[(a - 1, b - 1)];

    let mut d = CMatrix3::zeros();
    let mut set = |a: usize, b: usize, v: C64| d[(a - 1, b - 1)] = v;

    set(1, 1, -h * (r(1, 2) + r(2, 1)));
    set(2, 2, h * (r(1, 2) + r(2, 1)) - k * r(2, 2));
    set(1, 2, h * (r(1, 1) - r(2, 2)) - hk * r(1, 2));
    set(2, 1, h * (r(1, 1) - r(2, 2)) - hk * r(2, 1));
    set(3, 3, k * r(2, 2));
    set(1, 3, -h * r(2, 3) - iw * r(1, 3));
    set(2, 3, h * r(1, 3) + (-hk - iw) * r(2, 3));
    set(3, 1, -h * r(3, 2) + iw * r(3, 1));
    set(3, 2, h * r(3, 1) + (-hk + iw) * r(3, 2));
    d
}

/// Classical fourth-order Runge–Kutta with step `t / steps`.
pub fn integrate_rk4(
    params: &SystemParams,
    rho0: &DensityMatrix,
    t: f64,
    config: IntegratorConfig,
) -> Result<DensityMatrix> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Parameter {
            field: "t",
            value: t,
            reason: "must be finite and non-negative",
        });
    }
    if config.steps == 0 {
        return Err(Error::Parameter {
            field: "steps",
            value: 0.0,
            reason: "at least one step is required",
        });
    }
    if t == 0.0 {
        return Ok(*rho0);
    }

    let h = t / config.steps as f64;
    let half = C64::new(0.5 * h, 0.0);
    let full = C64::new(h, 0.0);
    let sixth = C64::new(h / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);

    let mut y = *rho0.matrix();
    for step in 0..config.steps {
        let k1 = lindblad_rhs(params, &y);
        let k2 = lindblad_rhs(params, &(y + k1 * half));
        let k3 = lindblad_rhs(params, &(y + k2 * half));
        let k4 = lindblad_rhs(params, &(y + k3 * full));
        y += (k1 + k2 * two + k3 * two + k4) * sixth;

        if config.validate_each_step {
            let report = validate_density(&DensityMatrix::from_matrix(y), &Tolerances::DEFAULT);
            if !report.passed() {
                return Err(Error::Consistency(format!(
                    "RK4 state left the density-matrix set at step {}: {}",
                    step + 1,
                    report.describe()
                )));
            }
        }
    }
    Ok(DensityMatrix::from_matrix(y))
}

/// Largest `‖Mt‖₁` accepted by [`matrix_exponential`].
pub const EXPM_NORM_LIMIT: f64 = 700.0;

const TAYLOR_ORDER: usize = 24;

/// `e^{Mt}` by scaling and squaring around a truncated Taylor series.
///
/// `Mt` is halved until its 1-norm is at most 1/2; at that size a degree-24
/// Taylor polynomial is accurate far below double precision.
pub fn matrix_exponential<const N: usize>(m: &SMatrix<C64, N, N>, t: f64) -> Result<SMatrix<C64, N, N>> {
    let mt = m * C64::new(t, 0.0);
    let norm = one_norm(&mt);
    if !norm.is_finite() || norm > EXPM_NORM_LIMIT {
        return Err(Error::Range {
            norm,
            limit: EXPM_NORM_LIMIT,
        });
    }

    let mut squarings = 0u32;
    let mut scaled_norm = norm;
    while scaled_norm > 0.5 {
        scaled_norm *= 0.5;
        squarings += 1;
    }
    let x = mt * C64::new(0.5f64.powi(squarings as i32), 0.0);

    // Horner form of Σ x^k / k!.
    let ident = SMatrix::<C64, N, N>::identity();
    let mut acc = ident;
    for k in (1..=TAYLOR_ORDER).rev() {
        acc = ident + (x * acc) * C64::new(1.0 / k as f64, 0.0);
    }
    for _ in 0..squarings {
        acc = acc * acc;
    }
    Ok(acc)
}

fn one_norm<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}
