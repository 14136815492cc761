//! Drift matrix `A` of the vectorized master equation and its closed-form
//! exponential `F(t) = e^{At}`.

use nalgebra::SMatrix;

use crate::error::{Error, Result};
use crate::genfun::{generating_values, GeneratingValues};
use crate::linalg::C64;
use crate::model::{require_density, validate_density, DensityMatrix, SystemParams, Tolerances, VectorizedState};

/// A linear map on [`VectorizedState`]s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Superoperator(pub SMatrix<C64, 9, 9>);

impl Superoperator {
    pub fn identity() -> Self {
        Self(SMatrix::identity())
    }

    pub fn matrix(&self) -> &SMatrix<C64, 9, 9> {
        &self.0
    }

    /// Entry with 1-based indices, matching the `ρ11 … ρ33` labels.
    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.0[(row - 1, col - 1)]
    }

    pub fn apply(&self, v: &VectorizedState) -> VectorizedState {
        VectorizedState(self.0 * v.0)
    }

    pub fn compose(&self, other: &Superoperator) -> Superoperator {
        Superoperator(self.0 * other.0)
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Generator `A` with `d[ρ]/dt = A [ρ]`.
pub fn drift_matrix(params: &SystemParams) -> Superoperator {
    let h = 0.5 * params.rabi;
    let k = params.kappa;
    let hk = 0.5 * k;
    let w = params.omega;

    let mut a = SMatrix::<C64, 9, 9>::zeros();
    let mut set = |r: usize, c: usize, v: C64| a[(r - 1, c - 1)] = v;

    // ρ11
    set(1, 2, re(-h));
    set(1, 4, re(-h));
    // ρ12
    set(2, 1, re(h));
    set(2, 2, re(-hk));
    set(2, 5, re(-h));
    // ρ13
    set(3, 3, C64::new(0.0, -w));
    set(3, 6, re(-h));
    // ρ21
    set(4, 1, re(h));
    set(4, 4, re(-hk));
    set(4, 5, re(-h));
    // ρ22
    set(5, 2, re(h));
    set(5, 4, re(h));
    set(5, 5, re(-k));
    // ρ23
    set(6, 3, re(h));
    set(6, 6, C64::new(-hk, -w));
    // ρ31
    set(7, 7, C64::new(0.0, w));
    set(7, 8, re(-h));
    // ρ32
    set(8, 7, re(h));
    set(8, 8, C64::new(-hk, w));
    // ρ33
    set(9, 5, re(k));

    Superoperator(a)
}

/// `F(t)` assembled entry by entry from the generating functions.
pub fn analytic_propagator(params: &SystemParams, t: f64) -> Result<Superoperator> {
    let gv = generating_values(params, t)?;
    Ok(propagator_from_values(params, &gv))
}

pub(crate) fn propagator_from_values(params: &SystemParams, gv: &GeneratingValues) -> Superoperator {
    let (lp, lm, l0) = (gv.lambda_plus, gv.lambda_minus, gv.lambda_zero);
    let phase = C64::from_polar(1.0, -params.omega * gv.time); // e^{-iωt}
    let phase_c = phase.conj();

    let mut f = SMatrix::<C64, 9, 9>::zeros();
    let mut set = |r: usize, c: usize, v: C64| f[(r - 1, c - 1)] = v;

    // Excitation block on (ρ11, ρ12, ρ21, ρ22) = columns (1, 2, 4, 5).
    let block = [
        (1, [lp * lp, -lp * l0, -lp * l0, l0 * l0]),
        (2, [lp * l0, -lm * lp, -l0 * l0, lm * l0]),
        (4, [lp * l0, -l0 * l0, -lm * lp, lm * l0]),
        (5, [l0 * l0, -lm * l0, -lm * l0, lm * lm]),
    ];
    for (row, vals) in block {
        for (col, v) in [1, 2, 4, 5].into_iter().zip(vals) {
            set(row, col, re(v));
        }
    }

    // Coherences with |g0⟩.
    set(3, 3, phase * lp);
    set(3, 6, -phase * l0);
    set(6, 3, phase * l0);
    set(6, 6, -phase * lm);
    set(7, 7, phase_c * lp);
    set(7, 8, -phase_c * l0);
    set(8, 7, phase_c * l0);
    set(8, 8, -phase_c * lm);

    // Ground-state population collects everything lost above.
    set(9, 1, re(gv.lam_cap_plus));
    set(9, 2, re(gv.cross));
    set(9, 4, re(gv.cross));
    set(9, 5, re(gv.lam_cap_minus));
    set(9, 9, re(1.0));

    Superoperator(f)
}

/// `devectorize(F(t) · vectorize(ρ0))` with the result checked against
/// [`Tolerances::DEFAULT`].
pub fn evolve_analytic(params: &SystemParams, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    evolve_analytic_with(params, rho0, t, true)
}

/// As [`evolve_analytic`]; `validate = false` skips both the input and the
/// output density checks.
pub fn evolve_analytic_with(
    params: &SystemParams,
    rho0: &DensityMatrix,
    t: f64,
    validate: bool,
) -> Result<DensityMatrix> {
    let tol = Tolerances::DEFAULT;
    if validate {
        require_density(rho0, &tol)?;
    }
    let f = analytic_propagator(params, t)?;
    let out = f.apply(&rho0.vectorize()).devectorize();
    if validate {
        // Eigenvalues of a freshly evolved state carry rounding from F; the
        // positivity bound used here is the one promised for evolutions.
        let report = validate_density(&out, &Tolerances { positivity: -1e-9, ..tol });
        if !report.passed() {
            return Err(Error::Consistency(format!(
                "analytic evolution to t = {t} left the density-matrix set: {}",
                report.describe()
            )));
        }
    }
    Ok(out)
}
