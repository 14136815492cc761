//! Physical parameters, density matrices and their vectorized form.
//!
//! Basis convention used throughout the crate (row/column index 0, 1, 2):
//!
//! | index | ket   | meaning                              |
//! |-------|-------|--------------------------------------|
//! | 0     | `|e0⟩` | excited atom, empty cavity           |
//! | 1     | `|g1⟩` | ground-state atom, one cavity photon |
//! | 2     | `|g0⟩` | ground-state atom, empty cavity      |
//!
//! Mathematical 1-based labels `ρ_kl` map to `(k - 1, l - 1)`.

use std::fmt;

use nalgebra::SVector;

use crate::error::{check_finite, check_rate, Error, Result};
use crate::linalg::{hermitian_eigenvalues, CMatrix3, C64};

/// Numerical tolerances shared by validation and the acceptance checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Allowed `|Tr ρ - 1|`.
    pub trace: f64,
    /// Allowed `max |ρ - ρ†|`.
    pub hermiticity: f64,
    /// Smallest eigenvalue still counted as non-negative.
    pub positivity: f64,
    /// Half-width of the critical band around `γ = 1`.
    pub critical: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        trace: 1e-10,
        hermiticity: 1e-12,
        positivity: -1e-10,
        critical: 1e-9,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Damping regime set by `γ = κ / 2Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `γ < 1`: damped Rabi oscillation.
    Oscillatory,
    /// `γ = 1` within [`Tolerances::critical`].
    Critical,
    /// `γ > 1`: overdamped.
    Dissipative,
    /// `Ω = 0`: atom and cavity evolve independently.
    Uncoupled,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::Oscillatory => "oscillatory",
            Regime::Critical => "critical",
            Regime::Dissipative => "dissipative",
            Regime::Uncoupled => "uncoupled",
        };
        f.write_str(s)
    }
}

/// Rates of the resonant atom–cavity–reservoir model (`ħ = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Cavity decay rate κ.
    pub kappa: f64,
    /// Atom–cavity coupling Ω.
    pub rabi: f64,
    /// Common atomic / cavity frequency ω.
    pub omega: f64,
    /// `κ / 2Ω`; `None` when the coupling vanishes.
    pub gamma: Option<f64>,
    pub regime: Regime,
}

impl SystemParams {
    /// Validates the rates and classifies the regime.
    pub fn new(kappa: f64, rabi: f64, omega: f64) -> Result<Self> {
        let kappa = check_rate("kappa", kappa)?;
        let rabi = check_rate("rabi", rabi)?;
        let omega = check_rate("omega", omega)?;

        if rabi == 0.0 {
            return Ok(Self {
                kappa,
                rabi,
                omega,
                gamma: None,
                regime: Regime::Uncoupled,
            });
        }
        let gamma = kappa / (2.0 * rabi);
        Ok(Self {
            kappa,
            rabi,
            omega,
            gamma: Some(gamma),
            regime: classify(gamma, Tolerances::DEFAULT.critical),
        })
    }

    /// The rates used for the figures: κ = 2, Ω = 4, ω = 2.
    pub fn reference() -> Self {
        Self::new(2.0, 4.0, 2.0).expect("reference parameters are valid")
    }

    /// Largest of the three rates.
    pub fn max_rate(&self) -> f64 {
        self.kappa.max(self.rabi).max(self.omega)
    }
}

/// Same as [`SystemParams::new`].
pub fn make_params(kappa: f64, rabi: f64, omega: f64) -> Result<SystemParams> {
    SystemParams::new(kappa, rabi, omega)
}

pub(crate) fn classify(gamma: f64, eps: f64) -> Regime {
    if (gamma - 1.0).abs() <= eps {
        Regime::Critical
    } else if gamma < 1.0 {
        Regime::Oscillatory
    } else {
        Regime::Dissipative
    }
}

/// A 3×3 density matrix in the `{|e0⟩, |g1⟩, |g0⟩}` basis.
///
/// Construction does not enforce the density-matrix invariants; use
/// [`validate_density`] where that matters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(CMatrix3);

impl DensityMatrix {
    pub fn from_matrix(m: CMatrix3) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &CMatrix3 {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix3 {
        self.0
    }

    /// `|k⟩⟨k|` for basis index `k ∈ {0, 1, 2}`.
    pub fn basis_projector(k: usize) -> Self {
        assert!(k < 3, "basis index out of range");
        let mut m = CMatrix3::zeros();
        m[(k, k)] = C64::new(1.0, 0.0);
        Self(m)
    }

    /// `|g0⟩⟨g0|`, the stationary state of the full dynamics.
    pub fn ground() -> Self {
        Self::basis_projector(2)
    }

    pub fn maximally_mixed() -> Self {
        Self(CMatrix3::identity() * C64::new(1.0 / 3.0, 0.0))
    }

    /// `(sin θ |e⟩ + cos θ |g⟩) ⊗ |0⟩` as a projector.
    pub fn initial_state(theta: f64) -> Result<Self> {
        let theta = check_finite("theta", theta)?;
        let (s, c) = theta.sin_cos();
        let mut m = CMatrix3::zeros();
        m[(0, 0)] = C64::new(s * s, 0.0);
        m[(0, 2)] = C64::new(c * s, 0.0);
        m[(2, 0)] = C64::new(c * s, 0.0);
        m[(2, 2)] = C64::new(c * c, 0.0);
        Ok(Self(m))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Entry `ρ_kl` with 0-based indices.
    pub fn get(&self, k: usize, l: usize) -> C64 {
        self.0[(k, l)]
    }

    /// Replaces the matrix by its Hermitian part and returns `max |ρ - ρ†| / 2`.
    pub(crate) fn symmetrize(&mut self) -> f64 {
        let adj = self.0.adjoint();
        let defect = crate::linalg::max_abs_diff(&self.0, &adj) * 0.5;
        self.0 = (self.0 + adj) * C64::new(0.5, 0.0);
        defect
    }

    pub fn vectorize(&self) -> VectorizedState {
        VectorizedState(SVector::from_iterator(self.0.transpose().iter().copied()))
    }
}

/// Same as [`DensityMatrix::initial_state`].
pub fn initial_state(theta: f64) -> Result<DensityMatrix> {
    DensityMatrix::initial_state(theta)
}

/// `(ρ11, ρ12, ρ13, ρ21, ρ22, ρ23, ρ31, ρ32, ρ33)`: row-major flattening.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorizedState(pub SVector<C64, 9>);

impl VectorizedState {
    pub fn devectorize(&self) -> DensityMatrix {
        DensityMatrix(CMatrix3::from_row_slice(self.0.as_slice()))
    }

    pub fn components(&self) -> &SVector<C64, 9> {
        &self.0
    }
}

pub fn vectorize(rho: &DensityMatrix) -> VectorizedState {
    rho.vectorize()
}

pub fn devectorize(v: &VectorizedState) -> DensityMatrix {
    v.devectorize()
}

/// Outcome of [`validate_density`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub trace_deviation: f64,
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
    pub trace_ok: bool,
    pub hermitian_ok: bool,
    pub positive_ok: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.trace_ok && self.hermitian_ok && self.positive_ok
    }

    pub fn describe(&self) -> String {
        format!(
            "trace deviation {:e}, hermiticity defect {:e}, min eigenvalue {:e}",
            self.trace_deviation, self.hermiticity_defect, self.min_eigenvalue
        )
    }
}

pub fn validate_density(rho: &DensityMatrix, tol: &Tolerances) -> ValidationReport {
    let m = rho.matrix();
    let trace_deviation = (m.trace() - C64::new(1.0, 0.0)).norm();
    let hermiticity_defect = crate::linalg::max_abs_diff(m, &m.adjoint());
    let min_eigenvalue = hermitian_eigenvalues(m)[0];
    ValidationReport {
        trace_deviation,
        hermiticity_defect,
        min_eigenvalue,
        trace_ok: trace_deviation <= tol.trace,
        hermitian_ok: hermiticity_defect <= tol.hermiticity,
        positive_ok: min_eigenvalue >= tol.positivity,
    }
}

pub(crate) fn require_density(rho: &DensityMatrix, tol: &Tolerances) -> Result<()> {
    let report = validate_density(rho, tol);
    if report.passed() {
        Ok(())
    } else {
        Err(Error::InvalidState(report.describe()))
    }
}
