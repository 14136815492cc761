//! Kraus representations of the dynamics.
//!
//! * [`exact_kraus`]: a three-operator set `{K0, K1, K2}` reproducing `F(t)`
//!   at any time.
//! * [`differential_kraus`]: the first-order set `{I + Aτ, L_μ√τ}` whose
//!   repeated application ([`evolve_discrete`]) approximates the continuous
//!   evolution with step `τ = t/n`.

use crate::error::{Error, Result};
use crate::genfun::generating_values;
use crate::linalg::{spectral_norm, CMatrix3, C64};
use crate::model::{validate_density, DensityMatrix, SystemParams, Tolerances, ValidationReport};

/// Below this λ+ the exact K1/K2 entries are 0/0 and the jump rows are taken
/// from the small-time limit instead.
pub const LOSS_REGULARIZATION: f64 = 1e-24;

/// Negative discriminants down to this value are rounding and clamp to zero.
pub const DISCRIMINANT_FLOOR: f64 = -1e-10;

/// Total trace drift that triggers a warning in [`evolve_discrete`].
pub const TRACE_DRIFT_WARNING: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KrausKind {
    /// `K_μ(t)` from the generating functions.
    Exact { t: f64 },
    /// First-order step operators with step `tau`.
    Differential { tau: f64 },
    /// Anything assembled by hand.
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    operators: Vec<CMatrix3>,
    kind: KrausKind,
    completeness_defect: f64,
}

impl KrausSet {
    pub fn new(operators: Vec<CMatrix3>, kind: KrausKind) -> Self {
        let completeness_defect = defect_of(&operators);
        Self {
            operators,
            kind,
            completeness_defect,
        }
    }

    pub fn operators(&self) -> &[CMatrix3] {
        &self.operators
    }

    pub fn kind(&self) -> KrausKind {
        self.kind
    }

    /// `‖Σ K†K − I‖₂`, computed at construction.
    pub fn completeness_defect(&self) -> f64 {
        self.completeness_defect
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }
}

fn defect_of(ops: &[CMatrix3]) -> f64 {
    let sum = ops
        .iter()
        .fold(CMatrix3::zeros(), |acc, k| acc + k.adjoint() * k);
    spectral_norm(&(sum - CMatrix3::identity()))
}

pub fn completeness_defect(kset: &KrausSet) -> f64 {
    defect_of(&kset.operators)
}

/// Jump amplitudes ℓ_μ, each placed at position (3, 2) of its `L_μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpSpec {
    amplitudes: Vec<C64>,
}

impl JumpSpec {
    /// ℓ1 = −(√3−1)√κ / 2√2, ℓ2 = −(√3+1)√κ / 2√2: the small-time limit of
    /// the exact K1, K2.
    pub fn split(kappa: f64) -> Self {
        let root = kappa.sqrt() / (2.0 * std::f64::consts::SQRT_2);
        let s3 = 3f64.sqrt();
        Self {
            amplitudes: vec![C64::new(-(s3 - 1.0) * root, 0.0), C64::new(-(s3 + 1.0) * root, 0.0)],
        }
    }

    /// A single jump ℓ = √κ.
    pub fn single(kappa: f64) -> Self {
        Self {
            amplitudes: vec![C64::new(kappa.sqrt(), 0.0)],
        }
    }

    /// Arbitrary amplitudes; must satisfy `Σ|ℓ|² = κ`.
    pub fn custom(amplitudes: Vec<C64>, kappa: f64) -> Result<Self> {
        let spec = Self { amplitudes };
        spec.check(kappa)?;
        Ok(spec)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn total_rate(&self) -> f64 {
        self.amplitudes.iter().map(|l| l.norm_sqr()).sum()
    }

    pub fn check(&self, kappa: f64) -> Result<()> {
        let excess = self.total_rate() - kappa;
        if excess.abs() <= 1e-12 * kappa.max(1.0) {
            Ok(())
        } else {
            Err(Error::Normalization { excess })
        }
    }
}

/// `K0 = [[Λ+, −Λ0, 0], [Λ0, −Λ−, 0], [0, 0, e^{iωt}]]` and two jump
/// operators whose only non-zero row is the third:
/// `(−√(λ+/2), (−2γΛ0² ± √(λ+λ− − 4γ²Λ0⁴)) / √(2λ+), 0)`.
pub fn exact_kraus(params: &SystemParams, t: f64) -> Result<KrausSet> {
    let gv = generating_values(params, t)?;
    let (lp, lm, l0) = (gv.lambda_plus, gv.lambda_minus, gv.lambda_zero);

    let mut k0 = CMatrix3::zeros();
    k0[(0, 0)] = C64::new(lp, 0.0);
    k0[(0, 1)] = C64::new(-l0, 0.0);
    k0[(1, 0)] = C64::new(l0, 0.0);
    k0[(1, 1)] = C64::new(-lm, 0.0);
    k0[(2, 2)] = C64::from_polar(1.0, params.omega * t);

    let disc = gv.discriminant();
    if disc < DISCRIMINANT_FLOOR {
        return Err(Error::Regime {
            t,
            kappa: params.kappa,
            rabi: params.rabi,
            discriminant: disc,
        });
    }
    let root = disc.max(0.0).sqrt();

    let (first, second) = if gv.lam_cap_plus > LOSS_REGULARIZATION {
        let a = -(0.5 * gv.lam_cap_plus).sqrt();
        let denom = (2.0 * gv.lam_cap_plus).sqrt();
        ((a, (-gv.cross + root) / denom), (a, (-gv.cross - root) / denom))
    } else if params.kappa > 0.0 {
        // ℓ_μ √(λ−/κ): equals ℓ_μ √t as t → 0 and keeps Σ|b|² = λ−.
        let scale = (gv.lam_cap_minus.max(0.0) / params.kappa).sqrt();
        let jumps = JumpSpec::split(params.kappa);
        ((0.0, jumps.amplitudes[0].re * scale), (0.0, jumps.amplitudes[1].re * scale))
    } else {
        ((0.0, 0.0), (0.0, 0.0))
    };

    let jump = |(a, b): (f64, f64)| {
        let mut k = CMatrix3::zeros();
        k[(2, 0)] = C64::new(a, 0.0);
        k[(2, 1)] = C64::new(b, 0.0);
        k
    };

    Ok(KrausSet::new(vec![k0, jump(first), jump(second)], KrausKind::Exact { t }))
}

/// The 3×3 no-jump generator `[[0, −Ω/2, 0], [Ω/2, −κ/2, 0], [0, 0, iω]]`.
pub fn no_jump_generator(params: &SystemParams) -> CMatrix3 {
    let mut a = CMatrix3::zeros();
    a[(0, 1)] = C64::new(-0.5 * params.rabi, 0.0);
    a[(1, 0)] = C64::new(0.5 * params.rabi, 0.0);
    a[(1, 1)] = C64::new(-0.5 * params.kappa, 0.0);
    a[(2, 2)] = C64::new(0.0, params.omega);
    a
}

/// `{I + Aτ} ∪ {L_μ √τ}`.
pub fn differential_kraus(params: &SystemParams, tau: f64, jumps: &JumpSpec) -> Result<KrausSet> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::Parameter {
            field: "tau",
            value: tau,
            reason: "must be positive and finite",
        });
    }
    jumps.check(params.kappa)?;

    let k0 = CMatrix3::identity() + no_jump_generator(params) * C64::new(tau, 0.0);
    let sqrt_tau = tau.sqrt();
    let mut ops = Vec::with_capacity(1 + jumps.amplitudes.len());
    ops.push(k0);
    for l in &jumps.amplitudes {
        let mut k = CMatrix3::zeros();
        k[(2, 1)] = l * sqrt_tau;
        ops.push(k);
    }
    Ok(KrausSet::new(ops, KrausKind::Differential { tau }))
}

/// `Σ K ρ K†`, returned together with the Hermiticity defect removed by
/// symmetrizing the result.
pub fn apply_channel_with_defect(kset: &KrausSet, rho: &DensityMatrix) -> (DensityMatrix, f64) {
    let m = rho.matrix();
    let sum = kset
        .operators
        .iter()
        .fold(CMatrix3::zeros(), |acc, k| acc + k * m * k.adjoint());
    let mut out = DensityMatrix::from_matrix(sum);
    let defect = out.symmetrize();
    if defect > 0.0 {
        log::trace!("channel output symmetrized, hermiticity defect {defect:e}");
    }
    (out, defect)
}

pub fn apply_channel(kset: &KrausSet, rho: &DensityMatrix) -> DensityMatrix {
    apply_channel_with_defect(kset, rho).0
}

/// Each summand `K_μ ρ K_μ†` separately.
pub fn operator_contributions(kset: &KrausSet, rho: &DensityMatrix) -> Vec<DensityMatrix> {
    let m = rho.matrix();
    kset.operators
        .iter()
        .map(|k| DensityMatrix::from_matrix(k * m * k.adjoint()))
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DiscreteOptions {
    /// Divide by the trace after every step.
    pub renormalize: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepDiagnostics {
    pub steps: usize,
    pub tau: f64,
    /// `|Tr ρ_{k+1} − Tr ρ_k|` before any renormalization, one per step.
    pub step_drift: Vec<f64>,
    /// `|Tr ρ − 1|` of the returned state.
    pub final_trace_deviation: f64,
    /// Largest Hermiticity defect removed by symmetrization.
    pub max_hermiticity_defect: f64,
    pub renormalized: bool,
    pub final_report: ValidationReport,
    pub warnings: Vec<String>,
}

impl StepDiagnostics {
    pub fn max_step_drift(&self) -> f64 {
        self.step_drift.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteEvolution {
    pub state: DensityMatrix,
    pub diagnostics: StepDiagnostics,
}

/// Applies the differential Kraus set with `τ = t/n` to `rho0`, `n` times.
pub fn evolve_discrete(
    params: &SystemParams,
    rho0: &DensityMatrix,
    t: f64,
    n: usize,
    jumps: &JumpSpec,
    opts: DiscreteOptions,
) -> Result<DiscreteEvolution> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Parameter {
            field: "t",
            value: t,
            reason: "must be positive and finite",
        });
    }
    if n == 0 {
        return Err(Error::Parameter {
            field: "n",
            value: 0.0,
            reason: "at least one step is required",
        });
    }
    let tau = t / n as f64;
    let kset = differential_kraus(params, tau, jumps)?;

    let mut rho = *rho0;
    let mut trace = rho.trace().re;
    let mut step_drift = Vec::with_capacity(n);
    let mut max_herm: f64 = 0.0;
    let mut warnings = Vec::new();

    for step in 0..n {
        let (next, defect) = apply_channel_with_defect(&kset, &rho);
        max_herm = max_herm.max(defect);
        let next_trace = next.trace().re;
        step_drift.push((next_trace - trace).abs());
        rho = next;
        if opts.renormalize && next_trace != 0.0 {
            rho = DensityMatrix::from_matrix(rho.into_matrix() / C64::new(next_trace, 0.0));
            trace = 1.0;
        } else {
            trace = next_trace;
        }
        if warnings.is_empty() && (trace - 1.0).abs() > TRACE_DRIFT_WARNING {
            let msg = format!("trace drifted to {trace} after {} of {n} steps", step + 1);
            log::warn!("{msg}");
            warnings.push(msg);
        }
    }

    let final_report = validate_density(&rho, &Tolerances::DEFAULT);
    Ok(DiscreteEvolution {
        state: rho,
        diagnostics: StepDiagnostics {
            steps: n,
            tau,
            step_drift,
            final_trace_deviation: final_report.trace_deviation,
            max_hermiticity_defect: max_herm,
            renormalized: opts.renormalize,
            final_report,
            warnings,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::model::{initial_state, make_params};
    use crate::propagator::evolve_analytic;

    #[test]
    fn exact_set_at_time_zero_is_identity_channel() {
        let p = SystemParams::reference();
        let k = exact_kraus(&p, 0.0).unwrap();
        assert_eq!(k.operators()[0], CMatrix3::identity());
        assert_eq!(k.operators()[1], CMatrix3::zeros());
        assert_eq!(k.operators()[2], CMatrix3::zeros());
        assert_eq!(k.completeness_defect(), 0.0);
    }

    #[test]
    fn exact_set_is_complete_at_reference_point() {
        let k = exact_kraus(&SystemParams::reference(), 1.0).unwrap();
        assert!(k.completeness_defect() <= 1e-12, "{}", k.completeness_defect());
    }

    #[test]
    fn exact_phase_entry() {
        let p = SystemParams::reference();
        for t in [0.0, 0.4, 2.2] {
            let k = exact_kraus(&p, t).unwrap();
            assert_eq!(k.operators()[0][(2, 2)], C64::from_polar(1.0, p.omega * t));
        }
    }

    #[test]
    fn exact_jump_rows_approach_split_amplitudes() {
        // For small t the exact jump entries behave as ℓ_μ √t.
        let p = SystemParams::reference();
        let t = 1e-6;
        let k = exact_kraus(&p, t).unwrap();
        let jumps = JumpSpec::split(p.kappa);
        for (op, l) in k.operators()[1..].iter().zip(jumps.amplitudes()) {
            let b = op[(2, 1)].re / t.sqrt();
            assert!((b - l.re).abs() < 1e-4 * l.re.abs(), "{b} vs {}", l.re);
        }
    }

    #[test]
    fn exact_set_without_coupling_uses_regularized_rows() {
        let p = make_params(2.0, 0.0, 1.0).unwrap();
        let k = exact_kraus(&p, 0.7).unwrap();
        assert!(k.completeness_defect() < 1e-15);
        assert!(k.operators()[1][(2, 0)] == C64::new(0.0, 0.0));
    }

    #[test]
    fn split_jumps_are_normalized() {
        let j = JumpSpec::split(2.0);
        let l: Vec<f64> = j.amplitudes().iter().map(|z| z.re).collect();
        let root = 2f64.sqrt() / (2.0 * 2f64.sqrt());
        assert!((l[0] + (3f64.sqrt() - 1.0) * root).abs() < 1e-16);
        assert!((l[1] + (3f64.sqrt() + 1.0) * root).abs() < 1e-16);
        assert!((l[0] * l[0] + l[1] * l[1] - 2.0).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn single_jump_set_has_two_operators() {
        let p = SystemParams::reference();
        let k = differential_kraus(&p, 0.01, &JumpSpec::single(p.kappa)).unwrap();
        assert_eq!(k.len(), 2);
    }

    #[test]
    fn differential_errors() {
        let p = SystemParams::reference();
        assert!(matches!(
            differential_kraus(&p, 0.0, &JumpSpec::split(p.kappa)),
            Err(Error::Parameter { field: "tau", .. })
        ));
        let bad = JumpSpec { amplitudes: vec![C64::new(1.0, 0.0)] };
        match differential_kraus(&p, 0.01, &bad) {
            Err(Error::Normalization { excess }) => assert!((excess + 1.0).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
        assert!(JumpSpec::custom(vec![C64::new(0.0, 2f64.sqrt())], 2.0).is_ok());
    }

    #[test]
    fn differential_defect_is_second_order() {
        let p = SystemParams::reference();
        let tau = 0.01;
        let k = differential_kraus(&p, tau, &JumpSpec::split(p.kappa)).unwrap();
        // Σ K†K − I = τ² A†A exactly.
        let a = no_jump_generator(&p);
        let expected = spectral_norm(&(a.adjoint() * a)) * tau * tau;
        assert!((k.completeness_defect() - expected).abs() < 1e-15);
        assert!(k.completeness_defect() > 1e-4 && k.completeness_defect() < 1e-3);
    }

    #[test]
    fn identity_channel() {
        let k = KrausSet::new(vec![CMatrix3::identity()], KrausKind::Custom);
        let rho = initial_state(0.4).unwrap();
        assert_eq!(apply_channel(&k, &rho), rho);
        assert_eq!(completeness_defect(&k), 0.0);
    }

    #[test]
    fn exact_channel_reproduces_propagator() {
        let p = SystemParams::reference();
        let rho = initial_state(1.1).unwrap();
        for t in [0.05, 0.5, 1.0, 2.9] {
            let via_kraus = apply_channel(&exact_kraus(&p, t).unwrap(), &rho);
            let via_f = evolve_analytic(&p, &rho, t).unwrap();
            assert!(max_abs_diff(via_kraus.matrix(), via_f.matrix()) < 1e-13);
        }
    }

    #[test]
    fn exact_channel_fixes_ground_state() {
        let p = SystemParams::reference();
        let out = apply_channel(&exact_kraus(&p, 1.3).unwrap(), &DensityMatrix::ground());
        assert!(max_abs_diff(out.matrix(), DensityMatrix::ground().matrix()) < 1e-15);
    }

    #[test]
    fn single_small_step_matches_analytic() {
        let p = SystemParams::reference();
        let rho = initial_state(0.9).unwrap();
        let tau = 1e-4;
        let d = evolve_discrete(&p, &rho, tau, 1, &JumpSpec::split(p.kappa), DiscreteOptions::default()).unwrap();
        let a = evolve_analytic(&p, &rho, tau).unwrap();
        let err = spectral_norm(&(d.state.matrix() - a.matrix()));
        assert!(err < 1e-7, "{err}");
    }

    #[test]
    fn discrete_argument_errors() {
        let p = SystemParams::reference();
        let rho = initial_state(0.9).unwrap();
        let j = JumpSpec::split(p.kappa);
        assert!(evolve_discrete(&p, &rho, 1.0, 0, &j, DiscreteOptions::default()).is_err());
        assert!(evolve_discrete(&p, &rho, 0.0, 5, &j, DiscreteOptions::default()).is_err());
    }

    #[test]
    fn renormalization_restores_unit_trace() {
        let p = SystemParams::reference();
        let rho = initial_state(0.9).unwrap();
        let j = JumpSpec::split(p.kappa);
        let raw = evolve_discrete(&p, &rho, 1.0, 50, &j, DiscreteOptions::default()).unwrap();
        assert!(raw.diagnostics.final_trace_deviation > 1e-3);
        let opts = DiscreteOptions { renormalize: true };
        let norm = evolve_discrete(&p, &rho, 1.0, 50, &j, opts).unwrap();
        assert!(norm.diagnostics.final_trace_deviation < 1e-14);
        assert!(norm.diagnostics.renormalized);
        assert_eq!(norm.diagnostics.step_drift.len(), 50);
    }

    #[test]
    fn large_drift_emits_warning() {
        let p = make_params(2.0, 4.0, 20.0).unwrap();
        let rho = DensityMatrix::ground();
        let out = evolve_discrete(&p, &rho, 1.0, 2, &JumpSpec::split(p.kappa), DiscreteOptions::default()).unwrap();
        assert_eq!(out.diagnostics.warnings.len(), 1);
    }
}
