//! Generating functions Λ+, Λ−, Λ0 and the loss coefficients λ±.
//!
//! With `g(t) = e^{-κt/4}` and `z = (κ²/4 − Ω²) t² / 4` every regime is
//! covered by one pair of entire functions of `z`:
//!
//! ```text
//! C(z)  = cosh √z            (cos √−z   for z < 0)
//! Sc(z) = sinh √z / √z       (sin √−z / √−z for z < 0)
//!
//! Λ0 = g · (Ωt/2) · Sc(z)
//! Λ± = g · ((κt/4) · Sc(z) ± C(z))        = γΛ0 ± g·C
//! ```
//!
//! This avoids φ = arccosh γ entirely, has no division by Ω, and is smooth
//! through γ = 1 where both series are evaluated by their Taylor expansions.

use std::sync::OnceLock;

use crate::error::{check_finite, Error, Result};
use crate::model::SystemParams;

/// Below this |z| the Taylor expansions of `C` and `Sc` are used.
const SERIES_RADIUS: f64 = 1e-2;
const SERIES_TERMS: usize = 10;

/// Threshold under which `1 − Λ+² − Λ0²` loses too many digits and λ+ is
/// integrated instead.
const LOSS_DIRECT_MIN: f64 = 1e-3;

const GAUSS_ORDER: usize = 10;
const MAX_PANELS: usize = 20_000;

/// Generating functions and derived quantities at a single time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratingValues {
    /// Λ+
    pub lambda_plus: f64,
    /// Λ−
    pub lambda_minus: f64,
    /// Λ0
    pub lambda_zero: f64,
    /// g(t) = e^{−κt/4}
    pub envelope_g: f64,
    /// λ+ = 1 − Λ0² − Λ+²
    pub lam_cap_plus: f64,
    /// λ− = 1 − Λ0² − Λ−²
    pub lam_cap_minus: f64,
    /// 2γΛ0², the population lost from the ρ12 / ρ21 coherences.
    pub cross: f64,
    pub time: f64,
}

impl GeneratingValues {
    /// `λ+λ− − 4γ²Λ0⁴`, the squared radicand of the exact Kraus set.
    pub fn discriminant(&self) -> f64 {
        self.lam_cap_plus * self.lam_cap_minus - self.cross * self.cross
    }
}

/// Which rate is switched off in a closed-form limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitCase {
    /// Ω → 0: atom and cavity decouple.
    CouplingOff,
    /// κ → 0: closed atom–cavity system.
    DecayOff,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GenfunOptions {
    /// Accept `t < 0`. The formulas are total; the physical map is not.
    pub allow_negative_time: bool,
}

pub fn generating_values(params: &SystemParams, t: f64) -> Result<GeneratingValues> {
    generating_values_with(params, t, GenfunOptions::default())
}

pub fn generating_values_with(
    params: &SystemParams,
    t: f64,
    opts: GenfunOptions,
) -> Result<GeneratingValues> {
    let t = check_finite("t", t)?;
    if t < 0.0 && !opts.allow_negative_time {
        return Err(Error::Parameter {
            field: "t",
            value: t,
            reason: "negative times are rejected",
        });
    }
    Ok(evaluate(params.kappa, params.rabi, t))
}

fn evaluate(kappa: f64, rabi: f64, t: f64) -> GeneratingValues {
    let core = Core::at(kappa, rabi, t);
    let (lp, lm, l0) = (core.plus(), core.minus(), core.zero());

    let direct = 1.0 - l0 * l0 - lp * lp;
    let lam_cap_plus = if direct >= LOSS_DIRECT_MIN {
        direct
    } else {
        kappa * integrate(t, 0.5 * kappa + rabi, |u| {
            let z = Core::at(kappa, rabi, u).zero();
            z * z
        })
    };
    let lam_cap_minus = 1.0 - l0 * l0 - lm * lm;
    let cross = kappa * rabi * t * t * 0.25 * core.g_shc * core.g_shc;

    GeneratingValues {
        lambda_plus: lp,
        lambda_minus: lm,
        lambda_zero: l0,
        envelope_g: (-0.25 * kappa * t).exp(),
        lam_cap_plus,
        lam_cap_minus,
        cross,
        time: t,
    }
}

/// Closed forms with one rate switched off. The rate being switched off is ignored.
pub fn limit_case(params: &SystemParams, t: f64, case: LimitCase) -> GeneratingValues {
    let (lp, lm, l0, g) = match case {
        LimitCase::CouplingOff => (1.0, -(-0.5 * params.kappa * t).exp(), 0.0, (-0.25 * params.kappa * t).exp()),
        LimitCase::DecayOff => {
            let (s, c) = (0.5 * params.rabi * t).sin_cos();
            (c, -c, s, 1.0)
        }
    };
    GeneratingValues {
        lambda_plus: lp,
        lambda_minus: lm,
        lambda_zero: l0,
        envelope_g: g,
        lam_cap_plus: 1.0 - l0 * l0 - lp * lp,
        lam_cap_minus: 1.0 - l0 * l0 - lm * lm,
        // γΛ0² vanishes in both limits: Λ0 = 0, or γ = 0.
        cross: 0.0,
        time: t,
    }
}

/// `g·C(z)` and `g·Sc(z)` at one time, plus the prefactors they multiply.
struct Core {
    g_ch: f64,
    g_shc: f64,
    quarter_kappa_t: f64,
    half_rabi_t: f64,
}

impl Core {
    fn at(kappa: f64, rabi: f64, t: f64) -> Self {
        let a = 0.25 * kappa * t;
        let z = (0.5 * kappa - rabi) * (0.5 * kappa + rabi) * t * t * 0.25;
        let (g_ch, g_shc) = if z.abs() < SERIES_RADIUS {
            let (ch, shc) = series(z);
            let g = (-a).exp();
            (g * ch, g * shc)
        } else if z > 0.0 {
            // x ≤ |a|, so neither exponent overflows for t ≥ 0.
            let x = z.sqrt();
            let up = (x - a).exp();
            let down = (-x - a).exp();
            (0.5 * (up + down), 0.5 * (up - down) / x)
        } else {
            let x = (-z).sqrt();
            let g = (-a).exp();
            let (s, c) = x.sin_cos();
            (g * c, g * s / x)
        };
        Self {
            g_ch,
            g_shc,
            quarter_kappa_t: a,
            half_rabi_t: 0.5 * rabi * t,
        }
    }

    fn zero(&self) -> f64 {
        self.half_rabi_t * self.g_shc
    }

    fn plus(&self) -> f64 {
        self.quarter_kappa_t * self.g_shc + self.g_ch
    }

    fn minus(&self) -> f64 {
        self.quarter_kappa_t * self.g_shc - self.g_ch
    }
}

/// `(Σ z^k/(2k)!, Σ z^k/(2k+1)!)`.
fn series(z: f64) -> (f64, f64) {
    let mut ch = 0.0;
    let mut shc = 0.0;
    let mut term_even = 1.0; // z^k / (2k)!
    for k in 0..SERIES_TERMS {
        let term_odd = term_even / (2 * k + 1) as f64;
        ch += term_even;
        shc += term_odd;
        term_even = term_odd * z / (2 * k + 2) as f64;
    }
    (ch, shc)
}

/// Composite Gauss–Legendre quadrature of `f` over `[0, t]`, with panels no
/// wider than `1 / rate`.
fn integrate(t: f64, rate: f64, f: impl Fn(f64) -> f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let (nodes, weights) = gauss_legendre();
    let panels = ((t.abs() * rate).ceil() as usize).clamp(1, MAX_PANELS);
    let h = t / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        let mut acc = 0.0;
        for (x, w) in nodes.iter().zip(weights.iter()) {
            acc += w * f(mid + 0.5 * h * x);
        }
        total += 0.5 * h * acc;
    }
    total
}

/// Nodes and weights on `[-1, 1]`, found by Newton iteration on `P_n`.
fn gauss_legendre() -> &'static ([f64; GAUSS_ORDER], [f64; GAUSS_ORDER]) {
    static RULE: OnceLock<([f64; GAUSS_ORDER], [f64; GAUSS_ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GAUSS_ORDER;
        let mut nodes = [0.0; GAUSS_ORDER];
        let mut weights = [0.0; GAUSS_ORDER];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
