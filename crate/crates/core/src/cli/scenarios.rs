//! The `evolve`, `compare` and `kraus-dump` runs, writing CSV to any sink.

use std::cmp::Ordering;
use std::io::Write;

use rayon::prelude::*;

use super::config::{OperatorNorm, ScenarioConfig};
use super::CliError;
use crate::genfun::generating_values;
use crate::kraus::{exact_kraus, operator_contributions, DiscreteOptions};
use crate::linalg::spectral_norm;
use crate::metrics::{compare, log_log_slope, EvolutionRecord};
use crate::model::{validate_density, DensityMatrix, SystemParams, Tolerances};
use crate::propagator::evolve_analytic_with;

/// Tolerances applied to every emitted state.
pub const EMISSION_TOLERANCES: Tolerances = Tolerances {
    trace: 1e-10,
    hermiticity: 1e-12,
    positivity: -1e-9,
    critical: 1e-9,
};

fn params_of(cfg: &ScenarioConfig) -> Result<SystemParams, CliError> {
    Ok(SystemParams::new(cfg.kappa, cfg.rabi, cfg.omega)?)
}

fn by_grid(a: (f64, f64, usize), b: (f64, f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2))
}

/// One row of the `evolve` table.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolveRow {
    pub theta: f64,
    pub t: f64,
    pub state: DensityMatrix,
    pub norm: f64,
    pub trace_dev: f64,
    pub min_eig: f64,
    pub operator_norms: Option<Vec<f64>>,
    pub valid: bool,
}

pub fn evolve_header(per_operator: bool) -> String {
    let mut cols = vec!["theta".to_string(), "t".into(), "norm".into()];
    for r in 1..=3 {
        for c in 1..=3 {
            cols.push(format!("re_{r}{c}"));
            cols.push(format!("im_{r}{c}"));
        }
    }
    cols.push("trace_dev".into());
    cols.push("min_eig".into());
    if per_operator {
        cols.extend(["k0_norm".into(), "k1_norm".into(), "k2_norm".into()]);
    }
    cols.push("valid".into());
    cols.join(",")
}

impl EvolveRow {
    pub fn to_csv(&self) -> String {
        let mut f = vec![self.theta.to_string(), self.t.to_string(), self.norm.to_string()];
        for r in 0..3 {
            for c in 0..3 {
                let z = self.state.get(r, c);
                f.push(z.re.to_string());
                f.push(z.im.to_string());
            }
        }
        f.push(self.trace_dev.to_string());
        f.push(self.min_eig.to_string());
        if let Some(norms) = &self.operator_norms {
            f.extend(norms.iter().map(|x| x.to_string()));
        }
        f.push(u8::from(self.valid).to_string());
        f.join(",")
    }
}

/// Analytic ρ(t) over the θ × t grid.
pub fn evolve_rows(cfg: &ScenarioConfig) -> Result<Vec<EvolveRow>, CliError> {
    let params = params_of(cfg)?;
    let thetas = cfg.theta.values();
    let times = cfg.evolve_times().values();
    let grid: Vec<(f64, f64)> = thetas
        .iter()
        .flat_map(|&th| times.iter().map(move |&t| (th, t)))
        .collect();

    let mut rows = grid
        .par_iter()
        .map(|&(theta, t)| evolve_point(cfg, &params, theta, t))
        .collect::<Result<Vec<_>, CliError>>()?;
    rows.sort_by(|a, b| by_grid((a.theta, a.t, 0), (b.theta, b.t, 0)));
    Ok(rows)
}

fn evolve_point(cfg: &ScenarioConfig, params: &SystemParams, theta: f64, t: f64) -> Result<EvolveRow, CliError> {
    let rho0 = DensityMatrix::initial_state(theta)?;
    let state = evolve_analytic_with(params, &rho0, t, false)?;
    let report = validate_density(&state, &EMISSION_TOLERANCES);

    let operator_norms = if cfg.per_operator {
        let kset = exact_kraus(params, t)?;
        let norms = match cfg.operator_norm {
            OperatorNorm::Sandwich => operator_contributions(&kset, &rho0)
                .iter()
                .map(|c| spectral_norm(c.matrix()))
                .collect(),
            OperatorNorm::Left => kset
                .operators()
                .iter()
                .map(|k| spectral_norm(&(k * rho0.matrix())))
                .collect(),
        };
        Some(norms)
    } else {
        None
    };

    Ok(EvolveRow {
        theta,
        t,
        norm: spectral_norm(state.matrix()),
        state,
        trace_dev: report.trace_deviation,
        min_eig: report.min_eigenvalue,
        operator_norms,
        valid: report.passed(),
    })
}

pub fn run_evolve(cfg: &ScenarioConfig, out: &mut dyn Write) -> Result<usize, CliError> {
    let rows = evolve_rows(cfg)?;
    writeln!(out, "{}", evolve_header(cfg.per_operator))?;
    for row in &rows {
        writeln!(out, "{}", row.to_csv())?;
    }
    out.flush()?;
    Ok(rows.len())
}

pub const COMPARE_HEADER: &str = "theta,t,n,norm_analytic,norm_discrete,distance,re_signed,re_abs,re_approx";

pub fn compare_row(r: &EvolutionRecord) -> String {
    [
        r.theta,
        r.t,
        r.n as f64,
        r.norm_analytic,
        r.norm_discrete,
        r.distance,
        r.relative_error,
        r.relative_error_abs(),
        r.re_approx,
    ]
    .iter()
    .map(|x| x.to_string())
    .collect::<Vec<_>>()
    .join(",")
}

/// Fitted `|RE|` vs `n` slopes, one per `(θ, t)` group.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareSummary {
    pub rows: usize,
    pub slopes: Vec<(f64, f64, Option<f64>)>,
}

impl CompareSummary {
    pub fn report(&self) -> String {
        let fitted: Vec<f64> = self.slopes.iter().filter_map(|s| s.2).collect();
        if fitted.is_empty() {
            return format!("{} rows; no |RE| vs n slope (need two or more step counts)", self.rows);
        }
        let mean = fitted.iter().sum::<f64>() / fitted.len() as f64;
        let min = fitted.iter().copied().fold(f64::INFINITY, f64::min);
        let max = fitted.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        format!(
            "{} rows; log-log slope of |RE| vs n over {} groups: mean {mean:.4}, min {min:.4}, max {max:.4}",
            self.rows,
            fitted.len()
        )
    }
}

pub fn compare_records(cfg: &ScenarioConfig) -> Result<Vec<EvolutionRecord>, CliError> {
    let params = params_of(cfg)?;
    let jumps = cfg.jumps.to_spec(params.kappa)?;
    let opts = DiscreteOptions {
        renormalize: cfg.renormalize,
    };
    let times = cfg.comparison_times().values();
    if times.iter().any(|&t| t <= 0.0) {
        return Err(CliError::Config(super::config::ConfigError {
            line: None,
            message: "compare needs strictly positive times".into(),
        }));
    }
    let mut grid = Vec::new();
    for &theta in &cfg.theta.values() {
        for &t in &times {
            for &n in &cfg.n_list {
                grid.push((theta, t, n));
            }
        }
    }
    let mut records = grid
        .par_iter()
        .map(|&(theta, t, n)| compare(&params, theta, t, n, &jumps, opts))
        .collect::<crate::Result<Vec<_>>>()?;
    records.sort_by(|a, b| by_grid((a.theta, a.t, a.n), (b.theta, b.t, b.n)));
    Ok(records)
}

pub fn summarize(records: &[EvolutionRecord]) -> CompareSummary {
    let mut slopes: Vec<(f64, f64, Option<f64>)> = Vec::new();
    let mut i = 0;
    while i < records.len() {
        let (theta, t) = (records[i].theta, records[i].t);
        let mut j = i;
        while j < records.len() && records[j].theta == theta && records[j].t == t {
            j += 1;
        }
        let pts: Vec<(f64, f64)> = records[i..j]
            .iter()
            .map(|r| (r.n as f64, r.relative_error_abs()))
            .collect();
        slopes.push((theta, t, log_log_slope(&pts)));
        i = j;
    }
    CompareSummary {
        rows: records.len(),
        slopes,
    }
}

pub fn run_compare(cfg: &ScenarioConfig, out: &mut dyn Write) -> Result<CompareSummary, CliError> {
    let records = compare_records(cfg)?;
    writeln!(out, "{COMPARE_HEADER}")?;
    for r in &records {
        writeln!(out, "{}", compare_row(r))?;
    }
    out.flush()?;
    Ok(summarize(&records))
}

pub const KRAUS_DUMP_HEADER: &str = "t,item,row,col,re,im";

/// Exact Kraus set, generating values and completeness defect at each
/// configured time.
pub fn run_kraus_dump(cfg: &ScenarioConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let params = params_of(cfg)?;
    writeln!(out, "{KRAUS_DUMP_HEADER}")?;
    for t in cfg.comparison_times().values() {
        let gv = generating_values(&params, t)?;
        let kset = exact_kraus(&params, t).map_err(|e| CliError::Numerical(e, format!("exact Kraus set at t = {t}")))?;
        let scalars = [
            ("Lambda_plus", gv.lambda_plus),
            ("Lambda_minus", gv.lambda_minus),
            ("Lambda_zero", gv.lambda_zero),
            ("g", gv.envelope_g),
            ("lambda_plus", gv.lam_cap_plus),
            ("lambda_minus", gv.lam_cap_minus),
            ("two_gamma_Lambda_zero_sq", gv.cross),
            ("discriminant", gv.discriminant()),
            ("completeness_defect", kset.completeness_defect()),
        ];
        for (name, v) in scalars {
            writeln!(out, "{t},{name},,,{v},0")?;
        }
        for (mu, k) in kset.operators().iter().enumerate() {
            for r in 0..3 {
                for c in 0..3 {
                    let z = k[(r, c)];
                    writeln!(out, "{t},K{mu},{},{},{},{}", r + 1, c + 1, z.re, z.im)?;
                }
            }
        }
    }
    out.flush()?;
    Ok(())
}
