//! Scenario configuration: `key = value` files overlaid by command-line flags.
//!
//! ```text
//! # reference run
//! kappa = 2
//! coupling = 4
//! frequency = 2
//! theta = 0:pi:64        # start:end:count, or a single value
//! time = 1
//! steps = 10,100,1000,10000
//! jumps = split          # split | single | list:l1,l2,...
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use crate::kraus::JumpSpec;
use crate::linalg::C64;

/// Configuration problem, optionally tied to a line of the config file.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn new(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }

    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self { line: Some(l), message } => write!(f, "line {l}: {message}"),
            Self { line: None, message } => f.write_str(message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Inclusive, evenly spaced range; `count == 1` is a single value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Grid {
    pub fn single(value: f64) -> Self {
        Self {
            start: value,
            end: value,
            count: 1,
        }
    }

    pub fn range(start: f64, end: f64, count: usize) -> Self {
        Self { start, end, count }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.end } else { self.start + step * i as f64 })
            .collect()
    }

    fn validate(&self, name: &str) -> Result<(), ConfigError> {
        if !(self.start.is_finite() && self.end.is_finite()) {
            return Err(ConfigError::new(format!("{name}: bounds must be finite")));
        }
        if self.count == 0 {
            return Err(ConfigError::new(format!("{name}: count must be at least 1")));
        }
        if self.count == 1 && self.start != self.end {
            return Err(ConfigError::new(format!("{name}: a one-point range needs start = end")));
        }
        if self.end < self.start {
            return Err(ConfigError::new(format!("{name}: range end {} precedes start {}", self.end, self.start)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum JumpChoice {
    Split,
    Single,
    List(Vec<f64>),
}

impl JumpChoice {
    pub fn to_spec(&self, kappa: f64) -> crate::Result<JumpSpec> {
        match self {
            JumpChoice::Split => Ok(JumpSpec::split(kappa)),
            JumpChoice::Single => Ok(JumpSpec::single(kappa)),
            JumpChoice::List(v) => JumpSpec::custom(v.iter().map(|x| C64::new(*x, 0.0)).collect(), kappa),
        }
    }
}

/// Which per-operator norm `evolve --per-operator` reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OperatorNorm {
    /// `‖K ρ K†‖`
    #[default]
    Sandwich,
    /// `‖K ρ‖`
    Left,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub kappa: f64,
    pub rabi: f64,
    pub omega: f64,
    pub theta: Grid,
    /// `None` lets each command pick its own default.
    pub time: Option<Grid>,
    pub n_list: Vec<usize>,
    pub jumps: JumpChoice,
    pub renormalize: bool,
    pub per_operator: bool,
    pub operator_norm: OperatorNorm,
    pub output_path: Option<PathBuf>,
    pub seed: u64,
}

pub const DEFAULT_GRID_POINTS: usize = 64;

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            kappa: 2.0,
            rabi: 4.0,
            omega: 2.0,
            theta: Grid::range(0.0, std::f64::consts::PI, DEFAULT_GRID_POINTS),
            time: None,
            n_list: vec![10, 100, 1_000, 10_000],
            jumps: JumpChoice::Split,
            renormalize: false,
            per_operator: false,
            operator_norm: OperatorNorm::Sandwich,
            output_path: None,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    /// Time grid for `evolve`: `[0, 3]` unless configured.
    pub fn evolve_times(&self) -> Grid {
        self.time.unwrap_or(Grid::range(0.0, 3.0, DEFAULT_GRID_POINTS))
    }

    /// Time grid for `compare` and `kraus-dump`: `t = 1` unless configured.
    pub fn comparison_times(&self) -> Grid {
        self.time.unwrap_or(Grid::single(1.0))
    }

    fn validate(&self) -> Result<(), ConfigError> {
        for (name, v) in [("kappa", self.kappa), ("coupling", self.rabi), ("frequency", self.omega)] {
            if !v.is_finite() || v < 0.0 {
                return Err(ConfigError::new(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        self.theta.validate("theta")?;
        if let Some(t) = self.time {
            t.validate("time")?;
            if t.start < 0.0 {
                return Err(ConfigError::new("time: negative times are not allowed"));
            }
        }
        if self.n_list.is_empty() {
            return Err(ConfigError::new("steps: list is empty"));
        }
        if self.n_list.contains(&0) {
            return Err(ConfigError::new("steps: step counts must be at least 1"));
        }
        Ok(())
    }
}

/// Flag values; `None` leaves the file (or default) value in place.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub kappa: Option<f64>,
    pub rabi: Option<f64>,
    pub omega: Option<f64>,
    pub theta: Option<Grid>,
    pub time: Option<Grid>,
    pub n_list: Option<Vec<usize>>,
    pub jumps: Option<JumpChoice>,
    pub renormalize: Option<bool>,
    pub per_operator: Option<bool>,
    pub operator_norm: Option<OperatorNorm>,
    pub output_path: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl Overrides {
    fn apply(&self, cfg: &mut ScenarioConfig) {
        macro_rules! take {
            ($($field:ident => $target:expr),* $(,)?) => {
                $( if let Some(v) = &self.$field { $target = v.clone(); } )*
            };
        }
        take!(kappa => cfg.kappa, rabi => cfg.rabi, omega => cfg.omega, theta => cfg.theta,
              n_list => cfg.n_list, jumps => cfg.jumps, renormalize => cfg.renormalize,
              per_operator => cfg.per_operator, operator_norm => cfg.operator_norm, seed => cfg.seed);
        if let Some(t) = self.time {
            cfg.time = Some(t);
        }
        if let Some(p) = &self.output_path {
            cfg.output_path = Some(p.clone());
        }
    }
}

/// Reads `path` (if any), then applies `overrides`.
pub fn load_config(path: Option<&Path>, overrides: &Overrides) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| ConfigError::new(format!("cannot read config {}: {e}", p.display())))?;
            parse_config(&text)?
        }
        None => ScenarioConfig::default(),
    };
    overrides.apply(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

/// Parses config text on top of the defaults. Does not run range validation.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg = ScenarioConfig::default();
    let mut seen: Vec<&'static str> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::at(lineno, format!("expected `key = value`, got `{line}`")))?;
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(ConfigError::at(lineno, format!("missing value for `{key}`")));
        }
        let canonical = canonical_key(key).ok_or_else(|| ConfigError::at(lineno, format!("unknown key `{key}`")))?;
        if seen.contains(&canonical) {
            return Err(ConfigError::at(lineno, format!("`{canonical}` is set more than once")));
        }
        seen.push(canonical);

        let err = |m: String| ConfigError::at(lineno, format!("{key}: {m}"));
        match canonical {
            "kappa" => cfg.kappa = parse_number(value).map_err(err)?,
            "coupling" => cfg.rabi = parse_number(value).map_err(err)?,
            "frequency" => cfg.omega = parse_number(value).map_err(err)?,
            "theta" => cfg.theta = parse_grid(value).map_err(err)?,
            "time" => cfg.time = Some(parse_grid(value).map_err(err)?),
            "steps" => cfg.n_list = parse_steps(value).map_err(err)?,
            "jumps" => cfg.jumps = parse_jumps(value).map_err(err)?,
            "renormalize" => cfg.renormalize = parse_bool(value).map_err(err)?,
            "per_operator" => cfg.per_operator = parse_bool(value).map_err(err)?,
            "operator_norm" => cfg.operator_norm = parse_operator_norm(value).map_err(err)?,
            "out" => cfg.output_path = Some(PathBuf::from(value)),
            "seed" => cfg.seed = value.parse().map_err(|e| err(format!("{e}")))?,
            _ => unreachable!("canonical_key returned an unhandled key"),
        }
    }
    Ok(cfg)
}

fn canonical_key(key: &str) -> Option<&'static str> {
    Some(match key.to_ascii_lowercase().replace('-', "_").as_str() {
        "kappa" | "decay" => "kappa",
        "rabi" | "coupling" => "coupling",
        "omega" | "frequency" => "frequency",
        "theta" => "theta",
        "time" | "t" => "time",
        "steps" | "n" | "n_list" => "steps",
        "jumps" => "jumps",
        "renormalize" => "renormalize",
        "per_operator" => "per_operator",
        "operator_norm" => "operator_norm",
        "out" | "output" | "output_path" => "out",
        "seed" => "seed",
        _ => return None,
    })
}

/// A float, optionally written with `pi`: `pi`, `-pi/2`, `3pi/4`, `0.5*pi`.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let lower = s.to_ascii_lowercase();
    let (coef, rest) = lower
        .split_once("pi")
        .ok_or_else(|| format!("`{s}` is not a number"))?;
    let coef = coef.trim().trim_end_matches('*').trim();
    let coef = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| format!("bad coefficient in `{s}`"))?,
    };
    let rest = rest.trim();
    let div = if rest.is_empty() {
        1.0
    } else if let Some(d) = rest.strip_prefix('/') {
        d.trim().parse::<f64>().map_err(|_| format!("bad divisor in `{s}`"))?
    } else {
        return Err(format!("`{s}` is not a number"));
    };
    Ok(coef * std::f64::consts::PI / div)
}

/// `value` or `start:end:count`.
pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [v] => Ok(Grid::single(parse_number(v)?)),
        [a, b, n] => {
            let count = n.trim().parse::<usize>().map_err(|_| format!("bad point count `{}`", n.trim()))?;
            Ok(Grid::range(parse_number(a)?, parse_number(b)?, count))
        }
        _ => Err(format!("expected `value` or `start:end:count`, got `{s}`")),
    }
}

pub fn parse_steps(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| format!("bad step count `{}`", p.trim())))
        .collect()
}

pub fn parse_jumps(s: &str) -> Result<JumpChoice, String> {
    match s.trim() {
        "split" => Ok(JumpChoice::Split),
        "single" => Ok(JumpChoice::Single),
        other => {
            let list = other
                .strip_prefix("list:")
                .ok_or_else(|| format!("expected split, single or list:<amplitudes>, got `{other}`"))?;
            let v = list.split(',').map(parse_number).collect::<Result<Vec<_>, _>>()?;
            if v.is_empty() {
                return Err("empty amplitude list".into());
            }
            Ok(JumpChoice::List(v))
        }
    }
}

pub fn parse_operator_norm(s: &str) -> Result<OperatorNorm, String> {
    match s.trim() {
        "sandwich" => Ok(OperatorNorm::Sandwich),
        "left" => Ok(OperatorNorm::Left),
        other => Err(format!("expected sandwich or left, got `{other}`")),
    }
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(format!("expected a boolean, got `{other}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn empty_input_gives_reference_defaults() {
        let cfg = load_config(None, &Overrides::default()).unwrap();
        assert_eq!((cfg.kappa, cfg.rabi, cfg.omega), (2.0, 4.0, 2.0));
        assert_eq!(cfg.theta, Grid::range(0.0, PI, 64));
        assert_eq!(cfg.evolve_times(), Grid::range(0.0, 3.0, 64));
        assert_eq!(parse_config("").unwrap(), ScenarioConfig::default());
        assert_eq!(parse_config("# only a comment\n\n").unwrap(), ScenarioConfig::default());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "coupling = 2\nkappa = 1\n").unwrap();
        let ov = Overrides {
            rabi: Some(4.0),
            ..Default::default()
        };
        let cfg = load_config(Some(&path), &ov).unwrap();
        assert_eq!(cfg.rabi, 4.0);
        assert_eq!(cfg.kappa, 1.0);
    }

    #[test]
    fn malformed_line_names_line() {
        let err = parse_config("# header\nkappa=\n").unwrap_err();
        assert_eq!(err.line, Some(2));
        assert!(err.to_string().contains("line 2"));
        assert!(err.to_string().contains("kappa"));

        let err = parse_config("kappa = 2\nnonsense\n").unwrap_err();
        assert_eq!(err.line, Some(2));
        let err = parse_config("bogus = 1").unwrap_err();
        assert_eq!(err.line, Some(1));
    }

    #[test]
    fn aliases_conflict() {
        let err = parse_config("kappa = 2\ndecay = 3\n").unwrap_err();
        assert_eq!(err.line, Some(2));
    }

    #[test]
    fn full_file() {
        let text = "decay = 8\ncoupling = 2\nfrequency = 1 # comment\ntheta = 0:pi/2:5\ntime = 0.5\n\
                    steps = 10, 20\njumps = list:1,2\nrenormalize = yes\nper-operator = true\n\
                    operator_norm = left\nout = a.csv\nseed = 42\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.kappa, 8.0);
        assert_eq!(cfg.theta, Grid::range(0.0, PI / 2.0, 5));
        assert_eq!(cfg.time, Some(Grid::single(0.5)));
        assert_eq!(cfg.n_list, vec![10, 20]);
        assert_eq!(cfg.jumps, JumpChoice::List(vec![1.0, 2.0]));
        assert!(cfg.renormalize && cfg.per_operator);
        assert_eq!(cfg.operator_norm, OperatorNorm::Left);
        assert_eq!(cfg.output_path, Some(PathBuf::from("a.csv")));
        assert_eq!(cfg.seed, 42);
    }

    #[test]
    fn ranges_are_checked() {
        let bad = |ov: Overrides| load_config(None, &ov).is_err();
        assert!(bad(Overrides { theta: Some(Grid::range(1.0, 0.0, 3)), ..Default::default() }));
        assert!(bad(Overrides { theta: Some(Grid::range(0.0, 1.0, 0)), ..Default::default() }));
        assert!(bad(Overrides { time: Some(Grid::single(-1.0)), ..Default::default() }));
        assert!(bad(Overrides { n_list: Some(vec![0]), ..Default::default() }));
        assert!(bad(Overrides { kappa: Some(-2.0), ..Default::default() }));
    }

    #[test]
    fn numbers_with_pi() {
        assert_eq!(parse_number("0.25").unwrap(), 0.25);
        assert_eq!(parse_number("pi").unwrap(), PI);
        assert_eq!(parse_number("-pi").unwrap(), -PI);
        assert_eq!(parse_number("pi/4").unwrap(), PI / 4.0);
        assert_eq!(parse_number("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_number("0.5*pi").unwrap(), 0.5 * PI);
        assert!(parse_number("pie").is_err());
        assert!(parse_number("x").is_err());
    }

    #[test]
    fn grid_values_include_endpoints() {
        let g = Grid::range(0.0, 3.0, 4);
        assert_eq!(g.values(), vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(Grid::single(0.7).values(), vec![0.7]);
        assert_eq!(Grid::range(0.0, PI, 64).values().len(), 64);
        assert_eq!(*Grid::range(0.0, PI, 64).values().last().unwrap(), PI);
    }
}
