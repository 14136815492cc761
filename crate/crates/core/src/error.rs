use thiserror::Error;

/// Errors raised by the simulator library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}` = {value}: {reason}")]
    Parameter {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("jump amplitudes violate normalization: sum |l|^2 - kappa = {excess:e}")]
    Normalization { excess: f64 },

    #[error(
        "Kraus discriminant is negative ({discriminant:e}) at t = {t} \
         (kappa = {kappa}, coupling = {rabi})"
    )]
    Regime {
        t: f64,
        kappa: f64,
        rabi: f64,
        discriminant: f64,
    },

    #[error("input is not a density matrix: {0}")]
    InvalidState(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("division by a zero-norm matrix")]
    ZeroNorm,

    #[error("matrix exponential out of range: norm {norm:e} exceeds {limit:e}")]
    Range { norm: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_rate(field: &'static str, value: f64) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::Parameter {
            field,
            value,
            reason: "must be finite",
        });
    }
    if value < 0.0 {
        return Err(Error::Parameter {
            field,
            value,
            reason: "must be non-negative",
        });
    }
    Ok(value)
}

pub(crate) fn check_finite(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Parameter {
            field,
            value,
            reason: "must be finite",
        })
    }
}
