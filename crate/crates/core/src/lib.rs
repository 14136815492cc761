//! Dissipative three-level atom–cavity–reservoir dynamics.
//!
//! The density matrix lives on `{|e0⟩, |g1⟩, |g0⟩}` (see [`model`]) and is
//! evolved three ways:
//!
//! * [`propagator::evolve_analytic`]: closed-form `F(t) = e^{At}` built from
//!   the generating functions in [`genfun`];
//! * [`kraus::exact_kraus`] + [`kraus::apply_channel`]: a three-operator
//!   Kraus set valid at any time;
//! * [`kraus::evolve_discrete`]: `n` repetitions of the first-order
//!   differential Kraus set with `τ = t/n`.
//!
//! [`metrics`] compares the discrete and continuous results, [`oracle`]
//! holds the independent reference engines, and [`cli`] drives the
//! parameter sweeps.

pub mod cli;
pub mod error;
pub mod genfun;
pub mod kraus;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod propagator;

pub use error::{Error, Result};
pub use model::{DensityMatrix, SystemParams, Tolerances};
