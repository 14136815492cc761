#![allow(dead_code)]

use cavity_kraus::linalg::{CMatrix3, C64};
use cavity_kraus::{DensityMatrix, SystemParams};
use proptest::prelude::*;

pub fn params(kappa: f64, rabi: f64, omega: f64) -> SystemParams {
    SystemParams::new(kappa, rabi, omega).unwrap()
}

/// Rates bounded away from zero, so γ stays in a testable band.
pub fn arb_params() -> impl Strategy<Value = SystemParams> {
    (0.05f64..10.0, 0.05f64..10.0, 0.0f64..5.0).prop_map(|(k, r, w)| params(k, r, w))
}

pub fn arb_matrix() -> impl Strategy<Value = CMatrix3> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9)
        .prop_map(|v| CMatrix3::from_iterator(v.into_iter().map(|(re, im)| C64::new(re, im))))
}

/// `BB† / Tr(BB†)` for a random `B`.
pub fn arb_density() -> impl Strategy<Value = DensityMatrix> {
    arb_matrix()
        .prop_filter("non-degenerate", |b| b.norm() > 1e-3)
        .prop_map(|b| {
            let m = b * b.adjoint();
            let tr = m.trace();
            DensityMatrix::from_matrix(m / tr)
        })
}

pub fn sup_norm<const R: usize, const C: usize>(m: &nalgebra::SMatrix<C64, R, C>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
