//! Writes the RK4 reference state used by the CLI tests.
//!
//! cargo run --release --example rk4_fixture > tests/fixtures/rk4_theta_pi4_t1.csv

use cavity_kraus::oracle::{integrate_rk4, IntegratorConfig};
use cavity_kraus::{DensityMatrix, SystemParams};

fn main() {
    let p = SystemParams::reference();
    let rho0 = DensityMatrix::initial_state(std::f64::consts::FRAC_PI_4).unwrap();
    let rho = integrate_rk4(&p, &rho0, 1.0, IntegratorConfig::with_steps(100_000)).unwrap();
    println!("row,col,re,im");
    for r in 0..3 {
        for c in 0..3 {
            let z = rho.get(r, c);
            println!("{},{},{:e},{:e}", r + 1, c + 1, z.re, z.im);
        }
    }
}
