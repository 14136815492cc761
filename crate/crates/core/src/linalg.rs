//! Small fixed-size helpers on 3×3 complex matrices.

use nalgebra::{Complex, Matrix3};

pub type C64 = Complex<f64>;
pub type CMatrix3 = Matrix3<C64>;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues of a Hermitian 3×3 matrix, ascending.
///
/// Cyclic complex Jacobi: each off-diagonal element is first made real by a
/// diagonal phase, then annihilated by a real plane rotation. Only the
/// Hermitian part of `m` is used.
pub fn hermitian_eigenvalues(m: &CMatrix3) -> [f64; 3] {
    let mut a = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if scale == 0.0 {
        return [0.0; 3];
    }

    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_sq(&a);
        if off <= f64::EPSILON * f64::EPSILON * scale * 1e-4 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let b = a[(p, q)];
            let mag = b.norm();
            if mag == 0.0 {
                continue;
            }
            let phase = b / mag;
            let alpha = a[(p, p)].re;
            let delta = a[(q, q)].re;
            let angle = 0.5 * (2.0 * mag).atan2(alpha - delta);
            let (s, c) = angle.sin_cos();

            // V = D R with D = diag(.., e^{-i phi} at q, ..) making a_pq real.
            let mut v = CMatrix3::identity();
            v[(p, p)] = C64::new(c, 0.0);
            v[(p, q)] = C64::new(-s, 0.0);
            v[(q, p)] = phase.conj() * s;
            v[(q, q)] = phase.conj() * c;
            a = v.adjoint() * a * v;
        }
    }

    let mut ev = [a[(0, 0)].re, a[(1, 1)].re, a[(2, 2)].re];
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

fn off_diagonal_sq(a: &CMatrix3) -> f64 {
    a[(0, 1)].norm_sqr() + a[(0, 2)].norm_sqr() + a[(1, 2)].norm_sqr()
}

/// Largest singular value, from the eigenvalues of `M†M`.
pub fn spectral_norm(m: &CMatrix3) -> f64 {
    let gram = m.adjoint() * m;
    hermitian_eigenvalues(&gram)[2].max(0.0).sqrt()
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix3, b: &CMatrix3) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
