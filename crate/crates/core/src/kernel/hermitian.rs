//! Cyclic Jacobi eigenvalues for small dense Hermitian matrices stored row-major.

use num_complex::Complex64;

const SWEEP_LIMIT: usize = 64;
/// A pair is rotated only while `|a_pq| > OFF_DIAGONAL_REL * sqrt(|a_pp a_qq|)`; this keeps small
/// eigenvalues accurate when the diagonal is strongly graded.
const OFF_DIAGONAL_REL: f64 = 1e-15;

/// Diagonalizes `m` in place; the diagonal then holds the eigenvalues.
/// Only Hermitian input is meaningful; the strict lower triangle is read as the conjugate of the upper.
pub fn jacobi_in_place(m: &mut [Complex64], n: usize) {
    assert_eq!(m.len(), n * n);
    for _ in 0..SWEEP_LIMIT {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let beta = m[p * n + q];
                let abs_beta = beta.norm();
                let app = m[p * n + p].re;
                let aqq = m[q * n + q].re;
                if abs_beta <= 1e-300 || abs_beta <= OFF_DIAGONAL_REL * (app * aqq).abs().sqrt() {
                    continue;
                }
                rotated = true;
                let phase = beta / abs_beta;
                let tau = (aqq - app) / (2.0 * abs_beta);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let ph_conj = phase.conj();
                // Columns p, q.
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = akp * c - ph_conj * akq * s;
                    m[k * n + q] = akp * s + ph_conj * akq * c;
                }
                // Rows p, q.
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = apk * c - phase * aqk * s;
                    m[q * n + k] = apk * s + phase * aqk * c;
                }
                m[p * n + q] = Complex64::new(0.0, 0.0);
                m[q * n + p] = Complex64::new(0.0, 0.0);
                m[p * n + p] = Complex64::new(m[p * n + p].re, 0.0);
                m[q * n + q] = Complex64::new(m[q * n + q].re, 0.0);
            }
        }
        if !rotated {
            break;
        }
    }
}

/// Eigenvalues in ascending order.
pub fn hermitian_eigenvalues(m: &[Complex64], n: usize) -> Vec<f64> {
    let mut work = m.to_vec();
    jacobi_in_place(&mut work, n);
    let mut ev: Vec<f64> = (0..n).map(|i| work[i * n + i].re).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Smallest eigenvalue; destroys `m`.
pub fn min_eigenvalue_in_place(m: &mut [Complex64], n: usize) -> f64 {
    jacobi_in_place(m, n);
    (0..n).map(|i| m[i * n + i].re).fold(f64::INFINITY, f64::min)
}

/// Cholesky attempt; `true` when every pivot is strictly positive. Destroys `m`.
pub fn cholesky_succeeds_in_place(m: &mut [Complex64], n: usize) -> bool {
    for j in 0..n {
        let mut d = m[j * n + j].re;
        for k in 0..j {
            d -= m[j * n + k].norm_sqr();
        }
        if !(d > 0.0) {
            return false;
        }
        let d = d.sqrt();
        m[j * n + j] = Complex64::new(d, 0.0);
        for i in (j + 1)..n {
            let mut s = m[i * n + j];
            for k in 0..j {
                s -= m[i * n + k] * m[j * n + k].conj();
            }
            m[i * n + j] = s / d;
        }
    }
    true
}
