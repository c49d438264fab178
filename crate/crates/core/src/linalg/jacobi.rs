//! One-sided (Hestenes) Jacobi SVD.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::{ComplexMatrix, C64};

const MAX_SWEEPS: usize = 80;

pub(crate) struct JacobiSvd {
    /// `m x n`; column `j` is `A v_j / σ_j`, or zero when `σ_j` vanishes.
    pub u: ComplexMatrix,
    /// Non-increasing.
    pub sigma: Vec<f64>,
    /// `n x n` unitary, present when requested.
    pub v: Option<ComplexMatrix>,
}

/// Orthogonalises the columns of `a` by plane rotations applied on the
/// right, so that `A V = U Σ`.
pub(crate) fn svd(a: &ComplexMatrix, want_v: bool) -> JacobiSvd {
    let (m, n) = a.shape();
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| a.col(j)).collect();
    let mut vcols: Vec<Vec<C64>> = if want_v {
        (0..n)
            .map(|j| {
                let mut e = alloc::vec![C64::new(0.0, 0.0); n];
                e[j] = C64::new(1.0, 0.0);
                e
            })
            .collect()
    } else {
        Vec::new()
    };
    let mut norms: Vec<f64> = cols.iter().map(|c| sq_norm(c)).collect();
    let tol = f64::EPSILON * (m.max(1) as f64).sqrt();
    // Columns this small are rounding noise of a rank-deficient input;
    // rotating them only stirs up V.
    let floor = {
        let total: f64 = norms.iter().sum();
        total * (f64::EPSILON * n.max(1) as f64).powi(2)
    };

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha <= floor || beta <= floor {
                    continue;
                }
                let gamma = dot(&cols[p], &cols[q]);
                let g = gamma.norm();
                if g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let e = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = cols.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], c, s, e);
                if want_v {
                    let (lo, hi) = vcols.split_at_mut(q);
                    rotate(&mut lo[p], &mut hi[0], c, s, e);
                }
                norms[p] = sq_norm(&cols[p]);
                norms[q] = sq_norm(&cols[q]);
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma_raw: Vec<f64> = norms.iter().map(|x| x.sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma_raw[j].total_cmp(&sigma_raw[i]));

    let sigma: Vec<f64> = order.iter().map(|&j| sigma_raw[j]).collect();
    let mut u = ComplexMatrix::zeros(m, n);
    for (dst, &src) in order.iter().enumerate() {
        let s = sigma_raw[src];
        if s > 0.0 {
            for i in 0..m {
                u[(i, dst)] = cols[src][i] / s;
            }
        }
    }
    let v = want_v.then(|| {
        let mut v = ComplexMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            for i in 0..n {
                v[(i, dst)] = vcols[src][i];
            }
        }
        v
    });
    JacobiSvd { u, sigma, v }
}

#[inline]
fn sq_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

#[inline]
fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter()
        .zip(y)
        .fold(C64::new(0.0, 0.0), |acc, (a, b)| acc + a.conj() * b)
}

/// `x <- c x - s e y`, `y <- s x + c e y`.
#[inline]
fn rotate(x: &mut [C64], y: &mut [C64], c: f64, s: f64, e: C64) {
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let a = *xi;
        let b = *yi * e;
        *xi = a * c - b * s;
        *yi = a * s + b * c;
    }
}
