//! Householder reflectors. Nothing here is metered; the public kernels charge
//! their model cost themselves.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::{ComplexMatrix, C64};

/// Compact Householder factorisation `A = Q R` with `Q = H_0 H_1 ... H_{k-1}`.
///
/// Reflector `j` is `I - beta_j v_j v_jᴴ` acting on rows `j..m`, which makes
/// it Hermitian and unitary.
pub(crate) struct Reflectors {
    rows: usize,
    vectors: Vec<Vec<C64>>,
    betas: Vec<f64>,
}

/// Factors `a` (`m x n`) and returns the reflectors together with the
/// `min(m, n) x n` upper-trapezoidal factor `R`.
pub(crate) fn factor(a: &ComplexMatrix) -> (Reflectors, ComplexMatrix) {
    let (m, n) = a.shape();
    let k = m.min(n);
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| a.col(j)).collect();
    let mut vectors = Vec::with_capacity(k);
    let mut betas = Vec::with_capacity(k);

    for j in 0..k {
        let x = &cols[j][j..];
        let alpha = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let x0 = x[0];
        let mut v = x.to_vec();
        let beta = if alpha == 0.0 {
            v.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            v[0] = C64::new(1.0, 0.0);
            0.0
        } else {
            let phase = if x0.norm() == 0.0 {
                C64::new(1.0, 0.0)
            } else {
                x0 / x0.norm()
            };
            v[0] = x0 + phase * alpha;
            1.0 / (alpha * (alpha + x0.norm()))
        };
        if beta != 0.0 {
            for col in cols.iter_mut().skip(j) {
                reflect(&v, beta, &mut col[j..]);
            }
        }
        vectors.push(v);
        betas.push(beta);
    }

    let r = ComplexMatrix::from_fn(k, n, |i, j| {
        if j >= i {
            cols[j][i]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    (
        Reflectors {
            rows: m,
            vectors,
            betas,
        },
        r,
    )
}

#[inline]
fn reflect(v: &[C64], beta: f64, x: &mut [C64]) {
    let dot = v
        .iter()
        .zip(x.iter())
        .fold(C64::new(0.0, 0.0), |acc, (vi, xi)| acc + vi.conj() * xi);
    let s = dot * beta;
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= vi * s;
    }
}

impl Reflectors {
    pub(crate) fn len(&self) -> usize {
        self.vectors.len()
    }

    /// Overwrites `x` (`m x p`) with `Q x`.
    pub(crate) fn apply_q(&self, x: &mut ComplexMatrix) {
        for j in (0..self.len()).rev() {
            self.apply_one(j, x);
        }
    }

    /// Overwrites `x` (`m x p`) with `Qᴴ x`.
    pub(crate) fn apply_q_adjoint(&self, x: &mut ComplexMatrix) {
        for j in 0..self.len() {
            self.apply_one(j, x);
        }
    }

    fn apply_one(&self, j: usize, x: &mut ComplexMatrix) {
        debug_assert_eq!(x.rows(), self.rows);
        let beta = self.betas[j];
        if beta == 0.0 {
            return;
        }
        let v = &self.vectors[j];
        let p = x.cols();
        let mut w = alloc::vec![C64::new(0.0, 0.0); p];
        for (i, vi) in v.iter().enumerate() {
            let vc = vi.conj();
            for (wk, xk) in w.iter_mut().zip(x.row(j + i)) {
                *wk += vc * xk;
            }
        }
        for wk in w.iter_mut() {
            *wk *= beta;
        }
        for (i, vi) in v.iter().enumerate() {
            for (xk, wk) in x.row_mut(j + i).iter_mut().zip(&w) {
                *xk -= vi * wk;
            }
        }
    }

    /// First `cols` columns of `Q`.
    pub(crate) fn thin_q(&self, cols: usize) -> ComplexMatrix {
        let mut q = ComplexMatrix::zeros(self.rows, cols);
        for i in 0..cols.min(self.rows) {
            q[(i, i)] = C64::new(1.0, 0.0);
        }
        self.apply_q(&mut q);
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(m: usize, n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(m, n, |i, j| {
            let t = (i * 7 + j * 3) as f64;
            C64::new(t.sin() + 0.1 * j as f64, (t * 0.7).cos() - 0.2 * i as f64)
        })
    }

    #[test]
    fn q_r_reconstructs() {
        for &(m, n) in &[(5, 3), (4, 4), (3, 5), (6, 1)] {
            let a = sample(m, n);
            let (h, r) = factor(&a);
            let k = m.min(n);
            let q = h.thin_q(k);
            let qr = q.matmul_unmetered(&r);
            assert!(
                qr.sub(&a).unwrap().norm_fro() < 1e-13 * a.norm_fro(),
                "{m}x{n}"
            );
            let qhq = q.adjoint().matmul_unmetered(&q);
            assert!(qhq.sub(&ComplexMatrix::identity(k)).unwrap().norm_fro() < 1e-13);
        }
    }

    #[test]
    fn adjoint_undoes_q() {
        let a = sample(6, 3);
        let (h, _) = factor(&a);
        let mut x = sample(6, 2);
        let orig = x.clone();
        h.apply_q(&mut x);
        h.apply_q_adjoint(&mut x);
        assert!(x.sub(&orig).unwrap().norm_fro() < 1e-13);
    }

    #[test]
    fn zero_column_is_skipped() {
        let mut a = sample(4, 3);
        for i in 0..4 {
            a[(i, 0)] = C64::new(0.0, 0.0);
        }
        let (h, r) = factor(&a);
        let qr = h.thin_q(3).matmul_unmetered(&r);
        assert!(qr.sub(&a).unwrap().norm_fro() < 1e-13);
    }
}
