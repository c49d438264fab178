#![allow(dead_code)]

use nalgebra::DMatrix;
use seqdec_core::channel::{gen_iid_channel, RngSeed};
use seqdec_core::decouple::SystemChannel;
use seqdec_core::{ComplexMatrix, C64};

pub fn randn(seed: u64, rows: usize, cols: usize) -> ComplexMatrix {
    gen_iid_channel(RngSeed::new(seed, 0xABCD), rows, cols)
}

pub fn random_system(seed: u64, n_r: usize, dims: &[usize]) -> SystemChannel {
    let users = dims
        .iter()
        .enumerate()
        .map(|(i, &m)| gen_iid_channel(RngSeed::new(seed, i as u64), n_r, m))
        .collect();
    SystemChannel::new(n_r, users).unwrap()
}

pub fn to_na(a: &ComplexMatrix) -> DMatrix<C64> {
    DMatrix::from_row_slice(a.rows(), a.cols(), a.as_slice())
}

pub fn from_na(a: &DMatrix<C64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Projector onto the left nullspace of `t`, from nalgebra's SVD.
pub fn oracle_left_null_projector(t: &ComplexMatrix) -> DMatrix<C64> {
    let n = t.rows();
    let a = to_na(t);
    let svd = a.svd(true, false);
    let u = svd.u.unwrap();
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let tol = n.max(t.cols()) as f64 * f64::EPSILON * smax;
    let mut p = DMatrix::<C64>::identity(n, n);
    for (j, &s) in svd.singular_values.iter().enumerate() {
        if s > tol {
            let col = u.column(j);
            p -= &col * col.adjoint();
        }
    }
    p
}

pub fn projector(b: &ComplexMatrix) -> DMatrix<C64> {
    let b = to_na(b);
    b.adjoint() * b
}

pub fn fro(a: &DMatrix<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
