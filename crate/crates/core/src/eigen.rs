//! Lowest eigenpairs of sparse symmetric positive semidefinite operators.
//!
//! Small problems go straight to a dense symmetric eigensolver. Larger ones
//! use LOBPCG with seeded start vectors, full re-orthonormalization of the
//! search space every iteration, and an optional preconditioner; if it fails
//! to converge and the problem is still of moderate size the dense solver
//! takes over.

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::CsrMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// `y = A x`, rows computed in parallel, each row summed sequentially.
pub fn spmv(a: &CsrMatrix<f64>, x: &[f64], y: &mut [f64]) {
    let offsets = a.row_offsets();
    let cols = a.col_indices();
    let vals = a.values();
    y.par_iter_mut().enumerate().for_each(|(i, yi)| {
        let mut s = 0.0;
        for k in offsets[i]..offsets[i + 1] {
            s += vals[k] * x[cols[k]];
        }
        *yi = s;
    });
}

fn apply_block(a: &CsrMatrix<f64>, x: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(x.nrows(), x.ncols());
    for j in 0..x.ncols() {
        spmv(a, x.column(j).as_slice(), out.column_mut(j).as_mut_slice());
    }
    out
}

/// Maximum absolute row sum, an upper bound on the spectral radius.
pub fn norm_bound(a: &CsrMatrix<f64>) -> f64 {
    a.row_iter()
        .map(|r| r.values().iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest `|A_ij - A_ji|`.
pub fn symmetry_residual(a: &CsrMatrix<f64>) -> f64 {
    let t = a.transpose();
    let diff = a - &t;
    diff.values().iter().fold(0.0, |w, v| w.max(v.abs()))
}

pub type Preconditioner<'a> = &'a (dyn Fn(&[f64], &mut [f64]) + Sync);

#[derive(Clone, Copy, Debug)]
pub struct EigenOptions {
    pub count: usize,
    /// Converged when `‖Ax - λx‖ ≤ tol · max(1, ‖A‖)` for the wanted pairs.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Problems up to this size are solved densely.
    pub dense_limit: usize,
    /// Problems up to this size fall back to the dense solver when the
    /// iteration stalls.
    pub fallback_limit: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            count: 4,
            tol: 1e-12,
            max_iter: 3000,
            seed: 0,
            dense_limit: 600,
            fallback_limit: 4096,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dense,
    Lobpcg,
    DenseFallback,
}

#[derive(Clone, Debug)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    /// Unit-norm eigenvectors as columns.
    pub vectors: DMatrix<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub method: Method,
}

fn residual_norms(a: &CsrMatrix<f64>, values: &[f64], vectors: &DMatrix<f64>) -> Vec<f64> {
    let ax = apply_block(a, vectors);
    (0..values.len())
        .map(|j| (ax.column(j) - vectors.column(j) * values[j]).norm())
        .collect()
}

fn dense_pairs(a: &CsrMatrix<f64>, k: usize) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut m = DMatrix::zeros(n, n);
    for (i, j, v) in a.triplet_iter() {
        m[(i, j)] += *v;
    }
    let m = (&m + m.transpose()) * 0.5;
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = order[..k].iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, k);
    for (c, &i) in order[..k].iter().enumerate() {
        let mut col = eig.eigenvectors.column(i).into_owned();
        normalize_sign(&mut col);
        vectors.set_column(c, &col);
    }
    (values, vectors)
}

/// Fixes the sign so the largest-magnitude entry (first on ties) is positive.
fn normalize_sign(v: &mut DVector<f64>) {
    let mut best = 0;
    for i in 0..v.len() {
        if v[i].abs() > v[best].abs() * (1.0 + 1e-9) {
            best = i;
        }
    }
    if v[best] < 0.0 {
        *v *= -1.0;
    }
}

/// Orthonormalizes the columns of `s` by two passes of modified
/// Gram–Schmidt, dropping columns that are numerically dependent.
fn orthonormalize(s: &DMatrix<f64>) -> DMatrix<f64> {
    let mut kept: Vec<DVector<f64>> = Vec::with_capacity(s.ncols());
    for j in 0..s.ncols() {
        let mut v = s.column(j).into_owned();
        let before = v.norm();
        if before == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for q in &kept {
                let c = q.dot(&v);
                v.axpy(-c, q, 1.0);
            }
        }
        let after = v.norm();
        if after > 1e-10 * before {
            kept.push(v / after);
        }
    }
    DMatrix::from_columns(&kept)
}

fn rayleigh_ritz(s: &DMatrix<f64>, as_: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let t = s.transpose() * as_;
    let t = (&t + t.transpose()) * 0.5;
    let eig = t.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut c = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        c.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, c)
}

/// The `count` smallest eigenpairs of the symmetric matrix `a`.
pub fn smallest_eigenpairs(
    a: &CsrMatrix<f64>,
    opts: &EigenOptions,
    precond: Option<Preconditioner<'_>>,
) -> Result<EigenPairs> {
    let n = a.nrows();
    let k = opts.count;
    if a.ncols() != n {
        return Err(Error::input("eigensolver needs a square matrix"));
    }
    if k == 0 || k > n {
        return Err(Error::input(format!("cannot compute {k} eigenpairs of a {n}×{n} matrix")));
    }
    let scale = norm_bound(a).max(1.0);
    let target = opts.tol * scale;

    let bs = (k + k.div_ceil(2).max(2)).min(n);
    if n <= opts.dense_limit || 3 * bs >= n {
        let (values, vectors) = dense_pairs(a, k);
        let residuals = residual_norms(a, &values, &vectors);
        return Ok(EigenPairs {
            values,
            vectors,
            residuals,
            iterations: 0,
            method: Method::Dense,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let x0 = DMatrix::from_fn(n, bs, |_, _| rng.random::<f64>() - 0.5);
    let mut x = orthonormalize(&x0);
    let mut ax = apply_block(a, &x);
    let (mut theta, c) = rayleigh_ritz(&x, &ax);
    x = &x * &c;
    ax = &ax * &c;
    let mut p: Option<DMatrix<f64>> = None;
    let mut worst = f64::INFINITY;

    for iter in 1..=opts.max_iter {
        let mut r = ax.clone();
        for j in 0..x.ncols() {
            let col = x.column(j) * theta[j];
            let mut rc = r.column_mut(j);
            rc -= col;
        }
        let norms: Vec<f64> = (0..r.ncols()).map(|j| r.column(j).norm()).collect();
        worst = norms[..k].iter().copied().fold(0.0, f64::max);
        if worst <= target {
            let mut vectors = x.columns(0, k).into_owned();
            for j in 0..k {
                let mut col = vectors.column(j).into_owned();
                normalize_sign(&mut col);
                vectors.set_column(j, &col);
            }
            let values = theta[..k].to_vec();
            let residuals = residual_norms(a, &values, &vectors);
            return Ok(EigenPairs {
                values,
                vectors,
                residuals,
                iterations: iter,
                method: Method::Lobpcg,
            });
        }

        let w = match precond {
            Some(m) => {
                let mut w = DMatrix::zeros(n, r.ncols());
                for j in 0..r.ncols() {
                    m(r.column(j).as_slice(), w.column_mut(j).as_mut_slice());
                }
                w
            }
            None => r,
        };

        let mut cols: Vec<DVector<f64>> = (0..x.ncols()).map(|j| x.column(j).into_owned()).collect();
        cols.extend((0..w.ncols()).map(|j| w.column(j).into_owned()));
        if let Some(pm) = &p {
            cols.extend((0..pm.ncols()).map(|j| pm.column(j).into_owned()));
        }
        let s = orthonormalize(&DMatrix::from_columns(&cols));
        if s.ncols() < bs {
            break;
        }
        let as_ = apply_block(a, &s);
        let (values, c) = rayleigh_ritz(&s, &as_);
        let cx = c.columns(0, bs).into_owned();
        let x_new = &s * &cx;
        let ax_new = &as_ * &cx;
        // Search direction: the new iterate minus its component in the old span.
        let overlap = x.transpose() * &x_new;
        p = Some(orthonormalize(&(&x_new - &x * overlap)));
        x = x_new;
        ax = ax_new;
        theta = values[..bs].to_vec();
    }

    if n <= opts.fallback_limit {
        let (values, vectors) = dense_pairs(a, k);
        let residuals = residual_norms(a, &values, &vectors);
        return Ok(EigenPairs {
            values,
            vectors,
            residuals,
            iterations: opts.max_iter,
            method: Method::DenseFallback,
        });
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual: worst,
    })
}
