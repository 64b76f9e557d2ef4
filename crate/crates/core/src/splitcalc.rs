//! Horizontal/vertical splitting of forms relative to a unit vector `Z`.
//!
//! Every `p`-form is written uniquely as `a = h + v ∧ ϑ` with `ϑ = Z♭` and
//! `h`, `v` horizontal (annihilated by `i_Z`). Contracting gives
//! `v = (-1)^{p-1} i_Z a`. Horizontal forms are stored in coordinates of the
//! `(m-1)`-dimensional horizontal exterior algebra, built on the coframe
//! `β_i = e^i - (z_i / z_q) e^q`, `i ≠ q`, where `q` is a pivot with `z_q ≠ 0`.
//!
//! Writing `dϑ = b + η ∧ ϑ`, the differential on split forms is the block
//! operator
//!
//! ```text
//! d (h, v) = ( d_H h + (-1)^{p-1} L v ,  (-1)^p 𝓛_Z h + (d_H + S) v )
//! ```
//!
//! with `L x = x ∧ b`, `S x = η ∧ x`. For a central `Z` acting on invariant
//! forms `𝓛_Z = 0`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{
    basis, binomial, form_inner, interior_matrix, left_wedge_matrix, right_wedge_matrix, wedge,
    ExtForm, InnerProduct,
};
use crate::nilalgebra::MetricLieAlgebra;

/// Relative tolerance on `|Z| = 1`.
pub const UNIT_TOL: f64 = 1e-12;

/// Default relative residual below which a form counts as an eigenform.
pub const EIGEN_TOL: f64 = 1e-9;

/// `h + v ∧ ϑ`, with `h` of degree `p` and `v` of degree `p - 1` (absent
/// when `p = 0`), both in horizontal coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitForm {
    pub degree: usize,
    pub horiz: ExtForm,
    pub vert: Option<ExtForm>,
}

impl SplitForm {
    pub fn as_vector(&self) -> DVector<f64> {
        let mut v = self.horiz.coeffs().to_vec();
        if let Some(vert) = &self.vert {
            v.extend_from_slice(vert.coeffs());
        }
        DVector::from_vec(v)
    }
}

/// Splitting data attached to a unit vector `Z` of an inner-product space.
#[derive(Clone, Debug)]
pub struct SplitFrame {
    ambient: InnerProduct,
    horizontal: InnerProduct,
    z: Vec<f64>,
    theta: ExtForm,
    pivot: usize,
    embed: Vec<DMatrix<f64>>,
}

impl SplitFrame {
    pub fn new(g: &InnerProduct, z: &[f64]) -> Result<Self> {
        let m = g.dim();
        if z.len() != m {
            return Err(Error::input(format!("Z has {} components, space has dimension {m}", z.len())));
        }
        if m < 1 {
            return Err(Error::input("split needs dimension at least 1"));
        }
        let norm = g.vector_norm(z);
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::input(format!("Z must have unit length, got |Z| = {norm}")));
        }
        let pivot = (0..m)
            .max_by(|&a, &b| z[a].abs().total_cmp(&z[b].abs()).then(b.cmp(&a)))
            .expect("nonempty");
        let theta = g.flat(z);

        let coframe: Vec<ExtForm> = (0..m)
            .filter(|&i| i != pivot)
            .map(|i| {
                let mut c = vec![0.0; m];
                c[i] = 1.0;
                c[pivot] = -z[i] / z[pivot];
                ExtForm::one_form(&c)
            })
            .collect();
        let n = m - 1;
        let embed: Vec<DMatrix<f64>> = (0..=n)
            .map(|p| {
                let src = basis(n, p);
                let mut e = DMatrix::zeros(binomial(m, p), src.len());
                for (col, idx) in src.iter().enumerate() {
                    let mut f = ExtForm::scalar(m, 1.0);
                    for &i in idx.indices() {
                        f = wedge(&f, &coframe[i]).expect("same dimension");
                    }
                    for (r, v) in f.coeffs().iter().enumerate() {
                        e[(r, col)] = *v;
                    }
                }
                e
            })
            .collect();

        let b1 = &embed[1];
        let dual = b1.transpose() * g.dual_gram() * b1;
        let dual = (&dual + dual.transpose()) * 0.5;
        let horizontal = if n == 0 {
            InnerProduct::identity(0)
        } else {
            InnerProduct::from_dual_gram(dual)?
        };

        Ok(SplitFrame {
            ambient: g.clone(),
            horizontal,
            z: z.to_vec(),
            theta,
            pivot,
            embed,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient.dim()
    }

    pub fn horizontal_dim(&self) -> usize {
        self.ambient.dim() - 1
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn theta(&self) -> &ExtForm {
        &self.theta
    }

    /// Induced inner product on horizontal 1-forms (in `β` coordinates).
    pub fn horizontal_metric(&self) -> &InnerProduct {
        &self.horizontal
    }

    /// Horizontal `p`-form coordinates → ambient coefficients.
    pub fn embed_matrix(&self, p: usize) -> DMatrix<f64> {
        let m = self.ambient_dim();
        if p > self.horizontal_dim() {
            return DMatrix::zeros(binomial(m, p), 0);
        }
        self.embed[p].clone()
    }

    /// Ambient coefficients of a horizontal `p`-form → horizontal coordinates:
    /// keep the multi-indices avoiding the pivot.
    fn restrict_matrix(&self, p: usize) -> DMatrix<f64> {
        let (m, n, q) = (self.ambient_dim(), self.horizontal_dim(), self.pivot);
        let mut r = DMatrix::zeros(binomial(n, p), binomial(m, p));
        for (row, idx) in basis(n, p).iter().enumerate() {
            let lifted: Vec<usize> = idx.indices().iter().map(|&i| if i < q { i } else { i + 1 }).collect();
            let col = crate::exterior::MultiIndex::new(lifted, m).expect("valid").rank(m);
            r[(row, col)] = 1.0;
        }
        r
    }

    /// Ambient `Λ^p` → horizontal `Λ^p ⊕ Λ^{p-1}`.
    pub fn split_matrix(&self, p: usize) -> DMatrix<f64> {
        let (m, n) = (self.ambient_dim(), self.horizontal_dim());
        let cols = binomial(m, p);
        if p == 0 {
            return self.restrict_matrix(0);
        }
        let sign = if p % 2 == 1 { 1.0 } else { -1.0 };
        let vert_amb = interior_matrix(&self.z, p) * sign;
        let horiz_amb = DMatrix::identity(cols, cols) - right_wedge_matrix(&self.theta, p - 1) * &vert_amb;
        let h = self.restrict_matrix(p) * horiz_amb;
        let v = self.restrict_matrix(p - 1) * vert_amb;
        let mut out = DMatrix::zeros(binomial(n, p) + binomial(n, p - 1), cols);
        out.rows_mut(0, h.nrows()).copy_from(&h);
        out.rows_mut(h.nrows(), v.nrows()).copy_from(&v);
        out
    }

    /// Horizontal `Λ^p ⊕ Λ^{p-1}` → ambient `Λ^p`.
    pub fn join_matrix(&self, p: usize) -> DMatrix<f64> {
        let e = self.embed_matrix(p);
        if p == 0 {
            return e;
        }
        let v = right_wedge_matrix(&self.theta, p - 1) * self.embed_matrix(p - 1);
        let mut out = DMatrix::zeros(e.nrows(), e.ncols() + v.ncols());
        out.columns_mut(0, e.ncols()).copy_from(&e);
        out.columns_mut(e.ncols(), v.ncols()).copy_from(&v);
        out
    }

    pub fn split(&self, a: &ExtForm) -> Result<SplitForm> {
        if a.dim() != self.ambient_dim() {
            return Err(Error::input("split: dimension mismatch"));
        }
        let p = a.degree();
        let n = self.horizontal_dim();
        let coords = self.split_matrix(p) * a.as_vector();
        let nh = binomial(n, p);
        let horiz = ExtForm::from_coeffs(n, p, coords.as_slice()[..nh].to_vec())?;
        let vert = if p == 0 {
            None
        } else {
            Some(ExtForm::from_coeffs(n, p - 1, coords.as_slice()[nh..].to_vec())?)
        };
        Ok(SplitForm { degree: p, horiz, vert })
    }

    pub fn join(&self, s: &SplitForm) -> Result<ExtForm> {
        let n = self.horizontal_dim();
        let p = s.degree;
        if s.horiz.dim() != n || s.horiz.degree() != p {
            return Err(Error::input("join: horizontal part has the wrong shape"));
        }
        match (&s.vert, p) {
            (None, 0) => {}
            (Some(v), p) if p >= 1 && v.dim() == n && v.degree() == p - 1 => {}
            _ => return Err(Error::input("join: vertical part has the wrong shape")),
        }
        let coeffs = self.join_matrix(p) * s.as_vector();
        ExtForm::from_coeffs(self.ambient_dim(), p, coeffs.as_slice().to_vec())
    }

    /// Gram matrix of the horizontal `Λ^p`.
    pub fn horizontal_form_gram(&self, p: usize) -> DMatrix<f64> {
        if p > self.horizontal_dim() {
            return DMatrix::zeros(0, 0);
        }
        self.horizontal.form_gram(p)
    }
}

/// Curvature `b` and `η` from `dϑ = b + η ∧ ϑ`, in horizontal coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitData {
    pub b: ExtForm,
    pub eta: ExtForm,
}

/// A `2 × 2` block operator from `Λ^p_H ⊕ Λ^{p-1}_H` to
/// `Λ^{p'}_H ⊕ Λ^{p'-1}_H`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockOperator {
    pub hh: DMatrix<f64>,
    pub hv: DMatrix<f64>,
    pub vh: DMatrix<f64>,
    pub vv: DMatrix<f64>,
}

impl BlockOperator {
    pub fn to_matrix(&self) -> DMatrix<f64> {
        let (r0, c0) = self.hh.shape();
        let (r1, c1) = self.vv.shape();
        let mut out = DMatrix::zeros(r0 + r1, c0 + c1);
        out.view_mut((0, 0), (r0, c0)).copy_from(&self.hh);
        out.view_mut((0, c0), (r0, c1)).copy_from(&self.hv);
        out.view_mut((r0, 0), (r1, c0)).copy_from(&self.vh);
        out.view_mut((r0, c0), (r1, c1)).copy_from(&self.vv);
        out
    }

    pub fn off_diagonal_max(&self) -> f64 {
        self.hv.iter().chain(self.vh.iter()).fold(0.0, |w, v| w.max(v.abs()))
    }
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Gram-weighted adjoint `Γ_src^{-1} Aᵀ Γ_dst` of `A: src → dst`.
fn adjoint(a: &DMatrix<f64>, g_src: &DMatrix<f64>, g_dst: &DMatrix<f64>) -> DMatrix<f64> {
    if g_src.nrows() == 0 {
        return DMatrix::zeros(0, a.nrows());
    }
    let rhs = a.transpose() * g_dst;
    g_src.clone().cholesky().expect("form Gram is positive definite").solve(&rhs)
}

/// The block calculus of a metric Lie algebra with one central direction.
#[derive(Clone, Debug)]
pub struct SplitCalculus {
    algebra: MetricLieAlgebra,
    frame: SplitFrame,
    data: SplitData,
}

impl SplitCalculus {
    pub fn new(algebra: &MetricLieAlgebra) -> Result<Self> {
        let z = algebra.unit_central_vector()?;
        let frame = SplitFrame::new(algebra.metric(), &z)?;
        let theta = frame.theta().clone();
        let dtheta = ExtForm::from_coeffs(
            algebra.dim(),
            2,
            (algebra.differential(1) * theta.as_vector()).as_slice().to_vec(),
        )?;
        let parts = frame.split(&dtheta)?;
        let data = SplitData {
            b: parts.horiz,
            eta: parts.vert.expect("degree 2"),
        };
        Ok(SplitCalculus {
            algebra: algebra.clone(),
            frame,
            data,
        })
    }

    pub fn frame(&self) -> &SplitFrame {
        &self.frame
    }

    pub fn data(&self) -> &SplitData {
        &self.data
    }

    fn n(&self) -> usize {
        self.frame.horizontal_dim()
    }

    fn gram(&self, p: usize) -> DMatrix<f64> {
        self.frame.horizontal_form_gram(p)
    }

    /// Horizontal part of `d` restricted to horizontal `p`-forms.
    pub fn d_h(&self, p: usize) -> DMatrix<f64> {
        let n = self.n();
        if p > n {
            return DMatrix::zeros(binomial(n, p + 1), 0);
        }
        let full = self.frame.split_matrix(p + 1) * self.algebra.differential(p) * self.frame.embed_matrix(p);
        full.rows(0, binomial(n, p + 1)).into_owned()
    }

    /// `𝓛_Z = i_Z d + d i_Z` on ambient invariant `p`-forms.
    pub fn lie_derivative_z(&self, p: usize) -> DMatrix<f64> {
        let m = self.algebra.dim();
        let z = self.frame.z();
        let mut out = DMatrix::zeros(binomial(m, p), binomial(m, p));
        if p < m {
            out += interior_matrix(z, p + 1) * self.algebra.differential(p);
        }
        if p >= 1 {
            out += self.algebra.differential(p - 1) * interior_matrix(z, p);
        }
        out
    }

    /// `L x = x ∧ b` on horizontal `q`-forms.
    pub fn op_l(&self, q: usize) -> DMatrix<f64> {
        right_wedge_matrix(&self.data.b, q)
    }

    /// `S x = η ∧ x` on horizontal `q`-forms.
    pub fn op_s(&self, q: usize) -> DMatrix<f64> {
        left_wedge_matrix(&self.data.eta, q)
    }

    /// Adjoint of `op_l(q)`, mapping `Λ^{q+2}_H → Λ^q_H`.
    pub fn op_lstar(&self, q: usize) -> DMatrix<f64> {
        adjoint(&self.op_l(q), &self.gram(q), &self.gram(q + 2))
    }

    /// Adjoint of `op_s(q)`, mapping `Λ^{q+1}_H → Λ^q_H`.
    pub fn op_sstar(&self, q: usize) -> DMatrix<f64> {
        adjoint(&self.op_s(q), &self.gram(q), &self.gram(q + 1))
    }

    /// Adjoint of `d_h(q)`, mapping `Λ^{q+1}_H → Λ^q_H`.
    pub fn d_h_star(&self, q: usize) -> DMatrix<f64> {
        adjoint(&self.d_h(q), &self.gram(q), &self.gram(q + 1))
    }

    fn dims(&self, p: usize) -> (usize, usize) {
        let n = self.n();
        (binomial(n, p), if p == 0 { 0 } else { binomial(n, p - 1) })
    }

    /// `d` on split `p`-forms.
    pub fn block_d(&self, p: usize) -> BlockOperator {
        let (src_h, src_v) = self.dims(p);
        let (dst_h, dst_v) = self.dims(p + 1);
        let hv = if p == 0 {
            DMatrix::zeros(dst_h, 0)
        } else {
            self.op_l(p - 1) * sign(p - 1)
        };
        let vv = if p == 0 {
            DMatrix::zeros(dst_v, 0)
        } else {
            self.d_h(p - 1) + self.op_s(p - 1)
        };
        BlockOperator {
            hh: self.d_h(p),
            hv,
            vh: DMatrix::zeros(dst_v, src_h),
            vv,
        }
        .checked(dst_h, dst_v, src_h, src_v)
    }

    /// `d*` on split `p`-forms (`p ≥ 1`), mapping to split `(p-1)`-forms.
    pub fn block_dstar(&self, p: usize) -> BlockOperator {
        assert!(p >= 1, "codifferential needs p >= 1");
        let (src_h, src_v) = self.dims(p);
        let (dst_h, dst_v) = self.dims(p - 1);
        let vh = if p >= 2 {
            self.op_lstar(p - 2) * sign(p)
        } else {
            DMatrix::zeros(dst_v, src_h)
        };
        let vv = if p >= 2 {
            self.d_h_star(p - 2) + self.op_sstar(p - 2)
        } else {
            DMatrix::zeros(dst_v, src_v)
        };
        BlockOperator {
            hh: self.d_h_star(p - 1),
            hv: DMatrix::zeros(dst_h, src_v),
            vh,
            vv,
        }
        .checked(dst_h, dst_v, src_h, src_v)
    }

    /// `join ∘ block ∘ split` for `d` in degree `p`.
    pub fn conjugated_d(&self, p: usize) -> DMatrix<f64> {
        self.frame.join_matrix(p + 1) * self.block_d(p).to_matrix() * self.frame.split_matrix(p)
    }

    /// `join ∘ block ∘ split` for `d*` in degree `p`.
    pub fn conjugated_dstar(&self, p: usize) -> DMatrix<f64> {
        self.frame.join_matrix(p - 1) * self.block_dstar(p).to_matrix() * self.frame.split_matrix(p)
    }
}

impl BlockOperator {
    fn checked(self, dst_h: usize, dst_v: usize, src_h: usize, src_v: usize) -> Self {
        debug_assert_eq!(self.hh.shape(), (dst_h, src_h));
        debug_assert_eq!(self.hv.shape(), (dst_h, src_v));
        debug_assert_eq!(self.vh.shape(), (dst_v, src_h));
        debug_assert_eq!(self.vv.shape(), (dst_v, src_v));
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenformResult {
    pub is_eigen: bool,
    /// Rayleigh quotient `⟨Δa, a⟩ / ⟨a, a⟩`.
    pub lambda: f64,
    /// `‖Δa - λa‖ / max(‖Δa‖, ‖a‖)`.
    pub residual: f64,
}

pub fn eigenform_test(alg: &MetricLieAlgebra, a: &ExtForm, tol: f64) -> Result<EigenformResult> {
    if a.dim() != alg.dim() {
        return Err(Error::input("eigenform_test: dimension mismatch"));
    }
    let g = alg.metric();
    let norm_a = form_inner(a, a, g)?.sqrt();
    if norm_a == 0.0 {
        return Err(Error::input("eigenform_test: the zero form has no eigenvalue"));
    }
    let p = a.degree();
    let lap_a = ExtForm::from_coeffs(
        alg.dim(),
        p,
        (alg.laplacian(p) * a.as_vector()).as_slice().to_vec(),
    )?;
    let lambda = form_inner(&lap_a, a, g)? / (norm_a * norm_a);
    let diff = &lap_a - &a.scaled(lambda);
    let norm_lap = form_inner(&lap_a, &lap_a, g)?.max(0.0).sqrt();
    let residual = form_inner(&diff, &diff, g)?.max(0.0).sqrt() / norm_lap.max(norm_a);
    Ok(EigenformResult {
        is_eigen: residual < tol,
        lambda,
        residual,
    })
}
