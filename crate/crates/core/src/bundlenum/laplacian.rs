//! Invariant Hodge Laplacians of circle bundles over flat tori.
//!
//! The bundle carries the orthonormal coframe `(dx_1, …, dx_n, ϑ)` with
//! `dϑ = b = Σ_{i<j} c_ij dx_i ∧ dx_j + dA`. A fiber-invariant `p`-form is a
//! pair `(h, v)` of torus fields meaning `h + v ∧ ϑ`, and
//!
//! ```text
//! d (h, v) = ( D h + (-1)^{p-1} v ∧ b ,  D v ),
//! ```
//!
//! with `D` the flat differential. Everything is discretized on the staggered
//! grid, and adjoints are exact transposes.

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::{CooMatrix, CsrMatrix};
use serde::Serialize;

use crate::eigen::{self, EigenOptions, Method};
use crate::error::{Error, Result};
use crate::exterior::{binomial, ExtForm};
use crate::systole::Lattice;

use super::grid::{dec_differential, dec_wedge_right, one_form_at_vertices, Layout, TorusField, TorusGrid};
use super::trig::{TrigForm, TrigPoly};

pub const KERNEL_TOL: f64 = 1e-8;
pub const NORM_TOL: f64 = 1e-5;
pub const RATIO_TOL: f64 = 1e-6;
pub const MAX_SCAN: usize = 8;

#[derive(Clone, Debug)]
pub struct BundleMetric {
    c: DMatrix<f64>,
    alpha: TrigForm,
    fiber_length: f64,
    base_lattice: Lattice,
}

impl BundleMetric {
    pub fn new(c: DMatrix<f64>, alpha: TrigForm, fiber_length: f64, base_lattice: Lattice) -> Result<Self> {
        let n = c.nrows();
        if c.ncols() != n || n == 0 {
            return Err(Error::input("c must be a nonempty square matrix"));
        }
        if (&c + c.transpose()).amax() > 1e-12 || c.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("c must be finite and antisymmetric"));
        }
        if alpha.dim() != n || alpha.degree() != 1 {
            return Err(Error::input(format!("the connection perturbation must be a 1-form on T^{n}")));
        }
        if !(fiber_length > 0.0 && fiber_length.is_finite()) {
            return Err(Error::input("fiber length must be positive"));
        }
        if base_lattice.rank() != n {
            return Err(Error::input(format!(
                "base lattice has rank {}, torus has dimension {n}",
                base_lattice.rank()
            )));
        }
        Ok(BundleMetric { c, alpha, fiber_length, base_lattice })
    }

    /// Left-invariant Heisenberg metric `dϑ = c dx_1 ∧ dx_2` over `Z^2`.
    pub fn heisenberg(c: f64) -> Self {
        let cm = DMatrix::from_row_slice(2, 2, &[0.0, c, -c, 0.0]);
        BundleMetric::new(cm, TrigForm::zero(2, 1), 1.0, Lattice::integer(2)).expect("valid")
    }

    pub fn dim(&self) -> usize {
        self.c.nrows()
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn alpha(&self) -> &TrigForm {
        &self.alpha
    }

    pub fn fiber_length(&self) -> f64 {
        self.fiber_length
    }

    pub fn base_lattice(&self) -> &Lattice {
        &self.base_lattice
    }

    pub fn with_lattice(mut self, lattice: Lattice, fiber_length: f64) -> Result<Self> {
        if lattice.rank() != self.dim() || !(fiber_length > 0.0) {
            return Err(Error::input("lattice rank or fiber length is invalid"));
        }
        self.base_lattice = lattice;
        self.fiber_length = fiber_length;
        Ok(self)
    }

    pub fn is_flat(&self) -> bool {
        self.c.iter().all(|v| *v == 0.0) && self.curvature().comps().iter().all(TrigPoly::is_zero)
    }

    /// `b = Σ_{i<j} c_ij dx_i ∧ dx_j + dA`.
    pub fn curvature(&self) -> TrigForm {
        let n = self.dim();
        let mut constant = ExtForm::zero(n, 2);
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                constant.coeffs_mut()[k] = self.c[(i, j)];
                k += 1;
            }
        }
        TrigForm::constant(&constant).add(&self.alpha.d())
    }

    /// Nyquist check: every mode of `A` must satisfy `|k| < res / 2`.
    pub fn check_resolution(&self, grid: &TorusGrid) -> Result<()> {
        let k = self.alpha.max_mode();
        if 2 * k.unsigned_abs() as usize >= grid.res() {
            return Err(Error::input(format!(
                "resolution {} does not resolve connection mode {k}; need res > {}",
                grid.res(),
                2 * k
            )));
        }
        Ok(())
    }
}

fn stack(rows: usize, cols: usize, blocks: &[(usize, usize, &CsrMatrix<f64>)]) -> CsrMatrix<f64> {
    let mut coo = CooMatrix::new(rows, cols);
    for (r0, c0, m) in blocks {
        for (i, j, v) in m.triplet_iter() {
            coo.push(r0 + i, c0 + j, *v);
        }
    }
    CsrMatrix::from(&coo)
}

/// The invariant split de Rham complex on a grid.
#[derive(Clone, Debug)]
pub struct InvariantComplex {
    grid: TorusGrid,
    b: TrigForm,
    diffs: Vec<CsrMatrix<f64>>,
}

impl InvariantComplex {
    pub fn new(metric: &BundleMetric, grid: TorusGrid) -> Result<Self> {
        if grid.dim() != metric.dim() {
            return Err(Error::input("grid and metric dimensions differ"));
        }
        metric.check_resolution(&grid)?;
        let b = metric.curvature();
        let n = grid.dim();
        let np = grid.points();
        let diffs = (0..=n)
            .map(|p| {
                let (src_h, src_v) = (binomial(n, p) * np, if p == 0 { 0 } else { binomial(n, p - 1) * np });
                let (dst_h, dst_v) = (binomial(n, p + 1) * np, binomial(n, p) * np);
                let dh = dec_differential(grid, p);
                let mut blocks = vec![(0, 0, &dh)];
                let (lv, dv);
                if p >= 1 {
                    let sign = if (p - 1) % 2 == 0 { 1.0 } else { -1.0 };
                    lv = dec_wedge_right(grid, p - 1, &b) * sign;
                    dv = dec_differential(grid, p - 1);
                    blocks.push((0, src_h, &lv));
                    blocks.push((dst_h, src_h, &dv));
                }
                stack(dst_h + dst_v, src_h + src_v, &blocks)
            })
            .collect();
        Ok(InvariantComplex { grid, b, diffs })
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn curvature(&self) -> &TrigForm {
        &self.b
    }

    pub fn differential(&self, p: usize) -> &CsrMatrix<f64> {
        &self.diffs[p]
    }

    /// `d d* + d* d` on split `p`-forms.
    pub fn laplacian(&self, p: usize) -> CsrMatrix<f64> {
        let dp = &self.diffs[p];
        let mut lap = &dp.transpose() * dp;
        if p >= 1 {
            let dm = &self.diffs[p - 1];
            lap = &lap + &(dm * &dm.transpose());
        }
        lap
    }
}

/// Assembles the invariant Hodge Laplacian on 1-forms, of size
/// `(n + 1) · res^n`.
pub fn assemble_invariant_laplacian(metric: &BundleMetric, grid: TorusGrid) -> Result<CsrMatrix<f64>> {
    Ok(InvariantComplex::new(metric, grid)?.laplacian(1))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// `(max - min) / mean`.
    pub variation: f64,
}

impl NormStats {
    fn of(values: &[f64]) -> Self {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        NormStats {
            min,
            max,
            mean,
            variation: if mean > 0.0 { (max - min) / mean } else { 0.0 },
        }
    }
}

/// Pointwise norm `|h + vϑ|` of a split 1-form at the grid vertices.
pub fn pointwise_norm(grid: TorusGrid, field: &[f64]) -> Vec<f64> {
    let n = grid.dim();
    let np = grid.points();
    let comps: Vec<Vec<f64>> = (0..n).map(|i| one_form_at_vertices(grid, field, i)).collect();
    let v = &field[n * np..(n + 1) * np];
    (0..np)
        .map(|x| (comps.iter().map(|c| c[x] * c[x]).sum::<f64>() + v[x] * v[x]).sqrt())
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct HarmonicScan {
    pub res: usize,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub kernel_dim: usize,
    /// Smallest eigenvalue above the kernel threshold, if computed.
    pub gap: Option<f64>,
    /// Norm statistics of the near-kernel eigenfields.
    pub kernel_norms: Vec<NormStats>,
    pub max_norm_variation: f64,
    pub kernel_tol: f64,
    pub method: Method,
    pub iterations: usize,
    pub symmetry_residual: f64,
    #[serde(skip)]
    pub fields: DMatrix<f64>,
}

pub fn harmonic_scan(
    metric: &BundleMetric,
    grid: TorusGrid,
    k: usize,
    kernel_tol: f64,
    opts: &EigenOptions,
) -> Result<HarmonicScan> {
    if k == 0 || k > MAX_SCAN {
        return Err(Error::input(format!("harmonic scan count must be in 1..={MAX_SCAN}")));
    }
    let lap = assemble_invariant_laplacian(metric, grid)?;
    let symmetry_residual = eigen::symmetry_residual(&lap);
    let pre = super::precond::FlatPreconditioner::new(grid, metric.dim() + 1);
    let precond = |r: &[f64], z: &mut [f64]| pre.apply(r, z);
    let pairs = eigen::smallest_eigenpairs(&lap, &EigenOptions { count: k, ..*opts }, Some(&precond))?;
    let kernel_dim = pairs.values.iter().filter(|v| **v < kernel_tol).count();
    let kernel_norms: Vec<NormStats> = (0..kernel_dim)
        .map(|j| NormStats::of(&pointwise_norm(grid, pairs.vectors.column(j).as_slice())))
        .collect();
    let max_norm_variation = kernel_norms.iter().map(|s| s.variation).fold(0.0, f64::max);
    Ok(HarmonicScan {
        res: grid.res(),
        gap: pairs.values.get(kernel_dim).copied(),
        eigenvalues: pairs.values,
        residuals: pairs.residuals,
        kernel_dim,
        kernel_norms,
        max_norm_variation,
        kernel_tol,
        method: pairs.method,
        iterations: pairs.iterations,
        symmetry_residual,
        fields: pairs.vectors,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Discrimination {
    pub is_left_invariant: bool,
    /// `max - min` of the ratio field `(Δω)_H / ω_H`.
    pub variation: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub ratio_mean: f64,
    /// Largest deviation of the ratio field from the pointwise `|b|²`.
    pub deviation_from_b2: f64,
    /// Largest coefficient of `Δω` along `ϑ`.
    pub vertical_max: f64,
    pub tol: f64,
}

/// Applies the invariant Laplacian to `ω = dx_1 ∧ dx_2` on a 3-dimensional
/// bundle and measures how far it is from an eigenform.
pub fn left_invariance_discriminator(metric: &BundleMetric, grid: TorusGrid, tol: f64) -> Result<Discrimination> {
    if metric.dim() != 2 {
        return Err(Error::input("the discriminator needs a 2-dimensional base"));
    }
    let complex = InvariantComplex::new(metric, grid)?;
    let lap = complex.laplacian(2);
    let np = grid.points();
    let mut omega = vec![0.0; lap.ncols()];
    omega[..np].iter_mut().for_each(|v| *v = 1.0);
    let mut out = vec![0.0; lap.nrows()];
    eigen::spmv(&lap, &omega, &mut out);
    let ratio = &out[..np];
    let b2 = TorusField::sample(grid, &complex.curvature().clone(), Layout::Staggered);
    let b2: Vec<f64> = b2.comps()[0].iter().map(|v| v * v).collect();
    let stats = NormStats::of(ratio);
    let variation = stats.max - stats.min;
    Ok(Discrimination {
        is_left_invariant: variation < tol,
        variation,
        ratio_min: stats.min,
        ratio_max: stats.max,
        ratio_mean: stats.mean,
        deviation_from_b2: ratio.iter().zip(&b2).map(|(r, b)| (r - b).abs()).fold(0.0, f64::max),
        vertical_max: out[np..].iter().fold(0.0, |w, v| w.max(v.abs())),
        tol,
    })
}

/// Applies the 1-form Laplacian to a field (useful for residual checks).
pub fn apply(op: &CsrMatrix<f64>, x: &DVector<f64>) -> DVector<f64> {
    let mut y = DVector::zeros(op.nrows());
    eigen::spmv(op, x.as_slice(), y.as_mut_slice());
    y
}
