//! The block metric `dθ² ⊕ s` on `T^3 = S¹_θ × T²_{x,y}` with
//! `s = [[1, f(θ)], [f(θ), 1]]`, for which `dx` and `dy` are harmonic but
//! their pointwise inner product is not constant.

use nalgebra::Matrix3;
use serde::Serialize;

use crate::error::{Error, Result};

use super::convergence::ConvergenceTable;
use super::grid::TorusGrid;
use super::trig::TrigPoly;

#[derive(Clone, Debug)]
pub struct CoordMetric3 {
    f: TrigPoly,
}

impl CoordMetric3 {
    /// `f` is a trigonometric polynomial in `θ` alone.
    pub fn new(f: TrigPoly) -> Result<Self> {
        if f.dim() != 1 {
            return Err(Error::input("f must be a function of θ only (one mode per term)"));
        }
        Ok(CoordMetric3 { f })
    }

    pub fn f(&self) -> &TrigPoly {
        &self.f
    }

    /// Vector Gram matrix in the coordinate frame `(∂_θ, ∂_x, ∂_y)`.
    pub fn gram(&self, theta: f64) -> Matrix3<f64> {
        let f = self.f.eval(&[theta]);
        Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, f, 0.0, f, 1.0)
    }

    /// Closed form of `⟨dx, dy⟩ = G^{xy}`.
    pub fn inner_dx_dy(&self, theta: f64) -> f64 {
        let f = self.f.eval(&[theta]);
        -f / (1.0 - f * f)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BkLevel {
    pub res: usize,
    pub dstar_dx_max: f64,
    pub dstar_dy_max: f64,
    pub d_dx_max: f64,
    pub d_dy_max: f64,
    pub inner_min: f64,
    pub inner_max: f64,
    /// Largest deviation of the computed `⟨dx, dy⟩` from `-f/(1-f²)`.
    pub inner_error: f64,
}

/// Evaluates the coordinate codifferential
/// `d*α = -(1/√det G) ∂_i(√det G · G^{ij} α_j)` of the constant forms `dx`,
/// `dy` with central differences, and the pointwise `⟨dx, dy⟩`.
pub fn bk_example_check(metric: &CoordMetric3, res: usize) -> Result<BkLevel> {
    let grid = TorusGrid::new(3, res)?;
    let h = grid.h();
    let np = grid.points();

    // Metric data only depends on θ (axis 0).
    let mut sqrt_det = Vec::with_capacity(res);
    let mut inv = Vec::with_capacity(res);
    for k in 0..res {
        let g = metric.gram(k as f64 * h);
        let det = g.determinant();
        if !(det > 0.0) || g[(1, 2)].abs() >= 1.0 {
            return Err(Error::input(format!(
                "metric is not positive definite at θ = {}",
                k as f64 * h
            )));
        }
        sqrt_det.push(det.sqrt());
        inv.push(g.try_inverse().expect("positive definite"));
    }

    let dstar = |j: usize| -> f64 {
        // flux_i = √det G · G^{ij} for α = dx_j
        let flux = |p: usize, i: usize| {
            let k = grid.coord(p, 0);
            sqrt_det[k] * inv[k][(i, j)]
        };
        let mut worst: f64 = 0.0;
        for p in 0..np {
            let k = grid.coord(p, 0);
            let mut div = 0.0;
            for i in 0..3 {
                div += (flux(grid.shift(p, i, 1), i) - flux(grid.shift(p, i, -1), i)) / (2.0 * h);
            }
            worst = worst.max((-div / sqrt_det[k]).abs());
        }
        worst
    };

    let computed: Vec<f64> = inv.iter().map(|gi| gi[(1, 2)]).collect();
    let inner_error = computed
        .iter()
        .enumerate()
        .map(|(k, v)| (v - metric.inner_dx_dy(k as f64 * h)).abs())
        .fold(0.0, f64::max);

    Ok(BkLevel {
        res,
        dstar_dx_max: dstar(1),
        dstar_dy_max: dstar(2),
        // Coordinate differentials have constant coefficients; the discrete
        // exterior derivative of a constant field vanishes identically.
        d_dx_max: 0.0,
        d_dy_max: 0.0,
        inner_min: computed.iter().copied().fold(f64::INFINITY, f64::min),
        inner_max: computed.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        inner_error,
    })
}

pub fn bk_convergence(metric: &CoordMetric3, levels: &[usize]) -> Result<(Vec<BkLevel>, ConvergenceTable)> {
    let rows = levels
        .iter()
        .map(|&r| bk_example_check(metric, r))
        .collect::<Result<Vec<_>>>()?;
    let table = ConvergenceTable::new(&rows.iter().map(|r| (r.res, r.inner_error)).collect::<Vec<_>>());
    Ok((rows, table))
}
