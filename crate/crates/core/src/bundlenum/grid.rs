//! Uniform periodic grids on the unit torus and fields of forms over them.
//!
//! Two layouts are used. *Collocated* fields store every component at the
//! grid points `x = i·h`. *Staggered* fields store the component with
//! multi-index `I` at `x + (h/2)·1_I`, which is the cubical cochain layout:
//! the discrete differential is a central difference about the component's
//! own location, satisfies `d ∘ d = 0` exactly, and has no spurious kernel.

use std::f64::consts::PI;

use nalgebra_sparse::{CooMatrix, CsrMatrix};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exterior::{basis, binomial, merge_sign, ExtForm, MultiIndex};

use super::trig::{TrigForm, TrigPoly, Wave};

pub const MIN_RES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusGrid {
    n: usize,
    res: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    Collocated,
    Staggered,
}

impl TorusGrid {
    pub fn new(n: usize, res: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("torus dimension must be positive"));
        }
        if res < MIN_RES {
            return Err(Error::input(format!("resolution {res} is below the minimum {MIN_RES}")));
        }
        let points = (res as u128).checked_pow(n as u32);
        if points.map_or(true, |p| p > (1 << 27)) {
            return Err(Error::Unsupported(format!("grid {res}^{n} is too large")));
        }
        Ok(TorusGrid { n, res })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn res(&self) -> usize {
        self.res
    }

    pub fn h(&self) -> f64 {
        1.0 / self.res as f64
    }

    pub fn points(&self) -> usize {
        self.res.pow(self.n as u32)
    }

    fn stride(&self, axis: usize) -> usize {
        self.res.pow(axis as u32)
    }

    pub fn coord(&self, point: usize, axis: usize) -> usize {
        (point / self.stride(axis)) % self.res
    }

    /// Index of `point + step·e_axis`, periodically wrapped.
    pub fn shift(&self, point: usize, axis: usize, step: isize) -> usize {
        let s = self.stride(axis);
        let c = self.coord(point, axis) as isize;
        let r = self.res as isize;
        let nc = (c + step).rem_euclid(r) as usize;
        point - (c as usize) * s + nc * s
    }

    /// Position of a component with multi-index `offset` attached to `point`.
    pub fn position(&self, point: usize, offset: Option<&MultiIndex>, out: &mut [f64]) {
        let h = self.h();
        for (axis, o) in out.iter_mut().enumerate() {
            let half = offset.map_or(false, |m| m.contains(axis));
            *o = (self.coord(point, axis) as f64 + if half { 0.5 } else { 0.0 }) * h;
        }
    }
}

/// Component arrays of a `p`-form over a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusField {
    grid: TorusGrid,
    degree: usize,
    comps: Vec<Vec<f64>>,
}

impl TorusField {
    pub fn zeros(grid: TorusGrid, degree: usize) -> Self {
        TorusField {
            grid,
            degree,
            comps: vec![vec![0.0; grid.points()]; binomial(grid.dim(), degree)],
        }
    }

    pub fn from_comps(grid: TorusGrid, degree: usize, comps: Vec<Vec<f64>>) -> Result<Self> {
        if comps.len() != binomial(grid.dim(), degree) || comps.iter().any(|c| c.len() != grid.points()) {
            return Err(Error::input("field components do not match the grid"));
        }
        if comps.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::input("field values must be finite"));
        }
        Ok(TorusField { grid, degree, comps })
    }

    pub fn sample(grid: TorusGrid, form: &TrigForm, layout: Layout) -> Self {
        assert_eq!(grid.dim(), form.dim());
        let idx = basis(grid.dim(), form.degree());
        let comps = idx
            .iter()
            .zip(form.comps())
            .map(|(mi, poly)| sample_poly(grid, poly, matches!(layout, Layout::Staggered).then_some(mi)))
            .collect();
        TorusField {
            grid,
            degree: form.degree(),
            comps,
        }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn comps(&self) -> &[Vec<f64>] {
        &self.comps
    }

    /// All components concatenated, component-major.
    pub fn flatten(&self) -> Vec<f64> {
        self.comps.concat()
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().flatten().fold(0.0, |w, v| w.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &TorusField) -> f64 {
        assert_eq!(self.comps.len(), other.comps.len());
        self.comps
            .iter()
            .zip(&other.comps)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }

    pub fn add(&self, other: &TorusField) -> Self {
        assert_eq!(self.degree, other.degree);
        TorusField {
            grid: self.grid,
            degree: self.degree,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        TorusField {
            grid: self.grid,
            degree: self.degree,
            comps: self.comps.iter().map(|c| c.iter().map(|v| s * v).collect()).collect(),
        }
    }

    /// Second-order central difference `∂_axis` of every component
    /// (collocated layout).
    pub fn central_derivative(&self, axis: usize) -> Self {
        let g = self.grid;
        let inv = 0.5 / g.h();
        let comps = self
            .comps
            .iter()
            .map(|c| {
                (0..g.points())
                    .into_par_iter()
                    .map(|p| (c[g.shift(p, axis, 1)] - c[g.shift(p, axis, -1)]) * inv)
                    .collect()
            })
            .collect();
        TorusField {
            grid: g,
            degree: self.degree,
            comps,
        }
    }

    /// `e_axis ⌟ self`.
    pub fn contract(&self, axis: usize) -> Self {
        let n = self.grid.dim();
        let mut out = TorusField::zeros(self.grid, self.degree.saturating_sub(1));
        if self.degree == 0 {
            return out;
        }
        for (r, idx) in basis(n, self.degree).iter().enumerate() {
            if let Some(slot) = idx.indices().iter().position(|&i| i == axis) {
                let sign = if slot % 2 == 0 { 1.0 } else { -1.0 };
                let dst = idx.without_slot(slot).rank(n);
                for (o, v) in out.comps[dst].iter_mut().zip(&self.comps[r]) {
                    *o += sign * v;
                }
            }
        }
        out
    }

    /// `a ∧ self` for a constant form `a`.
    pub fn wedge_left(&self, a: &ExtForm) -> Self {
        let n = self.grid.dim();
        let q = a.degree() + self.degree;
        let mut out = TorusField::zeros(self.grid, q);
        if q > n {
            return out;
        }
        for (ia, ca) in a.terms() {
            for (r, idx) in basis(n, self.degree).iter().enumerate() {
                if let Some((s, merged)) = merge_sign(ia.indices(), idx.indices()) {
                    let dst = merged.rank(n);
                    for (o, v) in out.comps[dst].iter_mut().zip(&self.comps[r]) {
                        *o += s * ca * v;
                    }
                }
            }
        }
        out
    }

    /// Flat codifferential `-Σ_i e_i ⌟ ∂_i` with central differences.
    pub fn central_codifferential(&self) -> Self {
        let mut out = TorusField::zeros(self.grid, self.degree.saturating_sub(1));
        if self.degree == 0 {
            return out;
        }
        for axis in 0..self.grid.dim() {
            out = out.add(&self.central_derivative(axis).contract(axis).scaled(-1.0));
        }
        out
    }
}

/// Samples a trigonometric polynomial on the grid, shifted by half a cell
/// along the axes in `offset`. Each term is a product of per-axis phase
/// factors, so no transcendental is evaluated per point.
fn sample_poly(grid: TorusGrid, poly: &TrigPoly, offset: Option<&MultiIndex>) -> Vec<f64> {
    let (n, res, h) = (grid.dim(), grid.res(), grid.h());
    let tables: Vec<Vec<Vec<(f64, f64)>>> = poly
        .terms()
        .iter()
        .map(|t| {
            (0..n)
                .map(|j| {
                    let half = if offset.is_some_and(|m| m.contains(j)) { 0.5 } else { 0.0 };
                    (0..res)
                        .map(|c| {
                            let a = 2.0 * PI * t.modes[j] as f64 * (c as f64 + half) * h;
                            (a.cos(), a.sin())
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    (0..grid.points())
        .into_par_iter()
        .map(|p| {
            let mut v = 0.0;
            for (t, axes) in poly.terms().iter().zip(&tables) {
                let (mut re, mut im, mut q) = (1.0, 0.0, p);
                for axis in axes {
                    let (c, s) = axis[q % res];
                    q /= res;
                    (re, im) = (re * c - im * s, re * s + im * c);
                }
                v += t.coeff * if t.wave == Wave::Sin { im } else { re };
            }
            v
        })
        .collect()
}

fn to_csr(coo: &CooMatrix<f64>) -> CsrMatrix<f64> {
    CsrMatrix::from(coo)
}

/// Staggered discrete exterior derivative `Λ^p → Λ^{p+1}`, acting on
/// component-major flattened fields:
/// `(d u)_J[x] = Σ_r (-1)^r (u_{J∖j_r}[x + e_{j_r}] - u_{J∖j_r}[x]) / h`.
pub fn dec_differential(grid: TorusGrid, p: usize) -> CsrMatrix<f64> {
    let n = grid.dim();
    let np = grid.points();
    let rows = binomial(n, p + 1) * np;
    let cols = binomial(n, p) * np;
    let mut coo = CooMatrix::new(rows, cols);
    if p >= n {
        return to_csr(&coo);
    }
    let inv_h = 1.0 / grid.h();
    for (jr, j) in basis(n, p + 1).iter().enumerate() {
        for (slot, &axis) in j.indices().iter().enumerate() {
            let src = j.without_slot(slot).rank(n);
            let sign = if slot % 2 == 0 { 1.0 } else { -1.0 };
            for x in 0..np {
                let row = jr * np + x;
                coo.push(row, src * np + grid.shift(x, axis, 1), sign * inv_h);
                coo.push(row, src * np + x, -sign * inv_h);
            }
        }
    }
    to_csr(&coo)
}

/// Average of a component located at `½·1_from` onto `½·1_to` (`from ⊆ to`):
/// returns the `2^{|to∖from|}` source points with equal weights.
pub fn interpolation_stencil(grid: TorusGrid, x: usize, from: &MultiIndex, to: &MultiIndex) -> Vec<usize> {
    let extra: Vec<usize> = to.indices().iter().copied().filter(|a| !from.contains(*a)).collect();
    let mut pts = vec![x];
    for axis in extra {
        let shifted: Vec<usize> = pts.iter().map(|&p| grid.shift(p, axis, 1)).collect();
        pts.extend(shifted);
    }
    pts
}

/// Staggered `x ↦ x ∧ b` from `q`-forms to `(q+2)`-forms, with the 2-form
/// `b` evaluated pointwise at each target location.
pub fn dec_wedge_right(grid: TorusGrid, q: usize, b: &TrigForm) -> CsrMatrix<f64> {
    let n = grid.dim();
    let np = grid.points();
    let rows = binomial(n, q + 2) * np;
    let cols = binomial(n, q) * np;
    let mut coo = CooMatrix::new(rows, cols);
    if q + 2 > n {
        return to_csr(&coo);
    }
    let mut pos = vec![0.0; n];
    for (jr, j) in basis(n, q + 2).iter().enumerate() {
        for (kr, k) in basis(n, q).iter().enumerate() {
            if !k.indices().iter().all(|i| j.contains(*i)) {
                continue;
            }
            let rest: Vec<usize> = j.indices().iter().copied().filter(|i| !k.contains(*i)).collect();
            let (sign, _) = merge_sign(k.indices(), &rest).expect("disjoint");
            let rest = MultiIndex::new(rest, n).expect("increasing");
            let poly = b.comp(&rest);
            if poly.is_zero() {
                continue;
            }
            let weight = 0.25;
            for x in 0..np {
                grid.position(x, Some(j), &mut pos);
                let bv = poly.eval(&pos);
                if bv == 0.0 {
                    continue;
                }
                for s in interpolation_stencil(grid, x, k, j) {
                    coo.push(jr * np + x, kr * np + s, sign * weight * bv);
                }
            }
        }
    }
    to_csr(&coo)
}

/// Averages each component of a staggered 1-form onto the vertices.
pub fn one_form_at_vertices(grid: TorusGrid, values: &[f64], comp: usize) -> Vec<f64> {
    let np = grid.points();
    let c = &values[comp * np..(comp + 1) * np];
    (0..np).map(|x| 0.5 * (c[x] + c[grid.shift(x, comp, -1)])).collect()
}
