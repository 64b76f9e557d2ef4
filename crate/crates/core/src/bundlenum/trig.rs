//! Trigonometric polynomials and forms with trigonometric coefficients on
//! the unit torus `T^n = R^n / Z^n`.
//!
//! A term `coeff · sin(2π k·x)` or `coeff · cos(2π k·x)` is differentiated and
//! multiplied in closed form, which makes these the analytic reference for
//! every finite-difference computation on the torus.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{basis, binomial, merge_sign, ExtForm, MultiIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wave {
    Sin,
    Cos,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    pub coeff: f64,
    pub wave: Wave,
    pub modes: Vec<i64>,
}

impl TrigTerm {
    pub fn new(coeff: f64, wave: Wave, modes: Vec<i64>) -> Self {
        TrigTerm { coeff, wave, modes }
    }

    fn phase(&self, x: &[f64]) -> f64 {
        2.0 * PI * self.modes.iter().zip(x).map(|(k, xi)| *k as f64 * xi).sum::<f64>()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let t = self.phase(x);
        match self.wave {
            Wave::Sin => self.coeff * t.sin(),
            Wave::Cos => self.coeff * t.cos(),
        }
    }
}

/// Finite sum of trigonometric terms in `dim` variables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrigPoly {
    dim: usize,
    terms: Vec<TrigTerm>,
}

impl TrigPoly {
    pub fn new(dim: usize, terms: Vec<TrigTerm>) -> Result<Self> {
        for t in &terms {
            if t.modes.len() != dim {
                return Err(Error::input(format!(
                    "trigonometric term has {} modes, expected {dim}",
                    t.modes.len()
                )));
            }
            if !t.coeff.is_finite() {
                return Err(Error::input("trigonometric coefficients must be finite"));
            }
        }
        Ok(TrigPoly { dim, terms })
    }

    pub fn zero(dim: usize) -> Self {
        TrigPoly { dim, terms: Vec::new() }
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        TrigPoly {
            dim,
            terms: vec![TrigTerm::new(value, Wave::Cos, vec![0; dim])],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[TrigTerm] {
        &self.terms
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    /// Largest `|k_i|` over all terms and axes.
    pub fn max_mode(&self) -> i64 {
        self.terms
            .iter()
            .flat_map(|t| t.modes.iter().map(|k| k.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff == 0.0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        TrigPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| TrigTerm::new(s * t.coeff, t.wave, t.modes.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &TrigPoly) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        TrigPoly { dim: self.dim, terms }
    }

    /// `∂ / ∂x_axis`.
    pub fn derivative(&self, axis: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.modes[axis] != 0)
            .map(|t| {
                let f = 2.0 * PI * t.modes[axis] as f64 * t.coeff;
                match t.wave {
                    Wave::Sin => TrigTerm::new(f, Wave::Cos, t.modes.clone()),
                    Wave::Cos => TrigTerm::new(-f, Wave::Sin, t.modes.clone()),
                }
            })
            .collect();
        TrigPoly { dim: self.dim, terms }
    }

    /// Pointwise product, expanded with the product-to-sum formulas.
    pub fn mul(&self, other: &TrigPoly) -> Self {
        let mut terms = Vec::with_capacity(2 * self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let plus: Vec<i64> = a.modes.iter().zip(&b.modes).map(|(x, y)| x + y).collect();
                let minus: Vec<i64> = a.modes.iter().zip(&b.modes).map(|(x, y)| x - y).collect();
                let c = 0.5 * a.coeff * b.coeff;
                let (w_minus, s_minus, w_plus, s_plus) = match (a.wave, b.wave) {
                    (Wave::Sin, Wave::Sin) => (Wave::Cos, 1.0, Wave::Cos, -1.0),
                    (Wave::Sin, Wave::Cos) => (Wave::Sin, 1.0, Wave::Sin, 1.0),
                    (Wave::Cos, Wave::Sin) => (Wave::Sin, -1.0, Wave::Sin, 1.0),
                    (Wave::Cos, Wave::Cos) => (Wave::Cos, 1.0, Wave::Cos, 1.0),
                };
                terms.push(TrigTerm::new(s_minus * c, w_minus, minus));
                terms.push(TrigTerm::new(s_plus * c, w_plus, plus));
            }
        }
        TrigPoly { dim: self.dim, terms }
    }
}

/// A `p`-form on `T^n` with trigonometric coefficients in the flat coframe
/// `dx_1..dx_n`, components in lexicographic multi-index order.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigForm {
    dim: usize,
    degree: usize,
    comps: Vec<TrigPoly>,
}

impl TrigForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        TrigForm {
            dim,
            degree,
            comps: vec![TrigPoly::zero(dim); binomial(dim, degree)],
        }
    }

    pub fn new(dim: usize, degree: usize, comps: Vec<TrigPoly>) -> Result<Self> {
        if comps.len() != binomial(dim, degree) {
            return Err(Error::input(format!(
                "a {degree}-form on T^{dim} needs {} components, got {}",
                binomial(dim, degree),
                comps.len()
            )));
        }
        if comps.iter().any(|c| c.dim() != dim) {
            return Err(Error::input("component dimension mismatch"));
        }
        Ok(TrigForm { dim, degree, comps })
    }

    /// Random form with `terms` terms per component, modes in `{-1, 0, 1}^n`
    /// and coefficients uniform in `[-1, 1]`.
    pub fn random<R: Rng>(dim: usize, degree: usize, terms: usize, rng: &mut R) -> Self {
        let comps = (0..binomial(dim, degree))
            .map(|_| {
                let terms = (0..terms)
                    .map(|_| {
                        let modes = (0..dim).map(|_| rng.random_range(-1..=1)).collect();
                        let wave = if rng.random::<bool>() { Wave::Sin } else { Wave::Cos };
                        TrigTerm::new(2.0 * rng.random::<f64>() - 1.0, wave, modes)
                    })
                    .collect();
                TrigPoly { dim, terms }
            })
            .collect();
        TrigForm { dim, degree, comps }
    }

    /// Constant-coefficient form.
    pub fn constant(form: &ExtForm) -> Self {
        let dim = form.dim();
        TrigForm {
            dim,
            degree: form.degree(),
            comps: form
                .coeffs()
                .iter()
                .map(|c| if *c == 0.0 { TrigPoly::zero(dim) } else { TrigPoly::constant(dim, *c) })
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn comps(&self) -> &[TrigPoly] {
        &self.comps
    }

    pub fn comp(&self, index: &MultiIndex) -> &TrigPoly {
        &self.comps[index.rank(self.dim)]
    }

    pub fn max_mode(&self) -> i64 {
        self.comps.iter().map(TrigPoly::max_mode).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> ExtForm {
        let coeffs = self.comps.iter().map(|c| c.eval(x)).collect();
        ExtForm::from_coeffs(self.dim, self.degree, coeffs).expect("sized")
    }

    pub fn add(&self, other: &TrigForm) -> Self {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree));
        TrigForm {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        TrigForm {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().map(|c| c.scaled(s)).collect(),
        }
    }

    /// Coefficient-wise `∂ / ∂x_axis`, i.e. the flat covariant derivative.
    pub fn derivative(&self, axis: usize) -> Self {
        TrigForm {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().map(|c| c.derivative(axis)).collect(),
        }
    }

    /// `∇_v` for a constant vector `v`.
    pub fn directional(&self, v: &[f64]) -> Self {
        let mut out = TrigForm::zero(self.dim, self.degree);
        for (axis, vi) in v.iter().enumerate() {
            if *vi != 0.0 {
                out = out.add(&self.derivative(axis).scaled(*vi));
            }
        }
        out
    }

    /// `e_axis ⌟ self`.
    pub fn contract(&self, axis: usize) -> Self {
        let mut comps = vec![TrigPoly::zero(self.dim); binomial(self.dim, self.degree.saturating_sub(1))];
        if self.degree == 0 {
            return TrigForm { dim: self.dim, degree: 0, comps: vec![TrigPoly::zero(self.dim)] };
        }
        for (r, idx) in basis(self.dim, self.degree).iter().enumerate() {
            if let Some(slot) = idx.indices().iter().position(|&i| i == axis) {
                let sign = if slot % 2 == 0 { 1.0 } else { -1.0 };
                let dst = idx.without_slot(slot).rank(self.dim);
                comps[dst] = comps[dst].add(&self.comps[r].scaled(sign));
            }
        }
        TrigForm { dim: self.dim, degree: self.degree - 1, comps }
    }

    /// `a ∧ self` for a constant form `a`.
    pub fn wedge_left(&self, a: &ExtForm) -> Self {
        let q = a.degree() + self.degree;
        let mut out = TrigForm::zero(self.dim, q);
        if q > self.dim {
            return out;
        }
        for (ia, ca) in a.terms() {
            for (r, idx) in basis(self.dim, self.degree).iter().enumerate() {
                if let Some((s, merged)) = merge_sign(ia.indices(), idx.indices()) {
                    let dst = merged.rank(self.dim);
                    out.comps[dst] = out.comps[dst].add(&self.comps[r].scaled(s * ca));
                }
            }
        }
        out
    }

    /// Exterior derivative.
    pub fn d(&self) -> Self {
        let mut out = TrigForm::zero(self.dim, self.degree + 1);
        if self.degree >= self.dim {
            return out;
        }
        for axis in 0..self.dim {
            let e = ExtForm::monomial(self.dim, &[axis]).expect("in range");
            out = out.add(&self.derivative(axis).wedge_left(&e));
        }
        out
    }

    /// Flat codifferential `d*β = -Σ_i e_i ⌟ ∂_i β`.
    pub fn codifferential(&self) -> Self {
        let mut out = TrigForm::zero(self.dim, self.degree.saturating_sub(1));
        if self.degree == 0 {
            return out;
        }
        for axis in 0..self.dim {
            out = out.add(&self.derivative(axis).contract(axis).scaled(-1.0));
        }
        out
    }
}
