//! Contraction identities for 2-forms on flat tori, checked with central
//! differences against closed-form right-hand sides.
//!
//! On `T^N` with `d*β = -Σ_i e_i ⌟ ∇_i β`,
//!
//! ```text
//! Σ_i e_i ⌟ (∇_{e_i} β + e_i♭ ∧ d*β) = (N - 2) d*β,
//! d*(a ∧ β) = -(∇_{a♯} β + a ∧ d*β)        for parallel a.
//! ```
//!
//! The first right-hand side vanishes identically on `T^2`, the base of a
//! 3-dimensional bundle.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{basis, binomial, merge_sign, ExtForm};

use super::convergence::ConvergenceTable;
use super::grid::{Layout, TorusField, TorusGrid};
use super::trig::TrigForm;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub res: usize,
    pub lhs_max: f64,
    pub rhs_max: f64,
    pub residual: f64,
}

/// `(src, dst, sign)` triples of `e_axis ⌟` on `p`-forms.
fn contraction_table(n: usize, p: usize, axis: usize) -> Vec<(usize, usize, f64)> {
    basis(n, p)
        .iter()
        .enumerate()
        .filter_map(|(r, idx)| {
            let slot = idx.indices().iter().position(|&i| i == axis)?;
            let sign = if slot % 2 == 0 { 1.0 } else { -1.0 };
            Some((r, idx.without_slot(slot).rank(n), sign))
        })
        .collect()
}

/// `(src, dst, sign)` triples of `e^axis ∧` on `q`-forms.
fn wedge_table(n: usize, q: usize, axis: usize) -> Vec<(usize, usize, f64)> {
    basis(n, q)
        .iter()
        .enumerate()
        .filter_map(|(r, idx)| {
            let (sign, merged) = merge_sign(&[axis], idx.indices())?;
            Some((r, merged.rank(n), sign))
        })
        .collect()
}

/// Discrete `Σ_i e_i ⌟ (∇_i β + e_i♭ ∧ d*β)` on a collocated field, with
/// central differences, evaluated in one pass over the grid.
pub fn contraction_lhs(beta: &TorusField) -> TorusField {
    let grid = beta.grid();
    let (n, p) = (grid.dim(), beta.degree());
    if p == 0 {
        return TorusField::zeros(grid, 0);
    }
    let out_len = binomial(n, p - 1);
    let contr: Vec<_> = (0..n).map(|i| contraction_table(n, p, i)).collect();
    let wedge: Vec<_> = (0..n).map(|i| wedge_table(n, p - 1, i)).collect();
    let inv = 0.5 / grid.h();
    let src = beta.comps();
    // Point-major scratch, transposed into components at the end.
    let mut flat = vec![0.0; grid.points() * out_len];
    flat.par_chunks_mut(out_len).enumerate().for_each_init(
        || (vec![0.0; out_len], vec![0.0; src.len()]),
        |(dstar, wedged), (x, lhs)| {
            dstar.iter_mut().for_each(|v| *v = 0.0);
            for (i, table) in contr.iter().enumerate() {
                let (fwd, back) = (grid.shift(x, i, 1), grid.shift(x, i, -1));
                for &(r, dst, sign) in table {
                    let v = sign * (src[r][fwd] - src[r][back]) * inv;
                    lhs[dst] += v;
                    dstar[dst] -= v;
                }
            }
            for i in 0..n {
                wedged.iter_mut().for_each(|w| *w = 0.0);
                for &(r, dst, sign) in &wedge[i] {
                    wedged[dst] += sign * dstar[r];
                }
                for &(r, dst, sign) in &contr[i] {
                    lhs[dst] += sign * wedged[r];
                }
            }
        },
    );
    let comps = (0..out_len)
        .map(|c| flat.iter().skip(c).step_by(out_len).copied().collect())
        .collect();
    TorusField::from_comps(grid, p - 1, comps).expect("shape matches the grid")
}

fn check_band_limit(form: &TrigForm, grid: &TorusGrid) -> Result<()> {
    let k = form.max_mode();
    if 2 * k.unsigned_abs() as usize >= grid.res() {
        return Err(Error::input(format!(
            "resolution {} does not resolve mode {k}",
            grid.res()
        )));
    }
    Ok(())
}

pub fn contraction_identity_check(beta: &TrigForm, grid: TorusGrid) -> Result<IdentityResidual> {
    if beta.degree() != 2 || beta.dim() != grid.dim() {
        return Err(Error::input("the contraction identity needs a 2-form on the grid torus"));
    }
    check_band_limit(beta, &grid)?;
    let n = grid.dim() as f64;
    let field = TorusField::sample(grid, beta, Layout::Collocated);
    let lhs = contraction_lhs(&field);
    let rhs = TorusField::sample(grid, &beta.codifferential().scaled(n - 2.0), Layout::Collocated);
    Ok(IdentityResidual {
        res: grid.res(),
        lhs_max: lhs.max_abs(),
        rhs_max: rhs.max_abs(),
        residual: lhs.max_abs_diff(&rhs),
    })
}

pub fn awb_coclosed_check(a: &ExtForm, beta: &TrigForm, grid: TorusGrid) -> Result<IdentityResidual> {
    if a.degree() != 1 || a.dim() != grid.dim() || beta.dim() != grid.dim() {
        return Err(Error::input("awb check needs a constant 1-form and a form on the grid torus"));
    }
    check_band_limit(beta, &grid)?;
    let field = TorusField::sample(grid, beta, Layout::Collocated);
    let lhs = field.wedge_left(a).central_codifferential();
    let rhs_form = beta
        .directional(a.coeffs())
        .add(&beta.codifferential().wedge_left(a))
        .scaled(-1.0);
    let rhs = TorusField::sample(grid, &rhs_form, Layout::Collocated);
    Ok(IdentityResidual {
        res: grid.res(),
        lhs_max: lhs.max_abs(),
        rhs_max: rhs.max_abs(),
        residual: lhs.max_abs_diff(&rhs),
    })
}

/// Runs `check` at each resolution and tabulates the residuals.
pub fn convergence<F>(n: usize, levels: &[usize], mut check: F) -> Result<(Vec<IdentityResidual>, ConvergenceTable)>
where
    F: FnMut(TorusGrid) -> Result<IdentityResidual>,
{
    let mut rows = Vec::with_capacity(levels.len());
    for &res in levels {
        rows.push(check(TorusGrid::new(n, res)?)?);
    }
    let table = ConvergenceTable::new(&rows.iter().map(|r| (r.res, r.residual)).collect::<Vec<_>>());
    Ok((rows, table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundlenum::trig::{TrigPoly, TrigTerm, Wave};

    fn sin_e23() -> TrigForm {
        let mut comps = vec![TrigPoly::zero(4); 6];
        // lexicographic 2-forms on T^4: 01 02 03 12 13 23
        comps[3] = TrigPoly::new(4, vec![TrigTerm::new(1.0, Wave::Sin, vec![1, 0, 0, 0])]).unwrap();
        TrigForm::new(4, 2, comps).unwrap()
    }

    #[test]
    fn parallel_form_gives_zero() {
        let beta = TrigForm::constant(&ExtForm::monomial(3, &[0, 2]).unwrap());
        let r = contraction_identity_check(&beta, TorusGrid::new(3, 8).unwrap()).unwrap();
        assert_eq!(r.lhs_max, 0.0);
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn sin_e23_converges_at_second_order() {
        let beta = sin_e23();
        let (_, t) = convergence(4, &[8, 16], |g| contraction_identity_check(&beta, g)).unwrap();
        assert!(t.converges_at(1.9), "{t:?}");
    }

    #[test]
    fn degenerate_on_two_torus() {
        let beta = TrigForm::new(
            2,
            2,
            vec![TrigPoly::new(2, vec![TrigTerm::new(0.8, Wave::Cos, vec![1, -1])]).unwrap()],
        )
        .unwrap();
        let r = contraction_identity_check(&beta, TorusGrid::new(2, 16).unwrap()).unwrap();
        assert!(r.lhs_max < 1e-12 && r.rhs_max == 0.0);
    }

    #[test]
    fn awb_examples() {
        let mut comps = vec![TrigPoly::zero(4); 6];
        comps[1] = TrigPoly::new(4, vec![TrigTerm::new(1.0, Wave::Cos, vec![0, 1, 0, 0])]).unwrap();
        let beta = TrigForm::new(4, 2, comps).unwrap();
        let e1 = ExtForm::monomial(4, &[0]).unwrap();
        let (_, t) = convergence(4, &[8, 16], |g| awb_coclosed_check(&e1, &beta, g)).unwrap();
        assert!(t.converges_at(1.9), "{t:?}");
        let r = awb_coclosed_check(&ExtForm::zero(4, 1), &beta, TorusGrid::new(4, 8).unwrap()).unwrap();
        assert_eq!((r.lhs_max, r.rhs_max), (0.0, 0.0));
    }

    #[test]
    fn awb_nontrivial_wedge() {
        let mut comps = vec![TrigPoly::zero(3); 3];
        comps[2] = TrigPoly::new(3, vec![TrigTerm::new(1.0, Wave::Sin, vec![1, 1, 0])]).unwrap();
        let beta = TrigForm::new(3, 2, comps).unwrap();
        let a = ExtForm::one_form(&[1.0, -0.5, 0.0]);
        let (rows, t) = convergence(3, &[16, 32], |g| awb_coclosed_check(&a, &beta, g)).unwrap();
        assert!(rows[0].lhs_max > 1.0);
        assert!(t.converges_at(1.9), "{t:?}");
    }
}
