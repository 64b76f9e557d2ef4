//! 2-step nilpotent metric Lie algebras and their invariant Hodge theory.
//!
//! The algebra has a horizontal frame `X_1..X_{n_h}` and a central frame
//! `Z_1..Z_{n_v}`, ordered `X` first. Dual coframe `α_1..α_{n_h}, ζ_1..ζ_{n_v}`.
//! Structure constants `c_ij^k` are defined through the Chevalley–Eilenberg
//! differential,
//!
//! ```text
//! dα_i = 0,    dζ_k = Σ_{i<j} c_ij^k α_i ∧ α_j,
//! ```
//!
//! which with the Cartan convention `dθ(X, Y) = -θ([X, Y])` means
//! `[X_i, X_j] = -Σ_k c_ij^k Z_k` and every other bracket vanishes.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{basis, binomial, wedge, ExtForm, InnerProduct, MultiIndex};

/// Eigenvalues of the Laplacian below this are counted as harmonic.
pub const KERNEL_TOL: f64 = 1e-10;

/// Singular values below `RANK_TOL · max(1, σ_max)` are treated as zero.
pub const RANK_TOL: f64 = 1e-10;

/// One structure constant `c_ij^k` (0-based: `i`, `j` horizontal, `k` central).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StructureConstant {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: f64,
}

impl StructureConstant {
    pub fn new(i: usize, j: usize, k: usize, value: f64) -> Self {
        StructureConstant { i, j, k, value }
    }
}

/// Full bracket table `[e_a, e_b] = Σ_k C[a][b][k] e_k` of an `m`-dimensional
/// algebra. Not constrained to the 2-step shape, so it can also carry
/// deliberately invalid data for negative checks.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketTable {
    dim: usize,
    n_h: usize,
    c: Vec<f64>,
}

impl BracketTable {
    pub fn zeros(dim: usize, n_h: usize) -> Self {
        BracketTable {
            dim,
            n_h,
            c: vec![0.0; dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizontal_dim(&self) -> usize {
        self.n_h
    }

    fn at(&self, a: usize, b: usize, k: usize) -> usize {
        (a * self.dim + b) * self.dim + k
    }

    pub fn get(&self, a: usize, b: usize, k: usize) -> f64 {
        self.c[self.at(a, b, k)]
    }

    /// Sets `[e_a, e_b]_k = value` and `[e_b, e_a]_k = -value`.
    pub fn set(&mut self, a: usize, b: usize, k: usize, value: f64) {
        let i = self.at(a, b, k);
        self.c[i] = value;
        let j = self.at(b, a, k);
        self.c[j] = -value;
    }

    pub fn bracket(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let m = self.dim;
        let mut out = vec![0.0; m];
        for a in 0..m {
            if u[a] == 0.0 {
                continue;
            }
            for b in 0..m {
                if v[b] == 0.0 {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += u[a] * v[b] * self.get(a, b, k);
                }
            }
        }
        out
    }

    /// Largest component of the Jacobiator over all basis triples.
    pub fn jacobi_residual(&self) -> f64 {
        let m = self.dim;
        let unit = |i: usize| {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            e
        };
        let mut worst: f64 = 0.0;
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let (ea, eb, ec) = (unit(a), unit(b), unit(c));
                    let t1 = self.bracket(&ea, &self.bracket(&eb, &ec));
                    let t2 = self.bracket(&eb, &self.bracket(&ec, &ea));
                    let t3 = self.bracket(&ec, &self.bracket(&ea, &eb));
                    for k in 0..m {
                        worst = worst.max((t1[k] + t2[k] + t3[k]).abs());
                    }
                }
            }
        }
        worst
    }

    /// Evaluates every horizontal dual on brackets with a horizontal
    /// first slot: `α_i([X_j, X_k])` and `α_i([X_j, Z_l])`.
    pub fn bracket_orthogonality_check(&self) -> OrthogonalityReport {
        let (m, nh) = (self.dim, self.n_h);
        let mut evaluations = Vec::new();
        for j in 0..nh {
            for other in (j + 1)..m {
                for i in 0..nh {
                    evaluations.push(BracketEvaluation {
                        dual: i,
                        left: j,
                        right: other,
                        value: self.get(j, other, i),
                    });
                }
            }
        }
        let max_abs = evaluations.iter().fold(0.0_f64, |w, e| w.max(e.value.abs()));
        OrthogonalityReport {
            passed: max_abs == 0.0,
            max_abs,
            evaluations,
        }
    }
}

/// `α_dual([e_left, e_right])`, 0-based indices into the full frame.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BracketEvaluation {
    pub dual: usize,
    pub left: usize,
    pub right: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrthogonalityReport {
    pub passed: bool,
    pub max_abs: f64,
    pub evaluations: Vec<BracketEvaluation>,
}

/// A 2-step nilpotent Lie algebra with an inner product.
///
/// The 2-step shape is structural: constants only map pairs of horizontal
/// generators to the center.
#[derive(Clone, Debug)]
pub struct MetricLieAlgebra {
    n_h: usize,
    n_v: usize,
    constants: Vec<f64>,
    metric: InnerProduct,
    form_grams: Vec<DMatrix<f64>>,
}

impl MetricLieAlgebra {
    pub fn new(
        n_h: usize,
        n_v: usize,
        constants: &[StructureConstant],
        metric: Option<InnerProduct>,
    ) -> Result<Self> {
        let m = n_h + n_v;
        if m == 0 {
            return Err(Error::input("algebra must have positive dimension"));
        }
        let mut table = vec![0.0; binomial(n_h, 2) * n_v];
        for sc in constants {
            if sc.i >= n_h || sc.j >= n_h {
                return Err(Error::input(format!(
                    "structure constant ({}, {}, {}): horizontal index out of range 1..{n_h}",
                    sc.i + 1,
                    sc.j + 1,
                    sc.k + 1
                )));
            }
            if sc.k >= n_v {
                return Err(Error::input(format!(
                    "structure constant ({}, {}, {}): central index out of range 1..{n_v}",
                    sc.i + 1,
                    sc.j + 1,
                    sc.k + 1
                )));
            }
            if sc.i == sc.j {
                return Err(Error::input(format!(
                    "structure constant ({}, {}, {}): i and j must differ",
                    sc.i + 1,
                    sc.j + 1,
                    sc.k + 1
                )));
            }
            if !sc.value.is_finite() {
                return Err(Error::input("structure constants must be finite"));
            }
            let (i, j, v) = if sc.i < sc.j {
                (sc.i, sc.j, sc.value)
            } else {
                (sc.j, sc.i, -sc.value)
            };
            let pair = MultiIndex::from_sorted(vec![i, j]).rank(n_h);
            table[pair * n_v + sc.k] = v;
        }
        let metric = match metric {
            Some(g) if g.dim() != m => {
                return Err(Error::input(format!(
                    "metric has dimension {}, algebra has dimension {m}",
                    g.dim()
                )))
            }
            Some(g) => g,
            None => InnerProduct::identity(m),
        };
        let form_grams = (0..=m).map(|p| metric.form_gram(p)).collect();
        Ok(MetricLieAlgebra {
            n_h,
            n_v,
            constants: table,
            metric,
            form_grams,
        })
    }

    /// Heisenberg algebra `dζ = c α_1 ∧ α_2`, orthonormal frame.
    pub fn heisenberg(c: f64) -> Self {
        MetricLieAlgebra::new(2, 1, &[StructureConstant::new(0, 1, 0, c)], None)
            .expect("valid by construction")
    }

    /// Abelian algebra of dimension `m ≥ 1`, split as `(m - 1) + 1` so the
    /// last generator can serve as a distinguished central direction.
    pub fn abelian(m: usize) -> Self {
        assert!(m >= 1, "abelian algebra needs positive dimension");
        MetricLieAlgebra::new(m - 1, 1, &[], None).expect("valid by construction")
    }

    pub fn dim(&self) -> usize {
        self.n_h + self.n_v
    }

    pub fn horizontal_dim(&self) -> usize {
        self.n_h
    }

    pub fn central_dim(&self) -> usize {
        self.n_v
    }

    pub fn metric(&self) -> &InnerProduct {
        &self.metric
    }

    /// `c_ij^k`, antisymmetric in `i, j`.
    pub fn constant(&self, i: usize, j: usize, k: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => {
                self.constants[MultiIndex::from_sorted(vec![i, j]).rank(self.n_h) * self.n_v + k]
            }
            std::cmp::Ordering::Greater => -self.constant(j, i, k),
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.constants.iter().all(|c| *c == 0.0)
    }

    /// Nonzero constants, 0-based, `i < j`.
    pub fn constants(&self) -> Vec<StructureConstant> {
        let mut out = Vec::new();
        for (pair, idx) in basis(self.n_h, 2).iter().enumerate() {
            for k in 0..self.n_v {
                let v = self.constants[pair * self.n_v + k];
                if v != 0.0 {
                    out.push(StructureConstant::new(idx.indices()[0], idx.indices()[1], k, v));
                }
            }
        }
        out
    }

    pub fn bracket_table(&self) -> BracketTable {
        let mut t = BracketTable::zeros(self.dim(), self.n_h);
        for sc in self.constants() {
            t.set(sc.i, sc.j, self.n_h + sc.k, -sc.value);
        }
        t
    }

    /// `d` on the dual basis 1-forms, read off the bracket table.
    fn differential_of_generators(&self) -> Vec<ExtForm> {
        let m = self.dim();
        let table = self.bracket_table();
        (0..m)
            .map(|k| {
                let mut f = ExtForm::zero(m, 2);
                for (r, idx) in basis(m, 2).iter().enumerate() {
                    let (a, b) = (idx.indices()[0], idx.indices()[1]);
                    f.coeffs_mut()[r] = -table.get(a, b, k);
                }
                f
            })
            .collect()
    }

    /// Matrix of the Chevalley–Eilenberg differential `Λ^p → Λ^{p+1}`.
    pub fn differential(&self, p: usize) -> DMatrix<f64> {
        let m = self.dim();
        let gens = self.differential_of_generators();
        let src = basis(m, p);
        let mut out = DMatrix::zeros(binomial(m, p + 1), src.len());
        for (col, idx) in src.iter().enumerate() {
            let mut img = ExtForm::zero(m, p + 1);
            for slot in 0..p {
                let ids = idx.indices();
                let left = ExtForm::monomial(m, &ids[..slot]).expect("increasing");
                let right = ExtForm::monomial(m, &ids[slot + 1..]).expect("increasing");
                let term = wedge(&wedge(&left, &gens[ids[slot]]).expect("dim"), &right).expect("dim");
                let sign = if slot % 2 == 0 { 1.0 } else { -1.0 };
                img = &img + &term.scaled(sign);
            }
            for (r, v) in img.coeffs().iter().enumerate() {
                out[(r, col)] = *v;
            }
        }
        out
    }

    pub fn form_gram(&self, p: usize) -> &DMatrix<f64> {
        &self.form_grams[p]
    }

    /// Metric adjoint of `differential(p - 1)`, mapping `Λ^p → Λ^{p-1}`.
    /// For `p = 0` this is the empty map.
    pub fn codifferential(&self, p: usize) -> DMatrix<f64> {
        let m = self.dim();
        if p == 0 {
            return DMatrix::zeros(0, 1);
        }
        if p > m {
            return DMatrix::zeros(binomial(m, p - 1), 0);
        }
        let d = self.differential(p - 1);
        let g_lo = self.form_grams[p - 1].clone();
        let rhs = d.transpose() * &self.form_grams[p];
        g_lo.cholesky().expect("form Gram is positive definite").solve(&rhs)
    }

    /// Hodge Laplacian `d d* + d* d` on `Λ^p`, self-adjoint for the induced
    /// inner product (symmetric as a matrix when the frame is orthonormal).
    pub fn laplacian(&self, p: usize) -> DMatrix<f64> {
        let m = self.dim();
        let n = binomial(m, p);
        let mut lap = DMatrix::zeros(n, n);
        if p >= 1 {
            lap += self.differential(p - 1) * self.codifferential(p);
        }
        if p < m {
            lap += self.codifferential(p + 1) * self.differential(p);
        }
        lap
    }

    /// Eigenpairs of the degree-`p` Laplacian, ascending, with eigenvectors
    /// orthonormal for the induced inner product.
    pub fn spectrum(&self, p: usize) -> (Vec<f64>, Vec<ExtForm>) {
        let m = self.dim();
        let gram = &self.form_grams[p];
        let k = gram * self.laplacian(p);
        let k = (&k + k.transpose()) * 0.5;
        let l = gram.clone().cholesky().expect("form Gram is positive definite").l();
        let x = l.solve_lower_triangular(&k).expect("triangular solve");
        let mut reduced = l.solve_lower_triangular(&x.transpose()).expect("triangular solve");
        reduced = (&reduced + reduced.transpose()) * 0.5;
        let eig = reduced.symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let lt = l.transpose();
        let mut values = Vec::with_capacity(order.len());
        let mut vectors = Vec::with_capacity(order.len());
        for i in order {
            values.push(eig.eigenvalues[i]);
            let y = eig.eigenvectors.column(i).into_owned();
            let v = lt.solve_upper_triangular(&y).expect("triangular solve");
            vectors.push(ExtForm::from_coeffs(m, p, v.as_slice().to_vec()).expect("sized"));
        }
        (values, vectors)
    }

    pub fn harmonic_space(&self, p: usize) -> HarmonicSpace {
        let (values, vectors) = self.spectrum(p);
        let basis: Vec<ExtForm> = values
            .iter()
            .zip(vectors)
            .filter(|(v, _)| **v < KERNEL_TOL)
            .map(|(_, f)| f)
            .collect();
        HarmonicSpace {
            degree: p,
            betti: basis.len(),
            basis,
        }
    }

    pub fn betti_numbers(&self) -> Vec<usize> {
        (0..=self.dim()).map(|p| self.harmonic_space(p).betti).collect()
    }

    pub fn classification_gate(&self) -> ClassificationRecord {
        let m = self.dim();
        let harmonic = self.harmonic_space(1);
        let betti1 = harmonic.betti;
        let class = if betti1 == m {
            GateClass::FlatTorus
        } else if betti1 + 1 == m && self.n_v == 1 {
            GateClass::B1Codim1
        } else {
            GateClass::Other
        };
        let horizontal_span = if self.is_abelian() {
            None
        } else {
            Some(harmonic.basis.iter().all(|f| {
                f.coeffs()[self.n_h..]
                    .iter()
                    .all(|c| c.abs() < KERNEL_TOL.sqrt())
            }))
        };
        ClassificationRecord {
            class,
            dim: m,
            central_dim: self.n_v,
            betti1,
            constant_length: true,
            harmonic_in_horizontal_span: horizontal_span,
        }
    }

    /// Unit vector along `Z_1`, for algebras with one central direction.
    pub fn unit_central_vector(&self) -> Result<Vec<f64>> {
        if self.n_v != 1 {
            return Err(Error::input(format!(
                "a distinguished central direction needs n_v = 1, got {}",
                self.n_v
            )));
        }
        let m = self.dim();
        let mut z = vec![0.0; m];
        z[m - 1] = 1.0;
        let norm = self.metric.vector_norm(&z);
        z[m - 1] /= norm;
        Ok(z)
    }

    /// The unit central dual `ϑ = Z♭`.
    pub fn central_dual(&self) -> Result<ExtForm> {
        Ok(self.metric.flat(&self.unit_central_vector()?))
    }

    /// `α_i` for `i < n_h`, `ζ_{i - n_h}` otherwise.
    pub fn dual_generator(&self, i: usize) -> ExtForm {
        ExtForm::monomial(self.dim(), &[i]).expect("index in range")
    }
}

pub fn matrix_rank(a: &DMatrix<f64>) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let sv = a.clone().svd(false, false).singular_values;
    let cutoff = RANK_TOL * sv.max().max(1.0);
    sv.iter().filter(|s| **s > cutoff).count()
}

/// Orthonormal basis of invariant harmonic `p`-forms.
#[derive(Clone, Debug)]
pub struct HarmonicSpace {
    pub degree: usize,
    pub basis: Vec<ExtForm>,
    pub betti: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GateClass {
    FlatTorus,
    B1Codim1,
    Other,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationRecord {
    pub class: GateClass,
    pub dim: usize,
    pub central_dim: usize,
    pub betti1: usize,
    /// Invariant forms have constant coefficients, hence constant length.
    pub constant_length: bool,
    /// Whether every harmonic 1-form lies in the span of the horizontal duals;
    /// `None` for abelian algebras.
    pub harmonic_in_horizontal_span: Option<bool>,
}

/// Residual `max |⟨dα, β⟩ - ⟨α, d*β⟩|` over the given test pairs.
pub fn adjointness_residual(
    alg: &MetricLieAlgebra,
    p: usize,
    pairs: &[(DVector<f64>, DVector<f64>)],
) -> f64 {
    let d = alg.differential(p);
    let ds = alg.codifferential(p + 1);
    let (g_lo, g_hi) = (alg.form_gram(p), alg.form_gram(p + 1));
    pairs
        .iter()
        .map(|(a, b)| {
            let lhs = (&d * a).dot(&(g_hi * b));
            let rhs = a.dot(&(g_lo * (&ds * b)));
            (lhs - rhs).abs()
        })
        .fold(0.0, f64::max)
}

/// Metric-independent check of `dim Λ^p = b_p + rank d_p + rank d_{p-1}`.
pub fn hodge_dimension_defect(alg: &MetricLieAlgebra, p: usize) -> isize {
    let m = alg.dim();
    let betti = alg.harmonic_space(p).betti;
    let up = if p < m { matrix_rank(&alg.differential(p)) } else { 0 };
    let down = if p >= 1 { matrix_rank(&alg.codifferential(p)) } else { 0 };
    binomial(m, p) as isize - (betti + up + down) as isize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::form_inner;

    fn dim6() -> MetricLieAlgebra {
        MetricLieAlgebra::new(
            4,
            2,
            &[StructureConstant::new(0, 1, 0, 1.0), StructureConstant::new(2, 3, 1, 1.0)],
            None,
        )
        .unwrap()
    }

    #[test]
    fn heisenberg_differential_of_center() {
        let alg = MetricLieAlgebra::heisenberg(1.5);
        let d1 = alg.differential(1);
        let dz = &d1 * DVector::from_column_slice(&[0.0, 0.0, 1.0]);
        // basis of Λ^2: α12, α1ζ, α2ζ
        assert_eq!(dz.as_slice(), &[1.5, 0.0, 0.0]);
        assert!(alg.differential(0).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn heisenberg_codifferential_of_top_horizontal_form() {
        let c = 0.75;
        let alg = MetricLieAlgebra::heisenberg(c);
        let ds = alg.codifferential(2) * DVector::from_column_slice(&[1.0, 0.0, 0.0]);
        assert_eq!(ds.as_slice(), &[0.0, 0.0, c]);
    }

    #[test]
    fn heisenberg_betti_numbers() {
        assert_eq!(MetricLieAlgebra::heisenberg(1.0).betti_numbers(), vec![1, 2, 2, 1]);
        assert_eq!(MetricLieAlgebra::heisenberg(-3.0).betti_numbers(), vec![1, 2, 2, 1]);
    }

    #[test]
    fn abelian_betti_numbers_are_binomial() {
        for m in 2..=5 {
            let b = MetricLieAlgebra::abelian(m).betti_numbers();
            let expect: Vec<usize> = (0..=m).map(|p| binomial(m, p)).collect();
            assert_eq!(b, expect);
            for p in 0..m {
                assert!(MetricLieAlgebra::abelian(m).differential(p).iter().all(|v| *v == 0.0));
            }
        }
    }

    #[test]
    fn heisenberg_center_eigenvalue() {
        let c = 2.0;
        let alg = MetricLieAlgebra::heisenberg(c);
        let lap = alg.laplacian(1);
        let theta = DVector::from_column_slice(&[0.0, 0.0, 1.0]);
        let img = &lap * &theta;
        assert!((img - theta * (c * c)).amax() < 1e-14);
    }

    #[test]
    fn d_squared_vanishes_on_dim6() {
        let alg = dim6();
        for p in 0..alg.dim() - 1 {
            let dd = alg.differential(p + 1) * alg.differential(p);
            assert!(dd.amax() < 1e-13, "p = {p}");
        }
    }

    #[test]
    fn classification_examples() {
        assert_eq!(MetricLieAlgebra::abelian(4).classification_gate().class, GateClass::FlatTorus);
        let h = MetricLieAlgebra::heisenberg(1.0).classification_gate();
        assert_eq!(h.class, GateClass::B1Codim1);
        assert_eq!(h.harmonic_in_horizontal_span, Some(true));
        let o = dim6().classification_gate();
        assert_eq!(o.class, GateClass::Other);
        assert_eq!(o.betti1, 4);
    }

    #[test]
    fn bracket_orthogonality() {
        let rep = MetricLieAlgebra::heisenberg(1.0).bracket_table().bracket_orthogonality_check();
        assert!(rep.passed);
        assert!(rep.evaluations.iter().all(|e| e.value == 0.0));

        let mut bad = MetricLieAlgebra::heisenberg(1.0).bracket_table();
        bad.set(0, 1, 0, 0.25); // horizontal component in [X_1, X_2]
        let rep = bad.bracket_orthogonality_check();
        assert!(!rep.passed);
        assert_eq!(rep.max_abs, 0.25);
    }

    #[test]
    fn jacobi_holds_for_two_step_shape() {
        assert!(dim6().bracket_table().jacobi_residual() < 1e-14);
    }

    #[test]
    fn rejects_bad_constants() {
        assert!(MetricLieAlgebra::new(2, 1, &[StructureConstant::new(0, 0, 0, 1.0)], None).is_err());
        assert!(MetricLieAlgebra::new(2, 1, &[StructureConstant::new(0, 2, 0, 1.0)], None).is_err());
        assert!(MetricLieAlgebra::new(2, 1, &[StructureConstant::new(0, 1, 1, 1.0)], None).is_err());
        assert!(MetricLieAlgebra::new(2, 1, &[], Some(InnerProduct::identity(2))).is_err());
    }

    #[test]
    fn reversed_indices_flip_sign() {
        let alg =
            MetricLieAlgebra::new(2, 1, &[StructureConstant::new(1, 0, 0, 2.0)], None).unwrap();
        assert_eq!(alg.constant(0, 1, 0), -2.0);
        assert_eq!(alg.constant(1, 0, 0), 2.0);
    }

    #[test]
    fn hodge_decomposition_counts() {
        for alg in [MetricLieAlgebra::heisenberg(1.0), dim6(), MetricLieAlgebra::abelian(3)] {
            for p in 0..=alg.dim() {
                assert_eq!(hodge_dimension_defect(&alg, p), 0);
            }
        }
    }

    #[test]
    fn non_orthonormal_metric_keeps_betti_numbers() {
        let g = InnerProduct::new(DMatrix::from_row_slice(
            3,
            3,
            &[2.0, 0.3, 0.1, 0.3, 1.0, -0.2, 0.1, -0.2, 1.5],
        ))
        .unwrap();
        let alg =
            MetricLieAlgebra::new(2, 1, &[StructureConstant::new(0, 1, 0, 1.0)], Some(g)).unwrap();
        assert_eq!(alg.betti_numbers(), vec![1, 2, 2, 1]);
        let h = alg.harmonic_space(1);
        for a in &h.basis {
            for b in &h.basis {
                let ip = form_inner(a, b, alg.metric()).unwrap();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-10);
            }
        }
    }
}
