//! Exterior algebra over a finite-dimensional real inner-product space.
//!
//! Forms are stored as dense coefficient vectors over the basis `e^I`, with
//! multi-indices `I` enumerated in lexicographic order. Indices are 0-based
//! internally; `Display` prints them 1-based.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative tolerance for symmetry and definiteness checks on Gram matrices.
pub const GRAM_TOL: f64 = 1e-12;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// A strictly increasing list of basis indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(indices: Vec<usize>, dim: usize) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::input(format!(
                "multi-index {indices:?} is not strictly increasing"
            )));
        }
        if indices.iter().any(|&i| i >= dim) {
            return Err(Error::input(format!(
                "multi-index {indices:?} out of range for dimension {dim}"
            )));
        }
        Ok(MultiIndex(indices))
    }

    pub(crate) fn from_sorted(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        MultiIndex(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// Position of this multi-index in the lexicographic basis of `Λ^p(R^dim)`.
    pub fn rank(&self, dim: usize) -> usize {
        let p = self.0.len();
        let mut r = 0;
        let mut next = 0;
        for (slot, &i) in self.0.iter().enumerate() {
            for j in next..i {
                r += binomial(dim - 1 - j, p - 1 - slot);
            }
            next = i + 1;
        }
        r
    }

    /// Complement in `0..dim`, increasing.
    pub fn complement(&self, dim: usize) -> MultiIndex {
        MultiIndex((0..dim).filter(|i| !self.contains(*i)).collect())
    }

    /// Removes the entry at `slot`.
    pub fn without_slot(&self, slot: usize) -> MultiIndex {
        let mut v = self.0.clone();
        v.remove(slot);
        MultiIndex(v)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        write!(f, "e^")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        Ok(())
    }
}

/// All multi-indices of degree `p` in `0..dim`, lexicographic.
pub fn basis(dim: usize, p: usize) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(binomial(dim, p));
    if p > dim {
        return out;
    }
    let mut cur: Vec<usize> = (0..p).collect();
    loop {
        out.push(MultiIndex(cur.clone()));
        // advance to the next combination
        let mut k = p;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if cur[k] < dim - p + k {
                cur[k] += 1;
                for j in k + 1..p {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Sign and sorted union of `e^a ∧ e^b`, or `None` when the indices overlap.
pub fn merge_sign(a: &[usize], b: &[usize]) -> Option<(f64, MultiIndex)> {
    let mut inversions = 0usize;
    let mut merged = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Equal => return None,
            std::cmp::Ordering::Less => {
                merged.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                // b[j] jumps over the remaining entries of a
                inversions += a.len() - i;
                merged.push(b[j]);
                j += 1;
            }
        }
    }
    merged.extend_from_slice(&a[i..]);
    merged.extend_from_slice(&b[j..]);
    let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
    Some((sign, MultiIndex(merged)))
}

/// A homogeneous element of `Λ^p(R^m)*`.
///
/// Degrees above `m` are allowed and denote the zero space (empty coefficient
/// vector); they arise from wedges that overflow the ambient dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtForm {
    dim: usize,
    degree: usize,
    coeffs: Vec<f64>,
}

impl ExtForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        ExtForm {
            dim,
            degree,
            coeffs: vec![0.0; binomial(dim, degree)],
        }
    }

    pub fn scalar(dim: usize, value: f64) -> Self {
        ExtForm {
            dim,
            degree: 0,
            coeffs: vec![value],
        }
    }

    pub fn from_coeffs(dim: usize, degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != binomial(dim, degree) {
            return Err(Error::input(format!(
                "degree-{degree} form in dimension {dim} needs {} coefficients, got {}",
                binomial(dim, degree),
                coeffs.len()
            )));
        }
        Ok(ExtForm { dim, degree, coeffs })
    }

    /// The basis form `e^I`.
    pub fn basis_form(dim: usize, index: &MultiIndex) -> Self {
        let mut f = ExtForm::zero(dim, index.degree());
        f.coeffs[index.rank(dim)] = 1.0;
        f
    }

    /// Convenience for `e^{i_1} ∧ … ∧ e^{i_p}` with 0-based, increasing indices.
    pub fn monomial(dim: usize, indices: &[usize]) -> Result<Self> {
        let idx = MultiIndex::new(indices.to_vec(), dim)?;
        Ok(ExtForm::basis_form(dim, &idx))
    }

    /// The 1-form with the given covector components.
    pub fn one_form(components: &[f64]) -> Self {
        ExtForm {
            dim: components.len(),
            degree: 1,
            coeffs: components.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn coeff(&self, index: &MultiIndex) -> f64 {
        self.coeffs[index.rank(self.dim)]
    }

    pub fn as_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.coeffs)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }

    /// Nonzero terms as `(multi-index, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, f64)> + '_ {
        basis(self.dim, self.degree)
            .into_iter()
            .zip(self.coeffs.iter().copied())
            .filter(|(_, c)| *c != 0.0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        ExtForm {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    fn check_same_space(&self, other: &ExtForm) {
        assert_eq!(
            (self.dim, self.degree),
            (other.dim, other.degree),
            "forms live in different spaces"
        );
    }
}

impl fmt::Display for ExtForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (idx, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}·{idx}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &ExtForm {
    type Output = ExtForm;
    fn add(self, rhs: &ExtForm) -> ExtForm {
        self.check_same_space(rhs);
        ExtForm {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ExtForm {
    type Output = ExtForm;
    fn sub(self, rhs: &ExtForm) -> ExtForm {
        self.check_same_space(rhs);
        ExtForm {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ExtForm {
    type Output = ExtForm;
    fn neg(self) -> ExtForm {
        self.scaled(-1.0)
    }
}

impl Mul<&ExtForm> for f64 {
    type Output = ExtForm;
    fn mul(self, rhs: &ExtForm) -> ExtForm {
        rhs.scaled(self)
    }
}

/// `a ∧ b`.
pub fn wedge(a: &ExtForm, b: &ExtForm) -> Result<ExtForm> {
    if a.dim != b.dim {
        return Err(Error::input(format!(
            "wedge of forms in dimensions {} and {}",
            a.dim, b.dim
        )));
    }
    let dim = a.dim;
    let mut out = ExtForm::zero(dim, a.degree + b.degree);
    if a.degree + b.degree > dim {
        return Ok(out);
    }
    let bb: Vec<(MultiIndex, f64)> = b.terms().collect();
    for (ia, ca) in a.terms() {
        for (ib, cb) in &bb {
            if let Some((sign, merged)) = merge_sign(ia.indices(), ib.indices()) {
                out.coeffs[merged.rank(dim)] += sign * ca * cb;
            }
        }
    }
    Ok(out)
}

/// Interior product `v ⌟ a`. Degree-0 input yields the zero scalar.
pub fn interior(v: &[f64], a: &ExtForm) -> Result<ExtForm> {
    if v.len() != a.dim {
        return Err(Error::input(format!(
            "vector of length {} contracted with a form in dimension {}",
            v.len(),
            a.dim
        )));
    }
    if a.degree == 0 {
        return Ok(ExtForm::scalar(a.dim, 0.0));
    }
    let mut out = ExtForm::zero(a.dim, a.degree - 1);
    for (idx, c) in a.terms() {
        for (slot, &i) in idx.indices().iter().enumerate() {
            let sign = if slot % 2 == 0 { 1.0 } else { -1.0 };
            out.coeffs[idx.without_slot(slot).rank(a.dim)] += sign * v[i] * c;
        }
    }
    Ok(out)
}

/// Orientation of the ambient basis `e_1 < … < e_m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }
}

/// A positive-definite inner product on the vector space, given by its Gram
/// matrix on the basis `e_1, …, e_m`. Forms are paired through the inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct InnerProduct {
    gram: DMatrix<f64>,
    dual_gram: DMatrix<f64>,
    det: f64,
}

impl InnerProduct {
    pub fn new(gram: DMatrix<f64>) -> Result<Self> {
        if !gram.is_square() || gram.nrows() == 0 {
            return Err(Error::input("Gram matrix must be square and non-empty"));
        }
        let scale = gram.amax().max(f64::MIN_POSITIVE);
        let asym = (&gram - gram.transpose()).amax();
        if asym > GRAM_TOL * scale {
            return Err(Error::input(format!(
                "Gram matrix is not symmetric (asymmetry {asym:.3e})"
            )));
        }
        let sym = (&gram + gram.transpose()) * 0.5;
        let min_eig = sym.clone().symmetric_eigenvalues().min();
        if !(min_eig > GRAM_TOL * scale) {
            return Err(Error::input(format!(
                "Gram matrix is not positive definite (smallest eigenvalue {min_eig:.3e})"
            )));
        }
        let chol = sym
            .clone()
            .cholesky()
            .ok_or_else(|| Error::input("Gram matrix is not positive definite"))?;
        let dual_gram = chol.inverse();
        let det = chol.determinant();
        Ok(InnerProduct {
            gram: sym,
            dual_gram,
            det,
        })
    }

    pub fn identity(dim: usize) -> Self {
        InnerProduct {
            gram: DMatrix::identity(dim, dim),
            dual_gram: DMatrix::identity(dim, dim),
            det: 1.0,
        }
    }

    /// Builds the inner product whose induced pairing on 1-forms is `dual_gram`.
    pub fn from_dual_gram(dual_gram: DMatrix<f64>) -> Result<Self> {
        let dual = InnerProduct::new(dual_gram)?;
        InnerProduct::new(dual.dual_gram)
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// Gram matrix of the basis 1-forms, `G^{-1}`.
    pub fn dual_gram(&self) -> &DMatrix<f64> {
        &self.dual_gram
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn vector_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        let u = DVector::from_column_slice(u);
        let v = DVector::from_column_slice(v);
        u.dot(&(&self.gram * v))
    }

    pub fn vector_norm(&self, v: &[f64]) -> f64 {
        self.vector_inner(v, v).sqrt()
    }

    /// Metric dual `v♭`.
    pub fn flat(&self, v: &[f64]) -> ExtForm {
        let w = &self.gram * DVector::from_column_slice(v);
        ExtForm::one_form(w.as_slice())
    }

    /// Metric dual `a♯` of a 1-form.
    pub fn sharp(&self, a: &ExtForm) -> Vec<f64> {
        assert_eq!(a.degree(), 1);
        (&self.dual_gram * a.as_vector()).as_slice().to_vec()
    }

    /// Gram matrix of the induced inner product on `Λ^p`, in lexicographic
    /// basis order: `⟨e^I, e^J⟩ = det(G^{-1}[I, J])`.
    pub fn form_gram(&self, p: usize) -> DMatrix<f64> {
        let dim = self.dim();
        let b = basis(dim, p);
        let n = b.len();
        let mut out = DMatrix::zeros(n, n);
        for r in 0..n {
            for c in r..n {
                let minor = DMatrix::from_fn(p, p, |a, k| {
                    self.dual_gram[(b[r].indices()[a], b[c].indices()[k])]
                });
                let v = if p == 0 { 1.0 } else { minor.determinant() };
                out[(r, c)] = v;
                out[(c, r)] = v;
            }
        }
        out
    }
}

/// Induced inner product of two forms of equal degree.
pub fn form_inner(a: &ExtForm, b: &ExtForm, g: &InnerProduct) -> Result<f64> {
    if a.dim != b.dim || a.dim != g.dim() {
        return Err(Error::input("form_inner: dimension mismatch"));
    }
    if a.degree != b.degree {
        return Err(Error::input(format!(
            "form_inner: degrees {} and {} differ",
            a.degree, b.degree
        )));
    }
    let gram = g.form_gram(a.degree);
    Ok(a.as_vector().dot(&(gram * b.as_vector())))
}

pub fn form_norm(a: &ExtForm, g: &InnerProduct) -> Result<f64> {
    Ok(form_inner(a, a, g)?.max(0.0).sqrt())
}

/// Hodge star, characterised by `b ∧ *a = ⟨b, a⟩ vol` with
/// `vol = ±√det G · e^{1…m}`.
pub fn hodge_star(a: &ExtForm, g: &InnerProduct, orientation: Orientation) -> Result<ExtForm> {
    let dim = a.dim;
    if g.dim() != dim {
        return Err(Error::input("hodge_star: metric dimension mismatch"));
    }
    let p = a.degree;
    if p > dim {
        return Ok(ExtForm::zero(dim, 0));
    }
    let paired = g.form_gram(p) * a.as_vector();
    let vol = orientation.sign() * g.det().sqrt();
    let mut out = ExtForm::zero(dim, dim - p);
    for (k, idx) in basis(dim, p).iter().enumerate() {
        let comp = idx.complement(dim);
        let (eps, _) = merge_sign(idx.indices(), comp.indices()).expect("disjoint by construction");
        out.coeffs[comp.rank(dim)] += eps * vol * paired[k];
    }
    Ok(out)
}

/// Dense matrix of `x ↦ x ∧ w` from `Λ^q` to `Λ^{q+deg w}`.
pub fn right_wedge_matrix(w: &ExtForm, q: usize) -> DMatrix<f64> {
    let dim = w.dim();
    let src = basis(dim, q);
    let rows = binomial(dim, q + w.degree());
    let mut out = DMatrix::zeros(rows, src.len());
    for (col, idx) in src.iter().enumerate() {
        let img = wedge(&ExtForm::basis_form(dim, idx), w).expect("same dimension");
        for (r, v) in img.coeffs().iter().enumerate() {
            out[(r, col)] = *v;
        }
    }
    out
}

/// Dense matrix of `x ↦ w ∧ x` from `Λ^q` to `Λ^{q+deg w}`.
pub fn left_wedge_matrix(w: &ExtForm, q: usize) -> DMatrix<f64> {
    let sign = if (w.degree() * q) % 2 == 0 { 1.0 } else { -1.0 };
    right_wedge_matrix(w, q) * sign
}

/// Dense matrix of `x ↦ v ⌟ x` from `Λ^q` to `Λ^{q-1}` (`q ≥ 1`).
pub fn interior_matrix(v: &[f64], q: usize) -> DMatrix<f64> {
    let dim = v.len();
    let src = basis(dim, q);
    let mut out = DMatrix::zeros(binomial(dim, q - 1), src.len());
    for (col, idx) in src.iter().enumerate() {
        let img = interior(v, &ExtForm::basis_form(dim, idx)).expect("same dimension");
        for (r, val) in img.coeffs().iter().enumerate() {
            out[(r, col)] = *val;
        }
    }
    out
}
