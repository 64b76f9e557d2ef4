//! Declarative problem files.
//!
//! A problem file is a JSON object with `"schema": "nilforms/1"`, a `kind`
//! tag and the fields of that kind. Indices are 1-based; scalar fields are
//! trigonometric polynomials written as lists of
//! `{"coeff": c, "wave": "sin" | "cos", "modes": [k_1, ..]}`, each term
//! standing for `c · wave(2π k·x)`.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::bundlenum::{BundleMetric, CoordMetric3, TrigForm, TrigPoly, TrigTerm};
use crate::error::{Error, Result};
use crate::exterior::{ExtForm, InnerProduct};
use crate::nilalgebra::{GateClass, MetricLieAlgebra, StructureConstant};
use crate::systole::Lattice;

pub const SCHEMA: &str = "nilforms/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Algebra,
    Bundle,
    BkExample,
    IdentityCheck,
    Systole,
}

impl Kind {
    pub fn tag(self) -> &'static str {
        match self {
            Kind::Algebra => "algebra",
            Kind::Bundle => "bundle",
            Kind::BkExample => "bk-example",
            Kind::IdentityCheck => "identity-check",
            Kind::Systole => "systole",
        }
    }

    fn from_tag(tag: &str) -> Option<Self> {
        [Kind::Algebra, Kind::Bundle, Kind::BkExample, Kind::IdentityCheck, Kind::Systole]
            .into_iter()
            .find(|k| k.tag() == tag)
    }
}

#[derive(Clone, Debug)]
pub enum Problem {
    Algebra(AlgebraSpec),
    Bundle(BundleSpec),
    BkExample(BkSpec),
    IdentityCheck(IdentitySpec),
    Systole(SystoleSpec),
}

/// A parsed problem together with the raw document it came from.
#[derive(Clone, Debug)]
pub struct ProblemFile {
    pub problem: Problem,
    pub source: Value,
}

impl ProblemFile {
    pub fn kind(&self) -> Kind {
        match self.problem {
            Problem::Algebra(_) => Kind::Algebra,
            Problem::Bundle(_) => Kind::Bundle,
            Problem::BkExample(_) => Kind::BkExample,
            Problem::IdentityCheck(_) => Kind::IdentityCheck,
            Problem::Systole(_) => Kind::Systole,
        }
    }
}

fn typed<T: DeserializeOwned>(value: Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        Error::input(format!("at `{path}`: {}", e.into_inner()))
    })
}

pub fn parse(text: &str) -> Result<ProblemFile> {
    let source: Value = serde_json::from_str(text).map_err(|e| Error::input(format!("invalid JSON: {e}")))?;
    let mut body = match &source {
        Value::Object(map) => map.clone(),
        _ => return Err(Error::input("a problem file must be a JSON object")),
    };
    match body.remove("schema") {
        Some(Value::String(s)) if s == SCHEMA => {}
        Some(other) => return Err(Error::input(format!("at `schema`: expected \"{SCHEMA}\", found {other}"))),
        None => return Err(Error::input(format!("missing field `schema` (expected \"{SCHEMA}\")"))),
    }
    let kind = match body.remove("kind") {
        Some(Value::String(s)) => {
            Kind::from_tag(&s).ok_or_else(|| Error::input(format!("at `kind`: unknown kind \"{s}\"")))?
        }
        Some(other) => return Err(Error::input(format!("at `kind`: expected a string, found {other}"))),
        None => return Err(Error::input("missing field `kind`")),
    };
    let body = Value::Object(body);
    let problem = match kind {
        Kind::Algebra => Problem::Algebra(typed(body)?),
        Kind::Bundle => Problem::Bundle(typed(body)?),
        Kind::BkExample => Problem::BkExample(typed(body)?),
        Kind::IdentityCheck => Problem::IdentityCheck(typed(body)?),
        Kind::Systole => Problem::Systole(typed(body)?),
    };
    Ok(ProblemFile { problem, source })
}

fn matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::input(format!("`{what}` must be a nonempty square matrix")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn poly(dim: usize, terms: &[TrigTerm]) -> Result<TrigPoly> {
    TrigPoly::new(dim, terms.to_vec())
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantSpec {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: f64,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraExpect {
    pub betti: Option<Vec<usize>>,
    pub gate: Option<GateClass>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub n_h: usize,
    pub n_v: usize,
    #[serde(default)]
    pub constants: Vec<ConstantSpec>,
    /// Vector Gram matrix in the frame `(X_1, .., X_{n_h}, Z_1, .., Z_{n_v})`.
    pub gram: Option<Vec<Vec<f64>>>,
    /// Bound for `d² = 0`, adjointness and block equivalence residuals.
    #[serde(default = "default_algebra_tol")]
    pub tol: f64,
    #[serde(default)]
    pub expect: AlgebraExpect,
}

fn default_algebra_tol() -> f64 {
    1e-12
}

impl AlgebraSpec {
    pub fn build(&self) -> Result<MetricLieAlgebra> {
        let mut constants = Vec::with_capacity(self.constants.len());
        for (n, c) in self.constants.iter().enumerate() {
            if c.i == 0 || c.j == 0 || c.k == 0 {
                return Err(Error::input(format!("at `constants[{n}]`: indices are 1-based")));
            }
            constants.push(StructureConstant::new(c.i - 1, c.j - 1, c.k - 1, c.value));
        }
        let metric = match &self.gram {
            Some(rows) => Some(InnerProduct::new(matrix(rows, "gram")?)?),
            None => None,
        };
        MetricLieAlgebra::new(self.n_h, self.n_v, &constants, metric)
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleExpect {
    pub left_invariant: Option<bool>,
    pub equality: Option<bool>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleSpec {
    /// Antisymmetric matrix of constant curvature coefficients.
    pub c: Vec<Vec<f64>>,
    /// Components `A_1, .., A_n` of the connection perturbation, so that
    /// `dϑ = Σ c_ij dx_i ∧ dx_j + dA`.
    #[serde(default)]
    pub alpha: Option<Vec<Vec<TrigTerm>>>,
    #[serde(default = "one")]
    pub fiber_length: f64,
    /// Columns of the base period lattice; the integer lattice if absent.
    pub lattice: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_bundle_res")]
    pub res: usize,
    #[serde(default = "default_scan")]
    pub scan: usize,
    /// Bound on the pointwise norm variation of harmonic fields.
    #[serde(default = "default_norm_tol")]
    pub tol: f64,
    #[serde(default = "default_kernel_tol")]
    pub kernel_tol: f64,
    #[serde(default = "default_ratio_tol")]
    pub ratio_tol: f64,
    #[serde(default = "default_equality_tol")]
    pub equality_tol: f64,
    #[serde(default)]
    pub expect: BundleExpect,
}

fn one() -> f64 {
    1.0
}
fn default_bundle_res() -> usize {
    32
}
fn default_scan() -> usize {
    4
}
fn default_norm_tol() -> f64 {
    crate::bundlenum::laplacian::NORM_TOL
}
fn default_kernel_tol() -> f64 {
    crate::bundlenum::laplacian::KERNEL_TOL
}
fn default_ratio_tol() -> f64 {
    crate::bundlenum::laplacian::RATIO_TOL
}
fn default_equality_tol() -> f64 {
    crate::systole::EQUALITY_TOL
}

impl BundleSpec {
    pub fn build(&self) -> Result<BundleMetric> {
        let c = matrix(&self.c, "c")?;
        let n = c.nrows();
        let alpha = match &self.alpha {
            None => TrigForm::zero(n, 1),
            Some(comps) => {
                if comps.len() != n {
                    return Err(Error::input(format!("`alpha` needs {n} components, found {}", comps.len())));
                }
                let comps = comps.iter().map(|t| poly(n, t)).collect::<Result<Vec<_>>>()?;
                TrigForm::new(n, 1, comps)?
            }
        };
        let lattice = match &self.lattice {
            None => Lattice::integer(n),
            Some(cols) => Lattice::from_columns(cols)?,
        };
        BundleMetric::new(c, alpha, self.fiber_length, lattice)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BkSpec {
    /// Off-diagonal entry of the fiber metric as a function of `θ`.
    pub f: Vec<TrigTerm>,
    #[serde(default = "default_levels")]
    pub levels: Vec<usize>,
    /// Bound on `|d*dx|` and `|d*dy|` at the finest level.
    #[serde(default = "default_bk_tol")]
    pub tol: f64,
    #[serde(default = "default_min_order")]
    pub min_order: f64,
    #[serde(default = "default_range_tol")]
    pub range_tol: f64,
    /// Expected `[min, max]` of `⟨dx, dy⟩`.
    pub expect_range: Option<[f64; 2]>,
}

fn default_levels() -> Vec<usize> {
    vec![16, 32, 64]
}
fn default_bk_tol() -> f64 {
    1e-10
}
fn default_min_order() -> f64 {
    1.9
}
fn default_range_tol() -> f64 {
    1e-3
}

impl BkSpec {
    pub fn build(&self) -> Result<CoordMetric3> {
        CoordMetric3::new(poly(1, &self.f)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdentityKind {
    Contraction,
    Awb,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomForm {
    pub terms: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum FormSpec {
    Random { random: RandomForm },
    /// One term list per lexicographic multi-index.
    Components(Vec<Vec<TrigTerm>>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitySpec {
    pub check: IdentityKind,
    /// Dimension of the torus.
    pub n: usize,
    pub beta: FormSpec,
    /// Constant 1-form for the `awb` check.
    pub a: Option<Vec<f64>>,
    #[serde(default = "default_levels")]
    pub levels: Vec<usize>,
    #[serde(default = "default_min_order")]
    pub min_order: f64,
    /// Bound on the left-hand side where the identity degenerates.
    #[serde(default = "default_algebra_tol")]
    pub tol: f64,
}

impl IdentitySpec {
    /// Builds `β`; `seed` overrides the seed of a random form.
    pub fn beta(&self, seed: Option<u64>) -> Result<TrigForm> {
        let n = self.n;
        if !(2..=6).contains(&n) {
            return Err(Error::input("at `n`: torus dimension must be in 2..=6"));
        }
        match &self.beta {
            FormSpec::Random { random } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(random.seed));
                Ok(TrigForm::random(n, 2, random.terms, &mut rng))
            }
            FormSpec::Components(comps) => {
                let comps = comps.iter().map(|t| poly(n, t)).collect::<Result<Vec<_>>>()?;
                TrigForm::new(n, 2, comps)
            }
        }
    }

    pub fn a(&self) -> Result<ExtForm> {
        match &self.a {
            Some(a) if a.len() == self.n => Ok(ExtForm::one_form(a)),
            Some(a) => Err(Error::input(format!("at `a`: expected {} components, found {}", self.n, a.len()))),
            None => Err(Error::input("the awb check needs a constant 1-form `a`")),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub id: String,
    /// Basis vectors as columns.
    pub basis: Vec<Vec<f64>>,
    #[serde(default = "one")]
    pub fiber_length: f64,
    pub expect_equality: Option<bool>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystoleSpec {
    pub lattices: Vec<LatticeSpec>,
    #[serde(default = "default_equality_tol")]
    pub tol: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_algebra() {
        let text = r#"{"schema": "nilforms/1", "kind": "algebra", "n_h": 2, "n_v": 1,
            "constants": [{"i": 1, "j": 2, "k": 1, "value": 1.0}]}"#;
        let file = parse(text).unwrap();
        assert_eq!(file.kind(), Kind::Algebra);
        let Problem::Algebra(spec) = file.problem else { unreachable!() };
        assert_eq!(spec.build().unwrap().betti_numbers(), vec![1, 2, 2, 1]);
        assert_eq!(spec.tol, 1e-12);
    }

    #[test]
    fn reports_field_paths() {
        let text = r#"{"schema": "nilforms/1", "kind": "algebra", "n_h": 2, "n_v": 1,
            "constants": [{"i": 1, "j": 2, "k": 1, "value": "big"}]}"#;
        let msg = parse(text).unwrap_err().to_string();
        assert!(msg.contains("constants[0].value"), "{msg}");
        let text = r#"{"schema": "nilforms/1", "kind": "systole", "lattices": [], "tolerance": 1}"#;
        assert!(parse(text).unwrap_err().to_string().contains("tolerance"));
    }

    #[test]
    fn rejects_schema_and_kind() {
        assert!(parse(r#"{"kind": "algebra"}"#).is_err());
        assert!(parse(r#"{"schema": "nilforms/2", "kind": "algebra"}"#).is_err());
        assert!(parse(r#"{"schema": "nilforms/1", "kind": "torus"}"#).is_err());
        assert!(parse("[1, 2]").is_err());
    }

    #[test]
    fn zero_index_rejected() {
        let text = r#"{"schema": "nilforms/1", "kind": "algebra", "n_h": 2, "n_v": 1,
            "constants": [{"i": 0, "j": 2, "k": 1, "value": 1.0}]}"#;
        let Problem::Algebra(spec) = parse(text).unwrap().problem else { unreachable!() };
        assert!(spec.build().is_err());
    }

    #[test]
    fn random_and_explicit_forms() {
        let text = r#"{"schema": "nilforms/1", "kind": "identity-check", "check": "contraction", "n": 3,
            "beta": {"random": {"terms": 2, "seed": 7}}}"#;
        let Problem::IdentityCheck(spec) = parse(text).unwrap().problem else { unreachable!() };
        assert_eq!(spec.beta(None).unwrap(), spec.beta(Some(7)).unwrap());
        assert_ne!(spec.beta(None).unwrap(), spec.beta(Some(8)).unwrap());
        let text = r#"{"schema": "nilforms/1", "kind": "identity-check", "check": "awb", "n": 2,
            "beta": [[{"coeff": 1.0, "wave": "sin", "modes": [1, 0]}]], "a": [1.0, 0.0]}"#;
        let Problem::IdentityCheck(spec) = parse(text).unwrap().problem else { unreachable!() };
        assert_eq!(spec.beta(None).unwrap().max_mode(), 1);
        assert!(spec.a().is_ok());
    }
}
