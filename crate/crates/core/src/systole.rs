//! Lattices, shortest vectors and the Bergé–Martinet functional.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

pub const MAX_RANK: usize = 6;

/// Lengths within this relative distance of the minimum count as ties.
const TIE_TOL: f64 = 1e-12;

/// Default tolerance for flagging a lattice as dual-critical.
pub const EQUALITY_TOL: f64 = 1e-6;

/// Seed of the dual-critical search used by reports.
pub const SEARCH_SEED: u64 = 0x5eed;

#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    basis: DMatrix<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShortestVector {
    pub coeffs: Vec<i64>,
    pub length: f64,
}

impl Lattice {
    /// Lattice generated by the columns of `basis`.
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        if basis.nrows() != basis.ncols() || basis.nrows() == 0 {
            return Err(Error::input(format!(
                "lattice basis must be square and nonempty, got {}×{}",
                basis.nrows(),
                basis.ncols()
            )));
        }
        if basis.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("lattice basis entries must be finite"));
        }
        let scale: f64 = basis.column_iter().map(|c| c.norm()).product();
        let det = basis.determinant();
        if scale == 0.0 || det.abs() <= 1e-12 * scale {
            return Err(Error::input("lattice basis is not full rank"));
        }
        Ok(Lattice { basis })
    }

    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self> {
        let r = cols.len();
        if cols.iter().any(|c| c.len() != r) {
            return Err(Error::input("lattice basis must be square"));
        }
        Lattice::new(DMatrix::from_fn(r, r, |i, j| cols[j][i]))
    }

    pub fn integer(rank: usize) -> Self {
        Lattice {
            basis: DMatrix::identity(rank, rank),
        }
    }

    /// Unit-minimum hexagonal lattice `(1, 0), (1/2, √3/2)`.
    pub fn hexagonal() -> Self {
        Lattice::from_columns(&[vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]]).expect("full rank")
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn gram(&self) -> DMatrix<f64> {
        self.basis.transpose() * &self.basis
    }

    pub fn covolume(&self) -> f64 {
        self.basis.determinant().abs()
    }

    pub fn scaled(&self, t: f64) -> Self {
        Lattice {
            basis: &self.basis * t,
        }
    }

    pub fn dual(&self) -> Lattice {
        let inv = self.basis.clone().try_inverse().expect("full rank");
        Lattice { basis: inv.transpose() }
    }

    pub fn vector(&self, coeffs: &[i64]) -> Vec<f64> {
        let x = nalgebra::DVector::from_iterator(coeffs.len(), coeffs.iter().map(|c| *c as f64));
        (&self.basis * x).as_slice().to_vec()
    }

    /// Exact shortest nonzero vector by Fincke–Pohst enumeration. Among
    /// minimizers the lexicographically smallest coefficient vector wins.
    pub fn shortest_vector(&self) -> Result<ShortestVector> {
        let r = self.rank();
        if r > MAX_RANK {
            return Err(Error::Unsupported(format!("lattice rank {r} exceeds {MAX_RANK}")));
        }
        let gram = self.gram();
        let chol = gram
            .clone()
            .cholesky()
            .ok_or_else(|| Error::input("lattice Gram matrix is not positive definite"))?;
        let rt = chol.l().transpose();
        let diag: Vec<f64> = (0..r).map(|i| rt[(i, i)]).collect();
        let mu = DMatrix::from_fn(r, r, |i, j| if j > i { rt[(i, j)] / rt[(i, i)] } else { 0.0 });

        let mut best = (0..r).map(|i| gram[(i, i)]).fold(f64::INFINITY, f64::min);
        let mut found: Vec<(f64, Vec<i64>)> = Vec::new();
        let mut x = vec![0i64; r];
        enumerate(r - 1, 0.0, &diag, &mu, &mut x, &mut best, &mut found);

        let min = found.iter().map(|(l, _)| *l).fold(f64::INFINITY, f64::min);
        let coeffs = found
            .into_iter()
            .filter(|(l, _)| *l <= min * (1.0 + 2.0 * TIE_TOL))
            .map(|(_, c)| c)
            .min()
            .expect("the bound admits a basis vector");
        let len = exact_length(&gram, &coeffs);
        Ok(ShortestVector { coeffs, length: len })
    }

    /// `λ₁(L) · λ₁(L*)`.
    pub fn berge_martinet(&self) -> Result<f64> {
        Ok(self.shortest_vector()?.length * self.dual().shortest_vector()?.length)
    }
}

fn exact_length(gram: &DMatrix<f64>, c: &[i64]) -> f64 {
    let mut s = 0.0;
    for i in 0..c.len() {
        for j in 0..c.len() {
            s += c[i] as f64 * gram[(i, j)] * c[j] as f64;
        }
    }
    s.max(0.0).sqrt()
}

/// Depth-first search over levels `r-1, …, 0`, visiting every integer vector
/// with `‖Bx‖² ≤ best·(1 + 2·TIE_TOL)`; `best` shrinks as shorter vectors
/// appear.
fn enumerate(
    level: usize,
    acc: f64,
    diag: &[f64],
    mu: &DMatrix<f64>,
    x: &mut [i64],
    best: &mut f64,
    found: &mut Vec<(f64, Vec<i64>)>,
) {
    let r = diag.len();
    let center: f64 = -((level + 1)..r).map(|j| mu[(level, j)] * x[j] as f64).sum::<f64>();
    let bound = *best * (1.0 + 2.0 * TIE_TOL);
    let room = bound - acc;
    if room < 0.0 {
        return;
    }
    let radius = room.sqrt() / diag[level];
    let lo = (center - radius).ceil() as i64;
    let hi = (center + radius).floor() as i64;
    for v in lo..=hi {
        x[level] = v;
        let t = diag[level] * (v as f64 - center);
        let next = acc + t * t;
        if next > *best * (1.0 + 2.0 * TIE_TOL) {
            continue;
        }
        if level == 0 {
            if x.iter().all(|c| *c == 0) {
                continue;
            }
            if next < *best {
                *best = next;
                found.retain(|(l, _)| *l <= next * (1.0 + 2.0 * TIE_TOL));
            }
            found.push((next, x.to_vec()));
        } else {
            enumerate(level - 1, next, diag, mu, x, best, found);
        }
    }
    x[level] = 0;
}

/// Bergé–Martinet value of the upper-triangular basis with the given
/// row-major upper entries; zero for degenerate bases.
fn triangular_value(rank: usize, params: &[f64]) -> f64 {
    let mut b = DMatrix::zeros(rank, rank);
    let mut k = 0;
    for i in 0..rank {
        for j in i..rank {
            b[(i, j)] = params[k];
            k += 1;
        }
    }
    Lattice::new(b)
        .and_then(|l| l.berge_martinet())
        .unwrap_or(0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualCriticalEstimate {
    pub rank: usize,
    pub value: f64,
    pub seed: u64,
    pub evaluations: usize,
}

/// Maximizes `λ₁λ₁*` over rank-`r` lattices by seeded random sampling
/// followed by a shrinking random-direction pattern search.
pub fn search_dual_critical(rank: usize, seed: u64) -> Result<DualCriticalEstimate> {
    if rank == 0 || rank > MAX_RANK {
        return Err(Error::Unsupported(format!("rank {rank} outside 1..={MAX_RANK}")));
    }
    if rank == 1 {
        return Ok(DualCriticalEstimate { rank, value: 1.0, seed, evaluations: 0 });
    }
    let dim = rank * (rank + 1) / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evaluations = 0;
    let sample = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        let mut p = Vec::with_capacity(dim);
        for i in 0..rank {
            for j in i..rank {
                p.push(if i == j {
                    (rng.random::<f64>() - 0.5).exp()
                } else {
                    2.0 * rng.random::<f64>() - 1.0
                });
            }
        }
        p
    };

    let mut starts: Vec<(f64, Vec<f64>)> = (0..100 * rank)
        .map(|_| {
            let p = sample(&mut rng);
            evaluations += 1;
            (triangular_value(rank, &p), p)
        })
        .collect();
    starts.sort_by(|a, b| b.0.total_cmp(&a.0));
    starts.truncate(4);

    let mut best = 0.0_f64;
    for (mut value, mut point) in starts {
        let mut step = 0.1;
        let mut stalls = 0;
        while step > 1e-11 && evaluations < 400_000 {
            let mut dir: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() - 0.5).collect();
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            dir.iter_mut().for_each(|v| *v /= norm);
            let mut improved = false;
            for s in [1.0, -1.0] {
                let trial: Vec<f64> = point.iter().zip(&dir).map(|(p, d)| p + s * step * d).collect();
                let v = triangular_value(rank, &trial);
                evaluations += 1;
                if v > value {
                    value = v;
                    point = trial;
                    improved = true;
                    break;
                }
            }
            if improved {
                stalls = 0;
            } else {
                stalls += 1;
                if stalls >= 12 * dim {
                    step *= 0.5;
                    stalls = 0;
                }
            }
        }
        best = best.max(value);
    }
    Ok(DualCriticalEstimate { rank, value: best, seed, evaluations })
}

/// Cached [`search_dual_critical`] with the report seed.
pub fn dual_critical_optimum(rank: usize) -> Result<f64> {
    static CACHE: OnceLock<Mutex<HashMap<usize, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("cache lock").get(&rank) {
        return Ok(*v);
    }
    let v = search_dual_critical(rank, SEARCH_SEED)?.value;
    cache.lock().expect("cache lock").insert(rank, v);
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SystolicReport {
    pub lambda1: f64,
    pub lambda1_dual: f64,
    pub product: f64,
    pub vol: f64,
    pub stsys1: f64,
    pub sys_nm1: f64,
    pub ratio: f64,
    pub optimum: f64,
    pub equality_flag: bool,
    pub tol: f64,
    pub shortest: Vec<i64>,
    pub shortest_dual: Vec<i64>,
}

/// Systolic quantities of a circle bundle of fiber length `fiber_length`
/// over the flat torus `R^r / L` with fiber-saturated minimal hypersurfaces.
pub fn systolic_report(base: &Lattice, fiber_length: f64, tol: f64) -> Result<SystolicReport> {
    if !(fiber_length > 0.0 && fiber_length.is_finite()) {
        return Err(Error::input("fiber length must be positive"));
    }
    let sv = base.shortest_vector()?;
    let dv = base.dual().shortest_vector()?;
    let covol = base.covolume();
    let product = sv.length * dv.length;
    let optimum = dual_critical_optimum(base.rank())?;
    let ratio = product;
    Ok(SystolicReport {
        lambda1: sv.length,
        lambda1_dual: dv.length,
        product,
        vol: fiber_length * covol,
        stsys1: sv.length,
        sys_nm1: fiber_length * covol * dv.length,
        ratio,
        optimum,
        equality_flag: (ratio - optimum).abs() <= tol,
        tol,
        shortest: sv.coeffs,
        shortest_dual: dv.coeffs,
    })
}
