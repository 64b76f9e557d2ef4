//! Acceptance criteria 1 to 9. Each test prints one `PASS`/`FAIL` line with
//! the measured numbers before asserting.

mod common;

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use nilforms::bundlenum::bk::bk_convergence;
use nilforms::bundlenum::identity::convergence;
use nilforms::bundlenum::{
    contraction_identity_check, harmonic_scan, left_invariance_discriminator, BundleMetric, ConvergenceTable,
    CoordMetric3, TorusGrid, TrigForm, TrigPoly, TrigTerm, Wave, ROUNDOFF_FLOOR,
};
use nilforms::eigen::EigenOptions;
use nilforms::exterior::binomial;
use nilforms::nilalgebra::{adjointness_residual, MetricLieAlgebra};
use nilforms::splitcalc::{eigenform_test, SplitCalculus};
use nilforms::systole::{search_dual_critical, systolic_report, Lattice};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: usize, name: &str, pass: bool, detail: String) {
    println!("criterion {n} ({name}): {} | {detail}", if pass { "PASS" } else { "FAIL" });
}

fn pseudo_heisenberg() -> BundleMetric {
    let a2 = TrigPoly::new(2, vec![TrigTerm::new(-0.5 / (2.0 * PI), Wave::Cos, vec![1, 0])]).unwrap();
    let alpha = TrigForm::new(2, 1, vec![TrigPoly::zero(2), a2]).unwrap();
    let c = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
    BundleMetric::new(c, alpha, 1.0, Lattice::integer(2)).unwrap()
}

fn random_pairs(rng: &mut ChaCha8Rng, m: usize, p: usize) -> Vec<(DVector<f64>, DVector<f64>)> {
    (0..4)
        .map(|_| {
            (
                DVector::from_fn(binomial(m, p), |_, _| rng.random_range(-1.0..1.0)),
                DVector::from_fn(binomial(m, p + 1), |_, _| rng.random_range(-1.0..1.0)),
            )
        })
        .collect()
}

#[test]
fn criterion_1_chevalley_eilenberg_suite() {
    const TOL: f64 = 1e-12;
    let start = Instant::now();
    let heis = MetricLieAlgebra::heisenberg(1.0).betti_numbers();
    let abelian_ok = (1..=6).all(|m| {
        let b = MetricLieAlgebra::abelian(m).betti_numbers();
        (0..=m).all(|p| b[p] == binomial(m, p))
    });
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut d2, mut adj) = (0.0_f64, 0.0_f64);
    for seed in 0..50 {
        let alg = common::random_algebra(seed, None);
        let m = alg.dim();
        for p in 0..m {
            if p + 1 < m {
                d2 = d2.max((alg.differential(p + 1) * alg.differential(p)).amax());
            }
            adj = adj.max(adjointness_residual(&alg, p, &random_pairs(&mut rng, m, p)));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = heis == vec![1, 2, 2, 1] && abelian_ok && d2 < TOL && adj < TOL && secs < 5.0;
    report(
        1,
        "cohomology suite",
        pass,
        format!("heisenberg betti {heis:?}, abelian binomial {abelian_ok}, max|d²| {d2:.2e}, adjointness {adj:.2e} (tol {TOL:e}), {secs:.2} s (limit 5 s)"),
    );
    assert!(pass);
}

#[test]
fn criterion_2_block_equivalence() {
    const TOL: f64 = 1e-12;
    let mut algebras = vec![MetricLieAlgebra::heisenberg(1.0), MetricLieAlgebra::heisenberg(-2.5), MetricLieAlgebra::abelian(4)];
    algebras.extend((100..150).map(|s| common::random_algebra(s, Some(1))));
    let (mut d_err, mut ds_err) = (0.0_f64, 0.0_f64);
    for alg in &algebras {
        let calc = SplitCalculus::new(alg).unwrap();
        let m = alg.dim();
        for p in 0..=m {
            if p < m {
                d_err = d_err.max((calc.conjugated_d(p) - alg.differential(p)).amax());
            }
            if p >= 1 {
                ds_err = ds_err.max((calc.conjugated_dstar(p) - alg.codifferential(p)).amax());
            }
        }
    }
    let pass = d_err < TOL && ds_err < TOL;
    report(
        2,
        "block equivalence",
        pass,
        format!("{} algebras, max d error {d_err:.2e}, max d* error {ds_err:.2e} (tol {TOL:e})", algebras.len()),
    );
    assert!(pass);
}

#[test]
fn criterion_3_eigenvalue_anchor() {
    const TOL: f64 = 1e-12;
    let mut worst = 0.0_f64;
    let mut all_eigen = true;
    for c in [0.5, 1.0, 2.0] {
        let alg = MetricLieAlgebra::heisenberg(c);
        let r = eigenform_test(&alg, &alg.central_dual().unwrap(), 1e-12).unwrap();
        all_eigen &= r.is_eigen;
        worst = worst.max((r.lambda - c * c).abs() / (c * c));
    }
    let pass = all_eigen && worst < TOL;
    report(3, "eigenvalue c²", pass, format!("max relative error {worst:.2e} (tol {TOL:e}), eigenform {all_eigen}"));
    assert!(pass);
}

#[test]
fn criterion_4_constant_length_numeric() {
    const KERNEL: f64 = 1e-8;
    const GAP: f64 = 0.05;
    const VARIATION: f64 = 1e-5;
    let metric = pseudo_heisenberg();
    let opts = EigenOptions::default();
    let s32 = harmonic_scan(&metric, TorusGrid::new(2, 32).unwrap(), 4, KERNEL, &opts).unwrap();
    let s64 = harmonic_scan(&metric, TorusGrid::new(2, 64).unwrap(), 4, KERNEL, &opts).unwrap();
    let (v32, v64) = (s32.max_norm_variation, s64.max_norm_variation);
    let gap = s32.gap.unwrap_or(0.0);
    // Both variations sit at rounding level: no further decrease is measurable.
    let at_floor = v32 <= ROUNDOFF_FLOOR && v64 <= ROUNDOFF_FLOOR;
    let decrease = at_floor || v32 >= 3.0 * v64;
    let pass = s32.kernel_dim == 2 && gap > GAP && v32 < VARIATION && decrease;
    report(
        4,
        "harmonic norm constant",
        pass,
        format!(
            "kernel {} (< {KERNEL:e}), gap {gap:.4} (> {GAP}), variation {v32:.2e} at 32 (< {VARIATION:e}), {v64:.2e} at 64, decrease x3 {} (rounding floor {ROUNDOFF_FLOOR:e}: {at_floor})",
            s32.kernel_dim, decrease
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_5_discrimination() {
    const VARIATION: f64 = 1e-9;
    const ORDER: f64 = 1.9;
    let grid = TorusGrid::new(2, 32).unwrap();
    let left = left_invariance_discriminator(&BundleMetric::heisenberg(1.0), grid, 1e-6).unwrap();
    let pseudo = pseudo_heisenberg();
    let levels: Vec<(usize, f64)> = [16, 32, 64]
        .iter()
        .map(|&r| {
            let d = left_invariance_discriminator(&pseudo, TorusGrid::new(2, r).unwrap(), 1e-6).unwrap();
            assert!(!d.is_left_invariant);
            (r, d.deviation_from_b2)
        })
        .collect();
    let table = ConvergenceTable::new(&levels);
    let pass = left.is_left_invariant && left.variation < VARIATION && table.converges_at(ORDER);
    report(
        5,
        "left-invariance discriminator",
        pass,
        format!(
            "left variation {:.2e} (< {VARIATION:e}); pseudo |ratio - (1+0.5 sin)²| {:?}, min order {:?} (>= {ORDER})",
            left.variation,
            levels.iter().map(|l| format!("{:.2e}", l.1)).collect::<Vec<_>>(),
            table.min_order
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_6_bk_example() {
    const DSTAR: f64 = 1e-10;
    const ORDER: f64 = 1.9;
    const RANGE: f64 = 1e-3;
    let f = TrigPoly::new(1, vec![TrigTerm::new(0.5, Wave::Sin, vec![1])]).unwrap();
    let metric = CoordMetric3::new(f).unwrap();
    let (rows, table) = bk_convergence(&metric, &[16, 32, 64]).unwrap();
    let fine = rows.last().unwrap();
    // Independent closed form on the same nodes: θ ↦ -f/(1-f²), f = sin(2πθ)/2.
    let exact: Vec<f64> = (0..64)
        .map(|k| {
            let f = 0.5 * (2.0 * PI * k as f64 / 64.0).sin();
            -f / (1.0 - f * f)
        })
        .collect();
    let lo = exact.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = exact.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let oracle_err = (fine.inner_min - lo).abs().max((fine.inner_max - hi).abs());
    let range_err = (fine.inner_min + 2.0 / 3.0).abs().max((fine.inner_max - 2.0 / 3.0).abs());
    let pass = fine.dstar_dx_max < DSTAR
        && fine.dstar_dy_max < DSTAR
        && table.converges_at(ORDER)
        && range_err < RANGE
        && oracle_err < 1e-12;
    report(
        6,
        "coclosed coordinate forms",
        pass,
        format!(
            "|d*dx| {:.2e}, |d*dy| {:.2e} (< {DSTAR:e}); inner-product errors {:?} (exact to rounding: {}); range error {range_err:.2e} (< {RANGE:e})",
            fine.dstar_dx_max,
            fine.dstar_dy_max,
            rows.iter().map(|r| format!("{:.2e}", r.inner_error)).collect::<Vec<_>>(),
            table.exact
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_7_contraction_identity() {
    const ORDER: f64 = 1.9;
    const DEGENERATE: f64 = 1e-12;
    let mut orders = Vec::new();
    let mut ok = true;
    for seed in [1, 2, 3] {
        let beta = TrigForm::random(4, 2, 3, &mut ChaCha8Rng::seed_from_u64(seed));
        let (_, t) = convergence(4, &[16, 32], |g| contraction_identity_check(&beta, g)).unwrap();
        ok &= t.converges_at(ORDER);
        orders.push(t.min_order);
    }
    // The 3-manifold case: a circle bundle over T², where the coefficient N - 2 vanishes.
    let mut lhs = 0.0_f64;
    for seed in [4, 5, 6] {
        let beta = TrigForm::random(2, 2, 4, &mut ChaCha8Rng::seed_from_u64(seed));
        for res in [16, 32, 64] {
            lhs = lhs.max(contraction_identity_check(&beta, TorusGrid::new(2, res).unwrap()).unwrap().lhs_max);
        }
    }
    let pass = ok && lhs < DEGENERATE;
    report(
        7,
        "contraction identity",
        pass,
        format!("T^4 orders {orders:?} (>= {ORDER}); 3-manifold case max |lhs| {lhs:.2e} (< {DEGENERATE:e})"),
    );
    assert!(pass);
}

/// Brute-force shortest vector over the coefficient box `[-10, 10]^r`.
fn brute_force(l: &Lattice) -> f64 {
    let r = l.rank();
    let mut best = f64::INFINITY;
    let mut c = vec![-10_i64; r];
    loop {
        if c.iter().any(|&x| x != 0) {
            let v = l.vector(&c);
            best = best.min(v.iter().map(|x| x * x).sum::<f64>().sqrt());
        }
        let mut i = 0;
        while i < r {
            c[i] += 1;
            if c[i] <= 10 {
                break;
            }
            c[i] = -10;
            i += 1;
        }
        if i == r {
            return best;
        }
    }
}

#[test]
fn criterion_8_systolic_suite() {
    const HEX: f64 = 1e-9;
    const SEARCH: f64 = 1e-6;
    let bound = 2.0 / 3f64.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut sv_err = 0.0_f64;
    for rank in 1..=4 {
        for _ in 0..100 {
            let b = DMatrix::from_fn(rank, rank, |i, j| {
                (if i == j { 1.0 } else { 0.0 }) + 0.5 * rng.random_range(-1.0..1.0)
            });
            let Ok(l) = Lattice::new(b) else { continue };
            let got = l.shortest_vector().unwrap().length;
            sv_err = sv_err.max((got - brute_force(&l)).abs());
        }
    }
    let hex_err = (Lattice::hexagonal().berge_martinet().unwrap() - bound).abs();
    let mut sample_max = 0.0_f64;
    for _ in 0..1000 {
        let b = DMatrix::from_fn(2, 2, |_, _| rng.random_range(-1.0..1.0));
        if let Ok(l) = Lattice::new(b) {
            sample_max = sample_max.max(l.berge_martinet().unwrap());
        }
    }
    let search = search_dual_critical(2, 42).unwrap().value;
    let base = Lattice::from_columns(&[vec![1.3, 0.2], vec![-0.4, 0.9]]).unwrap();
    let ratios: Vec<f64> = [0.01, 1.0, 7.5, 1e4]
        .iter()
        .map(|&l| systolic_report(&base, l, 1e-6).unwrap().ratio)
        .collect();
    let invariant = ratios.iter().all(|r| r.to_bits() == ratios[0].to_bits());
    let hex_bundle = systolic_report(&Lattice::hexagonal().scaled(2.0), 3.0, 1e-6).unwrap();
    let square = systolic_report(&Lattice::integer(2), 3.0, 1e-6).unwrap();
    let pass = sv_err < 1e-12
        && hex_err < HEX
        && sample_max <= bound + SEARCH
        && search <= bound + SEARCH
        && invariant
        && hex_bundle.equality_flag
        && !square.equality_flag;
    report(
        8,
        "systolic suite",
        pass,
        format!(
            "shortest-vector error vs brute force {sv_err:.2e}; hexagonal BM error {hex_err:.2e} (< {HEX:e}); 2D max {sample_max:.9}, search {search:.12} (<= 2/sqrt3 + {SEARCH:e}); ratio fiber-invariant {invariant}; hexagonal equality {}, square {}",
            hex_bundle.equality_flag, square.equality_flag
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_9_determinism() {
    let runs: [(&str, &str); 11] = [
        ("algebra", "heisenberg.json"),
        ("algebra", "abelian4.json"),
        ("algebra", "heisenberg6.json"),
        ("bundle", "heisenberg-left-invariant.json"),
        ("bundle", "heisenberg-pseudo.json"),
        ("bundle", "hexagonal-bundle.json"),
        ("bk", "bk.json"),
        ("identity", "identity.json"),
        ("identity", "identity-degenerate.json"),
        ("identity", "awb.json"),
        ("systole", "systole-hex.json"),
    ];
    let dir = tempfile::tempdir().unwrap();
    let mut mismatched = Vec::new();
    for (cmd, file) in runs {
        let mut outputs = Vec::new();
        for threads in ["1", "4"] {
            let out = dir.path().join(format!("{file}.{threads}.json"));
            let status = Command::new(env!("CARGO_BIN_EXE_nilforms"))
                .args([cmd, "--in"])
                .arg(common::fixture(file))
                .arg("--out")
                .arg(&out)
                .env("NILFORMS_THREADS", threads)
                .output()
                .unwrap()
                .status;
            assert_eq!(status.code(), Some(0), "{cmd} {file}");
            outputs.push(std::fs::read(&out).unwrap());
        }
        if outputs[0] != outputs[1] {
            mismatched.push(file);
        }
    }
    let pass = mismatched.is_empty();
    report(9, "determinism", pass, format!("{} fixtures x threads {{1, 4}}, mismatched {mismatched:?}", runs.len()));
    assert!(pass);
}
