mod common;

use nalgebra::{DMatrix, DVector};
use nilforms::exterior::{
    binomial, form_inner, hodge_star, interior, wedge, ExtForm, InnerProduct, MultiIndex, Orientation,
};
use nilforms::nilalgebra::hodge_dimension_defect;
use nilforms::splitcalc::{eigenform_test, SplitCalculus, SplitForm};
use nilforms::systole::Lattice;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn form(rng: &mut ChaCha8Rng, dim: usize, p: usize) -> ExtForm {
    let coeffs = (0..binomial(dim, p)).map(|_| rng.random_range(-1.0..1.0)).collect();
    ExtForm::from_coeffs(dim, p, coeffs).unwrap()
}

fn metric(rng: &mut ChaCha8Rng, dim: usize) -> InnerProduct {
    let a = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-0.5..0.5));
    InnerProduct::new(a.transpose() * &a + DMatrix::identity(dim, dim) * 0.5).unwrap()
}

fn close(a: &ExtForm, b: &ExtForm, tol: f64) -> bool {
    (a - b).max_abs() <= tol * (1.0 + a.max_abs().max(b.max_abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wedge_is_associative_and_graded_commutative(dim in 1usize..=6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, q) = (rng.random_range(0..=dim), rng.random_range(0..=dim));
        let r = rng.random_range(0..=dim);
        let (a, b, c) = (form(&mut rng, dim, p), form(&mut rng, dim, q), form(&mut rng, dim, r));
        let left = wedge(&wedge(&a, &b).unwrap(), &c).unwrap();
        let right = wedge(&a, &wedge(&b, &c).unwrap()).unwrap();
        prop_assert!(close(&left, &right, 1e-13));
        let ab = wedge(&a, &b).unwrap();
        let ba = wedge(&b, &a).unwrap().scaled(if (p * q) % 2 == 0 { 1.0 } else { -1.0 });
        prop_assert!(close(&ab, &ba, 1e-14));
    }

    #[test]
    fn interior_is_an_antiderivation(dim in 1usize..=6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, q) = (rng.random_range(1..=dim), rng.random_range(1..=dim));
        let (a, b) = (form(&mut rng, dim, p), form(&mut rng, dim, q));
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let lhs = interior(&v, &wedge(&a, &b).unwrap()).unwrap();
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        let rhs = &wedge(&interior(&v, &a).unwrap(), &b).unwrap()
            + &wedge(&a, &interior(&v, &b).unwrap()).unwrap().scaled(sign);
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn hodge_star_is_an_isometry(dim in 1usize..=6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = metric(&mut rng, dim);
        let p = rng.random_range(0..=dim);
        let (a, b) = (form(&mut rng, dim, p), form(&mut rng, dim, p));
        let (sa, sb) = (hodge_star(&a, &g, Orientation::Positive).unwrap(), hodge_star(&b, &g, Orientation::Positive).unwrap());
        let lhs = form_inner(&sa, &sb, &g).unwrap();
        let rhs = form_inner(&a, &b, &g).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn identity_gram_is_the_dot_product(dim in 1usize..=6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = rng.random_range(0..=dim);
        let (a, b) = (form(&mut rng, dim, p), form(&mut rng, dim, p));
        let dot: f64 = a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| x * y).sum();
        let inner = form_inner(&a, &b, &InnerProduct::identity(dim)).unwrap();
        prop_assert!((inner - dot).abs() < 1e-14);
    }

    #[test]
    fn ce_complex_identities(seed in any::<u64>()) {
        let alg = common::random_algebra(seed, None);
        let m = alg.dim();
        for p in 0..m {
            let d = alg.differential(p);
            if p + 1 < m {
                prop_assert!((alg.differential(p + 1) * &d).amax() < 1e-12);
            }
            // Δ commutes with d.
            let comm = alg.laplacian(p + 1) * &d - &d * alg.laplacian(p);
            prop_assert!(comm.amax() < 1e-10 * (1.0 + d.amax().powi(3)), "{}", comm.amax());
        }
        let betti = alg.betti_numbers();
        for p in 0..=m {
            prop_assert_eq!(hodge_dimension_defect(&alg, p), 0);
            prop_assert_eq!(betti[p], betti[m - p]);
        }
    }

    #[test]
    fn block_calculus_matches_ce_operators(seed in any::<u64>()) {
        let alg = common::random_algebra(seed, Some(1));
        let calc = SplitCalculus::new(&alg).unwrap();
        let m = alg.dim();
        prop_assert!(calc.data().eta.max_abs() < 1e-12);
        for p in 0..m {
            prop_assert!((calc.conjugated_d(p) - alg.differential(p)).amax() < 1e-12);
            prop_assert!((calc.conjugated_dstar(p + 1) - alg.codifferential(p + 1)).amax() < 1e-12);
        }
    }

    #[test]
    fn block_dstar_is_the_adjoint_of_block_d(seed in any::<u64>()) {
        let alg = common::random_algebra(seed, Some(1));
        let calc = SplitCalculus::new(&alg).unwrap();
        let frame = calc.frame();
        let gram = |p: usize| {
            let gh = frame.horizontal_form_gram(p);
            let gv = if p == 0 { DMatrix::zeros(0, 0) } else { frame.horizontal_form_gram(p - 1) };
            let n = gh.nrows() + gv.nrows();
            let mut g = DMatrix::zeros(n, n);
            g.view_mut((0, 0), gh.shape()).copy_from(&gh);
            g.view_mut((gh.nrows(), gh.nrows()), gv.shape()).copy_from(&gv);
            g
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for p in 0..alg.dim() {
            let d = calc.block_d(p).to_matrix();
            let ds = calc.block_dstar(p + 1).to_matrix();
            let x = DVector::from_fn(d.ncols(), |_, _| rng.random_range(-1.0..1.0));
            let y = DVector::from_fn(d.nrows(), |_, _| rng.random_range(-1.0..1.0));
            let lhs = (&d * &x).dot(&(gram(p + 1) * &y));
            let rhs = x.dot(&(gram(p) * (&ds * &y)));
            prop_assert!((lhs - rhs).abs() < 1e-11 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
        }
    }

    /// For `ω` a wedge of `n_h - 1` horizontal duals, `Δω = L L* ω`, so `ω` is
    /// an eigenform exactly when `L L* ω` is parallel to `ω`.
    #[test]
    fn horizontal_codimension_one_forms(seed in any::<u64>()) {
        let alg = common::random_algebra(seed, Some(1));
        let nh = alg.horizontal_dim();
        let calc = SplitCalculus::new(&alg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
        let skip = rng.random_range(0..nh);
        let idx: Vec<usize> = (0..nh).filter(|&i| i != skip).collect();
        let omega = ExtForm::monomial(alg.dim(), &idx).unwrap();
        let p = nh - 1;
        let split = calc.frame().split(&omega).unwrap();
        prop_assert!(split.vert.as_ref().is_none_or(|v| v.max_abs() < 1e-14));
        let h = split.horiz.as_vector();
        let llh = if p >= 2 { calc.op_l(p - 2) * (calc.op_lstar(p - 2) * &h) } else { DVector::zeros(h.len()) };
        let llw = calc.frame().join(&SplitForm {
            degree: p,
            horiz: ExtForm::from_coeffs(nh, p, llh.as_slice().to_vec()).unwrap(),
            vert: (p >= 1).then(|| ExtForm::zero(nh, p - 1)),
        }).unwrap();
        let lap = alg.laplacian(p) * omega.as_vector();
        let lap = ExtForm::from_coeffs(alg.dim(), p, lap.as_slice().to_vec()).unwrap();
        prop_assert!(close(&lap, &llw, 1e-10));
        let r = eigenform_test(&alg, &omega, 1e-9).unwrap();
        if nh == 2 {
            prop_assert!(r.is_eigen);
        }
    }

    #[test]
    fn berge_martinet_is_scale_and_basis_invariant(seed in any::<u64>(), rank in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = DMatrix::from_fn(rank, rank, |i, j| (if i == j { 1.0 } else { 0.0 }) + 0.4 * rng.random_range(-1.0..1.0));
        let l = Lattice::new(b.clone()).unwrap();
        let bm = l.berge_martinet().unwrap();
        let t = rng.random_range(0.1..10.0);
        prop_assert!((l.scaled(t).berge_martinet().unwrap() - bm).abs() < 1e-12 * bm);
        // Unimodular change of basis: add an integer multiple of one column to another.
        if rank >= 2 {
            let mut u = DMatrix::<f64>::identity(rank, rank);
            u[(0, 1)] = rng.random_range(-3..=3) as f64;
            let l2 = Lattice::new(&b * u).unwrap();
            prop_assert!((l2.berge_martinet().unwrap() - bm).abs() < 1e-12 * bm);
        }
        // Orthogonal image.
        let q = DMatrix::from_fn(rank, rank, |_, _| rng.random_range(-1.0..1.0)).qr().q();
        let l3 = Lattice::new(q * b).unwrap();
        prop_assert!((l3.berge_martinet().unwrap() - bm).abs() < 1e-12 * bm);
    }
}

#[test]
fn multi_index_rank_round_trip() {
    for dim in 1..=6 {
        for p in 0..=dim {
            for (r, idx) in nilforms::exterior::basis(dim, p).iter().enumerate() {
                assert_eq!(idx.rank(dim), r);
                assert_eq!(MultiIndex::new(idx.indices().to_vec(), dim).unwrap(), *idx);
            }
        }
    }
}
