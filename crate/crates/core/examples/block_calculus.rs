//! Split invariant forms into horizontal and vertical parts along the center
//! and check that the block operators reproduce `d` and `d*`.

use nalgebra::DMatrix;
use nilforms::exterior::InnerProduct;
use nilforms::nilalgebra::{MetricLieAlgebra, StructureConstant};
use nilforms::splitcalc::{eigenform_test, SplitCalculus, EIGEN_TOL};

fn main() -> nilforms::Result<()> {
    let gram = DMatrix::from_row_slice(
        5,
        5,
        &[
            2.0, 0.3, 0.0, 0.0, 0.1, //
            0.3, 1.0, 0.0, 0.2, 0.0, //
            0.0, 0.0, 1.5, 0.0, 0.0, //
            0.0, 0.2, 0.0, 1.0, 0.0, //
            0.1, 0.0, 0.0, 0.0, 1.0,
        ],
    );
    let alg = MetricLieAlgebra::new(
        4,
        1,
        &[StructureConstant::new(0, 1, 0, 1.0), StructureConstant::new(2, 3, 0, -0.5)],
        Some(InnerProduct::new(gram)?),
    )?;
    let calc = SplitCalculus::new(&alg)?;
    println!("curvature b = {:?}", calc.data().b.coeffs());
    println!("eta         = {:?}", calc.data().eta.coeffs());
    println!("{:>6} {:>12} {:>12}", "degree", "|d error|", "|d* error|");
    for p in 0..=alg.dim() {
        let d = if p < alg.dim() { (calc.conjugated_d(p) - alg.differential(p)).amax() } else { 0.0 };
        let ds = if p > 0 { (calc.conjugated_dstar(p) - alg.codifferential(p)).amax() } else { 0.0 };
        println!("{p:>6} {d:>12.2e} {ds:>12.2e}");
    }

    for c in [0.5, 1.0, 2.0] {
        let h = MetricLieAlgebra::heisenberg(c);
        let r = eigenform_test(&h, &h.central_dual()?, EIGEN_TOL)?;
        println!("heisenberg c = {c}: Δϑ = {:.15} ϑ", r.lambda);
    }
    Ok(())
}
