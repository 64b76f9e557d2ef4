//! Tell a left-invariant Heisenberg metric from a pseudo left-invariant one:
//! `dx₁∧dx₂` is a Laplace eigenform exactly when `|dϑ|²` is constant.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use nilforms::bundlenum::laplacian::RATIO_TOL;
use nilforms::bundlenum::{left_invariance_discriminator, BundleMetric, TorusGrid, TrigForm, TrigPoly, TrigTerm, Wave};
use nilforms::systole::Lattice;

fn main() -> nilforms::Result<()> {
    let a2 = TrigPoly::new(2, vec![TrigTerm::new(-0.5 / (2.0 * PI), Wave::Cos, vec![1, 0])])?;
    let alpha = TrigForm::new(2, 1, vec![TrigPoly::zero(2), a2])?;
    let c = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
    let pseudo = BundleMetric::new(c, alpha, 1.0, Lattice::integer(2))?;
    let left = BundleMetric::heisenberg(1.0);

    println!("{:>5} {:>8} {:>12} {:>8} {:>12} {:>12}", "res", "left", "variation", "pseudo", "variation", "|ratio-b²|");
    for res in [16, 32, 64] {
        let grid = TorusGrid::new(2, res)?;
        let l = left_invariance_discriminator(&left, grid, RATIO_TOL)?;
        let p = left_invariance_discriminator(&pseudo, grid, RATIO_TOL)?;
        println!(
            "{:>5} {:>8} {:>12.3e} {:>8} {:>12.3e} {:>12.3e}",
            res, l.is_left_invariant, l.variation, p.is_left_invariant, p.variation, p.deviation_from_b2
        );
    }
    Ok(())
}
