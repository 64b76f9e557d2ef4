//! Harmonic 1-forms of a pseudo left-invariant Heisenberg bundle have
//! constant length: scan the invariant Laplacian at several resolutions.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use nilforms::bundlenum::laplacian::KERNEL_TOL;
use nilforms::bundlenum::{harmonic_scan, BundleMetric, TorusGrid, TrigForm, TrigPoly, TrigTerm, Wave};
use nilforms::eigen::EigenOptions;
use nilforms::systole::Lattice;

fn main() -> nilforms::Result<()> {
    // dϑ = (1 + 0.5 sin 2πx₁) dx₁∧dx₂
    let a2 = TrigPoly::new(2, vec![TrigTerm::new(-0.5 / (2.0 * PI), Wave::Cos, vec![1, 0])])?;
    let alpha = TrigForm::new(2, 1, vec![TrigPoly::zero(2), a2])?;
    let c = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
    let metric = BundleMetric::new(c, alpha, 1.0, Lattice::integer(2))?;

    println!("{:>5} {:>12} {:>12} {:>12} {:>12} {:>10} {:>6}", "res", "λ1", "λ2", "λ3", "variation", "method", "iters");
    for res in [16, 32, 64] {
        let grid = TorusGrid::new(2, res)?;
        let t = std::time::Instant::now();
        let scan = harmonic_scan(&metric, grid, 4, KERNEL_TOL, &EigenOptions::default())?;
        println!(
            "{:>5} {:>12.3e} {:>12.3e} {:>12.5} {:>12.3e} {:>10?} {:>6}  ({:.2?}, kernel {})",
            res,
            scan.eigenvalues[0],
            scan.eigenvalues[1],
            scan.eigenvalues[2],
            scan.max_norm_variation,
            scan.method,
            scan.iterations,
            t.elapsed(),
            scan.kernel_dim
        );
    }
    Ok(())
}
