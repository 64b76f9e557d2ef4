//! On `S¹ × T²` with fiber metric `[[1, f(θ)], [f(θ), 1]]` the coordinate
//! forms `dx`, `dy` stay closed and coclosed, yet `<dx, dy>` varies.

use nilforms::bundlenum::bk::bk_convergence;
use nilforms::bundlenum::{CoordMetric3, TrigPoly, TrigTerm, Wave};

fn main() -> nilforms::Result<()> {
    let f = TrigPoly::new(1, vec![TrigTerm::new(0.5, Wave::Sin, vec![1])])?;
    let metric = CoordMetric3::new(f)?;
    let (rows, _) = bk_convergence(&metric, &[16, 32, 64])?;
    println!("{:>5} {:>10} {:>10} {:>10} {:>10}", "res", "|d*dx|", "|d*dy|", "min", "max");
    for r in rows {
        println!(
            "{:>5} {:>10.2e} {:>10.2e} {:>10.6} {:>10.6}",
            r.res, r.dstar_dx_max, r.dstar_dy_max, r.inner_min, r.inner_max
        );
    }
    Ok(())
}
