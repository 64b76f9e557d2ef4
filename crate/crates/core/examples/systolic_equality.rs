//! The systolic ratio `λ₁(L)·λ₁(L*)` of a few base lattices against the
//! numerically located dual-critical optimum.

use nilforms::systole::{dual_critical_optimum, systolic_report, Lattice};

fn main() -> nilforms::Result<()> {
    for rank in 2..=4 {
        println!("rank {rank}: dual-critical optimum ≈ {:.9}", dual_critical_optimum(rank)?);
    }
    let lattices = [
        ("square", Lattice::integer(2)),
        ("hexagonal", Lattice::hexagonal()),
        ("hexagonal x3", Lattice::hexagonal().scaled(3.0)),
        ("skew", Lattice::from_columns(&[vec![1.0, 0.0], vec![0.3, 1.7]])?),
    ];
    for (name, l) in lattices {
        let r = systolic_report(&l, 2.0, 1e-6)?;
        println!("{name:>13}: ratio {:.12}, equality {}", r.ratio, r.equality_flag);
    }
    Ok(())
}
