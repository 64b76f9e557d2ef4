//! Σ_i e_i ⌟ (∇_i β + e_i ∧ d*β) = (N − 2) d*β on flat tori: second-order
//! convergence on T⁴ and the degenerate case on T², where the left side
//! vanishes for every β.

use nilforms::bundlenum::identity::{contraction_identity_check, convergence};
use nilforms::bundlenum::TrigForm;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> nilforms::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (n, levels) in [(4, vec![8, 16, 32]), (3, vec![16, 32, 64]), (2, vec![16, 32, 64])] {
        let beta = TrigForm::random(n, 2, 2, &mut rng);
        let t = std::time::Instant::now();
        let (rows, table) = convergence(n, &levels, |g| contraction_identity_check(&beta, g))?;
        println!("T^{n}  ({:.2?})", t.elapsed());
        for (row, conv) in rows.iter().zip(&table.rows) {
            println!(
                "  res {:>3}  |lhs| {:>10.3e}  |rhs| {:>10.3e}  residual {:>10.3e}  order {}",
                row.res,
                row.lhs_max,
                row.rhs_max,
                row.residual,
                conv.order.map_or("-".into(), |o| format!("{o:.3}"))
            );
        }
    }
    Ok(())
}
