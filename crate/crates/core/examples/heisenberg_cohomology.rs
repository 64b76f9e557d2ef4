//! Betti numbers, harmonic 1-forms and the classification gate for a few
//! 2-step algebras.

use nilforms::nilalgebra::{MetricLieAlgebra, StructureConstant};

fn main() -> nilforms::Result<()> {
    let h5 = MetricLieAlgebra::new(
        4,
        1,
        &[StructureConstant::new(0, 1, 0, 1.0), StructureConstant::new(2, 3, 0, 1.0)],
        None,
    )?;
    let free = MetricLieAlgebra::new(
        3,
        3,
        &[
            StructureConstant::new(0, 1, 0, 1.0),
            StructureConstant::new(0, 2, 1, 1.0),
            StructureConstant::new(1, 2, 2, 1.0),
        ],
        None,
    )?;
    for (name, alg) in [
        ("heisenberg 3", MetricLieAlgebra::heisenberg(1.0)),
        ("heisenberg 5", h5),
        ("free 2-step on 3", free),
        ("abelian 4", MetricLieAlgebra::abelian(4)),
    ] {
        let gate = alg.classification_gate();
        println!("{name:>17}: betti {:?}, gate {:?}", alg.betti_numbers(), gate.class);
    }

    let alg = MetricLieAlgebra::heisenberg(2.0);
    for form in alg.harmonic_space(1).basis {
        println!("harmonic 1-form {:?}", form.coeffs());
    }
    Ok(())
}
