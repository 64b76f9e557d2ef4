//! Wedge, interior product, Hodge star and the induced inner product on forms.

use nalgebra::DMatrix;
use nilforms::exterior::{form_inner, hodge_star, interior, wedge, ExtForm, InnerProduct, Orientation};

fn main() -> nilforms::Result<()> {
    let e1 = ExtForm::one_form(&[1.0, 0.0, 0.0]);
    let e2 = ExtForm::one_form(&[0.0, 1.0, 0.0]);
    let e12 = wedge(&e1, &e2)?;
    println!("e1 ∧ e2          = {:?}", e12.coeffs());
    println!("e1 ⌟ (e1 ∧ e2)   = {:?}", interior(&[1.0, 0.0, 0.0], &e12)?.coeffs());

    let g = InnerProduct::identity(3);
    println!("*e1              = {:?}", hodge_star(&e1, &g, Orientation::Positive)?.coeffs());

    // A skewed plane metric: <dx, dy> = -f / (1 - f²).
    let f = 0.5;
    let s = InnerProduct::new(DMatrix::from_row_slice(2, 2, &[1.0, f, f, 1.0]))?;
    let (dx, dy) = (ExtForm::one_form(&[1.0, 0.0]), ExtForm::one_form(&[0.0, 1.0]));
    println!("<dx, dy>_s       = {:.6}  (closed form {:.6})", form_inner(&dx, &dy, &s)?, -f / (1.0 - f * f));
    Ok(())
}
