//! Symbolic differential forms: d, ∂, ∂̄, d^c and the projections π₀, π₁.

use num_complex::Complex64;

use deligne::exact_algebra::parse_rational;
use deligne::form_calculus::{Expr, Form};

fn main() -> deligne::Result<()> {
    let f = parse_rational("z^2+1")?;
    // log|f|² is real, so d^c of it is imaginary
    let u = Form::function(Expr::log_abs(&f).scale(deligne::exact_algebra::Scalar::int(2)));
    let w = Complex64::new(0.8, 0.3);
    println!("d log|f|^2 at w      = {:?}", u.d()?.eval(w)?);
    println!("d^c log|f|^2 at w    = {:?}", u.dc()?.eval(w)?);
    println!("d d^c log|f|^2 at w  = {:?}", u.dc()?.d()?.eval(w)?);
    let x = Form::one_form(Expr::rat(&f), Expr::zero());
    println!("pi_0 + pi_1 - id     = {:?}", x.pi(0).add(&x.pi(1))?.sub(&x)?.eval(w)?);
    println!("d d (z^2+1)          = {:?}", Form::function(Expr::rat(&f)).d()?.d()?.eval(w)?);
    Ok(())
}
