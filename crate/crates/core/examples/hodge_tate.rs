//! The big period of the Hodge–Tate structure with period matrix [1; x 1; z y 1], its
//! projections, the extension class and ½ log B.

use num_complex::Complex64;

use deligne::form_calculus::is_zero;
use deligne::hodge_tate::{
    big_period, extension_class, half_log_b, mult_map, project_r1, q_invariance_check, unique_lift, PeriodData,
};

fn main() -> deligne::Result<()> {
    let p = PeriodData::symbolic();
    let bp = big_period(&p)?;
    println!("P = {}", bp);
    println!("m(P) = 0: {}", is_zero(&mult_map(&bp)));
    println!("R(1) projection: {}", project_r1(&bp));
    println!("extension class: {}", extension_class(&p).tensor);
    println!("lift: {}", unique_lift(&p)?);
    println!("{:?}", q_invariance_check(20, 0, 1e-9)?);
    let b = half_log_b(Complex64::new(0.2, 1.0), Complex64::new(-0.5, 0.3), Complex64::new(1.0, 2.0));
    println!("I + ½ log B = {}", b);
    Ok(())
}
