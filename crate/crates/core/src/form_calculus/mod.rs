//! Expressions for smooth functions built from rational functions, log branches and
//! conjugation, and differential forms over them with exact structural d, ∂, ∂̄, d^c.

mod canon;
mod expr;
mod form;
mod parse;

pub use canon::{is_zero, scalar_terms, simplify};
pub use expr::{Env, Expr};
pub use form::Form;
pub use parse::parse_expr;

use num_complex::Complex64;

use crate::error::Result;

/// Central-difference (∂/∂z, ∂/∂z̄) of a numeric function, used as a test oracle.
pub fn finite_difference(
    f: impl Fn(Complex64) -> Result<Complex64>,
    w: Complex64,
    h: f64,
) -> Result<(Complex64, Complex64)> {
    let dx = (f(w + h)? - f(w - h)?) / (2.0 * h);
    let i = Complex64::new(0.0, 1.0);
    let dy = (f(w + i * h)? - f(w - i * h)?) / (2.0 * h);
    Ok(((dx - i * dy) * 0.5, (dx + i * dy) * 0.5))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::cover_nerve::{assign_branches, Simplex, SectorCover};
    use crate::exact_algebra::{parse_rational, GaussianRational, Scalar};

    fn cover() -> Arc<SectorCover> {
        Arc::new(SectorCover::new(GaussianRational::zero(), 0.5, 1.5, 3, 4.5).unwrap())
    }

    fn rf(s: &str) -> crate::exact_algebra::RationalFunction {
        parse_rational(s).unwrap()
    }

    #[test]
    fn d_of_log_and_conj() {
        let c = cover();
        let lz = assign_branches(&rf("z"), &c).unwrap();
        let d = Form::function(Expr::log(&lz, 0)).d().unwrap().simplify();
        assert_eq!(d, Form::one_form(Expr::rat(&rf("1/z")), Expr::zero()));
        let d = Form::function(Expr::rat(&rf("z")).conj()).d().unwrap().simplify();
        assert_eq!(d, Form::one_form(Expr::zero(), Expr::one()));
    }

    #[test]
    fn leibniz_against_finite_differences() {
        let c = cover();
        let lf = assign_branches(&rf("z"), &c).unwrap();
        let lg = assign_branches(&rf("z-3"), &c).unwrap();
        let e = Expr::log(&lf, 1) * Expr::log(&lg, 1);
        let d = Form::function(e.clone()).d().unwrap();
        for w in c.sample_points(&Simplex(vec![1]), 20, 3).unwrap() {
            let (fz, fzb) = finite_difference(|u| e.eval(u), w, 1e-5).unwrap();
            let v = d.eval(w).unwrap();
            assert!((v[0] - fz).norm() < 1e-6 * (1.0 + fz.norm()));
            assert!((v[1] - fzb).norm() < 1e-6);
        }
    }

    #[test]
    fn projections() {
        let two = Form::function(Expr::int(2));
        assert_eq!(two.pi(0).simplify(), two);
        let t = Form::function(Expr::two_pi_i(1));
        assert_eq!(t.pi(1).simplify(), t);
        let c = cover();
        let lf = assign_branches(&rf("z-3"), &c).unwrap();
        let p0 = Form::function(Expr::log(&lf, 0)).pi(0);
        for w in c.sample_points(&Simplex(vec![0]), 20, 5).unwrap() {
            let v = p0.eval(w).unwrap()[0];
            assert!((v.re - (w - 3.0).norm().ln()).abs() < 1e-10 && v.im.abs() < 1e-12);
        }
    }

    #[test]
    fn dc_and_wedge() {
        let r = Form::function(Expr::rat(&rf("z^2+1")));
        assert_eq!(r.dc().unwrap().simplify(), Form::one_form(Expr::rat(&rf("2*z")), Expr::zero()).simplify());
        let dz = Form::one_form(Expr::one(), Expr::zero());
        assert!(dz.wedge(&dz).unwrap().is_zero());
        let c = cover();
        let lf = assign_branches(&rf("z"), &c).unwrap();
        let l = Expr::log(&lf, 2);
        let f = Form::function(l.clone() * l.conj());
        let lhs = f.delbar().unwrap().del().unwrap().scale(&Expr::int(2));
        let rhs = f.d().unwrap().dc().unwrap();
        for w in c.sample_points(&Simplex(vec![2]), 20, 9).unwrap() {
            let a = lhs.eval(w).unwrap()[0];
            let b = rhs.eval(w).unwrap()[0];
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn eval_examples() {
        assert_eq!(Expr::one().eval(Complex64::new(0.3, 0.1)).unwrap(), Complex64::new(1.0, 0.0));
        let c = cover();
        let lz = assign_branches(&rf("z"), &c).unwrap();
        let d = Form::function(Expr::log(&lz, 0)).d().unwrap();
        assert!((d.eval(Complex64::new(1.2, 0.0)).unwrap()[0] - 1.0 / 1.2).norm() < 1e-15);
        let arg = Expr::log(&lz, 0).pi(1).scale(Scalar::two_pi_i(-1));
        assert!(arg.eval(Complex64::new(1.0, 0.0)).unwrap().norm() < 1e-15);
        let lz2 = assign_branches(&rf("z"), &Arc::new(SectorCover::new(GaussianRational::zero(), 1.0, 3.0, 3, 4.5).unwrap())).unwrap();
        let d2 = Form::function(Expr::log(&lz2, 0)).d().unwrap();
        assert!((d2.eval(Complex64::new(2.0, 0.0)).unwrap()[0] - 0.5).norm() < 1e-15);
    }

    #[test]
    fn text_round_trip() {
        let c = cover();
        let lf = assign_branches(&rf("z-3"), &c).unwrap();
        let e = Expr::branch_int(&lf, 0, 2) * Expr::log(&lf, 1).conj()
            + Expr::log_abs(&rf("z^2+i")).pow(-2)
            + Expr::scalar(Scalar::new(GaussianRational::from_parts((1, 2), (-3, 1)), 2))
            + Expr::var("x");
        let back = parse_expr(&e.to_string(), &[lf.clone()]).unwrap();
        assert_eq!(back, e);
        assert!(parse_expr("log(z, 0)", &[lf]).is_err());
        assert!(parse_expr("nope(1)", &[]).is_err());
    }
}
