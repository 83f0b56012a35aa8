use num_complex::Complex64;

use super::canon::{is_zero, simplify};
use super::expr::{Env, Expr};
use crate::error::{Error, Result};

/// A form of total degree 0, 1 or 2 on a domain in C.
///
/// Coefficients are stored against the monomials 1; dz, dz̄; dz∧dz̄.
#[derive(Clone, Debug, PartialEq)]
pub struct Form {
    degree: u8,
    coeffs: Vec<Expr>,
}

impl Form {
    pub fn zero(degree: u8) -> Form {
        Form { degree, coeffs: vec![Expr::zero(); Self::width(degree)] }
    }

    fn width(degree: u8) -> usize {
        if degree == 1 {
            2
        } else {
            1
        }
    }

    pub fn function(f: Expr) -> Form {
        Form { degree: 0, coeffs: vec![f] }
    }

    /// a dz + b dz̄.
    pub fn one_form(a: Expr, b: Expr) -> Form {
        Form { degree: 1, coeffs: vec![a, b] }
    }

    /// c dz∧dz̄.
    pub fn two_form(c: Expr) -> Form {
        Form { degree: 2, coeffs: vec![c] }
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn coeffs(&self) -> &[Expr] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Expr {
        &self.coeffs[k]
    }

    fn check(&self, o: &Form) -> Result<()> {
        if self.degree != o.degree {
            return Err(Error::SlotMismatch(format!("degree {} vs {}", self.degree, o.degree)));
        }
        Ok(())
    }

    pub fn add(&self, o: &Form) -> Result<Form> {
        self.check(o)?;
        Ok(Form {
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.clone() + b.clone()).collect(),
        })
    }

    pub fn sub(&self, o: &Form) -> Result<Form> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Form {
        self.map(|e| -e.clone())
    }

    /// Multiply by a function.
    pub fn scale(&self, f: &Expr) -> Form {
        self.map(|e| f.clone() * e.clone())
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Form {
        Form { degree: self.degree, coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn simplify(&self) -> Form {
        self.map(simplify)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(is_zero)
    }

    /// Exterior derivative.
    pub fn d(&self) -> Result<Form> {
        let (dz, dzb) = self.split_d()?;
        match self.degree {
            0 => Ok(Form::one_form(dz.coeffs[0].clone(), dzb.coeffs[1].clone())),
            _ => Ok(Form::two_form(dz.coeffs[0].clone() + dzb.coeffs[0].clone())),
        }
    }

    /// ∂ and ∂̄ of the form, each of degree one higher.
    fn split_d(&self) -> Result<(Form, Form)> {
        match self.degree {
            0 => {
                let (a, b) = self.coeffs[0].d()?;
                Ok((Form::one_form(a, Expr::zero()), Form::one_form(Expr::zero(), b)))
            }
            1 => {
                // ∂(a dz + b dz̄) = ∂_z b dz∧dz̄, ∂̄(a dz + b dz̄) = −∂_z̄ a dz∧dz̄.
                let (_, a_zb) = self.coeffs[0].d()?;
                let (b_z, _) = self.coeffs[1].d()?;
                Ok((Form::two_form(b_z), Form::two_form(-a_zb)))
            }
            _ => Err(Error::DegreeOverflow),
        }
    }

    pub fn del(&self) -> Result<Form> {
        Ok(self.split_d()?.0)
    }

    pub fn delbar(&self) -> Result<Form> {
        Ok(self.split_d()?.1)
    }

    /// d^c = ∂ − ∂̄.
    pub fn dc(&self) -> Result<Form> {
        let (a, b) = self.split_d()?;
        a.sub(&b)
    }

    pub fn conj(&self) -> Form {
        match self.degree {
            0 => Form::function(self.coeffs[0].conj()),
            1 => Form::one_form(self.coeffs[1].conj(), self.coeffs[0].conj()),
            _ => Form::two_form(-self.coeffs[0].conj()),
        }
    }

    /// π_p = ½(F + (−1)^p F̄).
    pub fn pi(&self, p: u32) -> Form {
        let c = self.conj();
        let c = if p % 2 == 0 { c } else { c.neg() };
        self.add(&c).expect("same degree").scale(&Expr::ratio(1, 2))
    }

    pub fn wedge(&self, o: &Form) -> Result<Form> {
        match (self.degree, o.degree) {
            (0, _) => Ok(o.scale(&self.coeffs[0])),
            (_, 0) => Ok(self.scale(&o.coeffs[0])),
            (1, 1) => {
                let (a, b) = (&self.coeffs[0], &self.coeffs[1]);
                let (c, e) = (&o.coeffs[0], &o.coeffs[1]);
                Ok(Form::two_form(a.clone() * e.clone() - b.clone() * c.clone()))
            }
            _ => Err(Error::DegreeOverflow),
        }
    }

    pub fn eval(&self, w: Complex64) -> Result<Vec<Complex64>> {
        self.eval_env(w, &[])
    }

    pub fn eval_env(&self, w: Complex64, env: Env) -> Result<Vec<Complex64>> {
        self.coeffs.iter().map(|e| e.eval_env(w, env)).collect()
    }

    /// Largest coefficient modulus at w.
    pub fn max_abs(&self, w: Complex64) -> Result<f64> {
        Ok(self.eval(w)?.iter().map(|c| c.norm()).fold(0.0, f64::max))
    }

    /// Pull back a 1-form along a curve point with tangent z′: a z′ + b conj(z′).
    pub fn pullback_1(&self, w: Complex64, tangent: Complex64) -> Result<Complex64> {
        if self.degree != 1 {
            return Err(Error::SlotMismatch("pullback along a curve needs a 1-form".into()));
        }
        let v = self.eval(w)?;
        Ok(v[0] * tangent + v[1] * tangent.conj())
    }
}

impl std::fmt::Display for Form {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.degree {
            0 => write!(f, "{}", self.coeffs[0]),
            1 => write!(f, "{} dz + {} dzbar", self.coeffs[0], self.coeffs[1]),
            _ => write!(f, "{} dz^dzbar", self.coeffs[0]),
        }
    }
}
