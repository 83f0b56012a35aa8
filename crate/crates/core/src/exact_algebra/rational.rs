use std::fmt;
use std::hash::{Hash, Hasher};

use num_complex::Complex64;

use super::poly::{horner, Poly};
use super::scalar::GaussianRational;
use super::DEGREE_CAP;
use crate::error::{Error, Result};

/// Numeric pole tolerance for [`RationalFunction::eval`].
pub const POLE_TOL: f64 = 1e-12;

/// A reduced quotient of polynomials over Q(i) with monic denominator.
#[derive(Clone)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
    num_c: Vec<Complex64>,
    den_c: Vec<Complex64>,
}

impl PartialEq for RationalFunction {
    fn eq(&self, o: &Self) -> bool {
        self.num == o.num && self.den == o.den
    }
}

impl Eq for RationalFunction {}

impl Hash for RationalFunction {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl RationalFunction {
    /// Reduce `num/den` to lowest terms with monic denominator.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (num, den) = if num.is_zero() {
            (Poly::zero(), Poly::one())
        } else {
            let g = num.gcd(&den);
            let (n, _) = num.divrem(&g);
            let (d, _) = den.divrem(&g);
            let lead = d.leading().cloned().expect("nonzero denominator");
            let inv = lead.inv().expect("nonzero leading coefficient");
            (n.scale(&inv), d.scale(&inv))
        };
        for p in [&num, &den] {
            if let Some(k) = p.degree() {
                if k > DEGREE_CAP {
                    return Err(Error::DegreeCap(k));
                }
            }
        }
        let num_c = num.to_c64();
        let den_c = den.to_c64();
        Ok(RationalFunction { num, den, num_c, den_c })
    }

    pub fn from_poly(p: Poly) -> Result<Self> {
        Self::new(p, Poly::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::new(Poly::constant(c), Poly::one()).expect("constants are valid")
    }

    pub fn int(n: i64) -> Self {
        Self::constant(GaussianRational::from_int(n))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn z() -> Self {
        Self::from_poly(Poly::z()).expect("z is valid")
    }

    /// z − p.
    pub fn z_minus(p: &GaussianRational) -> Self {
        Self::from_poly(Poly::linear_root(p)).expect("linear polynomials are valid")
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// The constant value, when the function is constant.
    pub fn as_constant(&self) -> Option<GaussianRational> {
        if !self.is_constant() {
            return None;
        }
        Some(self.num.coeffs().first().cloned().unwrap_or_else(GaussianRational::zero))
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        Self::new(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.num.neg(), self.den.clone()).expect("negation preserves validity")
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::new(self.num.mul(&o.den), self.den.mul(&o.num))
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        Self::new(self.num.scale(c), self.den.clone()).expect("scaling preserves validity")
    }

    pub fn inv(&self) -> Result<Self> {
        Self::one().div(self)
    }

    pub fn pow(&self, k: i32) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let e = k.unsigned_abs();
        if e as usize * base.num.degree().unwrap_or(0).max(base.den.degree().unwrap_or(0))
            > DEGREE_CAP
        {
            let d = e as usize * base.num.degree().unwrap_or(0).max(base.den.degree().unwrap_or(0));
            return Err(Error::DegreeCap(d));
        }
        Self::new(base.num.pow(e), base.den.pow(e))
    }

    /// Coefficient-wise conjugate, so that conj(R)(conj w) = conj(R(w)).
    pub fn conj_coeffs(&self) -> Self {
        Self::new(self.num.conj(), self.den.conj()).expect("conjugation preserves validity")
    }

    /// Quotient-rule derivative in lowest terms.
    pub fn derivative(&self) -> Result<Self> {
        let n = self
            .num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()));
        Self::new(n, self.den.mul(&self.den))
    }

    /// f′/f.
    pub fn log_derivative(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        self.derivative()?.div(self)
    }

    /// Horner evaluation with the pole guard.
    pub fn eval(&self, w: Complex64) -> Result<Complex64> {
        let d = horner(&self.den_c, w);
        if d.norm() < POLE_TOL {
            return Err(Error::PoleAtPoint(d.norm()));
        }
        Ok(horner(&self.num_c, w) / d)
    }

    pub fn eval_exact(&self, w: &GaussianRational) -> Result<GaussianRational> {
        let d = self.den.eval_exact(w);
        if d.is_zero() {
            return Err(Error::PoleAtPoint(0.0));
        }
        Ok(&self.num.eval_exact(w) / &d)
    }

    /// Order of vanishing at `p`, negative at poles.
    pub fn valuation(&self, p: &GaussianRational) -> Result<i32> {
        Ok(self.split_at(p)?.0)
    }

    /// Write the function as (z − p)^v · u with u regular and nonzero at p.
    pub fn split_at(&self, p: &GaussianRational) -> Result<(i32, Poly, Poly)> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        let lin = Poly::linear_root(p);
        let strip = |poly: &Poly| -> (i32, Poly) {
            let mut k = 0;
            let mut cur = poly.clone();
            loop {
                let (q, r) = cur.divrem(&lin);
                if !r.is_zero() {
                    return (k, cur);
                }
                cur = q;
                k += 1;
            }
        };
        let (a, n) = strip(&self.num);
        let (b, d) = strip(&self.den);
        Ok((a - b, n, d))
    }

    /// Value of the unit part u at p.
    pub fn leading_unit(&self, p: &GaussianRational) -> Result<GaussianRational> {
        let (_, n, d) = self.split_at(p)?;
        let nv = n.eval_exact(p);
        let dv = d.eval_exact(p);
        if nv.is_zero() || dv.is_zero() {
            return Err(Error::IndeterminateSymbol);
        }
        Ok(&nv / &dv)
    }

    /// Numeric zeros and poles.
    pub fn zeros(&self) -> Vec<Complex64> {
        self.num.roots()
    }

    pub fn poles(&self) -> Vec<Complex64> {
        self.den.roots()
    }

    pub fn singularities(&self) -> Vec<Complex64> {
        let mut v = self.zeros();
        v.extend(self.poles());
        v
    }
}

/// The classical tame symbol (−1)^{v(f)v(g)} (f^{v(g)} / g^{v(f)})(p), computed exactly.
pub fn tame_symbol_value(
    f: &RationalFunction,
    g: &RationalFunction,
    p: &GaussianRational,
) -> Result<GaussianRational> {
    let vf = f.valuation(p)?;
    let vg = g.valuation(p)?;
    let uf = f.leading_unit(p)?;
    let ug = g.leading_unit(p)?;
    // The (z − p) powers cancel in f^{v(g)} / g^{v(f)}, leaving the unit parts.
    let num = uf.pow(vg).ok_or(Error::IndeterminateSymbol)?;
    let den = ug.pow(vf).ok_or(Error::IndeterminateSymbol)?;
    if den.is_zero() || num.is_zero() {
        return Err(Error::IndeterminateSymbol);
    }
    let val = &num / &den;
    if (vf as i64 * vg as i64).rem_euclid(2) == 1 {
        Ok(-val)
    } else {
        Ok(val)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}
