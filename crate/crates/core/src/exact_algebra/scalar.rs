use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// The constant 2πi as a complex double.
pub const TWO_PI_I: Complex64 = Complex64::new(0.0, 2.0 * PI);

/// (2πi)^j for any integer j.
pub fn two_pi_i_pow(j: i32) -> Complex64 {
    TWO_PI_I.powi(j)
}

/// An element re + im·i of Q(i), always stored in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::new(BigRational::from_integer(n), BigRational::zero())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    pub fn from_parts(re: (i64, i64), im: (i64, i64)) -> Self {
        Self::new(
            BigRational::new(BigInt::from(re.0), BigInt::from(re.1)),
            BigRational::new(BigInt::from(im.0), BigInt::from(im.1)),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_imaginary(&self) -> bool {
        self.re.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn pow(&self, k: i32) -> Option<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        Some(acc)
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Integer value if this is a real integer.
    pub fn to_integer(&self) -> Option<BigInt> {
        if self.im.is_zero() && self.re.is_integer() {
            Some(self.re.to_integer())
        } else {
            None
        }
    }

    /// Numerically nearest element with denominators bounded by `max_den`.
    pub fn approximate(w: Complex64, max_den: i64) -> Self {
        fn approx(x: f64, max_den: i64) -> BigRational {
            let mut best = (x.round() as i64, 1i64);
            let mut best_err = (x - best.0 as f64).abs();
            for d in 2..=max_den {
                let n = (x * d as f64).round() as i64;
                let err = (x - n as f64 / d as f64).abs();
                if err < best_err - 1e-15 {
                    best = (n, d);
                    best_err = err;
                }
            }
            BigRational::new(BigInt::from(best.0), BigInt::from(best.1))
        }
        Self::new(approx(w.re, max_den), approx(w.im, max_den))
    }

    fn cmp_key(&self) -> (&BigRational, &BigRational) {
        (&self.re, &self.im)
    }
}

impl PartialOrd for GaussianRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GaussianRational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_key().cmp(&other.cmp_key())
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl<'a> Div<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    /// Panics on division by zero; use [`GaussianRational::inv`] to check first.
    fn div(self, o: &GaussianRational) -> GaussianRational {
        self * &o.inv().expect("division by zero in Q(i)")
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, o: GaussianRational) -> GaussianRational {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for GaussianRational {
    /// Canonical text accepted back by the expression parser.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re = &self.re;
        let im = &self.im;
        if im.is_zero() {
            return write!(f, "{}", fmt_rational(re));
        }
        let im_part = if im.is_one() {
            "i".to_string()
        } else if (-im.clone()).is_one() {
            "-i".to_string()
        } else {
            format!("{}*i", fmt_rational(im))
        };
        if re.is_zero() {
            write!(f, "{}", im_part)
        } else if im.is_positive() {
            write!(f, "({}+{})", fmt_rational(re), im_part)
        } else {
            write!(f, "({}{})", fmt_rational(re), im_part)
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// An integer multiple of (2πi)^twist, the elements of Z(j).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct TwistedInteger {
    pub n: i64,
    pub twist: u32,
}

impl TwistedInteger {
    pub fn new(n: i64, twist: u32) -> Self {
        TwistedInteger { n, twist }
    }

    pub fn value(&self) -> Complex64 {
        two_pi_i_pow(self.twist as i32) * self.n as f64
    }

    /// Product in Z(j)⊗Z(k) → Z(j+k).
    pub fn mul(&self, o: &TwistedInteger) -> TwistedInteger {
        TwistedInteger::new(self.n * o.n, self.twist + o.twist)
    }

    pub fn to_scalar(&self) -> Scalar {
        Scalar::new(GaussianRational::from_int(self.n), self.twist as i32)
    }
}

impl fmt::Display for TwistedInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.twist {
            0 => write!(f, "{}", self.n),
            1 => write!(f, "{}*(2πi)", self.n),
            t => write!(f, "{}*(2πi)^{}", self.n, t),
        }
    }
}

/// A Gaussian rational times an integral power of 2πi.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar {
    pub c: GaussianRational,
    pub twist: i32,
}

impl Scalar {
    pub fn new(c: GaussianRational, twist: i32) -> Self {
        if c.is_zero() {
            return Scalar { c, twist: 0 };
        }
        Scalar { c, twist }
    }

    pub fn zero() -> Self {
        Scalar::new(GaussianRational::zero(), 0)
    }

    pub fn one() -> Self {
        Scalar::new(GaussianRational::one(), 0)
    }

    pub fn int(n: i64) -> Self {
        Scalar::new(GaussianRational::from_int(n), 0)
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::new(GaussianRational::from_ratio(n, d), 0)
    }

    pub fn i() -> Self {
        Scalar::new(GaussianRational::i(), 0)
    }

    /// (2πi)^j.
    pub fn two_pi_i(j: i32) -> Self {
        Scalar::new(GaussianRational::one(), j)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.twist == 0 && self.c.is_one()
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        Scalar::new(&self.c * &o.c, self.twist + o.twist)
    }

    pub fn neg(&self) -> Scalar {
        Scalar::new(-&self.c, self.twist)
    }

    pub fn inv(&self) -> Option<Scalar> {
        Some(Scalar::new(self.c.inv()?, -self.twist))
    }

    pub fn pow(&self, k: i32) -> Option<Scalar> {
        Some(Scalar::new(self.c.pow(k)?, self.twist * k))
    }

    /// Complex conjugate: conj((2πi)^j) = (−1)^j (2πi)^j.
    pub fn conj(&self) -> Scalar {
        let c = self.c.conj();
        if self.twist.rem_euclid(2) == 1 {
            Scalar::new(-c, self.twist)
        } else {
            Scalar::new(c, self.twist)
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        self.c.to_c64() * two_pi_i_pow(self.twist)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.twist {
            0 => write!(f, "{}", self.c),
            1 => write!(f, "{}*(2πi)", self.c),
            t => write!(f, "{}*(2πi)^{}", self.c, t),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_and_equality() {
        let a = GaussianRational::from_parts((2, 4), (3, 9));
        let b = GaussianRational::from_parts((1, 2), (1, 3));
        assert_eq!(a, b);
    }

    #[test]
    fn inverse_of_one_plus_i() {
        let a = GaussianRational::from_parts((1, 1), (1, 1));
        let inv = a.inv().unwrap();
        assert_eq!(inv, GaussianRational::from_parts((1, 2), (-1, 2)));
        assert!((&a * &inv).is_one());
    }

    #[test]
    fn conj_of_twist_flips_odd_powers() {
        let s = Scalar::two_pi_i(1);
        assert_eq!(s.conj(), Scalar::two_pi_i(1).neg());
        assert_eq!(Scalar::two_pi_i(2).conj(), Scalar::two_pi_i(2));
        let v = s.conj().to_c64();
        assert!((v - s.to_c64().conj()).norm() < 1e-15);
    }

    #[test]
    fn twisted_product() {
        let a = TwistedInteger::new(3, 1);
        let b = TwistedInteger::new(-2, 1);
        assert_eq!(a.mul(&b), TwistedInteger::new(-6, 2));
        assert!((a.mul(&b).value() - a.value() * b.value()).norm() < 1e-9);
    }

    #[test]
    fn display_forms() {
        assert_eq!(GaussianRational::from_ratio(-3, 4).to_string(), "-3/4");
        assert_eq!(GaussianRational::i().to_string(), "i");
        assert_eq!(GaussianRational::from_parts((1, 2), (-1, 1)).to_string(), "(1/2-i)");
    }
}
