use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::scalar::GaussianRational;

/// Dense univariate polynomial over Q(i), coefficients from low to high degree.
///
/// The coefficient vector is trimmed, so the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<GaussianRational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<GaussianRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial z.
    pub fn z() -> Self {
        Self::new(vec![GaussianRational::zero(), GaussianRational::one()])
    }

    /// z − p.
    pub fn linear_root(p: &GaussianRational) -> Self {
        Self::new(vec![-p, GaussianRational::one()])
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&GaussianRational> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let zero = GaussianRational::zero();
        let v = (0..n)
            .map(|k| self.coeffs.get(k).unwrap_or(&zero) + o.coeffs.get(k).unwrap_or(&zero))
            .collect();
        Poly::new(v)
    }

    pub fn neg(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![GaussianRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (a, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in o.coeffs.iter().enumerate() {
                v[a + b] = &v[a + b] + &(ca * cb);
            }
        }
        Poly::new(v)
    }

    pub fn scale(&self, c: &GaussianRational) -> Poly {
        Poly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Euclidean division; panics if `d` is zero.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let dl = d.leading().expect("polynomial division by zero");
        let dl_inv = dl.inv().expect("nonzero leading coefficient");
        let dd = d.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![GaussianRational::zero(); rem.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &rem[k + dd] * &dl_inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k + j] = &rem[k + j] - &(&c * dc);
                }
            }
            q[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(q), Poly::new(rem))
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => self.scale(&l.inv().expect("nonzero leading coefficient")),
        }
    }

    /// Monic greatest common divisor; gcd(0, 0) = 0.
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &GaussianRational::from_int(k as i64))
                .collect(),
        )
    }

    /// Exact Horner evaluation.
    pub fn eval_exact(&self, w: &GaussianRational) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * w) + c;
        }
        acc
    }

    pub fn to_c64(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(|c| c.to_c64()).collect()
    }

    /// Coefficient-wise complex conjugate.
    pub fn conj(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// Distinct numeric roots: eigenvalues of the companion matrix of the exact
    /// square-free part, with the root at 0 split off first.
    pub fn roots(&self) -> Vec<Complex64> {
        let Some(d) = self.degree() else {
            return Vec::new();
        };
        if d == 0 {
            return Vec::new();
        }
        let sf = self.divrem(&self.gcd(&self.derivative())).0;
        let low = sf.coeffs.iter().take_while(|c| c.is_zero()).count();
        let mut out = if low > 0 { vec![Complex64::new(0.0, 0.0)] } else { Vec::new() };
        let rest = Poly::new(sf.coeffs[low..].to_vec());
        let n = rest.degree().unwrap_or(0);
        if n == 0 {
            return out;
        }
        let c = rest.monic().to_c64();
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for k in 1..n {
            m[(k, k - 1)] = Complex64::new(1.0, 0.0);
        }
        for k in 0..n {
            m[(k, n - 1)] = -c[k];
        }
        if let Some(e) = m.try_schur(1e-14, 10_000).and_then(|s| s.eigenvalues()) {
            out.extend(e.iter().copied());
        }
        out
    }
}

/// Horner evaluation of low→high coefficients.
pub fn horner(coeffs: &[Complex64], w: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + c)
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match k {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{}", k),
            };
            let cs = c.to_string();
            let (neg, body) = match cs.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, cs),
            };
            let term = if mono.is_empty() {
                body
            } else if body == "1" {
                mono
            } else {
                format!("{}*{}", body, mono)
            };
            match (first, neg) {
                (true, true) => write!(f, "-{}", term)?,
                (true, false) => write!(f, "{}", term)?,
                (false, true) => write!(f, "-{}", term)?,
                (false, false) => write!(f, "+{}", term)?,
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    #[test]
    fn divrem_reconstructs() {
        let a = Poly::new(vec![g(1), g(0), g(3), g(2)]);
        let b = Poly::new(vec![g(-1), g(1)]);
        let (q, r) = a.divrem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree().unwrap_or(0) < 1);
    }

    #[test]
    fn gcd_of_shared_factor() {
        let x1 = Poly::linear_root(&g(1));
        let x2 = Poly::linear_root(&g(2));
        let x3 = Poly::linear_root(&g(3));
        assert_eq!(x1.mul(&x2).gcd(&x1.mul(&x3)), x1);
    }

    #[test]
    fn roots_of_quadratic() {
        let p = Poly::linear_root(&g(2)).mul(&Poly::linear_root(&GaussianRational::i()));
        let mut r = p.roots();
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((r[0] - Complex64::new(0.0, 1.0)).norm() < 1e-10);
        assert!((r[1] - Complex64::new(2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn roots_of_repeated_factors() {
        let p = Poly::z().pow(4).mul(&Poly::linear_root(&g(1)).pow(3));
        let mut r = p.roots();
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert_eq!(r.len(), 2);
        assert!(r[0].norm() < 1e-12);
        assert!((r[1] - Complex64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn display_orders_high_to_low() {
        let p = Poly::new(vec![g(-1), g(0), GaussianRational::from_parts((1, 2), (-3, 1))]);
        assert_eq!(p.to_string(), "(1/2-3*i)*z^2-1");
    }
}
