use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use crate::cover_nerve::{round_guarded, LogBranches};
use crate::error::{Error, Result};
use crate::exact_algebra::{GaussianRational, RationalFunction, Scalar};

/// Numeric bindings for formal variables.
pub type Env<'a> = &'a [(&'a str, Complex64)];

/// Smooth functions generated by rational functions, log branches, and conjugation.
#[derive(Clone)]
pub enum Expr {
    /// c·(2πi)^j.
    Const(Scalar),
    /// A formal indeterminate, evaluated only through an environment.
    Var(String),
    Rat(Arc<RationalFunction>),
    /// log_k f for the registered branches of f.
    Log(Arc<LogBranches>, usize),
    /// log|f|, single valued.
    LogAbs(Arc<RationalFunction>),
    /// The locally constant integer e/2πi, rounded under the branch guard.
    Int(Box<Expr>),
    Conj(Box<Expr>),
    Sum(Vec<Expr>),
    Prod(Vec<Expr>),
    Pow(Box<Expr>, i32),
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Const(Scalar::zero())
    }

    pub fn one() -> Expr {
        Expr::Const(Scalar::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(Scalar::int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Expr {
        Expr::Const(Scalar::ratio(n, d))
    }

    pub fn scalar(s: Scalar) -> Expr {
        Expr::Const(s)
    }

    /// (2πi)^j.
    pub fn two_pi_i(j: i32) -> Expr {
        Expr::Const(Scalar::two_pi_i(j))
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn rat(r: &RationalFunction) -> Expr {
        match r.as_constant() {
            Some(c) => Expr::Const(Scalar::new(c, 0)),
            None => Expr::Rat(Arc::new(r.clone())),
        }
    }

    pub fn log(b: &Arc<LogBranches>, sector: usize) -> Expr {
        Expr::Log(b.clone(), sector)
    }

    pub fn log_abs(r: &RationalFunction) -> Expr {
        Expr::LogAbs(Arc::new(r.clone()))
    }

    /// The integer (log_j f − log_i f)/2πi on the overlap of sectors i and j.
    pub fn branch_int(b: &Arc<LogBranches>, i: usize, j: usize) -> Expr {
        Expr::Int(Box::new(Expr::log(b, j) - Expr::log(b, i)))
    }

    pub fn int_of(e: Expr) -> Expr {
        Expr::Int(Box::new(e))
    }

    pub fn conj(&self) -> Expr {
        Expr::Conj(Box::new(self.clone()))
    }

    pub fn pow(&self, k: i32) -> Expr {
        Expr::Pow(Box::new(self.clone()), k)
    }

    pub fn scale(&self, s: Scalar) -> Expr {
        Expr::Const(s) * self.clone()
    }

    /// π_p(e) = ½(e + (−1)^p ē).
    pub fn pi(&self, p: u32) -> Expr {
        let c = if p % 2 == 0 { self.conj() } else { -self.conj() };
        Expr::ratio(1, 2) * (self.clone() + c)
    }

    pub fn is_const_zero(&self) -> bool {
        matches!(self, Expr::Const(s) if s.is_zero())
    }

    /// Numeric value at w.
    pub fn eval(&self, w: Complex64) -> Result<Complex64> {
        self.eval_env(w, &[])
    }

    pub fn eval_env(&self, w: Complex64, env: Env) -> Result<Complex64> {
        Ok(match self {
            Expr::Const(s) => s.to_c64(),
            Expr::Var(name) => env
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::FormalVariable(name.clone()))?,
            Expr::Rat(r) => r.eval(w)?,
            Expr::Log(b, k) => b.log_at(*k, w)?,
            Expr::LogAbs(r) => Complex64::new(r.eval(w)?.norm().ln(), 0.0),
            Expr::Int(e) => {
                let v = e.eval_env(w, env)? / Complex64::new(0.0, TAU);
                Complex64::new(round_guarded(v)? as f64, 0.0)
            }
            Expr::Conj(e) => e.eval_env(w, env)?.conj(),
            Expr::Sum(v) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for e in v {
                    acc += e.eval_env(w, env)?;
                }
                acc
            }
            Expr::Prod(v) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for e in v {
                    acc *= e.eval_env(w, env)?;
                }
                acc
            }
            Expr::Pow(e, k) => e.eval_env(w, env)?.powi(*k),
        })
    }

    /// Exact value as a combination of twists, for expressions built from
    /// constants and integer nodes. `None` if a transcendental node is present.
    pub fn eval_lattice(&self, w: Complex64) -> Result<Option<BTreeMap<i32, GaussianRational>>> {
        type Lat = BTreeMap<i32, GaussianRational>;
        fn mul(a: &Lat, b: &Lat) -> Lat {
            let mut out = Lat::new();
            for (ta, ca) in a {
                for (tb, cb) in b {
                    let e = out.entry(ta + tb).or_insert_with(GaussianRational::zero);
                    *e = &*e + &(ca * cb);
                }
            }
            out.retain(|_, c| !c.is_zero());
            out
        }
        Ok(match self {
            Expr::Const(s) => {
                let mut m = Lat::new();
                if !s.is_zero() {
                    m.insert(s.twist, s.c.clone());
                }
                Some(m)
            }
            Expr::Int(e) => {
                let v = e.eval(w)? / Complex64::new(0.0, TAU);
                let n = round_guarded(v)?;
                let mut m = Lat::new();
                if n != 0 {
                    m.insert(0, GaussianRational::from_int(n));
                }
                Some(m)
            }
            Expr::Conj(e) => e.eval_lattice(w)?.map(|m| {
                m.into_iter()
                    .map(|(t, c)| (t, if t.rem_euclid(2) == 1 { -c.conj() } else { c.conj() }))
                    .collect()
            }),
            Expr::Sum(v) => {
                let mut out = Lat::new();
                for e in v {
                    let Some(m) = e.eval_lattice(w)? else { return Ok(None) };
                    for (t, c) in m {
                        let x = out.entry(t).or_insert_with(GaussianRational::zero);
                        *x = &*x + &c;
                    }
                }
                out.retain(|_, c| !c.is_zero());
                Some(out)
            }
            Expr::Prod(v) => {
                let mut acc = Lat::new();
                acc.insert(0, GaussianRational::one());
                for e in v {
                    let Some(m) = e.eval_lattice(w)? else { return Ok(None) };
                    acc = mul(&acc, &m);
                }
                Some(acc)
            }
            Expr::Pow(e, k) if *k >= 0 => {
                let Some(m) = e.eval_lattice(w)? else { return Ok(None) };
                let mut acc = Lat::new();
                acc.insert(0, GaussianRational::one());
                for _ in 0..*k {
                    acc = mul(&acc, &m);
                }
                Some(acc)
            }
            _ => None,
        })
    }

    /// The (∂/∂z, ∂/∂z̄) parts of de.
    pub fn d(&self) -> Result<(Expr, Expr)> {
        Ok(match self {
            Expr::Const(_) | Expr::Int(_) => (Expr::zero(), Expr::zero()),
            Expr::Var(name) => return Err(Error::FormalVariable(name.clone())),
            Expr::Rat(r) => (Expr::rat(&r.derivative()?), Expr::zero()),
            Expr::Log(b, _) => (Expr::rat(&b.function().log_derivative()?), Expr::zero()),
            Expr::LogAbs(r) => {
                let dl = Expr::rat(&r.log_derivative()?);
                (Expr::ratio(1, 2) * dl.clone(), Expr::ratio(1, 2) * dl.conj())
            }
            Expr::Conj(e) => {
                let (a, b) = e.d()?;
                (b.conj(), a.conj())
            }
            Expr::Sum(v) => {
                let mut a = Vec::new();
                let mut b = Vec::new();
                for e in v {
                    let (x, y) = e.d()?;
                    a.push(x);
                    b.push(y);
                }
                (Expr::Sum(a), Expr::Sum(b))
            }
            Expr::Prod(v) => {
                let mut a = Vec::new();
                let mut b = Vec::new();
                for (k, e) in v.iter().enumerate() {
                    let (x, y) = e.d()?;
                    let mut others: Vec<Expr> = v.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, e)| e.clone()).collect();
                    let mut ox = others.clone();
                    ox.push(x);
                    others.push(y);
                    a.push(Expr::Prod(ox));
                    b.push(Expr::Prod(others));
                }
                (Expr::Sum(a), Expr::Sum(b))
            }
            Expr::Pow(e, k) => {
                if *k == 0 {
                    return Ok((Expr::zero(), Expr::zero()));
                }
                let (x, y) = e.d()?;
                let f = Expr::int(*k as i64) * e.pow(k - 1);
                (f.clone() * x, f * y)
            }
        })
    }

    /// Replace every occurrence of a formal variable.
    pub fn subst(&self, name: &str, by: &Expr) -> Expr {
        match self {
            Expr::Var(n) if n == name => by.clone(),
            Expr::Int(e) => Expr::Int(Box::new(e.subst(name, by))),
            Expr::Conj(e) => Expr::Conj(Box::new(e.subst(name, by))),
            Expr::Sum(v) => Expr::Sum(v.iter().map(|e| e.subst(name, by)).collect()),
            Expr::Prod(v) => Expr::Prod(v.iter().map(|e| e.subst(name, by)).collect()),
            Expr::Pow(e, k) => Expr::Pow(Box::new(e.subst(name, by)), *k),
            other => other.clone(),
        }
    }

    /// Sectors referenced by log nodes, used to pick evaluation charts.
    pub fn sectors(&self, out: &mut Vec<usize>) {
        match self {
            Expr::Log(_, k) => out.push(*k),
            Expr::Int(e) | Expr::Conj(e) | Expr::Pow(e, _) => e.sectors(out),
            Expr::Sum(v) | Expr::Prod(v) => v.iter().for_each(|e| e.sectors(out)),
            _ => {}
        }
    }

    fn tag(&self) -> u8 {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(_) => 1,
            Expr::Rat(_) => 2,
            Expr::Log(..) => 3,
            Expr::LogAbs(_) => 4,
            Expr::Int(_) => 5,
            Expr::Conj(_) => 6,
            Expr::Sum(_) => 7,
            Expr::Prod(_) => 8,
            Expr::Pow(..) => 9,
        }
    }

    fn log_key(b: &Arc<LogBranches>) -> (String, usize) {
        (b.function().to_string(), Arc::as_ptr(b.cover()) as usize)
    }
}

impl PartialEq for Expr {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for Expr {}

impl PartialOrd for Expr {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Expr {
    fn cmp(&self, o: &Self) -> Ordering {
        let t = self.tag().cmp(&o.tag());
        if t != Ordering::Equal {
            return t;
        }
        match (self, o) {
            (Expr::Const(a), Expr::Const(b)) => a.cmp(b),
            (Expr::Var(a), Expr::Var(b)) => a.cmp(b),
            (Expr::Rat(a), Expr::Rat(b)) | (Expr::LogAbs(a), Expr::LogAbs(b)) => {
                if a == b {
                    Ordering::Equal
                } else {
                    a.to_string().cmp(&b.to_string())
                }
            }
            (Expr::Log(a, i), Expr::Log(b, j)) => {
                (Expr::log_key(a), i).cmp(&(Expr::log_key(b), j))
            }
            (Expr::Int(a), Expr::Int(b)) | (Expr::Conj(a), Expr::Conj(b)) => a.cmp(b),
            (Expr::Sum(a), Expr::Sum(b)) | (Expr::Prod(a), Expr::Prod(b)) => a.cmp(b),
            (Expr::Pow(a, i), Expr::Pow(b, j)) => (a, i).cmp(&(b, j)),
            _ => unreachable!("tags compared equal"),
        }
    }
}

impl fmt::Display for Expr {
    /// Canonical text, readable back by [`parse_expr`](super::parse_expr).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, name: &str, v: &[Expr]| -> fmt::Result {
            write!(f, "{}(", name)?;
            for (k, e) in v.iter().enumerate() {
                if k > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", e)?;
            }
            write!(f, ")")
        };
        match self {
            Expr::Const(s) => write!(f, "const({}, {})", s.c, s.twist),
            Expr::Var(n) => write!(f, "var({})", n),
            Expr::Rat(r) => write!(f, "rat({})", r),
            Expr::Log(b, k) => write!(f, "log({}, {})", b.function(), k),
            Expr::LogAbs(r) => write!(f, "logabs({})", r),
            Expr::Int(e) => write!(f, "int({})", e),
            Expr::Conj(e) => write!(f, "conj({})", e),
            Expr::Sum(v) => join(f, "sum", v),
            Expr::Prod(v) => join(f, "prod", v),
            Expr::Pow(e, k) => write!(f, "pow({}, {})", e, k),
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, o: Expr) -> Expr {
        Expr::Sum(vec![self, o])
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, o: Expr) -> Expr {
        Expr::Sum(vec![self, -o])
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, o: Expr) -> Expr {
        Expr::Prod(vec![self, o])
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Prod(vec![Expr::int(-1), self])
    }
}
