//! Polynomial normal form over atoms: flatten, fold constants, push conjugation to
//! the leaves, expand products over sums, and merge like monomials.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::expr::Expr;
use crate::exact_algebra::{GaussianRational, RationalFunction, Scalar};

type Mono = Vec<(Expr, i32)>;

#[derive(Clone, Default)]
struct Lin(BTreeMap<(Mono, i32), GaussianRational>);

impl Lin {
    fn constant(s: &Scalar) -> Lin {
        let mut m = BTreeMap::new();
        if !s.is_zero() {
            m.insert((Vec::new(), s.twist), s.c.clone());
        }
        Lin(m)
    }

    fn atom(e: Expr) -> Lin {
        let mut m = BTreeMap::new();
        m.insert((vec![(e, 1)], 0), GaussianRational::one());
        Lin(m)
    }

    fn add_term(&mut self, mono: Mono, twist: i32, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        let (k, mono) = normalize_mono(mono);
        let c = &c * &k;
        if c.is_zero() {
            return;
        }
        let key = (mono, twist);
        let sum = match self.0.get(&key) {
            Some(old) => old + &c,
            None => c,
        };
        if sum.is_zero() {
            self.0.remove(&key);
        } else {
            self.0.insert(key, sum);
        }
    }

    fn add(mut self, o: Lin) -> Lin {
        for ((m, t), c) in o.0 {
            self.add_term(m, t, c);
        }
        self
    }

    fn mul(&self, o: &Lin) -> Lin {
        let mut out = Lin::default();
        for ((ma, ta), ca) in &self.0 {
            for ((mb, tb), cb) in &o.0 {
                out.add_term(merge(ma, mb), ta + tb, ca * cb);
            }
        }
        out
    }

    fn one() -> Lin {
        Lin::constant(&Scalar::one())
    }

    /// Inverse of a single monomial, when it is one.
    fn inv_mono(&self) -> Option<Lin> {
        if self.0.len() != 1 {
            return None;
        }
        let ((m, t), c) = self.0.iter().next()?;
        let mut out = Lin::default();
        let inv_m: Mono = m.iter().map(|(a, k)| (a.clone(), -k)).collect();
        out.add_term(inv_m, -t, c.inv()?);
        Some(out)
    }

    fn to_expr(&self) -> Expr {
        let mut terms: Vec<Expr> = Vec::new();
        for ((mono, twist), c) in &self.0 {
            let mut factors = Vec::new();
            let s = Scalar::new(c.clone(), *twist);
            if !s.is_one() || mono.is_empty() {
                factors.push(Expr::Const(s));
            }
            for (a, k) in mono {
                if *k == 1 {
                    factors.push(a.clone());
                } else {
                    factors.push(Expr::Pow(Box::new(a.clone()), *k));
                }
            }
            terms.push(if factors.len() == 1 { factors.pop().expect("one factor") } else { Expr::Prod(factors) });
        }
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.pop().expect("one term"),
            _ => Expr::Sum(terms),
        }
    }
}

fn merge(a: &Mono, b: &Mono) -> Mono {
    let mut m: BTreeMap<Expr, i32> = BTreeMap::new();
    for (e, k) in a.iter().chain(b.iter()) {
        *m.entry(e.clone()).or_insert(0) += k;
    }
    m.into_iter().filter(|(_, k)| *k != 0).collect()
}

/// Fold all rational atoms (and all conjugated rational atoms) into one each, with
/// monic numerators; returns the extracted constant.
fn normalize_mono(mono: Mono) -> (GaussianRational, Mono) {
    let mut c = GaussianRational::one();
    let mut rat: Option<RationalFunction> = None;
    let mut crat: Option<RationalFunction> = None;
    let mut rest: BTreeMap<Expr, i32> = BTreeMap::new();
    let fold = |acc: &mut Option<RationalFunction>, r: &RationalFunction, k: i32| -> bool {
        let Ok(p) = r.pow(k) else { return false };
        let next = match acc.take() {
            None => Ok(p),
            Some(a) => a.mul(&p),
        };
        match next {
            Ok(n) => {
                *acc = Some(n);
                true
            }
            Err(_) => false,
        }
    };
    for (e, k) in mono {
        let handled = match &e {
            Expr::Rat(r) => fold(&mut rat, r, k),
            Expr::Conj(inner) => match inner.as_ref() {
                Expr::Rat(r) => fold(&mut crat, r, k),
                _ => false,
            },
            _ => false,
        };
        if !handled {
            *rest.entry(e).or_insert(0) += k;
        }
    }
    if let Some(r) = rat {
        let (k, r) = monic_split(&r);
        c = &c * &k;
        if let Some(r) = r {
            *rest.entry(Expr::Rat(Arc::new(r))).or_insert(0) += 1;
        }
    }
    if let Some(r) = crat {
        let (k, r) = monic_split(&r);
        c = &c * &k.conj();
        if let Some(r) = r {
            *rest.entry(Expr::Conj(Box::new(Expr::Rat(Arc::new(r))))).or_insert(0) += 1;
        }
    }
    (c, rest.into_iter().filter(|(_, k)| *k != 0).collect())
}

fn monic_split(r: &RationalFunction) -> (GaussianRational, Option<RationalFunction>) {
    if let Some(c) = r.as_constant() {
        return (c, None);
    }
    let lead = r.numerator().leading().cloned().expect("nonzero");
    let inv = lead.inv().expect("nonzero");
    (lead, Some(r.scale(&inv)))
}

fn canon(e: &Expr) -> Lin {
    match e {
        Expr::Const(s) => Lin::constant(s),
        Expr::Var(_) | Expr::Log(..) | Expr::LogAbs(_) => Lin::atom(e.clone()),
        Expr::Rat(r) => match r.as_constant() {
            Some(c) => Lin::constant(&Scalar::new(c, 0)),
            None => {
                let mut l = Lin::default();
                l.add_term(vec![(e.clone(), 1)], 0, GaussianRational::one());
                l
            }
        },
        Expr::Int(inner) => {
            let s = simplify(inner);
            // Int of an exact multiple of 2πi is that integer.
            if let Expr::Const(c) = &s {
                if c.is_zero() {
                    return Lin::default();
                }
                if c.twist == 1 {
                    if let Some(n) = c.c.to_integer() {
                        return Lin::constant(&Scalar::new(GaussianRational::from_bigint(n), 0));
                    }
                }
            }
            Lin::atom(Expr::Int(Box::new(s)))
        }
        Expr::Conj(inner) => conj_lin(&canon(inner)),
        Expr::Sum(v) => v.iter().fold(Lin::default(), |acc, e| acc.add(canon(e))),
        Expr::Prod(v) => v.iter().fold(Lin::one(), |acc, e| acc.mul(&canon(e))),
        Expr::Pow(b, k) => power(&canon(b), *k),
    }
}

fn power(base: &Lin, k: i32) -> Lin {
    if k >= 0 {
        (0..k).fold(Lin::one(), |acc, _| acc.mul(base))
    } else if let Some(inv) = base.inv_mono() {
        (0..-k).fold(Lin::one(), |acc, _| acc.mul(&inv))
    } else {
        let mut l = Lin::default();
        l.add_term(vec![(base.to_expr(), k)], 0, GaussianRational::one());
        l
    }
}

fn conj_atom(a: &Expr) -> Lin {
    match a {
        Expr::LogAbs(_) | Expr::Int(_) => canon(a),
        Expr::Conj(inner) => canon(inner),
        Expr::Pow(b, k) => power(&conj_lin(&canon(b)), *k),
        Expr::Sum(_) | Expr::Prod(_) | Expr::Const(_) => conj_lin(&canon(a)),
        other => Lin::atom(Expr::Conj(Box::new(other.clone()))),
    }
}

fn conj_lin(l: &Lin) -> Lin {
    let mut out = Lin::default();
    for ((mono, t), c) in &l.0 {
        let cc = if t.rem_euclid(2) == 1 { -c.conj() } else { c.conj() };
        let mut term = Lin::constant(&Scalar::new(cc, *t));
        for (a, k) in mono {
            term = term.mul(&power(&conj_atom(a), *k));
        }
        out = out.add(term);
    }
    out
}

/// Canonical polynomial form of an expression.
pub fn simplify(e: &Expr) -> Expr {
    canon(e).to_expr()
}

/// Structural zero test after canonicalization.
pub fn is_zero(e: &Expr) -> bool {
    canon(e).0.is_empty()
}

/// Split a canonical expression into its constant (pure scalar) part and the rest.
pub fn scalar_terms(e: &Expr) -> Vec<(Scalar, Expr)> {
    canon(e)
        .0
        .iter()
        .map(|((mono, t), c)| {
            let mut l = Lin::default();
            l.add_term(mono.clone(), 0, GaussianRational::one());
            (Scalar::new(c.clone(), *t), l.to_expr())
        })
        .collect()
}
