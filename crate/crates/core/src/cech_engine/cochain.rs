use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::complex::{CoefficientComplex, Slot};
use crate::cover_nerve::{SectorCover, Simplex};
use crate::error::{Error, Result};
use crate::exact_algebra::Scalar;
use crate::form_calculus::Form;

type PairFn = dyn Fn(usize, &[Form], usize, &[Form]) -> Result<Option<Vec<Form>>> + Send + Sync;

/// A coefficient-level product L^p ⊗ R^r → T^{p+r}; `None` means zero.
#[derive(Clone)]
pub struct Pairing {
    pub name: String,
    pub left: Arc<CoefficientComplex>,
    pub right: Arc<CoefficientComplex>,
    pub target: Arc<CoefficientComplex>,
    rule: Arc<PairFn>,
}

impl fmt::Debug for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pairing({}: {} x {} -> {})", self.name, self.left.name, self.right.name, self.target.name)
    }
}

impl Pairing {
    pub fn new(
        name: &str,
        left: Arc<CoefficientComplex>,
        right: Arc<CoefficientComplex>,
        target: Arc<CoefficientComplex>,
        rule: impl Fn(usize, &[Form], usize, &[Form]) -> Result<Option<Vec<Form>>> + Send + Sync + 'static,
    ) -> Self {
        Pairing { name: name.to_string(), left, right, target, rule: Arc::new(rule) }
    }

    /// Product of a degree-p value with a degree-r value, in target degree p + r.
    pub fn apply(&self, p: usize, a: &[Form], r: usize, b: &[Form]) -> Result<Vec<Form>> {
        if p + r > self.target.top() || p > self.left.top() || r > self.right.top() {
            return Ok(Vec::new());
        }
        match (self.rule)(p, a, r, b)? {
            Some(v) => {
                self.target.check(p + r, &v)?;
                Ok(v)
            }
            None => Ok(self.target.zero(p + r)),
        }
    }
}

/// A Čech cochain of total degree n: the value on a q-simplex lies in internal degree n − q.
#[derive(Clone, Debug)]
pub struct CechCochain {
    complex: Arc<CoefficientComplex>,
    cover: Arc<SectorCover>,
    degree: usize,
    values: BTreeMap<Simplex, Vec<Form>>,
}

impl CechCochain {
    pub fn zero(complex: Arc<CoefficientComplex>, cover: Arc<SectorCover>, degree: usize) -> Self {
        CechCochain { complex, cover, degree, values: BTreeMap::new() }
    }

    pub fn complex(&self) -> &Arc<CoefficientComplex> {
        &self.complex
    }

    pub fn cover(&self) -> &Arc<SectorCover> {
        &self.cover
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn values(&self) -> &BTreeMap<Simplex, Vec<Form>> {
        &self.values
    }

    /// Internal degree carried by a simplex, if any.
    pub fn internal_degree(&self, s: &Simplex) -> Option<usize> {
        let q = s.dim();
        if q > self.degree || self.degree - q > self.complex.top() {
            None
        } else {
            Some(self.degree - q)
        }
    }

    /// Store a value, checking slots and that the simplex lies in the nerve.
    pub fn set(&mut self, s: Simplex, v: Vec<Form>) -> Result<()> {
        if s.0.windows(2).any(|w| w[0] >= w[1]) || s.0.iter().any(|&k| k >= self.cover.n()) {
            return Err(Error::SlotMismatch(format!("simplex {} is not an increasing tuple of sectors", s)));
        }
        if self.cover.intersection(&s).is_empty() {
            return Err(Error::SlotMismatch(format!("simplex {} is not in the nerve", s)));
        }
        let p = self
            .internal_degree(&s)
            .ok_or_else(|| Error::SlotMismatch(format!("simplex {} carries no degree-{} values", s, self.degree)))?;
        self.complex.check(p, &v)?;
        self.values.insert(s, v);
        Ok(())
    }

    pub fn with(mut self, s: Simplex, v: Vec<Form>) -> Result<Self> {
        self.set(s, v)?;
        Ok(self)
    }

    /// Value on a simplex, zero where unset.
    pub fn value(&self, s: &Simplex) -> Vec<Form> {
        match self.values.get(s) {
            Some(v) => v.clone(),
            None => self.internal_degree(s).map(|p| self.complex.zero(p)).unwrap_or_default(),
        }
    }

    /// Nerve simplices that can carry a value.
    pub fn support(&self) -> Vec<Simplex> {
        self.cover.nerve(self.degree).into_iter().filter(|s| self.internal_degree(s).is_some()).collect()
    }

    fn same_shape(&self, o: &CechCochain) -> Result<()> {
        if self.complex.name != o.complex.name || self.degree != o.degree || !Arc::ptr_eq(&self.cover, &o.cover) {
            return Err(Error::SlotMismatch(format!(
                "cochains in {} (degree {}) and {} (degree {})",
                self.complex.name, self.degree, o.complex.name, o.degree
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &CechCochain) -> Result<CechCochain> {
        self.same_shape(o)?;
        let mut out = self.clone();
        for (s, v) in &o.values {
            let cur = out.value(s);
            let sum = cur.iter().zip(v).map(|(a, b)| a.add(b)).collect::<Result<Vec<_>>>()?;
            out.values.insert(s.clone(), sum);
        }
        Ok(out)
    }

    pub fn neg(&self) -> CechCochain {
        let mut out = self.clone();
        for v in out.values.values_mut() {
            *v = v.iter().map(|f| f.neg()).collect();
        }
        out
    }

    pub fn sub(&self, o: &CechCochain) -> Result<CechCochain> {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Scalar) -> CechCochain {
        let mut out = self.clone();
        for v in out.values.values_mut() {
            *v = v.iter().map(|f| f.map(|e| e.scale(c.clone()))).collect();
        }
        out
    }

    pub fn simplify(&self) -> CechCochain {
        let mut out = self.clone();
        for v in out.values.values_mut() {
            *v = v.iter().map(|f| f.simplify()).collect();
        }
        out
    }

    /// Total differential D = d + (−1)^p δ̌ on C^{p,q}.
    pub fn total_d(&self) -> Result<CechCochain> {
        let n = self.degree + 1;
        let mut out = CechCochain::zero(self.complex.clone(), self.cover.clone(), n);
        for s in self.cover.nerve(n) {
            let Some(p) = out.internal_degree(&s) else { continue };
            let mut acc = self.complex.zero(p);
            if p >= 1 {
                if let Some(prev) = self.values.get(&s) {
                    let dv = self.complex.d(p - 1, prev)?;
                    acc = add_vec(&acc, &dv)?;
                }
            }
            if s.dim() >= 1 {
                let sign = if p % 2 == 0 { 1 } else { -1 };
                for k in 0..=s.dim() {
                    let face = s.face(k);
                    if let Some(v) = self.values.get(&face) {
                        let term = if (k as i64 % 2 == 0) == (sign == 1) { v.clone() } else { neg_vec(v) };
                        acc = add_vec(&acc, &term)?;
                    }
                }
            }
            if acc.iter().any(|f| !f.coeffs().iter().all(|e| e.is_const_zero())) {
                out.values.insert(s, acc);
            }
        }
        Ok(out)
    }

    /// Cup product (a ∪ b)_{i0..iN} = Σ (−1)^{q·r} a_{i0..iq} · b_{iq..iN}, q the Čech
    /// degree of the front factor and r the internal degree of the back factor.
    pub fn cup(&self, b: &CechCochain, pairing: &Pairing) -> Result<CechCochain> {
        if self.complex.name != pairing.left.name || b.complex.name != pairing.right.name {
            return Err(Error::PairingUndefined(self.complex.name.clone(), b.complex.name.clone()));
        }
        if !Arc::ptr_eq(&self.cover, &b.cover) {
            return Err(Error::SlotMismatch("cup of cochains on different covers".into()));
        }
        let n = self.degree + b.degree;
        let mut out = CechCochain::zero(pairing.target.clone(), self.cover.clone(), n);
        for s in self.cover.nerve(n) {
            let Some(pt) = out.internal_degree(&s) else { continue };
            let mut acc = pairing.target.zero(pt);
            let mut touched = false;
            for q in 0..=s.dim() {
                let front = Simplex(s.0[..=q].to_vec());
                let back = Simplex(s.0[q..].to_vec());
                let (Some(fa), Some(fb)) = (self.values.get(&front), b.values.get(&back)) else { continue };
                let p = self.degree - q;
                let r = b.degree - back.dim();
                let mut prod = pairing.apply(p, fa, r, fb)?;
                if prod.is_empty() {
                    continue;
                }
                if (q * r) % 2 == 1 {
                    prod = neg_vec(&prod);
                }
                acc = add_vec(&acc, &prod)?;
                touched = true;
            }
            if touched {
                out.values.insert(s, acc);
            }
        }
        Ok(out)
    }
}

fn add_vec(a: &[Form], b: &[Form]) -> Result<Vec<Form>> {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

fn neg_vec(a: &[Form]) -> Vec<Form> {
    a.iter().map(|f| f.neg()).collect()
}

/// Per-simplex residual of a cocycle check.
#[derive(Debug, Clone, Serialize)]
pub struct SimplexResidual {
    pub complex: String,
    pub degree: usize,
    pub simplex: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CocycleReport {
    pub complex: String,
    pub degree: usize,
    pub pass: bool,
    pub max_residual: f64,
    pub worst_simplex: Option<String>,
    pub tolerance: f64,
    pub samples_per_simplex: usize,
    pub records: Vec<SimplexResidual>,
}

pub const DEFAULT_SAMPLES: usize = 20;

/// Evaluate D(c) on every simplex at seeded sample points.
pub fn is_cocycle(c: &CechCochain, tol: f64) -> Result<CocycleReport> {
    is_cocycle_with(c, tol, DEFAULT_SAMPLES, 0)
}

pub fn is_cocycle_with(c: &CechCochain, tol: f64, samples: usize, seed: u64) -> Result<CocycleReport> {
    let dc = c.total_d()?;
    residual_report(&dc, tol, samples, seed)
}

/// Sup-norm of a cochain over sample points; integer slots are compared exactly, and any
/// nonzero lattice value fails regardless of the tolerance.
pub fn residual_report(c: &CechCochain, tol: f64, samples: usize, seed: u64) -> Result<CocycleReport> {
    let mut records = Vec::new();
    let mut pass = true;
    let mut worst: Option<(f64, String)> = None;
    for s in c.support() {
        let Some(v) = c.values.get(&s) else {
            records.push(SimplexResidual {
                complex: c.complex.name.clone(),
                degree: c.degree,
                simplex: s.to_string(),
                residual: 0.0,
                tolerance: tol,
                pass: true,
            });
            continue;
        };
        let p = c.internal_degree(&s).expect("support simplex");
        let slots = c.complex.slots(p);
        let points = c.cover.sample_points(&s, samples, seed ^ hash_simplex(&s))?;
        let mut res: f64 = 0.0;
        let mut exact_fail = false;
        for (comp, f) in slots.iter().zip(v) {
            for &w in &points {
                if let Slot::Lattice(_) = comp.slot {
                    if let Some(m) = f.coeff(0).eval_lattice(w)? {
                        if !m.is_empty() {
                            exact_fail = true;
                            let val: f64 = m.iter().map(|(t, c)| Scalar::new(c.clone(), *t).to_c64().norm()).sum();
                            res = res.max(val);
                        }
                        continue;
                    }
                }
                res = res.max(f.max_abs(w)?);
            }
        }
        let ok = !exact_fail && res < tol;
        pass &= ok;
        if worst.as_ref().is_none_or(|(r, _)| res > *r) {
            worst = Some((res, s.to_string()));
        }
        records.push(SimplexResidual {
            complex: c.complex.name.clone(),
            degree: c.degree,
            simplex: s.to_string(),
            residual: res,
            tolerance: tol,
            pass: ok,
        });
    }
    let (max_residual, worst_simplex) = match worst {
        Some((r, s)) => (r, Some(s)),
        None => (0.0, None),
    };
    Ok(CocycleReport {
        complex: c.complex.name.clone(),
        degree: c.degree,
        pass,
        max_residual,
        worst_simplex,
        tolerance: tol,
        samples_per_simplex: samples,
        records,
    })
}

fn hash_simplex(s: &Simplex) -> u64 {
    s.0.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &k| (h ^ (k as u64 + 1)).wrapping_mul(0x100_0000_01b3))
}
