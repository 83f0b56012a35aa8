//! Cones of diagrams X → Z ← Y and the α-family of products on them.
//!
//! A degree-n element is (x, y, z) ∈ X^n ⊕ Y^n ⊕ Z^{n−1} with
//! d(x, y, z) = (dx, dy, g(y) − f(x) − dz).

use std::sync::Arc;

use num_rational::BigRational;

use super::cochain::Pairing;
use super::complex::{
    deligne_complex, hermitian_target, hodge_f1, lattice, smooth_forms, ChainMap, CoefficientComplex, Component,
    Entry, Op,
};
use super::products::{hermitian_pairing, transposed, wedge_pairing};
use crate::error::{Error, Result};
use crate::exact_algebra::{GaussianRational, Scalar};
use crate::form_calculus::Form;

#[derive(Debug, Clone)]
pub struct ConeDiagram {
    pub name: String,
    pub x: Arc<CoefficientComplex>,
    pub y: Arc<CoefficientComplex>,
    pub z: Arc<CoefficientComplex>,
    pub f: ChainMap,
    pub g: ChainMap,
}

/// A cone element split into its three parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeElement {
    pub x: Vec<Form>,
    pub y: Vec<Form>,
    pub z: Vec<Form>,
}

fn offset(entries: &[Entry], src: usize, dst: usize, op: Option<Op>) -> Vec<Entry> {
    entries
        .iter()
        .map(|e| {
            let o = match &op {
                Some(extra) => Op::Then(vec![e.op.clone(), extra.clone()]),
                None => e.op.clone(),
            };
            Entry::new(e.src + src, e.dst + dst, o)
        })
        .collect()
}

impl ConeDiagram {
    pub fn top(&self) -> usize {
        self.x.top().max(self.y.top()).max(self.z.top() + 1)
    }

    fn widths(&self, n: usize) -> (usize, usize, usize) {
        let z = if n == 0 { 0 } else { self.z.slots(n - 1).len() };
        (self.x.slots(n).len(), self.y.slots(n).len(), z)
    }

    /// The cone as a coefficient complex.
    pub fn complex(&self) -> Arc<CoefficientComplex> {
        let top = self.top();
        let mut comps = Vec::new();
        for n in 0..=top {
            let mut c: Vec<Component> = Vec::new();
            c.extend(self.x.slots(n).iter().map(|s| Component::new(&format!("x:{}", s.label), s.slot)));
            c.extend(self.y.slots(n).iter().map(|s| Component::new(&format!("y:{}", s.label), s.slot)));
            if n >= 1 {
                c.extend(self.z.slots(n - 1).iter().map(|s| Component::new(&format!("z:{}", s.label), s.slot)));
            }
            comps.push(c);
        }
        let mut diff = Vec::new();
        for n in 0..top {
            let (wx, wy, _) = self.widths(n);
            let (vx, vy, _) = self.widths(n + 1);
            let mut e = Vec::new();
            if n < self.x.top() {
                e.extend(offset(&self.x.differential[n], 0, 0, None));
            }
            if n < self.y.top() {
                e.extend(offset(&self.y.differential[n], wx, vx, None));
            }
            let zdst = vx + vy;
            if let Some(f) = self.f.entries.get(n) {
                e.extend(offset(f, 0, zdst, Some(Op::Neg)));
            }
            if let Some(g) = self.g.entries.get(n) {
                e.extend(offset(g, wx, zdst, None));
            }
            if n >= 1 && n - 1 < self.z.top() {
                e.extend(offset(&self.z.differential[n - 1], wx + wy, zdst, Some(Op::Neg)));
            }
            diff.push(e);
        }
        Arc::new(CoefficientComplex::new(&format!("Cone[{}]", self.name), comps, diff))
    }

    pub fn split(&self, n: usize, v: &[Form]) -> ConeElement {
        let (wx, wy, _) = self.widths(n);
        ConeElement { x: v[..wx].to_vec(), y: v[wx..wx + wy].to_vec(), z: v[wx + wy..].to_vec() }
    }

    pub fn join(e: &ConeElement) -> Vec<Form> {
        e.x.iter().chain(&e.y).chain(&e.z).cloned().collect()
    }

    pub fn f(&self, n: usize, x: &[Form]) -> Result<Vec<Form>> {
        self.f.apply(n, x, &self.z)
    }

    pub fn g(&self, n: usize, y: &[Form]) -> Result<Vec<Form>> {
        self.g.apply(n, y, &self.z)
    }
}

type HomotopyFn = dyn Fn(usize, &[Form], usize, &[Form]) -> Result<Option<Vec<Form>>> + Send + Sync;

/// A map (A ⊗ B)^n → Z^{n−1} witnessing compatibility of products up to homotopy.
#[derive(Clone)]
pub struct Homotopy(Arc<HomotopyFn>);

impl Homotopy {
    pub fn new(h: impl Fn(usize, &[Form], usize, &[Form]) -> Result<Option<Vec<Form>>> + Send + Sync + 'static) -> Self {
        Homotopy(Arc::new(h))
    }

    pub fn zero() -> Self {
        Homotopy::new(|_, _, _, _| Ok(None))
    }
}

/// Products on three cone diagrams, with homotopies h (for X) and k (for Y).
#[derive(Clone)]
pub struct ConeProduct {
    pub d1: Arc<ConeDiagram>,
    pub d2: Arc<ConeDiagram>,
    pub d3: Arc<ConeDiagram>,
    pub cup_x: Pairing,
    pub cup_y: Pairing,
    pub cup_z: Pairing,
    pub h: Option<Homotopy>,
    pub k: Option<Homotopy>,
}

fn add_into(acc: &mut [Form], v: &[Form]) -> Result<()> {
    if v.is_empty() {
        return Ok(());
    }
    for (a, b) in acc.iter_mut().zip(v) {
        *a = a.add(b)?;
    }
    Ok(())
}

fn scale_vec(v: &[Form], s: &Scalar) -> Vec<Form> {
    v.iter().map(|f| f.map(|e| e.scale(s.clone()))).collect()
}

fn lin2(a: &[Form], sa: &Scalar, b: &[Form], sb: &Scalar) -> Result<Vec<Form>> {
    scale_vec(a, sa).iter().zip(scale_vec(b, sb)).map(|(x, y)| x.add(&y)).collect()
}

impl ConeProduct {
    /// (x₁,y₁,z₁) ∪_α (x₂,y₂,z₂) = (x₁∪x₂, y₁∪y₂,
    ///   (−1)^{deg x₁}((1−α)f₁x₁ + αg₁y₁) ∪ z₂ + z₁ ∪ (αf₂x₂ + (1−α)g₂y₂) − h(x₁⊗x₂) + k(y₁⊗y₂)).
    pub fn cup_alpha(
        &self,
        n1: usize,
        a: &ConeElement,
        n2: usize,
        b: &ConeElement,
        alpha: &BigRational,
    ) -> Result<ConeElement> {
        let (Some(h), Some(k)) = (&self.h, &self.k) else { return Err(Error::HomotopyUndefined) };
        let n = n1 + n2;
        let al = Scalar::new(real(alpha.clone()), 0);
        let one_minus = Scalar::new(real(BigRational::from_integer(1.into()) - alpha), 0);
        let x = nonempty(self.cup_x.apply(n1, &a.x, n2, &b.x)?, &self.d3.x, n);
        let y = nonempty(self.cup_y.apply(n1, &a.y, n2, &b.y)?, &self.d3.y, n);
        let mut z = if n == 0 { Vec::new() } else { self.d3.z.zero(n - 1) };
        if n >= 1 {
            if n2 >= 1 {
                let left = lin2(&self.d1.f(n1, &a.x)?, &one_minus, &self.d1.g(n1, &a.y)?, &al)?;
                let mut t = self.cup_z.apply(n1, &left, n2 - 1, &b.z)?;
                if n1 % 2 == 1 {
                    t = t.iter().map(|f| f.neg()).collect();
                }
                add_into(&mut z, &t)?;
            }
            if n1 >= 1 {
                let right = lin2(&self.d2.f(n2, &b.x)?, &al, &self.d2.g(n2, &b.y)?, &one_minus)?;
                add_into(&mut z, &self.cup_z.apply(n1 - 1, &a.z, n2, &right)?)?;
            }
            if let Some(v) = (h.0)(n1, &a.x, n2, &b.x)? {
                let v: Vec<Form> = v.iter().map(|f| f.neg()).collect();
                add_into(&mut z, &v)?;
            }
            if let Some(v) = (k.0)(n1, &a.y, n2, &b.y)? {
                add_into(&mut z, &v)?;
            }
        }
        Ok(ConeElement { x, y, z })
    }

    /// The product as a coefficient-level pairing of the cone complexes.
    pub fn pairing(&self, alpha: BigRational) -> Pairing {
        let me = self.clone();
        Pairing::new(
            &format!("cone-alpha({})", alpha),
            self.d1.complex(),
            self.d2.complex(),
            self.d3.complex(),
            move |p, a, r, b| {
                let ea = me.d1.split(p, a);
                let eb = me.d2.split(r, b);
                let c = me.cup_alpha(p, &ea, r, &eb, &alpha)?;
                Ok(Some(ConeDiagram::join(&c)))
            },
        )
    }

    /// Difference of the third components at α and α′ predicted by the product formula:
    /// (α−α′)[(−1)^{deg x₁}(g₁y₁ − f₁x₁) ∪ z₂ + z₁ ∪ (f₂x₂ − g₂y₂)].
    pub fn alpha_difference(
        &self,
        n1: usize,
        a: &ConeElement,
        n2: usize,
        b: &ConeElement,
        alpha: &BigRational,
        beta: &BigRational,
    ) -> Result<Vec<Form>> {
        let n = n1 + n2;
        if n == 0 {
            return Ok(Vec::new());
        }
        let one = Scalar::one();
        let minus = Scalar::int(-1);
        let mut z = self.d3.z.zero(n - 1);
        if n2 >= 1 {
            let left = lin2(&self.d1.g(n1, &a.y)?, &one, &self.d1.f(n1, &a.x)?, &minus)?;
            let mut t = self.cup_z.apply(n1, &left, n2 - 1, &b.z)?;
            if n1 % 2 == 1 {
                t = t.iter().map(|f| f.neg()).collect();
            }
            add_into(&mut z, &t)?;
        }
        if n1 >= 1 {
            let right = lin2(&self.d2.f(n2, &b.x)?, &one, &self.d2.g(n2, &b.y)?, &minus)?;
            add_into(&mut z, &self.cup_z.apply(n1 - 1, &a.z, n2, &right)?)?;
        }
        let diff = Scalar::new(real(alpha - beta), 0);
        Ok(scale_vec(&z, &diff))
    }
}

fn real(x: BigRational) -> GaussianRational {
    GaussianRational::new(x, BigRational::from_integer(0.into()))
}

fn nonempty(v: Vec<Form>, c: &CoefficientComplex, n: usize) -> Vec<Form> {
    if v.is_empty() {
        c.zero(n)
    } else {
        v
    }
}

fn identity_map(c: &CoefficientComplex) -> ChainMap {
    ChainMap { entries: (0..=c.top()).map(|p| (0..c.slots(p).len()).map(|k| Entry::new(k, k, Op::Id)).collect()).collect() }
}

/// The real Deligne diagram Z(j) → A ← F¹A.
pub fn real_deligne_diagram(j: i32) -> Arc<ConeDiagram> {
    Arc::new(ConeDiagram {
        name: format!("Z({}) -> A <- F1A", j),
        x: lattice(j),
        y: hodge_f1(),
        z: smooth_forms(),
        f: ChainMap { entries: vec![vec![Entry::new(0, 0, Op::Id)]] },
        g: ChainMap { entries: vec![vec![], vec![Entry::new(0, 0, Op::Id)], vec![Entry::new(0, 0, Op::Id)]] },
    })
}

/// Products on the real Deligne cones of weights j and k, strictly compatible.
pub fn real_deligne_product(j: i32, k: i32) -> ConeProduct {
    let (d1, d2, d3) = (real_deligne_diagram(j), real_deligne_diagram(k), real_deligne_diagram(j + k));
    ConeProduct {
        cup_x: wedge_pairing(d1.x.clone(), d2.x.clone(), d3.x.clone()),
        cup_y: wedge_pairing(d1.y.clone(), d2.y.clone(), d3.y.clone()),
        cup_z: wedge_pairing(d1.z.clone(), d2.z.clone(), d3.z.clone()),
        d1,
        d2,
        d3,
        h: Some(Homotopy::zero()),
        k: Some(Homotopy::zero()),
    }
}

/// The diagram C → C ← C with identity maps.
pub fn identity_diagram(c: Arc<CoefficientComplex>) -> Arc<ConeDiagram> {
    let id = identity_map(&c);
    Arc::new(ConeDiagram { name: format!("{} = {} = {}", c.name, c.name, c.name), x: c.clone(), y: c.clone(), z: c, f: id.clone(), g: id })
}

/// The hermitian product P on X and its transpose on Y and Z, related by the homotopy
/// h(F ⊗ G) = F·G on O ⊗ O.
pub fn hermitian_cone_product() -> ConeProduct {
    let d = identity_diagram(deligne_complex(1));
    let d3 = identity_diagram(hermitian_target());
    let p = hermitian_pairing();
    let pt = transposed(&p);
    ConeProduct {
        d1: d.clone(),
        d2: d,
        d3,
        cup_x: p,
        cup_y: pt.clone(),
        cup_z: pt,
        h: Some(Homotopy::new(|p, a, r, b| {
            Ok(if p == 1 && r == 1 { Some(vec![Form::function(a[0].coeff(0).clone() * b[0].coeff(0).clone())]) } else { None })
        })),
        k: Some(Homotopy::zero()),
    }
}
