use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exact_algebra::Scalar;
use crate::form_calculus::{Expr, Form};

/// What a coefficient slot holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    /// Constants in Z(j) = (2πi)^j Z.
    Lattice(i32),
    /// Holomorphic forms of the given degree.
    Holomorphic(u8),
    /// Smooth complex forms.
    Smooth(u8),
    /// Forms in F¹ (type (1,0) in degree one).
    Filtered(u8),
    /// Real twisted forms E^k(j): conjugation acts by (−1)^j.
    Real(u8, u32),
}

impl Slot {
    pub fn form_degree(&self) -> u8 {
        match *self {
            Slot::Lattice(_) => 0,
            Slot::Holomorphic(k) | Slot::Smooth(k) | Slot::Filtered(k) | Slot::Real(k, _) => k,
        }
    }

    pub fn zero(&self) -> Form {
        Form::zero(self.form_degree())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub label: String,
    pub slot: Slot,
}

impl Component {
    pub fn new(label: &str, slot: Slot) -> Self {
        Component { label: label.to_string(), slot }
    }
}

/// Operators on forms used to build differentials and chain maps.
#[derive(Debug, Clone, PartialEq)]
pub enum Op {
    Id,
    D,
    Del,
    Delbar,
    Pi(u32),
    Neg,
    Scale(Scalar),
    /// Apply left to right.
    Then(Vec<Op>),
}

impl Op {
    pub fn apply(&self, f: &Form) -> Result<Form> {
        Ok(match self {
            Op::Id => f.clone(),
            Op::D => f.d()?,
            Op::Del => f.del()?,
            Op::Delbar => f.delbar()?,
            Op::Pi(p) => f.pi(*p),
            Op::Neg => f.neg(),
            Op::Scale(s) => f.map(|e| e.scale(s.clone())),
            Op::Then(ops) => {
                let mut g = f.clone();
                for op in ops {
                    g = op.apply(&g)?;
                }
                g
            }
        })
    }

    pub fn neg(self) -> Op {
        Op::Then(vec![self, Op::Neg])
    }
}

/// A linear map from component `src` of one degree to component `dst` of another.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub src: usize,
    pub dst: usize,
    pub op: Op,
}

impl Entry {
    pub fn new(src: usize, dst: usize, op: Op) -> Self {
        Entry { src, dst, op }
    }
}

/// Apply a block matrix of operators to a vector of forms.
pub fn apply_entries(entries: &[Entry], input: &[Form], out_slots: &[Component]) -> Result<Vec<Form>> {
    let mut out: Vec<Form> = out_slots.iter().map(|c| c.slot.zero()).collect();
    for e in entries {
        let v = e.op.apply(&input[e.src])?;
        out[e.dst] = out[e.dst].add(&v)?;
    }
    Ok(out)
}

/// A bounded complex of sheaves on the curve, degrees 0..=top, described by
/// per-degree component lists and block differentials.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientComplex {
    pub name: String,
    pub components: Vec<Vec<Component>>,
    /// `differential[p]` maps degree p to degree p + 1.
    pub differential: Vec<Vec<Entry>>,
}

impl CoefficientComplex {
    pub fn new(name: &str, components: Vec<Vec<Component>>, differential: Vec<Vec<Entry>>) -> Self {
        assert_eq!(differential.len() + 1, components.len(), "one differential per consecutive pair");
        CoefficientComplex { name: name.to_string(), components, differential }
    }

    pub fn top(&self) -> usize {
        self.components.len() - 1
    }

    pub fn slots(&self, p: usize) -> &[Component] {
        self.components.get(p).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn zero(&self, p: usize) -> Vec<Form> {
        self.slots(p).iter().map(|c| c.slot.zero()).collect()
    }

    /// Check that a value vector fits the slots of degree p.
    pub fn check(&self, p: usize, v: &[Form]) -> Result<()> {
        let slots = self.slots(p);
        if slots.len() != v.len() {
            return Err(Error::SlotMismatch(format!(
                "{} degree {}: expected {} components, got {}",
                self.name,
                p,
                slots.len(),
                v.len()
            )));
        }
        for (c, f) in slots.iter().zip(v) {
            if c.slot.form_degree() != f.degree() {
                return Err(Error::SlotMismatch(format!(
                    "{} slot {} wants degree {}, got {}",
                    self.name,
                    c.label,
                    c.slot.form_degree(),
                    f.degree()
                )));
            }
        }
        Ok(())
    }

    /// The coefficient differential from degree p; empty past the top.
    pub fn d(&self, p: usize, v: &[Form]) -> Result<Vec<Form>> {
        self.check(p, v)?;
        if p >= self.top() {
            return Ok(Vec::new());
        }
        apply_entries(&self.differential[p], v, self.slots(p + 1))
    }
}

/// A degreewise map between coefficient complexes.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainMap {
    pub entries: Vec<Vec<Entry>>,
}

impl ChainMap {
    pub fn apply(&self, p: usize, v: &[Form], target: &CoefficientComplex) -> Result<Vec<Form>> {
        match self.entries.get(p) {
            Some(e) => apply_entries(e, v, target.slots(p)),
            None => Ok(target.zero(p)),
        }
    }
}

/// Z(j)_D = Z(j) → O → Ω¹ → … → Ω^{j−1}.
pub fn deligne_complex(j: usize) -> Arc<CoefficientComplex> {
    let mut comps = vec![vec![Component::new(&format!("Z({})", j), Slot::Lattice(j as i32))]];
    let mut diff = Vec::new();
    for k in 1..=j {
        let label = if k == 1 { "O".to_string() } else { format!("Omega^{}", k - 1) };
        comps.push(vec![Component::new(&label, Slot::Holomorphic((k - 1) as u8))]);
        diff.push(if k == 1 { vec![Entry::new(0, 0, Op::Id)] } else { vec![Entry::new(0, 0, Op::D)] });
    }
    Arc::new(CoefficientComplex::new(&format!("Z({})_D", j), comps, diff))
}

/// The three-term model Z(1) → O → E⁰ of metrized line bundles, with map −π₀.
pub fn hh1() -> Arc<CoefficientComplex> {
    Arc::new(CoefficientComplex::new(
        "Z(1)->O->E0",
        vec![
            vec![Component::new("Z(1)", Slot::Lattice(1))],
            vec![Component::new("O", Slot::Holomorphic(0))],
            vec![Component::new("E0", Slot::Real(0, 0))],
        ],
        vec![vec![Entry::new(0, 0, Op::Id)], vec![Entry::new(0, 0, Op::Pi(0).neg())]],
    ))
}

/// Target of the hermitian product: Z(2) → O → E⁰(1), with map −π₁.
pub fn hermitian_target() -> Arc<CoefficientComplex> {
    Arc::new(CoefficientComplex::new(
        "Z(2)->O->E0(1)",
        vec![
            vec![Component::new("Z(2)", Slot::Lattice(2))],
            vec![Component::new("O", Slot::Holomorphic(0))],
            vec![Component::new("E0(1)", Slot::Real(0, 1))],
        ],
        vec![vec![Entry::new(0, 0, Op::Id)], vec![Entry::new(0, 0, Op::Pi(1).neg())]],
    ))
}

/// Λ(2) = Z(2) → O → E¹(1), with map −π₁∘d.
pub fn lambda2() -> Arc<CoefficientComplex> {
    Arc::new(CoefficientComplex::new(
        "Lambda(2)",
        vec![
            vec![Component::new("Z(2)", Slot::Lattice(2))],
            vec![Component::new("O", Slot::Holomorphic(0))],
            vec![Component::new("E1(1)", Slot::Real(1, 1))],
        ],
        vec![vec![Entry::new(0, 0, Op::Id)], vec![Entry::new(0, 0, Op::Then(vec![Op::D, Op::Pi(1), Op::Neg]))]],
    ))
}

fn gamma_head() -> (Vec<Vec<Component>>, Vec<Vec<Entry>>) {
    (
        vec![
            vec![Component::new("Z(2)", Slot::Lattice(2))],
            vec![Component::new("O", Slot::Holomorphic(0))],
            vec![Component::new("Omega1", Slot::Holomorphic(1)), Component::new("E0(1)", Slot::Real(0, 1))],
        ],
        vec![
            vec![Entry::new(0, 0, Op::Id)],
            vec![Entry::new(0, 0, Op::D), Entry::new(0, 1, Op::Pi(1).neg())],
        ],
    )
}

/// Γ̃(2) = Z(2) → O → Ω¹ ⊕ E⁰(1), with map (d, −π₁).
pub fn gamma_tilde2() -> Arc<CoefficientComplex> {
    let (c, d) = gamma_head();
    Arc::new(CoefficientComplex::new("GammaTilde(2)", c, d))
}

/// Γ(2): Γ̃(2) continued by (π₁ + d) into E¹(1).
pub fn gamma2() -> Arc<CoefficientComplex> {
    let (mut c, mut d) = gamma_head();
    c.push(vec![Component::new("E1(1)", Slot::Real(1, 1))]);
    d.push(vec![Entry::new(0, 0, Op::Pi(1)), Entry::new(1, 0, Op::D)]);
    Arc::new(CoefficientComplex::new("Gamma(2)", c, d))
}

/// The full hermitian holomorphic complex in weight one on a curve:
/// Z(1) → O → (η, ξ, σ) → (κ, τ), with η ∈ F¹A²∩E²(1), ξ ∈ F¹A¹, σ ∈ E⁰,
/// κ ∈ F¹A², τ ∈ E¹.
pub fn dhh1() -> Arc<CoefficientComplex> {
    Arc::new(CoefficientComplex::new(
        "D_hh(1)",
        vec![
            vec![Component::new("Z(1)", Slot::Lattice(1))],
            vec![Component::new("O", Slot::Holomorphic(0))],
            vec![
                Component::new("eta", Slot::Real(2, 1)),
                Component::new("xi", Slot::Filtered(1)),
                Component::new("sigma", Slot::Real(0, 0)),
            ],
            vec![Component::new("kappa", Slot::Filtered(2)), Component::new("tau", Slot::Real(1, 0))],
        ],
        vec![
            vec![Entry::new(0, 0, Op::Id)],
            vec![Entry::new(0, 1, Op::D.neg()), Entry::new(0, 2, Op::Pi(0))],
            vec![
                Entry::new(0, 0, Op::Id),
                Entry::new(1, 0, Op::D.neg()),
                Entry::new(1, 1, Op::Pi(0)),
                Entry::new(2, 1, Op::D),
            ],
        ],
    ))
}

/// Z(j) as a complex concentrated in degree zero.
pub fn lattice(j: i32) -> Arc<CoefficientComplex> {
    Arc::new(CoefficientComplex::new(
        &format!("Z({})", j),
        vec![vec![Component::new(&format!("Z({})", j), Slot::Lattice(j))]],
        vec![],
    ))
}

/// Smooth forms A⁰ → A¹ → A².
pub fn smooth_forms() -> Arc<CoefficientComplex> {
    Arc::new(CoefficientComplex::new(
        "A",
        (0..3).map(|k| vec![Component::new(&format!("A{}", k), Slot::Smooth(k))]).collect(),
        vec![vec![Entry::new(0, 0, Op::D)], vec![Entry::new(0, 0, Op::D)]],
    ))
}

/// F¹A: 0 → A^{1,0} → A².
pub fn hodge_f1() -> Arc<CoefficientComplex> {
    Arc::new(CoefficientComplex::new(
        "F1A",
        vec![
            vec![],
            vec![Component::new("F1A1", Slot::Filtered(1))],
            vec![Component::new("F1A2", Slot::Filtered(2))],
        ],
        vec![vec![], vec![Entry::new(0, 0, Op::D)]],
    ))
}

/// Every named complex, for enumeration in checks.
pub fn registered_complexes() -> Vec<Arc<CoefficientComplex>> {
    vec![
        deligne_complex(1),
        deligne_complex(2),
        hh1(),
        hermitian_target(),
        lambda2(),
        gamma_tilde2(),
        gamma2(),
        dhh1(),
        smooth_forms(),
        hodge_f1(),
    ]
}

/// The lattice element n·(2πi)^j as a degree-0 form.
pub fn lattice_value(n: i64, j: i32) -> Form {
    Form::function(Expr::scalar(Scalar::int(n).mul(&Scalar::two_pi_i(j))))
}
