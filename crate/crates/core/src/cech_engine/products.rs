use std::sync::Arc;

use super::cochain::{CechCochain, Pairing};
use super::complex::{deligne_complex, hermitian_target, CoefficientComplex};
use crate::error::{Error, Result};
use crate::form_calculus::Form;

/// x ∧ y, or `None` when the result would exceed degree two.
pub(crate) fn wedge_or_zero(x: &Form, y: &Form) -> Result<Option<Form>> {
    if x.degree() + y.degree() > 2 {
        return Ok(None);
    }
    x.wedge(y).map(Some)
}

/// Beilinson's product Z(j)_D ⊗ Z(k)_D → Z(j+k)_D: x·y if deg x = 0, x ∧ dy if
/// deg x > 0 and deg y = k, zero otherwise.
pub fn deligne_pairing(j: usize, k: usize) -> Pairing {
    Pairing::new(
        &format!("deligne({},{})", j, k),
        deligne_complex(j),
        deligne_complex(k),
        deligne_complex(j + k),
        move |p, a, r, b| {
            let (x, y) = (&a[0], &b[0]);
            if p == 0 || k == 0 {
                return Ok(wedge_or_zero(x, y)?.map(|f| vec![f]));
            }
            if r == k {
                if y.degree() >= 2 {
                    return Ok(None);
                }
                let dy = if r == 0 { Form::zero(1) } else { y.d()? };
                return Ok(wedge_or_zero(x, &dy)?.map(|f| vec![f]));
            }
            Ok(None)
        },
    )
}

/// The hermitian product (Z(1) → O) ⊗ (Z(1) → O) → Z(2) → O → E⁰(1), which replaces
/// f ⊗ g ↦ f dg by f ⊗ g ↦ −π₁(f)π₀(g).
pub fn hermitian_pairing() -> Pairing {
    Pairing::new("hermitian", deligne_complex(1), deligne_complex(1), hermitian_target(), |p, a, r, b| {
        let (x, y) = (a[0].coeff(0), b[0].coeff(0));
        Ok(match (p, r) {
            (0, _) => Some(vec![Form::function(x.clone() * y.clone())]),
            (1, 1) => Some(vec![Form::function(-(x.pi(1) * y.pi(0)))]),
            _ => None,
        })
    })
}

/// The transposed product P^τ(a ⊗ b) = (−1)^{|a||b|} P(b ⊗ a).
pub fn transposed(p: &Pairing) -> Pairing {
    let inner = p.clone();
    Pairing::new(&format!("{}^t", p.name), p.right.clone(), p.left.clone(), p.target.clone(), move |pa, a, rb, b| {
        let v = inner.apply(rb, b, pa, a)?;
        if v.is_empty() {
            return Ok(None);
        }
        Ok(Some(if (pa * rb) % 2 == 1 { v.iter().map(|f| f.neg()).collect() } else { v }))
    })
}

/// Products of forms, x ∧ y.
pub fn wedge_pairing(
    left: Arc<CoefficientComplex>,
    right: Arc<CoefficientComplex>,
    target: Arc<CoefficientComplex>,
) -> Pairing {
    Pairing::new("wedge", left, right, target, |_, a, _, b| {
        if a.is_empty() || b.is_empty() {
            return Ok(None);
        }
        Ok(wedge_or_zero(&a[0], &b[0])?.map(|f| vec![f]))
    })
}

fn deligne_weight(c: &CechCochain) -> Result<usize> {
    let name = &c.complex().name;
    let w = name
        .strip_prefix("Z(")
        .and_then(|s| s.strip_suffix(")_D"))
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::PairingUndefined(name.clone(), "Z(k)_D".into()))?;
    Ok(w)
}

/// Cup product in Deligne cohomology via [`deligne_pairing`].
pub fn deligne_cup(a: &CechCochain, b: &CechCochain) -> Result<CechCochain> {
    let j = deligne_weight(a)?;
    let k = deligne_weight(b)?;
    a.cup(b, &deligne_pairing(j, k))
}

/// Cup product of two (Z(1) → O)-cochains through the hermitian pairing.
pub fn hermitian_cup(a: &CechCochain, b: &CechCochain) -> Result<CechCochain> {
    a.cup(b, &hermitian_pairing())
}

/// The homotopy H with D(H) = a ∪ b + b ∪ a for degree-one hermitian cocycles
/// a = (a_ij, F_i), b = (b_ij, G_i): H = (−a_ij b_ij, F_i G_i).
pub fn hermitian_commutator_homotopy(a: &CechCochain, b: &CechCochain) -> Result<CechCochain> {
    if a.degree() != 1 || b.degree() != 1 {
        return Err(Error::HomotopyUndefined);
    }
    for c in [a, b] {
        if c.complex().name != deligne_complex(1).name {
            return Err(Error::PairingUndefined(c.complex().name.clone(), "Z(1)_D".into()));
        }
    }
    let mut h = CechCochain::zero(hermitian_target(), a.cover().clone(), 1);
    for s in a.support() {
        let (va, vb) = (a.value(&s), b.value(&s));
        let (x, y) = (va[0].coeff(0).clone(), vb[0].coeff(0).clone());
        let v = if s.dim() == 1 { -(x * y) } else { x * y };
        h.set(s, vec![Form::function(v)])?;
    }
    Ok(h)
}

/// The symmetrized hermitian product minus D of its homotopy.
pub fn hermitian_commutator_defect(a: &CechCochain, b: &CechCochain) -> Result<CechCochain> {
    let sym = hermitian_cup(a, b)?.add(&hermitian_cup(b, a)?)?;
    sym.sub(&hermitian_commutator_homotopy(a, b)?.total_d()?)
}

/// Leibniz defect D(a∪b) − Da∪b − (−1)^{|a|} a∪Db.
pub fn leibniz_defect(a: &CechCochain, b: &CechCochain, pairing: &Pairing) -> Result<CechCochain> {
    let lhs = a.cup(b, pairing)?.total_d()?;
    let t1 = a.total_d()?.cup(b, pairing)?;
    let t2 = a.cup(&b.total_d()?, pairing)?;
    let t2 = if a.degree() % 2 == 1 { t2.neg() } else { t2 };
    lhs.sub(&t1)?.sub(&t2)
}
