//! Seeded random values and cochains for property checks.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cochain::CechCochain;
use super::complex::{CoefficientComplex, Slot};
use crate::cover_nerve::SectorCover;
use crate::error::Result;
use crate::exact_algebra::{GaussianRational, Poly, RationalFunction, Scalar};
use crate::form_calculus::{Expr, Form};

fn small(rng: &mut impl Rng) -> GaussianRational {
    GaussianRational::from_parts((rng.random_range(-3..=3), 1), (rng.random_range(-3..=3), 2))
}

/// A random Laurent polynomial c₀z^{−1} + c₁ + c₂z + c₃z², holomorphic on annuli about 0.
pub fn random_holomorphic(rng: &mut impl Rng) -> Expr {
    let p = Poly::new((0..4).map(|_| small(rng)).collect());
    let r = RationalFunction::new(p, Poly::z()).expect("denominator z");
    Expr::rat(&r)
}

/// A random smooth function h₁ + h₂·conj(h₃).
pub fn random_smooth(rng: &mut impl Rng) -> Expr {
    random_holomorphic(rng) + random_holomorphic(rng) * random_holomorphic(rng).conj()
}

/// A random value fitting a slot.
pub fn random_form(slot: Slot, rng: &mut impl Rng) -> Form {
    match slot {
        Slot::Lattice(j) => Form::function(Expr::scalar(Scalar::int(rng.random_range(-3..=3)).mul(&Scalar::two_pi_i(j)))),
        Slot::Holomorphic(0) => Form::function(random_holomorphic(rng)),
        Slot::Holomorphic(1) => Form::one_form(random_holomorphic(rng), Expr::zero()),
        Slot::Holomorphic(k) => Form::zero(k),
        Slot::Smooth(k) => smooth(k, rng),
        Slot::Filtered(1) => Form::one_form(random_smooth(rng), Expr::zero()),
        Slot::Filtered(k) => smooth(k, rng),
        Slot::Real(k, j) => smooth(k, rng).pi(j),
    }
}

fn smooth(k: u8, rng: &mut impl Rng) -> Form {
    match k {
        0 => Form::function(random_smooth(rng)),
        1 => Form::one_form(random_smooth(rng), random_smooth(rng)),
        _ => Form::two_form(random_smooth(rng)),
    }
}

/// A cochain with random values on every simplex that can carry one.
pub fn random_cochain(
    complex: Arc<CoefficientComplex>,
    cover: Arc<SectorCover>,
    degree: usize,
    seed: u64,
) -> Result<CechCochain> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = CechCochain::zero(complex.clone(), cover, degree);
    for s in c.support() {
        let p = c.internal_degree(&s).expect("support simplex");
        let v = complex.slots(p).iter().map(|comp| random_form(comp.slot, &mut rng)).collect();
        c.set(s, v)?;
    }
    Ok(c)
}
