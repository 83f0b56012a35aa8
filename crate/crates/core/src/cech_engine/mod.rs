//! Čech cochains with values in complexes of sheaves on a sector cover, the total
//! differential, cup products, and numeric cocycle checks.

mod cochain;
mod complex;
mod cone;
mod products;
pub mod random;

use std::sync::Arc;

pub use cochain::{
    is_cocycle, is_cocycle_with, residual_report, CechCochain, CocycleReport, Pairing, SimplexResidual,
    DEFAULT_SAMPLES,
};
pub use complex::{
    apply_entries, deligne_complex, dhh1, gamma2, gamma_tilde2, hermitian_target, hh1, hodge_f1, lambda2, lattice,
    lattice_value, registered_complexes, smooth_forms, ChainMap, CoefficientComplex, Component, Entry, Op, Slot,
};
pub use cone::{
    hermitian_cone_product, identity_diagram, real_deligne_diagram, real_deligne_product, ConeDiagram, ConeElement,
    ConeProduct, Homotopy,
};
pub use products::{
    deligne_cup, deligne_pairing, hermitian_commutator_defect, hermitian_commutator_homotopy, hermitian_cup,
    hermitian_pairing, leibniz_defect, transposed, wedge_pairing,
};

use num_complex::Complex64;
use serde::Serialize;

use crate::cover_nerve::{LogBranches, SectorCover, Simplex};
use crate::error::Result;
use crate::form_calculus::{Expr, Form};

/// Largest value of a pointwise residual over seeded samples of the given simplices,
/// with the simplex where it occurs.
pub fn sup_residual(
    cover: &SectorCover,
    simplices: &[Simplex],
    samples: usize,
    seed: u64,
    f: impl Fn(&Simplex, Complex64) -> Result<f64>,
) -> Result<(f64, Option<Simplex>)> {
    let mut worst = (0.0, None);
    for (k, s) in simplices.iter().enumerate() {
        for w in cover.sample_points(s, samples, seed.wrapping_add(k as u64))? {
            let r = f(s, w)?;
            if r > worst.0 || worst.1.is_none() {
                worst = (r.max(worst.0), Some(s.clone()));
            }
        }
    }
    Ok(worst)
}

/// One slot of a cochain value, rendered for output.
#[derive(Debug, Clone, Serialize)]
pub struct CochainRecord {
    pub slot: String,
    pub simplex: String,
    pub value: String,
    /// Numeric samples as (re, im) pairs, one per coefficient and point.
    pub samples: Vec<(f64, f64)>,
}

/// Flatten a cochain into records with a few numeric samples per slot.
pub fn cochain_records(c: &CechCochain, samples: usize, seed: u64) -> Result<Vec<CochainRecord>> {
    let mut out = Vec::new();
    for (s, vals) in c.values() {
        let p = c.internal_degree(s).expect("stored simplex carries a degree");
        let pts = c.cover().sample_points(s, samples, seed)?;
        for (comp, f) in c.complex().components[p].iter().zip(vals) {
            let mut sm = Vec::new();
            for &w in &pts {
                for z in f.eval(w)? {
                    sm.push((z.re, z.im));
                }
            }
            out.push(CochainRecord {
                slot: comp.label.clone(),
                simplex: s.to_string(),
                value: f.simplify().to_string(),
                samples: sm,
            });
        }
    }
    Ok(out)
}

/// The class of an invertible function in Z(1)_D: (log_j f − log_i f, log_i f).
pub fn function_class(b: &Arc<LogBranches>) -> Result<CechCochain> {
    let cover = b.cover().clone();
    let mut c = CechCochain::zero(deligne_complex(1), cover, 1);
    for s in c.support() {
        let v = match s.dim() {
            0 => Expr::log(b, s.0[0]),
            _ => Expr::two_pi_i(1) * Expr::branch_int(b, s.0[0], s.0[1]),
        };
        c.set(s, vec![Form::function(v)])?;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;

    use super::random::random_cochain;
    use super::*;
    use crate::cover_nerve::assign_branches;
    use crate::exact_algebra::{parse_rational, GaussianRational, RationalFunction};

    fn cover() -> Arc<SectorCover> {
        Arc::new(SectorCover::new(GaussianRational::zero(), 0.5, 1.5, 3, 4.5).unwrap())
    }

    fn vanishes(c: &CechCochain, tol: f64) -> bool {
        let r = residual_report(c, tol, 8, 11).unwrap();
        if !r.pass {
            eprintln!("{} degree {}: residual {} at {:?}", r.complex, r.degree, r.max_residual, r.worst_simplex);
        }
        r.pass
    }

    fn rf(s: &str) -> RationalFunction {
        parse_rational(s).unwrap()
    }

    #[test]
    fn zero_cochain() {
        let c = CechCochain::zero(deligne_complex(2), cover(), 2);
        assert!(c.total_d().unwrap().values().is_empty());
        let r = is_cocycle(&c, 1e-10).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_residual, 0.0);
    }

    #[test]
    fn d_of_global_function() {
        let cv = cover();
        let mut c = CechCochain::zero(smooth_forms(), cv.clone(), 0);
        for k in 0..3 {
            c.set(Simplex(vec![k]), vec![Form::function(Expr::rat(&rf("z")))]).unwrap();
        }
        let d = c.total_d().unwrap().simplify();
        for k in 0..3 {
            assert_eq!(d.value(&Simplex(vec![k]))[0], Form::one_form(Expr::one(), Expr::zero()));
        }
        for s in [vec![0, 1], vec![1, 2], vec![0, 2]] {
            assert!(d.value(&Simplex(s))[0].is_zero());
        }
    }

    #[test]
    fn d_squared_vanishes() {
        let cv = cover();
        for cx in registered_complexes() {
            for n in 0..=3 {
                let c = random_cochain(cx.clone(), cv.clone(), n, 7 + n as u64).unwrap();
                let dd = c.total_d().unwrap().total_d().unwrap();
                assert!(vanishes(&dd, 1e-9), "{} degree {}", cx.name, n);
            }
        }
    }

    #[test]
    fn cone_complexes_square_to_zero() {
        let cv = cover();
        for cx in [real_deligne_diagram(1).complex(), identity_diagram(deligne_complex(1)).complex()] {
            for n in 0..=3 {
                let c = random_cochain(cx.clone(), cv.clone(), n, 3 + n as u64).unwrap();
                let dd = c.total_d().unwrap().total_d().unwrap();
                assert!(vanishes(&dd, 1e-9), "{} degree {}", cx.name, n);
            }
        }
    }

    #[test]
    fn set_rejects_bad_slots() {
        let mut c = CechCochain::zero(deligne_complex(1), cover(), 1);
        assert!(c.set(Simplex(vec![0]), vec![Form::zero(1)]).is_err());
        assert!(c.set(Simplex(vec![1, 0]), vec![Form::zero(0)]).is_err());
        assert!(c.set(Simplex(vec![0, 1, 2]), vec![Form::zero(0)]).is_err());
    }

    #[test]
    fn unit_cup_is_identity() {
        let cv = cover();
        let mut one = CechCochain::zero(deligne_complex(0), cv.clone(), 0);
        for k in 0..3 {
            one.set(Simplex(vec![k]), vec![Form::function(Expr::one())]).unwrap();
        }
        let b = random_cochain(deligne_complex(1), cv, 1, 5).unwrap();
        let p = one.cup(&b, &deligne_pairing(0, 1)).unwrap();
        assert!(vanishes(&p.sub(&b).unwrap(), 1e-12));
    }

    #[test]
    fn koszul_sign() {
        let cv = cover();
        let e = Simplex(vec![0, 1]);
        let a = CechCochain::zero(deligne_complex(1), cv.clone(), 1).with(e.clone(), vec![lattice_value(1, 1)]).unwrap();
        let b = CechCochain::zero(deligne_complex(1), cv, 1)
            .with(Simplex(vec![1]), vec![Form::function(Expr::rat(&rf("z")))])
            .unwrap();
        let p = deligne_cup(&a, &b).unwrap().simplify();
        let want = Form::function(Expr::rat(&rf("z")).scale(crate::exact_algebra::Scalar::two_pi_i(1))).neg().simplify();
        assert_eq!(p.value(&e)[0], want);
    }

    #[test]
    fn deligne_examples() {
        let cv = cover();
        let v = Simplex(vec![0]);
        let a = CechCochain::zero(deligne_complex(1), cv.clone(), 0).with(v.clone(), vec![lattice_value(2, 1)]).unwrap();
        let b = CechCochain::zero(deligne_complex(1), cv.clone(), 0).with(v.clone(), vec![lattice_value(3, 1)]).unwrap();
        let p = deligne_cup(&a, &b).unwrap().simplify();
        assert_eq!(p.complex().name, "Z(2)_D");
        assert_eq!(p.value(&v)[0], lattice_value(6, 2).simplify());

        let lf = assign_branches(&rf("z-3"), &cv).unwrap();
        let g = rf("z+2");
        let a = CechCochain::zero(deligne_complex(1), cv.clone(), 1).with(v.clone(), vec![Form::function(Expr::log(&lf, 0))]).unwrap();
        let b = CechCochain::zero(deligne_complex(1), cv.clone(), 1).with(v.clone(), vec![Form::function(Expr::rat(&g))]).unwrap();
        let p = deligne_cup(&a, &b).unwrap().simplify();
        let want = Form::one_form(Expr::log(&lf, 0), Expr::zero()).simplify();
        assert_eq!(p.value(&v)[0], want);

        // Non-top right factor: f ∈ O against a lattice value gives zero.
        let b0 = CechCochain::zero(deligne_complex(1), cv, 0).with(v.clone(), vec![lattice_value(1, 1)]).unwrap();
        assert!(deligne_cup(&a, &b0).unwrap().values().values().all(|v| v.iter().all(|f| f.is_zero())));
    }

    #[test]
    fn hermitian_examples() {
        let cv = cover();
        let v = Simplex(vec![0]);
        let lf = assign_branches(&rf("z-3"), &cv).unwrap();
        let lg = assign_branches(&rf("z+2"), &cv).unwrap();
        let a = CechCochain::zero(deligne_complex(1), cv.clone(), 1).with(v.clone(), vec![Form::function(Expr::log(&lf, 0))]).unwrap();
        let b = CechCochain::zero(deligne_complex(1), cv, 1).with(v.clone(), vec![Form::function(Expr::log(&lg, 0))]).unwrap();
        let p = hermitian_cup(&a, &b).unwrap();
        assert_eq!(p.complex().name, hermitian_target().name);
        let want = -(Expr::log(&lf, 0).pi(1) * Expr::log(&lg, 0).pi(0));
        assert!(crate::form_calculus::is_zero(&(p.value(&v)[0].coeff(0).clone() - want)));
    }

    #[test]
    fn products_are_chain_maps() {
        let cv = cover();
        let pairs = [(0, 0), (0, 1), (1, 0), (1, 1), (0, 2), (2, 0)];
        for (k, &(na, nb)) in pairs.iter().enumerate() {
            let a = random_cochain(deligne_complex(1), cv.clone(), na, 100 + k as u64).unwrap();
            let b = random_cochain(deligne_complex(1), cv.clone(), nb, 200 + k as u64).unwrap();
            assert!(vanishes(&leibniz_defect(&a, &b, &deligne_pairing(1, 1)).unwrap(), 1e-9), "deligne {:?}", (na, nb));
            assert!(vanishes(&leibniz_defect(&a, &b, &hermitian_pairing()).unwrap(), 1e-9), "hermitian {:?}", (na, nb));
            let c = random_cochain(deligne_complex(2), cv.clone(), nb, 300 + k as u64).unwrap();
            assert!(vanishes(&leibniz_defect(&a, &c, &deligne_pairing(1, 2)).unwrap(), 1e-9), "deligne12 {:?}", (na, nb));
        }
    }

    #[test]
    fn symmetrized_hermitian_product_is_exact() {
        let cv = cover();
        let a = function_class(&assign_branches(&rf("z"), &cv).unwrap()).unwrap();
        let b = function_class(&assign_branches(&rf("z^2-5"), &cv).unwrap()).unwrap();
        assert!(is_cocycle(&a, 1e-10).unwrap().pass);
        assert!(vanishes(&hermitian_commutator_defect(&a, &b).unwrap(), 1e-9));
        assert!(vanishes(&hermitian_commutator_defect(&b, &a).unwrap(), 1e-9));
    }

    fn halves() -> Vec<BigRational> {
        vec![BigRational::new(0.into(), 1.into()), BigRational::new(1.into(), 2.into()), BigRational::new(1.into(), 1.into())]
    }

    #[test]
    fn cone_products_are_chain_maps() {
        let cv = cover();
        for (name, prod) in [("real", real_deligne_product(1, 1)), ("hermitian", hermitian_cone_product())] {
            for alpha in halves() {
                let pr = prod.pairing(alpha.clone());
                for (k, &(na, nb)) in [(0, 0), (0, 1), (1, 1), (1, 0), (2, 0), (1, 2)].iter().enumerate() {
                    let a = random_cochain(pr.left.clone(), cv.clone(), na, 40 + k as u64).unwrap();
                    let b = random_cochain(pr.right.clone(), cv.clone(), nb, 50 + k as u64).unwrap();
                    assert!(vanishes(&leibniz_defect(&a, &b, &pr).unwrap(), 1e-9), "{} alpha {} {:?}", name, alpha, (na, nb));
                }
            }
        }
    }

    #[test]
    fn cone_alpha_difference() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let cv = cover();
        let pts = cv.sample_points(&Simplex(vec![0]), 10, 1).unwrap();
        for prod in [real_deligne_product(1, 2), hermitian_cone_product()] {
            let (c1, c2) = (prod.d1.complex(), prod.d2.complex());
            for (n1, n2) in [(0, 1), (1, 1), (1, 0), (2, 0), (0, 2)] {
                let mk = |c: &CoefficientComplex, n: usize, rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Form> {
                    c.slots(n).iter().map(|s| random::random_form(s.slot, rng)).collect()
                };
                let a = prod.d1.split(n1, &mk(&c1, n1, &mut rng));
                let b = prod.d2.split(n2, &mk(&c2, n2, &mut rng));
                let hs = halves();
                for (x, y) in [(&hs[0], &hs[1]), (&hs[2], &hs[0]), (&hs[1], &hs[2])] {
                    let zx = prod.cup_alpha(n1, &a, n2, &b, x).unwrap().z;
                    let zy = prod.cup_alpha(n1, &a, n2, &b, y).unwrap().z;
                    let pred = prod.alpha_difference(n1, &a, n2, &b, x, y).unwrap();
                    for ((u, v), p) in zx.iter().zip(&zy).zip(&pred) {
                        let r = u.sub(v).unwrap().sub(p).unwrap();
                        for &w in &pts {
                            assert!(r.max_abs(w).unwrap() < 1e-10);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cone_degree_zero_strict() {
        let prod = real_deligne_product(1, 1);
        let a = ConeElement { x: vec![lattice_value(2, 1)], y: vec![], z: vec![] };
        let b = ConeElement { x: vec![lattice_value(3, 1)], y: vec![], z: vec![] };
        let c = prod.cup_alpha(0, &a, 0, &b, &BigRational::new(1.into(), 3.into())).unwrap();
        assert_eq!(c.x[0].simplify(), lattice_value(6, 2).simplify());
        assert!(c.y.is_empty() && c.z.is_empty());
        let mut missing = prod.clone();
        missing.h = None;
        assert!(matches!(missing.cup_alpha(0, &a, 0, &b, &BigRational::new(0.into(), 1.into())), Err(crate::Error::HomotopyUndefined)));
    }

    #[test]
    fn corrupted_lattice_slot_fails_exactly() {
        let cv = cover();
        let a = function_class(&assign_branches(&rf("z"), &cv).unwrap()).unwrap();
        let mut bad = a.clone();
        let e = Simplex(vec![0, 2]);
        let v = bad.value(&e)[0].add(&lattice_value(1, 1)).unwrap();
        bad.set(e, vec![v]).unwrap();
        let r = is_cocycle(&bad, 1e-10).unwrap();
        assert!(!r.pass);
        assert!(r.worst_simplex.is_some());
        assert!(r.records.iter().any(|x| !x.pass && x.simplex == "[0,2]"));
    }
}
