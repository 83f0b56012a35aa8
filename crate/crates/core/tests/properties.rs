//! Randomized invariants across the modules.

use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use deligne::bundle_data::{canonical_connection, check_connection, HermitianMetricData, LineBundleData};
use deligne::cech_engine::random::{random_cochain, random_smooth};
use deligne::cech_engine::{registered_complexes, residual_report};
use deligne::cover_nerve::{assign_branches, SectorCover};
use deligne::exact_algebra::{tame_symbol_value, GaussianRational, Poly, RationalFunction};
use deligne::form_calculus::{finite_difference, Expr, Form};
use deligne::heisenberg_model::{HeisLatticeElem, HeisNumeric};
use deligne::hodge_tate::{big_period, half_log_b, half_log_b_series, PeriodData};
use deligne::report::random_rational;

fn gaussian() -> impl Strategy<Value = GaussianRational> {
    (-4i64..=4, -4i64..=4, 1i64..=3).prop_map(|(a, b, d)| GaussianRational::from_parts((a, d), (b, d)))
}

fn poly(max_len: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(gaussian(), 1..=max_len).prop_map(Poly::new)
}

fn rational() -> impl Strategy<Value = RationalFunction> {
    (poly(4), poly(3)).prop_filter_map("nonzero numerator and denominator", |(n, d)| {
        if n.is_zero() || d.is_zero() {
            None
        } else {
            RationalFunction::new(n, d).ok()
        }
    })
}

/// Rational functions with a chosen order of vanishing at 0.
fn with_valuation() -> impl Strategy<Value = RationalFunction> {
    (-3i32..=3, rational()).prop_filter_map("defined at the origin", |(v, r)| {
        let shift = r.valuation(&GaussianRational::zero()).ok()?;
        r.mul(&RationalFunction::z().pow(v - shift).ok()?).ok()
    })
}

fn point() -> impl Strategy<Value = Complex64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(x, y)| Complex64::new(x, y))
}

fn cover(n: usize, w: f64) -> Arc<SectorCover> {
    Arc::new(SectorCover::new(GaussianRational::zero(), 0.5, 1.5, n, w).unwrap())
}

fn near_pole(r: &RationalFunction, w: Complex64) -> bool {
    r.singularities().iter().any(|s| (s - w).norm() < 0.2)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, .. ProptestConfig::default() })]

    #[test]
    fn derivative_matches_finite_difference(r in rational(), w in point()) {
        prop_assume!(!near_pole(&r, w));
        let exact = r.derivative().unwrap().eval(w).unwrap();
        let (dz, dzbar) = finite_difference(|u| r.eval(u), w, 1e-5).unwrap();
        let scale = exact.norm().max(1.0);
        prop_assert!((dz - exact).norm() / scale < 1e-6);
        prop_assert!(dzbar.norm() / scale < 1e-6);
    }

    #[test]
    fn valuation_is_additive(r in rational(), s in rational(), p in gaussian()) {
        let v = r.mul(&s).unwrap().valuation(&p).unwrap();
        prop_assert_eq!(v, r.valuation(&p).unwrap() + s.valuation(&p).unwrap());
    }

    #[test]
    fn tame_symbol_is_antisymmetric(f in with_valuation(), g in with_valuation()) {
        let p = GaussianRational::zero();
        let a = tame_symbol_value(&f, &g, &p).unwrap();
        let b = tame_symbol_value(&g, &f, &p).unwrap();
        prop_assert_eq!(&a * &b, GaussianRational::one());
    }

    #[test]
    fn tame_symbol_is_bimultiplicative(f1 in with_valuation(), f2 in with_valuation(), g in with_valuation()) {
        let p = GaussianRational::zero();
        let lhs = tame_symbol_value(&f1.mul(&f2).unwrap(), &g, &p).unwrap();
        let rhs = &tame_symbol_value(&f1, &g, &p).unwrap() * &tame_symbol_value(&f2, &g, &p).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn nerve_shrinks_with_width(n in 3usize..7, w in 2.2f64..6.0, shrink in 0.0f64..1.0) {
        let w = w.max(6.3 / n as f64 + 0.05);
        let w2 = 6.3 / n as f64 + 0.01 + shrink * (w - 6.3 / n as f64 - 0.01);
        let big = cover(n, w).nerve(4);
        for s in cover(n, w2).nerve(4) {
            prop_assert!(big.contains(&s), "{} appears after shrinking", s);
        }
    }

    #[test]
    fn half_log_b_closed_form(x in point(), y in point(), z in point()) {
        prop_assert!((half_log_b(x, y, z) - half_log_b_series(x, y, z).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn big_period_rational_invariance(a in (-6i64..=6, 1i64..=4), b in (-6i64..=6, 1i64..=4), c in (-6i64..=6, 1i64..=4)) {
        let q = |(n, d): (i64, i64)| BigRational::new(BigInt::from(n), BigInt::from(d));
        let p = PeriodData::symbolic();
        let (qa, qb, qc) = (q(a), q(b), q(c));
        prop_assert_eq!(big_period(&p.act([&qa, &qb, &qc])).unwrap(), big_period(&p).unwrap());
    }

    #[test]
    fn heisenberg_action_is_a_right_action(l in (-4i64..=4, -4i64..=4, -4i64..=4), m in (-4i64..=4, -4i64..=4, -4i64..=4), x in point(), y in point(), z in point()) {
        let (l, m) = (HeisLatticeElem::new(l.0, l.1, l.2), HeisLatticeElem::new(m.0, m.1, m.2));
        let p = HeisNumeric::new(x, y, z);
        prop_assert!((p.act(&l).act(&m).matrix() - p.act(&l.compose(&m)).matrix()).norm() < 1e-9);
        prop_assert!((p.act(&l).log_rho() - p.log_rho()).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, .. ProptestConfig::default() })]

    #[test]
    fn branch_sum_is_the_valuation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, v) = random_rational(&mut rng).unwrap();
        let c = cover(4, 2.0);
        let b = assign_branches(&f, &c).unwrap();
        for r in [0.6, 1.0, 1.4] {
            prop_assert_eq!(b.loop_branch_sum(&c.winding_loop(r, 8).unwrap()).unwrap(), v as i64);
        }
    }

    #[test]
    fn branch_integers_cancel_on_triangles(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (f, _) = random_rational(&mut rng).unwrap();
        let c = cover(4, 5.0);
        let b = assign_branches(&f, &c).unwrap();
        for s in c.nerve(2).into_iter().filter(|s| s.dim() == 2) {
            let (i, j, k) = (s.0[0], s.0[1], s.0[2]);
            for w in c.sample_points(&s, 5, seed).unwrap() {
                let m = b.branch_integer(j, k, w).unwrap() - b.branch_integer(i, k, w).unwrap() + b.branch_integer(i, j, w).unwrap();
                prop_assert_eq!(m, 0);
            }
        }
    }

    #[test]
    fn form_identities(seed in any::<u64>(), w in point()) {
        prop_assume!(w.norm() > 0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = Form::function(random_smooth(&mut rng));
        let g = Form::one_form(random_smooth(&mut rng), random_smooth(&mut rng));
        let tol = |x: &Form| x.max_abs(w).unwrap() < 1e-9;
        prop_assert!(tol(&f.d().unwrap().d().unwrap()));
        prop_assert!(tol(&f.pi(0).add(&f.pi(1)).unwrap().sub(&f).unwrap()));
        let lhs = f.d().unwrap().dc().unwrap();
        let rhs = f.delbar().unwrap().del().unwrap().map(|e| e.clone() * Expr::int(2));
        prop_assert!(tol(&lhs.sub(&rhs).unwrap()));
        for p in 0..2 {
            for x in [&f, &g] {
                prop_assert!(tol(&x.pi(p).d().unwrap().sub(&x.d().unwrap().pi(p)).unwrap()));
                prop_assert!(tol(&x.pi(p).dc().unwrap().sub(&x.dc().unwrap().pi(p + 1)).unwrap()));
            }
        }
    }

    #[test]
    fn total_differential_squares_to_zero(seed in any::<u64>()) {
        let c = cover(3, 4.5);
        for complex in registered_complexes() {
            for degree in 0..=2 {
                let x = random_cochain(complex.clone(), c.clone(), degree, seed).unwrap();
                let dd = x.total_d().unwrap().total_d().unwrap();
                let r = residual_report(&dd, 1e-9, 3, seed).unwrap();
                prop_assert!(r.pass, "{} degree {}: {}", complex.name, degree, r.max_residual);
            }
        }
    }

    #[test]
    fn power_family_bundles(b in prop::collection::vec(-4i64..=4, 4)) {
        let c = cover(4, 5.0);
        let l = LineBundleData::power_family(c.clone(), &b).unwrap();
        let m = HermitianMetricData::power_family(c.clone(), &b).unwrap();
        for s in c.nerve(2).into_iter().filter(|s| s.dim() == 2) {
            let (i, j, k) = (s.0[0], s.0[1], s.0[2]);
            let prod = l.transition(i, j).mul(l.transition(j, k)).unwrap().div(l.transition(i, k)).unwrap();
            prop_assert_eq!(prod, RationalFunction::one());
        }
        prop_assert_eq!(l.chern_coboundary(5, 1).unwrap(), 0);
        let conn = canonical_connection(&l, &m).unwrap();
        prop_assert!(check_connection(&l, &m, &conn, 5, 1).unwrap().pass);
    }
}
