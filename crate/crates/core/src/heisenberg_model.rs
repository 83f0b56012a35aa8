//! The complex Heisenberg group of lower unipotent 3×3 matrices [1; x 1; z y 1], the right
//! action of its integral lattice, the invariant connection form and the invariant metric.

use std::f64::consts::TAU;

use nalgebra::Matrix3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::exact_algebra::{Scalar, TwistedInteger};
use crate::form_calculus::{Expr, Form};

/// A point of the group with symbolic entries.
#[derive(Debug, Clone, PartialEq)]
pub struct HeisPoint {
    pub x: Expr,
    pub y: Expr,
    pub z: Expr,
}

/// A point with numeric entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeisNumeric {
    pub x: Complex64,
    pub y: Complex64,
    pub z: Complex64,
}

/// An element of the lattice: m₁, n₁ ∈ Z(1), m₂ ∈ Z(2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HeisLatticeElem {
    pub m1: TwistedInteger,
    pub n1: TwistedInteger,
    pub m2: TwistedInteger,
}

impl HeisLatticeElem {
    pub fn new(m1: i64, n1: i64, m2: i64) -> Self {
        HeisLatticeElem {
            m1: TwistedInteger::new(m1, 1),
            n1: TwistedInteger::new(n1, 1),
            m2: TwistedInteger::new(m2, 2),
        }
    }

    pub fn identity() -> Self {
        Self::new(0, 0, 0)
    }

    pub fn random(rng: &mut impl Rng, bound: i64) -> Self {
        Self::new(
            rng.random_range(-bound..=bound),
            rng.random_range(-bound..=bound),
            rng.random_range(-bound..=bound),
        )
    }

    /// Matrix product λ·μ, so that acting by λ then by μ is acting by λ·μ.
    pub fn compose(&self, o: &HeisLatticeElem) -> HeisLatticeElem {
        HeisLatticeElem {
            m1: TwistedInteger::new(self.m1.n + o.m1.n, 1),
            n1: TwistedInteger::new(self.n1.n + o.n1.n, 1),
            m2: TwistedInteger::new(self.m2.n + self.n1.mul(&o.m1).n + o.m2.n, 2),
        }
    }
}

impl HeisNumeric {
    pub fn new(x: Complex64, y: Complex64, z: Complex64) -> Self {
        HeisNumeric { x, y, z }
    }

    pub fn matrix(&self) -> Matrix3<Complex64> {
        let (o, l) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        Matrix3::new(l, o, o, self.x, l, o, self.z, self.y, l)
    }

    /// (x, y, z) ↦ (x + m₁, y + n₁, z + m₁y + m₂).
    pub fn act(&self, l: &HeisLatticeElem) -> HeisNumeric {
        let m1 = l.m1.value();
        HeisNumeric { x: self.x + m1, y: self.y + l.n1.value(), z: self.z + m1 * self.y + l.m2.value() }
    }

    /// (1/2πi)(π₁(z) − π₁(x) π₀(y)).
    pub fn log_rho(&self) -> f64 {
        (self.z.im - self.x.im * self.y.re) / TAU
    }

    /// ω = (1/2πi)(dz − x dy) on a tangent vector (dx, dy, dz).
    pub fn omega(&self, v: [Complex64; 3]) -> Complex64 {
        (v[2] - self.x * v[1]) / Complex64::new(0.0, TAU)
    }

    /// Push a tangent vector through the action: dz picks up m₁ dy.
    pub fn act_tangent(&self, l: &HeisLatticeElem, v: [Complex64; 3]) -> [Complex64; 3] {
        [v[0], v[1], v[2] + l.m1.value() * v[1]]
    }
}

fn lattice_expr(t: &TwistedInteger) -> Expr {
    Expr::scalar(t.to_scalar())
}

impl HeisPoint {
    pub fn new(x: Expr, y: Expr, z: Expr) -> Self {
        HeisPoint { x, y, z }
    }

    pub fn origin() -> Self {
        HeisPoint::new(Expr::zero(), Expr::zero(), Expr::zero())
    }

    pub fn act(&self, l: &HeisLatticeElem) -> HeisPoint {
        let m1 = lattice_expr(&l.m1);
        HeisPoint {
            x: self.x.clone() + m1.clone(),
            y: self.y.clone() + lattice_expr(&l.n1),
            z: self.z.clone() + m1 * self.y.clone() + lattice_expr(&l.m2),
        }
    }

    /// The pullback of ω = (1/2πi)(dz − x dy) along the family.
    pub fn omega_form(&self) -> Result<Form> {
        let dz = Form::function(self.z.clone()).d()?;
        let dy = Form::function(self.y.clone()).d()?;
        Ok(dz.sub(&dy.scale(&self.x))?.scale(&Expr::scalar(Scalar::two_pi_i(-1))))
    }

    /// log ρ = (1/2πi)(π₁(z) − π₁(x) π₀(y)).
    pub fn log_rho(&self) -> Expr {
        (self.z.pi(1) - self.x.pi(1) * self.y.pi(0)).scale(Scalar::two_pi_i(-1))
    }
}

pub fn lattice_act(p: &HeisPoint, l: &HeisLatticeElem) -> HeisPoint {
    p.act(l)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InvariantKind {
    Omega,
    Rho,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub kind: InvariantKind,
    pub trials: usize,
    pub points_per_trial: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn random_c64(rng: &mut impl Rng, scale: f64) -> Complex64 {
    Complex64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
}

/// Residual of (quantity after a random lattice action) − (before) over seeded trials.
pub fn invariance_check(
    kind: InvariantKind,
    trials: usize,
    points: usize,
    seed: u64,
    tol: f64,
) -> InvarianceReport {
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
        let l = HeisLatticeElem::random(&mut rng, 5);
        for _ in 0..points {
            let p = HeisNumeric::new(random_c64(&mut rng, 3.0), random_c64(&mut rng, 3.0), random_c64(&mut rng, 3.0));
            let q = p.act(&l);
            let r = match kind {
                InvariantKind::Rho => (q.log_rho() - p.log_rho()).abs(),
                InvariantKind::Omega => {
                    let v = [random_c64(&mut rng, 1.0), random_c64(&mut rng, 1.0), random_c64(&mut rng, 1.0)];
                    (q.omega(p.act_tangent(&l, v)) - p.omega(v)).norm()
                }
            };
            worst = worst.max(r);
        }
    }
    InvarianceReport { kind, trials, points_per_trial: points, max_residual: worst, tolerance: tol, pass: worst < tol }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::cover_nerve::{assign_branches, SectorCover, Simplex};
    use crate::exact_algebra::{parse_rational, GaussianRational};
    use crate::symbols::{hermitian_tame_symbol, tame_symbol, FunctionLog};

    fn cover() -> Arc<SectorCover> {
        Arc::new(SectorCover::new(GaussianRational::zero(), 0.5, 1.5, 3, 4.5).unwrap())
    }

    #[test]
    fn action_examples() {
        let p = HeisNumeric::new(Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.1), Complex64::new(0.3, 0.0));
        assert_eq!(p.act(&HeisLatticeElem::identity()), p);
        let o = HeisNumeric::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let q = o.act(&HeisLatticeElem::new(1, 0, 0));
        assert!((q.x - Complex64::new(0.0, TAU)).norm() < 1e-15 && q.y.norm() == 0.0 && q.z.norm() == 0.0);
        let s = HeisPoint::origin().act(&HeisLatticeElem::new(1, 0, 0));
        assert!((s.x.eval(Complex64::new(1.0, 0.0)).unwrap() - Complex64::new(0.0, TAU)).norm() < 1e-15);
    }

    #[test]
    fn right_action_matches_matrix_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let l = HeisLatticeElem::random(&mut rng, 4);
            let m = HeisLatticeElem::random(&mut rng, 4);
            let p = HeisNumeric::new(random_c64(&mut rng, 2.0), random_c64(&mut rng, 2.0), random_c64(&mut rng, 2.0));
            let lhs = p.act(&l).act(&m);
            let rhs = p.act(&l.compose(&m));
            let zero = HeisNumeric::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            let mat = p.matrix() * zero.act(&l).matrix() * zero.act(&m).matrix();
            assert!((lhs.matrix() - mat).norm() < 1e-9);
            assert!((rhs.matrix() - mat).norm() < 1e-9);
        }
    }

    #[test]
    fn origin_has_unit_metric() {
        let w = Complex64::new(1.0, 0.5);
        assert!(HeisPoint::origin().log_rho().eval(w).unwrap().norm() < 1e-15);
        assert_eq!(HeisNumeric::new(Complex64::default(), Complex64::default(), Complex64::default()).log_rho(), 0.0);
    }

    #[test]
    fn invariance() {
        assert!(invariance_check(InvariantKind::Rho, 0, 20, 1, 1e-12).pass);
        let r = invariance_check(InvariantKind::Rho, 100, 20, 1, 1e-10);
        assert!(r.pass, "{:?}", r);
        let r = invariance_check(InvariantKind::Omega, 100, 20, 1, 1e-10);
        assert!(r.pass, "{:?}", r);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let l = HeisLatticeElem::new(1, 0, 0);
        for _ in 0..20 {
            let p = HeisNumeric::new(random_c64(&mut rng, 3.0), random_c64(&mut rng, 3.0), random_c64(&mut rng, 3.0));
            assert!((p.act(&l).log_rho() - p.log_rho()).abs() < 1e-12);
        }
    }

    #[test]
    fn non_lattice_shift_breaks_invariance() {
        let p = HeisNumeric::new(Complex64::new(0.2, 0.7), Complex64::new(1.5, -0.4), Complex64::new(0.1, 0.3));
        let q = HeisNumeric { x: p.x + Complex64::new(0.0, 1.0), ..p };
        assert!((q.log_rho() - p.log_rho()).abs() > 1e-3);
    }

    #[test]
    fn pullbacks_along_sections() {
        let c = cover();
        let f = assign_branches(&parse_rational("z").unwrap(), &c).unwrap();
        let g = assign_branches(&parse_rational("z-3").unwrap(), &c).unwrap();
        let t = tame_symbol(&f, &g).unwrap();
        let hs = hermitian_tame_symbol(&f, &g).unwrap();
        let (fl, gl) = (FunctionLog::new(f.clone()), FunctionLog::new(g.clone()));
        let h = Expr::rat(&parse_rational("z^2+1").unwrap());
        for i in 0..3 {
            let sec = HeisPoint::new(fl.log(i), gl.log(i), h.clone());
            let canonical = HeisPoint::new(fl.log(i), gl.log(i), Expr::zero());
            let om = sec.omega_form().unwrap();
            // the section coefficient enters the connection rule divided by 2πi
            let rule = t.connection_action(i, &h.scale(Scalar::two_pi_i(-1))).unwrap();
            let om0 = canonical.omega_form().unwrap();
            for w in c.sample_points(&Simplex(vec![i]), 20, 7).unwrap() {
                assert!(om.sub(&rule).unwrap().max_abs(w).unwrap() < 1e-10);
                assert!(om0.sub(&t.connection_form(i)).unwrap().max_abs(w).unwrap() < 1e-10);
                let lr = sec.log_rho().eval(w).unwrap();
                let want = hs.section_log_length(i, &h).eval(w).unwrap();
                assert!((lr - want).norm() < 1e-10);
                let lr0 = canonical.log_rho().eval(w).unwrap();
                assert!((lr0 - hs.sigma[i].eval(w).unwrap()).norm() < 1e-10);
            }
            // the symbolic action leaves the pullbacks unchanged
            let moved = sec.act(&HeisLatticeElem::new(2, -1, 3));
            let dom = moved.omega_form().unwrap().sub(&om).unwrap();
            for w in c.sample_points(&Simplex(vec![i]), 10, 8).unwrap() {
                assert!(dom.max_abs(w).unwrap() < 1e-10);
                assert!((moved.log_rho().eval(w).unwrap() - sec.log_rho().eval(w).unwrap()).norm() < 1e-10);
            }
        }
    }
}
