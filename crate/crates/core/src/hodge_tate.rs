//! The mixed Hodge structure on C³ given by the period matrix [1; x 1; z y 1]: its big
//! period in C ⊗_Q C, the two projections of the kernel of multiplication, the extension
//! class with its unique lift, and the real-structure matrix ½ log B.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::Matrix3;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_algebra::{GaussianRational, Scalar};
use crate::form_calculus::{is_zero, scalar_terms, simplify, Env, Expr, Form};

fn tpi(j: i32) -> Expr {
    Expr::two_pi_i(j)
}

/// A 3×3 matrix of expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprMat3(pub [[Expr; 3]; 3]);

impl ExprMat3 {
    pub fn lower(x: Expr, y: Expr, z: Expr, d: [Scalar; 3]) -> Self {
        let o = Expr::zero;
        let [d0, d1, d2] = d;
        ExprMat3([
            [Expr::scalar(d0), o(), o()],
            [x, Expr::scalar(d1.clone()), o()],
            [z, y * Expr::scalar(d1), Expr::scalar(d2)],
        ])
    }

    pub fn mul(&self, o: &ExprMat3) -> ExprMat3 {
        let mut out: [[Expr; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| Expr::zero()));
        for (i, row) in out.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = simplify(&(0..3).map(|k| self.0[i][k].clone() * o.0[k][j].clone()).fold(Expr::zero(), |a, b| a + b));
            }
        }
        ExprMat3(out)
    }

    pub fn column(&self, k: usize) -> [Expr; 3] {
        [self.0[0][k].clone(), self.0[1][k].clone(), self.0[2][k].clone()]
    }

    pub fn row(&self, k: usize) -> [Expr; 3] {
        self.0[k].clone()
    }

    pub fn apply(&self, v: &[Expr; 3]) -> [Expr; 3] {
        let mut out: [Expr; 3] = std::array::from_fn(|_| Expr::zero());
        for (i, e) in out.iter_mut().enumerate() {
            *e = simplify(&(0..3).map(|k| self.0[i][k].clone() * v[k].clone()).fold(Expr::zero(), |a, b| a + b));
        }
        out
    }

    /// Exact inverse of a lower triangular matrix with constant diagonal, by forward
    /// substitution.
    pub fn lower_inverse(&self) -> Result<ExprMat3> {
        let mut inv_diag = Vec::new();
        for k in 0..3 {
            match simplify(&self.0[k][k]) {
                Expr::Const(s) => inv_diag.push(Expr::scalar(s.inv().ok_or(Error::DivisionByZero)?)),
                _ => return Err(Error::SlotMismatch("diagonal entries must be constants".into())),
            }
        }
        let mut out: [[Expr; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| Expr::zero()));
        for j in 0..3 {
            out[j][j] = inv_diag[j].clone();
            for i in j + 1..3 {
                let s = (j..i).map(|k| self.0[i][k].clone() * out[k][j].clone()).fold(Expr::zero(), |a, b| a + b);
                out[i][j] = simplify(&(-(s * inv_diag[i].clone())));
            }
        }
        Ok(ExprMat3(out))
    }
}

fn dot(a: &[Expr; 3], b: &[Expr; 3]) -> Expr {
    simplify(&(0..3).map(|k| a[k].clone() * b[k].clone()).fold(Expr::zero(), |x, y| x + y))
}

/// Period data: M = [1; x 1; z y 1] and A = M·diag(1, 2πi, (2πi)²).
#[derive(Debug, Clone)]
pub struct PeriodData {
    pub x: Expr,
    pub y: Expr,
    pub z: Expr,
}

impl PeriodData {
    pub fn new(x: Expr, y: Expr, z: Expr) -> Self {
        PeriodData { x, y, z }
    }

    /// Formal entries x, y, z, evaluated through an environment.
    pub fn symbolic() -> Self {
        Self::new(Expr::var("x"), Expr::var("y"), Expr::var("z"))
    }

    pub fn m(&self) -> ExprMat3 {
        ExprMat3::lower(self.x.clone(), self.y.clone(), self.z.clone(), [Scalar::one(), Scalar::one(), Scalar::one()])
    }

    /// A = [1; x 2πi; z 2πi·y (2πi)²].
    pub fn a(&self) -> ExprMat3 {
        ExprMat3::lower(
            self.x.clone(),
            self.y.clone(),
            self.z.clone(),
            [Scalar::one(), Scalar::two_pi_i(1), Scalar::two_pi_i(2)],
        )
    }

    /// Columns v₀, v₁, v₂ of A.
    pub fn basis(&self) -> [[Expr; 3]; 3] {
        let a = self.a();
        [a.column(0), a.column(1), a.column(2)]
    }

    /// Dual basis f₀, f₁, f₂: the rows of A⁻¹.
    pub fn dual_basis(&self) -> Result<[[Expr; 3]; 3]> {
        let ai = self.a().lower_inverse()?;
        Ok([ai.row(0), ai.row(1), ai.row(2)])
    }

    /// Apply the lattice action x ↦ x + m₁, y ↦ y + n₁, z ↦ z + m₁y + m₂ with
    /// m₁ = 2πi·a₁, n₁ = 2πi·a₂, m₂ = (2πi)²·a₃ for rational a.
    pub fn act(&self, a: [&BigRational; 3]) -> PeriodData {
        let r = |q: &BigRational, j: i32| Expr::scalar(Scalar::new(GaussianRational::new(q.clone(), BigRational::zero()), j));
        let m1 = r(a[0], 1);
        PeriodData {
            x: self.x.clone() + m1.clone(),
            y: self.y.clone() + r(a[1], 1),
            z: self.z.clone() + m1 * self.y.clone() + r(a[2], 2),
        }
    }
}

/// A finite sum Σ c·(a ⊗ b) in C ⊗_Q C with rational coefficients. Canonical form expands
/// both factors into monomials, moves rational scalars into c, and merges equal terms.
/// Powers of 2πi and Gaussian units stay inside the factors since they are not rational.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TensorQQ {
    terms: BTreeMap<(Expr, Expr), BigRational>,
}

fn split_rational(s: &Scalar, m: Expr) -> (BigRational, Expr) {
    let c = &s.c;
    let (r, u) = if c.im.is_zero() {
        (c.re.clone(), GaussianRational::one())
    } else if c.re.is_zero() {
        (c.im.clone(), GaussianRational::i())
    } else {
        let r = c.re.clone();
        (r.clone(), GaussianRational::new(BigRational::one(), &c.im / &r))
    };
    let unit = Scalar::new(u, s.twist);
    let factor = if unit.is_one() { m } else { simplify(&(Expr::scalar(unit) * m)) };
    (r, factor)
}

fn expand(e: &Expr) -> Vec<(BigRational, Expr)> {
    scalar_terms(e).into_iter().map(|(s, m)| split_rational(&s, m)).collect()
}

impl TensorQQ {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn pure(a: Expr, b: Expr) -> Self {
        Self::from_terms(vec![(BigRational::one(), a, b)])
    }

    pub fn from_terms(terms: Vec<(BigRational, Expr, Expr)>) -> Self {
        let mut t = TensorQQ::zero();
        for (c, a, b) in terms {
            for (ca, fa) in expand(&a) {
                for (cb, fb) in expand(&b) {
                    let k = &c * &ca * &cb;
                    let e = t.terms.entry((fa.clone(), fb)).or_insert_with(BigRational::zero);
                    *e += k;
                }
            }
        }
        t.terms.retain(|_, c| !c.is_zero());
        t
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigRational, &Expr, &Expr)> {
        self.terms.iter().map(|((a, b), c)| (c, a, b))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn raw(&self) -> Vec<(BigRational, Expr, Expr)> {
        self.terms().map(|(c, a, b)| (c.clone(), a.clone(), b.clone())).collect()
    }

    pub fn add(&self, o: &TensorQQ) -> TensorQQ {
        let mut v = self.raw();
        v.extend(o.raw());
        Self::from_terms(v)
    }

    pub fn neg(&self) -> TensorQQ {
        Self::from_terms(self.terms().map(|(c, a, b)| (-c, a.clone(), b.clone())).collect())
    }

    pub fn sub(&self, o: &TensorQQ) -> TensorQQ {
        self.add(&o.neg())
    }

    /// Componentwise product (l ⊗ r)·Σ c(a ⊗ b) = Σ c(la ⊗ rb).
    pub fn mul_pure(&self, l: &Expr, r: &Expr) -> TensorQQ {
        Self::from_terms(self.terms().map(|(c, a, b)| (c.clone(), l.clone() * a.clone(), r.clone() * b.clone())).collect())
    }

    /// Substitute a variable in both factors.
    pub fn subst(&self, name: &str, by: &Expr) -> TensorQQ {
        Self::from_terms(self.terms().map(|(c, a, b)| (c.clone(), a.subst(name, by), b.subst(name, by))).collect())
    }

    /// Σ c·σ(a)·τ(b) for real-valued σ, τ; these are Q-bilinear, so they are well defined
    /// on C ⊗_Q C.
    pub fn functional(&self, w: Complex64, env: Env, s: fn(Complex64) -> f64, t: fn(Complex64) -> f64) -> Result<f64> {
        let mut acc = 0.0;
        for (c, a, b) in self.terms() {
            acc += rat_f64(c) * s(a.eval_env(w, env)?) * t(b.eval_env(w, env)?);
        }
        Ok(acc)
    }

    /// The four functionals Re⊗Re, Re⊗Im, Im⊗Re, Im⊗Im.
    pub fn functionals(&self, w: Complex64, env: Env) -> Result<[f64; 4]> {
        let re = |z: Complex64| z.re;
        let im = |z: Complex64| z.im;
        Ok([
            self.functional(w, env, re, re)?,
            self.functional(w, env, re, im)?,
            self.functional(w, env, im, re)?,
            self.functional(w, env, im, im)?,
        ])
    }
}

fn rat_f64(c: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    c.to_f64().unwrap_or(f64::NAN)
}

/// Readable rendering of the polynomial expressions that occur in tensor factors; other
/// expressions fall back to their canonical text.
pub fn pretty(e: &Expr) -> String {
    match e {
        Expr::Const(s) => {
            let c = s.c.to_string();
            match (s.c.is_one(), s.twist) {
                (_, 0) => c,
                (true, 1) => "2πi".into(),
                (true, t) => format!("(2πi)^{}", t),
                (false, 1) => format!("{}·2πi", c),
                (false, t) => format!("{}·(2πi)^{}", c, t),
            }
        }
        Expr::Var(n) => n.clone(),
        Expr::Prod(v) => v.iter().map(pretty).collect::<Vec<_>>().join("·"),
        Expr::Sum(v) => format!("({})", v.iter().map(pretty).collect::<Vec<_>>().join(" + ")),
        Expr::Pow(b, k) => format!("{}^{}", pretty(b), k),
        other => other.to_string(),
    }
}

impl fmt::Display for TensorQQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (c, a, b)) in self.terms().enumerate() {
            let sign = if c.is_negative() { "-" } else if k > 0 { "+" } else { "" };
            let mag = c.abs();
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", sign)?;
            if k > 0 && !sign.is_empty() {
                write!(f, " ")?;
            }
            if !mag.is_one() {
                write!(f, "{}*", mag)?;
            }
            write!(f, "{} ⊗ {}", pretty(a), pretty(b))?;
        }
        Ok(())
    }
}

/// P = Σ_k ⟨f₂, M v_k⟩ ⊗ ⟨f_k, M⁻¹ v₀⟩.
pub fn big_period(p: &PeriodData) -> Result<TensorQQ> {
    let m = p.m();
    let mi = m.lower_inverse()?;
    let v = p.basis();
    let f = p.dual_basis()?;
    let u0 = mi.apply(&v[0]);
    let terms = (0..3).map(|k| (BigRational::one(), dot(&f[2], &m.apply(&v[k])), dot(&f[k], &u0))).collect();
    Ok(TensorQQ::from_terms(terms))
}

/// z/(2πi)² ⊗ 1 − 1 ⊗ z/(2πi)² + 1 ⊗ xy/(2πi)² − y/2πi ⊗ x/2πi.
pub fn big_period_closed_form(p: &PeriodData) -> TensorQQ {
    let one = BigRational::one();
    let (x, y, z) = (p.x.clone(), p.y.clone(), p.z.clone());
    TensorQQ::from_terms(vec![
        (one.clone(), z.clone() * tpi(-2), Expr::one()),
        (-one.clone(), Expr::one(), z * tpi(-2)),
        (one.clone(), Expr::one(), x.clone() * y.clone() * tpi(-2)),
        (-one, y * tpi(-1), x * tpi(-1)),
    ])
}

/// m(Σ c a⊗b) = Σ c·a·b.
pub fn mult_map(t: &TensorQQ) -> Expr {
    let e = t
        .terms()
        .map(|(c, a, b)| Expr::scalar(Scalar::new(GaussianRational::new(c.clone(), BigRational::zero()), 0)) * a.clone() * b.clone())
        .fold(Expr::zero(), |x, y| x + y);
    simplify(&e)
}

/// a ⊗ b ↦ a·db on the kernel of multiplication.
pub fn project_kahler(t: &TensorQQ) -> Result<Form> {
    if !is_zero(&mult_map(t)) {
        return Err(Error::NotInKernel);
    }
    let mut acc = Form::zero(1);
    for (c, a, b) in t.terms() {
        let k = Expr::scalar(Scalar::new(GaussianRational::new(c.clone(), BigRational::zero()), 0));
        acc = acc.add(&Form::function(b.clone()).d()?.scale(&(k * a.clone())))?;
    }
    Ok(acc.simplify())
}

/// a ⊗ b ↦ −π₁(a)·π₀(b).
pub fn project_r1(t: &TensorQQ) -> Expr {
    let e = t
        .terms()
        .map(|(c, a, b)| {
            let k = Expr::scalar(Scalar::new(GaussianRational::new(-c.clone(), BigRational::zero()), 0));
            k * a.pi(1) * b.pi(0)
        })
        .fold(Expr::zero(), |x, y| x + y);
    simplify(&e)
}

/// The extension class in its three guises.
#[derive(Debug, Clone)]
pub struct ExtensionClass {
    /// Coefficients of v₁ and v₂: −x/2πi and −(z − xy)/(2πi)².
    pub coefficients: [Expr; 2],
    /// The vector e itself.
    pub vector: [Expr; 3],
    /// ẽ = −y ⊗ x − 2πi ⊗ (z − xy)/2πi.
    pub tensor: TensorQQ,
    /// (Id ⊗ exp)(ẽ) as (left factor, exponent of the right factor), one entry per left factor.
    pub exponentiated: Vec<(Expr, Expr)>,
}

pub fn extension_class(p: &PeriodData) -> ExtensionClass {
    let (x, y, z) = (p.x.clone(), p.y.clone(), p.z.clone());
    let w = z.clone() - x.clone() * y.clone();
    let c1 = simplify(&(-(x.clone() * tpi(-1))));
    let c2 = simplify(&(-(w.clone() * tpi(-2))));
    let v = p.basis();
    let vector = [0, 1, 2].map(|i| simplify(&(c1.clone() * v[1][i].clone() + c2.clone() * v[2][i].clone())));
    let tensor = TensorQQ::from_terms(vec![
        (-BigRational::one(), y, x),
        (-BigRational::one(), tpi(1), w * tpi(-1)),
    ]);
    let mut grouped: BTreeMap<Expr, Expr> = BTreeMap::new();
    for (c, a, b) in tensor.terms() {
        let k = Expr::scalar(Scalar::new(GaussianRational::new(c.clone(), BigRational::zero()), 0));
        let e = grouped.entry(a.clone()).or_insert_with(Expr::zero);
        *e = simplify(&(e.clone() + k * b.clone()));
    }
    let exponentiated = grouped.into_iter().collect();
    ExtensionClass { coefficients: [c1, c2], vector, tensor, exponentiated }
}

/// ẽ + (z/2πi) ⊗ 2πi, checked to lie in the kernel of multiplication and to equal
/// (2πi ⊗ 2πi)·P.
pub fn unique_lift(p: &PeriodData) -> Result<TensorQQ> {
    let e = extension_class(p).tensor;
    let lift = e.add(&TensorQQ::pure(p.z.clone() * tpi(-1), tpi(1)));
    if !is_zero(&mult_map(&lift)) {
        return Err(Error::LiftMismatch);
    }
    let expected = big_period(p)?.mul_pure(&tpi(1), &tpi(1));
    if lift != expected {
        return Err(Error::LiftMismatch);
    }
    Ok(lift)
}

fn p0(w: Complex64) -> Complex64 {
    Complex64::new(w.re, 0.0)
}

fn p1(w: Complex64) -> Complex64 {
    Complex64::new(0.0, w.im)
}

/// The displayed matrix [1; π₀(x) 1; π₁(z) − π₁(x)π₀(y) π₀(y) 1], which is I + ½ log B.
pub fn half_log_b(x: Complex64, y: Complex64, z: Complex64) -> Matrix3<Complex64> {
    let (o, l) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    Matrix3::new(l, o, o, p0(x), l, o, p1(z) - p1(x) * p0(y), p0(y), l)
}

/// I + ½ log B computed from B = A Ā⁻¹ diag(1,−1,1), with log(I + N) = N − N²/2.
pub fn half_log_b_series(x: Complex64, y: Complex64, z: Complex64) -> Result<Matrix3<Complex64>> {
    let t = Complex64::new(0.0, std::f64::consts::TAU);
    let (o, l) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    let a = Matrix3::new(l, o, o, x, t, o, z, t * y, t * t);
    let ab = a.map(|c| c.conj()).try_inverse().ok_or(Error::DivisionByZero)?;
    let s = Matrix3::from_diagonal(&nalgebra::Vector3::new(l, -l, l));
    let b = a * ab * s;
    let n = b - Matrix3::identity();
    Ok(Matrix3::identity() + (n - n * n / Complex64::new(2.0, 0.0)) / Complex64::new(2.0, 0.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct QInvarianceReport {
    pub trials: usize,
    pub max_residual: f64,
    pub structurally_invariant: bool,
    pub tolerance: f64,
    pub pass: bool,
}

fn random_rational(rng: &mut impl Rng) -> BigRational {
    BigRational::new(BigInt::from(rng.random_range(-6..=6)), BigInt::from(rng.random_range(1..=4)))
}

fn random_c64(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
}

/// Invariance of P under the rational lattice action, through the four functionals at a
/// random numeric point per trial, and structurally.
pub fn q_invariance_check(trials: usize, seed: u64, tol: f64) -> Result<QInvarianceReport> {
    let p = PeriodData::symbolic();
    let base = big_period(&p)?;
    let mut worst: f64 = 0.0;
    let mut structural = true;
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
        let a = [random_rational(&mut rng), random_rational(&mut rng), random_rational(&mut rng)];
        let moved = big_period(&p.act([&a[0], &a[1], &a[2]]))?;
        structural &= moved == base;
        let (xv, yv, zv) = (random_c64(&mut rng), random_c64(&mut rng), random_c64(&mut rng));
        let env: &[(&str, Complex64)] = &[("x", xv), ("y", yv), ("z", zv)];
        let w = Complex64::new(1.0, 0.0);
        let before = base.functionals(w, env)?;
        let after = moved.functionals(w, env)?;
        for k in 0..4 {
            worst = worst.max((after[k] - before[k]).abs());
        }
    }
    Ok(QInvarianceReport { trials, max_residual: worst, structurally_invariant: structural, tolerance: tol, pass: worst < tol })
}
