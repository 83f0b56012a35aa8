//! Explicit cocycles for tame symbols ⟨f,g⟩, their hermitian variants, the higher
//! symbols (f,L) and (L,L′), and the 1-form r₂(f,g) measuring the failure of the
//! analytic and metric connections to agree.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::bundle_data::LineBundleData;
use crate::cech_engine::{
    deligne_complex, deligne_cup, hermitian_cup, hh1, sup_residual, CechCochain, CoefficientComplex,
};
use crate::cover_nerve::{LogBranches, SectorCover, Simplex};
use crate::error::{Error, Result};
use crate::exact_algebra::{GaussianRational, RationalFunction, Scalar};
use crate::form_calculus::{Expr, Form};

pub const SYMBOL_TOL: f64 = 1e-10;

/// Sector logarithms of an invertible function. With several factors the logarithm of
/// the product is the sum of the factor logarithms in every sector.
#[derive(Debug, Clone)]
pub struct FunctionLog {
    factors: Vec<Arc<LogBranches>>,
    function: RationalFunction,
}

impl FunctionLog {
    pub fn new(b: Arc<LogBranches>) -> Self {
        let function = b.function().clone();
        FunctionLog { factors: vec![b], function }
    }

    /// log(f₁⋯f_n) := log f₁ + ⋯ + log f_n per sector.
    pub fn multiplicative(factors: Vec<Arc<LogBranches>>) -> Result<Self> {
        let first = factors.first().ok_or(Error::ZeroFunction)?;
        let mut function = RationalFunction::one();
        for b in &factors {
            if !Arc::ptr_eq(b.cover(), first.cover()) {
                return Err(Error::InvalidCover("factors live on different covers".into()));
            }
            function = function.mul(b.function())?;
        }
        Ok(FunctionLog { factors, function })
    }

    pub fn function(&self) -> &RationalFunction {
        &self.function
    }

    pub fn cover(&self) -> &Arc<SectorCover> {
        self.factors[0].cover()
    }

    /// log_i f.
    pub fn log(&self, i: usize) -> Expr {
        self.factors.iter().map(|b| Expr::log(b, i)).reduce(|a, b| a + b).expect("nonempty")
    }

    /// m_ij = (log_j f − log_i f)/2πi.
    pub fn m(&self, i: usize, j: usize) -> Expr {
        self.factors.iter().map(|b| Expr::branch_int(b, i, j)).reduce(|a, b| a + b).expect("nonempty")
    }

    /// d log f = f′/f dz.
    pub fn dlog(&self) -> Result<Form> {
        Ok(Form::one_form(Expr::rat(&self.function.log_derivative()?), Expr::zero()))
    }

    /// The class (2πi m_ij, log_i f) in Z(1)_D.
    pub fn class(&self) -> Result<CechCochain> {
        let mut c = CechCochain::zero(deligne_complex(1), self.cover().clone(), 1);
        for s in c.support() {
            let v = match s.dim() {
                0 => self.log(s.0[0]),
                _ => Expr::two_pi_i(1) * self.m(s.0[0], s.0[1]),
            };
            c.set(s, vec![Form::function(v)])?;
        }
        Ok(c)
    }
}

/// An angular interval of an overlap (sector-0 angle coordinates) with a value on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece<T> {
    pub interval: (f64, f64),
    pub value: T,
}

/// The value of an integer-valued expression on each connected piece of an overlap.
pub fn overlap_integers(cover: &SectorCover, s: &Simplex, e: &Expr) -> Result<Vec<Piece<i64>>> {
    let mut out = Vec::new();
    for (a, b) in cover.intersection(s) {
        let w = cover.point(cover.mid_radius(), 0.5 * (a + b));
        let x = e.eval(w)?;
        let k = x.re.round();
        if (x.re - k).abs() > 1e-6 || x.im.abs() > 1e-6 {
            return Err(Error::BranchGuardViolation((x.re - k).abs().max(x.im.abs())));
        }
        out.push(Piece { interval: (a, b), value: k as i64 });
    }
    if out.is_empty() {
        return Err(Error::EmptyRegion);
    }
    Ok(out)
}

fn two_pi_i_inv() -> Scalar {
    Scalar::two_pi_i(-1)
}

fn pair(s: &Simplex) -> (usize, usize) {
    (s.0[0], s.0[1])
}

/// Copy a cochain into another complex with the same slot shape, scaling by c.
pub fn rescale_into(c: &CechCochain, target: Arc<CoefficientComplex>, k: &Scalar) -> Result<CechCochain> {
    let mut out = CechCochain::zero(target, c.cover().clone(), c.degree());
    let e = Expr::scalar(k.clone());
    for (s, v) in c.values() {
        out.set(s.clone(), v.iter().map(|f| f.scale(&e)).collect())?;
    }
    Ok(out)
}

/// ⟨f,g⟩ as a degree-2 cocycle in Z(2)_D together with its torsor presentation.
#[derive(Debug, Clone)]
pub struct TameSymbolData {
    pub f: FunctionLog,
    pub g: FunctionLog,
    /// ((2πi)² m_ij n_jk, −2πi m_ij log_j g, log_i f dg/g).
    pub cocycle: CechCochain,
    /// g^{−m_ij} on each connected piece of each edge.
    pub transitions: BTreeMap<(usize, usize), Vec<Piece<RationalFunction>>>,
    /// ω_i = log_i f dg/g.
    pub omega: Vec<Form>,
}

impl TameSymbolData {
    pub fn cover(&self) -> &Arc<SectorCover> {
        self.f.cover()
    }

    /// Local connection form −(1/2πi) ω_i of the trivializing section {log_i f, g}.
    pub fn connection_form(&self, i: usize) -> Form {
        self.omega[i].scale(&Expr::scalar(two_pi_i_inv().neg()))
    }

    /// ∇s for s = h_i·{log_i f, g}: the form dh_i − (1/2πi) log_i f dg/g.
    pub fn connection_action(&self, i: usize, h: &Expr) -> Result<Form> {
        Form::function(h.clone()).d()?.add(&self.connection_form(i))
    }
}

/// The cocycle of ⟨f,g⟩ built from the displayed formula.
pub fn tame_symbol_from(f: FunctionLog, g: FunctionLog) -> Result<TameSymbolData> {
    if !Arc::ptr_eq(f.cover(), g.cover()) {
        return Err(Error::InvalidCover("f and g live on different covers".into()));
    }
    let cover = f.cover().clone();
    let dlog_g = g.dlog()?;
    let omega: Vec<Form> = (0..cover.n()).map(|i| dlog_g.scale(&f.log(i))).collect();
    let mut c = CechCochain::zero(deligne_complex(2), cover.clone(), 2);
    let mut transitions = BTreeMap::new();
    for s in c.support() {
        let v = &s.0;
        let val = match s.dim() {
            2 => Form::function(Expr::two_pi_i(2) * f.m(v[0], v[1]) * g.m(v[1], v[2])),
            1 => {
                let pieces = overlap_integers(&cover, &s, &f.m(v[0], v[1]))?
                    .into_iter()
                    .map(|p| Ok(Piece { interval: p.interval, value: g.function().pow(-p.value as i32)? }))
                    .collect::<Result<_>>()?;
                transitions.insert(pair(&s), pieces);
                Form::function(-(Expr::two_pi_i(1) * f.m(v[0], v[1]) * g.log(v[1])))
            }
            _ => omega[v[0]].clone(),
        };
        c.set(s, vec![val])?;
    }
    Ok(TameSymbolData { f, g, cocycle: c, transitions, omega })
}

pub fn tame_symbol(f: &Arc<LogBranches>, g: &Arc<LogBranches>) -> Result<TameSymbolData> {
    tame_symbol_from(FunctionLog::new(f.clone()), FunctionLog::new(g.clone()))
}

/// ⟨f,g⟩ with its hermitian structure, as a degree-2 cocycle in Z(1) → O → E⁰.
#[derive(Debug, Clone)]
pub struct HermitianSymbolData {
    pub f: FunctionLog,
    pub g: FunctionLog,
    /// (2πi m_ij n_jk, −m_ij log_j g, σ_i).
    pub cocycle: CechCochain,
    /// σ_i = ½ log ρ_i = −(1/2πi) π₁(log_i f) log|g|.
    pub sigma: Vec<Expr>,
}

impl HermitianSymbolData {
    /// (1/2πi)(π₁(h_i) − π₁(log_i f) log|g|) for s = h_i·{log_i f, g}, where h_i is the
    /// coefficient in the Z(2)-normalized coordinate, 2πi times the logarithm of the
    /// multiplicative coefficient. The value is ½ log of the squared length of s.
    pub fn section_log_length(&self, i: usize, h: &Expr) -> Expr {
        let e = h.pi(1) - self.f.log(i).pi(1) * Expr::log_abs(self.g.function());
        e.scale(two_pi_i_inv())
    }
}

pub fn hermitian_tame_symbol_from(f: FunctionLog, g: FunctionLog) -> Result<HermitianSymbolData> {
    if !Arc::ptr_eq(f.cover(), g.cover()) {
        return Err(Error::InvalidCover("f and g live on different covers".into()));
    }
    let cover = f.cover().clone();
    let sigma: Vec<Expr> = (0..cover.n())
        .map(|i| (f.log(i).pi(1) * Expr::log_abs(g.function())).scale(two_pi_i_inv().neg()))
        .collect();
    let mut c = CechCochain::zero(hh1(), cover, 2);
    for s in c.support() {
        let v = &s.0;
        let val = match s.dim() {
            2 => Expr::two_pi_i(1) * f.m(v[0], v[1]) * g.m(v[1], v[2]),
            1 => -(f.m(v[0], v[1]) * g.log(v[1])),
            _ => sigma[v[0]].clone(),
        };
        c.set(s, vec![Form::function(val)])?;
    }
    Ok(HermitianSymbolData { f, g, cocycle: c, sigma })
}

pub fn hermitian_tame_symbol(f: &Arc<LogBranches>, g: &Arc<LogBranches>) -> Result<HermitianSymbolData> {
    hermitian_tame_symbol_from(FunctionLog::new(f.clone()), FunctionLog::new(g.clone()))
}

/// Compare the two symbols after forgetting the form slot of ⟨f,g⟩ and the metric slot
/// of its hermitian variant; the first is 2πi times the second. Returns whether the
/// integer slots agree exactly and the edge slots agree structurally.
pub fn underlying_bundles_agree(t: &TameSymbolData, h: &HermitianSymbolData) -> Result<bool> {
    let cover = t.cover().clone();
    for s in t.cocycle.support() {
        let a = t.cocycle.value(&s);
        let b = h.cocycle.value(&s);
        match s.dim() {
            2 => {
                for w in cover.sample_points(&s, 4, 0)? {
                    let la = a[0].coeff(0).eval_lattice(w)?;
                    let lb = b[0].coeff(0).eval_lattice(w)?;
                    let (Some(la), Some(lb)) = (la, lb) else {
                        return Ok(false);
                    };
                    let ka = la.get(&2).cloned().unwrap_or_else(GaussianRational::zero);
                    let kb = lb.get(&1).cloned().unwrap_or_else(GaussianRational::zero);
                    if ka != kb {
                        return Ok(false);
                    }
                }
            }
            1 => {
                let diff = a[0].sub(&b[0].scale(&Expr::two_pi_i(1)))?;
                if !diff.simplify().is_zero() {
                    return Ok(false);
                }
            }
            _ => {}
        }
    }
    Ok(true)
}

/// (f,L) in Z(2)_D, degree 3: ((2πi)² m_ij c_jkl, −2πi m_ij log g_jk, log_i f d log g_ij).
pub fn symbol_fl(f: &FunctionLog, l: &LineBundleData) -> Result<CechCochain> {
    deligne_cup(&f.class()?, &l.deligne_class()?)
}

/// The hermitian (f,L) in Z(1) → O → E⁰, degree 3:
/// (2πi m_ij c_jkl, −m_ij log g_jk, −(1/2πi) π₁(log_i f) π₀(log g_ij)).
pub fn hermitian_symbol_fl(f: &FunctionLog, l: &LineBundleData) -> Result<CechCochain> {
    let c = hermitian_cup(&f.class()?, &l.deligne_class()?)?;
    rescale_into(&c, hh1(), &two_pi_i_inv())
}

/// σ_ij = −(1/2πi) π₁(log_i f) log|g_ij|.
pub fn fl_sigma(f: &FunctionLog, l: &LineBundleData, i: usize, j: usize) -> Expr {
    (f.log(i).pi(1) * Expr::log_abs(l.transition(i, j))).scale(two_pi_i_inv().neg())
}

/// Largest residual of σ_ij − σ_ik + σ_jk = −m_ij log|g_jk| over triangles.
pub fn fl_coboundary_residual(f: &FunctionLog, l: &LineBundleData, samples: usize, seed: u64) -> Result<f64> {
    let cover = f.cover().clone();
    let tris: Vec<Simplex> = cover.nerve(2).into_iter().filter(|s| s.dim() == 2).collect();
    let (r, _) = sup_residual(&cover, &tris, samples, seed, |s, w| {
        let (i, j, k) = (s.0[0], s.0[1], s.0[2]);
        let lhs = fl_sigma(f, l, i, j) - fl_sigma(f, l, i, k) + fl_sigma(f, l, j, k);
        let rhs = -(f.m(i, j) * Expr::log_abs(l.transition(j, k)));
        Ok((lhs.eval(w)? - rhs.eval(w)?).norm())
    })?;
    Ok(r)
}

/// (L,L′) in Z(2)_D, degree 4: (−(2πi)² c_ijk c′_klm, −2πi c_ijk log g′_kl, log g_ij d log g′_jk).
pub fn symbol_ll(l: &LineBundleData, lp: &LineBundleData) -> Result<CechCochain> {
    Ok(deligne_cup(&l.deligne_class()?, &lp.deligne_class()?)?.neg())
}

/// The hermitian (L,L′) in Z(1) → O → E⁰, degree 4, with metric slot
/// −(1/2πi) π₁(log g_ij) π₀(log g′_jk).
pub fn hermitian_symbol_ll(l: &LineBundleData, lp: &LineBundleData) -> Result<CechCochain> {
    let c = hermitian_cup(&l.deligne_class()?, &lp.deligne_class()?)?;
    rescale_into(&c, hh1(), &two_pi_i_inv().neg())
}

/// Largest residual of σ_jkl − σ_ikl + σ_ijl − σ_ijk = log|h_ijkl| with h_ijkl = g′_kl^{−c_ijk},
/// the logarithmic form of ρ_jkl ρ_ikl⁻¹ ρ_ijl ρ_ijk⁻¹ = |h_ijkl|² for ρ = exp(2σ).
pub fn ll_modulus_residual(l: &LineBundleData, lp: &LineBundleData, samples: usize, seed: u64) -> Result<f64> {
    let h = hermitian_symbol_ll(l, lp)?;
    let cover = l.cover().clone();
    let quads: Vec<Simplex> = cover.nerve(3).into_iter().filter(|s| s.dim() == 3).collect();
    if quads.is_empty() {
        return Err(Error::InvalidCover("no quadruple overlaps".into()));
    }
    let sigma = |s: Vec<usize>| h.value(&Simplex(s))[0].clone();
    let (r, _) = sup_residual(&cover, &quads, samples, seed, |s, w| {
        let v = &s.0;
        let (i, j, k, m) = (v[0], v[1], v[2], v[3]);
        let lhs = sigma(vec![j, k, m])
            .sub(&sigma(vec![i, k, m]))?
            .add(&sigma(vec![i, j, m]))?
            .sub(&sigma(vec![i, j, k]))?
            .eval(w)?[0];
        let c = l.chern(i, j, k, w)?.n;
        let g = lp.transition(k, m).eval(w)?;
        let rhs = -(c as f64) * g.norm().ln();
        Ok((lhs - Complex64::new(rhs, 0.0)).norm())
    })?;
    Ok(r)
}

/// r₂(f,g) = π₁(d log f) log|g| − log|f| π₁(d log g).
pub fn r2_form(f: &RationalFunction, g: &RationalFunction) -> Result<Form> {
    let dl = |r: &RationalFunction| -> Result<Form> {
        Ok(Form::one_form(Expr::rat(&r.log_derivative()?), Expr::zero()).pi(1))
    };
    dl(f)?.scale(&Expr::log_abs(g)).sub(&dl(g)?.scale(&Expr::log_abs(f)))
}

/// Residual of π₁(ω_i) + dσ_i = −r₂(f,g) and whether r₂ vanishes.
#[derive(Debug, Clone, Serialize)]
pub struct CompatibilityReport {
    pub identity_residual: f64,
    pub worst_sector: Option<usize>,
    pub r2_max: f64,
    pub r2_structurally_zero: bool,
    /// The analytic and metric connections agree exactly when r₂ = 0.
    pub compatible: bool,
    pub tolerance: f64,
    pub pass: bool,
}

/// ω_i = log_i f dg/g, σ_i = −π₁(log_i f) log|g|.
pub fn compatibility_obstruction(
    f: &Arc<LogBranches>,
    g: &Arc<LogBranches>,
    samples: usize,
    seed: u64,
) -> Result<CompatibilityReport> {
    let fl = FunctionLog::new(f.clone());
    let cover = fl.cover().clone();
    let r2 = r2_form(f.function(), g.function())?;
    let dlog_g = FunctionLog::new(g.clone()).dlog()?;
    let vs: Vec<Simplex> = (0..cover.n()).map(|i| Simplex(vec![i])).collect();
    let (res, worst) = sup_residual(&cover, &vs, samples, seed, |s, w| {
        let i = s.0[0];
        let omega = dlog_g.scale(&fl.log(i));
        let sigma = -(fl.log(i).pi(1) * Expr::log_abs(g.function()));
        omega.pi(1).add(&Form::function(sigma).d()?)?.add(&r2)?.max_abs(w)
    })?;
    let (r2_max, _) = sup_residual(&cover, &vs, samples, seed, |_, w| r2.max_abs(w))?;
    let structural = r2.simplify().is_zero();
    let compatible = structural || r2_max < 1e-12;
    Ok(CompatibilityReport {
        identity_residual: res,
        worst_sector: worst.map(|s| s.0[0]),
        r2_max,
        r2_structurally_zero: structural,
        compatible,
        tolerance: SYMBOL_TOL,
        pass: res < SYMBOL_TOL,
    })
}

/// Largest |r₂(f,g_jk) − r₂(f,g_ik) + r₂(f,g_ij)| over triangles.
pub fn r2_coboundary_residual(f: &RationalFunction, l: &LineBundleData, samples: usize, seed: u64) -> Result<f64> {
    let cover = l.cover().clone();
    let r2: BTreeMap<(usize, usize), Form> =
        l.transitions().iter().map(|(e, g)| Ok((*e, r2_form(f, g)?))).collect::<Result<_>>()?;
    let tris: Vec<Simplex> = cover.nerve(2).into_iter().filter(|s| s.dim() == 2).collect();
    let (r, _) = sup_residual(&cover, &tris, samples, seed, |s, w| {
        let (i, j, k) = (s.0[0], s.0[1], s.0[2]);
        r2[&(j, k)].sub(&r2[&(i, k)])?.add(&r2[&(i, j)])?.max_abs(w)
    })?;
    Ok(r)
}

/// With multiplicative branches, the transitions of ⟨f₁f₂, g⟩ are the products of those of
/// ⟨f₁,g⟩ and ⟨f₂,g⟩ as exact rational functions.
pub fn bimultiplicative_in_first(f1: &Arc<LogBranches>, f2: &Arc<LogBranches>, g: &Arc<LogBranches>) -> Result<bool> {
    let t1 = tame_symbol(f1, g)?;
    let t2 = tame_symbol(f2, g)?;
    let t12 = tame_symbol_from(FunctionLog::multiplicative(vec![f1.clone(), f2.clone()])?, FunctionLog::new(g.clone()))?;
    pieces_multiply(&t12, &t1, &t2)
}

fn pieces_multiply(t12: &TameSymbolData, t1: &TameSymbolData, t2: &TameSymbolData) -> Result<bool> {
    for (e, ps) in &t12.transitions {
        for (k, p) in ps.iter().enumerate() {
            if p.value != t1.transitions[e][k].value.mul(&t2.transitions[e][k].value)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Same in the second argument: the transition of ⟨f, g₁g₂⟩ is (g₁g₂)^{−m_ij}.
pub fn bimultiplicative_in_second(f: &Arc<LogBranches>, g1: &Arc<LogBranches>, g2: &Arc<LogBranches>) -> Result<bool> {
    let t1 = tame_symbol(f, g1)?;
    let t2 = tame_symbol(f, g2)?;
    let t12 = tame_symbol_from(FunctionLog::new(f.clone()), FunctionLog::multiplicative(vec![g1.clone(), g2.clone()])?)?;
    pieces_multiply(&t12, &t1, &t2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle_data::HermitianMetricData;
    use crate::cech_engine::{is_cocycle, residual_report};
    use crate::cover_nerve::assign_branches;
    use crate::exact_algebra::parse_rational;

    fn cover(n: usize, w: f64) -> Arc<SectorCover> {
        Arc::new(SectorCover::new(GaussianRational::zero(), 0.5, 1.5, n, w).unwrap())
    }

    fn br(src: &str, c: &Arc<SectorCover>) -> Arc<LogBranches> {
        assign_branches(&parse_rational(src).unwrap(), c).unwrap()
    }

    fn max_diff(a: &CechCochain, b: &CechCochain) -> f64 {
        residual_report(&a.sub(b).unwrap(), 1e-10, 10, 5).unwrap().max_residual
    }

    fn cocycle_ok(c: &CechCochain) -> bool {
        let r = is_cocycle(c, SYMBOL_TOL).unwrap();
        if !r.pass {
            eprintln!("{}: {} at {:?}", r.complex, r.max_residual, r.worst_simplex);
        }
        r.pass
    }

    #[test]
    fn constant_symbol_is_trivial() {
        let c = cover(3, 4.5);
        let t = tame_symbol(&br("3", &c), &br("-2", &c)).unwrap();
        assert!(t.transitions.values().flatten().all(|p| p.value == RationalFunction::one()));
        for (i, o) in t.omega.iter().enumerate() {
            let w = c.sample_points(&Simplex(vec![i]), 1, 0).unwrap()[0];
            assert!(o.max_abs(w).unwrap() < 1e-14);
        }
        assert!(cocycle_ok(&t.cocycle));
    }

    #[test]
    fn tame_symbol_matches_cup_product() {
        for (n, w) in [(3, 4.5), (4, 5.0)] {
            let c = cover(n, w);
            let (f, g) = (br("z", &c), br("z-3", &c));
            let t = tame_symbol(&f, &g).unwrap();
            assert!(cocycle_ok(&t.cocycle));
            let cup = deligne_cup(&FunctionLog::new(f).class().unwrap(), &FunctionLog::new(g).class().unwrap()).unwrap();
            assert!(max_diff(&t.cocycle, &cup) < 1e-12);
        }
    }

    #[test]
    fn transitions_and_connection_glue() {
        let c = cover(3, 4.5);
        let (f, g) = (br("z", &c), br("z^2+4", &c));
        let t = tame_symbol(&f, &g).unwrap();
        assert!(t.transitions.values().flatten().any(|p| p.value != RationalFunction::one()));
        let fl = FunctionLog::new(f.clone());
        let gl = FunctionLog::new(g.clone());
        for ((i, j), pieces) in &t.transitions {
            let e = Simplex(vec![*i, *j]);
            for p in pieces {
                let tr = &p.value;
                let m = overlap_integers(&c, &e, &fl.m(*i, *j)).unwrap().into_iter().find(|q| q.interval == p.interval).unwrap().value;
                let dlog_t = Form::one_form(Expr::rat(&tr.log_derivative().unwrap()), Expr::zero());
                let diff = t.connection_form(*j).sub(&t.connection_form(*i)).unwrap().sub(&dlog_t).unwrap();
                // A section h_i{log_i f,g} = h_j{log_j f,g} has h_j = h_i + m_ij log g.
                let h_i = Expr::rat(&parse_rational("z^3").unwrap());
                let h_j = h_i.clone() + Expr::int(m) * gl.log(*j);
                let action = t.connection_action(*j, &h_j).unwrap().sub(&t.connection_action(*i, &h_i).unwrap()).unwrap();
                let (a, b) = p.interval;
                for k in 1..10 {
                    let w = c.point(0.6 + 0.08 * k as f64, a + (b - a) * k as f64 / 10.0);
                    assert!(diff.max_abs(w).unwrap() < 1e-10);
                    assert!(action.max_abs(w).unwrap() < 1e-10);
                    let want = g.function().eval(w).unwrap().powi(-m as i32);
                    assert!((tr.eval(w).unwrap() - want).norm() < 1e-10);
                    let m_here = fl.m(*i, *j).eval(w).unwrap().re.round() as i64;
                    assert_eq!(m_here, m);
                }
            }
        }
    }

    #[test]
    fn hermitian_symbol_matches_cup_product() {
        let c = cover(3, 4.5);
        let (f, g) = (br("z", &c), br("z-3", &c));
        let h = hermitian_tame_symbol(&f, &g).unwrap();
        assert!(cocycle_ok(&h.cocycle));
        let cup = hermitian_cup(&FunctionLog::new(f.clone()).class().unwrap(), &FunctionLog::new(g.clone()).class().unwrap())
            .unwrap();
        let cup = rescale_into(&cup, hh1(), &two_pi_i_inv()).unwrap();
        assert!(max_diff(&h.cocycle, &cup) < 1e-12);
        // metric slot against −(1/2πi)π₁(log_i f)log|g| evaluated directly
        for i in 0..3 {
            for w in c.sample_points(&Simplex(vec![i]), 20, 4).unwrap() {
                let lf = f.log_at(i, w).unwrap();
                let want = -lf.im / (2.0 * std::f64::consts::PI) * g.function().eval(w).unwrap().norm().ln();
                let got = cup.value(&Simplex(vec![i]))[0].eval(w).unwrap()[0];
                assert!((got - Complex64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn hermitian_constant_case() {
        let c = cover(3, 4.5);
        let h = hermitian_tame_symbol(&br("-5", &c), &br("7", &c)).unwrap();
        let w = c.point(1.0, 0.2);
        // log(−5) = log 5 + πi, so −(1/2πi)·πi·log 7 = −½ log 7
        let got = h.sigma[0].eval(w).unwrap();
        assert!((got.re + 0.5 * 7f64.ln()).abs() < 1e-12 && got.im.abs() < 1e-12);
    }

    #[test]
    fn section_length() {
        let c = cover(3, 4.5);
        let h = hermitian_tame_symbol(&br("z", &c), &br("2", &c)).unwrap();
        let v = h.section_log_length(0, &Expr::zero()).eval(Complex64::new(1.0, 0.0)).unwrap();
        assert!(v.norm() < 1e-14);
        // s = H·{log_i f,g}: ½ log(|H|² ρ_i) with h = 2πi log H
        let hh = parse_rational("z+3").unwrap();
        let h_coord = Expr::log_abs(&hh).scale(Scalar::two_pi_i(1));
        for w in c.sample_points(&Simplex(vec![1]), 10, 2).unwrap() {
            let got = h.section_log_length(1, &h_coord).eval(w).unwrap();
            let want = hh.eval(w).unwrap().norm().ln() + h.sigma[1].eval(w).unwrap().re;
            assert!((got.re - want).abs() < 1e-12 && got.im.abs() < 1e-12);
        }
    }

    #[test]
    fn forgetting_extra_slots_gives_the_same_bundle() {
        let c = cover(3, 4.5);
        let (f, g) = (br("z", &c), br("z-3", &c));
        let t = tame_symbol(&f, &g).unwrap();
        let h = hermitian_tame_symbol(&f, &g).unwrap();
        assert!(underlying_bundles_agree(&t, &h).unwrap());
        let other = hermitian_tame_symbol(&br("z", &c), &br("z+5", &c)).unwrap();
        assert!(!underlying_bundles_agree(&t, &other).unwrap());
    }

    #[test]
    fn higher_symbols_are_cocycles() {
        let c = cover(4, 5.0);
        let f = FunctionLog::new(br("z", &c));
        let b = [0, 1, 3, -1];
        let l = LineBundleData::power_family(c.clone(), &b).unwrap();
        let lp = LineBundleData::power_family(c.clone(), &[2, 0, -1, 1]).unwrap();
        assert!(cocycle_ok(&symbol_fl(&f, &l).unwrap()));
        assert!(cocycle_ok(&hermitian_symbol_fl(&f, &l).unwrap()));
        assert!(fl_coboundary_residual(&f, &l, 20, 3).unwrap() < 1e-10);
        assert!(cocycle_ok(&symbol_ll(&l, &lp).unwrap()));
        assert!(cocycle_ok(&hermitian_symbol_ll(&l, &lp).unwrap()));
        assert!(ll_modulus_residual(&l, &lp, 20, 3).unwrap() < 1e-10);
        let _ = HermitianMetricData::power_family(c, &b).unwrap();
    }

    #[test]
    fn higher_symbol_slots_match_formulas() {
        let c = cover(4, 5.0);
        let fb = br("z", &c);
        let f = FunctionLog::new(fb.clone());
        let l = LineBundleData::power_family(c.clone(), &[0, 1, 3, -1]).unwrap();
        let lp = LineBundleData::power_family(c.clone(), &[2, 0, -1, 1]).unwrap();
        let fl = symbol_fl(&f, &l).unwrap();
        let hfl = hermitian_symbol_fl(&f, &l).unwrap();
        let ll = symbol_ll(&l, &lp).unwrap();
        let hll = hermitian_symbol_ll(&l, &lp).unwrap();
        for s in c.nerve(3) {
            let v = &s.0;
            for w in c.sample_points(&s, 5, 9).unwrap() {
                match s.dim() {
                    1 => {
                        let (i, j) = (v[0], v[1]);
                        let want = fb.log_at(i, w).unwrap() * l.transition(i, j).log_derivative().unwrap().eval(w).unwrap();
                        assert!((fl.value(&s)[0].eval(w).unwrap()[0] - want).norm() < 1e-10);
                        let sig = -fb.log_at(i, w).unwrap().im / (2.0 * std::f64::consts::PI)
                            * l.transition(i, j).eval(w).unwrap().norm().ln();
                        assert!((hfl.value(&s)[0].eval(w).unwrap()[0] - sig).norm() < 1e-10);
                    }
                    2 => {
                        let (i, j, k) = (v[0], v[1], v[2]);
                        let m = fb.branch_integer(i, j, w).unwrap() as f64;
                        let lg = l.log_g(j, k).eval(w).unwrap();
                        let tpi = Complex64::new(0.0, std::f64::consts::TAU);
                        assert!((fl.value(&s)[0].eval(w).unwrap()[0] + tpi * m * lg).norm() < 1e-10);
                        assert!((hfl.value(&s)[0].eval(w).unwrap()[0] + m * lg).norm() < 1e-10);
                        // (L,L′) form slot: −(1/2πi)·log g_ij d log g′_jk in the torsor picture
                        let want = l.log_g(i, j).eval(w).unwrap()
                            * lp.transition(j, k).log_derivative().unwrap().eval(w).unwrap();
                        assert!((ll.value(&s)[0].eval(w).unwrap()[0] - want).norm() < 1e-10);
                        let sig = -l.log_g(i, j).eval(w).unwrap().im / std::f64::consts::TAU
                            * lp.transition(j, k).eval(w).unwrap().norm().ln();
                        assert!((hll.value(&s)[0].eval(w).unwrap()[0] - sig).norm() < 1e-10);
                    }
                    3 => {
                        let (i, j, k, m) = (v[0], v[1], v[2], v[3]);
                        let cc = l.chern(i, j, k, w).unwrap().n as f64;
                        let lg = lp.log_g(k, m).eval(w).unwrap();
                        let tpi = Complex64::new(0.0, std::f64::consts::TAU);
                        assert!((ll.value(&s)[0].eval(w).unwrap()[0] + tpi * cc * lg).norm() < 1e-10);
                        assert!((hll.value(&s)[0].eval(w).unwrap()[0] + cc * lg).norm() < 1e-10);
                    }
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn trivial_bundle_gives_zero_symbol() {
        let c = cover(4, 5.0);
        let l = LineBundleData::trivial(c.clone()).unwrap();
        let lp = LineBundleData::power_family(c.clone(), &[2, 0, -1, 1]).unwrap();
        let f = FunctionLog::new(br("z", &c));
        let fl = symbol_fl(&f, &l).unwrap();
        assert!(residual_report(&fl, 1e-12, 5, 1).unwrap().max_residual < 1e-12);
        let ll = symbol_ll(&l, &lp).unwrap();
        assert!(residual_report(&ll, 1e-12, 5, 1).unwrap().max_residual < 1e-12);
    }

    #[test]
    fn r2_examples() {
        let c = cover(3, 4.5);
        let z = parse_rational("z").unwrap();
        let two = parse_rational("2").unwrap();
        assert!(r2_form(&z, &z).unwrap().simplify().is_zero());
        let cst = r2_form(&two, &parse_rational("5").unwrap()).unwrap();
        let r = r2_form(&z, &two).unwrap();
        for w in c.sample_points(&Simplex(vec![0]), 20, 3).unwrap() {
            assert!(cst.max_abs(w).unwrap() < 1e-14);
            assert!(r2_form(&z, &z).unwrap().max_abs(w).unwrap() < 1e-12);
            // π₁(dz/z) = ½(dz/z − dz̄/z̄)
            let v = r.eval(w).unwrap();
            let l2 = 2f64.ln();
            assert!((v[0] - 0.5 / w * l2).norm() < 1e-12);
            assert!((v[1] + 0.5 / w.conj() * l2).norm() < 1e-12);
        }
    }

    #[test]
    fn compatibility_examples() {
        let c = cover(3, 4.5);
        let r = compatibility_obstruction(&br("3", &c), &br("5", &c), 20, 1).unwrap();
        assert!(r.pass && r.compatible && r.r2_max < 1e-14);
        let r = compatibility_obstruction(&br("z", &c), &br("2", &c), 20, 1).unwrap();
        assert!(r.pass && !r.compatible, "{:?}", r);
        let r = compatibility_obstruction(&br("z", &c), &br("z", &c), 20, 1).unwrap();
        assert!(r.pass && r.compatible, "{:?}", r);
        let r = compatibility_obstruction(&br("z-3", &c), &br("z^2+z+5", &c), 20, 1).unwrap();
        assert!(r.pass, "{:?}", r);
    }

    #[test]
    fn r2_of_transitions_is_a_cocycle() {
        let c = cover(4, 5.0);
        let l = LineBundleData::power_family(c, &[1, -2, 0, 3]).unwrap();
        assert!(r2_coboundary_residual(&parse_rational("z+5").unwrap(), &l, 20, 8).unwrap() < 1e-10);
    }

    #[test]
    fn bimultiplicativity() {
        let c = cover(3, 4.5);
        let (f1, f2, g) = (br("z", &c), br("z^2", &c), br("z-3", &c));
        assert!(bimultiplicative_in_first(&f1, &f2, &g).unwrap());
        let (g1, g2) = (br("z+4", &c), br("z", &c));
        assert!(bimultiplicative_in_second(&f1, &g1, &g2).unwrap());
    }
}
