//! Line bundles given by transition functions on a sector cover, hermitian metrics of
//! the form |R|^{2k}, the canonical connection, and synthetic gerbe data.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cech_engine::{deligne_complex, dhh1, hh1, is_cocycle, sup_residual, CechCochain, CocycleReport};
use crate::cover_nerve::{assign_branches, LogBranches, SectorCover, Simplex};
use crate::error::{Error, Result};
use crate::exact_algebra::{parse_rational, RationalFunction, TwistedInteger};
use crate::form_calculus::{Expr, Form};

/// Transition functions g_ij on the edges of the nerve, with chosen logarithms
/// log g_ij := log_i(g_ij).
#[derive(Debug, Clone)]
pub struct LineBundleData {
    cover: Arc<SectorCover>,
    transitions: BTreeMap<(usize, usize), RationalFunction>,
    logs: BTreeMap<(usize, usize), Arc<LogBranches>>,
}

fn edges(cover: &SectorCover) -> Vec<(usize, usize)> {
    cover.nerve(1).into_iter().filter(|s| s.dim() == 1).map(|s| (s.0[0], s.0[1])).collect()
}

fn triangles(cover: &SectorCover) -> Vec<Simplex> {
    cover.nerve(2).into_iter().filter(|s| s.dim() == 2).collect()
}

fn simplices_of_dim(cover: &SectorCover, d: usize) -> Vec<Simplex> {
    cover.nerve(d).into_iter().filter(|s| s.dim() == d).collect()
}

/// (z − center)^k on the cover.
fn centered_power(cover: &SectorCover, k: i64) -> Result<RationalFunction> {
    RationalFunction::z_minus(cover.center()).pow(k as i32)
}

impl LineBundleData {
    /// Build from transitions on edges; missing edges get g_ij = 1. Checks invertibility on
    /// the annulus and the exact cocycle condition g_ij g_jk = g_ik on triangles.
    pub fn new(cover: Arc<SectorCover>, given: &[((usize, usize), RationalFunction)]) -> Result<Self> {
        let mut transitions = BTreeMap::new();
        for e in edges(&cover) {
            transitions.insert(e, RationalFunction::one());
        }
        for ((i, j), g) in given {
            if !transitions.contains_key(&(*i, *j)) {
                return Err(Error::InvalidCover(format!("[{},{}] is not an edge of the nerve", i, j)));
            }
            cover.check_function(g)?;
            transitions.insert((*i, *j), g.clone());
        }
        for t in triangles(&cover) {
            let (i, j, k) = (t.0[0], t.0[1], t.0[2]);
            let lhs = transitions[&(i, j)].mul(&transitions[&(j, k)])?;
            if lhs != transitions[&(i, k)] {
                return Err(Error::NotACocycle(format!("g_ij g_jk != g_ik on {}", t)));
            }
        }
        let mut logs = BTreeMap::new();
        for (e, g) in &transitions {
            logs.insert(*e, assign_branches(g, &cover)?);
        }
        Ok(LineBundleData { cover, transitions, logs })
    }

    pub fn trivial(cover: Arc<SectorCover>) -> Result<Self> {
        Self::new(cover, &[])
    }

    /// g_ij = (z − p)^{b_j − b_i}.
    pub fn power_family(cover: Arc<SectorCover>, b: &[i64]) -> Result<Self> {
        check_len(&cover, b)?;
        let given = edges(&cover)
            .into_iter()
            .map(|(i, j)| Ok(((i, j), centered_power(&cover, b[j] - b[i])?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(cover, &given)
    }

    pub fn cover(&self) -> &Arc<SectorCover> {
        &self.cover
    }

    pub fn transition(&self, i: usize, j: usize) -> &RationalFunction {
        &self.transitions[&(i, j)]
    }

    pub fn transitions(&self) -> &BTreeMap<(usize, usize), RationalFunction> {
        &self.transitions
    }

    pub fn log_branches(&self, i: usize, j: usize) -> &Arc<LogBranches> {
        &self.logs[&(i, j)]
    }

    /// log g_ij on U_ij.
    pub fn log_g(&self, i: usize, j: usize) -> Expr {
        Expr::log(&self.logs[&(i, j)], i)
    }

    /// c_ijk = (log g_jk − log g_ik + log g_ij)/2πi as an integer node.
    pub fn chern_expr(&self, i: usize, j: usize, k: usize) -> Expr {
        Expr::int_of(self.log_g(j, k) - self.log_g(i, k) + self.log_g(i, j))
    }

    pub fn chern(&self, i: usize, j: usize, k: usize, w: Complex64) -> Result<TwistedInteger> {
        let v = self.chern_expr(i, j, k).eval(w)?;
        Ok(TwistedInteger::new(v.re.round() as i64, 1))
    }

    /// The class in Z(1)_D: (2πi c_ijk, log g_ij).
    pub fn deligne_class(&self) -> Result<CechCochain> {
        let mut c = CechCochain::zero(deligne_complex(1), self.cover.clone(), 2);
        for s in c.support() {
            let v = &s.0;
            let val = match s.dim() {
                2 => Expr::two_pi_i(1) * self.chern_expr(v[0], v[1], v[2]),
                _ => self.log_g(v[0], v[1]),
            };
            c.set(s, vec![Form::function(val)])?;
        }
        Ok(c)
    }

    /// Largest |δc| over tetrahedra (exactly zero for an integer cocycle).
    pub fn chern_coboundary(&self, samples: usize, seed: u64) -> Result<i64> {
        let mut worst = 0;
        for t in simplices_of_dim(&self.cover, 3) {
            let v = &t.0;
            for w in self.cover.sample_points(&t, samples, seed)? {
                let d = self.chern(v[1], v[2], v[3], w)?.n - self.chern(v[0], v[2], v[3], w)?.n
                    + self.chern(v[0], v[1], v[3], w)?.n
                    - self.chern(v[0], v[1], v[2], w)?.n;
                worst = worst.max(d.abs());
            }
        }
        Ok(worst)
    }
}

fn check_len(cover: &SectorCover, b: &[i64]) -> Result<()> {
    if b.len() != cover.n() {
        return Err(Error::Config(format!("expected {} exponents, got {}", cover.n(), b.len())));
    }
    Ok(())
}

/// ρ_i = Π |R|^{2k} over the listed factors of sector i.
#[derive(Debug, Clone)]
pub struct HermitianMetricData {
    cover: Arc<SectorCover>,
    factors: Vec<Vec<(RationalFunction, i64)>>,
}

impl HermitianMetricData {
    pub fn new(cover: Arc<SectorCover>, factors: Vec<Vec<(RationalFunction, i64)>>) -> Result<Self> {
        if factors.len() != cover.n() {
            return Err(Error::Config(format!("expected {} metric sectors, got {}", cover.n(), factors.len())));
        }
        for fs in &factors {
            for (r, _) in fs {
                cover.check_function(r)?;
            }
        }
        Ok(HermitianMetricData { cover, factors })
    }

    pub fn trivial(cover: Arc<SectorCover>) -> Result<Self> {
        let n = cover.n();
        Self::new(cover, vec![Vec::new(); n])
    }

    /// ρ_i = |z − p|^{2 b_i}.
    pub fn power_family(cover: Arc<SectorCover>, b: &[i64]) -> Result<Self> {
        check_len(&cover, b)?;
        let z = RationalFunction::z_minus(cover.center());
        let factors = b.iter().map(|&k| vec![(z.clone(), k)]).collect();
        Self::new(cover, factors)
    }

    pub fn rho(&self, i: usize) -> Expr {
        let mut e = Expr::one();
        for (r, k) in &self.factors[i] {
            let abs2 = Expr::rat(r) * Expr::rat(r).conj();
            e = e * abs2.pow(*k as i32);
        }
        e
    }

    pub fn log_rho(&self, i: usize) -> Expr {
        let mut e = Expr::zero();
        for (r, k) in &self.factors[i] {
            e = e + Expr::log_abs(r).scale(crate::exact_algebra::Scalar::int(2 * k));
        }
        e
    }

    /// Largest relative residual of ρ_j = ρ_i |g_ij|² over the overlaps.
    pub fn compatibility_residual(&self, l: &LineBundleData, samples: usize, seed: u64) -> Result<f64> {
        let es: Vec<Simplex> = edges(&self.cover).into_iter().map(|(i, j)| Simplex(vec![i, j])).collect();
        let (r, _) = sup_residual(&self.cover, &es, samples, seed, |s, w| {
            let (i, j) = (s.0[0], s.0[1]);
            let rj = self.rho(j).eval(w)?;
            let ri = self.rho(i).eval(w)?;
            let g = l.transition(i, j).eval(w)?;
            Ok((rj - ri * g.norm_sqr()).norm() / rj.norm().max(1e-300))
        })?;
        Ok(r)
    }
}

/// Per-sector (1,0)-forms ξ_i.
#[derive(Debug, Clone)]
pub struct ConnectionData {
    pub xi: Vec<Form>,
}

/// Residuals of the canonical connection identities.
#[derive(Debug, Clone, Serialize)]
pub struct ConnectionReport {
    /// ξ_j − ξ_i − d log g_ij.
    pub transition_residual: f64,
    /// π₀(ξ_i) − ½ d log ρ_i.
    pub real_part_residual: f64,
    /// η_j − η_i with η_i = ∂̄∂ log ρ_i.
    pub curvature_overlap_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub const METRIC_TOL: f64 = 1e-10;

/// ξ_i = ∂ log ρ_i, after checking ρ_j = ρ_i |g_ij|².
pub fn canonical_connection(l: &LineBundleData, m: &HermitianMetricData) -> Result<ConnectionData> {
    let r = m.compatibility_residual(l, 20, 1)?;
    if r >= METRIC_TOL {
        return Err(Error::MetricIncompatible(r));
    }
    let xi = (0..m.cover.n()).map(|i| Form::function(m.log_rho(i)).del()).collect::<Result<Vec<_>>>()?;
    Ok(ConnectionData { xi })
}

/// η_i = ∂̄∂ log ρ_i.
pub fn curvature(m: &HermitianMetricData, i: usize) -> Result<Form> {
    Form::function(m.log_rho(i)).del()?.delbar()
}

pub fn check_connection(
    l: &LineBundleData,
    m: &HermitianMetricData,
    c: &ConnectionData,
    samples: usize,
    seed: u64,
) -> Result<ConnectionReport> {
    let cover = &m.cover;
    let es: Vec<Simplex> = edges(cover).into_iter().map(|(i, j)| Simplex(vec![i, j])).collect();
    let vs: Vec<Simplex> = (0..cover.n()).map(|k| Simplex(vec![k])).collect();
    let dlog: BTreeMap<(usize, usize), Form> = l
        .transitions
        .iter()
        .map(|(e, g)| Ok((*e, Form::one_form(Expr::rat(&g.log_derivative()?), Expr::zero()))))
        .collect::<Result<_>>()?;
    let (t, _) = sup_residual(cover, &es, samples, seed, |s, w| {
        let (i, j) = (s.0[0], s.0[1]);
        c.xi[j].sub(&c.xi[i])?.sub(&dlog[&(i, j)])?.max_abs(w)
    })?;
    let half_d: Vec<Form> = (0..cover.n())
        .map(|i| Ok(Form::function(m.log_rho(i)).d()?.scale(&Expr::ratio(1, 2))))
        .collect::<Result<_>>()?;
    let (rp, _) = sup_residual(cover, &vs, samples, seed, |s, w| {
        let i = s.0[0];
        c.xi[i].pi(0).sub(&half_d[i])?.max_abs(w)
    })?;
    let eta: Vec<Form> = (0..cover.n()).map(|i| curvature(m, i)).collect::<Result<_>>()?;
    let (cv, _) = sup_residual(cover, &es, samples, seed, |s, w| eta[s.0[1]].sub(&eta[s.0[0]])?.max_abs(w))?;
    let pass = t < METRIC_TOL && rp < METRIC_TOL && cv < METRIC_TOL;
    Ok(ConnectionReport {
        transition_residual: t,
        real_part_residual: rp,
        curvature_overlap_residual: cv,
        tolerance: METRIC_TOL,
        pass,
    })
}

fn same_cover(l: &LineBundleData, m: &HermitianMetricData) -> Result<()> {
    if !Arc::ptr_eq(&l.cover, &m.cover) {
        return Err(Error::SlotMismatch("bundle and metric live on different covers".into()));
    }
    Ok(())
}

/// (2πi c_ijk, log g_ij, ½ log ρ_i) in Z(1) → O → E⁰.
pub fn metrized_bundle_cocycle(l: &LineBundleData, m: &HermitianMetricData) -> Result<CechCochain> {
    same_cover(l, m)?;
    let mut c = CechCochain::zero(hh1(), l.cover.clone(), 2);
    for s in c.support() {
        let v = &s.0;
        let val = match s.dim() {
            2 => Expr::two_pi_i(1) * l.chern_expr(v[0], v[1], v[2]),
            1 => l.log_g(v[0], v[1]),
            _ => m.log_rho(v[0]).scale(crate::exact_algebra::Scalar::ratio(1, 2)),
        };
        c.set(s, vec![Form::function(val)])?;
    }
    Ok(c)
}

/// The full weight-one hermitian holomorphic cocycle: (2πi c_ijk, log g_ij) on triangles and
/// edges, and (η_i, ξ_i, −½ log ρ_i) on vertices.
pub fn hh_cocycle(l: &LineBundleData, m: &HermitianMetricData) -> Result<CechCochain> {
    same_cover(l, m)?;
    let conn = canonical_connection(l, m)?;
    let mut c = CechCochain::zero(dhh1(), l.cover.clone(), 2);
    for s in c.support() {
        let v = &s.0;
        let val = match s.dim() {
            2 => vec![Form::function(Expr::two_pi_i(1) * l.chern_expr(v[0], v[1], v[2]))],
            1 => vec![Form::function(l.log_g(v[0], v[1]))],
            _ => vec![
                curvature(m, v[0])?,
                conn.xi[v[0]].clone(),
                Form::function(m.log_rho(v[0]).scale(crate::exact_algebra::Scalar::ratio(-1, 2))),
            ],
        };
        c.set(s, val)?;
    }
    Ok(c)
}

/// Cocycle check of the full hermitian holomorphic cocycle.
pub fn hh_cocycle_check(l: &LineBundleData, m: &HermitianMetricData, tol: f64) -> Result<CocycleReport> {
    is_cocycle(&hh_cocycle(l, m)?, tol)
}

/// Gerbe data built from an integer coboundary: ρ_ij = |z − p|^{2a_ij},
/// g_ijk = (z − p)^{(δa)_ijk}, ξ_ij = ∂ log ρ_ij.
#[derive(Debug, Clone)]
pub struct SyntheticGerbe {
    pub cover: Arc<SectorCover>,
    pub a: BTreeMap<(usize, usize), i64>,
}

/// 2-gerbe data built from an integer coboundary: ρ_ijk = |z − p|^{2a_ijk},
/// h_ijkl = (z − p)^{(δa)_ijkl}.
#[derive(Debug, Clone)]
pub struct SyntheticTwoGerbe {
    pub cover: Arc<SectorCover>,
    pub a: BTreeMap<(usize, usize, usize), i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GerbeReport {
    /// ρ_ij ρ_jk − |g_ijk|² ρ_ik, relative.
    pub metric_residual: f64,
    /// ξ_jk − ξ_ik + ξ_ij − d log g_ijk.
    pub connection_residual: f64,
    pub pass: bool,
}

fn abs_pow(cover: &SectorCover, w: Complex64, k: i64) -> f64 {
    (w - cover.center_c64()).norm().powi(2 * k as i32)
}

impl SyntheticGerbe {
    pub fn random(cover: Arc<SectorCover>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = edges(&cover).into_iter().map(|e| (e, rng.random_range(-3..=3))).collect();
        SyntheticGerbe { cover, a }
    }

    pub fn g_exponent(&self, i: usize, j: usize, k: usize) -> i64 {
        self.a[&(j, k)] - self.a[&(i, k)] + self.a[&(i, j)]
    }

    pub fn rho(&self, i: usize, j: usize) -> Expr {
        let z = RationalFunction::z_minus(self.cover.center());
        (Expr::rat(&z) * Expr::rat(&z).conj()).pow(self.a[&(i, j)] as i32)
    }

    pub fn xi(&self, i: usize, j: usize) -> Result<Form> {
        let z = RationalFunction::z_minus(self.cover.center());
        Form::function(Expr::log_abs(&z).scale(crate::exact_algebra::Scalar::int(2 * self.a[&(i, j)]))).del()
    }

    pub fn check(&self, samples: usize, seed: u64) -> Result<GerbeReport> {
        let tris = triangles(&self.cover);
        let (mr, _) = sup_residual(&self.cover, &tris, samples, seed, |s, w| {
            let (i, j, k) = (s.0[0], s.0[1], s.0[2]);
            let lhs = self.rho(i, j).eval(w)? * self.rho(j, k).eval(w)?;
            let g2 = abs_pow(&self.cover, w, self.g_exponent(i, j, k));
            let rhs = self.rho(i, k).eval(w)? * g2;
            Ok((lhs - rhs).norm() / lhs.norm())
        })?;
        let (cr, _) = sup_residual(&self.cover, &tris, samples, seed, |s, w| {
            let (i, j, k) = (s.0[0], s.0[1], s.0[2]);
            let g = centered_power(&self.cover, self.g_exponent(i, j, k))?;
            let dlog = Form::one_form(Expr::rat(&g.log_derivative()?), Expr::zero());
            self.xi(j, k)?.sub(&self.xi(i, k)?)?.add(&self.xi(i, j)?)?.sub(&dlog)?.max_abs(w)
        })?;
        Ok(GerbeReport { metric_residual: mr, connection_residual: cr, pass: mr < METRIC_TOL && cr < METRIC_TOL })
    }
}

impl SyntheticTwoGerbe {
    pub fn random(cover: Arc<SectorCover>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = triangles(&cover).into_iter().map(|t| ((t.0[0], t.0[1], t.0[2]), rng.random_range(-3..=3))).collect();
        SyntheticTwoGerbe { cover, a }
    }

    pub fn h_exponent(&self, i: usize, j: usize, k: usize, l: usize) -> i64 {
        self.a[&(j, k, l)] - self.a[&(i, k, l)] + self.a[&(i, j, l)] - self.a[&(i, j, k)]
    }

    pub fn rho(&self, i: usize, j: usize, k: usize) -> Expr {
        let z = RationalFunction::z_minus(self.cover.center());
        (Expr::rat(&z) * Expr::rat(&z).conj()).pow(self.a[&(i, j, k)] as i32)
    }

    /// Relative residual of ρ_jkl ρ_ikl^{−1} ρ_ijl ρ_ijk^{−1} = |h_ijkl|² over quadruple overlaps.
    pub fn check(&self, samples: usize, seed: u64) -> Result<f64> {
        let quads = simplices_of_dim(&self.cover, 3);
        if quads.is_empty() {
            return Err(Error::InvalidCover("no quadruple overlaps".into()));
        }
        let (r, _) = sup_residual(&self.cover, &quads, samples, seed, |s, w| {
            let v = &s.0;
            let (i, j, k, l) = (v[0], v[1], v[2], v[3]);
            let lhs = self.rho(j, k, l).eval(w)? / self.rho(i, k, l).eval(w)? * self.rho(i, j, l).eval(w)?
                / self.rho(i, j, k).eval(w)?;
            let rhs = abs_pow(&self.cover, w, self.h_exponent(i, j, k, l));
            Ok((lhs - rhs).norm() / rhs)
        })?;
        Ok(r)
    }
}

/// One transition entry of a bundle description file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TransitionEntry {
    pub i: usize,
    pub j: usize,
    pub g: String,
}

/// Bundle description: transitions on edges and, optionally, a metric
/// ρ_i = |base|^{2 b_i}.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
pub struct BundleFile {
    #[serde(default)]
    pub transition: Vec<TransitionEntry>,
    pub metric_base: Option<String>,
    pub metric_exponents: Option<Vec<i64>>,
}

impl BundleFile {
    pub fn from_toml(src: &str) -> Result<Self> {
        toml::from_str(src).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn build(&self, cover: Arc<SectorCover>) -> Result<(LineBundleData, Option<HermitianMetricData>)> {
        let given = self
            .transition
            .iter()
            .map(|t| Ok(((t.i, t.j), parse_rational(&t.g)?)))
            .collect::<Result<Vec<_>>>()?;
        let l = LineBundleData::new(cover.clone(), &given)?;
        let m = match &self.metric_exponents {
            None => None,
            Some(b) => {
                check_len(&cover, b)?;
                let base = match &self.metric_base {
                    Some(s) => parse_rational(s)?,
                    None => RationalFunction::z_minus(cover.center()),
                };
                Some(HermitianMetricData::new(cover, b.iter().map(|&k| vec![(base.clone(), k)]).collect())?)
            }
        };
        Ok((l, m))
    }
}
