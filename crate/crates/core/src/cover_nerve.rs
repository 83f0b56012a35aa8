//! Sector covers of an annulus around a puncture, their nerves, sample points,
//! winding loops, and continuous branches of log f with integer branch cocycles.

use std::f64::consts::{PI, TAU};
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_algebra::{parse_gaussian, GaussianRational, RationalFunction, TwistedInteger};

/// Maximal tolerated |ΔArg| per continuation step, and maximal rounding residual,
/// both as fractions of a full turn.
pub const BRANCH_GUARD: f64 = 0.25;
/// Continuation steps needed to traverse one full sector width.
pub const DEFAULT_CONTINUATION_STEPS: usize = 256;

const EMPTY_TOL: f64 = 1e-12;
const SAMPLE_MARGIN: f64 = 1e-9;

/// Wrap an angle into (−π, π].
pub fn wrap_pi(t: f64) -> f64 {
    let mut x = t.rem_euclid(TAU);
    if x > PI {
        x -= TAU;
    }
    x
}

/// N angular sectors of common width covering an annulus about a center.
#[derive(Debug, Clone)]
pub struct SectorCover {
    center: GaussianRational,
    center_c: Complex64,
    inner: f64,
    outer: f64,
    n: usize,
    width: f64,
    singularities: Vec<Complex64>,
}

/// An increasing tuple of sector indices with nonempty common intersection.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(pub Vec<usize>);

impl Simplex {
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// The face obtained by deleting the k-th vertex.
    pub fn face(&self, k: usize) -> Simplex {
        let mut v = self.0.clone();
        v.remove(k);
        Simplex(v)
    }
}

impl std::fmt::Display for Simplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "[{}]", s.join(","))
    }
}

/// Text configuration of a cover.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CoverConfig {
    #[serde(default = "default_center")]
    pub center: String,
    pub inner: f64,
    pub outer: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub width: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_center() -> String {
    "0".to_string()
}

impl CoverConfig {
    pub fn from_toml(src: &str) -> Result<Self> {
        toml::from_str(src).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn build(&self) -> Result<SectorCover> {
        SectorCover::new(parse_gaussian(&self.center)?, self.inner, self.outer, self.n, self.width)
    }
}

impl SectorCover {
    pub fn new(center: GaussianRational, inner: f64, outer: f64, n: usize, width: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidCover("at least one sector is required".into()));
        }
        if !(inner > 0.0 && inner < outer && outer.is_finite()) {
            return Err(Error::InvalidCover(format!("need 0 < inner < outer, got {} and {}", inner, outer)));
        }
        if !(n as f64 * width > TAU) {
            return Err(Error::InvalidCover(format!("{} sectors of width {} do not cover the circle", n, width)));
        }
        let center_c = center.to_c64();
        Ok(SectorCover { center, center_c, inner, outer, n, width, singularities: Vec::new() })
    }

    /// Check that the closed annulus avoids the zeros and poles of each function,
    /// except at the center, and remember them for sampling.
    pub fn with_functions(mut self, fs: &[&RationalFunction]) -> Result<Self> {
        for f in fs {
            self.check_function(f)?;
            self.singularities.extend(f.singularities());
        }
        Ok(self)
    }

    pub fn check_function(&self, f: &RationalFunction) -> Result<()> {
        if f.is_zero() {
            return Err(Error::ZeroFunction);
        }
        for s in f.singularities() {
            let d = (s - self.center_c).norm();
            if d < 1e-9 {
                continue;
            }
            if d >= self.inner * (1.0 - 1e-9) && d <= self.outer * (1.0 + 1e-9) {
                return Err(Error::InvalidCover(format!(
                    "{} has a zero or pole at distance {:.6} from the center, inside the annulus",
                    f, d
                )));
            }
        }
        Ok(())
    }

    pub fn center(&self) -> &GaussianRational {
        &self.center
    }

    pub fn center_c64(&self) -> Complex64 {
        self.center_c
    }

    pub fn inner(&self) -> f64 {
        self.inner
    }

    pub fn outer(&self) -> f64 {
        self.outer
    }

    pub fn mid_radius(&self) -> f64 {
        0.5 * (self.inner + self.outer)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn sector_center(&self, k: usize) -> f64 {
        TAU * k as f64 / self.n as f64
    }

    /// The open angular interval of sector k in its own coordinate.
    pub fn sector_interval(&self, k: usize) -> (f64, f64) {
        let c = self.sector_center(k);
        (c - self.width / 2.0, c + self.width / 2.0)
    }

    pub fn point(&self, r: f64, theta: f64) -> Complex64 {
        self.center_c + Complex64::from_polar(r, theta)
    }

    /// Polar coordinates of w relative to the center, with θ in (−π, π].
    pub fn polar(&self, w: Complex64) -> (f64, f64) {
        let d = w - self.center_c;
        (d.norm(), d.arg())
    }

    /// Angle of w in the coordinate of sector k, chosen closest to the sector's center.
    pub fn chart_angle(&self, k: usize, w: Complex64) -> Result<(f64, f64)> {
        let (r, t) = self.polar(w);
        let c = self.sector_center(k);
        let theta = c + wrap_pi(t - c);
        if (theta - c).abs() >= self.width / 2.0 || !self.radius_ok(r) {
            return Err(Error::OutOfChart(k));
        }
        Ok((r, theta))
    }

    fn radius_ok(&self, r: f64) -> bool {
        r >= self.inner * (1.0 - 1e-9) && r <= self.outer * (1.0 + 1e-9)
    }

    pub fn contains(&self, k: usize, w: Complex64) -> bool {
        self.chart_angle(k, w).is_ok()
    }

    /// Sector k as disjoint intervals inside [0, 2π).
    fn sector_pieces(&self, k: usize) -> Vec<(f64, f64)> {
        if self.width >= TAU {
            return vec![(0.0, TAU)];
        }
        let lo = self.sector_interval(k).0.rem_euclid(TAU);
        let hi = lo + self.width;
        if hi <= TAU {
            vec![(lo, hi)]
        } else {
            vec![(0.0, hi - TAU), (lo, TAU)]
        }
    }

    /// The angular intersection of the sectors of a simplex, as intervals in [0, 2π).
    pub fn intersection(&self, s: &Simplex) -> Vec<(f64, f64)> {
        let mut acc = vec![(0.0, TAU)];
        for &k in &s.0 {
            let pieces = self.sector_pieces(k);
            let mut next = Vec::new();
            for &(a, b) in &acc {
                for &(c, d) in &pieces {
                    let lo = f64::max(a, c);
                    let hi = f64::min(b, d);
                    if hi - lo > EMPTY_TOL {
                        next.push((lo, hi));
                    }
                }
            }
            acc = next;
        }
        acc
    }

    /// All simplices with at most `max_dim + 1` vertices, sorted by dimension then lexicographically.
    pub fn nerve(&self, max_dim: usize) -> Vec<Simplex> {
        let mut out = Vec::new();
        let mut layer: Vec<Simplex> = (0..self.n).map(|k| Simplex(vec![k])).collect();
        for dim in 0..=max_dim {
            if dim > 0 {
                let mut next = Vec::new();
                for s in &layer {
                    let last = *s.0.last().expect("nonempty simplex");
                    for k in last + 1..self.n {
                        let mut v = s.0.clone();
                        v.push(k);
                        let t = Simplex(v);
                        if !self.intersection(&t).is_empty() {
                            next.push(t);
                        }
                    }
                }
                layer = next;
            }
            out.extend(layer.iter().cloned());
            if layer.is_empty() {
                break;
            }
        }
        out
    }

    /// Seeded uniform samples in the region of a simplex, away from registered singularities.
    pub fn sample_points(&self, s: &Simplex, count: usize, seed: u64) -> Result<Vec<Complex64>> {
        if count == 0 {
            return Ok(Vec::new());
        }
        let pieces: Vec<(f64, f64)> = self
            .intersection(s)
            .into_iter()
            .map(|(a, b)| (a + SAMPLE_MARGIN, b - SAMPLE_MARGIN))
            .filter(|(a, b)| b > a)
            .collect();
        if pieces.is_empty() {
            return Err(Error::EmptyRegion);
        }
        let total: f64 = pieces.iter().map(|(a, b)| b - a).sum();
        let (r0, r1) = (self.inner * (1.0 + SAMPLE_MARGIN), self.outer * (1.0 - SAMPLE_MARGIN));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while out.len() < count {
            attempts += 1;
            if attempts > 1000 * count + 1000 {
                return Err(Error::EmptyRegion);
            }
            let mut u = rng.random::<f64>() * total;
            let mut theta = pieces[0].0;
            for &(a, b) in &pieces {
                if u <= b - a {
                    theta = a + u;
                    break;
                }
                u -= b - a;
            }
            let v: f64 = rng.random();
            let r = (r0 * r0 + v * (r1 * r1 - r0 * r0)).sqrt();
            let w = self.point(r, theta);
            if self.singularities.iter().any(|s| (s - w).norm() < 1e-9) {
                continue;
            }
            out.push(w);
        }
        Ok(out)
    }

    /// Positively oriented circle of radius r cut at the midpoints between sector centers.
    pub fn winding_loop(&self, r: f64, steps_per_arc: usize) -> Result<Loop> {
        if !(r > self.inner && r < self.outer) {
            return Err(Error::InvalidCover(format!("loop radius {} outside ({}, {})", r, self.inner, self.outer)));
        }
        let half = PI / self.n as f64;
        let arcs: Vec<LoopArc> = (0..self.n)
            .map(|k| {
                let c = self.sector_center(k);
                LoopArc { sector: k, theta0: c - half, theta1: c + half }
            })
            .collect();
        let switches = (0..self.n)
            .map(|k| {
                let to = (k + 1) % self.n;
                let theta_from = arcs[k].theta1;
                let theta_to = arcs[to].theta0;
                ChartSwitch { from: k, to, theta_from, theta_to, point: self.point(r, theta_from) }
            })
            .collect();
        Ok(Loop { center: self.center_c, radius: r, steps_per_arc: steps_per_arc.max(1), arcs, switches })
    }
}

/// One arc of a loop, parametrized by sector-coordinate angles.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopArc {
    pub sector: usize,
    pub theta0: f64,
    pub theta1: f64,
}

/// Passage from one chart to the next at the end of an arc.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartSwitch {
    pub from: usize,
    pub to: usize,
    pub theta_from: f64,
    pub theta_to: f64,
    pub point: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Loop {
    pub center: Complex64,
    pub radius: f64,
    pub steps_per_arc: usize,
    pub arcs: Vec<LoopArc>,
    pub switches: Vec<ChartSwitch>,
}

impl Loop {
    pub fn total_angle(&self) -> f64 {
        self.arcs.iter().map(|a| a.theta1 - a.theta0).sum()
    }

    pub fn arc_point(&self, theta: f64) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, theta)
    }
}

#[derive(Debug, Clone, Copy)]
struct CachedLog {
    r: f64,
    theta: f64,
    value: Complex64,
}

/// Per-sector continuous branches of log f.
///
/// Branch values are obtained by continuation inside the sector chart from the base
/// point at the mid radius and the sector center angle. Sector 0 starts from the
/// principal logarithm; each later sector is shifted by a multiple of 2πi so it agrees
/// with its predecessor at the midpoint of their overlap.
#[derive(Debug)]
pub struct LogBranches {
    f: RationalFunction,
    cover: Arc<SectorCover>,
    shifts: Vec<i64>,
    steps: usize,
    cache: Vec<Mutex<Option<CachedLog>>>,
}

impl LogBranches {
    pub fn function(&self) -> &RationalFunction {
        &self.f
    }

    pub fn cover(&self) -> &Arc<SectorCover> {
        &self.cover
    }

    pub fn base_shift(&self, k: usize) -> i64 {
        self.shifts[k]
    }

    fn continue_along(
        &self,
        from: (f64, f64, Complex64),
        to: (f64, f64),
        steps_per_width: usize,
    ) -> Result<Complex64> {
        let (r0, t0, start_val) = from;
        let (r1, t1) = to;
        let cover = &self.cover;
        let span = cover.outer - cover.inner;
        let nt = ((t1 - t0).abs() / cover.width * steps_per_width as f64).ceil() as usize;
        let nr = ((r1 - r0).abs() / span * steps_per_width as f64).ceil() as usize;
        let mut prev = self.f.eval(cover.point(r0, t0))?;
        let mut arg_acc = start_val.im;
        let mut walk = |pts: &mut dyn Iterator<Item = (f64, f64)>| -> Result<()> {
            for (r, t) in pts {
                let cur = self.f.eval(cover.point(r, t))?;
                let da = (cur / prev).arg();
                if da.abs() > BRANCH_GUARD * TAU {
                    return Err(Error::BranchGuardViolation(da.abs() / TAU));
                }
                arg_acc += da;
                prev = cur;
            }
            Ok(())
        };
        walk(&mut (1..=nt).map(|s| (r0, t0 + (t1 - t0) * s as f64 / nt as f64)))?;
        walk(&mut (1..=nr).map(|s| (r0 + (r1 - r0) * s as f64 / nr as f64, t1)))?;
        let w = cover.point(r1, t1);
        let principal = self.f.eval(w)?.ln();
        let k = (arg_acc - principal.im) / TAU;
        let kr = k.round();
        if (k - kr).abs() > BRANCH_GUARD {
            return Err(Error::BranchGuardViolation((k - kr).abs()));
        }
        Ok(principal + Complex64::new(0.0, TAU * kr))
    }

    /// Unshifted branch in sector k at sector-coordinate polar point (r, θ).
    fn raw_log_polar(&self, k: usize, r: f64, theta: f64) -> Result<Complex64> {
        let cached = *self.cache[k].lock().expect("cache lock");
        let from = match cached {
            Some(c) => (c.r, c.theta, c.value),
            None => {
                let rm = self.cover.mid_radius();
                let tc = self.cover.sector_center(k);
                (rm, tc, self.f.eval(self.cover.point(rm, tc))?.ln())
            }
        };
        let mut steps = self.steps;
        let value = loop {
            match self.continue_along(from, (r, theta), steps) {
                Ok(v) => break v,
                Err(Error::BranchGuardViolation(x)) => {
                    if steps >= self.steps * 64 {
                        return Err(Error::BranchGuardViolation(x));
                    }
                    steps *= 4;
                }
                Err(e) => return Err(e),
            }
        };
        *self.cache[k].lock().expect("cache lock") = Some(CachedLog { r, theta, value });
        Ok(value)
    }

    /// log_k f at the point with radius r and sector-k angle θ.
    pub fn log_polar(&self, k: usize, r: f64, theta: f64) -> Result<Complex64> {
        let (lo, hi) = self.cover.sector_interval(k);
        if theta <= lo || theta >= hi || !self.cover.radius_ok(r) {
            return Err(Error::OutOfChart(k));
        }
        Ok(self.raw_log_polar(k, r, theta)? + Complex64::new(0.0, TAU * self.shifts[k] as f64))
    }

    /// log_k f at w.
    pub fn log_at(&self, k: usize, w: Complex64) -> Result<Complex64> {
        let (r, theta) = self.cover.chart_angle(k, w)?;
        self.log_polar(k, r, theta)
    }

    /// The integer m_ij = (log_j f − log_i f)/2πi at a point of the overlap.
    pub fn branch_integer(&self, i: usize, j: usize, w: Complex64) -> Result<i64> {
        let d = (self.log_at(j, w)? - self.log_at(i, w)?) / Complex64::new(0.0, TAU);
        round_guarded(d)
    }

    /// The branch integer as an element of Z(1).
    pub fn m(&self, i: usize, j: usize, w: Complex64) -> Result<TwistedInteger> {
        Ok(TwistedInteger::new(self.branch_integer(i, j, w)?, 1))
    }

    /// Σ over the chart switches a → b of (log_a f − log_b f)/2πi at the switch point.
    pub fn loop_branch_sum(&self, lp: &Loop) -> Result<i64> {
        let mut total = 0;
        for s in &lp.switches {
            let a = self.log_polar(s.from, lp.radius, s.theta_from)?;
            let b = self.log_polar(s.to, lp.radius, s.theta_to)?;
            total += round_guarded((a - b) / Complex64::new(0.0, TAU))?;
        }
        Ok(total)
    }
}

/// Round a numerically integral complex number, enforcing the branch guard.
pub fn round_guarded(x: Complex64) -> Result<i64> {
    let k = x.re.round();
    let res = ((x.re - k).powi(2) + x.im.powi(2)).sqrt();
    if res > BRANCH_GUARD {
        return Err(Error::BranchGuardViolation(res));
    }
    Ok(k as i64)
}

/// Build the per-sector branches of log f with the default continuation resolution.
pub fn assign_branches(f: &RationalFunction, cover: &Arc<SectorCover>) -> Result<Arc<LogBranches>> {
    assign_branches_with_steps(f, cover, DEFAULT_CONTINUATION_STEPS)
}

pub fn assign_branches_with_steps(
    f: &RationalFunction,
    cover: &Arc<SectorCover>,
    steps: usize,
) -> Result<Arc<LogBranches>> {
    cover.check_function(f)?;
    let n = cover.n();
    let mut lb = LogBranches {
        f: f.clone(),
        cover: cover.clone(),
        shifts: vec![0; n],
        steps: steps.max(4),
        cache: (0..n).map(|_| Mutex::new(None)).collect(),
    };
    let rm = cover.mid_radius();
    for k in 1..n {
        let mid = 0.5 * (cover.sector_center(k - 1) + cover.sector_center(k));
        let prev = lb.log_polar(k - 1, rm, mid)?;
        let cur = lb.log_polar(k, rm, mid)?;
        lb.shifts[k] = round_guarded((prev - cur) / Complex64::new(0.0, TAU))?;
    }
    Ok(Arc::new(lb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_algebra::parse_rational;

    fn cover(n: usize, w: f64) -> Arc<SectorCover> {
        Arc::new(SectorCover::new(GaussianRational::zero(), 0.5, 1.5, n, w).unwrap())
    }

    fn count_by_dim(nerve: &[Simplex]) -> Vec<usize> {
        let mut v = vec![0; 4];
        for s in nerve {
            v[s.dim()] += 1;
        }
        v
    }

    #[test]
    fn nerve_examples() {
        assert_eq!(count_by_dim(&cover(3, 2.2).nerve(0)), vec![3, 0, 0, 0]);
        assert_eq!(count_by_dim(&cover(4, 0.6 * PI).nerve(2)), vec![4, 4, 0, 0]);
        assert_eq!(count_by_dim(&cover(3, 4.5).nerve(2)), vec![3, 3, 1, 0]);
    }

    #[test]
    fn invalid_covers_rejected() {
        assert!(SectorCover::new(GaussianRational::zero(), 0.5, 1.5, 3, 2.0).is_err());
        assert!(SectorCover::new(GaussianRational::zero(), 1.5, 0.5, 3, 3.0).is_err());
        let c = SectorCover::new(GaussianRational::zero(), 0.5, 1.5, 3, 3.0).unwrap();
        assert!(c.check_function(&parse_rational("z-1").unwrap()).is_err());
        assert!(c.check_function(&parse_rational("z*(z-3)").unwrap()).is_ok());
    }

    #[test]
    fn samples_inside_triple_overlap() {
        let c = cover(3, 4.5);
        let s = Simplex(vec![0, 1, 2]);
        let pts = c.sample_points(&s, 20, 7).unwrap();
        assert_eq!(pts.len(), 20);
        for w in &pts {
            for k in 0..3 {
                assert!(c.contains(k, *w));
            }
        }
        assert_eq!(pts, c.sample_points(&s, 20, 7).unwrap());
        assert!(c.sample_points(&s, 0, 7).unwrap().is_empty());
    }

    #[test]
    fn loops_close_up() {
        let c1 = Arc::new(SectorCover::new(GaussianRational::zero(), 0.5, 1.5, 1, TAU + 0.1).unwrap());
        let l1 = c1.winding_loop(1.0, 16).unwrap();
        assert_eq!(l1.arcs.len(), 1);
        assert_eq!(l1.arcs[0].sector, 0);
        let l3 = cover(3, 2.2).winding_loop(1.0, 16).unwrap();
        assert_eq!(l3.arcs.len(), 3);
        assert!((l3.total_angle() - TAU).abs() < 1e-12);
        assert!((l3.switches[0].theta_from - PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn branches_of_z() {
        let c = cover(3, 2.2);
        let z = parse_rational("z").unwrap();
        let lb = assign_branches(&z, &c).unwrap();
        let at = |t: f64| c.point(1.0, t);
        assert_eq!(lb.branch_integer(0, 1, at(1.0)).unwrap(), 0);
        assert_eq!(lb.branch_integer(1, 2, at(PI)).unwrap(), 0);
        assert_eq!(lb.branch_integer(0, 2, at(-1.05)).unwrap(), 1);
        let lp = c.winding_loop(1.0, 16).unwrap();
        assert_eq!(lb.loop_branch_sum(&lp).unwrap(), 1);
        let z2 = assign_branches(&parse_rational("z^2").unwrap(), &c).unwrap();
        assert_eq!(z2.loop_branch_sum(&lp).unwrap(), 2);
        let k = assign_branches(&parse_rational("7").unwrap(), &c).unwrap();
        assert_eq!(k.loop_branch_sum(&lp).unwrap(), 0);
        assert_eq!(k.branch_integer(0, 2, at(-1.05)).unwrap(), 0);
    }

    #[test]
    fn principal_on_positive_axis() {
        let c = cover(3, 2.2);
        let lb = assign_branches(&parse_rational("z").unwrap(), &c).unwrap();
        let v = lb.log_at(0, Complex64::new(1.2, 0.0)).unwrap();
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn config_parses() {
        let cfg = CoverConfig::from_toml("center = \"0\"\ninner = 0.5\nouter = 1.5\nN = 3\nwidth = 4.5\nseed = 3\n").unwrap();
        let c = cfg.build().unwrap();
        assert_eq!(c.n(), 3);
    }
}
