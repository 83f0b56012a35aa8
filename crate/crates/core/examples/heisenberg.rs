//! The Heisenberg bundle: lattice invariance of ω and log ρ, and their pullbacks along the
//! section (log f, log g, 0).

use std::sync::Arc;

use num_complex::Complex64;

use deligne::cover_nerve::{assign_branches, SectorCover};
use deligne::exact_algebra::{parse_rational, GaussianRational};
use deligne::form_calculus::Expr;
use deligne::heisenberg_model::{invariance_check, HeisLatticeElem, HeisNumeric, HeisPoint, InvariantKind};
use deligne::symbols::hermitian_tame_symbol;

fn main() -> deligne::Result<()> {
    let p = HeisNumeric::new(Complex64::new(0.3, 1.0), Complex64::new(-1.2, 0.4), Complex64::new(0.5, -0.7));
    let q = p.act(&HeisLatticeElem::new(1, -2, 3));
    println!("log rho before {:.12}, after {:.12}", p.log_rho(), q.log_rho());
    for kind in [InvariantKind::Omega, InvariantKind::Rho] {
        println!("{:?}", invariance_check(kind, 100, 20, 0, 1e-10));
    }
    let cover = Arc::new(SectorCover::new(GaussianRational::zero(), 0.5, 1.5, 3, 4.5)?);
    let f = assign_branches(&parse_rational("z")?, &cover)?;
    let g = assign_branches(&parse_rational("z-3")?, &cover)?;
    let h = hermitian_tame_symbol(&f, &g)?;
    let w = cover.point(1.0, 0.1);
    let s = HeisPoint::new(Expr::log(&f, 0), Expr::log(&g, 0), Expr::zero());
    println!("pullback of log rho {:.12}", s.log_rho().eval(w)?.re);
    println!("metric slot sigma_0 {:.12}", h.sigma[0].eval(w)?.re);
    Ok(())
}
