//! Čech cochains in coefficient complexes: function classes, the Deligne and hermitian cup
//! products, and the homotopy that makes the hermitian product commutative.

use std::sync::Arc;

use deligne::cech_engine::{
    deligne_cup, hermitian_commutator_defect, hermitian_cup, is_cocycle, residual_report,
};
use deligne::cover_nerve::{assign_branches, SectorCover};
use deligne::exact_algebra::{parse_rational, GaussianRational};
use deligne::symbols::FunctionLog;

fn main() -> deligne::Result<()> {
    let cover = Arc::new(SectorCover::new(GaussianRational::zero(), 0.5, 1.5, 3, 4.5)?);
    let f = FunctionLog::new(assign_branches(&parse_rational("z")?, &cover)?).class()?;
    let g = FunctionLog::new(assign_branches(&parse_rational("z^2-5")?, &cover)?).class()?;
    for (name, c) in [("f", &f), ("g", &g), ("f ∪ g", &deligne_cup(&f, &g)?), ("f ∪_h g", &hermitian_cup(&f, &g)?)] {
        let r = is_cocycle(c, 1e-10)?;
        println!("{:8} in {:10} degree {}: cocycle residual {:.2e} pass {}", name, r.complex, r.degree, r.max_residual, r.pass);
    }
    let defect = residual_report(&hermitian_commutator_defect(&f, &g)?, 1e-9, 20, 0)?;
    println!("f ∪ g + g ∪ f - D(h) residual {:.2e}", defect.max_residual);
    Ok(())
}
