//! Holonomy of the tame symbol connection around the puncture against the classical
//! tame symbol.

use std::sync::Arc;

use deligne::cover_nerve::{assign_branches, SectorCover};
use deligne::exact_algebra::{parse_rational, GaussianRational};
use deligne::holonomy::{holonomy_auto, DEFAULT_STEPS};
use deligne::symbols::tame_symbol;

fn main() -> deligne::Result<()> {
    let cover = Arc::new(SectorCover::new(GaussianRational::zero(), 0.5, 1.5, 3, 4.5)?);
    for (f, g) in [("z", "2"), ("z", "z"), ("z^2", "z-3"), ("z*(z-3)", "z^2*(z-5)")] {
        let t = tame_symbol(&assign_branches(&parse_rational(f)?, &cover)?, &assign_branches(&parse_rational(g)?, &cover)?)?;
        let h = holonomy_auto(&t, DEFAULT_STEPS)?;
        println!(
            "<{}, {}>: holonomy {:.10}{:+.10}i, target {}, relative error {:.1e}",
            f, g, h.value.0, h.value.1, h.target, h.relative_error
        );
    }
    Ok(())
}
