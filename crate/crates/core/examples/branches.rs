//! A sector cover of an annulus, its nerve, and branch integers of log f on overlaps.

use std::sync::Arc;

use deligne::cover_nerve::{assign_branches, SectorCover};
use deligne::exact_algebra::{parse_rational, GaussianRational};

fn main() -> deligne::Result<()> {
    let cover = Arc::new(SectorCover::new(GaussianRational::zero(), 0.5, 1.5, 4, 2.5)?);
    for s in cover.nerve(3) {
        println!("simplex {} over angles {:?}", s, cover.intersection(&s));
    }
    let f = parse_rational("z^3/(z-2)")?;
    let b = assign_branches(&f, &cover)?;
    let lp = cover.winding_loop(1.0, 16)?;
    for sw in &lp.switches {
        println!("switch {} -> {} at {:.3}: m = {}", sw.from, sw.to, sw.point, b.branch_integer(sw.from, sw.to, sw.point)?);
    }
    println!("loop branch sum = {}, valuation = {}", b.loop_branch_sum(&lp)?, f.valuation(cover.center())?);
    Ok(())
}
