//! A line bundle with hermitian metric on a sector cover: Chern integers, the canonical
//! connection, and the metrized cocycles.

use std::sync::Arc;

use deligne::bundle_data::{
    canonical_connection, check_connection, hh_cocycle_check, HermitianMetricData, LineBundleData, SyntheticGerbe,
};
use deligne::cover_nerve::SectorCover;
use deligne::exact_algebra::GaussianRational;

fn main() -> deligne::Result<()> {
    let cover = Arc::new(SectorCover::new(GaussianRational::zero(), 0.5, 1.5, 4, 5.0)?);
    let b = [0, 2, -1, 3];
    let l = LineBundleData::power_family(cover.clone(), &b)?;
    let m = HermitianMetricData::power_family(cover.clone(), &b)?;
    for ((i, j), g) in l.transitions() {
        println!("g_{}{} = {}", i, j, g);
    }
    println!("Chern coboundary = {}", l.chern_coboundary(10, 0)?);
    let conn = canonical_connection(&l, &m)?;
    println!("{:?}", check_connection(&l, &m, &conn, 20, 0)?);
    let r = hh_cocycle_check(&l, &m, 1e-10)?;
    println!("metrized cocycle with connection: residual {:.2e} pass {}", r.max_residual, r.pass);
    println!("{:?}", SyntheticGerbe::random(cover, 1).check(20, 1)?);
    Ok(())
}
