//! Symbols of a function with a line bundle and of two line bundles.

use std::sync::Arc;

use deligne::bundle_data::LineBundleData;
use deligne::cech_engine::is_cocycle;
use deligne::cover_nerve::{assign_branches, SectorCover};
use deligne::exact_algebra::{parse_rational, GaussianRational};
use deligne::symbols::{
    fl_coboundary_residual, hermitian_symbol_fl, hermitian_symbol_ll, ll_modulus_residual, symbol_fl, symbol_ll,
    FunctionLog,
};

fn main() -> deligne::Result<()> {
    let cover = Arc::new(SectorCover::new(GaussianRational::zero(), 0.5, 1.5, 4, 5.0)?);
    let f = FunctionLog::new(assign_branches(&parse_rational("z")?, &cover)?);
    let l = LineBundleData::power_family(cover.clone(), &[0, 1, 3, -1])?;
    let lp = LineBundleData::power_family(cover.clone(), &[2, 0, -1, 1])?;
    for (name, c) in [
        ("<f, L>", symbol_fl(&f, &l)?),
        ("<f, L> hermitian", hermitian_symbol_fl(&f, &l)?),
        ("<L, L'>", symbol_ll(&l, &lp)?),
        ("<L, L'> hermitian", hermitian_symbol_ll(&l, &lp)?),
    ] {
        let r = is_cocycle(&c, 1e-10)?;
        println!("{:18} {} degree {}: residual {:.2e}", name, r.complex, r.degree, r.max_residual);
    }
    println!("potential coboundary residual {:.2e}", fl_coboundary_residual(&f, &l, 20, 0)?);
    println!("modulus identity residual     {:.2e}", ll_modulus_residual(&l, &lp, 20, 0)?);
    Ok(())
}
