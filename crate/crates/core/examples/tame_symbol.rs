//! The tame symbol ⟨f,g⟩ as a Deligne cocycle and its hermitian counterpart, printed as
//! structured records.

use std::sync::Arc;

use deligne::cech_engine::{cochain_records, is_cocycle};
use deligne::cover_nerve::{assign_branches, SectorCover};
use deligne::exact_algebra::{parse_rational, GaussianRational};
use deligne::symbols::{hermitian_tame_symbol, tame_symbol};

fn main() -> deligne::Result<()> {
    let cover = Arc::new(SectorCover::new(GaussianRational::zero(), 0.5, 1.5, 3, 4.5)?);
    let f = assign_branches(&parse_rational("z")?, &cover)?;
    let g = assign_branches(&parse_rational("z-3")?, &cover)?;
    let t = tame_symbol(&f, &g)?;
    for rec in cochain_records(&t.cocycle, 1, 0)? {
        println!("{}", serde_json::to_string(&rec).expect("record serializes"));
    }
    for ((i, j), pieces) in &t.transitions {
        for p in pieces {
            println!("transition {}{} on {:?}: {}", i, j, p.interval, p.value);
        }
    }
    let h = hermitian_tame_symbol(&f, &g)?;
    println!("holomorphic cocycle: {}", is_cocycle(&t.cocycle, 1e-10)?.pass);
    println!("hermitian cocycle:   {}", is_cocycle(&h.cocycle, 1e-10)?.pass);
    Ok(())
}
