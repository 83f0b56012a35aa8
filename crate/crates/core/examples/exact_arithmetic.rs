//! Exact rational functions over Q(i): parsing, valuations and the classical tame symbol.

use deligne::exact_algebra::{parse_rational, tame_symbol_value, GaussianRational};

fn main() -> deligne::Result<()> {
    let p = GaussianRational::zero();
    let f = parse_rational("z^2*(z-3)")?;
    let g = parse_rational("(z+1/2*i)/z")?;
    println!("f = {}", f);
    println!("g = {}", g);
    println!("f'/f = {}", f.log_derivative()?);
    println!("v(f) = {}, v(g) = {}", f.valuation(&p)?, g.valuation(&p)?);
    println!("tame symbol (f,g) at 0 = {}", tame_symbol_value(&f, &g, &p)?);
    println!("tame symbol (g,f) at 0 = {}", tame_symbol_value(&g, &f, &p)?);
    Ok(())
}
