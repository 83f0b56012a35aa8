//! Run one acceptance criterion from the library and print its line-delimited report.

use deligne::holonomy::DEFAULT_STEPS;
use deligne::report::{criterion, criterion_title};

fn main() {
    let k = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(9);
    println!("# {}", criterion_title(k));
    print!("{}", criterion(k, 0, DEFAULT_STEPS).to_lines());
}
