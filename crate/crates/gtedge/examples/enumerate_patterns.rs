//! Exhaustive enumeration of the interlacing patterns under a short top row
//! and the one-point function it implies.
//!
//! cargo run --example enumerate_patterns

use gtedge::kernel::correlation_rational;
use gtedge::sampler::{enumerate_patterns, pattern_count, GTPattern};

fn main() {
    let x = [6, 4, 2, 0];
    let all = enumerate_patterns(&x).unwrap();
    println!("{} patterns under {x:?} (product formula: {})", all.len(), pattern_count(&x));
    println!("least packed: {}", GTPattern::min_packed(&x));
    println!("most packed:  {}", GTPattern::max_packed(&x));

    println!("\nrow 2, occupation frequency vs kernel diagonal:");
    for u in 2..=6 {
        let hits = all.iter().filter(|p| p.occupied((u, 2))).count();
        let k = correlation_rational(&x, &[(u, 2)]).unwrap();
        println!("  u = {u}: {hits:>3}/{}  K = {k}", all.len());
    }
}
