//! The rescaled kernel against the extended Airy kernel along a ladder of n,
//! for a particle edge and a hole edge.
//!
//! cargo run --release --example convergence_ladder

use gtedge::harness::{converge, DEFAULT_QUERIES};
use gtedge::kernel::Precision;
use gtedge::measures::LimitMeasure;

fn main() {
    let cases = [
        ("half-uniform, t = 2", LimitMeasure::piecewise_constant(&[(-1.0, 1.0, 0.5)]).unwrap(), 2.0),
        ("two blocks, t = 0.25", LimitMeasure::piecewise_constant(&[(0.0, 0.5, 1.0), (1.0, 1.5, 1.0)]).unwrap(), 0.25),
    ];
    let ladder = [125, 250, 500, 1000];
    for (name, mu, t) in cases {
        let (rows, summary) = converge(&mu, t, &ladder, &DEFAULT_QUERIES[..4], Precision::Bits(256), 1e-10).unwrap();
        println!("{name} ({})", rows[0].region);
        println!("     n  query   rescaled       K_Ai   discrepancy");
        for r in &rows {
            println!("{:>6}  {:>5}  {:>9.5}  {:>9.5}  {:.5}", r.n, r.query, r.rescaled, r.k_ai_realized, r.discrepancy);
        }
        for s in &summary {
            println!("query {}: decreased on {} of {} steps", s.query, s.decreases, s.steps);
        }
        println!();
    }
}
