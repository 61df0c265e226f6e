//! Points of the limiting edge curve for two limit measures, with the case
//! of the double root and the local Airy scale.
//!
//! cargo run --example edge_curve

use gtedge::edge::{edge_point, liquid_region_test};
use gtedge::harness::region_intervals;
use gtedge::measures::LimitMeasure;

fn main() {
    let half = LimitMeasure::piecewise_constant(&[(-1.0, 1.0, 0.5)]).unwrap();
    let e = edge_point(&half, 2.0).unwrap();
    println!("half-uniform, t = 2: chi = {:.15}, eta = {:.15}", e.chi, e.eta);
    println!("  closed form:        chi = {:.15}, eta = {:.15}", 3f64.sqrt() - 1.0, 7.0 - 4.0 * 3f64.sqrt());

    let blocks = LimitMeasure::piecewise_constant(&[(0.0, 0.5, 1.0), (1.0, 1.5, 1.0)]).unwrap();
    println!("\ntwo blocks, one line per region component:");
    for (region, lo, hi) in region_intervals(&blocks) {
        let t = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (true, false) => lo + 1.0,
            _ => hi - 1.0,
        };
        match edge_point(&blocks, t) {
            Ok(p) => println!(
                "  {region:>9} ({lo:>6.3}, {hi:>6.3})  t = {t:>6.3}: ({:.4}, {:.4}) case {:>2} beta {:.4}",
                p.chi, p.eta, p.case_id, p.beta
            ),
            Err(err) => println!("  {region:>9} ({lo:>6.3}, {hi:>6.3})  t = {t:>6.3}: {err}"),
        }
    }

    // just inside and just outside the curve along the normal
    let (nx, ny) = e.normal();
    for step in [-0.02, 0.02] {
        let (c, h) = (e.chi + step * nx, e.eta + step * ny);
        println!("\n({c:.4}, {h:.4}) liquid: {}", liquid_region_test(&half, c, h).unwrap());
    }
}
