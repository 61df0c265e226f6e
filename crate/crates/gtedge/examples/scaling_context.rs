//! Finite-n data at an edge parameter: the non-asymptotic edge point, the
//! scaling constants, lattice queries and the pair of saddle points.
//!
//! cargo run --release --example scaling_context

use gtedge::measures::{discretize, LimitMeasure};
use gtedge::saddle::{saddle_roots, ScalingContext};

fn main() {
    let mu = LimitMeasure::piecewise_constant(&[(0.0, 0.5, 1.0), (1.0, 1.5, 1.0)]).unwrap();
    let t = 0.25;
    println!("     n   chi_n     eta_n     q_n      m_n      p_n     roots of f_n' near t");
    for n in [250, 500, 1000, 2000] {
        let ctx = ScalingContext::build(&mu, &discretize(&mu, n), t).unwrap();
        let q = ctx.query(0.0, 0.0, 0.5, 0.5).unwrap();
        let pair = saddle_roots(&ctx, &ctx.f_n(q.vn, q.sn), 0.2).unwrap();
        println!(
            "{n:>6}  {:.6}  {:.6}  {:.4}  {:.4}  {:.4}  {:.4} {:.4} {:?}",
            ctx.chi_n, ctx.eta_n, ctx.q_n, ctx.m_n, ctx.p_n, pair.roots[0], pair.roots[1], pair.shape
        );
    }
    let ctx = ScalingContext::build(&mu, &discretize(&mu, 1000), t).unwrap();
    let q = ctx.query(0.5, -0.5, -0.5, 0.5).unwrap();
    println!("\nn = 1000, (u,r,v,s) = (0.5,-0.5,-0.5,0.5): sites ({}, {}) ({}, {})", q.un, q.rn, q.vn, q.sn);
    println!("realised continuum coordinates {:.3?}", q.realized);
}
