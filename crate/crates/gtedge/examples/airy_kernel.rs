//! The extended Airy kernel by double contour quadrature, checked against
//! the classical integral representation on the equal-time slice.
//!
//! cargo run --release --example airy_kernel

use gtedge::airy::{ai, airy_extended, airy_tilde_detail, calibrate, AiryQuery, CALIBRATION};

fn main() {
    println!("Ai(0) = {:.16}, Ai(-2) = {:.16}", ai(0.0), ai(-2.0));
    let (c, worst) = calibrate().unwrap();
    println!("calibration {c:?} (expected {CALIBRATION:?}), worst difference {worst:.1e}");

    println!("\n   r     s     contour          classical");
    for (r, s) in [(-1.0, 0.5), (0.0, 0.0), (1.0, -1.0), (2.0, 2.0)] {
        let v = airy_tilde_detail(&AiryQuery::new(0.0, r, 0.0, s)).unwrap();
        println!("{r:>5} {s:>5}  {:.14}  {:.14}  (+-{:.0e})", v.value, c.oracle(r, s).unwrap(), v.error);
    }

    println!("\ntwo-time values:");
    for q in [[0.5, 0.0, -0.5, 0.3], [-0.5, 0.3, 0.5, 0.0]] {
        let k = airy_extended(&AiryQuery::new(q[0], q[1], q[2], q[3])).unwrap();
        println!("  K_Ai{q:?} = {k:.12}");
    }
}
