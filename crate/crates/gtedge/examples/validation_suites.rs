//! The built-in cross checks: rational against float, enumeration against
//! the kernel, sampler against the kernel and the Airy oracle.
//!
//! cargo run --release --example validation_suites

use gtedge::harness::validate;

fn main() {
    for r in validate(None, 500, 256, 1) {
        println!("{:<9} {:<22} {}", r.status.to_string(), r.name, r.detail);
    }
}
