//! The correlation kernel for a small top row, exactly and in floating
//! point, and a two-point function as a 2 x 2 determinant.
//!
//! cargo run --example exact_kernel

use gtedge::kernel::{correlation_rational, kernel_float, kernel_rational, Precision};

fn main() {
    let x = [9, 7, 4, 3, 0];
    let (a, b) = ((5, 3), (6, 2));
    let exact = kernel_rational(&x, a, b).unwrap();
    let float = kernel_float(&x, a, b, Precision::Double).unwrap();
    println!("K_5({a:?}, {b:?}) = {exact} = {:.15}", float.to_f64());
    println!("float route lost {} of {} bits", float.cancellation_bits, float.precision_bits);

    let rho = correlation_rational(&x, &[a, b]).unwrap();
    println!("P(both occupied) = {rho}");

    // At larger n the terms overflow doubles and cancel heavily.
    let big: Vec<i64> = (0..200).rev().map(|i| 2 * i).collect();
    for p in [Precision::Double, Precision::Bits(256)] {
        let k = kernel_float(&big, (150, 100), (152, 99), p).unwrap();
        println!("n = 200, {p:?}: {:.12e} ({} bits cancelled, {} bits used)", k.to_f64(), k.cancellation_bits, k.precision_bits);
    }
}
