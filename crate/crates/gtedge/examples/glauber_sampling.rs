//! Glauber dynamics on the patterns under a discretised top row: samples,
//! empirical one-point functions against the kernel, and mixing.
//!
//! cargo run --release --example glauber_sampling

use gtedge::kernel::{kernel_float, Precision};
use gtedge::measures::{discretize, LimitMeasure};
use gtedge::sampler::{chain_trace, empirical_correlations, glauber_samples, integrated_autocorrelation_time, ChainConfig};

fn main() {
    let mu = LimitMeasure::piecewise_constant(&[(-1.0, 1.0, 0.5)]).unwrap();
    let n = 12;
    let x = discretize(&mu, n);
    let cfg = ChainConfig::for_size(n, 17);
    let samples = glauber_samples(&x, 1000, cfg).unwrap();
    println!("top row {x:?}, {} samples from {} chains", samples.len(), cfg.chains);
    println!("one sample: {}", samples[0]);

    let sites: Vec<(i64, i64)> = (x[n - 1] + n as i64 - 6..=x[0]).step_by(2).map(|u| (u, 6)).collect();
    let est = empirical_correlations(&samples, &sites.iter().map(|&s| vec![s]).collect::<Vec<_>>());
    println!("\nrow 6:    u   empirical     kernel");
    for (s, e) in sites.iter().zip(&est) {
        let k = kernel_float(&x, *s, *s, Precision::Bits(128)).unwrap().to_f64();
        println!("   {:>6}  {:.3}+-{:.3}  {k:.3}", s.0, e.p, e.se);
    }

    let trace = chain_trace(&x, 300, cfg).unwrap();
    println!("\nintegrated autocorrelation time: {:.2} thinning intervals", integrated_autocorrelation_time(&trace, 30));
}
