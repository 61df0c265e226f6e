use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use gtedge::kernel::{correlation_rational, kernel_float, kernel_rational, rational_to_signed_log, Precision};
use gtedge::sampler::enumerate_patterns;

/// Strictly decreasing rows built from positive gaps.
fn top_row(len: std::ops::RangeInclusive<usize>, max_gap: i64) -> impl Strategy<Value = Vec<i64>> {
    (prop::collection::vec(1..=max_gap, len), -3i64..3).prop_map(|(gaps, base)| {
        let mut x = vec![base];
        for g in gaps {
            x.push(x.last().unwrap() + g);
        }
        x.reverse();
        x
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn diagonal_is_the_occupation_probability(x in top_row(2..=4, 3)) {
        let patterns = enumerate_patterns(&x).unwrap();
        let n = x.len() as i64;
        let total = BigInt::from(patterns.len());
        for r in 1..n {
            for u in x[x.len() - 1] + n - r..=x[0] {
                let hits = patterns.iter().filter(|p| p.occupied((u, r))).count();
                let freq = BigRational::new(BigInt::from(hits), total.clone());
                prop_assert_eq!(correlation_rational(&x, &[(u, r)]).unwrap(), freq);
            }
        }
    }

    #[test]
    fn float_route_matches_rationals(x in top_row(6..=24, 4), picks in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 4)) {
        let n = x.len() as i64;
        let site = |(a, b): (f64, f64)| {
            let r = 1 + (a * (n - 1) as f64) as i64;
            let lo = x[x.len() - 1] + n - r;
            (lo + (b * (x[0] - lo + 1) as f64) as i64, r.min(n - 1))
        };
        for w in picks.windows(2) {
            let (p, q) = (site(w[0]), site(w[1]));
            let exact = rational_to_signed_log(&kernel_rational(&x, p, q).unwrap());
            let float = kernel_float(&x, p, q, Precision::Bits(128)).unwrap();
            prop_assert!(float.value.rel_diff(exact) <= 1e-10, "{:?} {:?}: {:?} vs {:?}", p, q, float.value, exact);
        }
    }

    #[test]
    fn rows_hold_r_particles(x in top_row(3..=12, 3)) {
        let n = x.len() as i64;
        for r in 1..n {
            let sum: f64 = (x[x.len() - 1] + n - r..=x[0])
                .map(|u| kernel_float(&x, (u, r), (u, r), Precision::Bits(128)).unwrap().to_f64())
                .sum();
            prop_assert!((sum - r as f64).abs() < 1e-9);
        }
    }
}
