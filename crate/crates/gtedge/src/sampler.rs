//! Ground truth for the kernel: exhaustive enumeration of interlacing
//! patterns for tiny top rows, and a Glauber chain for moderate ones.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::kernel::Site;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error("enumeration budget exceeded: n = {n}, spread = {spread} (limits 6 and 12)")]
    BudgetExceeded { n: usize, spread: i64 },
    #[error("top row must be strictly decreasing")]
    BadTopRow,
    #[error("malformed pattern line: {0}")]
    Parse(String),
}

pub const ENUM_MAX_N: usize = 6;
pub const ENUM_MAX_SPREAD: i64 = 12;

/// An interlacing pattern. `rows[r - 1]` is row `r`, strictly decreasing of
/// length `r`; the last row is the fixed top row.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GTPattern {
    pub rows: Vec<Vec<i64>>,
}

impl GTPattern {
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn top(&self) -> &[i64] {
        &self.rows[self.rows.len() - 1]
    }

    /// `y_i^{(r+1)} >= y_i^{(r)} > y_{i+1}^{(r+1)}` on every pair of rows.
    pub fn is_valid(&self) -> bool {
        for (r, row) in self.rows.iter().enumerate() {
            if row.len() != r + 1 || row.windows(2).any(|w| w[0] <= w[1]) {
                return false;
            }
        }
        self.rows.windows(2).all(|w| {
            let (lo, hi) = (&w[0], &w[1]);
            lo.iter().enumerate().all(|(i, &y)| hi[i] >= y && y > hi[i + 1])
        })
    }

    /// Whether row `r` has a particle at `u`.
    pub fn occupied(&self, (u, r): Site) -> bool {
        match self.rows.get((r - 1) as usize) {
            Some(row) => row.binary_search_by(|y| u.cmp(y)).is_ok(),
            None => false,
        }
    }

    /// All rows at their lowest positions.
    pub fn min_packed(x: &[i64]) -> Self {
        let n = x.len();
        let rows = (1..=n).map(|r| (0..r).map(|i| x[i + n - r] + (n - r) as i64).collect()).collect();
        GTPattern { rows }
    }

    /// All rows at their highest positions.
    pub fn max_packed(x: &[i64]) -> Self {
        let n = x.len();
        GTPattern { rows: (1..=n).map(|r| x[..r].to_vec()).collect() }
    }
}

/// One line per pattern: rows from 1 to n separated by `;`, entries by spaces.
impl fmt::Display for GTPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (r, row) in self.rows.iter().enumerate() {
            if r > 0 {
                f.write_str(";")?;
            }
            for (i, y) in row.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{y}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for GTPattern {
    type Err = SamplerError;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let rows = line
            .trim()
            .split(';')
            .map(|row| row.split_whitespace().map(str::parse).collect::<Result<Vec<i64>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| SamplerError::Parse(line.to_string()))?;
        let p = GTPattern { rows };
        if p.rows.is_empty() || !p.is_valid() {
            return Err(SamplerError::Parse(line.to_string()));
        }
        Ok(p)
    }
}

fn check_top(x: &[i64]) -> Result<(), SamplerError> {
    if x.is_empty() || x.windows(2).any(|w| w[0] <= w[1]) {
        Err(SamplerError::BadTopRow)
    } else {
        Ok(())
    }
}

/// Visits every pattern with top row `x` exactly once, filling rows
/// `n - 1, ..., 1` depth first.
pub fn for_each_pattern<F: FnMut(&GTPattern)>(x: &[i64], mut visit: F) -> Result<(), SamplerError> {
    check_top(x)?;
    let n = x.len();
    let spread = x[0] - x[n - 1];
    if n > ENUM_MAX_N || spread > ENUM_MAX_SPREAD {
        return Err(SamplerError::BudgetExceeded { n, spread });
    }
    let mut rows: Vec<Vec<i64>> = (1..=n).map(|r| vec![0; r]).collect();
    rows[n - 1].copy_from_slice(x);
    fill(&mut rows, n - 1, 0, &mut visit);
    Ok(())
}

/// Fills entry `i` of row `r` (1-based row, so `rows[r - 1]`).
fn fill<F: FnMut(&GTPattern)>(rows: &mut Vec<Vec<i64>>, r: usize, i: usize, visit: &mut F) {
    if r == 0 {
        let p = GTPattern { rows: rows.clone() };
        visit(&p);
        return;
    }
    if i == r {
        fill(rows, r - 1, 0, visit);
        return;
    }
    let (hi, lo) = (rows[r][i], rows[r][i + 1] + 1);
    for y in lo..=hi {
        rows[r - 1][i] = y;
        fill(rows, r, i + 1, visit);
    }
}

pub fn enumerate_patterns(x: &[i64]) -> Result<Vec<GTPattern>, SamplerError> {
    let mut out = Vec::new();
    for_each_pattern(x, |p| out.push(p.clone()))?;
    Ok(out)
}

/// `prod_{i<j} (x_i - x_j) / (j - i)`, the number of patterns with top row `x`.
pub fn pattern_count(x: &[i64]) -> u128 {
    let n = x.len();
    let mut num = num_bigint::BigInt::from(1);
    let mut den = num_bigint::BigInt::from(1);
    for i in 0..n {
        for j in i + 1..n {
            num *= x[i] - x[j];
            den *= (j - i) as i64;
        }
    }
    u128::try_from(num / den).expect("count fits in 128 bits")
}

/// One proposal of the chain: a uniform interior particle moves by `+-1`
/// if interlacing survives.
fn glauber_step<R: Rng>(rows: &mut [Vec<i64>], rng: &mut R) {
    let n = rows.len();
    let interior = n * (n - 1) / 2;
    let mut k = rng.random_range(0..interior);
    let mut r = 1;
    while k >= r {
        k -= r;
        r += 1;
    }
    let i = k;
    let up = rng.random_bool(0.5);
    let y = rows[r - 1][i] + if up { 1 } else { -1 };
    let above = &rows[r];
    if y > above[i] || y <= above[i + 1] {
        return;
    }
    if r > 1 {
        let below = &rows[r - 2];
        if (i < r - 1 && y < below[i]) || (i > 0 && y >= below[i - 1]) {
            return;
        }
    }
    rows[r - 1][i] = y;
}

/// `sweeps` sweeps of `n(n-1)/2` proposals each from the minimal pattern.
pub fn glauber_sample(x: &[i64], sweeps: usize, seed: u64) -> Result<GTPattern, SamplerError> {
    check_top(x)?;
    let mut p = GTPattern::min_packed(x);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    run(&mut p.rows, sweeps, &mut rng);
    Ok(p)
}

fn run<R: Rng>(rows: &mut [Vec<i64>], sweeps: usize, rng: &mut R) {
    let n = rows.len();
    if n < 2 {
        return;
    }
    for _ in 0..sweeps * (n * (n - 1) / 2) {
        glauber_step(rows, rng);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainConfig {
    pub chains: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub seed: u64,
}

impl ChainConfig {
    /// Burn-in `20 n^2` sweeps and thinning `n^2`.
    pub fn for_size(n: usize, seed: u64) -> Self {
        ChainConfig { chains: 8, burn_in: 20 * n * n, thinning: n * n, seed }
    }
}

/// `count` samples split over independent chains with seeds `seed + chain`.
/// The output order depends only on the configuration.
pub fn glauber_samples(x: &[i64], count: usize, cfg: ChainConfig) -> Result<Vec<GTPattern>, SamplerError> {
    check_top(x)?;
    let chains = cfg.chains.max(1);
    let per: Vec<usize> = (0..chains).map(|c| count / chains + usize::from(c < count % chains)).collect();
    let out: Vec<Vec<GTPattern>> = per
        .par_iter()
        .enumerate()
        .map(|(c, &m)| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(c as u64));
            let mut p = GTPattern::min_packed(x);
            run(&mut p.rows, cfg.burn_in, &mut rng);
            let mut v = Vec::with_capacity(m);
            for _ in 0..m {
                run(&mut p.rows, cfg.thinning, &mut rng);
                v.push(p.clone());
            }
            v
        })
        .collect();
    Ok(out.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub p: f64,
    /// Binomial standard error `sqrt(p (1 - p) / N)`.
    pub se: f64,
}

/// For each query set, the fraction of samples with a particle at every site.
pub fn empirical_correlations(samples: &[GTPattern], queries: &[Vec<Site>]) -> Vec<Estimate> {
    let m = samples.len() as f64;
    queries
        .iter()
        .map(|q| {
            let hits = samples.iter().filter(|p| q.iter().all(|&site| p.occupied(site))).count() as f64;
            let p = hits / m;
            Estimate { p, se: (p * (1.0 - p) / m).sqrt() }
        })
        .collect()
}

/// Normalized autocorrelation of `series` at lags `0..=max_lag`.
pub fn autocorrelation(series: &[f64], max_lag: usize) -> Vec<f64> {
    let m = series.len();
    let mean = series.iter().sum::<f64>() / m as f64;
    let var = series.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / m as f64;
    (0..=max_lag.min(m.saturating_sub(1)))
        .map(|k| {
            if var == 0.0 {
                return if k == 0 { 1.0 } else { 0.0 };
            }
            let c: f64 = (0..m - k).map(|i| (series[i] - mean) * (series[i + k] - mean)).sum();
            c / (m as f64 * var)
        })
        .collect()
}

/// `1 + 2 sum_k rho_k`, summed until the first non-positive lag.
pub fn integrated_autocorrelation_time(series: &[f64], max_lag: usize) -> f64 {
    let rho = autocorrelation(series, max_lag);
    1.0 + 2.0 * rho.iter().skip(1).take_while(|&&r| r > 0.0).sum::<f64>()
}

/// Mixing diagnostic: the total particle position along one chain, recorded
/// once per thinning interval.
pub fn chain_trace(x: &[i64], len: usize, cfg: ChainConfig) -> Result<Vec<f64>, SamplerError> {
    check_top(x)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut p = GTPattern::min_packed(x);
    run(&mut p.rows, cfg.burn_in, &mut rng);
    Ok((0..len)
        .map(|_| {
            run(&mut p.rows, cfg.thinning, &mut rng);
            p.rows.iter().flatten().sum::<i64>() as f64
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashMap;

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_patterns(&[2, 0]).unwrap().len(), 2);
        assert_eq!(enumerate_patterns(&[2, 1, 0]).unwrap().len(), 1);
        assert!(matches!(enumerate_patterns(&[13, 0]), Err(SamplerError::BudgetExceeded { .. })));
        assert!(matches!(enumerate_patterns(&[6, 5, 4, 3, 2, 1, 0]), Err(SamplerError::BudgetExceeded { .. })));
    }

    #[test]
    fn packed_patterns_are_extreme() {
        let x = [7, 4, 3, 0];
        let all = enumerate_patterns(&x).unwrap();
        let lo = GTPattern::min_packed(&x);
        let hi = GTPattern::max_packed(&x);
        assert!(all.contains(&lo) && all.contains(&hi));
        let total = |p: &GTPattern| p.rows.iter().flatten().sum::<i64>();
        assert!(all.iter().all(|p| total(&lo) <= total(p) && total(p) <= total(&hi)));
    }

    #[test]
    fn chain_reaches_the_top() {
        let x = [5, 3, 2, 0];
        let hi = GTPattern::max_packed(&x);
        let mut p = GTPattern::min_packed(&x);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut hit = false;
        for _ in 0..2000 {
            run(&mut p.rows, 1, &mut rng);
            if p == hi {
                hit = true;
                break;
            }
        }
        assert!(hit);
    }

    #[test]
    fn two_state_frequency() {
        let cfg = ChainConfig { chains: 4, burn_in: 50, thinning: 50, seed: 11 };
        let s = glauber_samples(&[2, 0], 20_000, cfg).unwrap();
        let e = empirical_correlations(&s, &[vec![(1, 1)]])[0];
        let sigma = (0.25f64 / 20_000.0).sqrt();
        assert!((e.p - 0.5).abs() < 3.0 * sigma, "{}", e.p);
    }

    #[test]
    fn chain_is_uniform_on_a_small_space() {
        let x = [5, 3, 1, 0];
        let states = enumerate_patterns(&x).unwrap();
        assert!(states.len() <= 200);
        let m = 40 * states.len();
        let s = glauber_samples(&x, m, ChainConfig { chains: 8, burn_in: 200, thinning: 30, seed: 5 }).unwrap();
        let mut freq: HashMap<&GTPattern, usize> = HashMap::new();
        for p in &s {
            *freq.entry(p).or_default() += 1;
        }
        let q = 1.0 / states.len() as f64;
        let sigma = (m as f64 * q * (1.0 - q)).sqrt();
        for st in &states {
            let c = *freq.get(st).unwrap_or(&0) as f64;
            assert!((c - m as f64 * q).abs() < 4.0 * sigma, "{st}: {c}");
        }
    }

    #[test]
    fn dump_round_trip() {
        let p = GTPattern::min_packed(&[6, 2, 1]);
        let line = p.to_string();
        assert_eq!(line, "3;3 2;6 2 1");
        assert_eq!(line.parse::<GTPattern>().unwrap(), p);
        assert!("2;1 3".parse::<GTPattern>().is_err());
    }

    #[test]
    fn autocorrelation_basics() {
        let alt: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let rho = autocorrelation(&alt, 2);
        assert!((rho[0] - 1.0).abs() < 1e-12 && rho[1] < -0.9 && rho[2] > 0.9);
        assert!(empirical_correlations(&[GTPattern::min_packed(&[1, 0])], &[]).is_empty());
    }

    proptest! {
        #[test]
        fn enumeration_matches_count(gaps in proptest::collection::vec(1i64..4, 1..5)) {
            let mut x = vec![0i64];
            for g in gaps.iter().rev() {
                x.insert(0, x[0] + g);
            }
            prop_assume!(x[0] <= ENUM_MAX_SPREAD);
            let all = enumerate_patterns(&x).unwrap();
            prop_assert_eq!(all.len() as u128, pattern_count(&x));
            prop_assert!(all.iter().all(GTPattern::is_valid));
        }

        #[test]
        fn chain_output_interlaces(seed in 0u64..1000, sweeps in 1usize..20) {
            let p = glauber_sample(&[9, 7, 4, 3, 0], sweeps, seed).unwrap();
            prop_assert!(p.is_valid());
            prop_assert_eq!(p.top(), &[9, 7, 4, 3, 0]);
        }
    }
}
