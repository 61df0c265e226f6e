//! The correlation kernel `K_n` of a uniformly random interlacing pattern
//! with fixed top row, its conjugated form and the Airy-scale rescaling.
//!
//! `K_n` is a double sum over the particles `x_k >= u` and the `n - s + 1`
//! sites `l` of a window. The terms are huge and alternate in sign, so the
//! float route works at a mantissa width chosen from the largest term. A
//! literal big-rational evaluation serves as the oracle for small `n`.

mod conj;
mod float;
mod rational;

pub use conj::{alpha_n, conj_atn, conj_bn, conj_bn_exact, kernel_equiv, rescaled_kernel, Rescaled};
pub use float::kernel_float;
pub use rational::{kernel_rational, phi_exact};

use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::numerics::{ln_factorial, SignedLog};
use crate::saddle::SaddleError;

/// A lattice site `(position, row)`.
pub type Site = (i64, i64);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("site ({u}, {r}) is outside the kernel domain for n = {n}")]
    DomainViolation { u: i64, r: i64, n: usize },
    #[error("exact rational mode is limited to n <= 64, got {0}")]
    TooLargeForRational(usize),
    #[error("top row must be strictly decreasing")]
    BadTopRow,
    #[error("conjugation is singular: t coincides with chi_n or chi_n + eta_n - 1")]
    Degenerate,
    #[error(transparent)]
    Saddle(#[from] SaddleError),
}

/// Working precision of the float route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    /// Signed-log doubles; cancellation is reported, not repaired.
    Double,
    /// Binary floats with at least this many mantissa bits, widened as the
    /// term magnitudes require.
    Bits(u32),
}

impl Default for Precision {
    fn default() -> Self {
        Precision::Double
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    ExactRational,
    FloatLog,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelValue {
    pub value: SignedLog,
    pub mode: Mode,
    /// Bits lost between the largest term and the result.
    pub cancellation_bits: u32,
    /// Mantissa width the value was finally computed with (53 for doubles).
    pub precision_bits: u32,
}

impl KernelValue {
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn from_rational(q: &BigRational) -> Self {
        KernelValue {
            value: rational_to_signed_log(q),
            mode: Mode::ExactRational,
            cancellation_bits: 0,
            precision_bits: 0,
        }
    }
}

/// Largest `n` accepted by [`kernel_rational`].
pub const RATIONAL_MAX_N: usize = 64;

/// `K_n((u, r), (v, s))` by the float route.
pub fn kernel_kn(x: &[i64], a: Site, b: Site, precision: Precision) -> Result<KernelValue, KernelError> {
    kernel_float(x, a, b, precision)
}

pub(crate) fn check_domain(x: &[i64], (u, r): Site) -> Result<(), KernelError> {
    let n = x.len();
    if x.windows(2).any(|w| w[0] <= w[1]) {
        return Err(KernelError::BadTopRow);
    }
    let ni = n as i64;
    if r < 1 || r > ni - 1 || u < x[n - 1] + ni - r {
        return Err(KernelError::DomainViolation { u, r, n });
    }
    Ok(())
}

/// `phi_{r,s}(u, v)`: the number of ways to interlace from `(u, r)` up to
/// `(v, s)`, as a signed log.
pub fn phi(r: i64, s: i64, u: i64, v: i64) -> SignedLog {
    if v < u || s <= r {
        return SignedLog::ZERO;
    }
    if s == r + 1 {
        return SignedLog::ONE;
    }
    // C(v - u + s - r - 1, s - r - 1)
    let top = (v - u + s - r - 1) as u64;
    let k = (s - r - 1) as u64;
    SignedLog::from_parts(1, ln_factorial(top) - ln_factorial(k) - ln_factorial(top - k))
}

/// `det[K_n(q_i, q_j)]`, the probability that every site in `sites` holds a
/// particle, in exact arithmetic.
pub fn correlation_rational(x: &[i64], sites: &[Site]) -> Result<BigRational, KernelError> {
    let m = sites.len();
    let mut a = Vec::with_capacity(m);
    for &p in sites {
        let row = sites.iter().map(|&q| kernel_rational(x, p, q)).collect::<Result<Vec<_>, _>>()?;
        a.push(row);
    }
    Ok(det_rational(a))
}

fn det_rational(mut a: Vec<Vec<BigRational>>) -> BigRational {
    use num_traits::{One, Zero};
    let m = a.len();
    let mut det = BigRational::one();
    for c in 0..m {
        let Some(p) = (c..m).find(|&i| !a[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        let piv = a[c][c].clone();
        det *= &piv;
        for i in c + 1..m {
            let f = &a[i][c] / &piv;
            for j in c..m {
                let d = &f * &a[c][j];
                a[i][j] -= d;
            }
        }
    }
    det
}

/// Signed-log value of an exact rational.
pub fn rational_to_signed_log(q: &BigRational) -> SignedLog {
    use num_traits::{Signed, Zero};
    if q.is_zero() {
        return SignedLog::ZERO;
    }
    let ln_abs = |b: &num_bigint::BigInt| {
        let bits = b.bits() as i64;
        let shift = (bits - 60).max(0);
        let head = (b.abs() >> shift as usize).to_f64().expect("60-bit head fits");
        head.ln() + shift as f64 * std::f64::consts::LN_2
    };
    let sign = if q.is_negative() { -1 } else { 1 };
    SignedLog::from_parts(sign, ln_abs(q.numer()) - ln_abs(q.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_small_cases() {
        assert!(phi(3, 2, 0, 5).is_zero());
        assert_eq!(phi(1, 2, 0, 7).to_f64(), 1.0);
        assert!((phi(1, 3, 0, 2).to_f64() - 3.0).abs() < 1e-14);
        assert!(phi(1, 3, 2, 0).is_zero());
    }

    #[test]
    fn two_particle_top_row() {
        let x = [2, 0];
        let k = |u: i64, v: i64| kernel_rational(&x, (u, 1), (v, 1)).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(k(1, 1), half);
        assert_eq!(k(2, 2), half);
        let det = k(1, 1) * k(2, 2) - k(1, 2) * k(2, 1);
        assert_eq!(det, BigRational::from_integer(0.into()));
        let f = kernel_kn(&x, (1, 1), (1, 1), Precision::Double).unwrap();
        assert!((f.to_f64() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn row_counts_are_exact() {
        let x = [4, 2, 0];
        for r in 1..3i64 {
            let total = (x[2] + 3 - r..=x[0])
                .map(|u| kernel_rational(&x, (u, r), (u, r)).unwrap())
                .fold(BigRational::from_integer(0.into()), |a, b| a + b);
            assert_eq!(total, BigRational::from_integer(r.into()));
        }
    }

    #[test]
    fn two_point_function_of_a_forced_row() {
        // x = (2, 1, 0) admits a single pattern: rows (2, 1) and (2)
        let x = [2, 1, 0];
        let one = BigRational::from_integer(1.into());
        assert_eq!(correlation_rational(&x, &[(2, 2), (1, 2), (2, 1)]).unwrap(), one);
        assert_eq!(correlation_rational(&x, &[(2, 2), (2, 2)]).unwrap(), BigRational::from_integer(0.into()));
    }

    #[test]
    fn domain_is_enforced() {
        let x = [4, 2, 0];
        assert!(matches!(
            kernel_kn(&x, (0, 2), (2, 1), Precision::Double),
            Err(KernelError::DomainViolation { .. })
        ));
        assert!(kernel_kn(&x, (1, 3), (2, 1), Precision::Double).is_err());
        assert!(kernel_rational(&[5, 5, 1], (3, 1), (3, 1)).is_err());
    }
}
