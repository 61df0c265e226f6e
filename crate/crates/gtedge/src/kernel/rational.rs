use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{check_domain, KernelError, Site, RATIONAL_MAX_N};

/// `phi_{r,s}(u, v)` as an exact integer.
pub fn phi_exact(r: i64, s: i64, u: i64, v: i64) -> BigInt {
    if v < u || s <= r {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 1..s - r {
        num *= v - u + s - r - j;
        den *= j;
    }
    num / den
}

/// `K_n((u, r), (v, s))` in exact arithmetic, term by term as in the
/// defining double sum. Only for `n <= 64`.
pub fn kernel_rational(x: &[i64], (u, r): Site, (v, s): Site) -> Result<BigRational, KernelError> {
    let n = x.len();
    if n > RATIONAL_MAX_N {
        return Err(KernelError::TooLargeForRational(n));
    }
    check_domain(x, (u, r))?;
    check_domain(x, (v, s))?;
    let ni = n as i64;
    let lo = v + s - ni;
    let dens: Vec<BigInt> = (lo..=v)
        .map(|l| (lo..=v).filter(|&j| j != l).fold(BigInt::one(), |acc, j| acc * (l - j)))
        .collect();
    let mut sum = BigRational::zero();
    for (k, &xk) in x.iter().enumerate() {
        if xk < u {
            continue;
        }
        let nk = (u + r - ni + 1..u).fold(BigInt::one(), |acc, j| acc * (xk - j));
        let dk = x
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .fold(BigInt::one(), |acc, (_, &xi)| acc * (xk - xi));
        let mut inner = BigRational::zero();
        for (l, den) in (lo..=v).zip(&dens) {
            let num = x
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .fold(BigInt::one(), |acc, (_, &xi)| acc * (l - xi));
            if !num.is_zero() {
                inner += BigRational::new(num, den.clone());
            }
        }
        sum += inner * BigRational::new(nk, dk);
    }
    // (n - s)! / (n - r - 1)!
    let mut c = BigRational::one();
    for j in 1..=ni - s {
        c *= BigRational::from_integer(j.into());
    }
    for j in 1..=ni - r - 1 {
        c /= BigRational::from_integer(j.into());
    }
    Ok(c * sum - BigRational::from_integer(phi_exact(r, s, u, v)))
}
