use num_rational::BigRational;
use num_traits::One;

use crate::measures::Region;
use crate::numerics::{ln_factorial, SignedLog};
use crate::saddle::{QueryPair, ScalingContext};

use super::{kernel_float, KernelError, KernelValue, Precision, Site};

/// `B_n(r, s) = (n - s)! / (n - r)! * n^{s - r}`.
pub fn conj_bn(n: usize, r: i64, s: i64) -> SignedLog {
    let n_i = n as i64;
    let ln = ln_factorial((n_i - s) as u64) - ln_factorial((n_i - r) as u64) + (s - r) as f64 * (n as f64).ln();
    SignedLog::from_parts(1, ln)
}

pub fn conj_bn_exact(n: usize, r: i64, s: i64) -> BigRational {
    let n_i = n as i64;
    let mut q = BigRational::one();
    let nn = BigRational::from_integer(n_i.into());
    for j in 1..=n_i - s {
        q *= BigRational::from_integer(j.into());
    }
    for j in 1..=n_i - r {
        q /= BigRational::from_integer(j.into());
    }
    let p = (s - r).unsigned_abs() as usize;
    let np = (0..p).fold(BigRational::one(), |acc, _| acc * &nn);
    if s >= r {
        q * np
    } else {
        q / np
    }
}

/// The conjugation `A_{t,n}((U, R), (V, S))`: powers of `t - chi_n` and
/// `t - chi_n - eta_n + 1` times the quadratic and cubic Gaussian factors.
pub fn conj_atn(ctx: &ScalingContext, (uu, rr): Site, (vv, ss): Site) -> Result<SignedLog, KernelError> {
    let nf = ctx.n as f64;
    let d1 = ctx.t - ctx.chi_n;
    let d2 = ctx.t - ctx.chi_n - ctx.eta_n + 1.0;
    if d1 == 0.0 || d2 == 0.0 {
        return Err(KernelError::Degenerate);
    }
    let pow = SignedLog::from_f64(d1).powi(-(vv - uu)) * SignedLog::from_f64(d2).powi(vv + ss - uu - rr);
    let a = |p: i64| p as f64 / nf - ctx.chi_n;
    let b = |p: i64, row: i64| (p + row) as f64 / nf - ctx.chi_n - ctx.eta_n;
    let quad = nf / 2.0 * ((a(vv).powi(2) - a(uu).powi(2)) / d1 - (b(vv, ss).powi(2) - b(uu, rr).powi(2)) / d2);
    let cubic = nf / 6.0
        * ((a(vv).powi(3) - a(uu).powi(3)) / (d1 * d1) - (b(vv, ss).powi(3) - b(uu, rr).powi(3)) / (d2 * d2));
    Ok(pow * SignedLog::from_parts(1, quad + cubic))
}

/// `K~_n((u, r), (v, s)) = K_n((v, s), (u, r)) / (B_n(s, r) A_{t,n}((v, s), (u, r)))`.
pub fn kernel_equiv(ctx: &ScalingContext, qp: &QueryPair, precision: Precision) -> Result<KernelValue, KernelError> {
    let a = (qp.un, qp.rn);
    let b = (qp.vn, qp.sn);
    let k = kernel_float(ctx.x(), b, a, precision)?;
    let conj = conj_bn(ctx.n, qp.sn, qp.rn) * conj_atn(ctx, b, a)?;
    Ok(KernelValue { value: k.value / conj, ..k })
}

/// The explicit term `alpha_n` that separates the Gaussian part of the
/// limit, for the region of `t`.
pub fn alpha_n(ctx: &ScalingContext, qp: &QueryPair) -> Result<SignedLog, KernelError> {
    let (un, rn, vn, sn) = (qp.un, qp.rn, qp.vn, qp.sn);
    let lf = |k: i64| ln_factorial(k as u64);
    let ln = match ctx.region() {
        Region::MuPlus => {
            if !(un >= vn && rn > sn) {
                return Ok(SignedLog::ZERO);
            }
            lf(un + rn - vn - sn - 1) - lf(rn - sn - 1) - lf(un - vn)
        }
        Region::LambdaMinusMu => {
            if !(un >= vn && un + rn <= vn + sn && rn <= sn) {
                return Ok(SignedLog::ZERO);
            }
            lf(sn - rn) - lf(un - vn) - lf(vn + sn - un - rn)
        }
        Region::MuMinus => {
            if !(un + rn <= vn + sn && rn > sn) {
                return Ok(SignedLog::ZERO);
            }
            lf(vn - un - 1) - lf(rn - sn - 1) - lf(vn + sn - un - rn)
        }
    };
    let den = conj_atn(ctx, (vn, sn), (un, rn))?.abs() * conj_bn(ctx.n, sn, rn);
    Ok(SignedLog::from_parts(1, ln) / den)
}

/// The Airy-scale value of the conjugated kernel at a query.
#[derive(Debug, Clone, PartialEq)]
pub struct Rescaled {
    /// `n^{1/3} beta^{-1} K~_n`, or `n^{1/3} beta^{-1} (1 - K~_n)` at a common
    /// site and `-n^{1/3} beta^{-1} K~_n` otherwise on a full block.
    pub value: f64,
    /// `n^{1/3} beta^{-1} alpha_n`.
    pub alpha: f64,
    pub kernel: KernelValue,
}

pub fn rescaled_kernel(ctx: &ScalingContext, qp: &QueryPair, precision: Precision) -> Result<Rescaled, KernelError> {
    let k = kernel_equiv(ctx, qp, precision)?;
    let scale = (ctx.n as f64).cbrt() / ctx.beta();
    let kv = k.to_f64();
    let value = match ctx.region() {
        Region::LambdaMinusMu => {
            // The complement is taken at the site: on different rows the
            // position-only indicator leaves an O(1) term behind.
            let delta = if (qp.un, qp.rn) == (qp.vn, qp.sn) { 1.0 } else { 0.0 };
            scale * (delta - kv)
        }
        _ => scale * kv,
    };
    let alpha = scale * alpha_n(ctx, qp)?.to_f64();
    Ok(Rescaled { value, alpha, kernel: k })
}
