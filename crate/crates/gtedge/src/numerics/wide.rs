use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::SignedLog;

/// Binary floating point number with a caller-chosen mantissa width.
///
/// The value is `(-1)^neg * mag * 2^exp`. After every operation the mantissa
/// is rounded to nearest so that it holds at most `prec` bits. Only the
/// operations needed by long alternating sums are provided: products and
/// quotients by machine integers, general products and quotients, and sums.
#[derive(Clone, PartialEq, Eq)]
pub struct Wide {
    neg: bool,
    mag: BigUint,
    exp: i64,
    prec: u32,
}

impl Wide {
    pub fn zero(prec: u32) -> Self {
        Wide { neg: false, mag: BigUint::zero(), exp: 0, prec: prec.max(8) }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        let mut w = Wide {
            neg: v < 0,
            mag: BigUint::from(v.unsigned_abs()),
            exp: 0,
            prec: prec.max(8),
        };
        w.normalize();
        w
    }

    /// Exact conversion of a finite double, then rounded to `prec` bits.
    pub fn from_f64(v: f64, prec: u32) -> Self {
        assert!(v.is_finite(), "Wide::from_f64 needs a finite value");
        if v == 0.0 {
            return Wide::zero(prec);
        }
        let bits = v.to_bits();
        let neg = (bits >> 63) != 0;
        let e = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if e == 0 { (frac, -1074) } else { (frac | (1u64 << 52), e - 1075) };
        let mut w = Wide { neg, mag: BigUint::from(m), exp: e, prec: prec.max(8) };
        w.normalize();
        w
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.mag.is_zero()
    }

    pub fn signum(&self) -> i8 {
        if self.mag.is_zero() {
            0
        } else if self.neg {
            -1
        } else {
            1
        }
    }

    /// Position of the leading bit: `|self|` lies in `[2^(t-1), 2^t)`.
    pub fn top_bit(&self) -> Option<i64> {
        if self.mag.is_zero() {
            None
        } else {
            Some(self.exp + self.mag.bits() as i64)
        }
    }

    /// `log2 |self|`, or `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        match self.top_bit() {
            None => f64::NEG_INFINITY,
            Some(_) => {
                let bits = self.mag.bits() as i64;
                let shift = (bits - 64).max(0);
                let head = (&self.mag >> shift as usize).to_f64().unwrap_or(f64::MAX);
                head.log2() + (self.exp + shift) as f64
            }
        }
    }

    pub fn to_signed_log(&self) -> SignedLog {
        SignedLog::from_parts(self.signum(), self.log2_abs() * std::f64::consts::LN_2)
    }

    pub fn to_f64(&self) -> f64 {
        if self.mag.is_zero() {
            return 0.0;
        }
        let bits = self.mag.bits() as i64;
        let shift = (bits - 64).max(0);
        let head = (&self.mag >> shift as usize).to_f64().unwrap_or(f64::MAX);
        let mut e = self.exp + shift;
        let mut v = head;
        while e > 1000 {
            v *= 2f64.powi(1000);
            e -= 1000;
        }
        while e < -1000 {
            v *= 2f64.powi(-1000);
            e += 1000;
        }
        v *= 2f64.powi(e as i32);
        if self.neg {
            -v
        } else {
            v
        }
    }

    pub fn neg(mut self) -> Self {
        if !self.mag.is_zero() {
            self.neg = !self.neg;
        }
        self
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        let mut w = Wide {
            neg: self.neg ^ (k < 0),
            mag: &self.mag * BigUint::from(k.unsigned_abs()),
            exp: self.exp,
            prec: self.prec,
        };
        w.normalize();
        w
    }

    pub fn div_i64(&self, k: i64) -> Self {
        assert!(k != 0, "Wide::div_i64 by zero");
        if self.mag.is_zero() {
            return self.clone();
        }
        let extra = self.prec as i64 + 66 - self.mag.bits() as i64;
        let shifted = if extra > 0 { &self.mag << extra as usize } else { self.mag.clone() };
        let extra = extra.max(0);
        let q = shifted / BigUint::from(k.unsigned_abs());
        let mut w = Wide { neg: self.neg ^ (k < 0), mag: q, exp: self.exp - extra, prec: self.prec };
        w.normalize();
        w
    }

    pub fn mul(&self, other: &Wide) -> Self {
        let mut w = Wide {
            neg: self.neg ^ other.neg,
            mag: &self.mag * &other.mag,
            exp: self.exp + other.exp,
            prec: self.prec.max(other.prec),
        };
        if w.mag.is_zero() {
            w.neg = false;
            w.exp = 0;
        }
        w.normalize();
        w
    }

    pub fn div(&self, other: &Wide) -> Self {
        assert!(!other.mag.is_zero(), "Wide::div by zero");
        let prec = self.prec.max(other.prec);
        if self.mag.is_zero() {
            return Wide::zero(prec);
        }
        let extra = prec as i64 + 66 + other.mag.bits() as i64 - self.mag.bits() as i64;
        let extra = extra.max(0);
        let q = (&self.mag << extra as usize) / &other.mag;
        let mut w = Wide { neg: self.neg ^ other.neg, mag: q, exp: self.exp - other.exp - extra, prec };
        w.normalize();
        w
    }

    pub fn add(&self, other: &Wide) -> Self {
        let prec = self.prec.max(other.prec);
        let (a, b) = match (self.top_bit(), other.top_bit()) {
            (None, _) => return Wide { prec, ..other.clone() },
            (_, None) => return Wide { prec, ..self.clone() },
            (Some(ta), Some(tb)) => {
                if ta - tb > prec as i64 + 3 {
                    return Wide { prec, ..self.clone() };
                }
                if tb - ta > prec as i64 + 3 {
                    return Wide { prec, ..other.clone() };
                }
                (self, other)
            }
        };
        let e = a.exp.min(b.exp);
        let am = &a.mag << (a.exp - e) as usize;
        let bm = &b.mag << (b.exp - e) as usize;
        let (neg, mag) = if a.neg == b.neg {
            (a.neg, am + bm)
        } else {
            match am.cmp(&bm) {
                Ordering::Greater => (a.neg, am - bm),
                Ordering::Less => (b.neg, bm - am),
                Ordering::Equal => (false, BigUint::zero()),
            }
        };
        let mut w = Wide { neg, mag, exp: e, prec };
        w.normalize();
        w
    }

    pub fn sub(&self, other: &Wide) -> Self {
        self.add(&other.clone().neg())
    }

    fn normalize(&mut self) {
        if self.mag.is_zero() {
            self.neg = false;
            self.exp = 0;
            return;
        }
        let bits = self.mag.bits();
        if bits > self.prec as u64 {
            let drop = bits - self.prec as u64;
            let tz = self.mag.trailing_zeros().unwrap_or(0);
            let half_bit = self.mag.bit(drop - 1);
            let mut q = &self.mag >> drop as usize;
            // above half, or exactly half with an odd quotient
            if half_bit && (tz < drop - 1 || q.bit(0)) {
                q += 1u8;
            }
            self.mag = q;
            self.exp += drop as i64;
        }
        let tz = self.mag.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mag >>= tz as usize;
            self.exp += tz as i64;
        }
    }
}

impl fmt::Debug for Wide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Wide({:?}, prec={})", self.to_signed_log(), self.prec)
    }
}
