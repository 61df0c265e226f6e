use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul, Neg};

use super::Wide;

/// A real number stored as an exact sign and the natural log of its magnitude.
///
/// Zero is `sign == 0` with `log == -inf`.
#[derive(Clone, Copy, PartialEq)]
pub struct SignedLog {
    sign: i8,
    log: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog { sign: 0, log: f64::NEG_INFINITY };
    pub const ONE: SignedLog = SignedLog { sign: 1, log: 0.0 };

    pub fn from_parts(sign: i8, log: f64) -> Self {
        if sign == 0 || log == f64::NEG_INFINITY {
            SignedLog::ZERO
        } else {
            SignedLog { sign: sign.signum(), log }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            SignedLog::ZERO
        } else {
            SignedLog { sign: if x > 0.0 { 1 } else { -1 }, log: x.abs().ln() }
        }
    }

    /// `sign * exp(log)`, which may overflow to an infinity.
    pub fn to_f64(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            self.sign as f64 * self.log.exp()
        }
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    pub fn ln_abs(self) -> f64 {
        self.log
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn abs(self) -> Self {
        SignedLog { sign: self.sign.abs(), ..self }
    }

    pub fn recip(self) -> Self {
        assert!(self.sign != 0, "reciprocal of zero");
        SignedLog { sign: self.sign, log: -self.log }
    }

    pub fn powi(self, k: i64) -> Self {
        if k == 0 {
            return SignedLog::ONE;
        }
        if self.sign == 0 {
            assert!(k > 0, "negative power of zero");
            return SignedLog::ZERO;
        }
        let sign = if self.sign < 0 && k % 2 != 0 { -1 } else { 1 };
        SignedLog { sign, log: self.log * k as f64 }
    }

    pub fn add(self, other: SignedLog) -> SignedLog {
        signed_log_sum(&[self, other])
    }

    /// Relative distance `|a - b| / max(|a|, |b|)`, zero when both vanish.
    pub fn rel_diff(self, other: SignedLog) -> f64 {
        if self.sign == 0 && other.sign == 0 {
            return 0.0;
        }
        let d = self.add(-other);
        let scale = self.log.max(other.log);
        if d.sign == 0 {
            0.0
        } else {
            (d.log - scale).exp()
        }
    }
}

impl Mul for SignedLog {
    type Output = SignedLog;
    fn mul(self, rhs: SignedLog) -> SignedLog {
        SignedLog::from_parts(self.sign * rhs.sign, self.log + rhs.log)
    }
}

impl Div for SignedLog {
    type Output = SignedLog;
    fn div(self, rhs: SignedLog) -> SignedLog {
        self * rhs.recip()
    }
}

impl Neg for SignedLog {
    type Output = SignedLog;
    fn neg(self) -> SignedLog {
        SignedLog { sign: -self.sign, log: self.log }
    }
}

impl fmt::Debug for SignedLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => write!(f, "{}exp({})", if s > 0 { "+" } else { "-" }, self.log),
        }
    }
}

/// Sum of signed log-domain terms.
///
/// The terms are rescaled by the largest magnitude and added with
/// compensated summation. When fewer than about 20 significant bits survive
/// the cancellation, the rescaled terms are added again exactly, so the
/// sign of the result is exact for the represented summands.
pub fn signed_log_sum(terms: &[SignedLog]) -> SignedLog {
    let m = terms
        .iter()
        .filter(|t| t.sign != 0)
        .map(|t| t.log)
        .max_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let Some(m) = m else { return SignedLog::ZERO };
    if !m.is_finite() {
        let inf: Vec<_> = terms.iter().filter(|t| t.sign != 0 && t.log == m).collect();
        let s: i32 = inf.iter().map(|t| t.sign as i32).sum();
        return SignedLog::from_parts(s.signum() as i8, if s == 0 { f64::NAN } else { m });
    }
    let (mut s, mut c, mut abs) = (0.0f64, 0.0f64, 0.0f64);
    for t in terms.iter().filter(|t| t.sign != 0) {
        let x = t.sign as f64 * (t.log - m).exp();
        let u = s + x;
        if s.abs() >= x.abs() {
            c += (s - u) + x;
        } else {
            c += (x - u) + s;
        }
        s = u;
        abs += x.abs();
    }
    let total = s + c;
    if total != 0.0 && total.abs() > abs * 2f64.powi(-33) {
        return SignedLog::from_parts(if total > 0.0 { 1 } else { -1 }, m + total.abs().ln());
    }
    let mut acc = Wide::zero(1200);
    for t in terms.iter().filter(|t| t.sign != 0) {
        let x = t.sign as f64 * (t.log - m).exp();
        acc = acc.add(&Wide::from_f64(x, 1200));
    }
    let r = acc.to_signed_log();
    SignedLog::from_parts(r.sign(), m + r.ln_abs())
}

/// `ln(k!)`, exact summation for small `k` and log-gamma beyond.
pub fn ln_factorial(k: u64) -> f64 {
    const TABLE_LEN: usize = 171;
    static TABLE: std::sync::OnceLock<Vec<f64>> = std::sync::OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut f = 1.0f64;
        let mut v = Vec::with_capacity(TABLE_LEN);
        v.push(0.0);
        for i in 1..TABLE_LEN {
            f *= i as f64;
            v.push(f.ln());
        }
        v
    });
    if (k as usize) < TABLE_LEN {
        table[k as usize]
    } else {
        statrs::function::gamma::ln_gamma(k as f64 + 1.0)
    }
}
