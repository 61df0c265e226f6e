use crate::numerics::{ln_factorial, signed_log_sum, SignedLog, Wide};

use super::{check_domain, phi, KernelError, KernelValue, Mode, Precision, Site};

const LN2: f64 = std::f64::consts::LN_2;

/// Bits kept beyond the estimated cancellation.
const GUARD_BITS: u32 = 96;
/// Number of times the width may double after the first attempt.
const MAX_WIDENINGS: u32 = 2;

/// Product of integer factors, batched into machine words before touching
/// the big float.
struct Batched {
    acc: Wide,
    word: i64,
}

impl Batched {
    fn new(prec: u32) -> Self {
        Batched { acc: Wide::from_i64(1, prec), word: 1 }
    }

    fn mul(&mut self, f: i64) {
        match self.word.checked_mul(f) {
            Some(w) if w.unsigned_abs() < (1u64 << 62) => self.word = w,
            _ => {
                self.acc = self.acc.mul_i64(self.word);
                self.word = f;
            }
        }
    }

    fn finish(self) -> Wide {
        self.acc.mul_i64(self.word)
    }
}

/// The pieces of the double sum after splitting off `l = x_k`.
///
/// For `l` outside the top row the `(k, l)` term factors as
/// `a_k b_l / (l - x_k)` with `a_k = N_k / prod_{i != k} (x_k - x_i)` and
/// `b_l = prod_i (l - x_i) / prod_{j != l} (l - j)`. Terms with `l` on the row
/// vanish unless `l = x_k`, where the term is `N_k / prod_{j != l} (l - j)`.
struct Layout {
    n: i64,
    lo: i64,
    hi: i64,
    ks: Vec<usize>,
    ls: Vec<i64>,
    ln_a: Vec<f64>,
    sign_a: Vec<i8>,
    ln_b: Vec<f64>,
    sign_b: Vec<i8>,
    /// `(k index into ks, ln |term|, sign)` for `l = x_k` inside the window.
    special: Vec<(usize, f64, i8)>,
    ln_c: f64,
}

impl Layout {
    fn new(x: &[i64], (u, r): Site, (v, s): Site) -> Self {
        let n = x.len() as i64;
        let (lo, hi) = (v + s - n, v);
        let ks: Vec<usize> = (0..x.len()).filter(|&k| x[k] >= u).collect();
        let on_row = |l: i64| x.binary_search_by(|xi| l.cmp(xi)).is_ok();
        let ls: Vec<i64> = (lo..=hi).filter(|&l| !on_row(l)).collect();
        let ln_n = |xk: i64| (u + r - n + 1..u).map(|j| ((xk - j) as f64).ln()).sum::<f64>();
        let ln_den = |l: i64| ln_factorial((l - lo) as u64) + ln_factorial((hi - l) as u64);
        let den_sign = |l: i64| if (hi - l) % 2 == 0 { 1 } else { -1 };
        let mut ln_a = Vec::with_capacity(ks.len());
        let mut sign_a = Vec::with_capacity(ks.len());
        let mut special = Vec::new();
        for (ki, &k) in ks.iter().enumerate() {
            let xk = x[k];
            let lnn = ln_n(xk);
            let lnd: f64 = x
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, &xi)| ((xk - xi).abs() as f64).ln())
                .sum();
            ln_a.push(lnn - lnd);
            sign_a.push(if k % 2 == 0 { 1 } else { -1 });
            if lo <= xk && xk <= hi {
                special.push((ki, lnn - ln_den(xk), den_sign(xk)));
            }
        }
        let mut ln_b = Vec::with_capacity(ls.len());
        let mut sign_b = Vec::with_capacity(ls.len());
        for &l in &ls {
            let lnp: f64 = x.iter().map(|&xi| ((l - xi).abs() as f64).ln()).sum();
            let above = x.iter().filter(|&&xi| xi > l).count();
            ln_b.push(lnp - ln_den(l));
            sign_b.push(if above % 2 == 0 { den_sign(l) } else { -den_sign(l) });
        }
        let ln_c = ln_factorial((n - s) as u64) - ln_factorial((n - r - 1) as u64);
        Layout { n, lo, hi, ks, ls, ln_a, sign_a, ln_b, sign_b, special, ln_c }
    }

    /// `ln` of the largest term of `C * sum`.
    fn ln_max_term(&self, x: &[i64]) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for (ki, &k) in self.ks.iter().enumerate() {
            for (li, &l) in self.ls.iter().enumerate() {
                m = m.max(self.ln_a[ki] + self.ln_b[li] - ((l - x[k]).abs() as f64).ln());
            }
        }
        for &(_, lnt, _) in &self.special {
            m = m.max(lnt);
        }
        m + self.ln_c
    }

    fn sum_double(&self, x: &[i64]) -> SignedLog {
        let mut terms = Vec::with_capacity(self.ks.len() * self.ls.len() + self.special.len());
        for (ki, &k) in self.ks.iter().enumerate() {
            for (li, &l) in self.ls.iter().enumerate() {
                let d = l - x[k];
                let sign = self.sign_a[ki] * self.sign_b[li] * if d > 0 { 1 } else { -1 };
                terms.push(SignedLog::from_parts(sign, self.ln_a[ki] + self.ln_b[li] - (d.abs() as f64).ln()));
            }
        }
        for &(_, lnt, sign) in &self.special {
            terms.push(SignedLog::from_parts(sign, lnt));
        }
        signed_log_sum(&terms) * SignedLog::from_parts(1, self.ln_c)
    }

    fn sum_wide(&self, x: &[i64], (u, r): Site, prec: u32) -> Wide {
        let n = self.n;
        let maxf = (self.hi - self.lo) as usize;
        let mut fact = Vec::with_capacity(maxf + 1);
        fact.push(Wide::from_i64(1, prec));
        for j in 1..=maxf {
            let next = fact[j - 1].mul_i64(j as i64);
            fact.push(next);
        }
        let den = |l: i64| {
            let d = fact[(l - self.lo) as usize].mul(&fact[(self.hi - l) as usize]);
            if (self.hi - l) % 2 == 0 {
                d
            } else {
                d.neg()
            }
        };
        let b: Vec<Wide> = self
            .ls
            .iter()
            .map(|&l| {
                let mut p = Batched::new(prec);
                for &xi in x {
                    p.mul(l - xi);
                }
                p.finish().div(&den(l))
            })
            .collect();
        let mut total = Wide::zero(prec);
        for &k in &self.ks {
            let xk = x[k];
            let mut nk = Batched::new(prec);
            for j in u + r - n + 1..u {
                nk.mul(xk - j);
            }
            let nk = nk.finish();
            let mut dk = Batched::new(prec);
            for (i, &xi) in x.iter().enumerate() {
                if i != k {
                    dk.mul(xk - xi);
                }
            }
            let ak = nk.div(&dk.finish());
            let mut inner = Wide::zero(prec);
            for (bl, &l) in b.iter().zip(&self.ls) {
                inner = inner.add(&bl.div_i64(l - xk));
            }
            total = total.add(&ak.mul(&inner));
            if self.lo <= xk && xk <= self.hi {
                total = total.add(&nk.div(&den(xk)));
            }
        }
        // (n - s)! / (n - r - 1)! with s = n - (hi - lo)
        let s = n - (self.hi - self.lo);
        let mut c = Wide::from_i64(1, prec);
        if n - s >= n - r - 1 {
            for j in n - r..=n - s {
                c = c.mul_i64(j);
            }
        } else {
            for j in n - s + 1..=n - r - 1 {
                c = c.div_i64(j);
            }
        }
        total.mul(&c)
    }
}

fn phi_wide(r: i64, s: i64, u: i64, v: i64, prec: u32) -> Wide {
    if v < u || s <= r {
        return Wide::zero(prec);
    }
    let mut num = Batched::new(prec);
    let mut den = Batched::new(prec);
    for j in 1..s - r {
        num.mul(v - u + s - r - j);
        den.mul(j);
    }
    num.finish().div(&den.finish())
}

/// Float evaluation of `K_n((u, r), (v, s))`.
pub fn kernel_float(x: &[i64], a: Site, b: Site, precision: Precision) -> Result<KernelValue, KernelError> {
    check_domain(x, a)?;
    check_domain(x, b)?;
    let ((u, r), (v, s)) = (a, b);
    let layout = Layout::new(x, a, b);
    let ph = phi(r, s, u, v);
    let ln_max = layout.ln_max_term(x).max(ph.ln_abs());
    let lost_bits = |val: SignedLog| {
        if val.is_zero() {
            u32::MAX
        } else {
            ((ln_max - val.ln_abs()) / LN2).max(0.0).ceil() as u32
        }
    };
    match precision {
        Precision::Double => {
            let value = layout.sum_double(x).add(-ph);
            Ok(KernelValue {
                value,
                mode: Mode::FloatLog,
                cancellation_bits: lost_bits(value),
                precision_bits: 53,
            })
        }
        Precision::Bits(bits) => {
            let mut prec = bits.max((ln_max / LN2).max(0.0).ceil() as u32 + GUARD_BITS);
            for _ in 0..=MAX_WIDENINGS {
                let total = layout.sum_wide(x, a, prec).sub(&phi_wide(r, s, u, v, prec));
                let value = total.to_signed_log();
                let lost = lost_bits(value);
                if lost.saturating_add(60) <= prec {
                    return Ok(KernelValue {
                        value,
                        mode: Mode::FloatLog,
                        cancellation_bits: lost,
                        precision_bits: prec,
                    });
                }
                prec *= 2;
            }
            // Below the resolution of the widest attempt: indistinguishable from zero.
            Ok(KernelValue {
                value: SignedLog::ZERO,
                mode: Mode::FloatLog,
                cancellation_bits: prec / 2,
                precision_bits: prec / 2,
            })
        }
    }
}
