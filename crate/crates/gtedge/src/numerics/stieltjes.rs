use num_complex::Complex64;

/// Polynomial density `sum_k poly[k] x^k` on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub poly: Vec<f64>,
}

impl Piece {
    pub fn new(lo: f64, hi: f64, poly: Vec<f64>) -> Self {
        Piece { lo, hi, poly }
    }

    pub fn constant(lo: f64, hi: f64, c: f64) -> Self {
        Piece { lo, hi, poly: vec![c] }
    }

    pub fn density(&self, x: f64) -> f64 {
        self.poly.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// `int_{lo}^{x} density`, with `x` clamped to the piece.
    pub fn mass_below(&self, x: f64) -> f64 {
        let x = x.clamp(self.lo, self.hi);
        // shift to the left end so that short tails keep relative accuracy
        let q = taylor_shift_real(&self.poly, self.lo);
        let d = x - self.lo;
        q.iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (i, c)| acc * d + c / (i + 1) as f64)
            * d
    }

    pub fn mass(&self) -> f64 {
        self.mass_below(self.hi)
    }

    fn is_zero(&self) -> bool {
        self.poly.iter().all(|c| c.abs() <= 1e-12)
    }
}

/// Signed measure made of polynomial-density pieces and point masses.
///
/// Stieltjes moments `int nu(dx) / (w - x)^k` are evaluated in closed form,
/// so the only restriction on `w` is that it must not lie on the support.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PiecewiseMeasure {
    pieces: Vec<Piece>,
    atoms: Vec<(f64, f64)>,
}

const SNAP: f64 = 1e-13;

impl PiecewiseMeasure {
    pub fn new() -> Self {
        PiecewiseMeasure::default()
    }

    pub fn add_piece(&mut self, piece: Piece, scale: f64) -> &mut Self {
        if piece.hi > piece.lo {
            let poly = piece.poly.iter().map(|c| c * scale).collect();
            self.pieces.push(Piece { poly, ..piece });
        }
        self
    }

    pub fn add_atom(&mut self, x: f64, weight: f64) -> &mut Self {
        self.atoms.push((x, weight));
        self
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Rewrites the measure on a common partition: overlapping pieces are
    /// summed, pieces whose net density vanishes identically are dropped and
    /// coincident atoms are merged.
    pub fn normalized(&self) -> PiecewiseMeasure {
        let mut cuts: Vec<f64> = self.pieces.iter().flat_map(|p| [p.lo, p.hi]).collect();
        cuts.sort_by(f64::total_cmp);
        let mut snapped: Vec<f64> = Vec::with_capacity(cuts.len());
        for c in cuts {
            match snapped.last() {
                Some(&l) if (c - l).abs() <= SNAP * l.abs().max(1.0) => {}
                _ => snapped.push(c),
            }
        }
        let snap = |x: f64| {
            snapped
                .iter()
                .copied()
                .find(|c| (c - x).abs() <= SNAP * c.abs().max(1.0))
                .unwrap_or(x)
        };
        let mut pieces: Vec<Piece> = Vec::new();
        for w in snapped.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mut poly: Vec<f64> = Vec::new();
            for p in &self.pieces {
                if snap(p.lo) <= a && snap(p.hi) >= b {
                    if poly.len() < p.poly.len() {
                        poly.resize(p.poly.len(), 0.0);
                    }
                    for (acc, c) in poly.iter_mut().zip(&p.poly) {
                        *acc += c;
                    }
                }
            }
            let piece = Piece::new(a, b, poly);
            if piece.poly.is_empty() || piece.is_zero() {
                continue;
            }
            match pieces.last_mut() {
                Some(last) if last.hi == a && same_poly(&last.poly, &piece.poly) => last.hi = b,
                _ => pieces.push(piece),
            }
        }
        let mut atoms = self.atoms.clone();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == x => last.1 += w,
                _ => merged.push((x, w)),
            }
        }
        merged.retain(|a| a.1 != 0.0);
        PiecewiseMeasure { pieces, atoms: merged }
    }

    pub fn mass(&self) -> f64 {
        self.pieces.iter().map(Piece::mass).sum::<f64>() + self.atoms.iter().map(|a| a.1).sum::<f64>()
    }

    /// Closed support as sorted disjoint intervals; atoms give degenerate ones.
    pub fn support(&self) -> Vec<(f64, f64)> {
        let mut iv: Vec<(f64, f64)> = self
            .pieces
            .iter()
            .map(|p| (p.lo, p.hi))
            .chain(self.atoms.iter().map(|a| (a.0, a.0)))
            .collect();
        iv.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (a, b) in iv {
            match out.last_mut() {
                Some(last) if a <= last.1 + SNAP * last.1.abs().max(1.0) => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        out
    }

    /// `int nu(dx) / (w - x)^k` for `k >= 1`.
    pub fn stieltjes(&self, w: Complex64, k: u32) -> Complex64 {
        assert!(k >= 1, "stieltjes moment order starts at 1");
        let mut s: Complex64 = self.pieces.iter().map(|p| piece_moment(p, w, k)).sum();
        for &(x, wt) in &self.atoms {
            s += wt * (w - x).powi(-(k as i32));
        }
        s
    }

    /// `int Log(w - x) nu(dx)` with the principal logarithm.
    pub fn log_potential(&self, w: Complex64) -> Complex64 {
        let mut s: Complex64 = self.pieces.iter().map(|p| piece_log(p, w)).sum();
        for &(x, wt) in &self.atoms {
            s += wt * (w - x).ln();
        }
        s
    }

    /// Derivatives of `f` where `f' = stieltjes(., 1)` and `f = log_potential`.
    pub fn potential_derivative(&self, w: Complex64, k: u32) -> Complex64 {
        if k == 0 {
            return self.log_potential(w);
        }
        let fact: f64 = (1..k).map(|i| i as f64).product();
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        self.stieltjes(w, k) * (sign * fact)
    }
}

fn same_poly(a: &[f64], b: &[f64]) -> bool {
    let n = a.len().max(b.len());
    (0..n).all(|i| {
        let x = a.get(i).copied().unwrap_or(0.0);
        let y = b.get(i).copied().unwrap_or(0.0);
        (x - y).abs() <= 1e-15 * x.abs().max(y.abs()).max(1.0)
    })
}

fn taylor_shift_real(p: &[f64], c: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    let n = q.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            q[j] += c * q[j + 1];
        }
    }
    q
}

/// Coefficients of `p` in powers of `(x - c)`.
fn taylor_shift(p: &[f64], c: Complex64) -> Vec<Complex64> {
    let mut q: Vec<Complex64> = p.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let n = q.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            let t = q[j + 1] * c;
            q[j] += t;
        }
    }
    q
}

fn clog1p(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        let re = 0.5 * (2.0 * z.re + z.norm_sqr()).ln_1p();
        let im = z.im.atan2(1.0 + z.re);
        Complex64::new(re, im)
    } else {
        (1.0 + z).ln()
    }
}

/// `(y1^e - y2^e) / e` with `y1 - y2 = len`, written without cancellation.
fn power_difference(y1: Complex64, y2: Complex64, len: f64, e: i32) -> Complex64 {
    let m = e.unsigned_abs() as i32;
    let mut g = Complex64::new(0.0, 0.0);
    for i in 0..m {
        g += y1.powi(i) * y2.powi(m - 1 - i);
    }
    if e > 0 {
        g * len / e as f64
    } else {
        g * len / ((y1 * y2).powi(m) * m as f64)
    }
}

fn piece_moment(p: &Piece, w: Complex64, k: u32) -> Complex64 {
    let c = 0.5 * (p.lo + p.hi);
    let h = 0.5 * (p.hi - p.lo);
    let z = w - c;
    if z.norm() >= 4.0 * h {
        return far_moment(p, z, c, h, k);
    }
    let y1 = w - p.lo;
    let y2 = w - p.hi;
    let len = p.hi - p.lo;
    // p(x) = sum_i d_i (w - x)^i
    let d: Vec<Complex64> = taylor_shift(&p.poly, w)
        .into_iter()
        .enumerate()
        .map(|(i, v)| if i % 2 == 1 { -v } else { v })
        .collect();
    let mut s = Complex64::new(0.0, 0.0);
    for (i, di) in d.iter().enumerate() {
        let e = i as i32 - k as i32 + 1;
        let term = if e == 0 { clog1p(Complex64::new(len, 0.0) / y2) } else { power_difference(y1, y2, len, e) };
        s += di * term;
    }
    s
}

fn centred_moments(p: &Piece, c: f64, h: f64, count: usize) -> Vec<f64> {
    let q = taylor_shift_real(&p.poly, c);
    (0..count)
        .map(|j| {
            q.iter()
                .enumerate()
                .filter(|(i, _)| (i + j) % 2 == 0)
                .map(|(i, qi)| qi * 2.0 * h.powi((i + j + 1) as i32) / (i + j + 1) as f64)
                .sum()
        })
        .collect()
}

fn far_moment(p: &Piece, z: Complex64, c: f64, h: f64, k: u32) -> Complex64 {
    let terms = 160;
    let m = centred_moments(p, c, h, terms);
    let inv = 1.0 / z;
    let mut s = Complex64::new(0.0, 0.0);
    let mut zpow = inv.powi(k as i32);
    let mut binom = 1.0f64;
    let mut prev = f64::INFINITY;
    for (j, mj) in m.iter().enumerate() {
        if j > 0 {
            binom *= (k as usize + j - 1) as f64 / j as f64;
            zpow *= inv;
        }
        let t = zpow * (binom * mj);
        s += t;
        // odd moments of symmetric pieces vanish, so test two terms at once
        if j > 8 && t.norm() + prev <= 1e-18 * s.norm() {
            break;
        }
        prev = t.norm();
    }
    s
}

fn piece_log(p: &Piece, w: Complex64) -> Complex64 {
    let c = 0.5 * (p.lo + p.hi);
    let h = 0.5 * (p.hi - p.lo);
    let z = w - c;
    if z.norm() >= 4.0 * h {
        let m = centred_moments(p, c, h, 160);
        let inv = 1.0 / z;
        let mut s = z.ln() * m[0];
        let mut zpow = Complex64::new(1.0, 0.0);
        let mut prev = f64::INFINITY;
        for (j, mj) in m.iter().enumerate().skip(1) {
            zpow *= inv;
            let t = zpow * (mj / j as f64);
            s -= t;
            if j > 8 && t.norm() + prev <= 1e-18 * s.norm() {
                break;
            }
            prev = t.norm();
        }
        return s;
    }
    let y1 = w - p.lo;
    let y2 = w - p.hi;
    let d: Vec<Complex64> = taylor_shift(&p.poly, w)
        .into_iter()
        .enumerate()
        .map(|(i, v)| if i % 2 == 1 { -v } else { v })
        .collect();
    let anti = |y: Complex64, i: usize| {
        let e = (i + 1) as f64;
        y.powi(i as i32 + 1) * (y.ln() / e - 1.0 / (e * e))
    };
    d.iter().enumerate().map(|(i, di)| di * (anti(y1, i) - anti(y2, i))).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_real, Tolerance};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn quad_moment(p: &Piece, w: Complex64, k: i32) -> Complex64 {
        let tol = Tolerance::new(1e-14, 1e-14);
        let re = integrate_real(|x| (p.density(x) * (w - x).powi(-k)).re, p.lo, p.hi, tol).unwrap();
        let im = integrate_real(|x| (p.density(x) * (w - x).powi(-k)).im, p.lo, p.hi, tol).unwrap();
        c(re, im)
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let p = Piece::new(-1.0, 1.0, vec![15.0 / 16.0, 0.0, -30.0 / 16.0, 0.0, 15.0 / 16.0]);
        for w in [c(0.3, 0.4), c(1.5, 0.0), c(-3.0, 1.0), c(9.0, -2.0), c(0.0, 0.05)] {
            for k in 1..=4 {
                let mut m = PiecewiseMeasure::new();
                m.add_piece(p.clone(), 1.0);
                let a = m.stieltjes(w, k);
                let b = quad_moment(&p, w, k as i32);
                assert!((a - b).norm() < 1e-11 * b.norm().max(1.0), "w={w} k={k}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn uniform_cauchy_transform() {
        let mut m = PiecewiseMeasure::new();
        m.add_piece(Piece::constant(-1.0, 1.0, 0.5), 1.0);
        let t: f64 = 2.0;
        let expect = 0.5 * ((t + 1.0) / (t - 1.0)).ln();
        assert!((m.stieltjes(c(t, 0.0), 1).re - expect).abs() < 1e-15);
        assert!((m.stieltjes(c(t, 0.0), 2).re - 1.0 / (t * t - 1.0)).abs() < 1e-15);
        // far field keeps relative accuracy
        let t: f64 = 1e6;
        let expect = 0.5 * (2.0 / (t - 1.0)).ln_1p();
        assert!((m.stieltjes(c(t, 0.0), 1).re / expect - 1.0).abs() < 1e-14);
        let d2 = m.stieltjes(c(t, 0.0), 2).re;
        assert!((d2 * (t * t - 1.0) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn log_potential_differentiates_to_moment() {
        let mut m = PiecewiseMeasure::new();
        m.add_piece(Piece::new(0.0, 2.0, vec![0.2, 0.1]), 1.0).add_atom(3.0, 0.5);
        for w in [c(1.0, 0.7), c(5.0, 0.1), c(-4.0, 2.0)] {
            let h = 1e-5;
            let num = (m.log_potential(w + h) - m.log_potential(w - h)) / (2.0 * h);
            assert!((num - m.stieltjes(w, 1)).norm() < 1e-8);
        }
    }

    #[test]
    fn normalization_cancels_overlaps() {
        let mut m = PiecewiseMeasure::new();
        m.add_piece(Piece::constant(0.0, 0.5, 1.0), 1.0)
            .add_piece(Piece::constant(1.0, 1.5, 1.0), 1.0)
            .add_piece(Piece::constant(0.2, 1.2, 1.0), -1.0);
        let n = m.normalized();
        let sup = n.support();
        assert_eq!(sup, vec![(0.0, 0.2), (0.5, 1.0), (1.2, 1.5)]);
        assert!((n.mass() - 0.0).abs() < 1e-15);
        // analytic across the cancelled window
        let v = n.stieltjes(c(0.3, 0.0), 3);
        assert!(v.re.is_finite() && v.im == 0.0);
    }
}
