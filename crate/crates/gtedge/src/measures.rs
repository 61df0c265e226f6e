//! Limit measures with piecewise-polynomial density, their discretisation to
//! top rows, and the finite-`n` measures built from a top row.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{bisect_real, Piece, PiecewiseMeasure};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("density {value} outside [0, 1] at x = {x}")]
    InvalidDensity { x: f64, value: f64 },
    #[error("total mass {0} differs from 1")]
    MassNotOne(f64),
    #[error("support [{a}, {b}] is not wider than 1")]
    SupportTooNarrow { a: f64, b: f64 },
    #[error("pieces overlap near x = {0}")]
    Overlap(f64),
    #[error("no pieces with positive density")]
    Empty,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("cannot read measure file: {0}")]
    Io(String),
    #[error("t = {0} is on the support of mu, or C(t) = 0")]
    Unclassifiable(f64),
    #[error("top row of length {0} is not strictly decreasing")]
    BadTopRow(usize),
}

/// The three regions of the real line on which the edge curve is defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// Outside `Supp(mu)` with `C(t) > 0`.
    MuPlus,
    /// Interior of a block where the density is identically 1.
    LambdaMinusMu,
    /// Outside `Supp(mu)` with `C(t) < 0`.
    MuMinus,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::MuPlus => "mu+",
            Region::LambdaMinusMu => "lambda-mu",
            Region::MuMinus => "mu-",
        })
    }
}

const DENSITY_SLACK: f64 = 1e-12;

/// Probability measure on `[a, b]` with density in `[0, 1]`, polynomial on
/// each piece.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitMeasure {
    pieces: Vec<Piece>,
    measure: PiecewiseMeasure,
}

impl LimitMeasure {
    pub fn new(mut pieces: Vec<Piece>) -> Result<Self, MeasureError> {
        pieces.retain(|p| p.poly.iter().any(|c| *c != 0.0));
        if pieces.is_empty() {
            return Err(MeasureError::Empty);
        }
        pieces.sort_by(|p, q| p.lo.total_cmp(&q.lo));
        for w in pieces.windows(2) {
            if w[1].lo < w[0].hi - 1e-14 {
                return Err(MeasureError::Overlap(w[1].lo));
            }
        }
        for p in &pieces {
            if !(p.hi > p.lo) || !p.lo.is_finite() || !p.hi.is_finite() {
                return Err(MeasureError::Overlap(p.lo));
            }
            for k in 0..=512 {
                let x = p.lo + (p.hi - p.lo) * k as f64 / 512.0;
                let v = p.density(x);
                if !(v >= -DENSITY_SLACK && v <= 1.0 + DENSITY_SLACK) {
                    return Err(MeasureError::InvalidDensity { x, value: v });
                }
            }
        }
        let mass: f64 = pieces.iter().map(Piece::mass).sum();
        if (mass - 1.0).abs() > 1e-9 {
            return Err(MeasureError::MassNotOne(mass));
        }
        let (a, b) = (pieces[0].lo, pieces[pieces.len() - 1].hi);
        if b - a <= 1.0 {
            return Err(MeasureError::SupportTooNarrow { a, b });
        }
        let mut measure = PiecewiseMeasure::new();
        for p in &pieces {
            measure.add_piece(p.clone(), 1.0);
        }
        Ok(LimitMeasure { pieces, measure })
    }

    /// `mu = c * Leb` restricted to `[lo, hi]` pieces, given as `(lo, hi, c)`.
    pub fn piecewise_constant(parts: &[(f64, f64, f64)]) -> Result<Self, MeasureError> {
        LimitMeasure::new(parts.iter().map(|&(lo, hi, c)| Piece::constant(lo, hi, c)).collect())
    }

    /// Parses the plain-text format: one piece per line, `lo hi c0 [c1 ...]`
    /// for the density `c0 + c1 x + ...`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, MeasureError> {
        let mut pieces = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nums: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse::<f64>).collect();
            let nums = nums.map_err(|e| MeasureError::Parse { line: i + 1, msg: e.to_string() })?;
            if nums.len() < 3 {
                return Err(MeasureError::Parse {
                    line: i + 1,
                    msg: "expected `lo hi c0 [c1 ...]`".into(),
                });
            }
            if !(nums[1] > nums[0]) {
                return Err(MeasureError::Parse { line: i + 1, msg: "need lo < hi".into() });
            }
            pieces.push(Piece::new(nums[0], nums[1], nums[2..].to_vec()));
        }
        LimitMeasure::new(pieces)
    }

    pub fn from_file(path: &Path) -> Result<Self, MeasureError> {
        let text = std::fs::read_to_string(path).map_err(|e| MeasureError::Io(e.to_string()))?;
        LimitMeasure::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for p in &self.pieces {
            s.push_str(&format!("{} {}", p.lo, p.hi));
            for c in &p.poly {
                s.push_str(&format!(" {c}"));
            }
            s.push('\n');
        }
        s
    }

    pub fn a(&self) -> f64 {
        self.pieces[0].lo
    }

    pub fn b(&self) -> f64 {
        self.pieces[self.pieces.len() - 1].hi
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn as_measure(&self) -> &PiecewiseMeasure {
        &self.measure
    }

    pub fn density(&self, x: f64) -> f64 {
        self.pieces
            .iter()
            .find(|p| p.lo <= x && x <= p.hi)
            .map(|p| p.density(x))
            .unwrap_or(0.0)
    }

    /// `mu[y, b]`.
    pub fn mass_above(&self, y: f64) -> f64 {
        self.pieces
            .iter()
            .map(|p| if y >= p.hi { 0.0 } else { p.mass() - p.mass_below(y) })
            .sum()
    }

    /// `Supp(mu)` as sorted closed intervals.
    pub fn support(&self) -> Vec<(f64, f64)> {
        self.measure.support()
    }

    /// Maximal intervals on which the density is identically 1.
    pub fn full_blocks(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for p in &self.pieces {
            let full = (p.poly[0] - 1.0).abs() <= 1e-14 && p.poly[1..].iter().all(|c| c.abs() <= 1e-14);
            if !full {
                continue;
            }
            match out.last_mut() {
                Some(last) if (p.lo - last.1).abs() <= 1e-14 => last.1 = p.hi,
                _ => out.push((p.lo, p.hi)),
            }
        }
        out
    }

    /// Cauchy transform `C(w) = int mu(dx) / (w - x)`.
    pub fn cauchy(&self, w: Complex64) -> Complex64 {
        self.measure.stieltjes(w, 1)
    }

    /// `C'(w)`.
    pub fn cauchy_derivative(&self, w: Complex64) -> Complex64 {
        -self.measure.stieltjes(w, 2)
    }

    fn on_support(&self, t: f64) -> bool {
        self.support().iter().any(|&(lo, hi)| t >= lo && t <= hi)
    }

    /// Connected component of the region containing `t`.
    pub fn region_interval(&self, t: f64) -> Result<(Region, f64, f64), MeasureError> {
        let region = classify_t(self, t)?;
        if region == Region::LambdaMinusMu {
            let (lo, hi) = self
                .full_blocks()
                .into_iter()
                .find(|&(lo, hi)| lo < t && t < hi)
                .expect("classified inside a full block");
            return Ok((region, lo, hi));
        }
        let sup = self.support();
        let left = sup.iter().filter(|iv| iv.1 < t).map(|iv| iv.1).fold(f64::NEG_INFINITY, f64::max);
        let right = sup.iter().filter(|iv| iv.0 > t).map(|iv| iv.0).fold(f64::INFINITY, f64::min);
        let c = |x: f64| self.cauchy(Complex64::new(x, 0.0)).re;
        // C decreases strictly on each gap, so it has at most one zero there.
        let zero = if left.is_finite() && right.is_finite() {
            let (l, r) = (left + 1e-12 * (right - left), right - 1e-12 * (right - left));
            if c(l) > 0.0 && c(r) < 0.0 {
                bisect_real(c, l, r, 1e-15).ok()
            } else {
                None
            }
        } else {
            None
        };
        Ok(match (region, zero) {
            (Region::MuPlus, Some(z)) => (region, left, z),
            (Region::MuMinus, Some(z)) => (region, z, right),
            _ => (region, left, right),
        })
    }

    /// Default non-asymptotic smoothing radius: half the distance from `t`
    /// to the boundary of its region, capped at 0.1.
    pub fn default_eps(&self, t: f64) -> Result<f64, MeasureError> {
        let (_, lo, hi) = self.region_interval(t)?;
        Ok((0.5 * (t - lo).min(hi - t)).min(0.1))
    }
}

/// Which of `R_mu^+`, `R_{lambda-mu}`, `R_mu^-` contains `t`.
pub fn classify_t(mu: &LimitMeasure, t: f64) -> Result<Region, MeasureError> {
    if mu.full_blocks().iter().any(|&(lo, hi)| lo < t && t < hi) {
        return Ok(Region::LambdaMinusMu);
    }
    if mu.on_support(t) {
        return Err(MeasureError::Unclassifiable(t));
    }
    let c = mu.cauchy(Complex64::new(t, 0.0)).re;
    if c > 1e-14 {
        Ok(Region::MuPlus)
    } else if c < -1e-14 {
        Ok(Region::MuMinus)
    } else {
        Err(MeasureError::Unclassifiable(t))
    }
}

/// Top row `x_1 > ... > x_n` approximating `mu`: `x_i` is the largest
/// integer `m` with `mu[m / n, b] >= (i - 1/2) / n`, then lowered where
/// needed to keep the row strictly decreasing.
pub fn discretize(mu: &LimitMeasure, n: usize) -> Vec<i64> {
    let nf = n as f64;
    let lo0 = (nf * mu.a()).floor() as i64 - 2;
    let hi0 = (nf * mu.b()).ceil() as i64 + 2;
    let tail = |m: i64| nf * mu.mass_above(m as f64 / nf);
    let mut x = Vec::with_capacity(n);
    for i in 1..=n {
        let q = i as f64 - 0.5 - 1e-9;
        let (mut lo, mut hi) = (lo0, hi0);
        // invariant: tail(lo) >= q, tail(hi) < q
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if tail(mid) >= q {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        x.push(lo);
    }
    for i in 1..n {
        if x[i] >= x[i - 1] {
            x[i] = x[i - 1] - 1;
        }
    }
    x
}

/// Finite-`n` measure built from a top row: point masses `1/n` at `x_i / n`
/// away from the shrunken full blocks, Lebesgue measure on the blocks.
#[derive(Debug, Clone)]
pub struct DiscreteMeasure {
    pub n: usize,
    pub eps: f64,
    pub x: Vec<i64>,
    pub blocks: Vec<(f64, f64)>,
    pub limit: LimitMeasure,
    measure: PiecewiseMeasure,
}

impl DiscreteMeasure {
    pub fn as_measure(&self) -> &PiecewiseMeasure {
        &self.measure
    }

    pub fn mass(&self) -> f64 {
        self.measure.mass()
    }

    pub fn cauchy(&self, w: Complex64) -> Complex64 {
        self.measure.stieltjes(w, 1)
    }
}

/// Builds the finite-`n` measure from a strictly decreasing top row.
pub fn make_mu_n(x: &[i64], mu: &LimitMeasure, eps: f64) -> Result<DiscreteMeasure, MeasureError> {
    let n = x.len();
    if n == 0 || x.windows(2).any(|w| w[0] <= w[1]) {
        return Err(MeasureError::BadTopRow(n));
    }
    let nf = n as f64;
    let blocks: Vec<(f64, f64)> = mu
        .full_blocks()
        .into_iter()
        .map(|(lo, hi)| (lo + eps, hi - eps))
        .filter(|(lo, hi)| hi > lo)
        .collect();
    let mut measure = PiecewiseMeasure::new();
    for &(lo, hi) in &blocks {
        measure.add_piece(Piece::constant(lo, hi, 1.0), 1.0);
    }
    for &xi in x {
        let p = xi as f64 / nf;
        if !blocks.iter().any(|&(lo, hi)| lo < p && p < hi) {
            measure.add_atom(p, 1.0 / nf);
        }
    }
    Ok(DiscreteMeasure { n, eps, x: x.to_vec(), blocks, limit: mu.clone(), measure })
}
