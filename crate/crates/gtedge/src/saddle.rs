//! Finite-`n` saddle point data at a typical edge parameter `t`: the
//! non-asymptotic edge point, the scaling constants `q_n, q_{1,n}, q_{2,n},
//! m_n, p_n`, lattice query points built from them, the discrete saddle
//! functions `f_n`, `f~_n` and their roots near `t`, and `exp(n F_n(t))`.

use num_complex::Complex64;
use thiserror::Error;

use crate::edge::{edge_nonasymptotic, edge_point, saddle_measure, EdgeError, EdgePoint};
use crate::measures::{make_mu_n, DiscreteMeasure, LimitMeasure, MeasureError, Region};
use crate::numerics::{count_roots_in_disc, refine_root, NumericsError, SignedLog, Tolerance};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SaddleError {
    #[error(transparent)]
    Edge(#[from] EdgeError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("f_(t,n)'''(t) = {0:e} is too small to scale by")]
    DegenerateThirdDerivative(f64),
    #[error("row {row} is outside 1..={max}")]
    OutOfLattice { row: i64, max: i64 },
    #[error("t = {0} coincides with a lattice point of the query")]
    PoleHit(f64),
    #[error("expected 2 roots in B(t, {xi}), found {count}")]
    WrongRootCount { count: usize, xi: f64 },
    #[error("root estimate {root} is outside B(t, {xi})")]
    RootEscaped { root: Complex64, xi: f64 },
    #[error("radius {xi} is too large: the limit f' has {count} roots in B(t, {xi}) instead of 2")]
    RadiusTooLarge { count: usize, xi: f64 },
}

/// Everything attached to one `(mu, x, t)`.
#[derive(Debug, Clone)]
pub struct ScalingContext {
    pub n: usize,
    pub t: f64,
    pub eps: f64,
    /// Default root-search radius `eps / 8`.
    pub xi: f64,
    pub limit: EdgePoint,
    pub mu_n: DiscreteMeasure,
    pub chi_n: f64,
    pub eta_n: f64,
    pub exp_cn: f64,
    pub exp_cn_m1: f64,
    pub dc_n: f64,
    pub f3_tn: f64,
    /// `f_{t,n}'(t)` and `f_{t,n}''(t)`; both vanish up to rounding.
    pub residual: (f64, f64),
    pub q_n: f64,
    pub q1_n: f64,
    pub q2_n: f64,
    pub m_n: f64,
    pub p_n: f64,
}

impl ScalingContext {
    /// Builds the context with the default `eps` of the limit measure.
    pub fn build(mu: &LimitMeasure, x: &[i64], t: f64) -> Result<Self, SaddleError> {
        let eps = mu.default_eps(t)?;
        Self::build_with_eps(mu, x, t, eps)
    }

    pub fn build_with_eps(mu: &LimitMeasure, x: &[i64], t: f64, eps: f64) -> Result<Self, SaddleError> {
        let limit = edge_point(mu, t)?;
        let mu_n = make_mu_n(x, mu, eps)?;
        let (chi_n, eta_n, ext) = edge_nonasymptotic(&mu_n, t)?;
        // f_{t,n}' is the Stieltjes transform of mu_n - lambda|[chi_n + eta_n - 1, chi_n];
        // on a full block the unit densities cancel around t.
        let nu = saddle_measure(mu_n.as_measure(), chi_n, eta_n);
        let w = Complex64::new(t, 0.0);
        let f1 = nu.potential_derivative(w, 1).re;
        let f2 = nu.potential_derivative(w, 2).re;
        let f3 = nu.potential_derivative(w, 3).re;
        if !(f3.abs() >= 1e-12) {
            return Err(SaddleError::DegenerateThirdDerivative(f3));
        }
        let q_n = (2.0 / f3).cbrt();
        let q1_n = 1.0 / q_n;
        let q2_n = 2.0 / (q_n * q_n);
        let d = t - chi_n;
        let e = ext.exp_c;
        let em1 = ext.exp_c_m1;
        let p_n = -q1_n * d * e / (em1 * em1 + 1.0);
        let m_n = q2_n * d * d * e / em1;
        Ok(ScalingContext {
            n: x.len(),
            t,
            eps,
            xi: eps / 8.0,
            limit,
            mu_n,
            chi_n,
            eta_n,
            exp_cn: e,
            exp_cn_m1: em1,
            dc_n: ext.dc,
            f3_tn: f3,
            residual: (f1, f2),
            q_n,
            q1_n,
            q2_n,
            m_n,
            p_n,
        })
    }

    pub fn region(&self) -> Region {
        self.limit.region
    }

    pub fn beta(&self) -> f64 {
        self.limit.beta
    }

    pub fn x(&self) -> &[i64] {
        &self.mu_n.x
    }

    /// Real-valued lattice point `n (chi_n, eta_n) + n^{2/3} m_n x_n u + n^{1/3} p_n y_n r`.
    pub fn continuum_point(&self, u: f64, r: f64) -> (f64, f64) {
        let nf = self.n as f64;
        let (a, b) = (nf.powf(2.0 / 3.0) * self.m_n, nf.powf(1.0 / 3.0) * self.p_n);
        let g = self.exp_cn_m1;
        (nf * self.chi_n + a * u + b * g * r, nf * self.eta_n + a * g * u - b * r)
    }

    /// Inverse of [`continuum_point`](Self::continuum_point).
    pub fn continuum_coords(&self, pos: f64, row: f64) -> (f64, f64) {
        let nf = self.n as f64;
        let (a, b) = (nf.powf(2.0 / 3.0) * self.m_n, nf.powf(1.0 / 3.0) * self.p_n);
        let g = self.exp_cn_m1;
        let (dx, dy) = (pos - nf * self.chi_n, row - nf * self.eta_n);
        // [a, b g; a g, -b] (u, r) = (dx, dy)
        let det = -a * b * (1.0 + g * g);
        ((-b * dx - b * g * dy) / det, (a * dy - a * g * dx) / det)
    }

    /// Lattice point for `(u, r)`, rounded half up and pushed into the
    /// kernel domain `u_n >= x_n + n - r_n`.
    pub fn lattice_point(&self, u: f64, r: f64) -> Result<(i64, i64), SaddleError> {
        let (pu, pr) = self.continuum_point(u, r);
        let round = |v: f64| (v + 0.5).floor() as i64;
        let (mut un, rn) = (round(pu), round(pr));
        let n = self.n as i64;
        if rn < 1 || rn > n - 1 {
            return Err(SaddleError::OutOfLattice { row: rn, max: n - 1 });
        }
        let floor = self.x()[self.n - 1] + n - rn;
        if un < floor {
            un = floor;
        }
        Ok((un, rn))
    }

    pub fn query(&self, u: f64, r: f64, v: f64, s: f64) -> Result<QueryPair, SaddleError> {
        let (un, rn) = self.lattice_point(u, r)?;
        let (vn, sn) = self.lattice_point(v, s)?;
        let (ru, rr) = self.continuum_coords(un as f64, rn as f64);
        let (rv, rs) = self.continuum_coords(vn as f64, sn as f64);
        Ok(QueryPair { nominal: [u, r, v, s], realized: [ru, rr, rv, rs], un, rn, vn, sn })
    }

    /// `f_n` for the query side `(v_n, s_n)`: points `x_i / n` against
    /// `{v + s - n, ..., v} / n`.
    pub fn f_n(&self, v: i64, s: i64) -> SaddleFunction {
        let n = self.n as i64;
        SaddleFunction::new(self.x(), v + s - n, v)
    }

    /// `f~_n` for the query side `(u_n, r_n)`: lattice set `{u + r - n + 1, ..., u - 1} / n`.
    pub fn f_tilde_n(&self, u: i64, r: i64) -> SaddleFunction {
        let n = self.n as i64;
        SaddleFunction::new(self.x(), u + r - n + 1, u - 1)
    }

    /// Whether the limit `f'` has exactly its double root `t` in `B(t, xi)`.
    pub fn check_radius(&self, mu: &LimitMeasure, xi: f64) -> Result<(), SaddleError> {
        let nu = saddle_measure(mu.as_measure(), self.limit.chi, self.limit.eta);
        let t = Complex64::new(self.t, 0.0);
        let count = count_roots_in_disc(|w| nu.stieltjes(w, 1), t, xi, Tolerance::default())?;
        if count == 2 {
            Ok(())
        } else {
            Err(SaddleError::RadiusTooLarge { count, xi })
        }
    }
}

/// A lattice query `((u_n, r_n), (v_n, s_n))` with the continuum parameters
/// it was built from and the ones it actually realizes after rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryPair {
    pub nominal: [f64; 4],
    pub realized: [f64; 4],
    pub un: i64,
    pub rn: i64,
    pub vn: i64,
    pub sn: i64,
}

impl QueryPair {
    pub fn swapped(&self) -> QueryPair {
        let [u, r, v, s] = self.nominal;
        let [ru, rr, rv, rs] = self.realized;
        QueryPair {
            nominal: [v, s, u, r],
            realized: [rv, rs, ru, rr],
            un: self.vn,
            rn: self.sn,
            vn: self.un,
            sn: self.rn,
        }
    }
}

/// `(1/n) sum_{P \ L} log(w - x) - (1/n) sum_{L \ P} log(w - x)` where `P` is
/// the top row and `L` a block of consecutive integers, all divided by `n`.
#[derive(Debug, Clone)]
pub struct SaddleFunction {
    n: usize,
    plus: Vec<f64>,
    minus: Vec<f64>,
}

impl SaddleFunction {
    fn new(x: &[i64], lo: i64, hi: i64) -> Self {
        let nf = x.len() as f64;
        let in_block = |j: i64| lo <= j && j <= hi;
        let plus = x.iter().filter(|&&xi| !in_block(xi)).map(|&xi| xi as f64 / nf).collect();
        let minus = (lo..=hi)
            .filter(|j| x.binary_search_by(|xi| j.cmp(xi)).is_err())
            .map(|j| j as f64 / nf)
            .collect();
        SaddleFunction { n: x.len(), plus, minus }
    }

    /// Points with weight `+1/n` and `-1/n`.
    pub fn points(&self) -> (&[f64], &[f64]) {
        (&self.plus, &self.minus)
    }

    /// The `k`-th derivative at `w`. For `k = 0` the imaginary part is the
    /// sum of principal arguments, taken from the upper half plane on the
    /// real axis.
    pub fn eval(&self, w: Complex64, k: u32) -> Result<Complex64, SaddleError> {
        let scale = 1.0 / self.n as f64;
        if k == 0 {
            let term = |x: f64| {
                let d = w - x;
                let arg = if d.im == 0.0 && d.re < 0.0 { std::f64::consts::PI } else { d.arg() };
                Complex64::new(d.norm().ln(), arg)
            };
            if self.plus.iter().chain(&self.minus).any(|&x| w == Complex64::new(x, 0.0)) {
                return Err(SaddleError::PoleHit(w.re));
            }
            let s: Complex64 = self.plus.iter().map(|&x| term(x)).sum::<Complex64>()
                - self.minus.iter().map(|&x| term(x)).sum::<Complex64>();
            return Ok(s * scale);
        }
        let kk = k as i32;
        let mut s = Complex64::new(0.0, 0.0);
        for (pts, sign) in [(&self.plus, 1.0), (&self.minus, -1.0)] {
            for &x in pts.iter() {
                let d = w - x;
                if d.norm() == 0.0 {
                    return Err(SaddleError::PoleHit(x));
                }
                s += sign * d.powi(-kk);
            }
        }
        let fact: f64 = (1..k).map(|i| i as f64).product();
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        Ok(s * (sign * fact * scale))
    }
}

/// How the two roots of `f_n'` near `t` are arranged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootShape {
    DistinctReal,
    DoubleReal,
    ConjugatePair,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootPair {
    pub roots: [Complex64; 2],
    pub shape: RootShape,
}

/// `(1 / 2 pi i) \oint (w - t)^k g''(w) / g'(w) dw` over `|w - t| = xi` for
/// `k = 1, 2`: the power sums of the roots of `g'` inside, shifted by `t`.
/// The integrand is smooth and periodic on the circle, so the trapezoid rule
/// converges geometrically; the node count doubles until two passes agree.
fn disc_moments(g: &SaddleFunction, t: Complex64, xi: f64) -> Result<[Complex64; 2], SaddleError> {
    let pass = |m: usize| -> Result<[Complex64; 2], SaddleError> {
        let mut acc = [Complex64::new(0.0, 0.0); 2];
        for j in 0..m {
            let z = Complex64::from_polar(xi, 2.0 * std::f64::consts::PI * j as f64 / m as f64);
            let w = t + z;
            // dw / (2 pi i) = z d(theta) / (2 pi)
            let h = g.eval(w, 2)? / g.eval(w, 1)? * z / m as f64;
            acc[0] += h * z;
            acc[1] += h * z * z;
        }
        Ok(acc)
    };
    let mut m = 128;
    let mut prev = pass(m)?;
    while m < 1 << 16 {
        m *= 2;
        let next = pass(m)?;
        let diff = (next[0] - prev[0]).norm() / xi + (next[1] - prev[1]).norm() / (xi * xi);
        prev = next;
        if diff < 1e-12 {
            return Ok(prev);
        }
    }
    Err(SaddleError::Numerics(NumericsError::DepthExceeded(16)))
}

/// The two roots of `g'` in `B(t, xi)`: the argument principle confirms the
/// count, the contour power sums give the pair as the roots of a quadratic,
/// and Newton polishes each.
pub fn saddle_roots(ctx: &ScalingContext, g: &SaddleFunction, xi: f64) -> Result<RootPair, SaddleError> {
    let t = Complex64::new(ctx.t, 0.0);
    let d1 = |w: Complex64| g.eval(w, 1).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
    let d2 = |w: Complex64| g.eval(w, 2).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
    let count = count_roots_in_disc(d1, t, xi, Tolerance::default())?;
    if count != 2 {
        return Err(SaddleError::WrongRootCount { count, xi });
    }
    let [p1, p2] = disc_moments(g, t, xi)?;
    // z^2 - p1 z + (p1^2 - p2) / 2 = 0
    let disc = (2.0 * p2 - p1 * p1).sqrt();
    let estimates = [t + (p1 + disc) * 0.5, t + (p1 - disc) * 0.5];
    let tol = Tolerance::new(1e-15, 1e-14);
    let polish = |z0: Complex64| match refine_root(d1, d2, z0, tol) {
        Ok(z) if (z - z0).norm() < 1e-3 * xi => z,
        _ => z0,
    };
    let (r1, r2) = (polish(estimates[0]), polish(estimates[1]));
    for r in [r1, r2] {
        if (r - t).norm() >= xi {
            return Err(SaddleError::RootEscaped { root: r, xi });
        }
    }
    let scale = xi.max(1e-300);
    let shape = if r1.im.abs() > 1e-10 * scale || r2.im.abs() > 1e-10 * scale {
        RootShape::ConjugatePair
    } else if (r1 - r2).norm() <= 1e-7 * scale {
        RootShape::DoubleReal
    } else {
        RootShape::DistinctReal
    };
    let fix = |z: Complex64| if shape == RootShape::ConjugatePair { z } else { Complex64::new(z.re, 0.0) };
    Ok(RootPair { roots: [fix(r1), fix(r2)], shape })
}

/// `exp(n F_n(t)) = prod_{U \ V} (t - j/n) / prod_{V \ U} (t - j/n)` with
/// `U = {u + r - n + 1, ..., u - 1}` and `V = {v + s - n, ..., v}`.
pub fn exact_exp_nfn(ctx: &ScalingContext, qp: &QueryPair) -> Result<SignedLog, SaddleError> {
    let n = ctx.n as i64;
    let nf = ctx.n as f64;
    let (ulo, uhi) = (qp.un + qp.rn - n + 1, qp.un - 1);
    let (vlo, vhi) = (qp.vn + qp.sn - n, qp.vn);
    let mut acc = SignedLog::ONE;
    let lo = ulo.min(vlo);
    let hi = uhi.max(vhi);
    for j in lo..=hi {
        let in_u = ulo <= j && j <= uhi;
        let in_v = vlo <= j && j <= vhi;
        if in_u == in_v {
            continue;
        }
        let d = ctx.t - j as f64 / nf;
        if d == 0.0 {
            return Err(SaddleError::PoleHit(ctx.t));
        }
        let f = SignedLog::from_f64(d);
        acc = if in_u { acc * f } else { acc / f };
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::discretize;

    fn half_uniform() -> LimitMeasure {
        LimitMeasure::piecewise_constant(&[(-1.0, 1.0, 0.5)]).unwrap()
    }

    #[test]
    fn defining_identities_hold() {
        let mu = half_uniform();
        let ctx = ScalingContext::build(&mu, &discretize(&mu, 500), 2.0).unwrap();
        assert!((ctx.q_n.powi(3) * ctx.f3_tn / 6.0 - 1.0 / 3.0).abs() < 1e-14);
        assert!((ctx.q_n * ctx.q1_n - 1.0).abs() < 1e-15);
        assert!((0.5 * ctx.q_n * ctx.q_n * ctx.q2_n - 1.0).abs() < 1e-15);
        assert!(ctx.residual.0.abs() < 1e-9 && ctx.residual.1.abs() < 1e-9);
        assert!(ctx.m_n * ctx.exp_cn_m1 / ctx.exp_cn > 0.0);
        // q1 = -p ((e^C - 1)^2 + 1) / ((t - chi) e^C) and q2 = m (e^C - 1) / ((t - chi)^2 e^C)
        let d = ctx.t - ctx.chi_n;
        let q1 = -ctx.p_n * (ctx.exp_cn_m1.powi(2) + 1.0) / (d * ctx.exp_cn);
        let q2 = ctx.m_n * ctx.exp_cn_m1 / (d * d * ctx.exp_cn);
        assert!((q1 - ctx.q1_n).abs() < 1e-13 && (q2 - ctx.q2_n).abs() < 1e-13);
    }

    #[test]
    fn third_derivative_converges() {
        let mu = half_uniform();
        let target = edge_point(&mu, 2.0).unwrap().f3;
        let err: Vec<f64> = [250, 500, 1000, 2000]
            .iter()
            .map(|&n| (ScalingContext::build(&mu, &discretize(&mu, n), 2.0).unwrap().f3_tn - target).abs())
            .collect();
        assert!(err.windows(2).all(|w| w[1] < w[0]), "{err:?}");
    }

    #[test]
    fn zero_fluctuation_sits_on_the_edge() {
        let mu = half_uniform();
        let ctx = ScalingContext::build(&mu, &discretize(&mu, 1000), 2.0).unwrap();
        let q = ctx.query(0.0, 0.0, 0.0, 0.0).unwrap();
        let round = |v: f64| (v + 0.5).floor() as i64;
        assert_eq!((q.un, q.rn), (round(1000.0 * ctx.chi_n), round(1000.0 * ctx.eta_n)));
        assert_eq!((q.un, q.rn), (q.vn, q.sn));
        let q = ctx.query(0.3, 0.1, -0.2, 0.4).unwrap();
        let (pu, pr) = ctx.continuum_point(0.3, 0.1);
        assert!((q.un as f64 - pu).abs() <= 1.0 && (q.rn as f64 - pr).abs() <= 1.0);
        let (ru, rr) = ctx.continuum_coords(pu, pr);
        assert!((ru - 0.3).abs() < 1e-12 && (rr - 0.1).abs() < 1e-12);
    }

    #[test]
    fn exp_nfn_on_the_diagonal() {
        let mu = half_uniform();
        let ctx = ScalingContext::build(&mu, &discretize(&mu, 400), 2.0).unwrap();
        let q = ctx.query(0.0, 0.0, 0.0, 0.0).unwrap();
        // V has the two extra points u_n and u_n + r_n - n
        let nf = 400.0;
        let expect = 1.0 / ((2.0 - q.un as f64 / nf) * (2.0 - (q.un + q.rn - 400) as f64 / nf));
        assert!((exact_exp_nfn(&ctx, &q).unwrap().to_f64() - expect).abs() < 1e-14);
        let q = ctx.query(0.5, -0.5, -0.5, 0.5).unwrap();
        let a = exact_exp_nfn(&ctx, &q).unwrap();
        let b = exact_exp_nfn(&ctx, &q.swapped()).unwrap();
        // the two products telescope to the four end points
        let ends = (2.0 - q.un as f64 / nf)
            * (2.0 - (q.un + q.rn - 400) as f64 / nf)
            * (2.0 - q.vn as f64 / nf)
            * (2.0 - (q.vn + q.sn - 400) as f64 / nf);
        assert!(((a * b).to_f64() * ends - 1.0).abs() < 1e-12);
    }

    #[test]
    fn saddle_function_matches_point_sums() {
        let x = [5i64, 3, 2, -1];
        let g = SaddleFunction::new(&x, 1, 3);
        let (p, m) = g.points();
        assert_eq!(p, &[1.25, -0.25]);
        assert_eq!(m, &[0.25]);
        let w = Complex64::new(0.3, 0.7);
        let direct = |k: i32| {
            [5.0, 3.0, 2.0, -1.0].iter().map(|&x: &f64| (w - x / 4.0).powi(-k)).sum::<Complex64>()
                - [1.0, 2.0, 3.0].iter().map(|&x: &f64| (w - x / 4.0).powi(-k)).sum::<Complex64>()
        };
        assert!((g.eval(w, 1).unwrap() - direct(1) / 4.0).norm() < 1e-15);
        assert!((g.eval(w, 3).unwrap() - direct(3) * 0.5).norm() < 1e-14);
    }

    #[test]
    fn roots_near_t_scale_like_n_to_minus_one_third() {
        let mu = half_uniform();
        let mut prev = None;
        for n in [250usize, 1000] {
            let ctx = ScalingContext::build(&mu, &discretize(&mu, n), 2.0).unwrap();
            let xi = 0.75;
            ctx.check_radius(&mu, xi).unwrap();
            let q = ctx.query(0.0, 0.0, 0.25, -0.25).unwrap();
            let g = ctx.f_n(q.vn, q.sn);
            let pair = saddle_roots(&ctx, &g, xi).unwrap();
            assert_eq!(pair.shape, RootShape::DistinctReal);
            for r in pair.roots {
                let scaled = (r - ctx.t).norm() * (n as f64).cbrt();
                assert!(scaled < 2.0 * ctx.q_n * 1.5, "{scaled}");
            }
            if let Some(p) = prev {
                assert!((pair.roots[0] - ctx.t).norm() < p);
            }
            prev = Some((pair.roots[0] - ctx.t).norm());
        }
    }
}
