//! The edge curve `t -> (chi_E(t), eta_E(t))` of the limit shape, its
//! finite-`n` counterpart, the case classification of the double root and
//! the liquid-region test.

mod cases;

pub use cases::{case_id, locate_lt, support_sets, LtKind, SupportSets};

use num_complex::Complex64;
use thiserror::Error;

use crate::measures::{classify_t, DiscreteMeasure, LimitMeasure, MeasureError, Region};
use crate::numerics::{count_roots, NumericsError, Piece, PiecewiseMeasure, Rect, Tolerance};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EdgeError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("C'(t) vanishes at t = {0}")]
    DegenerateEdge(f64),
    #[error("t = {0} lies on S1 u S2 u S3")]
    TOnSupport(f64),
    #[error("f''' vanishes at t = {0}: root of multiplicity three")]
    MultiplicityThree(f64),
    #[error("case {case} requires {point} off the support")]
    AssumptionViolated { case: u8, point: f64 },
    #[error("inconsistent classification: {0}")]
    Inconsistent(String),
    #[error("t = {t} is within eps = {eps} of its region boundary or of a particle")]
    EpsViolation { t: f64, eps: f64 },
}

/// `e^{C(t)}`, `e^{C(t)} - 1` and `C'(t)` at a real `t`, using the analytic
/// continuation of `C` across a full block when `t` is inside one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauchyExt {
    pub exp_c: f64,
    pub exp_c_m1: f64,
    pub dc: f64,
}

impl CauchyExt {
    /// `(chi, eta)` from the edge parametrisation.
    pub fn edge(&self, t: f64) -> (f64, f64) {
        let q = self.exp_c_m1 / (self.exp_c * self.dc);
        (t + q, 1.0 + self.exp_c_m1 * q)
    }
}

fn ext_outside(m: &PiecewiseMeasure, t: f64) -> CauchyExt {
    let w = Complex64::new(t, 0.0);
    let c = m.stieltjes(w, 1).re;
    CauchyExt { exp_c: c.exp(), exp_c_m1: c.exp_m1(), dc: -m.stieltjes(w, 2).re }
}

/// Continuation through the block `(t2, t1)` of unit density containing `t`:
/// `e^C = e^{C_I} (t - t2) / (t - t1)` and `C' = C_I' - 1/(t - t1) + 1/(t - t2)`.
fn ext_through_block(m: &PiecewiseMeasure, t: f64, t2: f64, t1: f64) -> CauchyExt {
    let mut rest = m.clone();
    rest.add_piece(Piece::constant(t2, t1, 1.0), -1.0);
    let rest = rest.normalized();
    let inner = ext_outside(&rest, t);
    let exp_c = inner.exp_c * (t - t2) / (t - t1);
    CauchyExt {
        exp_c,
        exp_c_m1: exp_c - 1.0,
        dc: inner.dc - 1.0 / (t - t1) + 1.0 / (t - t2),
    }
}

pub fn cauchy_ext(mu: &LimitMeasure, t: f64) -> Result<(Region, CauchyExt), EdgeError> {
    let region = classify_t(mu, t)?;
    let ext = match region {
        Region::LambdaMinusMu => {
            let (t2, t1) = mu
                .full_blocks()
                .into_iter()
                .find(|&(lo, hi)| lo < t && t < hi)
                .expect("classified inside a block");
            ext_through_block(mu.as_measure(), t, t2, t1)
        }
        _ => ext_outside(mu.as_measure(), t),
    };
    Ok((region, ext))
}

/// `mu - lambda|[chi + eta - 1, chi]` on a common partition; its Stieltjes
/// transform is `f'` for the point `(chi, eta)`.
pub fn saddle_measure(base: &PiecewiseMeasure, chi: f64, eta: f64) -> PiecewiseMeasure {
    let mut m = base.clone();
    m.add_piece(Piece::constant(chi + eta - 1.0, chi, 1.0), -1.0);
    m.normalized()
}

/// Relative size below which `f'''(t)` counts as zero.
pub const MULTIPLICITY_TOL: f64 = 1e-8;

/// A point of the edge curve with its local data.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgePoint {
    pub t: f64,
    pub chi: f64,
    pub eta: f64,
    pub region: Region,
    pub case_id: u8,
    pub beta: f64,
    pub exp_c: f64,
    pub dc: f64,
    /// `f'''(t)` for the limit function at `(chi, eta)`.
    pub f3: f64,
}

impl EdgePoint {
    /// Tangent direction `(1, e^C - 1)`.
    pub fn tangent(&self) -> (f64, f64) {
        (1.0, self.exp_c - 1.0)
    }

    /// Normal direction `(e^C - 1, -1)`.
    pub fn normal(&self) -> (f64, f64) {
        (self.exp_c - 1.0, -1.0)
    }
}

/// Edge point at parameter `t`, with case number and the scale
/// `beta = 2^{1/3} |f'''(t)|^{-1/3} |C'(t)|`.
pub fn edge_point(mu: &LimitMeasure, t: f64) -> Result<EdgePoint, EdgeError> {
    let (region, ext) = cauchy_ext(mu, t)?;
    if !(ext.dc.abs() > 1e-14) || !ext.dc.is_finite() {
        return Err(EdgeError::DegenerateEdge(t));
    }
    let (chi, eta) = ext.edge(t);
    let nu = saddle_measure(mu.as_measure(), chi, eta);
    let w = Complex64::new(t, 0.0);
    let f3 = nu.potential_derivative(w, 3).re;
    let f4 = nu.potential_derivative(w, 4).re;
    let sets = support_sets(mu, chi, eta);
    let dist = sets
        .s1
        .iter()
        .chain(&sets.s2)
        .chain(&sets.s3)
        .map(|&(lo, hi)| if t < lo { lo - t } else { t - hi })
        .fold(f64::INFINITY, f64::min);
    // |f'''| is compared with its local scale |f''''| d, which is homogeneous
    // in t; an additive constant would flag every far-out t.
    if f3.abs() < MULTIPLICITY_TOL * f4.abs() * dist {
        return Err(EdgeError::MultiplicityThree(t));
    }
    let case_id = case_id(mu, region, &sets, t, f3)?;
    let beta = 2f64.cbrt() * f3.abs().powf(-1.0 / 3.0) * ext.dc.abs();
    Ok(EdgePoint { t, chi, eta, region, case_id, beta, exp_c: ext.exp_c, dc: ext.dc, f3 })
}

/// Whether `f'_{(chi, eta)}` has a root in the upper half plane, counted by
/// the argument principle on `[a - 1, b + 1] x [h, 2 (b - a)]`. The bottom
/// edge starts at `h = 1e-6` and is raised if a root sits on it.
pub fn liquid_region_test(mu: &LimitMeasure, chi: f64, eta: f64) -> Result<bool, EdgeError> {
    let nu = saddle_measure(mu.as_measure(), chi, eta);
    let (a, b) = (mu.a(), mu.b());
    let mut last = None;
    for h in [1e-6, 1e-5, 1e-4, 1e-3, 1e-2] {
        let rect = Rect::new((a - 1.0, b + 1.0), (h, 2.0 * (b - a)));
        match count_roots(|w| nu.stieltjes(w, 1), rect, Tolerance::default().with_depth(48)) {
            Ok(k) => return Ok(k > 0),
            Err(e @ NumericsError::BoundaryZero(_)) => last = Some(e),
            Err(e) => return Err(e.into()),
        }
    }
    Err(last.expect("loop ran").into())
}

/// Finite-`n` edge point `(chi_n, eta_n)` from the measure `mu_n`, together
/// with the continued Cauchy data it was computed from.
pub fn edge_nonasymptotic(mu_n: &DiscreteMeasure, t: f64) -> Result<(f64, f64, CauchyExt), EdgeError> {
    let (region, lo, hi) = mu_n.limit.region_interval(t)?;
    let eps = mu_n.eps;
    if t - eps < lo || t + eps > hi {
        return Err(EdgeError::EpsViolation { t, eps });
    }
    let m = mu_n.as_measure();
    let ext = match region {
        Region::LambdaMinusMu => {
            let &(t2, t1) = mu_n
                .blocks
                .iter()
                .find(|&&(a, b)| a < t && t < b)
                .ok_or(EdgeError::EpsViolation { t, eps })?;
            ext_through_block(m, t, t2, t1)
        }
        _ => {
            if m.atoms().iter().any(|&(x, _)| (x - t).abs() < eps) {
                return Err(EdgeError::EpsViolation { t, eps });
            }
            ext_outside(m, t)
        }
    };
    if !(ext.dc.abs() > 1e-14) {
        return Err(EdgeError::DegenerateEdge(t));
    }
    let (chi, eta) = ext.edge(t);
    Ok((chi, eta, ext))
}
