//! The extended Airy kernel by direct quadrature of its double contour
//! integral, and a classical oracle `int_0^inf Ai(x + l) Ai(y + l) dl`.
//!
//! The two contours touch at the origin. Moving the vertex of `l` to `+D`
//! and that of `L` to `-D` crosses no singularity and keeps `|w - z| >= 2D`,
//! so a fixed composite Gauss-Legendre rule on each contour is enough; the
//! double sum separates into one exponential per node.

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{gauss_legendre, integrate_path, integrate_real, NumericsError, Tolerance};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AiryError {
    #[error("quadrature error estimate {estimate:e} exceeds tolerance {tol:e}")]
    TolNotMet { estimate: f64, tol: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryQuery {
    pub u: f64,
    pub r: f64,
    pub v: f64,
    pub s: f64,
    pub tol: f64,
}

impl AiryQuery {
    pub fn new(u: f64, r: f64, v: f64, s: f64) -> Self {
        AiryQuery { u, r, v, s, tol: 1e-10 }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// Raw output of the contour quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryValue {
    pub value: f64,
    /// Imaginary part of the raw double integral; zero up to quadrature error.
    pub imag: f64,
    pub error: f64,
    pub radius: f64,
}

/// Vertex offset of the two contours.
const OFFSET: f64 = 0.5;
const NODES: usize = 20;
const MAX_REFINE: u32 = 6;

/// Truncation radius: the cubic term has to beat `tol` against the linear and
/// quadratic growth of the exponent.
pub fn truncation_radius(q: &AiryQuery) -> f64 {
    let lt = q.tol.max(1e-300).ln().abs();
    let step = |r0: f64| (3.0 * (lt + (q.r.abs() + q.s.abs()) * r0 + (q.u.abs() + q.v.abs()) * r0 * r0)).cbrt() + 2.0;
    step(step(1.0))
}

/// Nodes and weights of a composite rule along a polygon, `h` the panel length.
fn path_rule(path: &[Complex64], h: f64) -> Vec<(Complex64, Complex64)> {
    let (x, w) = gauss_legendre(NODES);
    let mut out = Vec::new();
    for seg in path.windows(2) {
        let len = (seg[1] - seg[0]).norm();
        let panels = (len / h).ceil().max(1.0) as usize;
        let step = (seg[1] - seg[0]) / panels as f64;
        for p in 0..panels {
            let a = seg[0] + step * p as f64;
            let mid = a + step * 0.5;
            for (xi, wi) in x.iter().zip(&w) {
                out.push((mid + step * (0.5 * xi), step * (0.5 * wi)));
            }
        }
    }
    out
}

fn double_sum(q: &AiryQuery, radius: f64, h: f64) -> Complex64 {
    let ray = |vertex: f64, angle: f64| {
        let e = Complex64::from_polar(radius, angle);
        [Complex64::new(vertex, 0.0) + e.conj(), Complex64::new(vertex, 0.0), Complex64::new(vertex, 0.0) + e]
    };
    let third = std::f64::consts::FRAC_PI_3;
    let wl = path_rule(&ray(OFFSET, third), h);
    let zl = path_rule(&ray(-OFFSET, 2.0 * third), h);
    let gw: Vec<(Complex64, Complex64)> = wl
        .iter()
        .map(|&(w, dw)| (w, dw * (w * q.r + w * w * q.u + w * w * w / 3.0).exp()))
        .collect();
    let gz: Vec<(Complex64, Complex64)> = zl
        .iter()
        .map(|&(z, dz)| (z, dz * (-(z * q.s + z * z * q.v + z * z * z / 3.0)).exp()))
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    for &(w, a) in &gw {
        let mut inner = Complex64::new(0.0, 0.0);
        for &(z, b) in &gz {
            inner += b / (w - z);
        }
        total += a * inner;
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    total / (two_pi_i * two_pi_i)
}

/// `K~_Ai((u, r), (v, s))` with its quadrature diagnostics. The panel
/// length is halved until two successive sums agree to `tol`.
pub fn airy_tilde_detail(q: &AiryQuery) -> Result<AiryValue, AiryError> {
    let radius = truncation_radius(q);
    let mut h = 0.5;
    let mut prev = double_sum(q, radius, h);
    for _ in 0..MAX_REFINE {
        h /= 2.0;
        let next = double_sum(q, radius, h);
        let err = (next - prev).norm();
        if err <= q.tol {
            return Ok(AiryValue { value: next.re, imag: next.im, error: err, radius });
        }
        prev = next;
    }
    let err = (double_sum(q, radius, h / 2.0) - prev).norm();
    Err(AiryError::TolNotMet { estimate: err, tol: q.tol })
}

pub fn airy_tilde(q: &AiryQuery) -> Result<f64, AiryError> {
    airy_tilde_detail(q).map(|v| v.value)
}

/// The Gaussian term `Phi((u, r), (v, s))`, the heat kernel in `s - r` at
/// time `u - v`.
pub fn gaussian_phi(u: f64, r: f64, v: f64, s: f64) -> f64 {
    if u <= v {
        return 0.0;
    }
    let d = u - v;
    (-(s - r).powi(2) / (4.0 * d)).exp() / (2.0 * (std::f64::consts::PI * d).sqrt())
}

/// `K_Ai = K~_Ai - Phi`.
pub fn airy_extended(q: &AiryQuery) -> Result<f64, AiryError> {
    Ok(airy_tilde(q)? - gaussian_phi(q.u, q.r, q.v, q.s))
}

const AI0: f64 = 0.355_028_053_887_817_24;
const AIP0: f64 = 0.258_819_403_792_806_8;

/// `Ai(x)`: Maclaurin series up to `x = 1`, steepest-descent integral
/// through the saddle `sqrt(x)` beyond.
pub fn ai(x: f64) -> f64 {
    if x <= 1.0 {
        let x3 = x * x * x;
        let (mut f, mut tf) = (1.0, 1.0);
        let (mut g, mut tg) = (x, x);
        for k in 0..200 {
            let k = k as f64;
            tf *= x3 / ((3.0 * k + 2.0) * (3.0 * k + 3.0));
            tg *= x3 / ((3.0 * k + 3.0) * (3.0 * k + 4.0));
            f += tf;
            g += tg;
            if tf.abs() + tg.abs() < 1e-18 * (f.abs() + g.abs()) {
                break;
            }
        }
        return AI0 * f - AIP0 * g;
    }
    let sx = x.sqrt();
    let rot = Complex64::from_polar(1.0, 2.0 * std::f64::consts::FRAC_PI_3);
    let path = [Complex64::new(0.0, 0.0), Complex64::new(7.0, 0.0)];
    let tol = Tolerance::new(1e-16, 1e-14);
    let integral = integrate_path(|z| (rot * z * z * sx - z * z * z / 3.0).exp(), &path, tol)
        .expect("Airy saddle integrand is smooth");
    let zeta = 2.0 / 3.0 * x * sx;
    (-zeta).exp() / std::f64::consts::PI * (Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3) * integral).im
}

/// `int_0^inf Ai(xx + l) Ai(yy + l) dl`, the classical Airy kernel.
pub fn airy_classical_oracle(xx: f64, yy: f64) -> Result<f64, AiryError> {
    // Ai(14) is below 1e-16, so the tail beyond is negligible.
    let end = (14.0 - xx.min(yy)).max(1.0);
    let tol = Tolerance::new(1e-14, 1e-12);
    let mut total = 0.0;
    let mut a = 0.0;
    while a < end {
        let b = (a + 2.0).min(end);
        total += integrate_real(|l| ai(xx + l) * ai(yy + l), a, b, tol)?;
        a = b;
    }
    Ok(total)
}

/// Signs relating the contour convention to the classical argument:
/// `K~_Ai((0, r), (0, s)) = sign * oracle(sign_r * r, sign_s * s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Calibration {
    pub sign_r: i8,
    pub sign_s: i8,
    pub sign: i8,
}

/// The result of [`calibrate`], fixed once.
pub const CALIBRATION: Calibration = Calibration { sign_r: -1, sign_s: -1, sign: 1 };

impl Calibration {
    pub fn oracle(&self, r: f64, s: f64) -> Result<f64, AiryError> {
        Ok(self.sign as f64 * airy_classical_oracle(self.sign_r as f64 * r, self.sign_s as f64 * s)?)
    }
}

/// Picks the sign pattern that best matches the `u = v = 0` slice on a
/// small asymmetric grid. Returns the choice and its worst discrepancy.
pub fn calibrate() -> Result<(Calibration, f64), AiryError> {
    let grid = [(-1.0, 0.5), (0.7, -0.3), (1.5, 1.0), (0.0, -2.0)];
    let contour: Vec<f64> = grid
        .iter()
        .map(|&(r, s)| airy_tilde(&AiryQuery::new(0.0, r, 0.0, s)))
        .collect::<Result<_, _>>()?;
    let mut best: Option<(Calibration, f64)> = None;
    for sign_r in [-1i8, 1] {
        for sign_s in [-1i8, 1] {
            for sign in [-1i8, 1] {
                let c = Calibration { sign_r, sign_s, sign };
                let mut worst = 0.0f64;
                for (&(r, s), &k) in grid.iter().zip(&contour) {
                    worst = worst.max((c.oracle(r, s)? - k).abs());
                }
                if best.is_none_or(|(_, w)| worst < w) {
                    best = Some((c, worst));
                }
            }
        }
    }
    Ok(best.expect("non-empty lattice"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ai_reference_values() {
        // Ai(0), Ai(1), Ai(2), Ai(-2), Ai(5)
        assert!((ai(0.0) - 0.355_028_053_887_817_2).abs() < 1e-15);
        assert!((ai(1.0) - 0.135_292_416_312_881_4).abs() < 1e-14);
        assert!((ai(2.0) - 0.034_924_130_423_274_4).abs() < 1e-14);
        assert!((ai(-2.0) - 0.227_407_428_201_686_1).abs() < 1e-14);
        assert!((ai(5.0) - 1.083_444_281_360_744e-4).abs() < 1e-17);
        // both branches agree at the switch
        assert!((ai(1.0 - 1e-12) - ai(1.0 + 1e-12)).abs() < 1e-12);
    }

    #[test]
    fn oracle_diagonal_at_zero() {
        let v = airy_classical_oracle(0.0, 0.0).unwrap();
        assert!((v - AIP0 * AIP0).abs() < 1e-11, "{v}");
        let a = airy_classical_oracle(0.3, -1.1).unwrap();
        let b = airy_classical_oracle(-1.1, 0.3).unwrap();
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn calibration_is_stable() {
        let (c, worst) = calibrate().unwrap();
        assert_eq!(c, CALIBRATION);
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn phi_values() {
        assert_eq!(gaussian_phi(0.0, 1.0, 0.0, 2.0), 0.0);
        assert_eq!(gaussian_phi(-1.0, 1.0, 0.0, 2.0), 0.0);
        assert!((gaussian_phi(1.0, 0.3, 0.0, 0.3) - 0.282_094_791_773_878_1).abs() < 1e-15);
        let mass = integrate_real(|s| gaussian_phi(2.0, 0.4, 0.5, s), -40.0, 40.0, Tolerance::default()).unwrap();
        assert!((mass - 1.0).abs() < 1e-10);
    }

    #[test]
    fn contour_is_real_and_stable() {
        let q = AiryQuery::new(0.4, -0.3, -0.2, 0.6);
        let v = airy_tilde_detail(&q).unwrap();
        assert!(v.imag.abs() <= 10.0 * q.tol);
        let wider = double_sum(&q, 2.0 * v.radius, 0.0625);
        assert!((wider.re - v.value).abs() <= v.error.max(q.tol));
        assert_eq!(airy_extended(&AiryQuery::new(0.5, 0.1, 0.5, 0.2)).unwrap(), airy_tilde(&AiryQuery::new(0.5, 0.1, 0.5, 0.2)).unwrap());
    }
}
