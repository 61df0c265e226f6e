use std::f64::consts::PI;

use num_complex::Complex64;

use super::{NumericsError, Tolerance};

/// Closed axis-parallel rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Rect {
    pub fn new(re: (f64, f64), im: (f64, f64)) -> Self {
        Rect { re, im }
    }

    fn point(&self, s: f64) -> Complex64 {
        let (x0, x1) = self.re;
        let (y0, y1) = self.im;
        let (w, h) = (x1 - x0, y1 - y0);
        let per = 2.0 * (w + h);
        let d = s.rem_euclid(1.0) * per;
        if d < w {
            Complex64::new(x0 + d, y0)
        } else if d < w + h {
            Complex64::new(x1, y0 + (d - w))
        } else if d < 2.0 * w + h {
            Complex64::new(x1 - (d - w - h), y1)
        } else {
            Complex64::new(x0, y1 - (d - 2.0 * w - h))
        }
    }
}

/// Winding number of `f` along the closed curve `curve(s)`, `s` in `[0, 1]`.
///
/// The curve is sampled at `samples` points and every step whose phase
/// increment reaches `pi / 2` is bisected. A sample where `|f|` drops below
/// `1e-12` times the largest sampled modulus is reported as a zero on the
/// contour.
pub fn winding_number<F, C>(
    mut f: F,
    curve: C,
    samples: usize,
    max_depth: u32,
) -> Result<i64, NumericsError>
where
    F: FnMut(Complex64) -> Complex64,
    C: Fn(f64) -> Complex64,
{
    let n = samples.max(16);
    let mut vals = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let s = k as f64 / n as f64;
        let z = curve(s);
        let v = f(z);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(NumericsError::NonFinite(z));
        }
        vals.push((s, v));
    }
    let scale = vals.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
    let floor = 1e-12 * scale;
    for (s, v) in &vals {
        if v.norm() <= floor {
            return Err(NumericsError::BoundaryZero(curve(*s)));
        }
    }
    let mut total = 0.0;
    for pair in vals.windows(2) {
        total += phase_step(&mut f, &curve, pair[0], pair[1], floor, max_depth)?;
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

fn phase_step<F, C>(
    f: &mut F,
    curve: &C,
    a: (f64, Complex64),
    b: (f64, Complex64),
    floor: f64,
    depth: u32,
) -> Result<f64, NumericsError>
where
    F: FnMut(Complex64) -> Complex64,
    C: Fn(f64) -> Complex64,
{
    let d = (b.1 / a.1).arg();
    if d.abs() < PI / 2.0 {
        return Ok(d);
    }
    if depth == 0 {
        return Err(NumericsError::DepthExceeded(0));
    }
    let sm = 0.5 * (a.0 + b.0);
    let z = curve(sm);
    let v = f(z);
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(NumericsError::NonFinite(z));
    }
    if v.norm() <= floor {
        return Err(NumericsError::BoundaryZero(z));
    }
    Ok(phase_step(f, curve, a, (sm, v), floor, depth - 1)?
        + phase_step(f, curve, (sm, v), b, floor, depth - 1)?)
}

/// Number of zeros (with multiplicity) of an analytic `f` inside `rect`.
pub fn count_roots<F: FnMut(Complex64) -> Complex64>(
    f: F,
    rect: Rect,
    tol: Tolerance,
) -> Result<usize, NumericsError> {
    let w = winding_number(f, |s| rect.point(s), 512, tol.max_depth)?;
    Ok(w.max(0) as usize)
}

/// Number of zeros of `f` inside the open disc `B(center, radius)`.
pub fn count_roots_in_disc<F: FnMut(Complex64) -> Complex64>(
    f: F,
    center: Complex64,
    radius: f64,
    tol: Tolerance,
) -> Result<usize, NumericsError> {
    let curve = |s: f64| center + Complex64::from_polar(radius, 2.0 * PI * s);
    let w = winding_number(f, curve, 256, tol.max_depth)?;
    Ok(w.max(0) as usize)
}

/// Newton iteration from `seed`.
///
/// Multiple roots are detected from the ratio of successive steps and the
/// step is scaled by the estimated multiplicity. At a multiple root the
/// answer is then polished by a secant iteration on `df`, which has a root of
/// one lower multiplicity at the same point and so can be located to full
/// precision.
pub fn refine_root<F, D>(
    mut f: F,
    mut df: D,
    seed: Complex64,
    tol: Tolerance,
) -> Result<Complex64, NumericsError>
where
    F: FnMut(Complex64) -> Complex64,
    D: FnMut(Complex64) -> Complex64,
{
    let mut w = seed;
    let mut mult = 1.0f64;
    let mut last_step: Option<f64> = None;
    let mut converged = false;
    for _ in 0..400 {
        let fv = f(w);
        if fv.norm() <= tol.abs_tol {
            converged = true;
            break;
        }
        let dv = df(w);
        if dv.norm() == 0.0 || !(fv / dv).re.is_finite() {
            return Err(NumericsError::NoConvergence(seed));
        }
        let step = fv / dv;
        if let Some(prev) = last_step {
            let ratio = step.norm() / prev;
            if ratio > 0.3 && ratio < 0.95 {
                mult = (1.0 / (1.0 - ratio)).round().max(1.0);
            }
        }
        last_step = Some(step.norm());
        w -= step * mult;
        if step.norm() * mult <= tol.rel_tol * w.norm().max(1.0) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(NumericsError::NoConvergence(seed));
    }
    if mult < 1.5 {
        return Ok(w);
    }
    let d0 = df(w);
    // multiple root: secant on the derivative
    let mut a = w;
    let mut fa = d0;
    let mut b = w + 1e-7 * w.norm().max(1.0);
    let mut fb = df(b);
    for _ in 0..80 {
        let den = fb - fa;
        if den.norm() == 0.0 {
            break;
        }
        let c = b - fb * (b - a) / den;
        if !(c.re.is_finite() && c.im.is_finite()) {
            break;
        }
        a = b;
        fa = fb;
        b = c;
        fb = df(b);
        if (b - a).norm() <= 4.0 * f64::EPSILON * b.norm().max(1.0) {
            break;
        }
    }
    if (b - w).norm() < 1e-3 * w.norm().max(1.0) && f(b).norm() <= f(w).norm().max(tol.abs_tol) * 10.0 {
        Ok(b)
    } else {
        Ok(w)
    }
}

/// Bisection for a sign change of a real function on `[lo, hi]`.
pub fn bisect_real<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64, NumericsError> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(NumericsError::NoConvergence(Complex64::new(0.5 * (lo + hi), 0.0)));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
