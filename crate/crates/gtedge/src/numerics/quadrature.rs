use std::collections::BinaryHeap;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::{NumericsError, Tolerance};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl15() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(15))
}

struct Panel {
    a: Complex64,
    b: Complex64,
    depth: u32,
    left: Complex64,
    right: Complex64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn rule<F: FnMut(Complex64) -> Complex64>(
    f: &mut F,
    a: Complex64,
    b: Complex64,
) -> Result<(Complex64, f64), NumericsError> {
    let (x, w) = gl15();
    let h = (b - a) * 0.5;
    let mid = (a + b) * 0.5;
    let mut s = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        let z = mid + h * *xi;
        let v = f(z);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(NumericsError::NonFinite(z));
        }
        s += v * *wi;
        abs += v.norm() * wi;
    }
    Ok((s * h, abs * h.norm()))
}

fn make_panel<F: FnMut(Complex64) -> Complex64>(
    f: &mut F,
    a: Complex64,
    b: Complex64,
    whole: Complex64,
    depth: u32,
) -> Result<Panel, NumericsError> {
    let m = (a + b) * 0.5;
    let (left, al) = rule(f, a, m)?;
    let (right, ar) = rule(f, m, b)?;
    let diff = (whole - left - right).norm();
    let err = if diff <= 64.0 * f64::EPSILON * (al + ar) { 0.0 } else { diff };
    Ok(Panel { a, b, depth, left, right, err })
}

/// Integral of `f` along the polygon through `path`, by globally adaptive
/// 15-point Gauss-Legendre bisection.
///
/// The panel with the largest error estimate is split until the summed
/// estimate meets `tol`. Each vertex of the path is always a panel boundary.
pub fn integrate_path<F: FnMut(Complex64) -> Complex64>(
    mut f: F,
    path: &[Complex64],
    tol: Tolerance,
) -> Result<Complex64, NumericsError> {
    let mut heap = BinaryHeap::new();
    for seg in path.windows(2) {
        let (whole, _) = rule(&mut f, seg[0], seg[1])?;
        heap.push(make_panel(&mut f, seg[0], seg[1], whole, 0)?);
    }
    loop {
        let total: Complex64 = heap.iter().map(|p| p.left + p.right).sum();
        let err: f64 = heap.iter().map(|p| p.err).sum();
        if err <= tol.target(total.norm()) {
            return Ok(total);
        }
        let p = heap.pop().expect("non-empty panel set");
        if p.depth >= tol.max_depth {
            return Err(NumericsError::DepthExceeded(tol.max_depth));
        }
        let m = (p.a + p.b) * 0.5;
        heap.push(make_panel(&mut f, p.a, m, p.left, p.depth + 1)?);
        heap.push(make_panel(&mut f, m, p.b, p.right, p.depth + 1)?);
    }
}

/// Real-line convenience wrapper around [`integrate_path`].
pub fn integrate_real<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> Result<f64, NumericsError> {
    let path = [Complex64::new(a, 0.0), Complex64::new(b, 0.0)];
    integrate_path(|z| Complex64::new(f(z.re), 0.0), &path, tol).map(|z| z.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_high_degree_polynomials() {
        let (x, w) = gauss_legendre(15);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(28)).sum();
        assert!((s - 2.0 / 29.0).abs() < 1e-15);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn reciprocal_over_unit_circle_gives_two_pi_i() {
        let path: Vec<Complex64> = (0..=64)
            .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 64.0))
            .collect();
        let v = integrate_path(|z| 1.0 / z, &path, Tolerance::new(1e-13, 1e-13)).unwrap();
        assert!((v - Complex64::new(0.0, 2.0 * std::f64::consts::PI)).norm() < 1e-12);
    }

    #[test]
    fn endpoint_singularity_is_resolved() {
        let v = integrate_real(|x| x.sqrt(), 0.0, 1.0, Tolerance::new(1e-12, 1e-12)).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn depth_cap_is_reported() {
        let r = integrate_real(|x| 1.0 / x.abs().sqrt().max(1e-300), -1.0, 1.0, Tolerance::new(1e-14, 0.0).with_depth(6));
        assert_eq!(r, Err(NumericsError::DepthExceeded(6)));
    }
}
