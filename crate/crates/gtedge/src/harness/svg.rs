//! Plain SVG strings; no plotting dependency.

use std::fmt::Write;

use crate::measures::LimitMeasure;
use crate::sampler::GTPattern;

const W: f64 = 640.0;
const PAD: f64 = 20.0;

/// Maps the plane `(chi, eta)` over `[x0, x1] x [0, 1]` to pixels.
struct Frame {
    x0: f64,
    scale: f64,
    height: f64,
}

impl Frame {
    fn new(x0: f64, x1: f64) -> Self {
        let scale = (W - 2.0 * PAD) / (x1 - x0);
        Frame { x0, scale, height: scale + 2.0 * PAD }
    }

    fn px(&self, chi: f64, eta: f64) -> (f64, f64) {
        (PAD + (chi - self.x0) * self.scale, self.height - PAD - eta * self.scale)
    }

    fn polyline(&self, pts: &[(f64, f64)], style: &str) -> String {
        let mut s = String::from("<polyline fill=\"none\" ");
        s.push_str(style);
        s.push_str(" points=\"");
        for &(c, e) in pts {
            let (x, y) = self.px(c, e);
            let _ = write!(s, "{x:.2},{y:.2} ");
        }
        s.push_str("\"/>\n");
        s
    }

    fn header(&self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{:.0}\" viewBox=\"0 0 {W} {:.0}\">\n",
            self.height, self.height
        )
    }
}

fn polygon(mu: &LimitMeasure) -> Vec<(f64, f64)> {
    let (a, b) = (mu.a(), mu.b());
    vec![(a, 1.0), (b, 1.0), (b, 0.0), (a + 1.0, 0.0), (a, 1.0)]
}

/// The polygon, the edge curve and optional finite-`n` overlays.
pub fn shape(mu: &LimitMeasure, curve: &[Vec<(f64, f64)>], overlay: &[Vec<(f64, f64)>]) -> String {
    let f = Frame::new(mu.a(), mu.b());
    let mut s = f.header();
    s.push_str(&f.polyline(&polygon(mu), "stroke=\"black\" stroke-width=\"1.5\""));
    for line in curve {
        s.push_str(&f.polyline(line, "stroke=\"#1f5fa8\" stroke-width=\"1.5\""));
    }
    for line in overlay {
        s.push_str(&f.polyline(line, "stroke=\"#c0392b\" stroke-width=\"1\" stroke-dasharray=\"4 3\""));
    }
    s.push_str("</svg>\n");
    s
}

/// A sampled pattern drawn site by site: each lattice site of row `r` in its
/// window is a rhombus, particles and holes in two colours, with the edge
/// curve on top. Rows are placed at height `r / n`.
pub fn lozenges(p: &GTPattern, curve: &[Vec<(f64, f64)>]) -> String {
    let x = p.top();
    let n = p.n() as i64;
    let nf = n as f64;
    let (lo, hi) = (x[x.len() - 1] as f64 / nf, (x[0] + 1) as f64 / nf);
    let f = Frame::new(lo, hi.max(lo + 1.0));
    let mut s = f.header();
    let h = 0.5 / nf;
    for r in 1..=n {
        let row = &p.rows[(r - 1) as usize];
        for u in x[x.len() - 1] + n - r..=x[0] {
            let (c, e) = ((u as f64 + 0.5) / nf, (r as f64 - 0.5) / nf);
            let corners = [(c - h, e), (c, e + h), (c + h, e), (c, e - h)];
            let fill = if row.binary_search_by(|y| u.cmp(y)).is_ok() { "#e8a33d" } else { "#d9e3ef" };
            s.push_str("<polygon stroke=\"#555\" stroke-width=\"0.5\" fill=\"");
            s.push_str(fill);
            s.push_str("\" points=\"");
            for (a, b) in corners {
                let (px, py) = f.px(a, b);
                let _ = write!(s, "{px:.2},{py:.2} ");
            }
            s.push_str("\"/>\n");
        }
    }
    for line in curve {
        s.push_str(&f.polyline(line, "stroke=\"#1f5fa8\" stroke-width=\"1.5\""));
    }
    s.push_str("</svg>\n");
    s
}
