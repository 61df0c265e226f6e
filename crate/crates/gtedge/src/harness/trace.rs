use std::fs;
use std::path::PathBuf;

use crate::edge::{edge_nonasymptotic, edge_point};
use crate::measures::{discretize, make_mu_n, LimitMeasure, Region};

use super::{svg, ExperimentConfig, HarnessError};

/// Far end of the unbounded intervals.
pub const T_FAR: f64 = 1e6;
const NEAR: f64 = 1e-3;
const SEED_POINTS: usize = 33;
const MAX_DEPTH: u32 = 8;
/// Insert a midpoint while consecutive curve points are farther apart than this.
const SPACING: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub chi: f64,
    pub eta: f64,
    pub region: Region,
    pub case_id: u8,
    pub beta: f64,
}

/// Connected components of `R_mu^+`, `R_{lambda-mu}` and `R_mu^-`, in
/// increasing order; the outer ones are infinite.
pub fn region_intervals(mu: &LimitMeasure) -> Vec<(Region, f64, f64)> {
    let mut probes = vec![mu.a() - 1.0, mu.b() + 1.0];
    let sup = mu.support();
    for w in sup.windows(2) {
        let (l, r) = (w[0].1, w[1].0);
        probes.extend([l + 1e-9 * (r - l), r - 1e-9 * (r - l)]);
    }
    probes.extend(mu.full_blocks().iter().map(|&(lo, hi)| 0.5 * (lo + hi)));
    let mut out: Vec<(Region, f64, f64)> = probes.into_iter().filter_map(|t| mu.region_interval(t).ok()).collect();
    out.sort_by(|a, b| a.1.total_cmp(&b.1));
    out.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
    out
}

/// Parameter map `s in [0, 1] -> t` for one interval.
fn param(lo: f64, hi: f64) -> impl Fn(f64) -> f64 {
    move |s: f64| {
        if lo.is_finite() && hi.is_finite() {
            let m = NEAR * (hi - lo);
            lo + m + (hi - lo - 2.0 * m) * s
        } else if lo.is_finite() {
            lo + NEAR * ((T_FAR - lo) / NEAR).powf(s)
        } else {
            hi - NEAR * ((hi + T_FAR) / NEAR).powf(s)
        }
    }
}

/// Edge points over every region on an adaptive grid. Points where the
/// edge is undefined (triple roots, degenerate `C'`) are skipped and
/// counted.
pub fn edge_trace(mu: &LimitMeasure) -> (Vec<TraceRow>, usize) {
    let mut rows = Vec::new();
    let mut skipped = 0;
    for (_, lo, hi) in region_intervals(mu) {
        let map = param(lo, hi);
        let eval = |s: f64| {
            let t = map(s);
            edge_point(mu, t).ok().map(|e| TraceRow {
                t,
                chi: e.chi,
                eta: e.eta,
                region: e.region,
                case_id: e.case_id,
                beta: e.beta,
            })
        };
        let mut pts: Vec<(f64, Option<TraceRow>)> =
            (0..SEED_POINTS).map(|k| k as f64 / (SEED_POINTS - 1) as f64).map(|s| (s, eval(s))).collect();
        for _ in 0..MAX_DEPTH {
            let mut next = Vec::with_capacity(pts.len() * 2);
            let mut added = false;
            for w in pts.windows(2) {
                next.push(w[0]);
                if let (Some(a), Some(b)) = (w[0].1, w[1].1) {
                    if (a.chi - b.chi).hypot(a.eta - b.eta) > SPACING {
                        let s = 0.5 * (w[0].0 + w[1].0);
                        next.push((s, eval(s)));
                        added = true;
                    }
                }
            }
            next.push(*pts.last().expect("seeded"));
            pts = next;
            if !added {
                break;
            }
        }
        for (_, r) in pts {
            match r {
                Some(r) => rows.push(r),
                None => skipped += 1,
            }
        }
    }
    rows.sort_by(|a, b| a.t.total_cmp(&b.t));
    (rows, skipped)
}

/// Whether `(chi, eta)` lies strictly inside the polygon with vertices
/// `(a, 1), (b, 1), (b, 0), (a + 1, 0)`.
pub fn inside_polygon(mu: &LimitMeasure, chi: f64, eta: f64) -> bool {
    eta > 0.0 && eta < 1.0 && chi < mu.b() && chi > mu.a() + 1.0 - eta
}

/// The edge curve as one polyline per region component.
pub fn curve_points(mu: &LimitMeasure) -> Vec<Vec<(f64, f64)>> {
    let (rows, _) = edge_trace(mu);
    let mut out: Vec<Vec<(f64, f64)>> = Vec::new();
    let comps = region_intervals(mu);
    for (_, lo, hi) in comps {
        let line: Vec<(f64, f64)> = rows.iter().filter(|r| lo < r.t && r.t < hi).map(|r| (r.chi, r.eta)).collect();
        if !line.is_empty() {
            out.push(line);
        }
    }
    out
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, HarnessError> {
    let mu = cfg.measure()?;
    let (rows, skipped) = edge_trace(&mu);
    if rows.is_empty() {
        return Err(HarnessError::Numerical("no edge point could be computed".into()));
    }
    if skipped > 0 {
        eprintln!("edge-trace: skipped {skipped} parameter values without a typical edge point");
    }
    let outside = rows.iter().filter(|r| !inside_polygon(&mu, r.chi, r.eta)).count();
    if outside > 0 {
        eprintln!("edge-trace: warning: {outside} points on or outside the polygon");
    }
    let csv_path = cfg.out_dir.join("edge_trace.csv");
    let mut w = csv::Writer::from_path(&csv_path)?;
    w.write_record(["t", "chi_e", "eta_e", "case_id", "beta"])?;
    for r in &rows {
        w.write_record([
            format!("{:.12e}", r.t),
            format!("{:.15}", r.chi),
            format!("{:.15}", r.eta),
            r.case_id.to_string(),
            format!("{:.12}", r.beta),
        ])?;
    }
    w.flush()?;
    let mut files = vec![csv_path];
    let curve = curve_points(&mu);
    let mut overlay = Vec::new();
    for &n in &cfg.n_ladder {
        let x = discretize(&mu, n);
        let na_path = cfg.out_dir.join(format!("edge_nonasymptotic_n{n}.csv"));
        let mut w = csv::Writer::from_path(&na_path)?;
        w.write_record(["n", "t", "chi_n", "eta_n"])?;
        for (_, lo, hi) in region_intervals(&mu) {
            let mut line = Vec::new();
            for r in rows.iter().filter(|r| lo < r.t && r.t < hi) {
                let Ok(eps) = mu.default_eps(r.t) else { continue };
                let Ok(mu_n) = make_mu_n(&x, &mu, eps) else { continue };
                if let Ok((c, e, _)) = edge_nonasymptotic(&mu_n, r.t) {
                    w.write_record([n.to_string(), format!("{:.12e}", r.t), format!("{c:.15}"), format!("{e:.15}")])?;
                    line.push((c, e));
                }
            }
            overlay.push(line);
        }
        w.flush()?;
        files.push(na_path);
    }
    let svg_path = cfg.out_dir.join("edge_trace.svg");
    fs::write(&svg_path, svg::shape(&mu, &curve, &overlay))?;
    files.push(svg_path);
    Ok(files)
}
