use std::path::PathBuf;

use rayon::prelude::*;

use crate::airy::{airy_extended, AiryQuery};
use crate::kernel::{rescaled_kernel, Precision};
use crate::measures::{discretize, LimitMeasure, Region};
use crate::saddle::ScalingContext;

use super::{ExperimentConfig, HarnessError};

/// Eight points of `{0, +-0.5}^4`: equal-time pairs, time-shifted pairs in
/// both orders and the diagonal.
pub const DEFAULT_QUERIES: [[f64; 4]; 8] = [
    [0.0, 0.0, 0.0, 0.0],
    [0.5, 0.0, 0.5, 0.0],
    [0.0, 0.5, 0.0, -0.5],
    [0.5, 0.5, 0.0, 0.0],
    [0.0, 0.0, 0.5, 0.5],
    [-0.5, 0.0, 0.0, 0.5],
    [0.0, -0.5, 0.0, -0.5],
    [0.5, -0.5, -0.5, 0.5],
];

/// Relative bound on the last discrepancy of a ladder.
pub const FINAL_BOUND: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergeRow {
    pub n: usize,
    pub query: usize,
    pub nominal: [f64; 4],
    /// Continuum coordinates of the lattice sites actually used.
    pub realized: [f64; 4],
    pub sites: [i64; 4],
    pub region: Region,
    pub rescaled: f64,
    pub k_ai_nominal: f64,
    pub k_ai_realized: f64,
    /// `n^{1/3} beta^{-1} alpha_n`.
    pub alpha: f64,
    /// `|rescaled - K_Ai|` at the realized coordinates.
    pub discrepancy: f64,
    pub cancellation_bits: u32,
    pub precision_bits: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub query: usize,
    pub decreases: usize,
    pub steps: usize,
    pub final_discrepancy: f64,
    pub final_target: f64,
    pub trend_ok: bool,
    pub final_ok: bool,
}

/// Rescaled kernel against the Airy target for every `(n, query)`, ordered
/// by `n` then query index.
pub fn converge(
    mu: &LimitMeasure,
    t: f64,
    ladder: &[usize],
    queries: &[[f64; 4]],
    precision: Precision,
    tol: f64,
) -> Result<(Vec<ConvergeRow>, Vec<SummaryRow>), HarnessError> {
    let contexts: Vec<ScalingContext> = ladder
        .par_iter()
        .map(|&n| ScalingContext::build(mu, &discretize(mu, n), t))
        .collect::<Result<_, _>>()
        .map_err(|e| HarnessError::Config(format!("t = {t}: {e}")))?;
    let airy = |q: [f64; 4]| {
        airy_extended(&AiryQuery::new(q[0], q[1], q[2], q[3]).with_tol(tol))
            .map_err(|e| HarnessError::Numerical(e.to_string()))
    };
    let nominal: Vec<f64> = queries.par_iter().map(|&q| airy(q)).collect::<Result<_, _>>()?;
    let jobs: Vec<(usize, usize)> = (0..ladder.len()).flat_map(|i| (0..queries.len()).map(move |j| (i, j))).collect();
    let rows: Vec<ConvergeRow> = jobs
        .par_iter()
        .map(|&(i, j)| {
            let ctx = &contexts[i];
            let [u, r, v, s] = queries[j];
            let qp = ctx.query(u, r, v, s).map_err(|e| HarnessError::Numerical(e.to_string()))?;
            let res = rescaled_kernel(ctx, &qp, precision).map_err(|e| HarnessError::Numerical(e.to_string()))?;
            let target = airy(qp.realized)?;
            Ok(ConvergeRow {
                n: ladder[i],
                query: j,
                nominal: queries[j],
                realized: qp.realized,
                sites: [qp.un, qp.rn, qp.vn, qp.sn],
                region: ctx.region(),
                rescaled: res.value,
                k_ai_nominal: nominal[j],
                k_ai_realized: target,
                alpha: res.alpha,
                discrepancy: (res.value - target).abs(),
                cancellation_bits: res.kernel.cancellation_bits,
                precision_bits: res.kernel.precision_bits,
            })
        })
        .collect::<Result<_, HarnessError>>()?;
    let summary = (0..queries.len())
        .map(|j| {
            let d: Vec<&ConvergeRow> = rows.iter().filter(|r| r.query == j).collect();
            let decreases = d.windows(2).filter(|w| w[1].discrepancy < w[0].discrepancy).count();
            let steps = d.len().saturating_sub(1);
            let last = d.last().expect("non-empty ladder");
            let bound = FINAL_BOUND * (1.0 + last.k_ai_realized.abs());
            SummaryRow {
                query: j,
                decreases,
                steps,
                final_discrepancy: last.discrepancy,
                final_target: last.k_ai_realized,
                trend_ok: decreases + 1 >= steps,
                final_ok: last.discrepancy <= bound,
            }
        })
        .collect();
    Ok((rows, summary))
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, HarnessError> {
    let mu = cfg.measure()?;
    let t = cfg.t.ok_or_else(|| HarnessError::Config("--t is required".into()))?;
    if cfg.n_ladder.is_empty() {
        return Err(HarnessError::Config("--n ladder is required".into()));
    }
    let queries: Vec<[f64; 4]> = if cfg.query_grid.is_empty() { DEFAULT_QUERIES.to_vec() } else { cfg.query_grid.clone() };
    let (rows, summary) = converge(&mu, t, &cfg.n_ladder, &queries, cfg.precision(), cfg.tol)?;
    let path = cfg.out_dir.join("converge.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record([
        "n", "query", "u", "r", "v", "s", "u_real", "r_real", "v_real", "s_real", "un", "rn", "vn", "sn", "region",
        "rescaled", "k_ai", "k_ai_real", "alpha", "discrepancy", "cancellation_bits", "precision_bits",
    ])?;
    for r in &rows {
        let mut rec = vec![r.n.to_string(), r.query.to_string()];
        rec.extend(r.nominal.iter().chain(&r.realized).map(|v| format!("{v:.6}")));
        rec.extend(r.sites.iter().map(i64::to_string));
        rec.push(r.region.to_string());
        rec.extend([r.rescaled, r.k_ai_nominal, r.k_ai_realized, r.alpha, r.discrepancy].iter().map(|v| format!("{v:.10}")));
        rec.extend([r.cancellation_bits.to_string(), r.precision_bits.to_string()]);
        w.write_record(rec)?;
    }
    w.flush()?;
    let spath = cfg.out_dir.join("converge_summary.csv");
    let mut w = csv::Writer::from_path(&spath)?;
    w.write_record(["query", "decreases", "steps", "final_discrepancy", "final_k_ai", "trend_ok", "final_ok"])?;
    for s in &summary {
        w.write_record([
            s.query.to_string(),
            s.decreases.to_string(),
            s.steps.to_string(),
            format!("{:.10}", s.final_discrepancy),
            format!("{:.10}", s.final_target),
            s.trend_ok.to_string(),
            s.final_ok.to_string(),
        ])?;
        if !s.trend_ok {
            eprintln!("converge: query {} decreased on {} of {} ladder steps", s.query, s.decreases, s.steps);
        }
    }
    w.flush()?;
    Ok(vec![path, spath])
}
