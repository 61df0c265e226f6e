//! Experiment driver behind the `gtedge` binary: configuration, the five
//! commands and their CSV/SVG output.

mod converge;
mod svg;
mod trace;
mod validate;

pub use converge::{converge, ConvergeRow, SummaryRow, DEFAULT_QUERIES};
pub use trace::{edge_trace, region_intervals, TraceRow};
pub use validate::{validate, SuiteResult, SuiteStatus};

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::kernel::Precision;
use crate::measures::{discretize, LimitMeasure, MeasureError};
use crate::sampler::{self, ChainConfig, GTPattern};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Io(_) => 1,
            HarnessError::Validation(_) => 2,
            HarnessError::Numerical(_) => 3,
        }
    }
}

impl From<MeasureError> for HarnessError {
    fn from(e: MeasureError) -> Self {
        HarnessError::Config(e.to_string())
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Io(std::io::Error::other(e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    EdgeTrace,
    Converge,
    Validate,
    Sample,
    Render,
}

impl std::str::FromStr for Command {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "edge-trace" => Command::EdgeTrace,
            "converge" => Command::Converge,
            "validate" => Command::Validate,
            "sample" => Command::Sample,
            "render" => Command::Render,
            _ => return Err(HarnessError::Config(format!("unknown command `{s}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub measure_path: Option<PathBuf>,
    pub n_ladder: Vec<usize>,
    pub t: Option<f64>,
    pub query_grid: Vec<[f64; 4]>,
    pub tol: f64,
    pub precision_bits: u32,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Number of samples for `sample`.
    pub samples: usize,
    /// `(p, q, r)` hexagon preset for `render`.
    pub hexagon: Option<(i64, i64, i64)>,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        ExperimentConfig {
            command,
            measure_path: None,
            n_ladder: Vec::new(),
            t: None,
            query_grid: Vec::new(),
            tol: 1e-10,
            precision_bits: 256,
            seed: 0,
            out_dir: PathBuf::from("out"),
            samples: 200,
            hexagon: None,
        }
    }

    /// Applies `key = value` lines; `#` starts a comment. Keys are the long
    /// flag names.
    pub fn apply_file(&mut self, text: &str) -> Result<(), HarnessError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("line {}: expected `key = value`", i + 1)))?;
            self.set(k.trim(), v.trim()).map_err(|e| HarnessError::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        let bad = |what: &str| HarnessError::Config(format!("bad value `{value}` for {what}"));
        match key {
            "measure" => self.measure_path = Some(PathBuf::from(value)),
            "n" => {
                self.n_ladder = value
                    .split([',', ' '])
                    .filter(|s| !s.is_empty())
                    .map(str::parse)
                    .collect::<Result<_, _>>()
                    .map_err(|_| bad("n"))?
            }
            "t" => self.t = Some(value.parse().map_err(|_| bad("t"))?),
            "queries" => self.query_grid = read_queries(Path::new(value))?,
            "tol" => self.tol = value.parse().map_err(|_| bad("tol"))?,
            "precision-bits" => self.precision_bits = value.parse().map_err(|_| bad("precision-bits"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
            "out" => self.out_dir = PathBuf::from(value),
            "samples" => self.samples = value.parse().map_err(|_| bad("samples"))?,
            "hexagon" => {
                let v: Vec<i64> = value
                    .split(',')
                    .map(|s| s.trim().parse())
                    .collect::<Result<_, _>>()
                    .map_err(|_| bad("hexagon"))?;
                match v[..] {
                    [p, q, r] if p > 0 && q > 0 && r > 0 => self.hexagon = Some((p, q, r)),
                    _ => return Err(bad("hexagon")),
                }
            }
            _ => return Err(HarnessError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn check(&self) -> Result<(), HarnessError> {
        if self.n_ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HarnessError::Config("n ladder must be strictly increasing".into()));
        }
        if self.n_ladder.contains(&0) {
            return Err(HarnessError::Config("n must be positive".into()));
        }
        if self.query_grid.iter().flatten().any(|v| !v.is_finite()) {
            return Err(HarnessError::Config("queries must be finite".into()));
        }
        if !(self.tol > 0.0) {
            return Err(HarnessError::Config("tol must be positive".into()));
        }
        Ok(())
    }

    pub fn measure(&self) -> Result<LimitMeasure, HarnessError> {
        match &self.measure_path {
            Some(p) => Ok(LimitMeasure::from_file(p)?),
            None => Err(HarnessError::Config("--measure is required".into())),
        }
    }

    pub fn precision(&self) -> Precision {
        if self.precision_bits <= 53 {
            Precision::Double
        } else {
            Precision::Bits(self.precision_bits)
        }
    }
}

/// Query file: one `u r v s` per line, `#` comments.
pub fn read_queries(path: &Path) -> Result<Vec<[f64; 4]>, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v: Vec<f64> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| HarnessError::Config(format!("{} line {}: not a number", path.display(), i + 1)))?;
        match v[..] {
            [u, r, vv, s] => out.push([u, r, vv, s]),
            _ => return Err(HarnessError::Config(format!("{} line {}: expected `u r v s`", path.display(), i + 1))),
        }
    }
    Ok(out)
}

/// Top row of the hexagon with sides `p, q, r`: `(p+q+r, ..., p+q+1, p, ..., 1)`
/// shifted down by one so the lowest particle sits at 0.
pub fn hexagon_row(p: i64, q: i64, r: i64) -> Vec<i64> {
    let mut x: Vec<i64> = (p + q + 1..=p + q + r).rev().collect();
    x.extend((1..=p).rev());
    x.iter().map(|v| v - 1).collect()
}

/// Runs one command; written files are returned for reporting.
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, HarnessError> {
    cfg.check()?;
    fs::create_dir_all(&cfg.out_dir)?;
    match cfg.command {
        Command::EdgeTrace => trace::run(cfg),
        Command::Converge => converge::run(cfg),
        Command::Validate => validate::run(cfg),
        Command::Sample => run_sample(cfg),
        Command::Render => run_render(cfg),
    }
}

fn single_n(cfg: &ExperimentConfig) -> Result<usize, HarnessError> {
    match cfg.n_ladder[..] {
        [n] => Ok(n),
        [] => Err(HarnessError::Config("--n is required".into())),
        _ => Err(HarnessError::Config("this command takes a single --n".into())),
    }
}

fn run_sample(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, HarnessError> {
    let n = single_n(cfg)?;
    let x = discretize(&cfg.measure()?, n);
    let chain = ChainConfig::for_size(n, cfg.seed);
    let samples = sampler::glauber_samples(&x, cfg.samples, chain).map_err(|e| HarnessError::Config(e.to_string()))?;
    let dump = cfg.out_dir.join("samples.txt");
    let text: String = samples.iter().map(|p| format!("{p}\n")).collect();
    fs::write(&dump, text)?;
    let trace = sampler::chain_trace(&x, 200.min(cfg.samples.max(2)), chain).map_err(|e| HarnessError::Config(e.to_string()))?;
    let rho = sampler::autocorrelation(&trace, 20);
    let acf = cfg.out_dir.join("autocorrelation.csv");
    let mut w = csv::Writer::from_path(&acf)?;
    w.write_record(["lag", "rho"])?;
    for (k, r) in rho.iter().enumerate() {
        w.write_record([k.to_string(), format!("{r:.6}")])?;
    }
    w.flush()?;
    eprintln!(
        "sample: {} patterns, integrated autocorrelation time {:.2} thinning intervals",
        samples.len(),
        sampler::integrated_autocorrelation_time(&trace, 20)
    );
    Ok(vec![dump, acf])
}

fn run_render(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, HarnessError> {
    let (x, mu) = match cfg.hexagon {
        Some((p, q, r)) => {
            let x = hexagon_row(p, q, r);
            let n = x.len() as f64;
            // Limit of the hexagon row: unit density on the two particle runs.
            let mu = LimitMeasure::piecewise_constant(&[(0.0, p as f64 / n, 1.0), ((p + q) as f64 / n, (p + q + r) as f64 / n, 1.0)])?;
            (x, mu)
        }
        None => {
            let mu = cfg.measure()?;
            (discretize(&mu, single_n(cfg)?), mu)
        }
    };
    let n = x.len();
    if n > 64 {
        return Err(HarnessError::Config(format!("render is limited to n <= 64, got {n}")));
    }
    let pattern: GTPattern = if n == 1 {
        GTPattern { rows: vec![x.clone()] }
    } else {
        let chain = ChainConfig::for_size(n, cfg.seed);
        sampler::glauber_samples(&x, 1, ChainConfig { chains: 1, ..chain })
            .map_err(|e| HarnessError::Config(e.to_string()))?
            .remove(0)
    };
    let curve = trace::curve_points(&mu);
    let path = cfg.out_dir.join("render.svg");
    fs::write(&path, svg::lozenges(&pattern, &curve))?;
    Ok(vec![path])
}
