use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use gtedge::harness::{self, Command, ExperimentConfig, HarnessError};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    EdgeTrace,
    Converge,
    Validate,
    Sample,
    Render,
}

/// Edge statistics of uniformly random interlacing patterns with a fixed top row.
#[derive(Debug, Parser)]
#[command(name = "gtedge", version)]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    /// Key-value config file; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Limit measure file, one piece `lo hi c0 [c1 ...]` per line.
    #[arg(long)]
    measure: Option<PathBuf>,
    /// System size, or a strictly increasing ladder.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    /// Query file with one `u r v s` per line.
    #[arg(long)]
    queries: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    /// Mantissa bits for the kernel sums; 53 or less selects doubles.
    #[arg(long)]
    precision_bits: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of patterns for `sample`.
    #[arg(long)]
    samples: Option<usize>,
    /// Hexagon preset `p,q,r` for `render`.
    #[arg(long)]
    hexagon: Option<String>,
}

fn config(cli: &Cli) -> Result<ExperimentConfig, HarnessError> {
    let command = match cli.command {
        Cmd::EdgeTrace => Command::EdgeTrace,
        Cmd::Converge => Command::Converge,
        Cmd::Validate => Command::Validate,
        Cmd::Sample => Command::Sample,
        Cmd::Render => Command::Render,
    };
    let mut cfg = ExperimentConfig::new(command);
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        cfg.apply_file(&text)?;
    }
    if let Some(p) = &cli.measure {
        cfg.measure_path = Some(p.clone());
    }
    if !cli.n.is_empty() {
        cfg.n_ladder = cli.n.clone();
    }
    if let Some(t) = cli.t {
        cfg.t = Some(t);
    }
    if let Some(q) = &cli.queries {
        cfg.query_grid = harness::read_queries(q)?;
    }
    if let Some(v) = cli.tol {
        cfg.tol = v;
    }
    if let Some(v) = cli.precision_bits {
        cfg.precision_bits = v;
    }
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = &cli.out {
        cfg.out_dir = v.clone();
    }
    if let Some(v) = cli.samples {
        cfg.samples = v;
    }
    if let Some(h) = &cli.hexagon {
        cfg.set("hexagon", h)?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match config(&cli).and_then(|cfg| harness::run(&cfg)) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
