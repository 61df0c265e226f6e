//! A random lozenge tiling of a hexagon with its limiting edge curve, drawn
//! as SVG through the command layer.
//!
//! cargo run --release --example hexagon_render -- [OUT_DIR]

use gtedge::harness::{run, Command, ExperimentConfig};

fn main() {
    let mut cfg = ExperimentConfig::new(Command::Render);
    cfg.set("hexagon", "12,12,12").unwrap();
    cfg.seed = 5;
    cfg.out_dir = std::env::args().nth(1).unwrap_or_else(|| "out/hexagon".into()).into();
    for path in run(&cfg).unwrap() {
        println!("wrote {}", path.display());
    }
}
