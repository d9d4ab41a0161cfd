//! A small seeded sweep over training-set sizes, written as a curve CSV.
//!
//! cargo run --release --example sweep_to_csv [out.csv]

use sldlab::curve_csv::{format_curve, write_curve_csv};
use sldlab::subspace::ModelParams;
use sldlab::sweep::{default_train_grid, run_sweep, EstimatorKind, SweepConfig};

fn main() -> sldlab::error::Result<()> {
    let p = ModelParams::new(5, 50, 0.1)?;
    let mut config = SweepConfig::new(p, default_train_grid(1, 2000, 4)?, EstimatorKind::ALL.to_vec());
    config.n_seeds = 3;
    let curve = run_sweep(&config)?;
    match std::env::args_os().nth(1) {
        Some(path) => write_curve_csv(&curve, path.as_ref())?,
        None => print!("{}", format_curve(&curve)),
    }
    Ok(())
}
