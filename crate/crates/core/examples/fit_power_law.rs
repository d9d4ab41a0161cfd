//! Power-law fits of a simulated excess-risk curve, with and without the
//! irreducible floor removed.
//!
//! cargo run --release --example fit_power_law

use sldlab::powerlaw::{fit_excess_powerlaw, fit_powerlaw};
use sldlab::subspace::{optimal_risk, ModelParams};
use sldlab::sweep::{default_train_grid, run_sweep, EstimatorKind, SweepConfig};

fn main() -> sldlab::error::Result<()> {
    let p = ModelParams::new(5, 100, 0.1)?;
    let mut config = SweepConfig::new(p, default_train_grid(100, 5000, 5)?, vec![EstimatorKind::Pca]);
    config.n_seeds = 3;
    let curve = run_sweep(&config)?;
    let points = curve.points("PCA").expect("PCA was simulated");

    let floor = optimal_risk(&p);
    let excess = fit_excess_powerlaw(&points, floor, None)?;
    let raw = fit_powerlaw(&points, None)?;
    println!("excess over floor {floor:.4e}: alpha {:.3}, beta {:.3}, r2 {:.4}", excess.alpha, excess.beta(), excess.r_squared);
    println!("raw risk:                alpha {:.3}, beta {:.3}, r2 {:.4}", raw.alpha, raw.beta(), raw.r_squared);
    let target = excess.predict(10_000.0);
    println!(
        "predicted excess at N = 10000: {target:.3e}; halving it needs N = {:.0}",
        excess.solve_for_size(target / 2.0)?
    );
    Ok(())
}
