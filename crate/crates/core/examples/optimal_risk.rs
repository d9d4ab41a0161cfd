//! Risk of the optimal shrinkage-projection, exact and sampled.
//!
//! cargo run --example optimal_risk

use sldlab::risk::risk_monte_carlo;
use sldlab::subspace::{optimal_estimator, optimal_risk, sample_basis, ModelParams};

fn main() -> sldlab::error::Result<()> {
    let (d, n) = (10, 1000);
    let basis = sample_basis(n, d, 1)?;
    println!("{:>6} {:>12} {:>12} {:>12} {:>10}", "sigma", "floor", "exact", "sampled", "std.err");
    for sigma in [0.0, 0.05, 0.1, 0.2, 1.0] {
        let p = ModelParams::new(d, n, sigma)?;
        let w = optimal_estimator(&p, &basis)?;
        let rep = risk_monte_carlo(&w, &basis, &p, 20_000, 2)?;
        println!(
            "{sigma:>6} {:>12.6e} {:>12.6e} {:>12.6e} {:>10.2e}",
            optimal_risk(&p),
            rep.closed_form,
            rep.monte_carlo_mean,
            rep.monte_carlo_se
        );
    }
    Ok(())
}
