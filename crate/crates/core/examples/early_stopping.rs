//! Oracle early stopping of gradient descent against running it to
//! convergence, with as many samples as ambient dimensions.
//!
//! cargo run --release --example early_stopping

use sldlab::estimators::{default_k_grid, svd_of, GdConfig, Iterations, SpectralRisk};
use sldlab::subspace::{optimal_risk, sample_basis, sample_dataset, ModelParams};

fn main() -> sldlab::error::Result<()> {
    let p = ModelParams::new(10, 100, 0.05)?;
    let basis = sample_basis(p.n, p.d, 0)?;
    let ds = sample_dataset(&p, &basis, 100, 1)?;
    let cache = svd_of(&ds)?;
    let spectral = SpectralRisk::new(&cache, &ds.clean, &basis, &p)?;
    let eta = GdConfig::default_for(&cache, Iterations::Infinity).eta;
    let choice = spectral.select(eta, &default_k_grid(20))?;

    println!("floor {:.4e}", optimal_risk(&p));
    for (k, risk) in &choice.risks {
        println!("k = {k:>8}  risk {risk:.4e}");
    }
    let converged = spectral.risk(&GdConfig::new(eta, Iterations::Infinity))?;
    println!(
        "best k = {} with risk {:.4e}; converged risk {:.4e} ({:.1}x worse)",
        choice.k_opt,
        choice.risk,
        converged,
        converged / choice.risk
    );
    Ok(())
}
