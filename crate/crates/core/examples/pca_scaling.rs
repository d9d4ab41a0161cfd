//! Excess risk of the PCA estimator as the training set grows, next to the
//! rate quantity (d + n sigma^2) ln(n) / N.
//!
//! cargo run --release --example pca_scaling

use sldlab::estimators::{pca_estimator, svd_of};
use sldlab::risk::{excess_risk, theory_diagnostics};
use sldlab::subspace::{sample_basis, sample_dataset, ModelParams};

fn main() -> sldlab::error::Result<()> {
    let p = ModelParams::new(10, 200, 0.1)?;
    let basis = sample_basis(p.n, p.d, 3)?;
    println!("{:>6} {:>12} {:>12} {:>8}", "N", "excess", "gamma", "ratio");
    for count in [20, 50, 100, 200, 500, 1000, 2000] {
        let ds = sample_dataset(&p, &basis, count, count as u64)?;
        let w = pca_estimator(&svd_of(&ds)?, &p)?;
        let excess = excess_risk(&w, &basis, &p)?;
        let gamma = theory_diagnostics(&p, count)?.gamma;
        println!("{count:>6} {excess:>12.4e} {gamma:>12.4e} {:>8.4}", excess / gamma);
    }
    Ok(())
}
