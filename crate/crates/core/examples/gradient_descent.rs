//! Gradient descent on the squared training loss, iterated directly and via
//! its spectral closed form.
//!
//! cargo run --example gradient_descent

use sldlab::estimators::{gd_estimator_closed, gd_estimator_iterative, pinv_estimator, svd_of, GdConfig, Iterations};
use sldlab::risk::risk_closed_form;
use sldlab::subspace::{sample_basis, sample_dataset, ModelParams};

fn main() -> sldlab::error::Result<()> {
    let p = ModelParams::new(4, 40, 0.2)?;
    let basis = sample_basis(p.n, p.d, 5)?;
    let ds = sample_dataset(&p, &basis, 30, 6)?;
    let cache = svd_of(&ds)?;
    for k in [1, 10, 100, 500] {
        let cfg = GdConfig::default_for(&cache, Iterations::Finite(k));
        let closed = gd_estimator_closed(&cache, &ds.clean, &cfg)?;
        let iterated = gd_estimator_iterative(&ds, &cfg)?;
        let gap = (closed.to_dense() - iterated.to_dense()).norm() / iterated.to_dense().norm();
        println!(
            "k = {k:>3}: risk {:.5}, closed form vs iterations {gap:.1e}",
            risk_closed_form(&closed, &basis, &p)?
        );
    }
    let pinv = pinv_estimator(&cache, &ds.clean)?;
    println!("k = inf: risk {:.5}", risk_closed_form(&pinv, &basis, &p)?);
    Ok(())
}
