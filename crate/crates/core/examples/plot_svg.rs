//! Log-log SVG chart of two decaying curves with a fitted guide line.
//!
//! cargo run --example plot_svg [out.svg]

use sldlab::plot::{render_svg, Chart, FitOverlay, PlotSeries};
use sldlab::powerlaw::fit_powerlaw;

fn main() -> sldlab::error::Result<()> {
    let sizes: [f64; 6] = [10.0, 30.0, 100.0, 300.0, 1000.0, 3000.0];
    let fast: Vec<_> = sizes.iter().map(|&n| (n, 2.0 / n)).collect();
    let slow: Vec<_> = sizes.iter().map(|&n| (n, 0.5 * n.powf(-0.5))).collect();
    let fit = fit_powerlaw(&fast, None)?;

    let mut chart = Chart::new("two learning curves");
    chart.y_label = "excess risk".into();
    chart.series = vec![
        PlotSeries {
            label: "fast".into(),
            errors: Some(fast.iter().map(|&(_, v)| 0.1 * v).collect()),
            points: fast,
        },
        PlotSeries {
            label: "slow".into(),
            points: slow,
            errors: None,
        },
    ];
    chart.overlays = vec![FitOverlay {
        label: format!("fit, alpha = {:.2}", fit.alpha),
        alpha: fit.alpha,
        log_beta: fit.log_beta,
        floor: 0.0,
        x_min: 10.0,
        x_max: 3000.0,
    }];
    let svg = render_svg(&chart)?;
    let out = std::env::args().nth(1).unwrap_or_else(|| "curves.svg".into());
    std::fs::write(&out, svg).map_err(|e| sldlab::error::Error::Config(format!("cannot write {out}: {e}")))?;
    println!("wrote {out}");
    Ok(())
}
