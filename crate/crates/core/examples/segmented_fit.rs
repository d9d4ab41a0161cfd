//! Two-segment power-law fit locating where a learning curve changes slope.
//!
//! cargo run --example segmented_fit

use sldlab::powerlaw::fit_segmented;

fn main() -> sldlab::error::Result<()> {
    // Slope 0.0075 up to N = 30000, slope 0.0029 beyond, continuous at the bend.
    let (a1, a2, b2, bend) = (0.0075, 0.0029, 32.05, 30_000.0f64);
    let b1 = b2 * bend.powf(a2 - a1);
    let points: Vec<(f64, f64)> = (0..12)
        .map(|i| {
            let n = 10f64.powf(2.0 + 4.0 * i as f64 / 11.0);
            (n, if n <= bend { b1 * n.powf(a1) } else { b2 * n.powf(a2) })
        })
        .collect();

    let seg = fit_segmented(&points, 3, None)?;
    println!(
        "break between N = {:.0} and N = {:.0} (about {:.0})",
        points[seg.break_index - 1].0,
        points[seg.break_index].0,
        seg.break_size
    );
    println!("left slope {:.5}, right slope {:.5}", seg.left.alpha, seg.right.alpha);
    println!(
        "SSE single {:.3e} -> segmented {:.3e}; break evident: {}",
        seg.single.sse, seg.total_sse, seg.breakpoint_evident
    );
    Ok(())
}
