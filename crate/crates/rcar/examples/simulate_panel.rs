//! Simulate a small panel and compare its empirical lag autocovariances
//! with the stationary values implied by the coefficient law.

use rcar::sim::{simulate_panel, theoretical_autocov, CoeffDist, PanelConfig};
use rcar::special::BetaParams;

fn main() -> rcar::Result<()> {
    let law = CoeffDist::sqrt_beta(BetaParams::new(2.0, 1.4)?)?;
    let cfg = PanelConfig::new(400, 1000, law, 0.0, 20260815);
    let panel = simulate_panel(&cfg)?;

    println!(
        "panel: {} series x {} observations, burn-in {} steps",
        panel.n_series(),
        panel.n_obs(),
        panel.burnin_len
    );

    // Pool the cross-sectional average of X(t) X(t+lag) over all series;
    // with this many draws it should sit near the theoretical curve.
    for lag in 0..=4 {
        let mut acc = 0.0;
        let mut count = 0usize;
        for i in 0..panel.n_series() {
            let x = panel.series(i);
            for t in 0..x.len() - lag {
                acc += x[t] * x[t + lag];
                count += 1;
            }
        }
        let empirical = acc / count as f64;
        let exact = theoretical_autocov(&law, lag)?;
        println!("lag {lag}: pooled {empirical:+.4}  stationary {exact:+.4}");
    }
    Ok(())
}
