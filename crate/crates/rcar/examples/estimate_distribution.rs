//! Estimate the coefficient distribution of a panel: per-series lag-1
//! autocorrelations, their empirical CDF, and its first moments.

use rcar::estimators::estimate_coeffs;
use rcar::sim::{simulate_panel, CoeffDist, PanelConfig};
use rcar::special::BetaParams;

fn main() -> rcar::Result<()> {
    let params = BetaParams::new(2.0, 1.4)?;
    let law = CoeffDist::sqrt_beta(params)?;
    let panel = simulate_panel(&PanelConfig::new(500, 817, law, 0.0, 7))?;

    let e = estimate_coeffs(&panel)?;
    println!("{} estimates, min {:.4}, max {:.4}", e.len(), e.values()[0], e.values()[e.len() - 1]);

    // The ECDF should track the sqrt-Beta CDF it was drawn from.
    println!("\n     x   ECDF    G0");
    for &x in &[0.2, 0.4, 0.6, 0.8, 0.95] {
        println!("  {x:.2}  {:.4}  {:.4}", e.eval(x), law.cdf(x)?);
    }

    let m = e.moments(2);
    println!("\nsample moments: mu1 {:.4}, mu2 {:.4}", m.get(1), m.get(2));
    // E a = E sqrt(U) and E a^2 = E U for U ~ Beta(2, 1.4).
    println!("Beta(2,1.4):    E U  {:.4} (compare mu2)", params.raw_moment(1));
    Ok(())
}
