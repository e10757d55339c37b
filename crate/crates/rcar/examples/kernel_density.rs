//! Smooth estimated coefficients into a density curve and print a crude
//! terminal plot for each kernel.

use rcar::estimators::{bandwidth_rule, estimate_coeffs, kde_curve, Kernel};
use rcar::sim::{simulate_panel, CoeffDist, PanelConfig};
use rcar::special::BetaParams;

fn main() -> rcar::Result<()> {
    let law = CoeffDist::sqrt_beta(BetaParams::new(2.0, 1.4)?)?;
    let panel = simulate_panel(&PanelConfig::new(400, 600, law, 0.0, 11))?;
    let e = estimate_coeffs(&panel)?;

    let h = bandwidth_rule(e.len(), 0.9)?;
    let grid: Vec<f64> = (0..=24).map(|i| i as f64 / 24.0).collect();

    for kernel in [Kernel::Epanechnikov, Kernel::Triangular, Kernel::Quartic] {
        println!("{} (h = {h:.4})", kernel.name());
        for (x, g) in kde_curve(&e, kernel, h, &grid)? {
            let bar = "#".repeat((g * 25.0).round() as usize);
            println!("  {x:.3} {g:7.4} {bar}");
        }
        println!();
    }
    Ok(())
}
