//! Goodness-of-fit tests for the coefficient law.
//!
//! Three tests share the [`GofResult`] shape:
//!
//! * [`t1_simple`]: Kolmogorov-Smirnov statistic `sqrt(N) sup |G_hat - G0|`
//!   against a fully specified null law, with the classical Kolmogorov
//!   limit supplying p-values and critical values.
//! * [`t1_composite`]: the same statistic against the Beta family, with
//!   the null parameters fitted by method of moments and the critical
//!   value calibrated by parametric bootstrap.
//! * [`t2_parametric`]: a Wald-type quadratic form in the truncated
//!   maximum-likelihood estimate, `N (theta_hat - theta0)' A(theta0)
//!   (theta_hat - theta0)`, with a chi-square(2) limit.

use crate::error::{Error, Result};
use crate::estimators::{beta_mom, estimate_coeffs, Ecdf};
use crate::fmtio::fmt17;
use crate::rng::{counter_seed, stream};
use crate::sim::{simulate_panel, CoeffDist, InnovDist, PanelConfig};
use crate::special::{
    chi2_2_sf, digamma, kolmogorov_cdf, kolmogorov_upper_quantile, trigamma, BetaParams,
};
use rand::Rng;
use rand_distr::Distribution;
use rayon::prelude::*;
use std::io::{BufWriter, Write};
use std::path::Path;

/// Which test produced a [`GofResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GofMethod {
    T1Simple,
    T1Composite,
    T2Parametric,
}

impl GofMethod {
    pub fn label(&self) -> &'static str {
        match self {
            Self::T1Simple => "T1_simple",
            Self::T1Composite => "T1_composite",
            Self::T2Parametric => "T2_parametric",
        }
    }
}

/// Outcome of a goodness-of-fit test.
#[derive(Debug, Clone)]
pub struct GofResult {
    pub method: GofMethod,
    pub statistic: f64,
    pub p_value: f64,
    /// Critical value at `level`; the test rejects iff the statistic
    /// strictly exceeds it.
    pub critical_value: f64,
    pub level: f64,
    /// Fitted Beta parameters where the method estimates them.
    pub fitted_theta: Option<BetaParams>,
    /// Bootstrap replication count where the method uses one.
    pub mc_reps: Option<usize>,
}

impl GofResult {
    pub const CSV_HEADER: &'static str =
        "method,statistic,p_value,critical_value,level,alpha_hat,beta_hat,mc_reps";

    pub fn reject(&self) -> bool {
        self.statistic > self.critical_value
    }

    /// One CSV row matching [`Self::CSV_HEADER`]; inapplicable fields stay empty.
    pub fn csv_row(&self) -> String {
        let (a, b) = match &self.fitted_theta {
            Some(t) => (fmt17(t.alpha()), fmt17(t.beta())),
            None => (String::new(), String::new()),
        };
        let mc = self.mc_reps.map(|r| r.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{a},{b},{mc}",
            self.method.label(),
            fmt17(self.statistic),
            fmt17(self.p_value),
            fmt17(self.critical_value),
            fmt17(self.level),
        )
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        writeln!(w, "{}", self.csv_row())?;
        Ok(())
    }

    pub fn write_csv_file<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv(BufWriter::new(f))
    }
}

/// Null hypothesis selector used by the command-line `test` subcommand.
#[derive(Debug, Clone)]
pub enum NullSpec {
    /// H0: the coefficient law equals this fixed law.
    Simple(CoeffDist),
    /// H0: the coefficient law belongs to the Beta family on (0,1).
    CompositeBeta,
    /// H0 for the parametric benchmark: the coefficient is the square
    /// root of a Beta(theta0) variable.
    CompositeSqrtBeta(BetaParams),
}

fn check_level(level: f64) -> Result<()> {
    if !(level.is_finite() && 0.0 < level && level < 1.0) {
        return Err(Error::Config(format!("test level must lie in (0, 1), got {level}")));
    }
    Ok(())
}

/// Errors unless every point lies strictly inside `(0, 1)`; the report
/// names the lowest-numbered offending series.
pub fn require_unit_support(e: &Ecdf) -> Result<()> {
    let mut worst: Option<(usize, f64)> = None;
    for (k, &v) in e.values().iter().enumerate() {
        if v <= 0.0 || v >= 1.0 {
            let s = e.series_of(k);
            if worst.is_none_or(|(ws, _)| s < ws) {
                worst = Some((s, v));
            }
        }
    }
    match worst {
        Some((series, value)) => Err(Error::Support { series, value }),
        None => Ok(()),
    }
}

/// Exact Kolmogorov-Smirnov distance `sup_x |G_hat(x) - F(x)|`.
///
/// The sup over all real x is attained at the sample's jump points, so it
/// is enumerated exactly: tied points collapse into one jump of the
/// combined mass, and at each jump both the left and right limits of the
/// step function are compared against `F`.
pub fn ks_sup_distance<F>(e: &Ecdf, mut cdf: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let vals = e.values();
    let n = vals.len() as f64;
    let mut best = 0.0f64;
    let mut i = 0;
    while i < vals.len() {
        let x = vals[i];
        let mut j = i + 1;
        while j < vals.len() && vals[j] == x {
            j += 1;
        }
        let f = cdf(x)?;
        let before = i as f64 / n;
        let after = j as f64 / n;
        best = best.max((f - before).abs()).max((after - f).abs());
        i = j;
    }
    Ok(best)
}

/// Simple KS test of H0: G = G0 for a fully specified law `null`.
///
/// The statistic `sqrt(N) sup |G_hat - G0|` converges to the Kolmogorov
/// law, which supplies both the p-value and the critical value.
pub fn t1_simple(e: &Ecdf, null: &CoeffDist, level: f64) -> Result<GofResult> {
    check_level(level)?;
    let d = ks_sup_distance(e, |x| null.cdf(x))?;
    let statistic = (e.len() as f64).sqrt() * d;
    Ok(GofResult {
        method: GofMethod::T1Simple,
        statistic,
        p_value: 1.0 - kolmogorov_cdf(statistic)?,
        critical_value: kolmogorov_upper_quantile(level)?,
        level,
        fitted_theta: None,
        mc_reps: None,
    })
}

/// How [`t1_composite_with`] regenerates data under the fitted null.
#[derive(Debug, Clone, Copy)]
pub enum CompositeResampling {
    /// Redraw the N coefficients directly from Beta(theta_hat). This is
    /// the default: the empirical law of the estimated coefficients is
    /// asymptotically that of the true ones, so resampling at the
    /// coefficient level reproduces the limit null law of the statistic
    /// at a fraction of the cost of simulating whole panels.
    Coefficients,
    /// Simulate a full panel per replication (coefficients from
    /// Beta(theta_hat), series of length `n_obs`), then re-estimate the
    /// coefficients from the panel. Slower; kept for sensitivity checks
    /// of the coefficient-level shortcut.
    Panels { n_obs: usize, shock_b: f64, innov: InnovDist },
}

/// Beta CDF extended to the whole line (support is inside `(0,1)`).
/// Bootstrap re-estimates can stray outside the unit interval, so the
/// extension keeps the KS enumeration well defined there.
fn beta_cdf_ext(p: &BetaParams, x: f64) -> Result<f64> {
    if x <= 0.0 {
        Ok(0.0)
    } else if x >= 1.0 {
        Ok(1.0)
    } else {
        p.cdf(x)
    }
}

/// Composite KS test of H0: G lies in the Beta family on `(0, 1)`.
///
/// Delegates to [`t1_composite_with`] using coefficient-level resampling.
pub fn t1_composite<R: Rng + ?Sized>(
    e: &Ecdf,
    level: f64,
    mc_reps: usize,
    rng: &mut R,
) -> Result<GofResult> {
    t1_composite_with(e, level, mc_reps, CompositeResampling::Coefficients, rng)
}

/// Composite KS test with an explicit resampling scheme.
///
/// Fits theta_hat by method of moments, measures `sqrt(N) sup |G_hat -
/// G_theta_hat|`, and calibrates the critical value by parametric
/// bootstrap: each replication draws a fresh size-N sample under
/// Beta(theta_hat), refits the parameters by the same method of moments,
/// and recomputes the statistic against its own fit. The critical value
/// is the ceil((1-level) mc_reps)-th order statistic (conservative side)
/// and the p-value the fraction of replications at or above the observed
/// statistic.
///
/// The moment fit can land outside the `alpha, beta > 1` region where the
/// test's asymptotics are established; the test still runs there, since a
/// fit far from the family inflates the statistic and drives rejection,
/// which is the desired behaviour under such alternatives.
///
/// Replications run in parallel; each draws from its own stream derived
/// from (master seed, replication index), so results do not depend on the
/// worker count. The master seed is the next `u64` from `rng`.
pub fn t1_composite_with<R: Rng + ?Sized>(
    e: &Ecdf,
    level: f64,
    mc_reps: usize,
    resampling: CompositeResampling,
    rng: &mut R,
) -> Result<GofResult> {
    check_level(level)?;
    if mc_reps < 100 {
        return Err(Error::Config(format!(
            "composite test needs mc_reps >= 100, got {mc_reps}"
        )));
    }
    require_unit_support(e)?;
    let n = e.len();
    let sqrt_n = (n as f64).sqrt();
    let m = e.moments(2);
    let theta_hat = beta_mom(m.get(1), m.get(2))?;
    let statistic = sqrt_n * ks_sup_distance(e, |x| beta_cdf_ext(&theta_hat, x))?;

    let master: u64 = rng.gen();
    let sampler = rand_distr::Beta::new(theta_hat.alpha(), theta_hat.beta())
        .map_err(|e| Error::Domain(format!("invalid Beta sampler parameters: {e}")))?;
    let stats = (0..mc_reps)
        .into_par_iter()
        .map(|rep| -> Result<f64> {
            let e_star = match resampling {
                CompositeResampling::Coefficients => {
                    let mut r = stream(master, rep as u64);
                    let draw: Vec<f64> = (0..n).map(|_| sampler.sample(&mut r)).collect();
                    Ecdf::from_values(&draw)?
                }
                CompositeResampling::Panels { n_obs, shock_b, innov } => {
                    let mut cfg = PanelConfig::new(
                        n,
                        n_obs,
                        CoeffDist::beta_on_01(theta_hat),
                        shock_b,
                        counter_seed(master, rep as u64),
                    );
                    cfg.innov = innov;
                    estimate_coeffs(&simulate_panel(&cfg)?)?
                }
            };
            let ms = e_star.moments(2);
            let theta_star = beta_mom(ms.get(1), ms.get(2))?;
            let d = ks_sup_distance(&e_star, |x| beta_cdf_ext(&theta_star, x))?;
            Ok(sqrt_n * d)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut sorted = stats.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite statistics"));
    let k = ((1.0 - level) * mc_reps as f64).ceil() as usize;
    let critical_value = sorted[k.clamp(1, mc_reps) - 1];
    let p_value = stats.iter().filter(|&&s| s >= statistic).count() as f64 / mc_reps as f64;
    Ok(GofResult {
        method: GofMethod::T1Composite,
        statistic,
        p_value,
        critical_value,
        level,
        fitted_theta: Some(theta_hat),
        mc_reps: Some(mc_reps),
    })
}

const MLE_BOX_LO: f64 = 1.0 + 1e-6;
const MLE_BOX_HI: f64 = 100.0;
const MLE_MAX_ITER: usize = 200;
const MLE_SCORE_TOL: f64 = 1e-11;

/// Truncated maximum-likelihood fit of the square-root-of-Beta law.
///
/// Each estimate is clamped to `[kappa, 1-kappa]` before entering the
/// likelihood, which guards against boundary estimates. The sqrt-Beta
/// log-likelihood at `a` is `ln 2 + ln a + (alpha-1) ln a^2 + (beta-1)
/// ln(1-a^2) - ln B(alpha, beta)`; the terms involving the parameters are
/// exactly a Beta log-likelihood in `u = a^2`, so the fit reduces to a
/// standard Beta MLE on the squared, clamped estimates. The score
/// equations are solved by safeguarded Newton (the negative Hessian per
/// observation is the positive-definite trigamma matrix of
/// [`fisher_matrix`]), with the parameters boxed to `[1+1e-6, 100]^2`.
///
/// `kappa = 0` disables the truncation; it then errors if any estimate
/// sits at 0 or 1, where the likelihood degenerates.
pub fn beran_mle(e: &Ecdf, kappa: f64) -> Result<BetaParams> {
    if !(kappa.is_finite() && (0.0..0.5).contains(&kappa)) {
        return Err(Error::Config(format!(
            "truncation kappa must lie in [0, 0.5), got {kappa}"
        )));
    }
    if e.len() < 10 {
        return Err(Error::Domain(format!(
            "maximum-likelihood fit needs at least 10 series, got {}",
            e.len()
        )));
    }
    let n = e.len() as f64;
    // Sufficient statistics of the Beta likelihood on u = clamped^2.
    let mut mean_ln_u = 0.0;
    let mut mean_ln_1mu = 0.0;
    let mut mu1 = 0.0;
    let mut mu2 = 0.0;
    for (k, &v) in e.values().iter().enumerate() {
        let c = v.clamp(kappa, 1.0 - kappa);
        let u = c * c;
        if u <= 0.0 || u >= 1.0 {
            return Err(Error::Domain(format!(
                "clamped estimate {c} at series {} is outside (0, 1); increase kappa",
                e.series_of(k)
            )));
        }
        mean_ln_u += u.ln();
        mean_ln_1mu += (1.0 - u).ln();
        mu1 += u;
        mu2 += u * u;
    }
    mean_ln_u /= n;
    mean_ln_1mu /= n;
    mu1 /= n;
    mu2 /= n;

    // Per-observation log-likelihood without the theta-free terms.
    let loglik = |a: f64, b: f64| -> Result<f64> {
        Ok((a - 1.0) * mean_ln_u + (b - 1.0) * mean_ln_1mu
            - crate::special::ln_beta(a, b)?)
    };
    let score = |a: f64, b: f64| -> Result<(f64, f64)> {
        let dab = digamma(a + b)?;
        Ok((mean_ln_u - digamma(a)? + dab, mean_ln_1mu - digamma(b)? + dab))
    };

    // Start from the moment fit when it exists, else from the box centre.
    let (mut a, mut b) = match beta_mom(mu1, mu2) {
        Ok(t) => (
            t.alpha().clamp(MLE_BOX_LO, MLE_BOX_HI),
            t.beta().clamp(MLE_BOX_LO, MLE_BOX_HI),
        ),
        Err(_) => (2.0, 2.0),
    };
    let mut ll = loglik(a, b)?;
    for _ in 0..MLE_MAX_ITER {
        let (sa, sb) = score(a, b)?;
        if sa.abs().max(sb.abs()) < MLE_SCORE_TOL {
            return BetaParams::new(a, b);
        }
        // Newton direction: (negative Hessian)^-1 score, both per
        // observation; the negative Hessian is the trigamma matrix.
        let h = fisher_entries(a, b)?;
        let det = h[0] * h[2] - h[1] * h[1];
        if det.is_nan() || det <= 0.0 {
            return Err(Error::Estimation {
                message: format!("trigamma matrix is singular at ({a}, {b})"),
                last: Some((a, b)),
            });
        }
        let da = (h[2] * sa - h[1] * sb) / det;
        let db = (h[0] * sb - h[1] * sa) / det;
        // Backtrack until the boxed step improves the likelihood. The
        // slack admits steps whose true gain underflows the rounding
        // noise of the likelihood evaluation near the optimum.
        let mut step = 1.0;
        let mut moved = false;
        for _ in 0..60 {
            let na = (a + step * da).clamp(MLE_BOX_LO, MLE_BOX_HI);
            let nb = (b + step * db).clamp(MLE_BOX_LO, MLE_BOX_HI);
            if na == a && nb == b {
                break;
            }
            let nl = loglik(na, nb)?;
            if nl >= ll - 1e-12 * (1.0 + ll.abs()) {
                a = na;
                b = nb;
                ll = nl;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            // No numerically improving step exists: either this is the
            // optimum to float precision, or the maximum lies outside
            // the box and the iterate is pinned to its edge.
            let (sa, sb) = score(a, b)?;
            if sa.abs().max(sb.abs()) < 1e-8 {
                return BetaParams::new(a, b);
            }
            return Err(Error::Estimation {
                message: format!(
                    "likelihood maximum lies outside the parameter box at ({a}, {b})"
                ),
                last: Some((a, b)),
            });
        }
    }
    Err(Error::Estimation {
        message: format!("no convergence after {MLE_MAX_ITER} iterations"),
        last: Some((a, b)),
    })
}

fn fisher_entries(a: f64, b: f64) -> Result<[f64; 3]> {
    let tab = trigamma(a + b)?;
    Ok([trigamma(a)? - tab, -tab, trigamma(b)? - tab])
}

/// Fisher information of the Beta family per observation:
/// `[[psi1(alpha) - psi1(alpha+beta), -psi1(alpha+beta)],
///   [-psi1(alpha+beta), psi1(beta) - psi1(alpha+beta)]]`.
/// Symmetric positive definite for all valid parameters.
pub fn fisher_matrix(theta: &BetaParams) -> Result<[[f64; 2]; 2]> {
    let h = fisher_entries(theta.alpha(), theta.beta())?;
    Ok([[h[0], h[1]], [h[1], h[2]]])
}

/// Wald quadratic form `N (theta_hat - theta0)' A(theta0) (theta_hat -
/// theta0)` with `A` the Fisher matrix at the null.
pub fn t2_statistic(
    theta_hat: &BetaParams,
    theta0: &BetaParams,
    n_series: usize,
) -> Result<f64> {
    let a = fisher_matrix(theta0)?;
    let d = [
        theta_hat.alpha() - theta0.alpha(),
        theta_hat.beta() - theta0.beta(),
    ];
    Ok(n_series as f64
        * (d[0] * (a[0][0] * d[0] + a[0][1] * d[1]) + d[1] * (a[1][0] * d[0] + a[1][1] * d[1])))
}

/// Parametric benchmark test of H0: the coefficient law is
/// sqrt-Beta(theta0).
///
/// Fits theta by [`beran_mle`], forms the Wald statistic, and reads the
/// p-value off the chi-square(2) tail, whose upper quantile has the
/// closed form `2 ln(1/level)`.
pub fn t2_parametric(
    e: &Ecdf,
    theta0: &BetaParams,
    kappa: f64,
    level: f64,
) -> Result<GofResult> {
    check_level(level)?;
    let theta0 = theta0.require_gt1()?;
    let theta_hat = beran_mle(e, kappa)?;
    let statistic = t2_statistic(&theta_hat, &theta0, e.len())?;
    Ok(GofResult {
        method: GofMethod::T2Parametric,
        statistic,
        p_value: chi2_2_sf(statistic)?,
        critical_value: 2.0 * (1.0 / level).ln(),
        level,
        fitted_theta: Some(theta_hat),
        mc_reps: None,
    })
}
