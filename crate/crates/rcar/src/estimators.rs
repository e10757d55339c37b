//! Coefficient estimation and nonparametric summaries.
//!
//! The lag-1 sample autocorrelation of each series estimates its AR
//! coefficient; the empirical distribution of those estimates, in turn,
//! estimates the coefficient law across the panel. A method-of-moments
//! map recovers Beta parameters from the first two moments, and a kernel
//! density estimator smooths the coefficient sample when a curve is more
//! useful than a step function.

use crate::error::{Error, Result};
use crate::fmtio::{fmt17, parse_f64, parse_usize};
use crate::sim::Panel;
use crate::special::BetaParams;
use rayon::prelude::*;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

/// Compensated (Kahan) accumulator; keeps long sums accurate to a few ulp.
#[derive(Default, Clone, Copy)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    fn add(&mut self, v: f64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum
    }
}

/// Lag-1 sample autocorrelation
/// `sum_{t<n} (x_t - mean)(x_{t+1} - mean) / sum_t (x_t - mean)^2`.
///
/// Always lies in `[-1, 1]` (Cauchy-Schwarz: the numerator has one fewer
/// term than the denominator) and is invariant under shifting and
/// rescaling the series. Needs at least 3 observations; a numerically
/// constant series has no defined autocorrelation.
pub fn lag1_autocorr(series: &[f64]) -> Result<f64> {
    if series.len() < 3 {
        return Err(Error::Domain(format!(
            "lag-1 autocorrelation needs at least 3 observations, got {}",
            series.len()
        )));
    }
    let n = series.len() as f64;
    let mut mean = Kahan::default();
    for &x in series {
        mean.add(x);
    }
    let mean = mean.value() / n;
    let mut num = Kahan::default();
    let mut den = Kahan::default();
    for w in series.windows(2) {
        num.add((w[0] - mean) * (w[1] - mean));
    }
    for &x in series {
        den.add((x - mean) * (x - mean));
    }
    let den = den.value();
    if den < 1e-300 {
        return Err(Error::DegenerateSeries { series: None });
    }
    Ok(num.value() / den)
}

/// Lag-1 sample autocorrelation without the sample-mean term:
/// `sum_{t<n} x_t x_{t+1} / sum_t x_t^2`.
///
/// Appropriate when the process mean is known to be zero, e.g. for
/// simulated panels. Skipping the estimated mean removes its
/// contribution to the estimator's finite-sample bias (roughly `-2a/n`
/// here versus `-(1+3a)/n` for [`lag1_autocorr`]), which measurably
/// sharpens distribution tests on zero-mean panels at moderate `n`.
pub fn lag1_autocorr_zero_mean(series: &[f64]) -> Result<f64> {
    if series.len() < 3 {
        return Err(Error::Domain(format!(
            "lag-1 autocorrelation needs at least 3 observations, got {}",
            series.len()
        )));
    }
    let mut num = Kahan::default();
    let mut den = Kahan::default();
    for w in series.windows(2) {
        num.add(w[0] * w[1]);
    }
    for &x in series {
        den.add(x * x);
    }
    let den = den.value();
    if den < 1e-300 {
        return Err(Error::DegenerateSeries { series: None });
    }
    Ok(num.value() / den)
}

/// Which mean goes into the lag-1 autocorrelation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Centering {
    /// Subtract the sample mean of each series ([`lag1_autocorr`]).
    Mean,
    /// Treat the process mean as exactly zero ([`lag1_autocorr_zero_mean`]).
    Zero,
}

impl Centering {
    pub fn parse(token: &str) -> Result<Self> {
        match token {
            "mean" => Ok(Self::Mean),
            "zero" => Ok(Self::Zero),
            other => Err(Error::Parse(format!(
                "unknown centering {other:?} (expected mean or zero)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Mean => "mean",
            Self::Zero => "zero",
        }
    }
}

/// Empirical distribution function of coefficient estimates.
///
/// Stores the points sorted, each tagged with the series it came from, so
/// later diagnostics can name the offending series.
#[derive(Debug, Clone)]
pub struct Ecdf {
    values: Vec<f64>,
    series: Vec<usize>,
}

impl Ecdf {
    /// Builds from `(series index, estimate)` pairs. Estimates must be
    /// finite and lie in `[-1, 1]`.
    pub fn from_indexed(pairs: Vec<(usize, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Domain("empirical distribution needs at least one point".into()));
        }
        for &(s, v) in &pairs {
            if !v.is_finite() || v.abs() > 1.0 {
                return Err(Error::Domain(format!(
                    "coefficient estimate {v} at series {s} is outside [-1, 1]"
                )));
            }
        }
        let mut pairs = pairs;
        pairs.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite values"));
        Ok(Self {
            values: pairs.iter().map(|p| p.1).collect(),
            series: pairs.iter().map(|p| p.0).collect(),
        })
    }

    /// Builds from bare values; series indices become input positions.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::from_indexed(values.iter().copied().enumerate().collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sorted estimates.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Original series index of the k-th sorted point.
    pub fn series_of(&self, k: usize) -> usize {
        self.series[k]
    }

    /// Right-continuous evaluation: the fraction of points `<= x`.
    pub fn eval(&self, x: f64) -> f64 {
        let count = self.values.partition_point(|v| *v <= x);
        count as f64 / self.values.len() as f64
    }

    /// First `m` raw sample moments: `mu_u = mean of v^u`, `u = 1..=m`.
    pub fn moments(&self, m: usize) -> MomentVector {
        let n = self.values.len() as f64;
        let mu = (1..=m)
            .map(|u| {
                let mut acc = Kahan::default();
                for &v in &self.values {
                    acc.add(v.powi(u as i32));
                }
                acc.value() / n
            })
            .collect();
        MomentVector { mu }
    }

    /// Writes the `series,a_hat` CSV, ordered by series index.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut rows: Vec<(usize, f64)> =
            self.series.iter().copied().zip(self.values.iter().copied()).collect();
        rows.sort_by_key(|r| r.0);
        writeln!(w, "series,a_hat")?;
        for (s, v) in rows {
            writeln!(w, "{s},{}", fmt17(v))?;
        }
        Ok(())
    }

    pub fn write_csv_file<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv(BufWriter::new(f))
    }

    /// Reads a `series,a_hat` CSV.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("coefficients CSV is empty".into()))??;
        if header.trim_end() != "series,a_hat" {
            return Err(Error::Parse(format!(
                "coefficients CSV header must be series,a_hat, got {header:?}"
            )));
        }
        let mut pairs = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (s, v) = line
                .trim_end()
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("coefficients CSV row {line:?} has no comma")))?;
            pairs.push((parse_usize(s, "series index")?, parse_f64(v, "a_hat")?));
        }
        Self::from_indexed(pairs)
    }

    pub fn read_csv_file<P: AsRef<Path>>(path: P) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_csv(BufReader::new(f))
    }
}

/// Raw sample moments `mu_1..mu_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    pub mu: Vec<f64>,
}

impl MomentVector {
    /// The `u`-th raw moment (1-based).
    pub fn get(&self, u: usize) -> f64 {
        self.mu[u - 1]
    }
}

/// Row-wise coefficient estimation: the lag-1 autocorrelation of every
/// series in the panel, packaged as an [`Ecdf`] (series indices here are
/// 1-based, matching the `x_1..x_N` panel columns).
pub fn estimate_coeffs(panel: &Panel) -> Result<Ecdf> {
    estimate_coeffs_with(panel, Centering::Mean)
}

/// [`estimate_coeffs`] with an explicit choice of [`Centering`].
pub fn estimate_coeffs_with(panel: &Panel, centering: Centering) -> Result<Ecdf> {
    let estimator = match centering {
        Centering::Mean => lag1_autocorr,
        Centering::Zero => lag1_autocorr_zero_mean,
    };
    let pairs: Vec<(usize, f64)> = (0..panel.n_series())
        .into_par_iter()
        .map(|i| {
            estimator(panel.series(i))
                .map(|v| (i + 1, v))
                .map_err(|e| match e {
                    Error::DegenerateSeries { .. } => {
                        Error::DegenerateSeries { series: Some(i + 1) }
                    }
                    other => other,
                })
        })
        .collect::<Result<Vec<_>>>()?;
    Ecdf::from_indexed(pairs)
}

/// Inverts the Beta moment map: given `mu1 = E U` and `mu2 = E U^2`,
/// `alpha = mu1 (mu1 - mu2) / (mu2 - mu1^2)` and
/// `beta = (1 - mu1) (mu1 - mu2) / (mu2 - mu1^2)`.
///
/// The moments of any non-degenerate law on `(0, 1)` satisfy the
/// preconditions; each error names the inequality that failed.
pub fn beta_mom(mu1: f64, mu2: f64) -> Result<BetaParams> {
    if !(mu1.is_finite() && mu2.is_finite()) {
        return Err(Error::MomentDomain(format!("moments must be finite, got ({mu1}, {mu2})")));
    }
    if mu2 <= 0.0 {
        return Err(Error::MomentDomain(format!("mu2 > 0 failed: mu2 = {mu2}")));
    }
    if mu1 <= mu2 {
        return Err(Error::MomentDomain(format!("mu1 > mu2 failed: mu1 = {mu1}, mu2 = {mu2}")));
    }
    if mu1 >= 1.0 {
        return Err(Error::MomentDomain(format!("mu1 < 1 failed: mu1 = {mu1}")));
    }
    let var = mu2 - mu1 * mu1;
    if var <= 0.0 {
        return Err(Error::MomentDomain(format!(
            "mu2 - mu1^2 > 0 failed: mu1 = {mu1}, mu2 = {mu2}"
        )));
    }
    let scale = (mu1 - mu2) / var;
    BetaParams::new(mu1 * scale, (1.0 - mu1) * scale)
}

/// Smoothing kernel on `[-1, 1]`, carrying its L2 norm and second moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    Epanechnikov,
    Triangular,
    Quartic,
}

impl Kernel {
    pub fn value(&self, x: f64) -> f64 {
        if x.abs() >= 1.0 {
            return 0.0;
        }
        match self {
            Self::Epanechnikov => 0.75 * (1.0 - x * x),
            Self::Triangular => 1.0 - x.abs(),
            Self::Quartic => {
                let u = 1.0 - x * x;
                (15.0 / 16.0) * u * u
            }
        }
    }

    /// `int K(x)^2 dx`.
    pub fn l2_norm_sq(&self) -> f64 {
        match self {
            Self::Epanechnikov => 0.6,
            Self::Triangular => 2.0 / 3.0,
            Self::Quartic => 5.0 / 7.0,
        }
    }

    /// `int x^2 K(x) dx`.
    pub fn second_moment(&self) -> f64 {
        match self {
            Self::Epanechnikov => 0.2,
            Self::Triangular => 1.0 / 6.0,
            Self::Quartic => 1.0 / 7.0,
        }
    }

    pub fn parse(token: &str) -> Result<Self> {
        match token.trim() {
            "epanechnikov" => Ok(Self::Epanechnikov),
            "triangular" => Ok(Self::Triangular),
            "quartic" => Ok(Self::Quartic),
            other => Err(Error::Parse(format!(
                "unknown kernel {other:?} (expected epanechnikov, triangular, or quartic)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Epanechnikov => "epanechnikov",
            Self::Triangular => "triangular",
            Self::Quartic => "quartic",
        }
    }
}

/// Kernel density estimate at `x`: `(1/(N h)) sum_i K((x - v_i)/h)`.
///
/// Evaluated lazily against every point (no binning). Near the support
/// endpoints +-1 the estimate carries the usual boundary bias; no
/// correction is applied.
pub fn kde_eval(e: &Ecdf, kernel: Kernel, h: f64, x: f64) -> Result<f64> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Domain(format!("bandwidth must be positive, got {h}")));
    }
    let mut acc = Kahan::default();
    for &v in e.values() {
        acc.add(kernel.value((x - v) / h));
    }
    Ok(acc.value() / (e.len() as f64 * h))
}

/// Evaluates the density estimate over a grid.
pub fn kde_curve(e: &Ecdf, kernel: Kernel, h: f64, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    grid.iter().map(|&x| Ok((x, kde_eval(e, kernel, h, x)?))).collect()
}

/// Reference bandwidth `h = c * N^(-1/5)`.
pub fn bandwidth_rule(n: usize, c: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("bandwidth rule needs at least one point".into()));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Domain(format!("bandwidth scale must be positive, got {c}")));
    }
    Ok(c * (n as f64).powf(-0.2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::sim::{simulate_panel, CoeffDist, PanelConfig};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn lag1_autocorr_hand_examples() {
        // [1,2,3,4]: centered products (1.25) over centered squares (5).
        assert_abs_diff_eq!(lag1_autocorr(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 0.25, epsilon = 1e-15);
        // Alternating series: -3/4.
        assert_abs_diff_eq!(
            lag1_autocorr(&[1.0, -1.0, 1.0, -1.0]).unwrap(),
            -0.75,
            epsilon = 1e-15
        );
    }

    #[test]
    fn lag1_autocorr_rejects_bad_input() {
        assert!(matches!(lag1_autocorr(&[1.0, 2.0]), Err(Error::Domain(_))));
        assert!(matches!(
            lag1_autocorr(&[3.0, 3.0, 3.0, 3.0]),
            Err(Error::DegenerateSeries { series: None })
        ));
    }

    #[test]
    fn lag1_autocorr_zero_mean_hand_examples() {
        // [1,2,3,4]: (2 + 6 + 12) / (1 + 4 + 9 + 16) = 20/30.
        assert_abs_diff_eq!(
            lag1_autocorr_zero_mean(&[1.0, 2.0, 3.0, 4.0]).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-15
        );
        // Alternating series has zero sample mean: both variants agree.
        assert_abs_diff_eq!(
            lag1_autocorr_zero_mean(&[1.0, -1.0, 1.0, -1.0]).unwrap(),
            -0.75,
            epsilon = 1e-15
        );
    }

    #[test]
    fn lag1_autocorr_zero_mean_rejects_bad_input() {
        assert!(matches!(lag1_autocorr_zero_mean(&[1.0, 2.0]), Err(Error::Domain(_))));
        assert!(matches!(
            lag1_autocorr_zero_mean(&[0.0, 0.0, 0.0, 0.0]),
            Err(Error::DegenerateSeries { series: None })
        ));
    }

    #[test]
    fn centering_parses_and_selects_estimator() {
        assert_eq!(Centering::parse("mean").unwrap(), Centering::Mean);
        assert_eq!(Centering::parse("zero").unwrap(), Centering::Zero);
        assert!(Centering::parse("median").is_err());
        assert_eq!(Centering::Mean.name(), "mean");

        let data = vec![1.0, 2.0, 3.0, 4.0];
        let panel = Panel::from_data(data, 1, 4);
        let mean = estimate_coeffs_with(&panel, Centering::Mean).unwrap();
        let zero = estimate_coeffs_with(&panel, Centering::Zero).unwrap();
        assert_eq!(mean.values(), &[0.25]);
        assert_abs_diff_eq!(zero.values()[0], 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn estimate_coeffs_names_the_degenerate_series() {
        let data = vec![1.0, 2.0, 3.0, 4.0, 5.0, 5.0, 5.0, 5.0];
        let panel = Panel::from_data(data, 2, 4);
        match estimate_coeffs(&panel) {
            Err(Error::DegenerateSeries { series: Some(2) }) => {}
            other => panic!("expected DegenerateSeries at series 2, got {other:?}"),
        }
    }

    #[test]
    fn estimate_coeffs_keeps_series_identity() {
        let data = vec![1.0, 2.0, 3.0, 4.0, 1.0, -1.0, 1.0, -1.0];
        let panel = Panel::from_data(data, 2, 4);
        let e = estimate_coeffs(&panel).unwrap();
        assert_eq!(e.values(), &[-0.75, 0.25]);
        assert_eq!(e.series_of(0), 2);
        assert_eq!(e.series_of(1), 1);
    }

    #[test]
    fn ecdf_evaluation_is_right_continuous() {
        let e = Ecdf::from_values(&[-0.5, 0.1, 0.1, 0.7]).unwrap();
        assert_eq!(e.eval(-1.0), 0.0);
        assert_eq!(e.eval(-0.5), 0.25);
        assert_eq!(e.eval(0.1), 0.75);
        assert_eq!(e.eval(0.0999), 0.25);
        assert_eq!(e.eval(0.7), 1.0);
        assert_eq!(e.eval(1.0), 1.0);
    }

    #[test]
    fn ecdf_rejects_out_of_range_points() {
        assert!(Ecdf::from_values(&[0.2, 1.5]).is_err());
        assert!(Ecdf::from_values(&[f64::NAN]).is_err());
        assert!(Ecdf::from_values(&[]).is_err());
        // Exactly +-1 is allowed: the estimator can attain the bound.
        assert!(Ecdf::from_values(&[-1.0, 1.0]).is_ok());
    }

    #[test]
    fn moments_of_a_small_sample() {
        let e = Ecdf::from_values(&[0.2, 0.4]).unwrap();
        let m = e.moments(2);
        assert_abs_diff_eq!(m.get(1), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(m.get(2), 0.1, epsilon = 1e-15);
    }

    #[test]
    fn beta_mom_hand_example() {
        // mu1 = 1/2, mu2 = 3/10 inverts to Beta(2, 2).
        let p = beta_mom(0.5, 0.3).unwrap();
        assert_abs_diff_eq!(p.alpha(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.beta(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn beta_mom_names_failed_inequalities() {
        let msg = |r: Result<BetaParams>| match r {
            Err(Error::MomentDomain(m)) => m,
            other => panic!("expected MomentDomain, got {other:?}"),
        };
        assert!(msg(beta_mom(0.5, 0.0)).contains("mu2 > 0"));
        assert!(msg(beta_mom(0.3, 0.4)).contains("mu1 > mu2"));
        // Zero variance: mu2 = mu1^2.
        assert!(msg(beta_mom(0.5, 0.25)).contains("mu2 - mu1^2"));
        assert!(msg(beta_mom(1.2, 0.9)).contains("mu1 < 1"));
    }

    #[test]
    fn estimates_tighten_as_series_grow() {
        // Median |a_hat - a0| over 200 series should shrink by at least
        // 1.6x per quadrupling of n.
        for (k, a0) in [-0.8, 0.0, 0.5, 0.9].iter().enumerate() {
            let mut medians = Vec::new();
            for (j, n) in [200usize, 800, 3200].iter().enumerate() {
                let cfg = PanelConfig::new(
                    200,
                    *n,
                    CoeffDist::point_mass(*a0).unwrap(),
                    0.0,
                    7_000 + (10 * k + j) as u64,
                );
                let panel = simulate_panel(&cfg).unwrap();
                let e = estimate_coeffs(&panel).unwrap();
                let mut errs: Vec<f64> = e.values().iter().map(|v| (v - a0).abs()).collect();
                errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
                medians.push(0.5 * (errs[99] + errs[100]));
            }
            for w in medians.windows(2) {
                assert!(
                    w[0] / w[1] >= 1.6,
                    "a0 = {a0}: median error {w:?} shrank less than 1.6x"
                );
            }
        }
    }

    #[test]
    fn kernel_shapes_and_constants() {
        assert_eq!(Kernel::Epanechnikov.value(0.0), 0.75);
        assert_eq!(Kernel::Triangular.value(0.0), 1.0);
        assert_eq!(Kernel::Quartic.value(0.0), 15.0 / 16.0);
        for k in [Kernel::Epanechnikov, Kernel::Triangular, Kernel::Quartic] {
            assert_eq!(k.value(1.0), 0.0);
            assert_eq!(k.value(-1.0), 0.0);
            assert_eq!(k.value(2.5), 0.0);
            // Verify the stored constants against Simpson quadrature of
            // the kernel itself.
            let simpson = |f: &dyn Fn(f64) -> f64| {
                let m = 20_000;
                let h = 2.0 / m as f64;
                let mut s = f(-1.0) + f(1.0);
                for i in 1..m {
                    let x = -1.0 + i as f64 * h;
                    s += f(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
                }
                s * h / 3.0
            };
            assert_abs_diff_eq!(simpson(&|x| k.value(x)), 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(simpson(&|x| k.value(x) * k.value(x)), k.l2_norm_sq(), epsilon = 1e-10);
            assert_abs_diff_eq!(simpson(&|x| x * x * k.value(x)), k.second_moment(), epsilon = 1e-10);
        }
    }

    #[test]
    fn kde_single_point() {
        let e = Ecdf::from_values(&[0.0]).unwrap();
        assert_abs_diff_eq!(
            kde_eval(&e, Kernel::Epanechnikov, 1.0, 0.0).unwrap(),
            0.75,
            epsilon = 1e-15
        );
        assert_eq!(kde_eval(&e, Kernel::Epanechnikov, 1.0, 1.0).unwrap(), 0.0);
        assert!(kde_eval(&e, Kernel::Epanechnikov, 0.0, 0.0).is_err());
        assert!(kde_eval(&e, Kernel::Epanechnikov, -0.5, 0.0).is_err());
    }

    #[test]
    fn bandwidth_rule_values() {
        assert_abs_diff_eq!(
            bandwidth_rule(250, 1.0).unwrap(),
            0.331_445_401_733_998_7,
            epsilon = 1e-15
        );
        assert_eq!(bandwidth_rule(1, 2.0).unwrap(), 2.0);
        assert!(bandwidth_rule(0, 1.0).is_err());
        assert!(bandwidth_rule(10, 0.0).is_err());
    }

    #[test]
    fn coefficients_csv_round_trip() {
        let e = Ecdf::from_indexed(vec![(1, 0.25), (2, -0.75), (3, 0.1)]).unwrap();
        let mut buf = Vec::new();
        e.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("series,a_hat\n1,"));
        let back = Ecdf::read_csv(std::io::BufReader::new(buf.as_slice())).unwrap();
        assert_eq!(back.values(), e.values());
        assert_eq!(
            (0..3).map(|k| back.series_of(k)).collect::<Vec<_>>(),
            (0..3).map(|k| e.series_of(k)).collect::<Vec<_>>()
        );
    }

    #[test]
    fn coefficients_csv_rejects_malformed_input() {
        let bad_header = b"ser,ahat\n1,0.5\n";
        assert!(Ecdf::read_csv(std::io::BufReader::new(&bad_header[..])).is_err());
        let bad_value = b"series,a_hat\n1,donkey\n";
        assert!(Ecdf::read_csv(std::io::BufReader::new(&bad_value[..])).is_err());
        let out_of_range = b"series,a_hat\n1,1.25\n";
        assert!(Ecdf::read_csv(std::io::BufReader::new(&out_of_range[..])).is_err());
    }

    proptest! {
        #[test]
        fn lag1_autocorr_is_bounded(xs in proptest::collection::vec(-1e3f64..1e3, 3..64)) {
            if let Ok(r) = lag1_autocorr(&xs) {
                prop_assert!((-1.0..=1.0).contains(&r));
            }
        }

        #[test]
        fn lag1_autocorr_zero_mean_is_bounded(
            xs in proptest::collection::vec(-1e3f64..1e3, 3..64),
        ) {
            if let Ok(r) = lag1_autocorr_zero_mean(&xs) {
                prop_assert!((-1.0..=1.0).contains(&r));
            }
        }

        #[test]
        fn lag1_autocorr_is_shift_scale_invariant(
            xs in proptest::collection::vec(-10.0f64..10.0, 8..64),
            shift in -100.0f64..100.0,
            scale in 0.1f64..50.0,
        ) {
            if let Ok(r) = lag1_autocorr(&xs) {
                let ys: Vec<f64> = xs.iter().map(|x| scale * x + shift).collect();
                let r2 = lag1_autocorr(&ys).unwrap();
                prop_assert!((r - r2).abs() < 1e-8, "{r} vs {r2}");
            }
        }

        #[test]
        fn beta_mom_round_trips_true_moments(a in 0.2f64..20.0, b in 0.2f64..20.0) {
            let p = BetaParams::new(a, b).unwrap();
            let back = beta_mom(p.raw_moment(1), p.raw_moment(2)).unwrap();
            prop_assert!((back.alpha() - a).abs() < 1e-9 * a.max(1.0));
            prop_assert!((back.beta() - b).abs() < 1e-9 * b.max(1.0));
        }

        #[test]
        fn kde_integrates_to_one(seed in 0u64..1000, n in 2usize..40) {
            let mut rng = stream(seed, 0);
            let vals: Vec<f64> = (0..n).map(|_| {
                use rand::Rng;
                rng.gen::<f64>() * 1.8 - 0.9
            }).collect();
            let e = Ecdf::from_values(&vals).unwrap();
            let h = bandwidth_rule(n, 1.0).unwrap();
            // Trapezoid over the full support of the estimate.
            let (lo, hi) = (-1.0 - h, 1.0 + h);
            let m = 4000;
            let step = (hi - lo) / m as f64;
            let mut mass = 0.5 * (kde_eval(&e, Kernel::Epanechnikov, h, lo).unwrap()
                + kde_eval(&e, Kernel::Epanechnikov, h, hi).unwrap());
            for i in 1..m {
                mass += kde_eval(&e, Kernel::Epanechnikov, h, lo + i as f64 * step).unwrap();
            }
            mass *= step;
            prop_assert!((mass - 1.0).abs() < 1e-4, "mass = {mass}");
        }
    }
}
