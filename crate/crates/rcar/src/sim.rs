//! Random-coefficient AR(1) panel simulator.
//!
//! Each of `N` series follows `X_i(t) = a_i X_i(t-1) + Z_i(t)` where the
//! coefficient `a_i` is drawn once per series from a [`CoeffDist`] and the
//! shocks mix a common and an idiosyncratic component,
//! `Z_i(t) = b * eta(t) + sqrt(1 - b^2) * xi_i(t)`, all innovations with
//! unit variance. `b = 0` gives independent series; `b = 1` makes every
//! series load on the same shock stream.
//!
//! The stationary law is approached by a burn-in: starting from
//! `X_i(-M) = 0`, the recursion runs `M` extra steps before sampling
//! begins, with `M = min(burnin_cap, max_i ceil(ln(burnin_eps)/ln|a_i|))`
//! so the discarded transient has geometric weight at most `burnin_eps`.
//! If the cap truncates the burn-in while the remaining weight still
//! exceeds `sqrt(burnin_eps)`, the panel records a warning instead of
//! failing.
//!
//! Randomness is organized as one ChaCha12 stream per purpose: stream
//! `(seed, COEFF, i)` draws `a_i`, `(seed, NOISE, i)` drives `xi_i`, and
//! `(seed, COMMON)` drives `eta`. Panels are therefore bit-reproducible
//! for a given config, independent of worker count.

use crate::error::{Error, Result};
use crate::fmtio::{fmt17, parse_f64, parse_u64, parse_usize};
use crate::quad::tanh_sinh;
use crate::rng::{counter_seed, stream};
use crate::special::{beta_cdf, ln_beta, BetaParams};
use rand::Rng;
use rand_distr::{Beta as BetaSampler, Distribution, StandardNormal, StudentT};
use rayon::prelude::*;
use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

/// Stream-family tags (second argument of the seed derivation).
const TAG_COEFF: u64 = 1;
const TAG_NOISE: u64 = 2;
const TAG_COMMON: u64 = 3;

/// Law of the random AR coefficient. Every variant keeps all mass
/// strictly inside `(-1, 1)`, so each series is stationary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoeffDist {
    /// Degenerate law: every series gets the same coefficient.
    PointMass { a0: f64 },
    /// Uniform on `(lo, hi)` with `-1 < lo < hi < 1`.
    Uniform { lo: f64, hi: f64 },
    /// Beta(alpha, beta) on `(0, 1)`.
    BetaOn01(BetaParams),
    /// Law of `sqrt(U)` with `U ~ Beta(alpha, beta)`; requires
    /// `alpha > 1` and `beta > 1`.
    SqrtBeta(BetaParams),
}

impl CoeffDist {
    pub fn point_mass(a0: f64) -> Result<Self> {
        if a0.is_finite() && a0.abs() < 1.0 {
            Ok(Self::PointMass { a0 })
        } else {
            Err(Error::Domain(format!("point mass must lie in (-1,1), got {a0}")))
        }
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && -1.0 < lo && lo < hi && hi < 1.0 {
            Ok(Self::Uniform { lo, hi })
        } else {
            Err(Error::Domain(format!(
                "uniform bounds must satisfy -1 < lo < hi < 1, got ({lo}, {hi})"
            )))
        }
    }

    pub fn beta_on_01(params: BetaParams) -> Self {
        Self::BetaOn01(params)
    }

    pub fn sqrt_beta(params: BetaParams) -> Result<Self> {
        Ok(Self::SqrtBeta(params.require_gt1()?))
    }

    /// CDF of the coefficient law, defined on all of `[-1, 1]`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        match *self {
            Self::PointMass { a0 } => Ok(if x >= a0 { 1.0 } else { 0.0 }),
            Self::Uniform { lo, hi } => Ok(((x - lo) / (hi - lo)).clamp(0.0, 1.0)),
            Self::BetaOn01(p) => {
                if x <= 0.0 {
                    Ok(0.0)
                } else if x >= 1.0 {
                    Ok(1.0)
                } else {
                    beta_cdf(x, p.alpha(), p.beta())
                }
            }
            Self::SqrtBeta(p) => {
                if x <= 0.0 {
                    Ok(0.0)
                } else if x >= 1.0 {
                    Ok(1.0)
                } else {
                    beta_cdf(x * x, p.alpha(), p.beta())
                }
            }
        }
    }

    /// Density of the law where one exists; the point mass has none.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        match *self {
            Self::PointMass { .. } => {
                Err(Error::Domain("a point mass has no density".into()))
            }
            Self::Uniform { lo, hi } => {
                Ok(if x > lo && x < hi { 1.0 / (hi - lo) } else { 0.0 })
            }
            Self::BetaOn01(p) => {
                if x <= 0.0 || x >= 1.0 {
                    return Ok(0.0);
                }
                let (a, b) = (p.alpha(), p.beta());
                Ok(((a - 1.0) * x.ln() + (b - 1.0) * (1.0 - x).ln() - ln_beta(a, b)?).exp())
            }
            Self::SqrtBeta(p) => {
                if x <= 0.0 || x >= 1.0 {
                    return Ok(0.0);
                }
                let (a, b) = (p.alpha(), p.beta());
                Ok(2.0
                    * ((2.0 * a - 1.0) * x.ln() + (b - 1.0) * (1.0 - x * x).ln()
                        - ln_beta(a, b)?)
                    .exp())
            }
        }
    }

    /// Draws one coefficient.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::PointMass { a0 } => a0,
            Self::Uniform { lo, hi } => lo + (hi - lo) * rng.gen::<f64>(),
            Self::BetaOn01(p) => BetaSampler::new(p.alpha(), p.beta())
                .expect("params validated")
                .sample(rng),
            Self::SqrtBeta(p) => BetaSampler::new(p.alpha(), p.beta())
                .expect("params validated")
                .sample(rng)
                .sqrt(),
        }
    }

    /// Parses the textual form used in config files and sidecar metadata:
    /// `point:A0`, `uniform:LO,HI`, `beta:ALPHA,BETA`, `sqrt-beta:ALPHA,BETA`.
    pub fn parse(token: &str) -> Result<Self> {
        let (kind, rest) = match token.split_once(':') {
            Some((k, r)) => (k.trim(), r.trim()),
            None => (token.trim(), ""),
        };
        let two = |rest: &str, what: &str| -> Result<(f64, f64)> {
            let (a, b) = rest.split_once(',').ok_or_else(|| {
                Error::Parse(format!("{what} needs two comma-separated parameters, got {rest:?}"))
            })?;
            Ok((parse_f64(a, what)?, parse_f64(b, what)?))
        };
        match kind {
            "point" => Self::point_mass(parse_f64(rest, "point mass")?),
            "uniform" => {
                let (lo, hi) = two(rest, "uniform")?;
                Self::uniform(lo, hi)
            }
            "beta" => {
                let (a, b) = two(rest, "beta")?;
                Ok(Self::beta_on_01(BetaParams::new(a, b)?))
            }
            "sqrt-beta" => {
                let (a, b) = two(rest, "sqrt-beta")?;
                Self::sqrt_beta(BetaParams::new(a, b)?)
            }
            other => Err(Error::Parse(format!(
                "unknown coefficient law {other:?} (expected point, uniform, beta, or sqrt-beta)"
            ))),
        }
    }
}

impl fmt::Display for CoeffDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::PointMass { a0 } => write!(f, "point:{a0}"),
            Self::Uniform { lo, hi } => write!(f, "uniform:{lo},{hi}"),
            Self::BetaOn01(p) => write!(f, "beta:{},{}", p.alpha(), p.beta()),
            Self::SqrtBeta(p) => write!(f, "sqrt-beta:{},{}", p.alpha(), p.beta()),
        }
    }
}

/// Innovation law; always normalized to unit variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InnovDist {
    StandardNormal,
    /// Student-t with `df > 4`, rescaled by `sqrt((df-2)/df)` to unit
    /// variance. The `df > 4` bound keeps fourth moments finite.
    StudentT { df: f64 },
}

impl InnovDist {
    pub fn student_t(df: f64) -> Result<Self> {
        if df.is_finite() && df > 4.0 {
            Ok(Self::StudentT { df })
        } else {
            Err(Error::Domain(format!("student-t innovations require df > 4, got {df}")))
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::StandardNormal => rng.sample(StandardNormal),
            Self::StudentT { df } => {
                let t: f64 = StudentT::new(df).expect("df validated").sample(rng);
                t * ((df - 2.0) / df).sqrt()
            }
        }
    }

    /// Parses `normal` or `student-t:DF`.
    pub fn parse(token: &str) -> Result<Self> {
        match token.trim() {
            "normal" => Ok(Self::StandardNormal),
            other => match other.split_once(':') {
                Some(("student-t", df)) => Self::student_t(parse_f64(df, "student-t df")?),
                _ => Err(Error::Parse(format!(
                    "unknown innovation law {other:?} (expected normal or student-t:DF)"
                ))),
            },
        }
    }
}

impl fmt::Display for InnovDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::StandardNormal => write!(f, "normal"),
            Self::StudentT { df } => write!(f, "student-t:{df}"),
        }
    }
}

pub const DEFAULT_BURNIN_EPS: f64 = 1e-9;
pub const DEFAULT_BURNIN_CAP: usize = 100_000;

/// Full description of one panel draw.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelConfig {
    /// Number of series `N`.
    pub n_series: usize,
    /// Observations per series `n`.
    pub n_obs: usize,
    pub coeff: CoeffDist,
    /// Common-shock loading `b` in `[0, 1]`.
    pub shock_b: f64,
    pub innov: InnovDist,
    /// Geometric weight the burn-in is allowed to leave behind.
    pub burnin_eps: f64,
    /// Hard upper bound on the burn-in length.
    pub burnin_cap: usize,
    pub seed: u64,
}

impl PanelConfig {
    /// Standard-normal innovations and default burn-in settings.
    pub fn new(n_series: usize, n_obs: usize, coeff: CoeffDist, shock_b: f64, seed: u64) -> Self {
        Self {
            n_series,
            n_obs,
            coeff,
            shock_b,
            innov: InnovDist::StandardNormal,
            burnin_eps: DEFAULT_BURNIN_EPS,
            burnin_cap: DEFAULT_BURNIN_CAP,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_series == 0 {
            return Err(Error::Config("n_series must be at least 1".into()));
        }
        if self.n_obs == 0 {
            return Err(Error::Config("n_obs must be at least 1".into()));
        }
        if !(self.shock_b.is_finite() && (0.0..=1.0).contains(&self.shock_b)) {
            return Err(Error::Config(format!(
                "shock_b must lie in [0,1], got {}",
                self.shock_b
            )));
        }
        if !(self.burnin_eps > 0.0 && self.burnin_eps < 1.0) {
            return Err(Error::Config(format!(
                "burnin_eps must lie in (0,1), got {}",
                self.burnin_eps
            )));
        }
        if self.burnin_cap == 0 {
            return Err(Error::Config("burnin_cap must be at least 1".into()));
        }
        Ok(())
    }

    /// Serializes as the sidecar `key=value` block.
    pub fn to_meta_string(&self) -> String {
        format!(
            "n_series={}\nn_obs={}\ncoeff={}\nshock_b={}\ninnov={}\nburnin_eps={}\nburnin_cap={}\nseed={}\n",
            self.n_series, self.n_obs, self.coeff, self.shock_b, self.innov,
            self.burnin_eps, self.burnin_cap, self.seed
        )
    }

    /// Parses the sidecar block written by [`Self::to_meta_string`].
    /// Unknown keys are rejected; `burnin_len` and `burnin_warning`
    /// (panel provenance, not configuration) are tolerated and ignored.
    pub fn from_meta_str(text: &str) -> Result<Self> {
        let mut n_series = None;
        let mut n_obs = None;
        let mut coeff = None;
        let mut shock_b = None;
        let mut innov = None;
        let mut burnin_eps = None;
        let mut burnin_cap = None;
        let mut seed = None;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("metadata line has no '=': {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "n_series" => n_series = Some(parse_usize(value, "n_series")?),
                "n_obs" => n_obs = Some(parse_usize(value, "n_obs")?),
                "coeff" => coeff = Some(CoeffDist::parse(value)?),
                "shock_b" => shock_b = Some(parse_f64(value, "shock_b")?),
                "innov" => innov = Some(InnovDist::parse(value)?),
                "burnin_eps" => burnin_eps = Some(parse_f64(value, "burnin_eps")?),
                "burnin_cap" => burnin_cap = Some(parse_usize(value, "burnin_cap")?),
                "seed" => seed = Some(parse_u64(value, "seed")?),
                "burnin_len" | "burnin_warning" => {}
                other => {
                    return Err(Error::Parse(format!("unknown metadata key {other:?}")));
                }
            }
        }
        let missing = |what: &str| Error::Parse(format!("metadata is missing key {what:?}"));
        let cfg = Self {
            n_series: n_series.ok_or_else(|| missing("n_series"))?,
            n_obs: n_obs.ok_or_else(|| missing("n_obs"))?,
            coeff: coeff.ok_or_else(|| missing("coeff"))?,
            shock_b: shock_b.ok_or_else(|| missing("shock_b"))?,
            innov: innov.unwrap_or(InnovDist::StandardNormal),
            burnin_eps: burnin_eps.unwrap_or(DEFAULT_BURNIN_EPS),
            burnin_cap: burnin_cap.unwrap_or(DEFAULT_BURNIN_CAP),
            seed: seed.ok_or_else(|| missing("seed"))?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// A simulated or imported panel: `n_series` rows of `n_obs` observations.
#[derive(Debug, Clone)]
pub struct Panel {
    data: Vec<f64>, // row-major, series i at [i*n_obs, (i+1)*n_obs)
    n_series: usize,
    n_obs: usize,
    /// True sampled coefficients; `None` for imported panels.
    coeffs: Option<Vec<f64>>,
    /// Generating configuration; `None` for imported panels without a
    /// metadata sidecar.
    pub config: Option<PanelConfig>,
    /// Burn-in steps actually discarded (0 for imported panels).
    pub burnin_len: usize,
    /// Set when the burn-in cap truncated a transient that still carried
    /// geometric weight above `sqrt(burnin_eps)`.
    pub burnin_warning: Option<String>,
}

impl Panel {
    pub fn n_series(&self) -> usize {
        self.n_series
    }

    pub fn n_obs(&self) -> usize {
        self.n_obs
    }

    pub fn series(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_obs..(i + 1) * self.n_obs]
    }

    pub fn coeffs(&self) -> Option<&[f64]> {
        self.coeffs.as_deref()
    }

    /// Builds a panel directly from row-major data (used by the importer
    /// and by tests).
    pub(crate) fn from_data(data: Vec<f64>, n_series: usize, n_obs: usize) -> Self {
        debug_assert_eq!(data.len(), n_series * n_obs);
        Self {
            data,
            n_series,
            n_obs,
            coeffs: None,
            config: None,
            burnin_len: 0,
            burnin_warning: None,
        }
    }

    /// Writes the panel as CSV: header `t,x_1,...,x_N`, one row per time
    /// index (1-based), every value with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let mut header = String::from("t");
        for i in 1..=self.n_series {
            header.push_str(&format!(",x_{i}"));
        }
        writeln!(w, "{header}")?;
        for t in 0..self.n_obs {
            let mut row = format!("{}", t + 1);
            for i in 0..self.n_series {
                row.push(',');
                row.push_str(&fmt17(self.data[i * self.n_obs + t]));
            }
            writeln!(w, "{row}")?;
        }
        Ok(())
    }

    pub fn write_csv_file<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv(BufWriter::new(f))
    }

    /// Writes the `key=value` sidecar recording the full configuration
    /// plus burn-in provenance. Errors for imported panels, which have no
    /// configuration to record.
    pub fn write_meta_file<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let cfg = self.config.as_ref().ok_or_else(|| {
            Error::Config("panel has no configuration to write (imported data)".into())
        })?;
        let mut text = cfg.to_meta_string();
        text.push_str(&format!("burnin_len={}\n", self.burnin_len));
        if let Some(w) = &self.burnin_warning {
            text.push_str(&format!("burnin_warning={w}\n"));
        }
        std::fs::write(path, text)?;
        Ok(())
    }

    /// Reads a panel written by [`Self::write_csv`].
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("panel CSV is empty".into()))??;
        let cols: Vec<&str> = header.trim_end().split(',').collect();
        if cols.first() != Some(&"t") || cols.len() < 2 {
            return Err(Error::Parse(format!(
                "panel CSV header must be t,x_1,...,x_N, got {header:?}"
            )));
        }
        for (i, c) in cols[1..].iter().enumerate() {
            let expect = format!("x_{}", i + 1);
            if *c != expect {
                return Err(Error::Parse(format!(
                    "panel CSV header column {} should be {expect}, got {c:?}",
                    i + 2
                )));
            }
        }
        let n_series = cols.len() - 1;
        let mut columns: Vec<Vec<f64>> = vec![Vec::new(); n_series];
        for (row_idx, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.trim_end().split(',').collect();
            if fields.len() != n_series + 1 {
                return Err(Error::Parse(format!(
                    "panel CSV row {} has {} fields, expected {}",
                    row_idx + 2,
                    fields.len(),
                    n_series + 1
                )));
            }
            parse_usize(fields[0], "panel CSV time index")?;
            for (i, f) in fields[1..].iter().enumerate() {
                columns[i].push(parse_f64(f, "panel CSV value")?);
            }
        }
        let n_obs = columns[0].len();
        if n_obs == 0 {
            return Err(Error::Parse("panel CSV has no data rows".into()));
        }
        let mut data = Vec::with_capacity(n_series * n_obs);
        for col in &columns {
            data.extend_from_slice(col);
        }
        Ok(Self::from_data(data, n_series, n_obs))
    }

    pub fn read_csv_file<P: AsRef<Path>>(path: P) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_csv(BufReader::new(f))
    }

    /// Reads a panel and restores its configuration from the sidecar.
    pub fn read_with_meta<P: AsRef<Path>, Q: AsRef<Path>>(csv: P, meta: Q) -> Result<Self> {
        let mut panel = Self::read_csv_file(csv)?;
        let cfg = PanelConfig::from_meta_str(&std::fs::read_to_string(meta)?)?;
        if cfg.n_series != panel.n_series || cfg.n_obs != panel.n_obs {
            return Err(Error::Parse(format!(
                "metadata says {}x{} but the CSV holds {}x{}",
                cfg.n_series, cfg.n_obs, panel.n_series, panel.n_obs
            )));
        }
        panel.config = Some(cfg);
        Ok(panel)
    }
}

/// Burn-in length for the largest coefficient magnitude in the panel:
/// smallest `M` with `|a_max|^M <= eps`, capped at `cap`. Returns the
/// length and the warning (if the cap bit while significant weight
/// remained).
pub(crate) fn burnin_length(a_max_abs: f64, eps: f64, cap: usize) -> (usize, Option<String>) {
    debug_assert!((0.0..1.0).contains(&a_max_abs));
    if a_max_abs == 0.0 {
        return (0, None);
    }
    // ln(eps)/ln|a|; |a| -> 0 drives the ratio to 0.
    let raw = (eps.ln() / a_max_abs.ln()).ceil();
    if raw <= cap as f64 {
        (raw as usize, None)
    } else {
        let remaining = a_max_abs.powi(cap.min(i32::MAX as usize) as i32);
        let warning = if remaining > eps.sqrt() {
            Some(format!(
                "burn-in cap {cap} reached; remaining geometric weight {remaining:.3e} exceeds sqrt(burnin_eps) = {:.3e}",
                eps.sqrt()
            ))
        } else {
            None
        };
        (cap, warning)
    }
}

/// Simulates a panel under `cfg`. Bit-reproducible for a given config,
/// regardless of thread count.
pub fn simulate_panel(cfg: &PanelConfig) -> Result<Panel> {
    cfg.validate()?;
    let n = cfg.n_obs;
    let big_n = cfg.n_series;

    // One stream per series for the coefficient draw.
    let coeff_base = counter_seed(cfg.seed, TAG_COEFF);
    let coeffs: Vec<f64> = (0..big_n)
        .map(|i| cfg.coeff.sample(&mut stream(coeff_base, i as u64)))
        .collect();

    let a_max = coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let (burnin, warning) = burnin_length(a_max, cfg.burnin_eps, cfg.burnin_cap);
    let total = burnin + n;

    // The common stream is consumed only when it actually loads.
    let b = cfg.shock_b;
    let eta: Vec<f64> = if b > 0.0 {
        let mut rng = stream(counter_seed(cfg.seed, TAG_COMMON), 0);
        (0..total).map(|_| cfg.innov.sample(&mut rng)).collect()
    } else {
        Vec::new()
    };
    let c = (1.0 - b * b).sqrt();

    let noise_base = counter_seed(cfg.seed, TAG_NOISE);
    let mut data = vec![0.0f64; big_n * n];
    data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let a = coeffs[i];
        let mut rng = stream(noise_base, i as u64);
        let mut x = 0.0f64;
        for j in 0..total {
            let xi = cfg.innov.sample(&mut rng);
            let z = if b > 0.0 { b * eta[j] + c * xi } else { xi };
            x = a * x + z;
            if j >= burnin {
                row[j - burnin] = x;
            }
        }
    });

    Ok(Panel {
        data,
        n_series: big_n,
        n_obs: n,
        coeffs: Some(coeffs),
        config: Some(cfg.clone()),
        burnin_len: burnin,
        burnin_warning: warning,
    })
}

/// Stationary autocovariance `E X(0) X(lag)` of a panel series with unit
/// innovation variance: the integral of `x^lag / (1 - x^2)` against the
/// coefficient law.
///
/// Closed form for a point mass; tanh-sinh quadrature (relative error
/// driven to `1e-9`) otherwise. Beta-type laws need `beta > 1`, or the
/// mass near `x = 1` makes the integral diverge.
pub fn theoretical_autocov(dist: &CoeffDist, lag: usize) -> Result<f64> {
    let lag_f = lag as f64;
    let not_integrable = || {
        Err(Error::Integrability(
            "coefficient mass near x = 1 is too heavy: the moment integral requires beta > 1"
                .into(),
        ))
    };
    match *dist {
        CoeffDist::PointMass { a0 } => Ok(a0.powi(lag as i32) / (1.0 - a0 * a0)),
        CoeffDist::Uniform { lo, hi } => {
            let v = tanh_sinh(
                |x, am, bm| {
                    // (1 - x^2) never vanishes: the support is interior.
                    let _ = (am, bm);
                    x.powi(lag as i32) / ((1.0 - x) * (1.0 + x))
                },
                lo,
                hi,
                1e-9,
            )?;
            Ok(v / (hi - lo))
        }
        CoeffDist::BetaOn01(p) => {
            if p.beta() <= 1.0 {
                return not_integrable();
            }
            let (a, b) = (p.alpha(), p.beta());
            let ln_b = ln_beta(a, b)?;
            // x^(lag + alpha - 1) (1-x)^(beta-2) (1+x)^(-1) / B(alpha, beta)
            let v = tanh_sinh(
                |x, am, bm| {
                    (-ln_b).exp() * am.powf(lag_f + a - 1.0) * bm.powf(b - 2.0) / (1.0 + x)
                },
                0.0,
                1.0,
                1e-9,
            )
            .map_err(|_| {
                Error::Integrability("quadrature failed to converge near x = 1".into())
            })?;
            Ok(v)
        }
        CoeffDist::SqrtBeta(p) => {
            if p.beta() <= 1.0 {
                return not_integrable();
            }
            let (a, b) = (p.alpha(), p.beta());
            let ln_b = ln_beta(a, b)?;
            // 2 x^(2 alpha - 1 + lag) (1-x)^(beta-2) (1+x)^(beta-2) / B
            let v = tanh_sinh(
                |x, am, bm| {
                    2.0 * (-ln_b).exp()
                        * am.powf(2.0 * a - 1.0 + lag_f)
                        * bm.powf(b - 2.0)
                        * (1.0 + x).powf(b - 2.0)
                },
                0.0,
                1.0,
                1e-9,
            )
            .map_err(|_| {
                Error::Integrability("quadrature failed to converge near x = 1".into())
            })?;
            Ok(v)
        }
    }
}
