//! Monte Carlo study harness.
//!
//! Runs the size/power experiment: for each alternative coefficient law
//! and each replication, simulate a panel, estimate the coefficients,
//! and test them against the null with both the KS statistic and the
//! parametric Wald statistic. Results land in two CSV artifacts (per-rep
//! rows and a rejection-rate summary) plus p-value ECDF curves for
//! plotting, all byte-deterministic in the seed regardless of how many
//! workers execute the cells.

use crate::error::{Error, Result};
use crate::estimators::{estimate_coeffs_with, Centering};
use crate::fmtio::{fmt17, parse_f64, parse_u64, parse_usize};
use crate::gof::{t1_simple, t2_parametric};
use crate::rng::counter_seed;
use crate::sim::{simulate_panel, CoeffDist, PanelConfig};
use crate::special::BetaParams;
use rayon::prelude::*;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

/// Stream tag separating study-level seed derivation from the tags used
/// inside the simulator.
const TAG_STUDY: u64 = 4;

/// Full description of one study run.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    /// Panels per (alternative, level) cell.
    pub reps: usize,
    /// Series per panel `N`.
    pub n_series: usize,
    /// Observations per series `n`.
    pub n_obs: usize,
    /// Null parameters: the data are tested against sqrt-Beta(theta0).
    pub theta0: BetaParams,
    /// Coefficient laws the panels are actually drawn from (sqrt-Beta).
    pub alternatives: Vec<BetaParams>,
    /// Common-shock loading passed through to the simulator.
    pub shock_b: f64,
    /// MLE truncation; `None` selects `1/(2 sqrt(n))`.
    pub kappa: Option<f64>,
    /// Which lag-1 autocorrelation goes into the estimates. `Mean` is the
    /// general-purpose default; `Zero` suits simulated panels, whose
    /// process mean is exactly zero, and halves the estimator's O(1/n)
    /// bias, which visibly shifts size and power at moderate `n`.
    pub centering: Centering,
    /// Bootstrap replications for composite-test runs driven from the
    /// same config file; the study itself does not consume it.
    pub mc_reps: usize,
    /// Test levels, kept sorted ascending.
    pub levels: Vec<f64>,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl StudyConfig {
    /// Parses the flat `key = value` format.
    ///
    /// Keys: `reps`, `N`, `n`, `alpha0`, `beta0`, `alt` (repeatable
    /// `alpha,beta` pair), `shock_b`, `kappa`, `mc_reps`, `level`
    /// (repeatable), `seed`, `centering` (`mean` or `zero`), `out_dir`.
    /// Blank lines and lines starting with `#` are skipped. `N`, `n`,
    /// `alpha0`, `beta0`, at least one `alt`, and `out_dir` are required;
    /// `reps` defaults to 500, `mc_reps` to 1000, `shock_b` to 0, `seed`
    /// to 0, `centering` to `mean`, and the levels to 0.05 and 0.10.
    /// Scalar keys may appear only once.
    pub fn parse(text: &str) -> Result<Self> {
        let mut reps = None;
        let mut n_series = None;
        let mut n_obs = None;
        let mut alpha0 = None;
        let mut beta0 = None;
        let mut alternatives: Vec<BetaParams> = Vec::new();
        let mut shock_b = None;
        let mut kappa = None;
        let mut mc_reps = None;
        let mut levels: Vec<f64> = Vec::new();
        let mut seed = None;
        let mut centering = None;
        let mut out_dir: Option<PathBuf> = None;

        fn put<T>(slot: &mut Option<T>, key: &str, value: T) -> Result<()> {
            if slot.is_some() {
                return Err(Error::Config(format!("study config key `{key}` appears twice")));
            }
            *slot = Some(value);
            Ok(())
        }

        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("study config line {line:?} has no `=`")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "reps" => put(&mut reps, key, parse_usize(value, "reps")?)?,
                "N" => put(&mut n_series, key, parse_usize(value, "N")?)?,
                "n" => put(&mut n_obs, key, parse_usize(value, "n")?)?,
                "alpha0" => put(&mut alpha0, key, parse_f64(value, "alpha0")?)?,
                "beta0" => put(&mut beta0, key, parse_f64(value, "beta0")?)?,
                "alt" => {
                    let (a, b) = value.split_once(',').ok_or_else(|| {
                        Error::Config(format!("alt must be `alpha,beta`, got {value:?}"))
                    })?;
                    alternatives.push(BetaParams::new(
                        parse_f64(a, "alt alpha")?,
                        parse_f64(b, "alt beta")?,
                    )?);
                }
                "shock_b" => put(&mut shock_b, key, parse_f64(value, "shock_b")?)?,
                "kappa" => put(&mut kappa, key, parse_f64(value, "kappa")?)?,
                "mc_reps" => put(&mut mc_reps, key, parse_usize(value, "mc_reps")?)?,
                "level" => levels.push(parse_f64(value, "level")?),
                "seed" => put(&mut seed, key, parse_u64(value, "seed")?)?,
                "centering" => put(&mut centering, key, Centering::parse(value)?)?,
                "out_dir" => put(&mut out_dir, key, PathBuf::from(value))?,
                other => {
                    return Err(Error::Config(format!("unknown study config key `{other}`")));
                }
            }
        }

        let require = |name: &str, missing: bool| -> Result<()> {
            if missing {
                Err(Error::Config(format!("study config is missing required key `{name}`")))
            } else {
                Ok(())
            }
        };
        require("N", n_series.is_none())?;
        require("n", n_obs.is_none())?;
        require("alpha0", alpha0.is_none())?;
        require("beta0", beta0.is_none())?;
        require("alt", alternatives.is_empty())?;
        require("out_dir", out_dir.is_none())?;

        let cfg = Self {
            reps: reps.unwrap_or(500),
            n_series: n_series.unwrap(),
            n_obs: n_obs.unwrap(),
            theta0: BetaParams::new(alpha0.unwrap(), beta0.unwrap())?,
            alternatives,
            shock_b: shock_b.unwrap_or(0.0),
            kappa,
            mc_reps: mc_reps.unwrap_or(1000),
            levels: if levels.is_empty() { vec![0.05, 0.10] } else { levels },
            seed: seed.unwrap_or(0),
            centering: centering.unwrap_or(Centering::Mean),
            out_dir: out_dir.unwrap(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Checks every invariant and sorts the levels ascending.
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::Config("study needs reps >= 1".into()));
        }
        if self.n_series == 0 || self.n_obs < 3 {
            return Err(Error::Config(format!(
                "study needs N >= 1 and n >= 3, got N = {}, n = {}",
                self.n_series, self.n_obs
            )));
        }
        self.theta0.require_gt1()?;
        if self.alternatives.is_empty() {
            return Err(Error::Config("study needs at least one alternative".into()));
        }
        for alt in &self.alternatives {
            alt.require_gt1()?;
        }
        if !(self.shock_b.is_finite() && (0.0..=1.0).contains(&self.shock_b)) {
            return Err(Error::Config(format!(
                "shock_b must lie in [0, 1], got {}",
                self.shock_b
            )));
        }
        if let Some(k) = self.kappa {
            if !(k.is_finite() && (0.0..0.5).contains(&k)) {
                return Err(Error::Config(format!("kappa must lie in [0, 0.5), got {k}")));
            }
        }
        if self.mc_reps == 0 {
            return Err(Error::Config("mc_reps must be positive".into()));
        }
        if self.levels.is_empty() {
            return Err(Error::Config("study needs at least one level".into()));
        }
        for &lv in &self.levels {
            if !(lv.is_finite() && 0.0 < lv && lv < 1.0) {
                return Err(Error::Config(format!("levels must lie in (0, 1), got {lv}")));
            }
        }
        if self.levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "levels must be sorted ascending without duplicates".into(),
            ));
        }
        Ok(())
    }

    /// The truncation actually used: the configured value, or the
    /// `1/(2 sqrt(n))` default.
    pub fn effective_kappa(&self) -> f64 {
        self.kappa.unwrap_or(0.5 / (self.n_obs as f64).sqrt())
    }
}

/// One replication's test results; `None` marks a failed computation.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    /// Beta parameter of the alternative the panel was drawn from.
    pub beta_alt: f64,
    /// Replication number, 1-based.
    pub rep: usize,
    pub t1: Option<f64>,
    pub p1: Option<f64>,
    pub t2: Option<f64>,
    pub p2: Option<f64>,
}

impl StudyRow {
    pub const CSV_HEADER: &'static str = "beta_alt,rep,t1,p1,t2,p2";

    fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(fmt17).unwrap_or_default();
        format!(
            "{},{},{},{},{},{}",
            fmt17(self.beta_alt),
            self.rep,
            opt(self.t1),
            opt(self.p1),
            opt(self.t2),
            opt(self.p2),
        )
    }

    fn complete(&self) -> bool {
        self.t1.is_some() && self.p1.is_some() && self.t2.is_some() && self.p2.is_some()
    }
}

/// Execution options orthogonal to the experiment definition.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads for the cell fan-out. `None` defers to the
    /// `RCAR_WORKERS` environment variable, and absent that to the
    /// hardware default. Results are identical for every worker count.
    pub workers: Option<usize>,
}

/// Paths and in-memory rows produced by [`run_study`].
#[derive(Debug, Clone)]
pub struct StudyArtifacts {
    pub rows: Vec<StudyRow>,
    pub rows_path: PathBuf,
    pub summary_path: PathBuf,
    /// P-value ECDF curves, one file per test statistic.
    pub pvalue_paths: Vec<PathBuf>,
}

fn resolve_workers(opts: &RunOptions) -> Result<Option<usize>> {
    let k = match opts.workers {
        Some(k) => Some(k),
        None => match std::env::var("RCAR_WORKERS") {
            Ok(s) => Some(parse_usize(s.trim(), "RCAR_WORKERS")?),
            Err(std::env::VarError::NotPresent) => None,
            Err(e) => return Err(Error::Config(format!("RCAR_WORKERS is not readable: {e}"))),
        },
    };
    if k == Some(0) {
        return Err(Error::Config("worker count must be at least 1".into()));
    }
    Ok(k)
}

fn run_cell(cfg: &StudyConfig, null: &CoeffDist, alt_idx: usize, rep: usize) -> StudyRow {
    let alt = cfg.alternatives[alt_idx];
    let mut row = StudyRow {
        beta_alt: alt.beta(),
        rep: rep + 1,
        t1: None,
        p1: None,
        t2: None,
        p2: None,
    };
    // Nested counters: one derivation step per index keeps every cell's
    // stream independent of the execution order.
    let cell_seed = counter_seed(
        counter_seed(counter_seed(cfg.seed, TAG_STUDY), alt_idx as u64),
        rep as u64,
    );
    let coeff = match CoeffDist::sqrt_beta(alt) {
        Ok(c) => c,
        Err(_) => return row,
    };
    let pcfg = PanelConfig::new(cfg.n_series, cfg.n_obs, coeff, cfg.shock_b, cell_seed);
    let e = match simulate_panel(&pcfg).and_then(|p| estimate_coeffs_with(&p, cfg.centering)) {
        Ok(e) => e,
        Err(_) => return row,
    };
    let level = cfg.levels[0];
    if let Ok(r) = t1_simple(&e, null, level) {
        row.t1 = Some(r.statistic);
        row.p1 = Some(r.p_value);
    }
    if let Ok(r) = t2_parametric(&e, &cfg.theta0, cfg.effective_kappa(), level) {
        row.t2 = Some(r.statistic);
        row.p2 = Some(r.p_value);
    }
    row
}

/// Runs the full study and writes `rows.csv`, `summary.csv`, and the
/// p-value curve files into the configured output directory.
///
/// Cells are independent `(alternative, rep)` tasks. Each derives its own
/// seed from the study seed and the two indices, and the results are
/// merged in index order, so artifacts are byte-identical for any worker
/// count. Per-cell failures (for example, an MLE that does not converge)
/// leave the affected fields empty and are counted in the summary; the
/// study itself never aborts on one.
pub fn run_study(cfg: &StudyConfig, opts: &RunOptions) -> Result<StudyArtifacts> {
    cfg.validate()?;
    let null = CoeffDist::sqrt_beta(cfg.theta0)?;
    let cells: Vec<(usize, usize)> = (0..cfg.alternatives.len())
        .flat_map(|a| (0..cfg.reps).map(move |r| (a, r)))
        .collect();
    let compute = || -> Vec<StudyRow> {
        cells
            .par_iter()
            .map(|&(alt_idx, rep)| run_cell(cfg, &null, alt_idx, rep))
            .collect()
    };
    let rows = match resolve_workers(opts)? {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Config(format!("cannot build a {k}-worker pool: {e}")))?
            .install(compute),
        None => compute(),
    };

    std::fs::create_dir_all(&cfg.out_dir)?;
    let rows_path = cfg.out_dir.join("rows.csv");
    {
        let mut w = BufWriter::new(std::fs::File::create(&rows_path)?);
        writeln!(w, "{}", StudyRow::CSV_HEADER)?;
        for row in &rows {
            writeln!(w, "{}", row.csv_row())?;
        }
    }

    let summary_path = cfg.out_dir.join("summary.csv");
    {
        let mut w = BufWriter::new(std::fs::File::create(&summary_path)?);
        writeln!(w, "beta_alt,level,size_or_power_t1,size_or_power_t2,reps_ok,reps_failed")?;
        for (alt_idx, alt) in cfg.alternatives.iter().enumerate() {
            let block = &rows[alt_idx * cfg.reps..(alt_idx + 1) * cfg.reps];
            let ok: Vec<&StudyRow> = block.iter().filter(|r| r.complete()).collect();
            let (reps_ok, reps_failed) = (ok.len(), block.len() - ok.len());
            for &level in &cfg.levels {
                // Rejection = p-value strictly below the level, matching
                // the statistic-exceeds-critical-value decision exactly.
                let rate = |pick: fn(&StudyRow) -> Option<f64>| -> String {
                    if reps_ok == 0 {
                        return String::new();
                    }
                    let hits = ok.iter().filter(|r| pick(r).unwrap() < level).count();
                    fmt17(hits as f64 / reps_ok as f64)
                };
                writeln!(
                    w,
                    "{},{},{},{},{reps_ok},{reps_failed}",
                    fmt17(alt.beta()),
                    fmt17(level),
                    rate(|r| r.p1),
                    rate(|r| r.p2),
                )?;
            }
        }
    }

    let mut pvalue_paths = Vec::new();
    for (which, name) in [(WhichTest::T1, "pvalues_t1.csv"), (WhichTest::T2, "pvalues_t2.csv")] {
        let path = cfg.out_dir.join(name);
        let mut w = BufWriter::new(std::fs::File::create(&path)?);
        writeln!(w, "beta_alt,p,ecdf")?;
        for (alt_idx, alt) in cfg.alternatives.iter().enumerate() {
            let block = &rows[alt_idx * cfg.reps..(alt_idx + 1) * cfg.reps];
            if let Ok(curve) = pvalue_ecdf(block, which) {
                for (p, h) in curve {
                    writeln!(w, "{},{},{}", fmt17(alt.beta()), fmt17(p), fmt17(h))?;
                }
            }
        }
        pvalue_paths.push(path);
    }

    Ok(StudyArtifacts { rows, rows_path, summary_path, pvalue_paths })
}

/// Selects which statistic's p-values to read from study rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WhichTest {
    T1,
    T2,
}

/// Empirical CDF of the collected p-values as exact step data: sorted
/// distinct p-values paired with the fraction of p-values at or below
/// each. Failed replications are skipped.
pub fn pvalue_ecdf(rows: &[StudyRow], which: WhichTest) -> Result<Vec<(f64, f64)>> {
    let mut ps: Vec<f64> = rows
        .iter()
        .filter_map(|r| match which {
            WhichTest::T1 => r.p1,
            WhichTest::T2 => r.p2,
        })
        .collect();
    if ps.is_empty() {
        return Err(Error::Domain(
            "p-value curve needs at least one successful replication".into(),
        ));
    }
    ps.sort_by(|a, b| a.partial_cmp(b).expect("p-values are finite"));
    let n = ps.len() as f64;
    let mut curve = Vec::new();
    let mut i = 0;
    while i < ps.len() {
        let mut j = i + 1;
        while j < ps.len() && ps[j] == ps[i] {
            j += 1;
        }
        curve.push((ps[i], j as f64 / n));
        i = j;
    }
    Ok(curve)
}
