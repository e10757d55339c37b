//! Command-line interface behind the `rcar` binary.
//!
//! Five subcommands cover the pipeline: `simulate` a panel, `estimate`
//! its coefficients, `test` the estimates against a null, `density` them
//! into a smoothed curve, and `study` for the full Monte Carlo
//! experiment. Exit codes: 0 success, 1 for domain or estimation
//! failures, 2 for bad usage (including malformed config or input files).

use crate::error::{Error, Result};
use crate::estimators::{
    bandwidth_rule, estimate_coeffs_with, kde_curve, Centering, Ecdf, Kernel,
};
use crate::fmtio::{fmt17, parse_f64, parse_usize};
use crate::gof::{
    require_unit_support, t1_composite_with, t1_simple, t2_parametric, CompositeResampling,
    GofResult, NullSpec,
};
use crate::rng::stream;
use crate::sim::{simulate_panel, CoeffDist, InnovDist, Panel, PanelConfig};
use crate::special::BetaParams;
use crate::study::{run_study, RunOptions, StudyConfig};
use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "rcar",
    version,
    about = "Simulation and distribution tests for panels of random-coefficient AR(1) series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a panel and write it as CSV plus a key=value sidecar
    Simulate(SimulateArgs),
    /// Estimate the per-series AR coefficients of a panel CSV
    Estimate(EstimateArgs),
    /// Test estimated coefficients against a null distribution
    Test(TestArgs),
    /// Kernel density estimate of the coefficient distribution
    Density(DensityArgs),
    /// Run the Monte Carlo size/power study from a config file
    Study(StudyArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Number of series N
    #[arg(long, value_name = "N")]
    n_series: usize,
    /// Observations per series n
    #[arg(long, value_name = "OBS")]
    n_obs: usize,
    /// Coefficient law: point:A0 | uniform:LO,HI | beta:A,B | sqrt-beta:A,B
    #[arg(long, value_name = "LAW")]
    coeff: String,
    /// Common-shock loading b in [0,1]
    #[arg(long, default_value_t = 0.0, value_name = "B")]
    shock_b: f64,
    /// Innovation law: normal | student-t:DF
    #[arg(long, default_value = "normal", value_name = "LAW")]
    innov: String,
    /// Geometric weight the burn-in may leave behind
    #[arg(long, value_name = "EPS")]
    burnin_eps: Option<f64>,
    /// Hard cap on the burn-in length
    #[arg(long, value_name = "STEPS")]
    burnin_cap: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path; the sidecar lands next to it as <FILE>.meta
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Skip writing the metadata sidecar
    #[arg(long)]
    no_meta: bool,
}

#[derive(Args)]
struct EstimateArgs {
    /// Panel CSV produced by `simulate` (or matching its format)
    #[arg(long, value_name = "FILE")]
    panel: PathBuf,
    /// Autocorrelation centering: subtract each series' sample mean
    /// (`mean`) or treat the process mean as zero (`zero`)
    #[arg(long, default_value = "mean", value_name = "MODE")]
    centering: String,
    /// Output coefficients CSV (`series,a_hat`)
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct TestArgs {
    /// Coefficients CSV produced by `estimate`
    #[arg(long, value_name = "FILE")]
    coeffs: PathBuf,
    /// Null: point | uniform | beta | sqrt-beta | composite | parametric
    #[arg(long, value_name = "KIND")]
    null: String,
    /// Point-mass location (for --null point)
    #[arg(long, value_name = "A0")]
    a0: Option<f64>,
    /// Uniform lower endpoint (for --null uniform)
    #[arg(long, value_name = "LO")]
    lo: Option<f64>,
    /// Uniform upper endpoint (for --null uniform)
    #[arg(long, value_name = "HI")]
    hi: Option<f64>,
    /// Beta alpha (for --null beta | sqrt-beta | parametric)
    #[arg(long, value_name = "A")]
    alpha: Option<f64>,
    /// Beta beta (for --null beta | sqrt-beta | parametric)
    #[arg(long, value_name = "B")]
    beta: Option<f64>,
    /// Test level in (0,1)
    #[arg(long, default_value_t = 0.05)]
    level: f64,
    /// MLE truncation for the parametric test (default 0.01)
    #[arg(long, value_name = "K")]
    kappa: Option<f64>,
    /// Bootstrap replications for the composite test
    #[arg(long, default_value_t = 1000)]
    mc_reps: usize,
    /// Seed of the composite test's bootstrap streams
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Composite resampling: coefficients | panels
    #[arg(long, default_value = "coefficients", value_name = "KIND")]
    resample: String,
    /// Series length for --resample panels
    #[arg(long, value_name = "OBS")]
    n_obs: Option<usize>,
    /// Common-shock loading for --resample panels
    #[arg(long, default_value_t = 0.0, value_name = "B")]
    shock_b: f64,
    /// Innovation law for --resample panels
    #[arg(long, default_value = "normal", value_name = "LAW")]
    innov: String,
    /// Output CSV path (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DensityArgs {
    /// Coefficients CSV produced by `estimate`
    #[arg(long, value_name = "FILE")]
    coeffs: PathBuf,
    /// Kernel: epanechnikov | triangular | quartic
    #[arg(long, default_value = "epanechnikov", value_name = "NAME")]
    kernel: String,
    /// Fixed bandwidth h > 0 (overrides the scale rule)
    #[arg(long, value_name = "H")]
    bandwidth: Option<f64>,
    /// Scale c of the reference rule h = c N^(-1/5)
    #[arg(long, value_name = "C")]
    bandwidth_scale: Option<f64>,
    /// Evaluation grid as LO:HI:COUNT
    // Hyphen values: the usual LO is negative, e.g. -1:1:401.
    #[arg(long, default_value = "-1:1:401", value_name = "SPEC", allow_hyphen_values = true)]
    grid: String,
    /// Output CSV path (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StudyArgs {
    /// Study config file (key = value lines)
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Full-scale preset: overrides reps to 5000
    #[arg(long)]
    full: bool,
    /// Worker threads (default: RCAR_WORKERS, then hardware)
    #[arg(long, value_name = "K")]
    workers: Option<usize>,
    /// Override the config's output directory
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

/// Parses `argv` and runs the selected subcommand, returning the process
/// exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version print to stdout and exit cleanly; real
            // usage errors go to stderr with code 2.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Parse(_) => 2,
                Error::Io(ref io) if io.kind() == std::io::ErrorKind::NotFound => 2,
                _ => 1,
            }
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Simulate(a) => simulate(a),
        Command::Estimate(a) => estimate(a),
        Command::Test(a) => test(a),
        Command::Density(a) => density(a),
        Command::Study(a) => study(a),
    }
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let mut cfg = PanelConfig::new(
        a.n_series,
        a.n_obs,
        CoeffDist::parse(&a.coeff)?,
        a.shock_b,
        a.seed,
    );
    cfg.innov = InnovDist::parse(&a.innov)?;
    if let Some(eps) = a.burnin_eps {
        cfg.burnin_eps = eps;
    }
    if let Some(cap) = a.burnin_cap {
        cfg.burnin_cap = cap;
    }
    let panel = simulate_panel(&cfg)?;
    panel.write_csv_file(&a.out)?;
    if let Some(w) = &panel.burnin_warning {
        eprintln!("warning: {w}");
    }
    if !a.no_meta {
        let mut meta = a.out.clone().into_os_string();
        meta.push(".meta");
        panel.write_meta_file(&meta)?;
    }
    println!(
        "wrote {} series x {} observations to {}",
        panel.n_series(),
        panel.n_obs(),
        a.out.display()
    );
    Ok(())
}

fn estimate(a: EstimateArgs) -> Result<()> {
    let centering = Centering::parse(&a.centering)?;
    let panel = Panel::read_csv_file(&a.panel)?;
    let e = estimate_coeffs_with(&panel, centering)?;
    e.write_csv_file(&a.out)?;
    println!("wrote {} coefficient estimates to {}", e.len(), a.out.display());
    Ok(())
}

fn require(v: Option<f64>, null: &str, flag: &str) -> Result<f64> {
    v.ok_or_else(|| Error::Config(format!("--null {null} requires --{flag}")))
}

fn test(a: TestArgs) -> Result<()> {
    let e = Ecdf::read_csv_file(&a.coeffs)?;
    let spec = match a.null.as_str() {
        "point" => NullSpec::Simple(CoeffDist::point_mass(require(a.a0, "point", "a0")?)?),
        "uniform" => NullSpec::Simple(CoeffDist::uniform(
            require(a.lo, "uniform", "lo")?,
            require(a.hi, "uniform", "hi")?,
        )?),
        "beta" => NullSpec::Simple(CoeffDist::beta_on_01(BetaParams::new(
            require(a.alpha, "beta", "alpha")?,
            require(a.beta, "beta", "beta")?,
        )?)),
        "sqrt-beta" => NullSpec::Simple(CoeffDist::sqrt_beta(BetaParams::new(
            require(a.alpha, "sqrt-beta", "alpha")?,
            require(a.beta, "sqrt-beta", "beta")?,
        )?)?),
        "composite" => NullSpec::CompositeBeta,
        "parametric" => NullSpec::CompositeSqrtBeta(BetaParams::new(
            require(a.alpha, "parametric", "alpha")?,
            require(a.beta, "parametric", "beta")?,
        )?),
        other => {
            return Err(Error::Config(format!(
                "unknown null {other:?} (expected point, uniform, beta, sqrt-beta, composite, or parametric)"
            )))
        }
    };
    let result = match &spec {
        NullSpec::Simple(dist) => {
            // A Beta null states the coefficients themselves live on
            // (0,1); estimates outside that make the claim ill-posed.
            if matches!(dist, CoeffDist::BetaOn01(_)) {
                require_unit_support(&e)?;
            }
            t1_simple(&e, dist, a.level)?
        }
        NullSpec::CompositeBeta => {
            let resampling = match a.resample.as_str() {
                "coefficients" => CompositeResampling::Coefficients,
                "panels" => CompositeResampling::Panels {
                    n_obs: a.n_obs.ok_or_else(|| {
                        Error::Config("--resample panels requires --n-obs".into())
                    })?,
                    shock_b: a.shock_b,
                    innov: InnovDist::parse(&a.innov)?,
                },
                other => {
                    return Err(Error::Config(format!(
                        "unknown resampling {other:?} (expected coefficients or panels)"
                    )))
                }
            };
            t1_composite_with(&e, a.level, a.mc_reps, resampling, &mut stream(a.seed, 0))?
        }
        NullSpec::CompositeSqrtBeta(theta0) => {
            t2_parametric(&e, theta0, a.kappa.unwrap_or(0.01), a.level)?
        }
    };
    write_result(&result, a.out.as_deref())?;
    eprintln!(
        "{}: statistic {:.6}, p-value {:.6}, {} at level {}",
        result.method.label(),
        result.statistic,
        result.p_value,
        if result.reject() { "rejected" } else { "not rejected" },
        result.level,
    );
    Ok(())
}

fn write_result(r: &GofResult, out: Option<&std::path::Path>) -> Result<()> {
    match out {
        Some(p) => r.write_csv_file(p),
        None => r.write_csv(std::io::stdout().lock()),
    }
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!("grid must be LO:HI:COUNT, got {spec:?}")));
    }
    let lo = parse_f64(parts[0], "grid LO")?;
    let hi = parse_f64(parts[1], "grid HI")?;
    let count = parse_usize(parts[2], "grid COUNT")?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) || count < 2 {
        return Err(Error::Config(format!(
            "grid needs LO < HI and COUNT >= 2, got {spec:?}"
        )));
    }
    let step = (hi - lo) / (count - 1) as f64;
    Ok((0..count).map(|i| lo + step * i as f64).collect())
}

fn density(a: DensityArgs) -> Result<()> {
    let e = Ecdf::read_csv_file(&a.coeffs)?;
    let kernel = Kernel::parse(&a.kernel)?;
    let h = match (a.bandwidth, a.bandwidth_scale) {
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "--bandwidth and --bandwidth-scale are mutually exclusive".into(),
            ))
        }
        (Some(h), None) => h,
        (None, scale) => bandwidth_rule(e.len(), scale.unwrap_or(1.0))?,
    };
    let curve = kde_curve(&e, kernel, h, &parse_grid(&a.grid)?)?;
    let mut text = String::from("x,g_hat\n");
    for (x, g) in &curve {
        text.push_str(&fmt17(*x));
        text.push(',');
        text.push_str(&fmt17(*g));
        text.push('\n');
    }
    match &a.out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    eprintln!("kernel {} bandwidth {h:.6} over {} grid points", kernel.name(), curve.len());
    Ok(())
}

fn study(a: StudyArgs) -> Result<()> {
    let mut cfg = StudyConfig::from_file(&a.config)?;
    if a.full {
        cfg.reps = 5000;
    }
    if let Some(out) = a.out {
        cfg.out_dir = out;
    }
    let art = run_study(&cfg, &RunOptions { workers: a.workers })?;
    // The summary is small; echo it for immediate reading.
    print!("{}", std::fs::read_to_string(&art.summary_path)?);
    eprintln!(
        "study artifacts: {}, {}, {}",
        art.rows_path.display(),
        art.summary_path.display(),
        art.pvalue_paths
            .iter()
            .map(|p| p.display().to_string())
            .collect::<Vec<_>>()
            .join(", "),
    );
    Ok(())
}
