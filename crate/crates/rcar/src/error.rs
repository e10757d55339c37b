use thiserror::Error;

/// Errors shared across the crate.
///
/// Numeric routines never panic on bad input; they return one of these
/// variants so callers (and the CLI) can distinguish usage mistakes from
/// runtime failures.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of a routine.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series or continued fraction hit its iteration cap before
    /// reaching the requested tolerance.
    #[error("{routine} failed to converge within {iterations} iterations")]
    Convergence {
        routine: &'static str,
        iterations: usize,
    },

    /// A time series has (numerically) zero centered sum of squares, so
    /// its sample autocorrelation is undefined.
    #[error("degenerate series{}: centered sum of squares is numerically zero", match .series { Some(i) => format!(" {i}"), None => String::new() })]
    DegenerateSeries { series: Option<usize> },

    /// Sample moments outside the region where the Beta moment map can be
    /// inverted. The message names the failed inequality.
    #[error("moment domain error: {0}")]
    MomentDomain(String),

    /// A coefficient lies outside the support required by the requested
    /// null family.
    #[error("support error: coefficient {value} at series {series} is outside (0,1)")]
    Support { series: usize, value: f64 },

    /// An iterative fit failed (non-convergence, degenerate sample, or a
    /// solution pinned to the search box boundary). Carries the last
    /// iterate when one exists.
    #[error("estimation error: {message}{}", match .last { Some((a, b)) => format!(" (last iterate alpha={a}, beta={b})"), None => String::new() })]
    Estimation {
        message: String,
        last: Option<(f64, f64)>,
    },

    /// Invalid configuration: bad flag value, malformed config entry, or
    /// an option combination the operation rejects.
    #[error("configuration error: {0}")]
    Config(String),

    /// The requested integral does not converge (mass too heavy near an
    /// endpoint of the coefficient support).
    #[error("integrability error: {0}")]
    Integrability(String),

    /// A file had an unexpected shape (bad header, wrong field count,
    /// unparsable number).
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
