//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by state construction, conditioning and analysis.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument or configuration value is outside its valid range.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested Fock cutoff cannot hold the state: the relative tail
    /// mass at `n_max` exceeds the truncation tolerance.
    #[error(
        "truncation error: tail mass {tail:.3e} at n_max = {n_max} exceeds {tol:.1e} of the total"
    )]
    Truncation { n_max: usize, tail: f64, tol: f64 },

    /// A quantity that must be real and positive came out otherwise,
    /// signalling catastrophic cancellation in a Gram quadratic form.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Conditioning on a quadrature outcome of essentially zero probability.
    #[error(
        "degenerate outcome: conditional norm {norm:.3e} at x_m = {x_m} is below {floor:.1e}"
    )]
    DegenerateOutcome { x_m: f64, norm: f64, floor: f64 },

    /// A mode-4 amplitude matches no (k, l) pair of the configuration.
    #[error(
        "unrecognized amplitude ({re}, {im}): no (k, l) pair of N = {n_components} matches within {tol:.1e}"
    )]
    UnrecognizedAmplitude {
        re: f64,
        im: f64,
        n_components: usize,
        tol: f64,
    },

    /// The phase-space grid fails to capture the state: its raw integral
    /// deviates from the state norm by more than the coverage bound.
    #[error("grid coverage error: raw grid integral {integral} deviates from 1 by more than {bound}")]
    GridCoverage { integral: f64, bound: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
