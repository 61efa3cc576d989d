//! Shared error type for the lattice scattering laboratory.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum SpectralError {
    /// Input contained NaN or infinite entries.
    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A spectral parameter landed on the band [-2, 2] without a +i0 tag.
    #[error("spectral point {re}+{im}i lies inside the band [-2,2]; use a +i0 limit tag")]
    InsideBand { re: f64, im: f64 },

    /// λ too close to (or outside) the band edges ±2 for a boundary-value
    /// computation.
    #[error("band edge: lambda = {lambda} violates the edge margin {margin}")]
    BandEdge { lambda: f64, margin: f64 },

    /// 1 + rJT₀(λ+i0) is numerically singular: the coupling path runs
    /// through a real resonance.
    #[error("resonance at (lambda = {lambda}, r = {r}): 1 + rJT0 has condition estimate {cond:.3e}")]
    Resonance { lambda: f64, r: f64, cond: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    /// A scalar function produced non-finite values on the spectrum.
    #[error("evaluation error: {0}")]
    Evaluation(String),
}

pub type Result<T> = std::result::Result<T, SpectralError>;
