// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} must be finite")]
    NonFinite { what: &'static str },

    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("Fock cutoff {n_cut} below the minimum of {min}")]
    CutoffTooSmall { n_cut: usize, min: usize },

    #[error("truncation inadequate: n_cut = {n_cut} but amplitude {max_amplitude} needs at least {required}")]
    InadequateCutoff {
        n_cut: usize,
        required: usize,
        max_amplitude: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("density operator trace {trace} deviates from 1")]
    TraceDeviation { trace: f64 },

    #[error("not a physical density matrix: {0}")]
    NotPhysical(String),

    #[error("state has no terms")]
    EmptyState,

    #[error("state norm {norm} is numerically zero or negative")]
    DegenerateNorm { norm: f64 },

    #[error("coherent amplitudes are linearly dependent ({which})")]
    LinearlyDependent { which: String },

    #[error("expected {expected} distinct coherent amplitudes per mode, found {found}")]
    WrongSubspaceDimension { expected: usize, found: usize },

    #[error("measurement branch has zero probability")]
    ZeroProbability,

    #[error("grid of {cells} cells exceeds the cap of {cap}")]
    GridTooLarge { cells: usize, cap: usize },

    #[error("grid margin {found} around the state amplitudes is below the required {required}")]
    MarginViolation { required: f64, found: f64 },

    #[error("no maxima found in the scanned range")]
    NoPeaks,

    #[error("peak set is empty")]
    EmptyPeakSet,
}
