//! Common-dictionary compressive CSI feedback for FDD massive MIMO-OFDM.
//!
//! The crate covers the whole simulation chain:
//!
//! * [`channel`]: Kronecker/Jakes correlated wideband channels with
//!   Gauss-Markov frame evolution.
//! * [`sparsify`]: sparsifying dictionaries, Gaussian measurement matrices,
//!   compression and OMP reconstruction.
//! * [`dictlearn`]: K-SVD, pooled common-dictionary K-SVD and the
//!   orthogonal-Procrustes common dictionary.
//! * [`protocol`]: the three-phase feedback protocol for `K` users and the
//!   closed-form memory/feedback/FLOP accounting.
//! * [`eval`]: NMSE sweeps and the coded 16-PSK BER link simulation.
//!
//! All numerical code is generic over the real scalar `T` ([`Real`], f32 or
//! f64). Accounting is done in exact integer and rational arithmetic.

pub mod channel;
pub mod config;
pub mod dictlearn;
mod error;
pub mod eval;
pub mod linalg;
pub mod protocol;
pub mod rng;
mod scalar;
pub mod sparsify;

pub use config::{Diagnostic, SystemConfig};
pub use error::{Error, Result};
pub use scalar::{cis, CMatrix, CVector, Cplx, Real};

/// Double-precision aliases used by the CLI and most tests.
pub type Dictionary64 = sparsify::Dictionary<f64>;
pub type MeasurementMatrix64 = sparsify::MeasurementMatrix<f64>;
pub type ChannelRealization64 = channel::ChannelRealization<f64>;
pub type CMatrix64 = CMatrix<f64>;
pub type CVector64 = CVector<f64>;

/// Single-precision aliases.
pub type Dictionary32 = sparsify::Dictionary<f32>;
pub type MeasurementMatrix32 = sparsify::MeasurementMatrix<f32>;
pub type ChannelRealization32 = channel::ChannelRealization<f32>;
