//! Numerical laboratory for time-frequency localization operators and
//! tau-pseudodifferential operators on a periodic grid.
//!
//! The crate builds a small, fully discrete model of time-frequency analysis:
//!
//! * [`grid`]: centered periodic grids, sampled signals, the normalized
//!   discrete Fourier pair, fractional shifts, dilation, oversampling.
//! * [`weights`]: submultiplicative and moderate weight functions on phase
//!   space (subexponential, polynomial, tensor products) and the elementary
//!   inequalities that control them.
//! * [`tfr`]: short-time Fourier transform, tau-Wigner distributions, and the
//!   exact relation connecting them.
//! * [`ops`]: localization operators with symbol and window pairs,
//!   tau-quantization of phase-space symbols, their kernels as matrices, and
//!   the identities that link both calculi.
//! * [`spectral`]: dense Hermitian eigensolvers, singular values, Schatten
//!   norms, Hermite atoms, and decay-rate estimation for eigenfunctions.
//! * [`gabor`]: Gabor frames on lattices, frame operators, dual windows, and
//!   weighted sequence norms up to the convolution relation for modulation
//!   norms.
//! * [`verify`]: reproducible verification suites over all of the above, with
//!   pinned tolerances and deterministic reports.
//!
//! All continuum objects are represented by samples on a [`grid::GridSpec`]
//! and interpolated trigonometrically; every identity the crate checks is a
//! statement about those samples that holds either exactly or up to an
//! explicit tolerance.

pub mod error;
pub mod gabor;
pub mod grid;
pub mod ops;
pub mod spectral;
pub mod tfr;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
