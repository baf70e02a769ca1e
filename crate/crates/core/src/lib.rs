//! Spectral engine for multichannel Cox potentials: the coupled-channel
//! partners of the zero potential generated by a single non-conservative
//! SUSY transformation with threshold differences.
//!
//! The Jost matrix of such a model is known in closed form,
//! `F(k) = (K_f - iK)^{-1} (U0 - iK)`, so its determinant zeros are the
//! solutions of a polynomial system. [`elimination`] reduces that system to a
//! single univariate polynomial of degree `N 2^(N-1)`, [`spectrum`] roots and
//! classifies it, [`perturbation`] gives the weak-coupling expansion,
//! [`cox2`] holds the two-channel closed forms, and [`potential`] /
//! [`scattering`] evaluate the potential and the observables.

// `!(a > b)` comparisons are meant to fail on NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cox2;
pub mod elimination;
pub mod error;
pub mod io;
pub mod linalg;
pub mod model;
pub mod perturbation;
pub mod poly;
pub mod potential;
pub mod scattering;
pub mod spectrum;

pub use error::{Error, Result};
pub use model::{ChannelModel, Momenta, SheetSignature, Tolerances, ValidationReport, Violation};
pub use num_complex::Complex64;
pub use spectrum::{SpectralClass, SpectralPoint, Tally};
