//! Exterior-square gamma factors of cuspidal representations of `GL_n(F_q)`.
//!
//! The crate computes `γ(π, ∧², ψ)` for the cuspidal representation attached
//! to a regular character of `F_{q^n}^×` along three independent routes: the
//! ratio of Jacquet–Shalika sums, torus sums of the Bessel function, and
//! closed-form character sums for `n ≤ 4`. The [`levelzero`] module lifts the
//! results to rational functions in `X = q^{-s}`.

pub mod bessel;
pub mod charkit;
pub mod cuspchar;
pub mod error;
pub mod exjs;
pub mod ffield;
pub mod levelzero;
pub mod matgrp;

pub use error::{GammaError, Result};
