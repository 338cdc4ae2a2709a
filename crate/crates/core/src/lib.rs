//! Positive-real (PR) function toolkit for passive dielectric models.
//!
//! A PR function `p(s) = s·ε(s)` is represented by a nonnegative measure
//! (Cauer's representation). From its low- and high-frequency expansions the
//! crate derives sum rules for the measure moments and rigorous envelopes that
//! bound the time-domain response of the material to step-like pulses.
//!
//! Module map:
//!
//! - [`complex_special`]: Faddeeva function and complex `erfc`.
//! - [`pr_core`]: PR functions, measures, densities, point masses, asymptotic coefficients.
//! - [`sumrules`]: moments of measures and sum-rule verification.
//! - [`models`]: conductivity, Debye, Lorentz, Drude and Brendel-Bormann models.
//! - [`td_bounds`]: pulses, bound envelopes, numerical inverse Laplace responses.
//! - [`report`]: scenario configs, CSV/JSON output, table reproduction, self test.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complex_special;
pub mod error;
pub mod models;
pub mod phi;
pub mod pr_core;
pub mod quad;
pub mod report;
pub mod richardson;
pub mod sumrules;
pub mod td_bounds;

pub use error::{Error, Result};
pub use num_complex::Complex64;
