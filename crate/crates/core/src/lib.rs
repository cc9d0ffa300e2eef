//! Distributions of `Z = Σ_{l=1}^{L} X_l·Y_l` for correlated zero-mean complex
//! Gaussian pairs `(X_l, Y_l)`, with a Monte-Carlo harness to check them.
//!
//! The crate provides the joint characteristic function, the joint density
//! of `(Re Z, Im Z)`, its polar form, the amplitude and phase densities, the
//! uncorrected ("legacy") amplitude density for comparison, and a series
//! approximation of the phase density built from elementary functions.
//!
//! ```
//! use zpd::{pdfs, ModelParams};
//!
//! let p = ModelParams::reference(5);
//! let f = pdfs::amplitude_pdf(&p, 2.0).unwrap();
//! assert!(f > 0.0);
//! ```

pub mod cli;
pub mod error;
pub mod jets;
pub mod params;
pub mod pdfs;
pub mod quad;
pub mod simulate;
pub mod specfun;

pub use error::{Error, Result};
pub use params::{ComplexValue, ModelParams, PolarPoint};
