//! Bayesian significance for binomial experiments with a real-valued number
//! of trials.
//!
//! - [`binom`]: single-arm significance `P(Q >= Q0 | q, M)` and its curve
//! - [`bivariate`]: placebo-controlled superiority `P(Q >= Π + δ)`
//! - [`samplesize`]: minimal trial counts for a target probability
//! - [`contdist`]: superiority for continuous measurements, sampling
//!   distributions of means, truncated-Gaussian moment matching
//! - [`mc`]: Monte Carlo estimates of the same quantities
//! - [`cli`]: the `binsig` command line
//!
//! ```
//! use binsig::{significance, SignificanceQuery, TrialObservation};
//!
//! let obs = TrialObservation::from_counts(154, 162).unwrap();
//! let p = significance(&SignificanceQuery::new(obs, 0.95).unwrap()).unwrap();
//! assert!((p - 0.4289).abs() < 1e-4);
//! ```

pub mod binom;
pub mod bivariate;
pub mod cli;
pub mod contdist;
pub mod error;
pub mod mc;
pub mod quadrature;
pub mod samplesize;
pub mod specfun;

pub use binom::{significance, significance_curve, SignificanceQuery, TrialObservation};
pub use bivariate::{superiority, superiority_exact, BivariateDesign};
pub use error::{Error, Result};
pub use quadrature::QuadratureConfig;
pub use samplesize::{required_trials, required_trials_bivariate, SampleSizeResult};
