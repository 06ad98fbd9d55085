//! Precise tail asymptotics for linear Hawkes processes.
//!
//! The crate computes refined large-deviation approximations of
//! `P(N_t ≥ x t)` for a linear Hawkes process with baseline `ν` and a
//! subcritical kernel `h`, together with the ingredients they need: the
//! fixed point of the cumulant generating function, the numerical solution
//! of the associated Volterra equation, derivative ladders via Bell
//! polynomials, and the coefficients of the asymptotic expansion. Exact
//! path simulation and a tilted importance sampler serve as references.
//!
//! ```
//! use hawkes_tails::{HawkesModel, Kernel};
//! use hawkes_tails::deviations::{ldp_point, SaddleData};
//!
//! let model = HawkesModel::new(1.0, Kernel::exponential(1.0, 2.0).unwrap()).unwrap();
//! let saddle = SaddleData::new(&model, 4.0).unwrap();
//! assert!((saddle.theta_star - 0.1210154).abs() < 1e-6);
//! # let _ = ldp_point;
//! ```

// NaN must fail parameter checks, so `!(a > b)` is intentional
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cgf;
pub mod cli;
pub mod deviations;
pub mod error;
pub mod expansion;
pub mod importance;
pub mod kernel;
pub mod simulator;
pub mod stats;

pub use error::{Error, Result};
pub use kernel::{Kernel, KernelSpec};
pub use simulator::{EventPath, HawkesModel};
