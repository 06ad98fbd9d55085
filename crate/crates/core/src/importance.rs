//! Importance sampling of `P(N_t ≥ xt)` under an exponential tilt.
//!
//! Paths are drawn from the model with intensity scaled by
//! `γ = x/(ν + ‖h‖x)`, whose mean rate `γν/(1 − γ‖h‖)` is exactly `x`.
//! The likelihood ratio back to the original model is explicit apart from a
//! residual term `Σ_i H(t − u_i)` that accounts for excitation still pending
//! at time `t`. Factoring out `e^{−tI(x)}` leaves a per-path weight in
//! `[0, 1]`.

use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::deviations::{mean_rate, rate};
use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::simulator::{fill_times, reaches, reduce_path_range, EventPath, Generator, HawkesModel};
use crate::stats::MeanVar;

/// `γ = x / (ν + ‖h‖x)`.
pub fn tilt_gamma(x: f64, nu: f64, l1: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "x",
            value: x,
            reason: "level must be positive",
        });
    }
    Ok(x / (nu + l1 * x))
}

/// `Σ_{u_i ≤ t} H(t − u_i)`.
pub fn residual_sum(path: &EventPath, kernel: &Kernel, t: f64) -> f64 {
    residual_of(&path.times, kernel, t)
}

fn residual_of(times: &[f64], kernel: &Kernel, t: f64) -> f64 {
    times.iter().filter(|&&u| u <= t).map(|&u| kernel.tail_at(t - u)).sum()
}

/// Likelihood-ratio weight of one tilted path with `count` events and the
/// given residual sum, after `e^{−tI(x)}` has been factored out.
pub fn path_weight(count: f64, residual: f64, t: f64, x: f64, gamma: f64, l1: f64) -> f64 {
    if !reaches(count, x * t) {
        return 0.0;
    }
    let slope = (gamma - 1.0) * l1 - gamma.ln();
    (slope * (count - x * t) - (gamma - 1.0) * residual).exp()
}

/// Importance-sampling estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TiltedEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n_paths: u64,
    pub gamma: f64,
    pub t: f64,
    pub x: f64,
}

impl TiltedEstimate {
    pub fn relative_error(&self) -> f64 {
        if self.estimate > 0.0 {
            self.std_error / self.estimate
        } else {
            f64::INFINITY
        }
    }

    /// Normal interval of `sigmas` standard errors.
    pub fn interval(&self, sigmas: f64) -> (f64, f64) {
        (
            (self.estimate - sigmas * self.std_error).max(0.0),
            self.estimate + sigmas * self.std_error,
        )
    }
}

struct Sampler {
    tilted: HawkesModel,
    kernel: Kernel,
    gamma: f64,
    l1: f64,
    t: f64,
    x: f64,
    scale: f64,
    generator: Generator,
}

impl Sampler {
    fn new(model: &HawkesModel, t: f64, x: f64, generator: Generator) -> Result<Self> {
        crate::error::ensure_finite_positive("t", t)?;
        let mean = mean_rate(model);
        if !(x > mean) {
            return Err(Error::NotAboveMean { x, mean });
        }
        let (nu, l1) = (model.nu(), model.l1_norm());
        let gamma = tilt_gamma(x, nu, l1)?;
        Ok(Self {
            tilted: model.tilted(gamma)?,
            kernel: model.kernel().clone(),
            gamma,
            l1,
            t,
            x,
            scale: (-t * rate(x, nu, l1)?).exp(),
            generator,
        })
    }

    fn weight(&self, rng: &mut ChaCha8Rng, buf: &mut Vec<f64>) -> f64 {
        fill_times(&self.tilted, self.t, self.generator, rng, buf);
        let residual = residual_of(buf, &self.kernel, self.t);
        path_weight(buf.len() as f64, residual, self.t, self.x, self.gamma, self.l1)
    }

    fn run(&self, first: u64, end: u64, seed: u64) -> MeanVar {
        reduce_path_range(first, end, seed, |rng, buf| self.weight(rng, buf))
    }

    fn finish(&self, stats: &MeanVar) -> TiltedEstimate {
        TiltedEstimate {
            estimate: self.scale * stats.mean(),
            std_error: self.scale * stats.std_error(),
            n_paths: stats.count(),
            gamma: self.gamma,
            t: self.t,
            x: self.x,
        }
    }
}

fn check_paths(n_paths: u64) -> Result<()> {
    if n_paths == 0 {
        return Err(Error::InvalidParameter {
            name: "n_paths",
            value: 0.0,
            reason: "at least one path is required",
        });
    }
    Ok(())
}

/// Tilted estimate of `P(N_t ≥ xt)` for `x` above the mean rate.
pub fn is_tail(model: &HawkesModel, t: f64, x: f64, n_paths: u64, seed: u64) -> Result<TiltedEstimate> {
    is_tail_with(model, t, x, n_paths, seed, Generator::Cluster)
}

pub fn is_tail_with(
    model: &HawkesModel,
    t: f64,
    x: f64,
    n_paths: u64,
    seed: u64,
    generator: Generator,
) -> Result<TiltedEstimate> {
    check_paths(n_paths)?;
    let sampler = Sampler::new(model, t, x, generator)?;
    Ok(sampler.finish(&sampler.run(0, n_paths, seed)))
}

/// Doubles the number of paths, starting from `initial`, until the
/// relative standard error is at most `target` or `max_paths` is reached.
/// Earlier paths are kept, so the result equals [`is_tail`] with the final
/// path count.
pub fn is_tail_adaptive(
    model: &HawkesModel,
    t: f64,
    x: f64,
    target: f64,
    initial: u64,
    max_paths: u64,
    seed: u64,
) -> Result<TiltedEstimate> {
    check_paths(initial)?;
    let sampler = Sampler::new(model, t, x, Generator::Cluster)?;
    let mut stats = sampler.run(0, initial.min(max_paths), seed);
    loop {
        let est = sampler.finish(&stats);
        let n = stats.count();
        if est.relative_error() <= target || n >= max_paths {
            return Ok(est);
        }
        let next = (2 * n).min(max_paths);
        stats.merge(&sampler.run(n, next, seed));
    }
}
