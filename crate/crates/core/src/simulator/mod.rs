//! Exact simulation of linear Hawkes paths and the naive tail estimator.
//!
//! Two independent generators are provided: Ogata thinning on the
//! conditional intensity and the immigration-birth (cluster) construction.
//! Every path draws from its own ChaCha stream keyed by `(seed, path_index)`,
//! and batch results are merged block by block in index order, so serial and
//! parallel runs give bit-identical output.

mod cluster;
mod thinning;

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ensure_finite_positive, Error, Result};
use crate::kernel::Kernel;
use crate::stats::MeanVar;

pub use cluster::{simulate_cluster, simulate_cluster_traced};
pub use thinning::simulate_thinning;

pub(crate) use cluster::ClusterSampler;

/// Baseline intensity `ν > 0` and a subcritical kernel.
#[derive(Debug, Clone)]
pub struct HawkesModel {
    nu: f64,
    kernel: Kernel,
}

impl HawkesModel {
    pub fn new(nu: f64, kernel: Kernel) -> Result<Self> {
        ensure_finite_positive("nu", nu)?;
        Ok(Self { nu, kernel })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn l1_norm(&self) -> f64 {
        self.kernel.l1_norm()
    }

    /// Model with intensity `γ λ_t`: baseline `γν`, kernel `γh`.
    pub fn tilted(&self, gamma: f64) -> Result<Self> {
        Self::new(gamma * self.nu, self.kernel.scaled(gamma)?)
    }
}

/// Event times of one realization on `[0, horizon]`, starting empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventPath {
    pub horizon: f64,
    pub times: Vec<f64>,
    pub seed: u64,
}

impl EventPath {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `N_t`, the number of events in `(0, t]`.
    pub fn count_at(&self, t: f64) -> usize {
        self.times.partition_point(|&s| s <= t)
    }
}

/// Which exact path generator to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    Thinning,
    #[default]
    Cluster,
}

impl std::str::FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "thinning" => Ok(Generator::Thinning),
            "cluster" => Ok(Generator::Cluster),
            other => Err(Error::Config(format!("unknown generator `{other}`"))),
        }
    }
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n_paths: u64,
}

pub(crate) fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

const BLOCK: u64 = 1024;

/// Evaluates `per_path` on paths `0..n_paths` and merges the values in
/// index order. `per_path` receives the path's RNG and a scratch buffer.
pub(crate) fn reduce_paths<F>(n_paths: u64, seed: u64, per_path: F) -> MeanVar
where
    F: Fn(&mut ChaCha8Rng, &mut Vec<f64>) -> f64 + Sync,
{
    reduce_path_range(0, n_paths, seed, per_path)
}

/// As [`reduce_paths`] for paths `first..end`.
pub(crate) fn reduce_path_range<F>(first: u64, end: u64, seed: u64, per_path: F) -> MeanVar
where
    F: Fn(&mut ChaCha8Rng, &mut Vec<f64>) -> f64 + Sync,
{
    let blocks = end.saturating_sub(first).div_ceil(BLOCK);
    let partials: Vec<MeanVar> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = MeanVar::default();
            let mut buf = Vec::new();
            for i in first + b * BLOCK..(first + (b + 1) * BLOCK).min(end) {
                let mut rng = path_rng(seed, i);
                acc.push(per_path(&mut rng, &mut buf));
            }
            acc
        })
        .collect();
    let mut total = MeanVar::default();
    for p in &partials {
        total.merge(p);
    }
    total
}

/// `N_T` for paths `0..n_paths`, in path order.
pub fn sample_counts(model: &HawkesModel, horizon: f64, n_paths: u64, seed: u64, generator: Generator) -> Vec<u64> {
    (0..n_paths)
        .into_par_iter()
        .map_init(Vec::new, |buf, i| {
            let mut rng = path_rng(seed, i);
            fill_times(model, horizon, generator, &mut rng, buf);
            buf.len() as u64
        })
        .collect()
}

/// Paths `0..n_paths` from one seed, in path order.
pub fn simulate_many(model: &HawkesModel, horizon: f64, n_paths: u64, seed: u64, generator: Generator) -> Vec<EventPath> {
    (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(seed, i);
            let mut times = Vec::new();
            fill_times(model, horizon, generator, &mut rng, &mut times);
            times.sort_by(f64::total_cmp);
            EventPath { horizon, times, seed }
        })
        .collect()
}

/// Unsorted event times of one path into `buf`.
pub(crate) fn fill_times(model: &HawkesModel, horizon: f64, generator: Generator, rng: &mut ChaCha8Rng, buf: &mut Vec<f64>) {
    buf.clear();
    if !(horizon > 0.0) {
        return;
    }
    match generator {
        Generator::Thinning => thinning::thinning_times(model, horizon, rng, buf),
        Generator::Cluster => ClusterSampler::new(model, horizon).fill(rng, buf, None),
    }
}

/// Naive frequency of `{N_t ≥ x t}` with binomial standard error.
pub fn mc_tail(model: &HawkesModel, t: f64, x: f64, n_paths: u64, seed: u64) -> Result<TailEstimate> {
    mc_tail_with(model, t, x, n_paths, seed, Generator::Cluster)
}

pub fn mc_tail_with(
    model: &HawkesModel,
    t: f64,
    x: f64,
    n_paths: u64,
    seed: u64,
    generator: Generator,
) -> Result<TailEstimate> {
    if n_paths == 0 {
        return Err(Error::InvalidParameter {
            name: "n_paths",
            value: 0.0,
            reason: "at least one path is required",
        });
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            reason: "time must be nonnegative",
        });
    }
    let threshold = x * t;
    let stats = reduce_paths(n_paths, seed, |rng, buf| {
        fill_times(model, t, generator, rng, buf);
        if reaches(buf.len() as f64, threshold) {
            1.0
        } else {
            0.0
        }
    });
    let p = stats.mean();
    Ok(TailEstimate {
        estimate: p,
        std_error: (p * (1.0 - p) / n_paths as f64).sqrt(),
        n_paths,
    })
}

/// `n ≥ threshold`, tolerating rounding in a threshold like `x·t`.
pub(crate) fn reaches(n: f64, threshold: f64) -> bool {
    n >= threshold - 1e-9 * threshold.abs().max(1.0)
}

/// CSV dump with columns `path_id,event_time`.
pub fn write_paths_csv<W: Write>(paths: &[EventPath], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["path_id", "event_time"])?;
    for (id, path) in paths.iter().enumerate() {
        for t in &path.times {
            w.write_record([id.to_string(), format!("{t:.12}")])?;
        }
    }
    w.flush()?;
    Ok(())
}
