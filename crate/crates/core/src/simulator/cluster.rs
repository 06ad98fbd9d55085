use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use super::{path_rng, EventPath, HawkesModel};
use crate::kernel::Kernel;

/// Immigration-birth construction on `[0, horizon]`.
///
/// Immigrants arrive as a Poisson(ν) process; every event has Poisson(‖h‖)
/// children born at offsets drawn from `h/‖h‖`. Children born after the
/// horizon are dropped together with their subtrees.
pub fn simulate_cluster(model: &HawkesModel, horizon: f64, seed: u64) -> EventPath {
    simulate_cluster_traced(model, horizon, seed).0
}

/// Same path as [`simulate_cluster`], plus the offspring count drawn for
/// every event of the path (in generation order).
pub fn simulate_cluster_traced(model: &HawkesModel, horizon: f64, seed: u64) -> (EventPath, Vec<u32>) {
    let mut times = Vec::new();
    let mut offspring = Vec::new();
    if horizon > 0.0 {
        ClusterSampler::new(model, horizon).fill(&mut path_rng(seed, 0), &mut times, Some(&mut offspring));
    }
    times.sort_by(f64::total_cmp);
    (EventPath { horizon, times, seed }, offspring)
}

pub(crate) struct ClusterSampler<'a> {
    kernel: &'a Kernel,
    horizon: f64,
    immigrants: Option<Poisson<f64>>,
    children: Poisson<f64>,
}

impl<'a> ClusterSampler<'a> {
    pub(crate) fn new(model: &'a HawkesModel, horizon: f64) -> Self {
        let mean_immigrants = model.nu() * horizon;
        Self {
            kernel: model.kernel(),
            horizon,
            immigrants: (mean_immigrants > 0.0).then(|| Poisson::new(mean_immigrants).expect("finite positive mean")),
            children: Poisson::new(model.l1_norm()).expect("kernel norm is positive"),
        }
    }

    /// Pushes the (unsorted) event times of one path onto `out`.
    pub(crate) fn fill(&self, rng: &mut ChaCha8Rng, out: &mut Vec<f64>, mut offspring: Option<&mut Vec<u32>>) {
        let Some(immigrants) = &self.immigrants else {
            return;
        };
        let n = immigrants.sample(rng) as usize;
        for _ in 0..n {
            out.push(self.horizon * (1.0 - rng.random::<f64>()));
        }
        let mut next = 0;
        while next < out.len() {
            let parent = out[next];
            next += 1;
            let k = self.children.sample(rng) as u32;
            if let Some(trace) = offspring.as_deref_mut() {
                trace.push(k);
            }
            for _ in 0..k {
                let u = 1.0 - rng.random::<f64>();
                let birth = parent + self.kernel.offset_quantile(u);
                if birth <= self.horizon {
                    out.push(birth);
                }
            }
        }
    }
}
