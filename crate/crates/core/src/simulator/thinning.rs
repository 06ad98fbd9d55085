use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use super::{path_rng, EventPath, HawkesModel};

/// Ogata thinning with `λ_t = ν + Σ_{t_i<t} h(t − t_i)`.
pub fn simulate_thinning(model: &HawkesModel, horizon: f64, seed: u64) -> EventPath {
    let mut times = Vec::new();
    if horizon > 0.0 {
        thinning_times(model, horizon, &mut path_rng(seed, 0), &mut times);
    }
    EventPath { horizon, times, seed }
}

pub(super) fn thinning_times(model: &HawkesModel, horizon: f64, rng: &mut ChaCha8Rng, out: &mut Vec<f64>) {
    let nu = model.nu();
    let kernel = model.kernel();
    let mut t = 0.0;

    if let Some(beta) = kernel.exponential_decay() {
        // excitation decays monotonically, so its current value bounds it
        let jump = kernel.h(0.0);
        let mut excitation = 0.0;
        loop {
            let bound = nu + excitation;
            let wait: f64 = Exp1.sample(rng);
            let dt = wait / bound;
            t += dt;
            if t > horizon {
                return;
            }
            excitation *= (-beta * dt).exp();
            let u: f64 = rng.random();
            if u * bound <= nu + excitation {
                out.push(t);
                excitation += jump;
            }
        }
    }

    loop {
        let bound = nu + out.iter().map(|&s| kernel.envelope(t - s)).sum::<f64>();
        let wait: f64 = Exp1.sample(rng);
        t += wait / bound;
        if t > horizon {
            return;
        }
        let intensity = nu + out.iter().map(|&s| kernel.h(t - s)).sum::<f64>();
        let u: f64 = rng.random();
        if u * bound <= intensity {
            out.push(t);
        }
    }
}
