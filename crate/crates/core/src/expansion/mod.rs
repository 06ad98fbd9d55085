//! Derivative ladders at the saddle point and the expansion coefficients
//! built from them.

pub mod coefficients;
pub mod ladders;
pub mod partitions;

use std::io::Write;

use serde::Serialize;

pub use coefficients::{a1_closed_form, b1_closed_form, coeff_a, coeff_b, double_factorial};
pub use ladders::{complete_bell, f_derivatives, psi_derivatives, x_derivatives};
pub use partitions::{partitions, PartitionSet};

use crate::cgf::{solve_ladder, GridConfig, GridFunction};
use crate::deviations::theta_star;
use crate::error::Result;
use crate::simulator::HawkesModel;

/// Ladders and coefficients at the saddle of one level `x`.
///
/// With ladder depth `K`, `x^(k)` and `η^(k)` go to order `K`, `F^(k)` and
/// `ψ^(k)` to `K − 2`, and `a_k`, `b_k` are filled for `k ≤ (K − 2)/2`.
/// `b` stays empty at or below the mean, where the tail expansion does not
/// apply.
#[derive(Debug, Clone, Serialize)]
pub struct ExpansionContext {
    pub level: f64,
    pub theta_star: f64,
    pub x_derivs: Vec<f64>,
    pub eta_derivs: Vec<f64>,
    /// `∫_0^∞ (F^(k) − x^(k))`, `k = 0..=K − 2`.
    pub integrals: Vec<f64>,
    pub psi_derivs: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Horizon at which the tail integrals settled.
    pub horizon: f64,
    #[serde(skip)]
    pub f_derivs: Vec<GridFunction>,
}

/// Default ladder depth: enough for `a_1`, `a_2`, `b_1`, `b_2`.
pub const DEFAULT_DEPTH: usize = 6;

impl ExpansionContext {
    pub fn new(model: &HawkesModel, level: f64, depth: usize, config: &GridConfig) -> Result<Self> {
        let nu = model.nu();
        let l1 = model.l1_norm();
        let theta = theta_star(level, nu, l1)?;
        let f_order = depth.saturating_sub(2);
        let sol = solve_ladder(theta, model.kernel(), f_order, config)?;
        let x_derivs = x_derivatives(sol.x_derivs[0], l1, depth.max(f_order))?;
        let mut eta_derivs: Vec<f64> = x_derivs.iter().map(|v| nu * v).collect();
        eta_derivs[0] = nu * (x_derivs[0] - 1.0);
        let psi_derivs = psi_derivatives(nu, &sol.integrals);

        let count = f_order / 2;
        let a = (1..=count)
            .map(|k| coeff_a(k, &psi_derivs, &eta_derivs))
            .collect::<Result<Vec<_>>>()?;
        let b = if theta > 0.0 {
            (1..=count)
                .map(|k| coeff_b(k, theta, &psi_derivs, &eta_derivs))
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        Ok(Self {
            level,
            theta_star: theta,
            x_derivs,
            eta_derivs,
            integrals: sol.integrals,
            psi_derivs,
            a,
            b,
            horizon: sol.horizon,
            f_derivs: sol.grids,
        })
    }

    pub fn psi(&self) -> f64 {
        self.psi_derivs[0]
    }

    /// Leading tail constant `ψ(θ*) / (1 − e^{−θ*})`.
    pub fn c0(&self) -> f64 {
        self.psi() / -(-self.theta_star).exp_m1()
    }

    /// First tail correction `b_1 / (1 − e^{−θ*})`, if computed.
    pub fn c1(&self) -> Option<f64> {
        self.b.first().map(|b| b / -(-self.theta_star).exp_m1())
    }

    pub fn write_json<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer_pretty(writer, self)?;
        Ok(())
    }
}
