//! Limiting cumulant generating function of the counting process.
//!
//! For `θ < θ_c` the moment generating function factors as
//! `E[e^{θ N_t}] = exp(ν ∫_0^t (F(s; θ) − 1) ds)` where `F` solves the
//! Volterra equation `F(t) = exp(θ + ∫_0^t (F(t − s) − 1) h(s) ds)` and
//! tends to the smaller root `x(θ)` of `x = e^{θ + ‖h‖(x − 1)}`. This module
//! solves both, and integrates `F − x` to get `φ(θ)`, `ψ(θ) = e^{νφ(θ)}`
//! and `η(θ) = ν(x(θ) − 1)`.
//!
//! The time stepping also carries the `θ`-derivatives `F^(k)`, which obey
//! linear Volterra equations once lower orders are known; see
//! [`crate::expansion`].

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansion::ladders::{complete_bell, x_derivatives};
use crate::kernel::Kernel;
use crate::simulator::HawkesModel;

/// `θ_c = ‖h‖ − 1 − log ‖h‖`, the largest `θ` with a finite limit.
pub fn theta_critical(l1: f64) -> Result<f64> {
    if !(l1 > 0.0 && l1 < 1.0) {
        return Err(Error::InvalidParameter {
            name: "l1",
            value: l1,
            reason: "kernel norm must lie in (0, 1)",
        });
    }
    Ok(l1 - 1.0 - l1.ln())
}

/// Smaller root of `x = e^{θ + ‖h‖(x − 1)}`.
///
/// Fixed-point iteration from `x = 1` increases monotonically to the
/// smaller root when `θ ≥ 0` (and decreases to it when `θ < 0`); Newton
/// steps then polish the result to a residual below `1e-12`.
pub fn solve_x(theta: f64, l1: f64) -> Result<f64> {
    let theta_c = theta_critical(l1)?;
    if !theta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "theta",
            value: theta,
            reason: "must be finite",
        });
    }
    if theta > theta_c {
        return Err(Error::NoRealSolution { theta, theta_c });
    }
    let cap = 1.0 / l1;
    let map = |x: f64| (theta + l1 * (x - 1.0)).exp();
    if theta_c - theta < 1e-15 {
        return Ok(cap);
    }

    let mut x = 1.0;
    for _ in 0..200 {
        let next = map(x);
        let done = (next - x).abs() < 1e-6;
        x = next.min(cap);
        if done {
            break;
        }
    }
    for _ in 0..100 {
        let e = map(x);
        let residual = x - e;
        if residual.abs() < 1e-14 {
            break;
        }
        let slope = 1.0 - l1 * e;
        if slope <= 0.0 {
            // at the double root; the iterate is as good as it gets
            break;
        }
        x = (x - residual / slope).min(cap);
    }
    // Newton stalls near θ_c where the two roots merge; bisect on the
    // bracket [0, 1/‖h‖] in that case.
    if (x - map(x)).abs() >= 1e-12 {
        x = bisect_smaller_root(theta, l1);
    }
    Ok(x)
}

fn bisect_smaller_root(theta: f64, l1: f64) -> f64 {
    // g(x) = x − e^{θ+‖h‖(x−1)} is negative below the smaller root and at
    // least as large at 1/‖h‖, where g attains its maximum.
    let g = |x: f64| x - (theta + l1 * (x - 1.0)).exp();
    let (mut lo, mut hi) = (0.0, 1.0 / l1);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Time grid and convergence controls for the Volterra solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    /// Step `Δt`.
    pub step: f64,
    /// Initial horizon; doubled until the tail integrals settle.
    pub horizon: f64,
    /// Largest horizon tried before giving up.
    pub max_horizon: f64,
    /// Relative change allowed between successive horizons.
    pub rel_tol: f64,
    /// Absolute change allowed between successive horizons.
    pub abs_tol: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            step: 0.01,
            horizon: 60.0,
            max_horizon: 960.0,
            rel_tol: 2e-4,
            abs_tol: 1e-8,
        }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        crate::error::ensure_finite_positive("step", self.step)?;
        crate::error::ensure_finite_positive("horizon", self.horizon)?;
        if !(self.max_horizon >= self.horizon) {
            return Err(Error::InvalidParameter {
                name: "max_horizon",
                value: self.max_horizon,
                reason: "must be at least the initial horizon",
            });
        }
        if !(self.rel_tol >= 0.0 && self.abs_tol >= 0.0) {
            return Err(Error::Config("tolerances must be nonnegative".into()));
        }
        Ok(())
    }

    fn points(&self, horizon: f64) -> usize {
        (horizon / self.step + 1e-9).floor() as usize + 1
    }
}

/// Samples `v_i ≈ f(iΔt)` on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction {
    pub step: f64,
    pub horizon: f64,
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn new(step: f64, values: Vec<f64>) -> Self {
        let horizon = step * values.len().saturating_sub(1) as f64;
        Self { step, horizon, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.step
    }

    pub fn last(&self) -> f64 {
        *self.values.last().expect("grid functions are never empty")
    }

    /// Linear interpolation; clamps to the last value past the horizon.
    pub fn at(&self, t: f64) -> f64 {
        let pos = (t / self.step).max(0.0);
        let i = pos.floor() as usize;
        if i + 1 >= self.values.len() {
            return self.last();
        }
        let frac = pos - i as f64;
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }

    /// Trapezoidal `∫_0^t (f − shift)` with `t` rounded down to the grid.
    pub fn integral(&self, t: f64, shift: f64) -> f64 {
        let n = ((t / self.step + 1e-9).floor() as usize).min(self.values.len() - 1);
        trapezoid(&self.values[..=n], shift, self.step)
    }

    /// CSV with columns `t,value`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "value"])?;
        for (i, v) in self.values.iter().enumerate() {
            w.write_record([format!("{}", self.time(i)), format!("{v:.15e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn trapezoid(values: &[f64], shift: f64, step: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let inner: f64 = values.iter().map(|v| v - shift).sum();
    let ends = 0.5 * ((values[0] - shift) + (values[values.len() - 1] - shift));
    step * (inner - ends)
}

/// Solution of the Volterra equation on a fixed grid.
pub fn solve_f(theta: f64, kernel: &Kernel, step: f64, horizon: f64) -> Result<GridFunction> {
    crate::error::ensure_finite_positive("step", step)?;
    if !(horizon >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "horizon",
            value: horizon,
            reason: "must be nonnegative",
        });
    }
    let mut solver = VolterraLadder::new(theta, kernel, step, 0)?;
    solver.advance((horizon / step + 1e-9).floor() as usize + 1)?;
    Ok(solver.grid(0))
}

/// Time stepper for `F` and its first `order` derivatives in `θ`.
///
/// Convolutions use trapezoid weights built from exact cell integrals of
/// `h`, so they sum to `‖h‖ − H(t)` exactly and a constant `F ≡ x(θ)` is
/// reproduced without a discretization bias at large `t`.
pub(crate) struct VolterraLadder<'a> {
    theta: f64,
    l1: f64,
    kernel: &'a Kernel,
    step: f64,
    stride: usize,
    tails: Vec<f64>,
    cells: Vec<f64>,
    /// Row-major: `data[n * stride + k] = F^(k)(nΔt)`.
    data: Vec<f64>,
    len: usize,
}

impl<'a> VolterraLadder<'a> {
    pub(crate) fn new(theta: f64, kernel: &'a Kernel, step: f64, order: usize) -> Result<Self> {
        let l1 = kernel.l1_norm();
        let theta_c = theta_critical(l1)?;
        if !(theta < theta_c) {
            return Err(Error::NoRealSolution { theta, theta_c });
        }
        Ok(Self {
            theta,
            l1,
            kernel,
            step,
            stride: order + 1,
            tails: vec![kernel.tail_at(0.0)],
            cells: Vec::new(),
            data: Vec::new(),
            len: 0,
        })
    }

    pub(crate) fn grid(&self, k: usize) -> GridFunction {
        let values = (0..self.len).map(|n| self.data[n * self.stride + k]).collect();
        GridFunction::new(self.step, values)
    }

    fn column(&self, k: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |n| self.data[n * self.stride + k])
    }

    /// Extends the solution to `points` grid points.
    pub(crate) fn advance(&mut self, points: usize) -> Result<()> {
        let s = self.stride;
        self.data.reserve(points.saturating_sub(self.len) * s);
        while self.tails.len() < points {
            let t = self.tails.len() as f64 * self.step;
            let tail = self.kernel.tail_at(t);
            self.cells.push(self.tails[self.tails.len() - 1] - tail);
            self.tails.push(tail);
        }
        let mut acc = vec![0.0; s];
        let mut g = vec![0.0; s];
        let cap = 1.0 / self.l1 + 1e-9;
        while self.len < points {
            let n = self.len;
            if n == 0 {
                let f0 = self.theta.exp();
                self.data.extend(std::iter::repeat_n(f0, s));
                self.len = 1;
                continue;
            }
            let w0 = 0.5 * self.cells[0];
            acc.iter_mut().for_each(|a| *a = 0.0);
            for j in 1..n {
                let w = 0.5 * (self.cells[j - 1] + self.cells[j]);
                let row = &self.data[(n - j) * s..(n - j + 1) * s];
                for (a, v) in acc.iter_mut().zip(row) {
                    *a += w * v;
                }
            }
            let w_end = 0.5 * self.cells[n - 1];
            for (a, v) in acc.iter_mut().zip(&self.data[..s]) {
                *a += w_end * v;
            }

            let t = n as f64 * self.step;
            let base = self.theta + acc[0] - (self.l1 - self.tails[n]);
            let mut f = self.data[(n - 1) * s];
            let mut converged = false;
            for _ in 0..500 {
                let next = (base + w0 * f).exp();
                if !next.is_finite() {
                    break;
                }
                let delta = (next - f).abs();
                f = next;
                if delta <= 1e-12 * f.max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged || f > cap || f * w0 >= 1.0 {
                return Err(Error::Diverged { t });
            }

            let denom = 1.0 - f * w0;
            let start = self.data.len();
            self.data.push(f);
            for k in 1..s {
                // g_j = ∂^j of the exponent; g_k is linear in F^(k)(t)
                for j in 1..k {
                    g[j - 1] = w0 * self.data[start + j] + acc[j] + if j == 1 { 1.0 } else { 0.0 };
                }
                g[k - 1] = 0.0;
                let lower = complete_bell(&g[..k])[k];
                let known = acc[k] + if k == 1 { 1.0 } else { 0.0 } + lower;
                let fk = f * known / denom;
                if !fk.is_finite() {
                    return Err(Error::Diverged { t });
                }
                self.data.push(fk);
            }
            self.len += 1;
        }
        Ok(())
    }

    /// `∫_0^∞ (F^(k) − target)` from the grid plus a fitted tail.
    fn tail_integral(&self, k: usize, target: f64) -> f64 {
        let column: Vec<f64> = self.column(k).map(|v| v - target).collect();
        let body = trapezoid(&column, 0.0, self.step);
        let floor = 1e-13 * target.abs().max(1.0);
        body + fit_tail(&column, self.step, self.kernel, floor).unwrap_or(0.0)
    }
}

/// `∫_T^∞ v` extrapolated from the second half of the grid.
///
/// Candidate decay models are a geometric `C ρ^s`, an algebraic
/// `C (1 + s)^{−q}`, and, for kernels with an algebraic tail, `A H(s) +
/// B h(s)`. The best fit is used when its worst relative residual is
/// below 10%; `None` means no model fits. Values that are pure rounding
/// noise (below `floor`) extrapolate to zero.
pub(crate) fn fit_tail(v: &[f64], step: f64, kernel: &Kernel, floor: f64) -> Option<f64> {
    let n = v.len();
    if n < 8 {
        return None;
    }
    let horizon = (n - 1) as f64 * step;
    let start = n / 2;
    let stride = ((n - start) / 2000).max(1);
    let idx: Vec<usize> = (start..n).step_by(stride).chain(std::iter::once(n - 1)).collect();
    let s: Vec<f64> = idx.iter().map(|&i| i as f64 * step).collect();
    let y: Vec<f64> = idx.iter().map(|&i| v[i]).collect();
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale <= floor {
        return Some(0.0);
    }
    let residual = |pred: &dyn Fn(f64) -> f64| -> f64 {
        s.iter().zip(&y).map(|(&si, &yi)| (pred(si) - yi).abs()).fold(0.0, f64::max) / scale
    };

    let mut best: Option<(f64, f64)> = None;
    let mut offer = |res: f64, integral: f64| {
        if res.is_finite() && integral.is_finite() && best.is_none_or(|(r, _)| res < r) {
            best = Some((res, integral));
        }
    };

    let sign = y[y.len() - 1].signum();
    if y.iter().all(|&yi| yi != 0.0 && yi.signum() == sign) {
        let logs: Vec<f64> = y.iter().map(|yi| yi.abs().ln()).collect();
        let ones = vec![1.0; s.len()];
        if let Some((a, slope)) = least_squares_2(&ones, &s, &logs) {
            let rate = -slope;
            if rate > 0.0 {
                let res = residual(&|t| sign * (a - rate * t).exp());
                offer(res, sign * (a - rate * horizon).exp() / rate);
            }
        }
        let log1p: Vec<f64> = s.iter().map(|t| t.ln_1p()).collect();
        if let Some((a, slope)) = least_squares_2(&ones, &log1p, &logs) {
            let q = -slope;
            if q > 1.0 {
                let res = residual(&|t| sign * (a - q * t.ln_1p()).exp());
                offer(res, sign * a.exp() * (1.0 + horizon).powf(1.0 - q) / (q - 1.0));
            }
        }
    }

    if let Some(area) = kernel.algebraic_tail_integral(horizon) {
        let tails: Vec<f64> = s.iter().map(|&t| kernel.tail_at(t)).collect();
        let dens: Vec<f64> = s.iter().map(|&t| kernel.h(t)).collect();
        if let Some((a, b)) = least_squares_2(&tails, &dens, &y) {
            let res = residual(&|t| a * kernel.tail_at(t) + b * kernel.h(t));
            offer(res, a * area + b * kernel.tail_at(horizon));
        }
    }

    best.filter(|&(res, _)| res <= 0.1).map(|(_, integral)| integral)
}

// Least squares for y ≈ a·u + b·w via column-scaled normal equations.
fn least_squares_2(u: &[f64], w: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let nu = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nw = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nu == 0.0 || nw == 0.0 {
        return None;
    }
    let (mut suu, mut suw, mut sww, mut suy, mut swy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((ui, wi), yi) in u.iter().zip(w).zip(y) {
        let (a, b) = (ui / nu, wi / nw);
        suu += a * a;
        suw += a * b;
        sww += b * b;
        suy += a * yi;
        swy += b * yi;
    }
    let det = suu * sww - suw * suw;
    if det < 1e-12 {
        return None;
    }
    let a = (suy * sww - swy * suw) / det;
    let b = (swy * suu - suy * suw) / det;
    Some((a / nu, b / nw))
}

/// `F^(0..=order)` on the final grid together with the integrals
/// `∫_0^∞ (F^(k) − x^(k))`.
#[derive(Debug, Clone)]
pub struct LadderSolution {
    pub theta: f64,
    pub x_derivs: Vec<f64>,
    pub grids: Vec<GridFunction>,
    pub integrals: Vec<f64>,
    pub horizon: f64,
}

/// Solves to `order` and doubles the horizon until every tail-corrected
/// integral changes by less than the configured tolerance.
pub fn solve_ladder(theta: f64, kernel: &Kernel, order: usize, config: &GridConfig) -> Result<LadderSolution> {
    config.validate()?;
    let l1 = kernel.l1_norm();
    let x = solve_x(theta, l1)?;
    let x_derivs = x_derivatives(x, l1, order)?;
    let mut solver = VolterraLadder::new(theta, kernel, config.step, order)?;

    let mut horizon = config.horizon;
    solver.advance(config.points(horizon))?;
    let estimate = |solver: &VolterraLadder| -> Vec<f64> {
        (0..=order).map(|k| solver.tail_integral(k, x_derivs[k])).collect()
    };
    let mut previous = estimate(&solver);
    loop {
        let next_horizon = 2.0 * horizon;
        if next_horizon > config.max_horizon * (1.0 + 1e-12) {
            return Err(Error::HorizonExhausted { horizon });
        }
        solver.advance(config.points(next_horizon))?;
        let current = estimate(&solver);
        let settled = previous
            .iter()
            .zip(&current)
            .all(|(p, c)| (c - p).abs() <= config.rel_tol * c.abs() + config.abs_tol);
        horizon = next_horizon;
        previous = current;
        if settled {
            break;
        }
    }
    Ok(LadderSolution {
        theta,
        grids: (0..=order).map(|k| solver.grid(k)).collect(),
        x_derivs,
        integrals: previous,
        horizon,
    })
}

/// `φ(θ) = ∫_0^∞ (F(s; θ) − x(θ)) ds`.
pub fn compute_phi(theta: f64, kernel: &Kernel, config: &GridConfig) -> Result<f64> {
    if theta == 0.0 {
        return Ok(0.0);
    }
    Ok(solve_ladder(theta, kernel, 0, config)?.integrals[0])
}

/// `ψ(θ) = e^{νφ(θ)}`.
pub fn compute_psi(theta: f64, model: &HawkesModel, config: &GridConfig) -> Result<f64> {
    Ok((model.nu() * compute_phi(theta, model.kernel(), config)?).exp())
}

/// `η(θ) = ν (x(θ) − 1)`.
pub fn compute_eta(theta: f64, model: &HawkesModel) -> Result<f64> {
    Ok(model.nu() * (solve_x(theta, model.l1_norm())? - 1.0))
}

/// Everything known about the generating function at one `θ`.
#[derive(Debug, Clone, Serialize)]
pub struct CgfContext {
    pub theta: f64,
    pub theta_c: f64,
    pub x_theta: f64,
    pub phi: f64,
    pub psi: f64,
    pub eta: f64,
    pub horizon: f64,
    #[serde(skip)]
    pub f: GridFunction,
    #[serde(skip)]
    nu: f64,
}

impl CgfContext {
    pub fn new(model: &HawkesModel, theta: f64, config: &GridConfig) -> Result<Self> {
        let sol = solve_ladder(theta, model.kernel(), 0, config)?;
        let phi = sol.integrals[0];
        let x_theta = sol.x_derivs[0];
        Ok(Self {
            theta,
            theta_c: theta_critical(model.l1_norm())?,
            x_theta,
            phi,
            psi: (model.nu() * phi).exp(),
            eta: model.nu() * (x_theta - 1.0),
            horizon: sol.horizon,
            f: sol.grids.into_iter().next().expect("order zero grid"),
            nu: model.nu(),
        })
    }

    /// `log E[e^{θ N_t}] = ν ∫_0^t (F − 1)`, exact up to grid error.
    pub fn log_mgf(&self, t: f64) -> f64 {
        self.nu * self.f.integral(t, 1.0)
    }

    /// `φ_t = ∫_0^t (F − x)`, the partial version of `φ`.
    pub fn phi_partial(&self, t: f64) -> f64 {
        self.f.integral(t, self.x_theta)
    }
}
