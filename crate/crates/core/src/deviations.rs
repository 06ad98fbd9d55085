//! Rate function, saddle point, and the precise large, central and
//! moderate deviation approximations.

use serde::Serialize;

use crate::cgf::GridConfig;
use crate::error::{Error, Result};
use crate::expansion::ExpansionContext;
use crate::simulator::HawkesModel;
use crate::stats::normal_upper_tail;

/// Law-of-large-numbers rate `ν / (1 − ‖h‖)`.
pub fn mean_rate(model: &HawkesModel) -> f64 {
    model.nu() / (1.0 - model.l1_norm())
}

/// Variance coefficient `ν / (1 − ‖h‖)^3` of the central limit theorem.
pub fn asymptotic_var(model: &HawkesModel) -> f64 {
    model.nu() / (1.0 - model.l1_norm()).powi(3)
}

/// `η′(0), η″(0), η‴(0)`.
pub fn eta_at_zero(model: &HawkesModel) -> [f64; 3] {
    let (nu, l1) = (model.nu(), model.l1_norm());
    let gap = 1.0 - l1;
    [nu / gap, nu / gap.powi(3), nu * (1.0 + 2.0 * l1) / gap.powi(5)]
}

fn check_level(x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "x",
            value: x,
            reason: "level must be positive",
        });
    }
    Ok(())
}

/// `θ* = I′(x) = log(x/(ν+‖h‖x)) − ‖h‖x/(ν+‖h‖x) + ‖h‖`.
pub fn theta_star(x: f64, nu: f64, l1: f64) -> Result<f64> {
    check_level(x)?;
    let d = nu + l1 * x;
    Ok((x / d).ln() - l1 * x / d + l1)
}

/// `I(x) = x log(x/(ν+‖h‖x)) − x + ‖h‖x + ν`.
pub fn rate(x: f64, nu: f64, l1: f64) -> Result<f64> {
    check_level(x)?;
    Ok(x * (x / (nu + l1 * x)).ln() - x + l1 * x + nu)
}

/// `I″(x) = ν² / (x (ν + ‖h‖x)²)`.
pub fn rate_d2(x: f64, nu: f64, l1: f64) -> Result<f64> {
    check_level(x)?;
    Ok(nu * nu / (x * (nu + l1 * x).powi(2)))
}

/// `I^(i)(x)` for `i ≥ 2`.
pub fn rate_dk(x: f64, nu: f64, l1: f64, i: usize) -> Result<f64> {
    check_level(x)?;
    if i < 2 {
        return Err(Error::InvalidParameter {
            name: "i",
            value: i as f64,
            reason: "closed form holds for derivatives of order two and up",
        });
    }
    let y = l1 * x / (nu + l1 * x);
    let fact: f64 = (1..=i - 2).map(|k| k as f64).product();
    let sign = if i.is_multiple_of(2) { 1.0 } else { -1.0 };
    let fi = i as f64;
    let poly = (fi - 1.0) * y.powi(i as i32) - fi * y.powi(i as i32 - 1) + 1.0;
    Ok(fact * sign * x.powi(1 - i as i32) * poly)
}

/// Saddle-point summary of one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddleData {
    pub x: f64,
    pub theta_star: f64,
    pub rate: f64,
    pub rate_d2: f64,
    pub mean: f64,
}

impl SaddleData {
    pub fn new(model: &HawkesModel, x: f64) -> Result<Self> {
        let (nu, l1) = (model.nu(), model.l1_norm());
        Ok(Self {
            x,
            theta_star: theta_star(x, nu, l1)?,
            rate: rate(x, nu, l1)?,
            rate_d2: rate_d2(x, nu, l1)?,
            mean: mean_rate(model),
        })
    }

    /// `e^{−tI(x)} √(I″(x) / 2πt)`.
    pub fn gaussian_factor(&self, t: f64) -> f64 {
        (-t * self.rate).exp() * (self.rate_d2 / (2.0 * std::f64::consts::PI * t)).sqrt()
    }
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 {
        return Err(Error::InvalidParameter {
            name: "order",
            value: 0.0,
            reason: "at least the leading term is required",
        });
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    crate::error::ensure_finite_positive("t", t)
}

/// Ladder depth needed for an order-`v` approximation.
pub fn depth_for_order(order: usize) -> usize {
    2 * order
}

/// Order-`v` approximation of `P(N_t ≥ tx)`; `v` counts the retained
/// terms `ψ, b_1, …, b_{v−1}`.
pub fn ldp_tail(model: &HawkesModel, t: f64, x: f64, order: usize, config: &GridConfig) -> Result<f64> {
    check_order(order)?;
    let saddle = SaddleData::new(model, x)?;
    if !(x > saddle.mean) {
        return Err(Error::NotAboveMean { x, mean: saddle.mean });
    }
    let expansion = ExpansionContext::new(model, x, depth_for_order(order), config)?;
    ldp_tail_from(&saddle, &expansion, t, order)
}

/// [`ldp_tail`] reusing precomputed saddle and expansion data.
pub fn ldp_tail_from(saddle: &SaddleData, expansion: &ExpansionContext, t: f64, order: usize) -> Result<f64> {
    check_order(order)?;
    check_time(t)?;
    if !(saddle.x > saddle.mean) {
        return Err(Error::NotAboveMean {
            x: saddle.x,
            mean: saddle.mean,
        });
    }
    let series = series(expansion.psi(), &expansion.b, t, order)?;
    let lattice = -(-saddle.theta_star).exp_m1();
    Ok(saddle.gaussian_factor(t) * series / lattice)
}

/// Order-`v` approximation of `P(N_t = tx)` for integer `tx`.
pub fn ldp_point(model: &HawkesModel, t: f64, x: f64, order: usize, config: &GridConfig) -> Result<f64> {
    check_order(order)?;
    let level = lattice_level(t, x)?;
    let saddle = SaddleData::new(model, level)?;
    let expansion = ExpansionContext::new(model, level, depth_for_order(order), config)?;
    ldp_point_from(&saddle, &expansion, t, order)
}

pub fn ldp_point_from(saddle: &SaddleData, expansion: &ExpansionContext, t: f64, order: usize) -> Result<f64> {
    check_order(order)?;
    let series = series(expansion.psi(), &expansion.a, t, order)?;
    Ok(saddle.gaussian_factor(t) * series)
}

/// `x` snapped so that `tx` is the nearest integer, when within `1e-9`.
pub fn lattice_level(t: f64, x: f64) -> Result<f64> {
    check_time(t)?;
    check_level(x)?;
    let tx = t * x;
    let n = tx.round();
    if (tx - n).abs() >= 1e-9 {
        return Err(Error::LatticeViolation { tx });
    }
    Ok(n / t)
}

fn series(lead: f64, corrections: &[f64], t: f64, order: usize) -> Result<f64> {
    if corrections.len() + 1 < order {
        return Err(Error::MissingLadder {
            needed: order - 1,
            available: corrections.len(),
        });
    }
    let mut sum = lead;
    let mut power = 1.0;
    for c in &corrections[..order - 1] {
        power /= t;
        sum += c * power;
    }
    Ok(sum)
}

/// `Φ̄(y)`, approximating `P(N_t ≥ μt + σ√t y)`.
pub fn clt_tail(y: f64) -> f64 {
    normal_upper_tail(y)
}

/// `μt + σ√t y` with `μ = ν/(1−‖h‖)` and `σ² = ν/(1−‖h‖)³`.
pub fn clt_threshold(model: &HawkesModel, t: f64, y: f64) -> f64 {
    mean_rate(model) * t + (t * asymptotic_var(model)).sqrt() * y
}

/// Which moderate-deviation form to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MdpForm {
    /// Gaussian tail with the cubic cumulant correction.
    Cubic,
    /// Rate-function series through `I^(m−1)`; `m ≥ 3`.
    Series(usize),
}

/// Approximation of `P(N_t ≥ μt + σ√t y)` in the moderate range.
pub fn mdp_tail(model: &HawkesModel, t: f64, y: f64, form: MdpForm) -> Result<f64> {
    check_time(t)?;
    if !(y > 0.0) {
        return Err(Error::InvalidParameter {
            name: "y",
            value: y,
            reason: "moderate deviations need y > 0",
        });
    }
    let [d1, d2, d3] = eta_at_zero(model);
    let lead = 1.0 / (y * (2.0 * std::f64::consts::PI).sqrt());
    match form {
        MdpForm::Cubic => Ok(lead * (-0.5 * y * y + d3 / (6.0 * d2.powf(1.5)) * y.powi(3) / t.sqrt()).exp()),
        MdpForm::Series(m) => {
            if m < 3 {
                return Err(Error::InvalidParameter {
                    name: "m",
                    value: m as f64,
                    reason: "series form needs m ≥ 3",
                });
            }
            let (nu, l1) = (model.nu(), model.l1_norm());
            let mut exponent = 0.0;
            let mut fact = 1.0;
            for i in 2..m {
                fact *= i as f64;
                let di = rate_dk(d1, nu, l1, i)?;
                exponent += di / fact * d2.powf(i as f64 / 2.0) * y.powi(i as i32) / t.powf((i as f64 - 2.0) / 2.0);
            }
            Ok(lead * (-exponent).exp())
        }
    }
}

/// Cubic form written for `P(N_t ≥ μt + a x)` with a scale `a` between
/// `√t` and `t^{3/4}`.
pub fn mdp_scaled_tail(model: &HawkesModel, t: f64, scale: f64, x: f64) -> Result<f64> {
    check_time(t)?;
    let (nu, l1) = (model.nu(), model.l1_norm());
    let gap = 1.0 - l1;
    let ax = scale * x;
    if !(ax > 0.0) {
        return Err(Error::InvalidParameter {
            name: "x",
            value: x,
            reason: "moderate deviations need a positive excess",
        });
    }
    let lead = nu.sqrt() / (gap.powf(1.5) * (2.0 * std::f64::consts::PI).sqrt()) * t.sqrt() / ax;
    let quad = -gap.powi(3) / (2.0 * nu) * ax * ax / t;
    let cubic = (1.0 + 2.0 * l1) * gap.powi(4) / (6.0 * nu * nu) * ax.powi(3) / (t * t);
    Ok(lead * (quad + cubic).exp())
}
