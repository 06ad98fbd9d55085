//! Correction coefficients of the point and tail expansions.
//!
//! Both come from a saddle-point expansion of the inversion integral: `ψ`
//! and the non-quadratic part of the cumulant `η` are Taylor expanded around
//! `θ*`, and Gaussian moments `(2m − 1)!!` integrate the result. The tail
//! version additionally expands the lattice factor `1/(1 − e^{−θ})`.

use super::partitions::{block_count, denominator, partitions};
use crate::error::{Error, Result};
use crate::stats::CompensatedSum;

/// `n!!` for odd `n ≥ −1`, with `(−1)!! = 1`; also defined for even `n`.
pub fn double_factorial(n: i64) -> f64 {
    let mut acc = 1.0;
    let mut k = n;
    while k > 1 {
        acc *= k as f64;
        k -= 2;
    }
    acc
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn require(name_len: usize, needed: usize) -> Result<()> {
    if name_len <= needed {
        return Err(Error::MissingLadder {
            needed,
            available: name_len.saturating_sub(1),
        });
    }
    Ok(())
}

/// Gaussian-integrated Taylor terms of total order `total`:
/// `Σ_ℓ ψ^(total−ℓ)/(total−ℓ)! Σ_{m ⊢ ℓ} (−1)^{|m|}/den(m) Π_j c_j^{m_j}
///  · (−1)^k (2(k + |m|) − 1)!! / η″^k`,
/// with `c_j = η^(j+2) / ((j+2)(j+1) η″)`.
fn gaussian_terms(k: usize, total: usize, psi: &[f64], eta: &[f64]) -> f64 {
    let curvature = eta[2];
    let sign_k = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut sum = CompensatedSum::default();
    for ell in 0..=total {
        let psi_term = psi[total - ell] / factorial(total - ell);
        for m in partitions(ell).iter() {
            let blocks = block_count(m) as usize;
            let sign = if blocks.is_multiple_of(2) { 1.0 } else { -1.0 };
            let mut prod = 1.0;
            for (idx, &mj) in m.iter().enumerate() {
                let j = idx + 1;
                let c = eta[j + 2] / (((j + 2) * (j + 1)) as f64 * curvature);
                prod *= c.powi(mj as i32);
            }
            let moment = sign_k * double_factorial(2 * (k + blocks) as i64 - 1) / curvature.powi(k as i32);
            sum.add(psi_term * sign / denominator(m) as f64 * prod * moment);
        }
    }
    sum.value()
}

/// `a_k` of the point-probability expansion.
///
/// `psi` holds `ψ^(0..)` and `eta` holds `η^(0..)` at the saddle; at least
/// `2k` and `2k + 2` derivatives are needed.
pub fn coeff_a(k: usize, psi: &[f64], eta: &[f64]) -> Result<f64> {
    require(psi.len(), 2 * k)?;
    require(eta.len(), 2 * k + 2)?;
    Ok(gaussian_terms(k, 2 * k, psi, eta))
}

/// `b_k` of the tail expansion, normalized so that
/// `P(N_t ≥ tx) ≈ e^{−tI} √(I″/2πt) (ψ + b_1/t + …) / (1 − e^{−θ*})`.
///
/// The lattice factor `1/(1 − e^{−θ})` is expanded with its own partition
/// sum; its `n`-th Taylor term is combined with the Gaussian terms of
/// order `2k − n`.
pub fn coeff_b(k: usize, theta_star: f64, psi: &[f64], eta: &[f64]) -> Result<f64> {
    if !(theta_star > 0.0) {
        return Err(Error::InvalidParameter {
            name: "theta_star",
            value: theta_star,
            reason: "tail coefficients need a level above the mean",
        });
    }
    require(psi.len(), 2 * k)?;
    require(eta.len(), 2 * k + 2)?;
    let q = (-theta_star).exp();
    let one_minus = -(-theta_star).exp_m1();
    let mut sum = CompensatedSum::default();
    for n in 0..=2 * k {
        let inner = gaussian_terms(k, 2 * k - n, psi, eta);
        let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
        for m in partitions(n).iter() {
            let blocks = block_count(m) as i32;
            let lattice = q.powi(blocks) * factorial(blocks as usize) * one_minus.powi(-blocks) / denominator(m) as f64;
            sum.add(parity * lattice * inner);
        }
    }
    Ok(sum.value())
}

/// Hand-expanded `a_1`.
pub fn a1_closed_form(psi: &[f64], eta: &[f64]) -> f64 {
    let (e2, e3, e4) = (eta[2], eta[3], eta[4]);
    -0.5 * psi[2] / e2 + (psi[0] * e4 + 4.0 * psi[1] * e3) / (8.0 * e2 * e2)
        - 15.0 * psi[0] * e3 * e3 / (72.0 * e2.powi(3))
}

/// Hand-expanded `b_1`, same normalization as [`coeff_b`].
pub fn b1_closed_form(theta_star: f64, psi: &[f64], eta: &[f64]) -> f64 {
    let (e2, e3) = (eta[2], eta[3]);
    let q = (-theta_star).exp();
    let r = q / (1.0 - q);
    -0.5 * psi[0] * (q + q * q) / ((1.0 - q).powi(2) * e2) + a1_closed_form(psi, eta) + r * psi[1] / e2
        - r * psi[0] * e3 / (2.0 * e2 * e2)
}
