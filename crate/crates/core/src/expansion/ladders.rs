//! Derivatives at the saddle of `x(θ)`, `F(·; θ)` and `ψ(θ)`.
//!
//! All three are exponentials of something whose derivatives are known, so
//! `d^k e^{g} = e^{g} B_k(g', …, g^(k))` with `B_k` the complete Bell
//! polynomial. For `x` and `F` the top derivative enters `g^(k)` linearly,
//! which turns each order into a linear equation.

use crate::cgf::{solve_ladder, GridConfig, GridFunction};
use crate::error::{Error, Result};
use crate::kernel::Kernel;

/// `B_0, …, B_n` evaluated at `g = (g_1, …, g_n)`.
pub fn complete_bell(g: &[f64]) -> Vec<f64> {
    let n = g.len();
    let mut b = Vec::with_capacity(n + 1);
    b.push(1.0);
    let mut binom = vec![1.0f64];
    for m in 0..n {
        // B_{m+1} = Σ_i C(m, i) B_{m−i} g_{i+1}
        let next: f64 = (0..=m).map(|i| binom[i] * b[m - i] * g[i]).sum();
        b.push(next);
        let mut row = vec![1.0; m + 2];
        for i in 1..=m {
            row[i] = binom[i - 1] + binom[i];
        }
        binom = row;
    }
    b
}

/// `x^(0..=order)(θ*)`, with `x^(0) = x(θ*)`.
///
/// Differentiating `x = e^{θ + ‖h‖(x − 1)}` gives
/// `x^(k) (1 − ‖h‖x) = x (δ_{k1} + B_k(g) |_{g_k = 0})` with
/// `g_1 = 1 + ‖h‖x′` and `g_j = ‖h‖x^(j)`.
pub fn x_derivatives(x_at_star: f64, l1: f64, order: usize) -> Result<Vec<f64>> {
    let product = x_at_star * l1;
    if !(1.0 - product > 1e-12) {
        return Err(Error::SingularSaddle { product });
    }
    let denom = 1.0 - product;
    let mut x = vec![x_at_star];
    let mut g = Vec::with_capacity(order);
    for k in 1..=order {
        g.push(0.0);
        let lower = complete_bell(&g)[k];
        let xk = x_at_star * (if k == 1 { 1.0 } else { 0.0 } + lower) / denom;
        x.push(xk);
        g[k - 1] = l1 * xk + if k == 1 { 1.0 } else { 0.0 };
    }
    Ok(x)
}

/// `F^(0..=order)(·; θ*)` on the grid, solved jointly with `F`.
pub fn f_derivatives(theta_star: f64, kernel: &Kernel, order: usize, config: &GridConfig) -> Result<Vec<GridFunction>> {
    Ok(solve_ladder(theta_star, kernel, order, config)?.grids)
}

/// `ψ^(0..=K)` from `I_j = ∫_0^∞ (F^(j) − x^(j))`, `j = 0..=K`:
/// `ψ^(k) = ψ B_k(ν I_1, …, ν I_k)` with `ψ = e^{ν I_0}`.
pub fn psi_derivatives(nu: f64, integrals: &[f64]) -> Vec<f64> {
    let psi = (nu * integrals[0]).exp();
    let g: Vec<f64> = integrals[1..].iter().map(|v| nu * v).collect();
    complete_bell(&g).into_iter().map(|b| psi * b).collect()
}
