//! The fixed point x(θ), the Volterra solution F(t; θ) and the limits φ, ψ, η.

use hawkes_tails::cgf::{solve_f, solve_x, theta_critical, CgfContext, GridConfig};
use hawkes_tails::{HawkesModel, Kernel};

fn main() -> hawkes_tails::Result<()> {
    let theta_c = theta_critical(0.5)?;
    println!("theta_c = {theta_c:.7}, x(theta_c) = {:.7}", solve_x(theta_c, 0.5)?);

    let theta = 0.1210154;
    let kernel = Kernel::exponential(1.0, 2.0)?;
    let f = solve_f(theta, &kernel, 0.01, 20.0)?;
    for t in [0.0, 0.5, 1.0, 2.0, 5.0, 20.0] {
        println!("F({t:>4}) = {:.8}", f.at(t));
    }
    println!("x(theta) = {:.8}", solve_x(theta, 0.5)?);

    let config = GridConfig::default();
    for (name, kernel) in [("exp", kernel), ("powerlaw", Kernel::power_law(1.0, 3.0)?)] {
        let model = HawkesModel::new(1.0, kernel)?;
        let ctx = CgfContext::new(&model, theta, &config)?;
        println!(
            "{name:>9}: phi = {:.6}  psi = {:.6}  eta = {:.6}  (horizon {})",
            ctx.phi, ctx.psi, ctx.eta, ctx.horizon
        );
        // log E[e^{θN_t}] − tη approaches νφ
        for t in [5.0, 20.0, 80.0] {
            println!("{:>11}t={t:<3} log mgf − t·eta = {:.6}", "", ctx.log_mgf(t) - t * ctx.eta);
        }
    }
    Ok(())
}
