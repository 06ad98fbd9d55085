//! Partitions, derivative ladders and the correction coefficients.

use hawkes_tails::cgf::GridConfig;
use hawkes_tails::expansion::{a1_closed_form, b1_closed_form, partitions, x_derivatives, ExpansionContext};
use hawkes_tails::{HawkesModel, Kernel};

fn main() -> hawkes_tails::Result<()> {
    for n in 0..=5 {
        println!("p({n}) = {}: {:?}", partitions(n).len(), partitions(n).tuples());
    }

    // x = 4, ν = 1, |h| = 1/2 puts x(θ*) at 4/3
    println!("x ladder at the saddle: {:?}", x_derivatives(4.0 / 3.0, 0.5, 4)?);

    let model = HawkesModel::new(1.0, Kernel::exponential(1.0, 2.0)?)?;
    let ctx = ExpansionContext::new(&model, 4.0, 6, &GridConfig::default())?;
    println!("theta* = {:.7}", ctx.theta_star);
    println!("eta ladder: {:?}", ctx.eta_derivs);
    println!("psi ladder: {:?}", ctx.psi_derivs);
    println!("a = {:?}", ctx.a);
    println!("b = {:?}", ctx.b);
    println!(
        "closed forms: a1 = {:.10}, b1 = {:.10}",
        a1_closed_form(&ctx.psi_derivs, &ctx.eta_derivs),
        b1_closed_form(ctx.theta_star, &ctx.psi_derivs, &ctx.eta_derivs)
    );
    println!("c0 = {:.5}, c1 = {:.5}", ctx.c0(), ctx.c1().unwrap_or(f64::NAN));
    ctx.write_json(std::io::stdout().lock())?;
    println!();
    Ok(())
}
