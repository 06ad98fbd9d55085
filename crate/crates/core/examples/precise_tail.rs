//! Saddle-point approximations of P(N_t ≥ xt) and P(N_t = xt).

use hawkes_tails::cgf::GridConfig;
use hawkes_tails::deviations::{ldp_point_from, ldp_tail_from, SaddleData};
use hawkes_tails::expansion::ExpansionContext;
use hawkes_tails::{HawkesModel, Kernel};

fn main() -> hawkes_tails::Result<()> {
    let model = HawkesModel::new(1.0, Kernel::exponential(1.0, 2.0)?)?;
    let config = GridConfig::default();
    for x in [3.0, 4.0, 5.0] {
        let saddle = SaddleData::new(&model, x)?;
        let exp = ExpansionContext::new(&model, x, 4, &config)?;
        println!("x = {x}: theta* = {:.6}, I = {:.6}, I'' = {:.6}", saddle.theta_star, saddle.rate, saddle.rate_d2);
        println!("{:>6} {:>12} {:>12} {:>12}", "t", "tail v=1", "tail v=2", "point v=2");
        for t in [10.0, 25.0, 50.0, 100.0] {
            println!(
                "{t:>6} {:>12.4e} {:>12.4e} {:>12.4e}",
                ldp_tail_from(&saddle, &exp, t, 1)?,
                ldp_tail_from(&saddle, &exp, t, 2)?,
                ldp_point_from(&saddle, &exp, t, 2)?
            );
        }
    }
    // point probabilities need an integer count
    let saddle = SaddleData::new(&model, 4.2)?;
    let exp = ExpansionContext::new(&model, 4.2, 4, &config)?;
    if let Err(e) = ldp_point_from(&saddle, &exp, 2.5, 1) {
        println!("t = 2.5, x = 4.2: {e}");
    }
    Ok(())
}
