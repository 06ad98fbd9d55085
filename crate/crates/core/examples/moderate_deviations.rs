//! Gaussian and moderate-deviation approximations near the mean.

use hawkes_tails::deviations::{asymptotic_var, clt_tail, clt_threshold, eta_at_zero, mdp_tail, MdpForm};
use hawkes_tails::importance::is_tail;
use hawkes_tails::{HawkesModel, Kernel};

fn main() -> hawkes_tails::Result<()> {
    let model = HawkesModel::new(1.0, Kernel::exponential(1.0, 2.0)?)?;
    println!("cumulant slopes at 0: {:?}, variance {}", eta_at_zero(&model), asymptotic_var(&model));

    let t = 200.0;
    println!("{:>5} {:>10} {:>11} {:>11} {:>11} {:>11}", "y", "level", "clt", "cubic", "series(5)", "sampled");
    for y in [0.5, 1.0, 2.0, 3.0, 4.0] {
        let level = clt_threshold(&model, t, y);
        let sampled = is_tail(&model, t, level / t, 50_000, 9)?;
        println!(
            "{y:>5} {level:>10.2} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e}",
            clt_tail(y),
            mdp_tail(&model, t, y, MdpForm::Cubic)?,
            mdp_tail(&model, t, y, MdpForm::Series(5))?,
            sampled.estimate
        );
    }
    Ok(())
}
