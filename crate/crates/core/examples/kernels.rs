//! Built-in and tabulated exciting functions.

use std::sync::Arc;

use hawkes_tails::{Kernel, KernelSpec};

fn main() -> hawkes_tails::Result<()> {
    let exp = Kernel::exponential(1.0, 2.0)?;
    let pow = Kernel::power_law(1.0, 3.0)?;
    for (name, k) in [("exp", &exp), ("powerlaw", &pow)] {
        println!("{name:>9}: |h| = {}", k.l1_norm());
        for t in [0.0, 0.5, 1.0, 5.0] {
            println!("{:>11}t={t:<4} h={:.6} H={:.6}", "", k.eval(t)?, k.tail(t)?);
        }
    }

    // kernels also come from JSON, as in config files
    let spec: KernelSpec = serde_json::from_str(r#"{"type": "powerlaw", "c": 0.6, "p": 2.5}"#)?;
    let from_json = Kernel::try_from(spec)?;
    println!("json kernel |h| = {:.4}", from_json.l1_norm());

    // a sampled kernel needs its norm and tail supplied
    let times: Vec<f64> = (0..=100).map(|i| i as f64 * 0.05).collect();
    let values: Vec<f64> = times.iter().map(|t| 0.8 * (-2.0 * t).exp()).collect();
    let tab = Kernel::tabulated(times, values, 0.4, Arc::new(|t| 0.4 * (-2.0 * t).exp()))?;
    println!("tabulated h(0.125) = {:.6} (exact {:.6})", tab.eval(0.125)?, 0.8 * (-0.25f64).exp());

    // a norm of one or more is rejected
    match Kernel::exponential(2.0, 2.0) {
        Err(e) => println!("Exp(2,2): {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
