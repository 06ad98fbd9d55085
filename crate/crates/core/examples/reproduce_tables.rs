//! Sampling and expansion columns for both reference kernels.
//!
//! Pass a path count as the first argument (default 20000).

use hawkes_tails::cli::{cmd_table, kernel_preset, RunConfig};

fn main() -> hawkes_tails::Result<()> {
    let n_paths = std::env::args().nth(1).map_or(Ok(20_000), |s| s.parse()).expect("path count");
    for preset in ["exp", "powerlaw"] {
        println!("# kernel {preset}");
        let cfg = RunConfig {
            kernel: kernel_preset(preset)?,
            n_paths,
            ..RunConfig::default()
        };
        let mut out = std::io::stdout().lock();
        cmd_table(&cfg, &mut out, &mut std::io::stderr())?;
    }
    Ok(())
}
