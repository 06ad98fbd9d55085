//! Thinning and cluster simulation of the same model.

use hawkes_tails::simulator::{sample_counts, simulate_cluster, simulate_thinning, write_paths_csv, Generator};
use hawkes_tails::stats::ks_two_sample;
use hawkes_tails::{HawkesModel, Kernel};

fn main() -> hawkes_tails::Result<()> {
    let model = HawkesModel::new(1.0, Kernel::exponential(1.0, 2.0)?)?;

    let a = simulate_thinning(&model, 10.0, 7);
    let b = simulate_cluster(&model, 10.0, 7);
    println!("one path on [0, 10]: thinning {} events, cluster {} events", a.len(), b.len());
    write_paths_csv(std::slice::from_ref(&a), std::io::stdout().lock())?;

    let t = 2.0;
    let n = 20_000;
    let thin = sample_counts(&model, t, n, 1, Generator::Thinning);
    let clus = sample_counts(&model, t, n, 2, Generator::Cluster);
    let mean = |v: &[u64]| v.iter().sum::<u64>() as f64 / v.len() as f64;
    println!("E[N_2]: thinning {:.4}, cluster {:.4}, exact {:.4}", mean(&thin), mean(&clus), 2.0 * t - 1.0 + (-t).exp());

    let as_f64 = |v: &[u64]| v.iter().map(|&c| c as f64).collect::<Vec<_>>();
    let (d, p) = ks_two_sample(&as_f64(&thin), &as_f64(&clus));
    println!("KS distance {d:.4}, p-value {p:.3}");
    Ok(())
}
