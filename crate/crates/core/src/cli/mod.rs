//! Command-line front end: `tail`, `table`, `diag` and `simulate`.
//!
//! Settings come from an optional JSON config file (`--config`), then
//! flags, which win. The thread count falls back to `HAWKES_THREADS`.

mod commands;
mod config;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{
    cmd_diag, cmd_simulate, cmd_table, cmd_tail, rel_diff_text, sci3, verify_table_csv, TableConstants, TableRow,
    TailRow, TABLE_HEADER,
};
pub use config::{kernel_preset, Method, RunConfig};

use crate::error::{Error, Result};
use crate::simulator::Generator;

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "HAWKES_THREADS";

#[derive(Debug, Parser)]
#[command(name = "hawkes-tail", version, about = "Tail probabilities of linear Hawkes processes")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// JSON file with any `RunConfig` fields; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Baseline intensity.
    #[arg(long, global = true)]
    nu: Option<f64>,
    /// `exp`, `powerlaw`, or a JSON kernel object.
    #[arg(long, global = true)]
    kernel: Option<String>,
    /// Volterra grid step.
    #[arg(long, global = true)]
    step: Option<f64>,
    /// Initial Volterra horizon.
    #[arg(long, global = true)]
    horizon: Option<f64>,
    /// Largest Volterra horizon tried.
    #[arg(long, global = true)]
    max_horizon: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of simulated paths.
    #[arg(long = "paths", global = true)]
    n_paths: Option<u64>,
    /// `cluster` or `thinning`.
    #[arg(long, global = true)]
    generator: Option<Generator>,
    /// Worker threads (default: all cores, or the env variable).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write results here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One tail probability by the chosen method.
    Tail {
        /// is, naive, order1, order2, clt or mdp.
        #[arg(long)]
        method: Option<Method>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        x: Option<f64>,
        /// Standardized excess for clt and mdp.
        #[arg(long)]
        y: Option<f64>,
        /// Series length for mdp; omit for the cubic form.
        #[arg(long)]
        m: Option<usize>,
    },
    /// Sampling and expansion columns over times and levels.
    Table {
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<f64>>,
    },
    /// JSON dump of the saddle point, ladders and coefficients.
    Diag {
        #[arg(long)]
        x: Option<f64>,
        /// Ladder depth; 2k + 2 gives coefficients up to index k.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Event times of simulated paths.
    Simulate {
        /// Path horizon.
        #[arg(long)]
        t: Option<f64>,
    },
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let c = &cli.common;
    let mut cfg = match &c.config {
        Some(path) => RunConfig::from_json_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = c.nu {
        cfg.nu = v;
    }
    if let Some(k) = &c.kernel {
        cfg.kernel = kernel_preset(k)?;
    }
    if let Some(v) = c.step {
        cfg.grid.step = v;
    }
    if let Some(v) = c.horizon {
        cfg.grid.horizon = v;
        cfg.grid.max_horizon = cfg.grid.max_horizon.max(v);
    }
    if let Some(v) = c.max_horizon {
        cfg.grid.max_horizon = v;
    }
    if let Some(v) = c.seed {
        cfg.seed = v;
    }
    if let Some(v) = c.n_paths {
        cfg.n_paths = v;
    }
    if let Some(v) = c.generator {
        cfg.generator = v;
    }
    if c.threads.is_some() {
        cfg.threads = c.threads;
    }
    if cfg.threads.is_none() {
        if let Ok(v) = std::env::var(THREADS_ENV) {
            let n = v
                .parse()
                .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
            cfg.threads = Some(n);
        }
    }
    if c.output.is_some() {
        cfg.output = c.output.clone();
    }
    match &cli.command {
        Command::Tail { method, t, x, y, m } => {
            if let Some(v) = method {
                cfg.method = *v;
            }
            cfg.t = t.or(cfg.t);
            cfg.x = x.or(cfg.x);
            cfg.y = y.or(cfg.y);
            cfg.m = m.or(cfg.m);
        }
        Command::Table { times, levels } => {
            if let Some(v) = times {
                cfg.times = v.clone();
            }
            if let Some(v) = levels {
                cfg.levels = v.clone();
            }
        }
        Command::Diag { x, depth } => {
            cfg.x = x.or(cfg.x);
            if let Some(d) = depth {
                cfg.depth = *d;
            }
        }
        Command::Simulate { t } => {
            cfg.t = t.or(cfg.t);
        }
    }
    Ok(cfg)
}

fn dispatch(cli: &Cli, cfg: &RunConfig) -> Result<()> {
    if let Some(n) = cfg.threads {
        if n == 0 {
            return Err(Error::Config("thread count must be positive".into()));
        }
        // a pool may already exist when called repeatedly in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let mut out: Box<dyn Write> = match &cfg.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    };
    match cli.command {
        Command::Tail { .. } => {
            cmd_tail(cfg, &mut out)?;
        }
        Command::Table { .. } => {
            cmd_table(cfg, &mut out, &mut io::stderr())?;
        }
        Command::Diag { .. } => {
            cmd_diag(cfg, &mut out)?;
        }
        Command::Simulate { .. } => {
            cmd_simulate(cfg, &mut out)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Runs the command line and returns the process exit status: 0 on
/// success, 2 for usage and configuration errors, 1 otherwise.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = resolve(&cli).and_then(|cfg| dispatch(&cli, &cfg));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::InvalidParameter { .. } | Error::Unstable { .. } | Error::Json(_) => 2,
                _ => 1,
            }
        }
    }
}
