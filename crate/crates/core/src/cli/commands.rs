use std::io::{Read, Write};

use serde::Serialize;

use super::config::{Method, RunConfig};
use crate::cgf::theta_critical;
use crate::deviations::{
    clt_tail, clt_threshold, depth_for_order, ldp_tail_from, mdp_tail, MdpForm, SaddleData,
};
use crate::error::{Error, Result};
use crate::expansion::ExpansionContext;
use crate::importance::is_tail_with;
use crate::kernel::KernelSpec;
use crate::simulator::{mc_tail_with, simulate_many, write_paths_csv};

/// One computed tail probability.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailRow {
    pub method: &'static str,
    pub t: f64,
    /// Level, or threshold divided by `t` for `clt` and `mdp`.
    pub x: f64,
    pub estimate: f64,
    pub std_error: Option<f64>,
}

/// Computes one tail probability and writes it as a CSV row with header
/// `method,t,x,estimate,std_error`.
pub fn cmd_tail(cfg: &RunConfig, out: &mut dyn Write) -> Result<TailRow> {
    let model = cfg.model()?;
    let t = cfg.require_t()?;
    let row = match cfg.method {
        Method::Is => {
            let x = cfg.require_x()?;
            let est = is_tail_with(&model, t, x, cfg.n_paths, cfg.seed, cfg.generator)?;
            TailRow {
                method: "is",
                t,
                x,
                estimate: est.estimate,
                std_error: Some(est.std_error),
            }
        }
        Method::Naive => {
            let x = cfg.require_x()?;
            let est = mc_tail_with(&model, t, x, cfg.n_paths, cfg.seed, cfg.generator)?;
            TailRow {
                method: "naive",
                t,
                x,
                estimate: est.estimate,
                std_error: Some(est.std_error),
            }
        }
        Method::Order1 | Method::Order2 => {
            let x = cfg.require_x()?;
            let order = if cfg.method == Method::Order1 { 1 } else { 2 };
            let saddle = SaddleData::new(&model, x)?;
            if !(x > saddle.mean) {
                return Err(Error::NotAboveMean { x, mean: saddle.mean });
            }
            let expansion = ExpansionContext::new(&model, x, depth_for_order(order), &cfg.grid)?;
            TailRow {
                method: cfg.method.name(),
                t,
                x,
                estimate: ldp_tail_from(&saddle, &expansion, t, order)?,
                std_error: None,
            }
        }
        Method::Clt | Method::Mdp => {
            let y = cfg.require_y()?;
            let estimate = if cfg.method == Method::Clt {
                clt_tail(y)
            } else {
                let form = cfg.m.map_or(MdpForm::Cubic, MdpForm::Series);
                mdp_tail(&model, t, y, form)?
            };
            TailRow {
                method: cfg.method.name(),
                t,
                x: clt_threshold(&model, t, y) / t,
                estimate,
                std_error: None,
            }
        }
    };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["method", "t", "x", "estimate", "std_error"])?;
    w.write_record([
        row.method.to_string(),
        row.t.to_string(),
        row.x.to_string(),
        format!("{:e}", row.estimate),
        row.std_error.map(|s| format!("{s:e}")).unwrap_or_default(),
    ])?;
    w.flush()?;
    Ok(row)
}

/// Three significant digits with a two-digit exponent, e.g. `2.02E-03`.
pub fn sci3(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let s = format!("{v:.2e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}E{sign}{:02}", exp.abs())
}

/// Relative difference of two printed values, itself printed; recomputing
/// it from a re-read table gives the same string.
pub fn rel_diff_text(value: &str, reference: &str) -> Option<String> {
    let v: f64 = value.parse().ok()?;
    let r: f64 = reference.parse().ok()?;
    if r == 0.0 {
        return None;
    }
    Some(format!("{:.6e}", v / r - 1.0))
}

/// One cell of the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub x: f64,
    pub t: f64,
    pub method: &'static str,
    pub value: f64,
    pub std_error: Option<f64>,
}

/// Leading constants of one table level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableConstants {
    pub x: f64,
    pub theta_star: f64,
    pub c0: f64,
    pub c1: f64,
}

pub const TABLE_HEADER: [&str; 6] = ["x", "t", "method", "value", "std_error", "rel_diff_vs_is"];

/// Importance sampling against the one- and two-term expansions on a grid
/// of times and levels, as long-format CSV. Constants and warnings go to
/// `log`. With `n_paths = 0` the sampling column is left out.
pub fn cmd_table(
    cfg: &RunConfig,
    out: &mut dyn Write,
    log: &mut dyn Write,
) -> Result<(Vec<TableRow>, Vec<TableConstants>)> {
    let model = cfg.model()?;
    let mut rows = Vec::new();
    let mut constants = Vec::new();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TABLE_HEADER)?;
    for &x in &cfg.levels {
        let saddle = SaddleData::new(&model, x)?;
        if !(x > saddle.mean) {
            return Err(Error::NotAboveMean { x, mean: saddle.mean });
        }
        let expansion = ExpansionContext::new(&model, x, depth_for_order(2), &cfg.grid)?;
        let c = TableConstants {
            x,
            theta_star: saddle.theta_star,
            c0: expansion.c0(),
            c1: expansion.c1().expect("depth 4 yields b_1"),
        };
        writeln!(log, "x={x}: theta*={:.7} c0={:.4} c1={:.4}", c.theta_star, c.c0, c.c1)?;
        constants.push(c);
        for &t in &cfg.times {
            let mut cells = Vec::new();
            if cfg.n_paths > 0 {
                let est = is_tail_with(&model, t, x, cfg.n_paths, cfg.seed, cfg.generator)?;
                cells.push(TableRow {
                    x,
                    t,
                    method: "is",
                    value: est.estimate,
                    std_error: Some(est.std_error),
                });
            }
            for (order, name) in [(1, "order1"), (2, "order2")] {
                let value = ldp_tail_from(&saddle, &expansion, t, order)?;
                if value < 0.0 {
                    writeln!(
                        log,
                        "warning: {name} at x={x}, t={t} is negative ({}); the two-term expansion is not usable this early",
                        sci3(value)
                    )?;
                }
                cells.push(TableRow {
                    x,
                    t,
                    method: name,
                    value,
                    std_error: None,
                });
            }
            let is_text = cells.iter().find(|r| r.method == "is").map(|r| sci3(r.value));
            for r in &cells {
                let value = sci3(r.value);
                let rel = match (&is_text, r.method) {
                    (Some(reference), m) if m != "is" => rel_diff_text(&value, reference).unwrap_or_default(),
                    _ => String::new(),
                };
                w.write_record([
                    x.to_string(),
                    t.to_string(),
                    r.method.to_string(),
                    value,
                    r.std_error.map(sci3).unwrap_or_default(),
                    rel,
                ])?;
            }
            rows.extend(cells);
        }
    }
    w.flush()?;
    Ok((rows, constants))
}

/// Re-reads a table and checks every `rel_diff_vs_is` entry against a
/// fresh computation from the printed values. Returns the number of
/// entries checked.
pub fn verify_table_csv<R: Read>(reader: R) -> Result<usize> {
    let mut rdr = csv::Reader::from_reader(reader);
    let records: Vec<csv::StringRecord> = rdr.records().collect::<std::result::Result<_, _>>()?;
    let mut checked = 0;
    for r in &records {
        if &r[2] == "is" {
            continue;
        }
        let reference = records
            .iter()
            .find(|o| o[0] == r[0] && o[1] == r[1] && &o[2] == "is")
            .map(|o| o[3].to_string());
        let expected = reference
            .and_then(|reference| rel_diff_text(&r[3], &reference))
            .unwrap_or_default();
        if expected != r[5] {
            return Err(Error::Config(format!(
                "row x={}, t={}, {}: stored {} but recomputed {}",
                &r[0], &r[1], &r[2], &r[5], expected
            )));
        }
        checked += 1;
    }
    Ok(checked)
}

#[derive(Debug, Serialize)]
struct ModelSummary {
    nu: f64,
    kernel: KernelSpec,
    l1_norm: f64,
}

#[derive(Debug, Serialize)]
struct CgfSummary {
    theta: f64,
    theta_c: f64,
    x_theta: f64,
    phi: f64,
    psi: f64,
    eta: f64,
    horizon: f64,
}

#[derive(Debug, Serialize)]
struct Diagnostics<'a> {
    model: ModelSummary,
    saddle: SaddleData,
    cgf: CgfSummary,
    expansion: &'a ExpansionContext,
    c0: Option<f64>,
    c1: Option<f64>,
}

/// Every intermediate quantity at one level, as pretty JSON.
pub fn cmd_diag(cfg: &RunConfig, out: &mut dyn Write) -> Result<ExpansionContext> {
    let model = cfg.model()?;
    let x = cfg.x.ok_or_else(|| Error::Config("diag needs --x".into()))?;
    let saddle = SaddleData::new(&model, x)?;
    let expansion = ExpansionContext::new(&model, x, cfg.depth, &cfg.grid)?;
    let above = x > saddle.mean;
    let diag = Diagnostics {
        model: ModelSummary {
            nu: model.nu(),
            kernel: cfg.kernel,
            l1_norm: model.l1_norm(),
        },
        saddle,
        cgf: CgfSummary {
            theta: expansion.theta_star,
            theta_c: theta_critical(model.l1_norm())?,
            x_theta: expansion.x_derivs[0],
            phi: expansion.integrals[0],
            psi: expansion.psi(),
            eta: expansion.eta_derivs[0],
            horizon: expansion.horizon,
        },
        expansion: &expansion,
        c0: above.then(|| expansion.c0()),
        c1: if above { expansion.c1() } else { None },
    };
    serde_json::to_writer_pretty(&mut *out, &diag)?;
    writeln!(out)?;
    Ok(expansion)
}

/// Simulated paths on `[0, t]` as CSV `path_id,event_time`.
pub fn cmd_simulate(cfg: &RunConfig, out: &mut dyn Write) -> Result<usize> {
    let model = cfg.model()?;
    let t = cfg.t.ok_or_else(|| Error::Config("simulate needs --t".into()))?;
    let paths = simulate_many(&model, t, cfg.n_paths, cfg.seed, cfg.generator);
    write_paths_csv(&paths, out)?;
    Ok(paths.len())
}
