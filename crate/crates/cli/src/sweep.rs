//! Sweep evaluation and CSV output.

use std::io::Write;

use anyhow::{anyhow, Context, Result};
use rayon::prelude::*;
use rffso_core::metrics::{
    asymptotic_op, ber_closed_form, ber_quadrature, energy_efficiency, ergodic_capacity_ub,
    outage_probability, MetricResult,
};
use rffso_core::montecarlo::{mc_ber, mc_capacity, mc_outage, McConfig};

use crate::config::{BerMethod, Config, MetricKind};

/// How a column is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    ClosedForm,
    Asymptotic,
    Quadrature,
    MonteCarlo,
}

impl Source {
    fn suffix(self) -> &'static str {
        match self {
            Source::ClosedForm => "closed_form",
            Source::Asymptotic => "asymptotic",
            Source::Quadrature => "quadrature",
            Source::MonteCarlo => "mc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Column {
    pub metric: MetricKind,
    pub source: Source,
}

impl Column {
    pub fn header(&self) -> String {
        match (self.metric, self.source) {
            (MetricKind::OpAsymptotic, _) => "op_asymptotic".into(),
            (MetricKind::CapacityUb, _) => "capacity_ub".into(),
            (MetricKind::Ee, _) => "ee".into(),
            (m, s) => format!("{}_{}", metric_name(m), s.suffix()),
        }
    }
}

fn metric_name(m: MetricKind) -> &'static str {
    match m {
        MetricKind::Op => "op",
        MetricKind::OpAsymptotic => "op_asymptotic",
        MetricKind::Ber => "ber",
        MetricKind::Capacity => "capacity",
        MetricKind::CapacityUb => "capacity_ub",
        MetricKind::Ee => "ee",
    }
}

/// Columns for `metrics`, in the order given, skipping duplicates.
pub fn columns(cfg: &Config, metrics: &[MetricKind], with_mc: bool) -> Vec<Column> {
    let mut out: Vec<Column> = Vec::new();
    for &metric in metrics {
        let sources: &[Source] = match metric {
            MetricKind::Op => &[Source::ClosedForm, Source::MonteCarlo],
            MetricKind::OpAsymptotic => &[Source::Asymptotic],
            MetricKind::Ber => match cfg.scenario.ber_method {
                BerMethod::ClosedForm => &[Source::ClosedForm, Source::MonteCarlo],
                BerMethod::Quadrature => &[Source::Quadrature, Source::MonteCarlo],
            },
            MetricKind::Capacity => &[Source::MonteCarlo],
            MetricKind::CapacityUb | MetricKind::Ee => &[Source::ClosedForm],
        };
        for &source in sources {
            let c = Column { metric, source };
            if (with_mc || source != Source::MonteCarlo) && !out.contains(&c) {
                out.push(c);
            }
        }
    }
    out
}

/// One evaluated sweep point.
#[derive(Debug, Clone)]
pub struct Row {
    pub x: f64,
    pub values: Vec<MetricResult>,
}

fn evaluate(cfg: &Config, x: f64, cols: &[Column], mc: &McConfig) -> Result<Row> {
    let var = cfg.sweep.variable.name();
    let sc = cfg.scenario_at(x)?;
    let g_out = cfg.scenario.gamma_out_db;
    let m = cfg.scenario.modulation;
    let values = cols
        .iter()
        .map(|c| {
            let r = match (c.metric, c.source) {
                (MetricKind::Op, Source::MonteCarlo) => mc_outage(&sc, g_out, mc),
                (MetricKind::Op, _) => outage_probability(&sc, g_out),
                (MetricKind::OpAsymptotic, _) => asymptotic_op(&sc, g_out),
                (MetricKind::Ber, Source::MonteCarlo) => mc_ber(&sc, m, mc),
                (MetricKind::Ber, Source::Quadrature) => ber_quadrature(&sc, m),
                (MetricKind::Ber, _) => ber_closed_form(&sc, m),
                (MetricKind::Capacity, _) => mc_capacity(&sc, mc),
                (MetricKind::CapacityUb, _) => ergodic_capacity_ub(&sc),
                (MetricKind::Ee, _) => energy_efficiency(&sc),
            };
            r.map_err(|e| anyhow!("{var} = {x}: {}: {e}", c.header()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Row { x, values })
}

/// Evaluates every sweep point in parallel; rows come back in sweep order and
/// the first failing point (in sweep order) is reported.
pub fn run_sweep(cfg: &Config, cols: &[Column]) -> Result<Vec<Row>> {
    let mc = cfg.mc.to_core();
    let points = cfg.sweep.points();
    let results: Vec<Result<Row>> = points
        .par_iter()
        .map(|&x| evaluate(cfg, x, cols, &mc))
        .collect();
    results.into_iter().collect()
}

/// Plain decimal, or scientific notation for magnitudes below 1e-3.
pub fn format_value(v: f64) -> String {
    if v != 0.0 && v.abs() < 1e-3 {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

pub fn write_csv<W: Write>(out: W, cfg: &Config, cols: &[Column], rows: &[Row]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![cfg.sweep.variable.name().to_string()];
    header.extend(cols.iter().map(Column::header));
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![format_value(r.x)];
        rec.extend(r.values.iter().map(|v| format_value(v.value)));
        w.write_record(&rec)?;
    }
    w.flush().context("writing CSV")?;
    Ok(())
}

/// Fixed-width table of the sweep for the terminal.
pub fn write_summary<W: Write>(
    mut out: W,
    cfg: &Config,
    cols: &[Column],
    rows: &[Row],
) -> Result<()> {
    let width = cols
        .iter()
        .map(|c| c.header().len())
        .max()
        .unwrap_or(0)
        .max(12)
        + 2;
    let var = cfg.sweep.variable.name();
    write!(out, "{var:>w$}", w = var.len().max(8) + 2)?;
    for c in cols {
        write!(out, "{:>width$}", c.header())?;
    }
    writeln!(out)?;
    for r in rows {
        write!(out, "{:>w$}", format!("{}", r.x), w = var.len().max(8) + 2)?;
        for v in &r.values {
            let mark = if v.unreliable || !v.converged {
                "*"
            } else {
                " "
            };
            write!(
                out,
                "{:>w$}{mark}",
                format!("{:.4e}", v.value),
                w = width - 1
            )?;
        }
        writeln!(out)?;
    }
    if rows
        .iter()
        .flat_map(|r| &r.values)
        .any(|v| v.unreliable || !v.converged)
    {
        writeln!(
            out,
            "* series truncated before convergence, or Monte Carlo estimate below 1e-6"
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_value(0.5), "0.5");
        assert_eq!(format_value(0.001), "0.001");
        assert_eq!(format_value(2.5e-4), "2.5e-4");
        assert_eq!(format_value(0.0), "0");
        assert_eq!(format_value(12.0), "12");
    }
}
