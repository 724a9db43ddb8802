//! Scans over the abscissa grid for each regime.

use std::f64::consts::FRAC_2_SQRT_PI;

use coulomb_count::ensembles::{EnsembleKind, RadialPotential};
use coulomb_count::moments::occupation_probs;
use coulomb_count::sampler::monte_carlo_stats;
use coulomb_count::statistics::*;
use coulomb_count::{Error, Result};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub curve: ScanCurve,
}

impl Table {
    fn new(columns: &[&str], with_mc: bool) -> Self {
        let mut columns: Vec<String> = columns.iter().map(|c| c.to_string()).collect();
        if with_mc {
            columns.push("mc_V".into());
            columns.push("mc_V_se".into());
        }
        Self {
            columns,
            rows: Vec::new(),
            curve: ScanCurve {
                regime: Regime::Bulk,
                records: Vec::new(),
            },
        }
    }
}

fn finite_stats(p: &RadialPotential, n: usize, a: f64) -> Result<CountStatistics> {
    Ok(finite_n_stats(&occupation_probs(p, n, a)?, false))
}

fn mc_columns(cfg: &RunConfig, p: &RadialPotential, a: f64, row: &mut Vec<f64>) -> Result<()> {
    if cfg.trials > 0 {
        let batch = monte_carlo_stats(p, cfg.n, a, cfg.trials, cfg.seed)?;
        row.push(batch.emp_variance);
        row.push(batch.se_variance);
    }
    Ok(())
}

fn finish(mut table: Table, regime: Regime, records: Vec<ScanRecord>) -> Result<Table> {
    table.curve = ScanCurve::new(regime, records)?;
    Ok(table)
}

/// `(2a/√π) √(N ΔQ(a)) / β` at any `a`, including the unit radius.
fn bulk_law(p: &RadialPotential, n: usize, a: f64) -> f64 {
    FRAC_2_SQRT_PI * a * (n as f64 * p.limit_laplacian(a)).sqrt() / p.beta().value()
}

pub fn variance_curve(cfg: &RunConfig) -> Result<Table> {
    let p = cfg.potential().map_err(|e| Error::Unsupported(e.to_string()))?;
    let n = cfg.n;
    let mc = cfg.trials > 0;
    let mut records = Vec::new();
    if cfg.regime == Regime::WeakBulk {
        let c = match p.kind() {
            EnsembleKind::TruncWeak { c } => c,
            other => return Err(Error::Unsupported(format!("weak_bulk regime for {other}"))),
        };
        let mut table = Table::new(&["a", "E_N", "V_N", "E_limit", "V_limit"], mc);
        for a in cfg.grid.values() {
            let s = finite_stats(&p, n, a)?;
            let lim = weak_bulk_limit(p.beta(), c, a)?;
            let mut row = vec![a, s.mean, s.variance, lim.mean, lim.variance];
            mc_columns(cfg, &p, a, &mut row)?;
            records.push(ScanRecord {
                abscissa: a,
                finite_n: s.variance,
                asymptotic: lim.variance,
                scaled_finite_n: s.variance,
            });
            table.rows.push(row);
        }
        return finish(table, Regime::WeakBulk, records);
    }
    let lap1 = p.limit_laplacian(1.0);
    let mut table = Table::new(
        &["a", "E_N", "V_N", "scaled_V", "bulk_scaled", "bulk_V", "edge_V"],
        mc,
    );
    for a in cfg.grid.values() {
        let s = finite_stats(&p, n, a)?;
        let scaled = scaled_variance(&p, n, a, s.variance);
        let edge_s = (1.0 - a) * (2.0 * lap1 * n as f64).sqrt();
        let edge_v = FRAC_2_SQRT_PI * edge_profile_f(edge_s) * (n as f64 * lap1).sqrt() / p.beta().value();
        let mut row = vec![
            a,
            s.mean,
            s.variance,
            scaled,
            FRAC_2_SQRT_PI * a,
            bulk_law(&p, n, a),
            edge_v,
        ];
        mc_columns(cfg, &p, a, &mut row)?;
        records.push(ScanRecord {
            abscissa: a,
            finite_n: s.variance,
            asymptotic: bulk_law(&p, n, a),
            scaled_finite_n: scaled,
        });
        table.rows.push(row);
    }
    finish(table, Regime::Bulk, records)
}

pub fn edge_profile(cfg: &RunConfig) -> Result<Table> {
    let p = cfg.potential().map_err(|e| Error::Unsupported(e.to_string()))?;
    let n = cfg.n;
    let nf = n as f64;
    let mut table = Table::new(&["S", "a", "V_N", "scaled_V", "prediction"], cfg.trials > 0);
    let mut records = Vec::new();
    let weak_c = match (cfg.regime, p.kind()) {
        (Regime::WeakEdge, EnsembleKind::TruncWeak { c }) => Some(c),
        (Regime::WeakEdge, other) => return Err(Error::Unsupported(format!("weak_edge regime for {other}"))),
        _ => None,
    };
    for s_val in cfg.grid.values() {
        let (a, scaled_of, prediction) = match weak_c {
            Some(c) => (
                weak_edge_radius(p.beta(), n, s_val),
                1.0 / nf,
                weak_edge_limit(c, s_val)?,
            ),
            None => {
                let (a, _) = edge_prediction(&p, n, s_val)?;
                let lap1 = p.limit_laplacian(1.0);
                (
                    a,
                    p.beta().value() / (nf * lap1).sqrt(),
                    FRAC_2_SQRT_PI * edge_profile_f(s_val),
                )
            }
        };
        if !(a > 0.0) {
            return Err(coulomb_count::Error::Domain {
                func: "edge_profile",
                detail: format!("S={s_val} gives radius {a}"),
            });
        }
        let v = finite_stats(&p, n, a)?.variance;
        let mut row = vec![s_val, a, v, v * scaled_of, prediction];
        mc_columns(cfg, &p, a, &mut row)?;
        records.push(ScanRecord {
            abscissa: s_val,
            finite_n: v,
            asymptotic: prediction,
            scaled_finite_n: v * scaled_of,
        });
        table.rows.push(row);
    }
    finish(table, cfg.regime, records)
}

pub fn origin_profile(cfg: &RunConfig) -> Result<Table> {
    let p = cfg.potential().map_err(|e| Error::Unsupported(e.to_string()))?;
    let n = cfg.n;
    let beta = p.beta();
    let mut table = Table::new(
        &["T", "a", "E_N", "V_N", "E_limit", "V_limit", "small_T"],
        cfg.trials > 0,
    );
    let mut records = Vec::new();
    for t in cfg.grid.values() {
        let a = origin_radius(&p, n, t)?;
        let s = finite_stats(&p, n, a)?;
        let lim = origin_limit(&p, t)?;
        let small = match p.kind() {
            EnsembleKind::MittagLeffler { b, c } => small_t_ml(beta, b, c, t)?,
            EnsembleKind::Product { m } => small_t_product(beta, m, t)?,
            _ => small_t_ml(beta, 1.0, 0.0, t)?,
        };
        let mut row = vec![t, a, s.mean, s.variance, lim.mean, lim.variance, small];
        mc_columns(cfg, &p, a, &mut row)?;
        records.push(ScanRecord {
            abscissa: t,
            finite_n: s.variance,
            asymptotic: lim.variance,
            scaled_finite_n: s.variance,
        });
        table.rows.push(row);
    }
    finish(table, Regime::Origin, records)
}
