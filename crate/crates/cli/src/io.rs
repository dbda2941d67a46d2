//! Trajectory CSV, planar SVG, and the JSON document shapes.

use anyhow::{bail, Context, Result};
use jetgeo::analysis::{BandInterval, MotionClass, PeriodData};
use jetgeo::dynamics::GeodesicArc;
use jetgeo::poisson::CasimirSet;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

/// 17 significant digits: every f64 round-trips through this exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV schema: `s, x, u_k..u_1, y, P_1..P_{k+2}, theta, kappa, H, C_1..C_k`
/// (column count `1 + (k+2) + (k+2) + 2 + 1 + k`).
pub fn trajectory_csv(arc: &GeodesicArc) -> String {
    let k = arc.dim.k();
    let mut out = String::new();
    out.push('s');
    out.push_str(",x");
    for i in (1..=k).rev() {
        let _ = write!(out, ",u{i}");
    }
    out.push_str(",y");
    for i in 1..=k + 2 {
        let _ = write!(out, ",P{i}");
    }
    out.push_str(",theta,kappa,H");
    for i in 1..=k {
        let _ = write!(out, ",C{i}");
    }
    out.push('\n');
    for smp in &arc.samples {
        let mut row: Vec<String> = Vec::with_capacity(2 * k + 9);
        row.push(fmt_f64(smp.s));
        row.extend(smp.q.to_canonical().iter().map(|&v| fmt_f64(v)));
        row.extend(smp.p.as_slice().iter().map(|&v| fmt_f64(v)));
        row.push(fmt_f64(smp.theta));
        row.push(fmt_f64(smp.kappa));
        row.push(fmt_f64(smp.h));
        row.extend(smp.casimir_values.iter().map(|&v| fmt_f64(v)));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Parses a trajectory CSV back into raw rows (header + numeric matrix).
pub fn parse_trajectory_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .context("empty CSV")?
        .split(',')
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|cell| {
                cell.parse::<f64>()
                    .with_context(|| format!("row {} cell {cell:?}", n + 2))
            })
            .collect::<Result<_>>()?;
        if row.len() != header.len() {
            bail!("row {} has {} cells, header has {}", n + 2, row.len(), header.len());
        }
        rows.push(row);
    }
    Ok((header, rows))
}

/// Planar polylines as a minimal SVG: viewBox from the data extents with 5%
/// padding, one path per arc, stroke width 0.5% of the extent.
pub fn planar_svg(arcs: &[Vec<(f64, f64)>]) -> String {
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut umin = f64::INFINITY;
    let mut umax = f64::NEG_INFINITY;
    for arc in arcs {
        for &(x, u) in arc {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            umin = umin.min(u);
            umax = umax.max(u);
        }
    }
    if !xmin.is_finite() {
        (xmin, xmax, umin, umax) = (0.0, 1.0, 0.0, 1.0);
    }
    let pad_x = 0.05 * (xmax - xmin).max(1e-9);
    let pad_u = 0.05 * (umax - umin).max(1e-9);
    let w = (xmax - xmin) + 2.0 * pad_x;
    let h = (umax - umin) + 2.0 * pad_u;
    let stroke = 0.005 * w.max(h);
    // y points down in SVG: emit y = -u and shift the viewBox accordingly
    let mut out = String::new();
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.6} {:.6} {:.6} {:.6}\">\n",
        xmin - pad_x,
        -(umax + pad_u),
        w,
        h
    );
    for arc in arcs {
        if arc.is_empty() {
            continue;
        }
        out.push_str("  <path fill=\"none\" stroke=\"black\" stroke-width=\"");
        let _ = write!(out, "{stroke:.6}");
        out.push_str("\" d=\"");
        for (i, &(x, u)) in arc.iter().enumerate() {
            let _ = write!(out, "{}{:.6} {:.6}", if i == 0 { "M" } else { " L" }, x, -u);
        }
        out.push_str("\"/>\n");
    }
    out.push_str("</svg>\n");
    out
}

pub fn planar_points(arc: &GeodesicArc) -> Vec<(f64, f64)> {
    arc.samples
        .iter()
        .map(|s| (s.q.x, *s.q.u.last().expect("k >= 1")))
        .collect()
}

/// Serialized Casimir coefficient maps:
/// `{"k": int, "casimirs": [{"degree": int, "terms": [{"exps": [...], "coef": f}]}]}`.
#[derive(Serialize, Deserialize)]
pub struct CasimirDoc {
    pub k: usize,
    pub casimirs: Vec<CasimirEntry>,
}

#[derive(Serialize, Deserialize)]
pub struct CasimirEntry {
    pub degree: u32,
    pub terms: Vec<CasimirTerm>,
}

#[derive(Serialize, Deserialize)]
pub struct CasimirTerm {
    pub exps: Vec<u32>,
    pub coef: f64,
}

pub fn casimir_doc(set: &CasimirSet) -> CasimirDoc {
    CasimirDoc {
        k: set.dim().k(),
        casimirs: set
            .polys()
            .iter()
            .map(|c| CasimirEntry {
                degree: c.total_degree(),
                terms: c
                    .terms()
                    .iter()
                    .map(|t| CasimirTerm {
                        exps: t.exps.clone(),
                        coef: t.coef,
                    })
                    .collect(),
            })
            .collect(),
    }
}

/// One row of the classification report.
#[derive(Serialize, Deserialize)]
pub struct IntervalReport {
    pub x0: f64,
    pub x1: f64,
    pub kind0: String,
    pub kind1: String,
    pub class: String,
    pub l: serde_json::Value,
    pub tau: Option<f64>,
    pub action: f64,
}

#[derive(Serialize, Deserialize)]
pub struct ClassificationReport {
    pub intervals: Vec<IntervalReport>,
}

pub fn interval_report(iv: &BandInterval, class: MotionClass, pd: &PeriodData) -> IntervalReport {
    IntervalReport {
        x0: iv.x0.x,
        x1: iv.x1.x,
        kind0: format!("{:?}", iv.x0.kind),
        kind1: format!("{:?}", iv.x1.kind),
        class: class.as_str().to_owned(),
        l: match pd.length {
            Some(l) => serde_json::json!(l),
            None => serde_json::json!("inf"),
        },
        tau: pd.tau,
        action: pd.action,
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
