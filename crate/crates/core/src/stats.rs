//! Aggregate statistics and figure data from curvature records.
//!
//! CSV schemas (fixed column order):
//!
//! * `scatter.csv`: `edge_id,class,dt,F,F_aug`
//! * `hist.csv`: `series,bin_lo,bin_hi,count` with `series` in {`F`, `F_aug`}, both on the same bins
//! * `by_class.csv`: `class,count,mean_F,sem_F,mean_F_aug,sem_F_aug,mean_diff,sem_diff`
//! * `dt_dep.csv`: `edge_id,class,dt,w,diff` (temporal and diagonal edges only)
//!
//! An undefined SEM (fewer than two samples) is written as an empty field.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::curvature::CurvatureRecord;
use crate::error::{Error, Result};
use crate::prism::{EdgeClass, WeightFn};
use crate::WEIGHTED_TOL;

/// Figure payloads written by [`write_outputs`].
pub const FIGURES: [&str; 4] = ["scatter", "hist", "by_class", "dt_dep"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassStats {
    pub class: EdgeClass,
    pub count: usize,
    pub mean_f: Option<f64>,
    pub sem_f: Option<f64>,
    pub mean_f_aug: Option<f64>,
    pub sem_f_aug: Option<f64>,
    pub mean_diff: Option<f64>,
    pub sem_diff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsSummary {
    pub n_edges: usize,
    pub n_triangles: usize,
    pub n_disagree: usize,
    pub pct_disagree: f64,
    pub mean_f: f64,
    pub mean_f_aug: f64,
    /// `None` when either curvature vector has zero variance.
    pub pearson_corr: Option<f64>,
    pub by_class: Vec<ClassStats>,
    pub notes: Vec<String>,
}

impl StatsSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serialises")
    }
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Sample standard deviation over `√n`.
pub fn sem(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    Some((var / xs.len() as f64).sqrt())
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let (mx, my) = (mean(xs)?, mean(ys)?);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn class_stats(records: &[CurvatureRecord], class: EdgeClass) -> ClassStats {
    let rows: Vec<&CurvatureRecord> = records.iter().filter(|r| r.class == class).collect();
    let f: Vec<f64> = rows.iter().map(|r| r.forman).collect();
    let a: Vec<f64> = rows.iter().map(|r| r.forman_aug).collect();
    let d: Vec<f64> = rows.iter().map(|r| r.diff).collect();
    ClassStats {
        class,
        count: rows.len(),
        mean_f: mean(&f),
        sem_f: sem(&f),
        mean_f_aug: mean(&a),
        sem_f_aug: sem(&a),
        mean_diff: mean(&d),
        sem_diff: sem(&d),
    }
}

/// Table statistics over all 1-simplices. Disagreement means `|F − F_aug| > 1e-9`.
pub fn table_stats(records: &[CurvatureRecord], n_triangles: usize) -> Result<StatsSummary> {
    if records.is_empty() {
        return Err(Error::domain("no curvature records to summarise"));
    }
    let f: Vec<f64> = records.iter().map(|r| r.forman).collect();
    let a: Vec<f64> = records.iter().map(|r| r.forman_aug).collect();
    let n_disagree = records.iter().filter(|r| r.diff.abs() > WEIGHTED_TOL).count();
    let pearson_corr = pearson(&f, &a);
    let mut notes = Vec::new();
    if pearson_corr.is_none() {
        notes.push("pearson correlation undefined: zero variance".to_string());
    }
    Ok(StatsSummary {
        n_edges: records.len(),
        n_triangles,
        n_disagree,
        pct_disagree: 100.0 * n_disagree as f64 / records.len() as f64,
        mean_f: mean(&f).expect("nonempty"),
        mean_f_aug: mean(&a).expect("nonempty"),
        pearson_corr,
        by_class: EdgeClass::ALL.iter().map(|&c| class_stats(records, c)).collect(),
        notes,
    })
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

const MAX_BINS: usize = 200;

/// Bin edges for the pooled sample: Freedman–Diaconis width `2·IQR·n^{-1/3}`,
/// falling back to Sturges' rule when the IQR vanishes.
pub fn histogram_edges(values: &[f64]) -> Vec<f64> {
    let mut sorted: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if sorted.is_empty() {
        return Vec::new();
    }
    sorted.sort_by(f64::total_cmp);
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    if max == min {
        return vec![min - 0.5, min + 0.5];
    }
    let n = sorted.len() as f64;
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    let bins = if iqr > 0.0 {
        ((max - min) / (2.0 * iqr * n.powf(-1.0 / 3.0))).ceil() as usize
    } else {
        n.log2().ceil() as usize + 1
    }
    .clamp(1, MAX_BINS);
    let width = (max - min) / bins as f64;
    (0..=bins).map(|k| if k == bins { max } else { min + k as f64 * width }).collect()
}

fn histogram(values: &[f64], edges: &[f64]) -> Vec<usize> {
    let bins = edges.len().saturating_sub(1);
    let mut counts = vec![0; bins];
    for &x in values {
        // the last bin is closed on the right
        let k = edges[1..].partition_point(|&e| e <= x).min(bins - 1);
        counts[k] += 1;
    }
    counts
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// CSV payload for one figure: `scatter`, `hist`, `by_class` or `dt_dep`.
pub fn figure_data(records: &[CurvatureRecord], which: &str) -> Result<String> {
    let mut out = String::new();
    match which {
        "scatter" => {
            out.push_str("edge_id,class,dt,F,F_aug\n");
            for r in records {
                let _ = writeln!(out, "{},{},{},{},{}", r.edge.0, r.class, r.dt, r.forman, r.forman_aug);
            }
        }
        "hist" => {
            out.push_str("series,bin_lo,bin_hi,count\n");
            let f: Vec<f64> = records.iter().map(|r| r.forman).collect();
            let a: Vec<f64> = records.iter().map(|r| r.forman_aug).collect();
            let pooled: Vec<f64> = f.iter().chain(&a).copied().collect();
            let edges = histogram_edges(&pooled);
            if !edges.is_empty() {
                for (name, values) in [("F", &f), ("F_aug", &a)] {
                    for (k, count) in histogram(values, &edges).into_iter().enumerate() {
                        let _ = writeln!(out, "{name},{},{},{count}", edges[k], edges[k + 1]);
                    }
                }
            }
        }
        "by_class" => {
            out.push_str("class,count,mean_F,sem_F,mean_F_aug,sem_F_aug,mean_diff,sem_diff\n");
            for c in EdgeClass::ALL {
                let s = class_stats(records, c);
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    c,
                    s.count,
                    opt(s.mean_f),
                    opt(s.sem_f),
                    opt(s.mean_f_aug),
                    opt(s.sem_f_aug),
                    opt(s.mean_diff),
                    opt(s.sem_diff)
                );
            }
        }
        "dt_dep" => {
            out.push_str("edge_id,class,dt,w,diff\n");
            for r in records.iter().filter(|r| r.class != EdgeClass::Spatial) {
                let _ = writeln!(out, "{},{},{},{},{}", r.edge.0, r.class, r.dt, r.weight, r.diff);
            }
        }
        other => {
            return Err(Error::Usage(format!(
                "unknown figure `{other}` (expected one of {})",
                FIGURES.join(", ")
            )))
        }
    }
    Ok(out)
}

/// `h(g) = (1 − g)·√g`, the factor multiplying each parallel-edge term of a
/// temporal-edge discrepancy when the shared vertex has unit weight.
pub fn h_factor(g: f64) -> f64 {
    (1.0 - g) * g.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HRow {
    pub dt: u32,
    pub g: f64,
    pub h: f64,
}

/// `h(g(Δt))` for `Δt = 1..=k`.
pub fn h_table(g: WeightFn, k: u32) -> Vec<HRow> {
    (1..=k)
        .map(|dt| {
            let gv = g.eval(f64::from(dt));
            HRow { dt, g: gv, h: h_factor(gv) }
        })
        .collect()
}

pub fn h_table_csv(rows: &[HRow]) -> String {
    let mut out = String::from("dt,g,h\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.dt, r.g, r.h);
    }
    out
}

/// Writes `summary.json` and the four figure CSVs into `dir` (created if needed).
pub fn write_outputs(dir: &Path, summary: &StatsSummary, records: &[CurvatureRecord]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("summary.json"), summary.to_json() + "\n")?;
    for which in FIGURES {
        let payload = figure_data(records, which).expect("known figure");
        std::fs::write(dir.join(format!("{which}.csv")), payload)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{SimplexId, SpacetimeVertex};
    use crate::contact_stream::{ContactEvent, ContactSequence};
    use crate::curvature::curvature_records;
    use crate::prism::{build_kst, WeightConfig};

    fn record(class: EdgeClass, dt: u32, f: f64, aug: f64) -> CurvatureRecord {
        CurvatureRecord {
            edge: SimplexId(0),
            u: SpacetimeVertex::new(0, 0),
            v: SpacetimeVertex::new(1, dt as i64),
            class,
            dt,
            weight: 1.0,
            forman: f,
            forman_aug: aug,
            diff: f - aug,
            closed_form: aug - f,
            pred_abs_diff: (f - aug).abs(),
            n_tri: 0,
            n_par: 0,
        }
    }

    fn toy(wcfg: WeightConfig) -> Vec<CurvatureRecord> {
        let s = ContactSequence::from_events(
            [(1, 2, 0.0), (2, 3, 0.0), (1, 3, 0.0), (1, 2, 1.0), (2, 4, 1.0), (1, 2, 3.0), (3, 4, 3.0)]
                .iter()
                .map(|&(i, j, t)| ContactEvent::new(i, j, t).unwrap()),
        );
        curvature_records(&build_kst(&s, 3, wcfg).unwrap())
    }

    #[test]
    fn uniform_run_summary() {
        let records = toy(WeightConfig::unit());
        let s = table_stats(&records, 0).unwrap();
        assert_eq!(s.pct_disagree, 0.0);
        assert!((s.pearson_corr.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(s.by_class.iter().map(|c| c.count).sum::<usize>(), s.n_edges);
    }

    #[test]
    fn default_run_summary() {
        let records = toy(WeightConfig::default());
        let s = table_stats(&records, 3).unwrap();
        assert!(s.pct_disagree > 0.0 && s.pct_disagree <= 100.0);
        let r = s.pearson_corr.unwrap();
        assert!((-1.0..=1.0).contains(&r));
        let by_class = figure_data(&records, "by_class").unwrap();
        let spatial = by_class.lines().find(|l| l.starts_with("spatial")).unwrap();
        let cols: Vec<&str> = spatial.split(',').collect();
        assert!(cols[6].parse::<f64>().unwrap().abs() < 1e-9);
        let dt = figure_data(&records, "dt_dep").unwrap();
        for line in dt.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            assert!(cols[1] == "temporal" || cols[1] == "diagonal");
            assert!((1..=3).contains(&cols[2].parse::<u32>().unwrap()));
        }
    }

    #[test]
    fn errors() {
        assert!(table_stats(&[], 0).is_err());
        assert!(matches!(figure_data(&[], "pie"), Err(Error::Usage(_))));
    }

    #[test]
    fn constant_arrays_have_no_correlation() {
        let rs = vec![record(EdgeClass::Spatial, 0, 2.0, 2.0); 4];
        let s = table_stats(&rs, 0).unwrap();
        assert_eq!(s.pearson_corr, None);
        assert_eq!(s.notes.len(), 1);
        assert!(s.to_json().contains("\"pearson_corr\": null"));
    }

    #[test]
    fn sem_and_pearson() {
        assert_eq!(sem(&[1.0]), None);
        // sd of {1,2,3,4} is sqrt(5/3)
        assert!((sem(&[1.0, 2.0, 3.0, 4.0]).unwrap() - (5.0f64 / 3.0).sqrt() / 2.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn histogram_covers_all_values() {
        let xs: Vec<f64> = (0..100).map(|k| (k as f64).sin() * 10.0).collect();
        let edges = histogram_edges(&xs);
        assert!(edges.windows(2).all(|w| w[0] < w[1]));
        // width 2·IQR·n^{-1/3} on the pooled sample
        assert_eq!(histogram(&xs, &edges).iter().sum::<usize>(), 100);
        let flat = histogram_edges(&[1.0, 1.0, 1.0]);
        assert_eq!(histogram(&[1.0, 1.0, 1.0], &flat), vec![3]);
        let payload = figure_data(&toy(WeightConfig::default()), "hist").unwrap();
        let total: usize = payload.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap()).sum();
        assert_eq!(total, 2 * toy(WeightConfig::default()).len());
    }

    #[test]
    fn h_factor_values() {
        let rows = h_table(WeightFn::Reciprocal, 3);
        let expected = [0.354, 0.385, 0.375];
        for (row, e) in rows.iter().zip(expected) {
            assert!((row.h - e).abs() < 1e-3, "{row:?}");
        }
    }

    #[test]
    fn outputs_written() {
        let dir = tempfile::tempdir().unwrap();
        let records = toy(WeightConfig::default());
        write_outputs(dir.path(), &table_stats(&records, 0).unwrap(), &records).unwrap();
        for f in ["summary.json", "scatter.csv", "hist.csv", "by_class.csv", "dt_dep.csv"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
    }
}
