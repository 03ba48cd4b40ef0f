//! `pecmem analyze`: slope fits, threshold estimates, sampling overhead, and
//! negativity flags from a results file.

use std::collections::BTreeSet;

use serde::Serialize;

use pecmem::analytics::{estimate_threshold, fit_slope, negativity_condition};
use pecmem::combinatorics::binomial_f64;
use pecmem::noise::weight_probability;

use crate::results::{read_results, ResultRow};
use crate::CliError;

#[derive(Debug, Serialize)]
pub struct SlopeReport {
    pub code: String,
    pub noise: String,
    pub d: usize,
    pub mode: String,
    pub estimator: String,
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
    /// ||beta||_1^2 across the fitted p range (PEC rows only).
    pub overhead_range: Option<(f64, f64)>,
}

#[derive(Debug, Serialize)]
pub struct ThresholdReport {
    pub code: String,
    pub noise: String,
    pub mode: String,
    pub estimator: String,
    pub d_pair: (usize, usize),
    pub p_star: f64,
    pub rate_star: f64,
}

#[derive(Debug, Serialize)]
pub struct NegativityReport {
    pub predicate_true: usize,
    pub negative_where_predicted: usize,
    pub unresolved: usize,
    pub disagreements: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub slopes: Vec<SlopeReport>,
    pub thresholds: Vec<ThresholdReport>,
    pub negativity: NegativityReport,
}

fn qubit_count(code: &str, d: usize) -> usize {
    if code == "rotated_surface" {
        d * d
    } else {
        d
    }
}

fn sampling_overhead(n: usize, omega: usize, p: f64) -> f64 {
    let c = binomial_f64(n, omega);
    let p0 = weight_probability(p, n, 0);
    let pw = weight_probability(p, n, omega);
    ((p0 + c * pw) / (p0 - c * pw)).powi(2)
}

pub fn analyze_rows(rows: &[ResultRow]) -> Result<AnalysisReport, CliError> {
    if rows.is_empty() {
        return Err(CliError::Config("results file has no rows".into()));
    }
    let mut slopes = Vec::new();
    let groups: BTreeSet<(String, String, usize, String, String)> = rows
        .iter()
        .map(|r| {
            (
                r.code.clone(),
                r.noise.clone(),
                r.d,
                r.mode.clone(),
                r.estimator.clone(),
            )
        })
        .collect();
    for (code, noise, d, mode, estimator) in &groups {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| {
                &r.code == code
                    && &r.noise == noise
                    && r.d == *d
                    && &r.mode == mode
                    && &r.estimator == estimator
            })
            .map(|r| (r.p, r.value))
            .collect();
        // skip subsets that cannot be fitted (e.g. all-zero naive estimates
        // at tiny p); insufficient data overall is still an error below
        let fit = match fit_slope(&pts) {
            Ok(fit) => fit,
            Err(e) => {
                eprintln!("slope {code} d={d} {mode}/{estimator}: {e}");
                continue;
            }
        };
        let overhead_range = (mode == "pec").then(|| {
            let n = qubit_count(code, *d);
            let omega = d.div_ceil(2);
            let ps: Vec<f64> = pts.iter().map(|&(p, _)| p).collect();
            let lo = ps.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = ps.iter().cloned().fold(0.0f64, f64::max);
            (
                sampling_overhead(n, omega, lo),
                sampling_overhead(n, omega, hi),
            )
        });
        slopes.push(SlopeReport {
            code: code.clone(),
            noise: noise.clone(),
            d: *d,
            mode: mode.clone(),
            estimator: estimator.clone(),
            slope: fit.slope,
            intercept: fit.intercept,
            points: fit.points,
            overhead_range,
        });
    }

    // thresholds from the two largest distances of each (code, noise, mode)
    let mut thresholds = Vec::new();
    let curve_groups: BTreeSet<(String, String, String, String)> = rows
        .iter()
        .map(|r| (r.code.clone(), r.noise.clone(), r.mode.clone(), r.estimator.clone()))
        .collect();
    for (code, noise, mode, estimator) in &curve_groups {
        let mut ds: Vec<usize> = rows
            .iter()
            .filter(|r| {
                &r.code == code && &r.noise == noise && &r.mode == mode && &r.estimator == estimator
            })
            .map(|r| r.d)
            .collect();
        ds.sort_unstable();
        ds.dedup();
        if ds.len() < 2 {
            continue;
        }
        let pair = (ds[ds.len() - 2], ds[ds.len() - 1]);
        let curve = |d: usize| -> Vec<(f64, f64)> {
            rows.iter()
                .filter(|r| {
                    &r.code == code
                        && &r.noise == noise
                        && &r.mode == mode
                        && &r.estimator == estimator
                        && r.d == d
                })
                .map(|r| (r.p, r.value))
                .collect()
        };
        match estimate_threshold(&curve(pair.0), &curve(pair.1)) {
            Ok(th) => thresholds.push(ThresholdReport {
                code: code.clone(),
                noise: noise.clone(),
                mode: mode.clone(),
                estimator: estimator.clone(),
                d_pair: pair,
                p_star: th.p_star,
                rate_star: th.rate_star,
            }),
            Err(e) => eprintln!("threshold {code}/{noise}/{mode}/{estimator}: {e}"),
        }
    }

    if slopes.is_empty() {
        return Err(CliError::Config(
            "insufficient data: no curve had enough usable points to fit".into(),
        ));
    }

    // negativity: where the predicate holds, resolved PEC estimates must be
    // negative
    let mut negativity = NegativityReport {
        predicate_true: 0,
        negative_where_predicted: 0,
        unresolved: 0,
        disagreements: Vec::new(),
    };
    for r in rows.iter().filter(|r| r.mode == "pec") {
        let n = qubit_count(&r.code, r.d);
        let omega = r.d.div_ceil(2);
        if negativity_condition(n, omega, r.p).map_err(|e| CliError::Config(e.to_string()))? {
            negativity.predicate_true += 1;
            if r.value < 0.0 && (r.std_err == 0.0 || r.value.abs() > 3.0 * r.std_err) {
                negativity.negative_where_predicted += 1;
            } else if r.value.abs() <= 3.0 * r.std_err {
                negativity.unresolved += 1;
            } else {
                negativity
                    .disagreements
                    .push(format!("{} d={} p={}: value {:+.3e}", r.code, r.d, r.p, r.value));
            }
        }
    }
    Ok(AnalysisReport {
        slopes,
        thresholds,
        negativity,
    })
}

pub fn cmd_analyze(
    results_path: &std::path::Path,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let rows = read_results(results_path)?;
    let report = analyze_rows(&rows)?;

    println!(
        "{:<16} {:<13} {:>3} {:<12} {:<11} {:>8} {:>7}  overhead(lo..hi)",
        "code", "noise", "d", "mode", "estimator", "slope", "points"
    );
    for s in &report.slopes {
        let overhead = s
            .overhead_range
            .map(|(lo, hi)| format!("{lo:.4}..{hi:.4}"))
            .unwrap_or_default();
        println!(
            "{:<16} {:<13} {:>3} {:<12} {:<11} {:>8.3} {:>7}  {overhead}",
            s.code, s.noise, s.d, s.mode, s.estimator, s.slope, s.points
        );
    }
    println!();
    for t in &report.thresholds {
        println!(
            "threshold {}/{}/{} (d = {}, {}): p* = {:.4}, rate* = {:.3e}",
            t.code, t.noise, t.mode, t.d_pair.0, t.d_pair.1, t.p_star, t.rate_star
        );
    }
    println!(
        "negativity: predicate true at {} points; {} negative as predicted, {} unresolved, {} disagreements",
        report.negativity.predicate_true,
        report.negativity.negative_where_predicted,
        report.negativity.unresolved,
        report.negativity.disagreements.len()
    );
    for d in &report.negativity.disagreements {
        println!("  disagreement: {d}");
    }

    if let Some(path) = out {
        let text = serde_json::to_string_pretty(&report)
            .map_err(|e| CliError::Io(format!("serializing report: {e}")))?;
        std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
