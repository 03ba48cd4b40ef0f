//! `pecmem run`: execute the configured experiment grid.

use std::time::Instant;

use pecmem::analytics::fit_slope;
use pecmem::rng::derive_key;
use pecmem::*;

use crate::config::ExperimentConfig;
use crate::results::{write_results, ResultRow, RowComponents};
use crate::CliError;

fn noise_tag(kind: NoiseKind) -> &'static str {
    match kind {
        NoiseKind::BitFlip => "bit_flip",
        NoiseKind::Depolarizing => "depolarizing",
    }
}

fn code_tag(kind: CodeKind) -> &'static str {
    match kind {
        CodeKind::Repetition => "repetition",
        CodeKind::RotatedSurface => "rotated_surface",
    }
}

pub fn build_code(kind: CodeKind, d: usize) -> Result<CodeSpec, CliError> {
    let code = match kind {
        CodeKind::Repetition => build_repetition_code(d),
        CodeKind::RotatedSurface => build_rotated_surface_code(d),
    };
    code.map_err(|e| CliError::Config(e.to_string()))
}

pub fn cmd_run(config: &ExperimentConfig) -> Result<Vec<ResultRow>, CliError> {
    config.validate()?;
    let grid = config.p_grid.values();
    let mut rows: Vec<ResultRow> = Vec::new();

    for &d in &config.distances {
        let code = build_code(config.code, d)?;
        let graph = build_decoding_graph(&code).map_err(|e| CliError::Config(e.to_string()))?;
        let omega = code.omega();
        let k_max = config.k_max_for(d, omega);
        let r_max = config.r_max_for(d, omega);

        for &p in &grid {
            let noise = NoiseSpec::new(config.noise, p, code.n())
                .map_err(|e| CliError::Config(e.to_string()))?;
            let base = ResultRow {
                code: code_tag(config.code).into(),
                d,
                p,
                noise: noise_tag(config.noise).into(),
                mode: String::new(),
                estimator: String::new(),
                value: 0.0,
                std_err: 0.0,
                shots: 0,
                seed: config.seed,
                wall_time_ms: 0,
                components: None,
            };
            let key = |branch: u64| {
                derive_key(&[
                    config.seed,
                    config.code as u64,
                    d as u64,
                    p.to_bits(),
                    config.noise as u64,
                    branch,
                ])
            };

            // the identity branch doubles as the unmitigated estimate
            let t0 = Instant::now();
            let identity = estimate_identity_stratified(
                &code,
                &graph,
                &noise,
                k_max,
                config.identity_shots,
                key(1),
            )?;
            let identity_ms = t0.elapsed().as_millis() as u64;

            if config.mode.includes_unmitigated() {
                rows.push(ResultRow {
                    mode: "unmitigated".into(),
                    estimator: "stratified".into(),
                    value: identity.value,
                    std_err: identity.std_err(),
                    shots: identity.shots_total,
                    wall_time_ms: identity_ms,
                    ..base.clone()
                });
            }

            if config.mode.includes_pec() {
                let chan = build_inverse_channel(&code, &noise)
                    .map_err(|e| CliError::Config(e.to_string()))?;
                if config.estimator.includes_stratified() {
                    let t1 = Instant::now();
                    let superbranch = estimate_superbranch_stratified(
                        &code,
                        &graph,
                        &noise,
                        &chan,
                        r_max,
                        config.superbranch_shots,
                        key(2),
                    )?;
                    let pec = combine_pec(&identity, &superbranch, chan.combination_factor());
                    rows.push(ResultRow {
                        mode: "pec".into(),
                        estimator: "stratified".into(),
                        value: pec.value,
                        std_err: pec.std_err(),
                        shots: pec.shots_total,
                        wall_time_ms: identity_ms + t1.elapsed().as_millis() as u64,
                        components: Some(RowComponents {
                            identity: identity.value,
                            identity_std_err: identity.std_err(),
                            superbranch: superbranch.value,
                            superbranch_std_err: superbranch.std_err(),
                            g: chan.combination_factor(),
                        }),
                        ..base.clone()
                    });
                }
                if config.estimator.includes_naive() {
                    let t1 = Instant::now();
                    let naive = estimate_naive_pec(
                        &code,
                        &graph,
                        &noise,
                        &chan,
                        config.naive_shots,
                        key(3),
                    )?;
                    rows.push(ResultRow {
                        mode: "pec".into(),
                        estimator: "naive".into(),
                        value: naive.value,
                        std_err: naive.std_err(),
                        shots: naive.shots_total,
                        wall_time_ms: t1.elapsed().as_millis() as u64,
                        ..base.clone()
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Run, persist, and print the summary with fitted slopes.
pub fn cmd_run_to_files(config: &ExperimentConfig) -> Result<(), CliError> {
    let rows = cmd_run(config)?;
    let out_dir = std::env::var("PECMEM_OUT_DIR").unwrap_or_else(|_| config.out_dir.clone());
    let (csv_path, json_path) = write_results(std::path::Path::new(&out_dir), &rows)?;
    println!("wrote {} rows to {} and {}", rows.len(), csv_path.display(), json_path.display());

    println!("\n{:<16} {:>3} {:<12} {:<11} {:>9} {:>7}", "code", "d", "mode", "estimator", "slope", "points");
    for &d in &config.distances {
        for mode in ["unmitigated", "pec"] {
            for estimator in ["stratified", "naive"] {
                let pts: Vec<(f64, f64)> = rows
                    .iter()
                    .filter(|r| {
                        r.d == d && r.mode == mode && r.estimator == estimator && r.value != 0.0
                    })
                    .map(|r| (r.p, r.value))
                    .collect();
                if pts.len() >= 2 {
                    if let Ok(fit) = fit_slope(&pts) {
                        println!(
                            "{:<16} {:>3} {:<12} {:<11} {:>9.3} {:>7}",
                            code_tag(config.code),
                            d,
                            mode,
                            estimator,
                            fit.slope,
                            fit.points
                        );
                    }
                }
            }
        }
    }
    Ok(())
}

impl From<EstimatorError> for CliError {
    fn from(e: EstimatorError) -> Self {
        CliError::Config(e.to_string())
    }
}
