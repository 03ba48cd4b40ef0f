//! `pecmem predict`: theory curves from cached failure counts (plus an
//! optional results file for the superbranch least-squares coefficients).
//!
//! Repetition-code curves are closed-form. Surface-code identity curves use
//! the truncated series over enumerated counts; surface superbranch curves
//! fit (s1, s2, s3) to the sampled branch-conditioned rates carried in a
//! results JSON, with f0 fixed by the enumerated D_omega. Depolarizing
//! predictions map the X-sector counts through the Y-acts-like-X reduction.

use pecmem::analytics::{
    depolarizing_f0, depolarizing_failure_counts, repetition_identity_rate,
    repetition_superbranch_rate, surface_superbranch_fit, FailureCounts,
};
use pecmem::combinatorics::binomial_f64;
use pecmem::noise::weight_probability;
use pecmem::{CodeKind, NoiseKind};

use crate::artifacts::CountsArtifact;
use crate::results::read_results;
use crate::run::build_code;
use crate::CliError;

pub struct PredictRequest {
    pub counts: Option<std::path::PathBuf>,
    pub code: CodeKind,
    pub d: usize,
    pub noise: NoiseKind,
    pub p_grid: Vec<f64>,
    pub results: Option<std::path::PathBuf>,
    pub out: std::path::PathBuf,
}

struct TheoryPoint {
    p: f64,
    identity: f64,
    superbranch: Option<f64>,
    pec: Option<f64>,
}

fn combination_factor(n: usize, omega: usize, p: f64) -> f64 {
    let c = binomial_f64(n, omega);
    let p0 = weight_probability(p, n, 0);
    let pw = weight_probability(p, n, omega);
    c * pw / (p0 - c * pw)
}

pub fn cmd_predict(req: &PredictRequest) -> Result<(), CliError> {
    let code = build_code(req.code, req.d)?;
    let n = code.n();
    let omega = code.omega();

    let points: Vec<TheoryPoint> = match req.code {
        CodeKind::Repetition => req
            .p_grid
            .iter()
            .map(|&p| {
                let identity = repetition_identity_rate(req.d, p).unwrap();
                let superbranch = repetition_superbranch_rate(req.d, p).unwrap();
                let g = combination_factor(n, omega, p);
                TheoryPoint {
                    p,
                    identity,
                    superbranch: Some(superbranch),
                    pec: Some((1.0 + g) * identity - g * superbranch),
                }
            })
            .collect(),
        CodeKind::RotatedSurface => {
            let counts_path = req.counts.as_ref().ok_or_else(|| {
                CliError::MissingArtifact("surface predictions need --counts".into())
            })?;
            let artifact = CountsArtifact::load(counts_path)?;
            artifact.validate_against(&code)?;
            if artifact.counts.is_empty() {
                return Err(CliError::MissingArtifact(format!(
                    "counts artifact {} has no entries",
                    counts_path.display()
                )));
            }
            let x_counts = artifact.to_failure_counts(n, omega);

            // identity-branch series on the requested noise
            let (series_counts, f0) = match req.noise {
                NoiseKind::BitFlip => {
                    let f0 = x_counts
                        .get(omega)
                        .ok_or(CliError::MissingArtifact(format!(
                            "counts missing k = {omega}"
                        )))?
                        .failures()
                        / binomial_f64(n, omega);
                    (x_counts.clone(), f0)
                }
                NoiseKind::Depolarizing => {
                    let mut dep = FailureCounts::new(n, omega);
                    for k in omega..=(omega + 3).min(n) {
                        let d_dep =
                            depolarizing_failure_counts(&x_counts, n, k).map_err(|e| {
                                CliError::MissingArtifact(format!(
                                    "depolarizing mapping needs exact X counts: {e}"
                                ))
                            })?;
                        dep.insert(pecmem::analytics::CountEntry::new(
                            k,
                            d_dep as f64,
                            pecmem::analytics::CountProvenance::ExactEnumeration,
                        ));
                    }
                    let f0 = depolarizing_f0(&x_counts, n)
                        .map_err(|e| CliError::MissingArtifact(e.to_string()))?;
                    (dep, f0)
                }
            };
            let identity_rate = |p: f64| -> f64 {
                // per-pattern probability of a specific weight-k Pauli string
                let letter_share: f64 = match req.noise {
                    NoiseKind::BitFlip => 1.0,
                    NoiseKind::Depolarizing => 3.0,
                };
                (omega..=(omega + 3).min(n))
                    .map(|k| {
                        let d = series_counts.get(k).map(|e| e.failures()).unwrap_or(0.0);
                        d * (1.0 / letter_share).powi(k as i32) * weight_probability(p, n, k)
                    })
                    .sum()
            };

            // superbranch fit from sampled branch components, when available
            let fit = match &req.results {
                Some(path) => {
                    let rows = read_results(path)?;
                    let samples: Vec<(f64, f64)> = rows
                        .iter()
                        .filter(|r| {
                            r.d == req.d
                                && r.mode == "pec"
                                && r.estimator == "stratified"
                                && r.components.is_some()
                        })
                        .map(|r| (r.p, r.components.as_ref().unwrap().superbranch))
                        .collect();
                    if samples.len() < 4 {
                        eprintln!(
                            "note: {} superbranch samples in {}, need 4 for the fit; skipping PEC theory",
                            samples.len(),
                            path.display()
                        );
                        None
                    } else {
                        Some(
                            surface_superbranch_fit(&samples, f0, n)
                                .map_err(|e| CliError::Config(e.to_string()))?,
                        )
                    }
                }
                None => None,
            };
            if let Some(fit) = &fit {
                println!(
                    "superbranch fit: f0 = {:.5}, s = [{:.4}, {:.4}, {:.4}]",
                    fit.f0, fit.s[0], fit.s[1], fit.s[2]
                );
            }

            req.p_grid
                .iter()
                .map(|&p| {
                    let identity = identity_rate(p);
                    let superbranch = fit.as_ref().map(|f| f.eval(n, p));
                    let g = combination_factor(n, omega, p);
                    TheoryPoint {
                        p,
                        identity,
                        superbranch,
                        pec: superbranch.map(|s| (1.0 + g) * identity - g * s),
                    }
                })
                .collect()
        }
    };

    let mut csv = String::from("code,d,p,noise,curve,value\n");
    let code_name = match req.code {
        CodeKind::Repetition => "repetition",
        CodeKind::RotatedSurface => "rotated_surface",
    };
    let noise_name = match req.noise {
        NoiseKind::BitFlip => "bit_flip",
        NoiseKind::Depolarizing => "depolarizing",
    };
    for pt in &points {
        csv.push_str(&format!(
            "{code_name},{},{},{noise_name},identity_theory,{}\n",
            req.d, pt.p, pt.identity
        ));
        if let Some(s) = pt.superbranch {
            csv.push_str(&format!(
                "{code_name},{},{},{noise_name},superbranch_theory,{s}\n",
                req.d, pt.p
            ));
        }
        if let Some(v) = pt.pec {
            csv.push_str(&format!(
                "{code_name},{},{},{noise_name},pec_theory,{v}\n",
                req.d, pt.p
            ));
        }
    }
    if let Some(parent) = req.out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::Io(format!("creating {}: {e}", parent.display())))?;
        }
    }
    std::fs::write(&req.out, csv)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", req.out.display())))?;
    println!("wrote {} theory points to {}", points.len(), req.out.display());
    Ok(())
}
