//! `pecmem enumerate`: compute failure counts D_k and cache them as a
//! validated JSON artifact.

use pecmem::analytics::{count_failures, CountMode};
use pecmem::{build_decoding_graph, CodeKind};

use crate::artifacts::CountsArtifact;
use crate::run::build_code;
use crate::CliError;

pub struct EnumerateRequest {
    pub code: CodeKind,
    pub d: usize,
    pub k_lo: usize,
    pub k_hi: usize,
    pub budget: u128,
    /// Monte Carlo fallback shots for weights beyond the exact budget.
    pub monte_carlo: Option<u64>,
    pub seed: u64,
    pub out: std::path::PathBuf,
}

pub fn cmd_enumerate(req: &EnumerateRequest) -> Result<(), CliError> {
    let code = build_code(req.code, req.d)?;
    let graph = build_decoding_graph(&code).map_err(|e| CliError::Config(e.to_string()))?;
    if req.k_hi > code.n() || req.k_lo > req.k_hi {
        return Err(CliError::Config(format!(
            "weight range {}..={} invalid for n = {}",
            req.k_lo,
            req.k_hi,
            code.n()
        )));
    }

    let mut artifact = if req.out.exists() {
        let existing = CountsArtifact::load(&req.out)?;
        existing.validate_against(&code)?;
        existing
    } else {
        CountsArtifact::new(&code)
    };

    for k in req.k_lo..=req.k_hi {
        let needed = pecmem::code::support_count(code.n(), k);
        let mode = if needed <= req.budget {
            CountMode::Exact
        } else if let Some(shots) = req.monte_carlo {
            CountMode::MonteCarlo {
                shots,
                seed: req.seed,
            }
        } else {
            return Err(CliError::Budget(format!(
                "C({}, {k}) = {needed} exceeds budget {}; pass --monte-carlo SHOTS to estimate",
                code.n(),
                req.budget
            )));
        };
        let entry = count_failures(&code, &graph, k, mode, req.budget).map_err(|e| match e {
            pecmem::analytics::AnalyticsError::BudgetExceeded { needed, budget } => {
                CliError::Budget(format!("needs {needed} patterns, budget {budget}"))
            }
            other => CliError::Config(other.to_string()),
        })?;
        println!(
            "d={} k={k}: D = {}{}",
            req.d,
            entry.d,
            entry
                .std_err
                .map(|e| format!(" +- {e:.1}"))
                .unwrap_or_default()
        );
        artifact.merge(entry);
    }
    artifact.save(&req.out)?;
    println!("wrote {}", req.out.display());
    Ok(())
}
