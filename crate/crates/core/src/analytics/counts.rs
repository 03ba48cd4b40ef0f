//! Failure counts D_k: the number of weight-k X-error patterns the decoder
//! turns into a logical flip, by exhaustive enumeration or Monte Carlo.
//!
//! These integers are decoder- and layout-dependent; persisted artifacts
//! must carry the code layout hash and [`crate::decoder::DECODER_VERSION`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::AnalyticsError;
use crate::code::CodeSpec;
use crate::combinatorics::{binomial_u128, unrank_support};
use crate::decoder::DecodingGraph;
use crate::estimator::decode_and_judge;
use crate::noise::sample_subset;
use crate::pauli::PauliString;
use crate::rng::shot_rng;

/// Default cap on C(N, k) for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "provenance")]
pub enum CountProvenance {
    ExactEnumeration,
    MonteCarlo { shots: u64 },
}

/// One per-weight failure count with provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountEntry {
    pub k: usize,
    /// D_k (exact integer) or the Monte Carlo estimate C(N,k) * f/m.
    pub d: f64,
    #[serde(flatten)]
    pub provenance: CountProvenance,
    /// One-sigma uncertainty; only present for Monte Carlo entries.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_err: Option<f64>,
}

impl CountEntry {
    pub fn new(k: usize, d: f64, provenance: CountProvenance) -> Self {
        CountEntry {
            k,
            d,
            provenance,
            std_err: None,
        }
    }

    pub fn failures(&self) -> f64 {
        self.d
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.provenance, CountProvenance::ExactEnumeration)
    }

    /// The exact integer count; None for Monte Carlo entries.
    pub fn exact(&self) -> Option<u128> {
        self.is_exact().then_some(self.d as u128)
    }
}

/// Per-weight failure counts for one (code, decoder) pair.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FailureCounts {
    pub n: usize,
    pub omega: usize,
    entries: Vec<CountEntry>,
}

impl FailureCounts {
    pub fn new(n: usize, omega: usize) -> Self {
        FailureCounts {
            n,
            omega,
            entries: Vec::new(),
        }
    }

    pub fn insert(&mut self, entry: CountEntry) {
        self.entries.retain(|e| e.k != entry.k);
        self.entries.push(entry);
        self.entries.sort_by_key(|e| e.k);
    }

    pub fn get(&self, k: usize) -> Option<&CountEntry> {
        self.entries.iter().find(|e| e.k == k)
    }

    pub fn entries(&self) -> &[CountEntry] {
        &self.entries
    }

    pub fn max_weight(&self) -> Option<usize> {
        self.entries.last().map(|e| e.k)
    }

    /// D_k = 0 for k < omega and D_k <= C(n, k) everywhere.
    pub fn check_invariants(&self) -> bool {
        self.entries.iter().all(|e| {
            let cap = binomial_u128(self.n, e.k) as f64;
            e.d >= 0.0 && e.d <= cap && (e.k >= self.omega || e.d == 0.0)
        })
    }
}

/// How [`count_failures`] evaluates D_k.
#[derive(Debug, Clone, Copy)]
pub enum CountMode {
    Exact,
    MonteCarlo { shots: u64, seed: u64 },
}

/// Count (or estimate) the weight-k X-patterns that decode into a logical
/// failure.
///
/// Exact mode enumerates every support in deterministic chunks merged by
/// addition; it refuses instances with C(N, k) beyond `budget`. Monte Carlo
/// mode samples uniform supports and returns D-hat = C(N,k) * f/m with its
/// binomial standard error.
pub fn count_failures(
    code: &CodeSpec,
    graph: &DecodingGraph,
    k: usize,
    mode: CountMode,
    budget: u128,
) -> Result<CountEntry, AnalyticsError> {
    let n = code.n();
    if k > n {
        return Err(AnalyticsError::InvalidIndices {
            n,
            omega: code.omega(),
            k,
        });
    }
    let total = binomial_u128(n, k);
    match mode {
        CountMode::Exact => {
            if total > budget {
                return Err(AnalyticsError::BudgetExceeded {
                    needed: total,
                    budget,
                });
            }
            let chunks: u128 = 256.min(total.max(1));
            let failures: u128 = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let lo = total * c / chunks;
                    let hi = total * (c + 1) / chunks;
                    if lo == hi {
                        return Ok(0u128);
                    }
                    let mut mask = unrank_support(n, k, lo).expect("rank in range");
                    let mut fails = 0u128;
                    for rank in lo..hi {
                        if rank > lo {
                            // Gosper's hack: next same-weight mask
                            let c0 = mask & mask.wrapping_neg();
                            let r = mask.wrapping_add(c0);
                            mask = (((r ^ mask) >> 2) / c0) | r;
                        }
                        let pattern = PauliString::x_string(n, mask);
                        if decode_and_judge(code, graph, &pattern)? {
                            fails += 1;
                        }
                    }
                    Ok::<u128, AnalyticsError>(fails)
                })
                .try_reduce(|| 0, |a, b| Ok(a + b))?;
            Ok(CountEntry::new(
                k,
                failures as f64,
                CountProvenance::ExactEnumeration,
            ))
        }
        CountMode::MonteCarlo { shots, seed } => {
            let full = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
            let failures: u64 = (0..shots)
                .into_par_iter()
                .try_fold(
                    || 0u64,
                    |acc, shot| {
                        let mut rng = shot_rng(seed, k as u64, shot);
                        let mask = sample_subset(full, k, &mut rng);
                        let pattern = PauliString::x_string(n, mask);
                        Ok::<_, AnalyticsError>(acc + decode_and_judge(code, graph, &pattern)? as u64)
                    },
                )
                .try_reduce(|| 0, |a, b| Ok(a + b))?;
            let q = failures as f64 / shots as f64;
            let mut entry = CountEntry::new(
                k,
                total as f64 * q,
                CountProvenance::MonteCarlo { shots },
            );
            entry.std_err = Some(total as f64 * (q * (1.0 - q) / shots as f64).sqrt());
            Ok(entry)
        }
    }
}

/// Map X-sector counts to depolarizing counts:
/// D_k^dep = sum_{t=omega}^{k} 2^t D_t^X C(N-t, k-t)
/// (Y acts like X and Z like I for the logical-Z memory experiment).
pub fn depolarizing_failure_counts(
    x_counts: &FailureCounts,
    n: usize,
    k: usize,
) -> Result<u128, AnalyticsError> {
    let omega = x_counts.omega;
    let mut total: u128 = 0;
    for t in omega..=k {
        let d_t = x_counts
            .get(t)
            .and_then(CountEntry::exact)
            .ok_or(AnalyticsError::MissingCounts { k: t })?;
        total += (1u128 << t) * d_t * binomial_u128(n - t, k - t);
    }
    Ok(total)
}

/// f0 for the depolarizing channel: D_omega^dep / (C(N, omega) 3^omega).
pub fn depolarizing_f0(x_counts: &FailureCounts, n: usize) -> Result<f64, AnalyticsError> {
    let omega = x_counts.omega;
    let d = depolarizing_failure_counts(x_counts, n, omega)?;
    let denom = binomial_u128(n, omega) as f64 * 3f64.powi(omega as i32);
    Ok(d as f64 / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{build_repetition_code, build_rotated_surface_code};
    use crate::decoder::build_decoding_graph;

    #[test]
    fn repetition_counts_are_binomials() {
        // every weight >= omega pattern fails on a repetition code
        for d in [3usize, 5, 7] {
            let code = build_repetition_code(d).unwrap();
            let graph = build_decoding_graph(&code).unwrap();
            for k in 0..=d {
                let entry = count_failures(&code, &graph, k, CountMode::Exact, 1 << 20).unwrap();
                let expect = if k >= code.omega() {
                    binomial_u128(d, k) as f64
                } else {
                    0.0
                };
                assert_eq!(entry.d, expect, "d={d} k={k}");
            }
        }
    }

    #[test]
    fn surface_d3_weight2_count_is_frozen() {
        // reference constant for this artifact's decoder (tie-break
        // mwpm-dp-1); a change here means decoding behaviour changed
        let code = build_rotated_surface_code(3).unwrap();
        let graph = build_decoding_graph(&code).unwrap();
        let entry = count_failures(&code, &graph, 2, CountMode::Exact, 1 << 20).unwrap();
        assert!(entry.is_exact());
        let d2 = entry.exact().unwrap();
        assert!((1..=36).contains(&d2));
        assert_eq!(d2, super::super::SURFACE_D3_BITFLIP_D2 as u128);
    }

    #[test]
    fn budget_is_enforced() {
        let code = build_rotated_surface_code(5).unwrap();
        let graph = build_decoding_graph(&code).unwrap();
        assert!(matches!(
            count_failures(&code, &graph, 5, CountMode::Exact, 100),
            Err(AnalyticsError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn monte_carlo_ci_contains_exact_value() {
        // d=5 surface, k = omega + 1
        let code = build_rotated_surface_code(5).unwrap();
        let graph = build_decoding_graph(&code).unwrap();
        let exact = count_failures(&code, &graph, 4, CountMode::Exact, 1 << 20).unwrap();
        let mc = count_failures(
            &code,
            &graph,
            4,
            CountMode::MonteCarlo {
                shots: 200_000,
                seed: 0xC0FFEE,
            },
            1 << 20,
        )
        .unwrap();
        let err = mc.std_err.unwrap();
        assert!(
            (mc.d - exact.d).abs() < 3.0 * err,
            "mc={} exact={} err={err}",
            mc.d,
            exact.d
        );
    }

    #[test]
    fn depolarizing_mapping() {
        let mut x_counts = FailureCounts::new(9, 2);
        x_counts.insert(CountEntry::new(2, 6.0, CountProvenance::ExactEnumeration));
        x_counts.insert(CountEntry::new(3, 40.0, CountProvenance::ExactEnumeration));
        // t = omega term only: D_w^dep = 2^w D_w
        assert_eq!(depolarizing_failure_counts(&x_counts, 9, 2).unwrap(), 24);
        // k = 3: 4*6*C(7,1) + 8*40
        assert_eq!(
            depolarizing_failure_counts(&x_counts, 9, 3).unwrap(),
            4 * 6 * 7 + 8 * 40
        );
        let f0 = depolarizing_f0(&x_counts, 9).unwrap();
        assert!((f0 - 24.0 / (36.0 * 9.0)).abs() < 1e-15);
        assert!(depolarizing_failure_counts(&x_counts, 9, 4).is_err());
    }

    #[test]
    fn invariants_detect_bad_counts() {
        let mut counts = FailureCounts::new(5, 3);
        counts.insert(CountEntry::new(3, 10.0, CountProvenance::ExactEnumeration));
        assert!(counts.check_invariants());
        counts.insert(CountEntry::new(2, 1.0, CountProvenance::ExactEnumeration));
        assert!(!counts.check_invariants(), "nonzero D_k below omega");
    }
}
