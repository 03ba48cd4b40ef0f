//! Memory-experiment shot loops and logical-error-rate estimators.
//!
//! Three estimators are provided: the stratified identity-branch estimate,
//! the stratified superbranch estimate (both recombined exactly through the
//! mixture weights), and the naive operational PEC estimator that samples
//! branches with probability |beta_b|/||beta||_1 and averages signed,
//! L1-weighted failure indicators.
//!
//! Every shot draws from an RNG keyed by (experiment, stratum, shot index),
//! so results are bit-identical under any parallel schedule. Shots within a
//! stratum are merged by associative addition of (shots, failures) pairs.

use rayon::prelude::*;
use thiserror::Error;

use crate::code::{CodeError, CodeSpec};
use crate::combinatorics::binomial_f64;
use crate::decoder::{DecoderError, DecodingGraph};
use crate::noise::{sample_subset, weight_probability, NoiseError, NoiseSpec};
use crate::pauli::PauliString;
use crate::pec::InverseChannelSpec;
use crate::rng::{derive_key, shot_rng};

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Decoder(#[from] DecoderError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error("stratum bound {got} exceeds {limit} ({what})")]
    BadTruncation {
        what: &'static str,
        got: usize,
        limit: usize,
    },
}

/// Identifies one sampling stratum (or one signed branch of the naive
/// estimator's audit trail).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StratumKey {
    /// Identity branch, conditioned on total error weight k.
    Identity { weight: usize },
    /// Superbranch, conditioned on `overlap` error sites on the inserted
    /// support and `extra` error sites off it.
    Superbranch { overlap: usize, extra: usize },
    /// Naive estimator tally for one branch sign.
    Branch { negative: bool },
}

/// Per-stratum tally with its mixture weight.
#[derive(Debug, Clone)]
pub struct StratumRecord {
    pub key: StratumKey,
    /// Mixture coefficient pi_k(p) or w_{u,r}(p); branch-sampling probability
    /// for naive tallies.
    pub weight: f64,
    pub shots: u64,
    pub failures: u64,
}

impl StratumRecord {
    pub fn failure_rate(&self) -> f64 {
        if self.shots == 0 {
            0.0
        } else {
            self.failures as f64 / self.shots as f64
        }
    }
}

/// Components of a combined PEC estimate.
#[derive(Debug, Clone, Copy)]
pub struct PecComponents {
    pub identity: f64,
    pub superbranch: f64,
    pub g: f64,
}

/// An estimate with exact variance bookkeeping.
#[derive(Debug, Clone)]
pub struct EstimateRecord {
    /// Signed estimate; PEC values may legitimately be negative and are
    /// never clamped.
    pub value: f64,
    pub variance: f64,
    pub shots_total: u64,
    pub strata: Vec<StratumRecord>,
    pub components: Option<PecComponents>,
}

impl EstimateRecord {
    pub fn std_err(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// Decode one composed physical error and judge logical failure.
pub fn decode_and_judge(
    code: &CodeSpec,
    graph: &DecodingGraph,
    total: &PauliString,
) -> Result<bool, EstimatorError> {
    let syndrome = code.syndrome(total)?;
    let correction = graph.decode(&syndrome)?;
    let residual = total.compose(&correction.pauli);
    Ok(code.is_logical_failure(&residual)?)
}

/// One memory-experiment shot: sample an i.i.d. error, compose it with the
/// branch insertion, decode, and report failure (0/1). The decoder never
/// sees which branch ran.
pub fn run_shot<R: rand::Rng>(
    code: &CodeSpec,
    graph: &DecodingGraph,
    noise: &NoiseSpec,
    inserted: &PauliString,
    rng: &mut R,
) -> Result<bool, EstimatorError> {
    let error = noise.sample_error(rng);
    let total = error.compose(inserted);
    decode_and_judge(code, graph, &total)
}

fn stratum_tag(key: StratumKey) -> u64 {
    match key {
        StratumKey::Identity { weight } => derive_key(&[1, weight as u64]),
        StratumKey::Superbranch { overlap, extra } => {
            derive_key(&[2, overlap as u64, extra as u64])
        }
        StratumKey::Branch { negative } => derive_key(&[3, negative as u64]),
    }
}

/// Run `shots` keyed shots of `make_total` and count failures.
fn tally_stratum<F>(
    code: &CodeSpec,
    graph: &DecodingGraph,
    experiment: u64,
    key: StratumKey,
    shots: u64,
    make_total: F,
) -> Result<u64, EstimatorError>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<PauliString, EstimatorError> + Sync,
{
    let tag = stratum_tag(key);
    (0..shots)
        .into_par_iter()
        .try_fold(
            || 0u64,
            |acc, shot| {
                let mut rng = shot_rng(experiment, tag, shot);
                let total = make_total(&mut rng)?;
                let fail = decode_and_judge(code, graph, &total)?;
                Ok(acc + fail as u64)
            },
        )
        .try_reduce(|| 0u64, |a, b| Ok(a + b))
}

/// Stratified estimate of the identity-branch (unmitigated) logical error
/// rate, P_I = sum_k pi_k q_I(k), with pi_k = C(N,k) p^k (1-p)^(N-k).
///
/// Strata with k < omega cannot fail (code distance; verified exhaustively
/// for d <= 5 in the decoder tests) and are asserted at q = 0 rather than
/// sampled. The variance is sum_k pi_k^2 q(1-q)/m_k.
pub fn estimate_identity_stratified(
    code: &CodeSpec,
    graph: &DecodingGraph,
    noise: &NoiseSpec,
    k_max: usize,
    shots_per_stratum: u64,
    experiment: u64,
) -> Result<EstimateRecord, EstimatorError> {
    let n = code.n();
    if k_max > n {
        return Err(EstimatorError::BadTruncation {
            what: "k_max",
            got: k_max,
            limit: n,
        });
    }
    let mut strata = Vec::with_capacity(k_max + 1);
    let mut value = 0.0;
    let mut variance = 0.0;
    let mut shots_total = 0;
    for k in 0..=k_max {
        let key = StratumKey::Identity { weight: k };
        let pi = binomial_f64(n, k) * weight_probability(noise.p(), n, k);
        if k < code.omega() {
            strata.push(StratumRecord {
                key,
                weight: pi,
                shots: 0,
                failures: 0,
            });
            continue;
        }
        let failures = tally_stratum(
            code,
            graph,
            experiment,
            key,
            shots_per_stratum,
            |rng| Ok(noise.sample_error_in_stratum(k, rng)?),
        )?;
        let q = failures as f64 / shots_per_stratum as f64;
        value += pi * q;
        variance += pi * pi * q * (1.0 - q) / shots_per_stratum as f64;
        shots_total += shots_per_stratum;
        strata.push(StratumRecord {
            key,
            weight: pi,
            shots: shots_per_stratum,
            failures,
        });
    }
    Ok(EstimateRecord {
        value,
        variance,
        shots_total,
        strata,
        components: None,
    })
}

/// Stratified estimate of the superbranch logical error rate,
/// P_S = sum_{u,r} w_{u,r} q_S(u,r).
///
/// Stratum (u, r) draws a uniform weight-omega insertion, u error sites on
/// the inserted support, and r error sites off it; the physical error and
/// the insertion compose by mask-XOR, so an overlapping bit-flip cancels
/// its insertion. Weights are
/// w_{u,r} = C(w,u) p^u (1-p)^(w-u) * C(N-w,r) p^r (1-p)^(N-w-r).
pub fn estimate_superbranch_stratified(
    code: &CodeSpec,
    graph: &DecodingGraph,
    noise: &NoiseSpec,
    channel: &InverseChannelSpec,
    r_max: usize,
    shots_per_stratum: u64,
    experiment: u64,
) -> Result<EstimateRecord, EstimatorError> {
    let n = code.n();
    let omega = code.omega();
    if r_max > n - omega {
        return Err(EstimatorError::BadTruncation {
            what: "r_max",
            got: r_max,
            limit: n - omega,
        });
    }
    let p = noise.p();
    let full = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let mut strata = Vec::new();
    let mut value = 0.0;
    let mut variance = 0.0;
    let mut shots_total = 0;
    for u in 0..=omega {
        let w_overlap = binomial_f64(omega, u) * weight_probability(p, omega, u);
        for r in 0..=r_max {
            let key = StratumKey::Superbranch {
                overlap: u,
                extra: r,
            };
            let w = w_overlap * binomial_f64(n - omega, r) * weight_probability(p, n - omega, r);
            let failures = tally_stratum(
                code,
                graph,
                experiment,
                key,
                shots_per_stratum,
                |rng| {
                    let insert = channel.sample_insertion(rng);
                    let support = insert.support();
                    let overlap = noise.letters_on(sample_subset(support, u, rng), rng);
                    let extra = noise.letters_on(sample_subset(full & !support, r, rng), rng);
                    Ok(insert.compose(&overlap).compose(&extra))
                },
            )?;
            let q = failures as f64 / shots_per_stratum as f64;
            value += w * q;
            variance += w * w * q * (1.0 - q) / shots_per_stratum as f64;
            shots_total += shots_per_stratum;
            strata.push(StratumRecord {
                key,
                weight: w,
                shots: shots_per_stratum,
                failures,
            });
        }
    }
    Ok(EstimateRecord {
        value,
        variance,
        shots_total,
        strata,
        components: None,
    })
}

/// Combine branch-conditioned estimates into the PEC logical error rate,
/// (1+G) P_I - G P_S, with variance (1+G)^2 Var(P_I) + G^2 Var(P_S).
///
/// The two records must come from disjoint shot budgets so their covariance
/// vanishes.
pub fn combine_pec(
    identity: &EstimateRecord,
    superbranch: &EstimateRecord,
    g: f64,
) -> EstimateRecord {
    let value = (1.0 + g) * identity.value - g * superbranch.value;
    let variance = (1.0 + g).powi(2) * identity.variance + g.powi(2) * superbranch.variance;
    let mut strata = identity.strata.clone();
    strata.extend(superbranch.strata.iter().cloned());
    EstimateRecord {
        value,
        variance,
        shots_total: identity.shots_total + superbranch.shots_total,
        strata,
        components: Some(PecComponents {
            identity: identity.value,
            superbranch: superbranch.value,
            g,
        }),
    }
}

/// Operational PEC estimator: per shot, draw a branch, run it, and average
/// sign(beta_b) * ||beta||_1 * f. Unbiased for (1+G) P_I - G P_S.
pub fn estimate_naive_pec(
    code: &CodeSpec,
    graph: &DecodingGraph,
    noise: &NoiseSpec,
    channel: &InverseChannelSpec,
    shots: u64,
    experiment: u64,
) -> Result<EstimateRecord, EstimatorError> {
    let tag = stratum_tag(StratumKey::Branch { negative: false });
    // per-shot tallies: (positive-branch shots, their failures, negative-
    // branch shots, their failures)
    let (m_pos, f_pos, m_neg, f_neg) = (0..shots)
        .into_par_iter()
        .try_fold(
            || (0u64, 0u64, 0u64, 0u64),
            |acc, shot| -> Result<_, EstimatorError> {
                let mut rng = shot_rng(experiment, tag, shot);
                let branch = channel.sample_branch(&mut rng);
                let fail = run_shot(code, graph, noise, &branch.inserted, &mut rng)? as u64;
                let (mp, fp, mn, fn_) = acc;
                Ok(if branch.sign > 0 {
                    (mp + 1, fp + fail, mn, fn_)
                } else {
                    (mp, fp, mn + 1, fn_ + fail)
                })
            },
        )
        .try_reduce(
            || (0, 0, 0, 0),
            |a, b| Ok((a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3 + b.3)),
        )?;

    let l1 = channel.l1_norm();
    let m = shots as f64;
    let mean = l1 * (f_pos as f64 - f_neg as f64) / m;
    // samples are in {0, +-l1}: E[x^2] = l1^2 * (f_pos + f_neg)/m
    let second_moment = l1 * l1 * (f_pos + f_neg) as f64 / m;
    let sample_var = if shots > 1 {
        (second_moment - mean * mean) * m / (m - 1.0)
    } else {
        0.0
    };
    Ok(EstimateRecord {
        value: mean,
        variance: sample_var / m,
        shots_total: shots,
        strata: vec![
            StratumRecord {
                key: StratumKey::Branch { negative: false },
                weight: channel.identity_probability(),
                shots: m_pos,
                failures: f_pos,
            },
            StratumRecord {
                key: StratumKey::Branch { negative: true },
                weight: 1.0 - channel.identity_probability(),
                shots: m_neg,
                failures: f_neg,
            },
        ],
        components: None,
    })
}
