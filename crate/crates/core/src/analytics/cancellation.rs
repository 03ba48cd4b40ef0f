//! Exact series verification that PEC cancels the order-p^omega logical
//! error term.
//!
//! For instances small enough to enumerate every X-pattern through the real
//! decoder, the branch-conditioned rates P_I(p) and P_S(p) are assembled as
//! exact rational polynomials and the error-mitigated rate
//! (P_0 P_I - C(N,w) P_w P_S) / A is Taylor-expanded exactly. Its p^omega
//! coefficient must be exactly zero.
//!
//! The depolarizing variant uses the X-sector reduction: a site flips the
//! decoded sector with probability 2p/3, and each inserted letter carries an
//! X-component with probability 2/3.

use num_rational::BigRational;
use num_traits::One;

use super::series::SeriesPoly;
use super::AnalyticsError;
use crate::code::CodeSpec;
use crate::combinatorics::binomial_big;
use crate::decoder::DecodingGraph;
use crate::estimator::decode_and_judge;
use crate::noise::NoiseKind;
use crate::pauli::PauliString;

/// Largest qubit count for which the 2^n failure table is built.
pub const MAX_EXACT_QUBITS: usize = 20;

/// Exact Taylor series of P_L^PEC(p) to `order`, built by exhaustive
/// enumeration through the artifact's decoder.
pub fn verify_cancellation(
    code: &CodeSpec,
    graph: &DecodingGraph,
    noise_kind: NoiseKind,
    order: usize,
) -> Result<SeriesPoly, AnalyticsError> {
    let n = code.n();
    if n > MAX_EXACT_QUBITS {
        return Err(AnalyticsError::InstanceTooLarge {
            n,
            limit: MAX_EXACT_QUBITS,
        });
    }
    let omega = code.omega();

    // failure table over every X-pattern
    let mut fails = vec![false; 1usize << n];
    for (mask, slot) in fails.iter_mut().enumerate() {
        let pattern = PauliString::x_string(n, mask as u128);
        *slot = decode_and_judge(code, graph, &pattern)?;
    }

    // per-site X-flip probability as a polynomial in p
    let site_flip = match noise_kind {
        NoiseKind::BitFlip => SeriesPoly::monomial(BigRational::one(), 1),
        NoiseKind::Depolarizing => SeriesPoly::monomial(SeriesPoly::ratio(2, 3), 1),
    };
    let site_keep = SeriesPoly::one().sub(&site_flip);
    // q^j (1-q)^(n-j) for each weight j
    let pattern_prob: Vec<SeriesPoly> = (0..=n)
        .map(|j| site_flip.pow(j).mul(&site_keep.pow(n - j)))
        .collect();

    // identity branch: group the failure table by pattern weight
    let mut weight_fails = vec![0u64; n + 1];
    for (mask, &f) in fails.iter().enumerate() {
        if f {
            weight_fails[(mask as u128).count_ones() as usize] += 1;
        }
    }
    let mut p_identity = SeriesPoly::zero();
    for (j, &c) in weight_fails.iter().enumerate() {
        if c != 0 {
            p_identity = p_identity.add(&pattern_prob[j].scale(&BigRational::from(
                num_bigint::BigInt::from(c),
            )));
        }
    }

    // superbranch: average over insertions; for depolarizing, over the
    // insertion's X-sector subset T of the support with weight
    // (2/3)^|T| (1/3)^(w-|T|)
    let mut p_super = SeriesPoly::zero();
    match noise_kind {
        NoiseKind::BitFlip => {
            // counts[j] = failing (insert, weight-j ambient pattern) pairs
            let mut counts = vec![0u64; n + 1];
            for support in crate::code::enumerate_supports(n, omega)? {
                for e in 0..(1usize << n) {
                    let total = e as u128 ^ support;
                    if fails[total as usize] {
                        counts[(e as u128).count_ones() as usize] += 1;
                    }
                }
            }
            for (j, &c) in counts.iter().enumerate() {
                if c != 0 {
                    p_super = p_super.add(&pattern_prob[j].scale(&BigRational::from(
                        num_bigint::BigInt::from(c),
                    )));
                }
            }
        }
        NoiseKind::Depolarizing => {
            // counts[t][j] over (insert support, X-sector subset T, pattern)
            let mut counts = vec![vec![0u64; n + 1]; omega + 1];
            for support in crate::code::enumerate_supports(n, omega)? {
                // enumerate T over subsets of the support
                let mut t_mask = support;
                loop {
                    let t = t_mask.count_ones() as usize;
                    for e in 0..(1usize << n) {
                        let total = e as u128 ^ t_mask;
                        if fails[total as usize] {
                            counts[t][(e as u128).count_ones() as usize] += 1;
                        }
                    }
                    if t_mask == 0 {
                        break;
                    }
                    t_mask = (t_mask - 1) & support;
                }
            }
            let two_thirds = SeriesPoly::ratio(2, 3);
            let one_third = SeriesPoly::ratio(1, 3);
            for (t, row) in counts.iter().enumerate() {
                let letter_weight = {
                    let mut w = BigRational::one();
                    for _ in 0..t {
                        w *= &two_thirds;
                    }
                    for _ in 0..(omega - t) {
                        w *= &one_third;
                    }
                    w
                };
                for (j, &c) in row.iter().enumerate() {
                    if c != 0 {
                        let coeff = &letter_weight * BigRational::from(num_bigint::BigInt::from(c));
                        p_super = p_super.add(&pattern_prob[j].scale(&coeff));
                    }
                }
            }
        }
    }
    let support_count = BigRational::from(binomial_big(n, omega));
    p_super = p_super.scale(&(BigRational::one() / &support_count));

    // (P_0 P_I - C P_w P_S) / A, Taylor to the requested order
    let p0 = SeriesPoly::weight_probability(n, 0);
    let p_omega = SeriesPoly::weight_probability(n, omega);
    let numerator = p0
        .mul(&p_identity)
        .sub(&p_omega.scale(&support_count).mul(&p_super));
    let a = super::channel::normalization_series(n, omega);
    Ok(numerator.taylor_quotient(&a, order)?)
}
