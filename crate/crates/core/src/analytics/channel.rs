//! Composite-channel coefficients c_k(p) of the inverse channel composed
//! with the noise, and the logical error rate assembled from failure counts.
//!
//! c_k(p) = (1/A) [ P_0 P_k - P_w sum_t C(k,t) C(N-k, w-t) P_{w+k-2t} ]
//! with the t-sum over max(0, w+k-N) ..= min(w, k), and
//! A = P_0 - C(N, w) P_w. The PEC logical error rate is then
//! sum_{k >= w} c_k(p) D_k: code geometry and decoder enter only through
//! the integers D_k.

use num_rational::BigRational;

use super::counts::FailureCounts;
use super::series::SeriesPoly;
use super::AnalyticsError;
use crate::combinatorics::{binomial_big, binomial_f64};
use crate::noise::weight_probability;

fn check_indices(n: usize, omega: usize, k: usize) -> Result<(), AnalyticsError> {
    if omega == 0 || omega > n || k > n {
        return Err(AnalyticsError::InvalidIndices { n, omega, k });
    }
    Ok(())
}

/// Numerical c_k(p).
pub fn composite_coefficient(
    n: usize,
    omega: usize,
    k: usize,
    p: f64,
) -> Result<f64, AnalyticsError> {
    check_indices(n, omega, k)?;
    let pk = |j: usize| weight_probability(p, n, j);
    let mut t_sum = 0.0;
    for t in omega.saturating_sub(n - k)..=omega.min(k) {
        t_sum += binomial_f64(k, t) * binomial_f64(n - k, omega - t) * pk(omega + k - 2 * t);
    }
    let a = pk(0) - binomial_f64(n, omega) * pk(omega);
    Ok((pk(0) * pk(k) - pk(omega) * t_sum) / a)
}

/// Exact symbolic c_k as a rational function: (numerator, A) with
/// c_k(p) = numerator(p) / A(p).
pub fn composite_coefficient_series(
    n: usize,
    omega: usize,
    k: usize,
) -> Result<(SeriesPoly, SeriesPoly), AnalyticsError> {
    check_indices(n, omega, k)?;
    let pk = |j: usize| SeriesPoly::weight_probability(n, j);
    let mut t_sum = SeriesPoly::zero();
    for t in omega.saturating_sub(n - k)..=omega.min(k) {
        let c = BigRational::from(binomial_big(k, t) * binomial_big(n - k, omega - t));
        t_sum = t_sum.add(&pk(omega + k - 2 * t).scale(&c));
    }
    let numerator = pk(0).mul(&pk(k)).sub(&pk(omega).mul(&t_sum));
    Ok((numerator, normalization_series(n, omega)))
}

/// A(p) = P_0 - C(N, omega) P_omega as an exact polynomial.
pub fn normalization_series(n: usize, omega: usize) -> SeriesPoly {
    let c = BigRational::from(binomial_big(n, omega));
    SeriesPoly::weight_probability(n, 0).sub(&SeriesPoly::weight_probability(n, omega).scale(&c))
}

/// PEC logical error rate from failure counts: sum_{k >= omega} c_k(p) D_k.
///
/// Counts must cover every k in omega..=k_hi for the highest k_hi present;
/// gaps are an error rather than silent zeros.
pub fn logical_rate_from_channel(
    counts: &FailureCounts,
    n: usize,
    omega: usize,
    p: f64,
) -> Result<f64, AnalyticsError> {
    let Some(k_hi) = counts.max_weight() else {
        return Ok(0.0);
    };
    let mut rate = 0.0;
    for k in omega..=k_hi {
        let d = counts
            .get(k)
            .ok_or(AnalyticsError::MissingCounts { k })?
            .failures();
        rate += composite_coefficient(n, omega, k, p)? * d;
    }
    Ok(rate)
}

/// Appendix-C-style predicate: the O(p^(omega+1)) logical term is negative
/// when (1-p)^N > (1 - omega/N) / (omega + 1).
pub fn negativity_condition(n: usize, omega: usize, p: f64) -> Result<bool, AnalyticsError> {
    check_indices(n, omega, omega)?;
    let lhs = (1.0 - p).powi(n as i32);
    let rhs = (1.0 - omega as f64 / n as f64) / (omega as f64 + 1.0);
    Ok(lhs > rhs)
}

/// Symbolic trace-preservation identity: sum_k C(N,k) c_k(p) * A(p) == A(p).
pub fn trace_preservation_holds(n: usize, omega: usize) -> Result<bool, AnalyticsError> {
    let mut total = SeriesPoly::zero();
    for k in 0..=n {
        let (num, _) = composite_coefficient_series(n, omega, k)?;
        total = total.add(&num.scale(&BigRational::from(binomial_big(n, k))));
    }
    Ok(total == normalization_series(n, omega))
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::counts::{CountEntry, CountProvenance};
    use num_traits::Zero;

    #[test]
    fn identity_coefficient_at_zero_noise() {
        assert!((composite_coefficient(3, 2, 0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(composite_coefficient(3, 4, 0, 0.0).is_err());
        assert!(composite_coefficient(3, 2, 4, 0.0).is_err());
    }

    #[test]
    fn c2_symbolic_matches_closed_form() {
        // N=3, omega=2: c_2(p) = -2 P_2^2 / A, leading term -2 p^4
        let (num, a) = composite_coefficient_series(3, 2, 2).unwrap();
        let p2 = SeriesPoly::weight_probability(3, 2);
        let expect = p2.mul(&p2).scale(&SeriesPoly::ratio(-2, 1));
        assert_eq!(num, expect);
        let taylor = num.taylor_quotient(&a, 4).unwrap();
        for i in 0..4 {
            assert!(taylor.coeff(i).is_zero(), "p^{i} should vanish");
        }
        assert_eq!(taylor.coeff(4), SeriesPoly::ratio(-2, 1));
    }

    #[test]
    fn trace_preservation_symbolic() {
        for (n, omega) in [(3, 2), (5, 3), (7, 4), (9, 2), (9, 5)] {
            assert!(
                trace_preservation_holds(n, omega).unwrap(),
                "(n, omega) = ({n}, {omega})"
            );
        }
    }

    #[test]
    fn c_omega_suppressed_beyond_omega() {
        // [p^0 .. p^omega] of c_omega all vanish: weight-omega errors
        // survive only at O(p^(omega+1))
        for (n, omega) in [(3usize, 2usize), (5, 3), (7, 4), (9, 5)] {
            let (num, a) = composite_coefficient_series(n, omega, omega).unwrap();
            let taylor = num.taylor_quotient(&a, omega + 1).unwrap();
            for i in 0..=omega {
                assert!(taylor.coeff(i).is_zero(), "n={n} w={omega} p^{i}");
            }
        }
    }

    #[test]
    fn logical_rate_zero_counts() {
        let counts = FailureCounts::new(3, 2);
        assert_eq!(logical_rate_from_channel(&counts, 3, 2, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn channel_route_agrees_with_branch_route_on_repetition() {
        // the composite-channel sum over D_k and the branch-conditioned
        // combination (1+G) P_I - G P_S are two routes to the same rate
        use crate::analytics::repetition::repetition_pec_rate;
        use crate::combinatorics::binomial_u128;
        for d in [3usize, 5, 7] {
            let omega = d.div_ceil(2);
            let mut counts = FailureCounts::new(d, omega);
            for k in omega..=d {
                counts.insert(CountEntry::new(
                    k,
                    binomial_u128(d, k) as f64,
                    CountProvenance::ExactEnumeration,
                ));
            }
            for p in [0.001, 0.01, 0.05, 0.1, 0.2] {
                let via_channel = logical_rate_from_channel(&counts, d, omega, p).unwrap();
                let via_branches = repetition_pec_rate(d, p).unwrap();
                assert!(
                    (via_channel - via_branches).abs() < 1e-12,
                    "d={d} p={p}: {via_channel} vs {via_branches}"
                );
            }
        }
    }

    #[test]
    fn logical_rate_leading_order_is_omega_plus_one() {
        use crate::combinatorics::binomial_u128;
        let (d, omega) = (5usize, 3usize);
        let mut counts = FailureCounts::new(d, omega);
        for k in omega..=d {
            counts.insert(CountEntry::new(
                k,
                binomial_u128(d, k) as f64,
                CountProvenance::ExactEnumeration,
            ));
        }
        let r1 = logical_rate_from_channel(&counts, d, omega, 1e-3).unwrap();
        let r2 = logical_rate_from_channel(&counts, d, omega, 2e-3).unwrap();
        let order = (r2.abs() / r1.abs()).log2();
        assert!(
            (order - (omega + 1) as f64).abs() < 0.05,
            "observed order {order}"
        );
    }

    #[test]
    fn oracles_match_brute_force_over_error_branch_pairs() {
        // d=3 repetition ground truth: average over every (branch, error)
        // pair with exact probabilities and quasi-probability weights
        use crate::code::build_repetition_code;
        use crate::decoder::build_decoding_graph;
        use crate::estimator::decode_and_judge;
        use crate::pauli::PauliString;

        let code = build_repetition_code(3).unwrap();
        let graph = build_decoding_graph(&code).unwrap();
        let p = 0.07;
        let (n, omega) = (3usize, 2usize);
        let p0 = weight_probability(p, n, 0);
        let pw = weight_probability(p, n, omega);
        let a = p0 - binomial_f64(n, omega) * pw;

        let mut brute = 0.0;
        for (beta, insert_mask) in [
            (p0 / a, 0b000u128),
            (-pw / a, 0b011),
            (-pw / a, 0b101),
            (-pw / a, 0b110),
        ] {
            let insert = PauliString::x_string(3, insert_mask);
            for e in 0..8u128 {
                let pr = weight_probability(p, n, e.count_ones() as usize);
                let total = PauliString::x_string(3, e).compose(&insert);
                if decode_and_judge(&code, &graph, &total).unwrap() {
                    brute += beta * pr;
                }
            }
        }
        let via_branches = crate::analytics::repetition::repetition_pec_rate(3, p).unwrap();
        assert!((brute - via_branches).abs() < 1e-14, "{brute} vs {via_branches}");
    }

    #[test]
    fn logical_rate_rejects_gaps() {
        let mut counts = FailureCounts::new(5, 3);
        counts.insert(CountEntry::new(5, 1.0, CountProvenance::ExactEnumeration));
        assert!(matches!(
            logical_rate_from_channel(&counts, 5, 3, 0.1),
            Err(AnalyticsError::MissingCounts { k: 3 })
        ));
    }

    #[test]
    fn negativity_examples() {
        // N=3, omega=2, p=0.01: 0.9703 > 1/9
        assert!(negativity_condition(3, 2, 0.01).unwrap());
        assert!(!negativity_condition(3, 2, 0.999).unwrap());
    }
}
