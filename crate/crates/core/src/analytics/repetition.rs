//! Closed-form branch-conditioned logical error rates for the repetition
//! code, as floats and as exact polynomials.
//!
//! Identity branch: P_I(p) = sum_{k=omega}^{N} C(N,k) p^k (1-p)^(N-k)
//! (every pattern of weight >= omega fails). Superbranch: with u surviving
//! insertions (each survives with probability 1-p because an overlapping
//! flip cancels it) and r extra flips,
//! P_S(p) = sum_u C(w,u) (1-p)^u p^(w-u) sum_{r >= w-u} C(N-w,r) p^r (1-p)^(N-w-r).

use num_rational::BigRational;

use super::series::SeriesPoly;
use super::AnalyticsError;
use crate::combinatorics::{binomial_big, binomial_f64};
use crate::noise::weight_probability;
use crate::pec;

fn check_d(d: usize) -> Result<(usize, usize), AnalyticsError> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(AnalyticsError::InvalidDistance(d));
    }
    Ok((d, d.div_ceil(2)))
}

/// Unmitigated logical error rate: the binomial tail from omega.
pub fn repetition_identity_rate(d: usize, p: f64) -> Result<f64, AnalyticsError> {
    let (n, omega) = check_d(d)?;
    Ok((omega..=n)
        .map(|k| binomial_f64(n, k) * weight_probability(p, n, k))
        .sum())
}

/// Superbranch logical error rate (see module docs for the convention).
pub fn repetition_superbranch_rate(d: usize, p: f64) -> Result<f64, AnalyticsError> {
    let (n, omega) = check_d(d)?;
    let mut total = 0.0;
    for u in 0..=omega {
        let overlap = binomial_f64(omega, u) * weight_probability(1.0 - p, omega, u);
        let extras: f64 = (omega.saturating_sub(u)..=n - omega)
            .map(|r| binomial_f64(n - omega, r) * weight_probability(p, n - omega, r))
            .sum();
        total += overlap * extras;
    }
    Ok(total)
}

/// Exact polynomial form of the identity rate.
pub fn repetition_identity_series(d: usize) -> Result<SeriesPoly, AnalyticsError> {
    let (n, omega) = check_d(d)?;
    let mut total = SeriesPoly::zero();
    for k in omega..=n {
        let c = BigRational::from(binomial_big(n, k));
        total = total.add(&SeriesPoly::weight_probability(n, k).scale(&c));
    }
    Ok(total)
}

/// Exact polynomial form of the superbranch rate.
pub fn repetition_superbranch_series(d: usize) -> Result<SeriesPoly, AnalyticsError> {
    let (n, omega) = check_d(d)?;
    let mut total = SeriesPoly::zero();
    for u in 0..=omega {
        // C(w,u) (1-p)^u p^(w-u)
        let overlap = SeriesPoly::one_minus_p_pow(u)
            .mul(&SeriesPoly::monomial(BigRational::from(binomial_big(omega, u)), omega - u));
        let mut extras = SeriesPoly::zero();
        for r in omega.saturating_sub(u)..=n - omega {
            let c = BigRational::from(binomial_big(n - omega, r));
            extras = extras.add(
                &SeriesPoly::monomial(c, r).mul(&SeriesPoly::one_minus_p_pow(n - omega - r)),
            );
        }
        total = total.add(&overlap.mul(&extras));
    }
    Ok(total)
}

/// Exact error-mitigated rate (1+G) P_I - G P_S at one p.
pub fn repetition_pec_rate(d: usize, p: f64) -> Result<f64, AnalyticsError> {
    let (n, omega) = check_d(d)?;
    let pole = pec::pole(n, omega).expect("omega in range");
    if p >= pole {
        return Err(AnalyticsError::PoleViolation { p, pole });
    }
    let g = binomial_f64(n, omega) * weight_probability(p, n, omega)
        / (weight_probability(p, n, 0) - binomial_f64(n, omega) * weight_probability(p, n, omega));
    Ok((1.0 + g) * repetition_identity_rate(d, p)? - g * repetition_superbranch_rate(d, p)?)
}
