//! Semi-analytic surface-code predictions: the truncated identity-branch
//! series over enumerated failure counts, and the least-squares superbranch
//! coefficients (s1, s2, s3).

use super::counts::FailureCounts;
use super::AnalyticsError;
use crate::noise::weight_probability;

/// Truncated identity-branch rate sum_{k=omega}^{omega+3} D_k p^k (1-p)^(N-k).
///
/// Counts must be present for each k in the truncation window (exact or
/// Monte Carlo). The truncation error is bounded by the full weight of the
/// first omitted order, C(N, omega+4) P_{omega+4}.
pub fn surface_identity_series(
    counts: &FailureCounts,
    n: usize,
    p: f64,
) -> Result<f64, AnalyticsError> {
    let omega = counts.omega;
    let k_hi = (omega + 3).min(n);
    let mut rate = 0.0;
    for k in omega..=k_hi {
        let d = counts
            .get(k)
            .ok_or(AnalyticsError::MissingCounts { k })?
            .failures();
        rate += d * weight_probability(p, n, k);
    }
    Ok(rate)
}

/// Least-squares superbranch fit with f0 held fixed.
#[derive(Debug, Clone)]
pub struct SuperbranchFit {
    pub f0: f64,
    pub s: [f64; 3],
    pub residual_sum_squares: f64,
    pub points: usize,
}

impl SuperbranchFit {
    /// Evaluate f0 (1-p)^N + sum_i s_i p^i (1-p)^(N-i).
    pub fn eval(&self, n: usize, p: f64) -> f64 {
        let mut v = self.f0 * weight_probability(p, n, 0);
        for (i, s) in self.s.iter().enumerate() {
            v += s * weight_probability(p, n, i + 1);
        }
        v
    }
}

/// Fit (s1, s2, s3) minimizing the residual of
/// f0 (1-p)^N + s1 p (1-p)^(N-1) + s2 p^2 (1-p)^(N-2) + s3 p^3 (1-p)^(N-3)
/// against sampled superbranch rates.
pub fn surface_superbranch_fit(
    samples: &[(f64, f64)],
    f0: f64,
    n: usize,
) -> Result<SuperbranchFit, AnalyticsError> {
    if samples.len() < 4 {
        return Err(AnalyticsError::UnderdeterminedFit {
            points: samples.len(),
            needed: 4,
        });
    }
    // normal equations for the 3-parameter linear model
    let mut m = [[0.0f64; 3]; 3];
    let mut b = [0.0f64; 3];
    let basis = |p: f64, i: usize| weight_probability(p, n, i + 1);
    for &(p, y) in samples {
        let target = y - f0 * weight_probability(p, n, 0);
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell += basis(p, i) * basis(p, j);
            }
            b[i] += basis(p, i) * target;
        }
    }
    let s = solve_3x3(m, b).ok_or(AnalyticsError::UnderdeterminedFit {
        points: samples.len(),
        needed: 4,
    })?;
    let fit = SuperbranchFit {
        f0,
        s,
        residual_sum_squares: 0.0,
        points: samples.len(),
    };
    let rss = samples
        .iter()
        .map(|&(p, y)| (y - fit.eval(n, p)).powi(2))
        .sum();
    Ok(SuperbranchFit {
        residual_sum_squares: rss,
        ..fit
    })
}

#[allow(clippy::needless_range_loop)] // index form mirrors the elimination
fn solve_3x3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let scale = m
        .iter()
        .flatten()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &r| m[a][col].abs().total_cmp(&m[r][col].abs()))?;
        if m[pivot][col].abs() < 1e-10 * scale {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..3 {
            let f = m[row][col] / m[col][col];
            for c in col..3 {
                m[row][c] -= f * m[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0f64; 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for c in (row + 1)..3 {
            acc -= m[row][c] * x[c];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::counts::{CountEntry, CountProvenance};

    #[test]
    fn identity_series_basics() {
        let mut counts = FailureCounts::new(9, 2);
        for (k, d) in [(2, 6.0), (3, 50.0), (4, 200.0), (5, 100.0)] {
            counts.insert(CountEntry::new(k, d, CountProvenance::ExactEnumeration));
        }
        assert_eq!(surface_identity_series(&counts, 9, 0.0).unwrap(), 0.0);
        let p = 0.03f64;
        let by_hand: f64 = [(2usize, 6.0), (3, 50.0), (4, 200.0), (5, 100.0)]
            .iter()
            .map(|&(k, d)| d * p.powi(k as i32) * (1.0 - p).powi(9 - k as i32))
            .sum();
        assert!((surface_identity_series(&counts, 9, p).unwrap() - by_hand).abs() < 1e-15);

        let sparse = FailureCounts::new(9, 2);
        assert!(surface_identity_series(&sparse, 9, 0.01).is_err());
    }

    #[test]
    fn fit_recovers_exact_model() {
        let n = 9;
        let f0 = 0.17;
        let truth = [4.4, 35.0, -280.0];
        let model = SuperbranchFit {
            f0,
            s: truth,
            residual_sum_squares: 0.0,
            points: 0,
        };
        let samples: Vec<(f64, f64)> = (1..=8)
            .map(|i| {
                let p = 0.005 * i as f64;
                (p, model.eval(n, p))
            })
            .collect();
        let fit = surface_superbranch_fit(&samples, f0, n).unwrap();
        for (i, (&got, &want)) in fit.s.iter().zip(truth.iter()).enumerate() {
            assert!(
                (got - want).abs() < 1e-6 * want.abs().max(1.0),
                "s{} = {got} vs {want}",
                i + 1
            );
        }
        assert!(fit.residual_sum_squares < 1e-12);
    }

    #[test]
    fn fit_requires_enough_points() {
        let samples = vec![(0.01, 0.1), (0.02, 0.2), (0.03, 0.3)];
        assert!(matches!(
            surface_superbranch_fit(&samples, 0.1, 9),
            Err(AnalyticsError::UnderdeterminedFit { .. })
        ));
    }

    #[test]
    fn degenerate_design_matrix_is_rejected() {
        // all samples at the same p: the three basis functions are linearly
        // dependent on one point
        let samples = vec![(0.02, 0.1), (0.02, 0.1), (0.02, 0.1), (0.02, 0.1)];
        assert!(surface_superbranch_fit(&samples, 0.0, 9).is_err());
    }
}
