//! Log-log slope fits and threshold estimation from curve intersections.

use super::AnalyticsError;

/// Least-squares line through (ln p, ln |value|).
#[derive(Debug, Clone)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_sum_squares: f64,
    pub points: usize,
}

impl SlopeFit {
    /// Fitted |value| at a given p.
    pub fn eval(&self, p: f64) -> f64 {
        (self.intercept + self.slope * p.ln()).exp()
    }
}

/// Fit a power law through (p, value) points; values enter as |value| and
/// must be nonzero (a PEC rate can be legitimately negative).
pub fn fit_slope(points: &[(f64, f64)]) -> Result<SlopeFit, AnalyticsError> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(p, v)| p > 0.0 && v != 0.0 && v.is_finite())
        .map(|&(p, v)| (p.ln(), v.abs().ln()))
        .collect();
    if usable.len() < 2 {
        return Err(AnalyticsError::UnderdeterminedFit {
            points: usable.len(),
            needed: 2,
        });
    }
    let m = usable.len() as f64;
    let x_bar = usable.iter().map(|&(x, _)| x).sum::<f64>() / m;
    let y_bar = usable.iter().map(|&(_, y)| y).sum::<f64>() / m;
    let sxx: f64 = usable.iter().map(|&(x, _)| (x - x_bar).powi(2)).sum();
    if sxx == 0.0 {
        return Err(AnalyticsError::UnderdeterminedFit {
            points: usable.len(),
            needed: 2,
        });
    }
    let sxy: f64 = usable
        .iter()
        .map(|&(x, y)| (x - x_bar) * (y - y_bar))
        .sum();
    let slope = sxy / sxx;
    let intercept = y_bar - slope * x_bar;
    let rss = usable
        .iter()
        .map(|&(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(SlopeFit {
        slope,
        intercept,
        residual_sum_squares: rss,
        points: usable.len(),
    })
}

/// Crossing point of two fitted log-log lines.
#[derive(Debug, Clone)]
pub struct ThresholdFit {
    /// Physical error rate at the intersection.
    pub p_star: f64,
    /// Logical error rate at the intersection.
    pub rate_star: f64,
    pub fit_lo: SlopeFit,
    pub fit_hi: SlopeFit,
}

/// Threshold estimate from the curves of the two largest distances: the
/// intersection of their fitted lines. Near-parallel fits are degenerate.
pub fn estimate_threshold(
    curve_lo: &[(f64, f64)],
    curve_hi: &[(f64, f64)],
) -> Result<ThresholdFit, AnalyticsError> {
    let fit_lo = fit_slope(curve_lo)?;
    let fit_hi = fit_slope(curve_hi)?;
    let dslope = fit_hi.slope - fit_lo.slope;
    if dslope.abs() < 1e-9 {
        return Err(AnalyticsError::DegenerateThreshold {
            slope_lo: fit_lo.slope,
            slope_hi: fit_hi.slope,
        });
    }
    let ln_p = (fit_lo.intercept - fit_hi.intercept) / dslope;
    let p_star = ln_p.exp();
    Ok(ThresholdFit {
        p_star,
        rate_star: fit_lo.eval(p_star),
        fit_lo,
        fit_hi,
    })
}

/// The crossover scale p_th* = (D_w / D^PEC_{w+1}) (P_th^PEC / P_th):
/// the unmitigated threshold exceeds the PEC threshold exactly when it
/// exceeds this value.
pub fn threshold_crossover_scale(
    d_unmitigated: f64,
    d_pec: f64,
    rate_th: f64,
    rate_th_pec: f64,
) -> f64 {
    (d_unmitigated / d_pec) * (rate_th_pec / rate_th)
}
