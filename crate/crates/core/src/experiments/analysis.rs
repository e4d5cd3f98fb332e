use crate::error::{Error, Result};

use super::simulation::TimeSeriesRecord;

/// Fraction of a series, counted from its end, used by default for decay
/// fits; skips the initial transient.
pub const DEFAULT_DECAY_WINDOW: f64 = 0.6;

/// Ordinary least-squares slope through `(x, y)` points.
pub fn regression_slope(points: &[(f64, f64)]) -> Result<f64> {
    Ok(fit_line(points)?.0)
}

/// `(slope, intercept, r^2)`
fn fit_line(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if points.len() < 2 {
        return Err(Error::invalid("a regression needs at least two points"));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::invalid("regression points must be finite"));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if !(sxx > 0.0) {
        return Err(Error::invalid("regression abscissae are all equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 { (sxy * sxy / (sxx * syy)).min(1.0) } else { 1.0 };
    Ok((slope, intercept, r2))
}

/// Result of fitting `log(value) = intercept + slope * t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; `1` for an exactly constant series.
    pub r_squared: f64,
    pub points: usize,
}

/// Least-squares fit of `log(value)` against `t` over `(t, value)` samples.
pub fn log_linear_fit(samples: &[(f64, f64)]) -> Result<DecayFit> {
    if let Some(&(t, v)) = samples.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(Error::invalid(format!(
            "decay window holds a nonpositive value {v:e} at t = {t:e}"
        )));
    }
    let logs: Vec<(f64, f64)> = samples.iter().map(|&(t, v)| (t, v.ln())).collect();
    let (slope, intercept, r_squared) = fit_line(&logs)?;
    Ok(DecayFit {
        slope,
        intercept,
        r_squared,
        points: samples.len(),
    })
}

/// Exponential decay fit of a named column over the trailing `window`
/// fraction of the series.
pub fn decay_rate(series: &[TimeSeriesRecord], column: &str, window: f64) -> Result<DecayFit> {
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::invalid(format!("decay window must lie in (0, 1], got {window}")));
    }
    let take = ((series.len() as f64) * window).ceil() as usize;
    let samples = series[series.len() - take..]
        .iter()
        .map(|r| {
            r.column(column)
                .map(|v| (r.t, v))
                .ok_or_else(|| Error::invalid(format!("column '{column}' is not available")))
        })
        .collect::<Result<Vec<_>>>()?;
    log_linear_fit(&samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_line() {
        let pts: Vec<(f64, f64)> = (0..7).map(|i| (i as f64 * 0.3, 2.0 * i as f64 * 0.3 + 1.0)).collect();
        assert!((regression_slope(&pts).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn two_points_give_the_secant() {
        let s = regression_slope(&[(1.0, 3.0), (4.0, -3.0)]).unwrap();
        assert!((s + 2.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_regressions_rejected() {
        assert!(regression_slope(&[(1.0, 2.0)]).is_err());
        assert!(regression_slope(&[(1.0, 2.0), (1.0, 3.0)]).is_err());
        assert!(regression_slope(&[(1.0, f64::NAN), (2.0, 3.0)]).is_err());
    }

    #[test]
    fn power_law_rate() {
        let pts: Vec<(f64, f64)> = [4e-6, 2e-6, 1e-6, 5e-7]
            .iter()
            .map(|t: &f64| (t.ln(), (t * t).ln()))
            .collect();
        assert!((regression_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_is_fitted_exactly() {
        let samples: Vec<(f64, f64)> = (0..50).map(|i| {
            let t = i as f64 * 0.02;
            (t, (-3.0 * t).exp())
        }).collect();
        let fit = log_linear_fit(&samples).unwrap();
        assert!((fit.slope + 3.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-10);
    }

    #[test]
    fn constant_series_has_zero_slope() {
        let samples: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 0.7)).collect();
        let fit = log_linear_fit(&samples).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn nonpositive_window_rejected() {
        assert!(log_linear_fit(&[(0.0, 1.0), (1.0, 0.0)]).is_err());
    }
}
