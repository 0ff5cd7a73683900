//! Scaling points and the log-log least-squares fit shared by every estimator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One `(scale, fluctuation)` pair of a power-law scaling curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub scale: f64,
    pub fluctuation: f64,
}

impl ScalingPoint {
    pub fn new(scale: f64, fluctuation: f64) -> Self {
        Self { scale, fluctuation }
    }
}

/// Result of an ordinary least-squares line fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// OLS of `y` on `x`. Requires at least two points and non-constant `x`.
pub fn ols(x: &[f64], y: &[f64]) -> Result<LineFit> {
    assert_eq!(x.len(), y.len(), "ols: length mismatch");
    let n = x.len();
    if n < 2 {
        return Err(Error::RegressionUndefined(format!("{n} point(s)")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= 0.0 {
        return Err(Error::RegressionUndefined("regressor has zero variance".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    // a perfectly flat response is fitted exactly
    let r2 = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    Ok(LineFit { slope, intercept, r2 })
}

/// OLS of `ln(fluctuation)` on `ln(scale)`.
pub fn fit_power_law(points: &[ScalingPoint]) -> Result<LineFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientPoints(points.len()));
    }
    fit_log_log(points)
}

/// Log-log fit that also accepts two points; variogram-type estimators use
/// exactly the scales {1, 2}.
pub(crate) fn fit_log_log(points: &[ScalingPoint]) -> Result<LineFit> {
    if points.len() < 2 {
        return Err(Error::InsufficientPoints(points.len()));
    }
    if let Some(p) = points.iter().find(|p| p.fluctuation.is_nan() || p.fluctuation <= 0.0) {
        return Err(Error::DegenerateFit(format!(
            "fluctuation {} at scale {}",
            p.fluctuation, p.scale
        )));
    }
    let x: Vec<f64> = points.iter().map(|p| p.scale.ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.fluctuation.ln()).collect();
    ols(&x, &y)
}

/// Returns zero when `value` is indistinguishable from rounding noise
/// relative to `reference` (a mean square of the data it was computed from).
pub(crate) fn snap_negligible(value: f64, reference: f64) -> f64 {
    if value <= 1e-20 * reference {
        0.0
    } else {
        value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // textbook closed form, kept independent of `ols`
    fn textbook(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
        let n = x.len() as f64;
        let sx: f64 = x.iter().sum();
        let sy: f64 = y.iter().sum();
        let sxx: f64 = x.iter().map(|v| v * v).sum();
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let intercept = (sy - slope * sx) / n;
        let ybar = sy / n;
        let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
        let ss_tot: f64 = y.iter().map(|b| (b - ybar).powi(2)).sum();
        (slope, intercept, 1.0 - ss_res / ss_tot)
    }

    #[test]
    fn exact_power_law() {
        let pts: Vec<_> = [5.0, 10.0, 20.0]
            .iter()
            .map(|&s| ScalingPoint::new(s, 3.0 * s * s))
            .collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_fluctuation_has_zero_slope() {
        let pts: Vec<_> = [5.0, 10.0, 20.0].iter().map(|&s| ScalingPoint::new(s, 0.4)).collect();
        let fit = fit_power_law(&pts).unwrap();
        assert_eq!(fit.slope, 0.0);
    }

    #[test]
    fn noisy_matches_textbook_oracle() {
        // deterministic multiplicative jitter
        let scales: Vec<f64> = (1..=15).map(|i| 4.0 + 3.0 * i as f64).collect();
        let pts: Vec<_> = scales
            .iter()
            .enumerate()
            .map(|(i, &s)| ScalingPoint::new(s, 0.2 * s.powf(1.3) * (1.0 + 0.15 * ((i * 7 % 5) as f64 - 2.0))))
            .collect();
        let fit = fit_power_law(&pts).unwrap();
        let lx: Vec<f64> = pts.iter().map(|p| p.scale.ln()).collect();
        let ly: Vec<f64> = pts.iter().map(|p| p.fluctuation.ln()).collect();
        let (s, i, r2) = textbook(&lx, &ly);
        assert!((fit.slope - s).abs() < 1e-10);
        assert!((fit.intercept - i).abs() < 1e-10);
        assert!((fit.r2 - r2).abs() < 1e-10);
    }

    #[test]
    fn errors() {
        let two = [ScalingPoint::new(1.0, 1.0), ScalingPoint::new(2.0, 2.0)];
        assert_eq!(fit_power_law(&two), Err(Error::InsufficientPoints(2)));
        let zero = [
            ScalingPoint::new(1.0, 1.0),
            ScalingPoint::new(2.0, 0.0),
            ScalingPoint::new(3.0, 2.0),
        ];
        assert!(matches!(fit_power_law(&zero), Err(Error::DegenerateFit(_))));
        assert!(matches!(
            ols(&[1.0, 1.0], &[2.0, 3.0]),
            Err(Error::RegressionUndefined(_))
        ));
    }
}
