use serde::{Deserialize, Serialize};

use crate::StatsError;

/// Straight-line least-squares fit `y = intercept + slope x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub slope_se: f64,
    pub r2: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit, StatsError> {
    weighted_linear_fit(x, y, &vec![1.0; x.len()])
}

/// Weighted least squares with weights `w_i` (inverse variances).
///
/// With unit weights the slope error uses the residual variance; otherwise the
/// weights are treated as exact inverse variances.
pub fn weighted_linear_fit(x: &[f64], y: &[f64], w: &[f64]) -> Result<LinearFit, StatsError> {
    assert_eq!(x.len(), y.len());
    assert_eq!(x.len(), w.len());
    if x.len() < 2 {
        return Err(StatsError::TooFewSamples { needed: 2, got: x.len() });
    }
    let sw: f64 = w.iter().sum();
    let xm = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let ym = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(w).map(|(a, b)| b * (a - xm).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(StatsError::Degenerate);
    }
    let sxy: f64 = x.iter().zip(y).zip(w).map(|((a, c), b)| b * (a - xm) * (c - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let ss_res: f64 = x.iter().zip(y).zip(w).map(|((a, c), b)| b * (c - intercept - slope * a).powi(2)).sum();
    let ss_tot: f64 = y.iter().zip(w).map(|(c, b)| b * (c - ym).powi(2)).sum();
    let unit = w.iter().all(|&v| v == 1.0);
    let slope_se = if unit {
        if x.len() > 2 {
            (ss_res / (x.len() as f64 - 2.0) / sxx).sqrt()
        } else {
            0.0
        }
    } else {
        (1.0 / sxx).sqrt()
    };
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(LinearFit { slope, intercept, slope_se, r2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [3.0, 5.0, 7.0, 9.0];
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-12);
        assert!(f.slope_se < 1e-12 && (f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_x() {
        assert_eq!(linear_fit(&[1.0, 1.0], &[0.0, 1.0]), Err(StatsError::Degenerate));
    }

    #[test]
    fn slope_error_matches_textbook() {
        // Residuals +-1 alternating: s^2 = 4/(4-2) = 2, sxx = 5.
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, -1.0, 1.0, -1.0];
        let f = linear_fit(&x, &y).unwrap();
        let resid: f64 = x.iter().zip(&y).map(|(a, b)| (b - f.intercept - f.slope * a).powi(2)).sum();
        assert!((f.slope_se - (resid / 2.0 / 5.0).sqrt()).abs() < 1e-12);
    }
}
