use mc_stats::weighted_linear_fit;
use serde::{Deserialize, Serialize};

use crate::cluster::cluster_counts;
use crate::estimate::{ConnectivityCurve, Estimate, Quantity};
use crate::PercError;

/// Which connection probability the decay rate is read from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XiTarget {
    /// `P(0 <-> n e_1)`, the defining quantity; carries an extra `n^{-1/2}` prefactor in d = 2.
    PointToPoint,
    /// `P(0 <-> P(n))`, same rate with a purely exponential leading term.
    PointToPlane,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiEstimate {
    pub p: f64,
    pub target: XiTarget,
    pub samples: u64,
    pub n_window: (usize, usize),
    /// Fitted decay rate, `1 / xi`.
    pub slope: f64,
    /// Fitted `log` of the prefactor.
    pub log_prefactor: f64,
    pub xi: f64,
    pub stderr: f64,
    pub points: Vec<Estimate>,
}

impl XiEstimate {
    /// Symmetric 95% interval half-width for `xi`.
    pub fn ci(&self) -> f64 {
        mc_stats::Z95 * self.stderr
    }
}

/// Window `[n0, n1]`: `n0` is the first `n` with `p_hat < 1/2`; `n1` the last `n`
/// after it before the estimates become rare (fewer than 10 hits) or drop below `1e-4`.
pub fn default_window(curve: &ConnectivityCurve) -> Option<(usize, usize)> {
    let start = curve.points.iter().position(|e| e.estimate < 0.5)?;
    let mut end = start;
    for (i, e) in curve.points.iter().enumerate().skip(start) {
        if e.rare || e.estimate <= 1e-4 {
            break;
        }
        end = i;
    }
    Some((curve.points[start].n, curve.points[end].n))
}

/// Weighted least squares of `-log p_hat(n)` on `n` over the window.
pub fn xi_from_curve(curve: &ConnectivityCurve, window: Option<(usize, usize)>) -> Result<XiEstimate, PercError> {
    let target = match curve.quantity {
        Quantity::PointToPoint => XiTarget::PointToPoint,
        Quantity::PointToPlane => XiTarget::PointToPlane,
        q => return Err(PercError::InvalidParameter(format!("cannot read xi from {q:?}"))),
    };
    let (lo, hi) = window
        .or_else(|| default_window(curve))
        .ok_or_else(|| PercError::Estimation("no n with p_hat < 1/2".into()))?;
    let pts: Vec<&Estimate> = curve.points.iter().filter(|e| e.n >= lo && e.n <= hi).collect();
    if pts.len() < 3 {
        return Err(PercError::Estimation(format!(
            "window [{lo}, {hi}] has {} usable points; raise samples or n_max",
            pts.len()
        )));
    }
    if let Some(e) = pts.iter().find(|e| e.estimate == 0.0) {
        return Err(PercError::Estimation(format!("p_hat({}) = 0 inside the window", e.n)));
    }
    let x: Vec<f64> = pts.iter().map(|e| e.n as f64).collect();
    let y: Vec<f64> = pts.iter().map(|e| -e.estimate.ln()).collect();
    // Delta method: Var(log p_hat) = (1 - p) / (N p).
    let w: Vec<f64> = pts.iter().map(|e| e.samples as f64 * e.estimate / (1.0 - e.estimate).max(1e-12)).collect();
    let fit = weighted_linear_fit(&x, &y, &w).map_err(|e| PercError::Estimation(e.to_string()))?;
    if fit.slope <= 0.0 {
        return Err(PercError::Estimation(format!("non-positive decay slope {}", fit.slope)));
    }
    Ok(XiEstimate {
        p: curve.p,
        target,
        samples: pts[0].samples,
        n_window: (lo, hi),
        slope: fit.slope,
        log_prefactor: -fit.intercept,
        xi: 1.0 / fit.slope,
        stderr: fit.slope_se / (fit.slope * fit.slope),
        points: curve.points.clone(),
    })
}

/// Estimates the correlation length at a subcritical `p` from one batch of cluster samples.
pub fn estimate_xi(p: f64, n_max: usize, samples: u64, seed: u64, target: XiTarget) -> Result<XiEstimate, PercError> {
    if !(p > 0.0 && p < 0.5) {
        return Err(PercError::InvalidParameter(format!("xi needs 0 < p < 1/2, got {p}")));
    }
    let counts = cluster_counts(p, n_max, samples, seed)?;
    let quantity = match target {
        XiTarget::PointToPoint => Quantity::PointToPoint,
        XiTarget::PointToPlane => Quantity::PointToPlane,
    };
    xi_from_curve(&counts.curve(quantity), None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(rate: f64, k: f64, samples: u64) -> ConnectivityCurve {
        let points = (1..=12)
            .map(|n| {
                let p = (k * (-rate * n as f64).exp()).min(1.0);
                Estimate::proportion(n, (p * samples as f64).round() as u64, samples)
            })
            .collect();
        ConnectivityCurve { quantity: Quantity::PointToPlane, p: 0.3, points }
    }

    #[test]
    fn recovers_exact_exponential() {
        let xi = xi_from_curve(&synthetic(0.8, 0.9, 1 << 40), None).unwrap();
        assert!((xi.xi - 1.25).abs() < 1e-3, "{xi:?}");
        assert!((xi.log_prefactor - 0.9f64.ln()).abs() < 1e-2);
    }

    #[test]
    fn window_skips_rare_tail() {
        let c = synthetic(1.0, 1.0, 100_000);
        let (lo, hi) = default_window(&c).unwrap();
        assert_eq!(lo, 1);
        // e^{-n} * 1e5 >= 10 up to n = 9.
        assert_eq!(hi, 9);
    }

    #[test]
    fn rejects_supercritical_p() {
        assert!(estimate_xi(0.6, 10, 100, 0, XiTarget::PointToPlane).is_err());
    }
}
