use serde::{Deserialize, Serialize};

use super::deficiency::DeficiencyHistogram;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub k: usize,
    /// Abscissa `k n`.
    pub kn: f64,
    pub p_hat: f64,
    /// `-ln p_hat`.
    pub neg_log_p: f64,
}

/// Least-squares fit of `-ln P(rank <= n - k) = c k n + b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub points: Vec<FitPoint>,
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
    /// `(-ln p_hat(2)) / (-ln p_hat(1))` when both are available.
    pub ratio_k2_k1: Option<f64>,
    pub slope_positive: bool,
    /// Values of `k` left out because no trial reached them.
    pub zero_count_k: Vec<usize>,
}

/// Fits the points of one histogram for `k = 1..=k_max`. Values of `k` with
/// zero counts are reported in `zero_count_k` and not extrapolated.
pub fn decay_shape_fit(hist: &DeficiencyHistogram, k_max: usize) -> Result<FitReport> {
    let mut points = Vec::new();
    let mut zero = Vec::new();
    for k in 1..=k_max.min(hist.n) {
        let c = hist.at_least(k);
        if c == 0 {
            zero.push(k);
        } else {
            let p = c as f64 / hist.trials as f64;
            points.push(FitPoint { k, kn: (k * hist.n) as f64, p_hat: p, neg_log_p: -p.ln() });
        }
    }
    let mut rep = fit_points(points)?;
    rep.zero_count_k = zero;
    Ok(rep)
}

/// Least squares with intercept on arbitrary `(k, kn, p_hat)` points.
pub fn fit_points(points: Vec<FitPoint>) -> Result<FitReport> {
    if points.len() < 2 {
        return Err(Error::InsufficientData(format!("need at least two k values with nonzero counts, got {}", points.len())));
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.kn).sum::<f64>() / m;
    let my = points.iter().map(|p| p.neg_log_p).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.kn - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all points share one abscissa".into()));
    }
    let sxy: f64 = points.iter().map(|p| (p.kn - mx) * (p.neg_log_p - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = points.iter().map(|p| p.neg_log_p - (slope * p.kn + intercept)).collect();
    let at = |k: usize| points.iter().find(|p| p.k == k).map(|p| p.neg_log_p);
    let ratio_k2_k1 = match (at(1), at(2)) {
        (Some(a), Some(b)) if a > 0.0 => Some(b / a),
        _ => None,
    };
    Ok(FitReport { slope_positive: slope > 0.0, points, slope, intercept, residuals, ratio_k2_k1, zero_count_k: Vec::new() })
}
