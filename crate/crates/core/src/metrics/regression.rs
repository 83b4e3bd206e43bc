use serde::{Deserialize, Serialize};

use super::MetricsError;

/// `Δ = alpha_slope · natural + beta_intercept`, fitted by least squares.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapPredictor {
    pub alpha_slope: f64,
    pub beta_intercept: f64,
    pub r_squared: f64,
}

impl GapPredictor {
    pub fn predict(&self, natural: f64) -> f64 {
        self.alpha_slope * natural + self.beta_intercept
    }
}

/// Ordinary least squares on `(natural_acc, delta)` points.
pub fn fit_gap_predictor(points: &[(f64, f64)]) -> Result<GapPredictor, MetricsError> {
    if points.len() < 3 {
        return Err(MetricsError::DegenerateDesign(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(MetricsError::DegenerateDesign("non-finite point".into()));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(MetricsError::DegenerateDesign(
            "all natural accuracies are equal".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = points.iter().map(|p| (p.1 - (slope * p.0 + intercept)).powi(2)).sum();
    // a flat response is fitted perfectly by a zero slope
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(GapPredictor {
        alpha_slope: slope,
        beta_intercept: intercept,
        r_squared,
    })
}
