//! Discrepancy and smoothness of estimated ROC curves, and bias summaries of
//! AUC estimates across replications. All values are unscaled.

use crate::error::{Error, Result};

/// Per-curve discrepancy against the truth plus smoothness.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CurveSummary {
    pub mse: f64,
    pub ks: f64,
    pub sm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AucSummary {
    pub bias: f64,
    /// Mean relative absolute error.
    pub rb: f64,
    pub mse: f64,
}

fn check_aligned(est: &[f64], truth: &[f64]) -> Result<()> {
    if est.len() != truth.len() {
        return Err(Error::LengthMismatch {
            what: "curve and truth grids",
            left: est.len(),
            right: truth.len(),
        });
    }
    if est.is_empty() {
        return Err(Error::Empty("curve"));
    }
    Ok(())
}

/// Mean squared difference over the grid.
pub fn curve_mse(est: &[f64], truth: &[f64]) -> Result<f64> {
    check_aligned(est, truth)?;
    let sum: f64 = est.iter().zip(truth).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(sum / est.len() as f64)
}

/// Largest absolute difference over the grid.
pub fn curve_ks(est: &[f64], truth: &[f64]) -> Result<f64> {
    check_aligned(est, truth)?;
    Ok(est.iter().zip(truth).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// `(1/d²) · mean of squared successive differences`, a discrete proxy for
/// `∫ ROC'(p)² dp` on a grid with spacing `d`.
pub fn curve_sm(values: &[f64], spacing: f64) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::TooFewCases {
            needed: 2,
            have: values.len(),
        });
    }
    if spacing.is_nan() || spacing <= 0.0 {
        return Err(Error::Config(format!("grid spacing must be positive, got {spacing}")));
    }
    let sum: f64 = values.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum();
    Ok(sum / (values.len() - 1) as f64 / (spacing * spacing))
}

pub fn auc_summary(estimates: &[f64], auc_true: f64) -> Result<AucSummary> {
    if estimates.is_empty() {
        return Err(Error::Empty("AUC estimates"));
    }
    if auc_true.is_nan() || auc_true <= 0.0 {
        return Err(Error::Config(format!("true AUC must be positive, got {auc_true}")));
    }
    let n = estimates.len() as f64;
    let (mut err, mut abs, mut sq) = (0.0, 0.0, 0.0);
    for &a in estimates {
        let e = a - auc_true;
        err += e;
        abs += e.abs();
        sq += e * e;
    }
    Ok(AucSummary {
        bias: err / n,
        rb: abs / n / auc_true,
        mse: sq / n,
    })
}
