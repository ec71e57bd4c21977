//! Ordinary least squares on small dense designs.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Least-squares coefficients for `y ≈ Σ_k β_k · columns[k]`.
///
/// Columns are centred and scaled before the SVD solve, so nearly collinear
/// regressors such as `ln n` and `ln ln 2n` stay well conditioned. An
/// intercept is always fitted and returned first.
pub fn least_squares(columns: &[&[f64]], y: &[f64]) -> Result<Vec<f64>> {
    let rows = y.len();
    if columns.iter().any(|c| c.len() != rows) {
        return Err(Error::InsufficientData("regressor length mismatch".into()));
    }
    if rows <= columns.len() {
        return Err(Error::InsufficientData(format!(
            "{rows} observations for {} regressors plus intercept",
            columns.len()
        )));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / rows as f64;
    let y_mean = mean(y);
    let stats: Vec<(f64, f64)> = columns
        .iter()
        .map(|c| {
            let m = mean(c);
            let s = (c.iter().map(|v| (v - m).powi(2)).sum::<f64>() / rows as f64).sqrt();
            (m, if s > 0.0 { s } else { 1.0 })
        })
        .collect();
    let design = DMatrix::from_fn(rows, columns.len(), |i, k| {
        (columns[k][i] - stats[k].0) / stats[k].1
    });
    let rhs = DVector::from_iterator(rows, y.iter().map(|v| v - y_mean));
    let solved = design
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::InsufficientData(e.to_string()))?;
    let slopes: Vec<f64> = solved.iter().zip(&stats).map(|(b, (_, s))| b / s).collect();
    let intercept = y_mean - slopes.iter().zip(&stats).map(|(b, (m, _))| b * m).sum::<f64>();
    Ok(std::iter::once(intercept).chain(slopes).collect())
}

/// Slope of the least-squares line through `(ln x, ln y)`; all values must be positive.
pub fn log_log_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.iter().any(|(x, y)| !(*x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::InsufficientData("log-log fit needs positive finite values".into()));
    }
    let lx: Vec<f64> = points.iter().map(|(x, _)| x.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|(_, y)| y.ln()).collect();
    Ok(least_squares(&[&lx], &ly)?[1])
}
