//! Piecewise-constant tensor-grid interpolation from `m` point samples, its
//! sup-norm error, and log-log rate fitting.

use serde::{Deserialize, Serialize};

use crate::analysis::{sample, GridSpec, Placement};
use crate::corpus::CorpusFn;
use crate::error::{Error, Result};
use crate::extended::Extended;
use crate::growth::{ell_star, GammaValue};
use crate::regression::least_squares;
use crate::spaces::{optimal_sampling_rate, SpaceParams};

const SNAP: f64 = 1e-9;

/// `⌊m^{1/d}⌋` computed exactly.
pub fn integer_root(m: u64, d: usize) -> u64 {
    let fits = |r: u64| (r as u128).checked_pow(d as u32).is_some_and(|v| v <= m as u128);
    let mut r = (m as f64).powf(1.0 / d as f64).floor() as u64;
    while r > 0 && !fits(r) {
        r -= 1;
    }
    while fits(r + 1) {
        r += 1;
    }
    r
}

/// Samples `f(i/n)` on the corner grid `{0, 1/n, …, 1}^d`, `n = ⌊m^{1/d}⌋ − 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PwConstModel {
    pub d: usize,
    pub n: usize,
    /// Corner values, axis 0 fastest.
    pub values: Vec<f64>,
}

impl PwConstModel {
    pub fn samples_used(&self) -> usize {
        self.values.len()
    }

    fn cell(&self, x: f64) -> usize {
        let t = x * self.n as f64;
        let r = t.round();
        let t = if (t - r).abs() < SNAP { r } else { t.floor() };
        t.clamp(0.0, self.n as f64) as usize
    }

    /// Value of the cell `i/n + [0, 1/n)^d` containing `x`. Points with
    /// `x_j = 1` fall in the cell with `i_j = n`, i.e. they get `f` at the corner.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut idx = 0;
        let mut stride = 1;
        for &xj in x.iter().take(self.d) {
            idx += self.cell(xj) * stride;
            stride *= self.n + 1;
        }
        self.values[idx]
    }
}

/// Fits the interpolant with at most `m` evaluations of `f`.
pub fn fit_pw_const<F>(f: &F, m: u64, d: usize) -> Result<PwConstModel>
where
    F: Fn(&[f64]) -> f64 + Sync + ?Sized,
{
    if d == 0 {
        return Err(Error::InvalidParams("d must be at least 1".into()));
    }
    if (m as u128) < 1u128 << d.min(127) {
        return Err(Error::Budget(format!("m = {m} is below 2^d = 2^{d}")));
    }
    let n = integer_root(m, d) as usize - 1;
    let corners = GridSpec::new(d, n + 1, Placement::Lattice)?;
    let values = sample(f, &corners)?;
    Ok(PwConstModel { d, n, values })
}

/// Lattice with `8n + 1` points per axis, eight times finer than the model grid.
pub fn default_eval_grid(d: usize, n: usize) -> Result<GridSpec> {
    GridSpec::new(d, 8 * n + 1, Placement::Lattice)
}

/// `max |model − f|` over `eval_grid`, which must be at least eight times
/// finer per axis than the model grid (default: [`default_eval_grid`]).
pub fn learner_sup_error<F>(f: &F, m: u64, d: usize, eval_grid: Option<&GridSpec>) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync + ?Sized,
{
    let model = fit_pw_const(f, m, d)?;
    let grid = match eval_grid {
        Some(g) => *g,
        None => default_eval_grid(d, model.n)?,
    };
    if grid.d != d {
        return Err(Error::DimensionMismatch { expected: d, got: grid.d });
    }
    if grid.points_per_axis < 8 * model.n + 1 {
        return Err(Error::InvalidParams(format!(
            "evaluation grid of {} points per axis is not 8× finer than n = {}",
            grid.points_per_axis, model.n
        )));
    }
    let err = sample(&|x: &[f64]| (model.eval(x) - f(x)).abs(), &grid)?;
    Ok(err.into_iter().fold(0.0, f64::max))
}

/// Least-squares line through `(ln m, ln e)`; `exponent = −slope`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub exponent: Extended,
    pub intercept: f64,
    pub max_residual: f64,
    pub points_used: usize,
    /// Set when some error was `≤ 0`; the exponent is then reported as `∞`.
    pub degenerate: bool,
}

/// Fits `e ≈ C · m^{−λ}` through at least three `(m, e)` pairs with strictly
/// increasing `m`.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} (budget, error) pairs, at least 3 needed",
            points.len()
        )));
    }
    if points.iter().any(|(m, e)| !(m.is_finite() && *m > 0.0) || !e.is_finite()) {
        return Err(Error::InvalidParams("budgets must be positive, errors finite".into()));
    }
    if points.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::InvalidParams("budgets must be strictly increasing".into()));
    }
    if points.iter().any(|(_, e)| *e <= 0.0) {
        return Ok(RateFit {
            exponent: Extended::Infinite,
            intercept: 0.0,
            max_residual: 0.0,
            points_used: points.len(),
            degenerate: true,
        });
    }
    let x: Vec<f64> = points.iter().map(|(m, _)| m.ln()).collect();
    let y: Vec<f64> = points.iter().map(|(_, e)| e.ln()).collect();
    let beta = least_squares(&[&x], &y)?;
    let max_residual = x
        .iter()
        .zip(&y)
        .map(|(xi, yi)| (yi - beta[0] - beta[1] * xi).abs())
        .fold(0.0, f64::max);
    Ok(RateFit {
        exponent: Extended::Finite(-beta[1]),
        intercept: beta[0],
        max_residual,
        points_used: points.len(),
        degenerate: false,
    })
}

/// A corpus function together with an upper bound on its quasi-norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifiedMember {
    pub id: String,
    pub function: CorpusFn,
    pub quasi_norm_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub id: String,
    pub m: u64,
    pub n: usize,
    pub sup_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalityReport {
    pub rows: Vec<ErrorRow>,
    /// `(m, worst error over the corpus)`.
    pub worst: Vec<(u64, f64)>,
    pub fit: RateFit,
    pub predicted_rate: f64,
    /// The pass condition, spelled out for the report reader.
    pub check: String,
    pub pass: bool,
}

/// Certified members may exceed the unit ball by at most this much.
pub const UNIT_BALL_SLACK: f64 = 1e-6;

/// Worst-case learner error over a certified corpus in the unit ball, its
/// fitted rate (smallest two budgets dropped) and the predicted optimal rate.
pub fn optimality_report(
    params: &SpaceParams,
    gamma_star: GammaValue,
    corpus: &[CertifiedMember],
    m_list: &[u64],
) -> Result<OptimalityReport> {
    if corpus.is_empty() {
        return Err(Error::InvalidParams("empty corpus".into()));
    }
    if let Some(m) = corpus.iter().find(|m| !(m.quasi_norm_bound <= 1.0 + UNIT_BALL_SLACK)) {
        return Err(Error::Precondition(format!(
            "corpus member {} has quasi-norm bound {} > 1",
            m.id, m.quasi_norm_bound
        )));
    }
    if m_list.len() < 5 {
        return Err(Error::InsufficientData("at least 5 budgets needed (two are dropped)".into()));
    }
    let d = params.d();
    let mut rows = Vec::with_capacity(corpus.len() * m_list.len());
    let mut worst = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let n = integer_root(m, d).saturating_sub(1) as usize;
        let mut w = 0.0f64;
        for member in corpus {
            let f = |x: &[f64]| member.function.eval(x);
            let e = learner_sup_error(&f, m, d, None)?;
            w = w.max(e);
            rows.push(ErrorRow { id: member.id.clone(), m, n, sup_error: e });
        }
        worst.push((m, w));
    }
    let fit_points: Vec<(f64, f64)> = worst.iter().skip(2).map(|&(m, e)| (m as f64, e)).collect();
    let fit = fit_rate(&fit_points)?;
    let predicted_rate = optimal_sampling_rate(params.alpha(), d, gamma_star.value, ell_star(params.growth()));
    let pass = fit.exponent >= Extended::Finite(predicted_rate - 0.1);
    Ok(OptimalityReport {
        rows,
        worst,
        fit,
        predicted_rate,
        check: "fitted exponent >= predicted rate - 0.1".into(),
        pass,
    })
}
