//! The functional `Γ`, the quasi-norm of the approximation space `A^α_{ℓ,c,p}`
//! and the embedding verdicts into `C` and `C^{0,β}`.

use serde::{Deserialize, Serialize, Serializer};

use crate::analysis::{sup_norm, GridSpec};
use crate::error::{Error, Result};
use crate::extended::Extended;
use crate::growth::{GammaValue, GrowthPair};
use crate::learner::{fit_rate, RateFit};
use crate::relu_net::{in_sigma, Network};

/// `(α, p, d)` together with the growth pair: one space `A^α_{ℓ,c,p}` on `[0,1]^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceParamsRecord", into = "SpaceParamsRecord")]
pub struct SpaceParams {
    alpha: f64,
    p: Extended,
    d: usize,
    growth: GrowthPair,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceParamsRecord {
    alpha: f64,
    p: Extended,
    d: usize,
    growth: GrowthPair,
}

impl TryFrom<SpaceParamsRecord> for SpaceParams {
    type Error = Error;

    fn try_from(r: SpaceParamsRecord) -> Result<Self> {
        SpaceParams::new(r.alpha, r.p, r.d, r.growth)
    }
}

impl From<SpaceParams> for SpaceParamsRecord {
    fn from(s: SpaceParams) -> Self {
        SpaceParamsRecord { alpha: s.alpha, p: s.p, d: s.d, growth: s.growth }
    }
}

impl SpaceParams {
    pub fn new(alpha: f64, p: Extended, d: usize, growth: GrowthPair) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParams(format!("α = {alpha} must be positive and finite")));
        }
        if let Extended::Finite(pv) = p {
            if !(pv > 0.0 && pv.is_finite()) {
                return Err(Error::InvalidParams(format!("p = {pv} must lie in (0, ∞]")));
            }
        }
        if d == 0 {
            return Err(Error::InvalidParams("d must be at least 1".into()));
        }
        Ok(Self { alpha, p, d, growth })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn p(&self) -> Extended {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn growth(&self) -> &GrowthPair {
        &self.growth
    }

    /// `d/p`, zero for `p = ∞`.
    pub fn d_over_p(&self) -> f64 {
        match self.p {
            Extended::Infinite => 0.0,
            Extended::Finite(p) => self.d as f64 / p,
        }
    }
}

/// Oracle for a function `f`: `‖f/θ‖_{L^p}` and upper bounds on `d_p(f/θ, Σ_n)`.
pub trait DistanceProfile: Sync {
    fn lp_norm_at(&self, scale: f64) -> f64;
    fn dist_at(&self, n: u64, scale: f64) -> f64;
}

/// A profile given by a norm and a table of distances, all scaling like `1/θ`.
/// Distances beyond the table repeat its last entry.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedProfile {
    pub lp_norm: f64,
    /// `distances[n-1]` is the distance to `Σ_n`.
    pub distances: Vec<f64>,
}

impl DistanceProfile for TabulatedProfile {
    fn lp_norm_at(&self, scale: f64) -> f64 {
        self.lp_norm / scale
    }

    fn dist_at(&self, n: u64, scale: f64) -> f64 {
        let i = (n.max(1) - 1) as usize;
        self.distances.get(i).or(self.distances.last()).copied().unwrap_or(0.0) / scale
    }
}

/// `Γ` truncated at `n_max`, with the `n` attaining the supremum term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaReport {
    pub value: f64,
    pub n_max: u64,
    /// `None` when the `L^p` norm alone attains the maximum.
    pub argmax_n: Option<u64>,
}

fn gamma_at(profile: &dyn DistanceProfile, alpha: f64, n_max: u64, scale: f64) -> Result<GammaReport> {
    let lp = profile.lp_norm_at(scale);
    if !lp.is_finite() || lp < 0.0 {
        return Err(Error::NonFinite(format!("oracle norm {lp} at scale {scale}")));
    }
    let mut report = GammaReport { value: lp, n_max, argmax_n: None };
    for n in 1..=n_max {
        let dist = profile.dist_at(n, scale);
        if !dist.is_finite() || dist < 0.0 {
            return Err(Error::NonFinite(format!("oracle distance {dist} at n = {n}, scale {scale}")));
        }
        let term = (n as f64).powf(alpha) * dist;
        if term > report.value {
            report.value = term;
            report.argmax_n = Some(n);
        }
    }
    Ok(report)
}

/// `max(‖f‖_p, max_{n ≤ n_max} n^α · d_p(f, Σ_n))`.
///
/// A lower bound for the untruncated `Γ(f)`; with an upper-bound distance
/// oracle that vanishes from some `n₀ ≤ n_max` on, also an upper bound.
pub fn gamma_functional(profile: &dyn DistanceProfile, params: &SpaceParams, n_max: u64) -> Result<GammaReport> {
    if n_max == 0 {
        return Err(Error::InvalidParams("n_max must be at least 1".into()));
    }
    gamma_at(profile, params.alpha, n_max, 1.0)
}

const QUASI_NORM_CEILING: f64 = (1u64 << 60) as f64;

/// `inf { θ > 0 : Γ(f/θ) ≤ 1 }` by bisection, to absolute accuracy `tol`.
///
/// Only monotonicity of `θ ↦ Γ(f/θ)` is used. The returned value is the upper
/// end of the final bracket, so `Γ(f/value) ≤ 1` holds.
pub fn quasi_norm(profile: &dyn DistanceProfile, params: &SpaceParams, n_max: u64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParams(format!("tol = {tol} must be positive")));
    }
    if n_max == 0 {
        return Err(Error::InvalidParams("n_max must be at least 1".into()));
    }
    let gamma = |theta: f64| gamma_at(profile, params.alpha, n_max, theta).map(|r| r.value);
    if gamma(1.0)? == 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while gamma(hi)? > 1.0 {
        hi *= 2.0;
        if hi > QUASI_NORM_CEILING {
            return Err(Error::Divergence);
        }
    }
    let mut lo = 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gamma(mid)? <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictKind {
    Embeds,
    Fails,
    Critical,
}

/// Outcome of comparing `α` against an embedding threshold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub threshold: Extended,
    /// The compared quantity, `α`.
    pub comparison: f64,
    /// `comparison − threshold`; `−∞` when the threshold is infinite.
    #[serde(serialize_with = "signed_float")]
    pub margin: f64,
    pub gamma_star: Extended,
    pub estimated: bool,
}

fn signed_float<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

pub const EXACT_TOL: f64 = 1e-9;
pub const ESTIMATE_TOL: f64 = 0.05;

fn default_tol(gamma: &GammaValue) -> f64 {
    if gamma.estimated {
        ESTIMATE_TOL
    } else {
        EXACT_TOL
    }
}

fn classify(alpha: f64, threshold: Extended, gamma: GammaValue, tol: f64) -> Result<Verdict> {
    let margin = alpha - threshold.to_f64();
    let band = tol * threshold.finite().map_or(1.0, |t| t.abs().max(1.0));
    if gamma.estimated && margin.abs() < 2.0 * band {
        return Err(Error::Indeterminate { margin, tol: band });
    }
    let kind = if margin.abs() <= band {
        VerdictKind::Critical
    } else if margin > 0.0 {
        VerdictKind::Embeds
    } else {
        VerdictKind::Fails
    };
    Ok(Verdict {
        kind,
        threshold,
        comparison: alpha,
        margin,
        gamma_star: gamma.value,
        estimated: gamma.estimated,
    })
}

fn scaled(factor: f64, gamma: Extended) -> Extended {
    match gamma {
        Extended::Finite(g) => Extended::Finite(factor * g),
        Extended::Infinite if factor == 0.0 => Extended::ZERO,
        Extended::Infinite => Extended::Infinite,
    }
}

/// Embedding into `C([0,1]^d)`: `α` against `(d/p)·γ*`.
///
/// The band around the threshold is relative: `|margin| ≤ tol · max(1, |threshold|)`
/// counts as critical. `tol = None` picks `1e-9` for exact and `0.05` for
/// estimated `γ*`. For `p = ∞` the space always embeds.
pub fn embedding_verdict_c(params: &SpaceParams, gamma_star: GammaValue, tol: Option<f64>) -> Result<Verdict> {
    let tol = tol.unwrap_or_else(|| default_tol(&gamma_star));
    if params.p.is_infinite() {
        return Ok(Verdict {
            kind: VerdictKind::Embeds,
            threshold: Extended::ZERO,
            comparison: params.alpha,
            margin: params.alpha,
            gamma_star: gamma_star.value,
            estimated: gamma_star.estimated,
        });
    }
    classify(params.alpha, scaled(params.d_over_p(), gamma_star.value), gamma_star, tol)
}

/// Embedding into `C^{0,β}([0,1]^d)`: `α` against `((β + d/p)/(1 − β))·γ*`.
pub fn embedding_verdict_hoelder(
    params: &SpaceParams,
    beta: f64,
    gamma_star: GammaValue,
    tol: Option<f64>,
) -> Result<Verdict> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain(format!("β = {beta} not in (0, 1)")));
    }
    let tol = tol.unwrap_or_else(|| default_tol(&gamma_star));
    let factor = (beta + params.d_over_p()) / (1.0 - beta);
    classify(params.alpha, scaled(factor, gamma_star.value), gamma_star, tol)
}

/// `μ = (p/(d+p))·(α − (d/p)·γ)`, the exponent of the embedding into `A^μ_∞`.
/// For `p = ∞` this is `α`.
pub fn secondary_embedding_exponent(params: &SpaceParams, gamma: f64) -> Result<f64> {
    match params.p {
        Extended::Infinite => Ok(params.alpha),
        Extended::Finite(p) => {
            let d = params.d as f64;
            if gamma >= p / d * params.alpha {
                return Err(Error::Domain(format!(
                    "γ = {gamma} must be below (p/d)·α = {}",
                    p / d * params.alpha
                )));
            }
            Ok(p / (d + p) * (params.alpha - d / p * gamma))
        }
    }
}

/// Optimal sampling rate `(1/d)·α/(γ* + α)` when `ℓ* < ∞`, else `0`.
pub fn optimal_sampling_rate(alpha: f64, d: usize, gamma_star: Extended, ell_star: Extended) -> f64 {
    match (gamma_star, ell_star) {
        (Extended::Finite(g), Extended::Finite(_)) => alpha / (g + alpha) / d as f64,
        _ => 0.0,
    }
}

/// Successive sup-norm differences of a network sequence and their fitted decay.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CauchyReport {
    pub mu: f64,
    /// `(m, ‖F_{m+1} − F_m‖_∞)` on the grid.
    pub differences: Vec<(u32, f64)>,
    pub fit: RateFit,
    /// Indices `m` with `F_m ∉ Σ_{2^m}`.
    pub budget_violations: Vec<u32>,
    pub pass: bool,
}

/// Checks that `F_m` (with `F_{first_m + i} = nets[i] ∈ Σ_{2^m}`) is uniformly
/// Cauchy at the predicted rate: the decay exponent of `‖F_{m+1} − F_m‖_∞`
/// against the budget `2^m` must be at least `μ − 0.1`.
pub fn uniform_cauchy_check(
    nets: &[Network],
    first_m: u32,
    params: &SpaceParams,
    gamma: f64,
    grid: &GridSpec,
) -> Result<CauchyReport> {
    if nets.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "{} networks given, at least 4 needed",
            nets.len()
        )));
    }
    if grid.d != params.d {
        return Err(Error::DimensionMismatch { expected: params.d, got: grid.d });
    }
    let mu = secondary_embedding_exponent(params, gamma)?;
    let budget_violations = nets
        .iter()
        .zip(first_m..)
        .filter(|(net, m)| !in_sigma(net, 1u64 << m, &params.growth, params.d))
        .map(|(_, m)| m)
        .collect();
    let differences = nets
        .windows(2)
        .zip(first_m..)
        .map(|(w, m)| {
            let diff = sup_norm(&|x: &[f64]| w[1].eval_scalar(x) - w[0].eval_scalar(x), grid)?;
            Ok((m, diff))
        })
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<(f64, f64)> = differences.iter().map(|&(m, e)| (2f64.powi(m as i32), e)).collect();
    let fit = fit_rate(&points)?;
    let pass = fit.exponent >= Extended::Finite(mu - 0.1);
    Ok(CauchyReport { mu, differences, fit, budget_violations, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::GrowthFn;
    use approx::assert_abs_diff_eq;

    fn growth() -> GrowthPair {
        GrowthPair::new(GrowthFn::constant(3), GrowthFn::power_log(1.0, 0.0)).unwrap()
    }

    fn space(alpha: f64, p: Extended, d: usize) -> SpaceParams {
        SpaceParams::new(alpha, p, d, growth()).unwrap()
    }

    fn exact(g: f64) -> GammaValue {
        GammaValue::exact(Extended::Finite(g))
    }

    #[test]
    fn params_validation() {
        assert!(SpaceParams::new(0.0, 1.0.into(), 1, growth()).is_err());
        assert!(SpaceParams::new(1.0, 0.0.into(), 1, growth()).is_err());
        assert!(SpaceParams::new(1.0, 1.0.into(), 0, growth()).is_err());
        let s: SpaceParams = serde_json::from_str(
            r#"{"alpha": 1, "p": "inf", "d": 2, "growth": {"depth": {"kind": "infinite"}, "coeff": {"kind": "infinite"}}}"#,
        )
        .unwrap();
        assert_eq!(s.d_over_p(), 0.0);
    }

    #[test]
    fn gamma_functional_examples() {
        let s = space(1.0, 1.0.into(), 1);
        let zero = TabulatedProfile { lp_norm: 0.0, distances: vec![0.0] };
        assert_eq!(gamma_functional(&zero, &s, 100).unwrap().value, 0.0);
        let prof = TabulatedProfile {
            lp_norm: 1.0,
            distances: (1..=10_000).map(|n| (1.0f64).min((n as f64).powi(-2))).collect(),
        };
        let r = gamma_functional(&prof, &s, 10_000).unwrap();
        assert_eq!(r.value, 1.0);
        // Brute force over the table.
        let brute = (1..=10_000u64).map(|n| n as f64 * prof.dist_at(n, 1.0)).fold(1.0f64, f64::max);
        assert_eq!(r.value, brute);
        let bad = TabulatedProfile { lp_norm: 1.0, distances: vec![f64::NAN] };
        assert!(gamma_functional(&bad, &s, 3).is_err());
    }

    #[test]
    fn quasi_norm_examples() {
        let s = space(1.0, 2.0.into(), 1);
        let zero = TabulatedProfile { lp_norm: 0.0, distances: vec![0.0] };
        assert_eq!(quasi_norm(&zero, &s, 10, 1e-9).unwrap(), 0.0);
        let unit = TabulatedProfile { lp_norm: 1.0, distances: vec![0.5, 0.25, 0.0] };
        assert!(quasi_norm(&unit, &s, 10, 1e-9).unwrap() <= 1.0);
        let two = TabulatedProfile { lp_norm: 2.0, distances: vec![1.0, 0.5, 0.0] };
        assert_abs_diff_eq!(quasi_norm(&two, &s, 10, 1e-9).unwrap(), 2.0, epsilon = 1e-9);
        // θ-grid scan oracle: smallest grid θ with Γ(f/θ) ≤ 1.
        let scan = (1..=4000)
            .map(|i| i as f64 * 1e-3)
            .find(|&t| gamma_functional(&two, &s, 10).unwrap().value / t <= 1.0)
            .unwrap();
        assert_abs_diff_eq!(scan, 2.0, epsilon = 1e-3);
        let huge = TabulatedProfile { lp_norm: 1e30, distances: vec![0.0] };
        assert!(matches!(quasi_norm(&huge, &s, 10, 1e-6), Err(Error::Divergence)));
    }

    #[test]
    fn verdict_examples() {
        let kind = |a: f64, p: Extended, g: f64| embedding_verdict_c(&space(a, p, 1), exact(g), None).unwrap().kind;
        assert_eq!(kind(5.0, 2.0.into(), 4.0), VerdictKind::Embeds);
        assert_eq!(kind(1.0, 2.0.into(), 4.0), VerdictKind::Fails);
        assert_eq!(kind(2.0, 2.0.into(), 4.0), VerdictKind::Critical);
        assert_eq!(kind(0.1, Extended::Infinite, 40.0), VerdictKind::Embeds);

        let hk = |a: f64, g: Extended| {
            embedding_verdict_hoelder(&space(a, Extended::Infinite, 1), 0.5, GammaValue::exact(g), None)
                .unwrap()
                .kind
        };
        assert_eq!(hk(5.0, Extended::Finite(4.0)), VerdictKind::Embeds);
        assert_eq!(hk(3.0, Extended::Finite(4.0)), VerdictKind::Fails);
        assert_eq!(hk(1e6, Extended::Infinite), VerdictKind::Fails);
        assert!(embedding_verdict_hoelder(&space(1.0, Extended::Infinite, 1), 1.0, exact(1.0), None).is_err());
    }

    #[test]
    fn estimated_gamma_near_threshold_is_refused() {
        let s = space(2.02, 2.0.into(), 1);
        let est = GammaValue::estimate(Extended::Finite(4.0));
        assert!(matches!(embedding_verdict_c(&s, est, None), Err(Error::Indeterminate { .. })));
        let far = space(3.0, 2.0.into(), 1);
        assert_eq!(embedding_verdict_c(&far, est, None).unwrap().kind, VerdictKind::Embeds);
    }

    #[test]
    fn verdict_json_shape() {
        let v = embedding_verdict_hoelder(&space(1.0, Extended::Infinite, 1), 0.5, GammaValue::exact(Extended::Infinite), None)
            .unwrap();
        let j: serde_json::Value = serde_json::to_value(v).unwrap();
        assert_eq!(j["kind"], "fails");
        assert_eq!(j["threshold"], "inf");
        assert_eq!(j["margin"], "-inf");
        assert_eq!(j["estimated"], false);
    }

    #[test]
    fn secondary_exponent_examples() {
        assert_abs_diff_eq!(secondary_embedding_exponent(&space(5.0, 2.0.into(), 1), 4.0).unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(secondary_embedding_exponent(&space(1.0, 1.0.into(), 1), 0.5).unwrap(), 0.25, epsilon = 1e-12);
        let near = secondary_embedding_exponent(&space(1.0, 1.0.into(), 1), 1.0 - 1e-9).unwrap();
        assert!(near > 0.0 && near < 1e-8);
        assert!(secondary_embedding_exponent(&space(1.0, 1.0.into(), 1), 1.0).is_err());
        assert_eq!(secondary_embedding_exponent(&space(1.5, Extended::Infinite, 2), 9.0).unwrap(), 1.5);
    }

    #[test]
    fn sampling_rate_examples() {
        let f = Extended::Finite;
        assert_abs_diff_eq!(optimal_sampling_rate(1.0, 1, f(1.0), f(2.0)), 0.5, epsilon = 1e-15);
        assert_eq!(optimal_sampling_rate(1.0, 1, f(1.0), Extended::Infinite), 0.0);
        assert_abs_diff_eq!(optimal_sampling_rate(2.0, 2, f(4.0), f(3.0)), 1.0 / 6.0, epsilon = 1e-15);
    }
}
