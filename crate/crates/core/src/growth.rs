//! Depth- and coefficient-growth functions and the exponents `ℓ*`, `γ*`, `γ◊`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::Extended;
use crate::regression::least_squares;

/// One growth function `ℕ → ℕ ∪ {∞}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GrowthFn {
    Constant { value: u64 },
    /// `n ↦ ⌈n^θ · (ln 2n)^κ⌉`, taken as a running maximum so that it is
    /// non-decreasing even when `κ < 0` makes the raw expression dip first.
    PowerLog { theta: f64, kappa: f64 },
    /// `values[n-1]` for `n ≤ values.len()`, then `extend`.
    Table { values: Vec<u64>, extend: u64 },
    Infinite,
}

impl GrowthFn {
    pub fn constant(value: u64) -> Self {
        GrowthFn::Constant { value }
    }

    pub fn power_log(theta: f64, kappa: f64) -> Self {
        GrowthFn::PowerLog { theta, kappa }
    }

    pub fn table(values: Vec<u64>, extend: u64) -> Self {
        GrowthFn::Table { values, extend }
    }

    /// Evaluates at `n ≥ 1`.
    pub fn eval(&self, n: u64) -> Extended {
        let n = n.max(1);
        match self {
            GrowthFn::Constant { value } => Extended::Finite(*value as f64),
            GrowthFn::PowerLog { theta, kappa } => {
                let raw = |t: f64| t.powf(*theta) * (2.0 * t).ln().powf(*kappa);
                let v = raw(1.0).max(raw(n as f64)).ceil().max(1.0);
                Extended::from_f64(v)
            }
            GrowthFn::Table { values, extend } => {
                let v = values.get((n - 1) as usize).copied().unwrap_or(*extend);
                Extended::Finite(v as f64)
            }
            GrowthFn::Infinite => Extended::Infinite,
        }
    }

    /// `sup_n f(n)`.
    pub fn supremum(&self) -> Extended {
        match self {
            GrowthFn::Constant { value } => Extended::Finite(*value as f64),
            GrowthFn::PowerLog { theta, kappa } => {
                if *theta > 0.0 || *kappa > 0.0 {
                    Extended::Infinite
                } else {
                    // Non-increasing raw expression: the running max is its value at 1.
                    self.eval(1)
                }
            }
            GrowthFn::Table { values, extend } => {
                Extended::Finite(values.iter().copied().fold(*extend, u64::max) as f64)
            }
            GrowthFn::Infinite => Extended::Infinite,
        }
    }

    fn is_parametric(&self) -> bool {
        !matches!(self, GrowthFn::Table { .. })
    }

    fn validate(&self, floor: u64, role: &str) -> Result<()> {
        match self {
            GrowthFn::Constant { value } if *value < floor => Err(Error::InvalidGrowth(format!(
                "{role} constant {value} is below {floor}"
            ))),
            GrowthFn::PowerLog { theta, kappa } if !(theta.is_finite() && *theta >= 0.0) || !kappa.is_finite() => {
                Err(Error::InvalidGrowth(format!(
                    "{role} power-log needs θ ≥ 0 and finite κ, got θ={theta}, κ={kappa}"
                )))
            }
            GrowthFn::Table { values, extend } => {
                let mut prev = floor;
                for &v in values.iter().chain(std::iter::once(extend)) {
                    if v < prev {
                        return Err(Error::InvalidGrowth(format!(
                            "{role} table {values:?} (extend {extend}) is not non-decreasing from {floor}"
                        )));
                    }
                    prev = v;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Depth growth `ℓ` and coefficient growth `c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GrowthPairRecord", into = "GrowthPairRecord")]
pub struct GrowthPair {
    depth: GrowthFn,
    coeff: GrowthFn,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GrowthPairRecord {
    depth: GrowthFn,
    coeff: GrowthFn,
}

impl TryFrom<GrowthPairRecord> for GrowthPair {
    type Error = Error;

    fn try_from(r: GrowthPairRecord) -> Result<Self> {
        GrowthPair::new(r.depth, r.coeff)
    }
}

impl From<GrowthPair> for GrowthPairRecord {
    fn from(g: GrowthPair) -> Self {
        GrowthPairRecord {
            depth: g.depth,
            coeff: g.coeff,
        }
    }
}

impl GrowthPair {
    /// Depth values must be at least 2 and coefficient values at least 1.
    /// A power-log depth is clamped to 2 from below instead of rejected.
    pub fn new(depth: GrowthFn, coeff: GrowthFn) -> Result<Self> {
        depth.validate(2, "depth")?;
        coeff.validate(1, "coefficient")?;
        Ok(Self { depth, coeff })
    }

    pub fn depth(&self) -> &GrowthFn {
        &self.depth
    }

    pub fn coeff(&self) -> &GrowthFn {
        &self.coeff
    }

    /// `ℓ(n)`.
    pub fn depth_at(&self, n: u64) -> Extended {
        match self.depth.eval(n) {
            Extended::Finite(v) => Extended::Finite(v.max(2.0)),
            inf => inf,
        }
    }

    /// `c(n)`.
    pub fn coeff_at(&self, n: u64) -> Extended {
        self.coeff.eval(n)
    }

    fn is_parametric(&self) -> bool {
        self.depth.is_parametric() && self.coeff.is_parametric()
    }
}

/// `ℓ* = sup_n ℓ(n)`.
pub fn ell_star(g: &GrowthPair) -> Extended {
    match g.depth.supremum() {
        Extended::Finite(v) => Extended::Finite(v.max(2.0)),
        inf => inf,
    }
}

/// A growth exponent together with how it was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaValue {
    pub value: Extended,
    /// `true` when the value comes from a finite probe rather than a closed form.
    pub estimated: bool,
}

impl GammaValue {
    pub fn exact(value: Extended) -> Self {
        Self { value, estimated: false }
    }

    pub fn estimate(value: Extended) -> Self {
        Self { value, estimated: true }
    }
}

pub const MIN_PROBE_LIMIT: u64 = 1000;

/// `γ*(ℓ, c)`.
///
/// Closed forms: `∞` when `ℓ* = ∞` or `c ≡ ∞`; `θ·ℓ* + ⌊ℓ*/2⌋` for power-log
/// coefficients (κ drops out of the limsup exponent); `⌊ℓ*/2⌋` for constants.
/// Table coefficients go through [`estimate_gamma_star`].
pub fn gamma_star(g: &GrowthPair, probe_limit: u64) -> Result<GammaValue> {
    check_probe(probe_limit)?;
    match closed_form(g) {
        Some(v) => Ok(GammaValue::exact(v)),
        None => estimate_gamma_star(g, probe_limit).map(GammaValue::estimate),
    }
}

/// `γ◊(ℓ, c)`. Equal to [`gamma_star`] on parametric families; table
/// coefficients go through [`estimate_gamma_diamond`].
pub fn gamma_diamond(g: &GrowthPair, probe_limit: u64) -> Result<GammaValue> {
    check_probe(probe_limit)?;
    match closed_form(g) {
        Some(v) => Ok(GammaValue::exact(v)),
        None => estimate_gamma_diamond(g, probe_limit).map(GammaValue::estimate),
    }
}

fn check_probe(probe_limit: u64) -> Result<()> {
    if probe_limit < MIN_PROBE_LIMIT {
        return Err(Error::Precondition(format!(
            "probe_limit {probe_limit} is below {MIN_PROBE_LIMIT}"
        )));
    }
    Ok(())
}

fn closed_form(g: &GrowthPair) -> Option<Extended> {
    let ell = match ell_star(g) {
        Extended::Infinite => return Some(Extended::Infinite),
        Extended::Finite(l) => l,
    };
    let half = (ell / 2.0).floor();
    match &g.coeff {
        GrowthFn::Infinite => Some(Extended::Infinite),
        GrowthFn::Constant { .. } => Some(Extended::Finite(half)),
        GrowthFn::PowerLog { theta, .. } => Some(Extended::Finite(theta * ell + half)),
        GrowthFn::Table { .. } => None,
    }
}

/// Probe points `(n, c̃(n))` on `[⌈probe^{1/3}⌉, probe]`.
///
/// Integer-valued growth is de-quantized: where `c` steps up at `n`, the
/// underlying real value lies in `(c(n) − 1, c(n)]`, so `c(n) − 1` is used at
/// those jump points and other points are dropped. With fewer than four
/// jumps, or none in the upper half of the window (eventually constant
/// growth), the raw values on the upper half are used instead and the
/// returned flag is `false`. `raw` skips all of this and returns the window.
fn probe_samples(g: &GrowthPair, probe_limit: u64, raw: bool) -> Option<(Vec<f64>, Vec<f64>, bool)> {
    let lo = ((probe_limit as f64).cbrt().ceil() as u64).max(4);
    let mut values = Vec::with_capacity((probe_limit - lo + 2) as usize);
    for n in (lo - 1)..=probe_limit {
        values.push(g.coeff_at(n).finite()?);
    }
    let ns = || (lo..=probe_limit).map(|n| n as f64);
    if raw {
        return Some((ns().collect(), values[1..].to_vec(), false));
    }
    let jumps: Vec<(f64, f64)> = ns()
        .zip(values.windows(2))
        .filter(|(_, w)| w[1] > w[0])
        .map(|(n, w)| (n, (w[1] - 1.0).max(1.0)))
        .collect();
    let split = probe_limit as f64 / 2.0;
    let upper = jumps.iter().filter(|(n, _)| *n >= split).count();
    if upper >= 1 && jumps.len() >= 4 {
        let (ns, cs) = jumps.into_iter().unzip();
        Some((ns, cs, true))
    } else {
        let (ns, cs) = ns()
            .zip(values[1..].iter().copied())
            .filter(|(n, _)| *n >= split)
            .unzip();
        Some((ns, cs, false))
    }
}

fn finite_ell(g: &GrowthPair) -> Option<u32> {
    ell_star(g).finite().map(|l| l as u32)
}

/// Numeric `γ*`: for each `L ≤ ℓ*`, regress `ln(c(n)^L · n^{⌊L/2⌋})` on
/// `[1, ln n, ln ln 2n]` over the probe window and take the largest `ln n`
/// coefficient. The `ln ln 2n` column absorbs logarithmic factors, which would
/// otherwise bias a plain log-log slope by roughly `κL / ln n`. On the
/// eventually-constant fallback the regression is on `[1, ln n]` alone.
pub fn estimate_gamma_star(g: &GrowthPair, probe_limit: u64) -> Result<Extended> {
    check_probe(probe_limit)?;
    let Some(ell) = finite_ell(g) else {
        return Ok(Extended::Infinite);
    };
    let Some((ns, cs, jumps)) = probe_samples(g, probe_limit, false) else {
        return Ok(Extended::Infinite);
    };
    let ln_n: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let lnln: Vec<f64> = ns.iter().map(|n| (2.0 * n).ln().ln()).collect();
    let mut best = f64::NEG_INFINITY;
    for depth in 1..=ell {
        let y: Vec<f64> = cs
            .iter()
            .zip(&ln_n)
            .map(|(c, l)| depth as f64 * c.ln() + (depth / 2) as f64 * l)
            .collect();
        let beta = if jumps {
            least_squares(&[&ln_n, &lnln], &y)?
        } else {
            least_squares(&[&ln_n], &y)?
        };
        best = best.max(beta[1]);
    }
    Ok(Extended::Finite(best.max(0.0)))
}

/// Numeric `γ◊`: the smallest `γ` (bisected to `1e-4`) for which the constant
/// `C` fitted on the lower half of the probe window still bounds
/// `c(n)^L n^{⌊L/2⌋} / n^γ` on the upper half, for every `L ≤ ℓ*`.
pub fn estimate_gamma_diamond(g: &GrowthPair, probe_limit: u64) -> Result<Extended> {
    check_probe(probe_limit)?;
    let Some(ell) = finite_ell(g) else {
        return Ok(Extended::Infinite);
    };
    let Some((ns, cs, _)) = probe_samples(g, probe_limit, true) else {
        return Ok(Extended::Infinite);
    };
    let split = probe_limit as f64 / 2.0;
    if ns.first().is_none_or(|&n| n >= split) || ns.last().is_none_or(|&n| n < split) {
        return Err(Error::InsufficientData("probe window has an empty half".into()));
    }
    let bounded = |gamma: f64| {
        (1..=ell).all(|depth| {
            let (mut head, mut tail) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for (n, c) in ns.iter().zip(&cs) {
                let v = depth as f64 * c.ln() + ((depth / 2) as f64 - gamma) * n.ln();
                if *n < split {
                    head = head.max(v);
                } else {
                    tail = tail.max(v);
                }
            }
            tail <= head + 1e-12
        })
    };
    let mut hi = 1.0;
    while !bounded(hi) {
        hi *= 2.0;
        if hi > 1e9 {
            return Ok(Extended::Infinite);
        }
    }
    let mut lo = 0.0;
    if bounded(lo) {
        return Ok(Extended::ZERO);
    }
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if bounded(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Extended::Finite(hi))
}

/// Whether both exponents come from closed forms for this pair.
pub fn has_closed_form(g: &GrowthPair) -> bool {
    g.is_parametric() || closed_form(g).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(depth: GrowthFn, coeff: GrowthFn) -> GrowthPair {
        GrowthPair::new(depth, coeff).unwrap()
    }

    #[test]
    fn ell_star_cases() {
        let c = GrowthFn::constant(1);
        assert_eq!(ell_star(&pair(GrowthFn::constant(3), c.clone())), Extended::Finite(3.0));
        assert_eq!(ell_star(&pair(GrowthFn::Infinite, c.clone())), Extended::Infinite);
        assert_eq!(
            ell_star(&pair(GrowthFn::table(vec![2, 2, 3, 3], 3), c.clone())),
            Extended::Finite(3.0)
        );
        assert_eq!(
            ell_star(&pair(GrowthFn::power_log(0.5, 0.0), c)),
            Extended::Infinite
        );
    }

    #[test]
    fn validation() {
        assert!(GrowthPair::new(GrowthFn::constant(1), GrowthFn::constant(1)).is_err());
        assert!(GrowthPair::new(GrowthFn::constant(2), GrowthFn::constant(0)).is_err());
        assert!(GrowthPair::new(GrowthFn::table(vec![2, 4, 3], 5), GrowthFn::constant(1)).is_err());
        assert!(GrowthPair::new(GrowthFn::table(vec![2, 3], 2), GrowthFn::constant(1)).is_err());
        assert!(GrowthPair::new(GrowthFn::constant(2), GrowthFn::power_log(-1.0, 0.0)).is_err());
    }

    #[test]
    fn power_log_is_monotone_and_at_least_one() {
        for (theta, kappa) in [(0.0, -1.0), (0.5, -1.0), (0.25, -2.0), (1.0, 1.0), (0.0, 1.0)] {
            let f = GrowthFn::power_log(theta, kappa);
            let mut prev = 0.0;
            for n in 1..5000 {
                let v = f.eval(n).to_f64();
                assert!(v >= 1.0 && v >= prev, "θ={theta} κ={kappa} n={n}");
                prev = v;
            }
        }
        assert_eq!(GrowthFn::power_log(1.0, 0.0).eval(7), Extended::Finite(7.0));
        assert_eq!(GrowthFn::power_log(0.5, 0.0).eval(10), Extended::Finite(4.0));
    }

    #[test]
    fn closed_form_examples() {
        let g = pair(GrowthFn::constant(3), GrowthFn::power_log(1.0, 0.0));
        assert_eq!(gamma_star(&g, 1000).unwrap(), GammaValue::exact(Extended::Finite(4.0)));
        let g = pair(GrowthFn::Infinite, GrowthFn::constant(1));
        assert_eq!(gamma_star(&g, 1000).unwrap().value, Extended::Infinite);
        assert_eq!(gamma_diamond(&g, 1000).unwrap().value, Extended::Infinite);
        let g = pair(GrowthFn::constant(2), GrowthFn::constant(5));
        assert_eq!(gamma_star(&g, 1000).unwrap().value, Extended::Finite(1.0));
        let g = pair(GrowthFn::constant(2), GrowthFn::power_log(0.5, 0.0));
        assert_eq!(gamma_diamond(&g, 1000).unwrap().value, Extended::Finite(2.0));
        let g = pair(GrowthFn::constant(2), GrowthFn::Infinite);
        assert_eq!(gamma_star(&g, 1000).unwrap().value, Extended::Infinite);
    }

    #[test]
    fn probe_limit_floor() {
        let g = pair(GrowthFn::constant(2), GrowthFn::constant(1));
        assert!(matches!(gamma_star(&g, 999), Err(Error::Precondition(_))));
    }

    #[test]
    fn constant_coefficient_estimate_is_exact() {
        // c ≡ 3, ℓ* = 2: ln(9 n) has slope exactly 1 in ln n.
        let g = pair(GrowthFn::constant(2), GrowthFn::constant(3));
        let est = estimate_gamma_star(&g, 100_000).unwrap().to_f64();
        assert!((est - 1.0).abs() < 1e-9, "{est}");
    }

    #[test]
    fn table_estimates_agree() {
        let g = pair(
            GrowthFn::table(vec![2, 2, 3, 3, 3, 4], 4),
            GrowthFn::table((1..=200).map(|n| (n as f64).sqrt().ceil() as u64).collect(), 15),
        );
        let star = gamma_star(&g, 100_000).unwrap();
        let diamond = gamma_diamond(&g, 100_000).unwrap();
        assert!(star.estimated && diamond.estimated);
        let (s, d) = (star.value.to_f64(), diamond.value.to_f64());
        assert!((s - 2.0).abs() < 0.05, "γ* ≈ {s}");
        assert!((s - d).abs() < 0.05, "γ* {s} vs γ◊ {d}");
    }

    #[test]
    fn json_form() {
        let f: GrowthFn =
            serde_json::from_str(r#"{"kind": "powerlog", "theta": 1.0, "kappa": 0.0}"#).unwrap();
        assert_eq!(f, GrowthFn::power_log(1.0, 0.0));
        let g: GrowthPair = serde_json::from_str(
            r#"{"depth": {"kind": "table", "values": [2, 3], "extend": 3},
                "coeff": {"kind": "constant", "value": 4}}"#,
        )
        .unwrap();
        assert_eq!(ell_star(&g), Extended::Finite(3.0));
        assert!(serde_json::from_str::<GrowthFn>(r#"{"kind": "linear"}"#).is_err());
        assert!(serde_json::from_str::<GrowthPair>(
            r#"{"depth": {"kind": "constant", "value": 1}, "coeff": {"kind": "infinite"}}"#
        )
        .is_err());
    }
}
