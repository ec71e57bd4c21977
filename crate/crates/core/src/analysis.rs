//! Grid norms, Lipschitz and Hölder seminorm estimates on `[0,1]^d`, and the
//! explicit-constant bounds that control `L^∞` and `Lip_β` by `L^p` and `Lip`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::Extended;
use crate::relu_net::{lipschitz_bound, random_network, RandomNetSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// Midpoints of `points_per_axis` equal cells, for quadrature.
    CellCenters,
    /// Equispaced points including both endpoints, for sup and seminorm probing.
    Lattice,
}

/// Tensor grid on the cube `[0, side]^d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub d: usize,
    pub points_per_axis: usize,
    pub placement: Placement,
    #[serde(default = "unit_side")]
    pub side: f64,
}

fn unit_side() -> f64 {
    1.0
}

/// Hard cap on grid size, to keep accidental `d = 6` grids from exhausting memory.
pub const MAX_GRID_POINTS: usize = 1 << 26;

impl GridSpec {
    pub fn new(d: usize, points_per_axis: usize, placement: Placement) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParams("grid dimension must be at least 1".into()));
        }
        if points_per_axis < 2 {
            return Err(Error::InvalidParams(format!(
                "points_per_axis must be at least 2, got {points_per_axis}"
            )));
        }
        let total = (points_per_axis as u128).checked_pow(d as u32);
        if total.is_none_or(|t| t > MAX_GRID_POINTS as u128) {
            return Err(Error::InvalidParams(format!(
                "{points_per_axis}^{d} grid points exceed {MAX_GRID_POINTS}"
            )));
        }
        Ok(Self { d, points_per_axis, placement, side: 1.0 })
    }

    /// 4096 points per axis for `d = 1`, 256 for `d = 2`, 64 for `d = 3`.
    pub fn default_for(d: usize, placement: Placement) -> Result<Self> {
        let ppa = match d {
            1 => 4096,
            2 => 256,
            3 => 64,
            _ => {
                return Err(Error::InvalidParams(format!(
                    "no default grid for d = {d}; give points_per_axis explicitly"
                )))
            }
        };
        Self::new(d, ppa, placement)
    }

    /// Restricts the grid to `[0, side]^d` with `side ∈ (0, 1]`.
    pub fn with_side(mut self, side: f64) -> Result<Self> {
        if !(side > 0.0 && side <= 1.0) {
            return Err(Error::InvalidParams(format!("grid side {side} not in (0, 1]")));
        }
        self.side = side;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Distance between neighbouring coordinates along one axis.
    pub fn spacing(&self) -> f64 {
        match self.placement {
            Placement::CellCenters => self.side / self.points_per_axis as f64,
            Placement::Lattice => self.side / (self.points_per_axis - 1) as f64,
        }
    }

    pub fn coord(&self, i: usize) -> f64 {
        match self.placement {
            Placement::CellCenters => (i as f64 + 0.5) * self.spacing(),
            Placement::Lattice if i + 1 == self.points_per_axis => self.side,
            Placement::Lattice => i as f64 * self.spacing(),
        }
    }

    /// Writes the point with flat index `idx` (axis 0 fastest) into `out`.
    pub fn point_into(&self, mut idx: usize, out: &mut [f64]) {
        for x in out.iter_mut().take(self.d) {
            *x = self.coord(idx % self.points_per_axis);
            idx /= self.points_per_axis;
        }
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.d];
        self.point_into(idx, &mut x);
        x
    }
}

/// Evaluates `f` at every grid point, in flat-index order.
pub fn sample<F>(f: &F, grid: &GridSpec) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64 + Sync + ?Sized,
{
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map_init(
            || vec![0.0; grid.d],
            |x, i| {
                grid.point_into(i, x);
                f(x)
            },
        )
        .collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!(
            "sample {} at {:?}",
            values[i],
            grid.point(i)
        )));
    }
    Ok(values)
}

/// Midpoint-rule `L^p` norm `((1/N) Σ |f(x_i)|^p)^{1/p}`; `p = ∞` is the grid sup.
pub fn lp_norm<F>(f: &F, p: Extended, grid: &GridSpec) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync + ?Sized,
{
    let p = match p {
        Extended::Infinite => return sup_norm(f, grid),
        Extended::Finite(p) if p > 0.0 && p.is_finite() => p,
        Extended::Finite(p) => return Err(Error::Domain(format!("p = {p} must be positive"))),
    };
    let values = sample(f, grid)?;
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return Ok(0.0);
    }
    // Normalizing by the peak keeps |f|^p representable for large p.
    let mean = values.iter().map(|v| (v.abs() / peak).powf(p)).sum::<f64>() / values.len() as f64;
    Ok(peak * mean.powf(1.0 / p))
}

/// `max |f|` over the grid, a lower bound for `‖f‖_{L^∞}`.
pub fn sup_norm<F>(f: &F, grid: &GridSpec) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync + ?Sized,
{
    Ok(sample(f, grid)?.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

/// A seminorm lower bound and the pair of points attaining it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormReport {
    pub value: f64,
    pub argmax_pair: Option<(Vec<f64>, Vec<f64>)>,
    pub resolution: GridSpec,
    pub pairs_checked: usize,
}

fn linf_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
}

/// `Lip(f)` lower bound with respect to the `ℓ^∞` distance.
pub fn lip_estimate<F, R>(f: &F, grid: &GridSpec, pair_budget: usize, rng: &mut R) -> Result<SeminormReport>
where
    F: Fn(&[f64]) -> f64 + Sync + ?Sized,
    R: Rng + ?Sized,
{
    quotient_estimate(f, 1.0, grid, pair_budget, rng)
}

/// `Lip_β(f)` lower bound, `β ∈ (0, 1]`.
pub fn lip_beta_estimate<F, R>(
    f: &F,
    beta: f64,
    grid: &GridSpec,
    pair_budget: usize,
    rng: &mut R,
) -> Result<SeminormReport>
where
    F: Fn(&[f64]) -> f64 + Sync + ?Sized,
    R: Rng + ?Sized,
{
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Domain(format!("β = {beta} not in (0, 1]")));
    }
    quotient_estimate(f, beta, grid, pair_budget, rng)
}

/// Maximizes `|f(x) − f(y)| / ‖x − y‖_∞^β` over lattice pairs that differ
/// along one axis by `1, 2, 4, …` steps, plus `pair_budget` uniform random pairs.
/// Offset 1 covers every axis-adjacent pair; the dyadic offsets catch Hölder
/// quotients that peak at distances larger than one grid step.
fn quotient_estimate<F, R>(
    f: &F,
    beta: f64,
    grid: &GridSpec,
    pair_budget: usize,
    rng: &mut R,
) -> Result<SeminormReport>
where
    F: Fn(&[f64]) -> f64 + Sync + ?Sized,
    R: Rng + ?Sized,
{
    let grid = GridSpec { placement: Placement::Lattice, ..*grid };
    let values = sample(f, &grid)?;
    let ppa = grid.points_per_axis;
    let offsets: Vec<usize> = std::iter::successors(Some(1usize), |o| Some(o * 2))
        .take_while(|&o| o < ppa)
        .collect();

    // Best (quotient, i, j) per base point, reduced serially for determinism.
    let per_point: Vec<(f64, usize, usize, usize)> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let mut best = (0.0, i, i, 0usize);
            let mut stride = 1;
            for _axis in 0..grid.d {
                let pos = (i / stride) % ppa;
                for &o in &offsets {
                    if pos + o >= ppa {
                        break;
                    }
                    let j = i + o * stride;
                    let dist = grid.coord(pos + o) - grid.coord(pos);
                    let q = (values[j] - values[i]).abs() / dist.powf(beta);
                    if q > best.0 {
                        best = (q, i, j, 0);
                    }
                    best.3 += 1;
                }
                stride *= ppa;
            }
            best
        })
        .collect();
    let mut pairs_checked = 0;
    let mut best: (f64, Option<(Vec<f64>, Vec<f64>)>) = (0.0, None);
    for (q, i, j, count) in per_point {
        pairs_checked += count;
        if q > best.0 {
            best = (q, Some((grid.point(i), grid.point(j))));
        }
    }

    let random_pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..pair_budget)
        .map(|_| {
            let mut draw = || (0..grid.d).map(|_| rng.random_range(0.0..=grid.side)).collect::<Vec<f64>>();
            (draw(), draw())
        })
        .collect();
    let quotients: Vec<f64> = random_pairs
        .par_iter()
        .map(|(x, y)| {
            let dist = linf_dist(x, y);
            if dist == 0.0 {
                0.0
            } else {
                (f(x) - f(y)).abs() / dist.powf(beta)
            }
        })
        .collect();
    for (q, pair) in quotients.into_iter().zip(random_pairs) {
        if !q.is_finite() {
            return Err(Error::NonFinite(format!("difference quotient at {pair:?}")));
        }
        if q > best.0 {
            best = (q, Some(pair));
        }
    }
    pairs_checked += pair_budget;
    Ok(SeminormReport {
        value: best.0,
        argmax_pair: best.1,
        resolution: grid,
        pairs_checked,
    })
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("T = {t} not in (0, 1]")))
    }
}

fn check_nonneg(lp: f64, lip: f64) -> Result<()> {
    if lp >= 0.0 && lip >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("norms must be non-negative, got {lp} and {lip}")))
    }
}

/// Quasi-triangle constant of `L^p`: 1 for `p ≥ 1`, `2^{1/p − 1}` below.
pub fn quasi_triangle_constant(p: f64) -> f64 {
    if p >= 1.0 {
        1.0
    } else {
        2f64.powf(1.0 / p - 1.0)
    }
}

/// `‖f‖_{L^∞} ≤ C₁ · (T · Lip(f) + 2^{d/p} · T^{−d/p} · ‖f‖_{L^p})`.
pub fn sup_bound_from_lp_lip(lp: f64, lip: f64, t: f64, p: f64, d: usize) -> Result<f64> {
    check_t(t)?;
    check_nonneg(lp, lip)?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Domain(format!("p = {p} not in (0, ∞)")));
    }
    let dp = d as f64 / p;
    Ok(quasi_triangle_constant(p) * (lip * t + 2f64.powf(dp) * t.powf(-dp) * lp))
}

/// Upper bound on `Lip_β(f)` from `‖f‖_{L^p}` and `Lip(f)`, `β ∈ (0, 1)`.
///
/// For finite `p`, with `K = C₁ · 2^{d/p}`:
/// `2^{1−β} K^{1−β} ((1−β) T^{−d/p−β} ‖f‖_p + (1+β) T^{1−β} Lip(f))`.
/// For `p = ∞`: `2^{1−β} (T^{−β} ‖f‖_∞ + T^{1−β} Lip(f))`.
pub fn hoelder_bound_from_lp_lip(lp: f64, lip: f64, t: f64, p: Extended, d: usize, beta: f64) -> Result<f64> {
    check_t(t)?;
    check_nonneg(lp, lip)?;
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain(format!("β = {beta} not in (0, 1)")));
    }
    let lead = 2f64.powf(1.0 - beta);
    match p {
        Extended::Infinite => Ok(lead * (t.powf(-beta) * lp + t.powf(1.0 - beta) * lip)),
        Extended::Finite(p) if p > 0.0 && p.is_finite() => {
            let dp = d as f64 / p;
            let k = quasi_triangle_constant(p) * 2f64.powf(dp);
            Ok(lead
                * k.powf(1.0 - beta)
                * ((1.0 - beta) * t.powf(-dp - beta) * lp + (1.0 + beta) * t.powf(1.0 - beta) * lip))
        }
        Extended::Finite(p) => Err(Error::Domain(format!("p = {p} must be positive"))),
    }
}

/// Ranges from which the random networks of a Lipschitz audit are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LipschitzAuditSpec {
    pub nets: usize,
    pub pairs_per_net: usize,
    pub max_input_dim: usize,
    pub min_depth: usize,
    pub max_depth: usize,
    pub max_budget: u64,
    pub min_magnitude: f64,
    pub max_magnitude: f64,
}

impl Default for LipschitzAuditSpec {
    fn default() -> Self {
        Self {
            nets: 1000,
            pairs_per_net: 1000,
            max_input_dim: 3,
            min_depth: 2,
            max_depth: 6,
            max_budget: 32,
            min_magnitude: 1.0,
            max_magnitude: 3.0,
        }
    }
}

/// One audited network: its constraint parameters, the largest sampled
/// quotient and the bound `d · C^L · n^{⌊L/2⌋}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzAuditRow {
    pub index: usize,
    pub d: usize,
    pub depth: usize,
    pub n: u64,
    pub c: f64,
    pub weight_count: usize,
    pub max_quotient: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzAuditReport {
    pub rows: Vec<LipschitzAuditRow>,
    pub pairs_checked: usize,
    pub violations: usize,
    /// Largest `max_quotient / bound` seen.
    pub worst_ratio: f64,
}

/// Samples random constrained networks and compares their empirical
/// difference quotients against the network Lipschitz bound.
pub fn lipschitz_audit<R: Rng + ?Sized>(spec: &LipschitzAuditSpec, rng: &mut R) -> Result<LipschitzAuditReport> {
    if spec.max_input_dim == 0
        || spec.min_depth == 0
        || spec.min_depth > spec.max_depth
        || spec.max_budget == 0
        || !(spec.min_magnitude > 0.0 && spec.min_magnitude <= spec.max_magnitude)
    {
        return Err(Error::InvalidParams(format!("bad audit ranges {spec:?}")));
    }
    let mut jobs = Vec::with_capacity(spec.nets);
    for index in 0..spec.nets {
        let d = rng.random_range(1..=spec.max_input_dim);
        let depth = rng.random_range(spec.min_depth..=spec.max_depth);
        let n = rng.random_range(1..=spec.max_budget);
        let c = rng.random_range(spec.min_magnitude..=spec.max_magnitude);
        let net = random_network(
            rng,
            &RandomNetSpec {
                input_dim: d,
                depth,
                max_width: n as usize,
                weight_budget: n as usize,
                magnitude: c,
            },
        )?;
        let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..spec.pairs_per_net)
            .map(|_| {
                let mut draw = || (0..d).map(|_| rng.random::<f64>()).collect::<Vec<f64>>();
                (draw(), draw())
            })
            .collect();
        jobs.push((index, d, depth, n, c, net, pairs));
    }
    let rows: Vec<LipschitzAuditRow> = jobs
        .par_iter()
        .map(|(index, d, depth, n, c, net, pairs)| {
            let max_quotient = pairs.iter().fold(0.0f64, |m, (x, y)| {
                let dist = linf_dist(x, y);
                if dist == 0.0 {
                    m
                } else {
                    m.max((net.eval_scalar(x) - net.eval_scalar(y)).abs() / dist)
                }
            });
            LipschitzAuditRow {
                index: *index,
                d: *d,
                depth: *depth,
                n: *n,
                c: *c,
                weight_count: net.weight_count(),
                max_quotient,
                bound: lipschitz_bound(*d, *c, *depth as u32, *n),
            }
        })
        .collect();
    let violations = rows.iter().filter(|r| r.max_quotient > r.bound).count();
    let worst_ratio = rows
        .iter()
        .filter(|r| r.bound > 0.0)
        .fold(0.0f64, |m, r| m.max(r.max_quotient / r.bound));
    Ok(LipschitzAuditReport {
        rows,
        pairs_checked: spec.nets * spec.pairs_per_net,
        violations,
        worst_ratio,
    })
}
