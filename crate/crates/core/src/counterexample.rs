//! The spike `ζ_{M′}(x) = ϱ(1 − M′ Σ x_i)`, its exact `L^p` norm, the network
//! realizing `(M/M′)·ζ_{M′}`, and certified unit-ball sequences whose sup norm
//! or Hölder seminorm blows up.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::analysis::{lip_beta_estimate, GridSpec, Placement, SeminormReport};
use crate::corpus::CorpusFn;
use crate::error::{Error, Result};
use crate::extended::Extended;
use crate::growth::{ell_star, GrowthFn};
use crate::learner::CertifiedMember;
use crate::relu_net::{in_sigma, Layer, Network, SparseMatrix};
use crate::spaces::{quasi_norm, DistanceProfile, SpaceParams};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaParams {
    pub m_prime: f64,
    pub d: usize,
}

impl ZetaParams {
    pub fn new(m_prime: f64, d: usize) -> Result<Self> {
        if !(m_prime >= 1.0 && m_prime.is_finite()) {
            return Err(Error::Precondition(format!("M′ = {m_prime} must be at least 1")));
        }
        if d == 0 {
            return Err(Error::InvalidParams("d must be at least 1".into()));
        }
        Ok(Self { m_prime, d })
    }
}

pub fn zeta_eval(zp: &ZetaParams, x: &[f64]) -> f64 {
    (1.0 - zp.m_prime * x.iter().sum::<f64>()).max(0.0)
}

/// `‖ζ_{M′}‖_{L^p([0,1]^d)}` and the simpler bound `(M′)^{−d/p}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaNorm {
    pub exact: f64,
    pub bound: f64,
}

/// Exact norm `((M′)^{−d} Γ(p+1)/Γ(p+d+1))^{1/p}` from the Dirichlet integral
/// over the simplex `{x ≥ 0, Σ x_i ≤ 1/M′}`; `p = ∞` gives `1`.
pub fn zeta_lp_norm_exact(zp: &ZetaParams, p: Extended) -> Result<ZetaNorm> {
    let p = match p {
        Extended::Infinite => return Ok(ZetaNorm { exact: 1.0, bound: 1.0 }),
        Extended::Finite(p) if p > 0.0 && p.is_finite() => p,
        Extended::Finite(p) => return Err(Error::Domain(format!("p = {p} must be positive"))),
    };
    let d = zp.d as f64;
    let ln_m = zp.m_prime.ln();
    let ln_integral = -d * ln_m + ln_gamma(p + 1.0) - ln_gamma(p + d + 1.0);
    let exact = (ln_integral / p).exp();
    let bound = (-d / p * ln_m).exp();
    debug_assert!(exact <= bound * (1.0 + 1e-12));
    Ok(ZetaNorm { exact, bound })
}

/// `C^L · n^{⌊L/2⌋}`, the largest amplitude the construction reaches.
pub fn zeta_amplitude(c: f64, depth: usize, n: usize) -> f64 {
    c.powi(depth as i32) * (n as f64).powi((depth / 2) as i32)
}

/// Network of depth `L` realizing `(M/M′)·ζ_{M′}` on `ℝ^d` with width `n`,
/// `W ≤ (d+L)·n` and all entries bounded by `C`.
///
/// Layers: `(A₁, b₁), (A, 0)`, then `(B, 0), (A, 0)` pairs, and for odd `L` a
/// final scalar `(D, 0)`, with `A₁ = −C·1_{n×d}`, `b₁ = (C/M′)·1_n`,
/// `A = C·1_{1×n}`, `B = C·1_{n×1}`, `D = [C]`. The last layer is rescaled by
/// `M/μ` where `μ = C^L n^{⌊L/2⌋}`.
pub fn build_zeta_network(d: usize, n: usize, depth: usize, c: f64, m: f64, m_prime: f64) -> Result<Network> {
    if d == 0 || n == 0 {
        return Err(Error::Precondition(format!("d = {d} and n = {n} must be positive")));
    }
    if depth < 2 {
        return Err(Error::Precondition(format!("depth L = {depth} must be at least 2")));
    }
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::Precondition(format!("C = {c} must be finite and non-negative")));
    }
    if !(m_prime >= 1.0 && m_prime.is_finite()) {
        return Err(Error::Precondition(format!("M′ = {m_prime} must be at least 1")));
    }
    let mu = zeta_amplitude(c, depth, n);
    if !(m >= 0.0) || m > mu * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!("M = {m} must lie in [0, C^L n^⌊L/2⌋ = {mu}]")));
    }
    let ratio = if m == 0.0 { 0.0 } else { (m / mu).min(1.0) };

    let first = Layer::new(SparseMatrix::filled(n, d, -c)?, vec![c / m_prime; n])?;
    let collapse = || SparseMatrix::filled(1, n, c).map(Layer::linear);
    let expand = || SparseMatrix::filled(n, 1, c).map(Layer::linear);
    let mut layers = vec![first, collapse()?];
    for _ in 0..(depth - 2) / 2 {
        layers.push(expand()?);
        layers.push(collapse()?);
    }
    if depth % 2 == 1 {
        layers.push(Layer::linear(SparseMatrix::filled(1, 1, c)?));
    }
    Network::new(layers)?.with_output_scale(ratio)
}

/// Working constants of the sequence constructions. Named apart from the
/// space's `α, p` and the growth family's `θ, κ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProofParams {
    pub gamma: f64,
    pub depth: usize,
    /// `limsup_n c(n)^L n^{⌊L/2⌋ − γ}`, or its minimum over the supplied
    /// `n_k` for table coefficients.
    pub c0: Extended,
    /// `min{1, c₀/2}`.
    pub c: f64,
    /// `min{1, c, (d+L)^{−α}}`.
    pub kappa_scale: f64,
    /// Exponent of `M′ = n^θ` in the sup-norm sequence, of `M = κ n^θ` in the Hölder one.
    pub theta: f64,
    pub beta_exp: Option<f64>,
    pub delta1: Option<f64>,
    pub delta2: Option<f64>,
    pub tau: Option<f64>,
    /// Hölder exponent of the target space, for the Hölder sequence.
    pub target_beta: Option<f64>,
}

impl ProofParams {
    /// Predicted growth exponent of the blown-up quantity in `n_k`.
    pub fn growth_exponent(&self) -> f64 {
        match (self.beta_exp, self.tau, self.target_beta) {
            (Some(b), _, _) => b - self.theta,
            (None, Some(tau), Some(beta)) => self.theta - tau * (1.0 - beta),
            _ => f64::NAN,
        }
    }
}

/// One certified function `(M/M′)·ζ_{M′}` of a sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleInstance {
    pub k_index: u32,
    pub n_k: u64,
    pub depth: usize,
    /// The network weight bound `C ≤ c(n_k)`.
    pub c: f64,
    pub m: f64,
    pub m_prime: f64,
    /// `M/M′`, the sup norm.
    pub scale: f64,
    #[serde(skip_serializing, default = "placeholder_net")]
    pub net: Network,
    pub params: SpaceParams,
    pub proof_params: ProofParams,
}

fn placeholder_net() -> Network {
    Network::zero(1).expect("zero network")
}

impl CounterexampleInstance {
    pub fn zeta(&self) -> ZetaParams {
        ZetaParams { m_prime: self.m_prime, d: self.params.d() }
    }

    /// Budget `(d+L)·n_k` at which the network lies in `Σ`.
    pub fn budget(&self) -> u64 {
        (self.params.d() + self.depth) as u64 * self.n_k
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.net.eval_scalar(x)
    }

    /// `‖f‖_{L^p}` computed exactly.
    pub fn lp_norm(&self) -> Result<f64> {
        Ok(self.scale * zeta_lp_norm_exact(&self.zeta(), self.params.p())?.exact)
    }

    /// The same instance with amplitude `M` replaced.
    pub fn with_amplitude(&self, m: f64) -> Result<Self> {
        let net = build_zeta_network(self.params.d(), self.n_k as usize, self.depth, self.c, m, self.m_prime)?;
        Ok(Self { m, scale: m / self.m_prime, net, ..self.clone() })
    }

    /// Distance oracle: `d_p(f, Σ_t) ≤ ‖f‖_p` below the budget and `0` from it on.
    pub fn profile(&self) -> Result<ZetaProfile> {
        Ok(ZetaProfile { lp_norm: self.lp_norm()?, budget: self.budget() })
    }

    /// The instance as a learner corpus member, with its quasi-norm as bound.
    pub fn certified_member(&self, tol: f64) -> Result<CertifiedMember> {
        Ok(CertifiedMember {
            id: format!("k{}-n{}", self.k_index, self.n_k),
            function: CorpusFn::Net { network: self.net.clone() },
            quasi_norm_bound: instance_quasi_norm(self, tol)?,
        })
    }

    /// Lower bound for `Lip_β` from a lattice on `[0, 2/M′]^d` that contains
    /// the pair `(0, e₁/M′)`.
    pub fn lip_beta_estimate<R: Rng + ?Sized>(&self, beta: f64, pair_budget: usize, rng: &mut R) -> Result<SeminormReport> {
        let d = self.params.d();
        let ppa = match d {
            1 => 4097,
            2 => 65,
            _ => 17,
        };
        let grid = GridSpec::new(d, ppa, Placement::Lattice)?.with_side((2.0 / self.m_prime).min(1.0))?;
        lip_beta_estimate(&|x: &[f64]| self.eval(x), beta, &grid, pair_budget, rng)
    }
}

/// Distance oracle for a single function known to lie in `Σ_budget`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaProfile {
    pub lp_norm: f64,
    pub budget: u64,
}

impl DistanceProfile for ZetaProfile {
    fn lp_norm_at(&self, scale: f64) -> f64 {
        self.lp_norm / scale
    }

    fn dist_at(&self, n: u64, scale: f64) -> f64 {
        if n >= self.budget {
            0.0
        } else {
            self.lp_norm / scale
        }
    }
}

/// An index `k` the construction passed over, with the reason.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedIndex {
    pub k_index: u32,
    pub n_k: u64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleSequence {
    pub proof_params: ProofParams,
    pub instances: Vec<CounterexampleInstance>,
    pub skipped: Vec<SkippedIndex>,
}

/// Default subsequence `n_k = 2^{k+3}`.
pub fn default_n_k(k: u32) -> u64 {
    1u64 << (k + 3)
}

const EXPONENT_EPS: f64 = 1e-12;

fn limsup_c0(coeff: &GrowthFn, depth: usize, gamma: f64, n_ks: &[u64]) -> Extended {
    let half = (depth / 2) as f64;
    let l = depth as f64;
    let by_exponent = |e: f64, at_zero: Extended| {
        if e > EXPONENT_EPS {
            Extended::Infinite
        } else if e < -EXPONENT_EPS {
            Extended::ZERO
        } else {
            at_zero
        }
    };
    match coeff {
        GrowthFn::Infinite => Extended::Infinite,
        GrowthFn::Constant { value } => by_exponent(half - gamma, Extended::Finite((*value as f64).powf(l))),
        GrowthFn::PowerLog { theta, kappa } => {
            let at_zero = if *kappa > 0.0 {
                Extended::Infinite
            } else if *kappa < 0.0 {
                Extended::ZERO
            } else {
                Extended::Finite(1.0)
            };
            by_exponent(l * theta + half - gamma, at_zero)
        }
        GrowthFn::Table { .. } => {
            let v = n_ks
                .iter()
                .map(|&n| {
                    let c = coeff.eval(n).to_f64();
                    l * c.ln() + (half - gamma) * (n as f64).ln()
                })
                .fold(f64::INFINITY, f64::min);
            Extended::Finite(v.exp())
        }
    }
}

fn check_depth(params: &SpaceParams, depth: usize) -> Result<()> {
    if depth < 2 {
        return Err(Error::Domain(format!("depth L = {depth} must be at least 2")));
    }
    if Extended::Finite(depth as f64) > ell_star(params.growth()) {
        return Err(Error::Domain(format!("depth L = {depth} exceeds ℓ*")));
    }
    Ok(())
}

fn scaling_constants(params: &SpaceParams, gamma: f64, depth: usize, n_ks: &[u64]) -> Result<(Extended, f64, f64)> {
    let c0 = limsup_c0(params.growth().coeff(), depth, gamma, n_ks);
    if c0 == Extended::ZERO {
        return Err(Error::Domain(format!(
            "c(n)^{depth} n^{} grows slower than n^{gamma}",
            depth / 2
        )));
    }
    let c = c0.finite().map_or(1.0, |v| (v / 2.0).min(1.0));
    let kappa = 1f64.min(c).min(((params.d() + depth) as f64).powf(-params.alpha()));
    Ok((c0, c, kappa))
}

/// Builds the instance at `n_k` with amplitude `M` and `M′`, or says why not.
fn instance_at(
    params: &SpaceParams,
    proof: &ProofParams,
    k: u32,
    n_k: u64,
    m: f64,
    m_prime: f64,
) -> Result<std::result::Result<CounterexampleInstance, String>> {
    let depth = proof.depth;
    let growth = params.growth();
    if growth.depth_at(n_k) < Extended::Finite(depth as f64) {
        return Ok(Err(format!("ℓ({n_k}) < L = {depth}")));
    }
    if m_prime < 1.0 {
        return Ok(Err(format!("M′ = {m_prime} < 1")));
    }
    let half = (n_k as f64).powi((depth / 2) as i32);
    let c = match growth.coeff_at(n_k) {
        Extended::Finite(c) => c,
        Extended::Infinite => (m / half).powf(1.0 / depth as f64).max(1.0),
    };
    let mu = zeta_amplitude(c, depth, n_k as usize);
    if m > mu * (1.0 + 1e-12) {
        return Ok(Err(format!("M = {m} exceeds c(n_k)^L n_k^⌊L/2⌋ = {mu}")));
    }
    let net = build_zeta_network(params.d(), n_k as usize, depth, c, m, m_prime)?;
    Ok(Ok(CounterexampleInstance {
        k_index: k,
        n_k,
        depth,
        c,
        m,
        m_prime,
        scale: m / m_prime,
        net,
        params: params.clone(),
        proof_params: *proof,
    }))
}

fn collect(
    params: &SpaceParams,
    proof: ProofParams,
    k_list: &[u32],
    n_k_of: impl Fn(u32) -> u64,
    amplitudes: impl Fn(f64) -> (f64, f64),
    skip_k1: bool,
) -> Result<CounterexampleSequence> {
    let mut instances = Vec::new();
    let mut skipped = Vec::new();
    for &k in k_list {
        let n_k = n_k_of(k);
        let (m, m_prime) = amplitudes(n_k as f64);
        if skip_k1 && m_prime > m {
            skipped.push(SkippedIndex {
                k_index: k,
                n_k,
                reason: format!("n_k^θ = {m_prime} > κ n_k^β = {m}"),
            });
            continue;
        }
        match instance_at(params, &proof, k, n_k, m, m_prime)? {
            Ok(inst) => instances.push(inst),
            Err(reason) => skipped.push(SkippedIndex { k_index: k, n_k, reason }),
        }
    }
    Ok(CounterexampleSequence { proof_params: proof, instances, skipped })
}

/// Unit-ball functions with unbounded sup norm, for `p < ∞` and `γ > αp/d`.
///
/// `θ = (γ + αp/d)/2`, `δ₁ = θd/p − α`, `δ₂ = γ − θ`, `β = θ + min{δ₁, δ₂}`,
/// `M = κ n_k^β`, `M′ = n_k^θ`, so the sup norm `κ n_k^{β−θ}` diverges.
/// `n_k` defaults to `2^{k+3}`; indices with `n_k^θ > κ n_k^β` are skipped.
pub fn necessary_c_sequence(
    params: &SpaceParams,
    gamma: f64,
    depth: usize,
    k_list: &[u32],
    n_k: Option<&[u64]>,
) -> Result<CounterexampleSequence> {
    let p = params
        .p()
        .finite()
        .ok_or_else(|| Error::Domain("the sup-norm sequence needs p < ∞".into()))?;
    let (alpha, d) = (params.alpha(), params.d() as f64);
    if !(gamma > alpha * p / d) {
        return Err(Error::Domain(format!("γ = {gamma} must exceed αp/d = {}", alpha * p / d)));
    }
    check_depth(params, depth)?;
    let n_of = n_k_lookup(k_list, n_k)?;
    let n_ks: Vec<u64> = k_list.iter().map(|&k| n_of(k)).collect();
    let (c0, c, kappa) = scaling_constants(params, gamma, depth, &n_ks)?;
    let theta = 0.5 * (gamma + alpha * p / d);
    let delta1 = theta * d / p - alpha;
    let delta2 = gamma - theta;
    let beta_exp = theta + delta1.min(delta2);
    let proof = ProofParams {
        gamma,
        depth,
        c0,
        c,
        kappa_scale: kappa,
        theta,
        beta_exp: Some(beta_exp),
        delta1: Some(delta1),
        delta2: Some(delta2),
        tau: None,
        target_beta: None,
    };
    collect(params, proof, k_list, n_of, |n| (kappa * n.powf(beta_exp), n.powf(theta)), true)
}

/// Unit-ball functions with unbounded `Lip_β`, for `γ > α(1−β)/(β + d/p)`,
/// `β ∈ (0, 1]`.
///
/// `τ` is the midpoint of `(α/(β + d/p), γ/(1−β))` (twice the lower end when
/// `β = 1`), `θ` the midpoint of `(τ(1−β), min{γ, τ(1 + d/p) − α})`,
/// `M = κ n_k^θ`, `M′ = n_k^τ`; the seminorm grows like `κ n_k^{θ − τ(1−β)}`.
pub fn necessary_hoelder_sequence(
    params: &SpaceParams,
    beta: f64,
    gamma: f64,
    depth: usize,
    k_list: &[u32],
    n_k: Option<&[u64]>,
) -> Result<CounterexampleSequence> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Domain(format!("β = {beta} not in (0, 1]")));
    }
    let (alpha, dp) = (params.alpha(), params.d_over_p());
    let tau_lo = alpha / (beta + dp);
    let tau = if beta < 1.0 {
        let tau_hi = gamma / (1.0 - beta);
        if !(tau_hi > tau_lo) {
            return Err(Error::Domain(format!(
                "γ = {gamma} must exceed α(1−β)/(β + d/p) = {}",
                alpha * (1.0 - beta) / (beta + dp)
            )));
        }
        0.5 * (tau_lo + tau_hi)
    } else {
        2.0 * tau_lo
    };
    let theta_lo = tau * (1.0 - beta);
    let theta_hi = gamma.min(tau * (1.0 + dp) - alpha);
    if !(theta_hi > theta_lo) {
        return Err(Error::Domain(format!("empty θ-interval ({theta_lo}, {theta_hi})")));
    }
    let theta = 0.5 * (theta_lo + theta_hi);
    check_depth(params, depth)?;
    let n_of = n_k_lookup(k_list, n_k)?;
    let n_ks: Vec<u64> = k_list.iter().map(|&k| n_of(k)).collect();
    let (c0, c, kappa) = scaling_constants(params, gamma, depth, &n_ks)?;
    let proof = ProofParams {
        gamma,
        depth,
        c0,
        c,
        kappa_scale: kappa,
        theta,
        beta_exp: None,
        delta1: None,
        delta2: None,
        tau: Some(tau),
        target_beta: Some(beta),
    };
    collect(params, proof, k_list, n_of, |n| (kappa * n.powf(theta), n.powf(tau)), false)
}

fn n_k_lookup<'a>(k_list: &'a [u32], n_k: Option<&'a [u64]>) -> Result<impl Fn(u32) -> u64 + 'a> {
    if let Some(ns) = n_k {
        if ns.len() != k_list.len() {
            return Err(Error::InvalidParams(format!(
                "{} n_k values for {} indices",
                ns.len(),
                k_list.len()
            )));
        }
        if ns.contains(&0) {
            return Err(Error::InvalidParams("n_k must be positive".into()));
        }
    }
    if k_list.iter().any(|&k| k > 60) {
        return Err(Error::InvalidParams("k above 60 overflows 2^{k+3}".into()));
    }
    Ok(move |k: u32| match n_k {
        Some(ns) => ns[k_list.iter().position(|&x| x == k).expect("k from k_list")],
        None => default_n_k(k),
    })
}

/// Outcome of checking the three unit-ball inequalities for one instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub budget: u64,
    /// The network lies in `Σ_{(d+L) n_k}`.
    pub membership: bool,
    /// `((d+L) n_k)^α · (M/M′) · (M′)^{−d/p}`, bounding `t^α d_p(f, Σ_t)` for `t < (d+L) n_k`.
    pub chain_value: f64,
    /// `((d+L) n_k − 1)^α · ‖f‖_p` with the exact norm.
    pub attained_value: f64,
    pub chain_pass: bool,
    /// `(M/M′) · (M′)^{−d/p} ≥ ‖f‖_p`.
    pub lp_bound: f64,
    pub lp_exact: f64,
    /// `n_k^{−α}`, the intermediate bound on `‖f‖_p`.
    pub n_k_pow_minus_alpha: f64,
    pub lp_pass: bool,
    pub pass: bool,
}

/// Relative slack for floating-point equality cases of the inequality chain.
pub const CERTIFICATE_SLACK: f64 = 1e-9;

/// Checks `f ∈ Σ_{(d+L) n_k}`, `t^α d_p(f, Σ_t) ≤ 1` for smaller `t` and
/// `‖f‖_p ≤ 1`, which together give `Γ(f) ≤ 1`. Failures are reported.
pub fn certify_unit_ball(inst: &CounterexampleInstance) -> Certificate {
    let params = &inst.params;
    let budget = inst.budget();
    let membership = in_sigma(&inst.net, budget, params.growth(), params.d());
    let alpha = params.alpha();
    let lp_bound = inst.scale * (inst.m_prime).powf(-params.d_over_p());
    let lp_exact = inst.lp_norm().unwrap_or(f64::NAN);
    let chain_value = (budget as f64).powf(alpha) * lp_bound;
    let attained_value = ((budget - 1) as f64).powf(alpha) * lp_exact;
    let chain_pass = chain_value <= 1.0 + CERTIFICATE_SLACK && attained_value <= chain_value;
    let lp_pass = lp_exact <= lp_bound && lp_bound <= 1.0 + CERTIFICATE_SLACK;
    Certificate {
        budget,
        membership,
        chain_value,
        attained_value,
        chain_pass,
        lp_bound,
        lp_exact,
        n_k_pow_minus_alpha: (inst.n_k as f64).powf(-alpha),
        lp_pass,
        pass: membership && chain_pass && lp_pass,
    }
}

/// Quasi-norm of an instance from its exact distance profile.
pub fn instance_quasi_norm(inst: &CounterexampleInstance, tol: f64) -> Result<f64> {
    let profile = inst.profile()?;
    quasi_norm(&profile, &inst.params, profile.budget, tol)
}

/// A unit-ball member `(M/M′)·ζ_{M′}` at width `n` with `M = C^L n^{⌊L/2⌋}`
/// (`C = c(n)`) and `M′` chosen so that `((d+L)n)^α (M/M′)(M′)^{−d/p} = 1`.
/// When that `M′` would fall below 1, `M′ = 1` and `M` is lowered instead.
pub fn unit_ball_zeta(params: &SpaceParams, n: u64, depth: usize, tol: f64) -> Result<(CertifiedMember, Network)> {
    check_depth(params, depth)?;
    let c = params
        .growth()
        .coeff_at(n)
        .finite()
        .ok_or_else(|| Error::Domain("unit-ball members need finite c(n)".into()))?;
    if params.growth().depth_at(n) < Extended::Finite(depth as f64) {
        return Err(Error::Domain(format!("ℓ({n}) < L = {depth}")));
    }
    let budget = ((params.d() + depth) as u64 * n) as f64;
    let expo = 1.0 + params.d_over_p();
    let reach = budget.powf(params.alpha());
    let mu = zeta_amplitude(c, depth, n as usize);
    let m_prime = (reach * mu).powf(1.0 / expo).max(1.0);
    let m = mu.min(m_prime.powf(expo) / reach);
    let net = build_zeta_network(params.d(), n as usize, depth, c, m, m_prime)?;
    let inst = CounterexampleInstance {
        k_index: 0,
        n_k: n,
        depth,
        c,
        m,
        m_prime,
        scale: m / m_prime,
        net: net.clone(),
        params: params.clone(),
        proof_params: ProofParams {
            gamma: f64::NAN,
            depth,
            c0: Extended::ZERO,
            c: 0.0,
            kappa_scale: 1.0,
            theta: 0.0,
            beta_exp: None,
            delta1: None,
            delta2: None,
            tau: None,
            target_beta: None,
        },
    };
    let cert = certify_unit_ball(&inst);
    if !cert.pass {
        return Err(Error::Precondition(format!("unit-ball certificate failed at n = {n}: {cert:?}")));
    }
    let member = CertifiedMember { id: format!("zeta-n{n}"), ..inst.certified_member(tol)? };
    Ok((member, net))
}
