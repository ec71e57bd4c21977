//! JSON-in, JSON-out bindings for the static demo page in `www/`.
//!
//! Every export takes a JSON request string and returns a JSON string; errors
//! come back as `{"error": "..."}` so the page never has to catch exceptions.

use nnapprox::corpus::CorpusFn;
use nnapprox::counterexample::{
    certify_unit_ball, instance_quasi_norm, necessary_c_sequence, necessary_hoelder_sequence,
};
use nnapprox::growth::{ell_star, gamma_star};
use nnapprox::learner::{fit_pw_const, fit_rate, learner_sup_error};
use nnapprox::spaces::{embedding_verdict_c, embedding_verdict_hoelder, optimal_sampling_rate};
use nnapprox::{Error, Extended, GrowthPair, Result, SpaceParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

const PROBE_LIMIT: u64 = 10_000;
const CURVE_POINTS: usize = 400;
const MAX_BUDGET: u64 = 1 << 20;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Space {
    alpha: f64,
    p: Extended,
    d: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExploreRequest {
    space: Space,
    growth: GrowthPair,
    #[serde(default)]
    beta: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpikeRequest {
    space: Space,
    growth: GrowthPair,
    gamma: f64,
    #[serde(default = "two")]
    depth: usize,
    k_list: Vec<u32>,
    #[serde(default)]
    beta: Option<f64>,
    #[serde(default)]
    seed: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LearnerRequest {
    function: String,
    d: usize,
    m_list: Vec<u64>,
}

fn two() -> usize {
    2
}

fn params(s: &Space, g: GrowthPair) -> Result<SpaceParams> {
    SpaceParams::new(s.alpha, s.p, s.d, g)
}

/// `γ*`, `ℓ*`, the embedding verdicts and the optimal sampling rate.
pub fn explore_value(req: ExploreRequest) -> Result<Value> {
    let params = params(&req.space, req.growth)?;
    let star = gamma_star(params.growth(), PROBE_LIMIT)?;
    let ell = ell_star(params.growth());
    let c = embedding_verdict_c(&params, star, None)?;
    let hoelder = req
        .beta
        .map(|b| embedding_verdict_hoelder(&params, b, star, None))
        .transpose()?;
    Ok(json!({
        "gamma_star": star,
        "ell_star": ell,
        "verdict_c": c,
        "verdict_hoelder": hoelder,
        "optimal_sampling_rate": optimal_sampling_rate(params.alpha(), params.d(), star.value, ell),
    }))
}

/// A certified spike sequence, plus the first instance's profile along the
/// diagonal `x = t·(1, …, 1)` for plotting.
pub fn spike_value(req: SpikeRequest) -> Result<Value> {
    let params = params(&req.space, req.growth)?;
    let seq = match req.beta {
        Some(b) => necessary_hoelder_sequence(&params, b, req.gamma, req.depth, &req.k_list, None)?,
        None => necessary_c_sequence(&params, req.gamma, req.depth, &req.k_list, None)?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
    let mut rows = Vec::with_capacity(seq.instances.len());
    for inst in &seq.instances {
        let cert = certify_unit_ball(inst);
        let lip_beta = match req.beta {
            Some(b) => Some(inst.lip_beta_estimate(b, 500, &mut rng)?.value),
            None => None,
        };
        rows.push(json!({
            "k": inst.k_index,
            "n_k": inst.n_k,
            "weights": inst.net.weight_count(),
            "m_prime": inst.m_prime,
            "sup_norm": inst.scale,
            "lip_beta": lip_beta,
            "quasi_norm": instance_quasi_norm(inst, 1e-9)?,
            "certified": cert.pass,
        }));
    }
    let profile = seq.instances.first().map(|inst| {
        let d = params.d();
        let reach = 1.5 / (inst.m_prime * d as f64);
        (0..=CURVE_POINTS)
            .map(|i| {
                let t = reach * i as f64 / CURVE_POINTS as f64;
                [t, inst.eval(&vec![t; d])]
            })
            .collect::<Vec<_>>()
    });
    Ok(json!({
        "proof_params": seq.proof_params,
        "instances": rows,
        "skipped": seq.skipped,
        "profile": profile,
    }))
}

/// Learner error per budget, the fitted rate, and `f` against the model at
/// the largest budget along the first axis.
pub fn learner_value(req: LearnerRequest) -> Result<Value> {
    let f = CorpusFn::parse(&req.function)?;
    if let CorpusFn::Net { .. } = f {
        return Err(Error::InvalidParams("network files are not available in the browser".into()));
    }
    let d = req.d;
    if let Some(&m) = req.m_list.iter().find(|&&m| m > MAX_BUDGET) {
        return Err(Error::Budget(format!("m = {m} exceeds the demo limit {MAX_BUDGET}")));
    }
    let eval = |x: &[f64]| f.eval(x);
    let errors = req
        .m_list
        .iter()
        .map(|&m| Ok((m as f64, learner_sup_error(&eval, m, d, None)?)))
        .collect::<Result<Vec<_>>>()?;
    let fit = if errors.len() >= 3 { Some(fit_rate(&errors)?) } else { None };
    let m_top = req.m_list.iter().copied().max().ok_or_else(|| Error::InsufficientData("empty m_list".into()))?;
    let model = fit_pw_const(&eval, m_top, d)?;
    let curve: Vec<[f64; 3]> = (0..=CURVE_POINTS)
        .map(|i| {
            let mut x = vec![0.0; d];
            x[0] = i as f64 / CURVE_POINTS as f64;
            [x[0], f.eval(&x), model.eval(&x)]
        })
        .collect();
    Ok(json!({ "function": f.to_string(), "errors": errors, "fit": fit, "curve": curve }))
}

fn respond<T, F>(request: &str, f: F) -> String
where
    T: for<'de> Deserialize<'de>,
    F: FnOnce(T) -> Result<Value>,
{
    let out = serde_json::from_str::<T>(request)
        .map_err(Error::from)
        .and_then(f)
        .unwrap_or_else(|e| json!({ "error": e.to_string() }));
    out.to_string()
}

#[wasm_bindgen]
pub fn explore(request: &str) -> String {
    respond(request, explore_value)
}

#[wasm_bindgen]
pub fn spike(request: &str) -> String {
    respond(request, spike_value)
}

#[wasm_bindgen]
pub fn learner_curve(request: &str) -> String {
    respond(request, learner_value)
}
