use nnapprox::analysis::lipschitz_audit;
use nnapprox::corpus::CorpusFn;
use nnapprox::counterexample::{
    certify_unit_ball, instance_quasi_norm, necessary_c_sequence, necessary_hoelder_sequence, unit_ball_zeta,
};
use nnapprox::growth::{ell_star, estimate_gamma_diamond, estimate_gamma_star, gamma_diamond, gamma_star, has_closed_form};
use nnapprox::learner::{fit_rate, learner_sup_error, optimality_report, CertifiedMember, RateFit};
use nnapprox::regression::log_log_slope;
use nnapprox::spaces::{
    embedding_verdict_c, embedding_verdict_hoelder, optimal_sampling_rate, secondary_embedding_exponent, Verdict,
};
use nnapprox::{Extended, GammaValue};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::artifacts::Artifacts;
use crate::config::ExperimentConfig;
use crate::error::CliError;

/// What a command found: its report section and whether its check held.
pub struct Outcome {
    pub result: Value,
    pub check: Option<String>,
    pub pass: bool,
}

impl Outcome {
    fn info(result: Value) -> Self {
        Self { result, check: None, pass: true }
    }
}

const DEFAULT_DEPTH: usize = 2;
const DEFAULT_PAIR_BUDGET: usize = 2000;
const QUASI_NORM_TOL: f64 = 1e-9;

fn default_k_list() -> Vec<u32> {
    (1..=6).collect()
}

fn default_m_list() -> Vec<u64> {
    (4..=14).map(|k| 1u64 << k).collect()
}

fn default_zeta_widths() -> Vec<u64> {
    (0..=8).map(|j| 1u64 << j).collect()
}

#[derive(Serialize)]
struct GrowthRow {
    n: u64,
    depth: Extended,
    coeff: Extended,
}

pub fn gamma(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<Outcome, CliError> {
    let g = cfg.growth()?;
    let probe = cfg.probe_limit();
    let star = gamma_star(g, probe)?;
    let diamond = gamma_diamond(g, probe)?;
    let rows: Vec<GrowthRow> = std::iter::successors(Some(1u64), |n| n.checked_mul(2))
        .take_while(|&n| n <= probe)
        .map(|n| GrowthRow { n, depth: g.depth_at(n), coeff: g.coeff_at(n) })
        .collect();
    out.csv("growth.csv", &rows)?;
    Ok(Outcome::info(json!({
        "gamma_star": star,
        "gamma_diamond": diamond,
        "ell_star": ell_star(g),
        "closed_form": has_closed_form(g),
        "numeric_gamma_star": estimate_gamma_star(g, probe)?,
        "numeric_gamma_diamond": estimate_gamma_diamond(g, probe)?,
        "probe_limit": probe,
    })))
}

#[derive(Serialize)]
struct VerdictRow {
    target: String,
    kind: nnapprox::spaces::VerdictKind,
    threshold: Extended,
    comparison: f64,
    margin: f64,
    gamma_star: Extended,
    estimated: bool,
}

impl VerdictRow {
    fn new(target: String, v: &Verdict) -> Self {
        Self {
            target,
            kind: v.kind,
            threshold: v.threshold,
            comparison: v.comparison,
            margin: v.margin,
            gamma_star: v.gamma_star,
            estimated: v.estimated,
        }
    }
}

pub fn verdict(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<Outcome, CliError> {
    let params = cfg.space_params()?;
    let g = params.growth();
    let star = gamma_star(g, cfg.probe_limit())?;
    let c = embedding_verdict_c(&params, star, cfg.tolerance)?;
    let mut rows = vec![VerdictRow::new("C".into(), &c)];
    let hoelder = match cfg.beta {
        Some(beta) => {
            let v = embedding_verdict_hoelder(&params, beta, star, cfg.tolerance)?;
            rows.push(VerdictRow::new(format!("C^{{0,{beta}}}"), &v));
            Some(v)
        }
        None => None,
    };
    out.csv("verdicts.csv", &rows)?;
    let secondary = star
        .value
        .finite()
        .and_then(|gs| secondary_embedding_exponent(&params, gs).ok());
    let rate = optimal_sampling_rate(params.alpha(), params.d(), star.value, ell_star(g));
    Ok(Outcome::info(json!({
        "gamma_star": star,
        "verdict_c": c,
        "verdict_hoelder": hoelder,
        "beta": cfg.beta,
        "secondary_exponent": secondary,
        "optimal_sampling_rate": rate,
    })))
}

#[derive(Serialize)]
struct InstanceRow {
    k: u32,
    n_k: u64,
    budget: u64,
    depth: usize,
    c: f64,
    m: f64,
    m_prime: f64,
    sup_norm: f64,
    lp_exact: f64,
    chain_value: f64,
    quasi_norm: f64,
    lip_beta: Option<f64>,
    certified: bool,
}

fn finite_gamma(cfg: &ExperimentConfig, star: GammaValue) -> Result<f64, CliError> {
    match cfg.gamma {
        Some(g) => Ok(g),
        None => star.value.finite().ok_or_else(|| {
            nnapprox::Error::Precondition("γ* is infinite; set `gamma` to pick a finite growth exponent".into()).into()
        }),
    }
}

pub fn counterexample(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng, out: &mut Artifacts) -> Result<Outcome, CliError> {
    let params = cfg.space_params()?;
    let star = gamma_star(params.growth(), cfg.probe_limit())?;
    let gamma = finite_gamma(cfg, star)?;
    let depth = cfg.depth.unwrap_or(DEFAULT_DEPTH);
    let k_list = cfg.k_list.clone().unwrap_or_else(default_k_list);
    let n_k = cfg.n_k.as_deref();
    let seq = match cfg.beta {
        Some(beta) => necessary_hoelder_sequence(&params, beta, gamma, depth, &k_list, n_k)?,
        None => necessary_c_sequence(&params, gamma, depth, &k_list, n_k)?,
    };
    let pp = seq.proof_params;
    let pair_budget = cfg.pair_budget.unwrap_or(DEFAULT_PAIR_BUDGET);
    let mut rows = Vec::with_capacity(seq.instances.len());
    let mut certificates = Vec::with_capacity(seq.instances.len());
    for inst in &seq.instances {
        let cert = certify_unit_ball(inst);
        let lip_beta = match cfg.beta {
            Some(beta) => Some(inst.lip_beta_estimate(beta, pair_budget, rng)?.value),
            None => None,
        };
        rows.push(InstanceRow {
            k: inst.k_index,
            n_k: inst.n_k,
            budget: cert.budget,
            depth: inst.depth,
            c: inst.c,
            m: inst.m,
            m_prime: inst.m_prime,
            sup_norm: inst.scale,
            lp_exact: cert.lp_exact,
            chain_value: cert.chain_value,
            quasi_norm: instance_quasi_norm(inst, QUASI_NORM_TOL)?,
            lip_beta,
            certified: cert.pass,
        });
        out.raw(format!("networks/k{}-n{}.json", inst.k_index, inst.n_k), inst.net.to_json()?.into_bytes());
        certificates.push(json!({ "k": inst.k_index, "certificate": cert }));
    }
    out.csv("instances.csv", &rows)?;

    let label = if cfg.beta.is_some() { "Lip_beta" } else { "sup_norm" };
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.n_k as f64, r.lip_beta.unwrap_or(r.sup_norm)))
        .collect();
    let observed = slope(&pts)?;
    let pass = !rows.is_empty() && rows.iter().all(|r| r.certified);
    Ok(Outcome {
        result: json!({
            "gamma": gamma,
            "gamma_star": star,
            "target": if cfg.beta.is_some() { "hoelder" } else { "sup" },
            "proof_params": pp,
            "certificates": certificates,
            "skipped": seq.skipped,
            "growth_quantity": label,
            "observed_slope": observed,
            "predicted_slope": pp.growth_exponent(),
        }),
        check: Some("every instance passes its unit-ball certificate".into()),
        pass,
    })
}

fn slope(pts: &[(f64, f64)]) -> Result<Option<f64>, CliError> {
    if pts.len() < 2 {
        return Ok(None);
    }
    Ok(Some(log_log_slope(pts)?))
}

#[derive(Serialize)]
struct RateRow {
    id: String,
    exponent: Extended,
    intercept: f64,
    max_residual: f64,
    points_used: usize,
    degenerate: bool,
}

impl RateRow {
    fn new(id: String, f: &RateFit) -> Self {
        Self {
            id,
            exponent: f.exponent,
            intercept: f.intercept,
            max_residual: f.max_residual,
            points_used: f.points_used,
            degenerate: f.degenerate,
        }
    }
}

#[derive(Serialize)]
struct ErrorCsvRow {
    id: String,
    m: u64,
    n: usize,
    sup_error: f64,
}

pub fn learner_rate(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<Outcome, CliError> {
    let params = cfg.space_params()?;
    let d = params.d();
    let star = gamma_star(params.growth(), cfg.probe_limit())?;
    let m_list = cfg.m_list.clone().unwrap_or_else(default_m_list);
    let depth = cfg.depth.unwrap_or(DEFAULT_DEPTH);
    let widths = cfg.zeta_widths.clone().unwrap_or_else(default_zeta_widths);

    let mut members: Vec<CertifiedMember> = Vec::with_capacity(widths.len());
    for &n in &widths {
        let (member, net) = unit_ball_zeta(&params, n, depth, QUASI_NORM_TOL)?;
        out.raw(format!("networks/{}.json", member.id), net.to_json()?.into_bytes());
        members.push(member);
    }
    let report = optimality_report(&params, star, &members, &m_list)?;
    let mut errors: Vec<ErrorCsvRow> = report
        .rows
        .iter()
        .map(|r| ErrorCsvRow { id: r.id.clone(), m: r.m, n: r.n, sup_error: r.sup_error })
        .collect();
    errors.extend(report.worst.iter().map(|&(m, e)| ErrorCsvRow { id: "worst".into(), m, n: 0, sup_error: e }));

    let mut rates = vec![RateRow::new("worst".into(), &report.fit)];
    for name in cfg.corpus.iter().flatten() {
        let f = CorpusFn::parse(name)?;
        if let Some(fd) = f.input_dim() {
            if fd != d {
                return Err(nnapprox::Error::DimensionMismatch { expected: d, got: fd }.into());
            }
        }
        let mut pts = Vec::with_capacity(m_list.len());
        for &m in &m_list {
            let e = learner_sup_error(&|x: &[f64]| f.eval(x), m, d, None)?;
            let n = nnapprox::learner::integer_root(m, d).saturating_sub(1) as usize;
            errors.push(ErrorCsvRow { id: name.clone(), m, n, sup_error: e });
            pts.push((m as f64, e));
        }
        rates.push(RateRow::new(name.clone(), &fit_rate(&pts)?));
    }
    out.csv("errors.csv", &errors)?;
    out.csv("rates.csv", &rates)?;
    Ok(Outcome {
        result: json!({
            "gamma_star": star,
            "members": members,
            "fit": report.fit,
            "predicted_rate": report.predicted_rate,
            "worst": report.worst,
            "corpus_rates": rates.iter().skip(1).map(|r| json!({"id": r.id, "exponent": r.exponent})).collect::<Vec<_>>(),
        }),
        check: Some(report.check),
        pass: report.pass,
    })
}

pub fn audit(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng, out: &mut Artifacts) -> Result<Outcome, CliError> {
    let spec = cfg.audit.unwrap_or_default();
    let report = lipschitz_audit(&spec, rng)?;
    out.csv("audit.csv", &report.rows)?;
    Ok(Outcome {
        result: json!({
            "spec": spec,
            "nets": report.rows.len(),
            "pairs_checked": report.pairs_checked,
            "violations": report.violations,
            "worst_ratio": report.worst_ratio,
        }),
        check: Some("no sampled difference quotient exceeds d·C^L·n^⌊L/2⌋".into()),
        pass: report.violations == 0,
    })
}
