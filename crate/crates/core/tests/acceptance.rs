//! The ten acceptance criteria, one PASS/FAIL line each.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nnapprox::analysis::{lipschitz_audit, lp_norm, sup_norm, GridSpec, LipschitzAuditSpec, Placement};
use nnapprox::corpus::{geometric_ramp_sequence, CorpusFn};
use nnapprox::counterexample::{
    build_zeta_network, certify_unit_ball, necessary_c_sequence, necessary_hoelder_sequence, zeta_amplitude,
    zeta_eval, zeta_lp_norm_exact, ZetaParams,
};
use nnapprox::growth::{ell_star, estimate_gamma_star, gamma_diamond, gamma_star};
use nnapprox::learner::{fit_rate, learner_sup_error};
use nnapprox::regression::log_log_slope;
use nnapprox::spaces::{
    embedding_verdict_c, embedding_verdict_hoelder, optimal_sampling_rate, secondary_embedding_exponent,
    uniform_cauchy_check, VerdictKind,
};
use nnapprox::{Extended, GammaValue, GrowthFn, GrowthPair, Result, SpaceParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn pair(depth: GrowthFn, coeff: GrowthFn) -> GrowthPair {
    GrowthPair::new(depth, coeff).expect("valid growth")
}

fn space(alpha: f64, p: Extended, d: usize, growth: GrowthPair) -> SpaceParams {
    SpaceParams::new(alpha, p, d, growth).expect("valid space")
}

const PROBE: u64 = 100_000;

fn parametric_families() -> Vec<(f64, u64, f64)> {
    let mut out = Vec::new();
    for theta in [0.0, 0.5, 1.0, 2.0] {
        for ell in 2..=5u64 {
            for kappa in [-1.0, 0.0, 1.0] {
                out.push((theta, ell, kappa));
            }
        }
    }
    out
}

fn c1_gamma_closed_form() -> Result<Outcome> {
    let mut worst_estimate = 0.0f64;
    let mut exact_ok = true;
    for (theta, ell, kappa) in parametric_families() {
        let g = pair(GrowthFn::constant(ell), GrowthFn::power_log(theta, kappa));
        let want = theta * ell as f64 + (ell / 2) as f64;
        let got = gamma_star(&g, PROBE)?;
        exact_ok &= got == GammaValue::exact(Extended::Finite(want));
        let est = estimate_gamma_star(&g, PROBE)?.to_f64();
        worst_estimate = worst_estimate.max((est - want).abs());
    }
    outcome(
        exact_ok && worst_estimate <= 0.05,
        format!("48 families exact: {exact_ok}, worst numeric deviation {worst_estimate:.4} (tol 0.05)"),
    )
}

fn c2_gamma_equality() -> Result<Outcome> {
    let mut equal = true;
    for (theta, ell, kappa) in parametric_families() {
        let g = pair(GrowthFn::constant(ell), GrowthFn::power_log(theta, kappa));
        equal &= gamma_star(&g, PROBE)? == gamma_diamond(&g, PROBE)?;
        let c = pair(GrowthFn::constant(ell), GrowthFn::constant(1 + ell));
        equal &= gamma_star(&c, PROBE)? == gamma_diamond(&c, PROBE)?;
    }
    let mut infinite = true;
    for coeff in [GrowthFn::constant(1), GrowthFn::power_log(1.0, 0.0), GrowthFn::Infinite] {
        let g = pair(GrowthFn::Infinite, coeff);
        infinite &= gamma_star(&g, PROBE)?.value.is_infinite() && gamma_diamond(&g, PROBE)?.value.is_infinite();
    }
    outcome(equal && infinite, format!("γ* = γ◊ on all families: {equal}; ℓ* = ∞ gives ∞: {infinite}"))
}

fn c3_construction_identity() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut budget_ok = true;
    for _ in 0..50 {
        let d = rng.random_range(1..=3usize);
        let n = rng.random_range(1..=16usize);
        let depth = rng.random_range(2..=6usize);
        let c = rng.random_range(0.0..=4.0f64);
        let m = rng.random_range(0.0..=1.0) * zeta_amplitude(c, depth, n);
        let m_prime = rng.random_range(1.0..=32.0f64);
        let net = build_zeta_network(d, n, depth, c, m, m_prime)?;
        let zp = ZetaParams::new(m_prime, d)?;
        budget_ok &= net.weight_count() <= (d + depth) * n && net.weight_magnitude() <= c;
        for _ in 0..100 {
            let x: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            // Bias toward the support so the spike itself is exercised.
            let x: Vec<f64> = if rng.random_bool(0.5) { x.iter().map(|v| v / (m_prime * d as f64)).collect() } else { x };
            let want = m / m_prime * zeta_eval(&zp, &x);
            let got = net.realize(&x)?[0];
            worst = worst.max((got - want).abs() / want.abs().max(1.0));
        }
    }
    outcome(
        worst <= 1e-10 && budget_ok,
        format!("worst scaled deviation {worst:.2e} (tol 1e-10); W ≤ (d+L)n and m ≤ C: {budget_ok}"),
    )
}

fn c4_exact_norm() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut below_bound = true;
    for d in [1usize, 2] {
        let grid = match d {
            1 => GridSpec::new(1, 1 << 16, Placement::CellCenters)?,
            _ => GridSpec::new(2, 2048, Placement::CellCenters)?,
        };
        for p in [0.5, 1.0, 2.0] {
            for m_prime in [1.0, 2.0, 4.0] {
                let zp = ZetaParams::new(m_prime, d)?;
                let norm = zeta_lp_norm_exact(&zp, p.into())?;
                let quad = lp_norm(&|x: &[f64]| zeta_eval(&zp, x), p.into(), &grid)?;
                worst = worst.max((quad - norm.exact).abs());
                below_bound &= norm.exact <= norm.bound;
            }
        }
    }
    outcome(
        worst <= 1e-3 && below_bound,
        format!("worst |exact − quadrature| {worst:.2e} (tol 1e-3); exact ≤ (M′)^(−d/p): {below_bound}"),
    )
}

fn c5_lipschitz_audit() -> Result<Outcome> {
    let report = lipschitz_audit(&LipschitzAuditSpec::default(), &mut ChaCha8Rng::seed_from_u64(5))?;
    outcome(
        report.violations == 0 && report.rows.len() == 1000,
        format!(
            "{} nets × {} pairs, {} violations, worst quotient/bound {:.3}",
            report.rows.len(),
            report.pairs_checked / report.rows.len().max(1),
            report.violations,
            report.worst_ratio
        ),
    )
}

fn c6_sup_norm_growth() -> Result<Outcome> {
    let s = space(1.0, 1.0.into(), 1, pair(GrowthFn::constant(2), GrowthFn::power_log(1.0, 0.0)));
    let ks: Vec<u32> = (1..=9).collect();
    let seq = necessary_c_sequence(&s, 3.0, 2, &ks, None)?;
    let grid = GridSpec::new(1, 4097, Placement::Lattice)?;
    let mut certified = seq.skipped.is_empty() && seq.instances.len() == ks.len();
    let mut points = Vec::new();
    for inst in &seq.instances {
        certified &= certify_unit_ball(inst).pass;
        points.push((inst.n_k as f64, sup_norm(&|x: &[f64]| inst.eval(x), &grid)?));
    }
    let slope = log_log_slope(&points)?;
    let predicted = seq.proof_params.growth_exponent();
    outcome(
        certified && (slope - 1.0).abs() <= 0.05,
        format!("n_k = 2^4..2^12 all certified: {certified}; sup-norm slope {slope:.4} (predicted {predicted})"),
    )
}

fn c7_hoelder_growth() -> Result<Outcome> {
    let s = space(1.0, Extended::Infinite, 1, pair(GrowthFn::constant(2), GrowthFn::power_log(1.0, 0.0)));
    let ks: Vec<u32> = (1..=9).collect();
    let seq = necessary_hoelder_sequence(&s, 0.5, 3.0, 2, &ks, None)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut certified = seq.skipped.is_empty() && seq.instances.len() == ks.len();
    let mut points = Vec::new();
    for inst in &seq.instances {
        certified &= certify_unit_ball(inst).pass;
        points.push((inst.n_k as f64, inst.lip_beta_estimate(0.5, 1000, &mut rng)?.value));
    }
    let slope = log_log_slope(&points)?;
    let pp = seq.proof_params;
    outcome(
        certified && (slope - 0.5).abs() <= 0.05,
        format!(
            "τ = {}, θ = {}; all certified: {certified}; Lip_β slope {slope:.4} (predicted {})",
            pp.tau.unwrap_or(f64::NAN),
            pp.theta,
            pp.growth_exponent()
        ),
    )
}

fn c8_verdict_table() -> Result<Outcome> {
    let g = || pair(GrowthFn::constant(3), GrowthFn::power_log(1.0, 0.0));
    let exact = |v: f64| GammaValue::exact(Extended::Finite(v));
    let cases = [
        (embedding_verdict_c(&space(5.0, 2.0.into(), 1, g()), exact(4.0), None)?.kind, VerdictKind::Embeds),
        (embedding_verdict_c(&space(1.0, 2.0.into(), 1, g()), exact(4.0), None)?.kind, VerdictKind::Fails),
        (embedding_verdict_c(&space(2.0, 2.0.into(), 1, g()), exact(4.0), None)?.kind, VerdictKind::Critical),
        (
            embedding_verdict_hoelder(&space(5.0, Extended::Infinite, 1, g()), 0.5, exact(4.0), None)?.kind,
            VerdictKind::Embeds,
        ),
        (
            embedding_verdict_hoelder(&space(3.0, Extended::Infinite, 1, g()), 0.5, exact(4.0), None)?.kind,
            VerdictKind::Fails,
        ),
        (
            embedding_verdict_hoelder(
                &space(7.0, Extended::Infinite, 1, g()),
                0.5,
                GammaValue::exact(Extended::Infinite),
                None,
            )?
            .kind,
            VerdictKind::Fails,
        ),
    ];
    let matched = cases.iter().filter(|(got, want)| got == want).count();
    outcome(matched == cases.len(), format!("{matched}/6 verdicts as listed"))
}

fn c9_learner_rate() -> Result<Outcome> {
    let budgets: Vec<u64> = (4..=14).map(|k| 1u64 << k).collect();
    let rate = |f: &CorpusFn| -> Result<f64> {
        let pts = budgets
            .iter()
            .map(|&m| Ok((m as f64, learner_sup_error(&|x: &[f64]| f.eval(x), m, 1, None)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(fit_rate(&pts)?.exponent.to_f64())
    };
    let hoelder = rate(&CorpusFn::Cusp)?;
    let affine = rate(&CorpusFn::Affine { a: 2.0, b: -0.5 })?;
    let g = pair(GrowthFn::constant(2), GrowthFn::constant(1));
    let predicted = optimal_sampling_rate(1.0, 1, gamma_star(&g, PROBE)?.value, ell_star(&g));
    outcome(
        (hoelder - 0.5).abs() <= 0.05 && (affine - 1.0).abs() <= 0.05,
        format!("Hölder-1/2 exponent {hoelder:.4}, affine exponent {affine:.4}; predicted optimal rate {predicted}"),
    )
}

fn c10_uniform_cauchy() -> Result<Outcome> {
    let s = space(1.0, 2.0.into(), 1, pair(GrowthFn::constant(2), GrowthFn::constant(1)));
    let nets = geometric_ramp_sequence(1, 4..=13)?;
    let grid = GridSpec::new(1, 4097, Placement::Lattice)?;
    let report = uniform_cauchy_check(&nets, 4, &s, 1.0, &grid)?;
    let mu = secondary_embedding_exponent(&s, 1.0)?;
    outcome(
        report.pass && report.budget_violations.is_empty(),
        format!(
            "decay exponent {:.4} vs μ − 0.1 = {:.4}; budget violations {:?}",
            report.fit.exponent.to_f64(),
            mu - 0.1,
            report.budget_violations
        ),
    )
}

type Criterion = (u32, &'static str, u64, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "gamma* closed form and numeric estimate", 5, c1_gamma_closed_form),
        (2, "gamma* = gamma-diamond", 1, c2_gamma_equality),
        (3, "spike network identity", 5, c3_construction_identity),
        (4, "exact spike L^p norm", 10, c4_exact_norm),
        (5, "network Lipschitz bound audit", 30, c5_lipschitz_audit),
        (6, "sup-norm blow-up sequence", 20, c6_sup_norm_growth),
        (7, "Hoelder blow-up sequence", 30, c7_hoelder_growth),
        (8, "embedding verdict table", 1, c8_verdict_table),
        (9, "learner rates", 20, c9_learner_rate),
        (10, "uniform Cauchy check", 10, c10_uniform_cauchy),
    ];
    let mut failures = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(budget);
        let (pass, detail) = match result {
            Ok(o) => (o.pass && !over, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let timing = format!("{:.2}s of {budget}s{}", elapsed.as_secs_f64(), if over { ", over budget" } else { "" });
        println!(
            "acceptance {id:>2} {}: {name}: {detail} [{timing}]",
            if pass { "PASS" } else { "FAIL" }
        );
        if !pass {
            failures += 1;
        }
    }
    if failures == 0 {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criteria failed");
        ExitCode::FAILURE
    }
}
