use nnapprox::analysis::{GridSpec, Placement};
use nnapprox::corpus::CorpusFn;
use nnapprox::counterexample::{
    certify_unit_ball, instance_quasi_norm, necessary_c_sequence, necessary_hoelder_sequence, unit_ball_zeta, zeta_eval,
};
use nnapprox::learner::{fit_rate, learner_sup_error, optimality_report, CertifiedMember};
use nnapprox::relu_net::in_sigma;
use nnapprox::spaces::uniform_cauchy_check;
use nnapprox::{Extended, GammaValue, GrowthFn, GrowthPair, SpaceParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn space(alpha: f64, p: Extended, d: usize, depth: GrowthFn, coeff: GrowthFn) -> SpaceParams {
    SpaceParams::new(alpha, p, d, GrowthPair::new(depth, coeff).unwrap()).unwrap()
}

fn sup_blowup_params() -> SpaceParams {
    space(1.0, 1.0.into(), 1, GrowthFn::constant(2), GrowthFn::power_log(1.0, 0.0))
}

#[test]
fn instances_realize_their_spikes_within_budget() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let c_params = space(1.0, 2.0.into(), 2, GrowthFn::constant(3), GrowthFn::power_log(1.0, 0.0));
    let h_params = space(1.0, 1.0.into(), 1, GrowthFn::constant(2), GrowthFn::power_log(1.0, 0.0));
    let seqs = [
        necessary_c_sequence(&c_params, 2.0, 3, &[1, 2, 3], None).unwrap(),
        necessary_hoelder_sequence(&h_params, 0.5, 3.0, 2, &[1, 2, 3, 4], None).unwrap(),
    ];
    for seq in &seqs {
        assert!(!seq.instances.is_empty());
        for inst in &seq.instances {
            let d = inst.params.d();
            assert_eq!(inst.budget(), (d + inst.depth) as u64 * inst.n_k);
            assert!(in_sigma(&inst.net, inst.budget(), inst.params.growth(), d));
            let zp = inst.zeta();
            for _ in 0..100 {
                let x: Vec<f64> = (0..d).map(|_| rng.random::<f64>() / inst.m_prime).collect();
                let want = inst.scale * zeta_eval(&zp, &x);
                let got = inst.eval(&x);
                assert!((got - want).abs() <= 1e-9 * inst.scale.max(1.0), "{got} vs {want}");
            }
            assert!(certify_unit_ball(inst).pass);
            assert!(instance_quasi_norm(inst, 1e-9).unwrap() <= 1.0 + 1e-6);
        }
    }
}

#[test]
fn sup_norms_of_sup_blowup_instances_diverge() {
    let seq = necessary_c_sequence(&sup_blowup_params(), 3.0, 2, &[1, 2, 3, 4, 5, 6], None).unwrap();
    let sups: Vec<f64> = seq.instances.iter().map(|i| i.scale).collect();
    assert!(sups.windows(2).all(|w| w[1] > w[0]), "{sups:?}");
    assert!(sups.last().unwrap() / sups[0] > 10.0);
}

#[test]
fn unit_ball_zeta_corpus_meets_the_optimal_rate() {
    let params = space(1.0, Extended::Infinite, 1, GrowthFn::constant(2), GrowthFn::constant(1));
    let corpus: Vec<CertifiedMember> = (0..=8).map(|j| unit_ball_zeta(&params, 1 << j, 2, 1e-9).unwrap().0).collect();
    assert!(corpus.iter().all(|m| m.quasi_norm_bound <= 1.0 + 1e-6));
    let budgets: Vec<u64> = (4..=14).map(|k| 1u64 << k).collect();
    let gamma = GammaValue::exact(Extended::Finite(1.0));
    let report = optimality_report(&params, gamma, &corpus, &budgets).unwrap();
    assert_eq!(report.predicted_rate, 0.5);
    assert!(report.pass, "{:?}", report.fit);
    assert!(report.fit.exponent.to_f64() >= 0.4, "{:?}", report.fit);
}

#[test]
fn zero_corpus_has_zero_error() {
    let params = space(1.0, Extended::Infinite, 2, GrowthFn::constant(2), GrowthFn::constant(1));
    let corpus = [CertifiedMember { id: "zero".into(), function: CorpusFn::Zero, quasi_norm_bound: 0.0 }];
    let budgets: Vec<u64> = (2..=8).map(|k| 1u64 << (2 * k)).collect();
    let report = optimality_report(&params, GammaValue::exact(Extended::Finite(1.0)), &corpus, &budgets).unwrap();
    assert!(report.worst.iter().all(|&(_, e)| e == 0.0));
    assert!(report.fit.degenerate);
    assert_eq!(report.fit.exponent, Extended::Infinite);
    assert!(report.pass);
}

#[test]
fn empty_corpus_is_rejected() {
    let params = space(1.0, Extended::Infinite, 1, GrowthFn::constant(2), GrowthFn::constant(1));
    let budgets = [16, 32, 64, 128, 256];
    assert!(optimality_report(&params, GammaValue::exact(Extended::Finite(1.0)), &[], &budgets).is_err());
}

#[test]
fn learner_rate_collapses_on_growing_sup_blowup_corpora() {
    let params = sup_blowup_params();
    let seq = necessary_c_sequence(&params, 3.0, 2, &[1, 2, 3, 4, 5, 6, 7], None).unwrap();
    let budgets: Vec<u64> = (4..=14).map(|k| 1u64 << k).collect();
    let exponent = |size: usize| {
        let pts: Vec<(f64, f64)> = budgets
            .iter()
            .map(|&m| {
                let worst = seq.instances[..size]
                    .iter()
                    .map(|inst| learner_sup_error(&|x: &[f64]| inst.eval(x), m, 1, None).unwrap())
                    .fold(0.0, f64::max);
                (m as f64, worst)
            })
            .collect();
        fit_rate(&pts).unwrap().exponent.to_f64()
    };
    let rates: Vec<f64> = (1..=seq.instances.len()).map(exponent).collect();
    assert!(rates.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{rates:?}");
    assert!(rates.last().unwrap().abs() <= 1e-9, "{rates:?}");
}

#[test]
fn sup_blowup_sequence_is_not_uniformly_cauchy() {
    let params = sup_blowup_params();
    let seq = necessary_c_sequence(&params, 3.0, 2, &[1, 2, 3, 4, 5, 6], None).unwrap();
    let nets: Vec<_> = seq.instances.iter().map(|i| i.net.clone()).collect();
    let grid = GridSpec::new(1, 1 << 16, Placement::Lattice).unwrap();
    let report = uniform_cauchy_check(&nets, 4, &params, 0.5, &grid).unwrap();
    assert!(report.mu > 0.0);
    assert!(report.fit.exponent <= Extended::Finite(0.0), "{:?}", report.fit);
    assert!(!report.pass);
}
