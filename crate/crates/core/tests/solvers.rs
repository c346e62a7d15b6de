use std::sync::Arc;

use relbreg::bench::{default_l0, sampled_gap};
use relbreg::bregman::max_divergence_from;
use relbreg::oracles::{
    generate_iep, generate_quartic, iep_oracle, quartic_oracle, toy_identity_operator, toy_quadratic, FnOperator,
};
use relbreg::solvers::{
    alg1_adaptive_vi, alg2_vi_inexact, alg3_adaptive, alg4_inexact, alg5_universal_inexact, alg6_universal,
    certificate_strongly_convex_adaptive, IterRecord, Method,
};
use relbreg::{DVector, FeasibleSet, OperatorOracle, ProxSetup, RunConfig, RunReport, SmoothnessDescriptor};

fn uniform(n: usize) -> DVector<f64> {
    DVector::from_element(n, 1.0 / (n as f64).sqrt())
}

#[test]
fn unit_radius_bounds_on_both_adaptive_methods() {
    let x0 = DVector::zeros(2);
    let eps = 0.1;
    let vi = alg1_adaptive_vi(&toy_identity_operator(2), &RunConfig::new(eps, 1.0, x0.clone(), 1.0)).unwrap();
    assert!(vi.converged && vi.outer_iters <= 400);
    let obj = alg3_adaptive(&toy_quadratic(2), &RunConfig::new(eps, 1.0, x0, 1.0)).unwrap();
    assert!(obj.converged && obj.outer_iters <= 400);
}

#[test]
fn zero_operator_accepts_every_first_trial() {
    let op = OperatorOracle::new(
        Arc::new(FnOperator(|x: &DVector<f64>| DVector::zeros(x.len()))),
        ProxSetup::euclidean(2),
        SmoothnessDescriptor::relatively_lipschitz(1.0),
        FeasibleSet::ball(2, 1.0),
    )
    .unwrap();
    let l0 = 3.0;
    let rep = alg2_vi_inexact(&op, &RunConfig::new(0.05, l0, DVector::zeros(2), 2.0), 10).unwrap();
    assert_eq!(rep.inner_solves, 10);
    let expected = (2f64.powi(11) - 2.0) / l0;
    assert!((rep.s_n - expected).abs() <= 1e-12 * expected);
    for (k, r) in rep.log.iter().enumerate() {
        assert_eq!(r.l, l0 / 2f64.powi(k as i32 + 1));
    }
}

#[test]
fn inexact_vi_certificate_reaches_eps_when_started_above_the_constant() {
    // L0 = 2L with L = 1 and delta0 = eps.
    let op = toy_identity_operator(2);
    let x0 = DVector::from_row_slice(&[1.0, 0.0]);
    let eps = 0.1;
    let r_sq = max_divergence_from(&op.prox, &op.set, &x0).unwrap();
    let n = (4.0 * r_sq / (eps * eps)).ceil() as usize;
    let rep = alg2_vi_inexact(&op, &RunConfig::new(eps, 2.0, x0, r_sq).with_delta0(eps), n).unwrap();
    assert!(rep.certificate <= eps, "certificate {}", rep.certificate);
    assert!(sampled_gap(&op, &rep.x_hat, 1000, 1) <= rep.certificate + 1e-6);
}

#[test]
fn iep_certificate_decreases_over_checkpoints() {
    let inst = generate_iep(10, 3, 5).unwrap();
    let obj = iep_oracle(&inst).unwrap();
    let x0 = uniform(10);
    let l0 = default_l0(|x| obj.subgrad(x), 10, 10, &x0);
    let rep = alg4_inexact(&obj, &RunConfig::new(0.05, l0, x0, inst.r_sq()), 400).unwrap();
    let at = |k: usize| rep.log[k - 1].certificate;
    assert!(at(100) > at(200) && at(200) > at(400), "{} {} {}", at(100), at(200), at(400));
}

#[test]
fn quartic_universal_certificate_decreases() {
    let inst = generate_quartic(10, 3).unwrap();
    let obj = quartic_oracle(&inst).unwrap();
    let x0 = uniform(10);
    let r_sq = max_divergence_from(&obj.prox, &obj.set, &x0).unwrap();
    let l0 = default_l0(|x| obj.subgrad(x), 10, 10, &x0);
    let rep = alg5_universal_inexact(&obj, &RunConfig::new(0.05, l0, x0, r_sq), 400).unwrap();
    let certs: Vec<f64> = [50, 100, 200, 400].iter().map(|&k| rep.log[k - 1].certificate).collect();
    assert!(certs.windows(2).all(|w| w[1] < w[0]), "{certs:?}");
}

#[test]
fn toy_universal_certificate_bounds_every_run() {
    let obj = toy_quadratic(3);
    for (i, x0) in [uniform(3), DVector::from_row_slice(&[0.0, -1.0, 0.0]), DVector::zeros(3)]
        .into_iter()
        .enumerate()
    {
        let r_sq = max_divergence_from(&obj.prox, &obj.set, &x0).unwrap();
        let rep = alg6_universal(&obj, &RunConfig::new(0.02, 0.3 + i as f64, x0, r_sq)).unwrap();
        assert!(obj.value(&rep.x_hat) <= rep.certificate + 1e-9);
    }
}

#[test]
fn universal_constants_stay_within_twice_the_smoothness_constant() {
    let inst = generate_quartic(8, 6).unwrap();
    let obj = quartic_oracle(&inst).unwrap();
    let x0 = uniform(8);
    let r_sq = max_divergence_from(&obj.prox, &obj.set, &x0).unwrap();
    // Start below M so every L in the log comes from halving or doubling.
    let rep = alg6_universal(&obj, &RunConfig::new(0.05, 1.0, x0, r_sq)).unwrap();
    assert!(rep.log.iter().all(|r| r.l <= 2.0 * inst.m_const));
}

#[test]
fn universal_method_on_iep_respects_lipschitz_count() {
    let inst = generate_iep(5, 3, 2).unwrap();
    let obj = iep_oracle(&inst).unwrap();
    let x0 = uniform(5);
    let eps = 0.1;
    let l0 = default_l0(|x| obj.subgrad(x), 5, 5, &x0);
    let rep = alg6_universal(&obj, &RunConfig::new(eps, l0, x0, inst.r_sq())).unwrap();
    let bound = (32.0 * inst.r_sq() / (eps * eps)).ceil() as usize;
    assert!(rep.converged && rep.outer_iters <= bound, "{} > {bound}", rep.outer_iters);
}

fn recomputed_average(rep: &RunReport) -> DVector<f64> {
    let pre = matches!(rep.method, Method::Alg1 | Method::Alg2);
    let mut acc = DVector::zeros(rep.x0.len());
    let mut s = 0.0;
    let mut prev = rep.x0.clone();
    for r in &rep.log {
        let x_next = r.x.clone().unwrap();
        let point = if pre { &prev } else { &x_next };
        acc += point / r.l;
        s += 1.0 / r.l;
        prev = x_next;
    }
    acc / s
}

#[test]
fn averages_recompute_from_recorded_trajectories() {
    let toy = toy_quadratic(2);
    let op = toy_identity_operator(2);
    let x0 = DVector::from_row_slice(&[0.6, -0.3]);
    let cfg = RunConfig::new(0.01, 1.0, x0, 2.0).recording();
    let reports = [
        alg1_adaptive_vi(&op, &cfg).unwrap(),
        alg2_vi_inexact(&op, &cfg, 300).unwrap(),
        alg3_adaptive(&toy, &cfg).unwrap(),
        alg4_inexact(&toy, &cfg, 300).unwrap(),
        alg5_universal_inexact(&toy, &cfg, 300).unwrap(),
        alg6_universal(&toy, &cfg).unwrap(),
    ];
    for rep in &reports {
        let diff = (recomputed_average(rep) - &rep.x_hat).norm();
        assert!(diff <= 1e-12 * (1.0 + rep.x_hat.norm()), "{:?}: {diff:e}", rep.method);
    }
}

#[test]
fn geometric_bound_matches_a_naive_double_loop() {
    let ls = [3.0, 1.5, 6.0, 2.5, 4.0];
    let ds = [0.2, 0.1, 0.05, 0.3, 0.01];
    let log: Vec<IterRecord> = ls
        .iter()
        .zip(ds)
        .map(|(&l, delta)| IterRecord {
            l,
            delta,
            inner: 1,
            s_n: 0.0,
            certificate: 0.0,
            f_best: None,
            elapsed_s: 0.0,
            x: None,
        })
        .collect();
    let (mu, v0) = (0.8, 0.7);
    let q = |i: usize| ((i + 1)..ls.len()).map(|n| 1.0 - mu / ls[n]).product::<f64>();
    let s_hat: f64 = (0..ls.len()).map(|i| q(i) / ls[i]).sum();
    let d_hat: f64 = (0..ls.len()).map(|i| ds[i] * q(i) / ls[i]).sum();
    let prod: f64 = ls.iter().map(|l| 1.0 - mu / l).product();
    let naive = ls[ls.len() - 1] * prod * v0 + d_hat / s_hat;
    let est = certificate_strongly_convex_adaptive(&log, mu, v0).unwrap();
    assert!((est.est_geo.unwrap() - naive).abs() <= 1e-12);
    assert!(!est.flagged);
}
