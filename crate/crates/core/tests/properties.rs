//! Randomised invariants of the divergences, oracles and subproblem solvers.

use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relbreg::constrained::mirror_step_fixed;
use relbreg::mirror_step::{ball_step, power_prox_step, StepRequest};
use relbreg::oracles::{
    generate_iep, generate_quartic, generate_svm, iep_oracle, quartic_oracle, svm_saddle_operator,
    toy_identity_operator, toy_quadratic, Constant, SubgradientOperator,
};
use relbreg::{DVector, FeasibleSet, ObjectiveOracle, OperatorOracle, ProxSetup, SmoothnessDescriptor};

fn vec_in_ball(dim: usize, radius: f64) -> impl Strategy<Value = DVector<f64>> {
    prop::collection::vec(-1.0f64..1.0, dim).prop_map(move |v| {
        let x = DVector::from_vec(v);
        let n = x.norm();
        if n > 1.0 {
            x * (radius / n)
        } else {
            x * radius
        }
    })
}

fn coeffs() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.0f64..3.0, 0.0f64..3.0, 0.0f64..3.0).prop_filter("some coefficient positive", |(a, b, c)| a + b + c > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn power_divergence_is_nonnegative_and_matches_definition(
        (a0, a1, a2) in coeffs(),
        y in vec_in_ball(3, 2.0),
        x in vec_in_ball(3, 2.0),
    ) {
        let p = ProxSetup::power_composite(3, a0, a1, a2).unwrap();
        let v = p.divergence(&y, &x).unwrap();
        prop_assert!(v >= -1e-12);
        prop_assert!(p.divergence(&x, &x).unwrap().abs() <= 1e-12);
        let def = p.value(&y).unwrap() - p.value(&x).unwrap() - p.grad(&x).unwrap().dot(&(&y - &x));
        prop_assert!((def - v).abs() <= 1e-10, "closed {v} definition {def}");
    }

    #[test]
    fn product_divergence_splits_into_blocks(
        (a0, a1, a2) in coeffs(),
        y in vec_in_ball(5, 1.5),
        x in vec_in_ball(5, 1.5),
    ) {
        let inner = ProxSetup::power_composite(3, a0, a1, a2).unwrap();
        let p = ProxSetup::product(inner.clone(), 2).unwrap();
        let head = |z: &DVector<f64>| z.rows(0, 3).into_owned();
        let tail = |z: &DVector<f64>| z.rows(3, 2).into_owned();
        let whole = p.divergence(&y, &x).unwrap();
        let parts = relbreg::bregman::product_divergence(&inner, &head(&y), &head(&x), &tail(&y), &tail(&x)).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-12 * (1.0 + whole.abs()));
    }

    #[test]
    fn rescaled_divergence_is_inner_divergence_of_scaled_points(
        y in vec_in_ball(2, 1.0),
        x in vec_in_ball(2, 1.0),
        c in vec_in_ball(2, 0.5),
        r in 0.1f64..2.0,
    ) {
        let inner = ProxSetup::quartic_plus_quadratic(2);
        let p = ProxSetup::rescaled(inner.clone(), c.clone(), r).unwrap();
        let direct = inner.divergence(&((&y - &c) / r), &((&x - &c) / r)).unwrap();
        prop_assert!((p.divergence(&y, &x).unwrap() - direct).abs() <= 1e-12 * (1.0 + direct));
        prop_assert!((p.value(&y).unwrap() - inner.value(&((&y - &c) / r)).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn gradient_matches_central_differences((a0, a1, a2) in coeffs(), x in vec_in_ball(3, 2.0)) {
        let p = ProxSetup::power_composite(3, a0, a1, a2).unwrap();
        let g = p.grad(&x).unwrap();
        let h = 1e-5;
        let fd = DVector::from_fn(3, |j, _| {
            let mut up = x.clone();
            let mut dn = x.clone();
            up[j] += h;
            dn[j] -= h;
            (p.value(&up).unwrap() - p.value(&dn).unwrap()) / (2.0 * h)
        });
        prop_assert!((&fd - &g).norm() <= 1e-5 * g.norm().max(1e-6));
    }

    #[test]
    fn step_satisfies_first_order_optimality(
        (a0, a1, a2) in coeffs(),
        x_k in vec_in_ball(3, 1.0),
        v in vec_in_ball(3, 5.0),
        l in 0.1f64..10.0,
        seed in any::<u64>(),
    ) {
        let prox = ProxSetup::power_composite(3, a0, a1, a2).unwrap();
        let set = FeasibleSet::ball(3, 1.0);
        let req = StepRequest { prox: &prox, set: &set, x_k: &x_k, v: &v, l };
        let x = power_prox_step(&req).unwrap();
        prop_assert!(set.contains(&x));
        let field = &v + (prox.grad(&x).unwrap() - prox.grad(&x_k).unwrap()) * l;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..100 {
            let z = set.sample(&mut rng);
            prop_assert!(field.dot(&(&z - &x)) >= -1e-6);
        }
    }

    #[test]
    fn fixed_step_is_the_power_step_with_inverse_constant(
        (a0, a1, a2) in coeffs(),
        x in vec_in_ball(2, 1.0),
        grad in vec_in_ball(2, 3.0),
        h in 0.01f64..5.0,
    ) {
        let prox = ProxSetup::power_composite(2, a0, a1, a2).unwrap();
        let set = FeasibleSet::ball(2, 1.0);
        let a = mirror_step_fixed(&prox, &set, &x, &grad, h).unwrap();
        let b = power_prox_step(&StepRequest { prox: &prox, set: &set, x_k: &x, v: &grad, l: 1.0 / h }).unwrap();
        prop_assert!((a - b).norm() <= 1e-10);
    }
}

fn optimality_holds(prox: &ProxSetup, set: &FeasibleSet, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..20 {
        let x_k = set.sample(&mut rng);
        let v = set.sample(&mut rng) * 4.0;
        let l = 0.7;
        let x = ball_step(&StepRequest { prox, set, x_k: &x_k, v: &v, l }).unwrap();
        assert!(set.contains(&x));
        let field = &v + (prox.grad(&x).unwrap() - prox.grad(&x_k).unwrap()) * l;
        for _ in 0..100 {
            let z = set.sample(&mut rng);
            assert!(field.dot(&(&z - &x)) >= -1e-6, "{:?}", prox.kind());
        }
    }
}

#[test]
fn every_step_kind_satisfies_optimality() {
    let power = ProxSetup::power_composite(3, 1.0, 0.5, 2.0).unwrap();
    optimality_holds(&ProxSetup::euclidean(3), &FeasibleSet::nonneg_ball(3, 1.0), 1);
    optimality_holds(&power, &FeasibleSet::ball(3, 1.0), 2);
    optimality_holds(
        &ProxSetup::product(power, 2).unwrap(),
        &FeasibleSet::product(FeasibleSet::ball(3, 1.0), FeasibleSet::nonneg_ball(2, 1.0)),
        3,
    );
    let centre = DVector::from_row_slice(&[0.3, -0.2, 0.1]);
    optimality_holds(
        &ProxSetup::rescaled(ProxSetup::quartic_plus_quadratic(3), centre.clone(), 0.4).unwrap(),
        &FeasibleSet::ball(3, 1.0),
        4,
    );
    optimality_holds(
        &ProxSetup::rescaled(ProxSetup::euclidean(3), centre, 0.4).unwrap(),
        &FeasibleSet::ball(3, 1.0),
        5,
    );
}

#[test]
fn two_dimensional_step_beats_dense_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let prox = ProxSetup::power_composite(2, 0.5, 1.0, 1.5).unwrap();
    let set = FeasibleSet::ball(2, 1.0);
    for _ in 0..5 {
        let x_k = set.sample(&mut rng);
        let v = set.sample(&mut rng) * 3.0;
        let req = StepRequest { prox: &prox, set: &set, x_k: &x_k, v: &v, l: 1.3 };
        let x = power_prox_step(&req).unwrap();
        let best = (0..401)
            .flat_map(|i| (0..401).map(move |j| (i, j)))
            .map(|(i, j)| DVector::from_row_slice(&[-1.0 + i as f64 / 200.0, -1.0 + j as f64 / 200.0]))
            .filter(|z| set.contains(z))
            .map(|z| req.objective(&z))
            .fold(f64::INFINITY, f64::min);
        assert!(req.objective(&x) <= best + 1e-6);
    }
}

// ---------------------------------------------------------------------------

fn convex_on_samples(obj: &ObjectiveOracle, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..500 {
        let x = obj.set.sample(&mut rng);
        let y = obj.set.sample(&mut rng);
        let lower = obj.value(&x) + obj.subgrad(&x).dot(&(&y - &x));
        assert!(obj.value(&y) >= lower - 1e-9 * (1.0 + lower.abs()));
    }
}

fn monotone_on_samples(op: &OperatorOracle, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..500 {
        let x = op.set.sample(&mut rng);
        let y = op.set.sample(&mut rng);
        let m = (op.apply(&y) - op.apply(&x)).dot(&(&y - &x));
        assert!(m >= -1e-9, "monotonicity {m}");
    }
}

#[test]
fn objectives_are_convex_on_samples() {
    convex_on_samples(&toy_quadratic(4), 1);
    convex_on_samples(&iep_oracle(&generate_iep(6, 4, 2).unwrap()).unwrap(), 2);
    convex_on_samples(&quartic_oracle(&generate_quartic(5, 3).unwrap()).unwrap(), 3);
    let constant = ObjectiveOracle::new(
        Arc::new(Constant(2.0)),
        ProxSetup::euclidean(2),
        SmoothnessDescriptor::relatively_lipschitz(1.0),
        FeasibleSet::ball(2, 1.0),
    )
    .unwrap();
    convex_on_samples(&constant, 4);
}

#[test]
fn operators_are_monotone_on_samples() {
    monotone_on_samples(&toy_identity_operator(3), 5);
    for seed in 0..3 {
        monotone_on_samples(&svm_saddle_operator(&generate_svm(6, 3, 0.5, seed).unwrap()).unwrap(), seed);
    }
    let iep = iep_oracle(&generate_iep(5, 3, 1).unwrap()).unwrap();
    let sub = OperatorOracle::new(
        Arc::new(SubgradientOperator(iep.function())),
        iep.prox.clone(),
        SmoothnessDescriptor::relatively_lipschitz(1.0),
        iep.set.clone(),
    )
    .unwrap();
    monotone_on_samples(&sub, 7);
}

#[test]
fn iep_is_one_relatively_lipschitz() {
    for seed in 0..3 {
        let obj = iep_oracle(&generate_iep(8, 4, seed).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
        for _ in 0..500 {
            let x = obj.set.sample(&mut rng);
            let y = obj.set.sample(&mut rng);
            let lhs = obj.subgrad(&x).dot(&(&y - &x)) + (2.0 * obj.prox.divergence(&y, &x).unwrap()).sqrt();
            assert!(lhs >= -1e-9, "seed {seed}: {lhs}");
        }
    }
}

#[test]
fn quartic_is_relatively_smooth_with_its_constant() {
    for seed in 0..3 {
        let inst = generate_quartic(6, seed).unwrap();
        let obj = quartic_oracle(&inst).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 200);
        for _ in 0..500 {
            let x = obj.set.sample(&mut rng);
            let y = obj.set.sample(&mut rng);
            let upper = obj.value(&x)
                + obj.subgrad(&x).dot(&(&y - &x))
                + inst.m_const * obj.prox.divergence(&y, &x).unwrap();
            assert!(obj.value(&y) <= upper + 1e-9);
        }
    }
}

#[test]
fn quartic_gradient_matches_finite_differences() {
    let obj = quartic_oracle(&generate_quartic(5, 4).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let x = obj.set.sample(&mut rng);
        let g = obj.subgrad(&x);
        let h = 1e-5;
        let fd = DVector::from_fn(5, |j, _| {
            let mut up = x.clone();
            let mut dn = x.clone();
            up[j] += h;
            dn[j] -= h;
            (obj.value(&up) - obj.value(&dn)) / (2.0 * h)
        });
        assert!((&fd - &g).norm() <= 1e-5 * g.norm().max(1e-6));
    }
}
