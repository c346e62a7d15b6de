//! Constrained SVM training posed as a monotone variational inequality on
//! the Lagrangian, solved by both operator methods.

use relbreg::bench::{default_l0, sampled_gap, GAP_SAMPLES};
use relbreg::oracles::{generate_svm, svm_saddle_operator};
use relbreg::solvers::{alg1_adaptive_vi, alg2_vi_inexact};
use relbreg::RunConfig;

fn main() -> relbreg::Result<()> {
    let inst = generate_svm(20, 4, 0.5, 3)?;
    let op = svm_saddle_operator(&inst)?;
    let x0 = inst.start();
    let r_sq = inst.default_r_sq();
    let l0 = default_l0(|x| op.apply(x), op.dim(), inst.n(), &x0);
    println!("n {} m {} R^2 {r_sq:.3} L0 {l0:.3}", inst.n(), inst.m());

    for eps in [8.0, 4.0, 2.0] {
        let rep = alg1_adaptive_vi(&op, &RunConfig::new(eps, l0, x0.clone(), r_sq))?;
        println!(
            "alg1 eps {eps:>4}: {:>6} iterations, sampled gap {:.3e}",
            rep.outer_iters,
            sampled_gap(&op, &rep.x_hat, GAP_SAMPLES, 1)
        );
    }

    let rep = alg2_vi_inexact(&op, &RunConfig::new(0.05, l0, x0, r_sq), 1000)?;
    let (w, lam) = (rep.x_hat.rows(0, inst.n()), rep.x_hat.rows(inst.n(), inst.m()));
    println!(
        "alg2 N=1000: certificate {:.3e}, sampled gap {:.3e}",
        rep.certificate,
        sampled_gap(&op, &rep.x_hat, GAP_SAMPLES, 1)
    );
    println!("objective {:.4}, |lambda| {:.4}", inst.objective(&w.into_owned()), lam.norm());
    Ok(())
}
