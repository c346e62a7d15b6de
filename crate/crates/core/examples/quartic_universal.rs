//! A relatively smooth, relatively strongly convex quartic solved by both
//! universal methods, with the strong-convexity bounds evaluated on the logs.

use relbreg::bench::default_l0;
use relbreg::bregman::max_divergence_from;
use relbreg::oracles::{generate_quartic, quartic_oracle, QuarticInstance};
use relbreg::solvers::{
    alg5_universal_inexact, alg6_universal, certificate_strongly_convex_adaptive,
    certificate_strongly_convex_universal,
};
use relbreg::{DMatrix, DVector, RunConfig};

fn main() -> relbreg::Result<()> {
    let n = 10;
    let inst = generate_quartic(n, 7)?;
    let obj = quartic_oracle(&inst)?;
    let x0 = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let r_sq = max_divergence_from(&obj.prox, &obj.set, &x0)?;
    let l0 = default_l0(|x| obj.subgrad(x), n, n, &x0);
    println!("M {:.3e}, mu {:.3e}, R^2 {r_sq:.3}", inst.m_const, inst.mu_const);

    let eps = 0.01;
    let rep6 = alg6_universal(&obj, &RunConfig::new(eps, l0, x0.clone(), r_sq))?;
    println!("alg6: {} iterations, certificate {:.3e}, f_best {:.6}", rep6.outer_iters, rep6.certificate, rep6.f_best.unwrap());
    let rep5 = alg5_universal_inexact(&obj, &RunConfig::new(eps, l0, x0, r_sq), rep6.outer_iters)?;
    println!("alg5: same N, certificate {:.3e}, f_best {:.6}", rep5.certificate, rep5.f_best.unwrap());

    // f = 1/4 |x|^4 + 1/2 |x|^2 has x_* = 0 and f_* = 0, so V0 is exact.
    let id = DMatrix::identity(n, n);
    let zero = DMatrix::zeros(n, n);
    let centred = QuarticInstance::from_parts(id.clone(), zero, id, DVector::zeros(n), DVector::zeros(n), 0)?;
    let obj = quartic_oracle(&centred)?;
    let x0 = DVector::from_element(n, 0.3);
    let v0 = obj.prox.divergence(&DVector::zeros(n), &x0)?;
    let r_sq = max_divergence_from(&obj.prox, &obj.set, &x0)?;
    let mu = obj.descriptor.mu;
    let rep5 = alg5_universal_inexact(&obj, &RunConfig::new(eps, 1.0, x0.clone(), r_sq), 200)?;
    let est = certificate_strongly_convex_adaptive(&rep5.log, mu, v0)?;
    println!(
        "centred quartic, alg5: f_best {:.3e} <= est0 {:.3e}, geometric {:?}",
        rep5.f_best.unwrap(),
        est.est0,
        est.est_geo
    );
    let rep6 = alg6_universal(&obj, &RunConfig::new(eps, 1.0, x0, r_sq))?;
    let uni = certificate_strongly_convex_universal(&rep6.log, mu, v0, eps)?;
    println!("centred quartic, alg6: f_best {:.3e} <= {:.3e}", rep6.f_best.unwrap(), uni.value);
    Ok(())
}
