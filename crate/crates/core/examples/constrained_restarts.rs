//! One functional constraint: switching mirror descent, then its restarted
//! variant on a strongly convex objective.

use std::sync::Arc;

use relbreg::bregman::prox_bound;
use relbreg::constrained::{alg7_switching_md, alg8_restarts, RestartConfig, SwitchingConfig};
use relbreg::oracles::{toy_quadratic, Constant, FnObjective};
use relbreg::{DVector, ObjectiveOracle, SmoothnessDescriptor};

fn main() -> relbreg::Result<()> {
    // min 1/2 |x|^2 subject to x_0 + x_1 >= 0.5 on the unit ball; x_* = (0.25, 0.25).
    let f = toy_quadratic(2);
    let g = ObjectiveOracle::new(
        Arc::new(FnObjective::new(
            |x: &DVector<f64>| 0.5 - x[0] - x[1],
            |_: &DVector<f64>| DVector::from_element(2, -1.0),
        )),
        f.prox.clone(),
        SmoothnessDescriptor::relatively_lipschitz(2f64.sqrt()),
        f.set.clone(),
    )?;
    let cfg = SwitchingConfig::new(0.02, 1.0, 2f64.sqrt(), 2.0, DVector::from_row_slice(&[-0.5, 0.0]));
    let rep = alg7_switching_md(&f, &g, &cfg)?;
    println!(
        "alg7: {} steps ({} productive), x_hat {:?}, f {:.4} (f_* = 0.0625), g {:.4}",
        rep.steps,
        rep.productive.len(),
        rep.x_hat.as_slice(),
        rep.f_hat,
        rep.g_hat
    );

    let always = ObjectiveOracle::new(
        Arc::new(Constant(-1.0)),
        f.prox.clone(),
        SmoothnessDescriptor::relatively_lipschitz(1.0),
        f.set.clone(),
    )?;
    let cfg = RestartConfig {
        eps: 2f64.powi(-8),
        mu: 1.0,
        omega: 2.0 * prox_bound(&f.prox, &f.set)?,
        x0: DVector::from_row_slice(&[1.0, 0.0]),
        r0_sq: 1.0,
        m_f: 1.0,
        m_g: 1.0,
    };
    let rep = alg8_restarts(&f, &always, &cfg)?;
    println!("{:>3} {:>12} {:>12} {:>8}", "p", "R_p^2", "V(x_p, 0)", "steps");
    for r in &rep.restarts {
        println!("{:>3} {:>12.4e} {:>12.4e} {:>8}", r.p, r.r_sq, 0.5 * r.x.norm_squared(), r.steps);
    }
    println!("alg8: f = {:.3e} after {} steps", rep.f, rep.total_steps);
    Ok(())
}
