//! The mirror-descent subproblem `argmin <v, x> + L V(x, x_k)` over a ball.

use relbreg::mirror_step::{ball_step, linearize, power_prox_step, Cubic, StepRequest};
use relbreg::{DVector, FeasibleSet, ProxSetup};

fn main() -> relbreg::Result<()> {
    let prox = ProxSetup::power_composite(2, 1.0, 1.0, 1.0)?;
    let x_k = DVector::zeros(2);

    // Large ball: the interior minimiser is -theta c with theta + theta^2 + theta^3 = 1.
    let big = FeasibleSet::ball(2, 10.0);
    let v = DVector::from_row_slice(&[1.0, 0.0]);
    let req = StepRequest { prox: &prox, set: &big, x_k: &x_k, v: &v, l: 1.0 };
    let c = linearize(&req)?;
    let coeffs = prox.power_coeffs().expect("radial prox");
    let theta = Cubic::for_power_step(coeffs, c.norm()).positive_real_root()?;
    println!("theta = {theta:.15}, step = {:?}", power_prox_step(&req)?.as_slice());

    // A strong pull clamps the step to the boundary of a small ball.
    let small = FeasibleSet::ball(2, 0.25);
    let v = DVector::from_row_slice(&[3.0, 4.0]);
    let req = StepRequest { prox: &prox, set: &small, x_k: &x_k, v: &v, l: 1.0 };
    let x = power_prox_step(&req)?;
    println!("clamped step = {:?}, |x| = {}", x.as_slice(), x.norm());

    // The general dispatcher also covers rescaled and product geometries.
    let centre = DVector::from_row_slice(&[0.4, 0.1]);
    let rescaled = ProxSetup::rescaled(ProxSetup::quartic_plus_quadratic(2), centre.clone(), 0.3)?;
    let unit = FeasibleSet::ball(2, 1.0);
    let req = StepRequest { prox: &rescaled, set: &unit, x_k: &centre, v: &v, l: 5.0 };
    println!("rescaled step = {:?}", ball_step(&req)?.as_slice());
    Ok(())
}
