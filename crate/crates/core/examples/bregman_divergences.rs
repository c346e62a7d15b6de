//! Divergences of the supported prox functions, and the radii the solvers
//! derive from them.

use relbreg::bregman::{max_divergence_from, prox_bound};
use relbreg::{DVector, FeasibleSet, ProxSetup};

fn main() -> relbreg::Result<()> {
    let y = DVector::from_row_slice(&[0.6, -0.2, 0.1]);
    let x = DVector::from_row_slice(&[-0.3, 0.4, 0.0]);
    let setups = [
        ("euclidean", ProxSetup::euclidean(3)),
        ("quartic + quadratic", ProxSetup::quartic_plus_quadratic(3)),
        ("power (1, 0.5, 2)", ProxSetup::power_composite(3, 1.0, 0.5, 2.0)?),
        (
            "rescaled around x, R = 0.5",
            ProxSetup::rescaled(ProxSetup::quartic_plus_quadratic(3), x.clone(), 0.5)?,
        ),
    ];
    let ball = FeasibleSet::ball(3, 1.0);
    println!("{:<28} {:>10} {:>10} {:>12}", "prox", "V(y,x)", "V(x,y)", "max V(.,x)");
    for (name, prox) in &setups {
        let far = match prox.power_coeffs() {
            Some(_) => format!("{:.6}", max_divergence_from(prox, &ball, &x)?),
            None => "-".into(),
        };
        println!(
            "{name:<28} {:>10.6} {:>10.6} {far:>12}",
            prox.divergence(&y, &x)?,
            prox.divergence(&x, &y)?
        );
    }
    let quartic = ProxSetup::quartic_plus_quadratic(3);
    println!("sup d over the unit ball for the quartic prox: {}", prox_bound(&quartic, &ball)?);

    // Saddle-point problems pair a primal prox with a Euclidean multiplier block.
    let product = ProxSetup::product(ProxSetup::quartic_plus_quadratic(2), 2)?;
    let a = DVector::from_row_slice(&[0.5, 0.0, 1.0, 0.0]);
    let b = DVector::from_row_slice(&[0.0, 0.5, 0.0, 0.5]);
    println!("product divergence: {:.6}", product.divergence(&a, &b)?);
    Ok(())
}
