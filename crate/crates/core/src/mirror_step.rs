//! Exact solvers for the mirror-descent subproblem
//!
//! ```text
//! x+ = argmin_{x in Q} <v, x> + L V(x, x_k)
//! ```
//!
//! Dropping constants, the subproblem is `min <c, x> + d(x)` with
//! `c = v / L - grad d(x_k)`. For a radial prox `d(x) = phi(|x|)` the
//! unconstrained minimiser is `-theta c` where `theta > 0` is the root of
//! `a0 theta + a1 |c| theta^2 + a2 |c|^2 theta^3 = 1`; over a centred ball the
//! minimiser stays on that ray and is clamped to the boundary.

use nalgebra::DVector;

use crate::bregman::{join, split, PowerCoeffs, ProxKind, ProxSetup};
use crate::error::{check_dim, Error, Result};
use crate::oracles::FeasibleSet;

/// One subproblem instance.
#[derive(Debug, Clone, Copy)]
pub struct StepRequest<'a> {
    pub prox: &'a ProxSetup,
    pub set: &'a FeasibleSet,
    pub x_k: &'a DVector<f64>,
    pub v: &'a DVector<f64>,
    pub l: f64,
}

impl StepRequest<'_> {
    fn validate(&self) -> Result<()> {
        let n = self.prox.dim();
        check_dim("step set", n, self.set.dim())?;
        check_dim("step center", n, self.x_k.len())?;
        check_dim("step direction", n, self.v.len())?;
        if !(self.l > 0.0 && self.l.is_finite()) {
            return Err(Error::InvalidConfig(format!("step needs L > 0, got {}", self.l)));
        }
        Ok(())
    }

    /// `<v, x> + L V(x, x_k)`.
    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        self.v.dot(x) + self.l * self.prox.divergence_unchecked(x, self.x_k)
    }
}

/// `c = v / L - grad d(x_k)`.
pub fn linearize(req: &StepRequest<'_>) -> Result<DVector<f64>> {
    req.validate()?;
    Ok(req.v / req.l - req.prox.grad_unchecked(req.x_k))
}

/// `c0 + c1 t + c2 t^2 + c3 t^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cubic {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

const BISECTION_WIDTH: f64 = 1e-14;
const NEWTON_POLISH: usize = 3;
const MAX_BRACKET_DOUBLINGS: usize = 2100;

impl Cubic {
    /// The cubic whose positive root scales the radial step.
    pub fn for_power_step(coeffs: PowerCoeffs, c_norm: f64) -> Self {
        Cubic {
            c0: -1.0,
            c1: coeffs.a0,
            c2: coeffs.a1 * c_norm,
            c3: coeffs.a2 * c_norm * c_norm,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.c0 + t * (self.c1 + t * (self.c2 + t * self.c3))
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.c1 + t * (2.0 * self.c2 + 3.0 * t * self.c3)
    }

    /// Unique positive root, assuming `p(0) < 0` and nonnegative higher
    /// coefficients (so `p` increases on `[0, inf)`).
    pub fn positive_real_root(&self) -> Result<f64> {
        let Cubic { c0, c1, c2, c3 } = *self;
        if ![c0, c1, c2, c3].iter().all(|c| c.is_finite()) {
            return Err(Error::Numeric(format!("non-finite cubic {self:?}")));
        }
        if !(c0 < 0.0) || c1 < 0.0 || c2 < 0.0 || c3 < 0.0 || c1 + c2 + c3 == 0.0 {
            return Err(Error::Numeric(format!("cubic {self:?} has no unique positive root")));
        }
        if c2 == 0.0 && c3 == 0.0 {
            return Ok(-c0 / c1);
        }

        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let mut doublings = 0;
        while self.eval(hi) <= 0.0 {
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings > MAX_BRACKET_DOUBLINGS || !hi.is_finite() {
                return Err(Error::Numeric(format!("no sign change found for {self:?}")));
            }
        }
        while hi - lo > BISECTION_WIDTH {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }

        let mut t = 0.5 * (lo + hi);
        for _ in 0..NEWTON_POLISH {
            let d = self.derivative(t);
            if d > 0.0 {
                let next = t - self.eval(t) / d;
                if next.is_finite() && next > 0.0 {
                    t = next;
                }
            }
        }
        Ok(t)
    }
}

/// Closed-form step for a radial prox on an origin-centred ball.
pub fn power_prox_step(req: &StepRequest<'_>) -> Result<DVector<f64>> {
    let coeffs = req
        .prox
        .power_coeffs()
        .ok_or_else(|| Error::Unsupported(format!("power step for {:?}", req.prox.kind())))?;
    let radius = match req.set {
        FeasibleSet::Ball { radius, .. } => *radius,
        other => return Err(Error::Unsupported(format!("power step over {other:?}"))),
    };
    let c = linearize(req)?;
    radial_minimizer(coeffs, &c, radius)
}

/// `argmin_{|x| <= radius} <c, x> + phi(|x|)`.
fn radial_minimizer(coeffs: PowerCoeffs, c: &DVector<f64>, radius: f64) -> Result<DVector<f64>> {
    let cn = c.norm();
    if cn == 0.0 {
        return Ok(DVector::zeros(c.len()));
    }
    let theta = Cubic::for_power_step(coeffs, cn).positive_real_root()?;
    let theta = if theta * cn > radius { radius / cn } else { theta };
    Ok(c * -theta)
}

/// Exact step for every supported prox/set pairing:
///
/// - radial prox over a centred ball: [`power_prox_step`];
/// - Euclidean prox over any set: projection of `x_k - v / L`;
/// - product prox over a product set: primal block recursively, multiplier
///   block by projection of `lam_k - v_lam / L`;
/// - rescaled prox `d((x - center) / R)` over a ball: closed form for an
///   inner Euclidean prox, otherwise a bisection on the ball multiplier.
pub fn ball_step(req: &StepRequest<'_>) -> Result<DVector<f64>> {
    req.validate()?;
    match (req.prox.kind(), req.set) {
        (ProxKind::Euclidean, set) => set.project(&(req.x_k - req.v / req.l)),
        (_, FeasibleSet::Ball { .. }) if req.prox.power_coeffs().is_some() => power_prox_step(req),
        (
            ProxKind::Product {
                inner,
                multiplier_dim,
            },
            FeasibleSet::Product { primal, dual },
        ) => {
            let (x, lam) = split(req.x_k, inner.dim(), *multiplier_dim);
            let (vx, vlam) = split(req.v, inner.dim(), *multiplier_dim);
            let x_next = ball_step(&StepRequest {
                prox: inner,
                set: primal,
                x_k: &x,
                v: &vx,
                l: req.l,
            })?;
            let lam_next = dual.project(&(lam - vlam / req.l))?;
            Ok(join(&x_next, &lam_next))
        }
        (
            ProxKind::Rescaled {
                inner,
                center,
                radius: scale,
            },
            FeasibleSet::Ball { radius, .. },
        ) => rescaled_step(req, inner, center, *scale, *radius),
        (kind, set) => Err(Error::Unsupported(format!("step for {kind:?} over {set:?}"))),
    }
}

fn rescaled_step(
    req: &StepRequest<'_>,
    inner: &ProxSetup,
    center: &DVector<f64>,
    scale: f64,
    radius: f64,
) -> Result<DVector<f64>> {
    if let ProxKind::Euclidean = inner.kind() {
        let set = FeasibleSet::ball(center.len(), radius);
        return set.project(&(req.x_k - req.v * (scale * scale / req.l)));
    }
    let coeffs = inner
        .power_coeffs()
        .ok_or_else(|| Error::Unsupported(format!("rescaled step for {:?}", inner.kind())))?;

    // In u = (x - center) / scale the problem is min <w, u> + d(u) over the
    // ball |u - z| <= rho, z = -center / scale.
    let u_k = (req.x_k - center) / scale;
    let w = req.v * (scale / req.l) - inner.grad_unchecked(&u_k);
    let z = -center / scale;
    let rho = radius / scale;

    // Stationarity with multiplier nu: (psi(|u|) + nu) u = nu z - w.
    let solve = |nu: f64| -> Result<DVector<f64>> {
        let rhs = &z * nu - &w;
        let rn = rhs.norm();
        if rn == 0.0 {
            return Ok(DVector::zeros(rhs.len()));
        }
        let t = Cubic {
            c0: -rn,
            c1: coeffs.a0 + nu,
            c2: coeffs.a1,
            c3: coeffs.a2,
        }
        .positive_real_root()?;
        Ok(rhs * (t / rn))
    };
    let dist = |u: &DVector<f64>| (u - &z).norm();

    let free = solve(0.0)?;
    if dist(&free) <= rho {
        return Ok(center + free * scale);
    }
    // |u(nu) - z| decreases in nu; bracket, then bisect.
    let base = (coeffs.a0 + coeffs.a1 + coeffs.a2).max(1e-300);
    let (mut lo, mut hi) = (0.0_f64, base);
    let mut doublings = 0;
    while dist(&solve(hi)?) > rho {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_BRACKET_DOUBLINGS || !hi.is_finite() {
            return Err(Error::Numeric("ball multiplier search did not bracket".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if dist(&solve(mid)?) > rho {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = center + solve(hi)? * scale;
    req.set.project(&x)
}
