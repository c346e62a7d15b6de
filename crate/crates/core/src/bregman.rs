//! Distance-generating functions ("prox functions") and their Bregman
//! divergences `V(y, x) = d(y) - d(x) - <grad d(x), y - x>`.
//!
//! Every radial kind is a *power composite*
//!
//! ```text
//! d(x) = a2/4 |x|^4 + a1/3 |x|^3 + a0/2 |x|^2
//! ```
//!
//! with gradient `(a2 |x|^2 + a1 |x| + a0) x`. The Euclidean prox is
//! `(a0, a1, a2) = (1, 0, 0)` and the quartic-plus-quadratic prox is `(1, 0, 1)`.
//! Two composite kinds are built on top: a product with a Euclidean block for
//! Lagrange multipliers, and a re-centred / re-scaled copy `d((x - c) / R)`
//! used by the restart scheme.

use nalgebra::DVector;

use crate::error::{check_dim, Error, Result};
use crate::oracles::FeasibleSet;

/// Coefficients of a power-composite prox.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerCoeffs {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

impl PowerCoeffs {
    pub const EUCLIDEAN: PowerCoeffs = PowerCoeffs {
        a0: 1.0,
        a1: 0.0,
        a2: 0.0,
    };
    pub const QUARTIC_PLUS_QUADRATIC: PowerCoeffs = PowerCoeffs {
        a0: 1.0,
        a1: 0.0,
        a2: 1.0,
    };

    /// Radial profile: `d(x) = phi(|x|)`.
    pub fn phi(&self, t: f64) -> f64 {
        let t2 = t * t;
        self.a2 / 4.0 * t2 * t2 + self.a1 / 3.0 * t2 * t + self.a0 / 2.0 * t2
    }

    /// `grad d(x) = psi(|x|) x`.
    pub fn psi(&self, t: f64) -> f64 {
        self.a2 * t * t + self.a1 * t + self.a0
    }

    /// Closed-form divergence as the weighted sum of the three pure-power
    /// divergences `V_i(y,x) = (|y|^{i+2} + (i+1)|x|^{i+2} - (i+2)|x|^i <x,y>) / (i+2)`.
    fn divergence(&self, y: &DVector<f64>, x: &DVector<f64>) -> f64 {
        let ny = y.norm();
        let nx = x.norm();
        let xy = x.dot(y);
        let pure = |i: i32| {
            let p = (i + 2) as f64;
            (ny.powi(i + 2) + (i + 1) as f64 * nx.powi(i + 2) - p * nx.powi(i) * xy) / p
        };
        let mut v = 0.0;
        if self.a0 != 0.0 {
            v += self.a0 * pure(0);
        }
        if self.a1 != 0.0 {
            v += self.a1 * pure(1);
        }
        if self.a2 != 0.0 {
            v += self.a2 * pure(2);
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProxKind {
    Euclidean,
    PowerComposite(PowerCoeffs),
    QuarticPlusQuadratic,
    /// `d(x) + 1/2 |lambda|^2` on `(x, lambda)`, primal block first.
    Product {
        inner: Box<ProxSetup>,
        multiplier_dim: usize,
    },
    /// `d((x - center) / radius)`.
    Rescaled {
        inner: Box<ProxSetup>,
        center: DVector<f64>,
        radius: f64,
    },
}

/// A distance-generating function on `R^dim`. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxSetup {
    kind: ProxKind,
    dim: usize,
}

impl ProxSetup {
    pub fn euclidean(dim: usize) -> Self {
        Self {
            kind: ProxKind::Euclidean,
            dim,
        }
    }

    pub fn quartic_plus_quadratic(dim: usize) -> Self {
        Self {
            kind: ProxKind::QuarticPlusQuadratic,
            dim,
        }
    }

    pub fn power_composite(dim: usize, a0: f64, a1: f64, a2: f64) -> Result<Self> {
        let ok = |a: f64| a.is_finite() && a >= 0.0;
        if !(ok(a0) && ok(a1) && ok(a2)) || a0 + a1 + a2 == 0.0 {
            return Err(Error::InvalidConfig(format!(
                "power prox coefficients must be nonnegative and not all zero, got ({a0}, {a1}, {a2})"
            )));
        }
        Ok(Self {
            kind: ProxKind::PowerComposite(PowerCoeffs { a0, a1, a2 }),
            dim,
        })
    }

    pub fn product(inner: ProxSetup, multiplier_dim: usize) -> Result<Self> {
        if multiplier_dim == 0 {
            return Err(Error::InvalidConfig("multiplier block must be nonempty".into()));
        }
        let dim = inner.dim + multiplier_dim;
        Ok(Self {
            kind: ProxKind::Product {
                inner: Box::new(inner),
                multiplier_dim,
            },
            dim,
        })
    }

    pub fn rescaled(inner: ProxSetup, center: DVector<f64>, radius: f64) -> Result<Self> {
        check_dim("rescaled prox center", inner.dim, center.len())?;
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "rescaling radius must be positive, got {radius}"
            )));
        }
        let dim = inner.dim;
        Ok(Self {
            kind: ProxKind::Rescaled {
                inner: Box::new(inner),
                center,
                radius,
            },
            dim,
        })
    }

    pub fn kind(&self) -> &ProxKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coefficients when this prox is radial (Euclidean, power, quartic).
    pub fn power_coeffs(&self) -> Option<PowerCoeffs> {
        match &self.kind {
            ProxKind::Euclidean => Some(PowerCoeffs::EUCLIDEAN),
            ProxKind::QuarticPlusQuadratic => Some(PowerCoeffs::QUARTIC_PLUS_QUADRATIC),
            ProxKind::PowerComposite(c) => Some(*c),
            _ => None,
        }
    }

    fn check(&self, x: &DVector<f64>) -> Result<()> {
        check_dim("prox argument", self.dim, x.len())
    }

    pub fn value(&self, x: &DVector<f64>) -> Result<f64> {
        self.check(x)?;
        Ok(self.value_unchecked(x))
    }

    pub fn grad(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check(x)?;
        Ok(self.grad_unchecked(x))
    }

    /// `V(y, x)`.
    pub fn divergence(&self, y: &DVector<f64>, x: &DVector<f64>) -> Result<f64> {
        self.check(y)?;
        self.check(x)?;
        Ok(self.divergence_unchecked(y, x))
    }

    pub(crate) fn value_unchecked(&self, x: &DVector<f64>) -> f64 {
        match &self.kind {
            ProxKind::Product {
                inner,
                multiplier_dim,
            } => {
                let (p, l) = split(x, inner.dim, *multiplier_dim);
                inner.value_unchecked(&p) + 0.5 * l.norm_squared()
            }
            ProxKind::Rescaled {
                inner,
                center,
                radius,
            } => inner.value_unchecked(&((x - center) / *radius)),
            _ => {
                let c = self.power_coeffs().expect("radial kind");
                c.phi(x.norm())
            }
        }
    }

    pub(crate) fn grad_unchecked(&self, x: &DVector<f64>) -> DVector<f64> {
        match &self.kind {
            ProxKind::Product {
                inner,
                multiplier_dim,
            } => {
                let (p, l) = split(x, inner.dim, *multiplier_dim);
                join(&inner.grad_unchecked(&p), &l)
            }
            ProxKind::Rescaled {
                inner,
                center,
                radius,
            } => inner.grad_unchecked(&((x - center) / *radius)) / *radius,
            _ => {
                let c = self.power_coeffs().expect("radial kind");
                let n2 = x.norm_squared();
                x * (c.a2 * n2 + c.a1 * n2.sqrt() + c.a0)
            }
        }
    }

    pub(crate) fn divergence_unchecked(&self, y: &DVector<f64>, x: &DVector<f64>) -> f64 {
        match &self.kind {
            ProxKind::Product {
                inner,
                multiplier_dim,
            } => {
                let (py, ly) = split(y, inner.dim, *multiplier_dim);
                let (px, lx) = split(x, inner.dim, *multiplier_dim);
                inner.divergence_unchecked(&py, &px) + 0.5 * (ly - lx).norm_squared()
            }
            ProxKind::Rescaled {
                inner,
                center,
                radius,
            } => inner.divergence_unchecked(&((y - center) / *radius), &((x - center) / *radius)),
            _ => self.power_coeffs().expect("radial kind").divergence(y, x),
        }
    }
}

pub(crate) fn split(x: &DVector<f64>, head: usize, tail: usize) -> (DVector<f64>, DVector<f64>) {
    (x.rows(0, head).into_owned(), x.rows(head, tail).into_owned())
}

pub(crate) fn join(a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}

/// Divergence on the product space: `V(y, x) + 1/2 |lam_y - lam_x|^2`.
pub fn product_divergence(
    inner: &ProxSetup,
    y: &DVector<f64>,
    x: &DVector<f64>,
    lam_y: &DVector<f64>,
    lam_x: &DVector<f64>,
) -> Result<f64> {
    check_dim("multiplier block", lam_x.len(), lam_y.len())?;
    Ok(inner.divergence(y, x)? + 0.5 * (lam_y - lam_x).norm_squared())
}

/// `sup_{x in set} d(x)`.
pub fn prox_bound(prox: &ProxSetup, set: &FeasibleSet) -> Result<f64> {
    match (prox.kind(), set) {
        (_, FeasibleSet::Ball { radius, .. } | FeasibleSet::NonnegBall { radius, .. })
            if prox.power_coeffs().is_some() =>
        {
            check_dim("prox bound", prox.dim(), set.dim())?;
            Ok(prox.power_coeffs().unwrap().phi(*radius))
        }
        (ProxKind::Product { inner, .. }, FeasibleSet::Product { primal, dual }) => {
            check_dim("prox bound", prox.dim(), set.dim())?;
            Ok(prox_bound(inner, primal)? + 0.5 * dual.radius().powi(2))
        }
        (
            ProxKind::Rescaled {
                inner,
                center,
                radius: scale,
            },
            FeasibleSet::Ball { radius, .. },
        ) if inner.power_coeffs().is_some() => {
            check_dim("prox bound", prox.dim(), set.dim())?;
            Ok(inner
                .power_coeffs()
                .unwrap()
                .phi((center.norm() + radius) / scale))
        }
        _ => Err(Error::Unsupported(format!(
            "prox bound for {:?} over {:?}",
            prox.kind(),
            set
        ))),
    }
}

/// `max_{x in set} V(x, x0)`, the quantity the variational-inequality methods
/// need as their radius `R^2`.
///
/// For a radial prox on an origin-centred ball the maximiser sits on the
/// sphere opposite `x0`.
pub fn max_divergence_from(prox: &ProxSetup, set: &FeasibleSet, x0: &DVector<f64>) -> Result<f64> {
    check_dim("max divergence start point", prox.dim(), x0.len())?;
    match (prox.kind(), set) {
        (_, FeasibleSet::Ball { radius, .. }) if prox.power_coeffs().is_some() => {
            let c = prox.power_coeffs().unwrap();
            let t = x0.norm();
            let g = c.psi(t) * t;
            Ok(c.phi(*radius) + g * radius + g * t - c.phi(t))
        }
        (ProxKind::Product { inner, .. }, FeasibleSet::Product { primal, dual }) => {
            let (p0, l0) = split(x0, inner.dim(), dual.dim());
            let primal_part = max_divergence_from(inner, primal, &p0)?;
            let dual_part = match dual.as_ref() {
                FeasibleSet::NonnegBall { radius, .. } => {
                    // A convex function is maximised at an extreme point: the
                    // origin or a scaled basis vector on the sphere.
                    let min_coord = l0.iter().copied().fold(f64::INFINITY, f64::min).max(0.0);
                    let sq = l0.norm_squared();
                    0.5 * (sq + (radius * radius - 2.0 * radius * min_coord).max(0.0))
                }
                FeasibleSet::Ball { radius, .. } => 0.5 * (radius + l0.norm()).powi(2),
                other => {
                    return Err(Error::Unsupported(format!(
                        "max divergence over dual set {other:?}"
                    )))
                }
            };
            Ok(primal_part + dual_part)
        }
        _ => Err(Error::Unsupported(format!(
            "max divergence for {:?} over {:?}",
            prox.kind(),
            set
        ))),
    }
}
