//! Problem definitions: feasible sets, smoothness descriptors, objective and
//! operator oracles, and seeded generators for the benchmark families.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bregman::{split, ProxSetup};
use crate::error::{check_dim, Error, Result};

mod iep;
pub mod io;
mod quartic;
mod svm;

pub use iep::{generate_iep, iep_oracle, IepInstance, IepObjective};
pub use quartic::{generate_quartic, quartic_oracle, QuarticInstance, QuarticObjective};
pub use svm::{generate_svm, svm_saddle_operator, SvmSaddleInstance, SvmSaddleOperator};

/// Relative slack used by [`FeasibleSet::contains`] so that points produced by
/// radial scaling onto the boundary still count as members.
const MEMBERSHIP_RTOL: f64 = 1e-12;

/// Closed convex feasible region. Balls are centred at the origin.
#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleSet {
    Ball {
        dim: usize,
        radius: f64,
    },
    /// `{x >= 0 : |x| <= radius}`.
    NonnegBall {
        dim: usize,
        radius: f64,
    },
    /// Cartesian product, primal coordinates first.
    Product {
        primal: Box<FeasibleSet>,
        dual: Box<FeasibleSet>,
    },
}

impl FeasibleSet {
    pub fn ball(dim: usize, radius: f64) -> Self {
        FeasibleSet::Ball { dim, radius }
    }

    pub fn nonneg_ball(dim: usize, radius: f64) -> Self {
        FeasibleSet::NonnegBall { dim, radius }
    }

    pub fn product(primal: FeasibleSet, dual: FeasibleSet) -> Self {
        FeasibleSet::Product {
            primal: Box::new(primal),
            dual: Box::new(dual),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::Ball { dim, .. } | FeasibleSet::NonnegBall { dim, .. } => *dim,
            FeasibleSet::Product { primal, dual } => primal.dim() + dual.dim(),
        }
    }

    /// Radius of a ball kind; for products, the radius of the primal block.
    pub fn radius(&self) -> f64 {
        match self {
            FeasibleSet::Ball { radius, .. } | FeasibleSet::NonnegBall { radius, .. } => *radius,
            FeasibleSet::Product { primal, .. } => primal.radius(),
        }
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            FeasibleSet::Ball { radius, .. } => x.norm() <= radius * (1.0 + MEMBERSHIP_RTOL),
            FeasibleSet::NonnegBall { radius, .. } => {
                x.iter().all(|&v| v >= 0.0) && x.norm() <= radius * (1.0 + MEMBERSHIP_RTOL)
            }
            FeasibleSet::Product { primal, dual } => {
                let (p, d) = split(x, primal.dim(), dual.dim());
                primal.contains(&p) && dual.contains(&d)
            }
        }
    }

    /// Euclidean projection.
    pub fn project(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim("projection", self.dim(), x.len())?;
        Ok(match self {
            FeasibleSet::Ball { radius, .. } => scale_into_ball(x.clone(), *radius),
            // The orthant-then-ball composition is exact for a cone cut by
            // a centred ball.
            FeasibleSet::NonnegBall { radius, .. } => scale_into_ball(x.map(|v| v.max(0.0)), *radius),
            FeasibleSet::Product { primal, dual } => {
                let (p, d) = split(x, primal.dim(), dual.dim());
                crate::bregman::join(&primal.project(&p)?, &dual.project(&d)?)
            }
        })
    }

    /// Uniform sample from the set.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        match self {
            FeasibleSet::Ball { dim, radius } => sample_ball(rng, *dim, *radius),
            FeasibleSet::NonnegBall { dim, radius } => sample_ball(rng, *dim, *radius).map(f64::abs),
            FeasibleSet::Product { primal, dual } => {
                crate::bregman::join(&primal.sample(rng), &dual.sample(rng))
            }
        }
    }
}

fn scale_into_ball(x: DVector<f64>, radius: f64) -> DVector<f64> {
    let n = x.norm();
    if n <= radius {
        x
    } else {
        x * (radius / n)
    }
}

fn sample_ball<R: Rng + ?Sized>(rng: &mut R, dim: usize, radius: f64) -> DVector<f64> {
    let dir: DVector<f64> = DVector::from_fn(dim, |_, _| StandardNormal.sample(rng));
    let n = dir.norm();
    if n == 0.0 || dim == 0 {
        return DVector::zeros(dim);
    }
    let u: f64 = rng.random();
    dir * (radius * u.powf(1.0 / dim as f64) / n)
}

/// Regularity constants of an oracle relative to its prox.
///
/// `alpha`, `l` and `delta` classify an objective as `(alpha, L, delta)`-
/// relatively smooth; `m` is a relative Lipschitz / relative boundedness
/// constant; `mu` is the relative strong convexity modulus (0 when absent).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessDescriptor {
    pub alpha: f64,
    pub l: Option<f64>,
    pub delta: Option<f64>,
    pub m: Option<f64>,
    pub mu: f64,
}

impl SmoothnessDescriptor {
    /// `M`-relatively Lipschitz (or `M`-relatively bounded for operators).
    pub fn relatively_lipschitz(m: f64) -> Self {
        Self {
            alpha: 1.0,
            l: None,
            delta: None,
            m: Some(m),
            mu: 0.0,
        }
    }

    /// `L`-relatively smooth.
    pub fn relatively_smooth(l: f64) -> Self {
        Self {
            alpha: 0.0,
            l: Some(l),
            delta: Some(0.0),
            m: None,
            mu: 0.0,
        }
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_m(mut self, m: f64) -> Self {
        self.m = Some(m);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad(format!("alpha must lie in [0, 1], got {}", self.alpha));
        }
        if self.l.is_none() && self.m.is_none() {
            return bad("descriptor needs at least one of L or M".into());
        }
        if self.l.is_some_and(|l| !(l > 0.0)) || self.m.is_some_and(|m| !(m > 0.0)) {
            return bad("L and M must be positive".into());
        }
        if self.delta.is_some_and(|d| d < 0.0) || !(self.mu >= 0.0) {
            return bad("delta and mu must be nonnegative".into());
        }
        Ok(())
    }

    pub fn is_strongly_convex(&self) -> bool {
        self.mu > 0.0
    }
}

/// A convex function with a first-order oracle.
pub trait Objective: Send + Sync {
    fn value(&self, x: &DVector<f64>) -> f64;
    /// Any element of the subdifferential at `x`.
    fn subgrad(&self, x: &DVector<f64>) -> DVector<f64>;
}

/// A monotone map `g: Q -> R^n`.
pub trait Operator: Send + Sync {
    fn apply(&self, x: &DVector<f64>) -> DVector<f64>;
}

/// Objective built from a pair of closures.
pub struct FnObjective<F, G> {
    value: F,
    subgrad: G,
}

impl<F, G> FnObjective<F, G>
where
    F: Fn(&DVector<f64>) -> f64 + Send + Sync,
    G: Fn(&DVector<f64>) -> DVector<f64> + Send + Sync,
{
    pub fn new(value: F, subgrad: G) -> Self {
        Self { value, subgrad }
    }
}

impl<F, G> Objective for FnObjective<F, G>
where
    F: Fn(&DVector<f64>) -> f64 + Send + Sync,
    G: Fn(&DVector<f64>) -> DVector<f64> + Send + Sync,
{
    fn value(&self, x: &DVector<f64>) -> f64 {
        (self.value)(x)
    }
    fn subgrad(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.subgrad)(x)
    }
}

/// Operator built from a closure.
pub struct FnOperator<F>(pub F);

impl<F> Operator for FnOperator<F>
where
    F: Fn(&DVector<f64>) -> DVector<f64> + Send + Sync,
{
    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.0)(x)
    }
}

/// `f(x) = 1/2 |x|^2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct HalfSquaredNorm;

impl Objective for HalfSquaredNorm {
    fn value(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.norm_squared()
    }
    fn subgrad(&self, x: &DVector<f64>) -> DVector<f64> {
        x.clone()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Constant(pub f64);

impl Objective for Constant {
    fn value(&self, _x: &DVector<f64>) -> f64 {
        self.0
    }
    fn subgrad(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::zeros(x.len())
    }
}

/// `g(x) = x`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl Operator for Identity {
    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        x.clone()
    }
}

/// The subgradient map of an objective, viewed as a monotone operator.
pub struct SubgradientOperator(pub Arc<dyn Objective>);

impl Operator for SubgradientOperator {
    fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        self.0.subgrad(x)
    }
}

/// An objective together with the geometry it is posed in.
#[derive(Clone)]
pub struct ObjectiveOracle {
    func: Arc<dyn Objective>,
    pub prox: ProxSetup,
    pub descriptor: SmoothnessDescriptor,
    pub set: FeasibleSet,
}

impl ObjectiveOracle {
    pub fn new(
        func: Arc<dyn Objective>,
        prox: ProxSetup,
        descriptor: SmoothnessDescriptor,
        set: FeasibleSet,
    ) -> Result<Self> {
        check_dim("objective oracle set", prox.dim(), set.dim())?;
        descriptor.validate()?;
        Ok(Self {
            func,
            prox,
            descriptor,
            set,
        })
    }

    pub fn dim(&self) -> usize {
        self.prox.dim()
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        self.func.value(x)
    }

    pub fn subgrad(&self, x: &DVector<f64>) -> DVector<f64> {
        self.func.subgrad(x)
    }

    pub fn function(&self) -> Arc<dyn Objective> {
        Arc::clone(&self.func)
    }

    /// The subgradient map as an operator oracle on the same geometry.
    pub fn as_operator(&self) -> OperatorOracle {
        OperatorOracle {
            op: Arc::new(SubgradientOperator(self.function())),
            prox: self.prox.clone(),
            descriptor: self.descriptor,
            set: self.set.clone(),
        }
    }
}

impl fmt::Debug for ObjectiveOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveOracle")
            .field("prox", &self.prox)
            .field("descriptor", &self.descriptor)
            .field("set", &self.set)
            .finish_non_exhaustive()
    }
}

/// A monotone operator together with its geometry.
#[derive(Clone)]
pub struct OperatorOracle {
    op: Arc<dyn Operator>,
    pub prox: ProxSetup,
    pub descriptor: SmoothnessDescriptor,
    pub set: FeasibleSet,
}

impl OperatorOracle {
    pub fn new(
        op: Arc<dyn Operator>,
        prox: ProxSetup,
        descriptor: SmoothnessDescriptor,
        set: FeasibleSet,
    ) -> Result<Self> {
        check_dim("operator oracle set", prox.dim(), set.dim())?;
        descriptor.validate()?;
        Ok(Self {
            op,
            prox,
            descriptor,
            set,
        })
    }

    pub fn dim(&self) -> usize {
        self.prox.dim()
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        self.op.apply(x)
    }
}

impl fmt::Debug for OperatorOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorOracle")
            .field("prox", &self.prox)
            .field("descriptor", &self.descriptor)
            .field("set", &self.set)
            .finish_non_exhaustive()
    }
}

/// `f(x) = 1/2 |x|^2` on the unit ball with the Euclidean prox: 1-smooth,
/// 1-strongly convex and 1-Lipschitz relative to `1/2 |x|^2`.
pub fn toy_quadratic(dim: usize) -> ObjectiveOracle {
    ObjectiveOracle::new(
        Arc::new(HalfSquaredNorm),
        ProxSetup::euclidean(dim),
        SmoothnessDescriptor::relatively_smooth(1.0).with_m(1.0).with_mu(1.0),
        FeasibleSet::ball(dim, 1.0),
    )
    .expect("consistent toy geometry")
}

/// `g(x) = x` on the unit ball with the Euclidean prox (relatively bounded with `M = 1`).
pub fn toy_identity_operator(dim: usize) -> OperatorOracle {
    OperatorOracle::new(
        Arc::new(Identity),
        ProxSetup::euclidean(dim),
        SmoothnessDescriptor::relatively_lipschitz(1.0),
        FeasibleSet::ball(dim, 1.0),
    )
    .expect("consistent toy geometry")
}

/// Largest singular value.
pub(crate) fn spectral_norm(a: &nalgebra::DMatrix<f64>) -> f64 {
    a.singular_values().max()
}

/// Smallest singular value.
pub(crate) fn min_singular_value(a: &nalgebra::DMatrix<f64>) -> f64 {
    a.singular_values().min()
}
