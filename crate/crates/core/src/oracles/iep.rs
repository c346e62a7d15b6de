//! Intersection of ellipsoids, posed as `min_x max_i { 1/2 x'A_i x + b_i'x + c_i }`
//! over the unit ball.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{spectral_norm, FeasibleSet, Objective, ObjectiveOracle, SmoothnessDescriptor};
use crate::bregman::ProxSetup;
use crate::error::{check_dim, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct IepInstance {
    pub a: Vec<DMatrix<f64>>,
    pub b: Vec<DVector<f64>>,
    pub c: Vec<f64>,
    /// `max_i |A_i|_2^2`
    pub sigma: f64,
    /// `max_i |A_i b_i|_2`
    pub rho: f64,
    /// `max_i |b_i|_2^2`
    pub gamma: f64,
    pub seed: u64,
}

impl IepInstance {
    /// Builds an instance and derives `sigma`, `rho`, `gamma` from the data.
    pub fn from_parts(
        a: Vec<DMatrix<f64>>,
        b: Vec<DVector<f64>>,
        c: Vec<f64>,
        seed: u64,
    ) -> Result<Self> {
        let m = a.len();
        if m == 0 {
            return Err(Error::InvalidConfig("IEP needs at least one ellipsoid".into()));
        }
        check_dim("IEP vectors b", m, b.len())?;
        check_dim("IEP constants c", m, c.len())?;
        let n = a[0].nrows();
        for (ai, bi) in a.iter().zip(&b) {
            check_dim("IEP matrix rows", n, ai.nrows())?;
            check_dim("IEP matrix cols", n, ai.ncols())?;
            check_dim("IEP vector", n, bi.len())?;
            if (ai - ai.transpose()).amax() > 1e-10 * (1.0 + ai.amax()) {
                return Err(Error::InvalidConfig("IEP matrices must be symmetric".into()));
            }
        }
        let sigma = a.iter().map(|ai| spectral_norm(ai).powi(2)).fold(0.0, f64::max);
        let rho = a
            .iter()
            .zip(&b)
            .map(|(ai, bi)| (ai * bi).norm())
            .fold(0.0, f64::max);
        let gamma = b.iter().map(|bi| bi.norm_squared()).fold(0.0, f64::max);
        Ok(Self {
            a,
            b,
            c,
            sigma,
            rho,
            gamma,
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.a[0].nrows()
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    /// Default radius bound `R^2 = 6 sigma + 4 rho + 2 gamma`.
    pub fn r_sq(&self) -> f64 {
        6.0 * self.sigma + 4.0 * self.rho + 2.0 * self.gamma
    }

    /// Prox `gamma/2 |x|^2 + rho/3 |x|^3 + sigma/4 |x|^4`.
    pub fn prox(&self) -> Result<ProxSetup> {
        ProxSetup::power_composite(self.n(), self.gamma, self.rho, self.sigma)
    }
}

/// Pointwise maximum of the quadratics. Ties resolve to the lowest index.
#[derive(Debug, Clone)]
pub struct IepObjective {
    inst: IepInstance,
}

impl IepObjective {
    pub fn new(inst: IepInstance) -> Self {
        Self { inst }
    }

    fn piece(&self, i: usize, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.inst.a[i] * x)) + self.inst.b[i].dot(x) + self.inst.c[i]
    }

    /// Index of the active piece and its value.
    pub fn active(&self, x: &DVector<f64>) -> (usize, f64) {
        let mut best = (0, self.piece(0, x));
        for i in 1..self.inst.m() {
            let v = self.piece(i, x);
            if v > best.1 {
                best = (i, v);
            }
        }
        best
    }
}

impl Objective for IepObjective {
    fn value(&self, x: &DVector<f64>) -> f64 {
        self.active(x).1
    }

    fn subgrad(&self, x: &DVector<f64>) -> DVector<f64> {
        let (j, _) = self.active(x);
        &self.inst.a[j] * x + &self.inst.b[j]
    }
}

/// The IEP objective on the unit ball, 1-relatively Lipschitz with respect
/// to its power prox.
pub fn iep_oracle(inst: &IepInstance) -> Result<ObjectiveOracle> {
    ObjectiveOracle::new(
        Arc::new(IepObjective::new(inst.clone())),
        inst.prox()?,
        SmoothnessDescriptor::relatively_lipschitz(1.0),
        FeasibleSet::ball(inst.n(), 1.0),
    )
}

/// Uniform `[0, 1)` data. Each `A_i` is `S'S` with `S` the symmetric part of
/// a uniform matrix, which makes it positive semi-definite.
pub fn generate_iep(n: usize, m: usize, seed: u64) -> Result<IepInstance> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidConfig("IEP needs n, m >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    let mut c = Vec::with_capacity(m);
    for _ in 0..m {
        let raw = DMatrix::from_fn(n, n, |_, _| rng.random::<f64>());
        let s = (&raw + raw.transpose()) * 0.5;
        let psd = s.transpose() * &s;
        // Exact symmetry despite rounding in the product.
        a.push((&psd + psd.transpose()) * 0.5);
        b.push(DVector::from_fn(n, |_, _| rng.random::<f64>()));
        c.push(rng.random::<f64>());
    }
    IepInstance::from_parts(a, b, c, seed)
}
