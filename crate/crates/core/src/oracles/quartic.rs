//! `f(x) = 1/4 |Ex|_2^4 + 1/4 |Ax - b|_4^4 + 1/2 |Cx - b_hat|_2^2`, relatively
//! smooth and relatively strongly convex with respect to `1/4 |x|^4 + 1/2 |x|^2`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{
    min_singular_value, spectral_norm, FeasibleSet, Objective, ObjectiveOracle, SmoothnessDescriptor,
};
use crate::bregman::ProxSetup;
use crate::error::{check_dim, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct QuarticInstance {
    pub e: DMatrix<f64>,
    pub a: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub b: DVector<f64>,
    pub b_hat: DVector<f64>,
    /// Relative smoothness constant
    /// `3|E|^4 + 3|A|^4 + 6|A|^3 |b| + 3|A|^2 |b|^2 + |C|^2`.
    pub m_const: f64,
    /// Relative strong convexity `min(sigma_E^4 / 3, sigma_C^2)`.
    pub mu_const: f64,
    pub seed: u64,
}

impl QuarticInstance {
    pub fn from_parts(
        e: DMatrix<f64>,
        a: DMatrix<f64>,
        c: DMatrix<f64>,
        b: DVector<f64>,
        b_hat: DVector<f64>,
        seed: u64,
    ) -> Result<Self> {
        let n = e.nrows();
        for mat in [&e, &a, &c] {
            check_dim("quartic matrix rows", n, mat.nrows())?;
            check_dim("quartic matrix cols", n, mat.ncols())?;
        }
        check_dim("quartic b", n, b.len())?;
        check_dim("quartic b_hat", n, b_hat.len())?;
        let (ne, na, nc, nb) = (spectral_norm(&e), spectral_norm(&a), spectral_norm(&c), b.norm());
        let m_const = 3.0 * ne.powi(4)
            + 3.0 * na.powi(4)
            + 6.0 * na.powi(3) * nb
            + 3.0 * na * na * nb * nb
            + nc * nc;
        let mu_const = (min_singular_value(&e).powi(4) / 3.0).min(min_singular_value(&c).powi(2));
        Ok(Self {
            e,
            a,
            c,
            b,
            b_hat,
            m_const,
            mu_const,
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.e.nrows()
    }
}

#[derive(Debug, Clone)]
pub struct QuarticObjective {
    inst: QuarticInstance,
}

impl QuarticObjective {
    pub fn new(inst: QuarticInstance) -> Self {
        Self { inst }
    }
}

impl Objective for QuarticObjective {
    fn value(&self, x: &DVector<f64>) -> f64 {
        let i = &self.inst;
        let ex = (&i.e * x).norm_squared();
        let r = &i.a * x - &i.b;
        let q: f64 = r.iter().map(|v| v.powi(4)).sum();
        let s = (&i.c * x - &i.b_hat).norm_squared();
        0.25 * ex * ex + 0.25 * q + 0.5 * s
    }

    fn subgrad(&self, x: &DVector<f64>) -> DVector<f64> {
        let i = &self.inst;
        let ex = &i.e * x;
        let r = &i.a * x - &i.b;
        let r3 = r.map(|v| v * v * v);
        i.e.tr_mul(&ex) * ex.norm_squared() + i.a.tr_mul(&r3) + i.c.tr_mul(&(&i.c * x - &i.b_hat))
    }
}

pub fn quartic_oracle(inst: &QuarticInstance) -> Result<ObjectiveOracle> {
    let n = inst.n();
    let descriptor =
        SmoothnessDescriptor::relatively_smooth(inst.m_const.max(f64::MIN_POSITIVE)).with_mu(inst.mu_const);
    ObjectiveOracle::new(
        Arc::new(QuarticObjective::new(inst.clone())),
        ProxSetup::quartic_plus_quadratic(n),
        descriptor,
        FeasibleSet::ball(n, 1.0),
    )
}

/// All matrices and vectors standard normal.
pub fn generate_quartic(n: usize, seed: u64) -> Result<QuarticInstance> {
    if n == 0 {
        return Err(Error::InvalidConfig("quartic needs n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mat = || DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
    let (e, a, c) = (mat(), mat(), mat());
    let b = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
    let b_hat = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
    QuarticInstance::from_parts(e, a, c, b, b_hat, seed)
}
