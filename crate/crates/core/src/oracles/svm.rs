//! Hinge-loss SVM with quadratic functional constraints, as the monotone
//! operator of its Lagrange saddle-point problem.
//!
//! Primal: `f(x) = 1/n sum_i max(0, 1 - y_i <x, w_i>) + lambda/2 |x|^2`.
//! Constraints: `phi_p(x) = sum_i alpha_{pi} x_i^2 - 1 <= 0`.
//! Operator on `(x, lam)`:
//! `G = ( grad f(x) + sum_p lam_p grad phi_p(x), -phi_1(x), ..., -phi_m(x) )`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{FeasibleSet, Operator, OperatorOracle, SmoothnessDescriptor};
use crate::bregman::{join, split, ProxSetup};
use crate::error::{check_dim, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SvmSaddleInstance {
    /// Row `i` is the feature vector `w_i`.
    pub w: DMatrix<f64>,
    pub labels: DVector<f64>,
    pub lambda_reg: f64,
    /// `m x n` constraint coefficients `alpha_{pi}`.
    pub alpha_constr: DMatrix<f64>,
    pub seed: u64,
}

impl SvmSaddleInstance {
    pub fn new(
        w: DMatrix<f64>,
        labels: DVector<f64>,
        lambda_reg: f64,
        alpha_constr: DMatrix<f64>,
        seed: u64,
    ) -> Result<Self> {
        check_dim("SVM labels", w.nrows(), labels.len())?;
        check_dim("SVM constraint columns", w.ncols(), alpha_constr.ncols())?;
        if alpha_constr.nrows() == 0 {
            return Err(Error::InvalidConfig("SVM saddle needs m >= 1 constraints".into()));
        }
        if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
            return Err(Error::InvalidConfig("SVM labels must be +1 or -1".into()));
        }
        if !(lambda_reg > 0.0) {
            return Err(Error::InvalidConfig("SVM regulariser must be positive".into()));
        }
        Ok(Self {
            w,
            labels,
            lambda_reg,
            alpha_constr,
            seed,
        })
    }

    /// Number of samples.
    pub fn samples(&self) -> usize {
        self.w.nrows()
    }

    /// Primal dimension.
    pub fn n(&self) -> usize {
        self.w.ncols()
    }

    /// Number of constraints / multipliers.
    pub fn m(&self) -> usize {
        self.alpha_constr.nrows()
    }

    fn row_norms(&self) -> impl Iterator<Item = f64> + '_ {
        self.w.row_iter().map(|r| r.norm())
    }

    /// `(a0, a1, a2) = (1/n sum |w_i|^2, 2 lambda/n sum |w_i|, lambda^2)`.
    pub fn prox_coefficients(&self) -> (f64, f64, f64) {
        let k = self.samples() as f64;
        let a0 = self.row_norms().map(|r| r * r).sum::<f64>() / k;
        let a1 = 2.0 * self.lambda_reg / k * self.row_norms().sum::<f64>();
        (a0, a1, self.lambda_reg * self.lambda_reg)
    }

    pub fn prox(&self) -> Result<ProxSetup> {
        let (a0, a1, a2) = self.prox_coefficients();
        ProxSetup::product(ProxSetup::power_composite(self.n(), a0, a1, a2)?, self.m())
    }

    /// Radius `R` solving `(R - diam^2/2)^2 = 6 lambda^2 + 2 lambda/n sum |w_i| + 2/n sum |w_i|^2`,
    /// returned squared.
    pub fn r_sq_with_diameter(&self, diam: f64) -> f64 {
        let k = self.samples() as f64;
        let l = self.lambda_reg;
        let rhs = 6.0 * l * l
            + 2.0 * l / k * self.row_norms().sum::<f64>()
            + 2.0 / k * self.row_norms().map(|r| r * r).sum::<f64>();
        let r = 0.5 * diam * diam + rhs.sqrt();
        r * r
    }

    /// [`Self::r_sq_with_diameter`] with diameter 2 for the unit multiplier ball.
    pub fn default_r_sq(&self) -> f64 {
        self.r_sq_with_diameter(2.0)
    }

    pub fn constraint(&self, p: usize, x: &DVector<f64>) -> f64 {
        self.alpha_constr
            .row(p)
            .iter()
            .zip(x.iter())
            .map(|(a, xi)| a * xi * xi)
            .sum::<f64>()
            - 1.0
    }

    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        let k = self.samples() as f64;
        let hinge: f64 = (0..self.samples())
            .map(|i| (1.0 - self.labels[i] * self.w.row(i).dot(&x.transpose())).max(0.0))
            .sum();
        hinge / k + 0.5 * self.lambda_reg * x.norm_squared()
    }

    /// Hinge-loss subgradient plus `lambda x`; a sample exactly at margin 1
    /// contributes nothing.
    pub fn objective_subgrad(&self, x: &DVector<f64>) -> DVector<f64> {
        let k = self.samples() as f64;
        let mut g = x * self.lambda_reg;
        for i in 0..self.samples() {
            let wi = self.w.row(i);
            let y = self.labels[i];
            if 1.0 - y * wi.dot(&x.transpose()) > 0.0 {
                for (gj, wj) in g.iter_mut().zip(wi.iter()) {
                    *gj -= y * wj / k;
                }
            }
        }
        g
    }

    /// Starting point `(1/sqrt(n+m)) 1`.
    pub fn start(&self) -> DVector<f64> {
        let d = self.n() + self.m();
        DVector::from_element(d, 1.0 / (d as f64).sqrt())
    }
}

#[derive(Debug, Clone)]
pub struct SvmSaddleOperator {
    inst: SvmSaddleInstance,
}

impl SvmSaddleOperator {
    pub fn new(inst: SvmSaddleInstance) -> Self {
        Self { inst }
    }

    pub fn instance(&self) -> &SvmSaddleInstance {
        &self.inst
    }
}

impl Operator for SvmSaddleOperator {
    fn apply(&self, z: &DVector<f64>) -> DVector<f64> {
        let inst = &self.inst;
        let (x, lam) = split(z, inst.n(), inst.m());
        let mut primal = inst.objective_subgrad(&x);
        for p in 0..inst.m() {
            let lp = lam[p];
            if lp != 0.0 {
                for (j, gj) in primal.iter_mut().enumerate() {
                    *gj += lp * 2.0 * inst.alpha_constr[(p, j)] * x[j];
                }
            }
        }
        let dual = DVector::from_fn(inst.m(), |p, _| -inst.constraint(p, &x));
        join(&primal, &dual)
    }
}

/// Saddle operator on `unit ball x unit nonnegative ball`, with the product
/// prox built from the instance's power coefficients.
pub fn svm_saddle_operator(inst: &SvmSaddleInstance) -> Result<OperatorOracle> {
    OperatorOracle::new(
        Arc::new(SvmSaddleOperator::new(inst.clone())),
        inst.prox()?,
        SmoothnessDescriptor::relatively_lipschitz(1.0),
        FeasibleSet::product(
            FeasibleSet::ball(inst.n(), 1.0),
            FeasibleSet::nonneg_ball(inst.m(), 1.0),
        ),
    )
}

/// Features and constraint magnitudes are standard normal; labels are
/// uniform signs. Constraint coefficients are taken in absolute value so
/// each `phi_p` is convex and the saddle operator is monotone.
pub fn generate_svm(n: usize, m: usize, lambda_reg: f64, seed: u64) -> Result<SvmSaddleInstance> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidConfig("SVM saddle needs n, m >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
    let labels = DVector::from_fn(n, |_, _| if rng.random::<bool>() { 1.0 } else { -1.0 });
    let alpha = DMatrix::from_fn(m, n, |_, _| {
        let a: f64 = StandardNormal.sample(&mut rng);
        a.abs()
    });
    SvmSaddleInstance::new(w, labels, lambda_reg, alpha, seed)
}
