//! Mirror descent with one functional constraint `g(x) <= 0`, and a restart
//! wrapper for relatively strongly convex problems.

use std::time::Instant;

use nalgebra::DVector;

use crate::bregman::ProxSetup;
use crate::error::{check_dim, Error, Result};
use crate::mirror_step::{ball_step, StepRequest};
use crate::oracles::{FeasibleSet, ObjectiveOracle};
use crate::sum::CompensatedVecSum;

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingConfig {
    pub eps: f64,
    pub m_f: f64,
    pub m_g: f64,
    /// `Theta0^2 >= V(x_*, x0)`.
    pub theta0_sq: f64,
    pub x0: DVector<f64>,
    /// Safety cap; the stopping rule normally fires well before.
    pub max_steps: usize,
}

impl SwitchingConfig {
    pub fn new(eps: f64, m_f: f64, m_g: f64, theta0_sq: f64, x0: DVector<f64>) -> Self {
        Self {
            eps,
            m_f,
            m_g,
            theta0_sq,
            x0,
            max_steps: 50_000_000,
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !(pos(self.eps) && pos(self.m_f) && pos(self.m_g) && pos(self.theta0_sq)) {
            return Err(Error::InvalidConfig(
                "eps, M_f, M_g and Theta0^2 must be positive".into(),
            ));
        }
        check_dim("switching start point", dim, self.x0.len())
    }

    /// Steps after which the stopping rule is guaranteed to have fired.
    pub fn step_bound(&self) -> usize {
        let m2 = self.m_f.max(self.m_g).powi(2);
        1 + (2.0 * self.theta0_sq * m2 / (self.eps * self.eps)).ceil() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingReport {
    /// Mean of the productive iterates.
    pub x_hat: DVector<f64>,
    pub x_last: DVector<f64>,
    pub steps: usize,
    /// Indices `k` of productive steps (`g(x_k) <= eps`).
    pub productive: Vec<usize>,
    pub nonproductive: Vec<usize>,
    /// `g(x_k)` for every step `k`.
    pub g_values: Vec<f64>,
    pub f_hat: f64,
    pub g_hat: f64,
    pub wall_time_s: f64,
}

/// `argmin_{y in Q} h <grad, y> + V(y, x)`.
pub fn mirror_step_fixed(
    prox: &ProxSetup,
    set: &FeasibleSet,
    x: &DVector<f64>,
    grad: &DVector<f64>,
    h: f64,
) -> Result<DVector<f64>> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidConfig(format!("step size must be positive, got {h}")));
    }
    ball_step(&StepRequest {
        prox,
        set,
        x_k: x,
        v: grad,
        l: 1.0 / h,
    })
}

fn stop_rule(cfg: &SwitchingConfig, productive: usize, nonproductive: usize) -> bool {
    2.0 * cfg.theta0_sq / (cfg.eps * cfg.eps)
        <= productive as f64 / (cfg.m_f * cfg.m_f) + nonproductive as f64 / (cfg.m_g * cfg.m_g)
}

fn switching(
    prox: &ProxSetup,
    set: &FeasibleSet,
    f: &ObjectiveOracle,
    g: &ObjectiveOracle,
    cfg: &SwitchingConfig,
) -> Result<SwitchingReport> {
    cfg.validate(prox.dim())?;
    let start = Instant::now();
    let h_f = cfg.eps / (cfg.m_f * cfg.m_f);
    let h_g = cfg.eps / (cfg.m_g * cfg.m_g);
    let mut x = cfg.x0.clone();
    let mut productive = Vec::new();
    let mut nonproductive = Vec::new();
    let mut g_values = Vec::new();
    let mut acc = CompensatedVecSum::zeros(x.len());

    for k in 0..cfg.max_steps {
        let gx = g.value(&x);
        g_values.push(gx);
        let next = if gx <= cfg.eps {
            productive.push(k);
            acc.add_scaled(1.0, &x);
            mirror_step_fixed(prox, set, &x, &f.subgrad(&x), h_f)?
        } else {
            nonproductive.push(k);
            mirror_step_fixed(prox, set, &x, &g.subgrad(&x), h_g)?
        };
        x = next;
        if stop_rule(cfg, productive.len(), nonproductive.len()) {
            break;
        }
    }
    if !stop_rule(cfg, productive.len(), nonproductive.len()) {
        return Err(Error::Stalled(format!(
            "stopping rule did not fire within {} steps",
            cfg.max_steps
        )));
    }
    if productive.is_empty() {
        return Err(Error::NoProductiveSteps);
    }
    let x_hat = acc.value() / productive.len() as f64;
    Ok(SwitchingReport {
        f_hat: f.value(&x_hat),
        g_hat: g.value(&x_hat),
        x_hat,
        x_last: x,
        steps: g_values.len(),
        productive,
        nonproductive,
        g_values,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Switching mirror descent: a step along `grad f` with `h = eps / M_f^2`
/// when `g(x_k) <= eps`, otherwise along `grad g` with `h = eps / M_g^2`,
/// until `2 Theta0^2 / eps^2 <= |I| / M_f^2 + |J| / M_g^2`.
///
/// Both oracles must share prox and feasible set.
pub fn alg7_switching_md(
    f: &ObjectiveOracle,
    g_constr: &ObjectiveOracle,
    cfg: &SwitchingConfig,
) -> Result<SwitchingReport> {
    if f.prox != g_constr.prox || f.set != g_constr.set {
        return Err(Error::InvalidConfig(
            "objective and constraint must share prox and feasible set".into(),
        ));
    }
    switching(&f.prox, &f.set, f, g_constr, cfg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartConfig {
    pub eps: f64,
    pub mu: f64,
    /// `d <= Omega / 2` on the unit-scaled domain.
    pub omega: f64,
    pub x0: DVector<f64>,
    /// `R0^2 >= V(x0, x_*)`.
    pub r0_sq: f64,
    pub m_f: f64,
    pub m_g: f64,
}

impl RestartConfig {
    /// Number of restarts the stopping rule `p > log2(mu R0^2 / eps)` allows.
    pub fn restart_count(&self) -> usize {
        let lim = (self.mu * self.r0_sq / self.eps).log2();
        if lim < 1.0 {
            1
        } else {
            lim.floor() as usize
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartRecord {
    pub p: usize,
    pub r_sq: f64,
    pub eps_p: f64,
    /// New centre `x_p`.
    pub x: DVector<f64>,
    pub steps: usize,
    pub f: f64,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartReport {
    pub x: DVector<f64>,
    pub f: f64,
    pub g: f64,
    pub restarts: Vec<RestartRecord>,
    pub total_steps: usize,
    pub wall_time_s: f64,
}

/// Restarted switching mirror descent on shrinking Bregman balls.
///
/// Restart `p` runs [`alg7_switching_md`] from `x_{p-1}` with the prox
/// `d((x - x_{p-1}) / R_{p-1})`, accuracy `eps_p = mu R_p^2`, `R_p^2 = R0^2 2^-p`
/// and `Theta0^2 = Omega / 2`. The loop ends once `p > log2(mu R0^2 / eps)`
/// and always runs at least once.
pub fn alg8_restarts(
    f: &ObjectiveOracle,
    g_constr: &ObjectiveOracle,
    cfg: &RestartConfig,
) -> Result<RestartReport> {
    if f.prox != g_constr.prox || f.set != g_constr.set {
        return Err(Error::InvalidConfig(
            "objective and constraint must share prox and feasible set".into(),
        ));
    }
    let pos = |v: f64| v > 0.0 && v.is_finite();
    if !(pos(cfg.eps) && pos(cfg.mu) && pos(cfg.omega) && pos(cfg.r0_sq)) {
        return Err(Error::InvalidConfig(
            "eps, mu, Omega and R0^2 must be positive".into(),
        ));
    }
    check_dim("restart start point", f.dim(), cfg.x0.len())?;

    let start = Instant::now();
    let limit = (cfg.mu * cfg.r0_sq / cfg.eps).log2();
    let mut center = cfg.x0.clone();
    let mut radius = cfg.r0_sq.sqrt();
    let mut restarts = Vec::new();
    let mut total_steps = 0;
    let mut p = 1;
    loop {
        let prox = ProxSetup::rescaled(f.prox.clone(), center.clone(), radius)?;
        let r_sq = cfg.r0_sq * 0.5f64.powi(p as i32);
        let eps_p = cfg.mu * r_sq;
        let inner = SwitchingConfig::new(eps_p, cfg.m_f, cfg.m_g, 0.5 * cfg.omega, center.clone());
        let rep = switching(&prox, &f.set, f, g_constr, &inner).map_err(|e| Error::Restart {
            restart: p,
            source: Box::new(e),
        })?;
        total_steps += rep.steps;
        center = rep.x_hat;
        radius = r_sq.sqrt();
        restarts.push(RestartRecord {
            p,
            r_sq,
            eps_p,
            x: center.clone(),
            steps: rep.steps,
            f: rep.f_hat,
            g: rep.g_hat,
        });
        p += 1;
        if p as f64 > limit {
            break;
        }
    }
    Ok(RestartReport {
        f: f.value(&center),
        g: g_constr.value(&center),
        x: center,
        restarts,
        total_steps,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}
