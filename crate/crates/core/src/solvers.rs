//! Adaptive and universal mirror-descent methods.
//!
//! All six methods share one backtracking loop. At the start of every outer
//! iteration the trial constant `L` (and, for the inexact variants, `delta`)
//! is halved; while the acceptance test fails it is doubled and the
//! subproblem re-solved. They differ in
//!
//! | method | acceptance test | slack | stop | averages |
//! |---|---|---|---|---|
//! | [`alg1_adaptive_vi`] | surrogate | `eps/2` | `S_N >= 2R^2/eps` | `x_k` |
//! | [`alg2_vi_inexact`] | surrogate | `delta_k` | `N` steps | `x_k` |
//! | [`alg3_adaptive`] | surrogate | `eps/2` | `S_N >= 2R^2/eps` | `x_{k+1}` |
//! | [`alg4_inexact`] | surrogate | `delta_k` | `N` steps | `x_{k+1}` |
//! | [`alg5_universal_inexact`] | function value | `delta_k` | `N` steps | `x_{k+1}` |
//! | [`alg6_universal`] | function value | `3eps/4` | `S_N >= 4R^2/eps` | `x_{k+1}` |
//!
//! where the surrogate test is `<v, x+ - x_k> + L V(x+, x_k) + slack >= 0`
//! and the function-value test is
//! `f(x+) <= f(x_k) + <v, x+ - x_k> + L V(x+, x_k) + slack`. Averages use
//! weights `1 / L_{k+1}` and `S_N` is their sum.

use std::time::Instant;

use nalgebra::DVector;

use crate::bregman::ProxSetup;
use crate::error::{check_dim, Error, Result};
use crate::mirror_step::{ball_step, StepRequest};
use crate::oracles::{FeasibleSet, ObjectiveOracle, OperatorOracle};
use crate::sum::{CompensatedSum, CompensatedVecSum};

/// Floor applied to the adaptive inexactness `delta`.
pub const DELTA_FLOOR: f64 = 1e-300;

/// Rejections allowed within one outer iteration before giving up.
const MAX_TRIALS: u32 = 4200;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub eps: f64,
    pub l0: f64,
    pub delta0: f64,
    pub x0: DVector<f64>,
    pub r_sq: f64,
    /// Safety cap on outer iterations for the methods with a stopping rule.
    pub max_outer: usize,
    /// Keep every accepted iterate in the log (needed for replay).
    pub record_iterates: bool,
    /// Iteration counts at which to snapshot the running average.
    pub snapshots: Vec<usize>,
}

impl RunConfig {
    pub fn new(eps: f64, l0: f64, x0: DVector<f64>, r_sq: f64) -> Self {
        Self {
            eps,
            l0,
            delta0: 0.5,
            x0,
            r_sq,
            max_outer: 1_000_000,
            record_iterates: false,
            snapshots: Vec::new(),
        }
    }

    pub fn with_delta0(mut self, delta0: f64) -> Self {
        self.delta0 = delta0;
        self
    }

    pub fn with_max_outer(mut self, max_outer: usize) -> Self {
        self.max_outer = max_outer;
        self
    }

    pub fn recording(mut self) -> Self {
        self.record_iterates = true;
        self
    }

    pub fn with_snapshots(mut self, at: Vec<usize>) -> Self {
        self.snapshots = at;
        self
    }

    fn validate(&self, prox: &ProxSetup, set: &FeasibleSet) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !pos(self.eps) || !pos(self.l0) || !pos(self.r_sq) {
            return Err(Error::InvalidConfig(format!(
                "eps, L0 and R^2 must be positive (eps={}, L0={}, R^2={})",
                self.eps, self.l0, self.r_sq
            )));
        }
        if !(self.delta0 >= 0.0 && self.delta0.is_finite()) {
            return Err(Error::InvalidConfig(format!("delta0 must be nonnegative, got {}", self.delta0)));
        }
        if self.max_outer == 0 {
            return Err(Error::InvalidConfig("max_outer must be positive".into()));
        }
        check_dim("starting point", prox.dim(), self.x0.len())?;
        if !set.contains(&self.x0) {
            return Err(Error::InvalidConfig("starting point lies outside the feasible set".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Alg1,
    Alg2,
    Alg3,
    Alg4,
    Alg5,
    Alg6,
}

impl Method {
    fn function_value_test(self) -> bool {
        matches!(self, Method::Alg5 | Method::Alg6)
    }

    fn averages_pre_step(self) -> bool {
        matches!(self, Method::Alg1 | Method::Alg2)
    }

    fn is_vi(self) -> bool {
        matches!(self, Method::Alg1 | Method::Alg2)
    }

    /// Fixed acceptance slack, or `None` for the adaptive `delta`.
    fn fixed_slack(self, eps: f64) -> Option<f64> {
        match self {
            Method::Alg1 | Method::Alg3 => Some(0.5 * eps),
            Method::Alg6 => Some(0.75 * eps),
            _ => None,
        }
    }

    fn threshold(self, eps: f64, r_sq: f64) -> Option<f64> {
        match self {
            Method::Alg1 | Method::Alg3 => Some(2.0 * r_sq / eps),
            Method::Alg6 => Some(4.0 * r_sq / eps),
            _ => None,
        }
    }
}

/// One accepted outer iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterRecord {
    /// Accepted `L_{k+1}`.
    pub l: f64,
    /// Slack used in the accepted test (`delta_{k+1}`, `eps/2` or `3eps/4`).
    pub delta: f64,
    /// Subproblem solves spent on this iteration.
    pub inner: u32,
    /// `S_N` after this iteration.
    pub s_n: f64,
    /// Certificate after this iteration.
    pub certificate: f64,
    /// Best objective value over `x_0 .. x_{k+1}` (objective methods only).
    pub f_best: Option<f64>,
    pub elapsed_s: f64,
    /// `x_{k+1}` when iterates are recorded.
    pub x: Option<DVector<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub method: Method,
    pub x_hat: DVector<f64>,
    pub x_last: DVector<f64>,
    pub x0: DVector<f64>,
    pub l0: f64,
    pub r_sq: f64,
    pub outer_iters: usize,
    pub inner_solves: u64,
    /// Exact `log2(L_N / L_0)` of the final accepted constant.
    pub log2_l_ratio: i64,
    pub s_n: f64,
    /// `sum delta_{k+1} / L_{k+1}`.
    pub delta_over_l: f64,
    pub certificate: f64,
    pub f_best: Option<f64>,
    /// The stopping rule fired (always true for the fixed-`N` methods).
    pub converged: bool,
    pub log: Vec<IterRecord>,
    /// `(N, x_hat after N iterations)` for each requested snapshot.
    pub snapshots: Vec<(usize, DVector<f64>)>,
    pub wall_time_s: f64,
}

/// `x * 2^e` without intermediate under- or overflow of `2^e`.
fn scale_pow2(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

type DirectionFn<'a> = &'a dyn Fn(&DVector<f64>) -> DVector<f64>;
type ValueFn<'a> = &'a dyn Fn(&DVector<f64>) -> f64;

struct Problem<'a> {
    prox: &'a ProxSetup,
    set: &'a FeasibleSet,
    direction: DirectionFn<'a>,
    value: Option<ValueFn<'a>>,
}

fn run(method: Method, p: Problem<'_>, cfg: &RunConfig, fixed_n: Option<usize>) -> Result<RunReport> {
    cfg.validate(p.prox, p.set)?;
    if fixed_n == Some(0) {
        return Err(Error::InvalidConfig("iteration count N must be positive".into()));
    }
    let start = Instant::now();
    let n_dim = cfg.x0.len();
    let fixed_slack = method.fixed_slack(cfg.eps);
    let threshold = method.threshold(cfg.eps, cfg.r_sq);
    let max_iters = fixed_n.unwrap_or(cfg.max_outer);

    let mut x = cfg.x0.clone();
    let mut fx = p.value.map(|f| f(&x));
    let mut f_best = fx;
    let mut exp: i64 = 0;
    let mut s = CompensatedSum::default();
    let mut dl = CompensatedSum::default();
    let mut avg = CompensatedVecSum::zeros(n_dim);
    let mut inner_total: u64 = 0;
    let mut log = Vec::new();
    let mut snapshots = Vec::new();
    let mut snap_iter = cfg.snapshots.iter().copied().peekable();
    let mut converged = fixed_n.is_some();

    for k in 0..max_iters {
        let v = (p.direction)(&x);
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::Numeric(format!("non-finite direction at iteration {k}")));
        }
        exp -= 1;
        let mut trials: u32 = 0;
        let (l, delta, x_next, f_next) = loop {
            trials += 1;
            let l = scale_pow2(cfg.l0, exp).max(f64::MIN_POSITIVE);
            if !l.is_finite() {
                return Err(Error::Stalled(format!("L overflowed at iteration {k}")));
            }
            let delta = match fixed_slack {
                Some(sl) => sl,
                None if cfg.delta0 > 0.0 => scale_pow2(cfg.delta0, exp).max(DELTA_FLOOR),
                None => 0.0,
            };
            let req = StepRequest {
                prox: p.prox,
                set: p.set,
                x_k: &x,
                v: &v,
                l,
            };
            let cand = ball_step(&req)?;
            let model = v.dot(&(&cand - &x)) + l * p.prox.divergence_unchecked(&cand, &x);
            let (ok, f_cand) = if method.function_value_test() {
                let value = p.value.expect("function-value methods carry an objective");
                let fc = value(&cand);
                (fc <= fx.unwrap() + model + delta, Some(fc))
            } else {
                (model + delta >= 0.0, None)
            };
            if ok {
                break (l, delta, cand, f_cand);
            }
            if trials >= MAX_TRIALS {
                return Err(Error::Stalled(format!(
                    "acceptance test failed {MAX_TRIALS} times at iteration {k}"
                )));
            }
            exp += 1;
        };
        inner_total += u64::from(trials);

        let w = 1.0 / l;
        s.add(w);
        dl.add(delta * w);
        if method.averages_pre_step() {
            avg.add_scaled(w, &x);
        } else {
            avg.add_scaled(w, &x_next);
        }

        let f_new = match (f_next, p.value) {
            (Some(f), _) => Some(f),
            (None, Some(value)) => Some(value(&x_next)),
            (None, None) => None,
        };
        if let (Some(fb), Some(fv)) = (f_best, f_new) {
            f_best = Some(fb.min(fv));
        }
        x = x_next;
        fx = f_new;

        let s_n = s.value();
        let certificate = match fixed_slack {
            Some(sl) => cfg.r_sq / s_n + sl,
            None => (cfg.r_sq + dl.value()) / s_n,
        };
        log.push(IterRecord {
            l,
            delta,
            inner: trials,
            s_n,
            certificate,
            f_best,
            elapsed_s: start.elapsed().as_secs_f64(),
            x: cfg.record_iterates.then(|| x.clone()),
        });

        let done = k + 1;
        while snap_iter.peek().is_some_and(|&c| c <= done) {
            let c = snap_iter.next().unwrap();
            if c == done {
                snapshots.push((done, avg.value() / s_n));
            }
        }
        if let Some(thr) = threshold {
            if s_n >= thr {
                converged = true;
                break;
            }
        }
    }

    let last = log.last().expect("at least one iteration runs");
    Ok(RunReport {
        method,
        x_hat: avg.value() / last.s_n,
        x_last: x,
        x0: cfg.x0.clone(),
        l0: cfg.l0,
        r_sq: cfg.r_sq,
        outer_iters: log.len(),
        inner_solves: inner_total,
        log2_l_ratio: exp,
        s_n: last.s_n,
        delta_over_l: dl.value(),
        certificate: last.certificate,
        f_best,
        converged,
        snapshots,
        wall_time_s: start.elapsed().as_secs_f64(),
        log,
    })
}

fn operator_problem<'a>(
    op: &'a OperatorOracle,
    dir: &'a dyn Fn(&DVector<f64>) -> DVector<f64>,
) -> Problem<'a> {
    Problem {
        prox: &op.prox,
        set: &op.set,
        direction: dir,
        value: None,
    }
}

/// Adaptive method for a monotone, relatively bounded operator. Requires
/// `R^2 >= max_{x in Q} V(x, x0)`; the certificate `R^2/S_N + eps/2` bounds
/// `max_x <g(x), x_hat - x>`.
pub fn alg1_adaptive_vi(op: &OperatorOracle, cfg: &RunConfig) -> Result<RunReport> {
    let dir = |x: &DVector<f64>| op.apply(x);
    run(Method::Alg1, operator_problem(op, &dir), cfg, None)
}

/// Operator method adapting to inexactness, run for `n` iterations. The
/// certificate is `(R^2 + sum delta/L) / S_N`.
pub fn alg2_vi_inexact(op: &OperatorOracle, cfg: &RunConfig, n: usize) -> Result<RunReport> {
    let dir = |x: &DVector<f64>| op.apply(x);
    run(Method::Alg2, operator_problem(op, &dir), cfg, Some(n))
}

fn objective_run(method: Method, obj: &ObjectiveOracle, cfg: &RunConfig, n: Option<usize>) -> Result<RunReport> {
    let dir = |x: &DVector<f64>| obj.subgrad(x);
    let val = |x: &DVector<f64>| obj.value(x);
    run(
        method,
        Problem {
            prox: &obj.prox,
            set: &obj.set,
            direction: &dir,
            value: Some(&val),
        },
        cfg,
        n,
    )
}

/// Adaptive method for relatively Lipschitz objectives; stops once
/// `S_N >= 2R^2/eps`, where the certificate `R^2/S_N + eps/2` is at most
/// `eps`. Requires `R^2 >= V(x_*, x0)`.
pub fn alg3_adaptive(obj: &ObjectiveOracle, cfg: &RunConfig) -> Result<RunReport> {
    objective_run(Method::Alg3, obj, cfg, None)
}

/// Relatively Lipschitz objectives with adaptive inexactness, `n` iterations.
pub fn alg4_inexact(obj: &ObjectiveOracle, cfg: &RunConfig, n: usize) -> Result<RunReport> {
    objective_run(Method::Alg4, obj, cfg, Some(n))
}

/// Universal method for `(alpha, L, delta)`-relatively smooth objectives with
/// adaptive inexactness, `n` iterations.
pub fn alg5_universal_inexact(obj: &ObjectiveOracle, cfg: &RunConfig, n: usize) -> Result<RunReport> {
    objective_run(Method::Alg5, obj, cfg, Some(n))
}

/// Universal method with fixed slack `3eps/4`; stops once `S_N >= 4R^2/eps`.
pub fn alg6_universal(obj: &ObjectiveOracle, cfg: &RunConfig) -> Result<RunReport> {
    objective_run(Method::Alg6, obj, cfg, None)
}

/// Re-evaluates the acceptance test of every logged iteration from the
/// recorded iterates. Returns the index of the first iteration that fails.
pub fn replay_acceptance<F, G>(report: &RunReport, prox: &ProxSetup, direction: F, value: Option<G>) -> std::result::Result<(), usize>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
    G: Fn(&DVector<f64>) -> f64,
{
    let mut x = report.x0.clone();
    for (k, rec) in report.log.iter().enumerate() {
        let x_next = rec.x.as_ref().ok_or(k)?;
        let v = direction(&x);
        let model = v.dot(&(x_next - &x)) + rec.l * prox.divergence_unchecked(x_next, &x);
        let ok = if report.method.function_value_test() {
            let f = value.as_ref().ok_or(k)?;
            f(x_next) <= f(&x) + model + rec.delta
        } else {
            model + rec.delta >= 0.0
        };
        if !ok {
            return Err(k);
        }
        x = x_next.clone();
    }
    Ok(())
}

/// Replay for an objective oracle.
pub fn replay_objective(report: &RunReport, obj: &ObjectiveOracle) -> std::result::Result<(), usize> {
    replay_acceptance(report, &obj.prox, |x| obj.subgrad(x), Some(|x: &DVector<f64>| obj.value(x)))
}

/// Replay for an operator oracle.
pub fn replay_operator(report: &RunReport, op: &OperatorOracle) -> std::result::Result<(), usize> {
    replay_acceptance(report, &op.prox, |x| op.apply(x), None::<fn(&DVector<f64>) -> f64>)
}

impl RunReport {
    /// Whether this report came from an operator method.
    pub fn is_vi(&self) -> bool {
        self.method.is_vi()
    }

    /// `sum_k inner_k - 2N`, which equals [`Self::log2_l_ratio`] exactly.
    pub fn inner_excess(&self) -> i64 {
        self.inner_solves as i64 - 2 * self.outer_iters as i64
    }
}

/// Bounds for relatively strongly convex objectives run through the
/// adaptive universal method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrongConvexEstimate {
    /// `V0 / S_N + (1 / S_N) sum delta_i / L_i`.
    pub est0: f64,
    /// Geometric bound; `None` when some `L_i < mu`.
    pub est_geo: Option<f64>,
    /// Some logged `L_i` fell below `mu`.
    pub flagged: bool,
}

fn check_log(log: &[IterRecord], mu: f64, v0: f64) -> Result<()> {
    if log.is_empty() {
        return Err(Error::InvalidConfig("empty iteration log".into()));
    }
    if !(mu >= 0.0) || !(v0 >= 0.0) {
        return Err(Error::InvalidConfig("mu and V0 must be nonnegative".into()));
    }
    Ok(())
}

/// `min_i f(x_i) - f_*` bounds from the logged `(L_i, delta_i)` of a run on a
/// `mu`-relatively strongly convex objective, with `V0 >= V(x_*, x0)`.
///
/// `est_geo = L_N prod(1 - mu/L_i) V0 + (1/S^) sum delta_i q_i / L_i` with
/// `q_i = prod_{n > i} (1 - mu/L_n)` and `S^ = sum q_i / L_i`.
pub fn certificate_strongly_convex_adaptive(log: &[IterRecord], mu: f64, v0: f64) -> Result<StrongConvexEstimate> {
    check_log(log, mu, v0)?;
    let mut s = CompensatedSum::default();
    let mut dl = CompensatedSum::default();
    let (mut prod, mut s_hat, mut d_hat) = (1.0, 0.0, 0.0);
    let mut flagged = false;
    for r in log {
        flagged |= r.l < mu;
        s.add(1.0 / r.l);
        dl.add(r.delta / r.l);
        let rho = 1.0 - mu / r.l;
        prod *= rho;
        s_hat = rho * s_hat + 1.0 / r.l;
        d_hat = rho * d_hat + r.delta / r.l;
    }
    let est0 = (v0 + dl.value()) / s.value();
    let l_n = log.last().unwrap().l;
    Ok(StrongConvexEstimate {
        est0,
        est_geo: (!flagged).then(|| l_n * prod * v0 + d_hat / s_hat),
        flagged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrongConvexUniversal {
    pub value: f64,
    /// Some `L_i < mu`; only the `1 / sum(1/L_i)` branch was used.
    pub flagged: bool,
}

/// `min{max{0, L_N prod(1 - mu/L_i)}, 1 / sum(1/L_i)} V0 + 3eps/4`.
pub fn certificate_strongly_convex_universal(
    log: &[IterRecord],
    mu: f64,
    v0: f64,
    eps: f64,
) -> Result<StrongConvexUniversal> {
    check_log(log, mu, v0)?;
    let mut s = CompensatedSum::default();
    let mut prod = 1.0;
    let mut flagged = false;
    for r in log {
        flagged |= r.l < mu;
        s.add(1.0 / r.l);
        prod *= 1.0 - mu / r.l;
    }
    let harmonic = 1.0 / s.value();
    let factor = if flagged {
        harmonic
    } else {
        (log.last().unwrap().l * prod).max(0.0).min(harmonic)
    };
    Ok(StrongConvexUniversal {
        value: factor * v0 + 0.75 * eps,
        flagged,
    })
}
