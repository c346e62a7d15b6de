//! Experiment harness: builds a benchmark instance, runs one method over
//! several seeded repeats and summarises the run at fixed checkpoints.
//!
//! Each summary row holds the state after `iter` outer iterations, averaged
//! over repeats. A checkpoint beyond the point where a method stopped
//! repeats the final state. Repeat `r` uses seed `seed + r`; repeats run on
//! up to `RELBREG_THREADS` threads but are always combined in index order,
//! so all columns except `time_s` are reproducible.

use std::io::Write;
use std::str::FromStr;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bregman::{max_divergence_from, prox_bound};
use crate::constrained::{alg7_switching_md, alg8_restarts, RestartConfig, SwitchingConfig};
use crate::error::{Error, Result};
use crate::oracles::{
    generate_iep, generate_quartic, generate_svm, iep_oracle, quartic_oracle, svm_saddle_operator,
    toy_identity_operator, toy_quadratic, Constant, ObjectiveOracle, OperatorOracle,
    SmoothnessDescriptor,
};
use crate::solvers::{self, RunConfig, RunReport};

/// Environment variable capping repeat parallelism.
pub const THREADS_ENV: &str = "RELBREG_THREADS";

/// Random points used to estimate the variational-inequality gap.
pub const GAP_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Iep,
    SvmSaddle,
    Quartic,
    Toy,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iep" => Ok(Family::Iep),
            "svm-saddle" => Ok(Family::SvmSaddle),
            "quartic" => Ok(Family::Quartic),
            "toy" => Ok(Family::Toy),
            _ => Err(Error::InvalidConfig(format!("unknown family `{s}`"))),
        }
    }
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Iep => "iep",
            Family::SvmSaddle => "svm-saddle",
            Family::Quartic => "quartic",
            Family::Toy => "toy",
        }
    }

    fn supports(self, algo: Algo) -> bool {
        use Algo::*;
        match self {
            Family::Iep | Family::Quartic => matches!(algo, Alg3 | Alg4 | Alg5 | Alg6),
            Family::SvmSaddle => matches!(algo, Alg1 | Alg2),
            Family::Toy => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    Alg1,
    Alg2,
    Alg3,
    Alg4,
    Alg5,
    Alg6,
    Alg7,
    Alg8,
}

impl FromStr for Algo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "alg1" => Algo::Alg1,
            "alg2" => Algo::Alg2,
            "alg3" => Algo::Alg3,
            "alg4" => Algo::Alg4,
            "alg5" => Algo::Alg5,
            "alg6" => Algo::Alg6,
            "alg7" => Algo::Alg7,
            "alg8" => Algo::Alg8,
            _ => return Err(Error::InvalidConfig(format!("unknown algorithm `{s}`"))),
        })
    }
}

impl Algo {
    fn is_vi(self) -> bool {
        matches!(self, Algo::Alg1 | Algo::Alg2)
    }

    fn fixed_n(self) -> bool {
        matches!(self, Algo::Alg2 | Algo::Alg4 | Algo::Alg5)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub family: Family,
    pub algo: Algo,
    pub n: usize,
    pub m: usize,
    pub eps: f64,
    pub seed: u64,
    pub checkpoints: Vec<usize>,
    pub repeats: usize,
    pub l0: Option<f64>,
    pub delta0: f64,
    pub r_sq: Option<f64>,
    pub max_outer: usize,
    pub lambda_reg: f64,
}

impl ExperimentSpec {
    pub fn new(family: Family, algo: Algo) -> Self {
        Self {
            family,
            algo,
            n: 10,
            m: 5,
            eps: 0.05,
            seed: 0,
            checkpoints: vec![10, 100, 1000],
            repeats: 5,
            l0: None,
            delta0: 0.5,
            r_sq: None,
            max_outer: 1_000_000,
            lambda_reg: 0.5,
        }
    }

    /// Problems a caller can fix by changing arguments.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !self.family.supports(self.algo) {
            let hint = if self.algo.is_vi() {
                "operator methods need the svm-saddle or toy family"
            } else if matches!(self.algo, Algo::Alg7 | Algo::Alg8) {
                "constrained methods are available on the toy family"
            } else {
                "objective methods need the iep, quartic or toy family"
            };
            return bad(format!(
                "{:?} is not available for {}: {hint}",
                self.algo,
                self.family.name()
            ));
        }
        if self.n == 0 || self.m == 0 || self.repeats == 0 || self.max_outer == 0 {
            return bad("n, m, repeats and max-outer must be positive".into());
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad(format!("eps must be positive, got {}", self.eps));
        }
        if self.checkpoints.is_empty() || self.checkpoints[0] == 0 {
            return bad("checkpoints must be positive".into());
        }
        if self.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return bad("checkpoints must be strictly increasing".into());
        }
        if self.l0.is_some_and(|l| !(l > 0.0)) || self.r_sq.is_some_and(|r| !(r > 0.0)) {
            return bad("L0 and R^2 must be positive".into());
        }
        if !(self.delta0 >= 0.0) || !(self.lambda_reg > 0.0) {
            return bad("delta0 must be nonnegative and lambda positive".into());
        }
        Ok(())
    }
}

/// One checkpoint, averaged over repeats.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub iter: usize,
    pub time_s: f64,
    pub l_k: f64,
    pub delta_k: f64,
    pub s_n: f64,
    pub certificate: f64,
    /// `f_best` for objective methods, the sampled gap for operator methods.
    pub quality: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// `f_best` or `gap_sample`.
    pub quality_label: &'static str,
    pub rows: Vec<SummaryRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    /// Averaged over the repeats that completed.
    pub table: Table,
    /// First failure among the repeats, if any.
    pub failure: Option<String>,
}

/// `|grad(e1) - grad(e2)| / sqrt(2)` with the first two coordinates of the
/// primal block; falls back to `|grad(x0)|`, then to 1.
pub fn default_l0<F>(grad: F, dim: usize, primal_dim: usize, x0: &DVector<f64>) -> f64
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let fallback = || {
        let g = grad(x0).norm();
        if g > 0.0 && g.is_finite() {
            g
        } else {
            1.0
        }
    };
    if primal_dim < 2 {
        return fallback();
    }
    let mut e1 = DVector::zeros(dim);
    let mut e2 = DVector::zeros(dim);
    e1[0] = 1.0;
    e2[1] = 1.0;
    let l = (grad(&e1) - grad(&e2)).norm() / 2f64.sqrt();
    if l > 0.0 && l.is_finite() {
        l
    } else {
        fallback()
    }
}

/// `max(0, max_x <g(x), x_hat - x>)` over seeded uniform samples of the set.
pub fn sampled_gap(op: &OperatorOracle, x_hat: &DVector<f64>, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let x = op.set.sample(&mut rng);
            op.apply(&x).dot(&(x_hat - &x))
        })
        .fold(0.0, f64::max)
}

fn uniform_start(n: usize) -> DVector<f64> {
    DVector::from_element(n, 1.0 / (n as f64).sqrt())
}

fn always_feasible(obj: &ObjectiveOracle) -> Result<ObjectiveOracle> {
    ObjectiveOracle::new(
        std::sync::Arc::new(Constant(-1.0)),
        obj.prox.clone(),
        SmoothnessDescriptor::relatively_lipschitz(1.0),
        obj.set.clone(),
    )
}

enum Built {
    Objective(ObjectiveOracle),
    Operator(OperatorOracle, usize),
}

struct Setup {
    built: Built,
    x0: DVector<f64>,
    r_sq: f64,
}

fn build(spec: &ExperimentSpec, seed: u64) -> Result<Setup> {
    let n = spec.n;
    match spec.family {
        Family::Iep => {
            let inst = generate_iep(n, spec.m, seed)?;
            Ok(Setup {
                built: Built::Objective(iep_oracle(&inst)?),
                x0: uniform_start(n),
                r_sq: inst.r_sq(),
            })
        }
        Family::Quartic => {
            let inst = generate_quartic(n, seed)?;
            let oracle = quartic_oracle(&inst)?;
            let x0 = uniform_start(n);
            let r_sq = max_divergence_from(&oracle.prox, &oracle.set, &x0)?;
            Ok(Setup {
                built: Built::Objective(oracle),
                x0,
                r_sq,
            })
        }
        Family::SvmSaddle => {
            let inst = generate_svm(n, spec.m, spec.lambda_reg, seed)?;
            Ok(Setup {
                built: Built::Operator(svm_saddle_operator(&inst)?, n),
                x0: inst.start(),
                r_sq: inst.default_r_sq(),
            })
        }
        Family::Toy => {
            let x0 = uniform_start(n);
            if spec.algo.is_vi() {
                let op = toy_identity_operator(n);
                let r_sq = max_divergence_from(&op.prox, &op.set, &x0)?;
                Ok(Setup {
                    built: Built::Operator(op, n),
                    x0,
                    r_sq,
                })
            } else {
                let obj = toy_quadratic(n);
                let r_sq = max_divergence_from(&obj.prox, &obj.set, &x0)?;
                Ok(Setup {
                    built: Built::Objective(obj),
                    x0,
                    r_sq,
                })
            }
        }
    }
}

/// Per-repeat rows before averaging.
fn rows_from_report(
    spec: &ExperimentSpec,
    report: &RunReport,
    op: Option<&OperatorOracle>,
    seed: u64,
) -> Vec<SummaryRow> {
    spec.checkpoints
        .iter()
        .map(|&c| {
            let idx = c.min(report.log.len()) - 1;
            let rec = &report.log[idx];
            let quality = match op {
                Some(op) => {
                    let x_hat = report
                        .snapshots
                        .iter()
                        .find(|(k, _)| *k == c)
                        .map(|(_, x)| x)
                        .unwrap_or(&report.x_hat);
                    sampled_gap(op, x_hat, GAP_SAMPLES, seed ^ 0x9e37_79b9_7f4a_7c15)
                }
                None => rec.f_best.unwrap_or(f64::NAN),
            };
            SummaryRow {
                iter: c,
                time_s: rec.elapsed_s,
                l_k: rec.l,
                delta_k: rec.delta,
                s_n: rec.s_n,
                certificate: rec.certificate,
                quality,
            }
        })
        .collect()
}

fn run_constrained(spec: &ExperimentSpec, obj: &ObjectiveOracle, x0: &DVector<f64>, r_sq: f64) -> Result<Vec<SummaryRow>> {
    let g = always_feasible(obj)?;
    match spec.algo {
        Algo::Alg7 => {
            let mut cfg = SwitchingConfig::new(spec.eps, 1.0, 1.0, r_sq, x0.clone());
            cfg.max_steps = spec.max_outer;
            let rep = alg7_switching_md(obj, &g, &cfg)?;
            let h = spec.eps;
            Ok(vec![SummaryRow {
                iter: rep.steps,
                time_s: rep.wall_time_s,
                l_k: 1.0 / h,
                delta_k: spec.eps,
                s_n: rep.steps as f64 * h,
                certificate: spec.eps,
                quality: rep.f_hat,
            }])
        }
        _ => {
            let omega = 2.0 * prox_bound(&obj.prox, &obj.set)?;
            let cfg = RestartConfig {
                eps: spec.eps,
                mu: obj.descriptor.mu,
                omega,
                x0: x0.clone(),
                r0_sq: r_sq,
                m_f: 1.0,
                m_g: 1.0,
            };
            let rep = alg8_restarts(obj, &g, &cfg)?;
            let mut steps = 0;
            Ok(rep
                .restarts
                .iter()
                .map(|r| {
                    steps += r.steps;
                    SummaryRow {
                        iter: steps,
                        time_s: rep.wall_time_s,
                        l_k: 1.0 / r.eps_p,
                        delta_k: r.eps_p,
                        s_n: r.steps as f64 * r.eps_p,
                        certificate: r.eps_p,
                        quality: r.f,
                    }
                })
                .collect())
        }
    }
}

fn run_repeat(spec: &ExperimentSpec, r: usize) -> Result<Vec<SummaryRow>> {
    let seed = spec.seed.wrapping_add(r as u64);
    let setup = build(spec, seed)?;
    let r_sq = spec.r_sq.unwrap_or(setup.r_sq);
    let n_iter = *spec.checkpoints.last().unwrap();
    let mk_cfg = |l0: f64| {
        let mut cfg = RunConfig::new(spec.eps, l0, setup.x0.clone(), r_sq)
            .with_delta0(spec.delta0)
            .with_max_outer(spec.max_outer);
        cfg.snapshots = spec.checkpoints.clone();
        cfg
    };
    match &setup.built {
        Built::Objective(obj) => {
            if matches!(spec.algo, Algo::Alg7 | Algo::Alg8) {
                return run_constrained(spec, obj, &setup.x0, r_sq);
            }
            let l0 = spec
                .l0
                .unwrap_or_else(|| default_l0(|x| obj.subgrad(x), obj.dim(), obj.dim(), &setup.x0));
            let cfg = mk_cfg(l0);
            let report = match spec.algo {
                Algo::Alg3 => solvers::alg3_adaptive(obj, &cfg)?,
                Algo::Alg4 => solvers::alg4_inexact(obj, &cfg, n_iter)?,
                Algo::Alg5 => solvers::alg5_universal_inexact(obj, &cfg, n_iter)?,
                Algo::Alg6 => solvers::alg6_universal(obj, &cfg)?,
                other => unreachable!("{other:?} validated against family"),
            };
            Ok(rows_from_report(spec, &report, None, seed))
        }
        Built::Operator(op, primal_dim) => {
            let l0 = spec
                .l0
                .unwrap_or_else(|| default_l0(|x| op.apply(x), op.dim(), *primal_dim, &setup.x0));
            let cfg = mk_cfg(l0);
            let report = if spec.algo.fixed_n() {
                solvers::alg2_vi_inexact(op, &cfg, n_iter)?
            } else {
                solvers::alg1_adaptive_vi(op, &cfg)?
            };
            Ok(rows_from_report(spec, &report, Some(op), seed))
        }
    }
}

fn thread_cap() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn average(per_repeat: &[Vec<SummaryRow>]) -> Vec<SummaryRow> {
    let Some(first) = per_repeat.first() else {
        return Vec::new();
    };
    let k = per_repeat.len() as f64;
    (0..first.len())
        .map(|i| {
            let mean = |get: fn(&SummaryRow) -> f64| per_repeat.iter().map(|rows| get(&rows[i])).sum::<f64>() / k;
            SummaryRow {
                iter: first[i].iter,
                time_s: mean(|r| r.time_s),
                l_k: mean(|r| r.l_k),
                delta_k: mean(|r| r.delta_k),
                s_n: mean(|r| r.s_n),
                certificate: mean(|r| r.certificate),
                quality: mean(|r| r.quality),
            }
        })
        .collect()
}

/// Validates the spec, runs every repeat and averages the checkpoint rows.
/// Usage problems are returned as `Err`; solver failures come back in
/// [`ExperimentOutcome::failure`] alongside whatever completed.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let threads = thread_cap().min(spec.repeats);
    let mut results: Vec<Option<Result<Vec<SummaryRow>>>> = (0..spec.repeats).map(|_| None).collect();
    for chunk_start in (0..spec.repeats).step_by(threads) {
        let end = (chunk_start + threads).min(spec.repeats);
        std::thread::scope(|s| {
            let handles: Vec<_> = (chunk_start..end)
                .map(|r| s.spawn(move || run_repeat(spec, r)))
                .collect();
            for (r, h) in (chunk_start..end).zip(handles) {
                results[r] = Some(
                    h.join()
                        .unwrap_or_else(|_| Err(Error::Numeric(format!("repeat {r} panicked")))),
                );
            }
        });
    }
    let mut ok = Vec::new();
    let mut failure = None;
    for (r, res) in results.into_iter().enumerate() {
        match res.expect("every repeat ran") {
            Ok(rows) => ok.push(rows),
            Err(e) if failure.is_none() => failure = Some(format!("repeat {r}: {e}")),
            Err(_) => {}
        }
    }
    // Constrained methods may emit different row counts per repeat.
    if let Some(first) = ok.first().map(Vec::len) {
        if ok.iter().any(|r| r.len() != first) {
            ok.truncate(1);
        }
    }
    Ok(ExperimentOutcome {
        table: Table {
            quality_label: if spec.algo.is_vi() { "gap_sample" } else { "f_best" },
            rows: average(&ok),
        },
        failure,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            _ => Err(Error::InvalidConfig(format!("unknown format `{s}`"))),
        }
    }
}

/// Writes the table. CSV values are shortest round-trip scientific notation;
/// text rounds to 4 significant digits in aligned columns.
pub fn emit_table<W: Write>(out: &mut W, table: &Table, format: Format) -> Result<()> {
    let header = ["iter", "time_s", "L_k", "delta_k", "S_N", "certificate", table.quality_label];
    match format {
        Format::Csv => {
            writeln!(out, "{}", header.join(","))?;
            for r in &table.rows {
                writeln!(
                    out,
                    "{},{:e},{:e},{:e},{:e},{:e},{:e}",
                    r.iter, r.time_s, r.l_k, r.delta_k, r.s_n, r.certificate, r.quality
                )?;
            }
        }
        Format::Text => {
            let cells: Vec<Vec<String>> = table
                .rows
                .iter()
                .map(|r| {
                    let mut v = vec![r.iter.to_string()];
                    v.extend(
                        [r.time_s, r.l_k, r.delta_k, r.s_n, r.certificate, r.quality]
                            .iter()
                            .map(|x| format!("{x:.3e}")),
                    );
                    v
                })
                .collect();
            let widths: Vec<usize> = (0..header.len())
                .map(|j| cells.iter().map(|c| c[j].len()).chain([header[j].len()]).max().unwrap())
                .collect();
            let line = |vals: Vec<&str>| {
                vals.iter()
                    .zip(&widths)
                    .map(|(v, w)| format!("{v:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            writeln!(out, "{}", line(header.to_vec()))?;
            for c in &cells {
                writeln!(out, "{}", line(c.iter().map(String::as_str).collect()))?;
            }
        }
    }
    Ok(())
}
