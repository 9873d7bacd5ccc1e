//! Sup-norm estimation on the unit polydisc.
//!
//! By the maximum modulus principle in each variable the supremum of `|P|`
//! over the closed polydisc is attained on the torus `|z_j| = 1`, so every
//! estimator here searches over phases. Lower bounds are certified by a
//! witness point; upper bounds exist only for the grid oracle.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{argument, Error, Result};
use crate::polynomial::{HomogeneousPolynomial, TorusPoint};
use crate::seed::{derive_seed, rng_from_seed};

/// Largest variable count accepted by [`grid_oracle`].
pub const GRID_MAX_VARIABLES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Sample,
    Ascent,
    Grid,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Sample => "sample",
            Method::Ascent => "ascent",
            Method::Grid => "grid",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupNormEstimate {
    /// `|P(witness)|`, a certified lower bound on the sup norm.
    pub lower_bound: f64,
    pub witness: TorusPoint,
    /// Certified upper bound, when one is available.
    pub upper_bound: Option<f64>,
    pub restarts_used: usize,
    pub evaluations_used: u64,
    pub method: Method,
}

#[derive(Serialize)]
struct EstimateJson<'a> {
    lower_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    upper_bound: Option<f64>,
    witness_phases: &'a [f64],
    restarts: usize,
    evaluations: u64,
    method: Method,
    kind: &'static str,
}

impl SupNormEstimate {
    pub fn to_json(&self) -> String {
        let doc = EstimateJson {
            lower_bound: self.lower_bound,
            upper_bound: self.upper_bound,
            witness_phases: self.witness.phases(),
            restarts: self.restarts_used,
            evaluations: self.evaluations_used,
            method: self.method,
            kind: if self.upper_bound.is_some() {
                "certified bracket"
            } else {
                "heuristic lower bound"
            },
        };
        serde_json::to_string(&doc).expect("estimate JSON serialization")
    }
}

/// Search budgets for [`sup_norm_estimate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupNormBudget {
    pub restarts: usize,
    pub samples_per_restart: usize,
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for SupNormBudget {
    fn default() -> Self {
        Self {
            restarts: 32,
            samples_per_restart: 256,
            tol: 1e-9,
            max_sweeps: 200,
        }
    }
}

impl SupNormBudget {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(argument("restarts must be at least 1"));
        }
        if self.samples_per_restart == 0 {
            return Err(argument("samples per restart must be at least 1"));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(argument(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_sweeps == 0 {
            return Err(argument("max_sweeps must be at least 1"));
        }
        Ok(())
    }
}

/// Best of `samples` uniformly random torus points.
pub fn sample_estimate(
    p: &HomogeneousPolynomial,
    samples: usize,
    seed: u64,
) -> Result<SupNormEstimate> {
    if samples == 0 {
        return Err(argument("samples must be at least 1"));
    }
    let n = p.n();
    let mut rng = rng_from_seed(seed);
    let mut phases = vec![0.0; n];
    let mut z = vec![Complex64::new(1.0, 0.0); n];
    let mut best = f64::NEG_INFINITY;
    let mut best_phases = phases.clone();
    for _ in 0..samples {
        for (theta, zj) in phases.iter_mut().zip(z.iter_mut()) {
            *theta = rng.gen_range(0.0..TAU);
            *zj = Complex64::from_polar(1.0, *theta);
        }
        let v = p.eval_unchecked(&z).norm();
        if v > best {
            best = v;
            best_phases.copy_from_slice(&phases);
        }
    }
    let witness = TorusPoint::new(best_phases);
    let lower_bound = p.evaluate_on_torus(&witness)?.norm();
    Ok(SupNormEstimate {
        lower_bound,
        witness,
        upper_bound: None,
        restarts_used: 1,
        evaluations_used: samples as u64 + 1,
        method: Method::Sample,
    })
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Maximizes `|sum_k a_k e^{ik theta}|` over the circle: a coarse scan
/// anchored at `theta0` followed by golden-section refinement around the
/// best scan point. Returns `(theta, value, evaluations)`; `theta0` is kept
/// unless strictly beaten.
fn maximize_on_circle(a: &[Complex64], theta0: f64) -> (f64, f64, u64) {
    let f = |t: f64| -> f64 {
        let w = Complex64::from_polar(1.0, t);
        // Horner.
        a.iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * w + c)
            .norm()
    };
    let degree = a.len().saturating_sub(1);
    if degree == 0 {
        return (theta0, a.first().map_or(0.0, |c| c.norm()), 1);
    }
    let scan = (8 * degree).max(16);
    let step = TAU / scan as f64;
    let mut evals = 0u64;
    let start_value = f(theta0);
    let (mut best_t, mut best_v) = (theta0, start_value);
    let mut scan_t = theta0;
    let mut scan_v = start_value;
    for k in 1..scan {
        let t = theta0 + step * k as f64;
        let v = f(t);
        evals += 1;
        if v > scan_v {
            scan_t = t;
            scan_v = v;
        }
    }
    let (mut lo, mut hi) = (scan_t - step, scan_t + step);
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    evals += 2;
    while hi - lo > 1e-11 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        }
        evals += 1;
    }
    for (t, v) in [(scan_t, scan_v), (x1, f1), (x2, f2)] {
        if v > best_v {
            best_t = t;
            best_v = v;
        }
    }
    (best_t, best_v, evals + 1)
}

/// Cyclic coordinate ascent on the phases, starting from `start`.
///
/// Each coordinate is maximized with the others frozen; iteration stops once
/// a full sweep gains less than `tol` or after `max_sweeps` sweeps.
pub fn phase_ascent(
    p: &HomogeneousPolynomial,
    start: &TorusPoint,
    tol: f64,
    max_sweeps: usize,
) -> Result<SupNormEstimate> {
    if start.len() != p.n() {
        return Err(argument(format!(
            "start point has {} phases, polynomial has {} variables",
            start.len(),
            p.n()
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(argument(format!("tol must be positive, got {tol}")));
    }
    let mut phases = start.phases().to_vec();
    let mut z = start.to_complex();
    let mut current = p.eval_unchecked(&z).norm();
    let mut evals = 1u64;
    for _ in 0..max_sweeps {
        let before = current;
        for j in 0..p.n() {
            let slice = p.coordinate_slice(&z, j);
            evals += 1;
            let (t, v, e) = maximize_on_circle(&slice, phases[j]);
            evals += e;
            if v > current {
                phases[j] = t;
                z[j] = Complex64::from_polar(1.0, t);
                current = v;
            }
        }
        if current - before < tol {
            break;
        }
    }
    let witness = TorusPoint::new(phases);
    let lower_bound = p.evaluate_on_torus(&witness)?.norm();
    Ok(SupNormEstimate {
        lower_bound,
        witness,
        upper_bound: None,
        restarts_used: 1,
        evaluations_used: evals + 1,
        method: Method::Ascent,
    })
}

fn single_restart(
    p: &HomogeneousPolynomial,
    budget: &SupNormBudget,
    seed: u64,
) -> Result<SupNormEstimate> {
    let sampled = sample_estimate(p, budget.samples_per_restart, seed)?;
    let mut refined = phase_ascent(p, &sampled.witness, budget.tol, budget.max_sweeps)?;
    refined.evaluations_used += sampled.evaluations_used;
    Ok(refined)
}

/// Multistart estimate: each restart draws `samples_per_restart` points
/// from its own derived seed and refines the best one by phase ascent.
///
/// The result is the best restart (ties go to the smaller index), so it is
/// independent of scheduling and non-decreasing in `restarts`.
pub fn sup_norm_estimate(
    p: &HomogeneousPolynomial,
    budget: &SupNormBudget,
    seed: u64,
) -> Result<SupNormEstimate> {
    budget.validate()?;
    let runs = (0..budget.restarts)
        .into_par_iter()
        .map(|r| single_restart(p, budget, derive_seed(seed, r as u64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(best_of(runs, budget.restarts))
}

pub(crate) fn best_of(runs: Vec<SupNormEstimate>, restarts: usize) -> SupNormEstimate {
    let evaluations: u64 = runs.iter().map(|r| r.evaluations_used).sum();
    let mut best = runs
        .into_iter()
        .reduce(|a, b| if b.lower_bound > a.lower_bound { b } else { a })
        .expect("at least one restart");
    best.restarts_used = restarts;
    best.evaluations_used = evaluations;
    best
}

/// Exhaustive maximum over the uniform `K^n` phase grid with a certified
/// Lipschitz upper bound.
///
/// `|d P / d theta_j| <= sum_alpha alpha_j |c_alpha|`, so the phase gradient
/// is bounded by `L = m * l1(c)` and every torus point lies within
/// `h sqrt(n) / 2` of a grid node, `h = 2 pi / K`.
pub fn grid_oracle(p: &HomogeneousPolynomial, resolution: usize) -> Result<SupNormEstimate> {
    let n = p.n();
    if n > GRID_MAX_VARIABLES {
        return Err(Error::Range(format!(
            "grid oracle is limited to n <= {GRID_MAX_VARIABLES}, got n = {n}"
        )));
    }
    if resolution < 8 {
        return Err(argument(format!(
            "grid resolution must be at least 8, got {resolution}"
        )));
    }
    let h = TAU / resolution as f64;
    let roots: Vec<Complex64> = (0..resolution)
        .map(|k| Complex64::from_polar(1.0, h * k as f64))
        .collect();
    let total = resolution.pow(n as u32);
    let mut z = vec![Complex64::new(1.0, 0.0); n];
    let mut best = f64::NEG_INFINITY;
    let mut best_code = 0usize;
    for code in 0..total {
        let mut c = code;
        for zj in z.iter_mut() {
            *zj = roots[c % resolution];
            c /= resolution;
        }
        let v = p.eval_unchecked(&z).norm();
        if v > best {
            best = v;
            best_code = code;
        }
    }
    let mut c = best_code;
    let phases: Vec<f64> = (0..n)
        .map(|_| {
            let k = c % resolution;
            c /= resolution;
            h * k as f64
        })
        .collect();
    let witness = TorusPoint::new(phases);
    let lower_bound = p.evaluate_on_torus(&witness)?.norm();
    let lipschitz = p.m() as f64 * p.l1_norm();
    let upper_bound = best.max(lower_bound) + lipschitz * h * (n as f64).sqrt() / 2.0;
    Ok(SupNormEstimate {
        lower_bound,
        witness,
        upper_bound: Some(upper_bound),
        restarts_used: 0,
        evaluations_used: total as u64 + 1,
        method: Method::Grid,
    })
}
