//! The symmetric m-linear form obtained from a polynomial by polarization.
//!
//! The form is never materialized: the entry on an index tuple with
//! exponent profile `alpha` is `c_alpha / (m! / alpha!)`, and evaluations
//! go through the polarization identity
//!
//! ```text
//! T(z_1, ..., z_m) = 1 / (2^m m!) * sum_{eps in {+-1}^m} eps_1...eps_m P(eps_1 z_1 + ... + eps_m z_m)
//! ```

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng as _;
use rayon::prelude::*;

use crate::combinatorics::{enumerate_multi_indices, orderings_multiplicity, MultiIndex};
use crate::error::{argument, Result};
use crate::polynomial::{HomogeneousPolynomial, TorusPoint};
use crate::seed::{derive_seed, rng_from_seed};
use crate::supnorm::{best_of, sup_norm_estimate, Method, SupNormBudget, SupNormEstimate};

/// The symmetric m-linear form `T` with `T(z, ..., z) = P(z)`.
#[derive(Debug, Clone, Copy)]
pub struct SymmetricForm<'a> {
    source: &'a HomogeneousPolynomial,
}

impl<'a> SymmetricForm<'a> {
    pub fn new(source: &'a HomogeneousPolynomial) -> Self {
        Self { source }
    }

    pub fn source(&self) -> &'a HomogeneousPolynomial {
        self.source
    }

    /// `T(e_{i_1}, ..., e_{i_m})` for zero-based indices.
    pub fn form_entry(&self, tuple: &[usize]) -> Result<Complex64> {
        let p = self.source;
        if tuple.len() != p.m() {
            return Err(argument(format!(
                "tuple has {} entries, form has degree {}",
                tuple.len(),
                p.m()
            )));
        }
        let alpha = MultiIndex::from_tuple(p.n(), tuple)?;
        let mult = orderings_multiplicity(&alpha)?;
        Ok(p.coefficient(&alpha)? / mult as f64)
    }

    /// `T(z_1, ..., z_m)` by the polarization identity (`2^m` evaluations
    /// of `P`, summed in a fixed order).
    pub fn evaluate(&self, points: &[Vec<Complex64>]) -> Result<Complex64> {
        let p = self.source;
        if points.len() != p.m() {
            return Err(argument(format!(
                "got {} arguments, form has degree {}",
                points.len(),
                p.m()
            )));
        }
        if let Some(bad) = points.iter().find(|z| z.len() != p.n()) {
            return Err(argument(format!(
                "argument has {} coordinates, form acts on C^{}",
                bad.len(),
                p.n()
            )));
        }
        Ok(self.eval_unchecked(points))
    }

    pub(crate) fn eval_unchecked(&self, points: &[Vec<Complex64>]) -> Complex64 {
        let p = self.source;
        let (n, m) = (p.n(), p.m());
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        let mut acc = Complex64::new(0.0, 0.0);
        for mask in 0u64..(1u64 << m) {
            w.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
            let mut negatives = 0u32;
            for (k, z) in points.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    negatives += 1;
                    w.iter_mut().zip(z).for_each(|(x, y)| *x -= y);
                } else {
                    w.iter_mut().zip(z).for_each(|(x, y)| *x += y);
                }
            }
            let v = p.eval_unchecked(&w);
            if negatives % 2 == 1 {
                acc -= v;
            } else {
                acc += v;
            }
        }
        let factorial: f64 = (1..=m).map(|k| k as f64).product();
        acc / (2f64.powi(m as i32) * factorial)
    }

    /// `(sum over all n^m tuples of |T(e_i1, ..., e_im)|^q)^(1/q)`, computed
    /// over multi-indices only.
    pub fn tensor_lq_norm(&self, q: f64) -> Result<f64> {
        if !q.is_finite() || q <= 0.0 {
            return Err(argument(format!(
                "q must be a positive finite real, got {q}"
            )));
        }
        let p = self.source;
        let mut sum = 0.0;
        for (alpha, c) in enumerate_multi_indices(p.n(), p.m())?
            .iter()
            .zip(p.coefficients())
        {
            let mult = orderings_multiplicity(alpha)? as f64;
            sum += mult * (c.norm() / mult).powf(q);
        }
        Ok(sum.powf(1.0 / q))
    }
}

fn split_phases(phases: &[f64], n: usize) -> Vec<Vec<Complex64>> {
    phases
        .chunks(n)
        .map(|chunk| {
            chunk
                .iter()
                .map(|&t| Complex64::from_polar(1.0, t))
                .collect()
        })
        .collect()
}

fn basis_vector(n: usize, j: usize) -> Vec<Complex64> {
    let mut e = vec![Complex64::new(0.0, 0.0); n];
    e[j] = Complex64::new(1.0, 0.0);
    e
}

// T is affine in each coordinate of each argument, `a + b w`, so each
// coordinate step has the closed-form maximizer |a| + |b|.
fn form_ascent(
    form: &SymmetricForm<'_>,
    start: &[f64],
    tol: f64,
    max_sweeps: usize,
) -> SupNormEstimate {
    let p = form.source();
    let (n, m) = (p.n(), p.m());
    let mut phases = start.to_vec();
    let mut points = split_phases(&phases, n);
    let mut current = form.eval_unchecked(&points);
    let mut evals = 1u64;
    for _ in 0..max_sweeps {
        let before = current.norm();
        for k in 0..m {
            for j in 0..n {
                let saved = std::mem::replace(&mut points[k], basis_vector(n, j));
                let b = form.eval_unchecked(&points);
                points[k] = saved;
                evals += 1;
                let a = current - b * points[k][j];
                let gain = a.norm() + b.norm();
                if b.norm() == 0.0 || gain <= current.norm() {
                    continue;
                }
                let theta = if a.norm() == 0.0 {
                    -b.arg()
                } else {
                    a.arg() - b.arg()
                };
                let w = Complex64::from_polar(1.0, theta);
                phases[k * n + j] = theta;
                points[k][j] = w;
                current = a + b * w;
            }
        }
        if current.norm() - before < tol {
            break;
        }
    }
    let witness = TorusPoint::new(phases);
    let lower_bound = form
        .eval_unchecked(&split_phases(witness.phases(), n))
        .norm();
    SupNormEstimate {
        lower_bound,
        witness,
        upper_bound: None,
        restarts_used: 1,
        evaluations_used: evals + 1,
        method: Method::Ascent,
    }
}

/// Multistart estimate of `sup |T(z_1, ..., z_m)|` over `(T^n)^m`.
///
/// Restart 0 starts from the diagonal witness of [`sup_norm_estimate`] on the
/// source polynomial, so the result dominates that estimate. The witness
/// holds the `m * n` phases argument by argument.
pub fn form_sup_estimate(
    form: &SymmetricForm<'_>,
    budget: &SupNormBudget,
    seed: u64,
) -> Result<SupNormEstimate> {
    budget.validate()?;
    let p = form.source();
    let (n, m) = (p.n(), p.m());
    let diagonal = sup_norm_estimate(p, budget, seed)?;
    let runs: Vec<SupNormEstimate> = (0..budget.restarts)
        .into_par_iter()
        .map(|r| {
            if r == 0 {
                let start: Vec<f64> = diagonal.witness.phases().repeat(m);
                let mut e = form_ascent(form, &start, budget.tol, budget.max_sweeps);
                e.evaluations_used += diagonal.evaluations_used;
                return e;
            }
            let mut rng = rng_from_seed(derive_seed(seed, r as u64));
            let mut best_v = f64::NEG_INFINITY;
            let mut best_start = vec![0.0; m * n];
            let mut phases = vec![0.0; m * n];
            for _ in 0..budget.samples_per_restart {
                phases.iter_mut().for_each(|t| *t = rng.gen_range(0.0..TAU));
                let v = form.eval_unchecked(&split_phases(&phases, n)).norm();
                if v > best_v {
                    best_v = v;
                    best_start.copy_from_slice(&phases);
                }
            }
            let mut e = form_ascent(form, &best_start, budget.tol, budget.max_sweeps);
            e.evaluations_used += budget.samples_per_restart as u64;
            e
        })
        .collect();
    Ok(best_of(runs, budget.restarts))
}

/// Classical polarization constant `m^m / m!`.
pub fn polarization_constant(m: usize) -> f64 {
    let factorial: f64 = (1..=m).map(|k| k as f64).product();
    (m as f64).powi(m as i32) / factorial
}
