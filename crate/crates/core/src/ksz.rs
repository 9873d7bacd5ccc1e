//! Kahane–Salem–Zygmund experiment: random-sign polynomials and empirical
//! estimates of the constant `C` in `||P|| <= C n^((m+1)/2) sqrt(log m)`.
//!
//! The sup norm is a certified lower bound, so every `constant_estimate` is a
//! lower estimate of the constant the sampled signs achieve.

use rayon::prelude::*;

use crate::error::{argument, Result};
use crate::output::fmt_float;
use crate::polynomial::random_sign_polynomial;
use crate::seed::derive_seed;
use crate::supnorm::{sup_norm_estimate, SupNormBudget, SupNormEstimate};

const SUPNORM_TAG: u64 = 0x5u64 << 56;

/// Seed of the sup-norm search run on the polynomial sampled from
/// `polynomial_seed`.
pub fn supnorm_seed(polynomial_seed: u64) -> u64 {
    derive_seed(polynomial_seed, SUPNORM_TAG)
}

/// Seed of the polynomial used in trial `trial` of a search seeded by `seed`.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    derive_seed(seed, trial as u64)
}

/// `n^((m+1)/2) sqrt(ln m)`.
pub fn ksz_denominator(n: usize, m: usize) -> Result<f64> {
    if m < 2 {
        return Err(argument(format!("the KSZ bound needs m >= 2, got {m}")));
    }
    if n == 0 {
        return Err(argument("n must be at least 1"));
    }
    Ok((n as f64).powf((m as f64 + 1.0) / 2.0) * (m as f64).ln().sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct KszRecord {
    pub n: usize,
    pub m: usize,
    /// Seed of the sign polynomial.
    pub seed: u64,
    pub sup_estimate: f64,
    pub ksz_bound_denominator: f64,
    pub constant_estimate: f64,
    pub estimate: SupNormEstimate,
}

pub fn ksz_record(n: usize, m: usize, seed: u64, budget: &SupNormBudget) -> Result<KszRecord> {
    let denominator = ksz_denominator(n, m)?;
    let p = random_sign_polynomial(n, m, seed)?;
    let estimate = sup_norm_estimate(&p, budget, supnorm_seed(seed))?;
    Ok(KszRecord {
        n,
        m,
        seed,
        sup_estimate: estimate.lower_bound,
        ksz_bound_denominator: denominator,
        constant_estimate: estimate.lower_bound / denominator,
        estimate,
    })
}

/// Outcome of [`best_sign_search`].
#[derive(Debug, Clone, PartialEq)]
pub struct SignSearch {
    pub best: KszRecord,
    pub best_trial: usize,
    /// Constant estimates of every trial, in trial order.
    pub constant_estimates: Vec<f64>,
}

/// Samples `trials` sign patterns and keeps the one with the smallest
/// estimated sup norm (ties go to the smaller trial index).
pub fn best_sign_search(
    n: usize,
    m: usize,
    trials: usize,
    seed: u64,
    budget: &SupNormBudget,
) -> Result<SignSearch> {
    if trials == 0 {
        return Err(argument("trials must be at least 1"));
    }
    ksz_denominator(n, m)?;
    budget.validate()?;
    let records = (0..trials)
        .into_par_iter()
        .map(|t| ksz_record(n, m, trial_seed(seed, t), budget))
        .collect::<Result<Vec<_>>>()?;
    let constant_estimates = records.iter().map(|r| r.constant_estimate).collect();
    let mut best_trial = 0;
    for (t, r) in records.iter().enumerate() {
        if r.sup_estimate < records[best_trial].sup_estimate {
            best_trial = t;
        }
    }
    Ok(SignSearch {
        best: records.into_iter().nth(best_trial).expect("trial in range"),
        best_trial,
        constant_estimates,
    })
}

pub const KSZ_CSV_HEADER: &str = "n,m,seed,trials,sup_estimate,denominator,constant_estimate";

pub fn ksz_csv_row(record: &KszRecord, trials: usize) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        record.n,
        record.m,
        record.seed,
        trials,
        fmt_float(record.sup_estimate),
        fmt_float(record.ksz_bound_denominator),
        fmt_float(record.constant_estimate)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::multi_index_count;

    #[test]
    fn single_variable_record() {
        let r = ksz_record(1, 2, 3, &SupNormBudget::default()).unwrap();
        assert!((r.sup_estimate - 1.0).abs() < 1e-14);
        let expect = 1.0 / 2f64.ln().sqrt();
        assert!((r.constant_estimate - expect).abs() < 1e-12);
        assert!((r.constant_estimate - 1.2011).abs() < 1e-4);
    }

    #[test]
    fn two_variable_bracket_and_identity() {
        let r = ksz_record(2, 2, 8, &SupNormBudget::default()).unwrap();
        assert!(r.sup_estimate >= 3f64.sqrt() - 1e-6 && r.sup_estimate <= 3.0 + 1e-9);
        let denom = 2f64.powf(1.5) * 2f64.ln().sqrt();
        assert!((r.ksz_bound_denominator - denom).abs() < 1e-14);
        let back = r.constant_estimate * r.ksz_bound_denominator;
        assert!((back - r.sup_estimate).abs() <= 1e-12 * r.sup_estimate);
    }

    #[test]
    fn records_are_deterministic() {
        let b = SupNormBudget::default();
        assert_eq!(
            ksz_record(3, 3, 10, &b).unwrap(),
            ksz_record(3, 3, 10, &b).unwrap()
        );
        assert!(ksz_record(3, 1, 10, &b).is_err());
    }

    #[test]
    fn search_examples() {
        let b = SupNormBudget::default();
        let one = best_sign_search(4, 2, 1, 5, &b).unwrap();
        assert_eq!(one.best_trial, 0);
        assert_eq!(one.best, ksz_record(4, 2, trial_seed(5, 0), &b).unwrap());

        let s = best_sign_search(4, 2, 20, 5, &b).unwrap();
        let denom = s.best.ksz_bound_denominator;
        let mean = s.constant_estimates.iter().sum::<f64>() / 20.0 * denom;
        assert!(s.best.sup_estimate <= mean);
        let again = best_sign_search(4, 2, 20, 5, &b).unwrap();
        assert_eq!(
            s.best.constant_estimate.to_bits(),
            again.best.constant_estimate.to_bits()
        );

        let n_count = multi_index_count(4, 2).unwrap() as f64;
        for c in &s.constant_estimates {
            let sup = c * denom;
            assert!(sup >= n_count.sqrt() - 1e-6 && sup <= n_count + 1e-9);
        }
    }

    #[test]
    fn best_is_non_increasing_in_trials() {
        let b = SupNormBudget {
            restarts: 4,
            samples_per_restart: 32,
            ..SupNormBudget::default()
        };
        let mut last = f64::INFINITY;
        for trials in [1, 2, 5, 9] {
            let s = best_sign_search(5, 2, trials, 1, &b).unwrap();
            assert!(s.best.sup_estimate <= last);
            last = s.best.sup_estimate;
        }
    }
}
