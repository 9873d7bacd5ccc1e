//! The sharpness experiment.
//!
//! For fixed `m` and a list of dimensions `n > m`, the best of several
//! random-sign polynomials (smallest estimated sup norm) is kept per `n`, and
//! its Bohnenblust–Hille ratio `||c||_q / ||P||` is recorded for each
//! requested `q`. The growth exponent of the ratio in `n` is fitted by
//! least squares on log-log axes. Under KSZ scaling it is at least
//! `m/q - (m+1)/2`, which is positive exactly when `q < 2m/(m+1)`.

use rayon::prelude::*;

use crate::combinatorics::multi_index_count;
use crate::error::{argument, Result};
use crate::ksz::{best_sign_search, ksz_denominator, KszRecord};
use crate::output::fmt_float;
use crate::seed::derive_seed;
use crate::supnorm::SupNormBudget;

/// Slope above which a ratio series is reported as diverging.
pub const DEFAULT_DIVERGENCE_THRESHOLD: f64 = 0.2;

/// The critical exponent `2m/(m+1)`.
pub fn critical_exponent(m: usize) -> Result<f64> {
    if m == 0 {
        return Err(argument("the critical exponent needs m >= 1"));
    }
    Ok(2.0 * m as f64 / (m as f64 + 1.0))
}

/// Theory floor `m/q - (m+1)/2` for the growth exponent of the ratio.
pub fn expected_slope_floor(m: usize, q: f64) -> f64 {
    m as f64 / q - (m as f64 + 1.0) / 2.0
}

/// One `(m, n, q)` measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub m: usize,
    pub n: usize,
    pub q: f64,
    pub trials: usize,
    /// Seed of the retained sign polynomial.
    pub seed: u64,
    pub coeff_count: u64,
    pub coeff_lq: f64,
    pub sup_estimate: f64,
    pub ratio: f64,
    pub constant_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub expected_slope_floor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Diverges,
    Bounded,
}

impl Verdict {
    pub fn from_slope(slope: f64, threshold: f64) -> Self {
        if slope > threshold {
            Verdict::Diverges
        } else {
            Verdict::Bounded
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Diverges => "diverges",
            Verdict::Bounded => "bounded",
        }
    }
}

/// Parameters shared by every dimension of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub trials: usize,
    pub budget: SupNormBudget,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            trials: 20,
            budget: SupNormBudget::default(),
            seed: 0,
        }
    }
}

fn validate_q(q: f64) -> Result<()> {
    if !q.is_finite() || q <= 0.0 {
        return Err(argument(format!(
            "q must be a positive finite real, got {q}"
        )));
    }
    Ok(())
}

fn validate_dims(m: usize, n_list: &[usize]) -> Result<()> {
    if m < 2 {
        return Err(argument(format!("the sweep needs m >= 2, got {m}")));
    }
    if n_list.is_empty() {
        return Err(argument("the n list is empty"));
    }
    for &n in n_list {
        if n <= m {
            return Err(argument(format!(
                "every n must satisfy n > m = {m}, got n = {n}"
            )));
        }
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(argument("the n list must be strictly increasing"));
    }
    Ok(())
}

/// Best sign polynomial per dimension. Each `n` searches with its own seed
/// derived from `(config.seed, n)`.
pub fn best_records(m: usize, n_list: &[usize], config: &SweepConfig) -> Result<Vec<KszRecord>> {
    validate_dims(m, n_list)?;
    n_list
        .par_iter()
        .map(|&n| {
            best_sign_search(
                n,
                m,
                config.trials,
                derive_seed(config.seed, n as u64),
                &config.budget,
            )
            .map(|s| s.best)
        })
        .collect()
}

/// Experiment records for exponent `q` built from already-searched
/// polynomials.
pub fn records_for_q(best: &[KszRecord], q: f64, trials: usize) -> Result<Vec<ExperimentRecord>> {
    validate_q(q)?;
    best.iter()
        .map(|r| {
            let coeff_count = multi_index_count(r.n, r.m)?;
            // Sign coefficients: sum |c|^q = N exactly.
            let coeff_lq = (coeff_count as f64).powf(1.0 / q);
            Ok(ExperimentRecord {
                m: r.m,
                n: r.n,
                q,
                trials,
                seed: r.seed,
                coeff_count,
                coeff_lq,
                sup_estimate: r.sup_estimate,
                ratio: coeff_lq / r.sup_estimate,
                constant_estimate: r.constant_estimate,
            })
        })
        .collect()
}

pub fn ratio_sweep(
    m: usize,
    q: f64,
    n_list: &[usize],
    config: &SweepConfig,
) -> Result<Vec<ExperimentRecord>> {
    validate_q(q)?;
    let best = best_records(m, n_list, config)?;
    records_for_q(&best, q, config.trials)
}

/// Ordinary least squares `y = slope x + intercept`, with `R^2`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let len = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let my = ys.iter().sum::<f64>() / len;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    (slope, intercept, r_squared)
}

/// Fits `log(ratio)` against `log(n)` for records sharing one `(m, q)`.
pub fn fit_growth_exponent(records: &[ExperimentRecord]) -> Result<SlopeFit> {
    let first = records
        .first()
        .ok_or_else(|| argument("no records to fit"))?;
    if records.iter().any(|r| r.m != first.m || r.q != first.q) {
        return Err(argument("records to fit must share one (m, q)"));
    }
    let mut ns: Vec<usize> = records.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 3 {
        return Err(argument(format!(
            "a growth fit needs at least 3 distinct n, got {}",
            ns.len()
        )));
    }
    let xs: Vec<f64> = records.iter().map(|r| (r.n as f64).ln()).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.ratio.ln()).collect();
    let (slope, intercept, r_squared) = least_squares(&xs, &ys);
    Ok(SlopeFit {
        slope,
        intercept,
        r_squared,
        expected_slope_floor: expected_slope_floor(first.m, first.q),
    })
}

/// Least-squares slope of `log N` against `log n`, `N = C(n+m-1, m)`.
pub fn count_slope(m: usize, n_list: &[usize]) -> Result<f64> {
    let xs: Vec<f64> = n_list.iter().map(|&n| (n as f64).ln()).collect();
    let ys = n_list
        .iter()
        .map(|&n| multi_index_count(n, m).map(|c| (c as f64).ln()))
        .collect::<Result<Vec<_>>>()?;
    Ok(least_squares(&xs, &ys).0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub q: f64,
    pub fit: SlopeFit,
    pub verdict: Verdict,
}

/// Ratio measured against the KSZ bound with the sweep's largest constant
/// estimate, `||c||_q / (C_env n^((m+1)/2) sqrt(log m))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservativePoint {
    pub n: usize,
    pub q: f64,
    pub constant_envelope: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    pub m: usize,
    pub rows: Vec<ReportRow>,
    /// Records for every `q`, grouped by `q` in input order.
    pub records: Vec<ExperimentRecord>,
    pub conservative: Vec<ConservativePoint>,
    /// Slope of `log N` against `log n` over the sweep's dimensions.
    pub count_slope: f64,
}

/// One search per dimension shared by every `q`, then a growth fit per `q`.
///
/// Because the sup estimates are shared, fitted slopes for two exponents
/// differ by exactly `(1/q - 1/q') * count_slope`.
pub fn divergence_report(
    m: usize,
    q_list: &[f64],
    n_list: &[usize],
    config: &SweepConfig,
    threshold: f64,
) -> Result<DivergenceReport> {
    if q_list.is_empty() {
        return Err(argument("the q list is empty"));
    }
    for &q in q_list {
        validate_q(q)?;
    }
    if q_list.windows(2).any(|w| w[0] > w[1]) {
        return Err(argument("the q list must be sorted"));
    }
    let best = best_records(m, n_list, config)?;
    let envelope = best
        .iter()
        .map(|r| r.constant_estimate)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut rows = Vec::with_capacity(q_list.len());
    let mut records = Vec::new();
    let mut conservative = Vec::new();
    for &q in q_list {
        let recs = records_for_q(&best, q, config.trials)?;
        let fit = fit_growth_exponent(&recs)?;
        for r in &recs {
            conservative.push(ConservativePoint {
                n: r.n,
                q,
                constant_envelope: envelope,
                ratio: r.coeff_lq / (envelope * ksz_denominator(r.n, m)?),
            });
        }
        rows.push(ReportRow {
            q,
            fit,
            verdict: Verdict::from_slope(fit.slope, threshold),
        });
        records.extend(recs);
    }
    Ok(DivergenceReport {
        m,
        rows,
        records,
        conservative,
        count_slope: count_slope(m, n_list)?,
    })
}

pub const RECORD_CSV_HEADER: &str =
    "m,n,q,trials,seed,coeff_count,coeff_lq,sup_estimate,ratio,constant_estimate";
pub const SLOPE_CSV_HEADER: &str = "m,q,slope,intercept,r_squared,expected_slope_floor,verdict";
pub const CONSERVATIVE_CSV_HEADER: &str = "m,n,q,constant_envelope,conservative_ratio";

pub fn records_to_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::from(RECORD_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.m,
            r.n,
            fmt_float(r.q),
            r.trials,
            r.seed,
            r.coeff_count,
            fmt_float(r.coeff_lq),
            fmt_float(r.sup_estimate),
            fmt_float(r.ratio),
            fmt_float(r.constant_estimate)
        ));
    }
    out
}

pub fn slope_row(m: usize, q: f64, fit: &SlopeFit, verdict: Verdict) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        m,
        fmt_float(q),
        fmt_float(fit.slope),
        fmt_float(fit.intercept),
        fmt_float(fit.r_squared),
        fmt_float(fit.expected_slope_floor),
        verdict.as_str()
    )
}

impl DivergenceReport {
    pub fn slopes_csv(&self) -> String {
        let mut out = String::from(SLOPE_CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&slope_row(self.m, row.q, &row.fit, row.verdict));
            out.push('\n');
        }
        out
    }

    pub fn conservative_csv(&self) -> String {
        let mut out = String::from(CONSERVATIVE_CSV_HEADER);
        out.push('\n');
        for c in &self.conservative {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                self.m,
                c.n,
                fmt_float(c.q),
                fmt_float(c.constant_envelope),
                fmt_float(c.ratio)
            ));
        }
        out
    }
}

/// Parses the record CSV written by [`records_to_csv`].
pub fn parse_records_csv(text: &str) -> Result<Vec<ExperimentRecord>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == RECORD_CSV_HEADER => {}
        Some(h) => return Err(argument(format!("unexpected CSV header: {h}"))),
        None => return Err(argument("empty record CSV")),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.trim().split(',').collect();
            if f.len() != 10 {
                return Err(argument(format!(
                    "record line {} has {} fields, expected 10",
                    i + 2,
                    f.len()
                )));
            }
            let bad = |what: &str| argument(format!("record line {}: bad {what}", i + 2));
            Ok(ExperimentRecord {
                m: f[0].parse().map_err(|_| bad("m"))?,
                n: f[1].parse().map_err(|_| bad("n"))?,
                q: f[2].parse().map_err(|_| bad("q"))?,
                trials: f[3].parse().map_err(|_| bad("trials"))?,
                seed: f[4].parse().map_err(|_| bad("seed"))?,
                coeff_count: f[5].parse().map_err(|_| bad("coeff_count"))?,
                coeff_lq: f[6].parse().map_err(|_| bad("coeff_lq"))?,
                sup_estimate: f[7].parse().map_err(|_| bad("sup_estimate"))?,
                ratio: f[8].parse().map_err(|_| bad("ratio"))?,
                constant_estimate: f[9].parse().map_err(|_| bad("constant_estimate"))?,
            })
        })
        .collect()
}
