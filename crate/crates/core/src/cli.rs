//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage or validation errors, 2 when a
//! numeric range guard trips.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::Rng as _;
use serde_json::json;

use crate::combinatorics::{excess_count, falling_factorial, multi_index_count, squarefree_count};
use crate::error::Error;
use crate::experiments::{
    best_records, critical_exponent, divergence_report, fit_growth_exponent, parse_records_csv,
    records_for_q, records_to_csv, slope_row, ExperimentRecord, SlopeFit, SweepConfig, Verdict,
    DEFAULT_DIVERGENCE_THRESHOLD, SLOPE_CSV_HEADER,
};
use crate::ksz::{
    best_sign_search, ksz_csv_row, ksz_record, supnorm_seed, trial_seed, KszRecord, KSZ_CSV_HEADER,
};
use crate::multilinear::{form_sup_estimate, polarization_constant, SymmetricForm};
use crate::output::fmt_float;
use crate::polynomial::{random_sign_polynomial, HomogeneousPolynomial, TorusPoint};
use crate::seed::{derive_seed, rng_from_seed};
use crate::supnorm::{grid_oracle, sup_norm_estimate, SupNormBudget, SupNormEstimate};

#[derive(Debug, Parser)]
#[command(
    name = "bh-lab",
    version,
    about = "Bohnenblust–Hille sharpness experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Common {
    /// Master seed; every random draw derives from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct BudgetArgs {
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    /// Random torus samples per restart.
    #[arg(long, default_value_t = 256)]
    samples: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_sweeps: usize,
}

impl BudgetArgs {
    fn budget(&self) -> SupNormBudget {
        SupNormBudget {
            restarts: self.restarts,
            samples_per_restart: self.samples,
            tol: self.tol,
            max_sweeps: self.max_sweeps,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Multi-index counts: total, square-free, excess, falling factorial.
    Count {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Emit a random sign polynomial.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Estimate the sup norm of a polynomial read from JSON or generated from
    /// (n, m, seed).
    Supnorm {
        #[arg(long = "in", conflicts_with_all = ["n", "m"])]
        input: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        /// Use the exhaustive grid oracle at this resolution (n <= 3).
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        common: Common,
    },
    /// KSZ constant estimates, one best-of-trials row per n.
    Ksz {
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Emit every trial instead of the best one.
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Ratio sweep over n for each q.
    Sweep {
        #[arg(long)]
        m: usize,
        #[arg(long, value_delimiter = ',', default_value = "crit")]
        q: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Growth-exponent fit of a sweep CSV for one (m, q).
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        q: String,
        #[arg(long, default_value_t = DEFAULT_DIVERGENCE_THRESHOLD)]
        threshold: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Full divergence report: shared sweep, one fit and verdict per q.
    Report {
        #[arg(long)]
        m: usize,
        #[arg(long, value_delimiter = ',', default_value = "1.0,crit")]
        q: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_DIVERGENCE_THRESHOLD)]
        threshold: f64,
        /// Also write the per-n records CSV here.
        #[arg(long)]
        records_out: Option<PathBuf>,
        /// Also write ratios against the KSZ envelope here.
        #[arg(long)]
        conservative_out: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Polarization diagnostics for a random sign polynomial.
    PolarizeCheck {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, value_delimiter = ',', default_value = "1,crit,2")]
        q: Vec<String>,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug)]
enum CliError {
    Lab(Error),
    Usage(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lab(e)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Lab(Error::Range(_)) => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lab(e) => write!(f, "{e}"),
            CliError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn parse_q(text: &str, m: usize) -> CliResult<f64> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("crit") {
        return Ok(critical_exponent(m)?);
    }
    t.parse::<f64>()
        .map_err(|_| CliError::Usage(format!("cannot parse q value '{t}'")))
}

fn parse_q_list(items: &[String], m: usize) -> CliResult<Vec<f64>> {
    items.iter().map(|s| parse_q(s, m)).collect()
}

fn write_output(path: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Usage(format!("cannot write output: {e}")))
        }
    }
}

fn json_lines(value: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&value).expect("JSON serialization");
    s.push('\n');
    s
}

fn estimate_csv(e: &SupNormEstimate) -> String {
    let phases: Vec<String> = e.witness.phases().iter().map(|&t| fmt_float(t)).collect();
    format!(
        "lower_bound,upper_bound,witness_phases,restarts,evaluations,method\n{},{},{},{},{},{}\n",
        fmt_float(e.lower_bound),
        e.upper_bound.map(fmt_float).unwrap_or_default(),
        phases.join(";"),
        e.restarts_used,
        e.evaluations_used,
        e.method.as_str()
    )
}

fn ksz_json(r: &KszRecord, trials: usize) -> serde_json::Value {
    json!({
        "n": r.n,
        "m": r.m,
        "seed": r.seed,
        "trials": trials,
        "sup_estimate": r.sup_estimate,
        "denominator": r.ksz_bound_denominator,
        "constant_estimate": r.constant_estimate,
        "note": "sup_estimate is a lower bound, so constant_estimate underestimates C",
    })
}

fn record_json(r: &ExperimentRecord) -> serde_json::Value {
    json!({
        "m": r.m, "n": r.n, "q": r.q, "trials": r.trials, "seed": r.seed,
        "coeff_count": r.coeff_count, "coeff_lq": r.coeff_lq,
        "sup_estimate": r.sup_estimate, "ratio": r.ratio,
        "constant_estimate": r.constant_estimate,
    })
}

fn fit_json(m: usize, q: f64, fit: &SlopeFit, verdict: Verdict) -> serde_json::Value {
    json!({
        "m": m, "q": q, "slope": fit.slope, "intercept": fit.intercept,
        "r_squared": fit.r_squared, "expected_slope_floor": fit.expected_slope_floor,
        "verdict": verdict.as_str(),
    })
}

fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Count { n, m, common } => {
            let total = multi_index_count(n, m)?;
            let squarefree = squarefree_count(n, m)?;
            let excess = excess_count(n, m)?;
            let falling = if m == 0 {
                None
            } else {
                Some(falling_factorial(n, m)?)
            };
            let text = match common.format {
                Some(Format::Json) => json_lines(json!({
                    "n": n, "m": m,
                    "multi_index_count": total,
                    "squarefree_count": squarefree,
                    "excess_count": excess,
                    "falling_factorial": falling,
                })),
                Some(Format::Csv) => format!(
                    "n,m,multi_index_count,squarefree_count,excess_count,falling_factorial\n{n},{m},{total},{squarefree},{excess},{}\n",
                    falling.map(|f| f.to_string()).unwrap_or_default()
                ),
                None => format!(
                    "{total} {squarefree} {excess} {}\n",
                    falling.map(|f| f.to_string()).unwrap_or_else(|| "—".into())
                ),
            };
            write_output(common.out.as_ref(), &text)
        }
        Command::Gen { n, m, common } => {
            let p = random_sign_polynomial(n, m, common.seed)?;
            let text = match common.format {
                Some(Format::Csv) => {
                    let mut s = String::from("rank,exponents,re,im\n");
                    for (i, c) in p.coefficients().iter().enumerate() {
                        let alpha = p.multi_index(i)?;
                        let exps: Vec<String> =
                            alpha.exponents().iter().map(|e| e.to_string()).collect();
                        s.push_str(&format!(
                            "{i},{},{},{}\n",
                            exps.join(";"),
                            fmt_float(c.re),
                            fmt_float(c.im)
                        ));
                    }
                    s
                }
                _ => format!("{}\n", p.to_json()),
            };
            write_output(common.out.as_ref(), &text)
        }
        Command::Supnorm {
            input,
            n,
            m,
            grid,
            budget,
            common,
        } => {
            let p = match (input, n, m) {
                (Some(path), _, _) => {
                    let text = fs::read_to_string(&path).map_err(|e| {
                        CliError::Usage(format!("cannot read {}: {e}", path.display()))
                    })?;
                    HomogeneousPolynomial::from_json(&text)?
                }
                (None, Some(n), Some(m)) => random_sign_polynomial(n, m, common.seed)?,
                _ => {
                    return Err(CliError::Usage(
                        "supnorm needs --in PATH or both --n and --m".into(),
                    ))
                }
            };
            let estimate = match grid {
                Some(k) => grid_oracle(&p, k)?,
                None => sup_norm_estimate(&p, &budget.budget(), supnorm_seed(common.seed))?,
            };
            let text = match common.format {
                Some(Format::Csv) => estimate_csv(&estimate),
                _ => format!("{}\n", estimate.to_json()),
            };
            write_output(common.out.as_ref(), &text)
        }
        Command::Ksz {
            n,
            m,
            trials,
            all,
            budget,
            common,
        } => {
            if n.is_empty() {
                return Err(CliError::Usage("ksz needs at least one --n".into()));
            }
            let budget = budget.budget();
            let mut rows = Vec::new();
            for &dim in &n {
                let search = best_sign_search(
                    dim,
                    m,
                    trials,
                    derive_seed(common.seed, dim as u64),
                    &budget,
                )?;
                if all {
                    for t in 0..trials {
                        let seed = trial_seed(derive_seed(common.seed, dim as u64), t);
                        if t == search.best_trial {
                            rows.push(search.best.clone());
                        } else {
                            rows.push(ksz_record(dim, m, seed, &budget)?);
                        }
                    }
                } else {
                    rows.push(search.best);
                }
            }
            let text = match common.format {
                Some(Format::Json) => json_lines(serde_json::Value::Array(
                    rows.iter().map(|r| ksz_json(r, trials)).collect(),
                )),
                _ => {
                    let mut s = format!("{KSZ_CSV_HEADER}\n");
                    for r in &rows {
                        s.push_str(&ksz_csv_row(r, trials));
                        s.push('\n');
                    }
                    s
                }
            };
            write_output(common.out.as_ref(), &text)
        }
        Command::Sweep {
            m,
            q,
            n,
            trials,
            budget,
            common,
        } => {
            let qs = parse_q_list(&q, m)?;
            let config = SweepConfig {
                trials,
                budget: budget.budget(),
                seed: common.seed,
            };
            if qs.is_empty() {
                return Err(CliError::Usage("sweep needs at least one q".into()));
            }
            // One search shared by every q.
            let best = best_records(m, &n, &config)?;
            let mut records = Vec::new();
            for &qv in &qs {
                records.extend(records_for_q(&best, qv, trials)?);
            }
            let text = match common.format {
                Some(Format::Json) => json_lines(serde_json::Value::Array(
                    records.iter().map(record_json).collect(),
                )),
                _ => records_to_csv(&records),
            };
            write_output(common.out.as_ref(), &text)
        }
        Command::Fit {
            input,
            m,
            q,
            threshold,
            common,
        } => {
            let qv = parse_q(&q, m)?;
            let text = fs::read_to_string(&input)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", input.display())))?;
            let records: Vec<ExperimentRecord> = parse_records_csv(&text)?
                .into_iter()
                .filter(|r| r.m == m && r.q == qv)
                .collect();
            let fit = fit_growth_exponent(&records)?;
            let verdict = Verdict::from_slope(fit.slope, threshold);
            let text = match common.format {
                Some(Format::Json) => json_lines(fit_json(m, qv, &fit, verdict)),
                _ => format!("{SLOPE_CSV_HEADER}\n{}\n", slope_row(m, qv, &fit, verdict)),
            };
            write_output(common.out.as_ref(), &text)
        }
        Command::Report {
            m,
            q,
            n,
            trials,
            threshold,
            records_out,
            conservative_out,
            budget,
            common,
        } => {
            let qs = parse_q_list(&q, m)?;
            let config = SweepConfig {
                trials,
                budget: budget.budget(),
                seed: common.seed,
            };
            let report = divergence_report(m, &qs, &n, &config, threshold)?;
            if let Some(path) = records_out.as_ref() {
                write_output(Some(path), &records_to_csv(&report.records))?;
            }
            if let Some(path) = conservative_out.as_ref() {
                write_output(Some(path), &report.conservative_csv())?;
            }
            let text = match common.format {
                Some(Format::Json) => json_lines(json!({
                    "m": m,
                    "count_slope": report.count_slope,
                    "fits": report
                        .rows
                        .iter()
                        .map(|r| fit_json(m, r.q, &r.fit, r.verdict))
                        .collect::<Vec<_>>(),
                })),
                _ => report.slopes_csv(),
            };
            write_output(common.out.as_ref(), &text)
        }
        Command::PolarizeCheck {
            n,
            m,
            q,
            budget,
            common,
        } => {
            let qs = parse_q_list(&q, m)?;
            let p = random_sign_polynomial(n, m, common.seed)?;
            let form = SymmetricForm::new(&p);
            let mut rng = rng_from_seed(derive_seed(common.seed, 0x9017));
            let mut residual: f64 = 0.0;
            for _ in 0..100 {
                let t = TorusPoint::new(
                    (0..n)
                        .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
                        .collect(),
                );
                let z: Vec<Complex64> = t.to_complex();
                let direct = p.evaluate(&z)?;
                let polar = form.evaluate(&vec![z; m])?;
                residual =
                    residual.max((polar - direct).norm() / direct.norm().max(f64::MIN_POSITIVE));
            }
            let budget = budget.budget();
            let seed = supnorm_seed(common.seed);
            let poly_sup = sup_norm_estimate(&p, &budget, seed)?;
            let form_sup = form_sup_estimate(&form, &budget, seed)?;
            let pairs = qs
                .iter()
                .map(|&qv| Ok((qv, form.tensor_lq_norm(qv)?, p.coeff_lq_norm(qv)?)))
                .collect::<CliResult<Vec<_>>>()?;
            let text = match common.format {
                Some(Format::Json) => json_lines(json!({
                    "n": n, "m": m, "seed": common.seed,
                    "diagonal_residual": residual,
                    "norms": pairs.iter().map(|(qv, t, pq)| json!({"q": qv, "tensor_lq": t, "poly_lq": pq})).collect::<Vec<_>>(),
                    "poly_sup": poly_sup.lower_bound,
                    "form_sup": form_sup.lower_bound,
                    "polarization_constant": polarization_constant(m),
                })),
                _ => {
                    let mut s = format!("n={n} m={m} seed={}\n", common.seed);
                    s.push_str(&format!("diagonal_residual {}\n", fmt_float(residual)));
                    for (qv, t, pq) in &pairs {
                        s.push_str(&format!(
                            "q {} tensor_lq {} poly_lq {}\n",
                            fmt_float(*qv),
                            fmt_float(*t),
                            fmt_float(*pq)
                        ));
                    }
                    s.push_str(&format!("poly_sup {}\n", fmt_float(poly_sup.lower_bound)));
                    s.push_str(&format!("form_sup {}\n", fmt_float(form_sup.lower_bound)));
                    s.push_str(&format!(
                        "polarization_constant {}\n",
                        fmt_float(polarization_constant(m))
                    ));
                    s
                }
            };
            write_output(common.out.as_ref(), &text)
        }
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
