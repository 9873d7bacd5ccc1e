//! Dense m-homogeneous polynomials on `C^n`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{multi_index_count, rank, unrank, MultiIndex};
use crate::error::{argument, Result};
use crate::seed::rng_from_seed;

/// A point of the torus `T^n`, stored as phases reduced to `[0, 2pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint(Vec<f64>);

impl TorusPoint {
    pub fn new(phases: Vec<f64>) -> Self {
        Self(phases.into_iter().map(reduce_phase).collect())
    }

    pub fn phases(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The unit-modulus coordinates `exp(i theta_j)`.
    pub fn to_complex(&self) -> Vec<Complex64> {
        self.0
            .iter()
            .map(|&t| Complex64::from_polar(1.0, t))
            .collect()
    }
}

pub(crate) fn reduce_phase(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// `sum_alpha c_alpha z^alpha` over all `|alpha| = m`, coefficients stored
/// densely in colexicographic rank order.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousPolynomial {
    n: usize,
    m: usize,
    coefficients: Vec<Complex64>,
    seed: Option<u64>,
}

impl HomogeneousPolynomial {
    pub fn new(n: usize, m: usize, coefficients: Vec<Complex64>) -> Result<Self> {
        let count = multi_index_count(n, m)? as usize;
        if coefficients.len() != count {
            return Err(argument(format!(
                "expected {count} coefficients for n = {n}, m = {m}, got {}",
                coefficients.len()
            )));
        }
        Ok(Self {
            n,
            m,
            coefficients,
            seed: None,
        })
    }

    pub fn zero(n: usize, m: usize) -> Result<Self> {
        let count = multi_index_count(n, m)? as usize;
        Self::new(n, m, vec![Complex64::new(0.0, 0.0); count])
    }

    /// Builds a polynomial from `(exponents, coefficient)` terms; repeated
    /// exponents accumulate.
    pub fn from_terms(n: usize, m: usize, terms: &[(Vec<u32>, Complex64)]) -> Result<Self> {
        let mut p = Self::zero(n, m)?;
        for (exps, c) in terms {
            let alpha = MultiIndex::new(exps.clone())?;
            if alpha.len() != n || alpha.degree() != m {
                return Err(argument(format!(
                    "term {alpha} does not belong to n = {n}, m = {m}"
                )));
            }
            p.coefficients[rank(&alpha)? as usize] += c;
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Seed the polynomial was sampled from, if any.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> Result<Complex64> {
        if alpha.len() != self.n || alpha.degree() != self.m {
            return Err(argument(format!(
                "{alpha} does not belong to n = {}, m = {}",
                self.n, self.m
            )));
        }
        Ok(self.coefficients[rank(alpha)? as usize])
    }

    /// Multi-index of the coefficient stored at `position`.
    pub fn multi_index(&self, position: usize) -> Result<MultiIndex> {
        unrank(position as u64, self.n, self.m)
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(argument(format!(
                "point has {len} coordinates, polynomial has {} variables",
                self.n
            )));
        }
        Ok(())
    }

    /// `P(z)`.
    pub fn evaluate(&self, z: &[Complex64]) -> Result<Complex64> {
        self.check_dim(z.len())?;
        Ok(self.eval_unchecked(z))
    }

    /// `P(z)` without the dimension check.
    ///
    /// Monomials are visited in rank order as non-increasing index tuples
    /// `i_1 >= ... >= i_m`, sharing prefix products along the way.
    pub(crate) fn eval_unchecked(&self, z: &[Complex64]) -> Complex64 {
        let mut pos = 0usize;
        let mut acc = Complex64::new(0.0, 0.0);
        eval_rec(
            z,
            &self.coefficients,
            self.m,
            self.n,
            Complex64::new(1.0, 0.0),
            &mut pos,
            &mut acc,
        );
        acc
    }

    pub fn evaluate_on_torus(&self, t: &TorusPoint) -> Result<Complex64> {
        self.evaluate(&t.to_complex())
    }

    /// Coefficients `a_0..=a_m` of `P` viewed as a polynomial in `z_j` with
    /// the other coordinates frozen at `z`.
    pub(crate) fn coordinate_slice(&self, z: &[Complex64], j: usize) -> Vec<Complex64> {
        let mut pos = 0usize;
        let mut out = vec![Complex64::new(0.0, 0.0); self.m + 1];
        slice_rec(
            z,
            j,
            &self.coefficients,
            self.m,
            self.n,
            0,
            Complex64::new(1.0, 0.0),
            &mut pos,
            &mut out,
        );
        out
    }

    /// `(sum |c_alpha|^q)^(1/q)`; a quasi-norm when `q < 1`.
    pub fn coeff_lq_norm(&self, q: f64) -> Result<f64> {
        if !q.is_finite() || q <= 0.0 {
            return Err(argument(format!(
                "q must be a positive finite real, got {q}"
            )));
        }
        let sum: f64 = self.coefficients.iter().map(|c| c.norm().powf(q)).sum();
        Ok(sum.powf(1.0 / q))
    }

    pub fn l1_norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn to_json(&self) -> String {
        let doc = PolynomialJson {
            n: self.n,
            m: self.m,
            seed: self.seed,
            coefficients: self.coefficients.iter().map(|c| [c.re, c.im]).collect(),
        };
        serde_json::to_string(&doc).expect("polynomial JSON serialization")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PolynomialJson =
            serde_json::from_str(text).map_err(|e| argument(format!("polynomial JSON: {e}")))?;
        let coeffs = doc
            .coefficients
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        let mut p = Self::new(doc.n, doc.m, coeffs)?;
        p.seed = doc.seed;
        Ok(p)
    }
}

#[derive(Serialize, Deserialize)]
struct PolynomialJson {
    n: usize,
    m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    coefficients: Vec<[f64; 2]>,
}

fn eval_rec(
    z: &[Complex64],
    coeffs: &[Complex64],
    left: usize,
    bound: usize,
    partial: Complex64,
    pos: &mut usize,
    acc: &mut Complex64,
) {
    if left == 0 {
        *acc += coeffs[*pos] * partial;
        *pos += 1;
        return;
    }
    for i in 0..bound {
        eval_rec(z, coeffs, left - 1, i + 1, partial * z[i], pos, acc);
    }
}

#[allow(clippy::too_many_arguments)]
fn slice_rec(
    z: &[Complex64],
    j: usize,
    coeffs: &[Complex64],
    left: usize,
    bound: usize,
    power: usize,
    partial: Complex64,
    pos: &mut usize,
    out: &mut [Complex64],
) {
    if left == 0 {
        out[power] += coeffs[*pos] * partial;
        *pos += 1;
        return;
    }
    for i in 0..bound {
        if i == j {
            slice_rec(z, j, coeffs, left - 1, i + 1, power + 1, partial, pos, out);
        } else {
            slice_rec(
                z,
                j,
                coeffs,
                left - 1,
                i + 1,
                power,
                partial * z[i],
                pos,
                out,
            );
        }
    }
}

/// A polynomial whose coefficients are independent uniform signs drawn from
/// the stream seeded by `seed`.
pub fn random_sign_polynomial(n: usize, m: usize, seed: u64) -> Result<HomogeneousPolynomial> {
    if m < 2 {
        return Err(argument(format!("sign polynomials need m >= 2, got {m}")));
    }
    let count = multi_index_count(n, m)? as usize;
    let mut rng = rng_from_seed(seed);
    let coeffs = (0..count)
        .map(|_| {
            if rng.gen::<bool>() {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(-1.0, 0.0)
            }
        })
        .collect();
    let mut p = HomogeneousPolynomial::new(n, m, coeffs)?;
    p.seed = Some(seed);
    Ok(p)
}
