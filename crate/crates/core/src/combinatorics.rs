//! Exact combinatorics of multi-indices.
//!
//! Multi-indices of degree `m` in `n` variables are enumerated in
//! colexicographic order: exponent vectors are compared from the last
//! coordinate backwards. Counts are exact `u64` values inside the guarded
//! range `n + m <= 64`.

use std::fmt;

use crate::error::{argument, Error, Result};

/// Largest admissible `n + m` for exact counting.
pub const MAX_ORDER: usize = 64;

/// Exponent vector of a monomial `z^alpha`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(argument("a multi-index needs at least one variable"));
        }
        Ok(Self(exponents))
    }

    /// Builds the exponent profile of an index tuple `(i_1, ..., i_m)` with
    /// zero-based entries in `0..n`.
    pub fn from_tuple(n: usize, tuple: &[usize]) -> Result<Self> {
        if n == 0 {
            return Err(argument("n must be at least 1"));
        }
        let mut exps = vec![0u32; n];
        for &i in tuple {
            if i >= n {
                return Err(argument(format!("tuple entry {i} outside 0..{n}")));
            }
            exps[i] += 1;
        }
        Ok(Self(exps))
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// Number of variables `n`.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total degree `|alpha|`.
    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    /// Variable indices with multiplicity, in non-increasing order.
    pub fn to_tuple(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degree());
        for (j, &e) in self.0.iter().enumerate().rev() {
            out.extend(std::iter::repeat_n(j, e as usize));
        }
        out
    }

    pub fn is_squarefree(&self) -> bool {
        self.0.iter().all(|&e| e <= 1)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

fn guard(n: usize, m: usize) -> Result<()> {
    if n == 0 {
        return Err(argument("n must be at least 1"));
    }
    if n + m > MAX_ORDER {
        return Err(Error::Range(format!(
            "n + m = {} exceeds the exact-arithmetic limit {MAX_ORDER}",
            n + m
        )));
    }
    Ok(())
}

/// Exact binomial coefficient; `0` when `k > n`. Callers keep `n <= 64`.
pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc * (n - k + i) as u128 / i as u128;
    }
    acc as u64
}

/// Number of multi-indices of degree `m` in `n` variables, `C(n+m-1, m)`.
pub fn multi_index_count(n: usize, m: usize) -> Result<u64> {
    guard(n, m)?;
    Ok(binomial(n + m - 1, m))
}

/// Number of square-free multi-indices, `C(n, m)`.
pub fn squarefree_count(n: usize, m: usize) -> Result<u64> {
    guard(n, m)?;
    Ok(binomial(n, m))
}

/// The excess `p(n) = C(n+m-1, m) - C(n, m)`: multi-indices with some
/// exponent at least 2.
pub fn excess_count(n: usize, m: usize) -> Result<u64> {
    Ok(multi_index_count(n, m)? - squarefree_count(n, m)?)
}

/// `n (n-1) ... (n-m+1)`.
pub fn falling_factorial(n: usize, m: usize) -> Result<u64> {
    guard(n, m)?;
    if m == 0 {
        return Err(argument("falling factorial requires m >= 1"));
    }
    let mut acc: u64 = 1;
    for k in 0..m {
        if k >= n {
            return Ok(0);
        }
        acc = acc
            .checked_mul((n - k) as u64)
            .ok_or_else(|| Error::Range(format!("falling factorial ({n})_{m} overflows u64")))?;
    }
    Ok(acc)
}

/// All multi-indices of degree `m` in `n` variables, colexicographic order.
pub fn enumerate_multi_indices(n: usize, m: usize) -> Result<Vec<MultiIndex>> {
    let count = multi_index_count(n, m)? as usize;
    let mut out = Vec::with_capacity(count);
    let mut buf = vec![0u32; n];
    fill_colex(&mut buf, n, m as u32, &mut out);
    debug_assert_eq!(out.len(), count);
    Ok(out)
}

// Fills positions `0..len` of `buf` with every split of `sum`, varying the
// highest position slowest.
fn fill_colex(buf: &mut [u32], len: usize, sum: u32, out: &mut Vec<MultiIndex>) {
    if len == 1 {
        buf[0] = sum;
        out.push(MultiIndex(buf.to_vec()));
        return;
    }
    for v in 0..=sum {
        buf[len - 1] = v;
        fill_colex(buf, len - 1, sum - v, out);
    }
    buf[len - 1] = 0;
}

/// Position of `alpha` in the colexicographic enumeration.
pub fn rank(alpha: &MultiIndex) -> Result<u64> {
    let n = alpha.len();
    let m = alpha.degree();
    guard(n, m)?;
    let mut remaining = m;
    let mut r = 0u64;
    for j in (1..n).rev() {
        let a = alpha.0[j] as usize;
        // Multi-indices agreeing above j with a smaller j-th exponent.
        r += binomial(remaining + j, j) - binomial(remaining - a + j, j);
        remaining -= a;
    }
    Ok(r)
}

/// Inverse of [`rank`].
pub fn unrank(index: u64, n: usize, m: usize) -> Result<MultiIndex> {
    let count = multi_index_count(n, m)?;
    if index >= count {
        return Err(Error::Index(format!(
            "rank {index} outside 0..{count} for n = {n}, m = {m}"
        )));
    }
    let mut exps = vec![0u32; n];
    let mut remaining = m;
    let mut i = index;
    for j in (1..n).rev() {
        let top = binomial(remaining + j, j);
        let mut v = 0;
        while v < remaining && top - binomial(remaining - (v + 1) + j, j) <= i {
            v += 1;
        }
        i -= top - binomial(remaining - v + j, j);
        exps[j] = v as u32;
        remaining -= v;
    }
    exps[0] = remaining as u32;
    Ok(MultiIndex(exps))
}

/// Multinomial `m! / (alpha_1! ... alpha_n!)`: the number of ordered index
/// tuples whose exponent profile is `alpha`.
pub fn orderings_multiplicity(alpha: &MultiIndex) -> Result<u64> {
    let mut acc: u64 = 1;
    let mut total = 0usize;
    for &e in &alpha.0 {
        total += e as usize;
        if total > MAX_ORDER {
            return Err(Error::Range(format!(
                "degree {total} exceeds the exact-arithmetic limit {MAX_ORDER}"
            )));
        }
        acc = acc
            .checked_mul(binomial(total, e as usize))
            .ok_or_else(|| Error::Range(format!("multinomial of {alpha} overflows u64")))?;
    }
    Ok(acc)
}
