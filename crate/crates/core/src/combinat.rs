//! Exact integer combinatorics: Catalan weights, generating-function
//! coefficients of the Catalan series, rescaled Chebyshev polynomials, the
//! odd binomial matrix and its inverse, and a Wick-formula moment oracle.
//!
//! Everything here is computed with checked `i128` arithmetic. Overflow is
//! reported as [`Error::Overflow`]; the documented bounds below are enforced
//! up front with [`Error::BoundExceeded`].

use std::fmt;

use crate::error::{Error, Result};

/// Largest `k` accepted by [`catalan_psi`].
pub const CATALAN_MAX_K: u32 = 120;
/// Largest `m` accepted by [`gen_coeff`].
pub const GEN_COEFF_MAX_M: u32 = 60;
/// Largest degree accepted by [`chebyshev_coeffs`].
pub const CHEBYSHEV_MAX_DEGREE: u32 = 120;
/// Largest `k` accepted by [`cancellation_sum`].
pub const CANCELLATION_MAX_K: u32 = 30;
/// Largest dimension accepted by [`inverse_binomial_matrix`].
pub const BINOMIAL_MATRIX_MAX_K: usize = 30;
/// Default limit on the number of factors in [`wick_moment`].
pub const WICK_DEFAULT_MAX_ORDER: usize = 12;

fn check_bound(what: &'static str, value: u64, bound: u64) -> Result<()> {
    if value > bound {
        Err(Error::BoundExceeded { what, value, bound })
    } else {
        Ok(())
    }
}

/// Exact binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binom(n: u32, k: u32) -> Result<i128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = acc
            .checked_mul((n - i) as i128)
            .ok_or(Error::Overflow("binomial coefficient"))?
            / (i as i128 + 1);
    }
    Ok(acc)
}

/// `psi_k`: zero for odd `k`, the `(k/2)`-th Catalan number for even `k`.
pub fn catalan_psi(k: u32) -> Result<i128> {
    check_bound("k", k as u64, CATALAN_MAX_K as u64)?;
    if k % 2 == 1 {
        return Ok(0);
    }
    let half = k / 2;
    Ok(binom(k, half)? / (half as i128 + 1))
}

/// Dense polynomial with exact integer coefficients, constant term first.
///
/// The highest stored coefficient is nonzero unless the polynomial is zero,
/// in which case `coeffs` is empty.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<i128>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<i128>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: i128) -> Self {
        IntPoly::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        IntPoly { coeffs: vec![0, 1] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    /// Coefficient of `x^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> i128 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// Compensated Horner evaluation in floating point.
    ///
    /// Rounding errors of each step are carried in a second Horner
    /// recurrence, so the result is as accurate as plain Horner in twice the
    /// working precision. Coefficients beyond 2^53 are split into two doubles.
    pub fn eval(&self, x: f64) -> f64 {
        let mut s = 0.0f64;
        let mut err = 0.0f64;
        for &c in self.coeffs.iter().rev() {
            let hi = c as f64;
            let lo = (c - hi as i128) as f64;
            let p = s * x;
            let p_err = s.mul_add(x, -p);
            let t = p + hi;
            let z = t - p;
            let t_err = (p - (t - z)) + (hi - z);
            s = t;
            err = err * x + (p_err + t_err + lo);
        }
        s + err
    }

    /// `x * self`.
    pub fn shift(&self) -> Self {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(0);
        coeffs.extend_from_slice(&self.coeffs);
        IntPoly { coeffs }
    }

    pub fn checked_sub(&self, other: &IntPoly) -> Result<IntPoly> {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                self.coeff(i)
                    .checked_sub(other.coeff(i))
                    .ok_or(Error::Overflow("polynomial subtraction"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IntPoly::new(coeffs))
    }

    pub fn checked_mul(&self, other: &IntPoly) -> Result<IntPoly> {
        if self.is_zero() || other.is_zero() {
            return Ok(IntPoly::zero());
        }
        let mut out = vec![0i128; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                let term = a.checked_mul(b).ok_or(Error::Overflow("polynomial product"))?;
                out[i + j] = out[i + j]
                    .checked_add(term)
                    .ok_or(Error::Overflow("polynomial product"))?;
            }
        }
        Ok(IntPoly::new(out))
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.unsigned_abs();
            match i {
                0 => write!(f, "{a}")?,
                1 if a == 1 => write!(f, "x")?,
                1 => write!(f, "{a}x")?,
                _ if a == 1 => write!(f, "x^{i}")?,
                _ => write!(f, "{a}x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Truncated product of two power series, keeping terms up to `z^order`.
fn series_mul(a: &[i128], b: &[i128], order: usize) -> Result<Vec<i128>> {
    let mut out = vec![0i128; order + 1];
    for (i, &x) in a.iter().enumerate().take(order + 1) {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(order + 1 - i) {
            let t = x.checked_mul(y).ok_or(Error::Overflow("series product"))?;
            out[i + j] = out[i + j].checked_add(t).ok_or(Error::Overflow("series product"))?;
        }
    }
    Ok(out)
}

/// Coefficients of `g(z) = (1 - sqrt(1 - 4z^2)) / (2z)` up to `z^order`,
/// from the fixed point `g = z (1 + g^2)`.
fn catalan_series(order: usize) -> Result<Vec<i128>> {
    let mut g = vec![0i128; order + 1];
    for m in 1..=order {
        // [z^m] z (1 + g^2) = [m == 1] + [z^{m-1}] g^2
        let mut c: i128 = if m == 1 { 1 } else { 0 };
        for a in 1..m - 1 {
            let b = m - 1 - a;
            let t = g[a].checked_mul(g[b]).ok_or(Error::Overflow("catalan series"))?;
            c = c.checked_add(t).ok_or(Error::Overflow("catalan series"))?;
        }
        g[m] = c;
    }
    Ok(g)
}

/// `f(m, r)`: the coefficient of `z^m` in `g(z)^r`, by truncated power-series
/// multiplication. Zero when `m` and `r` differ in parity.
pub fn gen_coeff(m: u32, r: u32) -> Result<i128> {
    check_bound("m", m as u64, GEN_COEFF_MAX_M as u64)?;
    if r < 1 || r > m {
        return Err(Error::Precondition(format!(
            "gen_coeff needs 1 <= r <= m, got m = {m}, r = {r}"
        )));
    }
    if (m - r) % 2 == 1 {
        return Ok(0);
    }
    let order = m as usize;
    let g = catalan_series(order)?;
    let mut pow = g.clone();
    for _ in 1..r {
        pow = series_mul(&pow, &g, order)?;
    }
    let series = pow[order];
    debug_assert_eq!(Ok(series), gen_coeff_closed_form(m, r));
    Ok(series)
}

/// Closed form `r / (2t + r) * C(2t + r, t)` with `m = r + 2t`; used to
/// cross-check [`gen_coeff`].
pub(crate) fn gen_coeff_closed_form(m: u32, r: u32) -> Result<i128> {
    if (m - r) % 2 == 1 {
        return Ok(0);
    }
    let t = (m - r) / 2;
    let b = binom(m, t)?;
    Ok(b.checked_mul(r as i128).ok_or(Error::Overflow("gen_coeff"))? / m as i128)
}

/// Rescaled Chebyshev polynomial `P_m`, characterised by
/// `P_m(z + 1/z) = z^m + z^{-m}`.
pub fn chebyshev_coeffs(m: u32) -> Result<IntPoly> {
    check_bound("m", m as u64, CHEBYSHEV_MAX_DEGREE as u64)?;
    let mut prev = IntPoly::constant(2);
    if m == 0 {
        return Ok(prev);
    }
    let mut cur = IntPoly::x();
    for _ in 1..m {
        let next = cur.shift().checked_sub(&prev)?;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `sum_{r=1}^{k} P_{2k}[2r] * r * psi_{2r}`, where `P_j[i]` is the
/// coefficient of `x^i` in `P_j`. Vanishes for every `k >= 2`; equals 1 at
/// `k = 1`.
pub fn cancellation_sum(k: u32) -> Result<i128> {
    check_bound("k", k as u64, CANCELLATION_MAX_K as u64)?;
    if k < 1 {
        return Err(Error::Precondition("cancellation_sum needs k >= 1".into()));
    }
    let p = chebyshev_coeffs(2 * k)?;
    let mut acc: i128 = 0;
    for r in 1..=k {
        let term = p
            .coeff(2 * r as usize)
            .checked_mul(r as i128)
            .and_then(|t| t.checked_mul(catalan_psi(2 * r).ok()?))
            .ok_or(Error::Overflow("cancellation sum"))?;
        acc = acc.checked_add(term).ok_or(Error::Overflow("cancellation sum"))?;
    }
    Ok(acc)
}

/// Checks `f(m, r) * m / r == C(m, (m + r) / 2)` exactly.
pub fn parity_identity_check(m: u32, r: u32) -> Result<bool> {
    if r < 1 || r > m {
        return Err(Error::Precondition(format!(
            "parity identity needs 1 <= r <= m, got m = {m}, r = {r}"
        )));
    }
    if !(m - r).is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "m = {m} and r = {r} must have the same parity"
        )));
    }
    let f = gen_coeff(m, r)?;
    let lhs = f.checked_mul(m as i128).ok_or(Error::Overflow("parity identity"))?;
    let rhs = binom(m, (m + r) / 2)?
        .checked_mul(r as i128)
        .ok_or(Error::Overflow("parity identity"))?;
    Ok(lhs == rhs)
}

/// Square lower-triangular matrix of exact integers, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LowerTriangularIntMatrix {
    dim: usize,
    entries: Vec<i128>,
}

impl LowerTriangularIntMatrix {
    /// Builds a matrix from `f(i, j)` for `j <= i`; entries above the
    /// diagonal are zero.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Result<i128>) -> Result<Self> {
        let mut entries = vec![0i128; dim * dim];
        for i in 0..dim {
            for j in 0..=i {
                entries[i * dim + j] = f(i, j)?;
            }
        }
        Ok(LowerTriangularIntMatrix { dim, entries })
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0i128; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        LowerTriangularIntMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i128]> {
        self.entries.chunks(self.dim.max(1)).take(self.dim)
    }

    pub fn has_unit_diagonal(&self) -> bool {
        (0..self.dim).all(|i| self.get(i, i) == 1)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        LowerTriangularIntMatrix::from_fn(self.dim, |i, j| {
            (j..=i).try_fold(0i128, |acc, l| {
                self.get(i, l)
                    .checked_mul(other.get(l, j))
                    .and_then(|t| acc.checked_add(t))
                    .ok_or(Error::Overflow("triangular product"))
            })
        })
    }
}

/// The odd binomial matrix `B` with `B[i][j] = C(2i+1, i+1+j)` for `j <= i`.
/// Row `i` lists `C(2i+1, i+1), ..., C(2i+1, 2i), 1`.
pub fn binomial_matrix(k: usize) -> Result<LowerTriangularIntMatrix> {
    check_bound("k", k as u64, BINOMIAL_MATRIX_MAX_K as u64)?;
    LowerTriangularIntMatrix::from_fn(k, |i, j| binom(2 * i as u32 + 1, (i + 1 + j) as u32))
}

/// Exact inverse `D` of [`binomial_matrix`], by forward substitution.
///
/// The result is verified before returning: `D * B` must be the identity
/// and `D[i][j]` must equal the coefficient of `x^{2j+1}` in `P_{2i+1}`.
pub fn inverse_binomial_matrix(k: usize) -> Result<LowerTriangularIntMatrix> {
    if k < 1 {
        return Err(Error::Precondition("inverse_binomial_matrix needs k >= 1".into()));
    }
    let b = binomial_matrix(k)?;
    // Unit lower triangular: D[i][i] = 1 and D[i][j] = -sum_{l=j+1}^{i} D[i][l] B[l][j].
    let mut d = vec![0i128; k * k];
    for i in 0..k {
        d[i * k + i] = 1;
        for j in (0..i).rev() {
            let mut acc: i128 = 0;
            for l in j + 1..=i {
                let t = d[i * k + l]
                    .checked_mul(b.get(l, j))
                    .ok_or(Error::Overflow("binomial inverse"))?;
                acc = acc.checked_add(t).ok_or(Error::Overflow("binomial inverse"))?;
            }
            d[i * k + j] = -acc;
        }
    }
    let d = LowerTriangularIntMatrix { dim: k, entries: d };

    if d.checked_mul(&b)? != LowerTriangularIntMatrix::identity(k) {
        return Err(Error::Precondition("binomial inverse failed D*B = I".into()));
    }
    for i in 0..k {
        let p = chebyshev_coeffs(2 * i as u32 + 1)?;
        for j in 0..=i {
            if d.get(i, j) != p.coeff(2 * j + 1) {
                return Err(Error::Precondition(format!(
                    "binomial inverse entry ({i}, {j}) disagrees with the Chebyshev coefficient"
                )));
            }
        }
    }
    Ok(d)
}

/// Symmetric positive-semidefinite covariance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CovMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl CovMatrix {
    /// Accepts a row-major `dim x dim` matrix; rejects asymmetric input or a
    /// negative diagonal.
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        for i in 0..dim {
            if entries[i * dim + i].is_nan() || entries[i * dim + i] < 0.0 {
                return Err(Error::Precondition(format!(
                    "covariance diagonal entry {i} is negative"
                )));
            }
            for j in 0..i {
                if entries[i * dim + j] != entries[j * dim + i] {
                    return Err(Error::Precondition("covariance matrix is not symmetric".into()));
                }
            }
        }
        Ok(CovMatrix { dim, entries })
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1.0;
        }
        CovMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }
}

/// `E[X_{i_1} ... X_{i_m}]` for a centered Gaussian vector with covariance
/// `cov`, as a sum over all perfect pairings of `index` (zero for odd `m`).
pub fn wick_moment(cov: &CovMatrix, index: &[usize]) -> Result<f64> {
    wick_moment_with_limit(cov, index, WICK_DEFAULT_MAX_ORDER)
}

pub fn wick_moment_with_limit(cov: &CovMatrix, index: &[usize], max_order: usize) -> Result<f64> {
    check_bound("moment order", index.len() as u64, max_order as u64)?;
    if let Some(&bad) = index.iter().find(|&&v| v >= cov.dim()) {
        return Err(Error::DimensionMismatch {
            expected: cov.dim(),
            found: bad + 1,
        });
    }
    if index.len() % 2 == 1 {
        return Ok(0.0);
    }
    let mut rest = index.to_vec();
    Ok(pairings_sum(cov, &mut rest))
}

// Pair the first element with each later one and recurse on what is left.
fn pairings_sum(cov: &CovMatrix, rest: &mut Vec<usize>) -> f64 {
    if rest.is_empty() {
        return 1.0;
    }
    let first = rest.remove(0);
    let mut total = 0.0;
    for p in 0..rest.len() {
        let partner = rest.remove(p);
        let c = cov.get(first, partner);
        if c != 0.0 {
            total += c * pairings_sum(cov, rest);
        }
        rest.insert(p, partner);
    }
    rest.insert(0, first);
    total
}
