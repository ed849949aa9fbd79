//! Gaussian interaction matrices, spin vectors, seeded sampling and traces.
//!
//! Every sampler draws from a ChaCha8 stream keyed by `master_seed` with the
//! stream selected by `stream_id`, and consumes standard normals in
//! row-major order over the upper triangle (diagonal included). Replicate
//! `r` therefore never depends on which thread ran replicate `r - 1`.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Default cap on `kmax * n^3` for [`power_traces`].
pub const TRACE_FLOP_BUDGET: f64 = 1e11;

/// Identifies one reproducible random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        SeedSpec { master_seed, stream_id }
    }

    /// Replicate `replicate` of size index `size_index`: stream
    /// `size_index * 2^32 + replicate`.
    pub fn replicate(master_seed: u64, size_index: u64, replicate: u64) -> Self {
        debug_assert!(replicate < 1 << 32);
        SeedSpec::new(master_seed, (size_index << 32) | replicate)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Element of `{-1, +1}^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpinVector {
    signs: Vec<i8>,
}

impl SpinVector {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Precondition("spins must be exactly -1 or +1".into()));
        }
        Ok(SpinVector { signs })
    }

    pub fn all_ones(n: usize) -> Self {
        SpinVector { signs: vec![1; n] }
    }

    /// `+1, -1, +1, ...`
    pub fn alternating(n: usize) -> Self {
        SpinVector {
            signs: (0..n).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect(),
        }
    }

    /// Spin `i` is `-1` iff bit `i` of `bits` is set.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        SpinVector {
            signs: (0..n).map(|i| if (bits >> i) & 1 == 1 { -1 } else { 1 }).collect(),
        }
    }

    /// Uniform random spins.
    pub fn random(n: usize, seed: SeedSpec) -> Self {
        let mut rng = seed.rng();
        SpinVector {
            signs: (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn get(&self, i: usize) -> f64 {
        self.signs[i] as f64
    }

    /// `sum_i sigma_i`
    pub fn magnetization(&self) -> i64 {
        self.signs.iter().map(|&s| s as i64).sum()
    }
}

/// Dense symmetric `n x n` real matrix with an explicit diagonal.
///
/// Entries are kept in full row-major form so that rows are contiguous, but
/// every mutation writes both `(i, j)` and `(j, i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("matrix dimension must be at least 1".into()));
        }
        Ok(SymMatrix {
            n,
            data: vec![0.0; n * n],
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = SymMatrix::zeros(n)?;
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        Ok(m)
    }

    /// Builds from `f(i, j)` evaluated for `i <= j`.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut m = SymMatrix::zeros(n)?;
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        Ok(m)
    }

    /// Builds from the upper triangle listed row by row, diagonal included.
    pub fn from_upper(n: usize, upper: &[f64]) -> Result<Self> {
        let expected = n * (n + 1) / 2;
        if upper.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: upper.len(),
            });
        }
        let mut it = upper.iter();
        SymMatrix::from_upper_fn(n, |_, _| *it.next().unwrap())
    }

    /// Accepts a full row-major matrix; it must be exactly symmetric.
    pub fn from_dense(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        for i in 0..n {
            for j in 0..i {
                if data[i * n + j] != data[j * n + i] {
                    return Err(Error::Precondition("matrix is not symmetric".into()));
                }
            }
        }
        if n == 0 {
            return Err(Error::Precondition("matrix dimension must be at least 1".into()));
        }
        Ok(SymMatrix { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Full row-major storage.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Upper triangle row by row, diagonal included.
    pub fn upper(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n * (self.n + 1) / 2);
        for i in 0..self.n {
            out.extend_from_slice(&self.row(i)[i..]);
        }
        out
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn is_hollow(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i) == 0.0)
    }

    /// Copy with the diagonal set to zero.
    pub fn hollowed(&self) -> SymMatrix {
        let mut m = self.clone();
        for i in 0..self.n {
            m.data[i * self.n + i] = 0.0;
        }
        m
    }

    pub fn scaled(&self, c: f64) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// `diag(sigma) * self * diag(sigma)`.
    pub fn conjugate(&self, sigma: &SpinVector) -> Result<SymMatrix> {
        if sigma.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: sigma.len(),
            });
        }
        let s = sigma.signs();
        let mut m = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                m.data[i * self.n + j] *= (s[i] * s[j]) as f64;
            }
        }
        Ok(m)
    }

    /// `sum_{ij} A_ij^2`
    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// Plain-text dump: optional `#` comment lines, a line holding `n`, then
    /// `n` lines with the upper triangle of row `i` (entries `i..n`),
    /// whitespace separated, in shortest round-trip decimal form.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# symmetric matrix, upper triangle by rows");
        let _ = writeln!(s, "{}", self.n);
        for i in 0..self.n {
            let row: Vec<String> = self.row(i)[i..].iter().map(|v| format!("{v:?}")).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<SymMatrix> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let n: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("missing dimension header".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad dimension header: {e}")))?;
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("missing row {i}")))?;
            let before = upper.len();
            for tok in line.split_whitespace() {
                upper.push(tok.parse::<f64>().map_err(|e| Error::Parse(format!("row {i}: {e}")))?);
            }
            if upper.len() - before != n - i {
                return Err(Error::Parse(format!(
                    "row {i} has {} entries, expected {}",
                    upper.len() - before,
                    n - i
                )));
            }
        }
        if lines.next().is_some() {
            return Err(Error::Parse("trailing data after last row".into()));
        }
        SymMatrix::from_upper(n, &upper)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<SymMatrix> {
        SymMatrix::from_text(&std::fs::read_to_string(path)?)
    }
}

/// Row-major `n x n` product `a * b`.
pub(crate) fn dense_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        let ci = &mut c[i * n..(i + 1) * n];
        for l in 0..n {
            let ail = a[i * n + l];
            if ail == 0.0 {
                continue;
            }
            let bl = &b[l * n..(l + 1) * n];
            for (cij, &blj) in ci.iter_mut().zip(bl) {
                *cij += ail * blj;
            }
        }
    }
    c
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Symmetric matrix with i.i.d. standard normal upper triangle. With
/// `hollow` the diagonal is still drawn (keeping the stream aligned with the
/// non-hollow sampler) and then set to zero.
pub fn sample_gaussian_matrix(n: usize, seed: SeedSpec, hollow: bool) -> Result<SymMatrix> {
    let mut rng = seed.rng();
    SymMatrix::from_upper_fn(n, |i, j| {
        let z = standard_normal(&mut rng);
        if hollow && i == j {
            0.0
        } else {
            z
        }
    })
}

/// Planted matrix: `A_ij ~ N(2 beta sigma_i sigma_j / sqrt(n), 1)` for
/// `i < j`, standard normal diagonal.
///
/// Constructed as `A_ij = sigma_i sigma_j (Z_ij + 2 beta / sqrt(n))` from the
/// same normal stream as [`sample_gaussian_matrix`], so that the sample for
/// `sigma` is bit-identical to the all-ones sample conjugated by
/// `diag(sigma)`, and the all-ones sample at `beta = 0` is bit-identical to
/// the plain sampler.
pub fn sample_tilted_matrix(n: usize, sigma: &SpinVector, beta: f64, seed: SeedSpec) -> Result<SymMatrix> {
    if sigma.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: sigma.len(),
        });
    }
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::Precondition(format!("beta must be >= 0, got {beta}")));
    }
    let shift = 2.0 * beta / (n as f64).sqrt();
    let s = sigma.signs();
    let mut rng = seed.rng();
    SymMatrix::from_upper_fn(n, |i, j| {
        let z = standard_normal(&mut rng);
        if i == j {
            z
        } else {
            (s[i] * s[j]) as f64 * (z + shift)
        }
    })
}

/// `(Tr M, Tr M^2, ..., Tr M^kmax)` from dense matrix powers.
///
/// Powers are formed up to `ceil(kmax / 2)`; higher traces use
/// `Tr M^{a+b} = <M^a, M^b>_F`, valid because powers of a symmetric matrix
/// are symmetric.
pub fn power_traces(m: &SymMatrix, kmax: usize) -> Result<Vec<f64>> {
    power_traces_with_budget(m, kmax, TRACE_FLOP_BUDGET)
}

pub fn power_traces_with_budget(m: &SymMatrix, kmax: usize, budget: f64) -> Result<Vec<f64>> {
    if kmax < 1 {
        return Err(Error::Precondition("kmax must be at least 1".into()));
    }
    let n = m.n();
    let required = kmax as f64 * (n as f64).powi(3);
    if required > budget {
        return Err(Error::BudgetExceeded {
            what: "power traces",
            required,
            budget,
        });
    }
    let half = kmax.div_ceil(2);
    let mut powers: Vec<Vec<f64>> = vec![m.as_slice().to_vec()];
    for _ in 1..half {
        let next = dense_mul(powers.last().unwrap(), m.as_slice(), n);
        powers.push(next);
    }
    let trace = |p: &[f64]| (0..n).map(|i| p[i * n + i]).sum::<f64>();
    let inner = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(x, y)| x * y).sum::<f64>();
    Ok((1..=kmax)
        .map(|k| {
            if k <= half {
                trace(&powers[k - 1])
            } else {
                inner(&powers[half - 1], &powers[k - half - 1])
            }
        })
        .collect())
}
