//! Signed cycle statistics `C_{n,k}` and their Chebyshev linear spectral
//! statistic counterparts.
//!
//! `C_{n,k} = n^{-k/2} sum A_{i0 i1} A_{i1 i2} ... A_{i(k-1) i0}` over ordered
//! tuples of `k` distinct indices; `C_{n,1} = n^{-1/2} sum_i A_ii`.
//!
//! Two exact evaluators are provided. [`signed_cycle_dfs`] enumerates every
//! tuple depth-first with a visited mask and prefix products. The default
//! [`signed_cycle_bruteforce`] enumerates only the first `k - 2` indices and
//! sums the last two steps in closed form from the walk matrices `A^2`, `A^3`
//! and `A diag(A) A`, subtracting the walks that revisit an index. Both agree
//! to rounding; the second costs `O(n^{k-2} k^2 + n^3)` instead of `O(n^k)`.

use serde::{Deserialize, Serialize};

use crate::combinat::chebyshev_coeffs;
use crate::error::{Error, Result};
use crate::randmat::{dense_mul, power_traces, sample_gaussian_matrix, SeedSpec, SymMatrix};

/// Default operation budget for cycle enumeration.
pub const CYCLE_BUDGET: f64 = 1e9;

fn check_k(n: usize, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::Precondition(format!("cycle length must be >= 2, got {k}")));
    }
    if k > n {
        return Err(Error::Precondition(format!("cycle length {k} exceeds dimension {n}")));
    }
    Ok(())
}

fn check_budget(what: &'static str, required: f64, budget: f64) -> Result<()> {
    if required > budget {
        Err(Error::BudgetExceeded { what, required, budget })
    } else {
        Ok(())
    }
}

/// `n^{-1/2} sum_i A_ii`
pub fn signed_cycle_c1(a: &SymMatrix) -> f64 {
    a.trace() / (a.n() as f64).sqrt()
}

/// Plain depth-first enumeration of all ordered `k`-tuples of distinct
/// indices. Products are accumulated left to right along the cycle and the
/// tuples are visited in lexicographic order.
pub fn signed_cycle_dfs(a: &SymMatrix, k: usize, budget: f64) -> Result<f64> {
    let n = a.n();
    check_k(n, k)?;
    check_budget("cycle enumeration", (n as f64).powi(k as i32), budget)?;

    // One running total, so the summation order is the flat lexicographic one.
    #[allow(clippy::too_many_arguments)]
    fn descend(
        a: &SymMatrix,
        k: usize,
        depth: usize,
        start: usize,
        last: usize,
        prefix: f64,
        visited: &mut [bool],
        total: &mut f64,
    ) {
        if depth == k {
            *total += prefix * a.get(last, start);
            return;
        }
        let row = a.row(last);
        for next in 0..a.n() {
            if visited[next] {
                continue;
            }
            visited[next] = true;
            descend(a, k, depth + 1, start, next, prefix * row[next], visited, total);
            visited[next] = false;
        }
    }

    let mut visited = vec![false; n];
    let mut total = 0.0;
    for start in 0..n {
        visited[start] = true;
        descend(a, k, 1, start, start, 1.0, &mut visited, &mut total);
        visited[start] = false;
    }
    Ok(total / (n as f64).powf(k as f64 / 2.0))
}

/// Walk matrices of one fixed matrix, reused across cycle lengths.
pub struct CycleCounter<'a> {
    a: &'a SymMatrix,
    walk2: Vec<f64>,
    walk3: Vec<f64>,
    // A diag(A) A; zero for hollow input
    loop_walk: Option<Vec<f64>>,
}

impl<'a> CycleCounter<'a> {
    pub fn new(a: &'a SymMatrix) -> Self {
        let n = a.n();
        let walk2 = dense_mul(a.as_slice(), a.as_slice(), n);
        let walk3 = dense_mul(&walk2, a.as_slice(), n);
        let loop_walk = if a.is_hollow() {
            None
        } else {
            let mut ad = a.as_slice().to_vec();
            for i in 0..n {
                let d = a.get(i, i);
                for v in &mut ad[i * n..(i + 1) * n] {
                    *v *= d;
                }
            }
            // (diag(A) A) is row-scaled A; A * (diag(A) A)
            Some(dense_mul(a.as_slice(), &ad, n))
        };
        CycleCounter {
            a,
            walk2,
            walk3,
            loop_walk,
        }
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    /// Cost estimate used for the budget gate.
    pub fn cost(n: usize, k: usize) -> f64 {
        let prefix = (k.saturating_sub(2)) as f64;
        (n as f64).powi(k as i32 - 2) * prefix.max(1.0).powi(2) + 3.0 * (n as f64).powi(3)
    }

    /// Unnormalised `sum` over distinct ordered `k`-tuples.
    fn raw_cycle_sum(&self, k: usize) -> f64 {
        let a = self.a;
        let n = a.n();
        if k == 2 {
            let mut s = 0.0;
            for i in 0..n {
                for (j, &v) in a.row(i).iter().enumerate() {
                    if j != i {
                        s += v * v;
                    }
                }
            }
            return s;
        }
        let mut prefix = Vec::with_capacity(k - 2);
        let mut visited = vec![false; n];
        let mut total = 0.0;
        for start in 0..n {
            prefix.push(start);
            visited[start] = true;
            total += self.descend(k - 2, 1.0, &mut prefix, &mut visited);
            visited[start] = false;
            prefix.pop();
        }
        total
    }

    fn descend(&self, len: usize, product: f64, prefix: &mut Vec<usize>, visited: &mut [bool]) -> f64 {
        let last = *prefix.last().unwrap();
        if prefix.len() == len {
            return product * self.closure(prefix, last);
        }
        let row = self.a.row(last);
        let mut total = 0.0;
        for next in 0..self.a.n() {
            if visited[next] {
                continue;
            }
            let p = product * row[next];
            if p == 0.0 {
                continue;
            }
            visited[next] = true;
            prefix.push(next);
            total += self.descend(len, p, prefix, visited);
            prefix.pop();
            visited[next] = false;
        }
        total
    }

    /// `sum_{x != y, both outside V} A[last][x] A[x][y] A[y][start]`.
    #[inline]
    fn closure(&self, visited: &[usize], last: usize) -> f64 {
        let a = self.a;
        let n = a.n();
        let start = visited[0];
        let w2 = |i: usize, j: usize| self.walk2[i * n + j];
        let row_last = a.row(last);

        let mut s = self.walk3[last * n + start];
        for &u in visited {
            s -= row_last[u] * w2(u, start);
        }
        for &v in visited {
            let a_v_start = a.get(v, start);
            if a_v_start == 0.0 {
                continue;
            }
            let mut through = w2(last, v);
            for &u in visited {
                through -= row_last[u] * a.get(u, v);
            }
            s -= a_v_start * through;
        }
        if let Some(g) = &self.loop_walk {
            let mut back = g[last * n + start];
            for &u in visited {
                back -= row_last[u] * a.get(u, u) * a.get(u, start);
            }
            s -= back;
        }
        s
    }

    /// `C_{n,k}` for `2 <= k <= n`.
    pub fn cycle(&self, k: usize, budget: f64) -> Result<f64> {
        let n = self.n();
        check_k(n, k)?;
        check_budget("cycle enumeration", CycleCounter::cost(n, k), budget)?;
        Ok(self.raw_cycle_sum(k) / (n as f64).powf(k as f64 / 2.0))
    }
}

/// `C_{n,k}` for `2 <= k <= n`, see the module docs for the method.
pub fn signed_cycle_bruteforce(a: &SymMatrix, k: usize) -> Result<f64> {
    signed_cycle_bruteforce_with_budget(a, k, CYCLE_BUDGET)
}

pub fn signed_cycle_bruteforce_with_budget(a: &SymMatrix, k: usize, budget: f64) -> Result<f64> {
    check_k(a.n(), k)?;
    check_budget("cycle enumeration", CycleCounter::cost(a.n(), k), budget)?;
    CycleCounter::new(a).cycle(k, budget)
}

/// `C_{n,1..kmax}` of one matrix, optionally centred.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleSeries {
    pub n: usize,
    /// `values[k - 1]` holds `C_{n,k}`.
    pub values: Vec<f64>,
    /// `centered[k - 1]` is true when `(n - 1) [k = 2]` was subtracted.
    pub centered: Vec<bool>,
}

impl CycleSeries {
    pub fn compute(a: &SymMatrix, kmax: usize, center: bool, budget: f64) -> Result<Self> {
        let n = a.n();
        if kmax < 1 || kmax > n {
            return Err(Error::Precondition(format!("kmax must lie in 1..={n}, got {kmax}")));
        }
        let mut values = vec![signed_cycle_c1(a)];
        let mut centered = vec![false];
        if kmax >= 2 {
            check_budget("cycle enumeration", CycleCounter::cost(n, kmax), budget)?;
            let counter = CycleCounter::new(a);
            for k in 2..=kmax {
                let mut c = counter.cycle(k, budget)?;
                let shift = center && k == 2;
                if shift {
                    c -= (n - 1) as f64;
                }
                values.push(c);
                centered.push(shift);
            }
        }
        Ok(CycleSeries { n, values, centered })
    }

    pub fn kmax(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values[k - 1]
    }
}

/// Linear spectral statistic of `P_k` with its estimated expectation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LssEstimate {
    pub k: usize,
    /// `Tr P_k(A~ / sqrt(n))`
    pub raw_trace: f64,
    pub centering: f64,
    pub centered_value: f64,
}

impl LssEstimate {
    pub fn new(k: usize, raw_trace: f64, centering: f64) -> Self {
        let centering = if k % 2 == 1 { 0.0 } else { centering };
        LssEstimate {
            k,
            raw_trace,
            centering,
            centered_value: raw_trace - centering,
        }
    }
}

/// `Tr P_k(M)` given `traces[j - 1] = Tr M^j` for `j >= 1` and dimension `n`.
pub fn lss_from_traces(traces: &[f64], n: usize, k: usize) -> Result<f64> {
    if traces.len() < k {
        return Err(Error::Precondition(format!(
            "need {k} power traces, got {}",
            traces.len()
        )));
    }
    let p = chebyshev_coeffs(k as u32)?;
    let mut s = p.coeff(0) as f64 * n as f64;
    for j in 1..=k {
        let c = p.coeff(j);
        if c != 0 {
            s += c as f64 * traces[j - 1];
        }
    }
    Ok(s)
}

fn require_hollow(a: &SymMatrix) -> Result<()> {
    if a.is_hollow() {
        Ok(())
    } else {
        Err(Error::NotHollow)
    }
}

/// `Tr P_k(A~ / sqrt(n))` for a hollow matrix.
pub fn chebyshev_lss(a_hollow: &SymMatrix, k: usize) -> Result<f64> {
    require_hollow(a_hollow)?;
    if k < 1 {
        return Err(Error::Precondition("k must be >= 1".into()));
    }
    let n = a_hollow.n();
    let scaled = a_hollow.scaled(1.0 / (n as f64).sqrt());
    let traces = power_traces(&scaled, k)?;
    lss_from_traces(&traces, n, k)
}

/// Monte Carlo estimate of `E[Tr P_k(A~ / sqrt(n))]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LssCentering {
    pub k: usize,
    pub mean: f64,
    pub std_error: f64,
    pub reps: usize,
}

/// Odd `k` is exactly zero by sign symmetry of the ensemble. Even `k` is
/// the mean over `reps` fresh hollow matrices drawn from streams
/// `seed.stream_id + r`.
pub fn lss_centering(n: usize, k: usize, reps: usize, seed: SeedSpec) -> Result<LssCentering> {
    if k % 2 == 1 {
        return Ok(LssCentering {
            k,
            mean: 0.0,
            std_error: 0.0,
            reps: 0,
        });
    }
    if reps < 1 {
        return Err(Error::Precondition("even-k centering needs reps >= 1".into()));
    }
    let values = (0..reps as u64)
        .map(|r| {
            let s = SeedSpec::new(seed.master_seed, seed.stream_id.wrapping_add(r));
            chebyshev_lss(&sample_gaussian_matrix(n, s, true)?, k)
        })
        .collect::<Result<Vec<_>>>()?;
    let mean = values.iter().sum::<f64>() / reps as f64;
    let std_error = if reps > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        (var / reps as f64).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(LssCentering {
        k,
        mean,
        std_error,
        reps,
    })
}

/// `C_{n,k} - (Tr P_k(A~ / sqrt(n)) - centering)` for `3 <= k <= n`.
pub fn approx_residual(a_hollow: &SymMatrix, k: usize, centering: f64) -> Result<f64> {
    require_hollow(a_hollow)?;
    if k < 3 {
        return Err(Error::Precondition(format!(
            "the spectral approximation is defined for k >= 3, got {k}"
        )));
    }
    let c = signed_cycle_bruteforce(a_hollow, k)?;
    let lss = LssEstimate::new(k, chebyshev_lss(a_hollow, k)?, centering);
    Ok(c - lss.centered_value)
}
