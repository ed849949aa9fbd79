//! Thermodynamics of the SK Hamiltonian with Curie-Weiss coupling.
//!
//! The interaction matrix is `M_ij = A_ij / sqrt(n) + J / n` off the diagonal
//! and `M_ii = A_ii / sqrt(n) + J' / n` on it; `H(sigma) = <sigma, M sigma>`
//! and `Z_n(beta)` is the average of `exp(beta H)` over the hypercube.

use serde::{Deserialize, Serialize};

use crate::cycles::{signed_cycle_c1, CycleSeries, CYCLE_BUDGET};
use crate::error::{Error, Result};
use crate::randmat::{SpinVector, SymMatrix};

/// Default largest `n` for exhaustive enumeration of the hypercube.
pub const ENUMERATION_MAX_N: usize = 28;

/// `(beta, J, J', n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub beta: f64,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "Jprime")]
    pub j_prime: f64,
    pub n: usize,
}

impl ModelParams {
    pub fn new(beta: f64, j: f64, j_prime: f64, n: usize) -> Result<Self> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::Precondition(format!("beta must be finite and >= 0, got {beta}")));
        }
        if !j.is_finite() || !j_prime.is_finite() {
            return Err(Error::Precondition("J and J' must be finite".into()));
        }
        if n < 1 {
            return Err(Error::Precondition("n must be >= 1".into()));
        }
        Ok(ModelParams { beta, j, j_prime, n })
    }

    pub fn with_n(self, n: usize) -> Self {
        ModelParams { n, ..self }
    }

    pub fn beta_j(&self) -> f64 {
        self.beta * self.j
    }

    /// `beta < 1/2` and `beta J < 1/2`.
    pub fn is_paramagnetic(&self) -> bool {
        self.beta < 0.5 && self.beta_j() < 0.5
    }

    pub fn require_paramagnetic(&self) -> Result<()> {
        if self.is_paramagnetic() {
            Ok(())
        } else {
            Err(Error::RegimeViolation {
                beta: self.beta,
                beta_j: self.beta_j(),
            })
        }
    }

    fn check_matrix(&self, a: &SymMatrix) -> Result<()> {
        if a.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: a.n(),
            });
        }
        Ok(())
    }
}

/// Interaction matrix `M` in full row-major form.
pub fn interaction_matrix(a: &SymMatrix, params: &ModelParams) -> Result<SymMatrix> {
    params.check_matrix(a)?;
    let n = a.n() as f64;
    let s = n.sqrt();
    SymMatrix::from_upper_fn(a.n(), |i, j| {
        let shift = if i == j { params.j_prime } else { params.j };
        a.get(i, j) / s + shift / n
    })
}

/// `<sigma, M sigma>`
pub fn hamiltonian(a: &SymMatrix, params: &ModelParams, sigma: &SpinVector) -> Result<f64> {
    let m = interaction_matrix(a, params)?;
    if sigma.len() != a.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: sigma.len(),
        });
    }
    let s = sigma.signs();
    let mut h = 0.0;
    for i in 0..a.n() {
        let row = m.row(i);
        let mut acc = 0.0;
        for (j, &mij) in row.iter().enumerate() {
            acc += mij * s[j] as f64;
        }
        h += s[i] as f64 * acc;
    }
    Ok(h)
}

/// Running log-sum-exp with a rescaled accumulator.
#[derive(Clone, Copy, Debug)]
pub struct OnlineLogSumExp {
    max: f64,
    acc: f64,
}

impl OnlineLogSumExp {
    pub fn new(first: f64) -> Self {
        OnlineLogSumExp { max: first, acc: 1.0 }
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        if x > self.max {
            self.acc = self.acc * (self.max - x).exp() + 1.0;
            self.max = x;
        } else {
            self.acc += (x - self.max).exp();
        }
    }

    pub fn value(&self) -> f64 {
        self.max + self.acc.ln()
    }
}

/// `log Z_n(beta)` by reflected Gray-code enumeration.
pub fn exact_log_partition(a: &SymMatrix, params: &ModelParams) -> Result<f64> {
    exact_log_partition_with_bound(a, params, ENUMERATION_MAX_N)
}

/// Same as [`exact_log_partition`] with an explicit size bound.
///
/// `H` is even under `sigma -> -sigma`, so the last spin is pinned to `+1`
/// and only `2^{n-1}` states are visited. Each Gray-code step flips one spin
/// and updates the off-diagonal local fields `h_j = sum_{l != j} M_jl sigma_l`
/// in `O(n)`.
pub fn exact_log_partition_with_bound(a: &SymMatrix, params: &ModelParams, max_n: usize) -> Result<f64> {
    params.check_matrix(a)?;
    let n = a.n();
    if n > max_n || n > 62 {
        return Err(Error::BoundExceeded {
            what: "enumeration size n",
            value: n as u64,
            bound: max_n.min(62) as u64,
        });
    }
    let beta = params.beta;
    if beta == 0.0 {
        return Ok(0.0);
    }
    let m = interaction_matrix(a, params)?;
    let diag_sum: f64 = m.diagonal().iter().sum();
    let off = m.hollowed();

    let mut spins = vec![1.0f64; n];
    let mut field: Vec<f64> = (0..n).map(|i| off.row(i).iter().sum()).collect();
    let mut energy = diag_sum + field.iter().sum::<f64>();
    if !energy.is_finite() {
        return Err(Error::NonFinite("Hamiltonian"));
    }

    let mut lse = OnlineLogSumExp::new(beta * energy);
    let states: u64 = 1 << (n - 1);
    for t in 1..states {
        let i = t.trailing_zeros() as usize;
        let old = spins[i];
        energy -= 4.0 * old * field[i];
        spins[i] = -old;
        let c = 2.0 * old;
        for (f, &mij) in field.iter_mut().zip(off.row(i)) {
            *f -= c * mij;
        }
        lse.push(beta * energy);
    }
    let log_z = lse.value() - (n as f64 - 1.0) * std::f64::consts::LN_2;
    if !log_z.is_finite() {
        return Err(Error::NonFinite("log partition function"));
    }
    Ok(log_z)
}

/// `F_n(beta) = log Z_n(beta) / n`
pub fn free_energy(a: &SymMatrix, params: &ModelParams) -> Result<f64> {
    Ok(exact_log_partition(a, params)? / a.n() as f64)
}

/// `log tau_n`, with `tau_n = E exp(beta J (sum sigma)^2 / n)` over uniform
/// spins, summed over the magnetisation in log space.
pub fn log_curie_weiss_tau(n: usize, beta_j: f64) -> f64 {
    if beta_j == 0.0 || n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let mut log_binom = 0.0f64;
    let mut lse: Option<OnlineLogSumExp> = None;
    for up in 0..=n {
        if up > 0 {
            log_binom += ((n - up + 1) as f64).ln() - (up as f64).ln();
        }
        let s = 2.0 * up as f64 - nf;
        let x = log_binom + beta_j * s * s / nf;
        match lse.as_mut() {
            Some(l) => l.push(x),
            None => lse = Some(OnlineLogSumExp::new(x)),
        }
    }
    lse.unwrap().value() - nf * std::f64::consts::LN_2
}

/// Curie-Weiss normaliser `tau_n`.
pub fn curie_weiss_tau(n: usize, beta_j: f64) -> f64 {
    if beta_j == 0.0 {
        return 1.0;
    }
    log_curie_weiss_tau(n, beta_j).exp()
}

/// `log(dQ_n / dP_n)` in closed form from `log Z_n`:
/// `-log tau_n - (n-1) beta^2 + beta J - beta n^{-1/2} sum A_ii - beta J' + log Z_n`.
pub fn rn_log_ratio_closed_form(a: &SymMatrix, params: &ModelParams) -> Result<f64> {
    let log_z = exact_log_partition(a, params)?;
    Ok(rn_log_ratio_from_log_z(a, params, log_z))
}

pub(crate) fn rn_log_ratio_from_log_z(a: &SymMatrix, params: &ModelParams, log_z: f64) -> f64 {
    let b = params.beta;
    if b == 0.0 {
        return 0.0;
    }
    let n = a.n() as f64;
    -log_curie_weiss_tau(a.n(), params.beta_j()) - (n - 1.0) * b * b + b * params.j
        - b * signed_cycle_c1(a)
        - b * params.j_prime
        + log_z
}

/// Limit-law parameters of `n (F_n - F)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CltTargets {
    /// `F(beta) = beta^2`
    pub f_limit: f64,
    /// Limiting mean.
    pub f1: f64,
    /// Limiting variance.
    pub alpha1: f64,
}

/// `F = beta^2`, `alpha1 = -beta^2 - log(1 - 4 beta^2) / 2`,
/// `f1 = -log(1 - 2 beta J) / 2 + beta (J' - J) + log(1 - 4 beta^2) / 4`.
pub fn clt_targets(params: &ModelParams) -> Result<CltTargets> {
    params.require_paramagnetic()?;
    let b = params.beta;
    let b2 = b * b;
    let l4 = (-4.0 * b2).ln_1p();
    Ok(CltTargets {
        f_limit: b2,
        f1: -0.5 * (-2.0 * params.beta_j()).ln_1p() + b * (params.j_prime - params.j) + 0.25 * l4,
        alpha1: -b2 - 0.5 * l4,
    })
}

/// Residual of `log Z_n` after removing the signed-cycle expansion up to
/// length `m`, given precomputed `log Z_n` and cycles (uncentred or with the
/// `k = 2` centring already applied; both are handled).
pub fn decomposition_residual(log_z: f64, cycles: &CycleSeries, params: &ModelParams, m: usize) -> Result<f64> {
    if m > cycles.kmax() {
        return Err(Error::Precondition(format!(
            "need cycles up to {m}, have {}",
            cycles.kmax()
        )));
    }
    let b = params.beta;
    let n = params.n as f64;
    let tb = 2.0 * b;
    let mut r = log_z + 0.5 * (-2.0 * params.beta_j()).ln_1p() - (n - 1.0) * b * b + b * (params.j - params.j_prime)
        - b * cycles.get(1);
    for k in 2..=m {
        let mut c = cycles.get(k);
        if k == 2 && !cycles.centered[1] {
            c -= n - 1.0;
        }
        let mu = tb.powi(k as i32);
        r -= (2.0 * mu * c - mu * mu) / (4.0 * k as f64);
    }
    Ok(r)
}

/// Residual of the signed-cycle decomposition of `log Z_n(beta)` truncated
/// at cycle length `m`, using exact enumeration and exact cycle counts.
pub fn decomposition_prediction(a: &SymMatrix, params: &ModelParams, m: usize) -> Result<f64> {
    params.check_matrix(a)?;
    if params.beta_j() >= 0.5 {
        return Err(Error::RegimeViolation {
            beta: params.beta,
            beta_j: params.beta_j(),
        });
    }
    if m < 1 || m > a.n() {
        return Err(Error::Precondition(format!("m must lie in 1..={}, got {m}", a.n())));
    }
    let log_z = exact_log_partition(a, params)?;
    let cycles = CycleSeries::compute(a, m, true, CYCLE_BUDGET)?;
    decomposition_residual(log_z, &cycles, params, m)
}

/// `exp{sum_{k>=2} (4 beta^2)^k / (2k)}` summed term by term.
pub fn second_moment_series(beta: f64) -> Result<f64> {
    require_high_temperature(beta)?;
    let x = 4.0 * beta * beta;
    let mut sum = 0.0;
    let mut pow = x;
    for k in 2..100_000 {
        pow *= x;
        let term = pow / (2.0 * k as f64);
        sum += term;
        if term < 1e-18 * sum.max(1e-300) || pow == 0.0 {
            break;
        }
    }
    Ok(sum.exp())
}

fn require_high_temperature(beta: f64) -> Result<()> {
    if !(0.0..0.5).contains(&beta) {
        return Err(Error::RegimeViolation { beta, beta_j: f64::NAN });
    }
    Ok(())
}

/// Limiting second moment of the likelihood ratio,
/// `exp(-2 beta^2) / sqrt(1 - 4 beta^2)`, checked against its series form.
pub fn second_moment_target(beta: f64) -> Result<f64> {
    require_high_temperature(beta)?;
    let closed = (-2.0 * beta * beta).exp() / (1.0 - 4.0 * beta * beta).sqrt();
    let series = second_moment_series(beta)?;
    if (closed - series).abs() > 1e-12 * closed {
        return Err(Error::Precondition(format!(
            "second moment series {series} disagrees with closed form {closed}"
        )));
    }
    Ok(closed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randmat::{sample_gaussian_matrix, SeedSpec};

    fn naive_log_partition(a: &SymMatrix, p: &ModelParams) -> f64 {
        let n = a.n();
        let xs: Vec<f64> = (0..1u64 << n)
            .map(|b| p.beta * hamiltonian(a, p, &SpinVector::from_bits(n, b)).unwrap())
            .collect();
        let mx = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        mx + xs.iter().map(|x| (x - mx).exp()).sum::<f64>().ln() - n as f64 * std::f64::consts::LN_2
    }

    #[test]
    fn hamiltonian_examples() {
        let a = SymMatrix::from_upper(1, &[0.7]).unwrap();
        let p = ModelParams::new(0.3, 0.5, 0.25, 1).unwrap();
        let h = hamiltonian(&a, &p, &SpinVector::new(vec![-1]).unwrap()).unwrap();
        assert!((h - (0.7 + 0.25)).abs() < 1e-15);

        let w = 1.3;
        let a = SymMatrix::from_upper(2, &[0.0, w, 0.0]).unwrap();
        let p = ModelParams::new(0.2, 0.0, 0.0, 2).unwrap();
        let h = hamiltonian(&a, &p, &SpinVector::all_ones(2)).unwrap();
        assert!((h - 2.0 * w / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn flip_difference_matches_local_field() {
        let n = 8;
        let a = sample_gaussian_matrix(n, SeedSpec::new(5, 5), false).unwrap();
        let p = ModelParams::new(0.3, 0.7, 0.4, n).unwrap();
        let m = interaction_matrix(&a, &p).unwrap();
        let sigma = SpinVector::random(n, SeedSpec::new(6, 6));
        let h0 = hamiltonian(&a, &p, &sigma).unwrap();
        for i in 0..n {
            let mut s = sigma.signs().to_vec();
            s[i] = -s[i];
            let h1 = hamiltonian(&a, &p, &SpinVector::new(s).unwrap()).unwrap();
            let field: f64 = (0..n).filter(|&j| j != i).map(|j| m.get(i, j) * sigma.get(j)).sum();
            assert!((h1 - h0 + 4.0 * sigma.get(i) * field).abs() < 1e-12);
        }
    }

    #[test]
    fn expanded_partition_form_agrees() {
        // Alternative bookkeeping: 2 beta/sqrt(n) sum_{i<j} A sigma sigma
        // + 2 beta J / n sum_{i<j} sigma sigma + beta / sqrt(n) sum (A_ii + J'/sqrt(n)).
        let n = 7;
        let a = sample_gaussian_matrix(n, SeedSpec::new(12, 0), false).unwrap();
        let p = ModelParams::new(0.35, 0.6, 0.3, n).unwrap();
        let nf = n as f64;
        let xs: Vec<f64> = (0..1u64 << n)
            .map(|bits| {
                let s = SpinVector::from_bits(n, bits);
                let mut e = 0.0;
                for i in 0..n {
                    e += p.beta / nf.sqrt() * (a.get(i, i) + p.j_prime / nf.sqrt());
                    for j in i + 1..n {
                        e += 2.0 * p.beta / nf.sqrt() * a.get(i, j) * s.get(i) * s.get(j);
                        e += 2.0 * p.beta * p.j / nf * s.get(i) * s.get(j);
                    }
                }
                e
            })
            .collect();
        let mx = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let expanded = mx + xs.iter().map(|x| (x - mx).exp()).sum::<f64>().ln() - nf * std::f64::consts::LN_2;
        let direct = exact_log_partition(&a, &p).unwrap();
        assert!((expanded - direct).abs() < 1e-12);
    }

    #[test]
    fn log_partition_examples() {
        let a = sample_gaussian_matrix(6, SeedSpec::new(0, 1), false).unwrap();
        assert_eq!(
            exact_log_partition(&a, &ModelParams::new(0.0, 1.0, 1.0, 6).unwrap()).unwrap(),
            0.0
        );

        let w = 0.8;
        let beta = 0.3;
        let a = SymMatrix::from_upper(2, &[0.0, w, 0.0]).unwrap();
        let p = ModelParams::new(beta, 0.0, 0.0, 2).unwrap();
        let expected = (2.0 * beta * w / 2f64.sqrt()).cosh().ln();
        assert!((exact_log_partition(&a, &p).unwrap() - expected).abs() < 1e-15);

        let a = SymMatrix::from_upper(1, &[0.4]).unwrap();
        let p = ModelParams::new(0.5, 0.0, 0.2, 1).unwrap();
        assert!((exact_log_partition(&a, &p).unwrap() - 0.5 * 0.6).abs() < 1e-15);
    }

    #[test]
    fn gray_code_matches_naive() {
        for n in 1..=12 {
            for r in 0..2 {
                let a = sample_gaussian_matrix(n, SeedSpec::new(n as u64, r), r == 0).unwrap();
                let p = ModelParams::new(0.37, 0.8, 0.3, n).unwrap();
                let g = exact_log_partition(&a, &p).unwrap();
                let nv = naive_log_partition(&a, &p);
                assert!((g - nv).abs() <= 1e-10 * nv.abs().max(1.0), "n = {n}: {g} vs {nv}");
            }
        }
    }

    #[test]
    fn log_partition_rejects_large_n() {
        let a = SymMatrix::identity(29).unwrap();
        let p = ModelParams::new(0.1, 0.0, 0.0, 29).unwrap();
        assert!(matches!(exact_log_partition(&a, &p), Err(Error::BoundExceeded { .. })));
        let p = ModelParams::new(0.1, 0.0, 0.0, 28).unwrap();
        assert!(matches!(
            exact_log_partition(&a, &p),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn free_energy_scaling() {
        let a = sample_gaussian_matrix(10, SeedSpec::new(4, 0), false).unwrap();
        let p = ModelParams::new(0.25, 1.0, 0.0, 10).unwrap();
        let lz = exact_log_partition(&a, &p).unwrap();
        let f = free_energy(&a, &p).unwrap();
        assert!((10.0 * f - lz).abs() <= 1e-14 * lz.abs());
    }

    #[test]
    fn tau_examples() {
        assert_eq!(curie_weiss_tau(50, 0.0), 1.0);
        let t2 = curie_weiss_tau(2, 0.25);
        assert!((t2 - (0.5 + 0.5 * 0.5f64.exp())).abs() < 1e-14);
        assert!((t2 - 1.32436).abs() < 1e-5);
        let big = curie_weiss_tau(10_000, 0.25);
        assert!((big - 1.0 / 0.5f64.sqrt()).abs() < 1e-2);
    }

    #[test]
    fn tau_matches_enumeration() {
        let n = 10;
        let bj = 0.3;
        let direct: f64 = (0..1u64 << n)
            .map(|b| {
                let m = SpinVector::from_bits(n, b).magnetization() as f64;
                (bj * m * m / n as f64).exp()
            })
            .sum::<f64>()
            / (1u64 << n) as f64;
        assert!((curie_weiss_tau(n, bj) - direct).abs() < 1e-13 * direct);
    }

    #[test]
    fn clt_target_examples() {
        let t = clt_targets(&ModelParams::new(0.0, 1.0, 0.0, 10).unwrap()).unwrap();
        assert_eq!((t.f_limit, t.f1, t.alpha1), (0.0, 0.0, 0.0));
        let t = clt_targets(&ModelParams::new(0.25, 1.0, 0.0, 10).unwrap()).unwrap();
        assert!((t.f1 - 0.0246531).abs() < 5e-7, "{}", t.f1);
        assert!((t.alpha1 - 0.0813410).abs() < 5e-7, "{}", t.alpha1);
        let t = clt_targets(&ModelParams::new(0.2, 0.7, 0.7, 10).unwrap()).unwrap();
        let expected = -0.5 * (1.0f64 - 0.28).ln() + 0.25 * (1.0f64 - 0.16).ln();
        assert!((t.f1 - expected).abs() < 1e-15);
        assert!(matches!(
            clt_targets(&ModelParams::new(0.6, 0.0, 0.0, 10).unwrap()),
            Err(Error::RegimeViolation { .. })
        ));
        assert!(matches!(
            clt_targets(&ModelParams::new(0.3, 2.0, 0.0, 10).unwrap()),
            Err(Error::RegimeViolation { .. })
        ));
    }

    #[test]
    fn alpha1_positive_inside_regime() {
        for i in 1..50 {
            let b = i as f64 / 100.0;
            let t = clt_targets(&ModelParams::new(b, 0.0, 0.0, 5).unwrap()).unwrap();
            assert!(t.alpha1 > 0.0);
        }
    }

    #[test]
    fn second_moment_examples() {
        assert_eq!(second_moment_target(0.0).unwrap(), 1.0);
        let v = second_moment_target(0.25).unwrap();
        assert!((v - (-0.125f64).exp() / 0.75f64.sqrt()).abs() < 1e-15);
        assert!((v - 1.019020).abs() < 1e-6);
        for b in [0.1f64, 0.3, 0.45] {
            let closed = (-2.0 * b * b).exp() / (1.0 - 4.0 * b * b).sqrt();
            assert!((second_moment_series(b).unwrap() - closed).abs() < 1e-10);
        }
        assert!(second_moment_target(0.5).is_err());
    }

    #[test]
    fn decomposition_vanishes_at_zero_beta() {
        let a = sample_gaussian_matrix(8, SeedSpec::new(1, 0), false).unwrap();
        let p = ModelParams::new(0.0, 0.5, 0.2, 8).unwrap();
        assert_eq!(decomposition_prediction(&a, &p, 4).unwrap(), 0.0);
    }

    #[test]
    fn rn_ratio_zero_beta() {
        let a = sample_gaussian_matrix(6, SeedSpec::new(1, 0), false).unwrap();
        let p = ModelParams::new(0.0, 0.5, 0.2, 6).unwrap();
        assert_eq!(rn_log_ratio_closed_form(&a, &p).unwrap(), 0.0);
    }

    #[test]
    fn online_lse_matches_two_pass() {
        let xs = [3.0, -1.0, 10.0, 9.5, -200.0, 10.0];
        let mut l = OnlineLogSumExp::new(xs[0]);
        for &x in &xs[1..] {
            l.push(x);
        }
        let mx = 10.0;
        let two_pass = mx + xs.iter().map(|x: &f64| (x - mx).exp()).sum::<f64>().ln();
        assert!((l.value() - two_pass).abs() < 1e-14);
    }
}
