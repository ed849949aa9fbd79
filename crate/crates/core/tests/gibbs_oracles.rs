use skcw::cycles::CycleSeries;
use skcw::gibbs::*;
use skcw::randmat::{sample_gaussian_matrix, SeedSpec, SpinVector, SymMatrix};

/// `log( (1/tau_n) 2^{-n} sum_sigma exp{ sum_{i<j} (2 beta s_i s_j A_ij / sqrt n - 2 beta^2 / n)
/// + beta J (sum s)^2 / n } )` by direct enumeration of the planted mixture.
fn mixture_log_ratio(a: &SymMatrix, p: &ModelParams) -> f64 {
    let n = a.n();
    let nf = n as f64;
    let mut terms = Vec::with_capacity(1 << n);
    for bits in 0..(1u64 << n) {
        let s = SpinVector::from_bits(n, bits);
        let mut e = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                e += 2.0 * p.beta * s.get(i) * s.get(j) * a.get(i, j) / nf.sqrt() - 2.0 * p.beta * p.beta / nf;
            }
        }
        let m = s.magnetization() as f64;
        e += p.beta * p.j * m * m / nf;
        terms.push(e);
    }
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    max + sum.ln() - nf * std::f64::consts::LN_2 - log_curie_weiss_tau(n, p.beta_j())
}

/// Exact `E_P[Y_n^2]` for `Y_n = dQ_n / dP_n`, summing over the four classes
/// of `(sigma_i, sigma'_i)`.
fn exact_second_moment(n: usize, beta: f64, j: f64) -> f64 {
    let nf = n as f64;
    let ln_fact: Vec<f64> = (0..=n)
        .scan(0.0, |acc, k| {
            if k > 0 {
                *acc += (k as f64).ln();
            }
            Some(*acc)
        })
        .collect();
    let mut terms = Vec::new();
    for a in 0..=n {
        for b in 0..=n - a {
            for c in 0..=n - a - b {
                let d = n - a - b - c;
                let (a_, b_, c_, d_) = (a as f64, b as f64, c as f64, d as f64);
                let m1 = a_ + b_ - c_ - d_;
                let m2 = a_ - b_ + c_ - d_;
                let q = a_ - b_ - c_ + d_;
                let log_multinomial = ln_fact[n] - ln_fact[a] - ln_fact[b] - ln_fact[c] - ln_fact[d];
                terms.push(log_multinomial + 2.0 * beta * beta * q * q / nf + beta * j * (m1 * m1 + m2 * m2) / nf);
            }
        }
    }
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln();
    (lse - nf * 4f64.ln() - 2.0 * beta * beta - 2.0 * log_curie_weiss_tau(n, beta * j)).exp()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn rn_ratio_matches_mixture_enumeration() {
    let mut checked = 0;
    for inst in 0..20u64 {
        let n = 2 + (inst as usize % 11);
        let a = sample_gaussian_matrix(n, SeedSpec::new(11, inst), false).unwrap();
        let p = ModelParams::new(0.1 + 0.015 * inst as f64, 0.3 + 0.05 * (inst % 4) as f64, -0.4, n).unwrap();
        let closed = rn_log_ratio_closed_form(&a, &p).unwrap();
        let oracle = mixture_log_ratio(&a, &p);
        assert!((closed - oracle).abs() <= 1e-9, "n = {n}: {closed} vs {oracle}");
        checked += 1;
    }
    assert_eq!(checked, 20);
}

#[test]
fn rn_ratio_vanishes_at_zero_beta() {
    let a = sample_gaussian_matrix(9, SeedSpec::new(1, 1), false).unwrap();
    let p = ModelParams::new(0.0, 0.7, 0.3, 9).unwrap();
    assert_eq!(rn_log_ratio_closed_form(&a, &p).unwrap(), 0.0);
}

#[test]
fn log_partition_is_convex_in_beta() {
    for inst in 0..10u64 {
        let n = 6 + inst as usize % 6;
        let a = sample_gaussian_matrix(n, SeedSpec::new(3, inst), inst % 2 == 0).unwrap();
        let lz = |b: f64| exact_log_partition(&a, &ModelParams::new(b, 0.8, 0.2, n).unwrap()).unwrap();
        for (b1, b2) in [(0.0, 0.4), (0.1, 0.2), (0.05, 1.5), (0.3, 0.31)] {
            let mid = lz(0.5 * (b1 + b2));
            assert!(mid <= 0.5 * (lz(b1) + lz(b2)) + 1e-12, "n = {n}, ({b1}, {b2})");
        }
    }
}

/// The hypercube bijection `sigma -> diag(s) sigma` preserves the SK part of
/// the Hamiltonian but not the Curie-Weiss term, so invariance needs `J = 0`.
#[test]
fn partition_function_is_gauge_invariant() {
    for inst in 0..10u64 {
        let n = 4 + inst as usize;
        let a = sample_gaussian_matrix(n, SeedSpec::new(5, inst), false).unwrap();
        let s = SpinVector::random(n, SeedSpec::new(6, inst));
        let b = a.conjugate(&s).unwrap();
        let p = ModelParams::new(0.35, 0.0, -0.5, n).unwrap();
        let za = exact_log_partition(&a, &p).unwrap();
        let zb = exact_log_partition(&b, &p).unwrap();
        assert!(rel_close(za, zb, 1e-10), "{za} vs {zb}");
    }
}

#[test]
fn curie_weiss_term_breaks_gauge_invariance() {
    let n = 8;
    let a = sample_gaussian_matrix(n, SeedSpec::new(5, 99), false).unwrap();
    let b = a.conjugate(&SpinVector::alternating(n)).unwrap();
    let p = ModelParams::new(0.35, 0.9, 0.0, n).unwrap();
    let za = exact_log_partition(&a, &p).unwrap();
    let zb = exact_log_partition(&b, &p).unwrap();
    assert!((za - zb).abs() > 1e-6);
}

#[test]
fn likelihood_ratio_has_unit_mean() {
    let n = 16;
    let p = ModelParams::new(0.25, 0.5, 0.0, n).unwrap();
    let ys: Vec<f64> = (0..2000u64)
        .map(|r| {
            let a = sample_gaussian_matrix(n, SeedSpec::replicate(77, n as u64, r), false).unwrap();
            rn_log_ratio_closed_form(&a, &p).unwrap().exp()
        })
        .collect();
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let var = ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (ys.len() - 1) as f64;
    let se = (var / ys.len() as f64).sqrt();
    assert!((mean - 1.0).abs() <= 3.0 * se, "mean {mean}, se {se}");
}

#[test]
fn exact_second_moment_moves_toward_limit() {
    let (beta, j) = (0.25, 0.5);
    let limit = second_moment_target(beta).unwrap();
    let exact: Vec<f64> = [8, 12, 16].iter().map(|&n| exact_second_moment(n, beta, j)).collect();
    for w in exact.windows(2) {
        assert!((w[1] - limit).abs() < (w[0] - limit).abs(), "{exact:?} vs {limit}");
    }
    assert!(exact.iter().all(|&v| v > 1.0 && v.is_finite()));
    // sanity: at beta = 0 the ratio is identically one
    assert!((exact_second_moment(10, 0.0, 0.7) - 1.0).abs() < 1e-12);
}

#[test]
fn empirical_second_moment_matches_exact() {
    let (beta, j) = (0.25, 0.5);
    for n in [8usize, 12, 16] {
        let p = ModelParams::new(beta, j, 0.0, n).unwrap();
        let y2: Vec<f64> = (0..5000u64)
            .map(|r| {
                let a = sample_gaussian_matrix(n, SeedSpec::replicate(91, n as u64, r), false).unwrap();
                (2.0 * rn_log_ratio_closed_form(&a, &p).unwrap()).exp()
            })
            .collect();
        let m2 = y2.iter().sum::<f64>() / y2.len() as f64;
        let exact = exact_second_moment(n, beta, j);
        assert!(m2.is_finite() && m2 > 1.0);
        assert!((m2 - exact).abs() <= 0.1 * exact, "n = {n}: {m2} vs {exact}");
    }
}

#[test]
fn average_free_energy_near_limit() {
    let n = 20;
    let p = ModelParams::new(0.25, 1.0, 0.0, n).unwrap();
    let mean = (0..200u64)
        .map(|r| {
            let a = sample_gaussian_matrix(n, SeedSpec::replicate(5, n as u64, r), false).unwrap();
            free_energy(&a, &p).unwrap()
        })
        .sum::<f64>()
        / 200.0;
    assert!((mean - 0.0625).abs() < 0.02, "mean F = {mean}");
}

#[test]
fn decomposition_prediction_matches_parts() {
    let n = 10;
    let a = sample_gaussian_matrix(n, SeedSpec::new(8, 8), false).unwrap();
    let p = ModelParams::new(0.2, 0.5, 0.1, n).unwrap();
    let direct = decomposition_prediction(&a, &p, 4).unwrap();
    let log_z = exact_log_partition(&a, &p).unwrap();
    for center in [true, false] {
        let cycles = CycleSeries::compute(&a, 4, center, 1e9).unwrap();
        let r = decomposition_residual(log_z, &cycles, &p, 4).unwrap();
        assert!((r - direct).abs() < 1e-12);
    }
    let zero = ModelParams::new(0.0, 0.5, 0.1, n).unwrap();
    assert_eq!(decomposition_prediction(&a, &zero, 4).unwrap(), 0.0);
}

#[test]
fn decomposition_rejects_bad_depth_and_regime() {
    let a = sample_gaussian_matrix(6, SeedSpec::new(1, 1), false).unwrap();
    let p = ModelParams::new(0.2, 0.5, 0.0, 6).unwrap();
    assert!(decomposition_prediction(&a, &p, 0).is_err());
    assert!(decomposition_prediction(&a, &p, 7).is_err());
    let hot = ModelParams::new(0.2, 3.0, 0.0, 6).unwrap();
    assert!(matches!(
        decomposition_prediction(&a, &hot, 3),
        Err(skcw::Error::RegimeViolation { .. })
    ));
}
