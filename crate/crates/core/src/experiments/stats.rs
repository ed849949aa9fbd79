//! Sample summaries, one-sample Kolmogorov-Smirnov against a normal law, and
//! the one-dimensional empirical Wasserstein distance.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Count, mean, unbiased variance, standard error, range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    pub min: f64,
    pub max: f64,
}

impl SampleSummary {
    /// Sums are taken in slice order, so equal inputs give bit-equal output.
    pub fn from_slice(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Precondition("cannot summarise an empty sample".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("sample"));
        }
        let count = values.len();
        let nf = count as f64;
        let mean = values.iter().sum::<f64>() / nf;
        let variance = if count > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0)
        } else {
            0.0
        };
        Ok(SampleSummary {
            count,
            mean,
            variance,
            std_error: (variance / nf).sqrt(),
            min: values.iter().cloned().fold(f64::INFINITY, f64::min),
            max: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

/// Unbiased sample covariance.
pub fn covariance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::Precondition("covariance needs at least two points".into()));
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    Ok(a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / (n - 1.0))
}

/// Pearson correlation; zero when either sample is constant.
pub fn correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    let c = covariance(a, b)?;
    let va = covariance(a, a)?;
    let vb = covariance(b, b)?;
    if va == 0.0 || vb == 0.0 {
        return Ok(0.0);
    }
    Ok(c / (va * vb).sqrt())
}

pub fn normal_cdf(x: f64, mean: f64, variance: f64) -> f64 {
    0.5 * erfc(-(x - mean) / (2.0 * variance).sqrt())
}

/// `P(K > lambda)` for the Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let p = if lambda < 1.18 {
        // Jacobi theta form, fast for small lambda
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        let mut cdf = 0.0;
        for j in 1..=50 {
            let odd = (2 * j - 1) as f64;
            let t = (-odd * odd * pi2 / (8.0 * lambda * lambda)).exp();
            cdf += t;
            if t < 1e-18 {
                break;
            }
        }
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * cdf
    } else {
        let mut sf = 0.0;
        for j in 1..=100 {
            let jf = j as f64;
            let t = (-2.0 * jf * jf * lambda * lambda).exp();
            sf += if j % 2 == 1 { t } else { -t };
            if t < 1e-18 {
                break;
            }
        }
        2.0 * sf
    };
    p.clamp(0.0, 1.0)
}

/// KS statistic and asymptotic p-value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsOutcome {
    pub statistic: f64,
    pub p_value: f64,
}

/// Smallest sample accepted by [`ks_test`].
pub const KS_MIN_SAMPLES: usize = 20;

/// One-sample Kolmogorov-Smirnov test of `sample` against `N(mean, variance)`.
pub fn ks_test(sample: &[f64], mean: f64, variance: f64) -> Result<KsOutcome> {
    if sample.len() < KS_MIN_SAMPLES {
        return Err(Error::Precondition(format!(
            "KS test needs at least {KS_MIN_SAMPLES} points, got {}",
            sample.len()
        )));
    }
    if !variance.is_finite() || variance <= 0.0 {
        return Err(Error::Precondition(format!(
            "KS null variance must be positive, got {variance}"
        )));
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("KS sample"));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = normal_cdf(x, mean, variance);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(KsOutcome {
        statistic: d,
        p_value: kolmogorov_sf(n.sqrt() * d),
    })
}

/// `((1/N) sum |a_(i) - b_(i)|^p)^(1/p)` over order statistics. Inputs need
/// not be pre-sorted.
pub fn empirical_wasserstein(a: &[f64], b: &[f64], p: f64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::Precondition("Wasserstein distance of empty samples".into()));
    }
    if !p.is_finite() || p < 1.0 {
        return Err(Error::Precondition(format!("Wasserstein order must be >= 1, got {p}")));
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(f64::total_cmp);
    sb.sort_by(f64::total_cmp);
    let n = sa.len() as f64;
    let s: f64 = sa.iter().zip(&sb).map(|(x, y)| (x - y).abs().powf(p)).sum();
    Ok((s / n).powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn normals(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.sample(StandardNormal)).collect()
    }

    #[test]
    fn summary_fields() {
        let s = SampleSummary::from_slice(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.count, 4);
        assert_eq!(s.mean, 2.5);
        assert!((s.variance - 5.0 / 3.0).abs() < 1e-15);
        assert!((s.std_error - (s.variance / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!((s.min, s.max), (1.0, 4.0));
        assert!(SampleSummary::from_slice(&[]).is_err());
        assert!(SampleSummary::from_slice(&[f64::NAN]).is_err());
    }

    #[test]
    fn kolmogorov_branches_meet() {
        let a = kolmogorov_sf(1.18 - 1e-12);
        let b = kolmogorov_sf(1.18 + 1e-12);
        assert!((a - b).abs() < 1e-9);
        // Known value: P(K > 1.36) ~ 0.0494
        assert!((kolmogorov_sf(1.36) - 0.0494).abs() < 5e-4);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
        assert!(kolmogorov_sf(10.0) < 1e-15);
    }

    #[test]
    fn ks_accepts_null_samples() {
        let mut passes = 0;
        for seed in 0..200 {
            let x = normals(seed, 10_000);
            let r = ks_test(&x, 0.0, 1.0).unwrap();
            assert!((0.0..=1.0).contains(&r.statistic));
            if r.p_value > 0.001 {
                passes += 1;
            }
        }
        assert!(passes >= 198, "passes = {passes}");
    }

    #[test]
    fn ks_rejects_shifted_samples() {
        let x: Vec<f64> = normals(1, 10_000).iter().map(|v| v + 5.0).collect();
        let r = ks_test(&x, 0.0, 1.0).unwrap();
        assert!(r.p_value < 1e-6);
        assert!(r.statistic <= 1.0);
    }

    #[test]
    fn ks_p_values_are_uniform_under_null() {
        let ps: Vec<f64> = (0..200)
            .map(|seed| ks_test(&normals(1000 + seed, 500), 0.0, 1.0).unwrap().p_value)
            .collect();
        let mut sorted = ps.clone();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len() as f64;
        let d = sorted
            .iter()
            .enumerate()
            .map(|(i, &p)| ((i + 1) as f64 / n - p).max(p - i as f64 / n))
            .fold(0.0, f64::max);
        assert!(d < 0.15, "uniformity distance {d}");
    }

    #[test]
    fn ks_preconditions() {
        assert!(ks_test(&[0.0; 10], 0.0, 1.0).is_err());
        assert!(ks_test(&normals(0, 50), 0.0, 0.0).is_err());
    }

    #[test]
    fn wasserstein_examples() {
        let a = [0.3, -1.0, 2.0];
        assert_eq!(empirical_wasserstein(&a, &a, 1.0).unwrap(), 0.0);
        assert_eq!(empirical_wasserstein(&[0.0, 0.0], &[1.0, 1.0], 2.0).unwrap(), 1.0);
        assert_eq!(empirical_wasserstein(&[0.0, 2.0], &[1.0, 3.0], 1.0).unwrap(), 1.0);
        assert!(empirical_wasserstein(&[0.0], &[1.0, 2.0], 1.0).is_err());
    }

    #[test]
    fn correlation_of_independent_normals_is_small() {
        let a = normals(5, 4000);
        let b = normals(6, 4000);
        assert!(correlation(&a, &b).unwrap().abs() < 3.0 / 4000f64.sqrt());
        assert!((correlation(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    }
}
