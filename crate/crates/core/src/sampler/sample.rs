use thiserror::Error;

use super::rng::Xoshiro256StarStar;
use crate::netcore::DistributionSpec;

/// Rejection cap for truncated normals.
pub const MAX_TRUNCATION_REJECTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("truncation window rejected {0} consecutive normal draws")]
    TruncationTooTight(usize),
}

/// Inverse-CDF draw from a categorical: first value whose cumulative
/// probability exceeds `u`.
pub fn categorical_inverse_cdf(values: &[f64], probs: &[f64], u: f64) -> f64 {
    let mut cum = 0.0;
    for (v, p) in values.iter().zip(probs) {
        cum += p;
        if cum > u {
            return *v;
        }
    }
    // Rounding left the total just below `u`; fall back to the last state with mass.
    values
        .iter()
        .zip(probs)
        .rev()
        .find(|(_, p)| **p > 0.0)
        .map(|(v, _)| *v)
        .unwrap_or(values[values.len() - 1])
}

/// Standard normal by the Marsaglia polar method, one variate per accepted pair.
///
/// Uses `libm` so the transcendental step is the same on every platform.
pub fn standard_normal(rng: &mut Xoshiro256StarStar) -> f64 {
    loop {
        let a = 2.0 * rng.next_f64() - 1.0;
        let b = 2.0 * rng.next_f64() - 1.0;
        let s = a * a + b * b;
        if s > 0.0 && s < 1.0 {
            return a * libm::sqrt(-2.0 * libm::log(s) / s);
        }
    }
}

/// Draw one value.
pub fn sample_distribution(dist: &DistributionSpec, rng: &mut Xoshiro256StarStar) -> Result<f64, SampleError> {
    Ok(match dist {
        DistributionSpec::Categorical { values, probs } => categorical_inverse_cdf(values, probs, rng.next_f64()),
        DistributionSpec::Uniform { lo, hi } => {
            let u = rng.next_f64();
            lo + (hi - lo) * u
        }
        DistributionSpec::Triangular { lo, mode, hi } => {
            let u = rng.next_f64();
            let width = hi - lo;
            if width == 0.0 {
                return Ok(*lo);
            }
            let split = (mode - lo) / width;
            if u < split {
                lo + libm::sqrt(u * width * (mode - lo))
            } else {
                hi - libm::sqrt((1.0 - u) * width * (hi - mode))
            }
        }
        DistributionSpec::Normal {
            mu,
            sigma,
            trunc_lo,
            trunc_hi,
        } => {
            if trunc_lo.is_none() && trunc_hi.is_none() {
                return Ok(mu + sigma * standard_normal(rng));
            }
            let lo = trunc_lo.unwrap_or(f64::NEG_INFINITY);
            let hi = trunc_hi.unwrap_or(f64::INFINITY);
            for _ in 0..MAX_TRUNCATION_REJECTS {
                let x = mu + sigma * standard_normal(rng);
                if x >= lo && x <= hi {
                    return Ok(x);
                }
            }
            return Err(SampleError::TruncationTooTight(MAX_TRUNCATION_REJECTS));
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> Xoshiro256StarStar {
        Xoshiro256StarStar::seed_from_u64(seed)
    }

    #[test]
    fn point_mass_and_degenerate_uniform() {
        let mut r = rng(1);
        for _ in 0..100 {
            assert_eq!(sample_distribution(&DistributionSpec::point(7.0), &mut r).unwrap(), 7.0);
            assert_eq!(
                sample_distribution(&DistributionSpec::Uniform { lo: 2.0, hi: 2.0 }, &mut r).unwrap(),
                2.0
            );
        }
    }

    #[test]
    fn inverse_cdf_boundaries() {
        let v = [0.0, 1.0, 2.0];
        let p = [0.25, 0.5, 0.25];
        assert_eq!(categorical_inverse_cdf(&v, &p, 0.0), 0.0);
        assert_eq!(categorical_inverse_cdf(&v, &p, 0.2499), 0.0);
        assert_eq!(categorical_inverse_cdf(&v, &p, 0.25), 1.0);
        assert_eq!(categorical_inverse_cdf(&v, &p, 0.75), 2.0);
        // zero-mass trailing state is never returned
        assert_eq!(
            categorical_inverse_cdf(&[0.0, 1.0], &[1.0 - 1e-12, 0.0], 0.9999999999999),
            0.0
        );
    }

    #[test]
    fn bernoulli_mean_law_of_large_numbers() {
        // mean 0.75, sigma sqrt(0.1875); 3 sigma/sqrt(n) ~ 0.0041 at n = 100k
        let d = DistributionSpec::Categorical {
            values: vec![0.0, 1.0],
            probs: vec![0.25, 0.75],
        };
        let mut r = rng(2024);
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| sample_distribution(&d, &mut r).unwrap()).sum::<f64>() / n as f64;
        assert!((mean - 0.75).abs() <= 0.01, "mean {mean}");
        assert!((mean - 0.75).abs() <= 3.0 * 0.1875f64.sqrt() / (n as f64).sqrt());
    }

    #[test]
    fn continuous_moments() {
        let n = 200_000;
        let check = |d: DistributionSpec, mean: f64, var: f64| {
            let mut r = rng(77);
            let xs: Vec<f64> = (0..n).map(|_| sample_distribution(&d, &mut r).unwrap()).collect();
            let m = xs.iter().sum::<f64>() / n as f64;
            let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n as f64;
            assert!((m - mean).abs() < 4.0 * (var / n as f64).sqrt(), "{d:?}: mean {m}");
            assert!((v - var).abs() / var < 0.02, "{d:?}: var {v}");
        };
        check(DistributionSpec::Uniform { lo: 1.0, hi: 3.0 }, 2.0, 4.0 / 12.0);
        check(DistributionSpec::normal(5.0, 2.0), 5.0, 4.0);
        // triangular variance (a^2+b^2+c^2-ab-ac-bc)/18
        let (a, c, b) = (0.0f64, 1.0f64, 4.0f64);
        check(
            DistributionSpec::Triangular { lo: a, mode: c, hi: b },
            (a + b + c) / 3.0,
            (a * a + b * b + c * c - a * b - a * c - b * c) / 18.0,
        );
    }

    #[test]
    fn truncation_respects_bounds_and_caps_rejections() {
        let d = DistributionSpec::Normal {
            mu: 0.0,
            sigma: 1.0,
            trunc_lo: Some(-0.5),
            trunc_hi: Some(2.0),
        };
        let mut r = rng(3);
        for _ in 0..10_000 {
            let x = sample_distribution(&d, &mut r).unwrap();
            assert!((-0.5..=2.0).contains(&x));
        }
        let far = DistributionSpec::Normal {
            mu: 0.0,
            sigma: 1.0,
            trunc_lo: Some(40.0),
            trunc_hi: None,
        };
        assert_eq!(
            sample_distribution(&far, &mut r),
            Err(SampleError::TruncationTooTight(MAX_TRUNCATION_REJECTS))
        );
    }
}
