use serde::{Deserialize, Serialize};

/// Tolerance for probability vectors summing to one.
pub const PROB_TOLERANCE: f64 = 1e-9;

/// Prior or conditional distribution attached to a node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    Categorical {
        values: Vec<f64>,
        probs: Vec<f64>,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
    Normal {
        mu: f64,
        sigma: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        trunc_lo: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        trunc_hi: Option<f64>,
    },
    Triangular {
        lo: f64,
        mode: f64,
        hi: f64,
    },
}

impl DistributionSpec {
    pub fn point(value: f64) -> Self {
        DistributionSpec::Categorical {
            values: vec![value],
            probs: vec![1.0],
        }
    }

    pub fn normal(mu: f64, sigma: f64) -> Self {
        DistributionSpec::Normal {
            mu,
            sigma,
            trunc_lo: None,
            trunc_hi: None,
        }
    }

    /// Finite support, if the distribution is categorical.
    pub fn support(&self) -> Option<(&[f64], &[f64])> {
        match self {
            DistributionSpec::Categorical { values, probs } => Some((values, probs)),
            _ => None,
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, DistributionSpec::Categorical { .. })
    }

    /// Checks the parameter invariants, returning a reason on failure.
    pub fn check(&self) -> Result<(), String> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(format!("{name} must be finite"))
            }
        };
        match self {
            DistributionSpec::Categorical { values, probs } => {
                if values.is_empty() {
                    return Err("categorical needs at least one value".into());
                }
                if values.len() != probs.len() {
                    return Err(format!(
                        "categorical has {} values but {} probabilities",
                        values.len(),
                        probs.len()
                    ));
                }
                for v in values {
                    finite("value", *v)?;
                }
                check_probability_row(probs)?;
                for (i, a) in values.iter().enumerate() {
                    if values[..i].contains(a) {
                        return Err(format!("duplicate categorical value {a}"));
                    }
                }
                Ok(())
            }
            DistributionSpec::Uniform { lo, hi } => {
                finite("lo", *lo)?;
                finite("hi", *hi)?;
                if lo > hi {
                    return Err(format!("uniform lo {lo} exceeds hi {hi}"));
                }
                Ok(())
            }
            DistributionSpec::Normal {
                mu,
                sigma,
                trunc_lo,
                trunc_hi,
            } => {
                finite("mu", *mu)?;
                finite("sigma", *sigma)?;
                if *sigma <= 0.0 {
                    return Err(format!("normal sigma must be > 0, got {sigma}"));
                }
                if let Some(lo) = trunc_lo {
                    finite("trunc_lo", *lo)?;
                }
                if let Some(hi) = trunc_hi {
                    finite("trunc_hi", *hi)?;
                }
                if let (Some(lo), Some(hi)) = (trunc_lo, trunc_hi) {
                    if lo >= hi {
                        return Err(format!("truncation bounds [{lo}, {hi}] are empty"));
                    }
                }
                Ok(())
            }
            DistributionSpec::Triangular { lo, mode, hi } => {
                finite("lo", *lo)?;
                finite("mode", *mode)?;
                finite("hi", *hi)?;
                if !(lo <= mode && mode <= hi) {
                    return Err(format!("triangular needs lo <= mode <= hi, got {lo}, {mode}, {hi}"));
                }
                Ok(())
            }
        }
    }

    /// Analytic mean, ignoring truncation for the normal case.
    pub fn nominal_mean(&self) -> f64 {
        match self {
            DistributionSpec::Categorical { values, probs } => values.iter().zip(probs).map(|(v, p)| v * p).sum(),
            DistributionSpec::Uniform { lo, hi } => 0.5 * (lo + hi),
            DistributionSpec::Normal { mu, .. } => *mu,
            DistributionSpec::Triangular { lo, mode, hi } => (lo + mode + hi) / 3.0,
        }
    }
}

/// Each entry non-negative, total within [`PROB_TOLERANCE`] of one.
pub fn check_probability_row(probs: &[f64]) -> Result<(), String> {
    if probs.is_empty() {
        return Err("empty probability row".into());
    }
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(format!("probability {p} is negative or not finite"));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROB_TOLERANCE {
        return Err(format!("probabilities sum to {total}, not 1"));
    }
    Ok(())
}
