//! Maximum-likelihood fits for the long-tail distribution families used
//! throughout: Zipf, lognormal, (range-truncated) exponential, truncated
//! power law, and double Pareto lognormal. Each fit reports point
//! estimates, 95% confidence intervals, and the log-likelihood.

mod dpln;
mod exponential;
mod histogram;
mod lognormal;
pub mod sample;
pub mod simplex;
mod tpl;
mod zipf;

pub use dpln::{dpln_ln_pdf, fit_dpln, fit_dpln_seeded};
pub use exponential::fit_exponential;
pub use histogram::{log_histogram, LogHistogram};
pub use lognormal::fit_lognormal;
pub use tpl::{fit_truncated_power_law, fit_truncated_power_law_seeded, tpl_ln_pmf};
pub use zipf::fit_zipf;

use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("all samples identical; nothing to fit")]
    DegenerateSample,
    #[error("samples must be positive and finite")]
    NonPositiveSample,
    #[error("invalid fit range [{lo}, {hi}]")]
    InvalidRange { lo: f64, hi: f64 },
}

/// A fitted family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitFamily {
    /// Count of samples with value v proportional to v^-(nu+1).
    Zipf { nu: f64 },
    Lognormal { mu: f64, sigma: f64 },
    /// Density proportional to exp(-t/tau) on the fit range.
    Exponential { tau: f64 },
    /// Mass proportional to d^-tau * exp(-d/kappa) on d = 1, 2, ...
    TruncatedPowerLaw { tau: f64, kappa: f64 },
    /// Lognormal body with power-law upper (alpha) and lower (beta) tails.
    Dpln { alpha: f64, beta: f64, mu: f64, sigma: f64 },
}

impl FitFamily {
    pub fn name(&self) -> &'static str {
        match self {
            FitFamily::Zipf { .. } => "zipf",
            FitFamily::Lognormal { .. } => "lognormal",
            FitFamily::Exponential { .. } => "exponential",
            FitFamily::TruncatedPowerLaw { .. } => "truncated_power_law",
            FitFamily::Dpln { .. } => "dpln",
        }
    }

    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            FitFamily::Zipf { .. } => &["nu"],
            FitFamily::Lognormal { .. } => &["mu", "sigma"],
            FitFamily::Exponential { .. } => &["tau"],
            FitFamily::TruncatedPowerLaw { .. } => &["tau", "kappa"],
            FitFamily::Dpln { .. } => &["alpha", "beta", "mu", "sigma"],
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            FitFamily::Zipf { nu } => vec![nu],
            FitFamily::Lognormal { mu, sigma } => vec![mu, sigma],
            FitFamily::Exponential { tau } => vec![tau],
            FitFamily::TruncatedPowerLaw { tau, kappa } => vec![tau, kappa],
            FitFamily::Dpln { alpha, beta, mu, sigma } => vec![alpha, beta, mu, sigma],
        }
    }
}

/// Result of a maximum-likelihood fit.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionFit {
    pub family: FitFamily,
    /// 95% confidence interval per parameter, in `param_names()` order.
    pub ci: Vec<(f64, f64)>,
    pub log_likelihood: f64,
    pub sample_size: usize,
    /// Lower/upper truncation of the fitted support, when applicable.
    pub fit_range: Option<(f64, f64)>,
    /// False when the optimizer hit an iteration cap or the information
    /// matrix was unusable; the best point found is still reported.
    pub converged: bool,
}

impl DistributionFit {
    pub fn param(&self, name: &str) -> Option<f64> {
        let idx = self.family.param_names().iter().position(|&n| n == name)?;
        Some(self.family.params()[idx])
    }

    pub fn ci_for(&self, name: &str) -> Option<(f64, f64)> {
        let idx = self.family.param_names().iter().position(|&n| n == name)?;
        self.ci.get(idx).copied()
    }

    /// True when `value` lies inside the named parameter's interval.
    pub fn ci_covers(&self, name: &str, value: f64) -> bool {
        self.ci_for(name).map_or(false, |(lo, hi)| lo <= value && value <= hi)
    }

    /// JSON document: `{family, params, ci, loglik, n, ...}`. Non-finite
    /// numbers serialize as null.
    pub fn to_json(&self) -> serde_json::Value {
        let names = self.family.param_names();
        let values = self.family.params();
        let params: serde_json::Map<String, serde_json::Value> = names
            .iter()
            .zip(&values)
            .map(|(&n, &v)| (n.to_string(), json!(v)))
            .collect();
        let ci: serde_json::Map<String, serde_json::Value> = names
            .iter()
            .zip(&self.ci)
            .map(|(&n, &(lo, hi))| (n.to_string(), json!([lo, hi])))
            .collect();
        let mut doc = json!({
            "family": self.family.name(),
            "params": params,
            "ci": ci,
            "loglik": self.log_likelihood,
            "n": self.sample_size,
            "converged": self.converged,
        });
        if let Some((lo, hi)) = self.fit_range {
            doc["fit_range"] = json!([lo, hi]);
        }
        doc
    }
}

pub(crate) fn check_positive_reals(samples: &[f64], needed: usize) -> Result<(), FitError> {
    if samples.len() < needed {
        return Err(FitError::InsufficientData { needed, got: samples.len() });
    }
    if samples.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(FitError::NonPositiveSample);
    }
    Ok(())
}

pub(crate) fn check_positive_counts(samples: &[u64], needed: usize) -> Result<(), FitError> {
    if samples.len() < needed {
        return Err(FitError::InsufficientData { needed, got: samples.len() });
    }
    if samples.iter().any(|&x| x == 0) {
        return Err(FitError::NonPositiveSample);
    }
    let first = samples[0];
    if samples.iter().all(|&x| x == first) {
        return Err(FitError::DegenerateSample);
    }
    Ok(())
}
