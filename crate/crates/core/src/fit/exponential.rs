//! Range-truncated exponential maximum likelihood.

use super::{DistributionFit, FitError, FitFamily};
use crate::numeric::golden_maximize;

/// Fits a density proportional to exp(-t/tau) restricted to [lo, hi];
/// samples outside the range are ignored. Pass `(0.0, f64::INFINITY)` for
/// the untruncated fit, where the estimate reduces to the sample mean.
pub fn fit_exponential(samples: &[f64], lo: f64, hi: f64) -> Result<DistributionFit, FitError> {
    if !(lo >= 0.0) || !(hi > lo) {
        return Err(FitError::InvalidRange { lo, hi });
    }
    let inside: Vec<f64> = samples.iter().copied().filter(|&t| t >= lo && t <= hi && t.is_finite()).collect();
    if inside.len() < 2 {
        return Err(FitError::InsufficientData { needed: 2, got: inside.len() });
    }
    let m = inside.len() as f64;
    let sum: f64 = inside.iter().sum();
    let mean = sum / m;

    // ln of the normalizing constant: tau * (e^{-lo/tau} - e^{-hi/tau})
    let ln_norm = |tau: f64| -> f64 {
        if hi.is_infinite() {
            tau.ln() - lo / tau
        } else {
            tau.ln() - lo / tau + (-(-((hi - lo) / tau)).exp_m1()).ln()
        }
    };
    let loglik = |tau: f64| -sum / tau - m * ln_norm(tau);

    let scale = mean.max(1e-9);
    let (lo_b, hi_b) = ((scale * 1e-4).ln(), (scale * 1e8).ln());
    let ln_tau = golden_maximize(|lt| loglik(lt.exp()), lo_b, hi_b, 1e-13, 600);
    let tau = ln_tau.exp();

    // observed information, numerically
    let h = 1e-4 * tau;
    let info = -(loglik(tau + h) - 2.0 * loglik(tau) + loglik(tau - h)) / (h * h);
    let se = if info > 0.0 { 1.0 / info.sqrt() } else { f64::INFINITY };

    let interior = ln_tau > lo_b + 0.05 && ln_tau < hi_b - 0.05;
    Ok(DistributionFit {
        family: FitFamily::Exponential { tau },
        ci: vec![((tau - 1.96 * se).max(0.0), tau + 1.96 * se)],
        log_likelihood: loglik(tau),
        sample_size: inside.len(),
        fit_range: Some((lo, hi)),
        converged: interior && se.is_finite(),
    })
}
