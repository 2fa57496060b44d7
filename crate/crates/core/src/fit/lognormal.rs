//! Closed-form lognormal maximum likelihood.

use super::{check_positive_reals, DistributionFit, FitError, FitFamily};

/// mu is the mean of log samples and sigma the maximum-likelihood (1/n)
/// standard deviation of the logs. A zero-spread sample yields sigma = 0
/// with an infinite log-likelihood (the point-mass limit).
pub fn fit_lognormal(samples: &[f64]) -> Result<DistributionFit, FitError> {
    check_positive_reals(samples, 2)?;
    let n = samples.len() as f64;
    let logs: Vec<f64> = samples.iter().map(|&x| x.ln()).collect();
    let mu = logs.iter().sum::<f64>() / n;
    let var = logs.iter().map(|&l| (l - mu) * (l - mu)).sum::<f64>() / n;
    let sigma = var.sqrt();

    let se_mu = sigma / n.sqrt();
    let se_sigma = sigma / (2.0 * n).sqrt();
    let log_likelihood = if sigma == 0.0 {
        f64::INFINITY
    } else {
        let sum_logs: f64 = logs.iter().sum();
        -0.5 * n * (2.0 * std::f64::consts::PI).ln() - n * sigma.ln() - sum_logs - 0.5 * n
    };

    Ok(DistributionFit {
        family: FitFamily::Lognormal { mu, sigma },
        ci: vec![
            (mu - 1.96 * se_mu, mu + 1.96 * se_mu),
            ((sigma - 1.96 * se_sigma).max(0.0), sigma + 1.96 * se_sigma),
        ],
        log_likelihood,
        sample_size: samples.len(),
        fit_range: None,
        converged: true,
    })
}
