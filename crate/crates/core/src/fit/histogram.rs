//! Logarithmically binned histograms for plot-ready output.

use super::FitError;

#[derive(Debug, Clone, PartialEq)]
pub struct LogHistogram {
    /// Bin edges, length counts.len() + 1.
    pub edges: Vec<f64>,
    /// Geometric bin centers.
    pub centers: Vec<f64>,
    pub counts: Vec<u64>,
}

/// Bins positive samples into geometric bins (`bins_per_decade` per factor
/// of ten). Empty bins are kept so the output is directly plottable.
pub fn log_histogram(samples: &[f64], bins_per_decade: usize) -> Result<LogHistogram, FitError> {
    if samples.is_empty() {
        return Err(FitError::InsufficientData { needed: 1, got: 0 });
    }
    if samples.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(FitError::NonPositiveSample);
    }
    let bins_per_decade = bins_per_decade.max(1);
    let ratio = 10f64.powf(1.0 / bins_per_decade as f64);

    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut edges = vec![lo * (1.0 - 1e-12)];
    while *edges.last().unwrap() < hi {
        let next = edges.last().unwrap() * ratio;
        edges.push(next);
    }
    if edges.len() < 2 {
        edges.push(lo * ratio);
    }

    let n_bins = edges.len() - 1;
    let mut counts = vec![0u64; n_bins];
    for &x in samples {
        let idx = edges.partition_point(|&e| e <= x).saturating_sub(1);
        counts[idx.min(n_bins - 1)] += 1;
    }
    let centers = edges.windows(2).map(|w| (w[0] * w[1]).sqrt()).collect();
    Ok(LogHistogram { edges, centers, counts })
}
