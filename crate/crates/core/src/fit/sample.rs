//! Samplers for the fitted families, used for closed-loop validation and
//! for synthetic network construction.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal, Zeta};

/// Unbounded Zipf: P(v) proportional to v^-(nu+1), v = 1, 2, ...
pub fn sample_zipf<R: Rng + ?Sized>(rng: &mut R, nu: f64) -> u64 {
    let zeta = Zeta::new(nu + 1.0).expect("nu must be positive");
    let v: f64 = zeta.sample(rng);
    v as u64
}

/// Double Pareto lognormal via its product construction:
/// exp(mu + sigma Z + E1/alpha - E2/beta).
pub fn sample_dpln<R: Rng + ?Sized>(rng: &mut R, alpha: f64, beta: f64, mu: f64, sigma: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    let e1: f64 = rng.sample(Exp1);
    let e2: f64 = rng.sample(Exp1);
    (mu + sigma * z + e1 / alpha - e2 / beta).exp()
}

/// Inverse-CDF sampler for the discrete truncated power law
/// p(d) proportional to d^-tau e^{-d/kappa}. The table extends until the
/// remaining tail mass is negligible.
pub struct TplSampler {
    cumulative: Vec<f64>,
}

impl TplSampler {
    pub fn new(tau: f64, kappa: f64) -> TplSampler {
        let mut cumulative = Vec::new();
        let mut acc = 0.0;
        let mut d = 1u64;
        loop {
            let term = (-tau * (d as f64).ln() - d as f64 / kappa).exp();
            acc += term;
            cumulative.push(acc);
            if (d as f64 > 30.0 * kappa && term < acc * 1e-14) || d > 50_000_000 {
                break;
            }
            d += 1;
        }
        TplSampler { cumulative }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let total = *self.cumulative.last().expect("nonempty table");
        let u = rng.gen::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c < u);
        (idx.min(self.cumulative.len() - 1) + 1) as u64
    }
}
