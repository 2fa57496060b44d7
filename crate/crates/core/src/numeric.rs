//! Shared numerical routines: special functions, quadrature, 1-D
//! maximization, numeric Hessians, and small-matrix inversion.

use statrs::distribution::{ContinuousCDF, Gamma};
use statrs::function::erf::erfc;

/// Riemann zeta for s > 1 via Euler-Maclaurin with N = 20 terms.
/// Relative accuracy is better than 1e-13 over s in (1, 60].
pub fn zeta(s: f64) -> f64 {
    debug_assert!(s > 1.0);
    const N: usize = 20;
    let n = N as f64;
    let mut sum = 0.0;
    for k in 1..=N {
        sum += (k as f64).powf(-s);
    }
    let tail = n.powf(1.0 - s) / (s - 1.0) - 0.5 * n.powf(-s);
    // Bernoulli corrections B2/2! s/N^{s+1}, B4/4! s(s+1)(s+2)/N^{s+3}, ...
    let mut corr = 0.0;
    let mut rising = s; // s (s+1) ... accumulated
    corr += rising / 12.0 * n.powf(-s - 1.0);
    rising *= (s + 1.0) * (s + 2.0);
    corr -= rising / 720.0 * n.powf(-s - 3.0);
    rising *= (s + 3.0) * (s + 4.0);
    corr += rising / 30240.0 * n.powf(-s - 5.0);
    rising *= (s + 5.0) * (s + 6.0);
    corr -= rising / 1_209_600.0 * n.powf(-s - 7.0);
    sum + tail + corr
}

pub fn ln_zeta(s: f64) -> f64 {
    zeta(s).ln()
}

/// Second derivative of ln zeta by central differences; accurate to ~1e-7,
/// plenty for Wald intervals.
pub fn ln_zeta_second_derivative(s: f64) -> f64 {
    let h = 1e-3 * s.max(1.0);
    let h = h.min((s - 1.0) / 4.0).max(1e-6);
    (ln_zeta(s + h) - 2.0 * ln_zeta(s) + ln_zeta(s - h)) / (h * h)
}

/// ln of the standard normal CDF, stable far into the lower tail.
pub fn ln_normal_cdf(z: f64) -> f64 {
    if z < -8.0 {
        // asymptotic expansion of Mills' ratio
        let r = 1.0 / (z * z);
        let series = -r + 3.0 * r * r - 15.0 * r * r * r + 105.0 * r * r * r * r;
        -0.5 * z * z - 0.5 * (2.0 * std::f64::consts::PI).ln() - (-z).ln() + series.ln_1p()
    } else if z <= 0.0 {
        (0.5 * erfc(-z / std::f64::consts::SQRT_2)).ln()
    } else {
        (-0.5 * erfc(z / std::f64::consts::SQRT_2)).ln_1p()
    }
}

pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Exact 95% confidence interval for a Poisson mean given an observed
/// count, from the gamma representation of the Poisson CDF.
pub fn poisson_ci_95(count: u64) -> (f64, f64) {
    let lo = if count == 0 {
        0.0
    } else {
        Gamma::new(count as f64, 1.0).expect("valid shape").inverse_cdf(0.025)
    };
    let hi = Gamma::new(count as f64 + 1.0, 1.0).expect("valid shape").inverse_cdf(0.975);
    (lo, hi)
}

/// Composite Simpson rule with n (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = if n % 2 == 0 { n } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for k in 1..n {
        let x = a + h * k as f64;
        sum += f(x) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

/// Golden-section maximization of a unimodal function on [lo, hi].
pub fn golden_maximize<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..max_iter {
        if (b - a).abs() < tol * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Central-difference Hessian of `f` at `x`.
pub fn numeric_hessian<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], rel_step: f64) -> Vec<Vec<f64>> {
    let n = x.len();
    let h: Vec<f64> = x.iter().map(|&xi| rel_step * (xi.abs() + rel_step)).collect();
    let mut hess = vec![vec![0.0; n]; n];
    let f0 = f(x);
    let mut xp = x.to_vec();
    for i in 0..n {
        // diagonal
        xp.copy_from_slice(x);
        xp[i] = x[i] + h[i];
        let fp = f(&xp);
        xp[i] = x[i] - h[i];
        let fm = f(&xp);
        hess[i][i] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for j in (i + 1)..n {
            xp.copy_from_slice(x);
            xp[i] = x[i] + h[i];
            xp[j] = x[j] + h[j];
            let fpp = f(&xp);
            xp[j] = x[j] - h[j];
            let fpm = f(&xp);
            xp[i] = x[i] - h[i];
            xp[j] = x[j] + h[j];
            let fmp = f(&xp);
            xp[j] = x[j] - h[j];
            let fmm = f(&xp);
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    hess
}

/// Gauss-Jordan inversion with partial pivoting; None if singular.
pub fn invert_matrix(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.iter().map(|row| {
        let mut r = row.clone();
        r.resize(n, 0.0);
        r
    }).collect();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for i in 0..n {
            if i != col {
                let factor = a[i][col];
                if factor != 0.0 {
                    for j in 0..n {
                        a[i][j] -= factor * a[col][j];
                        inv[i][j] -= factor * inv[col][j];
                    }
                }
            }
        }
    }
    Some(inv)
}

/// Wald standard errors from a log-likelihood Hessian (negated and
/// inverted); None where the information matrix is not usable.
pub fn wald_standard_errors(hessian: &[Vec<f64>]) -> Option<Vec<f64>> {
    let n = hessian.len();
    let neg: Vec<Vec<f64>> = hessian.iter().map(|row| row.iter().map(|&v| -v).collect()).collect();
    let cov = invert_matrix(&neg)?;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let v = cov[i][i];
        if !(v.is_finite() && v > 0.0) {
            return None;
        }
        out.push(v.sqrt());
    }
    Some(out)
}

/// Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zeta_matches_known_values() {
        assert_relative_eq!(zeta(2.0), std::f64::consts::PI.powi(2) / 6.0, max_relative = 1e-12);
        assert_relative_eq!(zeta(4.0), std::f64::consts::PI.powi(4) / 90.0, max_relative = 1e-12);
        assert_relative_eq!(zeta(1.5), 2.612_375_348_685_488, max_relative = 1e-10);
    }

    #[test]
    fn ln_normal_cdf_tail_is_stable() {
        assert_relative_eq!(ln_normal_cdf(0.0), (0.5f64).ln(), max_relative = 1e-12);
        assert_relative_eq!(ln_normal_cdf(1.0), (0.841_344_746_068_542_9f64).ln(), max_relative = 1e-10);
        // deep tail: ln Phi(-20) = -204.918...
        assert_relative_eq!(ln_normal_cdf(-20.0), -204.918_568_660_190_1, max_relative = 1e-9);
        // continuity across the branch switch
        let a = ln_normal_cdf(-8.0 - 1e-9);
        let b = ln_normal_cdf(-8.0 + 1e-9);
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn poisson_interval_matches_tables() {
        let (lo, hi) = poisson_ci_95(0);
        assert_eq!(lo, 0.0);
        assert_relative_eq!(hi, 3.688_879_454_113_936, max_relative = 1e-9);
        let (lo, hi) = poisson_ci_95(10);
        assert_relative_eq!(lo, 4.795_389, max_relative = 1e-5);
        assert_relative_eq!(hi, 18.390_36, max_relative = 1e-5);
    }

    #[test]
    fn simpson_integrates_gaussian() {
        let v = simpson(normal_pdf, -10.0, 10.0, 2000);
        assert_relative_eq!(v, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn golden_finds_quadratic_peak() {
        let x = golden_maximize(|x| -(x - 3.25) * (x - 3.25), 0.0, 10.0, 1e-12, 200);
        assert_relative_eq!(x, 3.25, max_relative = 1e-8);
    }

    #[test]
    fn invert_small_matrix() {
        let m = vec![vec![4.0, 7.0], vec![2.0, 6.0]];
        let inv = invert_matrix(&m).unwrap();
        assert_relative_eq!(inv[0][0], 0.6, max_relative = 1e-12);
        assert_relative_eq!(inv[0][1], -0.7, max_relative = 1e-12);
        assert_relative_eq!(inv[1][0], -0.2, max_relative = 1e-12);
        assert_relative_eq!(inv[1][1], 0.4, max_relative = 1e-12);
    }
}
