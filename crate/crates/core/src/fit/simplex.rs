//! Derivative-free Nelder-Mead maximization with scattered restarts.

/// Stopping rules for one simplex run.
#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub max_iter: usize,
    /// Convergence when the value spread across the simplex falls below
    /// `f_tol * (1 + |best|)`.
    pub f_tol: f64,
    /// ... and every coordinate spread falls below `x_tol * (1 + |coord|)`.
    pub x_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions { max_iter: 4000, f_tol: 1e-11, x_tol: 1e-9 }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Maximizes `f` starting from `x0` with initial steps `step`. NaN values
/// are treated as negative infinity.
pub fn maximize<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], step: &[f64], opts: &SimplexOptions) -> SimplexOutcome {
    let n = x0.len();
    assert_eq!(step.len(), n);
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };

    // vertices with values, kept sorted best-first
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step[i];
        let v = eval(&x);
        simplex.push((x, v));
    }
    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;

        let best = simplex[0].1;
        let worst = simplex[n].1;
        let f_spread = best - worst;
        let x_spread_ok = (0..n).all(|d| {
            let lo = simplex.iter().map(|(x, _)| x[d]).fold(f64::INFINITY, f64::min);
            let hi = simplex.iter().map(|(x, _)| x[d]).fold(f64::NEG_INFINITY, f64::max);
            hi - lo <= opts.x_tol * (1.0 + lo.abs().max(hi.abs()))
        });
        if f_spread.abs() <= opts.f_tol * (1.0 + best.abs()) && x_spread_ok {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|d| simplex[..n].iter().map(|(x, _)| x[d]).sum::<f64>() / n as f64)
            .collect();
        let worst_x = simplex[n].0.clone();
        let mix = |t: f64| -> Vec<f64> {
            (0..n).map(|d| centroid[d] + t * (centroid[d] - worst_x[d])).collect()
        };

        let reflected = mix(1.0);
        let fr = eval(&reflected);
        let second_worst = simplex[n - 1].1;

        let replacement = if fr > simplex[0].1 {
            let expanded = mix(2.0);
            let fe = eval(&expanded);
            if fe > fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            }
        } else if fr > second_worst {
            (reflected, fr)
        } else {
            let contracted = if fr > worst { mix(0.5) } else { mix(-0.5) };
            let fc = eval(&contracted);
            if fc > worst.max(fr) {
                (contracted, fc)
            } else {
                // shrink toward the best vertex
                let best_x = simplex[0].0.clone();
                for k in 1..=n {
                    let x: Vec<f64> = (0..n)
                        .map(|d| best_x[d] + 0.5 * (simplex[k].0[d] - best_x[d]))
                        .collect();
                    let v = eval(&x);
                    simplex[k] = (x, v);
                }
                simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
                continue;
            }
        };

        simplex[n] = replacement;
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    }

    let (x, value) = simplex.swap_remove(0);
    SimplexOutcome { x, value, iterations, converged }
}

/// Runs one simplex per start and keeps the best outcome; earlier starts
/// win ties so the result does not depend on scheduling.
pub fn maximize_multistart<F>(f: F, starts: &[Vec<f64>], step: &[f64], opts: &SimplexOptions) -> SimplexOutcome
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    use rayon::prelude::*;
    let outcomes: Vec<SimplexOutcome> = starts
        .par_iter()
        .map(|x0| maximize(&f, x0, step, opts))
        .collect();
    outcomes
        .into_iter()
        .reduce(|best, cand| if cand.value > best.value { cand } else { best })
        .expect("at least one start")
}
