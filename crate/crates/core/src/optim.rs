//! Small derivative-free optimization helpers.
//!
//! The only export is a standard Nelder-Mead simplex minimizer, used by the
//! heuristic probe-ensemble optimizer where the objective (a weighted trace
//! of an inverse Fisher matrix) is smooth but not convex in the state
//! parameters and gradients are awkward to form.

/// Result of a Nelder-Mead run.
#[derive(Debug, Clone)]
pub struct NmResult {
    /// Best point found.
    pub x: Vec<f64>,
    /// Objective value at the best point.
    pub value: f64,
    /// Iterations consumed.
    pub iterations: usize,
}

/// Minimizes `f` with the Nelder-Mead simplex method (standard coefficients:
/// reflection 1, expansion 2, contraction ½, shrink ½).
///
/// The initial simplex is `x0` plus `step`-sized perturbations along each
/// coordinate. Terminates when the simplex function spread falls below
/// `f_tol` (absolute) or after `max_iter` iterations. Fully deterministic.
pub fn nelder_mead(
    f: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    max_iter: usize,
    f_tol: f64,
) -> NmResult {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += if p[i].abs() > 1.0 { step * p[i].abs() } else { step };
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();

    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;

        // Order the simplex by objective value.
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite objective"));
        let reordered: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let reordered_values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        simplex = reordered;
        values = reordered_values;

        if (values[n] - values[0]).abs() <= f_tol * (1.0 + values[0].abs()) {
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; n];
        for p in simplex.iter().take(n) {
            for (c, &v) in centroid.iter_mut().zip(p) {
                *c += v / n as f64;
            }
        }

        let worst = simplex[n].clone();
        let combine = |a: f64, b: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst)
                .map(|(&c, &w)| a * c + b * w)
                .collect()
        };

        // Reflection.
        let reflected = combine(2.0, -1.0);
        let reflected_value = f(&reflected);
        if reflected_value < values[0] {
            // Expansion.
            let expanded = combine(3.0, -2.0);
            let expanded_value = f(&expanded);
            if expanded_value < reflected_value {
                simplex[n] = expanded;
                values[n] = expanded_value;
            } else {
                simplex[n] = reflected;
                values[n] = reflected_value;
            }
            continue;
        }
        if reflected_value < values[n - 1] {
            simplex[n] = reflected;
            values[n] = reflected_value;
            continue;
        }

        // Contraction (outside if the reflection improved on the worst).
        let contracted = if reflected_value < values[n] {
            combine(1.5, -0.5)
        } else {
            combine(0.5, 0.5)
        };
        let contracted_value = f(&contracted);
        if contracted_value < values[n].min(reflected_value) {
            simplex[n] = contracted;
            values[n] = contracted_value;
            continue;
        }

        // Shrink towards the best vertex.
        let best = simplex[0].clone();
        for i in 1..=n {
            for (x, &b) in simplex[i].iter_mut().zip(&best) {
                *x = 0.5 * (*x + b);
            }
            values[i] = f(&simplex[i]);
        }
    }

    let mut best = 0;
    for i in 1..=n {
        if values[i] < values[best] {
            best = i;
        }
    }
    NmResult {
        x: simplex[best].clone(),
        value: values[best],
        iterations,
    }
}
