//! Derivative-free simplex maximizer used by the M-step.
//!
//! Plain Nelder–Mead with the standard reflection/expansion/contraction/
//! shrink coefficients, run as a maximizer. Objective values of `-inf` mark
//! infeasible points (constraint violations), which the simplex simply moves
//! away from. The best point ever evaluated, including the start, is what
//! gets returned.

#[derive(Debug, Clone)]
pub struct NmOptions {
    /// Initial simplex edge along coordinate i is `init_step * (1 + |x0_i|)`.
    pub init_step: f64,
    /// Converged when the simplex value spread falls below
    /// `f_tol + 1e-12 * |best|`.
    pub f_tol: f64,
    pub max_evals: usize,
    /// Extra polish passes restarting from the best point with a smaller
    /// initial step.
    pub restarts: usize,
}

impl Default for NmOptions {
    fn default() -> Self {
        Self { init_step: 0.25, f_tol: 1e-12, max_evals: 6_000, restarts: 2 }
    }
}

#[derive(Debug, Clone)]
pub struct NmOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

// Total order with NaN at the bottom, shared by all comparisons here.
fn better(a: f64, b: f64) -> bool {
    match (a.is_nan(), b.is_nan()) {
        (false, false) => a > b,
        (false, true) => true,
        _ => false,
    }
}

pub fn maximize<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], opts: &NmOptions) -> NmOutcome {
    let n = x0.len();
    assert!(n > 0, "need at least one free coordinate");
    let mut evals = 0usize;
    let mut best_x = x0.to_vec();
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        f(x)
    };
    let mut best_f = eval(x0, &mut evals);
    let mut converged = false;

    let mut step = opts.init_step;
    for _round in 0..=opts.restarts {
        // Build a fresh simplex around the incumbent.
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((best_x.clone(), best_f));
        for i in 0..n {
            let mut x = best_x.clone();
            x[i] += step * (1.0 + x[i].abs());
            let v = eval(&x, &mut evals);
            simplex.push((x, v));
        }

        loop {
            simplex.sort_by(|a, b| {
                if better(a.1, b.1) {
                    std::cmp::Ordering::Less
                } else if better(b.1, a.1) {
                    std::cmp::Ordering::Greater
                } else {
                    std::cmp::Ordering::Equal
                }
            });
            if better(simplex[0].1, best_f) {
                best_f = simplex[0].1;
                best_x = simplex[0].0.clone();
            }

            let spread = match (simplex[0].1.is_finite(), simplex[n].1.is_finite()) {
                (true, true) => simplex[0].1 - simplex[n].1,
                (true, false) => f64::INFINITY,
                _ => 0.0, // everything infeasible; nothing to improve
            };
            if spread <= opts.f_tol + 1e-12 * simplex[0].1.abs() {
                converged = true;
                break;
            }
            if evals >= opts.max_evals {
                break;
            }

            // Centroid of all but the worst vertex.
            let mut centroid = vec![0.0; n];
            for (x, _) in simplex.iter().take(n) {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi;
                }
            }
            centroid.iter_mut().for_each(|c| *c /= n as f64);
            let worst = simplex[n].clone();

            let at = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&worst.0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let xr = at(1.0);
            let fr = eval(&xr, &mut evals);
            if better(fr, simplex[0].1) {
                // Try to expand past the reflection.
                let xe = at(2.0);
                let fe = eval(&xe, &mut evals);
                simplex[n] = if better(fe, fr) { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if better(fr, simplex[n - 1].1) {
                simplex[n] = (xr, fr);
                continue;
            }
            // Contract, outside or inside depending on the reflection.
            let (xc, fc) = if better(fr, worst.1) {
                let xc = at(0.5);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = at(-0.5);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            };
            if better(fc, worst.1) || better(fc, fr) {
                simplex[n] = (xc, fc);
                continue;
            }
            // Shrink toward the best vertex.
            let anchor = simplex[0].0.clone();
            for (x, v) in simplex.iter_mut().skip(1) {
                for (xi, ai) in x.iter_mut().zip(&anchor) {
                    *xi = ai + 0.5 * (*xi - ai);
                }
                *v = eval(x, &mut evals);
            }
        }

        if evals >= opts.max_evals {
            break;
        }
        step /= 8.0;
    }

    NmOutcome { x: best_x, value: best_f, evals, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_a_quadratic_maximum() {
        let f = |x: &[f64]| -((x[0] - 1.3).powi(2) + 2.0 * (x[1] + 0.7).powi(2));
        let out = maximize(f, &[0.0, 0.0], &NmOptions::default());
        assert!(out.converged);
        assert!((out.x[0] - 1.3).abs() < 1e-5, "{:?}", out.x);
        assert!((out.x[1] + 0.7).abs() < 1e-5, "{:?}", out.x);
    }

    #[test]
    fn flat_objective_returns_the_start() {
        let out = maximize(|_| 0.0, &[0.4, -2.0, 7.0], &NmOptions::default());
        assert!(out.converged);
        assert_eq!(out.x, vec![0.4, -2.0, 7.0]);
        assert_eq!(out.value, 0.0);
    }

    #[test]
    fn respects_infeasible_regions() {
        let f = |x: &[f64]| {
            if x[0].abs() > 3.0 {
                f64::NEG_INFINITY
            } else {
                -(x[0] - 2.5).powi(2)
            }
        };
        let out = maximize(f, &[-1.0], &NmOptions::default());
        assert!((out.x[0] - 2.5).abs() < 1e-5);
        assert!(out.value > -1e-9);
    }

    #[test]
    fn never_returns_worse_than_the_start() {
        // Start exactly at the optimum of a narrow quartic.
        let f = |x: &[f64]| -(x[0] - 0.123).powi(4);
        let out = maximize(f, &[0.123], &NmOptions::default());
        assert!(out.value >= -1e-12);
        assert!((out.x[0] - 0.123).abs() < 1e-3);
    }

    #[test]
    fn one_dimensional_matches_golden_section_search() {
        // Smooth asymmetric objective on a bracket.
        let f = |x: f64| -(x - 2.345).powi(2) * (1.0 + 0.3 * (x - 1.0).tanh());
        // Test-local golden-section maximizer.
        let (mut a, mut b) = (0.0f64, 5.0f64);
        let phi = (5.0f64.sqrt() - 1.0) / 2.0;
        while b - a > 1e-10 {
            let c = b - phi * (b - a);
            let d = a + phi * (b - a);
            if f(c) > f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let golden = (a + b) / 2.0;
        let out = maximize(|x: &[f64]| f(x[0]), &[1.0], &NmOptions::default());
        assert!(
            (out.x[0] - golden).abs() < 1e-5,
            "nm {} vs golden {golden}",
            out.x[0]
        );
    }
}
