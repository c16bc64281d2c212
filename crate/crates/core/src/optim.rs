//! Box-constrained Levenberg–Marquardt for small dense least-squares problems.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub(crate) struct LmOptions {
    pub param_tol: f64,
    pub objective_tol: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct LmOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after every accepted step, starting with the initial point.
    pub history: Vec<f64>,
}

/// Residual/Jacobian callback. Fills `residuals` (and `jacobian`, row per
/// residual, when given) at `x`. Returns false if `x` is outside the model
/// domain.
pub(crate) trait LeastSquaresProblem {
    fn n_residuals(&self) -> usize;
    fn evaluate(&self, x: &[f64], residuals: &mut [f64], jacobian: Option<&mut DMatrix<f64>>) -> bool;
}

pub(crate) fn levenberg_marquardt(
    problem: &impl LeastSquaresProblem,
    x0: &[f64],
    lower: &[f64],
    upper: &[f64],
    opts: &LmOptions,
) -> Option<LmOutcome> {
    let n = problem.n_residuals();
    let k = x0.len();
    let clamp = |x: &mut [f64]| {
        for i in 0..k {
            x[i] = x[i].clamp(lower[i], upper[i]);
        }
    };

    let mut x = x0.to_vec();
    clamp(&mut x);
    let mut r = vec![0.0; n];
    let mut jac = DMatrix::zeros(n, k);
    if !problem.evaluate(&x, &mut r, Some(&mut jac)) {
        return None;
    }
    let mut ssr: f64 = r.iter().map(|v| v * v).sum();
    let mut history = vec![ssr];
    let mut lambda = 1e-3;
    let mut r_trial = vec![0.0; n];
    let mut x_trial = vec![0.0; k];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iter {
        iterations += 1;
        if ssr == 0.0 {
            converged = true;
            break;
        }
        let rv = DVector::from_column_slice(&r);
        let gradient = jac.transpose() * &rv;
        let col_sq: Vec<f64> = (0..k).map(|i| jac.column(i).norm_squared()).collect();
        let diag_max = col_sq.iter().cloned().fold(0.0, f64::max);
        let scale: Vec<f64> = col_sq.iter().map(|c| c.max(1e-12 * diag_max).max(f64::MIN_POSITIVE)).collect();

        // Coordinates pinned at a bound with the descent direction pointing
        // outward are frozen for this iteration.
        let frozen: Vec<bool> = (0..k)
            .map(|i| (x[i] <= lower[i] && gradient[i] > 0.0) || (x[i] >= upper[i] && gradient[i] < 0.0))
            .collect();

        let mut accepted = false;
        while lambda < 1e20 {
            // Solve the damped problem min |[J; √(λD)] δ + [r; 0]| by QR, which
            // avoids squaring the condition number of J.
            let mut aug = DMatrix::zeros(n + k, k);
            let mut rhs = DVector::zeros(n + k);
            for i in 0..k {
                if !frozen[i] {
                    aug.view_mut((0, i), (n, 1)).copy_from(&jac.column(i));
                    aug[(n + i, i)] = (lambda * scale[i]).sqrt();
                } else {
                    aug[(n + i, i)] = 1.0;
                }
            }
            for j in 0..n {
                rhs[j] = -r[j];
            }
            let qr = aug.qr();
            let qtb = qr.q().transpose() * &rhs;
            let step = match qr.r().solve_upper_triangular(&qtb) {
                Some(s) if s.iter().all(|v| v.is_finite()) => s,
                _ => {
                    lambda *= 10.0;
                    continue;
                }
            };
            for i in 0..k {
                x_trial[i] = x[i] + step[i];
            }
            clamp(&mut x_trial);
            let small_step = (0..k).all(|i| {
                (x_trial[i] - x[i]).abs() <= opts.param_tol * (x[i].abs() + opts.param_tol)
            });
            if !problem.evaluate(&x_trial, &mut r_trial, None) {
                if small_step {
                    converged = true;
                    break;
                }
                lambda *= 10.0;
                continue;
            }
            let ssr_trial: f64 = r_trial.iter().map(|v| v * v).sum();
            if ssr_trial.is_finite() && ssr_trial <= ssr {
                let decrease = ssr - ssr_trial;
                x.copy_from_slice(&x_trial);
                ssr = ssr_trial;
                history.push(ssr);
                lambda = (lambda / 3.0).max(1e-15);
                accepted = true;
                if small_step || (decrease > 0.0 && decrease <= opts.objective_tol * ssr) || ssr == 0.0 {
                    converged = true;
                }
                break;
            }
            if small_step {
                converged = true;
                break;
            }
            lambda *= 4.0;
        }
        if converged {
            if accepted {
                problem.evaluate(&x, &mut r, None);
            }
            break;
        }
        if !accepted {
            break;
        }
        problem.evaluate(&x, &mut r, Some(&mut jac));
    }

    Some(LmOutcome { x, iterations, converged, history })
}
