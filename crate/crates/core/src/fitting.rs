//! Least-squares fits of log-price data to the linear, double-exponential
//! and finite-time-singularity models.
//!
//! The singular model is affine in (C₀, p₀) once (t_c, α) are fixed. The fit
//! scans a coarse (t_c, α) grid solving the affine part exactly at each node,
//! then refines all four parameters jointly with a bounded Levenberg–Marquardt
//! iteration started from the best node.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{
    pow_minus_one_over, DoubleExpParams, LinearParams, ModelParams, SingularityParams,
};
use crate::optim::{levenberg_marquardt, LeastSquaresProblem, LmOptions};
use crate::series::{Epoch, PriceIndexSeries, TimeAxis};

/// Smallest C₀ admitted by the singular fit (C₀ must stay positive).
const MIN_C0: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ModelKind {
    Linear,
    DoubleExp,
    #[default]
    Singularity,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Linear => "linear",
            ModelKind::DoubleExp => "doubleexp",
            ModelKind::Singularity => "singularity",
        }
    }
}

/// Divisor used for the RMS residue χ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ChiDivisor {
    /// sqrt(SSR / N)
    #[default]
    N,
    /// sqrt(SSR / (N − k)) with k free parameters.
    NMinusK,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub model: ModelKind,
    /// Inclusive data window; `None` uses the whole series.
    pub window: Option<(Epoch, Epoch)>,
    /// Absolute (lower, upper) search window for t_c. Defaults to
    /// (last epoch + Δt/2, last epoch + series span).
    pub tc_window: Option<(f64, f64)>,
    pub alpha_bounds: (f64, f64),
    /// Grid nodes along t_c and α.
    pub grid: (usize, usize),
    /// Grid nodes along b₂ for the double exponential.
    pub b2_grid: usize,
    /// Relative parameter-change tolerance.
    pub param_tol: f64,
    /// Relative objective-change tolerance.
    pub objective_tol: f64,
    pub max_iter: usize,
    pub chi_divisor: ChiDivisor,
    /// Pin p₀ (e.g. to ln P₀) instead of fitting it.
    pub fixed_p0: Option<f64>,
    /// Pin b₂ of the double exponential.
    pub fixed_b2: Option<f64>,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            model: ModelKind::Singularity,
            window: None,
            tc_window: None,
            alpha_bounds: (0.01, 5.0),
            grid: (48, 40),
            b2_grid: 60,
            param_tol: 1e-9,
            objective_tol: 1e-12,
            max_iter: 500,
            chi_divisor: ChiDivisor::N,
            fixed_p0: None,
            fixed_b2: None,
        }
    }
}

impl FitConfig {
    pub fn with_model(model: ModelKind) -> Self {
        FitConfig { model, ..Default::default() }
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.alpha_bounds;
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::Fit(format!("empty alpha window ({lo}, {hi}]")));
        }
        if !(self.param_tol > 0.0 && self.objective_tol > 0.0) {
            return Err(Error::Fit("tolerances must be positive".into()));
        }
        if self.grid.0 < 2 || self.grid.1 < 2 || self.b2_grid < 2 {
            return Err(Error::Fit("grids need at least 2 nodes per axis".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: ModelParams,
    /// Root-mean-square residue of p under `chi_divisor`.
    pub chi: f64,
    /// p_data − p_model at every fitted point.
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Sum of squared residuals.
    pub objective: f64,
    /// Objective after each accepted refinement step.
    pub objective_history: Vec<f64>,
    pub chi_divisor: ChiDivisor,
    /// Sampling period of the data in time units.
    pub dt: f64,
    pub axis: TimeAxis,
    /// First and last fitted epochs.
    pub span: (Epoch, Epoch),
}

impl FitResult {
    pub fn n_points(&self) -> usize {
        self.residuals.len()
    }

    /// χ recomputed from the stored residuals.
    pub fn chi_from_residuals(&self) -> f64 {
        chi(&self.residuals, self.params.dof(), self.chi_divisor)
    }

    /// Model log-price p(t).
    pub fn log_price(&self, t: f64) -> Result<f64> {
        self.params.eval(t)
    }

    /// Model price index P(t) = e^{p(t)}.
    pub fn predict(&self, t: f64) -> Result<f64> {
        Ok(self.params.eval(t)?.exp())
    }
}

pub fn chi(residuals: &[f64], dof: usize, divisor: ChiDivisor) -> f64 {
    let ssr: f64 = residuals.iter().map(|r| r * r).sum();
    let n = residuals.len();
    let denom = match divisor {
        ChiDivisor::N => n,
        ChiDivisor::NMinusK => n.saturating_sub(dof).max(1),
    };
    (ssr / denom as f64).sqrt()
}

fn windowed(index: &PriceIndexSeries, config: &FitConfig) -> Result<PriceIndexSeries> {
    match &config.window {
        Some((from, to)) => index.window(from, to),
        None => Ok(index.clone()),
    }
}

/// Dispatches on `config.model`.
pub fn fit(index: &PriceIndexSeries, config: &FitConfig) -> Result<FitResult> {
    match config.model {
        ModelKind::Linear => fit_linear(index, config),
        ModelKind::DoubleExp => fit_double_exp(index, config),
        ModelKind::Singularity => fit_singularity(index, config),
    }
}

fn finish(
    data: &PriceIndexSeries,
    params: ModelParams,
    config: &FitConfig,
    converged: bool,
    iterations: usize,
    objective_history: Vec<f64>,
) -> Result<FitResult> {
    let residuals = data
        .times()
        .iter()
        .zip(data.log_values())
        .map(|(&t, &y)| params.eval(t).map(|m| y - m))
        .collect::<Result<Vec<f64>>>()?;
    let objective = residuals.iter().map(|r| r * r).sum();
    let chi = chi(&residuals, params.dof(), config.chi_divisor);
    let epochs = data.epochs();
    Ok(FitResult {
        params,
        chi,
        residuals,
        converged,
        iterations,
        objective,
        objective_history,
        chi_divisor: config.chi_divisor,
        dt: data.step(),
        axis: *data.axis(),
        span: (epochs[0], *epochs.last().expect("non-empty")),
    })
}

/// Least squares for y ≈ p₀ + C₀ f. Returns (C₀, p₀, SSR).
fn affine_fit(f: &[f64], y: &[f64], fixed_p0: Option<f64>, min_c0: Option<f64>) -> (f64, f64, f64) {
    let n = f.len() as f64;
    let (c0, p0) = match fixed_p0 {
        Some(p0) => {
            let sff: f64 = f.iter().map(|v| v * v).sum();
            let sfy: f64 = f.iter().zip(y).map(|(a, b)| a * (b - p0)).sum();
            let c0 = if sff > 0.0 { sfy / sff } else { 0.0 };
            let c0 = min_c0.map_or(c0, |m| c0.max(m));
            (c0, p0)
        }
        None => {
            let fm = f.iter().sum::<f64>() / n;
            let ym = y.iter().sum::<f64>() / n;
            let sff: f64 = f.iter().map(|v| (v - fm) * (v - fm)).sum();
            let sfy: f64 = f.iter().zip(y).map(|(a, b)| (a - fm) * (b - ym)).sum();
            let c0 = if sff > 0.0 { sfy / sff } else { 0.0 };
            let c0 = min_c0.map_or(c0, |m| c0.max(m));
            (c0, ym - c0 * fm)
        }
    };
    let ssr = f.iter().zip(y).map(|(a, b)| (b - p0 - c0 * a).powi(2)).sum();
    (c0, p0, ssr)
}

/// Ordinary least squares on (t − t₀, p); the global optimum in closed form.
pub fn fit_linear(index: &PriceIndexSeries, config: &FitConfig) -> Result<FitResult> {
    let data = windowed(index, config)?;
    if data.len() < 3 {
        return Err(Error::Fit(format!("linear fit needs at least 3 points, got {}", data.len())));
    }
    let t0 = data.t0();
    let tau: Vec<f64> = data.times().iter().map(|t| t - t0).collect();
    let (c0, p0, _) = affine_fit(&tau, data.log_values(), config.fixed_p0, None);
    let params = ModelParams::Linear(LinearParams { p0, c0, t0 });
    let ssr = tau.iter().zip(data.log_values()).map(|(x, y)| (y - p0 - c0 * x).powi(2)).sum();
    finish(&data, params, config, true, 0, vec![ssr])
}

fn double_exp_basis(b2: f64, tau: f64) -> f64 {
    DoubleExpParams { p0: 0.0, c0: 1.0, b2, t0: 0.0 }.eval(tau)
}

fn double_exp_basis_db2(b2: f64, tau: f64) -> f64 {
    let x = b2 * tau;
    if x.abs() < 1e-4 {
        tau * tau * (0.5 + x / 3.0 + x * x / 8.0)
    } else {
        (tau * x.exp() * b2 - x.exp_m1()) / (b2 * b2)
    }
}

struct DoubleExpProblem<'a> {
    tau: &'a [f64],
    y: &'a [f64],
    fixed_p0: Option<f64>,
}

impl LeastSquaresProblem for DoubleExpProblem<'_> {
    fn n_residuals(&self) -> usize {
        self.tau.len()
    }

    // x = (b₂, C₀[, p₀]); residual is model − data.
    fn evaluate(&self, x: &[f64], r: &mut [f64], jac: Option<&mut DMatrix<f64>>) -> bool {
        let (b2, c0) = (x[0], x[1]);
        let p0 = self.fixed_p0.unwrap_or_else(|| x[2]);
        for (i, (&tau, &y)) in self.tau.iter().zip(self.y).enumerate() {
            r[i] = p0 + c0 * double_exp_basis(b2, tau) - y;
            if !r[i].is_finite() {
                return false;
            }
        }
        if let Some(j) = jac {
            for (i, &tau) in self.tau.iter().enumerate() {
                j[(i, 0)] = c0 * double_exp_basis_db2(b2, tau);
                j[(i, 1)] = double_exp_basis(b2, tau);
                if self.fixed_p0.is_none() {
                    j[(i, 2)] = 1.0;
                }
            }
        }
        true
    }
}

/// Fits p(t) = p₀ + (C₀/b₂)(e^{b₂(t−t₀)} − 1) with b₂ ≥ 0.
pub fn fit_double_exp(index: &PriceIndexSeries, config: &FitConfig) -> Result<FitResult> {
    config.validate()?;
    let data = windowed(index, config)?;
    let k = if config.fixed_p0.is_some() { 2 } else { 3 };
    if data.len() < k + 2 {
        return Err(Error::Fit(format!("double-exponential fit needs at least {} points", k + 2)));
    }
    let t0 = data.t0();
    let y = data.log_values();
    let tau: Vec<f64> = data.times().iter().map(|t| t - t0).collect();
    let span = *tau.last().expect("non-empty");

    let affine_at = |b2: f64| {
        let f: Vec<f64> = tau.iter().map(|&s| double_exp_basis(b2, s)).collect();
        affine_fit(&f, y, config.fixed_p0, None)
    };

    if let Some(b2) = config.fixed_b2 {
        if b2 < 0.0 {
            return Err(Error::Fit(format!("pinned b2 must be >= 0, got {b2}")));
        }
        let (c0, p0, ssr) = affine_at(b2);
        let params = ModelParams::DoubleExp(DoubleExpParams { p0, c0, b2, t0 });
        return finish(&data, params, config, true, 0, vec![ssr]);
    }

    let b2_max = 50.0 / span;
    let b2_min = 1e-4 / span;
    let nodes = config.b2_grid;
    let mut best = (0.0, affine_at(0.0));
    for j in 0..nodes {
        let b2 = b2_min * (b2_max / b2_min).powf(j as f64 / (nodes - 1) as f64);
        let cand = affine_at(b2);
        if cand.2 < best.1 .2 {
            best = (b2, cand);
        }
    }
    let (b2, (c0, p0, _)) = best;

    let problem = DoubleExpProblem { tau: &tau, y, fixed_p0: config.fixed_p0 };
    let mut x0 = vec![b2, c0];
    let mut lower = vec![0.0, f64::NEG_INFINITY];
    let mut upper = vec![b2_max, f64::INFINITY];
    if config.fixed_p0.is_none() {
        x0.push(p0);
        lower.push(f64::NEG_INFINITY);
        upper.push(f64::INFINITY);
    }
    let opts = LmOptions {
        param_tol: config.param_tol,
        objective_tol: config.objective_tol,
        max_iter: config.max_iter,
    };
    let out = levenberg_marquardt(&problem, &x0, &lower, &upper, &opts)
        .ok_or_else(|| Error::Fit("double-exponential start point outside model domain".into()))?;
    let p0 = config.fixed_p0.unwrap_or(out.x.get(2).copied().unwrap_or(p0));
    let params = ModelParams::DoubleExp(DoubleExpParams { p0, c0: out.x[1], b2: out.x[0], t0 });
    finish(&data, params, config, out.converged, out.iterations, out.history)
}

struct SingularityProblem<'a> {
    t: &'a [f64],
    y: &'a [f64],
    t0: f64,
    fixed_p0: Option<f64>,
}

impl LeastSquaresProblem for SingularityProblem<'_> {
    fn n_residuals(&self) -> usize {
        self.t.len()
    }

    // x = (t_c − t₀, α, C₀[, p₀]); residual is model − data.
    fn evaluate(&self, x: &[f64], r: &mut [f64], jac: Option<&mut DMatrix<f64>>) -> bool {
        let (span, alpha, c0) = (x[0], x[1], x[2]);
        let p0 = self.fixed_p0.unwrap_or_else(|| x[3]);
        let tc = self.t0 + span;
        if !(alpha > 0.0) || !(span > 0.0) {
            return false;
        }
        let mut jac = jac;
        for (i, (&t, &y)) in self.t.iter().zip(self.y).enumerate() {
            let u = tc - t;
            if !(u > 0.0) {
                return false;
            }
            let ln_ratio = (span / u).ln();
            let g = (alpha * ln_ratio).exp();
            let h = pow_minus_one_over(ln_ratio, alpha); // (g − 1)/α
            r[i] = p0 + c0 * span * h - y;
            if !r[i].is_finite() {
                return false;
            }
            if let Some(j) = jac.as_deref_mut() {
                j[(i, 0)] = c0 * (h + g * (self.t0 - t) / u);
                j[(i, 1)] = c0 * span * (g * ln_ratio - h) / alpha;
                j[(i, 2)] = span * h;
                if self.fixed_p0.is_none() {
                    j[(i, 3)] = 1.0;
                }
            }
        }
        true
    }
}

/// Default (lower, upper) window for t_c given the fitted data.
pub fn default_tc_window(data: &PriceIndexSeries) -> (f64, f64) {
    let last = data.last_time();
    (last + 0.5 * data.step(), last + (last - data.t0()))
}

/// Fits the singular log-price law with (t_c, α, C₀, p₀) all free, subject to
/// t_c above the last epoch, α in `alpha_bounds` and C₀ > 0.
pub fn fit_singularity(index: &PriceIndexSeries, config: &FitConfig) -> Result<FitResult> {
    config.validate()?;
    let data = windowed(index, config)?;
    if data.len() < 6 {
        return Err(Error::Fit(format!("singularity fit needs at least 6 points, got {}", data.len())));
    }
    let t = data.times();
    let y = data.log_values();
    let t0 = data.t0();
    let last = data.last_time();
    if y.len() >= 3 && !y[y.len() - 3..].windows(2).all(|w| w[1] > w[0]) {
        log::warn!("log-price tail is not strictly increasing; singular fit may be poorly posed");
    }

    let (tc_lo, tc_hi) = config.tc_window.unwrap_or_else(|| default_tc_window(&data));
    let tc_lo = tc_lo.max(last + 1e-9 * (last - t0).abs().max(1.0));
    if !(tc_hi > tc_lo) {
        return Err(Error::Fit(format!("empty t_c search window ({tc_lo}, {tc_hi})")));
    }
    let (a_lo, a_hi) = config.alpha_bounds;

    // Grid over the distance of t_c past the last epoch, geometric in both axes.
    let (d_lo, d_hi) = (tc_lo - last, tc_hi - last);
    let (n_tc, n_alpha) = config.grid;
    let mut basis = vec![0.0; t.len()];
    let mut best: Option<(f64, f64, f64, f64, f64)> = None; // (ssr, tc, alpha, c0, p0)
    for jt in 0..n_tc {
        let d = d_lo * (d_hi / d_lo).powf(jt as f64 / (n_tc - 1) as f64);
        let tc = last + d;
        let span = tc - t0;
        let ln_ratios: Vec<f64> = t.iter().map(|&tk| (span / (tc - tk)).ln()).collect();
        for ja in 0..n_alpha {
            let alpha = a_lo * (a_hi / a_lo).powf(ja as f64 / (n_alpha - 1) as f64);
            for (b, &lr) in basis.iter_mut().zip(&ln_ratios) {
                *b = span * pow_minus_one_over(lr, alpha);
            }
            let (c0, p0, ssr) = affine_fit(&basis, y, config.fixed_p0, Some(MIN_C0));
            if ssr.is_finite() && best.is_none_or(|b| ssr < b.0) {
                best = Some((ssr, tc, alpha, c0, p0));
            }
        }
    }
    let (_, tc, alpha, c0, p0) =
        best.ok_or_else(|| Error::Fit("no finite grid node in the search window".into()))?;

    let problem = SingularityProblem { t, y, t0, fixed_p0: config.fixed_p0 };
    let mut x0 = vec![tc - t0, alpha, c0];
    let mut lower = vec![tc_lo - t0, a_lo, MIN_C0];
    let mut upper = vec![tc_hi - t0, a_hi, f64::INFINITY];
    if config.fixed_p0.is_none() {
        x0.push(p0);
        lower.push(f64::NEG_INFINITY);
        upper.push(f64::INFINITY);
    }
    let opts = LmOptions {
        param_tol: config.param_tol,
        objective_tol: config.objective_tol,
        max_iter: config.max_iter,
    };
    let out = levenberg_marquardt(&problem, &x0, &lower, &upper, &opts)
        .ok_or_else(|| Error::Fit("grid seed outside model domain".into()))?;
    let params = SingularityParams {
        tc: t0 + out.x[0],
        alpha: out.x[1],
        c0: out.x[2],
        p0: config.fixed_p0.unwrap_or(out.x.get(3).copied().unwrap_or(p0)),
        t0,
    };
    if !out.converged {
        log::warn!("singularity fit stopped after {} iterations without converging", out.iterations);
    }
    finish(&data, ModelParams::Singularity(params), config, out.converged, out.iterations, out.history)
}
