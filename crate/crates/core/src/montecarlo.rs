//! Monte Carlo propagation of a relative error on measured inflation rates
//! into uncertainties of the singular-fit parameters.
//!
//! Each generation j draws every rate from a gaussian centred on the measured
//! value with standard deviation Δi·|i(t_k)|, rebuilds the price index and
//! refits it. Generation j uses its own ChaCha stream derived only from the
//! master seed and j, and all aggregation runs in generation order, so
//! reports are bit-identical for any worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitting::{fit_singularity, FitConfig};
use crate::models::SingularityParams;
use crate::series::{build_price_index, InflationSeries};

/// Maximum redraws for one rate before keeping the measured value.
const MAX_REDRAWS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCConfig {
    /// Relative error Δi on every measured rate (0.25 = 25%).
    pub rel_error: f64,
    /// Number of generations m.
    pub generations: usize,
    pub seed: u64,
    /// Acceptance threshold on |mean − direct| / std.
    pub threshold: f64,
    pub histogram_bins: usize,
    /// Worker threads; `None` uses the global pool. Results do not depend on it.
    pub workers: Option<usize>,
}

impl Default for MCConfig {
    fn default() -> Self {
        MCConfig {
            rel_error: 0.25,
            generations: 4000,
            seed: 0,
            threshold: 0.1,
            histogram_bins: 30,
            workers: None,
        }
    }
}

impl MCConfig {
    fn validate(&self) -> Result<()> {
        if self.generations == 0 {
            return Err(Error::Domain("Monte Carlo needs at least one generation".into()));
        }
        if !(self.rel_error >= 0.0) || !self.rel_error.is_finite() {
            return Err(Error::Domain(format!("relative error must be >= 0, got {}", self.rel_error)));
        }
        if !(self.threshold > 0.0) {
            return Err(Error::Domain(format!("acceptance threshold must be > 0, got {}", self.threshold)));
        }
        Ok(())
    }
}

/// Random stream of generation `generation` under `seed`.
pub fn generation_rng(seed: u64, generation: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(generation);
    rng
}

/// One resampled copy of `rates`. Draws at or below −1 are redrawn; the
/// second element counts those redraws.
pub fn sample_generation(
    rates: &InflationSeries,
    rel_error: f64,
    rng: &mut impl Rng,
) -> Result<(InflationSeries, usize)> {
    if rel_error == 0.0 {
        return Ok((rates.clone(), 0));
    }
    let mut truncations = 0;
    let mut drawn = Vec::with_capacity(rates.len());
    for (k, &i) in rates.rates().iter().enumerate() {
        let sd = rel_error * i.abs();
        if k == 0 || sd == 0.0 {
            drawn.push(i);
            continue;
        }
        let mut value = i;
        for _ in 0..MAX_REDRAWS {
            let z: f64 = StandardNormal.sample(rng);
            let candidate = i + sd * z;
            if candidate > -1.0 {
                value = candidate;
                break;
            }
            truncations += 1;
        }
        drawn.push(value);
    }
    Ok((rates.with_rates(drawn)?, truncations))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamStats {
    pub direct: f64,
    pub mean: f64,
    /// Population standard deviation (divisor m).
    pub std: f64,
    /// |mean − direct| / std.
    pub ratio: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCReport {
    pub rel_error: f64,
    pub generations: usize,
    pub seed: u64,
    pub threshold: f64,
    pub direct: SingularityParams,
    pub tc: ParamStats,
    pub alpha: ParamStats,
    pub c0: ParamStats,
    pub p0: ParamStats,
    pub gamma_mean: f64,
    pub gamma_std: f64,
    /// All four ratios below the threshold.
    pub accepted: bool,
    /// Generations whose fit failed or did not converge; excluded from moments.
    pub non_converged: usize,
    /// Rate draws rejected at i ≤ −1 and redrawn.
    pub truncations: usize,
    /// More than 5% of generations did not converge.
    pub unreliable: bool,
    pub tc_histogram: Histogram,
    pub tc_skewness: f64,
    pub tc_excess_kurtosis: f64,
    /// |skewness| < 0.5 and |excess kurtosis| < 1.
    pub tc_gaussian: bool,
}

impl MCReport {
    pub fn params(&self) -> [(&'static str, &ParamStats); 4] {
        [("tc", &self.tc), ("alpha", &self.alpha), ("c0", &self.c0), ("p0", &self.p0)]
    }
}

/// Mean and population std of `values`, accumulated as offsets from `pivot`
/// in slice order.
fn moments_about(values: &[f64], pivot: f64) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = pivot + values.iter().map(|v| v - pivot).sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m;
    (mean, var.sqrt())
}

fn param_stats(values: &[f64], direct: f64, threshold: f64) -> ParamStats {
    let (mean, std) = moments_about(values, direct);
    let diff = (mean - direct).abs();
    let ratio = if std > 0.0 {
        diff / std
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    ParamStats { direct, mean, std, ratio, accepted: ratio < threshold }
}

/// Population skewness and excess kurtosis.
pub fn shape_moments(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let (m2, m3, m4) = (m2 / m, m3 / m, m4 / m);
    if m2 == 0.0 {
        return (0.0, 0.0);
    }
    (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
}

pub fn histogram(values: &[f64], bins: usize) -> Histogram {
    let bins = bins.max(1);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut counts = vec![0; bins];
    if values.is_empty() {
        return Histogram { lo: 0.0, hi: 0.0, counts };
    }
    let width = (hi - lo) / bins as f64;
    for v in values {
        let b = if width > 0.0 { (((v - lo) / width) as usize).min(bins - 1) } else { 0 };
        counts[b] += 1;
    }
    Histogram { lo, hi, counts }
}

type Outcome = (Option<SingularityParams>, usize);

fn run_generation(rates: &InflationSeries, fit_cfg: &FitConfig, mc: &MCConfig, j: usize) -> Outcome {
    let mut rng = generation_rng(mc.seed, j as u64);
    let Ok((sample, truncations)) = sample_generation(rates, mc.rel_error, &mut rng) else {
        return (None, 0);
    };
    let index = build_price_index(&sample);
    match fit_singularity(&index, fit_cfg) {
        Ok(fit) if fit.converged => (fit.params.singularity().copied(), truncations),
        _ => (None, truncations),
    }
}

#[cfg(feature = "parallel")]
fn run_generations(rates: &InflationSeries, fit_cfg: &FitConfig, mc: &MCConfig) -> Result<Vec<Outcome>> {
    use rayon::prelude::*;
    let work = || {
        (0..mc.generations)
            .into_par_iter()
            .map(|j| run_generation(rates, fit_cfg, mc, j))
            .collect::<Vec<_>>()
    };
    match mc.workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}

#[cfg(not(feature = "parallel"))]
fn run_generations(rates: &InflationSeries, fit_cfg: &FitConfig, mc: &MCConfig) -> Result<Vec<Outcome>> {
    Ok((0..mc.generations).map(|j| run_generation(rates, fit_cfg, mc, j)).collect())
}

/// Direct fit plus `generations` resampled refits, aggregated per parameter.
pub fn run_mc(rates: &InflationSeries, fit_cfg: &FitConfig, mc: &MCConfig) -> Result<MCReport> {
    mc.validate()?;
    let rates = match &fit_cfg.window {
        Some((from, to)) => rates.window(from, to)?,
        None => rates.clone(),
    };
    let fit_cfg = FitConfig { window: None, ..fit_cfg.clone() };

    let direct_fit = fit_singularity(&build_price_index(&rates), &fit_cfg)?;
    if !direct_fit.converged {
        return Err(Error::Fit("direct fit did not converge".into()));
    }
    let direct = *direct_fit.params.singularity().expect("singular fit");

    let outcomes = run_generations(&rates, &fit_cfg, mc)?;
    let truncations = outcomes.iter().map(|o| o.1).sum();
    let fits: Vec<SingularityParams> = outcomes.iter().filter_map(|o| o.0).collect();
    let non_converged = mc.generations - fits.len();
    if fits.is_empty() {
        return Err(Error::Fit("no Monte Carlo generation converged".into()));
    }

    let column = |f: fn(&SingularityParams) -> f64| fits.iter().map(f).collect::<Vec<f64>>();
    let tc_values = column(|p| p.tc);
    let tc = param_stats(&tc_values, direct.tc, mc.threshold);
    let alpha = param_stats(&column(|p| p.alpha), direct.alpha, mc.threshold);
    let c0 = param_stats(&column(|p| p.c0), direct.c0, mc.threshold);
    let p0 = param_stats(&column(|p| p.p0), direct.p0, mc.threshold);
    let (gamma_mean, gamma_std) = moments_about(&column(|p| p.gamma()), direct.gamma());
    let (tc_skewness, tc_excess_kurtosis) = shape_moments(&tc_values);

    Ok(MCReport {
        rel_error: mc.rel_error,
        generations: mc.generations,
        seed: mc.seed,
        threshold: mc.threshold,
        direct,
        accepted: tc.accepted && alpha.accepted && c0.accepted && p0.accepted,
        tc,
        alpha,
        c0,
        p0,
        gamma_mean,
        gamma_std,
        non_converged,
        truncations,
        unreliable: non_converged as f64 > 0.05 * mc.generations as f64,
        tc_histogram: histogram(&tc_values, mc.histogram_bins),
        tc_skewness,
        tc_excess_kurtosis,
        tc_gaussian: tc_skewness.abs() < 0.5 && tc_excess_kurtosis.abs() < 1.0,
    })
}

/// One row of an error sweep: spreads at a given Δi.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub rel_error: f64,
    /// 100 · std(t_c) / (t_c − t₀) of the direct fit.
    pub tc_span_std_pct: f64,
    /// 100 · std(γ) / γ of the direct fit.
    pub gamma_std_pct: f64,
    pub alpha_std: f64,
    pub c0_std: f64,
    pub p0_std: f64,
    pub accepted: bool,
    pub report: MCReport,
}

/// Repeats [`run_mc`] for every relative error, sharing the master seed.
pub fn sweep_error(
    rates: &InflationSeries,
    fit_cfg: &FitConfig,
    rel_errors: &[f64],
    mc: &MCConfig,
) -> Result<Vec<SweepRow>> {
    rel_errors
        .iter()
        .map(|&rel_error| {
            let report = run_mc(rates, fit_cfg, &MCConfig { rel_error, ..mc.clone() })?;
            let span = report.direct.tc - report.direct.t0;
            Ok(SweepRow {
                rel_error,
                tc_span_std_pct: 100.0 * report.tc.std / span,
                gamma_std_pct: 100.0 * report.gamma_std / report.direct.gamma(),
                alpha_std: report.alpha.std,
                c0_std: report.c0.std,
                p0_std: report.p0.std,
                accepted: report.accepted,
                report,
            })
        })
        .collect()
}
