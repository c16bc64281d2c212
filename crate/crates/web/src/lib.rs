//! WebAssembly bindings for the static demo in `www/`.
//!
//! The `*_json` functions do the work and are plain Rust, so they are tested
//! natively; the exported wrappers only convert errors to `JsValue`.

use fts_core::montecarlo::{run_mc, MCConfig};
use fts_core::{
    fit, parse_series, FitConfig, LoadConfig, ModelKind, ModelParams, SeriesKind, SingularityParams, TimeAxis, Units,
};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn load_config(kind: &str, percent: bool) -> Result<LoadConfig, String> {
    let kind = match kind {
        "rate" => SeriesKind::Rate,
        "index" => SeriesKind::Index,
        other => return Err(format!("unknown kind '{other}'")),
    };
    let units = if percent { Units::Percent } else { Units::Fraction };
    Ok(LoadConfig { kind, units, ..Default::default() })
}

fn params_json(p: &ModelParams, axis: &TimeAxis) -> Value {
    match p {
        ModelParams::Linear(l) => json!({"model": "linear", "t0": l.t0, "p0": l.p0, "c0": l.c0}),
        ModelParams::DoubleExp(d) => json!({"model": "doubleexp", "t0": d.t0, "p0": d.p0, "c0": d.c0, "b2": d.b2}),
        ModelParams::Singularity(s) => {
            let ab = s.ab_coefficients();
            json!({
                "model": "singularity", "t0": s.t0, "p0": s.p0, "c0": s.c0, "tc": s.tc, "alpha": s.alpha,
                "gamma": s.gamma(), "a": ab.a, "b": ab.b, "tc_calendar": axis.format_time(s.tc),
            })
        }
    }
}

/// Fits `csv` and returns parameters, data points and a dense model curve.
pub fn fit_csv_json(csv: &str, kind: &str, percent: bool, model: &str) -> Result<String, String> {
    let model = match model {
        "linear" => ModelKind::Linear,
        "doubleexp" => ModelKind::DoubleExp,
        "singularity" => ModelKind::Singularity,
        other => return Err(format!("unknown model '{other}'")),
    };
    let index = parse_series(csv, &load_config(kind, percent)?).map_err(|e| e.to_string())?.to_index();
    let res = fit(&index, &FitConfig::with_model(model)).map_err(|e| e.to_string())?;
    let data: Vec<[f64; 2]> = index.times().iter().zip(index.log_values()).map(|(t, p)| [*t, *p]).collect();
    let (lo, last) = (index.t0(), index.last_time());
    let hi = res.params.critical_time().map_or(last, |tc| tc.min(last + 0.5 * (last - lo)));
    let n = 300;
    let curve: Vec<[f64; 2]> = (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / n as f64)
        .filter_map(|t| res.params.eval(t).ok().map(|p| [t, p]))
        .collect();
    Ok(json!({
        "params": params_json(&res.params, &res.axis),
        "chi": res.chi,
        "converged": res.converged,
        "time_unit": match res.axis { TimeAxis::Yearly { .. } => "year", TimeAxis::Monthly { .. } => "day" },
        "data": data,
        "curve": curve,
    })
    .to_string())
}

/// log-price, per-period rate and doubling time on `n` points from t0 up to
/// (not including) tc.
pub fn curves_json(tc: f64, alpha: f64, c0: f64, p0: f64, t0: f64, dt: f64, n: usize) -> Result<String, String> {
    let p = SingularityParams { tc, alpha, c0, p0, t0 };
    p.validate().map_err(|e| e.to_string())?;
    if n < 2 {
        return Err("need at least 2 points".into());
    }
    let (mut t, mut logp, mut rate, mut doubling) = (vec![], vec![], vec![], vec![]);
    for k in 0..n {
        let x = t0 + (tc - t0) * k as f64 / n as f64;
        t.push(x);
        logp.push(p.eval(x).map_err(|e| e.to_string())?);
        rate.push(p.growth_rate(dt, x).map_err(|e| e.to_string())?);
        doubling.push(p.doubling_time(x).map_err(|e| e.to_string())?);
    }
    Ok(json!({"t": t, "logp": logp, "rate": rate, "doubling": doubling, "gamma": p.gamma()}).to_string())
}

/// Monte Carlo run on a rate (or index) CSV; returns the t_c histogram and summary.
pub fn mc_histogram_json(
    csv: &str,
    kind: &str,
    percent: bool,
    rel_error: f64,
    generations: usize,
    seed: u64,
    bins: usize,
) -> Result<String, String> {
    let rates = parse_series(csv, &load_config(kind, percent)?)
        .and_then(|s| s.to_rates())
        .map_err(|e| e.to_string())?;
    let mc = MCConfig { rel_error, generations, seed, histogram_bins: bins, ..Default::default() };
    let r = run_mc(&rates, &FitConfig::default(), &mc).map_err(|e| e.to_string())?;
    let h = &r.tc_histogram;
    Ok(json!({
        "direct_tc": r.direct.tc,
        "tc_calendar": rates.axis().format_time(r.direct.tc),
        "tc_mean": r.tc.mean,
        "tc_std": r.tc.std,
        "skewness": r.tc_skewness,
        "accepted": r.accepted,
        "non_converged": r.non_converged,
        "lo": h.lo,
        "hi": h.hi,
        "counts": h.counts,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn fit_csv(csv: &str, kind: &str, percent: bool, model: &str) -> Result<String, JsValue> {
    fit_csv_json(csv, kind, percent, model).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn model_curves(tc: f64, alpha: f64, c0: f64, p0: f64, t0: f64, dt: f64, n: usize) -> Result<String, JsValue> {
    curves_json(tc, alpha, c0, p0, t0, dt, n).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn mc_histogram(
    csv: &str,
    kind: &str,
    percent: bool,
    rel_error: f64,
    generations: usize,
    seed: u64,
    bins: usize,
) -> Result<String, JsValue> {
    mc_histogram_json(csv, kind, percent, rel_error, generations, seed, bins).map_err(|e| JsValue::from_str(&e))
}
