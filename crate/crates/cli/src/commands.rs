//! The four subcommands. Each returns what goes to standard output.

use std::f64::consts::LN_2;
use std::fmt::Write as _;
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use fts_core::montecarlo::{run_mc, sweep_error, MCConfig};
use fts_core::{
    build_price_index, fit, load_series, ChiDivisor, DayConvention, Epoch, FitConfig, FitResult, LinearParams,
    LoadConfig, ModelKind, ModelParams, Resolution, Series, SeriesKind, SingularityParams, TimeAxis, Units,
    YearAnchor,
};
use log::warn;

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::report::{AnalysisReport, McSummary};

pub const SOFTWARE: &str = concat!("fts ", env!("CARGO_PKG_VERSION"));

fn load(data: &DataArgs) -> CliResult<Series> {
    let cfg = LoadConfig {
        kind: match data.kind {
            KindArg::Rate => SeriesKind::Rate,
            KindArg::Index => SeriesKind::Index,
        },
        units: match data.units {
            UnitsArg::Fraction => Units::Fraction,
            UnitsArg::Percent => Units::Percent,
        },
        day_convention: match data.day_convention {
            DayArg::Mid => DayConvention::Mid,
            DayArg::End => DayConvention::End,
        },
        year_anchor: match data.year_anchor {
            AnchorArg::Start => YearAnchor::Start,
            AnchorArg::Mid => YearAnchor::Mid,
            AnchorArg::End => YearAnchor::End,
        },
    };
    Ok(load_series(&data.input, &cfg)?)
}

/// `FROM:TO` where each half is an epoch; `1921-05:1923-11` and
/// `1921:05:1923:11` both work.
pub fn parse_window(s: &str) -> CliResult<(Epoch, Epoch)> {
    let bad = || CliError::Input(format!("bad window '{s}', expected FROM:TO"));
    let (from, to) = if s.contains('-') {
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        (a.to_string(), b.to_string())
    } else {
        let parts: Vec<&str> = s.split(':').collect();
        if !matches!(parts.len(), 2 | 4 | 6) {
            return Err(bad());
        }
        let h = parts.len() / 2;
        (parts[..h].join(":"), parts[h..].join(":"))
    };
    let from = Epoch::parse(&from).ok_or_else(bad)?;
    let to = Epoch::parse(&to).ok_or_else(bad)?;
    if to < from {
        return Err(bad());
    }
    Ok((from, to))
}

fn fit_config(data: &DataArgs, model: ModelKind) -> CliResult<FitConfig> {
    Ok(FitConfig {
        model,
        window: data.window.as_deref().map(parse_window).transpose()?,
        chi_divisor: match data.chi_divisor {
            DivisorArg::N => ChiDivisor::N,
            DivisorArg::NMinusK => ChiDivisor::NMinusK,
        },
        ..FitConfig::default()
    })
}

fn dataset_name(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn report_from_fit(data: &DataArgs, series: &Series, result: &FitResult) -> AnalysisReport {
    AnalysisReport {
        software: SOFTWARE.into(),
        dataset: dataset_name(&data.input),
        kind: match series {
            Series::Rates(_) => SeriesKind::Rate,
            Series::Index(_) => SeriesKind::Index,
        },
        axis: result.axis,
        window: result.span,
        params: result.params,
        dt: result.dt,
        n_points: result.n_points(),
        chi: result.chi,
        chi_divisor: result.chi_divisor,
        converged: result.converged,
        iterations: result.iterations,
        mc: None,
    }
}

fn write_out(path: Option<&Path>, text: &str) -> CliResult<()> {
    if let Some(p) = path {
        std::fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

pub fn cmd_fit(args: &FitArgs) -> CliResult<String> {
    let series = load(&args.data)?;
    let model = match args.model {
        ModelArg::Linear => ModelKind::Linear,
        ModelArg::Doubleexp => ModelKind::DoubleExp,
        ModelArg::Singularity => ModelKind::Singularity,
    };
    let cfg = fit_config(&args.data, model)?;
    let result = fit(&series.to_index(), &cfg)?;
    if !result.converged {
        warn!("fit did not converge in {} iterations; best point reported", result.iterations);
    }
    let text = report_from_fit(&args.data, &series, &result).to_text();
    write_out(args.out.as_deref(), &text)?;
    Ok(text)
}

/// `FROM:TO:STEP` in percent, inclusive, as fractions.
pub fn parse_sweep(s: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Input(format!("bad sweep '{s}', expected FROM:TO:STEP in percent"));
    let v: Vec<f64> = s.split(':').map(|x| x.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad())?;
    let [from, to, step] = v[..] else { return Err(bad()) };
    if !(step > 0.0 && from >= 0.0 && to >= from) {
        return Err(bad());
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| (from + k as f64 * step) / 100.0).collect())
}

pub fn cmd_mc(args: &McArgs) -> CliResult<String> {
    let series = load(&args.data)?;
    let rates = series.to_rates()?;
    let fit_cfg = fit_config(&args.data, ModelKind::Singularity)?;
    let mc = MCConfig {
        rel_error: args.di,
        generations: args.m,
        seed: args.seed,
        threshold: args.threshold,
        histogram_bins: args.bins,
        workers: args.workers,
    };

    if let Some(spec) = &args.sweep {
        let rows = sweep_error(&rates, &fit_cfg, &parse_sweep(spec)?, &mc)?;
        let mut out = String::from("di_pct,tc_span_std_pct,gamma_std_pct,alpha_std,c0_std,p0_std,accepted,non_converged\n");
        for r in &rows {
            let _ = writeln!(
                out,
                "{:?},{:?},{:?},{:?},{:?},{:?},{},{}",
                r.rel_error * 100.0,
                r.tc_span_std_pct,
                r.gamma_std_pct,
                r.alpha_std,
                r.c0_std,
                r.p0_std,
                r.accepted,
                r.report.non_converged
            );
        }
        write_out(args.out.as_deref(), &out)?;
        return Ok(out);
    }

    let report = run_mc(&rates, &fit_cfg, &mc)?;
    let windowed = match &fit_cfg.window {
        Some((a, b)) => rates.window(a, b)?,
        None => rates,
    };
    let direct = fit(&build_price_index(&windowed), &FitConfig { window: None, ..fit_cfg })?;
    let mut analysis = report_from_fit(&args.data, &series, &direct);
    analysis.params = ModelParams::Singularity(report.direct);
    analysis.mc = Some(McSummary::from(&report));
    if report.unreliable {
        warn!("{} of {} generations did not converge", report.non_converged, report.generations);
    }
    let text = analysis.to_text();
    if let Some(path) = &args.histogram {
        let h = &report.tc_histogram;
        let mut csv = String::from("tc_lo,tc_hi,count\n");
        let w = h.bin_width();
        for (k, c) in h.counts.iter().enumerate() {
            let _ = writeln!(csv, "{:?},{:?},{c}", h.lo + k as f64 * w, h.lo + (k + 1) as f64 * w);
        }
        write_out(Some(path), &csv)?;
    }
    write_out(args.out.as_deref(), &text)?;
    Ok(text)
}

fn read_report(path: &Path) -> CliResult<AnalysisReport> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    AnalysisReport::parse(&text)
}

/// A date or a raw time coordinate on `axis`. Full dates on a yearly axis
/// become fractional years.
pub fn parse_time(axis: Option<&TimeAxis>, s: &str) -> CliResult<f64> {
    if let (Some(axis), Some(e)) = (axis, Epoch::parse(s)) {
        if let Ok(t) = axis.to_time(&e) {
            return Ok(t);
        }
        if let (TimeAxis::Yearly { .. }, Some(m), Some(d)) = (axis, e.month, e.day) {
            let date = NaiveDate::from_ymd_opt(e.year, m, d).expect("validated by Epoch::parse");
            let len = if date.leap_year() { 366.0 } else { 365.0 };
            return Ok(e.year as f64 + date.ordinal0() as f64 / len);
        }
        if axis.resolution() == Resolution::Monthly && e.resolution() == Resolution::Yearly {
            // fall through: a bare number is a day count on a monthly axis
        } else {
            return Err(CliError::Input(format!("'{s}' does not fit a {:?} axis", axis.resolution())));
        }
    }
    s.trim().parse().map_err(|_| CliError::Input(format!("bad time '{s}'")))
}

/// Log-price law behind a curve.
#[derive(Debug, Clone)]
pub enum CurveModel {
    Params(ModelParams),
    /// p = a + b (tc − t)^(−alpha)
    Ab { a: f64, b: f64, alpha: f64, tc: f64 },
}

impl CurveModel {
    pub fn tc(&self) -> Option<f64> {
        match self {
            CurveModel::Params(p) => p.critical_time(),
            CurveModel::Ab { tc, .. } => Some(*tc),
        }
    }

    pub fn log_price(&self, t: f64) -> CliResult<f64> {
        match self {
            CurveModel::Params(p) => Ok(p.eval(t)?),
            CurveModel::Ab { a, b, alpha, tc } => Ok(a + b * (tc - t).powf(-alpha)),
        }
    }

    pub fn slope(&self, t: f64) -> CliResult<f64> {
        match self {
            CurveModel::Params(p) => Ok(p.slope(t)?),
            CurveModel::Ab { b, alpha, tc, .. } => Ok(alpha * b * (tc - t).powf(-1.0 - alpha)),
        }
    }

    pub fn value(&self, q: Quantity, dt: f64, t: f64) -> CliResult<f64> {
        Ok(match q {
            Quantity::Logp => self.log_price(t)?,
            Quantity::Price => self.log_price(t)?.exp(),
            Quantity::Rate => dt * self.slope(t)?,
            Quantity::Doubling => {
                let s = self.slope(t)?;
                if s > 0.0 { LN_2 / s } else { f64::INFINITY }
            }
        })
    }
}

fn need(v: Option<f64>, name: &str) -> CliResult<f64> {
    v.ok_or_else(|| CliError::Input(format!("--{name} is required for explicit parameters")))
}

pub fn cmd_curve(args: &CurveArgs) -> CliResult<String> {
    let report = args.report.as_deref().map(read_report).transpose()?;
    let axis = report.as_ref().map(|r| r.axis);
    let (model, default_from, default_dt) = if let Some(r) = &report {
        (CurveModel::Params(r.params), Some(r.params.t0()), r.dt)
    } else if let Some(b) = args.b {
        let m = CurveModel::Ab { a: args.a.unwrap_or(0.0), b, alpha: need(args.alpha, "alpha")?, tc: need(args.tc, "tc")? };
        (m, None, 1.0)
    } else {
        let (c0, p0, t0) = (need(args.c0, "c0")?, need(args.p0, "p0")?, need(args.t0, "t0")?);
        let params = match (args.tc, args.alpha) {
            (Some(tc), Some(alpha)) => {
                let p = SingularityParams { tc, alpha, c0, p0, t0 };
                p.validate()?;
                ModelParams::Singularity(p)
            }
            (None, None) => ModelParams::Linear(LinearParams { p0, c0, t0 }),
            _ => return Err(CliError::Input("--tc and --alpha go together".into())),
        };
        (CurveModel::Params(params), Some(t0), 1.0)
    };
    let dt = args.dt.unwrap_or(default_dt);
    let tc = model.tc();

    let from = match (&args.from, args.before_tc, tc) {
        (Some(s), _, _) => parse_time(axis.as_ref(), s)?,
        (None, Some(span), Some(tc)) => tc - span,
        (None, Some(_), None) => return Err(CliError::Input("--before-tc needs a model with t_c".into())),
        (None, None, _) => default_from.ok_or_else(|| CliError::Input("--from or --before-tc is required".into()))?,
    };
    // Without an explicit end the grid stops one step short of t_c.
    let (to, inclusive) = match (&args.to, tc, &report) {
        (Some(s), _, _) => (parse_time(axis.as_ref(), s)?, true),
        (None, Some(tc), _) => (tc, false),
        (None, None, Some(r)) => (r.axis.to_time(&r.window.1)?, true),
        (None, None, None) => return Err(CliError::Input("--to is required without t_c".into())),
    };
    if to <= from || to.is_nan() || from.is_nan() || args.points < 2 {
        return Err(CliError::Input("empty curve range".into()));
    }
    let n = args.points;
    let denom = if inclusive { (n - 1) as f64 } else { n as f64 };
    let mut out = format!("t,{}\n", quantity_name(args.quantity));
    let mut clipped = 0;
    for k in 0..n {
        let t = from + (to - from) * k as f64 / denom;
        if tc.is_some_and(|tc| t >= tc) {
            clipped += 1;
            continue;
        }
        let _ = writeln!(out, "{t:?},{:?}", model.value(args.quantity, dt, t)?);
    }
    if clipped > 0 {
        warn!("{clipped} points at or beyond t_c were dropped");
    }
    write_out(args.out.as_deref(), &out)?;
    Ok(out)
}

fn quantity_name(q: Quantity) -> &'static str {
    match q {
        Quantity::Logp => "log_price",
        Quantity::Price => "price",
        Quantity::Rate => "rate",
        Quantity::Doubling => "doubling_time",
    }
}

/// Price level and year-over-year inflation at `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub t: f64,
    pub log_price: f64,
    pub price: f64,
    pub yoy: f64,
}

pub fn predict(report: &AnalysisReport, t: f64) -> CliResult<Prediction> {
    if let Some(tc) = report.params.critical_time() {
        if t >= tc {
            return Err(CliError::Fit(format!(
                "t = {t} is beyond singularity t_c = {tc} ({})",
                report.axis.format_time(tc)
            )));
        }
    }
    let log_price = report.params.eval(t)?;
    let prev = report.params.eval(t - report.axis.year_length())?;
    Ok(Prediction { t, log_price, price: log_price.exp(), yoy: (log_price - prev).exp_m1() })
}

pub fn cmd_predict(args: &PredictArgs) -> CliResult<String> {
    let report = read_report(&args.report)?;
    let t = parse_time(Some(&report.axis), &args.at)?;
    let p = predict(&report, t)?;
    let mut out = String::new();
    let _ = writeln!(out, "t = {:?}", p.t);
    let _ = writeln!(out, "date = {}", report.axis.format_time(p.t));
    let _ = writeln!(out, "log_price = {:?}", p.log_price);
    let _ = writeln!(out, "price = {:?}", p.price);
    let _ = writeln!(out, "log10_price = {:?}", p.log_price / std::f64::consts::LN_10);
    let _ = writeln!(out, "yoy_inflation_pct = {:?}", 100.0 * p.yoy);
    Ok(out)
}
