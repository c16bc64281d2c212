//! Flat `key = value` analysis report, versioned and lossless for floats.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use chrono::NaiveDate;
use fts_core::montecarlo::{MCReport, ParamStats};
use fts_core::{
    ChiDivisor, DayConvention, DoubleExpParams, Epoch, LinearParams, ModelParams, SeriesKind, SingularityParams,
    TimeAxis, YearAnchor,
};

use crate::error::{CliError, CliResult};

pub const REPORT_FORMAT: &str = "fts-report";
pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub software: String,
    pub dataset: String,
    pub kind: SeriesKind,
    pub axis: TimeAxis,
    /// First and last fitted epochs.
    pub window: (Epoch, Epoch),
    pub params: ModelParams,
    pub dt: f64,
    pub n_points: usize,
    pub chi: f64,
    pub chi_divisor: ChiDivisor,
    pub converged: bool,
    pub iterations: usize,
    pub mc: Option<McSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McSummary {
    pub rel_error: f64,
    pub generations: usize,
    pub seed: u64,
    pub threshold: f64,
    pub tc: ParamStats,
    pub alpha: ParamStats,
    pub c0: ParamStats,
    pub p0: ParamStats,
    pub gamma_mean: f64,
    pub gamma_std: f64,
    pub accepted: bool,
    pub non_converged: usize,
    pub truncations: usize,
    pub unreliable: bool,
    pub tc_skewness: f64,
    pub tc_excess_kurtosis: f64,
    pub tc_gaussian: bool,
}

impl From<&MCReport> for McSummary {
    fn from(r: &MCReport) -> Self {
        McSummary {
            rel_error: r.rel_error,
            generations: r.generations,
            seed: r.seed,
            threshold: r.threshold,
            tc: r.tc,
            alpha: r.alpha,
            c0: r.c0,
            p0: r.p0,
            gamma_mean: r.gamma_mean,
            gamma_std: r.gamma_std,
            accepted: r.accepted,
            non_converged: r.non_converged,
            truncations: r.truncations,
            unreliable: r.unreliable,
            tc_skewness: r.tc_skewness,
            tc_excess_kurtosis: r.tc_excess_kurtosis,
            tc_gaussian: r.tc_gaussian,
        }
    }
}

pub fn model_name(params: &ModelParams) -> &'static str {
    match params {
        ModelParams::Linear(_) => "linear",
        ModelParams::DoubleExp(_) => "doubleexp",
        ModelParams::Singularity(_) => "singularity",
    }
}

pub fn format_axis(axis: &TimeAxis) -> String {
    match axis {
        TimeAxis::Yearly { anchor } => {
            let a = match anchor {
                YearAnchor::Start => "start",
                YearAnchor::Mid => "mid",
                YearAnchor::End => "end",
            };
            format!("yearly:{a}")
        }
        TimeAxis::Monthly { origin, convention } => {
            let c = match convention {
                DayConvention::Mid => "mid",
                DayConvention::End => "end",
            };
            format!("monthly:{}:{c}", origin.format("%Y-%m-%d"))
        }
    }
}

pub fn parse_axis(s: &str) -> Option<TimeAxis> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["yearly", a] => {
            let anchor = match *a {
                "start" => YearAnchor::Start,
                "mid" => YearAnchor::Mid,
                "end" => YearAnchor::End,
                _ => return None,
            };
            Some(TimeAxis::Yearly { anchor })
        }
        ["monthly", date, c] => {
            let origin = NaiveDate::parse_from_str(date, "%Y-%m-%d").ok()?;
            let convention = match *c {
                "mid" => DayConvention::Mid,
                "end" => DayConvention::End,
                _ => return None,
            };
            Some(TimeAxis::Monthly { origin, convention })
        }
        _ => None,
    }
}

/// t_c as a calendar string, with the Monte Carlo spread when known.
pub fn tc_calendar(axis: &TimeAxis, tc: f64, std: Option<f64>) -> String {
    let date = axis.format_time(tc);
    match (axis, std) {
        (_, None) => date,
        (TimeAxis::Yearly { .. }, Some(s)) => format!("{date} ± {s:.2} yr"),
        (TimeAxis::Monthly { .. }, Some(s)) => format!("{date} ± {s:.0} d"),
    }
}

fn time_unit(axis: &TimeAxis) -> &'static str {
    match axis {
        TimeAxis::Yearly { .. } => "year",
        TimeAxis::Monthly { .. } => "day",
    }
}

fn kind_name(kind: SeriesKind) -> &'static str {
    match kind {
        SeriesKind::Rate => "rate",
        SeriesKind::Index => "index",
    }
}

fn divisor_name(d: ChiDivisor) -> &'static str {
    match d {
        ChiDivisor::N => "n",
        ChiDivisor::NMinusK => "n-k",
    }
}

impl AnalysisReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("format", REPORT_FORMAT.into());
        kv("version", REPORT_VERSION.to_string());
        kv("software", self.software.clone());
        kv("dataset", self.dataset.clone());
        kv("kind", kind_name(self.kind).into());
        kv("axis", format_axis(&self.axis));
        kv("time_unit", time_unit(&self.axis).into());
        kv("window.from", self.window.0.to_string());
        kv("window.to", self.window.1.to_string());
        kv("model", model_name(&self.params).into());
        kv("dt", format!("{:?}", self.dt));
        kv("n_points", self.n_points.to_string());
        kv("chi", format!("{:?}", self.chi));
        kv("chi_divisor", divisor_name(self.chi_divisor).into());
        kv("converged", self.converged.to_string());
        kv("iterations", self.iterations.to_string());
        kv("param.t0", format!("{:?}", self.params.t0()));
        kv("param.p0", format!("{:?}", self.params.p0()));
        kv("param.c0", format!("{:?}", self.params.c0()));
        match &self.params {
            ModelParams::Linear(_) => {}
            ModelParams::DoubleExp(p) => kv("param.b2", format!("{:?}", p.b2)),
            ModelParams::Singularity(p) => {
                kv("param.tc", format!("{:?}", p.tc));
                kv("param.alpha", format!("{:?}", p.alpha));
                let ab = p.ab_coefficients();
                kv("derived.gamma", format!("{:?}", p.gamma()));
                kv("derived.A", format!("{:?}", ab.a));
                kv("derived.B", format!("{:?}", ab.b));
                let std = self.mc.as_ref().map(|m| m.tc.std);
                kv("derived.tc_calendar", tc_calendar(&self.axis, p.tc, std));
            }
        }
        if let Some(m) = &self.mc {
            kv("mc.rel_error", format!("{:?}", m.rel_error));
            kv("mc.generations", m.generations.to_string());
            kv("mc.seed", m.seed.to_string());
            kv("mc.threshold", format!("{:?}", m.threshold));
            for (name, s) in [("tc", &m.tc), ("alpha", &m.alpha), ("c0", &m.c0), ("p0", &m.p0)] {
                kv(&format!("mc.{name}.direct"), format!("{:?}", s.direct));
                kv(&format!("mc.{name}.mean"), format!("{:?}", s.mean));
                kv(&format!("mc.{name}.std"), format!("{:?}", s.std));
                kv(&format!("mc.{name}.ratio"), format!("{:?}", s.ratio));
                kv(&format!("mc.{name}.accepted"), s.accepted.to_string());
            }
            kv("mc.gamma.mean", format!("{:?}", m.gamma_mean));
            kv("mc.gamma.std", format!("{:?}", m.gamma_std));
            kv("mc.accepted", m.accepted.to_string());
            kv("mc.non_converged", m.non_converged.to_string());
            kv("mc.truncations", m.truncations.to_string());
            kv("mc.unreliable", m.unreliable.to_string());
            kv("mc.tc.skewness", format!("{:?}", m.tc_skewness));
            kv("mc.tc.excess_kurtosis", format!("{:?}", m.tc_excess_kurtosis));
            kv("mc.tc.gaussian", m.tc_gaussian.to_string());
        }
        out
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let mut map = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Input(format!("report line {}: expected key = value", n + 1)))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        let r = Fields(&map);
        if r.str("format")? != REPORT_FORMAT {
            return Err(CliError::Input("not an fts report".into()));
        }
        let version: u32 = r.num("version")?;
        if version != REPORT_VERSION {
            return Err(CliError::Input(format!("unsupported report version {version}")));
        }
        let kind = match r.str("kind")? {
            "rate" => SeriesKind::Rate,
            "index" => SeriesKind::Index,
            other => return Err(CliError::Input(format!("report: bad kind '{other}'"))),
        };
        let axis = parse_axis(r.str("axis")?).ok_or_else(|| CliError::Input("report: bad axis".into()))?;
        let epoch = |k: &str| -> CliResult<Epoch> {
            let s = r.str(k)?;
            Epoch::parse(s).ok_or_else(|| CliError::Input(format!("report: bad epoch '{s}' for {k}")))
        };
        let (t0, p0, c0) = (r.num("param.t0")?, r.num("param.p0")?, r.num("param.c0")?);
        let params = match r.str("model")? {
            "linear" => ModelParams::Linear(LinearParams { p0, c0, t0 }),
            "doubleexp" => ModelParams::DoubleExp(DoubleExpParams { p0, c0, b2: r.num("param.b2")?, t0 }),
            "singularity" => ModelParams::Singularity(SingularityParams {
                tc: r.num("param.tc")?,
                alpha: r.num("param.alpha")?,
                c0,
                p0,
                t0,
            }),
            other => return Err(CliError::Input(format!("report: unknown model '{other}'"))),
        };
        let chi_divisor = match r.str("chi_divisor")? {
            "n" => ChiDivisor::N,
            "n-k" => ChiDivisor::NMinusK,
            other => return Err(CliError::Input(format!("report: bad chi_divisor '{other}'"))),
        };
        let mc = if map.contains_key("mc.rel_error") {
            let stats = |name: &str| -> CliResult<ParamStats> {
                Ok(ParamStats {
                    direct: r.num(&format!("mc.{name}.direct"))?,
                    mean: r.num(&format!("mc.{name}.mean"))?,
                    std: r.num(&format!("mc.{name}.std"))?,
                    ratio: r.num(&format!("mc.{name}.ratio"))?,
                    accepted: r.num(&format!("mc.{name}.accepted"))?,
                })
            };
            Some(McSummary {
                rel_error: r.num("mc.rel_error")?,
                generations: r.num("mc.generations")?,
                seed: r.num("mc.seed")?,
                threshold: r.num("mc.threshold")?,
                tc: stats("tc")?,
                alpha: stats("alpha")?,
                c0: stats("c0")?,
                p0: stats("p0")?,
                gamma_mean: r.num("mc.gamma.mean")?,
                gamma_std: r.num("mc.gamma.std")?,
                accepted: r.num("mc.accepted")?,
                non_converged: r.num("mc.non_converged")?,
                truncations: r.num("mc.truncations")?,
                unreliable: r.num("mc.unreliable")?,
                tc_skewness: r.num("mc.tc.skewness")?,
                tc_excess_kurtosis: r.num("mc.tc.excess_kurtosis")?,
                tc_gaussian: r.num("mc.tc.gaussian")?,
            })
        } else {
            None
        };
        Ok(AnalysisReport {
            software: r.str("software")?.to_string(),
            dataset: r.str("dataset")?.to_string(),
            kind,
            axis,
            window: (epoch("window.from")?, epoch("window.to")?),
            params,
            dt: r.num("dt")?,
            n_points: r.num("n_points")?,
            chi: r.num("chi")?,
            chi_divisor,
            converged: r.num("converged")?,
            iterations: r.num("iterations")?,
            mc,
        })
    }
}

struct Fields<'a>(&'a BTreeMap<String, String>);

impl Fields<'_> {
    fn str(&self, key: &str) -> CliResult<&str> {
        self.0
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| CliError::Input(format!("report: missing key '{key}'")))
    }

    fn num<T: std::str::FromStr>(&self, key: &str) -> CliResult<T> {
        let s = self.str(key)?;
        s.parse().map_err(|_| CliError::Input(format!("report: bad value '{s}' for {key}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(mc: bool) -> AnalysisReport {
        let stats = ParamStats { direct: 1991.29, mean: 1991.3000000000002, std: 0.37, ratio: 0.027, accepted: true };
        AnalysisReport {
            software: "fts 0.1.0".into(),
            dataset: "peru.csv".into(),
            kind: SeriesKind::Rate,
            axis: TimeAxis::yearly(),
            window: (Epoch::yearly(1969), Epoch::yearly(1990)),
            params: ModelParams::Singularity(SingularityParams {
                tc: 1991.2900000000004,
                alpha: 0.29,
                c0: 0.18,
                p0: -0.38,
                t0: 1969.0,
            }),
            dt: 1.0,
            n_points: 22,
            chi: 1.234e-17,
            chi_divisor: ChiDivisor::N,
            converged: true,
            iterations: 7,
            mc: mc.then(|| McSummary {
                rel_error: 0.25,
                generations: 4000,
                seed: 42,
                threshold: 0.1,
                tc: stats,
                alpha: stats,
                c0: stats,
                p0: stats,
                gamma_mean: 1.78,
                gamma_std: 0.08,
                accepted: true,
                non_converged: 0,
                truncations: 3,
                unreliable: false,
                tc_skewness: f64::INFINITY,
                tc_excess_kurtosis: -0.1,
                tc_gaussian: true,
            }),
        }
    }

    #[test]
    fn round_trips_losslessly() {
        for mc in [false, true] {
            let r = sample(mc);
            assert_eq!(AnalysisReport::parse(&r.to_text()).unwrap(), r);
        }
    }

    #[test]
    fn monthly_axis_round_trips() {
        let axis = TimeAxis::Monthly {
            origin: NaiveDate::from_ymd_opt(1921, 5, 15).unwrap(),
            convention: DayConvention::End,
        };
        assert_eq!(parse_axis(&format_axis(&axis)), Some(axis));
    }

    #[test]
    fn calendar_strings() {
        let axis = TimeAxis::Monthly { origin: NaiveDate::from_ymd_opt(1990, 12, 15).unwrap(), convention: DayConvention::Mid };
        let tc = (NaiveDate::from_ymd_opt(1994, 3, 10).unwrap() - NaiveDate::from_ymd_opt(1990, 12, 15).unwrap())
            .num_days() as f64;
        assert_eq!(tc_calendar(&axis, tc, Some(4.2)), "1994:03:10 ± 4 d");
        assert_eq!(tc_calendar(&TimeAxis::yearly(), 1991.29, Some(0.37)), "1991.29 ± 0.37 yr");
    }

    #[test]
    fn rejects_foreign_text() {
        assert!(AnalysisReport::parse("format = other\n").is_err());
        assert!(AnalysisReport::parse("garbage").is_err());
    }
}
