//! Time axis, inflation-rate and price-index series, and CSV ingestion.
//!
//! Yearly data use the calendar year as a real coordinate. Monthly data use
//! days elapsed since the first epoch of the loaded file, so critical times
//! can be reported back as calendar dates with day precision.

use std::fmt;
use std::path::Path;

use chrono::{Datelike, Duration, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean Gregorian month length in days; the step Δt of monthly series.
pub const DAYS_PER_MONTH: f64 = 365.25 / 12.0;
/// Mean Gregorian year length in days.
pub const DAYS_PER_YEAR: f64 = 365.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Resolution {
    Yearly,
    Monthly,
}

/// Where inside a month a monthly observation without an explicit day sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DayConvention {
    /// Day 15.
    #[default]
    Mid,
    /// Last calendar day of the month.
    End,
}

/// Where inside a year a yearly observation sits on the real-year axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum YearAnchor {
    #[default]
    Start,
    Mid,
    End,
}

impl YearAnchor {
    pub fn offset(self) -> f64 {
        match self {
            YearAnchor::Start => 0.0,
            YearAnchor::Mid => 0.5,
            YearAnchor::End => 1.0,
        }
    }
}

/// A calendar date at yearly (`month == None`) or monthly resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Epoch {
    pub year: i32,
    pub month: Option<u32>,
    pub day: Option<u32>,
}

impl Epoch {
    pub fn yearly(year: i32) -> Self {
        Epoch { year, month: None, day: None }
    }

    pub fn monthly(year: i32, month: u32) -> Self {
        Epoch { year, month: Some(month), day: None }
    }

    pub fn date(year: i32, month: u32, day: u32) -> Self {
        Epoch { year, month: Some(month), day: Some(day) }
    }

    pub fn resolution(&self) -> Resolution {
        if self.month.is_some() {
            Resolution::Monthly
        } else {
            Resolution::Yearly
        }
    }

    /// Parses `YYYY`, `YYYY-MM` or `YYYY-MM-DD`. `:` is accepted as a separator too.
    pub fn parse(s: &str) -> Option<Epoch> {
        let s = s.trim();
        let parts: Vec<&str> = s.split(['-', ':']).collect();
        let num = |p: &str| -> Option<i64> {
            if p.is_empty() || !p.chars().all(|c| c.is_ascii_digit()) {
                return None;
            }
            p.parse().ok()
        };
        match parts.as_slice() {
            [y] if y.len() == 4 => Some(Epoch::yearly(num(y)? as i32)),
            [y, m] if y.len() == 4 => {
                let m = num(m)? as u32;
                (1..=12).contains(&m).then(|| Epoch::monthly(num(y).unwrap() as i32, m))
            }
            [y, m, d] if y.len() == 4 => {
                let (y, m, d) = (num(y)? as i32, num(m)? as u32, num(d)? as u32);
                NaiveDate::from_ymd_opt(y, m, d).map(|_| Epoch::date(y, m, d))
            }
            _ => None,
        }
    }

    /// Index of the month counted from year 0, used for spacing checks.
    fn month_index(&self) -> i64 {
        self.year as i64 * 12 + self.month.unwrap_or(1) as i64 - 1
    }

    fn resolve_date(&self, convention: DayConvention) -> Result<NaiveDate> {
        let month = self.month.unwrap_or(1);
        let day = match (self.day, convention) {
            (Some(d), _) => d,
            (None, DayConvention::Mid) => 15,
            (None, DayConvention::End) => last_day_of_month(self.year, month),
        };
        NaiveDate::from_ymd_opt(self.year, month, day)
            .ok_or_else(|| Error::Domain(format!("invalid calendar date {self}")))
    }
}

impl fmt::Display for Epoch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.month, self.day) {
            (None, _) => write!(f, "{}", self.year),
            (Some(m), None) => write!(f, "{}:{:02}", self.year, m),
            (Some(m), Some(d)) => write!(f, "{}:{:02}:{:02}", self.year, m, d),
        }
    }
}

fn last_day_of_month(year: i32, month: u32) -> u32 {
    let (ny, nm) = if month == 12 { (year + 1, 1) } else { (year, month + 1) };
    NaiveDate::from_ymd_opt(ny, nm, 1)
        .and_then(|d| d.pred_opt())
        .map(|d| d.day())
        .unwrap_or(28)
}

/// Maps epochs onto the continuous time coordinate of a series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TimeAxis {
    Yearly { anchor: YearAnchor },
    /// Days since `origin`.
    Monthly { origin: NaiveDate, convention: DayConvention },
}

impl TimeAxis {
    pub fn yearly() -> Self {
        TimeAxis::Yearly { anchor: YearAnchor::Start }
    }

    /// Monthly axis whose origin is `first` resolved under `convention`.
    pub fn monthly(first: &Epoch, convention: DayConvention) -> Result<Self> {
        let origin = first.resolve_date(convention)?;
        Ok(TimeAxis::Monthly { origin, convention })
    }

    pub fn resolution(&self) -> Resolution {
        match self {
            TimeAxis::Yearly { .. } => Resolution::Yearly,
            TimeAxis::Monthly { .. } => Resolution::Monthly,
        }
    }

    /// Sampling period Δt in coordinate units.
    pub fn step(&self) -> f64 {
        match self {
            TimeAxis::Yearly { .. } => 1.0,
            TimeAxis::Monthly { .. } => DAYS_PER_MONTH,
        }
    }

    /// One calendar year in coordinate units.
    pub fn year_length(&self) -> f64 {
        match self {
            TimeAxis::Yearly { .. } => 1.0,
            TimeAxis::Monthly { .. } => DAYS_PER_YEAR,
        }
    }

    pub fn to_time(&self, epoch: &Epoch) -> Result<f64> {
        match self {
            TimeAxis::Yearly { anchor } => {
                if epoch.resolution() != Resolution::Yearly {
                    return Err(Error::Domain(format!("monthly epoch {epoch} on a yearly axis")));
                }
                Ok(epoch.year as f64 + anchor.offset())
            }
            TimeAxis::Monthly { origin, convention } => {
                if epoch.resolution() != Resolution::Monthly {
                    return Err(Error::Domain(format!("yearly epoch {epoch} on a monthly axis")));
                }
                let date = epoch.resolve_date(*convention)?;
                Ok((date - *origin).num_days() as f64)
            }
        }
    }

    /// Calendar epoch nearest to coordinate `t` at the axis resolution.
    /// Monthly coordinates come back with an explicit day.
    pub fn to_epoch(&self, t: f64) -> Epoch {
        match self {
            TimeAxis::Yearly { anchor } => {
                Epoch::yearly((t - anchor.offset() + 1e-9).floor() as i32)
            }
            TimeAxis::Monthly { origin, .. } => {
                let date = *origin + Duration::days(t.round() as i64);
                Epoch::date(date.year(), date.month(), date.day())
            }
        }
    }

    /// Human-readable coordinate: fractional year, or `YYYY:MM:DD`.
    pub fn format_time(&self, t: f64) -> String {
        match self {
            TimeAxis::Yearly { .. } => format!("{t:.2}"),
            TimeAxis::Monthly { .. } => self.to_epoch(t).to_string(),
        }
    }
}

fn check_spacing(epochs: &[Epoch]) -> std::result::Result<(), (usize, String)> {
    for (k, pair) in epochs.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        if a.resolution() != b.resolution() {
            return Err((k + 1, format!("mixed resolution: {a} followed by {b}")));
        }
        if b <= a {
            return Err((k + 1, format!("epochs not strictly increasing: {a} then {b}")));
        }
        let gap = match a.resolution() {
            Resolution::Yearly => (b.year - a.year) as i64,
            Resolution::Monthly => b.month_index() - a.month_index(),
        };
        if gap != 1 {
            return Err((k + 1, format!("non-uniform spacing between {a} and {b}")));
        }
    }
    Ok(())
}

fn axis_times(axis: &TimeAxis, epochs: &[Epoch]) -> Result<Vec<f64>> {
    epochs.iter().map(|e| axis.to_time(e)).collect()
}

fn window_range(epochs: &[Epoch], from: &Epoch, to: &Epoch) -> Result<std::ops::Range<usize>> {
    let start = epochs.iter().position(|e| e >= from);
    let end = epochs.iter().rposition(|e| e <= to);
    match (start, end) {
        (Some(s), Some(e)) if s <= e => Ok(s..e + 1),
        _ => Err(Error::InvalidSeries(format!("window {from}..{to} selects no data"))),
    }
}

/// Per-period inflation rates i(t_k) as fractions, with i(t₀) = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct InflationSeries {
    axis: TimeAxis,
    epochs: Vec<Epoch>,
    times: Vec<f64>,
    rates: Vec<f64>,
}

impl InflationSeries {
    /// Validates spacing and positivity of the implied index. A nonzero first
    /// rate is reset to zero so that P(t₀) = 1.
    pub fn new(axis: TimeAxis, epochs: Vec<Epoch>, mut rates: Vec<f64>) -> Result<Self> {
        if epochs.is_empty() || epochs.len() != rates.len() {
            return Err(Error::InvalidSeries(format!(
                "need matching non-empty epochs and rates, got {} and {}",
                epochs.len(),
                rates.len()
            )));
        }
        check_spacing(&epochs).map_err(|(_, msg)| Error::InvalidSeries(msg))?;
        for (e, &i) in epochs.iter().zip(&rates) {
            if !i.is_finite() || i <= -1.0 {
                return Err(Error::InvalidSeries(format!(
                    "inflation rate {i} at {e} must be finite and > -1"
                )));
            }
        }
        if rates[0] != 0.0 {
            log::warn!("i(t0) = {} at {} reset to 0", rates[0], epochs[0]);
            rates[0] = 0.0;
        }
        let times = axis_times(&axis, &epochs)?;
        Ok(InflationSeries { axis, epochs, times, rates })
    }

    pub fn axis(&self) -> &TimeAxis {
        &self.axis
    }

    pub fn epochs(&self) -> &[Epoch] {
        &self.epochs
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    /// Same epochs with different rates; the first rate is forced to zero.
    pub fn with_rates(&self, rates: Vec<f64>) -> Result<Self> {
        InflationSeries::new(self.axis, self.epochs.clone(), rates)
    }

    /// Inclusive sub-series; the first selected rate becomes the new origin (i = 0).
    pub fn window(&self, from: &Epoch, to: &Epoch) -> Result<Self> {
        let range = window_range(&self.epochs, from, to)?;
        let mut rates = self.rates[range.clone()].to_vec();
        rates[0] = 0.0;
        InflationSeries::new(self.axis, self.epochs[range].to_vec(), rates)
    }
}

/// Cumulated price index P(t_k) and its natural log p(t_k).
#[derive(Debug, Clone, PartialEq)]
pub struct PriceIndexSeries {
    axis: TimeAxis,
    epochs: Vec<Epoch>,
    times: Vec<f64>,
    values: Vec<f64>,
    logs: Vec<f64>,
}

impl PriceIndexSeries {
    pub fn new(axis: TimeAxis, epochs: Vec<Epoch>, values: Vec<f64>) -> Result<Self> {
        if epochs.is_empty() || epochs.len() != values.len() {
            return Err(Error::InvalidSeries(format!(
                "need matching non-empty epochs and values, got {} and {}",
                epochs.len(),
                values.len()
            )));
        }
        check_spacing(&epochs).map_err(|(_, msg)| Error::InvalidSeries(msg))?;
        for (e, &v) in epochs.iter().zip(&values) {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidSeries(format!("price index {v} at {e} must be positive")));
            }
        }
        let times = axis_times(&axis, &epochs)?;
        let logs = values.iter().map(|v| v.ln()).collect();
        Ok(PriceIndexSeries { axis, epochs, times, values, logs })
    }

    pub fn axis(&self) -> &TimeAxis {
        &self.axis
    }

    pub fn epochs(&self) -> &[Epoch] {
        &self.epochs
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn log_values(&self) -> &[f64] {
        &self.logs
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.axis.step()
    }

    /// Time of the first entry.
    pub fn t0(&self) -> f64 {
        self.times[0]
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().expect("non-empty series")
    }

    pub fn window(&self, from: &Epoch, to: &Epoch) -> Result<Self> {
        let range = window_range(&self.epochs, from, to)?;
        PriceIndexSeries::new(self.axis, self.epochs[range.clone()].to_vec(), self.values[range].to_vec())
    }

    /// Per-period rates i_k = P_k / P_{k-1} - 1 with i_0 = 0.
    pub fn to_rates(&self) -> Result<InflationSeries> {
        let mut rates = Vec::with_capacity(self.len());
        rates.push(0.0);
        rates.extend(self.values.windows(2).map(|w| w[1] / w[0] - 1.0));
        InflationSeries::new(self.axis, self.epochs.clone(), rates)
    }
}

/// P(t_n) = ∏_{k ≤ n} (1 + i(t_k)); the first entry is exactly 1.
pub fn build_price_index(rates: &InflationSeries) -> PriceIndexSeries {
    let mut values = Vec::with_capacity(rates.len());
    let mut level = 1.0;
    for &i in &rates.rates {
        level *= 1.0 + i;
        values.push(level);
    }
    let logs = values.iter().map(|v: &f64| v.ln()).collect();
    PriceIndexSeries {
        axis: rates.axis,
        epochs: rates.epochs.clone(),
        times: rates.times.clone(),
        values,
        logs,
    }
}

/// One-period growth rates r(t_k) = p(t_{k+1}) - p(t_k), tagged with t_k.
pub fn growth_rates(index: &PriceIndexSeries) -> Result<Vec<(Epoch, f64)>> {
    if index.len() < 2 {
        return Err(Error::InvalidSeries("growth rates need at least 2 entries".into()));
    }
    Ok(index
        .logs
        .windows(2)
        .zip(&index.epochs)
        .map(|(w, e)| (*e, w[1] - w[0]))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SeriesKind {
    #[default]
    Rate,
    Index,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Units {
    #[default]
    Fraction,
    Percent,
}

/// How to interpret a `date,value` CSV file.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LoadConfig {
    pub kind: SeriesKind,
    /// Applies to rate files only; an index is scale free.
    pub units: Units,
    pub day_convention: DayConvention,
    pub year_anchor: YearAnchor,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Series {
    Rates(InflationSeries),
    Index(PriceIndexSeries),
}

impl Series {
    /// The price index, cumulating rates when needed.
    pub fn to_index(&self) -> PriceIndexSeries {
        match self {
            Series::Rates(r) => build_price_index(r),
            Series::Index(p) => p.clone(),
        }
    }

    /// The rate series, differencing the index when needed.
    pub fn to_rates(&self) -> Result<InflationSeries> {
        match self {
            Series::Rates(r) => Ok(r.clone()),
            Series::Index(p) => p.to_rates(),
        }
    }

    pub fn axis(&self) -> &TimeAxis {
        match self {
            Series::Rates(r) => r.axis(),
            Series::Index(p) => p.axis(),
        }
    }
}

pub fn load_series(path: impl AsRef<Path>, config: &LoadConfig) -> Result<Series> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_series(&text, config)
}

/// Parses CSV text with an optional header row.
pub fn parse_series(text: &str, config: &LoadConfig) -> Result<Series> {
    let mut epochs: Vec<Epoch> = Vec::new();
    let mut values = Vec::new();
    let mut lines = Vec::new();
    let mut seen_row = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim().trim_start_matches('\u{feff}');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let first_row = !seen_row;
        seen_row = true;
        let parse_err = |message: String| Error::Parse { line: line_no, message };
        if fields.len() != 2 {
            if first_row {
                continue;
            }
            return Err(parse_err(format!("expected 2 fields, found {}", fields.len())));
        }
        let epoch = match Epoch::parse(fields[0]) {
            Some(e) => e,
            None if first_row => continue,
            None => return Err(parse_err(format!("bad date '{}'", fields[0]))),
        };
        let value: f64 = fields[1]
            .parse()
            .map_err(|_| parse_err(format!("bad value '{}'", fields[1])))?;
        if !value.is_finite() {
            return Err(parse_err(format!("non-finite value '{}'", fields[1])));
        }
        epochs.push(epoch);
        values.push(value);
        lines.push(line_no);
    }

    if epochs.is_empty() {
        return Err(Error::Parse { line: 0, message: "no data rows".into() });
    }
    if let Err((k, message)) = check_spacing(&epochs) {
        return Err(Error::Parse { line: lines[k], message });
    }

    let axis = match epochs[0].resolution() {
        Resolution::Yearly => TimeAxis::Yearly { anchor: config.year_anchor },
        Resolution::Monthly => TimeAxis::monthly(&epochs[0], config.day_convention)?,
    };

    match config.kind {
        SeriesKind::Rate => {
            let scale = match config.units {
                Units::Fraction => 1.0,
                Units::Percent => 0.01,
            };
            let rates: Vec<f64> = values.iter().map(|v| v * scale).collect();
            if let Some(k) = rates.iter().position(|&i| i <= -1.0) {
                return Err(Error::Parse {
                    line: lines[k],
                    message: format!("rate {} at {} implies a non-positive index", rates[k], epochs[k]),
                });
            }
            Ok(Series::Rates(InflationSeries::new(axis, epochs, rates)?))
        }
        SeriesKind::Index => {
            if let Some(k) = values.iter().position(|&v| v <= 0.0) {
                return Err(Error::Parse {
                    line: lines[k],
                    message: format!("price index {} at {} must be positive", values[k], epochs[k]),
                });
            }
            Ok(Series::Index(PriceIndexSeries::new(axis, epochs, values)?))
        }
    }
}
