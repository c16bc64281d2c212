//! Synthetic datasets built from published singular-fit parameter rows.
//! Every value is generated, none is measured.

use chrono::NaiveDate;
use fts_core::series::DAYS_PER_MONTH;
use fts_core::{
    DayConvention, Epoch, LinearParams, PriceIndexSeries, Result, SingularityParams, TimeAxis,
};

/// Critical time as printed: a fractional year or a calendar day.
#[derive(Debug, Clone, Copy)]
pub enum Tc {
    Year(f64),
    Date(i32, u32, u32),
}

/// One published fit: window, t_c, α, C₀ per period and p₀.
#[derive(Debug, Clone, Copy)]
pub struct ParamRow {
    pub name: &'static str,
    pub first: Epoch,
    pub last: Epoch,
    pub convention: DayConvention,
    pub tc: Tc,
    pub alpha: f64,
    /// Per year for yearly rows, per month for monthly rows.
    pub c0_per_period: f64,
    pub p0: f64,
}

pub const PERU: ParamRow = ParamRow {
    name: "peru",
    first: Epoch { year: 1969, month: None, day: None },
    last: Epoch { year: 1990, month: None, day: None },
    convention: DayConvention::Mid,
    tc: Tc::Year(1991.29),
    alpha: 0.29,
    c0_per_period: 0.18,
    p0: -0.38,
};

// Index normalised to 1 in 1979, so the series starts there.
pub const ZIMBABWE: ParamRow = ParamRow {
    name: "zimbabwe",
    first: Epoch { year: 1979, month: None, day: None },
    last: Epoch { year: 2007, month: None, day: None },
    convention: DayConvention::Mid,
    tc: Tc::Year(2009.50),
    alpha: 0.79,
    c0_per_period: 0.08,
    p0: 0.10,
};

pub const GERMANY: ParamRow = ParamRow {
    name: "germany",
    first: Epoch { year: 1921, month: Some(5), day: None },
    last: Epoch { year: 1923, month: Some(11), day: None },
    convention: DayConvention::Mid,
    tc: Tc::Date(1924, 1, 5),
    alpha: 0.56,
    c0_per_period: 0.103,
    p0: 0.57,
};

pub const GREECE: ParamRow = ParamRow {
    name: "greece",
    first: Epoch { year: 1943, month: Some(2), day: None },
    last: Epoch { year: 1944, month: Some(10), day: None },
    convention: DayConvention::End,
    tc: Tc::Date(1944, 12, 2),
    alpha: 0.17,
    c0_per_period: 0.210,
    p0: 3.91,
};

pub const YUGOSLAVIA: ParamRow = ParamRow {
    name: "yugoslavia",
    first: Epoch { year: 1990, month: Some(12), day: None },
    last: Epoch { year: 1994, month: Some(1), day: None },
    convention: DayConvention::Mid,
    tc: Tc::Date(1994, 3, 10),
    alpha: 0.53,
    c0_per_period: 0.335,
    p0: -1.52,
};

pub const ROWS: [ParamRow; 5] = [PERU, ZIMBABWE, GERMANY, GREECE, YUGOSLAVIA];

/// Linear segment of the German series before the singular window.
pub const GERMANY_LINEAR: (Epoch, Epoch, f64, f64) =
    (Epoch { year: 1920, month: Some(1), day: None }, Epoch { year: 1921, month: Some(4), day: None }, -0.008, 0.64);

/// Consecutive epochs from `first` to `last` inclusive, at their resolution.
pub fn epoch_range(first: Epoch, last: Epoch) -> Vec<Epoch> {
    match first.month {
        None => (first.year..=last.year).map(Epoch::yearly).collect(),
        Some(m0) => {
            let mut out = Vec::new();
            let (mut y, mut m) = (first.year, m0);
            while (y, m) <= (last.year, last.month.unwrap_or(12)) {
                out.push(Epoch::monthly(y, m));
                m += 1;
                if m > 12 {
                    m = 1;
                    y += 1;
                }
            }
            out
        }
    }
}

impl ParamRow {
    /// Axis whose origin is the row's first epoch.
    pub fn axis(&self) -> TimeAxis {
        match self.first.month {
            None => TimeAxis::yearly(),
            Some(_) => TimeAxis::monthly(&self.first, self.convention).expect("valid epoch"),
        }
    }

    /// Parameters on `axis`, with t₀ at the row's first epoch.
    pub fn params_on(&self, axis: &TimeAxis) -> Result<SingularityParams> {
        let t0 = axis.to_time(&self.first)?;
        let (tc, c0) = match (self.tc, axis) {
            (Tc::Year(y), TimeAxis::Yearly { .. }) => (y, self.c0_per_period),
            (Tc::Date(y, m, d), TimeAxis::Monthly { origin, .. }) => {
                let date = NaiveDate::from_ymd_opt(y, m, d).expect("valid date");
                ((date - *origin).num_days() as f64, self.c0_per_period / DAYS_PER_MONTH)
            }
            _ => return Err(fts_core::Error::Domain(format!("{}: axis does not match t_c", self.name))),
        };
        Ok(SingularityParams { tc, alpha: self.alpha, c0, p0: self.p0, t0 })
    }

    pub fn params(&self) -> SingularityParams {
        self.params_on(&self.axis()).expect("row matches its own axis")
    }

    /// Noiseless index on the row's window.
    pub fn index(&self) -> PriceIndexSeries {
        let axis = self.axis();
        let p = self.params();
        let epochs = epoch_range(self.first, self.last);
        let values = epochs.iter().map(|e| p.eval(axis.to_time(e).unwrap()).unwrap().exp()).collect();
        PriceIndexSeries::new(axis, epochs, values).expect("generated series is valid")
    }
}

/// Germany from 1920:01: the linear law, then the singular law from 1921:05.
pub fn germany_full_index() -> PriceIndexSeries {
    let (lin_first, _, c0, p0) = GERMANY_LINEAR;
    let epochs = epoch_range(lin_first, GERMANY.last);
    let axis = TimeAxis::monthly(&lin_first, GERMANY.convention).unwrap();
    let sing = GERMANY.params_on(&axis).unwrap();
    let lin = LinearParams { p0, c0: c0 / DAYS_PER_MONTH, t0: 0.0 };
    let values = epochs
        .iter()
        .map(|e| {
            let t = axis.to_time(e).unwrap();
            if *e < GERMANY.first { lin.eval(t).exp() } else { sing.eval(t).unwrap().exp() }
        })
        .collect();
    PriceIndexSeries::new(axis, epochs, values).unwrap()
}

/// Index whose logs are 1 + k/2 exactly in floating point, so a linear fit
/// leaves no residual at all.
pub fn exact_line_index() -> PriceIndexSeries {
    let epochs = epoch_range(Epoch::yearly(2000), Epoch::yearly(2019));
    let values = (0..epochs.len())
        .map(|k| {
            let target = 1.0 + 0.5 * k as f64;
            let mut v = target.exp();
            for _ in 0..64 {
                let l = v.ln();
                if l == target {
                    break;
                }
                let bits = v.to_bits();
                v = f64::from_bits(if l < target { bits + 1 } else { bits - 1 });
            }
            v
        })
        .collect();
    PriceIndexSeries::new(TimeAxis::yearly(), epochs, values).unwrap()
}

/// `date,value` CSV with floats in shortest round-trip form.
pub fn to_csv(comment: &str, epochs: &[Epoch], values: &[f64]) -> String {
    let mut out = String::new();
    for line in comment.lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str("date,value\n");
    for (e, v) in epochs.iter().zip(values) {
        let date = match (e.month, e.day) {
            (None, _) => e.year.to_string(),
            (Some(m), None) => format!("{}-{m:02}", e.year),
            (Some(m), Some(d)) => format!("{}-{m:02}-{d:02}", e.year),
        };
        out.push_str(&format!("{date},{v:?}\n"));
    }
    out
}

/// (file name, contents) of every bundled fixture.
pub fn bundled() -> Vec<(&'static str, String)> {
    let mut out = Vec::new();
    let rates = PERU.index().to_rates().unwrap();
    out.push((
        "peru_synthetic.csv",
        to_csv(
            "SYNTHETIC yearly inflation rates (fractions), singular law tc=1991.29 alpha=0.29 C0=0.18 p0=-0.38\n--kind rate",
            rates.epochs(),
            rates.rates(),
        ),
    ));
    for (row, file, note) in [
        (ZIMBABWE, "zimbabwe_synthetic.csv", "tc=2009.50 alpha=0.79 C0=0.08 p0=0.10"),
        (GREECE, "greece_synthetic.csv", "tc=1944-12-02 alpha=0.17 C0=0.210/month p0=3.91, end-of-month"),
        (YUGOSLAVIA, "yugoslavia_synthetic.csv", "tc=1994-03-10 alpha=0.53 C0=0.335/month p0=-1.52"),
    ] {
        let idx = row.index();
        out.push((file, to_csv(&format!("SYNTHETIC price index, singular law {note}\n--kind index"), idx.epochs(), idx.values())));
    }
    let g = germany_full_index();
    out.push((
        "germany_synthetic.csv",
        to_csv(
            "SYNTHETIC price index: linear C0=-0.008/month p0=0.64 to 1921-04,\nthen singular tc=1924-01-05 alpha=0.56 C0=0.103/month p0=0.57\n--kind index",
            g.epochs(),
            g.values(),
        ),
    ));
    let line = exact_line_index();
    out.push(("exact_line.csv", to_csv("SYNTHETIC index with log = 1 + (t - 2000)/2\n--kind index", line.epochs(), line.values())));
    out
}
