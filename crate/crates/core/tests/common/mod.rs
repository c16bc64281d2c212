#![allow(dead_code, clippy::too_many_arguments)]

use fts_core::{Epoch, InflationSeries, PriceIndexSeries, SingularityParams, TimeAxis};

/// Adaptive Simpson quadrature of `f` on [a, b].
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

pub fn yearly_epochs(from: i32, to: i32) -> Vec<Epoch> {
    (from..=to).map(Epoch::yearly).collect()
}

/// Index series sampled from a log-price function on yearly epochs.
pub fn yearly_index(from: i32, to: i32, mut p: impl FnMut(f64) -> f64) -> PriceIndexSeries {
    let epochs = yearly_epochs(from, to);
    let values = epochs.iter().map(|e| p(e.year as f64).exp()).collect();
    PriceIndexSeries::new(TimeAxis::yearly(), epochs, values).unwrap()
}

pub fn peru() -> SingularityParams {
    SingularityParams { tc: 1991.29, alpha: 0.29, c0: 0.18, p0: -0.38, t0: 1969.0 }
}

pub fn peru_index() -> PriceIndexSeries {
    let p = peru();
    yearly_index(1969, 1990, |t| p.eval(t).unwrap())
}

pub fn peru_rates() -> InflationSeries {
    peru_index().to_rates().unwrap()
}

/// Monthly index of `n` months sampled from a singular law; times are days
/// from `first`.
pub fn monthly_index(
    first: Epoch,
    n: usize,
    convention: fts_core::DayConvention,
    params: &SingularityParams,
) -> PriceIndexSeries {
    let axis = TimeAxis::monthly(&first, convention).unwrap();
    let mut epochs = Vec::with_capacity(n);
    let (mut y, mut m) = (first.year, first.month.unwrap());
    for _ in 0..n {
        epochs.push(Epoch::monthly(y, m));
        m += 1;
        if m > 12 {
            m = 1;
            y += 1;
        }
    }
    let values = epochs.iter().map(|e| params.eval(axis.to_time(e).unwrap()).unwrap().exp()).collect();
    PriceIndexSeries::new(axis, epochs, values).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}
