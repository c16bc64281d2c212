//! Fits of hyperinflation price indexes to the Cagan linear law, the double
//! exponential, and the finite-time-singularity power law, with Monte Carlo
//! propagation of measurement errors on inflation rates.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail these checks

pub mod error;
pub mod fitting;
pub mod models;
pub mod montecarlo;
mod optim;
pub mod series;

pub use error::{Error, Result};
pub use fitting::{fit, fit_double_exp, fit_linear, fit_singularity, ChiDivisor, FitConfig, FitResult, ModelKind};
pub use models::{
    alpha_to_gamma, critical_time, doubling_time_ab, gamma_to_alpha, AbCoefficients, DoubleExpParams,
    LinearParams, ModelParams, RegimeTwoParams, SingularityParams,
};
pub use series::{
    build_price_index, growth_rates, load_series, parse_series, DayConvention, Epoch, InflationSeries,
    LoadConfig, PriceIndexSeries, Resolution, Series, SeriesKind, TimeAxis, Units, YearAnchor,
};
