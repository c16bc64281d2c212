//! Closed-form log-price models and derived quantities.
//!
//! All prices are handled as p = ln P. Every parameter set carries its own
//! time origin `t0`, in the same units as the time coordinate of the data
//! (real years, or days for monthly series).

mod simulate;

pub use simulate::{ode_blowup_time, simulate_recursion, OdeBlowup, RecursionParams, RecursionTrace};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this |b₂ (t − t₀)| the double exponential uses its series expansion.
const DOUBLE_EXP_SERIES_THRESHOLD: f64 = 1e-8;

/// Cagan steady state: p(t) = p₀ + C₀ (t − t₀).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearParams {
    pub p0: f64,
    pub c0: f64,
    pub t0: f64,
}

impl LinearParams {
    pub fn eval(&self, t: f64) -> f64 {
        self.p0 + self.c0 * (t - self.t0)
    }
}

/// p(t) = p₀ + (C₀ / b₂) (e^{b₂ (t − t₀)} − 1), with b₂ ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleExpParams {
    pub p0: f64,
    pub c0: f64,
    pub b2: f64,
    pub t0: f64,
}

impl DoubleExpParams {
    pub fn eval(&self, t: f64) -> f64 {
        let tau = t - self.t0;
        let x = self.b2 * tau;
        if self.b2 == 0.0 {
            self.p0 + self.c0 * tau
        } else if x.abs() < DOUBLE_EXP_SERIES_THRESHOLD {
            self.p0 + self.c0 * tau * (1.0 + x / 2.0 + x * x / 6.0)
        } else {
            self.p0 + self.c0 * x.exp_m1() / self.b2
        }
    }

    /// Discrete feedback factor b = 1 + 2 b₂ Δt.
    pub fn feedback_factor(&self, dt: f64) -> f64 {
        1.0 + 2.0 * self.b2 * dt
    }
}

/// Finite-time singularity with diverging log-price (1 < γ < 2):
///
/// p(t) = p₀ + C₀ (t_c − t₀) / α · [((t_c − t₀) / (t_c − t))^α − 1]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularityParams {
    pub tc: f64,
    pub alpha: f64,
    pub c0: f64,
    pub p0: f64,
    pub t0: f64,
}

/// `(x^a − 1) / a` evaluated through `ln x`, stable as a → 0.
#[inline]
pub(crate) fn pow_minus_one_over(ln_x: f64, a: f64) -> f64 {
    if a == 0.0 {
        ln_x
    } else {
        (a * ln_x).exp_m1() / a
    }
}

impl SingularityParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.tc > self.t0 && self.alpha > 0.0 && self.c0 > 0.0 && self.p0.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "singularity params need t_c > t0, alpha > 0, C0 > 0: {self:?}"
            )))
        }
    }

    fn check_before_tc(&self, t: f64) -> Result<()> {
        if t < self.tc {
            Ok(())
        } else {
            Err(Error::AtSingularity { t, tc: self.tc })
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.check_before_tc(t)?;
        let span = self.tc - self.t0;
        let ln_ratio = (span / (self.tc - t)).ln();
        Ok(self.p0 + self.c0 * span * pow_minus_one_over(ln_ratio, self.alpha))
    }

    /// Growth rate per period, r(t) = C₀ Δt ((t_c − t₀)/(t_c − t))^{1+α}.
    pub fn growth_rate(&self, dt: f64, t: f64) -> Result<f64> {
        self.check_before_tc(t)?;
        let ratio = (self.tc - self.t0) / (self.tc - t);
        Ok(self.c0 * dt * ratio.powf(1.0 + self.alpha))
    }

    pub fn gamma(&self) -> f64 {
        (2.0 + self.alpha) / (1.0 + self.alpha)
    }

    /// Coefficients of the equivalent form p = A + B (t_c − t)^{−α}.
    pub fn ab_coefficients(&self) -> AbCoefficients {
        let span = self.tc - self.t0;
        AbCoefficients {
            a: self.p0 - self.c0 * span / self.alpha,
            b: self.c0 * span.powf(1.0 + self.alpha) / self.alpha,
        }
    }

    /// Time needed for the price to double, ln2/C₀ · ((t_c − t)/(t_c − t₀))^{1+α}.
    pub fn doubling_time(&self, t: f64) -> Result<f64> {
        self.check_before_tc(t)?;
        let ratio = (self.tc - t) / (self.tc - self.t0);
        Ok(std::f64::consts::LN_2 / self.c0 * ratio.powf(1.0 + self.alpha))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbCoefficients {
    pub a: f64,
    pub b: f64,
}

impl AbCoefficients {
    pub fn eval(&self, alpha: f64, time_to_tc: f64) -> f64 {
        self.a + self.b * time_to_tc.powf(-alpha)
    }
}

/// Doubling time from the (α, B) parameterisation: ln2/(α B) · (t_c − t)^{1+α}.
///
/// `time_to_tc` is t_c − t and must be positive.
pub fn doubling_time_ab(alpha: f64, b: f64, time_to_tc: f64) -> Result<f64> {
    if time_to_tc <= 0.0 {
        return Err(Error::AtSingularity { t: -time_to_tc, tc: 0.0 });
    }
    if alpha <= 0.0 || b <= 0.0 {
        return Err(Error::Domain(format!("doubling time needs alpha > 0 and B > 0, got {alpha}, {b}")));
    }
    Ok(std::f64::consts::LN_2 / (alpha * b) * time_to_tc.powf(1.0 + alpha))
}

/// Regime with γ > 2: the rate diverges but the log-price saturates.
///
/// p(t) = p₀ + C₀ (t_c − t₀)/α′ · [1 − ((t_c − t)/(t_c − t₀))^{α′}], 0 < α′ < 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeTwoParams {
    pub tc: f64,
    pub alpha_prime: f64,
    pub c0: f64,
    pub p0: f64,
    pub t0: f64,
}

impl RegimeTwoParams {
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t > self.tc {
            return Err(Error::AtSingularity { t, tc: self.tc });
        }
        let span = self.tc - self.t0;
        let ratio = (self.tc - t) / span;
        Ok(self.p0 + self.c0 * span / self.alpha_prime * (1.0 - ratio.powf(self.alpha_prime)))
    }

    /// Limiting log-price reached at t_c.
    pub fn plateau(&self) -> f64 {
        self.p0 + self.c0 * (self.tc - self.t0) / self.alpha_prime
    }
}

/// γ = (2 + α)/(1 + α).
pub fn alpha_to_gamma(alpha: f64) -> Result<f64> {
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must exceed -1, got {alpha}")));
    }
    Ok((2.0 + alpha) / (1.0 + alpha))
}

/// α = (2 − γ)/(γ − 1).
pub fn gamma_to_alpha(gamma: f64) -> Result<f64> {
    if !(gamma > 1.0) || !gamma.is_finite() {
        return Err(Error::Domain(format!("gamma must exceed 1, got {gamma}")));
    }
    Ok((2.0 - gamma) / (gamma - 1.0))
}

/// Blow-up time of dr/dt = a₁ r^γ started from r₀ at t₀:
/// t_c = t₀ + 1 / (a₁ (γ − 1) r₀^{γ−1}).
pub fn critical_time(r0: f64, gamma: f64, a1: f64, t0: f64) -> Result<f64> {
    if !(r0 > 0.0 && gamma > 1.0 && a1 > 0.0) || !(r0.is_finite() && gamma.is_finite() && a1.is_finite()) {
        return Err(Error::Domain(format!(
            "critical time needs r0 > 0, gamma > 1, a1 > 0; got {r0}, {gamma}, {a1}"
        )));
    }
    let g1 = gamma - 1.0;
    Ok(t0 + 1.0 / (a1 * g1 * r0.powf(g1)))
}

/// Growth rate of the continuum ODE at time t: r₀ ((t_c − t₀)/(t_c − t))^{1/(γ−1)}.
pub fn ode_rate(r0: f64, gamma: f64, tc: f64, t0: f64, t: f64) -> Result<f64> {
    if t >= tc {
        return Err(Error::AtSingularity { t, tc });
    }
    Ok(r0 * ((tc - t0) / (tc - t)).powf(1.0 / (gamma - 1.0)))
}

/// Any fitted model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModelParams {
    Linear(LinearParams),
    DoubleExp(DoubleExpParams),
    Singularity(SingularityParams),
}

impl ModelParams {
    pub fn eval(&self, t: f64) -> Result<f64> {
        match self {
            ModelParams::Linear(p) => Ok(p.eval(t)),
            ModelParams::DoubleExp(p) => Ok(p.eval(t)),
            ModelParams::Singularity(p) => p.eval(t),
        }
    }

    pub fn t0(&self) -> f64 {
        match self {
            ModelParams::Linear(p) => p.t0,
            ModelParams::DoubleExp(p) => p.t0,
            ModelParams::Singularity(p) => p.t0,
        }
    }

    pub fn p0(&self) -> f64 {
        match self {
            ModelParams::Linear(p) => p.p0,
            ModelParams::DoubleExp(p) => p.p0,
            ModelParams::Singularity(p) => p.p0,
        }
    }

    pub fn c0(&self) -> f64 {
        match self {
            ModelParams::Linear(p) => p.c0,
            ModelParams::DoubleExp(p) => p.c0,
            ModelParams::Singularity(p) => p.c0,
        }
    }

    /// Number of free parameters in the fit.
    pub fn dof(&self) -> usize {
        match self {
            ModelParams::Linear(_) => 2,
            ModelParams::DoubleExp(_) => 3,
            ModelParams::Singularity(_) => 4,
        }
    }

    /// dp/dt; the growth rate per period is Δt times this.
    pub fn slope(&self, t: f64) -> Result<f64> {
        match self {
            ModelParams::Linear(p) => Ok(p.c0),
            ModelParams::DoubleExp(p) => Ok(p.c0 * (p.b2 * (t - p.t0)).exp()),
            ModelParams::Singularity(p) => p.growth_rate(1.0, t),
        }
    }

    pub fn critical_time(&self) -> Option<f64> {
        self.singularity().map(|p| p.tc)
    }

    pub fn singularity(&self) -> Option<&SingularityParams> {
        match self {
            ModelParams::Singularity(p) => Some(p),
            _ => None,
        }
    }
}
