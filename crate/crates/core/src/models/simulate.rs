//! Discrete feedback recursion and the continuum growth-rate ODE.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of r(t + Δt) = r(t − Δt) + a · r(t − Δt)^γ.
///
/// `a1` is the continuum coefficient of dr/dt = a₁ r^γ; the two are tied by
/// a = 2 a₁ Δt when the recursion is built with [`RecursionParams::from_continuum`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecursionParams {
    pub r0: f64,
    pub a: f64,
    pub gamma: f64,
    pub dt: f64,
    pub a1: f64,
}

impl RecursionParams {
    pub fn from_continuum(r0: f64, gamma: f64, a1: f64, dt: f64) -> Self {
        RecursionParams { r0, a: 2.0 * a1 * dt, gamma, dt, a1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionTrace {
    /// r at steps 0, 1, 2, …; step k sits at t₀ + k Δt.
    pub rates: Vec<f64>,
    /// Step at which the next value overflowed, if it did.
    pub blowup_step: Option<usize>,
}

impl RecursionTrace {
    pub fn first_step_above(&self, threshold: f64) -> Option<usize> {
        self.rates.iter().position(|&r| r > threshold)
    }
}

/// Iterates the feedback recursion for `n_steps` values.
///
/// Even and odd steps form two independent maps with stride 2Δt, both seeded
/// with r₀. Iteration stops early with a blow-up marker once a value is no
/// longer finite.
pub fn simulate_recursion(params: &RecursionParams, n_steps: usize) -> Result<RecursionTrace> {
    if n_steps == 0 {
        return Err(Error::Domain("recursion needs at least one step".into()));
    }
    if !(params.r0 > 0.0) || params.a < 0.0 {
        return Err(Error::Domain(format!("recursion needs r0 > 0 and a >= 0: {params:?}")));
    }
    let mut rates = Vec::with_capacity(n_steps.min(1 << 20));
    rates.push(params.r0);
    if n_steps > 1 {
        rates.push(params.r0);
    }
    let mut blowup_step = None;
    while rates.len() < n_steps {
        let prev = rates[rates.len() - 2];
        let next = prev + params.a * prev.powf(params.gamma);
        if !next.is_finite() {
            blowup_step = Some(rates.len());
            break;
        }
        rates.push(next);
    }
    Ok(RecursionTrace { rates, blowup_step })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeBlowup {
    /// Time at which r first reaches the threshold.
    pub time: f64,
    pub accepted_steps: usize,
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn dp_step(f: &impl Fn(f64, f64) -> f64, t: f64, y: f64, h: f64) -> (f64, f64) {
    let mut k = [0.0; 7];
    for s in 0..7 {
        let ys = y + h * (0..s).map(|j| A[s][j] * k[j]).sum::<f64>();
        k[s] = f(t + C[s] * h, ys);
    }
    let y5 = y + h * (0..7).map(|s| B5[s] * k[s]).sum::<f64>();
    let y4 = y + h * (0..7).map(|s| B4[s] * k[s]).sum::<f64>();
    (y5, (y5 - y4).abs())
}

/// Integrates dr/dt = a₁ r^γ from r(t₀) = r₀ with an adaptive Dormand–Prince
/// scheme until r reaches `threshold`, returning the crossing time.
pub fn ode_blowup_time(r0: f64, gamma: f64, a1: f64, t0: f64, threshold: f64) -> Result<OdeBlowup> {
    if !(r0 > 0.0 && gamma > 1.0 && a1 > 0.0 && threshold > r0) {
        return Err(Error::Domain(format!(
            "ODE blow-up needs r0 > 0, gamma > 1, a1 > 0, threshold > r0; got {r0}, {gamma}, {a1}, {threshold}"
        )));
    }
    let f = |_t: f64, r: f64| a1 * r.powf(gamma);
    let rtol = 1e-12;
    let (mut t, mut r) = (t0, r0);
    let mut h = 1e-3 * r0 / f(t0, r0);
    let mut accepted = 0usize;

    for _ in 0..1_000_000 {
        let (r_new, err) = dp_step(&f, t, r, h);
        let scale = rtol * r.abs().max(r_new.abs());
        if !r_new.is_finite() || r_new < r {
            h *= 0.25;
            continue;
        }
        if err <= scale {
            if r_new >= threshold {
                // Shrink the last step onto the threshold by bisection.
                let (mut lo, mut hi) = (0.0, h);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let (r_mid, _) = dp_step(&f, t, r, mid);
                    if r_mid.is_finite() && r_mid < threshold {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= f64::EPSILON * (t.abs() + hi) {
                        break;
                    }
                }
                return Ok(OdeBlowup { time: t + 0.5 * (lo + hi), accepted_steps: accepted + 1 });
            }
            t += h;
            r = r_new;
            accepted += 1;
        }
        let ratio = if err == 0.0 { 5.0 } else { 0.9 * (scale / err).powf(0.2) };
        h *= ratio.clamp(0.2, 5.0);
    }
    Err(Error::Domain("ODE integration did not reach the threshold".into()))
}
