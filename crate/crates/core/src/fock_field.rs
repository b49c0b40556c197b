//! The two-mode squeezed field after injection into the cavities.
//!
//! Mode 1 of the squeezed vacuum enters cavity `c1` and mode 2 enters `c2`,
//! each through a beam splitter of angle `theta`. Tracing the external modes
//! leaves the cavities in
//!
//! ```text
//! rho_c1c2 = (1/cosh^2 s) sum_{n,m} sum_{k,l<=min(n,m)} (tanh s)^(n+m) G_kl^nm |n-k, n-l><m-k, m-l|
//! ```
//!
//! with `G_kl^nm = C_k^n C_k^m C_l^n C_l^m`, where `C_k^n` is the amplitude
//! for `k` of `n` photons to stay in the external mode.
//!
//! The truncated state is not renormalised; [`truncation_deficit`] reports the
//! missing weight.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::sum::NeumaierSum;

/// Half-angle cosine/sine below this magnitude are treated as exact zeros.
/// `cos(pi/2)` evaluates to ~6e-17 rather than 0.
const TRIG_ZERO: f64 = 1e-15;

/// Squeeze parameter, beam-splitter angle and Fock truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldConfig {
    s: f64,
    theta: f64,
    n_max: usize,
}

impl FieldConfig {
    pub fn new(s: f64, theta: f64, n_max: usize) -> Result<Self> {
        if !s.is_finite() || s < 0.0 {
            return Err(domain(format!(
                "squeeze parameter must be finite and >= 0, got {s}"
            )));
        }
        if !theta.is_finite() || !(0.0..=PI).contains(&theta) {
            return Err(domain(format!(
                "beam-splitter angle must lie in [0, pi], got {theta}"
            )));
        }
        Ok(Self { s, theta, n_max })
    }

    /// Operating point used for the production curves: `s = 1.2`, `theta = pi`, `n_max = 80`.
    pub fn production() -> Self {
        Self {
            s: 1.2,
            theta: PI,
            n_max: 80,
        }
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Reflection coefficient `r = cos(theta / 2)`.
    pub fn reflection(&self) -> f64 {
        half_angle(self.theta).0
    }
}

/// `(cos(theta/2), sin(theta/2))` with rounding-level values snapped to zero.
pub fn half_angle(theta: f64) -> (f64, f64) {
    let snap = |x: f64| if x.abs() < TRIG_ZERO { 0.0 } else { x };
    (snap((theta / 2.0).cos()), snap((theta / 2.0).sin()))
}

/// `ln binom(n, k)` as a compensated sum of log ratios.
fn ln_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = NeumaierSum::new();
    for i in 1..=k {
        acc += ((n - k + i) as f64 / i as f64).ln();
    }
    acc.value()
}

/// `x^p` with the convention `0^0 = 1`, in log form: returns `None` for an exact zero.
fn ln_pow(x: f64, p: usize) -> Option<f64> {
    if p == 0 {
        Some(0.0)
    } else if x == 0.0 {
        None
    } else {
        Some(p as f64 * x.ln())
    }
}

fn amplitude_from_half_angle(n: usize, k: usize, cos_h: f64, sin_h: f64) -> f64 {
    match (ln_pow(cos_h, k), ln_pow(sin_h, n - k)) {
        (Some(a), Some(b)) => (0.5 * ln_binomial(n, k) + a + b).exp(),
        _ => 0.0,
    }
}

/// `C_k^n(theta) = sqrt(n! / (k! (n-k)!)) cos^k(theta/2) sin^(n-k)(theta/2)`.
pub fn binomial_amplitude(n: usize, k: usize, theta: f64) -> Result<f64> {
    if k > n {
        return Err(domain(format!(
            "binomial amplitude needs k <= n, got n={n}, k={k}"
        )));
    }
    let (c, s) = half_angle(theta);
    Ok(amplitude_from_half_angle(n, k, c, s))
}

/// `G_kl^nm(theta) = C_k^n C_k^m C_l^n C_l^m`.
pub fn field_weight(n: usize, m: usize, k: usize, l: usize, theta: f64) -> Result<f64> {
    let lim = n.min(m);
    if k > lim || l > lim {
        return Err(domain(format!(
            "field weight needs k, l <= min(n, m) = {lim}, got k={k}, l={l}"
        )));
    }
    Ok(binomial_amplitude(n, k, theta)?
        * binomial_amplitude(m, k, theta)?
        * binomial_amplitude(n, l, theta)?
        * binomial_amplitude(m, l, theta)?)
}

/// Amplitude `(tanh s)^n / cosh s` of `|n, n>` in the two-mode squeezed vacuum.
pub fn squeezed_weight(n: usize, s: f64) -> f64 {
    s.tanh().powi(n as i32) / s.cosh()
}

/// Table of `C_k^n(theta)` for `0 <= k <= n <= n_top`.
#[derive(Debug, Clone)]
pub struct AmplitudeTable {
    rows: Vec<Vec<f64>>,
}

impl AmplitudeTable {
    pub fn new(n_top: usize, theta: f64) -> Self {
        let (c, s) = half_angle(theta);
        let rows = (0..=n_top)
            .map(|n| {
                (0..=n)
                    .map(|k| amplitude_from_half_angle(n, k, c, s))
                    .collect()
            })
            .collect();
        Self { rows }
    }

    /// `C_k^n`; panics if `k > n` or `n` exceeds the table.
    pub fn get(&self, n: usize, k: usize) -> f64 {
        self.rows[n][k]
    }
}

/// Which off-diagonal band `|n - m|` of the field density matrix to enumerate.
/// Only bands 0 and 1 survive the trace over the field in the reduced atomic
/// state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    Diagonal,
    Adjacent,
}

impl Band {
    pub fn offset(self) -> usize {
        match self {
            Band::Diagonal => 0,
            Band::Adjacent => 1,
        }
    }
}

impl TryFrom<usize> for Band {
    type Error = crate::Error;

    fn try_from(value: usize) -> Result<Self> {
        match value {
            0 => Ok(Band::Diagonal),
            1 => Ok(Band::Adjacent),
            other => Err(domain(format!("band must be 0 or 1, got {other}"))),
        }
    }
}

/// One term `(1/cosh^2 s) (tanh s)^(n+m) G_kl^nm |n-k, n-l><m-k, m-l|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldTermWeight {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub l: usize,
    pub weight: f64,
}

/// All terms of the given band with `n, m <= n_max` and non-zero weight, in
/// ascending `n`, then `k`, then `l`.
pub fn enumerate_field_terms(config: &FieldConfig, band: Band) -> Vec<FieldTermWeight> {
    let d = band.offset();
    let n_max = config.n_max();
    if n_max < d {
        return Vec::new();
    }
    let table = AmplitudeTable::new(n_max, config.theta());
    let t = config.s().tanh();
    let prefactor = 1.0 / config.s().cosh().powi(2);
    let mut terms = Vec::new();
    for n in 0..=(n_max - d) {
        let m = n + d;
        let radial = prefactor * t.powi((n + m) as i32);
        if radial == 0.0 {
            continue;
        }
        for k in 0..=n {
            let ck = table.get(n, k) * table.get(m, k);
            if ck == 0.0 {
                continue;
            }
            for l in 0..=n {
                let weight = radial * ck * table.get(n, l) * table.get(m, l);
                if weight != 0.0 {
                    terms.push(FieldTermWeight { n, m, k, l, weight });
                }
            }
        }
    }
    terms
}

/// Weight missing from the truncated field, `1 - sum_{n<=n_max} (tanh s)^(2n) / cosh^2 s`.
///
/// The geometric series sums to exactly `(tanh s)^(2 (n_max + 1))`, which is
/// evaluated directly to avoid cancellation.
pub fn truncation_deficit(config: &FieldConfig) -> f64 {
    let t2 = config.s().tanh().powi(2);
    t2.powi(config.n_max() as i32 + 1)
}
