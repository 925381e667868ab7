//! Return series, power transforms and full-sample dependence estimators.
//!
//! All covariance estimators use the `1/T` divisor with the lag sum running
//! over `t = h+1..T` and full-sample means of each transformed series:
//!
//! ```text
//! γ̂_{f,g}(h) = (1/T) Σ_{t=h+1}^{T} (f(x_t) − μ̂_f)(g(x_{t−h}) − μ̂_g)
//! ρ̂_{f,g}(h) = γ̂_{f,g}(h) / √(γ̂_{f,f}(0) γ̂_{g,g}(0))
//! ```
//!
//! The same slice-level functions are reused by the group estimators, which
//! apply them to each block of consecutive observations.

use crate::error::{Error, Result};
use crate::numeric::{mean, CompensatedSum};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Overshoot past ±1 that is silently clamped in correlation estimates.
pub const CORRELATION_CLAMP_TOL: f64 = 1e-9;

/// A finite, non-empty sequence of observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    values: Vec<f64>,
}

impl Series {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Applies `transform` elementwise.
    pub fn transform(&self, transform: Transform) -> Result<Series> {
        let out = transform.apply_slice(&self.values);
        Series::new(out)
    }
}

impl TryFrom<Vec<f64>> for Series {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Series::new(v)
    }
}

/// Pointwise transform of a return: identity, `|x|^p`, or `|x|^s sign(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "exponent", rename_all = "snake_case")]
pub enum Transform {
    Identity,
    AbsPower(f64),
    SignedPower(f64),
}

impl Transform {
    pub fn abs_power(p: f64) -> Result<Self> {
        check_exponent(p)?;
        Ok(Transform::AbsPower(p))
    }

    pub fn signed_power(s: f64) -> Result<Self> {
        check_exponent(s)?;
        Ok(Transform::SignedPower(s))
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Transform::Identity => Ok(()),
            Transform::AbsPower(e) | Transform::SignedPower(e) => check_exponent(e),
        }
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            Transform::Identity => x,
            Transform::AbsPower(p) => pow_abs(x, p),
            Transform::SignedPower(s) => {
                if x > 0.0 {
                    pow_abs(x, s)
                } else if x < 0.0 {
                    -pow_abs(x, s)
                } else {
                    0.0
                }
            }
        }
    }

    pub fn apply_slice(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.apply(x)).collect()
    }
}

#[inline]
fn pow_abs(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if p == 1.0 {
        a
    } else if p == 2.0 {
        a * a
    } else if p == 0.5 {
        a.sqrt()
    } else {
        a.powf(p)
    }
}

fn check_exponent(e: f64) -> Result<()> {
    if e.is_finite() && e > 0.0 {
        Ok(())
    } else {
        Err(Error::param("exponent", format!("must be a positive finite real, got {e}")))
    }
}

/// Which dependence measure to estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// Cov(|R_t|^p, |R_{t−h}|^p)
    AbsPowerAutocov,
    /// Corr(|R_t|^p, |R_{t−h}|^p)
    AbsPowerAutocorr,
    /// Cov(R_t, |R_{t−h}|^s sign(R_{t−h}))
    SignedPowerCrosscov,
    /// Corr(R_t, |R_{t−h}|^s sign(R_{t−h}))
    SignedPowerCrosscorr,
}

impl Measure {
    pub fn is_correlation(self) -> bool {
        matches!(self, Measure::AbsPowerAutocorr | Measure::SignedPowerCrosscorr)
    }

    pub fn is_signed(self) -> bool {
        matches!(self, Measure::SignedPowerCrosscov | Measure::SignedPowerCrosscorr)
    }

    pub fn name(self) -> &'static str {
        match self {
            Measure::AbsPowerAutocov => "abs_power_autocov",
            Measure::AbsPowerAutocorr => "abs_power_autocorr",
            Measure::SignedPowerCrosscov => "signed_power_crosscov",
            Measure::SignedPowerCrosscorr => "signed_power_crosscorr",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            Measure::AbsPowerAutocov,
            Measure::AbsPowerAutocorr,
            Measure::SignedPowerCrosscov,
            Measure::SignedPowerCrosscorr,
        ]
        .into_iter()
        .find(|m| m.name() == name)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A dependence measure at a given power and lag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DependenceSpec {
    pub measure: Measure,
    pub exponent: f64,
    pub lag: usize,
}

impl DependenceSpec {
    pub fn new(measure: Measure, exponent: f64, lag: usize) -> Result<Self> {
        let spec = Self {
            measure,
            exponent,
            lag,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn abs_power_autocorr(p: f64, lag: usize) -> Result<Self> {
        Self::new(Measure::AbsPowerAutocorr, p, lag)
    }

    pub fn signed_power_crosscorr(s: f64, lag: usize) -> Result<Self> {
        Self::new(Measure::SignedPowerCrosscorr, s, lag)
    }

    pub fn validate(&self) -> Result<()> {
        check_exponent(self.exponent)?;
        if self.measure.is_correlation() && self.lag == 0 {
            return Err(Error::param("lag", "correlation measures need lag >= 1"));
        }
        Ok(())
    }

    /// The pair `(f, g)` so that the measure is Cov/Corr(f(x_t), g(x_{t−h})).
    pub fn transforms(&self) -> (Transform, Transform) {
        if self.measure.is_signed() {
            (Transform::Identity, Transform::SignedPower(self.exponent))
        } else {
            let t = Transform::AbsPower(self.exponent);
            (t, t)
        }
    }

    pub fn label(&self) -> String {
        format!("{}(e={}, h={})", self.measure, self.exponent, self.lag)
    }
}

/// Precomputed `f(x_t)` and `g(x_t)` for one series.
#[derive(Debug, Clone)]
pub struct TransformedPair {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl TransformedPair {
    pub fn new(x: &[f64], f: Transform, g: Transform) -> Self {
        let fx = f.apply_slice(x);
        let gx = if f == g { fx.clone() } else { g.apply_slice(x) };
        Self { f: fx, g: gx }
    }

    pub fn for_spec(x: &[f64], spec: &DependenceSpec) -> Self {
        let (f, g) = spec.transforms();
        Self::new(x, f, g)
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> (&[f64], &[f64]) {
        (&self.f[range.clone()], &self.g[range])
    }
}

/// Sample mean of a series.
pub fn sample_mean(x: &Series) -> f64 {
    mean(x.values())
}

/// `(1/n) Σ_{t=h}^{n−1} (fx[t] − μ_f)(gx[t−h] − μ_g)` with slice-wide means.
pub fn cov_slices(fx: &[f64], gx: &[f64], lag: usize) -> Result<f64> {
    let n = fx.len();
    debug_assert_eq!(n, gx.len());
    if n == 0 {
        return Err(Error::EmptySeries);
    }
    if lag >= n {
        return Err(Error::LagTooLarge { lag, len: n });
    }
    let mf = mean(fx);
    let mg = if std::ptr::eq(fx, gx) { mf } else { mean(gx) };
    let mut acc = CompensatedSum::new();
    for t in lag..n {
        acc.add((fx[t] - mf) * (gx[t - lag] - mg));
    }
    Ok(acc.value() / n as f64)
}

/// Correlation analogue of [`cov_slices`]; zero variance is a degenerate-series error.
pub fn corr_slices(fx: &[f64], gx: &[f64], lag: usize) -> Result<f64> {
    let c = cov_slices(fx, gx, lag)?;
    let vf = cov_slices(fx, fx, 0)?;
    let vg = cov_slices(gx, gx, 0)?;
    if vf <= 0.0 || vg <= 0.0 {
        return Err(Error::Degenerate(
            "transformed series has zero sample variance".into(),
        ));
    }
    clamp_correlation(c / (vf * vg).sqrt())
}

fn clamp_correlation(r: f64) -> Result<f64> {
    if r.abs() <= 1.0 {
        Ok(r)
    } else if r.abs() - 1.0 <= CORRELATION_CLAMP_TOL {
        Ok(r.signum())
    } else {
        Err(Error::Numerical(format!("correlation estimate {r} outside [-1, 1]")))
    }
}

/// Sample covariance of `f(x_t)` and `g(x_{t−h})`.
pub fn sample_cov_fg(x: &Series, f: Transform, g: Transform, lag: usize) -> Result<f64> {
    f.validate()?;
    g.validate()?;
    let pair = TransformedPair::new(x.values(), f, g);
    cov_slices(&pair.f, &pair.g, lag)
}

/// Sample correlation of `f(x_t)` and `g(x_{t−h})`, `h >= 1`.
pub fn sample_corr_fg(x: &Series, f: Transform, g: Transform, lag: usize) -> Result<f64> {
    if lag == 0 {
        return Err(Error::param("lag", "correlation requires lag >= 1"));
    }
    f.validate()?;
    g.validate()?;
    let pair = TransformedPair::new(x.values(), f, g);
    corr_slices(&pair.f, &pair.g, lag)
}

/// Estimates the measure in `spec` on the whole slice of transformed values.
pub fn estimate_pair(fx: &[f64], gx: &[f64], spec: &DependenceSpec) -> Result<f64> {
    if spec.measure.is_correlation() {
        corr_slices(fx, gx, spec.lag)
    } else {
        cov_slices(fx, gx, spec.lag)
    }
}

/// Full-sample estimate of a dependence measure.
pub fn estimate(x: &Series, spec: &DependenceSpec) -> Result<f64> {
    spec.validate()?;
    let pair = TransformedPair::for_spec(x.values(), spec);
    estimate_pair(&pair.f, &pair.g, spec)
}
