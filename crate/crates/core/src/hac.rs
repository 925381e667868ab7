//! Kernel long-run variance estimation and HAC t-tests for dependence measures.
//!
//! The long-run variance of a stationary series `y` is estimated by
//!
//! ```text
//! LRV = γ̂(0) + 2 Σ_{k≥1} k(j/S) γ̂(k)
//! ```
//!
//! with `1/n` autocovariances of the demeaned series and either the quadratic
//! spectral or the Bartlett kernel. The bandwidth `S` defaults to the
//! AR(1) plug-in rule of Andrews (1991).
//!
//! Correlations are handled by the delta method: with `x = (γ̂_fg(h), γ̂_ff(0),
//! γ̂_gg(0))` and `ρ̂ = x₁/√(x₂x₃)`, the scalar influence series
//! `u_t = A·(Y_t, V_{t,1}, V_{t,2})` carries the full asymptotic variance, so
//! `Var(ρ̂) ≈ A Γ̂ A'/T = LRV(u)/T`, where the automatic bandwidth is chosen
//! from all stacked components.

use crate::error::{Error, Result};
use crate::numeric::{mean, CompensatedSum};
use crate::series::{cov_slices, corr_slices, DependenceSpec, Series, TransformedPair};
use crate::special::{normal_quantile, normal_sf};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Bandwidth used when the plug-in rule returns zero.
pub const BANDWIDTH_FLOOR: f64 = 1e-3;
/// Floor applied to a non-positive scalar long-run variance.
pub const LRV_FLOOR: f64 = 1e-12;
/// Quadratic spectral sums stop at `QS_TRUNCATION · S` lags.
pub const QS_TRUNCATION: f64 = 50.0;
const UNIT_ROOT_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    QuadraticSpectral,
    Bartlett,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub bandwidth: Bandwidth,
}

impl KernelSpec {
    pub fn qs_auto() -> Self {
        Self {
            kind: KernelKind::QuadraticSpectral,
            bandwidth: Bandwidth::Auto,
        }
    }

    pub fn fixed(kind: KernelKind, bandwidth: f64) -> Self {
        Self {
            kind,
            bandwidth: Bandwidth::Fixed(bandwidth),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.bandwidth {
            Bandwidth::Fixed(b) if !(b.is_finite() && b > 0.0) => {
                Err(Error::param("bandwidth", format!("must be positive, got {b}")))
            }
            _ => Ok(()),
        }
    }
}

impl Default for KernelSpec {
    fn default() -> Self {
        Self::qs_auto()
    }
}

pub fn kernel_weight(kind: KernelKind, x: f64) -> f64 {
    match kind {
        KernelKind::Bartlett => (1.0 - x.abs()).max(0.0),
        KernelKind::QuadraticSpectral => {
            if x == 0.0 {
                return 1.0;
            }
            let z = 6.0 * PI * x / 5.0;
            if z.abs() < 1e-2 {
                // Taylor expansion; the closed form cancels badly near 0.
                let z2 = z * z;
                return 1.0 - z2 / 10.0 + z2 * z2 / 280.0 - z2 * z2 * z2 / 15120.0;
            }
            25.0 / (12.0 * PI * PI * x * x) * (z.sin() / z - z.cos())
        }
    }
}

/// Number of lags carried by the kernel sum for bandwidth `s` and length `n`.
fn max_lag(kind: KernelKind, s: f64, n: usize) -> usize {
    let cap = n.saturating_sub(1);
    let lags = match kind {
        // weights vanish from lag ⌈S⌉ on (k(1) = 0 at j = S)
        KernelKind::Bartlett => s.ceil(),
        KernelKind::QuadraticSpectral => (QS_TRUNCATION * s).ceil(),
    };
    if lags >= cap as f64 {
        cap
    } else {
        lags as usize
    }
}

fn ar1_coefficient(y: &[f64]) -> Result<f64> {
    let m = mean(y);
    let mut num = CompensatedSum::new();
    let mut den = CompensatedSum::new();
    for t in 1..y.len() {
        let prev = y[t - 1] - m;
        num.add((y[t] - m) * prev);
        den.add(prev * prev);
    }
    let den = den.value();
    if den <= 0.0 {
        return Err(Error::Degenerate("bandwidth selection on a constant series".into()));
    }
    Ok(num.value() / den)
}

/// Andrews AR(1) plug-in bandwidth for a given coefficient and sample length.
pub fn andrews_bandwidth_from_rho(rho: f64, n: usize, kind: KernelKind) -> Result<f64> {
    if !(rho.abs() < 1.0 - UNIT_ROOT_MARGIN) {
        return Err(Error::NearUnitRoot { rho });
    }
    let n = n as f64;
    let s = match kind {
        KernelKind::QuadraticSpectral => {
            let a2 = 4.0 * rho * rho / (1.0 - rho).powi(4);
            1.3221 * (a2 * n).powf(0.2)
        }
        KernelKind::Bartlett => {
            let a1 = 4.0 * rho * rho / ((1.0 - rho).powi(2) * (1.0 + rho).powi(2));
            1.1447 * (a1 * n).powf(1.0 / 3.0)
        }
    };
    Ok(s.max(BANDWIDTH_FLOOR))
}

/// Andrews AR(1) plug-in bandwidth for the summand series `y` (at least 10 values).
pub fn andrews_bandwidth(y: &[f64], kind: KernelKind) -> Result<f64> {
    if y.len() < 10 {
        return Err(Error::param(
            "y",
            format!("bandwidth selection needs at least 10 observations, got {}", y.len()),
        ));
    }
    andrews_bandwidth_from_rho(ar1_coefficient(y)?, y.len(), kind)
}

/// Scalar long-run variance with diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lrv {
    pub value: f64,
    pub bandwidth: f64,
    pub lags: usize,
    /// True when the kernel sum was non-positive and replaced by [`LRV_FLOOR`].
    pub floored: bool,
}

fn resolve_bandwidth(y: &[f64], kernel: &KernelSpec) -> Result<f64> {
    kernel.validate()?;
    match kernel.bandwidth {
        Bandwidth::Fixed(b) => Ok(b),
        Bandwidth::Auto => andrews_bandwidth(y, kernel.kind),
    }
}

/// Kernel long-run variance of `y`, demeaned internally.
pub fn long_run_variance(y: &[f64], kernel: &KernelSpec) -> Result<Lrv> {
    if y.is_empty() {
        return Err(Error::EmptySeries);
    }
    if let Some(index) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let s = resolve_bandwidth(y, kernel)?;
    Ok(lrv_with_bandwidth(y, kernel.kind, s))
}

/// Above this many lags the autocovariances come from one FFT instead of
/// direct sums.
const FFT_MIN_LAGS: usize = 32;

/// `γ̂(k) = Σ_{t≥k} d_t d_{t−k} / n` for `k = 0..=lags` on centred `d`.
fn autocovariances(d: &[f64], lags: usize) -> Vec<f64> {
    let n = d.len();
    if lags < FFT_MIN_LAGS {
        return (0..=lags)
            .map(|k| {
                let mut acc = CompensatedSum::new();
                for t in k..n {
                    acc.add(d[t] * d[t - k]);
                }
                acc.value() / n as f64
            })
            .collect();
    }
    // zero padding to ≥ n + lags makes the circular correlation linear up to `lags`
    let size = (n + lags + 1).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = d.iter().map(|&v| Complex::new(v, 0.0)).collect();
    buf.resize(size, Complex::new(0.0, 0.0));
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for z in buf.iter_mut() {
        *z = Complex::new(z.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    let scale = (size * n) as f64;
    buf[..=lags].iter().map(|z| z.re / scale).collect()
}

fn lrv_with_bandwidth(y: &[f64], kind: KernelKind, s: f64) -> Lrv {
    let n = y.len();
    let m = mean(y);
    let d: Vec<f64> = y.iter().map(|v| v - m).collect();
    let lags = max_lag(kind, s, n);
    let gamma = autocovariances(&d, lags);
    let mut total = CompensatedSum::new();
    total.add(gamma[0]);
    for (k, g) in gamma.iter().enumerate().skip(1) {
        let w = kernel_weight(kind, k as f64 / s);
        if w != 0.0 {
            total.add(2.0 * w * g);
        }
    }
    let v = total.value();
    if v > 0.0 {
        Lrv {
            value: v,
            bandwidth: s,
            lags,
            floored: false,
        }
    } else {
        Lrv {
            value: LRV_FLOOR,
            bandwidth: s,
            lags,
            floored: true,
        }
    }
}

/// Andrews' multivariate AR(1) plug-in with unit weights across components.
pub fn andrews_bandwidth_multi(columns: &[Vec<f64>], kind: KernelKind) -> Result<f64> {
    let n = columns.first().map_or(0, |c| c.len());
    if n < 10 {
        return Err(Error::param("y", "bandwidth selection needs at least 10 observations"));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for c in columns {
        let rho = ar1_coefficient(c)?;
        if !(rho.abs() < 1.0 - UNIT_ROOT_MARGIN) {
            return Err(Error::NearUnitRoot { rho });
        }
        let m = mean(c);
        let mut e = CompensatedSum::new();
        for t in 1..n {
            let r = (c[t] - m) - rho * (c[t - 1] - m);
            e.add(r * r);
        }
        let s2 = e.value() / (n - 1) as f64;
        let s4 = s2 * s2;
        match kind {
            KernelKind::QuadraticSpectral => {
                num += 4.0 * rho * rho * s4 / (1.0 - rho).powi(8);
                den += s4 / (1.0 - rho).powi(4);
            }
            KernelKind::Bartlett => {
                num += 4.0 * rho * rho * s4 / ((1.0 - rho).powi(6) * (1.0 + rho).powi(2));
                den += s4 / (1.0 - rho).powi(4);
            }
        }
    }
    if den <= 0.0 {
        return Err(Error::Degenerate("bandwidth selection on constant series".into()));
    }
    let a = num / den;
    let nf = n as f64;
    let s = match kind {
        KernelKind::QuadraticSpectral => 1.3221 * (a * nf).powf(0.2),
        KernelKind::Bartlett => 1.1447 * (a * nf).powf(1.0 / 3.0),
    };
    Ok(s.max(BANDWIDTH_FLOOR))
}

/// Long-run covariance matrix of the columns (all of equal length), with
/// symmetrized cross terms `Γ̂(k) + Γ̂(k)'`.
pub fn long_run_covariance(columns: &[Vec<f64>], kernel: &KernelSpec) -> Result<(Vec<Vec<f64>>, f64)> {
    let d = columns.len();
    if d == 0 || columns[0].is_empty() {
        return Err(Error::EmptySeries);
    }
    let n = columns[0].len();
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::param("columns", "all components need the same length"));
    }
    kernel.validate()?;
    let s = match kernel.bandwidth {
        Bandwidth::Fixed(b) => b,
        Bandwidth::Auto => andrews_bandwidth_multi(columns, kernel.kind)?,
    };
    let dm: Vec<Vec<f64>> = columns
        .iter()
        .map(|c| {
            let m = mean(c);
            c.iter().map(|v| v - m).collect()
        })
        .collect();
    let cross = |a: usize, b: usize, k: usize| {
        let mut acc = CompensatedSum::new();
        for t in k..n {
            acc.add(dm[a][t] * dm[b][t - k]);
        }
        acc.value() / n as f64
    };
    let lags = max_lag(kernel.kind, s, n);
    let mut out = vec![vec![0.0; d]; d];
    for a in 0..d {
        for b in a..d {
            let mut acc = CompensatedSum::new();
            acc.add(cross(a, b, 0));
            for k in 1..=lags {
                let w = kernel_weight(kernel.kind, k as f64 / s);
                if w != 0.0 {
                    acc.add(w * (cross(a, b, k) + cross(b, a, k)));
                }
            }
            out[a][b] = acc.value();
            out[b][a] = out[a][b];
        }
    }
    Ok((out, s))
}

/// Outcome of a HAC t-test with standard-normal reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HacResult {
    pub estimate: f64,
    pub std_err: f64,
    pub t_stat: f64,
    pub p_value: f64,
    pub ci: (f64, f64),
    pub beta0: f64,
    pub confidence: f64,
    pub reject: bool,
    pub bandwidth_used: f64,
    pub lrv_floored: bool,
}

impl HacResult {
    /// Assembles the normal-reference test from an estimate and its standard error.
    pub fn from_parts(estimate: f64, lrv: Lrv, n: usize, beta0: f64, confidence: f64) -> Result<Self> {
        if !(confidence > 0.0 && confidence < 1.0) {
            return Err(Error::param("confidence", format!("must lie in (0, 1), got {confidence}")));
        }
        let std_err = (lrv.value / n as f64).sqrt();
        let t_stat = (estimate - beta0) / std_err;
        let z = normal_quantile(1.0 - 0.5 * (1.0 - confidence));
        Ok(Self {
            estimate,
            std_err,
            t_stat,
            p_value: (2.0 * normal_sf(t_stat.abs())).min(1.0),
            ci: (estimate - z * std_err, estimate + z * std_err),
            beta0,
            confidence,
            reject: t_stat.abs() > z,
            bandwidth_used: lrv.bandwidth,
            lrv_floored: lrv.floored,
        })
    }
}

/// Centered products `(f_t − μ_f)(g_{t−h} − μ_g) − γ̂` for `t ≥ start`.
pub fn covariance_summand(fx: &[f64], gx: &[f64], lag: usize, start: usize) -> Result<Vec<f64>> {
    let gamma = cov_slices(fx, gx, lag)?;
    let mf = mean(fx);
    let mg = mean(gx);
    Ok((start.max(lag)..fx.len())
        .map(|t| (fx[t] - mf) * (gx[t - lag] - mg) - gamma)
        .collect())
}

/// Components of the stacked summand `(Y_{t,h})_h, V_{t,1}, V_{t,2}` for a
/// weighted sum of correlations `Σ_h w_h ρ̂_fg(h)`, over `t ≥ start`, together
/// with the delta-method gradient.
#[derive(Debug, Clone)]
pub struct CorrelationSummands {
    /// One column per lag, then `V_{t,1}` and `V_{t,2}`.
    pub columns: Vec<Vec<f64>>,
    /// Gradient of `Σ_h w_h x_h/√(x_f x_g)` with respect to the column means.
    pub gradient: Vec<f64>,
    pub estimate: f64,
}

impl CorrelationSummands {
    pub fn new(fx: &[f64], gx: &[f64], lags: &[(usize, f64)], start: usize) -> Result<Self> {
        let n = fx.len();
        if lags.is_empty() {
            return Err(Error::param("lags", "need at least one lag"));
        }
        let max_lag = lags.iter().map(|l| l.0).max().unwrap_or(0);
        if max_lag >= n {
            return Err(Error::LagTooLarge { lag: max_lag, len: n });
        }
        let xf = cov_slices(fx, fx, 0)?;
        let xg = cov_slices(gx, gx, 0)?;
        if xf <= 0.0 || xg <= 0.0 {
            return Err(Error::Degenerate(
                "transformed series has zero sample variance".into(),
            ));
        }
        let mf = mean(fx);
        let mg = mean(gx);
        let root = (xf * xg).sqrt();
        let start = start.max(max_lag);
        let mut columns = Vec::with_capacity(lags.len() + 2);
        let mut gradient = Vec::with_capacity(lags.len() + 2);
        let mut estimate = 0.0;
        let mut weighted_cov = 0.0;
        for &(h, w) in lags {
            let c = cov_slices(fx, gx, h)?;
            estimate += w * c / root;
            weighted_cov += w * c;
            columns.push((start..n).map(|t| (fx[t] - mf) * (gx[t - h] - mg) - c).collect());
            gradient.push(w / root);
        }
        columns.push((start..n).map(|t| (fx[t] - mf).powi(2) - xf).collect());
        columns.push((start..n).map(|t| (gx[t] - mg).powi(2) - xg).collect());
        gradient.push(-weighted_cov / (2.0 * xf * root));
        gradient.push(-weighted_cov / (2.0 * xg * root));
        Ok(Self {
            columns,
            gradient,
            estimate,
        })
    }

    /// The scalar influence series `u_t = A·Y†_t`.
    pub fn influence(&self) -> Vec<f64> {
        let len = self.columns[0].len();
        (0..len)
            .map(|t| {
                self.columns
                    .iter()
                    .zip(&self.gradient)
                    .map(|(c, a)| a * c[t])
                    .sum()
            })
            .collect()
    }

    /// `A Γ̂ A'` with `Γ̂` the kernel long-run covariance of the stacked columns.
    ///
    /// With an automatic bandwidth, the bandwidth is Andrews' multivariate
    /// plug-in over all stacked columns; the quadratic form is evaluated as the
    /// scalar long-run variance of `u_t` at that bandwidth, which is identical.
    pub fn long_run_variance(&self, kernel: &KernelSpec) -> Result<Lrv> {
        kernel.validate()?;
        let u = self.influence();
        let m = mean(&u);
        if u.iter().all(|v| (v - m).abs() == 0.0) {
            return Err(Error::Degenerate("estimator summand has zero variance".into()));
        }
        let s = match kernel.bandwidth {
            Bandwidth::Fixed(b) => b,
            Bandwidth::Auto => andrews_bandwidth_multi(&self.columns, kernel.kind)?,
        };
        Ok(lrv_with_bandwidth(&u, kernel.kind, s))
    }
}

/// Delta-method influence series of the lag-`lag` correlation for `t ≥ start`.
pub fn correlation_influence(fx: &[f64], gx: &[f64], lag: usize, start: usize) -> Result<Vec<f64>> {
    Ok(CorrelationSummands::new(fx, gx, &[(lag, 1.0)], start)?.influence())
}

/// HAC t-test of `H₀: β = beta0` with the default QS kernel and automatic bandwidth.
pub fn hac_test(x: &Series, spec: &DependenceSpec, beta0: f64) -> Result<HacResult> {
    hac_test_with(x, spec, beta0, &KernelSpec::qs_auto(), 0.95)
}

pub fn hac_test_with(
    x: &Series,
    spec: &DependenceSpec,
    beta0: f64,
    kernel: &KernelSpec,
    confidence: f64,
) -> Result<HacResult> {
    spec.validate()?;
    let pair = TransformedPair::for_spec(x.values(), spec);
    hac_test_pair(&pair, spec, beta0, kernel, confidence)
}

/// [`hac_test_with`] on precomputed transforms.
pub fn hac_test_pair(
    pair: &TransformedPair,
    spec: &DependenceSpec,
    beta0: f64,
    kernel: &KernelSpec,
    confidence: f64,
) -> Result<HacResult> {
    let (fx, gx) = (&pair.f[..], &pair.g[..]);
    let n = fx.len();
    if spec.measure.is_correlation() {
        return hac_weighted_correlation_test(pair, &[(spec.lag, 1.0)], beta0, kernel, confidence);
    }
    let estimate = cov_slices(fx, gx, spec.lag)?;
    let summand = covariance_summand(fx, gx, spec.lag, spec.lag)?;
    let lrv = summand_lrv(&summand, kernel)?;
    HacResult::from_parts(estimate, lrv, n, beta0, confidence)
}

/// HAC test for `Σ_h w_h ρ̂_fg(h)`, the summands starting at the largest lag.
pub fn hac_weighted_correlation_test(
    pair: &TransformedPair,
    lags: &[(usize, f64)],
    beta0: f64,
    kernel: &KernelSpec,
    confidence: f64,
) -> Result<HacResult> {
    let summands = CorrelationSummands::new(&pair.f, &pair.g, lags, 0)?;
    let estimate = corr_weighted(pair, lags)?;
    let lrv = summands.long_run_variance(kernel)?;
    HacResult::from_parts(estimate, lrv, pair.len(), beta0, confidence)
}

fn corr_weighted(pair: &TransformedPair, lags: &[(usize, f64)]) -> Result<f64> {
    let mut acc = 0.0;
    for &(h, w) in lags {
        acc += w * corr_slices(&pair.f, &pair.g, h)?;
    }
    Ok(acc)
}

/// Long-run variance of an estimator's summand, rejecting a constant summand.
pub fn summand_lrv(summand: &[f64], kernel: &KernelSpec) -> Result<Lrv> {
    if summand.is_empty() {
        return Err(Error::EmptySeries);
    }
    let m = mean(summand);
    if summand.iter().all(|v| (v - m).abs() == 0.0) {
        return Err(Error::Degenerate("estimator summand has zero variance".into()));
    }
    long_run_variance(summand, kernel)
}
