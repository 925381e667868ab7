//! Group-based robust t-statistic inference.
//!
//! The sample is cut into `q` consecutive blocks of `⌊T/q⌋` observations, the
//! parameter is estimated separately in each block, and the `q` block
//! estimates are treated as a small sample:
//!
//! ```text
//! t = √q (β̄ − β₀) / s,   s² = Σ (β_j − β̄)² / (q − 1)
//! ```
//!
//! Student-t(q−1) critical values are conservative for asymptotically
//! independent scale mixtures of normals at levels up to `2Φ(−√3) ≈ 0.0833`
//! for any `q`, and up to 0.1 for `q ≤ 14`. At other levels the critical value
//! comes from inverting the tail bound in [`p_value_bound`].

use crate::error::{Error, Result};
use crate::numeric::{mean, CompensatedSum};
use crate::series::{cov_slices, estimate_pair, DependenceSpec, Series, TransformedPair};
use crate::special::{normal_cdf, normal_sf, t_isf, t_two_sided_tail};
use serde::{Deserialize, Serialize};
use std::ops::Range;

/// Largest level at which the Student-t threshold is valid for every q: `2Φ(−√3)`.
pub fn universal_level() -> f64 {
    2.0 * normal_cdf(-(3f64.sqrt()))
}

/// Level up to which the Student-t threshold is valid when `q ≤ SMALL_Q_MAX`.
pub const SMALL_Q_LEVEL: f64 = 0.1;
pub const SMALL_Q_MAX: usize = 14;

/// Consecutive equal-size blocks; indexes are 0-based and half-open.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupPartition {
    pub q: usize,
    pub group_size: usize,
    pub ranges: Vec<Range<usize>>,
    pub discarded: usize,
}

/// Splits `len` observations into `q` blocks of at least `max_lag + 2` each.
pub fn partition(len: usize, q: usize, max_lag: usize) -> Result<GroupPartition> {
    if q < 2 {
        return Err(Error::param("q", format!("need at least 2 groups, got {q}")));
    }
    let group_size = len / q;
    let required = max_lag + 2;
    if group_size < required {
        return Err(Error::GroupsTooSmall {
            len,
            q,
            group_size,
            required,
        });
    }
    let ranges = (0..q).map(|j| j * group_size..(j + 1) * group_size).collect();
    Ok(GroupPartition {
        q,
        group_size,
        ranges,
        discarded: len - q * group_size,
    })
}

/// Applies `estimator` to every block of `part`, labelling failures with the
/// 1-based group number.
pub fn group_estimates_with<F>(part: &GroupPartition, mut estimator: F) -> Result<Vec<f64>>
where
    F: FnMut(Range<usize>) -> Result<f64>,
{
    part.ranges
        .iter()
        .enumerate()
        .map(|(j, r)| {
            estimator(r.clone()).map_err(|e| match e {
                Error::Degenerate(reason) => Error::DegenerateGroup {
                    group: j + 1,
                    reason,
                },
                other => other,
            })
        })
        .collect()
}

/// Block estimates of `spec`, each with block-local means and divisor `⌊T/q⌋`.
///
/// A block whose transformed values have zero variance is rejected for every
/// measure, since its estimate carries no information about dependence.
pub fn group_estimates(x: &Series, spec: &DependenceSpec, q: usize) -> Result<Vec<f64>> {
    spec.validate()?;
    let part = partition(x.len(), q, spec.lag)?;
    let pair = TransformedPair::for_spec(x.values(), spec);
    group_estimates_pair(&pair, spec, &part)
}

/// [`group_estimates`] on precomputed transforms.
pub fn group_estimates_pair(
    pair: &TransformedPair,
    spec: &DependenceSpec,
    part: &GroupPartition,
) -> Result<Vec<f64>> {
    group_estimates_with(part, |r| {
        let (f, g) = pair.slice(r);
        if cov_slices(f, f, 0)? <= 0.0 || cov_slices(g, g, 0)? <= 0.0 {
            return Err(Error::Degenerate(
                "transformed values are constant within the group".into(),
            ));
        }
        estimate_pair(f, g, spec)
    })
}

fn mean_and_sd(estimates: &[f64]) -> (f64, f64) {
    let m = mean(estimates);
    let mut ss = CompensatedSum::new();
    for &b in estimates {
        ss.add((b - m) * (b - m));
    }
    let var = ss.value() / (estimates.len() - 1) as f64;
    (m, var.max(0.0).sqrt())
}

fn check_q(estimates: &[f64]) -> Result<()> {
    if estimates.len() < 2 {
        return Err(Error::param(
            "q",
            format!("need at least 2 group estimates, got {}", estimates.len()),
        ));
    }
    if let Some(index) = estimates.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Ok(())
}

/// `√q (mean − β₀) / s` with the `1/(q−1)` sample standard deviation.
pub fn t_statistic(estimates: &[f64], beta0: f64) -> Result<f64> {
    check_q(estimates)?;
    let (m, s) = mean_and_sd(estimates);
    if s == 0.0 {
        return Err(Error::Degenerate("group estimates have zero variance".into()));
    }
    Ok((estimates.len() as f64).sqrt() * (m - beta0) / s)
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::param("level", format!("must lie in (0, 1), got {level}")))
    }
}

/// Whether the Student-t threshold alone guarantees level `level` for `q` groups.
pub fn student_t_regime(q: usize, level: f64) -> bool {
    level <= universal_level() || (level <= SMALL_Q_LEVEL && q <= SMALL_Q_MAX)
}

/// Two-sided critical value for a test of size `level` with `q` groups.
pub fn critical_value(q: usize, level: f64) -> Result<f64> {
    if q < 2 {
        return Err(Error::param("q", format!("need at least 2 groups, got {q}")));
    }
    check_level(level)?;
    let df = (q - 1) as f64;
    let t_cv = t_isf(0.5 * level, df);
    if student_t_regime(q, level) {
        return Ok(t_cv);
    }
    // p_value_bound dominates the t tail, so bound(t_cv) ≥ level.
    let mut lo = t_cv;
    let mut hi = t_cv.max(1.0);
    while p_value_bound(q, hi) > level {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Numerical("critical value bracket overflowed".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p_value_bound(q, mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Conservative two-sided p-value for `|t| = x` with `q` groups:
///
/// ```text
/// R = q x² / (x² + q − 1)
/// bound = max over integers k in (R, q], k ≥ 2, of P(|T_{k−1}| > √(R(k−1)/(k−R)))
/// ```
///
/// The `k = q` term equals the Student-t(q−1) tail at `x`, so the bound is
/// never below the ordinary t-test p-value. For `q = 2` it is exactly that tail.
pub fn p_value_bound(q: usize, x: f64) -> f64 {
    assert!(q >= 2, "p_value_bound needs q >= 2");
    let x = x.abs();
    if x.is_infinite() {
        return 0.0;
    }
    if x.is_nan() {
        return f64::NAN;
    }
    let qf = q as f64;
    let r = qf * x * x / (x * x + qf - 1.0);
    let k_min = ((r.floor() as usize) + 1).max(2);
    if k_min > q {
        return t_two_sided_tail(x, qf - 1.0);
    }
    let mut best = 0.0f64;
    for k in k_min..=q {
        let kf = k as f64;
        let arg = (r * (kf - 1.0) / (kf - r)).sqrt();
        best = best.max(t_two_sided_tail(arg, kf - 1.0));
    }
    best.clamp(0.0, 1.0)
}

/// `β̄ ± cv·s/√q` with `cv = critical_value(q, 1 − confidence)`.
pub fn confidence_interval(estimates: &[f64], confidence: f64) -> Result<(f64, f64)> {
    check_q(estimates)?;
    check_level(confidence)?;
    let q = estimates.len();
    let cv = critical_value(q, 1.0 - confidence)?;
    let (m, s) = mean_and_sd(estimates);
    let half = cv * s / (q as f64).sqrt();
    Ok((m - half, m + half))
}

/// Self-normalized sum `Σx/√(Σx²)` expressed through the t-statistic.
pub fn sn_from_t(q: usize, t: f64) -> f64 {
    t / (1.0 + (t * t - 1.0) / q as f64).sqrt()
}

/// Edelman's bound `G(x) = 1 − Φ[x/d − 1.5 d/x]` with `d = √(1 + (x² − 1)/q)`.
pub fn edelman_p(q: usize, x: f64) -> Result<f64> {
    if q < 2 {
        return Err(Error::param("q", format!("need at least 2 groups, got {q}")));
    }
    if !(x > 0.0) {
        return Err(Error::param("x", format!("must be positive, got {x}")));
    }
    let d = (1.0 + (x * x - 1.0) / q as f64).sqrt();
    Ok(normal_sf(x / d - 1.5 * d / x).clamp(0.0, 1.0))
}

/// Outcome of a group t-test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupTestResult {
    pub estimates: Vec<f64>,
    pub pooled: f64,
    pub s_beta: f64,
    pub t_stat: f64,
    /// Conservative p-value from [`p_value_bound`].
    pub p_value: f64,
    pub ci: (f64, f64),
    pub q: usize,
    pub beta0: f64,
    pub confidence: f64,
    pub critical_value: f64,
    pub reject: bool,
    /// True when every block estimate coincides; then `t_stat` is 0 or ±∞.
    pub degenerate: bool,
    pub group_size: usize,
    pub discarded: usize,
}

impl GroupTestResult {
    /// Assembles the test from block estimates without raising on a zero spread.
    pub fn from_estimates(estimates: Vec<f64>, beta0: f64, confidence: f64) -> Result<Self> {
        check_q(&estimates)?;
        check_level(confidence)?;
        let q = estimates.len();
        let cv = critical_value(q, 1.0 - confidence)?;
        let (pooled, s_beta) = mean_and_sd(&estimates);
        let degenerate = s_beta == 0.0;
        let (t_stat, p_value) = if degenerate {
            if pooled == beta0 {
                (0.0, 1.0)
            } else {
                (f64::INFINITY.copysign(pooled - beta0), 0.0)
            }
        } else {
            let t = (q as f64).sqrt() * (pooled - beta0) / s_beta;
            (t, p_value_bound(q, t))
        };
        let half = cv * s_beta / (q as f64).sqrt();
        Ok(Self {
            estimates,
            pooled,
            s_beta,
            t_stat,
            p_value,
            ci: (pooled - half, pooled + half),
            q,
            beta0,
            confidence,
            critical_value: cv,
            reject: t_stat.abs() > cv,
            degenerate,
            group_size: 0,
            discarded: 0,
        })
    }

    fn with_partition(mut self, part: &GroupPartition) -> Self {
        self.group_size = part.group_size;
        self.discarded = part.discarded;
        self
    }

    pub fn level(&self) -> f64 {
        1.0 - self.confidence
    }
}

/// Group t-test of `H₀: β = beta0` for the measure in `spec`, reporting a
/// `confidence` interval and rejecting at level `1 − confidence`.
pub fn run_group_test(
    x: &Series,
    spec: &DependenceSpec,
    q: usize,
    beta0: f64,
    confidence: f64,
) -> Result<GroupTestResult> {
    spec.validate()?;
    let part = partition(x.len(), q, spec.lag)?;
    let pair = TransformedPair::for_spec(x.values(), spec);
    let est = group_estimates_pair(&pair, spec, &part)?;
    Ok(GroupTestResult::from_estimates(est, beta0, confidence)?.with_partition(&part))
}

/// Group t-test for an arbitrary block estimator over `len` observations.
pub fn run_group_test_with<F>(
    len: usize,
    q: usize,
    max_lag: usize,
    beta0: f64,
    confidence: f64,
    estimator: F,
) -> Result<GroupTestResult>
where
    F: FnMut(Range<usize>) -> Result<f64>,
{
    let part = partition(len, q, max_lag)?;
    let est = group_estimates_with(&part, estimator)?;
    Ok(GroupTestResult::from_estimates(est, beta0, confidence)?.with_partition(&part))
}
