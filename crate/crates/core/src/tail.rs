//! Tail-index estimation by the bias-corrected log-log rank-size regression,
//! and the rule mapping a tail-index lower bound to a usable signed power.
//!
//! The regression is `log(r − 1/2) = c − ζ·log(size_r)` over the `k` largest
//! absolute values (both tails pooled), with standard error `ζ̂·√(2/k)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::Series;

/// Smallest number of order statistics the regression accepts.
pub const MIN_ORDER_STATISTICS: usize = 10;
pub const DEFAULT_TAIL_FRACTION: f64 = 0.05;
const Z_975: f64 = 1.959963984540054;

/// Which observations enter the tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    /// Absolute values, both tails pooled.
    PooledAbs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub zeta_hat: f64,
    pub std_err: f64,
    /// 95% interval `ζ̂ ± 1.96·ζ̂·√(2/k)`.
    pub ci: (f64, f64),
    pub k_used: usize,
    pub tail: Tail,
    pub intercept: f64,
    /// Regression residuals in rank order (largest size first).
    #[serde(default, skip_serializing)]
    pub residuals: Vec<f64>,
}

/// Rank-size tail index using the top `⌈tail_fraction·T⌉` absolute values.
pub fn rank_size_zeta(x: &Series, tail_fraction: f64) -> Result<TailEstimate> {
    if !(tail_fraction > 0.0 && tail_fraction <= 0.5) {
        return Err(Error::param("tail_fraction", format!("must lie in (0, 0.5], got {tail_fraction}")));
    }
    let k = (tail_fraction * x.len() as f64).ceil() as usize;
    rank_size_zeta_k(x.values(), k)
}

/// Rank-size tail index using the `k` largest absolute values of `x`.
pub fn rank_size_zeta_k(x: &[f64], k: usize) -> Result<TailEstimate> {
    if k < MIN_ORDER_STATISTICS {
        return Err(Error::param(
            "k",
            format!("need at least {MIN_ORDER_STATISTICS} order statistics, got {k}"),
        ));
    }
    if k > x.len() {
        return Err(Error::param("k", format!("{k} exceeds the sample size {}", x.len())));
    }
    let mut sizes: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    // Partial selection of the top k, then a full sort of that slice only.
    if k < sizes.len() {
        sizes.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
        sizes.truncate(k);
    }
    sizes.sort_unstable_by(|a, b| b.total_cmp(a));
    rank_size_sorted(&sizes)
}

/// Regression on sizes already sorted in descending order.
pub fn rank_size_sorted(sizes: &[f64]) -> Result<TailEstimate> {
    let k = sizes.len();
    if k < MIN_ORDER_STATISTICS {
        return Err(Error::param(
            "k",
            format!("need at least {MIN_ORDER_STATISTICS} order statistics, got {k}"),
        ));
    }
    if let Some(i) = sizes.iter().position(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(Error::Degenerate(format!(
            "order statistic {} of the tail is not a positive finite size",
            i + 1
        )));
    }
    let xs: Vec<f64> = sizes.iter().map(|s| s.ln()).collect();
    let ys: Vec<f64> = (1..=k).map(|r| (r as f64 - 0.5).ln()).collect();
    let n = k as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 0.0 {
        return Err(Error::Degenerate("tail sizes are all equal".into()));
    }
    let slope = sxy / sxx;
    let zeta_hat = -slope;
    if !(zeta_hat > 0.0) {
        return Err(Error::Degenerate(format!(
            "rank-size slope {slope} is not negative"
        )));
    }
    let intercept = my - slope * mx;
    let residuals = xs.iter().zip(&ys).map(|(x, y)| y - intercept - slope * x).collect();
    let std_err = zeta_hat * (2.0 / n).sqrt();
    Ok(TailEstimate {
        zeta_hat,
        std_err,
        ci: (zeta_hat - Z_975 * std_err, zeta_hat + Z_975 * std_err),
        k_used: k,
        tail: Tail::PooledAbs,
        intercept,
        residuals,
    })
}

/// Signed power chosen from the lower end of a tail-index interval.
///
/// Intervals are half-open on the left: `(3, ∞) → 0.5`, `(2.5, 3] → 0.25`,
/// `(2.2, 2.5] → 0.1`. At or below 2.2 the rule refuses with `None`.
pub fn select_power(ci_lower: f64) -> Result<Option<f64>> {
    if !(ci_lower > 0.0) || !ci_lower.is_finite() {
        return Err(Error::param("ci_lower", format!("must be positive and finite, got {ci_lower}")));
    }
    Ok(if ci_lower > 3.0 {
        Some(0.5)
    } else if ci_lower > 2.5 {
        Some(0.25)
    } else if ci_lower > 2.2 {
        Some(0.1)
    } else {
        None
    })
}

/// Whether the signed-power cross-correlation at power `s` is covered by the
/// moment condition `2(1 + s) < ζ`.
pub fn signed_power_justified(s: f64, zeta_lower: f64) -> bool {
    2.0 * (1.0 + s) < zeta_lower
}

/// Whether the abs-power autocorrelation at power `p` is covered by `4p < ζ`.
pub fn abs_power_justified(p: f64, zeta_lower: f64) -> bool {
    4.0 * p < zeta_lower
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::{simulate_ar_arch, DgpSpec, InnovationDist};
    use proptest::prelude::*;

    fn exact_power_law(zeta: f64, k: usize) -> Vec<f64> {
        (1..=k).map(|r| (r as f64 - 0.5).powf(-1.0 / zeta)).collect()
    }

    #[test]
    fn exact_power_law_recovers_slope() {
        let est = rank_size_zeta_k(&exact_power_law(3.0, 100), 100).unwrap();
        assert!((est.zeta_hat - 3.0).abs() < 1e-12, "{}", est.zeta_hat);
        assert!(est.residuals.iter().all(|r| r.abs() < 1e-12));
        assert!(est.intercept.abs() < 1e-12);
    }

    #[test]
    fn signs_and_order_do_not_matter() {
        let mut v = exact_power_law(2.5, 60);
        for (i, x) in v.iter_mut().enumerate() {
            if i % 3 == 0 {
                *x = -*x;
            }
        }
        v.reverse();
        v.extend(std::iter::repeat_n(1e-3, 40));
        let est = rank_size_zeta_k(&v, 60).unwrap();
        assert!((est.zeta_hat - 2.5).abs() < 1e-12);
    }

    #[test]
    fn interval_half_width() {
        let est = rank_size_zeta_k(&exact_power_law(3.0, 500), 500).unwrap();
        let half = (est.ci.1 - est.ci.0) / 2.0;
        assert!((half - 1.96 * 3.0 * (2.0f64 / 500.0).sqrt()).abs() < 1e-3);
        assert!((half - 0.37188).abs() < 1e-4, "{half}");
        assert!((est.ci.0 - 2.6281).abs() < 1e-3 && (est.ci.1 - 3.3719).abs() < 1e-3);
    }

    #[test]
    fn rejects_small_or_degenerate_tails() {
        assert!(rank_size_zeta_k(&exact_power_law(3.0, 9), 9).is_err());
        assert!(rank_size_zeta_k(&[1.0; 20], 10).is_err());
        let mut v = exact_power_law(3.0, 20);
        v[19] = 0.0;
        assert!(rank_size_zeta_k(&v, 20).is_err());
        let x = Series::new(vec![1.0; 100]).unwrap();
        assert!(rank_size_zeta(&x, 0.05).is_err());
        assert!(rank_size_zeta(&x, 0.6).is_err());
    }

    #[test]
    fn fraction_rounds_up() {
        let x = Series::new((1..=1001).map(|i| (i as f64).powf(-0.5)).collect()).unwrap();
        assert_eq!(rank_size_zeta(&x, 0.01).unwrap().k_used, 11);
    }

    #[test]
    fn power_rule_examples() {
        assert_eq!(select_power(3.41).unwrap(), Some(0.5));
        assert_eq!(select_power(2.78).unwrap(), Some(0.25));
        assert_eq!(select_power(2.66).unwrap(), Some(0.25));
        assert_eq!(select_power(2.49).unwrap(), Some(0.1));
        assert_eq!(select_power(2.0).unwrap(), None);
        assert!(select_power(0.0).is_err());
        assert!(select_power(-1.0).is_err());
    }

    #[test]
    fn power_rule_boundaries() {
        assert_eq!(select_power(3.0).unwrap(), Some(0.25));
        assert_eq!(select_power(2.5).unwrap(), Some(0.1));
        assert_eq!(select_power(2.2).unwrap(), None);
        let up = |x: f64| f64::from_bits(x.to_bits() + 1);
        assert_eq!(select_power(up(3.0)).unwrap(), Some(0.5));
        assert_eq!(select_power(up(2.5)).unwrap(), Some(0.25));
        assert_eq!(select_power(up(2.2)).unwrap(), Some(0.1));
    }

    #[test]
    fn simulated_kesten_tail_is_in_range() {
        let alpha = std::f64::consts::PI.cbrt() / 2.0;
        let spec = DgpSpec::arch1(alpha, InnovationDist::StandardNormal, 200_000, 5);
        let x = simulate_ar_arch(&spec).unwrap();
        let est = rank_size_zeta(&x, 0.005).unwrap();
        assert!((est.zeta_hat - 3.0).abs() < 0.6, "{}", est.zeta_hat);
    }

    proptest! {
        #[test]
        fn scale_invariant(seed in 0u64..500, lambda in 1e-3f64..1e3) {
            use rand::Rng;
            let mut rng = crate::rng::stream(seed, 0);
            let x: Vec<f64> = (0..200).map(|_| rng.random::<f64>().powf(-0.4) - 0.5).collect();
            let a = rank_size_zeta_k(&x, 40).unwrap();
            let scaled: Vec<f64> = x.iter().map(|v| v * lambda).collect();
            let b = rank_size_zeta_k(&scaled, 40).unwrap();
            prop_assert!((a.zeta_hat - b.zeta_hat).abs() <= 1e-9 * a.zeta_hat);
        }

        #[test]
        fn rule_satisfies_moment_gate(lower in 0.01f64..10.0) {
            if let Some(s) = select_power(lower).unwrap() {
                prop_assert!(signed_power_justified(s, lower));
                prop_assert!(2.0 * (1.0 + s) <= [3.0, 2.5, 2.2][[0.5, 0.25, 0.1].iter().position(|v| *v == s).unwrap()]);
            } else {
                prop_assert!(lower <= 2.2);
            }
        }
    }
}
