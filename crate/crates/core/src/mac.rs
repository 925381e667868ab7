//! Multi-period autocorrelation MAC(H): a weighted sum of the signed-power
//! cross-correlations `ρ̂′_{R,|R|^s sign(R)}(h)` for `h = 1..H`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{partition, GroupTestResult};
use crate::hac::{hac_weighted_correlation_test, HacResult, KernelSpec};
use crate::series::{corr_slices, cov_slices, Series, Transform, TransformedPair};

/// How the `H` lag weights are chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "weights")]
pub enum MacWeights {
    /// `w_h = 1/H`.
    Equal,
    /// Variance-ratio weights `w_h = 2(1 − h/(H+1))`.
    VarianceRatio,
    Custom(Vec<f64>),
}

impl MacWeights {
    pub fn name(&self) -> &'static str {
        match self {
            MacWeights::Equal => "equal",
            MacWeights::VarianceRatio => "variance_ratio",
            MacWeights::Custom(_) => "custom",
        }
    }

    /// The weight vector for horizon `h_max`.
    pub fn resolve(&self, h_max: usize) -> Result<Vec<f64>> {
        if h_max == 0 {
            return Err(Error::param("H", "horizon must be at least 1"));
        }
        let w = match self {
            MacWeights::Equal => vec![1.0 / h_max as f64; h_max],
            MacWeights::VarianceRatio => (1..=h_max)
                .map(|h| 2.0 * (1.0 - h as f64 / (h_max + 1) as f64))
                .collect(),
            MacWeights::Custom(w) => {
                if w.len() != h_max {
                    return Err(Error::param(
                        "weights",
                        format!("expected {h_max} weights, got {}", w.len()),
                    ));
                }
                w.clone()
            }
        };
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("weights", "weights must be finite"));
        }
        Ok(w)
    }
}

/// `Σ w_h ρ_h` for precomputed correlations.
pub fn mac_from_correlations(rhos: &[f64], weights: &[f64]) -> f64 {
    rhos.iter().zip(weights).map(|(r, w)| r * w).sum()
}

fn mac_pair(x: &[f64], s: f64) -> Result<TransformedPair> {
    Ok(TransformedPair::new(x, Transform::Identity, Transform::signed_power(s)?))
}

fn lags(weights: &[f64]) -> Vec<(usize, f64)> {
    weights.iter().enumerate().map(|(i, &w)| (i + 1, w)).collect()
}

fn mac_slices(f: &[f64], g: &[f64], weights: &[f64]) -> Result<f64> {
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w * corr_slices(f, g, i + 1)?;
    }
    Ok(acc)
}

/// MAC(H) with `H = weights.len()` at signed power `s`.
pub fn mac_statistic(x: &Series, weights: &[f64], s: f64) -> Result<f64> {
    check(x.len(), weights)?;
    let pair = mac_pair(x.values(), s)?;
    mac_slices(&pair.f, &pair.g, weights)
}

fn check(len: usize, weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::param("weights", "need at least one lag weight"));
    }
    if weights.iter().any(|v| !v.is_finite()) {
        return Err(Error::param("weights", "weights must be finite"));
    }
    if len <= weights.len() {
        return Err(Error::LagTooLarge { lag: weights.len(), len });
    }
    Ok(())
}

/// Group t-test on block MAC(H) estimates.
pub fn mac_group_test(
    x: &Series,
    weights: &[f64],
    s: f64,
    q: usize,
    beta0: f64,
    confidence: f64,
) -> Result<GroupTestResult> {
    check(x.len(), weights)?;
    let pair = mac_pair(x.values(), s)?;
    let part = partition(x.len(), q, weights.len())?;
    let est = crate::group::group_estimates_with(&part, |r| {
        let (f, g) = pair.slice(r);
        if cov_slices(f, f, 0)? <= 0.0 || cov_slices(g, g, 0)? <= 0.0 {
            return Err(Error::Degenerate(
                "transformed values are constant within the group".into(),
            ));
        }
        mac_slices(f, g, weights)
    })?;
    let mut res = GroupTestResult::from_estimates(est, beta0, confidence)?;
    res.group_size = part.group_size;
    res.discarded = part.discarded;
    Ok(res)
}

/// HAC t-test on the full-sample MAC(H) via the stacked delta method.
pub fn mac_hac_test(
    x: &Series,
    weights: &[f64],
    s: f64,
    beta0: f64,
    kernel: &KernelSpec,
    confidence: f64,
) -> Result<HacResult> {
    check(x.len(), weights)?;
    let pair = mac_pair(x.values(), s)?;
    hac_weighted_correlation_test(&pair, &lags(weights), beta0, kernel, confidence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::sample_corr_fg;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn normals(n: usize, seed: u64) -> Series {
        let mut rng = crate::rng::stream(seed, 0);
        Series::new((0..n).map(|_| rng.sample(StandardNormal)).collect()).unwrap()
    }

    #[test]
    fn arithmetic() {
        let w = MacWeights::Equal.resolve(5).unwrap();
        let m = mac_from_correlations(&[0.1, 0.2, 0.3, 0.4, 0.5], &w);
        assert!((m - 0.3).abs() < 1e-15);
        assert_eq!(mac_from_correlations(&[0.1, 0.2], &[0.0, 0.0]), 0.0);
    }

    #[test]
    fn weight_presets() {
        let w = MacWeights::VarianceRatio.resolve(4).unwrap();
        for (a, b) in w.iter().zip([1.6, 1.2, 0.8, 0.4]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(MacWeights::Custom(vec![1.0]).resolve(2).is_err());
        assert!(MacWeights::Equal.resolve(0).is_err());
    }

    #[test]
    fn matches_individual_correlations() {
        let x = normals(2000, 1);
        let w = [0.5, -0.25, 2.0];
        let direct: f64 = w
            .iter()
            .enumerate()
            .map(|(i, wi)| wi * sample_corr_fg(&x, Transform::Identity, Transform::SignedPower(0.5), i + 1).unwrap())
            .sum();
        assert!((mac_statistic(&x, &w, 0.5).unwrap() - direct).abs() < 1e-15);
        assert_eq!(mac_statistic(&x, &[0.0; 3], 0.5).unwrap(), 0.0);
        let h = mac_hac_test(&x, &w, 0.5, 0.0, &KernelSpec::qs_auto(), 0.95).unwrap();
        assert!((h.estimate - direct).abs() < 1e-15);
    }

    #[test]
    fn iid_mac_is_near_zero() {
        let x = normals(100_000, 2);
        let w = MacWeights::Equal.resolve(5).unwrap();
        let m = mac_statistic(&x, &w, 1.0).unwrap();
        assert!(m.abs() < 3.0 * 5f64.sqrt() / (100_000f64).sqrt(), "{m}");
    }

    #[test]
    fn group_version_uses_block_sums() {
        let x = normals(4000, 3);
        let w = MacWeights::Equal.resolve(5).unwrap();
        let g = mac_group_test(&x, &w, 1.0, 8, 0.0, 0.95).unwrap();
        assert_eq!(g.q, 8);
        let first = Series::new(x.values()[0..500].to_vec()).unwrap();
        assert!((g.estimates[0] - mac_statistic(&first, &w, 1.0).unwrap()).abs() < 1e-15);
        assert!(mac_group_test(&x, &w, 1.0, 800, 0.0, 0.95).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        let x = normals(5, 4);
        assert!(mac_statistic(&x, &[], 1.0).is_err());
        assert!(mac_statistic(&x, &[1.0; 5], 1.0).is_err());
        assert!(mac_statistic(&x, &[f64::NAN], 1.0).is_err());
        let c = Series::new(vec![1.0; 100]).unwrap();
        assert!(mac_statistic(&c, &[1.0], 1.0).is_err());
    }
}
