//! Empirical pipeline for return series: tail index, power selection,
//! efficiency tests at a short lag, MAC(H), and volatility-clustering
//! intervals, each tagged with whether the tail estimate supports the moment
//! conditions behind it.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{run_group_test, GroupTestResult};
use crate::hac::{hac_test_with, HacResult, KernelSpec};
use crate::io::Instrument;
use crate::mac::{mac_group_test, mac_hac_test, mac_statistic, MacWeights};
use crate::numeric::fmt17;
use crate::series::{estimate, DependenceSpec, Series};
use crate::tail::{
    abs_power_justified, rank_size_zeta, select_power, signed_power_justified, TailEstimate,
    DEFAULT_TAIL_FRACTION,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmpiricalConfig {
    pub tail_fraction: f64,
    /// Lag of the efficiency tests.
    pub efficiency_lag: usize,
    pub q: usize,
    pub mac_horizon: usize,
    pub mac_weights: MacWeights,
    /// Powers `p` of the clustering autocorrelations `ρ_{|R|^p}(h)`.
    pub clustering_powers: Vec<f64>,
    pub clustering_lag: usize,
    pub confidence: f64,
    pub kernel: KernelSpec,
}

impl Default for EmpiricalConfig {
    fn default() -> Self {
        Self {
            tail_fraction: DEFAULT_TAIL_FRACTION,
            efficiency_lag: 1,
            q: 8,
            mac_horizon: 5,
            mac_weights: MacWeights::Equal,
            clustering_powers: vec![0.1, 0.5, 1.0, 2.0],
            clustering_lag: 5,
            confidence: 0.95,
            kernel: KernelSpec::qs_auto(),
        }
    }
}

impl EmpiricalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.q < 2 {
            return Err(Error::param("q", "need at least 2 groups"));
        }
        if self.efficiency_lag == 0 || self.clustering_lag == 0 {
            return Err(Error::param("lag", "lags must be at least 1"));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::param("confidence", format!("must lie in (0, 1), got {}", self.confidence)));
        }
        for &p in &self.clustering_powers {
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::param("clustering_powers", format!("{p} is not a positive power")));
            }
        }
        self.mac_weights.resolve(self.mac_horizon)?;
        self.kernel.validate()
    }

    /// Shortest series the configured group tests can partition.
    pub fn min_len(&self) -> usize {
        let lag = self.efficiency_lag.max(self.clustering_lag).max(self.mac_horizon);
        self.q * (lag + 2)
    }
}

/// Significance stars for a p-value: `***` at 1%, `**` at 5%, `*` at 10%.
pub fn stars(p_value: f64) -> &'static str {
    if p_value <= 0.01 {
        "***"
    } else if p_value <= 0.05 {
        "**"
    } else if p_value <= 0.10 {
        "*"
    } else {
        ""
    }
}

/// One test of `H₀: β = 0` with its interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestSummary {
    /// `hac_qs` or `group_t`.
    pub method: String,
    pub q: Option<usize>,
    pub level: f64,
    pub t_stat: f64,
    /// Two-sided normal p-value for HAC; conservative bound for group tests.
    pub p_value: f64,
    pub ci: (f64, f64),
    pub reject: bool,
    pub stars: String,
    /// Whether the tail-index lower bound supports this test's moment condition.
    pub justified: bool,
}

impl TestSummary {
    fn from_hac(r: &HacResult, justified: bool) -> Self {
        Self {
            method: "hac_qs".into(),
            q: None,
            level: 1.0 - r.confidence,
            t_stat: r.t_stat,
            p_value: r.p_value,
            ci: r.ci,
            reject: r.reject,
            stars: stars(r.p_value).into(),
            justified,
        }
    }

    fn from_group(r: &GroupTestResult, justified: bool) -> Self {
        Self {
            method: "group_t".into(),
            q: Some(r.q),
            level: r.level(),
            t_stat: r.t_stat,
            p_value: r.p_value,
            ci: r.ci,
            reject: r.reject,
            stars: stars(r.p_value).into(),
            justified,
        }
    }

    pub fn excludes_zero(&self) -> bool {
        self.ci.0 > 0.0 || self.ci.1 < 0.0
    }
}

/// Estimate plus HAC and group tests for one quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantityTests {
    /// `signed_power_crosscorr`, `mac` or `abs_power_autocorr`.
    pub quantity: String,
    pub power: f64,
    pub lag: usize,
    pub estimate: f64,
    pub hac: Option<TestSummary>,
    pub group: Option<TestSummary>,
    /// Errors raised by individual tests.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstrumentAnalysis {
    pub tail: TailEstimate,
    /// Signed power chosen from the tail-index lower bound, if the rule fires.
    pub selected_s: Option<f64>,
    pub linear: QuantityTests,
    pub selected: Option<QuantityTests>,
    pub mac: Option<QuantityTests>,
    pub clustering: Vec<QuantityTests>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstrumentReport {
    pub name: String,
    pub n_obs: usize,
    pub analysis: Option<InstrumentAnalysis>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalReport {
    pub config: EmpiricalConfig,
    pub instruments: Vec<InstrumentReport>,
}

fn test_quantity(
    x: &Series,
    spec: &DependenceSpec,
    cfg: &EmpiricalConfig,
    hac_ok: bool,
    group_ok: bool,
) -> Result<QuantityTests> {
    let est = estimate(x, spec)?;
    let mut notes = Vec::new();
    let hac = match hac_test_with(x, spec, 0.0, &cfg.kernel, cfg.confidence) {
        Ok(r) => Some(TestSummary::from_hac(&r, hac_ok)),
        Err(e) => {
            notes.push(format!("hac: {e}"));
            None
        }
    };
    let group = match run_group_test(x, spec, cfg.q, 0.0, cfg.confidence) {
        Ok(r) => Some(TestSummary::from_group(&r, group_ok)),
        Err(e) => {
            notes.push(format!("group: {e}"));
            None
        }
    };
    Ok(QuantityTests {
        quantity: spec.measure.name().into(),
        power: spec.exponent,
        lag: spec.lag,
        estimate: est,
        hac,
        group,
        notes,
    })
}

fn test_mac(x: &Series, s: f64, cfg: &EmpiricalConfig, justified: bool) -> Result<QuantityTests> {
    let w = cfg.mac_weights.resolve(cfg.mac_horizon)?;
    let est = mac_statistic(x, &w, s)?;
    let mut notes = Vec::new();
    let hac = match mac_hac_test(x, &w, s, 0.0, &cfg.kernel, cfg.confidence) {
        Ok(r) => Some(TestSummary::from_hac(&r, justified)),
        Err(e) => {
            notes.push(format!("hac: {e}"));
            None
        }
    };
    let group = match mac_group_test(x, &w, s, cfg.q, 0.0, cfg.confidence) {
        Ok(r) => Some(TestSummary::from_group(&r, justified)),
        Err(e) => {
            notes.push(format!("group: {e}"));
            None
        }
    };
    Ok(QuantityTests {
        quantity: format!("mac_{}", cfg.mac_weights.name()),
        power: s,
        lag: cfg.mac_horizon,
        estimate: est,
        hac,
        group,
        notes,
    })
}

/// Runs the pipeline on one series.
pub fn analyze(x: &Series, cfg: &EmpiricalConfig) -> Result<InstrumentAnalysis> {
    cfg.validate()?;
    if x.len() < cfg.min_len() {
        return Err(Error::GroupsTooSmall {
            len: x.len(),
            q: cfg.q,
            group_size: x.len() / cfg.q,
            required: cfg.min_len() / cfg.q,
        });
    }
    let tail = rank_size_zeta(x, cfg.tail_fraction)?;
    let zl = tail.ci.0;
    let mut diagnostics = Vec::new();
    let selected_s = if zl > 0.0 {
        select_power(zl)?
    } else {
        None
    };
    if selected_s.is_none() {
        diagnostics.push(format!(
            "tail-index lower bound {zl:.3} is at most 2.2: insufficient moments for the power rule"
        ));
    }
    let lag = cfg.efficiency_lag;
    let lin_ok = signed_power_justified(1.0, zl);
    let linear = test_quantity(x, &DependenceSpec::signed_power_crosscorr(1.0, lag)?, cfg, lin_ok, lin_ok)?;
    let (selected, mac) = match selected_s {
        Some(s) => {
            let ok = signed_power_justified(s, zl);
            let sel = test_quantity(x, &DependenceSpec::signed_power_crosscorr(s, lag)?, cfg, ok, ok)?;
            (Some(sel), Some(test_mac(x, s, cfg, ok)?))
        }
        None => (None, None),
    };
    let clustering = cfg
        .clustering_powers
        .iter()
        .map(|&p| {
            let spec = DependenceSpec::abs_power_autocorr(p, cfg.clustering_lag)?;
            test_quantity(x, &spec, cfg, 8.0 * p < zl, abs_power_justified(p, zl))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InstrumentAnalysis {
        tail,
        selected_s,
        linear,
        selected,
        mac,
        clustering,
        diagnostics,
    })
}

/// Runs the pipeline on every instrument; a failing instrument records its
/// error and the others proceed.
pub fn run_empirical(instruments: &[Instrument], cfg: &EmpiricalConfig) -> Result<EmpiricalReport> {
    cfg.validate()?;
    let reports = instruments
        .iter()
        .map(|inst| match analyze(&inst.returns, cfg) {
            Ok(a) => InstrumentReport {
                name: inst.name.clone(),
                n_obs: inst.len(),
                analysis: Some(a),
                error: None,
            },
            Err(e) => InstrumentReport {
                name: inst.name.clone(),
                n_obs: inst.len(),
                analysis: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    Ok(EmpiricalReport {
        config: cfg.clone(),
        instruments: reports,
    })
}

impl EmpiricalReport {
    pub const CSV_HEADER: [&'static str; 15] = [
        "instrument",
        "quantity",
        "power",
        "lag",
        "method",
        "q",
        "estimate",
        "t_stat",
        "p_value",
        "ci_lower",
        "ci_upper",
        "stars",
        "justified",
        "tail_index",
        "note",
    ];

    /// One row per instrument × quantity × method; tail estimates appear as
    /// `tail_index` rows whose interval is the tail-index interval.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(Self::CSV_HEADER).map_err(io)?;
        for inst in &self.instruments {
            let Some(a) = &inst.analysis else {
                let mut rec = vec![String::new(); Self::CSV_HEADER.len()];
                rec[0] = inst.name.clone();
                rec[1] = "error".into();
                rec[14] = inst.error.clone().unwrap_or_default();
                w.write_record(&rec).map_err(io)?;
                continue;
            };
            let zeta = fmt17(a.tail.zeta_hat);
            w.write_record([
                inst.name.clone(),
                "tail_index".into(),
                String::new(),
                String::new(),
                "rank_size".into(),
                String::new(),
                zeta.clone(),
                String::new(),
                String::new(),
                fmt17(a.tail.ci.0),
                fmt17(a.tail.ci.1),
                String::new(),
                String::new(),
                zeta.clone(),
                format!("k={}; selected_s={}", a.tail.k_used, a.selected_s.map_or("none".into(), |s| s.to_string())),
            ])
            .map_err(io)?;
            let quantities = std::iter::once(&a.linear)
                .chain(a.selected.iter())
                .chain(a.mac.iter())
                .chain(a.clustering.iter());
            for qt in quantities {
                for t in [&qt.hac, &qt.group].into_iter().flatten() {
                    w.write_record([
                        inst.name.clone(),
                        qt.quantity.clone(),
                        fmt17(qt.power),
                        qt.lag.to_string(),
                        t.method.clone(),
                        t.q.map(|q| q.to_string()).unwrap_or_default(),
                        fmt17(qt.estimate),
                        fmt17(t.t_stat),
                        fmt17(t.p_value),
                        fmt17(t.ci.0),
                        fmt17(t.ci.1),
                        t.stars.clone(),
                        t.justified.to_string(),
                        zeta.clone(),
                        qt.notes.join("; "),
                    ])
                    .map_err(io)?;
                }
            }
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }
}
