//! Monte Carlo harness: size tables, size-adjusted power curves and coverage
//! curves for the HAC and group t-tests, plus the named study presets.
//!
//! Replication `r` always draws from `rng::stream(base_seed, r)`, at every grid
//! point and for every measure, so grid points share random numbers and the
//! results are a pure function of the configuration. Replications run on a
//! rayon pool and are reduced in index order, so the worker count never
//! changes the output.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dgp::{simulate_with, DgpSpec, InnovationDist};
use crate::error::{Error, Result};
use crate::group::{group_estimates_pair, partition, GroupTestResult};
use crate::hac::{hac_test_pair, KernelSpec};
use crate::numeric::fmt17;
use crate::rng;
use crate::series::{corr_slices, DependenceSpec, Measure, TransformedPair};

pub const DEFAULT_REPLICATIONS: usize = 2000;
pub const FULL_REPLICATIONS: usize = 10_000;
pub const DEFAULT_LEN: usize = 5000;
pub const DEFAULT_SEED: u64 = 2024;
pub const MIN_REPLICATIONS: usize = 100;
/// Length of the pilot simulation that supplies true autocorrelations.
pub const PILOT_LEN: usize = 10_000_000;

/// A test procedure evaluated in each replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// HAC t-test with the quadratic-spectral kernel and automatic bandwidth.
    HacQs,
    /// Group t-test with `q` blocks.
    GroupT(usize),
}

impl Method {
    pub fn id(&self) -> String {
        match self {
            Method::HacQs => "hac_qs".to_string(),
            Method::GroupT(q) => format!("group_t_q{q}"),
        }
    }

    pub fn group_ts(qs: &[usize]) -> Vec<Method> {
        qs.iter().map(|&q| Method::GroupT(q)).collect()
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "hac_qs" {
            return Ok(Method::HacQs);
        }
        s.strip_prefix("group_t_q")
            .and_then(|q| q.parse::<usize>().ok())
            .filter(|&q| q >= 2)
            .map(Method::GroupT)
            .ok_or_else(|| {
                Error::param("method", format!("unknown method '{s}' (expected hac_qs or group_t_q<q>)"))
            })
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.id())
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn default_level() -> f64 {
    0.05
}

/// One Monte Carlo design: a DGP template, the measures tested on each
/// simulated path, and the methods applied to each measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    /// Short name for the DGP, used in output rows.
    #[serde(default)]
    pub label: String,
    pub dgp: DgpSpec,
    /// Measures evaluated on the same simulated paths.
    pub specs: Vec<DependenceSpec>,
    pub methods: Vec<Method>,
    pub replications: usize,
    #[serde(default = "default_level")]
    pub nominal_level: f64,
    pub base_seed: u64,
    /// Hypothesized value for size and power studies.
    #[serde(default)]
    pub beta0: f64,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        self.dgp.validate()?;
        if self.specs.is_empty() {
            return Err(Error::param("specs", "need at least one dependence measure"));
        }
        if self.methods.is_empty() {
            return Err(Error::param("methods", "need at least one method"));
        }
        if self.replications < MIN_REPLICATIONS {
            return Err(Error::param(
                "replications",
                format!("need at least {MIN_REPLICATIONS}, got {}", self.replications),
            ));
        }
        if !(self.nominal_level > 0.0 && self.nominal_level < 1.0) {
            return Err(Error::param("nominal_level", format!("must lie in (0, 1), got {}", self.nominal_level)));
        }
        for spec in &self.specs {
            spec.validate()?;
            for m in &self.methods {
                if let Method::GroupT(q) = m {
                    partition(self.dgp.len, *q, spec.lag)?;
                }
            }
        }
        Ok(())
    }

    fn label(&self) -> String {
        if self.label.is_empty() {
            self.dgp.innovation.label()
        } else {
            self.label.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Study {
    Size,
    Power,
    Coverage,
}

/// One grid point × measure × method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McRow {
    pub study: Study,
    pub case: String,
    pub measure: Measure,
    pub exponent: f64,
    pub lag: usize,
    /// Swept DGP parameter (`phi` or `alpha`).
    pub grid: String,
    pub grid_value: f64,
    pub method: Method,
    /// Rejection frequency, or coverage rate for coverage studies.
    pub frequency: f64,
    pub mc_se: f64,
    pub n_rep: usize,
    /// Replications where the method raised an error; counted as non-rejection
    /// (or non-coverage).
    pub n_failed: usize,
    /// Size-adjusted critical value for power studies.
    pub critical_value: Option<f64>,
    /// True parameter value for coverage studies.
    pub truth: Option<f64>,
}

impl McRow {
    fn new(study: Study, case: &str, spec: &DependenceSpec, grid: &str, grid_value: f64, method: Method) -> Self {
        Self {
            study,
            case: case.to_string(),
            measure: spec.measure,
            exponent: spec.exponent,
            lag: spec.lag,
            grid: grid.to_string(),
            grid_value,
            method,
            frequency: 0.0,
            mc_se: 0.0,
            n_rep: 0,
            n_failed: 0,
            critical_value: None,
            truth: None,
        }
    }

    fn set_count(&mut self, hits: usize, n: usize, failed: usize) {
        let p = hits as f64 / n as f64;
        self.frequency = p;
        self.mc_se = mc_se(p, n);
        self.n_rep = n;
        self.n_failed = failed;
    }
}

/// `√(p(1 − p)/n)`.
pub fn mc_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub rows: Vec<McRow>,
}

impl McSummary {
    pub fn extend(&mut self, other: McSummary) {
        self.rows.extend(other.rows);
    }

    /// First row matching the given coordinates.
    pub fn find(&self, case: &str, exponent: f64, grid_value: f64, method: Method) -> Option<&McRow> {
        self.rows.iter().find(|r| {
            r.case == case && r.exponent == exponent && r.grid_value == grid_value && r.method == method
        })
    }

    pub const CSV_HEADER: [&'static str; 14] = [
        "study",
        "case",
        "measure",
        "exponent",
        "lag",
        "grid",
        "grid_value",
        "method",
        "frequency",
        "mc_se",
        "n_rep",
        "n_failed",
        "critical_value",
        "truth",
    ];

    /// Long-format CSV, one row per grid point × measure × method, floats at
    /// 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(Self::CSV_HEADER).map_err(io_err)?;
        for r in &self.rows {
            let study = match r.study {
                Study::Size => "size",
                Study::Power => "power",
                Study::Coverage => "coverage",
            };
            w.write_record([
                study.to_string(),
                r.case.clone(),
                r.measure.name().to_string(),
                fmt17(r.exponent),
                r.lag.to_string(),
                r.grid.clone(),
                fmt17(r.grid_value),
                r.method.id(),
                fmt17(r.frequency),
                fmt17(r.mc_se),
                r.n_rep.to_string(),
                r.n_failed.to_string(),
                r.critical_value.map(fmt17).unwrap_or_default(),
                r.truth.map(fmt17).unwrap_or_default(),
            ])
            .map_err(io_err)?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    /// Size table in the published layout: one row per case, one column
    /// per `(method, exponent)` in first-seen order, entries in percent.
    pub fn write_wide_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut cases: Vec<&str> = Vec::new();
        let mut cols: Vec<(Method, u64)> = Vec::new();
        let mut cells: HashMap<(&str, Method, u64), f64> = HashMap::new();
        for r in &self.rows {
            if !cases.contains(&r.case.as_str()) {
                cases.push(&r.case);
            }
            let key = (r.method, r.exponent.to_bits());
            if !cols.contains(&key) {
                cols.push(key);
            }
            cells.insert((&r.case, r.method, r.exponent.to_bits()), r.frequency);
        }
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["case".to_string()];
        header.extend(cols.iter().map(|(m, e)| format!("{}_s{}", m.id(), f64::from_bits(*e))));
        w.write_record(&header).map_err(io_err)?;
        for case in cases {
            let mut rec = vec![case.to_string()];
            for (m, e) in &cols {
                rec.push(cells.get(&(case, *m, *e)).map(|p| fmt17(100.0 * p)).unwrap_or_default());
            }
            w.write_record(&rec).map_err(io_err)?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))?;
        Ok(())
    }
}

fn io_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Per-replication outcome of one method on one measure.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Outcome {
    abs_t: f64,
    reject: bool,
    ci: (f64, f64),
}

/// Applies every method to every measure on one simulated path.
fn evaluate(
    x: &[f64],
    specs: &[DependenceSpec],
    methods: &[Method],
    beta0: f64,
    confidence: f64,
) -> Vec<Option<Outcome>> {
    let kernel = KernelSpec::qs_auto();
    let mut out = Vec::with_capacity(specs.len() * methods.len());
    for spec in specs {
        let pair = TransformedPair::for_spec(x, spec);
        for m in methods {
            let res = match *m {
                Method::HacQs => hac_test_pair(&pair, spec, beta0, &kernel, confidence).map(|h| Outcome {
                    abs_t: h.t_stat.abs(),
                    reject: h.reject,
                    ci: h.ci,
                }),
                Method::GroupT(q) => partition(x.len(), q, spec.lag)
                    .and_then(|part| group_estimates_pair(&pair, spec, &part))
                    .and_then(|est| GroupTestResult::from_estimates(est, beta0, confidence))
                    .map(|g| Outcome {
                        abs_t: g.t_stat.abs(),
                        reject: g.reject,
                        ci: g.ci,
                    }),
            };
            out.push(res.ok().filter(|o| !o.abs_t.is_nan()));
        }
    }
    out
}

/// Runs `f(r)` for `r = 0..n` on `workers` threads (or the global pool) and
/// returns the results in index order.
pub fn run_indexed<T, F>(n: usize, workers: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    let job = || (0..n as u64).into_par_iter().map(&f).collect::<Vec<T>>();
    match workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
        None => Ok(job()),
    }
}

/// Outcomes for every replication at one DGP, indexed `[rep][spec·methods + method]`.
fn replicate(config: &McConfig, dgp: &DgpSpec, workers: Option<usize>) -> Result<Vec<Vec<Option<Outcome>>>> {
    dgp.validate()?;
    let law = dgp.innovation.law()?;
    let confidence = 1.0 - config.nominal_level;
    run_indexed(config.replications, workers, |r| {
        let mut rng = rng::stream(config.base_seed, r);
        let x = simulate_with(dgp, &law, &mut rng);
        evaluate(&x, &config.specs, &config.methods, config.beta0, confidence)
    })
}

fn cells(config: &McConfig) -> impl Iterator<Item = (usize, &DependenceSpec, Method)> {
    config
        .specs
        .iter()
        .flat_map(move |s| config.methods.iter().map(move |m| (s, *m)))
        .enumerate()
        .map(|(i, (s, m))| (i, s, m))
}

/// Rejection frequencies at the nominal level under the configured DGP.
pub fn mc_size(config: &McConfig, workers: Option<usize>) -> Result<McSummary> {
    config.validate()?;
    let reps = replicate(config, &config.dgp, workers)?;
    let case = config.label();
    let mut summary = McSummary::default();
    for (i, spec, m) in cells(config) {
        let mut row = McRow::new(Study::Size, &case, spec, "phi", config.dgp.phi, m);
        let failed = reps.iter().filter(|o| o[i].is_none()).count();
        let hits = reps.iter().filter(|o| o[i].is_some_and(|o| o.reject)).count();
        row.set_count(hits, reps.len(), failed);
        summary.rows.push(row);
    }
    Ok(summary)
}

/// Empirical `(1 − level)` quantile of null statistics: the order statistic
/// at position `⌈(1 − level)·n⌉`.
pub fn size_adjusted_critical_value(stats: &[f64], level: f64) -> f64 {
    let mut v = stats.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let idx = ((1.0 - level) * n as f64).ceil() as usize;
    v[idx.clamp(1, n) - 1]
}

/// Size-adjusted power over `phi_grid`. The critical value of each method is
/// the empirical null quantile of `|t|` at `φ = 0` with the same random
/// streams; failed replications count as `|t| = 0`.
pub fn mc_power_curve(config: &McConfig, phi_grid: &[f64], workers: Option<usize>) -> Result<McSummary> {
    config.validate()?;
    if !phi_grid.contains(&0.0) {
        return Err(Error::param("phi_grid", "must contain 0 for the size adjustment"));
    }
    for &phi in phi_grid {
        if !(0.0..1.0).contains(&phi) {
            return Err(Error::param("phi_grid", format!("{phi} outside [0, 1)")));
        }
    }
    let stat = |o: &Option<Outcome>| o.map_or(0.0, |o| o.abs_t);
    let null = replicate(config, &config.dgp.with_phi(0.0), workers)?;
    let ncell = config.specs.len() * config.methods.len();
    let cvs: Vec<f64> = (0..ncell)
        .map(|i| {
            let stats: Vec<f64> = null.iter().map(|o| stat(&o[i])).collect();
            size_adjusted_critical_value(&stats, config.nominal_level)
        })
        .collect();
    let case = config.label();
    let mut summary = McSummary::default();
    for &phi in phi_grid {
        let reps = if phi == 0.0 {
            null.clone()
        } else {
            replicate(config, &config.dgp.with_phi(phi), workers)?
        };
        for (i, spec, m) in cells(config) {
            let mut row = McRow::new(Study::Power, &case, spec, "phi", phi, m);
            let failed = reps.iter().filter(|o| o[i].is_none()).count();
            let hits = reps.iter().filter(|o| stat(&o[i]) > cvs[i]).count();
            row.set_count(hits, reps.len(), failed);
            row.critical_value = Some(cvs[i]);
            summary.rows.push(row);
        }
    }
    Ok(summary)
}

/// Source of true parameter values for coverage studies.
pub trait TruthOracle: Sync {
    fn truth(&self, dgp: &DgpSpec, spec: &DependenceSpec) -> Result<f64>;
}

/// Truth from one long pilot simulation per `(DGP, measure)`, memoized.
#[derive(Debug)]
pub struct PilotTruth {
    pub len: usize,
    pub seed: u64,
    cache: Mutex<HashMap<String, f64>>,
}

impl PilotTruth {
    pub fn new(len: usize, seed: u64) -> Self {
        Self {
            len,
            seed,
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl TruthOracle for PilotTruth {
    fn truth(&self, dgp: &DgpSpec, spec: &DependenceSpec) -> Result<f64> {
        let key = format!("{dgp:?}|{spec:?}");
        if let Some(v) = self.cache.lock().expect("truth cache poisoned").get(&key) {
            return Ok(*v);
        }
        let v = pilot_value(dgp, spec, self.len, self.seed)?;
        self.cache.lock().expect("truth cache poisoned").insert(key, v);
        Ok(v)
    }
}

/// Full-sample estimate of `spec` on one simulated path of length `len`
/// drawn from stream `(seed, u64::MAX)`, disjoint from replication streams.
pub fn pilot_value(dgp: &DgpSpec, spec: &DependenceSpec, len: usize, seed: u64) -> Result<f64> {
    spec.validate()?;
    let dgp = DgpSpec { len, ..*dgp };
    dgp.validate()?;
    let law = dgp.innovation.law()?;
    let mut rng = rng::stream(seed, u64::MAX);
    let mut x = simulate_with(&dgp, &law, &mut rng);
    let (f, g) = spec.transforms();
    if f == g {
        for v in x.iter_mut() {
            *v = f.apply(*v);
        }
        return if spec.measure.is_correlation() {
            corr_slices(&x, &x, spec.lag)
        } else {
            crate::series::cov_slices(&x, &x, spec.lag)
        };
    }
    let pair = TransformedPair::new(&x, f, g);
    crate::series::estimate_pair(&pair.f, &pair.g, spec)
}

/// Closed-form `ρ_{R²}(h)` for a GARCH(1,1) without AR term, when the fourth
/// moment exists (`κα² + 2αβ + β² < 1` with `κ = E Z⁴`):
/// `ρ(1) = α(1 − αβ − β²)/(1 − 2αβ − β²)`, `ρ(h) = ρ(1)(α + β)^{h−1}`.
pub fn squared_autocorr_closed_form(dgp: &DgpSpec, lag: usize) -> Result<Option<f64>> {
    if dgp.phi != 0.0 || lag == 0 {
        return Ok(None);
    }
    let kappa = match dgp.innovation {
        InnovationDist::StandardNormal => 3.0,
        InnovationDist::SkewedT { eta, .. } if eta > 4.0 => dgp.innovation.law()?.abs_moment(4.0)?,
        InnovationDist::SkewedT { .. } => return Ok(None),
    };
    let (a, b) = (dgp.alpha, dgp.beta);
    if kappa * a * a + 2.0 * a * b + b * b >= 1.0 {
        return Ok(None);
    }
    let rho1 = a * (1.0 - a * b - b * b) / (1.0 - 2.0 * a * b - b * b);
    Ok(Some(rho1 * (a + b).powi(lag as i32 - 1)))
}

/// Coverage of nominal `1 − level` intervals over `alpha_grid` (ARCH
/// coefficient of the template DGP).
pub fn mc_coverage(
    config: &McConfig,
    alpha_grid: &[f64],
    oracle: &dyn TruthOracle,
    workers: Option<usize>,
) -> Result<McSummary> {
    config.validate()?;
    let case = config.label();
    let mut summary = McSummary::default();
    for &alpha in alpha_grid {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::param("alpha_grid", format!("{alpha} outside (0, 1)")));
        }
        let dgp = DgpSpec { alpha, ..config.dgp };
        let truths = config
            .specs
            .iter()
            .map(|s| oracle.truth(&dgp, s))
            .collect::<Result<Vec<f64>>>()?;
        let reps = replicate(config, &dgp, workers)?;
        for (i, spec, m) in cells(config) {
            let truth = truths[i / config.methods.len()];
            let mut row = McRow::new(Study::Coverage, &case, spec, "alpha", alpha, m);
            let failed = reps.iter().filter(|o| o[i].is_none()).count();
            let hits = reps
                .iter()
                .filter(|o| o[i].is_some_and(|o| o.ci.0 <= truth && truth <= o.ci.1))
                .count();
            row.set_count(hits, reps.len(), failed);
            row.truth = Some(truth);
            summary.rows.push(row);
        }
    }
    Ok(summary)
}

/// The ARCH(1) coefficient whose normal-innovation tail index is 3.
pub fn kesten_alpha_3() -> f64 {
    std::f64::consts::PI.cbrt() / 2.0
}

/// The three innovation cases of the simulation study.
pub fn study_cases() -> Vec<(&'static str, InnovationDist)> {
    vec![
        ("a", InnovationDist::StandardNormal),
        ("b", InnovationDist::SkewedT { eta: 50.0, lambda: 0.5 }),
        ("c", InnovationDist::SkewedT { eta: 3.0, lambda: 0.5 }),
    ]
}

fn case_dist(name: &str) -> InnovationDist {
    study_cases()
        .into_iter()
        .find(|(c, _)| *c == name)
        .map(|(_, d)| d)
        .expect("known case")
}

/// Named experiment presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// Size of tests of `ρ′_{R,|R|^s sign(R)}(1) = 0` for cases (a)–(c).
    Table1,
    /// Size-adjusted power over `φ`, cases (a) and (c), HAC vs `q = 8`.
    Fig1,
    /// Size-adjusted power over `φ`, case (a), `s = 1`, all `q`.
    Fig2,
    /// Coverage of intervals for `ρ_{|R|^p}(1)` over `α`, case (a).
    Fig3,
    /// Default settings of the empirical pipeline.
    Empirical,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::Table1, Preset::Fig1, Preset::Fig2, Preset::Fig3, Preset::Empirical];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Table1 => "table1",
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Empirical => "empirical",
        }
    }

    pub fn names() -> String {
        Self::ALL.iter().map(|p| p.name()).collect::<Vec<_>>().join(", ")
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::param("preset", format!("unknown preset '{s}'; available presets: {}", Self::names())))
    }
}

/// Settings shared by all Monte Carlo presets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PresetOptions {
    pub replications: usize,
    pub len: usize,
    pub base_seed: u64,
    pub nominal_level: f64,
    pub pilot_len: usize,
    /// Overrides the preset's sweep (`φ` for power, `α` for coverage).
    pub grid: Option<Vec<f64>>,
}

impl Default for PresetOptions {
    fn default() -> Self {
        Self {
            replications: DEFAULT_REPLICATIONS,
            len: DEFAULT_LEN,
            base_seed: DEFAULT_SEED,
            nominal_level: 0.05,
            pilot_len: PILOT_LEN,
            grid: None,
        }
    }
}

impl PresetOptions {
    /// Full-scale 10 000 replications.
    pub fn full_scale() -> Self {
        Self {
            replications: FULL_REPLICATIONS,
            ..Self::default()
        }
    }
}

pub const TABLE1_POWERS: [f64; 4] = [1.0, 0.5, 0.25, 0.1];
pub const GROUP_COUNTS: [usize; 4] = [4, 8, 12, 16];
pub const PHI_GRID: [f64; 6] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];
pub const COVERAGE_POWERS: [f64; 4] = [0.1, 0.25, 1.0, 2.0];
pub const ALPHA_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

fn signed_specs(powers: &[f64]) -> Result<Vec<DependenceSpec>> {
    powers.iter().map(|&s| DependenceSpec::signed_power_crosscorr(s, 1)).collect()
}

fn all_methods() -> Vec<Method> {
    let mut m = vec![Method::HacQs];
    m.extend(Method::group_ts(&GROUP_COUNTS));
    m
}

/// The Monte Carlo designs a preset runs, in output order.
pub fn preset_configs(preset: Preset, opts: &PresetOptions) -> Result<Vec<McConfig>> {
    let base = |case: &str, specs: Vec<DependenceSpec>, methods: Vec<Method>| McConfig {
        label: case.to_string(),
        dgp: DgpSpec::arch1(kesten_alpha_3(), case_dist(case), opts.len, 0),
        specs,
        methods,
        replications: opts.replications,
        nominal_level: opts.nominal_level,
        base_seed: opts.base_seed,
        beta0: 0.0,
    };
    Ok(match preset {
        Preset::Table1 => study_cases()
            .into_iter()
            .map(|(c, _)| Ok(base(c, signed_specs(&TABLE1_POWERS)?, all_methods())))
            .collect::<Result<_>>()?,
        Preset::Fig1 => ["a", "c"]
            .into_iter()
            .map(|c| Ok(base(c, signed_specs(&TABLE1_POWERS)?, vec![Method::HacQs, Method::GroupT(8)])))
            .collect::<Result<_>>()?,
        Preset::Fig2 => vec![base("a", signed_specs(&[1.0])?, all_methods())],
        Preset::Fig3 => {
            let specs = COVERAGE_POWERS
                .iter()
                .map(|&p| DependenceSpec::abs_power_autocorr(p, 1))
                .collect::<Result<_>>()?;
            vec![base("a", specs, all_methods())]
        }
        Preset::Empirical => {
            return Err(Error::param(
                "preset",
                "the empirical preset configures the empirical pipeline, not a Monte Carlo study",
            ))
        }
    })
}

/// Runs a Monte Carlo preset.
pub fn run_preset(preset: Preset, opts: &PresetOptions, workers: Option<usize>) -> Result<McSummary> {
    let configs = preset_configs(preset, opts)?;
    let mut summary = McSummary::default();
    for config in &configs {
        let part = match preset {
            Preset::Table1 => mc_size(config, workers)?,
            Preset::Fig1 | Preset::Fig2 => {
                let grid = opts.grid.clone().unwrap_or_else(|| PHI_GRID.to_vec());
                mc_power_curve(config, &grid, workers)?
            }
            Preset::Fig3 => {
                let grid = opts.grid.clone().unwrap_or_else(|| ALPHA_GRID.to_vec());
                let oracle = PilotTruth::new(opts.pilot_len, opts.base_seed);
                mc_coverage(config, &grid, &oracle, workers)?
            }
            Preset::Empirical => unreachable!("rejected by preset_configs"),
        };
        summary.extend(part);
    }
    Ok(summary)
}

/// Reproducibility record for a preset run; contains no timestamps or
/// scheduling details so that equal inputs give equal manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub preset: String,
    pub code_version: String,
    pub options: PresetOptions,
    pub configs: Vec<McConfig>,
    pub rng: String,
}

impl RunManifest {
    pub fn new(preset: Preset, opts: &PresetOptions) -> Result<Self> {
        let configs = preset_configs(preset, opts)?;
        Ok(Self {
            preset: preset.name().to_string(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            options: opts.clone(),
            configs,
            rng: "ChaCha8, key from seed_from_u64(base_seed), stream id = replication index; pilot stream id = 2^64 - 1".to_string(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }
}
