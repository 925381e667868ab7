//! AR(1)-GARCH(1,1) simulation and Kesten tail indexes.
//!
//! The process is
//!
//! ```text
//! σ_t² = ω + α ε_{t−1}² + β σ_{t−1}²
//! ε_t  = σ_t Z_t
//! R_t  = φ R_{t−1} + ε_t
//! ```
//!
//! with `Z_t` i.i.d. standard normal or Hansen's standardized skewed t. The
//! tail index of `ε_t` is the positive root ζ of `E[(αZ² + β)^{ζ/2}] = 1`.

use crate::error::{Error, Result};
use crate::quadrature::{integrate_half_line, integrate_real_line, QuadOptions};
use crate::rng::{self, StreamRng};
use crate::series::Series;
use crate::special::{normal_pdf, t_cdf, t_isf, t_quantile, t_sf};
use rand::distr::{Distribution, Open01};
use rand_distr::{StandardNormal, StudentT};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;

pub const DEFAULT_BURN_IN: usize = 1000;

/// Distribution of the standardized innovations `Z_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InnovationDist {
    StandardNormal,
    /// Hansen's skewed t with `eta` degrees of freedom and skewness `lambda`.
    SkewedT { eta: f64, lambda: f64 },
}

impl InnovationDist {
    pub fn skewed_t(eta: f64, lambda: f64) -> Result<Self> {
        let d = InnovationDist::SkewedT { eta, lambda };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            InnovationDist::StandardNormal => Ok(()),
            InnovationDist::SkewedT { eta, lambda } => {
                if !(eta.is_finite() && eta > 2.0) {
                    return Err(Error::param("eta", format!("must exceed 2, got {eta}")));
                }
                if !(lambda > -1.0 && lambda < 1.0) {
                    return Err(Error::param("lambda", format!("must lie in (-1, 1), got {lambda}")));
                }
                Ok(())
            }
        }
    }

    /// Density, CDF and quantile evaluator; panics only on an unvalidated distribution.
    pub fn law(&self) -> Result<Innovation> {
        self.validate()?;
        Ok(match *self {
            InnovationDist::StandardNormal => Innovation::Normal,
            InnovationDist::SkewedT { eta, lambda } => Innovation::SkewT(SkewT::new(eta, lambda)),
        })
    }

    pub fn label(&self) -> String {
        match *self {
            InnovationDist::StandardNormal => "N(0,1)".to_string(),
            InnovationDist::SkewedT { eta, lambda } => format!("t({eta}, {lambda})"),
        }
    }
}

/// Hansen's skewed t with precomputed constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewT {
    pub eta: f64,
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    // √((η−2)/η): maps a standard t(η) variate to unit variance.
    unit: f64,
    t: StudentT<f64>,
}

impl SkewT {
    fn new(eta: f64, lambda: f64) -> Self {
        let c = (ln_gamma(0.5 * (eta + 1.0)) - ln_gamma(0.5 * eta)).exp() / (PI * (eta - 2.0)).sqrt();
        let a = 4.0 * lambda * c * (eta - 2.0) / (eta - 1.0);
        let b = (1.0 + 3.0 * lambda * lambda - a * a).sqrt();
        Self {
            eta,
            lambda,
            a,
            b,
            c,
            unit: ((eta - 2.0) / eta).sqrt(),
            t: StudentT::new(eta).expect("validated degrees of freedom"),
        }
    }

    /// The point `−a/b` where the density switches between its two halves.
    pub fn mode(&self) -> f64 {
        -self.a / self.b
    }

    fn side(&self, z: f64) -> f64 {
        if z < self.mode() {
            1.0 - self.lambda
        } else {
            1.0 + self.lambda
        }
    }

    pub fn pdf(&self, z: f64) -> f64 {
        let y = (self.b * z + self.a) / self.side(z);
        let e = -0.5 * (self.eta + 1.0) * (y * y / (self.eta - 2.0)).ln_1p();
        self.b * self.c * e.exp()
    }

    pub fn cdf(&self, z: f64) -> f64 {
        let k = self.side(z);
        let w = (self.b * z + self.a) / k / self.unit;
        if z < self.mode() {
            k * t_cdf(w, self.eta)
        } else {
            1.0 - k * t_sf(w, self.eta)
        }
    }

    /// One draw: the left half with probability `(1 − λ)/2`, each half being a
    /// scaled half-t.
    pub fn sample(&self, rng: &mut StreamRng) -> f64 {
        let left = 0.5 * (1.0 - self.lambda);
        let side: f64 = Open01.sample(rng);
        let w = self.t.sample(rng).abs() * self.unit;
        if side < left {
            (-(1.0 - self.lambda) * w - self.a) / self.b
        } else {
            ((1.0 + self.lambda) * w - self.a) / self.b
        }
    }

    pub fn quantile(&self, u: f64) -> f64 {
        let left = 0.5 * (1.0 - self.lambda);
        if u < left {
            let w = t_quantile(u / (1.0 - self.lambda), self.eta);
            ((1.0 - self.lambda) * w * self.unit - self.a) / self.b
        } else {
            let w = t_isf((1.0 - u) / (1.0 + self.lambda), self.eta);
            ((1.0 + self.lambda) * w * self.unit - self.a) / self.b
        }
    }
}

/// A validated innovation law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Innovation {
    Normal,
    SkewT(SkewT),
}

impl Innovation {
    pub fn pdf(&self, z: f64) -> f64 {
        match self {
            Innovation::Normal => normal_pdf(z),
            Innovation::SkewT(s) => s.pdf(z),
        }
    }

    /// One draw; the normal uses the ziggurat, the skewed t a side choice
    /// and a Student-t magnitude.
    #[inline]
    pub fn sample(&self, rng: &mut StreamRng) -> f64 {
        match self {
            Innovation::Normal => StandardNormal.sample(rng),
            Innovation::SkewT(s) => s.sample(rng),
        }
    }

    /// Points where the density is not smooth, plus the origin.
    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Innovation::Normal => vec![0.0],
            Innovation::SkewT(s) => vec![0.0, s.mode()],
        }
    }

    fn dof(&self) -> f64 {
        match self {
            Innovation::Normal => f64::INFINITY,
            Innovation::SkewT(s) => s.eta,
        }
    }

    /// `E[w(Z)]` for a weight growing at most like `|z|^order`.
    pub fn expect<F: Fn(f64) -> f64>(&self, w: F, order: f64) -> Result<f64> {
        let opts = QuadOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-11,
            ..QuadOptions::default()
        };
        match self {
            Innovation::Normal => {
                let r = integrate_real_line(|z| w(z) * normal_pdf(z), &[0.0], 1.0, opts)?;
                Ok(r.value)
            }
            Innovation::SkewT(s) => {
                if order >= s.eta {
                    return Err(Error::MomentDiverges {
                        order,
                        dof: s.eta,
                    });
                }
                // The integrand decays like |z|^(order − η − 1); this power
                // makes it vanish at the end of the mapped interval.
                let m = (2.0 / (s.eta - order)).ceil().max(1.0);
                let r = integrate_real_line(|z| w(z) * s.pdf(z), &self.breakpoints(), m, opts)?;
                Ok(r.value)
            }
        }
    }

    /// `E|Z|^order`.
    pub fn abs_moment(&self, order: f64) -> Result<f64> {
        match self {
            Innovation::Normal => {
                Ok((0.5 * order * 2f64.ln() + ln_gamma(0.5 * (order + 1.0))).exp() / PI.sqrt())
            }
            Innovation::SkewT(_) => self.expect(|z| z.abs().powf(order), order),
        }
    }
}

/// Full description of a simulated AR(1)-GARCH(1,1) sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DgpSpec {
    pub phi: f64,
    pub omega: f64,
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
    pub innovation: InnovationDist,
    #[serde(rename = "t")]
    pub len: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_burn_in() -> usize {
    DEFAULT_BURN_IN
}

impl DgpSpec {
    /// ARCH(1) with `ω = 0.1`, no AR term and the default burn-in.
    pub fn arch1(alpha: f64, innovation: InnovationDist, len: usize, seed: u64) -> Self {
        Self {
            phi: 0.0,
            omega: 0.1,
            alpha,
            beta: 0.0,
            innovation,
            len,
            burn_in: DEFAULT_BURN_IN,
            seed,
        }
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.phi >= 0.0 && self.phi < 1.0) {
            return Err(Error::param("phi", format!("must lie in [0, 1), got {}", self.phi)));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::param("omega", format!("must be positive, got {}", self.omega)));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::param("alpha", format!("must be non-negative, got {}", self.alpha)));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::param("beta", format!("must be non-negative, got {}", self.beta)));
        }
        if self.len == 0 {
            return Err(Error::param("t", "sample length must be positive"));
        }
        self.innovation.validate()?;
        if self.alpha > 0.0 || self.beta > 0.0 {
            let lm = log_moment(self.alpha, self.beta, &self.innovation)?;
            if lm >= 0.0 {
                return Err(Error::NotStationary { log_moment: lm });
            }
        }
        Ok(())
    }

    fn initial_variance(&self) -> f64 {
        let persistence = self.alpha + self.beta;
        if persistence < 1.0 {
            self.omega / (1.0 - persistence)
        } else {
            self.omega
        }
    }
}

/// Simulates `spec` with the random stream `(spec.seed, 0)`.
pub fn simulate_ar_arch(spec: &DgpSpec) -> Result<Series> {
    spec.validate()?;
    let mut rng = rng::stream(spec.seed, 0);
    let law = spec.innovation.law()?;
    Series::new(simulate_with(spec, &law, &mut rng))
}

/// Core recursion; the caller has validated `spec` and supplies the stream.
///
/// The recursion starts from `σ_0² = ε_0² = ω/(1 − α − β)` (or `ω` when
/// `α + β ≥ 1`) and `R_0 = 0`; the first `burn_in` values are dropped.
pub fn simulate_with(spec: &DgpSpec, law: &Innovation, rng: &mut StreamRng) -> Vec<f64> {
    let mut out = Vec::with_capacity(spec.len);
    let mut var = spec.initial_variance();
    let mut eps2 = var;
    let mut r = 0.0;
    for t in 0..spec.burn_in + spec.len {
        var = spec.omega + spec.alpha * eps2 + spec.beta * var;
        let eps = var.sqrt() * law.sample(rng);
        eps2 = eps * eps;
        r = spec.phi * r + eps;
        if t >= spec.burn_in {
            out.push(r);
        }
    }
    out
}

/// `E[log(αZ² + β)]`; negative exactly when the volatility recursion is stationary.
pub fn log_moment(alpha: f64, beta: f64, dist: &InnovationDist) -> Result<f64> {
    let law = dist.law()?;
    if alpha == 0.0 {
        return Ok(beta.ln());
    }
    // Growth is logarithmic, so any positive order bound is admissible.
    law.expect(|z| (alpha * z * z + beta).ln(), 1e-6)
}

/// `E[(αZ² + β)^{ζ/2}]`.
pub fn kesten_moment(zeta: f64, alpha: f64, beta: f64, dist: &InnovationDist) -> Result<f64> {
    let law = dist.law()?;
    kesten_moment_with(zeta, alpha, beta, &law)
}

fn kesten_moment_with(zeta: f64, alpha: f64, beta: f64, law: &Innovation) -> Result<f64> {
    let half = 0.5 * zeta;
    law.expect(|z| (alpha * z * z + beta).powf(half), zeta)
}

const KESTEN_LO: f64 = 1e-3;
const KESTEN_CAP: f64 = 64.0;
const KESTEN_TOL: f64 = 1e-10;

/// Tail index ζ > 0 solving `E[(αZ² + β)^{ζ/2}] = 1`.
pub fn kesten_zeta(alpha: f64, beta: f64, dist: &InnovationDist) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::param("alpha", format!("must be positive, got {alpha}")));
    }
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::param("beta", format!("must be non-negative, got {beta}")));
    }
    let law = dist.law()?;
    let lm = log_moment(alpha, beta, dist)?;
    if lm >= 0.0 {
        return Err(Error::NotStationary { log_moment: lm });
    }
    let f = |zeta: f64| kesten_moment_with(zeta, alpha, beta, &law).map(|m| m - 1.0);
    let dof = law.dof();

    let lo = KESTEN_LO;
    let f_lo = f(lo)?;
    let mut a = lo;
    let mut fa = f_lo;
    let mut b = 2.0f64.min(0.5 * (lo + dof));
    let mut fb;
    loop {
        fb = f(b)?;
        if fb >= 0.0 {
            break;
        }
        a = b;
        fa = fb;
        let next = if 2.0 * b < dof { 2.0 * b } else { 0.5 * (b + dof) };
        if next > KESTEN_CAP || next - b < 1e-12 {
            return Err(Error::NoRoot {
                lo,
                hi: b,
                f_lo,
                f_hi: fb,
            });
        }
        b = next;
    }
    if fa >= 0.0 {
        return Err(Error::NoRoot {
            lo,
            hi: b,
            f_lo,
            f_hi: fb,
        });
    }
    brent(f, a, b, fa, fb, KESTEN_TOL)
}

/// Brent's method on a bracket with `f(a) < 0 <= f(b)`.
fn brent<F: Fn(f64) -> Result<f64>>(
    f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    tol: f64,
) -> Result<f64> {
    if fb == 0.0 {
        return Ok(b);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b)?;
    }
    Err(Error::Numerical("root finder did not converge".into()))
}

/// `E|Z|^order` for the innovation distribution.
pub fn innovation_abs_moment(dist: &InnovationDist, order: f64) -> Result<f64> {
    dist.law()?.abs_moment(order)
}

/// `∫_0^∞ w(z) pdf(z) dz` for the standard normal; used by moment oracles.
pub fn normal_half_expectation<F: Fn(f64) -> f64>(w: F) -> Result<f64> {
    Ok(integrate_half_line(|z| w(z) * normal_pdf(z), 0.0, 1.0, 1.0, QuadOptions::default())?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::mean;

    fn normal() -> InnovationDist {
        InnovationDist::StandardNormal
    }

    #[test]
    fn skewed_t_constants_standardize() {
        for &(eta, lambda) in &[(3.0, 0.5), (50.0, 0.5), (5.0, -0.3), (8.0, 0.0)] {
            let law = InnovationDist::skewed_t(eta, lambda).unwrap().law().unwrap();
            let order = 2.0f64.min(eta - 1e-9);
            let total = law.expect(|_| 1.0, 0.0).unwrap();
            let m1 = law.expect(|z| z, 1.0).unwrap();
            let m2 = law.expect(|z| z * z, order).unwrap();
            assert!((total - 1.0).abs() < 1e-10, "eta={eta} total={total}");
            assert!(m1.abs() < 1e-10, "eta={eta} mean={m1}");
            assert!((m2 - 1.0).abs() < 1e-8, "eta={eta} var={m2}");
        }
    }

    #[test]
    fn skewed_t_quantile_inverts_cdf() {
        for &(eta, lambda) in &[(3.0, 0.5), (50.0, 0.5), (4.5, -0.7)] {
            let Innovation::SkewT(s) = InnovationDist::skewed_t(eta, lambda).unwrap().law().unwrap()
            else {
                unreachable!()
            };
            for i in 1..200 {
                let u = i as f64 / 200.0;
                let z = s.quantile(u);
                assert!((s.cdf(z) - u).abs() < 1e-12, "eta={eta} u={u}");
            }
            // continuity at the kink
            let m = s.mode();
            assert!((s.cdf(m) - 0.5 * (1.0 - lambda)).abs() < 1e-14);
            assert!((s.pdf(m - 1e-12) - s.pdf(m + 1e-12)).abs() < 1e-9);
        }
    }

    #[test]
    fn symmetric_case_reduces_to_scaled_t() {
        let Innovation::SkewT(s) = InnovationDist::skewed_t(6.0, 0.0).unwrap().law().unwrap() else {
            unreachable!()
        };
        let k = (6.0f64 / 4.0).sqrt();
        for &z in &[-3.0, -0.4, 0.0, 1.1, 5.0] {
            assert!((s.cdf(z) - t_cdf(z * k, 6.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn invalid_innovations_rejected() {
        assert!(InnovationDist::skewed_t(2.0, 0.0).is_err());
        assert!(InnovationDist::skewed_t(5.0, 1.0).is_err());
        assert!(InnovationDist::skewed_t(f64::NAN, 0.0).is_err());
    }

    fn moments(x: &[f64]) -> (f64, f64, f64, f64) {
        let m = mean(x);
        let n = x.len() as f64;
        let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
        for &v in x {
            let d = v - m;
            m2 += d * d;
            m3 += d * d * d;
            m4 += d * d * d * d;
        }
        m2 /= n;
        m3 /= n;
        m4 /= n;
        (m, m2, m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    }

    fn draws(dist: InnovationDist, n: usize, seed: u64) -> Vec<f64> {
        let law = dist.law().unwrap();
        let mut r = rng::stream(seed, 0);
        (0..n).map(|_| law.sample(&mut r)).collect()
    }

    #[test]
    fn skewed_t_draws_follow_the_cdf() {
        let dist = InnovationDist::skewed_t(3.0, 0.5).unwrap();
        let Innovation::SkewT(st) = dist.law().unwrap() else { unreachable!() };
        let n = 200_000;
        let mut x = draws(dist, n, 21);
        x.sort_by(f64::total_cmp);
        // Kolmogorov distance; the 0.1% critical value is 1.95/√n.
        let d = x
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let f = st.cdf(v);
                (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(d < 1.95 / (n as f64).sqrt(), "D = {d}");
    }

    #[test]
    fn skewed_t_sample_moments() {
        let n = 1_000_000;
        let x = draws(InnovationDist::skewed_t(50.0, 0.5).unwrap(), n, 11);
        let (m, v, _, _) = moments(&x);
        // SE of the mean is 1/√n; SE of the variance is √((κ−1)/n) with κ ≈ 3.5.
        assert!(m.abs() < 4.0 / (n as f64).sqrt(), "mean {m}");
        assert!((v - 1.0).abs() < 4.0 * (2.6 / n as f64).sqrt(), "var {v}");

        let x = draws(InnovationDist::skewed_t(50.0, 0.0).unwrap(), n, 12);
        let (_, _, skew, kurt) = moments(&x);
        assert!(skew.abs() < 4.0 * (6.0 / n as f64).sqrt(), "skew {skew}");
        // Excess kurtosis of t(50) is 6/46; its sampling SE is ≈ √(24/n).
        assert!((kurt - 6.0 / 46.0).abs() < 4.0 * (24.0 / n as f64).sqrt() * 1.3, "kurt {kurt}");

        let x = draws(InnovationDist::skewed_t(7.0, 0.0).unwrap(), n, 13);
        let (_, _, skew, _) = moments(&x);
        assert!(skew.abs() < 4.0 * 0.02, "skew {skew}");
    }

    #[test]
    fn iid_and_arch_variances() {
        let mut spec = DgpSpec::arch1(0.0, normal(), 1_000_000, 3);
        let x = simulate_ar_arch(&spec).unwrap();
        let (_, v, _, _) = moments(x.values());
        assert!((v - 0.1).abs() < 4.0 * 0.1 * (2.0 / 1e6f64).sqrt(), "var {v}");

        spec.alpha = 0.5;
        let x = simulate_ar_arch(&spec).unwrap();
        let (_, v, _, _) = moments(x.values());
        // ARCH(1) with 3α² < 1 has a finite fourth moment; the sample variance is
        // correlated, so the tolerance is loose relative to the iid SE.
        assert!((v - 0.2).abs() < 0.01, "var {v}");
    }

    #[test]
    fn simulation_is_deterministic() {
        let spec = DgpSpec::arch1(0.6, InnovationDist::skewed_t(3.0, 0.5).unwrap(), 500, 99).with_phi(0.2);
        let a = simulate_ar_arch(&spec).unwrap();
        let b = simulate_ar_arch(&spec).unwrap();
        assert_eq!(a, b);
        let mut other = spec;
        other.seed = 100;
        assert_ne!(a, simulate_ar_arch(&other).unwrap());
        assert_eq!(a.len(), 500);
    }

    #[test]
    fn non_stationary_spec_rejected() {
        let mut spec = DgpSpec::arch1(4.0, normal(), 10, 0);
        assert!(matches!(spec.validate(), Err(Error::NotStationary { .. })));
        spec.alpha = 0.0;
        spec.beta = 1.0;
        assert!(matches!(spec.validate(), Err(Error::NotStationary { .. })));
        spec.beta = 0.0;
        spec.phi = 1.0;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn integrated_garch_is_stationary_in_the_strict_sense() {
        // α + β = 1 has E log(αZ² + β) < 0 by Jensen.
        let spec = DgpSpec {
            beta: 0.9,
            ..DgpSpec::arch1(0.1, normal(), 100, 1)
        };
        spec.validate().unwrap();
        assert!(simulate_ar_arch(&spec).is_ok());
    }

    #[test]
    fn kesten_closed_form_anchors() {
        let a3 = PI.cbrt() / 2.0;
        assert!((kesten_zeta(a3, 0.0, &normal()).unwrap() - 3.0).abs() < 1e-8);
        for a in [0.1, 0.5] {
            assert!((kesten_zeta(a, 1.0 - a, &normal()).unwrap() - 2.0).abs() < 1e-8);
        }
        assert!((kesten_zeta(3f64.powf(-0.5), 0.0, &normal()).unwrap() - 4.0).abs() < 1e-8);
        assert!((kesten_zeta(105f64.powf(-0.25), 0.0, &normal()).unwrap() - 8.0).abs() < 1e-8);
    }

    #[test]
    fn kesten_skewed_t_values() {
        let a3 = PI.cbrt() / 2.0;
        let z50 = kesten_zeta(a3, 0.0, &InnovationDist::skewed_t(50.0, 0.5).unwrap()).unwrap();
        let z3 = kesten_zeta(a3, 0.0, &InnovationDist::skewed_t(3.0, 0.5).unwrap()).unwrap();
        assert!((z50 - 2.89).abs() < 0.02, "{z50}");
        assert!((z3 - 2.24).abs() < 0.02, "{z3}");
    }

    #[test]
    fn kesten_decreasing_in_alpha() {
        for dist in [normal(), InnovationDist::skewed_t(5.0, 0.3).unwrap()] {
            let mut prev = f64::INFINITY;
            // Starts where the skewed-t root is well below η.
            for i in 2..=12 {
                let a = 0.08 * i as f64;
                let z = kesten_zeta(a, 0.05, &dist).unwrap();
                assert!(z < prev, "alpha={a}");
                prev = z;
            }
        }
    }

    #[test]
    fn moment_gate_consistency() {
        // For β = 0 and normal Z, ζ = 4p exactly when α^{2p} E|Z|^{4p} = 1.
        let law = normal().law().unwrap();
        for p in [0.25, 0.5, 1.0, 2.0] {
            let alpha = law.abs_moment(4.0 * p).unwrap().powf(-1.0 / (2.0 * p));
            assert!((kesten_zeta(alpha, 0.0, &normal()).unwrap() - 4.0 * p).abs() < 1e-7);
        }
        let a = 105f64.powf(-0.25);
        assert!((a - 0.3124).abs() < 1e-4);
    }

    #[test]
    fn kesten_rejects_trivial_and_explosive_cases() {
        assert!(kesten_zeta(0.0, 0.5, &normal()).is_err());
        assert!(matches!(
            kesten_zeta(4.0, 0.0, &normal()),
            Err(Error::NotStationary { .. })
        ));
    }

    #[test]
    fn moment_beyond_dof_diverges() {
        let d = InnovationDist::skewed_t(3.0, 0.5).unwrap();
        assert!(matches!(
            kesten_moment(3.5, 0.5, 0.0, &d),
            Err(Error::MomentDiverges { .. })
        ));
    }

    #[test]
    fn normal_abs_moments() {
        let law = normal().law().unwrap();
        assert!((law.abs_moment(2.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((law.abs_moment(4.0).unwrap() - 3.0).abs() < 1e-13);
        assert!((law.abs_moment(8.0).unwrap() - 105.0).abs() < 1e-11);
        let half = 2.0 * normal_half_expectation(|z| z.powi(3)).unwrap();
        assert!((half - law.abs_moment(3.0).unwrap()).abs() < 1e-12);
    }
}
