//! Discrete distributions together with a continuous extension of their tail.
//!
//! A [`DiscreteTailModel`] knows the pmf and the tail `𝓕(k) = P(X > k)` on the
//! integers, and a real extension `𝓖(x)` that agrees with `𝓕` on the integers.
//! Two extensions are available:
//!
//! * [`Extension::Natural`]: an integral form of the tail. For the Poisson this
//!   is the lower regularized incomplete gamma `P(x + 1, λ)`, for the negative
//!   binomial the regularized incomplete beta `I_p(x + 1, r)`, for the
//!   geometric `q^{x+1}`. Models without a closed form fall back to log-linear.
//! * [`Extension::LogLinear`]: straight lines between consecutive integers in
//!   `(x, ln 𝓕(x))`.
//!
//! All values are logarithms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{self, ln_1m_exp};

/// Which continuous tail extension to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extension {
    #[default]
    Natural,
    LogLinear,
}

impl std::str::FromStr for Extension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "natural" => Ok(Extension::Natural),
            "loglinear" | "log-linear" => Ok(Extension::LogLinear),
            other => Err(Error::InvalidParameter(format!("unknown extension {other:?}"))),
        }
    }
}

/// A finite probability mass function on `support_min, support_min + 1, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalPmf {
    probabilities: Vec<f64>,
    support_min: i64,
    /// `ln P(X > support_min + i)`
    log_tails: Vec<f64>,
}

impl EmpiricalPmf {
    pub fn new(probabilities: Vec<f64>, support_min: i64) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::InvalidParameter("empty pmf".into()));
        }
        if let Some(bad) = probabilities.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidParameter(format!("pmf entry {bad} is not a probability")));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("pmf sums to {total}, not 1")));
        }
        // suffix sums from the small end of the tail
        let mut log_tails = vec![f64::NEG_INFINITY; probabilities.len()];
        let mut acc = 0.0_f64;
        for i in (0..probabilities.len()).rev() {
            log_tails[i] = acc.ln();
            acc += probabilities[i];
        }
        Ok(Self {
            probabilities,
            support_min,
            log_tails,
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn support_min(&self) -> i64 {
        self.support_min
    }
}

/// The distribution family and its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Poisson { lambda: f64 },
    /// `P(X = k) = C(k + r - 1, k) (1 - p)^r p^k`, mean `r p / (1 - p)`.
    NegBinomial { r: f64, p: f64 },
    /// `P(X = k) = (1 - q) q^k`.
    Geometric { q: f64 },
    /// `P(X = k) ∝ 1 / (1 + k²)` on `k >= 0`.
    DiscreteCauchy,
    Empirical(EmpiricalPmf),
}

/// Result of [`DiscreteTailModel::tail_ratio_gamma`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaEstimate {
    pub gamma: f64,
    /// False when a numeric estimate has not settled.
    pub stable: bool,
    /// The integer `K` used for a numeric estimate `𝓕(K+1)/𝓕(K)`.
    pub at: Option<i64>,
}

/// A discrete distribution with a continuous, decreasing, log-convex tail extension.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteTailModel {
    family: Family,
    extension: Extension,
    /// `ln Σ_{k>=0} 1/(1+k²)` for the discrete Cauchy, zero otherwise.
    log_norm: f64,
}

/// Serializable model description, as accepted on the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub extension: Extension,
}

impl ModelSpec {
    fn param(&self, key: &str) -> Result<f64> {
        self.params
            .get(key)
            .copied()
            .ok_or_else(|| Error::InvalidParameter(format!("model {} needs parameter {key}", self.name)))
    }
}

impl DiscreteTailModel {
    fn with_family(family: Family) -> Self {
        Self {
            family,
            extension: Extension::Natural,
            log_norm: 0.0,
        }
    }

    pub fn poisson(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("poisson lambda must be > 0, got {lambda}")));
        }
        Ok(Self::with_family(Family::Poisson { lambda }))
    }

    pub fn negative_binomial(r: f64, p: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) || !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "negative binomial needs r > 0 and 0 < p < 1, got r={r} p={p}"
            )));
        }
        Ok(Self::with_family(Family::NegBinomial { r, p }))
    }

    pub fn geometric(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameter(format!("geometric q must lie in (0, 1), got {q}")));
        }
        Ok(Self::with_family(Family::Geometric { q }))
    }

    pub fn discrete_cauchy() -> Self {
        let mut model = Self::with_family(Family::DiscreteCauchy);
        model.extension = Extension::LogLinear;
        model.log_norm = cauchy_tail_sum(0).ln();
        model
    }

    pub fn empirical(pmf: EmpiricalPmf) -> Self {
        let mut model = Self::with_family(Family::Empirical(pmf));
        model.extension = Extension::LogLinear;
        model
    }

    /// Builds a model from a [`ModelSpec`]. Empirical pmfs use keys `p0, p1, ...`
    /// and an optional `min` for the smallest support point.
    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        let model = match spec.name.as_str() {
            "poisson" => Self::poisson(spec.param("lambda")?)?,
            "negbinom" => Self::negative_binomial(spec.param("r")?, spec.param("p")?)?,
            "geometric" => Self::geometric(spec.param("q")?)?,
            "dcauchy" => Self::discrete_cauchy(),
            "empirical" => {
                let mut probs = Vec::new();
                while let Some(p) = spec.params.get(&format!("p{}", probs.len())) {
                    probs.push(*p);
                }
                let min = spec.params.get("min").copied().unwrap_or(0.0);
                if min.fract() != 0.0 {
                    return Err(Error::InvalidParameter(format!("support minimum {min} is not an integer")));
                }
                Self::empirical(EmpiricalPmf::new(probs, min as i64)?)
            }
            other => return Err(Error::InvalidParameter(format!("unknown model {other:?}"))),
        };
        Ok(model.with_extension(spec.extension))
    }

    /// Selects the tail extension. Models without an integral form always
    /// interpolate log-linearly.
    pub fn with_extension(mut self, extension: Extension) -> Self {
        self.extension = match self.family {
            Family::DiscreteCauchy | Family::Empirical(_) => Extension::LogLinear,
            _ => extension,
        };
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    pub fn name(&self) -> &'static str {
        match self.family {
            Family::Poisson { .. } => "poisson",
            Family::NegBinomial { .. } => "negbinom",
            Family::Geometric { .. } => "geometric",
            Family::DiscreteCauchy => "dcauchy",
            Family::Empirical(_) => "empirical",
        }
    }

    pub fn support_min(&self) -> i64 {
        match &self.family {
            Family::Empirical(pmf) => pmf.support_min,
            _ => 0,
        }
    }

    /// `ln P(X = k)`.
    pub fn log_pmf(&self, k: i64) -> Result<f64> {
        if k < self.support_min() {
            return Err(Error::Domain {
                what: "log_pmf below support",
                value: k as f64,
            });
        }
        let kf = k as f64;
        Ok(match &self.family {
            Family::Poisson { lambda } => kf * lambda.ln() - lambda - specfun::log_gamma(kf + 1.0)?,
            Family::NegBinomial { r, p } => {
                specfun::log_gamma_positive(kf + r) - specfun::log_gamma(kf + 1.0)?
                    - specfun::log_gamma_positive(*r)
                    + r * (-p).ln_1p()
                    + if k == 0 { 0.0 } else { kf * p.ln() }
            }
            Family::Geometric { q } => (-q).ln_1p() + kf * q.ln(),
            Family::DiscreteCauchy => -(kf * kf).ln_1p() - self.log_norm,
            Family::Empirical(pmf) => {
                let i = (k - pmf.support_min) as usize;
                pmf.probabilities.get(i).map_or(f64::NEG_INFINITY, |p| p.ln())
            }
        })
    }

    /// `ln 𝓕(k) = ln P(X > k)`. Zero below the support, `-∞` past a finite support.
    pub fn log_tail(&self, k: i64) -> Result<f64> {
        if k < self.support_min() {
            return Ok(0.0);
        }
        let kf = k as f64;
        match &self.family {
            Family::Poisson { lambda } => specfun::reg_gamma_p_log(kf + 1.0, *lambda),
            Family::NegBinomial { r, p } => specfun::reg_beta_log(kf + 1.0, *r, *p),
            Family::Geometric { q } => Ok((kf + 1.0) * q.ln()),
            Family::DiscreteCauchy => Ok(cauchy_tail_sum(k as u64 + 1).ln() - self.log_norm),
            Family::Empirical(pmf) => {
                let i = (k - pmf.support_min) as usize;
                Ok(pmf.log_tails.get(i).copied().unwrap_or(f64::NEG_INFINITY))
            }
        }
    }

    /// `ln F(k) = ln P(X <= k)`.
    pub fn log_cdf(&self, k: i64) -> Result<f64> {
        Ok(ln_1m_exp(self.log_tail(k)?))
    }

    /// `ln 𝓖(x)` for the selected extension; equals [`log_tail`](Self::log_tail) at integers.
    pub fn log_tail_ext(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(Error::Domain {
                what: "log_tail_ext",
                value: x,
            });
        }
        let floor_min = (self.support_min() - 1) as f64;
        if x <= floor_min {
            return Ok(0.0);
        }
        if x.is_infinite() {
            return Ok(f64::NEG_INFINITY);
        }
        match (self.extension, &self.family) {
            (Extension::Natural, Family::Poisson { lambda }) => specfun::reg_gamma_p_log(x + 1.0, *lambda),
            (Extension::Natural, Family::NegBinomial { r, p }) => specfun::reg_beta_log(x + 1.0, *r, *p),
            (Extension::Natural, Family::Geometric { q }) => Ok((x + 1.0) * q.ln()),
            _ => self.log_linear(x),
        }
    }

    fn log_linear(&self, x: f64) -> Result<f64> {
        let k = x.floor();
        let t = x - k;
        let lo = self.log_tail(k as i64)?;
        if t == 0.0 {
            return Ok(lo);
        }
        let hi = self.log_tail(k as i64 + 1)?;
        if hi == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(lo + t * (hi - lo))
    }

    /// The limit `γ` of `𝓕(k+1)/𝓕(k)`: analytic for the built-in families,
    /// estimated at the far end of the support for an empirical pmf.
    pub fn tail_ratio_gamma(&self) -> GammaEstimate {
        let exact = |gamma| GammaEstimate {
            gamma,
            stable: true,
            at: None,
        };
        match &self.family {
            Family::Poisson { .. } => exact(0.0),
            Family::NegBinomial { p, .. } => exact(*p),
            Family::Geometric { q } => exact(*q),
            Family::DiscreteCauchy => exact(1.0),
            Family::Empirical(pmf) => {
                let tails = &pmf.log_tails;
                // largest K with 𝓕(K+1) > 0
                let last = tails.iter().rposition(|t| t.is_finite());
                let ratio = |i: usize| (tails[i + 1] - tails[i]).exp();
                match last {
                    Some(j) if j >= 2 => {
                        let k = j - 1;
                        let (r1, r0) = (ratio(k), ratio(k - 1));
                        GammaEstimate {
                            gamma: r1,
                            stable: (r1 - r0).abs() <= 1e-3,
                            at: Some(pmf.support_min + k as i64),
                        }
                    }
                    Some(1) => GammaEstimate {
                        gamma: ratio(0),
                        stable: false,
                        at: Some(pmf.support_min),
                    },
                    _ => GammaEstimate {
                        gamma: 0.0,
                        stable: false,
                        at: None,
                    },
                }
            }
        }
    }
}

/// `Σ_{i >= j} 1/(1 + i²)`: direct summation up to 200, Euler–Maclaurin beyond.
fn cauchy_tail_sum(j: u64) -> f64 {
    const CUT: u64 = 200;
    let f = |x: f64| 1.0 / (1.0 + x * x);
    let start = j.max(CUT);
    let mut head = 0.0;
    // small terms first
    for i in (j..start).rev() {
        head += f(i as f64);
    }
    let x = start as f64;
    // n-th derivative of 1/(1+x²): (-1)^n n! sin^{n+1}(θ) sin((n+1)θ), cot θ = x
    let theta = 1.0f64.atan2(x);
    let s = theta.sin();
    let d1 = -s.powi(2) * (2.0 * theta).sin();
    let d3 = -6.0 * s.powi(4) * (4.0 * theta).sin();
    let d5 = -120.0 * s.powi(6) * (6.0 * theta).sin();
    let integral = (1.0 / x).atan();
    let tail = integral + 0.5 * f(x) - d1 / 12.0 + d3 / 720.0 - d5 / 30240.0;
    head + tail
}

#[cfg(test)]
mod tests {
    use super::*;

    fn builtins() -> Vec<DiscreteTailModel> {
        vec![
            DiscreteTailModel::poisson(1.0).unwrap(),
            DiscreteTailModel::poisson(0.01).unwrap(),
            DiscreteTailModel::poisson(10.0).unwrap(),
            DiscreteTailModel::negative_binomial(2.0, 0.3).unwrap(),
            DiscreteTailModel::negative_binomial(0.05, 0.05).unwrap(),
            DiscreteTailModel::geometric(0.5).unwrap(),
            DiscreteTailModel::discrete_cauchy(),
        ]
    }

    #[test]
    fn pmf_examples() {
        let p1 = DiscreteTailModel::poisson(1.0).unwrap();
        assert!((p1.log_pmf(0).unwrap() + 1.0).abs() < 1e-15);
        let nb = DiscreteTailModel::negative_binomial(2.5, 0.3).unwrap();
        assert!((nb.log_pmf(0).unwrap() - 2.5 * 0.7f64.ln()).abs() < 1e-14);
        let p2 = DiscreteTailModel::poisson(2.0).unwrap();
        let want = ((-2.0f64).exp() * 8.0 / 6.0).ln();
        assert!((p2.log_pmf(3).unwrap() - want).abs() < 1e-14);
        assert!(p2.log_pmf(-1).is_err());
    }

    #[test]
    fn tail_examples() {
        for m in builtins() {
            assert_eq!(m.log_tail(m.support_min() - 1).unwrap(), 0.0, "{}", m.name());
        }
        let p1 = DiscreteTailModel::poisson(1.0).unwrap();
        let want = (1.0 - (-1.0f64).exp() * 65.0 / 24.0).ln();
        assert!((p1.log_tail(4).unwrap() - want).abs() < 1e-11);
        let g = DiscreteTailModel::geometric(0.3).unwrap();
        for k in 0..20 {
            assert!((g.log_tail(k).unwrap() - (k as f64 + 1.0) * 0.3f64.ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn cauchy_normalizer_matches_closed_form() {
        let pi = std::f64::consts::PI;
        let closed = 0.5 * (1.0 + pi / pi.tanh());
        assert!((cauchy_tail_sum(0) / closed - 1.0).abs() < 1e-12);
        // brute force a partial tail with an integral remainder that is itself tiny
        let direct: f64 = (5..2_000_000u64).map(|i| 1.0 / (1.0 + (i * i) as f64)).sum::<f64>() + (1.0 / 2_000_000f64).atan();
        assert!((cauchy_tail_sum(5) / direct - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pmf_tail_consistency() {
        for m in builtins() {
            for k in m.support_min()..m.support_min() + 50 {
                let lhs = m.log_tail(k - 1).unwrap().exp() - m.log_tail(k).unwrap().exp();
                let rhs = m.log_pmf(k).unwrap().exp();
                assert!((lhs - rhs).abs() <= 1e-10, "{} k={k}: {lhs} vs {rhs}", m.name());
            }
        }
    }

    #[test]
    fn extension_agrees_at_integers() {
        for ext in [Extension::Natural, Extension::LogLinear] {
            for m in builtins() {
                let m = m.with_extension(ext);
                for k in -1..40 {
                    let a = m.log_tail_ext(k as f64).unwrap();
                    let b = m.log_tail(k).unwrap();
                    assert!((a - b).abs() <= 1e-10, "{} {ext:?} k={k}: {a} vs {b}", m.name());
                }
            }
        }
    }

    #[test]
    fn loglinear_midpoint() {
        let m = DiscreteTailModel::poisson(1.0).unwrap().with_extension(Extension::LogLinear);
        for k in 0..10 {
            let mid = m.log_tail_ext(k as f64 + 0.5).unwrap();
            let want = 0.5 * (m.log_tail(k).unwrap() + m.log_tail(k + 1).unwrap());
            assert!((mid - want).abs() < 1e-12);
        }
    }

    /// Midpoint check of `ln 𝓖` on a grid: convex when `sign = 1`, concave when `sign = -1`.
    fn midpoint_curvature_holds(m: &DiscreteTailModel, sign: f64) -> Option<(f64, f64)> {
        let grid: Vec<f64> = (0..=240).map(|i| -1.0 + i as f64 * 0.125).collect();
        let vals: Vec<f64> = grid.iter().map(|&x| m.log_tail_ext(x).unwrap()).collect();
        for i in 0..grid.len() {
            for j in (i + 2..grid.len()).step_by(2) {
                let mid = m.log_tail_ext(0.5 * (grid[i] + grid[j])).unwrap();
                if sign * (mid - 0.5 * (vals[i] + vals[j])) > 1e-9 {
                    return Some((grid[i], grid[j]));
                }
            }
        }
        None
    }

    #[test]
    fn extension_monotone() {
        for ext in [Extension::Natural, Extension::LogLinear] {
            for m in builtins() {
                let m = m.with_extension(ext);
                let vals: Vec<f64> = (0..=400).map(|i| m.log_tail_ext(-1.0 + i as f64 * 0.1).unwrap()).collect();
                for w in vals.windows(2) {
                    assert!(w[1] < w[0], "{} {ext:?} not strictly decreasing", m.name());
                }
            }
        }
    }

    #[test]
    fn extension_midpoint_log_convex() {
        // families whose integer tail ratios increase towards γ
        let convex = vec![
            DiscreteTailModel::negative_binomial(0.05, 0.05).unwrap(),
            DiscreteTailModel::negative_binomial(0.25, 0.05).unwrap(),
            DiscreteTailModel::geometric(0.5).unwrap(),
            DiscreteTailModel::discrete_cauchy(),
        ];
        for ext in [Extension::Natural, Extension::LogLinear] {
            for m in &convex {
                let m = m.clone().with_extension(ext);
                assert_eq!(midpoint_curvature_holds(&m, 1.0), None, "{} {ext:?}", m.name());
            }
        }
    }

    #[test]
    fn extension_curvature_follows_integer_ratios() {
        // Poisson and NB with r > 1 have decreasing tail ratios, so no extension
        // can be log-convex; the extension must then be log-concave instead.
        for ext in [Extension::Natural, Extension::LogLinear] {
            for m in builtins() {
                let m = m.with_extension(ext);
                let l: Vec<f64> = (-1..8).map(|k| m.log_tail(k).unwrap()).collect();
                let d2: Vec<f64> = l.windows(3).map(|w| w[2] - 2.0 * w[1] + w[0]).collect();
                let sign = if d2.iter().all(|d| *d >= -1e-12) {
                    1.0
                } else if d2.iter().all(|d| *d <= 1e-12) {
                    -1.0
                } else {
                    panic!("{}: mixed curvature on the integers", m.name());
                };
                assert_eq!(midpoint_curvature_holds(&m, sign), None, "{} {ext:?} sign {sign}", m.name());
            }
        }
    }

    #[test]
    fn gamma_values() {
        assert_eq!(DiscreteTailModel::poisson(3.0).unwrap().tail_ratio_gamma().gamma, 0.0);
        assert_eq!(DiscreteTailModel::negative_binomial(4.0, 0.3).unwrap().tail_ratio_gamma().gamma, 0.3);
        assert_eq!(DiscreteTailModel::discrete_cauchy().tail_ratio_gamma().gamma, 1.0);
        assert_eq!(DiscreteTailModel::geometric(0.25).unwrap().tail_ratio_gamma().gamma, 0.25);
    }

    #[test]
    fn extension_ratio_approaches_gamma() {
        for m in builtins() {
            let gamma = m.tail_ratio_gamma().gamma;
            let ratio = |x: f64| (m.log_tail_ext(x + 1.0).unwrap() - m.log_tail_ext(x).unwrap()).exp();
            let dists: Vec<f64> = [10.0, 20.0, 40.0].iter().map(|&x| (ratio(x) - gamma).abs()).collect();
            assert!(dists[0] >= dists[1] - 1e-12 && dists[1] >= dists[2] - 1e-12, "{} {dists:?}", m.name());
            let rs: Vec<f64> = [10.0, 20.0, 40.0].iter().map(|&x| ratio(x)).collect();
            let monotone = rs.windows(2).all(|w| w[1] >= w[0] - 1e-12) || rs.windows(2).all(|w| w[1] <= w[0] + 1e-12);
            assert!(monotone, "{} {rs:?}", m.name());
        }
    }

    #[test]
    fn empirical_model() {
        let pmf = EmpiricalPmf::new(vec![0.5, 0.25, 0.125, 0.125], 0).unwrap();
        let m = DiscreteTailModel::empirical(pmf);
        assert!((m.log_tail(0).unwrap() - 0.5f64.ln()).abs() < 1e-15);
        assert!((m.log_tail(2).unwrap() - 0.125f64.ln()).abs() < 1e-15);
        assert_eq!(m.log_tail(3).unwrap(), f64::NEG_INFINITY);
        assert_eq!(m.log_tail(10).unwrap(), f64::NEG_INFINITY);
        assert_eq!(m.log_tail_ext(3.5).unwrap(), f64::NEG_INFINITY);
        // tail ratios 0.5, 0.5, 0.5 until the cut: estimate exists
        let est = m.tail_ratio_gamma();
        assert_eq!(est.at, Some(1));
        assert!((est.gamma - 0.5).abs() < 1e-12);
        assert!(est.stable);
        assert!(EmpiricalPmf::new(vec![0.5, 0.4], 0).is_err());
        assert!(EmpiricalPmf::new(vec![1.5, -0.5], 0).is_err());
    }

    #[test]
    fn empirical_unstable_ratio_flagged() {
        let pmf = EmpiricalPmf::new(vec![0.1, 0.2, 0.3, 0.39, 0.01], 0).unwrap();
        let est = DiscreteTailModel::empirical(pmf).tail_ratio_gamma();
        assert!(!est.stable);
    }

    #[test]
    fn spec_parsing() {
        let mut params = BTreeMap::new();
        params.insert("lambda".to_string(), 1.0);
        let spec = ModelSpec {
            name: "poisson".into(),
            params,
            extension: Extension::LogLinear,
        };
        let m = DiscreteTailModel::from_spec(&spec).unwrap();
        assert_eq!(m.extension(), Extension::LogLinear);
        let bad = ModelSpec {
            name: "zipf".into(),
            params: BTreeMap::new(),
            extension: Extension::Natural,
        };
        assert!(DiscreteTailModel::from_spec(&bad).is_err());
        let emp = ModelSpec {
            name: "empirical".into(),
            params: [("p0", 0.75), ("p1", 0.25), ("min", 2.0)]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            extension: Extension::Natural,
        };
        let m = DiscreteTailModel::from_spec(&emp).unwrap();
        assert_eq!(m.support_min(), 2);
        assert!((m.log_tail(2).unwrap() - 0.25f64.ln()).abs() < 1e-15);
    }
}
