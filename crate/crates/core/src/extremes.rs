//! Extremal profiles and the laws built on them.
//!
//! Given a model with tail extension `𝓖`, the profile at sample size `n` is
//!
//! * `x_n`: the root of `𝓖(x_n) = 1/n`,
//! * `m_n = ⌊x_n + 1/2⌋`: the anchor of the maximum,
//! * `θ_n = 𝓖(m_n)/𝓖(x_n) = n 𝓖(m_n)` and `p_n = e^{-θ_n}`,
//! * `z_n = n 𝓕(m_n - 1)`: the critical depth for ties at the top.
//!
//! With `γ = lim 𝓕(k+1)/𝓕(k)`, the maximum of `n` i.i.d. draws satisfies
//! `P(max <= m_n + x) ≈ p_n^{γ^x}`; for `γ = 0` that collapses onto the two
//! values `m_n` and `m_n + 1`, with weights `p_n` and `1 - p_n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{self, ln_1m_exp, log_binomial, log_sum_exp};
use crate::tailmodel::{DiscreteTailModel, Family};

/// Tail regime, from the limit `γ` of consecutive tail ratios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `γ = 0`: the maximum clusters on two values.
    GammaZero,
    /// `0 < γ < 1`: `P(max <= m_n + x) ≈ p_n^{γ^x}`.
    GammaMid,
    /// `γ = 1`: no concentration.
    GammaOne,
}

impl Regime {
    pub fn from_gamma(gamma: f64) -> Self {
        if gamma <= 1e-12 {
            Regime::GammaZero
        } else if gamma >= 1.0 - 1e-12 {
            Regime::GammaOne
        } else {
            Regime::GammaMid
        }
    }
}

/// How `x_n` and `θ_n` are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileMethod {
    /// Solve `𝓖(x_n) = 1/n` with the model's extension; `θ_n = n 𝓖(m_n)`.
    #[default]
    Extension,
    /// Poisson only. Solve `e^{-λ} λ^{x+1} / Γ(x+2) = 1/n`, the leading term of
    /// the Poisson tail, and use `θ_n = (λ / (x_n + 1))^{m_n - x_n}`.
    ///
    /// These are the asymptotic forms behind the classical published tables of
    /// `x_n` and `p_n`; they differ from the exact-extension values by a few
    /// hundredths in `x_n` at moderate `n`.
    #[serde(rename = "leading-term")]
    PoissonLeadingTerm,
}

impl std::str::FromStr for ProfileMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "extension" => Ok(ProfileMethod::Extension),
            "leading-term" => Ok(ProfileMethod::PoissonLeadingTerm),
            other => Err(Error::InvalidParameter(format!("unknown profile method {other:?}"))),
        }
    }
}

/// Per-`n` quantities describing where the maximum sits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalProfile {
    pub n: f64,
    pub gamma: f64,
    pub x_n: f64,
    pub m_n: i64,
    pub theta_n: f64,
    pub p_n: f64,
    pub z_n: f64,
    pub regime: Regime,
    pub method: ProfileMethod,
}

/// Probabilities of ties at the maximum in the `γ = 0` regime.
///
/// A tie count of `t` means `t + 1` sample points share the maximal value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TieDistribution {
    pub p_n: f64,
    /// `at_least[t]` for `t = 0..=t_max + 1`
    pub at_least: Vec<f64>,
    /// `exactly[t]` for `t = 0..=t_max`
    pub exactly: Vec<f64>,
    pub t_max: usize,
}

impl TieDistribution {
    pub fn at_least(&self, t: usize) -> f64 {
        self.at_least[t]
    }

    pub fn exactly(&self, t: usize) -> f64 {
        self.exactly[t]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: f64,
    pub x_n: f64,
    pub m_n: i64,
    pub p_n: f64,
}

/// Profiles along an increasing sequence of `n`, with the points where `m_n` jumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationScan {
    pub rows: Vec<ScanRow>,
    /// Values `n` after which `m_n` increases (the last `n` before the jump).
    pub breakpoints: Vec<f64>,
}

/// Root of a non-increasing `f` crossing `target`, searching right of `lo`.
fn solve_decreasing<F>(f: F, lo: f64, target: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut lo = lo;
    if f(lo)? < target {
        return Err(Error::RootNotBracketed(format!(
            "tail already below {target} at the left end {lo}"
        )));
    }
    let mut step = 1.0;
    let mut hi = lo + step;
    while f(hi)? >= target {
        lo = hi;
        step *= 2.0;
        hi = lo + step;
        if step > 1e16 {
            return Err(Error::RootNotBracketed("no crossing found; tail may be too heavy".into()));
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-12 * lo.abs().max(1.0) {
            break;
        }
        if f(mid)? >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    let v = f(x)?;
    if !v.is_finite() || (v - target).abs() > 1e-6 * target.abs().max(1.0) {
        return Err(Error::RootNotBracketed(format!(
            "tail jumps across {target} near x = {x}; is the support bounded?"
        )));
    }
    Ok(x)
}

fn anchor(x_n: f64) -> i64 {
    let shifted = x_n + 0.5;
    let nearest = shifted.round();
    if (shifted - nearest).abs() <= 1e-9 {
        // too close to call: take the lower candidate
        nearest as i64 - 1
    } else {
        shifted.floor() as i64
    }
}

/// Profile with the model's own tail extension.
///
/// ```
/// use maxclust::{extremes, DiscreteTailModel};
///
/// let model = DiscreteTailModel::poisson(1.0).unwrap();
/// let prof = extremes::profile(&model, 1e6).unwrap();
/// assert_eq!(prof.m_n, 8);
/// assert!((model.log_tail_ext(prof.x_n).unwrap() + 1e6f64.ln()).abs() < 1e-9);
/// ```
pub fn profile(model: &DiscreteTailModel, n: f64) -> Result<ExtremalProfile> {
    profile_with(model, n, ProfileMethod::Extension)
}

pub fn profile_with(model: &DiscreteTailModel, n: f64, method: ProfileMethod) -> Result<ExtremalProfile> {
    if !(n >= 2.0) || n.is_infinite() {
        return Err(Error::Domain {
            what: "profile sample size",
            value: n,
        });
    }
    let ln_n = n.ln();
    let gamma = model.tail_ratio_gamma().gamma;
    let (x_n, theta_n) = match method {
        ProfileMethod::Extension => {
            let lo = (model.support_min() - 1) as f64;
            let x_n = solve_decreasing(|x| model.log_tail_ext(x), lo, -ln_n)?;
            let m = anchor(x_n);
            (x_n, (ln_n + model.log_tail(m)?).exp())
        }
        ProfileMethod::PoissonLeadingTerm => {
            let Family::Poisson { lambda } = *model.family() else {
                return Err(Error::ModelMismatch(format!(
                    "leading-term profile needs a poisson model, got {}",
                    model.name()
                )));
            };
            let ln_lambda = lambda.ln();
            let lead = |x: f64| Ok(-lambda + (x + 1.0) * ln_lambda - specfun::log_gamma_positive(x + 2.0));
            // decreasing once ψ(x + 2) > ln λ, which holds from x = λ - 1 on
            let x_n = solve_decreasing(lead, (lambda - 1.0).max(-1.0), -ln_n)?;
            (x_n, poisson_leading_theta(lambda, x_n, anchor(x_n)))
        }
    };
    let m_n = anchor(x_n);
    let z_n = (ln_n + model.log_tail(m_n - 1)?).exp();
    Ok(ExtremalProfile {
        n,
        gamma,
        x_n,
        m_n,
        theta_n,
        p_n: (-theta_n).exp(),
        z_n,
        regime: Regime::from_gamma(gamma),
        method,
    })
}

/// `θ = (λ / (x + 1))^{m - x}`, the leading-term Poisson `θ_n` for a given root `x`.
///
/// Feeding a rounded `x_n` here reproduces tables that were computed from
/// their own printed `x_n` column.
pub fn poisson_leading_theta(lambda: f64, x: f64, m: i64) -> f64 {
    ((m as f64 - x) * (lambda.ln() - (x + 1.0).ln())).exp()
}

/// Limiting `P(max <= m_n + x)` for the profile's regime.
pub fn limiting_max_cdf(profile: &ExtremalProfile, x: i64) -> f64 {
    match profile.regime {
        Regime::GammaZero => match x {
            x if x <= -1 => 0.0,
            0 => profile.p_n,
            _ => 1.0,
        },
        Regime::GammaMid => (-profile.theta_n * profile.gamma.powi(x as i32)).exp(),
        Regime::GammaOne => profile.p_n,
    }
}

/// `ln P(max of n draws <= x) = n ln(1 - 𝓕(x))`.
pub fn exact_max_cdf_log(model: &DiscreteTailModel, n: f64, x: i64) -> Result<f64> {
    if !(n >= 1.0) {
        return Err(Error::Domain {
            what: "exact_max_cdf_log sample size",
            value: n,
        });
    }
    let lt = model.log_tail(x)?;
    if lt == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    Ok(n * ln_1m_exp(lt))
}

/// `ln P(X_(n-k) <= x) = ln Σ_{j=0}^{k} C(n,j) F(x)^{n-j} 𝓕(x)^j`, where
/// `X_(n)` is the maximum and `X_(n-k)` the `(k+1)`-th largest.
pub fn exact_order_stat_cdf_log(model: &DiscreteTailModel, n: u64, k: u64, x: i64) -> Result<f64> {
    if k >= n {
        return Err(Error::Domain {
            what: "order statistic depth k >= n",
            value: k as f64,
        });
    }
    let lt = model.log_tail(x)?;
    let lc = ln_1m_exp(lt);
    let terms = (0..=k)
        .map(|j| {
            let tail_part = if j == 0 { 0.0 } else { j as f64 * lt };
            let cdf_part = if j == n { 0.0 } else { (n - j) as f64 * lc };
            Ok(log_binomial(n, j)? + cdf_part + tail_part)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(log_sum_exp(&terms).min(0.0))
}

/// `P(rank-th largest of n draws > x)`; `rank = 1` is the maximum.
pub fn prob_rank_exceeds(model: &DiscreteTailModel, n: u64, rank: u64, x: i64) -> Result<f64> {
    if rank == 0 || rank > n {
        return Err(Error::Domain {
            what: "rank outside 1..=n",
            value: rank as f64,
        });
    }
    let l = exact_order_stat_cdf_log(model, n, rank - 1, x)?;
    Ok(-l.exp_m1())
}

/// Tie law from the profile; only defined when `γ = 0`.
pub fn tie_distribution(profile: &ExtremalProfile, t_max: usize) -> Result<TieDistribution> {
    if profile.regime != Regime::GammaZero {
        return Err(Error::ModelMismatch(format!(
            "tie law needs the γ = 0 regime, profile is {:?}",
            profile.regime
        )));
    }
    tie_distribution_for_p(profile.p_n, t_max)
}

/// Tie law for a given `p_n`:
/// `P(at least k ties) = p + 1 - p Σ_{j<=k} ln^j(1/p)/j!`, and
/// `P(exactly t ties) = p ln^{t+1}(1/p) / (t+1)!`, with `0 ln 0 = 0`.
///
/// ```
/// let ties = maxclust::extremes::tie_distribution_for_p(0.44924115, 3).unwrap();
/// assert!((ties.exactly(0) - 0.35948).abs() < 5e-5);
/// ```
pub fn tie_distribution_for_p(p: f64, t_max: usize) -> Result<TieDistribution> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain {
            what: "tie distribution p_n",
            value: p,
        });
    }
    if p == 0.0 || p == 1.0 {
        return Ok(TieDistribution {
            p_n: p,
            at_least: vec![1.0; t_max + 2],
            exactly: vec![0.0; t_max + 1],
            t_max,
        });
    }
    let big_l = -p.ln();
    // p Σ_{j>k} L^j/j! = P(Poi(L) > k) = P(k+1, L)
    let mut at_least = (0..t_max + 2)
        .map(|k| Ok(p + specfun::reg_gamma_p_log(k as f64 + 1.0, big_l)?.exp()))
        .collect::<Result<Vec<f64>>>()?;
    at_least[0] = 1.0;
    let exactly = (0..t_max + 1)
        .map(|t| {
            let t1 = t as f64 + 1.0;
            Ok((p.ln() + t1 * big_l.ln() - specfun::log_gamma(t1 + 1.0)?).exp())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(TieDistribution {
        p_n: p,
        at_least,
        exactly,
        t_max,
    })
}

/// `⌈c z_n⌉`: the number of top positions at which ties at `m_n` switch from
/// likely (`c < 1`) to unlikely (`c > 1`). The order statistic at that rank is
/// the `⌈c z_n⌉`-th largest, see [`prob_rank_exceeds`].
pub fn tie_phase_threshold(profile: &ExtremalProfile, c: f64) -> Result<u64> {
    if profile.regime != Regime::GammaZero {
        return Err(Error::ModelMismatch("tie phase threshold needs the γ = 0 regime".into()));
    }
    if !(c > 0.0) || c.is_infinite() {
        return Err(Error::Domain {
            what: "tie phase constant",
            value: c,
        });
    }
    Ok((c * profile.z_n).ceil() as u64)
}

/// Poisson bound `(λ / (x_n + 1))^{m_n - x_n}` on `P(max ∉ {m_n, m_n + 1})`.
pub fn anderson_cluster_bound(model: &DiscreteTailModel, profile: &ExtremalProfile) -> Result<f64> {
    let Family::Poisson { lambda } = *model.family() else {
        return Err(Error::ModelMismatch(format!(
            "cluster bound is for poisson models, got {}",
            model.name()
        )));
    };
    Ok((lambda / (profile.x_n + 1.0)).powf(profile.m_n as f64 - profile.x_n))
}

/// Lambert-W approximation of the Poisson `x_n`:
/// `y + (ln λ - λ - ½ ln 2π - (3/2) ln y) / (ln y - ln λ)` with
/// `y = ln n / W(ln n / (λ e))`.
pub fn briggs_approximation(lambda: f64, n: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Domain {
            what: "briggs lambda",
            value: lambda,
        });
    }
    if !(n >= 3.0) {
        return Err(Error::Domain {
            what: "briggs sample size",
            value: n,
        });
    }
    let ln_n = n.ln();
    let y = ln_n / specfun::lambert_w0(ln_n / (lambda * std::f64::consts::E))?;
    let denom = y.ln() - lambda.ln();
    if denom.abs() < 1e-12 {
        return Err(Error::Domain {
            what: "briggs degenerate ln y = ln λ",
            value: y,
        });
    }
    let ln_2pi = (2.0 * std::f64::consts::PI).ln();
    Ok(y + (lambda.ln() - lambda - 0.5 * ln_2pi - 1.5 * y.ln()) / denom)
}

/// The first-order asymptotic `ln n / ln ln n`.
pub fn crude_asymptotic(n: f64) -> f64 {
    n.ln() / n.ln().ln()
}

/// Profiles along increasing `n_values`, marking where `m_n` jumps.
pub fn scan_oscillation(model: &DiscreteTailModel, n_values: &[f64], method: ProfileMethod) -> Result<OscillationScan> {
    if n_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("scan values must be strictly increasing".into()));
    }
    let rows = n_values
        .iter()
        .map(|&n| {
            let p = profile_with(model, n, method)?;
            Ok(ScanRow {
                n,
                x_n: p.x_n,
                m_n: p.m_n,
                p_n: p.p_n,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let breakpoints = rows
        .windows(2)
        .filter(|w| w[1].m_n > w[0].m_n)
        .map(|w| w[0].n)
        .collect();
    Ok(OscillationScan { rows, breakpoints })
}
