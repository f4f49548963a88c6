//! Balls into boxes: Monte Carlo and exact enumeration.
//!
//! Dropping `k` balls uniformly into `n` boxes gives box counts distributed as
//! `n` i.i.d. Poisson variables conditioned on their sum being `k`; Dirichlet
//! box weights with shape `r` give i.i.d. negative binomials with shape `r`
//! under the same conditioning. [`enumerate_conditional`] checks this exactly
//! on small instances, [`simulate`] and [`merging_report`] compare large
//! allocations with the i.i.d. extremal profile of the matched model.
//!
//! Every trial draws from its own ChaCha8 stream keyed by `(seed, trial)`, and
//! the per-trial results are merged as integer counts, so a summary depends
//! only on the spec, not on the thread count.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Gamma, Geometric, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremes::{self, ExtremalProfile, Regime};
use crate::tailmodel::{DiscreteTailModel, Family};

/// Default cap on `n_boxes * trials`.
pub const DEFAULT_BUDGET: u64 = 100_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AllocationKind {
    /// Each ball lands in a uniformly chosen box.
    Multinomial,
    /// Box weights are normalized Gamma(r) variates, drawn once per trial.
    DirichletMultinomial { r: f64 },
}

impl AllocationKind {
    pub fn label(&self) -> &'static str {
        match self {
            AllocationKind::Multinomial => "multinomial",
            AllocationKind::DirichletMultinomial { .. } => "dirichlet-multinomial",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllocationSpec {
    pub n_boxes: u64,
    pub n_balls: u64,
    pub kind: AllocationKind,
    pub trials: u64,
    pub seed: u64,
}

impl AllocationSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_boxes == 0 {
            return Err(Error::InvalidParameter("n_boxes must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.n_boxes > u32::MAX as u64 || self.n_balls > u32::MAX as u64 {
            return Err(Error::InvalidParameter("n_boxes and n_balls must fit in 32 bits".into()));
        }
        if let AllocationKind::DirichletMultinomial { r } = self.kind {
            if !(r > 0.0) || r.is_infinite() {
                return Err(Error::InvalidParameter(format!("dirichlet shape must be positive, got {r}")));
            }
        }
        Ok(())
    }

    /// The i.i.d. model whose conditioning on the total gives this allocation:
    /// Poisson(k/n), or NB(r, p) with mean `r p / (1 - p) = k/n`.
    pub fn matched_model(&self) -> Result<DiscreteTailModel> {
        self.validate()?;
        let lambda = self.n_balls as f64 / self.n_boxes as f64;
        match self.kind {
            AllocationKind::Multinomial => DiscreteTailModel::poisson(lambda),
            AllocationKind::DirichletMultinomial { r } => DiscreteTailModel::negative_binomial(r, lambda / (r + lambda)),
        }
    }
}

/// Aggregated outcome of many allocation trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllocationSummary {
    pub spec: AllocationSpec,
    pub m_n: i64,
    /// max value -> number of trials
    pub max_histogram: BTreeMap<u64, u64>,
    /// (boxes at the max) - 1 -> number of trials
    pub tie_histogram: BTreeMap<u64, u64>,
    /// number of boxes holding at least `m_n` balls -> number of trials
    pub depth_histogram: BTreeMap<u64, u64>,
    pub cluster_hits: u64,
    pub cluster_freq: f64,
    pub mean_top_two_occupancy: f64,
    pub top_two_total: u64,
    #[serde(skip)]
    top_two_sq_total: u128,
    pub trials: u64,
}

impl AllocationSummary {
    /// Sample standard deviation of the per-trial top-two occupancy.
    pub fn top_two_std(&self) -> f64 {
        if self.trials < 2 {
            return 0.0;
        }
        let t = self.trials as f64;
        let mean = self.top_two_total as f64 / t;
        let var = (self.top_two_sq_total as f64 - t * mean * mean) / (t - 1.0);
        var.max(0.0).sqrt()
    }
}

#[derive(Default)]
struct Partial {
    max: BTreeMap<u64, u64>,
    ties: BTreeMap<u64, u64>,
    depth: BTreeMap<u64, u64>,
    cluster: u64,
    top_two: u64,
    top_two_sq: u128,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        for (dst, src) in [
            (&mut self.max, other.max),
            (&mut self.ties, other.ties),
            (&mut self.depth, other.depth),
        ] {
            for (k, v) in src {
                *dst.entry(k).or_insert(0) += v;
            }
        }
        self.cluster += other.cluster;
        self.top_two += other.top_two;
        self.top_two_sq += other.top_two_sq;
        self
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Box counts of one trial; trial `t` always produces the same allocation.
pub fn sample_allocation(spec: &AllocationSpec, trial: u64) -> Result<Vec<u32>> {
    spec.validate()?;
    let mut rng = trial_rng(spec.seed, trial);
    let n = spec.n_boxes as usize;
    let mut counts = vec![0u32; n];
    match spec.kind {
        AllocationKind::Multinomial => {
            for _ in 0..spec.n_balls {
                counts[rng.random_range(0..n)] += 1;
            }
        }
        AllocationKind::DirichletMultinomial { r } => {
            if spec.n_balls == 0 {
                return Ok(counts);
            }
            let gamma = Gamma::new(r, 1.0).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            let mut weights: Vec<f64> = (0..n).map(|_| gamma.sample(&mut rng)).collect();
            if weights.iter().all(|&w| w == 0.0) {
                // every variate underflowed (tiny r): the largest is uniform
                weights[rng.random_range(0..n)] = 1.0;
            }
            let pick = WeightedIndex::new(&weights).map_err(|e| Error::InvalidParameter(e.to_string()))?;
            for _ in 0..spec.n_balls {
                counts[pick.sample(&mut rng)] += 1;
            }
        }
    }
    Ok(counts)
}

/// `n` i.i.d. draws from `model` on stream `stream` of `seed`.
///
/// Negative binomials are drawn as Poisson counts with Gamma(r, p/(1-p))
/// means; Cauchy and empirical models by inverting the tail.
pub fn draw_iid(model: &DiscreteTailModel, n: usize, seed: u64, stream: u64) -> Result<Vec<i64>> {
    let mut rng = trial_rng(seed, stream);
    let bad = |e: &dyn std::fmt::Display| Error::InvalidParameter(e.to_string());
    match *model.family() {
        Family::Poisson { lambda } => {
            let pois = Poisson::new(lambda).map_err(|e| bad(&e))?;
            Ok((0..n).map(|_| pois.sample(&mut rng) as i64).collect())
        }
        Family::NegBinomial { r, p } => {
            let gamma = Gamma::new(r, p / (1.0 - p)).map_err(|e| bad(&e))?;
            let mut out = Vec::with_capacity(n);
            for _ in 0..n {
                let mean = gamma.sample(&mut rng);
                out.push(if mean > 0.0 {
                    Poisson::new(mean).map_err(|e| bad(&e))?.sample(&mut rng) as i64
                } else {
                    0
                });
            }
            Ok(out)
        }
        Family::Geometric { q } => {
            let geo = Geometric::new(1.0 - q).map_err(|e| bad(&e))?;
            Ok((0..n).map(|_| geo.sample(&mut rng) as i64).collect())
        }
        _ => (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                invert_tail(model, u.max(f64::MIN_POSITIVE).ln())
            })
            .collect(),
    }
}

/// Smallest `k` with `ln 𝓕(k) <= ln_u`.
fn invert_tail(model: &DiscreteTailModel, ln_u: f64) -> Result<i64> {
    let mut lo = model.support_min() - 1;
    let mut step = 1i64;
    let mut hi = lo + step;
    while model.log_tail(hi)? > ln_u {
        lo = hi;
        step = step.saturating_mul(2);
        hi = lo.saturating_add(step);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if model.log_tail(mid)? > ln_u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Simulate with the default budget.
pub fn simulate(spec: &AllocationSpec, profile: &ExtremalProfile) -> Result<AllocationSummary> {
    simulate_with_budget(spec, profile, DEFAULT_BUDGET)
}

pub fn simulate_with_budget(spec: &AllocationSpec, profile: &ExtremalProfile, budget: u64) -> Result<AllocationSummary> {
    spec.validate()?;
    if (profile.n - spec.n_boxes as f64).abs() > 0.5 {
        return Err(Error::ModelMismatch(format!(
            "profile is for n = {}, allocation has {} boxes",
            profile.n, spec.n_boxes
        )));
    }
    let work = spec.n_boxes.saturating_mul(spec.trials);
    if work > budget {
        return Err(Error::Resource(format!(
            "n_boxes * trials = {work} exceeds the budget of {budget}"
        )));
    }
    let m = profile.m_n;
    let partial = (0..spec.trials)
        .into_par_iter()
        .map(|t| {
            let counts = sample_allocation(spec, t)?;
            let max = counts.iter().copied().max().unwrap_or(0) as i64;
            let at_max = counts.iter().filter(|&&c| c as i64 == max).count() as u64;
            let deep = counts.iter().filter(|&&c| c as i64 >= m).count() as u64;
            let top_two = counts.iter().filter(|&&c| c as i64 == m || c as i64 == m + 1).count() as u64;
            let mut p = Partial::default();
            p.max.insert(max as u64, 1);
            p.ties.insert(at_max - 1, 1);
            p.depth.insert(deep, 1);
            p.cluster = u64::from(max == m || max == m + 1);
            p.top_two = top_two;
            p.top_two_sq = (top_two as u128) * (top_two as u128);
            Ok(p)
        })
        .try_reduce(Partial::default, |a, b| Ok(a.merge(b)))?;
    let trials = spec.trials as f64;
    Ok(AllocationSummary {
        spec: *spec,
        m_n: m,
        max_histogram: partial.max,
        tie_histogram: partial.ties,
        depth_histogram: partial.depth,
        cluster_hits: partial.cluster,
        cluster_freq: partial.cluster as f64 / trials,
        mean_top_two_occupancy: partial.top_two as f64 / trials,
        top_two_total: partial.top_two,
        top_two_sq_total: partial.top_two_sq,
        trials: spec.trials,
    })
}

/// Exact law of the sorted box counts, computed two ways.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalLaw {
    pub n_boxes: u64,
    pub n_balls: u64,
    pub kind: AllocationKind,
    /// The Poisson mean or negative binomial `p` used for the i.i.d. side.
    pub iid_param: f64,
    pub rows: Vec<ConditionalRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalRow {
    /// counts in decreasing order
    pub counts: Vec<u64>,
    /// by sequential ball drops
    pub allocation: f64,
    /// i.i.d. counts conditioned on their sum
    pub conditioned: f64,
}

impl ConditionalLaw {
    pub fn max_abs_difference(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.allocation - r.conditioned).abs())
            .fold(0.0, f64::max)
    }
}

/// [`enumerate_conditional_with`] using λ = 1 (multinomial) or p = 1/2.
pub fn enumerate_conditional(n_boxes: u64, n_balls: u64, kind: AllocationKind) -> Result<ConditionalLaw> {
    let param = match kind {
        AllocationKind::Multinomial => 1.0,
        AllocationKind::DirichletMultinomial { .. } => 0.5,
    };
    enumerate_conditional_with(n_boxes, n_balls, kind, param)
}

/// Exact allocation law next to the conditioned i.i.d. law.
///
/// The allocation side drops balls one at a time: uniformly, or with the
/// Pólya urn weights `(r + y_i) / (n r + j)` that integrate out the Dirichlet
/// weights. The i.i.d. side is `Π pmf(y_i)` over all compositions of `k`,
/// renormalized, with Poisson(`iid_param`) or NB(r, `iid_param`) pmfs.
///
/// ```
/// use maxclust::allocsim::{enumerate_conditional, AllocationKind};
///
/// let law = enumerate_conditional(2, 2, AllocationKind::Multinomial).unwrap();
/// assert_eq!(law.rows.len(), 2);
/// assert!(law.rows.iter().all(|r| (r.allocation - 0.5).abs() < 1e-15));
/// ```
pub fn enumerate_conditional_with(
    n_boxes: u64,
    n_balls: u64,
    kind: AllocationKind,
    iid_param: f64,
) -> Result<ConditionalLaw> {
    if n_boxes == 0 || n_boxes > 6 || n_balls > 12 {
        return Err(Error::Resource(format!(
            "enumeration is limited to 1..=6 boxes and 12 balls, got {n_boxes} and {n_balls}"
        )));
    }
    let n = n_boxes as usize;
    let model = match kind {
        AllocationKind::Multinomial => DiscreteTailModel::poisson(iid_param)?,
        AllocationKind::DirichletMultinomial { r } => DiscreteTailModel::negative_binomial(r, iid_param)?,
    };

    // allocation law over ordered count vectors, one ball at a time
    let mut states: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
    states.insert(vec![0; n], 1.0);
    for j in 0..n_balls {
        let mut next = BTreeMap::new();
        for (state, prob) in states {
            for i in 0..n {
                let w = match kind {
                    AllocationKind::Multinomial => 1.0 / n as f64,
                    AllocationKind::DirichletMultinomial { r } => {
                        (r + state[i] as f64) / (n as f64 * r + j as f64)
                    }
                };
                let mut s = state.clone();
                s[i] += 1;
                *next.entry(s).or_insert(0.0) += prob * w;
            }
        }
        states = next;
    }

    // conditioned i.i.d. law over the same ordered vectors
    let mut iid: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
    let mut comp = vec![0u64; n];
    compositions(n_balls, 0, &mut comp, &mut |c| -> Result<()> {
        let mut lp = 0.0;
        for &y in c {
            lp += model.log_pmf(y as i64)?;
        }
        iid.insert(c.to_vec(), lp.exp());
        Ok(())
    })?;
    let total: f64 = iid.values().sum();

    let mut sorted: BTreeMap<Vec<u64>, (f64, f64)> = BTreeMap::new();
    for (state, prob) in &states {
        let mut key = state.clone();
        key.sort_unstable_by(|a, b| b.cmp(a));
        sorted.entry(key).or_insert((0.0, 0.0)).0 += prob;
    }
    for (state, w) in &iid {
        let mut key = state.clone();
        key.sort_unstable_by(|a, b| b.cmp(a));
        sorted.entry(key).or_insert((0.0, 0.0)).1 += w / total;
    }
    let rows = sorted
        .into_iter()
        .rev()
        .map(|(counts, (allocation, conditioned))| ConditionalRow {
            counts,
            allocation,
            conditioned,
        })
        .collect();
    Ok(ConditionalLaw {
        n_boxes,
        n_balls,
        kind,
        iid_param,
        rows,
    })
}

fn compositions<F>(remaining: u64, pos: usize, comp: &mut Vec<u64>, visit: &mut F) -> Result<()>
where
    F: FnMut(&[u64]) -> Result<()>,
{
    if pos + 1 == comp.len() {
        comp[pos] = remaining;
        return visit(comp);
    }
    for v in 0..=remaining {
        comp[pos] = v;
        compositions(remaining - v, pos + 1, comp, visit)?;
    }
    Ok(())
}

/// One comparison line between simulation and theory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    /// `max`, `ties`, `depth` or `occupancy`
    pub kind: String,
    pub n: u64,
    pub k: u64,
    pub value: f64,
    pub count: u64,
    pub frequency: f64,
    pub theory: f64,
    pub abs_error: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergingReport {
    pub summary: AllocationSummary,
    pub profile: ExtremalProfile,
    pub rows: Vec<ReportRow>,
}

fn freq_row(kind: &str, spec: &AllocationSpec, value: f64, count: u64, theory: f64) -> ReportRow {
    let t = spec.trials as f64;
    let f = count as f64 / t;
    ReportRow {
        kind: kind.to_string(),
        n: spec.n_boxes,
        k: spec.n_balls,
        value,
        count,
        frequency: f,
        theory,
        abs_error: (f - theory).abs(),
        stderr: (f * (1.0 - f) / t).sqrt(),
    }
}

/// Simulate and compare against the i.i.d. theory of the matched model.
///
/// Rows:
/// * `max`: each observed maximum `v` against `P(max = v)` from the limit law;
/// * `ties`: tie counts against the tie law (γ = 0 only);
/// * `depth`: for `c ∈ {0.5, 2}`, the frequency with which at least
///   `⌈c z_n⌉` boxes hold `m_n` or more balls, against the exact i.i.d.
///   probability that the `⌈c z_n⌉`-th largest exceeds `m_n - 1` (γ = 0 only);
/// * `occupancy`: mean number of boxes holding `m_n` or `m_n + 1` balls
///   against `n (P(X = m_n) + P(X = m_n + 1))`; its `stderr` is that of the mean.
pub fn merging_report(spec: &AllocationSpec, profile: &ExtremalProfile) -> Result<MergingReport> {
    let summary = simulate(spec, profile)?;
    let model = spec.matched_model()?;
    let m = profile.m_n;
    let mut rows = Vec::new();

    let lo = summary.max_histogram.keys().next().copied().unwrap_or(0).min(m.max(0) as u64);
    let hi = summary.max_histogram.keys().last().copied().unwrap_or(0).max((m + 1).max(0) as u64);
    for v in lo..=hi {
        let x = v as i64 - m;
        let theory = extremes::limiting_max_cdf(profile, x) - extremes::limiting_max_cdf(profile, x - 1);
        let count = summary.max_histogram.get(&v).copied().unwrap_or(0);
        rows.push(freq_row("max", spec, v as f64, count, theory));
    }

    if profile.regime == Regime::GammaZero {
        let t_max = summary.tie_histogram.keys().last().copied().unwrap_or(0).max(3) as usize;
        let ties = extremes::tie_distribution(profile, t_max)?;
        for t in 0..=t_max {
            let count = summary.tie_histogram.get(&(t as u64)).copied().unwrap_or(0);
            rows.push(freq_row("ties", spec, t as f64, count, ties.exactly(t)));
        }
        for c in [0.5, 2.0] {
            let rank = extremes::tie_phase_threshold(profile, c)?.clamp(1, spec.n_boxes);
            let count = summary.depth_histogram.range(rank..).map(|(_, v)| v).sum();
            let theory = extremes::prob_rank_exceeds(&model, spec.n_boxes, rank, m - 1)?;
            rows.push(freq_row("depth", spec, rank as f64, count, theory));
        }
    }

    let occ_theory = spec.n_boxes as f64 * (model.log_pmf(m)?.exp() + model.log_pmf(m + 1)?.exp());
    rows.push(ReportRow {
        kind: "occupancy".into(),
        n: spec.n_boxes,
        k: spec.n_balls,
        value: m as f64,
        count: summary.top_two_total,
        frequency: summary.mean_top_two_occupancy,
        theory: occ_theory,
        abs_error: (summary.mean_top_two_occupancy - occ_theory).abs(),
        stderr: summary.top_two_std() / (spec.trials as f64).sqrt(),
    });

    Ok(MergingReport {
        summary,
        profile: *profile,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremes::profile;

    fn spec(n_boxes: u64, n_balls: u64, kind: AllocationKind, trials: u64, seed: u64) -> AllocationSpec {
        AllocationSpec {
            n_boxes,
            n_balls,
            kind,
            trials,
            seed,
        }
    }

    fn multinomial_log_prob(counts: &[u64]) -> f64 {
        let k: u64 = counts.iter().sum();
        let mut l = (1..=k).map(|i| (i as f64).ln()).sum::<f64>() - k as f64 * (counts.len() as f64).ln();
        for &c in counts {
            l -= (1..=c).map(|i| (i as f64).ln()).sum::<f64>();
        }
        l
    }

    #[test]
    fn two_balls_two_boxes() {
        let law = enumerate_conditional(2, 2, AllocationKind::Multinomial).unwrap();
        let got: Vec<(Vec<u64>, f64)> = law.rows.iter().map(|r| (r.counts.clone(), r.allocation)).collect();
        assert_eq!(got.len(), 2);
        assert_eq!(got[0].0, vec![2, 0]);
        assert_eq!(got[1].0, vec![1, 1]);
        for r in &law.rows {
            assert!((r.allocation - 0.5).abs() < 1e-15);
            assert!((r.conditioned - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn sequential_drops_match_multinomial_formula() {
        let law = enumerate_conditional(4, 7, AllocationKind::Multinomial).unwrap();
        for row in &law.rows {
            // ordered vectors with this multiset
            let mut distinct = BTreeMap::new();
            for &c in &row.counts {
                *distinct.entry(c).or_insert(0u64) += 1;
            }
            let perms = (1..=4u64).product::<u64>() / distinct.values().map(|&m| (1..=m).product::<u64>()).product::<u64>();
            let want = perms as f64 * multinomial_log_prob(&row.counts).exp();
            assert!((row.allocation - want).abs() < 1e-14, "{:?}", row.counts);
        }
    }

    #[test]
    fn conditional_representation_is_exact() {
        for n in 2..=4 {
            for k in 2..=8 {
                for lambda in [0.3, 1.0, 2.0] {
                    let law = enumerate_conditional_with(n, k, AllocationKind::Multinomial, lambda).unwrap();
                    assert!(law.max_abs_difference() < 1e-12, "n={n} k={k} λ={lambda}");
                }
                for r in [0.5, 1.0, 2.0] {
                    let law =
                        enumerate_conditional_with(n, k, AllocationKind::DirichletMultinomial { r }, 0.37).unwrap();
                    assert!(law.max_abs_difference() < 1e-12, "n={n} k={k} r={r}");
                    let total: f64 = law.rows.iter().map(|r| r.allocation).sum();
                    assert!((total - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn enumeration_caps() {
        assert!(matches!(enumerate_conditional(7, 2, AllocationKind::Multinomial), Err(Error::Resource(_))));
        assert!(matches!(enumerate_conditional(3, 13, AllocationKind::Multinomial), Err(Error::Resource(_))));
        assert!(enumerate_conditional(6, 12, AllocationKind::Multinomial).is_ok());
    }

    #[test]
    fn conservation() {
        for kind in [AllocationKind::Multinomial, AllocationKind::DirichletMultinomial { r: 0.3 }] {
            let s = spec(37, 211, kind, 5, 9);
            for t in 0..5 {
                let c = sample_allocation(&s, t).unwrap();
                assert_eq!(c.len(), 37);
                assert_eq!(c.iter().map(|&x| x as u64).sum::<u64>(), 211);
            }
        }
    }

    #[test]
    fn reproducible_across_thread_counts() {
        let s = spec(2000, 200, AllocationKind::DirichletMultinomial { r: 2.0 }, 300, 42);
        let prof = profile(&s.matched_model().unwrap(), 2000.0).unwrap();
        let a = simulate(&s, &prof).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| simulate(&s, &prof).unwrap());
        assert_eq!(a, b);
        let c = simulate(&AllocationSpec { seed: 43, ..s }, &prof).unwrap();
        assert_ne!(a.max_histogram, c.max_histogram);
    }

    #[test]
    fn histograms_sum_to_trials() {
        let s = spec(1000, 100, AllocationKind::Multinomial, 200, 1);
        let prof = profile(&s.matched_model().unwrap(), 1000.0).unwrap();
        let sum = simulate(&s, &prof).unwrap();
        assert_eq!(sum.max_histogram.values().sum::<u64>(), 200);
        assert_eq!(sum.tie_histogram.values().sum::<u64>(), 200);
        assert_eq!(sum.depth_histogram.values().sum::<u64>(), 200);
        assert!((0.0..=1.0).contains(&sum.cluster_freq));
    }

    #[test]
    fn no_balls() {
        let s = spec(50, 0, AllocationKind::Multinomial, 10, 3);
        let prof = profile(&DiscreteTailModel::poisson(0.5).unwrap(), 50.0).unwrap();
        let sum = simulate(&s, &prof).unwrap();
        assert_eq!(sum.max_histogram, BTreeMap::from([(0, 10)]));
        assert_eq!(sum.tie_histogram, BTreeMap::from([(49, 10)]));
        let d = spec(50, 0, AllocationKind::DirichletMultinomial { r: 1.0 }, 10, 3);
        assert_eq!(simulate(&d, &prof).unwrap().max_histogram, BTreeMap::from([(0, 10)]));
    }

    #[test]
    fn budget_and_mismatch() {
        let s = spec(1000, 10, AllocationKind::Multinomial, 100, 3);
        let prof = profile(&s.matched_model().unwrap(), 1000.0).unwrap();
        assert!(matches!(simulate_with_budget(&s, &prof, 99_999), Err(Error::Resource(_))));
        let other = profile(&s.matched_model().unwrap(), 999.0).unwrap();
        assert!(matches!(simulate(&s, &other), Err(Error::ModelMismatch(_))));
        assert!(spec(0, 1, AllocationKind::Multinomial, 1, 0).validate().is_err());
        assert!(spec(1, 1, AllocationKind::Multinomial, 0, 0).validate().is_err());
        assert!(spec(1, 1, AllocationKind::DirichletMultinomial { r: 0.0 }, 1, 0).validate().is_err());
    }

    #[test]
    fn matched_models() {
        let s = spec(100, 30, AllocationKind::DirichletMultinomial { r: 2.0 }, 1, 0);
        let m = s.matched_model().unwrap();
        let mean: f64 = (0..400).map(|k| k as f64 * m.log_pmf(k).unwrap().exp()).sum();
        assert!((mean - 0.3).abs() < 1e-12);
    }

    #[test]
    fn iid_draws_have_model_moments() {
        let models = [
            DiscreteTailModel::poisson(2.5).unwrap(),
            DiscreteTailModel::negative_binomial(0.7, 0.4).unwrap(),
            DiscreteTailModel::geometric(0.6).unwrap(),
            DiscreteTailModel::empirical(crate::tailmodel::EmpiricalPmf::new(vec![0.2, 0.5, 0.3], 1).unwrap()),
        ];
        for m in &models {
            let mean: f64 = (m.support_min()..400).map(|k| k as f64 * m.log_pmf(k).unwrap().exp()).sum();
            let var: f64 = (m.support_min()..400).map(|k| (k as f64 - mean).powi(2) * m.log_pmf(k).unwrap().exp()).sum();
            let n = 200_000;
            let xs = draw_iid(m, n, 17, 0).unwrap();
            let got = xs.iter().sum::<i64>() as f64 / n as f64;
            assert!((got - mean).abs() <= 4.0 * (var / n as f64).sqrt(), "{}: {got} vs {mean}", m.name());
            assert_eq!(xs, draw_iid(m, n, 17, 0).unwrap());
        }
        let dc = DiscreteTailModel::discrete_cauchy();
        let xs = draw_iid(&dc, 100_000, 3, 1).unwrap();
        let zeros = xs.iter().filter(|&&x| x == 0).count() as f64 / 1e5;
        let p0 = dc.log_pmf(0).unwrap().exp();
        assert!((zeros - p0).abs() <= 4.0 * (p0 * (1.0 - p0) / 1e5).sqrt());
    }

    #[test]
    fn single_trial_report() {
        let s = spec(500, 50, AllocationKind::Multinomial, 1, 11);
        let prof = profile(&s.matched_model().unwrap(), 500.0).unwrap();
        let rep = merging_report(&s, &prof).unwrap();
        assert!(rep.rows.iter().filter(|r| r.kind != "occupancy").all(|r| r.abs_error <= 1.0));
        assert!(rep.rows.iter().any(|r| r.kind == "depth"));
    }

    #[test]
    fn small_lambda_clusters() {
        let s = spec(20_000, 2_000, AllocationKind::Multinomial, 2000, 5);
        let model = s.matched_model().unwrap();
        let prof = profile(&model, 20_000.0).unwrap();
        let sum = simulate(&s, &prof).unwrap();
        let cdf = |x: i64| extremes::exact_max_cdf_log(&model, 20_000.0, x).unwrap().exp();
        let q = cdf(prof.m_n + 1) - cdf(prof.m_n - 1);
        let sigma = (q * (1.0 - q) / 2000.0).sqrt();
        assert!((sum.cluster_freq - q).abs() <= 4.0 * sigma, "{} vs {q}", sum.cluster_freq);
    }
}
