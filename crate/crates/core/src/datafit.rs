//! Count series, negative binomial moment fits and block maxima.
//!
//! A series of hourly event counts is cut into blocks (days of 24 hours); the
//! distribution of the per-block maximum is compared across the data, the
//! exact law under a fitted model, its limiting approximation, and a
//! simulation from the same model.

use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::allocsim;
use crate::error::{Error, Result};
use crate::extremes::{self, Regime};
use crate::tailmodel::DiscreteTailModel;

/// Mass below which [`daily_max_law`] stops.
pub const LAW_TRUNCATION: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountSeries {
    pub counts: Vec<u64>,
    pub block_size: usize,
    pub label: String,
}

impl CountSeries {
    pub fn new(counts: Vec<u64>, block_size: usize, label: impl Into<String>) -> Result<Self> {
        if block_size == 0 {
            return Err(Error::InvalidParameter("block size must be at least 1".into()));
        }
        if counts.len() < block_size {
            return Err(Error::Degenerate(format!(
                "series has {} entries, fewer than one block of {block_size}",
                counts.len()
            )));
        }
        Ok(Self {
            counts,
            block_size,
            label: label.into(),
        })
    }

    /// Complete blocks; a trailing partial block is ignored.
    pub fn blocks(&self) -> std::slice::ChunksExact<'_, u64> {
        self.counts.chunks_exact(self.block_size)
    }

    pub fn n_blocks(&self) -> usize {
        self.counts.len() / self.block_size
    }
}

/// Input layout for [`ingest`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    /// One non-negative integer per line.
    #[default]
    Counts,
    /// One ISO-8601 timestamp per line (first CSV field), binned by hour.
    Timestamps,
}

impl std::str::FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "counts" => Ok(InputFormat::Counts),
            "timestamps" => Ok(InputFormat::Timestamps),
            other => Err(Error::InvalidParameter(format!("unknown input format {other:?}"))),
        }
    }
}

pub fn ingest_path(path: &Path, format: InputFormat, block_size: usize) -> Result<CountSeries> {
    let file = std::fs::File::open(path).map_err(|e| Error::Data {
        line: 0,
        message: format!("{}: {e}", path.display()),
    })?;
    let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    ingest(std::io::BufReader::new(file), format, block_size, &label)
}

/// Read a series. Blank lines and lines starting with `#` are skipped; in
/// timestamp mode a first line whose first field is not a timestamp is taken
/// as a header.
///
/// ```
/// use maxclust::datafit::{ingest, InputFormat};
///
/// let s = ingest("0\n1\n0\n2\n".as_bytes(), InputFormat::Counts, 2, "demo").unwrap();
/// assert_eq!(s.n_blocks(), 2);
/// ```
pub fn ingest<R: BufRead>(reader: R, format: InputFormat, block_size: usize, label: &str) -> Result<CountSeries> {
    let counts = match format {
        InputFormat::Counts => read_counts(reader)?,
        InputFormat::Timestamps => bin_hourly(&read_timestamps(reader)?),
    };
    CountSeries::new(counts, block_size, label)
}

fn data_err(line: usize, message: impl Into<String>) -> Error {
    Error::Data {
        line,
        message: message.into(),
    }
}

fn read_counts<R: BufRead>(reader: R) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| data_err(i + 1, e.to_string()))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let v: i64 = t
            .parse()
            .map_err(|_| data_err(i + 1, format!("expected an integer count, found {t:?}")))?;
        if v < 0 {
            return Err(data_err(i + 1, format!("negative count {v}")));
        }
        out.push(v as u64);
    }
    Ok(out)
}

fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim().trim_matches('"');
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M", "%Y-%m-%d %H:%M"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(t.and_utc());
        }
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|t| t.and_utc())
}

fn read_timestamps<R: BufRead>(reader: R) -> Result<Vec<DateTime<Utc>>> {
    let mut out = Vec::new();
    let mut seen_row = false;
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| data_err(i + 1, e.to_string()))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let field = t.split(',').next().unwrap_or("");
        match parse_timestamp(field) {
            Some(ts) => out.push(ts),
            None if !seen_row => {}
            None => return Err(data_err(i + 1, format!("cannot parse timestamp {field:?}"))),
        }
        seen_row = true;
    }
    if out.is_empty() {
        return Err(data_err(0, "no timestamps found"));
    }
    Ok(out)
}

/// Counts per hour from the first to the last event's hour, inclusive.
fn bin_hourly(times: &[DateTime<Utc>]) -> Vec<u64> {
    let hours: Vec<i64> = times.iter().map(|t| t.timestamp().div_euclid(3600)).collect();
    let first = hours.iter().copied().min().unwrap_or(0);
    let last = hours.iter().copied().max().unwrap_or(0);
    let mut counts = vec![0u64; (last - first + 1) as usize];
    for h in hours {
        counts[(h - first) as usize] += 1;
    }
    counts
}

/// Method-of-moments fit. Without overdispersion `r` and `p` are `None` and
/// [`NbFit::model`] falls back to Poisson(mean).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NbFit {
    pub mean: f64,
    /// unbiased sample variance
    pub variance: f64,
    pub r: Option<f64>,
    pub p: Option<f64>,
    pub overdispersed: bool,
}

impl NbFit {
    /// Fit from known parameters, e.g. to evaluate a published `(r, p)`.
    pub fn from_params(r: f64, p: f64) -> Result<Self> {
        DiscreteTailModel::negative_binomial(r, p)?;
        let mean = r * p / (1.0 - p);
        Ok(Self {
            mean,
            variance: mean / (1.0 - p),
            r: Some(r),
            p: Some(p),
            overdispersed: true,
        })
    }

    pub fn model(&self) -> Result<DiscreteTailModel> {
        match (self.r, self.p) {
            (Some(r), Some(p)) => DiscreteTailModel::negative_binomial(r, p),
            _ => DiscreteTailModel::poisson(self.mean),
        }
    }
}

/// `p = 1 - mean/variance`, `r = mean² / (variance - mean)`.
pub fn fit_nb_moments(series: &CountSeries) -> Result<NbFit> {
    fit_nb_from_counts(&series.counts)
}

pub fn fit_nb_from_counts(counts: &[u64]) -> Result<NbFit> {
    if counts.len() < 2 {
        return Err(Error::Degenerate("need at least two observations".into()));
    }
    let n = counts.len() as f64;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / n;
    let variance = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0);
    if variance == 0.0 {
        return Err(Error::Degenerate(format!("constant series (every count is {mean})")));
    }
    if variance > mean {
        Ok(NbFit {
            mean,
            variance,
            r: Some(mean * mean / (variance - mean)),
            p: Some(1.0 - mean / variance),
            overdispersed: true,
        })
    } else {
        Ok(NbFit {
            mean,
            variance,
            r: None,
            p: None,
            overdispersed: false,
        })
    }
}

/// Exact `P(max of block i.i.d. draws = v) = F(v)^block - F(v-1)^block`,
/// from the bottom of the support until the remaining mass is below
/// [`LAW_TRUNCATION`].
///
/// ```
/// use maxclust::{datafit, DiscreteTailModel};
///
/// let m = DiscreteTailModel::poisson(0.3).unwrap();
/// let law = datafit::daily_max_law(&m, 1).unwrap();
/// assert!((law[&0] - (-0.3f64).exp()).abs() < 1e-15);
/// ```
pub fn daily_max_law(model: &DiscreteTailModel, block_size: u64) -> Result<BTreeMap<i64, f64>> {
    if block_size == 0 {
        return Err(Error::InvalidParameter("block size must be at least 1".into()));
    }
    let b = block_size as f64;
    let mut law = BTreeMap::new();
    let mut v = model.support_min();
    let mut prev = 0.0;
    loop {
        let cdf = extremes::exact_max_cdf_log(model, b, v)?.exp();
        law.insert(v, (cdf - prev).max(0.0));
        if 1.0 - cdf < LAW_TRUNCATION {
            break;
        }
        prev = cdf;
        v += 1;
        if v - model.support_min() > 10_000_000 {
            return Err(Error::Resource("block maximum law does not settle; tail too heavy".into()));
        }
    }
    Ok(law)
}

/// Block maximum law from the limit theorem with `n = block_size`:
/// `P(max <= m_n + x) ≈ p_n^{γ^x}`, with the lowest support point carrying
/// the whole limiting mass below it.
pub fn limiting_daily_max_law(model: &DiscreteTailModel, block_size: u64) -> Result<BTreeMap<i64, f64>> {
    let prof = extremes::profile(model, block_size as f64)?;
    if prof.regime == Regime::GammaOne {
        return Err(Error::ModelMismatch("no limiting block maximum law when γ = 1".into()));
    }
    let mut law = BTreeMap::new();
    let mut v = model.support_min();
    let mut prev = 0.0;
    loop {
        let cdf = extremes::limiting_max_cdf(&prof, v - prof.m_n);
        law.insert(v, (cdf - prev).max(0.0));
        if 1.0 - cdf < LAW_TRUNCATION {
            break;
        }
        prev = cdf;
        v += 1;
    }
    Ok(law)
}

/// Relative frequencies of the per-block maxima.
pub fn empirical_daily_max(series: &CountSeries) -> BTreeMap<i64, f64> {
    let mut hist: BTreeMap<i64, u64> = BTreeMap::new();
    for block in series.blocks() {
        let max = block.iter().copied().max().unwrap_or(0) as i64;
        *hist.entry(max).or_insert(0) += 1;
    }
    let n = series.n_blocks() as f64;
    hist.into_iter().map(|(k, c)| (k, c as f64 / n)).collect()
}

/// Block maxima of `trials` simulated blocks; block `t` uses stream `t` of `seed`.
pub fn simulate_daily_max(
    model: &DiscreteTailModel,
    block_size: u64,
    trials: u64,
    seed: u64,
) -> Result<BTreeMap<i64, f64>> {
    if trials == 0 || block_size == 0 {
        return Err(Error::InvalidParameter("trials and block size must be at least 1".into()));
    }
    let hist = (0..trials)
        .into_par_iter()
        .map(|t| {
            let xs = allocsim::draw_iid(model, block_size as usize, seed, t)?;
            let mut h = BTreeMap::new();
            h.insert(xs.into_iter().max().unwrap_or(0), 1u64);
            Ok(h)
        })
        .try_reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            Ok(a)
        })?;
    Ok(hist.into_iter().map(|(k, c)| (k, c as f64 / trials as f64)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LawRow {
    pub value: i64,
    pub probability: f64,
}

fn rows(law: &BTreeMap<i64, f64>) -> Vec<LawRow> {
    law.iter()
        .map(|(&value, &probability)| LawRow { value, probability })
        .collect()
}

/// Everything the `fit` command reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub label: String,
    pub block_size: usize,
    pub blocks: usize,
    pub fit: NbFit,
    pub theory: Vec<LawRow>,
    pub limiting: Vec<LawRow>,
    pub empirical: Vec<LawRow>,
    pub simulated: Vec<LawRow>,
}

pub fn fit_report(series: &CountSeries, trials: u64, seed: u64) -> Result<FitReport> {
    let fit = fit_nb_moments(series)?;
    let mut report = model_report(fit, series.block_size, trials, seed)?;
    report.label = series.label.clone();
    report.blocks = series.n_blocks();
    report.empirical = rows(&empirical_daily_max(series));
    Ok(report)
}

/// Theory, limit and simulation columns for a given fit, without data.
pub fn model_report(fit: NbFit, block_size: usize, trials: u64, seed: u64) -> Result<FitReport> {
    let model = fit.model()?;
    let block = block_size as u64;
    let limiting = if block >= 2 {
        rows(&limiting_daily_max_law(&model, block)?)
    } else {
        Vec::new()
    };
    Ok(FitReport {
        label: String::new(),
        block_size,
        blocks: 0,
        fit,
        theory: rows(&daily_max_law(&model, block)?),
        limiting,
        empirical: Vec::new(),
        simulated: rows(&simulate_daily_max(&model, block, trials, seed)?),
    })
}
