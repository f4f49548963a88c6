//! `maxclust`: extremal profiles, oscillation scans, tie laws, allocation
//! simulations and block-maximum fits from the command line.
//!
//! Exit codes: 0 success, 2 usage error, 3 numeric failure, 4 data error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use maxclust::allocsim::{self, AllocationKind, AllocationSpec};
use maxclust::datafit::{self, FitReport, InputFormat, NbFit};
use maxclust::extremes::{self, ExtremalProfile};
use maxclust::tailmodel::{Family, ModelSpec};
use maxclust::{DiscreteTailModel, Error, Extension, ProfileMethod};

use maxclust_cli::output::{self, Record};
use maxclust_cli::rows::{FitRow, ProfileRow, ScanRow, TieRow};

#[derive(Parser)]
#[command(name = "maxclust", version, about = "Maxima and ties of discrete samples and allocations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// x_n, m_n, θ_n, p_n and z_n for one or more n
    Profile {
        #[command(flatten)]
        model: ModelArgs,
        /// sample sizes, e.g. --n 1e3 --n 1e6
        #[arg(long = "n", num_args = 1)]
        n: Vec<f64>,
        /// a:b:xF (geometric) or a:b:+S (arithmetic)
        #[arg(long)]
        n_range: Option<String>,
        #[arg(long, default_value = "extension")]
        method: ProfileMethod,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// profiles over a range of n, marking jumps of m_n
    Scan {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n_range: String,
        #[arg(long, default_value = "extension")]
        method: ProfileMethod,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// tie law at the maximum, from a profile or a given p_n
    Ties {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "n")]
        n: Option<f64>,
        /// use this p_n instead of profiling a model
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 3)]
        t_max: usize,
        #[arg(long, default_value = "extension")]
        method: ProfileMethod,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// drop balls into boxes and compare with the i.i.d. theory
    ///
    /// A poisson model gives λn uniform balls; a negbinom model gives
    /// Dirichlet(r) box weights and n·rp/(1-p) balls.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        /// number of boxes
        #[arg(long = "n")]
        n: f64,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// fit a count series and compare block maxima with theory
    ///
    /// Without --input, a negbinom model's parameters are used directly.
    Fit {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value = "counts")]
        input_format: InputFormat,
        #[arg(long, default_value_t = 24)]
        block: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct ModelArgs {
    /// poisson | negbinom | geometric | dcauchy | empirical
    #[arg(long, default_value = "poisson")]
    model: String,
    /// k=v pairs, e.g. lambda=1 or r=2,p=0.3 or p0=0.5,p1=0.5
    #[arg(long, value_delimiter = ',')]
    params: Vec<String>,
    #[arg(long, default_value = "natural")]
    extension: Extension,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_) | Error::ModelMismatch(_) | Error::Resource(_) => 2,
            Error::Domain { .. } | Error::NoConvergence { .. } | Error::RootNotBracketed(_) => 3,
            Error::Data { .. } | Error::Degenerate(_) => 4,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: 1,
            message: e.to_string(),
        }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Self {
            code: 1,
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Self {
            code: 1,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("maxclust: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn build_model(args: &ModelArgs) -> Result<DiscreteTailModel, Failure> {
    let mut params = BTreeMap::new();
    for kv in args.params.iter().filter(|s| !s.is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("parameter {kv:?} is not of the form key=value")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("parameter {k} has non-numeric value {v:?}")))?;
        params.insert(k.trim().to_string(), v);
    }
    let spec = ModelSpec {
        name: args.model.clone(),
        params,
        extension: args.extension,
    };
    Ok(DiscreteTailModel::from_spec(&spec)?)
}

/// `a:b:xF` multiplies by F, `a:b:+S` (or `a:b:S`) adds S, up to b inclusive.
fn parse_range(text: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::usage(format!("range {text:?} is not a:b:xF or a:b:+S"));
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, step] = parts.as_slice() else {
        return Err(bad());
    };
    let a: f64 = a.parse().map_err(|_| bad())?;
    let b: f64 = b.parse().map_err(|_| bad())?;
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Failure::usage(format!("empty range {text:?}")));
    }
    let limit = b * (1.0 + 1e-12);
    let mut out = vec![a];
    if let Some(f) = step.strip_prefix('x') {
        let f: f64 = f.parse().map_err(|_| bad())?;
        if !(f > 1.0) || !(a > 0.0) {
            return Err(Failure::usage("geometric ranges need a > 0 and a factor above 1"));
        }
        for i in 1.. {
            let v = a * f.powi(i);
            if v > limit {
                break;
            }
            out.push(v);
        }
    } else {
        let s: f64 = step.trim_start_matches('+').parse().map_err(|_| bad())?;
        if !(s > 0.0) {
            return Err(Failure::usage("arithmetic ranges need a positive step"));
        }
        for i in 1.. {
            let v = a + s * i as f64;
            if v > limit {
                break;
            }
            out.push(v);
        }
    }
    if out.len() > 1_000_000 {
        return Err(Failure::usage(format!("range {text:?} has more than a million points")));
    }
    Ok(out)
}

fn profile_row(model: &DiscreteTailModel, p: &ExtremalProfile) -> Result<ProfileRow, Failure> {
    let (anderson, briggs) = match *model.family() {
        Family::Poisson { lambda } => (
            Some(extremes::anderson_cluster_bound(model, p)?),
            if p.n >= 3.0 {
                Some(extremes::briggs_approximation(lambda, p.n)?)
            } else {
                None
            },
        ),
        _ => (None, None),
    };
    Ok(ProfileRow {
        n: p.n,
        gamma: p.gamma,
        x_n: p.x_n,
        m_n: p.m_n,
        theta_n: p.theta_n,
        p_n: p.p_n,
        z_n: p.z_n,
        regime: p.regime,
        method: p.method,
        anderson_bound: anderson,
        briggs_x: briggs,
    })
}

fn render<R: Record + serde::Serialize>(rows: &[R], output: &OutputArgs) -> Result<(), Failure> {
    let text = match output.format {
        Format::Csv => output::csv_string(rows)?,
        Format::Json => output::json_string(rows)?,
    };
    Ok(output::emit(&text, output.out.as_deref())?)
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Profile {
            model,
            n,
            n_range,
            method,
            output,
        } => {
            let m = build_model(&model)?;
            let mut ns = n;
            if let Some(r) = n_range {
                ns.extend(parse_range(&r)?);
            }
            if ns.is_empty() {
                return Err(Failure::usage("give at least one --n or an --n-range"));
            }
            let rows = ns
                .iter()
                .map(|&n| profile_row(&m, &extremes::profile_with(&m, n, method)?))
                .collect::<Result<Vec<_>, _>>()?;
            render(&rows, &output)
        }
        Command::Scan {
            model,
            n_range,
            method,
            output,
        } => {
            let m = build_model(&model)?;
            let ns = parse_range(&n_range)?;
            let scan = extremes::scan_oscillation(&m, &ns, method)?;
            let rows: Vec<ScanRow> = scan
                .rows
                .iter()
                .map(|r| ScanRow {
                    n: r.n,
                    x_n: r.x_n,
                    m_n: r.m_n,
                    p_n: r.p_n,
                    breakpoint: scan.breakpoints.contains(&r.n),
                })
                .collect();
            render(&rows, &output)
        }
        Command::Ties {
            model,
            n,
            p,
            t_max,
            method,
            output,
        } => {
            let ties = match (p, n) {
                (Some(p), None) => extremes::tie_distribution_for_p(p, t_max)?,
                (None, Some(n)) => {
                    let m = build_model(&model)?;
                    extremes::tie_distribution(&extremes::profile_with(&m, n, method)?, t_max)?
                }
                _ => return Err(Failure::usage("give exactly one of --n and --p")),
            };
            let rows: Vec<TieRow> = (0..=t_max + 1)
                .map(|t| TieRow {
                    t,
                    p_n: ties.p_n,
                    exactly: (t <= t_max).then(|| ties.exactly(t)),
                    at_least: ties.at_least(t),
                })
                .collect();
            render(&rows, &output)
        }
        Command::Simulate {
            model,
            n,
            trials,
            seed,
            output,
        } => {
            if !(n >= 1.0) || n.fract() != 0.0 || n > u32::MAX as f64 {
                return Err(Failure::usage(format!("--n must be a whole number of boxes, got {n}")));
            }
            let m = build_model(&model)?;
            let (kind, mean) = match *m.family() {
                Family::Poisson { lambda } => (AllocationKind::Multinomial, lambda),
                Family::NegBinomial { r, p } => (AllocationKind::DirichletMultinomial { r }, r * p / (1.0 - p)),
                _ => return Err(Failure::usage("simulate needs a poisson or negbinom model")),
            };
            let spec = AllocationSpec {
                n_boxes: n as u64,
                n_balls: (mean * n).round() as u64,
                kind,
                trials,
                seed,
            };
            let matched = spec.matched_model()?.with_extension(model.extension);
            let prof = extremes::profile(&matched, n)?;
            let report = allocsim::merging_report(&spec, &prof)?;
            match output.format {
                Format::Csv => render(&report.rows, &output),
                Format::Json => Ok(output::emit(&output::json_string(&report)?, output.out.as_deref())?),
            }
        }
        Command::Fit {
            model,
            input,
            input_format,
            block,
            trials,
            seed,
            output,
        } => {
            let report = match input {
                Some(path) => {
                    let series = datafit::ingest_path(&path, input_format, block)?;
                    datafit::fit_report(&series, trials, seed)?
                }
                None => {
                    let m = build_model(&model)?;
                    let Family::NegBinomial { r, p } = *m.family() else {
                        return Err(Failure::usage("without --input, fit needs a negbinom model"));
                    };
                    let mut rep = datafit::model_report(NbFit::from_params(r, p)?, block, trials, seed)?;
                    rep.label = "model".into();
                    rep
                }
            };
            match output.format {
                Format::Csv => render(&fit_rows(&report), &output),
                Format::Json => Ok(output::emit(&output::json_string(&report)?, output.out.as_deref())?),
            }
        }
    }
}

fn fit_rows(report: &FitReport) -> Vec<FitRow> {
    let row = |section: &str, key: String, value: Option<f64>| FitRow {
        section: section.to_string(),
        key,
        value,
    };
    let mut rows = vec![
        row("fit", "mean".into(), Some(report.fit.mean)),
        row("fit", "variance".into(), Some(report.fit.variance)),
        row("fit", "r".into(), report.fit.r),
        row("fit", "p".into(), report.fit.p),
        row("fit", "blocks".into(), Some(report.blocks as f64)),
    ];
    for (section, law) in [
        ("theory", &report.theory),
        ("limiting", &report.limiting),
        ("empirical", &report.empirical),
        ("simulated", &report.simulated),
    ] {
        rows.extend(law.iter().map(|l| row(section, l.value.to_string(), Some(l.probability))));
    }
    rows
}
