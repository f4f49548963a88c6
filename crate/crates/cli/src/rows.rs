use maxclust::allocsim::ReportRow;
use maxclust::{ProfileMethod, Regime};
use serde::{Deserialize, Serialize};

use crate::output::{opt_real, real, size, Record};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub n: f64,
    pub gamma: f64,
    pub x_n: f64,
    pub m_n: i64,
    pub theta_n: f64,
    pub p_n: f64,
    pub z_n: f64,
    pub regime: Regime,
    pub method: ProfileMethod,
    pub anderson_bound: Option<f64>,
    pub briggs_x: Option<f64>,
}

fn method_name(m: ProfileMethod) -> &'static str {
    match m {
        ProfileMethod::Extension => "extension",
        ProfileMethod::PoissonLeadingTerm => "leading-term",
    }
}

impl Record for ProfileRow {
    fn header() -> &'static [&'static str] {
        &[
            "n",
            "gamma",
            "x_n",
            "m_n",
            "theta_n",
            "p_n",
            "z_n",
            "regime",
            "method",
            "anderson_bound",
            "briggs_x",
        ]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            size(self.n),
            real(self.gamma),
            real(self.x_n),
            self.m_n.to_string(),
            real(self.theta_n),
            real(self.p_n),
            real(self.z_n),
            format!("{:?}", self.regime),
            method_name(self.method).to_string(),
            opt_real(self.anderson_bound),
            opt_real(self.briggs_x),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: f64,
    pub x_n: f64,
    pub m_n: i64,
    pub p_n: f64,
    /// `m_n` increases at the next `n`
    pub breakpoint: bool,
}

impl Record for ScanRow {
    fn header() -> &'static [&'static str] {
        &["n", "x_n", "m_n", "p_n", "breakpoint"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            size(self.n),
            real(self.x_n),
            self.m_n.to_string(),
            real(self.p_n),
            self.breakpoint.to_string(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TieRow {
    pub t: usize,
    pub p_n: f64,
    pub exactly: Option<f64>,
    pub at_least: f64,
}

impl Record for TieRow {
    fn header() -> &'static [&'static str] {
        &["t", "p_n", "exactly", "at_least"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.t.to_string(),
            real(self.p_n),
            opt_real(self.exactly),
            real(self.at_least),
        ]
    }
}

impl Record for ReportRow {
    fn header() -> &'static [&'static str] {
        &["kind", "n", "k", "value", "count", "frequency", "theory", "abs_error", "stderr"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.kind.clone(),
            self.n.to_string(),
            self.k.to_string(),
            size(self.value),
            self.count.to_string(),
            real(self.frequency),
            real(self.theory),
            real(self.abs_error),
            real(self.stderr),
        ]
    }
}

/// `fit` output flattened into one table: `fit` rows carry the estimates,
/// law rows carry `P(block max = key)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub section: String,
    pub key: String,
    pub value: Option<f64>,
}

impl Record for FitRow {
    fn header() -> &'static [&'static str] {
        &["section", "key", "value"]
    }

    fn fields(&self) -> Vec<String> {
        vec![self.section.clone(), self.key.clone(), opt_real(self.value)]
    }
}
