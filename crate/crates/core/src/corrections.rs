//! Multiple-hypothesis corrections over a family of tests.
//!
//! `n_tests` is always supplied by the caller. It may exceed the number of
//! records when part of the family was not materialized (for instance pairs
//! whose p-value cannot fall under any threshold); those hypotheses count
//! toward the denominator but can never be rejected.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pvalue::PValueRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Per-test threshold alpha / N_t.
    Bonferroni,
    /// Rank-based false discovery rate control.
    Fdr,
    /// Plain per-test threshold alpha.
    None,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Bonferroni => "bonferroni",
            Method::Fdr => "fdr",
            Method::None => "none",
        }
    }
}

/// Whether a p-value equal to its threshold is rejected.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    #[default]
    Strict,
    NonStrict,
}

impl Comparison {
    fn passes(self, p: f64, threshold: f64) -> bool {
        match self {
            Comparison::Strict => p < threshold,
            Comparison::NonStrict => p <= threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestBattery {
    pub records: Vec<PValueRecord>,
    n_tests: u64,
    alpha: f64,
    pub comparison: Comparison,
}

impl TestBattery {
    pub fn new(records: Vec<PValueRecord>, n_tests: u64, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if n_tests == 0 && !records.is_empty() {
            return Err(Error::invalid("number of tests", "must be positive"));
        }
        if (records.len() as u64) > n_tests {
            return Err(Error::invalid(
                "number of tests",
                format!("{n_tests} is smaller than the {} records", records.len()),
            ));
        }
        Ok(TestBattery {
            records,
            n_tests,
            alpha,
            comparison: Comparison::Strict,
        })
    }

    pub fn with_comparison(mut self, comparison: Comparison) -> Self {
        self.comparison = comparison;
        self
    }

    pub fn n_tests(&self) -> u64 {
        self.n_tests
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `alpha / N_t`.
    pub fn bonferroni_threshold(&self) -> f64 {
        if self.n_tests == 0 {
            return self.alpha;
        }
        self.alpha / self.n_tests as f64
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid("alpha", format!("{alpha} outside (0, 1)")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrectionResult {
    pub method: Method,
    /// Per-test threshold actually applied. Under FDR this is the p-value at
    /// rank `t_max`, or 0 when nothing is rejected.
    pub threshold: f64,
    /// Indices into `battery.records`, ascending.
    pub rejected: Vec<usize>,
}

impl CorrectionResult {
    pub fn is_rejected(&self, index: usize) -> bool {
        self.rejected.binary_search(&index).is_ok()
    }
}

pub fn apply(method: Method, battery: &TestBattery) -> CorrectionResult {
    match method {
        Method::Bonferroni => bonferroni(battery),
        Method::Fdr => fdr(battery),
        Method::None => uncorrected(battery),
    }
}

fn threshold_rule(battery: &TestBattery, method: Method, threshold: f64) -> CorrectionResult {
    let rejected = battery
        .records
        .iter()
        .enumerate()
        .filter(|(_, r)| battery.comparison.passes(r.p, threshold))
        .map(|(i, _)| i)
        .collect();
    CorrectionResult {
        method,
        threshold,
        rejected,
    }
}

pub fn uncorrected(battery: &TestBattery) -> CorrectionResult {
    threshold_rule(battery, Method::None, battery.alpha)
}

pub fn bonferroni(battery: &TestBattery) -> CorrectionResult {
    threshold_rule(battery, Method::Bonferroni, battery.bonferroni_threshold())
}

/// Sorts p-values ascending (ties by record index), finds the largest rank
/// `t` whose p-value beats `t * alpha / N_t`, and rejects ranks `1..=t`.
pub fn fdr(battery: &TestBattery) -> CorrectionResult {
    let theta = battery.bonferroni_threshold();
    let mut order: Vec<usize> = (0..battery.records.len()).collect();
    order.sort_by(|&a, &b| {
        battery.records[a]
            .p
            .total_cmp(&battery.records[b].p)
            .then(a.cmp(&b))
    });
    let t_max = order
        .iter()
        .enumerate()
        .rev()
        .find(|&(rank, &idx)| {
            let p = battery.records[idx].p;
            !p.is_nan() && battery.comparison.passes(p, (rank + 1) as f64 * theta)
        })
        .map(|(rank, _)| rank + 1)
        .unwrap_or(0);
    let threshold = if t_max == 0 {
        0.0
    } else {
        battery.records[order[t_max - 1]].p
    };
    let mut rejected: Vec<usize> = order[..t_max].to_vec();
    rejected.sort_unstable();
    CorrectionResult {
        method: Method::Fdr,
        threshold,
        rejected,
    }
}
