//! Named, seeded identity checks and the report they produce.
//!
//! Every check in the registry has a fixed set of default parameters, a
//! tolerance and an anchor naming the identity it certifies. Checks backed by
//! Monte Carlo pass at a sigma bound and are retried once with four times the
//! samples under a fresh seed before they are declared failed.

mod algebra_checks;
mod mc_checks;
mod series_checks;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

/// How `observed` is compared with `bound`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ToleranceKind {
    Absolute,
    Relative,
    McSigma,
}

/// A check with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSpec {
    pub name: String,
    pub paper_anchor: String,
    pub params: BTreeMap<String, f64>,
    pub tolerance_kind: ToleranceKind,
    pub seed: u64,
}

impl CheckSpec {
    /// A numeric parameter; every registered check declares the ones it reads.
    pub fn param(&self, key: &str) -> f64 {
        *self.params.get(key).unwrap_or_else(|| panic!("check {} has no parameter {key}", self.name))
    }

    pub fn count(&self, key: &str) -> u64 {
        self.param(key) as u64
    }

    pub(crate) fn bound(&self) -> f64 {
        match self.tolerance_kind {
            ToleranceKind::McSigma => self.param("sigma"),
            _ => self.param("tol"),
        }
    }
}

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub paper_anchor: String,
    pub passed: bool,
    pub observed: f64,
    pub bound: f64,
    pub work: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    #[serde(skip)]
    pub wall_time: Duration,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
}

/// Results of a suite in registry order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub results: Vec<CheckResult>,
    pub summary: Summary,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.summary.fail == 0
    }
}

/// What a check body measures.
pub(crate) struct Outcome {
    pub observed: f64,
    pub work: u64,
}

type Body = Box<dyn Fn(&CheckSpec) -> Result<Outcome> + Send + Sync>;

pub(crate) struct Entry {
    name: String,
    anchor: &'static str,
    kind: ToleranceKind,
    params: Vec<(&'static str, f64)>,
    body: Body,
}

impl Entry {
    pub(crate) fn new(
        name: impl Into<String>,
        anchor: &'static str,
        kind: ToleranceKind,
        params: &[(&'static str, f64)],
        body: impl Fn(&CheckSpec) -> Result<Outcome> + Send + Sync + 'static,
    ) -> Entry {
        Entry { name: name.into(), anchor, kind, params: params.to_vec(), body: Box::new(body) }
    }
}

fn registry() -> &'static [Entry] {
    static REGISTRY: OnceLock<Vec<Entry>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut v = algebra_checks::entries();
        v.extend(series_checks::entries());
        v.extend(mc_checks::entries());
        v
    })
}

/// Names of all registered checks in suite order.
pub fn registered_names() -> Vec<String> {
    registry().iter().map(|e| e.name.clone()).collect()
}

fn lookup(name: &str) -> Result<&'static Entry> {
    registry()
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownCheck { name: name.to_string(), registered: registered_names() })
}

/// Seed of one attempt of a check, a pure function of the suite seed and the
/// check name.
pub fn derive_seed(seed: u64, name: &str, attempt: u64) -> u64 {
    // FNV-1a over the name, then a SplitMix64 finaliser.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = h ^ seed.rotate_left(17) ^ attempt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The registered defaults of a check under a suite seed.
pub fn default_spec(name: &str, seed: u64) -> Result<CheckSpec> {
    let e = lookup(name)?;
    Ok(CheckSpec {
        name: e.name.clone(),
        paper_anchor: e.anchor.to_string(),
        params: e.params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        tolerance_kind: e.kind,
        seed: derive_seed(seed, &e.name, 0),
    })
}

/// Runs one check. Failures of the underlying computation are reported in the
/// result; only an unknown name is an error.
pub fn run_check(spec: &CheckSpec) -> Result<CheckResult> {
    let entry = lookup(&spec.name)?;
    let start = Instant::now();
    let bound = spec.bound();
    let mut outcome = (entry.body)(spec);
    let mut work = 0;
    let passes = |o: &Result<Outcome>| matches!(o, Ok(o) if o.observed <= bound);
    if spec.tolerance_kind == ToleranceKind::McSigma && !passes(&outcome) {
        if let Ok(o) = &outcome {
            work += o.work;
        }
        let mut retry = spec.clone();
        for key in ["n", "n_direct", "n_semi"] {
            if let Some(v) = retry.params.get_mut(key) {
                *v *= 4.0;
            }
        }
        retry.seed = derive_seed(spec.seed, &spec.name, 1);
        outcome = (entry.body)(&retry);
    }
    let (observed, error) = match &outcome {
        Ok(o) => {
            work += o.work;
            (o.observed, None)
        }
        Err(e) => (f64::NAN, Some(e.to_string())),
    };
    Ok(CheckResult {
        name: spec.name.clone(),
        paper_anchor: spec.paper_anchor.clone(),
        passed: error.is_none() && observed <= bound,
        observed,
        bound,
        work,
        error,
        wall_time: start.elapsed(),
    })
}

/// Which checks a suite runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Named(Vec<String>),
}

impl Suite {
    /// "all" or a comma-separated list of check names.
    pub fn parse(s: &str) -> Suite {
        if s.trim() == "all" {
            Suite::All
        } else {
            Suite::Named(s.split(',').map(|n| n.trim().to_string()).filter(|n| !n.is_empty()).collect())
        }
    }

    fn label(&self) -> String {
        match self {
            Suite::All => "all".into(),
            Suite::Named(v) => v.join(","),
        }
    }
}

/// Runs the suite in registry order (or in the listed order for named suites).
pub fn run_suite(suite: &Suite, seed: u64) -> Result<Report> {
    let names = match suite {
        Suite::All => registered_names(),
        Suite::Named(v) => {
            for n in v {
                lookup(n)?;
            }
            v.clone()
        }
    };
    run_suite_with(suite, seed, &names, |_| {})
}

/// As `run_suite`, calling `progress` after each check.
pub fn run_suite_with(
    suite: &Suite,
    seed: u64,
    names: &[String],
    mut progress: impl FnMut(&CheckResult),
) -> Result<Report> {
    let mut results = Vec::with_capacity(names.len());
    for n in names {
        let r = run_check(&default_spec(n, seed)?)?;
        progress(&r);
        results.push(r);
    }
    let pass = results.iter().filter(|r| r.passed).count();
    let fail = results.len() - pass;
    Ok(Report { suite: suite.label(), seed, results, summary: Summary { pass, fail } })
}

/// Running maximum that lets NaN win, so a NaN residual fails its check.
pub(crate) fn worst(acc: f64, v: f64) -> f64 {
    if v.is_nan() || acc.is_nan() {
        f64::NAN
    } else {
        acc.max(v)
    }
}

#[cfg(test)]
mod tests;
