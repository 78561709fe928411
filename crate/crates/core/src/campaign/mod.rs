//! Seeded verification campaigns and the JSON report envelope.
//!
//! Every campaign returns a body that depends only on its configuration and
//! seed. Trials run in parallel, each with seed `seed + index`, and are
//! collected in index order, so reruns yield byte-identical bodies.

pub mod counterexamples;
pub mod lemma_suite;
pub mod theorem1;
pub mod theorem2;

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::Serialize;

use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::fixture::parse_rational;
use crate::group::Group;
use num_rational::Rational64;

/// Version of the report layout described by `schemas/report.schema.json`.
pub const SCHEMA_VERSION: &str = "1.0.0";

/// Upper bound on stored failure descriptions per campaign.
pub const MAX_LISTED_FAILURES: usize = 20;

#[derive(Clone, Debug, Serialize)]
pub struct Timings {
    pub elapsed_ms: f64,
}

/// `{schema_version, command, body, timings}`; only `timings` varies between reruns.
#[derive(Clone, Debug, Serialize)]
pub struct Report<B: Serialize> {
    pub schema_version: &'static str,
    pub command: String,
    pub body: B,
    pub timings: Timings,
}

impl<B: Serialize> Report<B> {
    pub fn new(command: &str, body: B, elapsed_ms: f64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            body,
            timings: Timings { elapsed_ms },
        }
    }
}

pub fn trial_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add(index as u64)
}

/// Pass counts and worst residuals over one family of trials.
#[derive(Clone, Debug, Default, Serialize)]
pub struct TrialSummary {
    pub trials: usize,
    pub passed: usize,
    pub verdicts: BTreeMap<String, usize>,
    pub max_joint_residual: f64,
    pub max_reconstruction_error: Option<f64>,
}

impl TrialSummary {
    pub fn all_passed(&self) -> bool {
        self.passed == self.trials
    }

    pub(crate) fn record(
        &mut self,
        passed: bool,
        verdict: &str,
        joint: f64,
        reconstruction: Option<f64>,
    ) {
        self.trials += 1;
        if passed {
            self.passed += 1;
        }
        *self.verdicts.entry(verdict.to_string()).or_default() += 1;
        self.max_joint_residual = self.max_joint_residual.max(joint);
        if let Some(r) = reconstruction {
            self.max_reconstruction_error =
                Some(self.max_reconstruction_error.map_or(r, |m| m.max(r)));
        }
    }
}

/// Kebab-case name of a serializable unit enum value.
pub(crate) fn variant_name<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|j| j.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// Splits on commas outside square brackets.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(s[start..].trim());
    parts
}

fn config_err(msg: String) -> Error {
    Error::Parse { line: 1, msg }
}

/// Parses `1,2,3` (scalars) or matrices in the display form `[a,b;c,d]`, mixed freely.
pub fn parse_endos(group: &Group, s: &str) -> Result<Vec<Endo>> {
    if s.trim().is_empty() {
        return Err(config_err("empty coefficient list".into()));
    }
    split_top_level(s)
        .into_iter()
        .map(|tok| {
            if let Some(inner) = tok.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
                let rows = inner
                    .split(';')
                    .map(|row| {
                        row.split(',')
                            .map(|v| {
                                v.trim()
                                    .parse::<i64>()
                                    .map_err(|e| config_err(format!("bad matrix entry {v:?}: {e}")))
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Endo::new(group, &rows)
            } else {
                let c = tok
                    .parse::<i64>()
                    .map_err(|e| config_err(format!("bad coefficient {tok:?}: {e}")))?;
                Ok(Endo::scalar(group, c))
            }
        })
        .collect()
}

pub fn parse_rationals(s: &str) -> Result<Vec<Rational64>> {
    s.split(',').map(|t| parse_rational(t.trim())).collect()
}

pub fn parse_u64_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|e| config_err(format!("bad entry {t:?}: {e}")))
        })
        .collect()
}

/// Whether multiplication by `c` is injective on a group of the given exponent.
pub(crate) fn scalar_injective(c: i64, exponent: u64) -> bool {
    let e = exponent as i64;
    c.rem_euclid(e).gcd(&e) == 1
}
