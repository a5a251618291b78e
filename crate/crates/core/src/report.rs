//! Check results shared by every verification routine.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};

use serde::Serialize;

use crate::chart::ChartPoint;
use crate::error::Error;
use crate::expr::Expr;
use crate::form::{compare_forms, KForm};

/// How `worst_error` is compared with `threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// Pass iff `worst_error < threshold`.
    Below,
    /// Pass iff `worst_error > threshold` (nonvanishing checks).
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check_name: String,
    pub pass: bool,
    /// Report-only checks never fail a suite.
    pub assertable: bool,
    pub bound: Bound,
    pub threshold: f64,
    pub worst_error: f64,
    pub worst_point: Option<ChartPoint>,
    pub seed: Option<u64>,
    /// Largest coefficient magnitude met while checking; large values flag
    /// near-horizon conditioning.
    pub magnitude: f64,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckReport {
    pub fn below(name: &str, threshold: f64, worst: f64, point: Option<ChartPoint>) -> Self {
        CheckReport {
            check_name: name.to_string(),
            pass: worst < threshold,
            assertable: true,
            bound: Bound::Below,
            threshold,
            worst_error: worst,
            worst_point: point,
            seed: None,
            magnitude: 0.0,
            values: BTreeMap::new(),
            note: None,
            error: None,
        }
    }

    pub fn above(name: &str, threshold: f64, smallest: f64, point: Option<ChartPoint>) -> Self {
        CheckReport {
            pass: smallest > threshold,
            bound: Bound::Above,
            ..CheckReport::below(name, threshold, smallest, point)
        }
    }

    /// A check that could not be evaluated.
    pub fn failed(name: &str, threshold: f64, err: &Error) -> Self {
        CheckReport {
            pass: false,
            worst_error: f64::MAX,
            error: Some(err.to_string()),
            ..CheckReport::below(name, threshold, 0.0, None)
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_magnitude(mut self, magnitude: f64) -> Self {
        self.magnitude = magnitude;
        self
    }

    pub fn with_value(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.to_string(), v);
        self
    }

    pub fn with_note(mut self, note: &str) -> Self {
        self.note = Some(note.to_string());
        self
    }

    pub fn report_only(mut self) -> Self {
        self.assertable = false;
        self
    }

    /// Fails unless assertable checks pass; report-only checks always count
    /// as satisfied.
    pub fn satisfied(&self) -> bool {
        self.pass || !self.assertable
    }
}

/// Per-check thresholds with overrides by check name.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Tolerances {
    overrides: BTreeMap<String, f64>,
}

impl Tolerances {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, name: &str, value: f64) {
        self.overrides.insert(name.to_string(), value);
    }

    /// Override for `name`, else the `*` override, else `default`.
    pub fn get(&self, name: &str, default: f64) -> f64 {
        self.overrides.get(name).or_else(|| self.overrides.get("*")).copied().unwrap_or(default)
    }

    pub fn overrides(&self) -> &BTreeMap<String, f64> {
        &self.overrides
    }
}

/// Compares two forms at every sample and packages the result.
pub fn form_check(
    name: &str,
    threshold: f64,
    lhs: &KForm,
    rhs: &KForm,
    points: &[ChartPoint],
) -> CheckReport {
    match compare_forms(lhs, rhs, points) {
        Ok((worst, idx, mag)) => {
            CheckReport::below(name, threshold, worst, points.get(idx).copied()).with_magnitude(mag)
        }
        Err(e) => CheckReport::failed(name, threshold, &e),
    }
}

/// Compares two scalar expressions at every sample.
pub fn scalar_check(
    name: &str,
    threshold: f64,
    lhs: &Expr,
    rhs: &Expr,
    points: &[ChartPoint],
) -> CheckReport {
    form_check(
        name,
        threshold,
        &KForm::scalar(lhs.clone()),
        &KForm::scalar(rhs.clone()),
        points,
    )
}
