// SPDX-License-Identifier: Apache-2.0
//! Sufficient-condition checkers and the Dueck separation scan.
//!
//! Every checker returns a [`ConditionReport`]: one [`Inequality`] record per
//! condition, the decoding-failure bounds `phi`, boolean preconditions and a
//! flag telling whether any term is a bound rather than an exact value.

mod assign;
mod classic;
mod dueck_checks;
mod scan;
mod theorems;

pub use assign::{
    CesAssignment, ChkPart, IcAssignment, IcChannel, LcAssignment, MacAssignment, SchemeParams,
};
pub use classic::{check_ces, check_lc};
pub use dueck_checks::{
    check_isolated, check_isolated_default, dueck_ic_step1, dueck_mac_step1, dueck_step1,
    first_condition_ln_slack, lemma_ces_violation, lemma_lc_violation, lemma_violation,
    phi_chain, LemmaResult, PhiChain,
};
pub use scan::{dueck_separation_scan, minimal_a_for_k, ScanResult, ScanRow, ScanWitness};
pub use theorems::{
    check_ic_chk, check_ic_step1, check_ic_step2, check_mac_step1, check_mac_step2,
    chk_region_contains,
};

use crate::logreal::LogReal;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Margin a strict inequality must clear.
pub const STRICT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`, or `exp(ln_slack)` for records with an analytic slack.
    pub slack: f64,
    /// Natural log of the slack when it is computed analytically because
    /// `rhs - lhs` would cancel to rounding noise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ln_slack: Option<f64>,
    pub strict: bool,
    pub satisfied: bool,
}

impl Inequality {
    /// `lhs < rhs` (strict) or `lhs <= rhs`, judged on `rhs - lhs`.
    pub fn new(name: &str, lhs: f64, rhs: f64, strict: bool) -> Self {
        let slack = rhs - lhs;
        let satisfied = if strict { slack > STRICT_TOL } else { slack >= -STRICT_TOL };
        Inequality { name: name.into(), lhs, rhs, slack, ln_slack: None, strict, satisfied }
    }

    /// As `new`, but judged on an analytically known nonnegative slack.
    pub fn with_ln_slack(name: &str, lhs: f64, rhs: f64, strict: bool, ln_slack: f64) -> Self {
        let satisfied = !ln_slack.is_nan() && (!strict || ln_slack > f64::NEG_INFINITY);
        Inequality {
            name: name.into(),
            lhs,
            rhs,
            slack: ln_slack.exp(),
            ln_slack: Some(ln_slack),
            strict,
            satisfied,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiEntry {
    pub name: String,
    pub g: LogReal,
    pub xi_l: LogReal,
    pub tau: LogReal,
    pub phi: LogReal,
    pub below_half: bool,
}

impl PhiEntry {
    pub fn new(name: &str, g: LogReal, xi_l: LogReal, tau: LogReal) -> Self {
        let phi = g + xi_l + tau;
        PhiEntry { name: name.into(), g, xi_l, tau, phi, below_half: phi.ln() < 0.5f64.ln() }
    }
}

/// A boolean precondition such as `l >= l*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub theorem: String,
    pub inequalities: Vec<Inequality>,
    pub phi: Vec<PhiEntry>,
    pub checks: Vec<Check>,
    /// Information quantities that fed the inequalities.
    pub quantities: BTreeMap<String, f64>,
    pub overall: bool,
    /// Some terms are bounds substituted for exact values.
    pub bound_mode: bool,
    pub warnings: Vec<String>,
}

impl ConditionReport {
    pub(crate) fn new(theorem: &str) -> Self {
        ConditionReport { theorem: theorem.into(), ..Default::default() }
    }

    pub(crate) fn push(&mut self, ineq: Inequality) {
        self.inequalities.push(ineq);
    }

    pub(crate) fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check { name: name.into(), passed, detail });
    }

    pub(crate) fn q(&mut self, name: &str, v: f64) {
        self.quantities.insert(name.into(), v);
    }

    /// Recompute `overall` from the records.
    pub(crate) fn finish(mut self) -> Self {
        self.overall = self.inequalities.iter().all(|i| i.satisfied)
            && self.phi.iter().all(|p| p.below_half)
            && self.checks.iter().all(|c| c.passed);
        self
    }

    pub fn min_slack(&self) -> f64 {
        self.inequalities.iter().map(|i| i.slack).fold(f64::INFINITY, f64::min)
    }

    pub fn inequality(&self, name: &str) -> Option<&Inequality> {
        self.inequalities.iter().find(|i| i.name == name)
    }
}
