// SPDX-License-Identifier: Apache-2.0
//! Monte Carlo for the `m x l` matrix scheme, plus exact enumeration checks of
//! the distributional identities the scheme relies on.
//!
//! A trial samples `m` rows of `l` source pairs, maps each row through the
//! typical-set source code and the constant-composition inner code, spreads
//! the outer codewords over the rows with random permutations, sends the
//! matrix through the channel and decodes in three stages: rows, interleaved
//! columns, and Slepian-Wolf recovery of the source matrix.
//!
//! In `component` mode the wrong candidates of the column and SW decoders are
//! not enumerated. Their number is drawn from the exact law of the random
//! ensemble, given the realized observation: a box-constrained multinomial
//! DP gives the probability (or count) of jointly typical candidates.

mod codes;
mod count;
mod inner;
mod lemmas;
mod pmfs;
mod stats;
pub mod toys;
mod trial;

pub use codes::{build_codes, CodeBundle};
pub use count::{calibrate_delta, ln_box_sum};
pub use inner::{inner_code_experiment, InnerExperiment, InnerPoint};
pub use lemmas::{
    appendix_g_identity, lemma3, lemma4, lemma5, lemma6, lemma7, micro_mac_spec, verify_appendix_g,
    verify_decoding_pmf_lemmas, verify_interleaving_lemmas, verify_lemmas, Lemma7Instance, LemmaCheck,
    LemmaGroup, LemmaReport, LEMMA_TOL,
};
pub use pmfs::{build_decoding_pmfs, DecodingPmfs, SparsePmf};
pub use stats::{
    disagreement_bound, dist_check, estimate_error, run_trials, summarize, trial_seed, verify_row_iid,
    wilson, DistCheck, ErrorSummary, RateCi, RowIidReport,
};
pub use trial::{run_ic_trial, run_mac_trial, MatrixBlock, Simulator, TrialOutcome, E1_MARGIN};

use crate::error::{FblError, Result};
use crate::regions::{IcAssignment, MacAssignment, SchemeParams};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Assignment {
    Mac(MacAssignment),
    Ic(IcAssignment),
}

impl Assignment {
    pub fn validate(&self) -> Result<()> {
        match self {
            Assignment::Mac(a) => a.validate(),
            Assignment::Ic(a) => a.validate(),
        }
    }

    pub fn receivers(&self) -> usize {
        match self {
            Assignment::Mac(_) => 1,
            Assignment::Ic(_) => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimMode {
    /// Wrong candidates are counted, not enumerated.
    #[default]
    Component,
    /// Enumerate the decoder search; falls back to `component` past the budget.
    EndToEnd,
}

impl std::str::FromStr for SimMode {
    type Err = FblError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "component" => Ok(SimMode::Component),
            "end-to-end" | "end_to_end" => Ok(SimMode::EndToEnd),
            _ => Err(FblError::Param(format!("unknown mode {s:?}"))),
        }
    }
}

/// How a decoder treats a candidate set with more than one member.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieMode {
    /// Pick a member uniformly at random.
    #[default]
    Uniform,
    /// Any non-singleton set is an error.
    Strict,
}

fn default_target() -> f64 {
    0.99
}

fn default_search_budget() -> u64 {
    1 << 20
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeEnsembleSpec {
    pub assignment: Assignment,
    pub params: SchemeParams,
    /// Number of rows (sub-blocks).
    pub m: usize,
    /// `ln M_Vj / m`, equal to the binning rate per source symbol.
    pub rates: [f64; 2],
    pub seed: u64,
    #[serde(default)]
    pub mode: SimMode,
    #[serde(default)]
    pub tie: TieMode,
    /// Decoder typicality tolerance for the column and SW stages. Calibrated
    /// per stage when absent.
    #[serde(default)]
    pub delta_dec: Option<f64>,
    /// Probability that the true tuple is decoder-typical, used for calibration.
    #[serde(default = "default_target")]
    pub target_typical: f64,
    /// Sub-block count at which `delta_dec` is calibrated; the configured `m`
    /// when absent. Fixing it holds the decoder tolerance constant across `m`.
    #[serde(default)]
    pub calibration_m: Option<usize>,
    /// Candidate cap for `end-to-end` searches.
    #[serde(default = "default_search_budget")]
    pub search_budget: u64,
    /// Explicit inner codebook; drawn from the ensemble when absent.
    #[serde(default)]
    pub codebook: Option<Vec<Vec<usize>>>,
}

impl CodeEnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        self.assignment.validate()?;
        self.params.validate()?;
        if self.m < 1 {
            return Err(FblError::Param("m must be >= 1".into()));
        }
        if !self.rates.iter().all(|r| r.is_finite() && *r >= 0.0) {
            return Err(FblError::Param("rates must be finite and >= 0".into()));
        }
        if self.params.beta != 0.0 {
            return Err(FblError::Param("the simulator runs the beta = 0 split only".into()));
        }
        if let Some(d) = self.delta_dec {
            if !(d > 0.0 && d.is_finite()) {
                return Err(FblError::Param("delta_dec must be > 0".into()));
            }
        }
        if !(self.target_typical > 0.0 && self.target_typical < 1.0) {
            return Err(FblError::Param("target_typical must lie in (0, 1)".into()));
        }
        if self.calibration_m == Some(0) {
            return Err(FblError::Param("calibration_m must be >= 1".into()));
        }
        if self.params.l > 64 {
            return Err(FblError::Param("simulated l must be <= 64".into()));
        }
        Ok(())
    }

    pub fn l(&self) -> usize {
        self.params.l as usize
    }

    pub(crate) fn source(&self) -> &crate::info_core::JointPmf {
        match &self.assignment {
            Assignment::Mac(a) => &a.source,
            Assignment::Ic(a) => &a.source,
        }
    }

    pub(crate) fn maps(&self) -> [&[usize]; 2] {
        match &self.assignment {
            Assignment::Mac(a) => [&a.f1, &a.f2],
            Assignment::Ic(a) => [&a.f1, &a.f2],
        }
    }
}

// Keyed hashing for seeds and lazily realized random objects.

pub(crate) fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn key(parts: &[u64]) -> u64 {
    parts.iter().fold(0x243f_6a88_85a3_08d3, |h, &p| mix(h ^ mix(p)))
}

/// Uniform in `[0, 1)` from a hash.
pub(crate) fn unit(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Inverse-CDF draw; never returns a zero-probability symbol.
pub(crate) fn draw(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

/// Base-`n` integer of a sequence, most significant symbol first.
pub(crate) fn seq_key(seq: &[usize], n: usize) -> u64 {
    seq.iter().fold(0u64, |k, &s| k * n as u64 + s as u64)
}

pub(crate) fn key_seq(mut k: u64, n: usize, l: usize) -> Vec<usize> {
    let mut out = vec![0; l];
    for i in (0..l).rev() {
        out[i] = (k % n as u64) as usize;
        k /= n as u64;
    }
    out
}

pub(crate) fn checked_pow(n: usize, l: usize, what: &str) -> Result<u64> {
    (n as u64).checked_pow(l as u32).filter(|&v| v < (1u64 << 62)).ok_or_else(|| FblError::Budget {
        what: what.into(),
        needed: (n as u128).saturating_pow(l as u32),
        budget: 1u128 << 62,
    })
}
