// SPDX-License-Identifier: Apache-2.0
//! Generalized Dueck sources and the satellite-channel capacity models.
//!
//! Source alphabet is `{0..a-1}^k` for both users, indexed as base-`a`
//! integers with `0` standing for the all-zero word. With `A = a^{eta k}`:
//!
//! | cell                 | probability               |
//! |----------------------|---------------------------|
//! | `(0, 0)`             | `(k-1)/k`                 |
//! | `(c, c)`, `c != 0`   | `(A-1)/(kA(a^k-1))`       |
//! | `(0, d)`, `d != 0`   | `1/(kA(a^k-1))`           |
//! | otherwise            | `0`                       |
//!
//! All closed forms below are evaluated with `ln A = eta k ln a` and never
//! materialize `A`.

use crate::error::{FblError, Result};
use crate::exponents::hb_log;
use crate::info_core::{check_budget, hb, Channel, JointPmf};
use crate::logreal::LogReal;
use serde::{Deserialize, Serialize};

/// Largest `a^k` for which `build_source` materializes the joint.
pub const MATERIALIZE_BUDGET: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DueckParams {
    pub a: u64,
    pub k: u32,
    pub eta: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Mac,
    Ic,
}

impl std::str::FromStr for Mode {
    type Err = FblError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mac" => Ok(Mode::Mac),
            "ic" => Ok(Mode::Ic),
            o => Err(FblError::Param(format!("mode must be mac or ic, got {o}"))),
        }
    }
}

impl DueckParams {
    pub fn new(a: u64, k: u32, eta: u32) -> Result<Self> {
        if a < 2 || k < 2 {
            return Err(FblError::Param(format!("need a >= 2 and k >= 2, got a={a} k={k}")));
        }
        if eta < 6 || eta % 2 != 0 {
            return Err(FblError::Param(format!("eta must be an even integer >= 6, got {eta}")));
        }
        Ok(DueckParams { a, k, eta })
    }

    pub fn ln_a(&self) -> f64 {
        (self.a as f64).ln()
    }

    pub fn kf(&self) -> f64 {
        self.k as f64
    }

    /// `ln A = eta k ln a`.
    pub fn ln_big_a(&self) -> f64 {
        self.eta as f64 * self.kf() * self.ln_a()
    }

    /// `1/A`.
    pub fn inv_big_a(&self) -> LogReal {
        LogReal::from_ln(-self.ln_big_a())
    }

    /// `ln(a^k - 1)`.
    pub fn ln_ak_minus_1(&self) -> f64 {
        let kl = self.kf() * self.ln_a();
        kl + (-(-kl).exp()).ln_1p()
    }

    /// `ln |S_j| = k ln a`.
    pub fn ln_card_s(&self) -> f64 {
        self.kf() * self.ln_a()
    }

    /// `xi = P(S1 != S2) = 1/(kA)`.
    pub fn xi(&self) -> LogReal {
        LogReal::from_ln(-self.kf().ln() - self.ln_big_a())
    }

    /// Least positive value of `p_{S1}`: `(A-1)/(kA(a^k-1))`.
    pub fn p_min_s1(&self) -> LogReal {
        let ln1m = (-self.inv_big_a().to_f64()).ln_1p();
        LogReal::from_ln(ln1m - self.kf().ln() - self.ln_ak_minus_1())
    }

    /// `l = k^4 a^{eta k / 2}`.
    pub fn proof_block_length(&self) -> LogReal {
        LogReal::from_ln(4.0 * self.kf().ln() + 0.5 * self.ln_big_a())
    }

    fn card_s(&self) -> Option<u64> {
        self.a.checked_pow(self.k)
    }
}

/// Materialize `W_{S1 S2}`.
pub fn build_source(p: &DueckParams) -> Result<JointPmf> {
    let n = p.card_s().filter(|&n| n <= MATERIALIZE_BUDGET).ok_or_else(|| {
        FblError::Budget {
            what: "Dueck source".into(),
            needed: (p.a as u128).saturating_pow(p.k),
            budget: MATERIALIZE_BUDGET as u128,
        }
    })? as usize;
    check_budget("Dueck source", (n * n) as u128)?;
    let k = p.kf();
    let big_a = (p.ln_big_a()).exp();
    let m = (n - 1) as f64;
    let diag = (big_a - 1.0) / (k * big_a * m);
    let row0 = 1.0 / (k * big_a * m);
    let mut probs = vec![0.0; n * n];
    probs[0] = (k - 1.0) / k;
    for c in 1..n {
        probs[c * n + c] = diag;
        probs[c] = row0;
    }
    JointPmf::new(&[n, n], probs)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatField {
    pub value: f64,
    /// False when the field is an upper or lower bound rather than the exact value.
    pub exact: bool,
}

impl StatField {
    fn exact(value: f64) -> Self {
        StatField { value, exact: true }
    }
    fn bound(value: f64) -> Self {
        StatField { value, exact: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceStats {
    pub h_s1: StatField,
    pub h_s2: StatField,
    pub h_joint: StatField,
    pub h_s2_given_s1: StatField,
    pub h_s1_given_s2: StatField,
    pub h_s2_given_s1_bound: StatField,
    pub h_s1_given_s2_bound: StatField,
    pub xi: LogReal,
    pub log_a: f64,
}

pub fn source_stats(p: &DueckParams) -> SourceStats {
    let k = p.kf();
    let lam = p.ln_ak_minus_1();
    let inv_a = p.inv_big_a();
    let inv_a_f = inv_a.to_f64();
    let mu = (1.0 - inv_a_f) / k;
    let h_s1 = hb(mu) + mu * lam;
    let h_s2 = hb(1.0 / k) + lam / k;
    let h_joint = hb(1.0 / k) + (hb_log(inv_a) + lam) / k;
    let h_s1_given_s2 = hb_log(inv_a) / k;
    // Given S1 = 0: S2 leaves 0 with probability q, then uniform over a^k-1 words.
    let p0 = (k - 1.0) / k + inv_a_f / k;
    let q = LogReal::from_ln(p.xi().ln() - p0.ln());
    let h_s2_given_s1 = p0 * (hb_log(q) + (q.ln() + lam.ln()).exp());
    let two_xi = LogReal::from_ln(2f64.ln() + p.xi().ln());
    let h_s2_bound = hb_log(two_xi) + (2f64.ln() + inv_a.ln() + p.ln_a().ln()).exp();
    SourceStats {
        h_s1: StatField::exact(h_s1),
        h_s2: StatField::exact(h_s2),
        h_joint: StatField::exact(h_joint),
        h_s2_given_s1: StatField::exact(h_s2_given_s1),
        h_s1_given_s2: StatField::exact(h_s1_given_s2),
        h_s2_given_s1_bound: StatField::bound(h_s2_bound),
        h_s1_given_s2_bound: StatField::bound(h_s1_given_s2),
        xi: p.xi(),
        log_a: p.ln_a(),
    }
}

/// `W_{Y0|U1U2}` with input index `u1 * a + u2`: `y0 = u` when `u1 = u2 = u`, else `0`.
pub fn shared_channel(a: usize) -> Result<Channel> {
    if a < 2 {
        return Err(FblError::Param("shared channel needs a >= 2".into()));
    }
    Ok(Channel::deterministic(a * a, a, |x| {
        let (u1, u2) = (x / a, x % a);
        if u1 == u2 {
            u1
        } else {
            0
        }
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SatelliteModel {
    pub capacity: f64,
    pub log_output_card_bound: f64,
    /// Noiseless `q`-ary stand-in with `ln q <= min(capacity, card bound)`.
    pub concrete: Option<Channel>,
    /// False when `alpha > 1/2` (the formula is then outside its regime)
    /// or when the capacity exceeds the output-cardinality bound.
    pub formula_in_regime: bool,
}

/// `alpha = 8 k^4 / a^{eta k / 3}`.
pub fn satellite_alpha(p: &DueckParams) -> LogReal {
    LogReal::from_ln(8f64.ln() + 4.0 * p.kf().ln() - p.eta as f64 * p.kf() * p.ln_a() / 3.0)
}

/// `h_b` extended by its maximum beyond `1/2`, so the capacity formula stays
/// monotone in `alpha` outside its regime.
fn hb_envelope(x: LogReal) -> f64 {
    if x.ln() >= 0.5f64.ln() {
        2f64.ln()
    } else {
        hb_log(x)
    }
}

/// `C_M = alpha ln a + 2 h_b(alpha) + ln a / (4k)`.
pub fn c_mac_common(p: &DueckParams) -> f64 {
    let al = satellite_alpha(p);
    (al.ln() + p.ln_a().ln()).exp() + 2.0 * hb_envelope(al) + p.ln_a() / (4.0 * p.kf())
}

/// `C_I = h_b(2/k) + (2/k) ln a`.
pub fn c_ic_common(p: &DueckParams) -> f64 {
    hb(2.0 / p.kf()) + 2.0 * p.ln_a() / p.kf()
}

/// `h_b(2/(kA))`.
pub fn hb_two_xi(p: &DueckParams) -> f64 {
    hb_log(LogReal::from_ln(2f64.ln() + p.xi().ln()))
}

pub fn satellite_capacities(p: &DueckParams, mode: Mode) -> (f64, f64) {
    let k = p.kf();
    match mode {
        Mode::Mac => {
            let cm = c_mac_common(p);
            (cm + hb(2.0 / k) + p.ln_a() / k, cm + hb_two_xi(p))
        }
        Mode::Ic => {
            let ci = c_ic_common(p);
            (ci, ci + hb_two_xi(p))
        }
    }
}

/// `ln |Y_j|` bound: `(3/(2k)) ln a` (MAC) or `(5/(2k)) ln a` (IC).
pub fn satellite_log_card_bound(p: &DueckParams, mode: Mode) -> f64 {
    let c = match mode {
        Mode::Mac => 1.5,
        Mode::Ic => 2.5,
    };
    c * p.ln_a() / p.kf()
}

/// Satellite models; `concrete` asks for the noiseless stand-in channels
/// (only built when the alphabet has at most 4096 symbols).
pub fn satellite_models(
    p: &DueckParams,
    mode: Mode,
    concrete: bool,
) -> (SatelliteModel, SatelliteModel) {
    let (c1, c2) = satellite_capacities(p, mode);
    let bound = satellite_log_card_bound(p, mode);
    let alpha_ok = match mode {
        Mode::Mac => satellite_alpha(p).ln() <= 0.5f64.ln(),
        Mode::Ic => true,
    };
    let make = |c: f64| {
        let ln_q = c.min(bound);
        let q = (ln_q.exp() + 1e-9).floor().max(1.0);
        let ch = if concrete && q <= 4096.0 { Some(Channel::noiseless(q as usize)) } else { None };
        SatelliteModel {
            capacity: c,
            log_output_card_bound: bound,
            concrete: ch,
            formula_in_regime: alpha_ok && c <= bound,
        }
    };
    (make(c1), make(c2))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DueckReport {
    pub params: DueckParams,
    pub mode: Mode,
    pub stats: SourceStats,
    pub satellite_1: SatelliteModel,
    pub satellite_2: SatelliteModel,
}

pub fn dueck_report(p: &DueckParams, mode: Mode) -> DueckReport {
    let (s1, s2) = satellite_models(p, mode, false);
    DueckReport { params: *p, mode, stats: source_stats(p), satellite_1: s1, satellite_2: s2 }
}
