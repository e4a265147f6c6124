// SPDX-License-Identifier: Apache-2.0
//! Step-1, Step-2 and CHK checkers for user-supplied assignments.

use super::assign::{conditional_channel, IcAssignment, MacAssignment, SchemeParams, SourceTerms};
use super::{ConditionReport, Inequality, PhiEntry};
use crate::error::{FblError, Result};
use crate::exponents::{block_disagreement, cc_error_bound, excess_rate_log, l_star, tau_bound};
use crate::info_core::{is_integer_type, Channel, JointPmf, Pmf};
use crate::logreal::LogReal;

/// Numbers the MAC conditions are assembled from. Shared with the Dueck
/// closed-form path.
#[derive(Clone, Debug)]
pub(crate) struct MacNumbers {
    pub h_ka: f64,
    pub h_sj_given_other: [f64; 2],
    pub h_s_given_ka: f64,
    pub ln_card_s: [f64; 2],
    pub ln_card_v: [f64; 2],
    /// `I(V_j; Y | V_jbar)` (Step 1) or with `U` added (Step 2).
    pub i_v: [f64; 2],
    pub i_sum: f64,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub l: LogReal,
    pub phi: PhiEntry,
    /// Analytic `ln((alpha+beta) - (1+delta)H(K_a))`, when known.
    pub first_ln_slack: Option<f64>,
}

pub(crate) fn assemble_mac(theorem: &str, n: &MacNumbers) -> ConditionReport {
    let mut r = ConditionReport::new(theorem);
    let phi = n.phi.phi.min(LogReal::ONE);
    let ll = |ln_card: f64| excess_rate_log(phi, ln_card, n.l);
    let l1 = |ln_card: f64| excess_rate_log(phi, ln_card, LogReal::ONE);
    let lhs0 = (1.0 + n.delta) * n.h_ka;
    let rhs0 = n.alpha + n.beta;
    r.push(match n.first_ln_slack {
        Some(ls) => Inequality::with_ln_slack("common_rate", lhs0, rhs0, true, ls),
        None => Inequality::new("common_rate", lhs0, rhs0, true),
    });
    for j in 0..2 {
        r.push(Inequality::new(
            &format!("individual_{}", j + 1),
            n.h_sj_given_other[j] + ll(n.ln_card_s[j]),
            n.i_v[j] - l1(n.ln_card_v[j]),
            true,
        ));
    }
    r.push(Inequality::new(
        "sum",
        n.beta + n.h_s_given_ka + ll(n.ln_card_s[0] + n.ln_card_s[1]),
        n.i_sum - l1(n.ln_card_v[0] + n.ln_card_v[1]),
        true,
    ));
    r.phi.push(n.phi.clone());
    r.q("h_k_a", n.h_ka);
    r.q("h_s1_given_s2_k_a", n.h_sj_given_other[0]);
    r.q("h_s2_given_s1_k_a", n.h_sj_given_other[1]);
    r.q("h_s_given_k_a", n.h_s_given_ka);
    r.q("i_v1", n.i_v[0]);
    r.q("i_v2", n.i_v[1]);
    r.q("i_v_sum", n.i_sum);
    r.q("ln_l", n.l.ln());
    r
}

#[derive(Clone, Debug)]
pub(crate) struct IcNumbers {
    pub h_ka: f64,
    pub h_sj_given_ka: [f64; 2],
    pub ln_card_s: [f64; 2],
    pub ln_card_v: [f64; 2],
    /// `I(V_j; Y_j)` (Step 1) or `I(V_j; Y_j | U)` (Step 2).
    pub i_v: [f64; 2],
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub l: LogReal,
    pub phi: [PhiEntry; 2],
    pub first_ln_slack: Option<f64>,
}

fn ic_common_rate(r: &mut ConditionReport, h_ka: f64, alpha: f64, beta: f64, delta: f64, ls: Option<f64>) {
    let lhs0 = (1.0 + delta) * h_ka;
    r.push(match ls {
        Some(ls) => Inequality::with_ln_slack("common_rate", lhs0, alpha + beta, false, ls),
        None => Inequality::new("common_rate", lhs0, alpha + beta, false),
    });
}

pub(crate) fn assemble_ic(theorem: &str, n: &IcNumbers) -> ConditionReport {
    let mut r = ConditionReport::new(theorem);
    ic_common_rate(&mut r, n.h_ka, n.alpha, n.beta, n.delta, n.first_ln_slack);
    for j in 0..2 {
        let phi = n.phi[j].phi.min(LogReal::ONE);
        r.push(Inequality::new(
            &format!("receiver_{}", j + 1),
            n.h_sj_given_ka[j] + n.beta + excess_rate_log(phi, n.ln_card_s[j], n.l),
            n.i_v[j] - excess_rate_log(phi, n.ln_card_v[j], LogReal::ONE),
            true,
        ));
        r.phi.push(n.phi[j].clone());
    }
    r.q("h_k_a", n.h_ka);
    r.q("h_s1_given_k_a", n.h_sj_given_ka[0]);
    r.q("h_s2_given_k_a", n.h_sj_given_ka[1]);
    r.q("i_v1", n.i_v[0]);
    r.q("i_v2", n.i_v[1]);
    r.q("ln_l", n.l.ln());
    r
}

/// `l >= l*` and the integer-type requirement, as hard errors.
fn preconditions(s: &SchemeParams, p_u: &Pmf, card_y: &[usize]) -> Result<()> {
    s.validate()?;
    for &ny in card_y {
        let ls = l_star(s.rho, p_u.len() as f64, ny as f64)?;
        if (s.l as u128) < ls {
            return Err(FblError::BelowLStar { l: s.l.to_string(), l_star: ls.to_string() });
        }
    }
    if !is_integer_type(p_u, s.l) {
        return Err(FblError::NotAType(s.l.to_string()));
    }
    Ok(())
}

fn phi_entry(
    name: &str,
    s: &SchemeParams,
    st: &SourceTerms,
    p_u: &Pmf,
    w_yu: &Channel,
    warnings: &mut Vec<String>,
) -> Result<PhiEntry> {
    let l = LogReal::from(s.l);
    let (g, converged) = cc_error_bound(s.alpha + s.rho, l, p_u, w_yu)?;
    if !converged {
        warnings.push(format!("{name}: exponent solver hit its iteration cap"));
    }
    let xi_l = block_disagreement(LogReal::new(st.xi_k.clamp(0.0, 1.0)), l);
    let tau = tau_bound(l, s.delta, &st.p_ka)?;
    Ok(PhiEntry::new(name, g, xi_l, tau))
}

fn mac_check(m: &MacAssignment, s: &SchemeParams, step2: bool) -> Result<ConditionReport> {
    m.validate()?;
    let ny = m.channel.n_out();
    preconditions(s, &m.p_u, &[ny])?;
    let st = m.source_terms(s.side())?;
    let j = m.decoding_joint()?;
    // Factors: U=0, V1=1, V2=2, X1=3, X2=4, Y=5.
    let (u, v1, v2, y) = (0usize, 1usize, 2usize, 5usize);
    let (i_v, i_sum) = if step2 {
        (
            [j.mutual_information(&[v1], &[y], &[u, v2])?, j.mutual_information(&[v2], &[y], &[u, v1])?],
            j.mutual_information(&[v1, v2], &[y], &[u])?,
        )
    } else {
        (
            [j.mutual_information(&[v1], &[y], &[v2])?, j.mutual_information(&[v2], &[y], &[v1])?],
            j.mutual_information(&[v1, v2], &[y], &[])?,
        )
    };
    let w_yu = conditional_channel(&j, u, y)?;
    let mut warnings = Vec::new();
    let phi = phi_entry("phi", s, &st, &m.p_u, &w_yu, &mut warnings)?;
    let n = MacNumbers {
        h_ka: st.h_ka,
        h_sj_given_other: st.h_sj_given_other,
        h_s_given_ka: st.h_s_given_ka,
        ln_card_s: st.ln_card_s,
        ln_card_v: [(m.p_v1.len() as f64).ln(), (m.p_v2.len() as f64).ln()],
        i_v,
        i_sum,
        alpha: s.alpha,
        beta: s.beta,
        delta: s.delta,
        l: LogReal::from(s.l),
        phi,
        first_ln_slack: None,
    };
    let mut r = assemble_mac(if step2 { "mac-step2" } else { "mac-step1" }, &n);
    r.q("xi_k", st.xi_k);
    r.warnings = warnings;
    Ok(r.finish())
}

/// MAC Step 1 (separate decoding of the two streams).
pub fn check_mac_step1(m: &MacAssignment, s: &SchemeParams) -> Result<ConditionReport> {
    mac_check(m, s, false)
}

/// MAC Step 2: the outer stream is decoded conditionally on the inner codeword.
pub fn check_mac_step2(m: &MacAssignment, s: &SchemeParams) -> Result<ConditionReport> {
    mac_check(m, s, true)
}

/// Per-receiver `phi_j` from a joint whose factors include `U` and `Y_j`.
fn ic_phis(
    s: &SchemeParams,
    st: &SourceTerms,
    p_u: &Pmf,
    joint: &JointPmf,
    u: usize,
    y: [usize; 2],
    warnings: &mut Vec<String>,
) -> Result<[PhiEntry; 2]> {
    let w1 = conditional_channel(joint, u, y[0])?;
    let w2 = conditional_channel(joint, u, y[1])?;
    Ok([
        phi_entry("phi_1", s, st, p_u, &w1, warnings)?,
        phi_entry("phi_2", s, st, p_u, &w2, warnings)?,
    ])
}

fn ic_check(ic: &IcAssignment, s: &SchemeParams, step2: bool) -> Result<ConditionReport> {
    ic.validate()?;
    preconditions(s, &ic.p_u, &[ic.channel.y1_size, ic.channel.y2_size])?;
    let st = ic.source_terms(s.side())?;
    let j = ic.decoding_joint()?;
    // Factors: U=0, V1=1, V2=2, X1=3, X2=4, Y1=5, Y2=6.
    let given: &[usize] = if step2 { &[0] } else { &[] };
    let i_v = [j.mutual_information(&[1], &[5], given)?, j.mutual_information(&[2], &[6], given)?];
    let mut warnings = Vec::new();
    let phi = ic_phis(s, &st, &ic.p_u, &j, 0, [5, 6], &mut warnings)?;
    let n = IcNumbers {
        h_ka: st.h_ka,
        h_sj_given_ka: st.h_sj_given_ka,
        ln_card_s: st.ln_card_s,
        ln_card_v: [(ic.p_v1.len() as f64).ln(), (ic.p_v2.len() as f64).ln()],
        i_v,
        alpha: s.alpha,
        beta: s.beta,
        delta: s.delta,
        l: LogReal::from(s.l),
        phi,
        first_ln_slack: None,
    };
    let mut r = assemble_ic(if step2 { "ic-step2" } else { "ic-step1" }, &n);
    r.q("xi_k", st.xi_k);
    r.warnings = warnings;
    Ok(r.finish())
}

pub fn check_ic_step1(ic: &IcAssignment, s: &SchemeParams) -> Result<ConditionReport> {
    ic_check(ic, s, false)
}

/// IC Step 2: receivers decode the outer code conditionally on `U`.
pub fn check_ic_step2(ic: &IcAssignment, s: &SchemeParams) -> Result<ConditionReport> {
    ic_check(ic, s, true)
}

/// The seven CHK terms of receiver `j`, each with its `L(phi_j, .)` correction.
fn chk_terms(joint: &JointPmf, j: usize, phi: LogReal) -> Result<[f64; 7]> {
    // Factors: U=0, V1=1, W1=2, V2=3, W2=4, X1=5, X2=6, Y1=7, Y2=8.
    let sizes = joint.sizes();
    let (v, w, wb, y) = if j == 0 { (1, 2, 4, 7) } else { (3, 4, 2, 8) };
    let lc = |cards: &[usize]| {
        let ln: f64 = cards.iter().map(|&f| (sizes[f] as f64).ln()).sum();
        excess_rate_log(phi, ln, LogReal::ONE)
    };
    let mi = |a: &[usize], g: &[usize]| joint.mutual_information(&[y], a, g);
    Ok([
        mi(&[v], &[0, w, wb])? - lc(&[v]),
        mi(&[w], &[0, v, wb])? - lc(&[w]),
        mi(&[wb], &[0, v, w])? - lc(&[wb]),
        mi(&[v, w], &[0, wb])? - lc(&[v, w]),
        mi(&[v, wb], &[0, w])? - lc(&[v, wb]),
        mi(&[w, wb], &[0, v])? - lc(&[w, wb]),
        mi(&[v, w, wb], &[0])? - lc(&[v, w, wb]),
    ])
}

fn chk_report(rates: [f64; 2], joint: &JointPmf, phi: [LogReal; 2]) -> Result<ConditionReport> {
    let t = [chk_terms(joint, 0, phi[0])?, chk_terms(joint, 1, phi[1])?];
    let (a, d, e, f, g) = (
        [t[0][0], t[1][0]],
        [t[0][3], t[1][3]],
        [t[0][4], t[1][4]],
        [t[0][5], t[1][5]],
        [t[0][6], t[1][6]],
    );
    let mut r = ConditionReport::new("chk-region");
    let sum = rates[0] + rates[1];
    for j in 0..2 {
        let jb = 1 - j;
        let (n, nb) = (j + 1, jb + 1);
        let rj = rates[j];
        r.push(Inequality::new(&format!("r{n} <= d{n}"), rj, d[j], false));
        r.push(Inequality::new(&format!("r{n} <= a{n} + e{nb}"), rj, a[j] + e[jb], false));
        r.push(Inequality::new(&format!("r{n} <= a{n} + f{nb}"), rj, a[j] + f[jb], false));
        r.push(Inequality::new(&format!("r1 + r2 <= a{n} + g{nb}"), sum, a[j] + g[jb], false));
        r.push(Inequality::new(
            &format!("2r{n} + r{nb} <= a{n} + g{n} + e{nb}"),
            2.0 * rj + rates[jb],
            a[j] + g[j] + e[jb],
            false,
        ));
        r.push(Inequality::new(
            &format!("2r{n} + r{nb} <= 2a{n} + f{nb} + e{nb}"),
            2.0 * rj + rates[jb],
            2.0 * a[j] + f[jb] + e[jb],
            false,
        ));
        r.push(Inequality::new(&format!("r{n} >= 0"), -rj, 0.0, false));
    }
    r.push(Inequality::new("r1 + r2 <= e1 + e2", sum, e[0] + e[1], false));
    for (j, row) in t.iter().enumerate() {
        for (name, v) in ["a", "b", "c", "d", "e", "f", "g"].iter().zip(row) {
            r.q(&format!("{name}{}", j + 1), *v);
        }
    }
    r.q("r1", rates[0]);
    r.q("r2", rates[1]);
    Ok(r)
}

/// Whether `(r1, r2)` lies in the CHK region of the assignment's `chk` test
/// channel, with receiver `j`'s terms penalized by `L(phi_j, .)`.
pub fn chk_region_contains(
    r1: f64,
    r2: f64,
    ic: &IcAssignment,
    phi: [LogReal; 2],
) -> Result<(bool, ConditionReport)> {
    let joint = ic.chk_joint()?;
    let r = chk_report([r1, r2], &joint, phi)?.finish();
    Ok((r.overall, r))
}

/// Source rates `H(S_j|K_a) + beta + L_l(phi_j, |S_j|)` tested against the
/// CHK region.
pub fn check_ic_chk(ic: &IcAssignment, s: &SchemeParams) -> Result<ConditionReport> {
    ic.validate()?;
    preconditions(s, &ic.p_u, &[ic.channel.y1_size, ic.channel.y2_size])?;
    let st = ic.source_terms(s.side())?;
    let joint = ic.chk_joint()?;
    let mut warnings = Vec::new();
    let phi = ic_phis(s, &st, &ic.p_u, &joint, 0, [7, 8], &mut warnings)?;
    let l = LogReal::from(s.l);
    let capped = [phi[0].phi.min(LogReal::ONE), phi[1].phi.min(LogReal::ONE)];
    let rates = [0, 1].map(|j| st.h_sj_given_ka[j] + s.beta + excess_rate_log(capped[j], st.ln_card_s[j], l));
    let mut r = chk_report(rates, &joint, capped)?;
    r.theorem = "ic-chk".into();
    let mut first = ConditionReport::new("");
    ic_common_rate(&mut first, st.h_ka, s.alpha, s.beta, s.delta, None);
    r.inequalities.insert(0, first.inequalities.remove(0));
    r.phi = phi.to_vec();
    r.q("h_k_a", st.h_ka);
    r.warnings = warnings;
    Ok(r.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions::{ChkPart, IcChannel};
    use proptest::prelude::*;

    /// GKW source `S1 = S2` uniform binary, K = S.
    fn gkw_source() -> JointPmf {
        JointPmf::from_fn(&[2, 2], |s| if s[0] == s[1] { 0.5 } else { 0.0 }).unwrap()
    }

    /// Noiseless common `U` channel plus noiseless private bits: X_j = (u, v_j),
    /// Y = (x1, x2) with 4 x 4 = 16 outputs.
    fn mac_assignment() -> MacAssignment {
        let mapper = Channel::deterministic(4, 4, |i| i);
        MacAssignment {
            source: gkw_source(),
            f1: vec![0, 1],
            f2: vec![0, 1],
            p_u: Pmf::uniform(2),
            p_v1: Pmf::uniform(2),
            p_v2: Pmf::uniform(2),
            x1_mapper: mapper.clone(),
            x2_mapper: mapper,
            channel: Channel::noiseless(16),
        }
    }

    fn params(l: u64) -> SchemeParams {
        SchemeParams { alpha: 0.3, beta: 0.5, rho: 0.1, delta: 0.1, l, side_a: 1 }
    }

    #[test]
    fn gkw_source_on_noiseless_channel_passes() {
        let m = mac_assignment();
        let s = params(20_000);
        let r = check_mac_step1(&m, &s).unwrap();
        assert!(r.overall, "{r:#?}");
        // xi(K) = 0 so phi is g + tau only.
        assert!(r.phi[0].xi_l.is_zero());
    }

    #[test]
    fn below_l_star_is_an_error() {
        let m = mac_assignment();
        assert!(matches!(check_mac_step1(&m, &params(10)), Err(FblError::BelowLStar { .. })));
    }

    #[test]
    fn non_type_is_an_error() {
        let m = MacAssignment { p_u: Pmf::new(vec![0.3, 0.7]).unwrap(), ..mac_assignment() };
        assert!(matches!(check_mac_step1(&m, &params(20_001)), Err(FblError::NotAType(_))));
    }

    #[test]
    fn useless_channel_fails_sum() {
        let m = MacAssignment {
            channel: Channel::from_fn(16, 1, |_, _| 1.0).unwrap(),
            ..mac_assignment()
        };
        // |Y| = 1 keeps l* small.
        let r = check_mac_step1(&m, &params(20_000)).unwrap();
        assert!(!r.inequality("sum").unwrap().satisfied);
        assert!(!r.overall);
    }

    #[test]
    fn step2_with_singleton_u_matches_step1() {
        let mapper = Channel::deterministic(2, 2, |i| i);
        let m = MacAssignment {
            p_u: Pmf::uniform(1),
            x1_mapper: mapper.clone(),
            x2_mapper: mapper,
            channel: Channel::noiseless(4),
            ..mac_assignment()
        };
        let s = SchemeParams { l: 5000, ..params(0) };
        let a = check_mac_step1(&m, &s).unwrap();
        let b = check_mac_step2(&m, &s).unwrap();
        for (x, y) in a.inequalities.iter().zip(&b.inequalities) {
            assert!((x.lhs - y.lhs).abs() < 1e-12 && (x.rhs - y.rhs).abs() < 1e-12);
        }
    }

    fn ic_assignment(with_chk: bool) -> IcAssignment {
        let mapper = Channel::deterministic(4, 4, |i| i);
        let chk = with_chk.then(|| ChkPart {
            p_w1: Pmf::uniform(1),
            p_w2: Pmf::uniform(1),
            x1_mapper: mapper.clone(),
            x2_mapper: mapper.clone(),
        });
        IcAssignment {
            source: gkw_source(),
            f1: vec![0, 1],
            f2: vec![0, 1],
            p_u: Pmf::uniform(2),
            p_v1: Pmf::uniform(2),
            p_v2: Pmf::uniform(2),
            x1_mapper: mapper.clone(),
            x2_mapper: mapper,
            channel: IcChannel::orthogonal(&Channel::noiseless(4), &Channel::noiseless(4)),
            chk,
        }
    }

    #[test]
    fn symmetric_orthogonal_ic_passes() {
        let ic = ic_assignment(false);
        let s = params(20_000);
        let r = check_ic_step1(&ic, &s).unwrap();
        assert!(r.overall, "{r:#?}");
        assert_eq!(r.phi.len(), 2);
    }

    #[test]
    fn ic_step2_singleton_u_equals_step1() {
        let mapper = Channel::deterministic(2, 2, |i| i);
        let ic = IcAssignment {
            p_u: Pmf::uniform(1),
            x1_mapper: mapper.clone(),
            x2_mapper: mapper,
            channel: IcChannel::orthogonal(&Channel::noiseless(2), &Channel::noiseless(2)),
            ..ic_assignment(false)
        };
        let s = SchemeParams { l: 5000, ..params(0) };
        let a = check_ic_step1(&ic, &s).unwrap();
        let b = check_ic_step2(&ic, &s).unwrap();
        assert_eq!(a.inequalities.len(), b.inequalities.len());
        for (x, y) in a.inequalities.iter().zip(&b.inequalities) {
            assert!((x.lhs - y.lhs).abs() < 1e-12 && (x.rhs - y.rhs).abs() < 1e-12);
            assert_eq!(x.satisfied, y.satisfied);
        }
        assert_eq!(a.phi, b.phi);
    }

    #[test]
    fn ic_step2_dominates_step1_when_v_independent_of_u() {
        let ic = ic_assignment(false);
        let s = params(20_000);
        let a = check_ic_step1(&ic, &s).unwrap();
        let b = check_ic_step2(&ic, &s).unwrap();
        for (x, y) in a.inequalities.iter().zip(&b.inequalities) {
            assert!(y.slack >= x.slack - 1e-12);
        }
    }

    #[test]
    fn chk_origin_is_member() {
        let ic = ic_assignment(true);
        let (ok, r) = chk_region_contains(0.0, 0.0, &ic, [LogReal::ZERO; 2]).unwrap();
        assert!(ok, "{r:#?}");
    }

    #[test]
    fn chk_degenerate_reduces_to_individual_mi() {
        let ic = ic_assignment(true);
        // X_j = (u, v_j) on a noiseless link: I(V_j; Y_j | U) = ln 2.
        let c = 2f64.ln();
        let zero = [LogReal::ZERO; 2];
        assert!(chk_region_contains(c, c, &ic, zero).unwrap().0);
        assert!(!chk_region_contains(c + 1e-6, 0.0, &ic, zero).unwrap().0);
        assert!(!chk_region_contains(0.0, c + 1e-6, &ic, zero).unwrap().0);
    }

    #[test]
    fn chk_missing_w_is_an_error() {
        let ic = ic_assignment(false);
        assert!(chk_region_contains(0.0, 0.0, &ic, [LogReal::ZERO; 2]).is_err());
    }

    #[test]
    fn ic_chk_lifts_source_rates() {
        let ic = ic_assignment(true);
        let s = params(20_000);
        let r = check_ic_chk(&ic, &s).unwrap();
        assert!(r.overall, "{r:#?}");
        let s_big = SchemeParams { beta: 1.0, ..s };
        assert!(!check_ic_chk(&ic, &s_big).unwrap().overall);
    }

    #[test]
    fn report_round_trips_through_json() {
        let m = mac_assignment();
        let s = params(20_000);
        let cfg = serde_json::to_string(&(&m, &s)).unwrap();
        let (m2, s2): (MacAssignment, SchemeParams) = serde_json::from_str(&cfg).unwrap();
        let a = serde_json::to_string(&check_mac_step1(&m, &s).unwrap()).unwrap();
        let b = serde_json::to_string(&check_mac_step1(&m2, &s2).unwrap()).unwrap();
        assert_eq!(a, b);
        let back: ConditionReport = serde_json::from_str(&a).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), a);
    }

    fn close(x: f64, y: f64) -> bool {
        (x - y).abs() <= 1e-9 * x.abs().max(1.0)
    }

    fn perm(n: usize, seed: u64) -> Vec<usize> {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut v: Vec<usize> = (0..n).collect();
        v.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        v
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn chk_membership_monotone(r1 in 0.0f64..1.0, r2 in 0.0f64..1.0, shrink in 0.0f64..1.0, lp in -20.0f64..-0.7) {
            let ic = ic_assignment(true);
            let p = [LogReal::from_ln(lp); 2];
            let (inside, _) = chk_region_contains(r1, r2, &ic, p).unwrap();
            if inside {
                prop_assert!(chk_region_contains(r1 * shrink, r2, &ic, p).unwrap().0);
                prop_assert!(chk_region_contains(r1, r2 * shrink, &ic, p).unwrap().0);
            }
            let bigger = [LogReal::from_ln((lp + 0.5).min(0.5f64.ln())); 2];
            if chk_region_contains(r1, r2, &ic, bigger).unwrap().0 {
                prop_assert!(inside);
            }
        }

        #[test]
        fn output_relabeling_leaves_reports_unchanged(seed in 0u64..1000, noise in 0.0f64..0.2) {
            let noisy = Channel::from_fn(16, 16, |x, y| if x == y { 1.0 - noise } else { noise / 15.0 }).unwrap();
            let m = MacAssignment { channel: noisy, ..mac_assignment() };
            let s = params(20_000);
            let a = check_mac_step1(&m, &s).unwrap();
            let b = check_mac_step1(&m.permute_outputs(&perm(16, seed)), &s).unwrap();
            for (x, y) in a.inequalities.iter().zip(&b.inequalities) {
                prop_assert!(close(x.lhs, y.lhs) && close(x.rhs, y.rhs), "{x:?} {y:?}");
            }
            let ic = IcAssignment {
                channel: IcChannel::orthogonal(
                    &Channel::from_fn(4, 4, |x, y| if x == y { 1.0 - noise } else { noise / 3.0 }).unwrap(),
                    &Channel::noiseless(4),
                ),
                ..ic_assignment(false)
            };
            let a = check_ic_step2(&ic, &s).unwrap();
            let b = check_ic_step2(&ic.permute_outputs(&perm(4, seed), &perm(4, seed + 1)), &s).unwrap();
            for (x, y) in a.inequalities.iter().zip(&b.inequalities) {
                prop_assert!(close(x.lhs, y.lhs) && close(x.rhs, y.rhs), "{x:?} {y:?}");
            }
        }
    }
}
