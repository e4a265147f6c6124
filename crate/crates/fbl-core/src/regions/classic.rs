// SPDX-License-Identifier: Apache-2.0
//! The classical separation-free conditions: common-part coding over the MAC
//! and its no-common-part counterpart over the IC.

use super::assign::{CesAssignment, LcAssignment};
use super::{ConditionReport, Inequality};
use crate::error::Result;
use crate::info_core::gkw_decomposition;

/// MAC conditions with `K` the common part of the source:
/// `H(S_j|S_jbar) < I(X_j;Y|X_jbar,S_jbar,U)`, `H(S|K) < I(X;Y|K,U)` and
/// `H(S) < I(X;Y)`.
pub fn check_ces(c: &CesAssignment) -> Result<ConditionReport> {
    let joint = c.joint()?;
    let gkw = gkw_decomposition(&c.source)?;
    // Factors: S1=0, S2=1, U=2, X1=3, X2=4, Y=5, K=6.
    let j = joint.extend(gkw.k_size, |s, k| if gkw.f1[s[0]] == k { 1.0 } else { 0.0 })?;
    let mut r = ConditionReport::new("ces");
    r.push(Inequality::new(
        "individual_1",
        j.conditional_entropy(&[0], &[1])?,
        j.mutual_information(&[3], &[5], &[4, 1, 2])?,
        true,
    ));
    r.push(Inequality::new(
        "individual_2",
        j.conditional_entropy(&[1], &[0])?,
        j.mutual_information(&[4], &[5], &[3, 0, 2])?,
        true,
    ));
    r.push(Inequality::new(
        "sum_given_k",
        j.conditional_entropy(&[0, 1], &[6])?,
        j.mutual_information(&[3, 4], &[5], &[6, 2])?,
        true,
    ));
    r.push(Inequality::new(
        "sum",
        j.entropy_of(&[0, 1])?,
        j.mutual_information(&[3, 4], &[5], &[])?,
        true,
    ));
    r.q("h_k", j.entropy_of(&[6])?);
    r.q("k_size", gkw.k_size as f64);
    Ok(r.finish())
}

/// IC conditions for sources without a common part. The four families are
/// evaluated for both orderings of the receivers.
pub fn check_lc(c: &LcAssignment) -> Result<ConditionReport> {
    let j = c.joint()?;
    let gkw = gkw_decomposition(&c.source)?;
    let mut r = ConditionReport::new("lc");
    if gkw.k_size - gkw.reserved.map_or(0, |_| 1) > 1 {
        r.warnings.push("source has a nontrivial common part; these conditions assume none".into());
    }
    // Factors: S1=0, S2=1, Q=2, W1=3, W2=4, X1=5, X2=6, Y1=7, Y2=8.
    let (s, w, x, y) = ([0, 1], [3, 4], [5, 6], [7, 8]);
    let h = [j.entropy_of(&[0])?, j.entropy_of(&[1])?];
    let q = 2;
    let mut fam2 = Vec::new();
    for a in 0..2 {
        let b = 1 - a;
        let n = a + 1;
        r.push(Inequality::new(
            &format!("f1_{n}"),
            h[a],
            j.mutual_information(&[s[a], x[a]], &[y[a]], &[q, w[b]])?,
            true,
        ));
        fam2.push(
            j.mutual_information(&[s[a], x[a]], &[y[a]], &[q, w[0], w[1]])?
                + j.mutual_information(&[w[a], s[b], x[b]], &[y[b]], &[q])?,
        );
    }
    for (a, rhs) in fam2.into_iter().enumerate() {
        r.push(Inequality::new(&format!("f2_{}", a + 1), h[0] + h[1], rhs, true));
    }
    let mut f3 = 0.0;
    for a in 0..2 {
        let b = 1 - a;
        f3 += j.mutual_information(&[s[a], w[b], x[a]], &[y[a]], &[q, w[a]])?;
    }
    r.push(Inequality::new("f3", h[0] + h[1], f3, true));
    for a in 0..2 {
        let b = 1 - a;
        let rhs = j.mutual_information(&[s[a], x[a]], &[y[a]], &[q, w[0], w[1]])?
            + j.mutual_information(&[s[a], w[b], x[a]], &[y[a]], &[q])?
            + j.mutual_information(&[s[b], w[a], x[b]], &[y[b]], &[q, w[b]])?;
        r.push(Inequality::new(&format!("f4_{}", a + 1), 2.0 * h[a] + h[b], rhs, true));
    }
    r.q("h_s1", h[0]);
    r.q("h_s2", h[1]);
    Ok(r.finish())
}
