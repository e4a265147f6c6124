// SPDX-License-Identifier: Apache-2.0
// Closed-form source statistics against sums over the materialized source.

use fbl_core::dueck::{build_source, source_stats, DueckParams};

fn h(v: impl Iterator<Item = f64>) -> f64 {
    v.filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum()
}

#[test]
fn closed_forms_match_enumeration() {
    for (a, k, eta) in [(2, 2, 6), (3, 2, 6), (2, 3, 6), (2, 2, 8)] {
        let p = DueckParams::new(a, k, eta).unwrap();
        let j = build_source(&p).unwrap();
        let n = j.sizes()[0];
        let cell = |s1: usize, s2: usize| j.probs()[s1 * n + s2];
        let h12 = h(j.probs().iter().copied());
        let h1 = h((0..n).map(|s1| (0..n).map(|s2| cell(s1, s2)).sum()));
        let h2 = h((0..n).map(|s2| (0..n).map(|s1| cell(s1, s2)).sum()));
        let xi: f64 = (0..n).flat_map(|s1| (0..n).map(move |s2| (s1, s2))).filter(|(x, y)| x != y).map(|(x, y)| cell(x, y)).sum();
        let s = source_stats(&p);
        let tag = format!("({a},{k},{eta})");
        assert!((s.h_s1.value - h1).abs() < 1e-9, "{tag} H(S1)");
        assert!((s.h_s2.value - h2).abs() < 1e-9, "{tag} H(S2)");
        assert!((s.h_joint.value - h12).abs() < 1e-9, "{tag} H(S1,S2)");
        assert!((s.h_s2_given_s1.value - (h12 - h1)).abs() < 1e-9, "{tag} H(S2|S1)");
        assert!((s.h_s1_given_s2.value - (h12 - h2)).abs() < 1e-9, "{tag} H(S1|S2)");
        assert!((s.xi.to_f64() - xi).abs() < 1e-9, "{tag} xi");
        assert!((s.log_a - (a as f64).ln()).abs() < 1e-15);
        assert!(s.h_s2_given_s1_bound.value >= h12 - h1 - 1e-12);
        assert!(s.h_s1_given_s2_bound.value >= h12 - h2 - 1e-12);
    }
}
