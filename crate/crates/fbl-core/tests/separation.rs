// SPDX-License-Identifier: Apache-2.0
// Full-range separation scans against the recorded minimal pairs.

use fbl_core::dueck::{DueckParams, Mode};
use fbl_core::regions::{check_isolated, dueck_separation_scan, minimal_a_for_k, phi_chain};

// (mode, k*, a_grid, a*), recorded from the first full scan.
const FIXTURES: [(Mode, u32, u64, u64); 2] = [(Mode::Mac, 21, 1 << 20, 890_454), (Mode::Ic, 42, 1 << 20, 993_529)];

#[test]
fn minimal_pairs_match_fixtures() {
    for (mode, k, a_grid, a) in FIXTURES {
        let r = dueck_separation_scan(6, 1 << 20, 64, mode).unwrap();
        let w = r.found.as_ref().expect("a pair in range");
        assert_eq!((w.k, w.a_grid, w.a), (k, a_grid, a), "{mode:?}");
        assert!(w.lemma.holds && w.step1.overall);
        assert!(w.step1.phi.iter().all(|p| p.below_half));
        // Nothing with a smaller k passes anywhere in range.
        assert!(r.rows.iter().filter(|x| x.k < k).all(|x| !x.passes()));
        // a* - 1 fails at k*.
        let below = DueckParams::new(a - 1, k, 6).unwrap();
        assert!(!(fbl_core::regions::lemma_violation(&below, mode).holds
            && fbl_core::regions::dueck_step1(&below, mode).overall));
    }
}

#[test]
fn isolated_scheme_at_the_minimal_pairs() {
    for (mode, k, _, a) in FIXTURES {
        let p = DueckParams::new(a, k, 6).unwrap();
        let r = check_isolated(&p, p.proof_block_length(), 1.0 / k as f64, mode);
        assert!(r.overall, "{r:#?}");
        assert!(r.inequalities.iter().all(|i| i.slack > 0.0));

        let c = phi_chain(&p, mode);
        assert!(c.holds, "{c:#?}");
        let (kf, la) = (k as f64, (a as f64).ln());
        // ln(k^3 / a^(eta k / 2)) recomputed here.
        assert!((c.unit.ln() - (3.0 * kf.ln() - 3.0 * kf * la)).abs() < 1e-12);
        let phi = c.g + c.xi_l + c.tau;
        assert!((c.phi.ln() - phi.ln()).abs() < 1e-12);
        assert!(c.phi.ln() <= (3.0f64).ln() + c.unit.ln() + 1e-12);
    }
}

#[test]
fn stronger_correlation_needs_no_larger_a() {
    for mode in [Mode::Mac, Mode::Ic] {
        for k in [24, 32, 48] {
            let a6 = minimal_a_for_k(6, k, mode, 1 << 20).unwrap();
            let a8 = minimal_a_for_k(8, k, mode, 1 << 20).unwrap();
            if let (Some(a6), Some(a8)) = (a6, a8) {
                assert!(a8 <= a6, "{mode:?} k={k}: {a8} > {a6}");
            } else {
                assert!(a6.is_none() || a8.is_some(), "{mode:?} k={k}");
            }
        }
    }
}
