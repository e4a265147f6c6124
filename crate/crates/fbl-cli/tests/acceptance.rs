// SPDX-License-Identifier: Apache-2.0
// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

use fbl_core::dueck::{build_source, source_stats, DueckParams, Mode};
use fbl_core::exponents::{error_exponent, error_exponent_primal};
use fbl_core::info_core::{mutual_information_pw, Channel, Pmf};
use fbl_core::regions::{check_isolated, dueck_separation_scan, phi_chain};
use fbl_core::sim::{
    estimate_error, inner_code_experiment, toys, verify_lemmas, verify_row_iid, LemmaGroup, RateCi,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::process::Command;
use std::time::Instant;

type Outcome = (bool, String);

// Minimal separation pairs at eta = 6, recorded from the first full scan.
const PAIRS: [(Mode, u32, u64); 2] = [(Mode::Mac, 21, 890_454), (Mode::Ic, 42, 993_529)];

fn entropy(v: impl Iterator<Item = f64>) -> f64 {
    v.filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum()
}

fn c1_closed_forms() -> Outcome {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for (a, k, eta) in [(2, 2, 6), (3, 2, 6), (2, 3, 6), (2, 2, 8)] {
        let p = DueckParams::new(a, k, eta).unwrap();
        let j = build_source(&p).unwrap();
        let n = j.sizes()[0];
        let c = |x: usize, y: usize| j.probs()[x * n + y];
        let h12 = entropy(j.probs().iter().copied());
        let h1 = entropy((0..n).map(|x| (0..n).map(|y| c(x, y)).sum()));
        let h2 = entropy((0..n).map(|y| (0..n).map(|x| c(x, y)).sum()));
        let xi: f64 = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|(x, y)| x != y).map(|(x, y)| c(x, y)).sum();
        let s = source_stats(&p);
        for (got, want) in [
            (s.h_s1.value, h1),
            (s.h_s2.value, h2),
            (s.h_joint.value, h12),
            (s.h_s2_given_s1.value, h12 - h1),
            (s.h_s1_given_s2.value, h12 - h2),
            (s.xi.to_f64(), xi),
        ] {
            worst = worst.max((got - want).abs());
        }
    }
    let secs = t.elapsed().as_secs_f64();
    (worst <= 1e-9 && secs < 5.0, format!("max error {worst:.3e} nats, {secs:.2} s"))
}

fn random_channel(rng: &mut ChaCha8Rng, n: usize) -> Channel {
    Channel::new(
        (0..n)
            .map(|_| {
                let r: Vec<f64> = (0..n).map(|_| 0.05 + rng.random::<f64>()).collect();
                let s: f64 = r.iter().sum();
                r.into_iter().map(|x| x / s).collect()
            })
            .collect(),
    )
    .unwrap()
}

fn c2_exponent() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut gap: f64 = 0.0;
    for (n, count) in [(2, 50), (3, 10)] {
        for _ in 0..count {
            let w = random_channel(&mut rng, n);
            let p = Pmf::uniform(n);
            let cap = mutual_information_pw(&p, &w);
            for f in [0.0, 0.2, 0.4, 0.6, 0.8] {
                let d = error_exponent(f * cap, &p, &w).unwrap().value;
                let o = error_exponent_primal(f * cap, &p, &w, 1e-3).unwrap().value;
                gap = gap.max((d - o).abs());
            }
        }
    }
    let mut ident: f64 = 0.0;
    for a in [2usize, 4, 8] {
        let la = (a as f64).ln();
        for f in [0.1, 0.5, 0.9] {
            let e = error_exponent(f * la, &Pmf::uniform(a), &Channel::noiseless(a)).unwrap().value;
            ident = ident.max((e - (la - f * la)).abs());
        }
    }
    let secs = t.elapsed().as_secs_f64();
    (
        gap <= 1e-3 && ident <= 1e-9 && secs < 60.0,
        format!("dual vs primal {gap:.2e}, noiseless identity {ident:.1e}, {secs:.1} s"),
    )
}

fn c3_scan() -> Outcome {
    let t = Instant::now();
    let mut ok = true;
    let mut found = Vec::new();
    for (mode, k, a) in PAIRS {
        let r = dueck_separation_scan(6, 1 << 20, 64, mode).unwrap();
        match r.found {
            Some(w) => {
                let phi_ok = w.step1.phi.iter().all(|p| p.below_half);
                ok &= w.lemma.holds && w.step1.overall && phi_ok && (w.k, w.a) == (k, a);
                found.push(format!("{mode:?} (a*,k*)=({},{})", w.a, w.k));
            }
            None => {
                ok = false;
                found.push(format!("{mode:?} not found"));
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    (ok && secs < 300.0, format!("{}, {secs:.1} s", found.join(", ")))
}

fn c4_isolated() -> Outcome {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut min_slack = f64::INFINITY;
    for (mode, k, a) in PAIRS {
        let p = DueckParams::new(a, k, 6).unwrap();
        let r = check_isolated(&p, p.proof_block_length(), 1.0 / k as f64, mode);
        ok &= r.overall && r.inequalities.iter().all(|i| i.slack > 0.0);
        min_slack = min_slack.min(r.min_slack());
        let c = phi_chain(&p, mode);
        let (kf, la) = (k as f64, (a as f64).ln());
        worst = worst.max((c.unit.ln() - (3.0 * kf.ln() - 3.0 * kf * la)).abs());
        worst = worst.max((c.phi.ln() - (c.g + c.xi_l + c.tau).ln()).abs());
        ok &= c.holds && c.phi.ln() <= 3f64.ln() + c.unit.ln() + 1e-12;
    }
    (ok && worst <= 1e-12, format!("min slack {min_slack:.3e}, closed-form gap {worst:.1e}"))
}

fn c5_lemmas() -> Outcome {
    let t = Instant::now();
    let r = verify_lemmas(LemmaGroup::All, 20_240_601).unwrap();
    let worst = r.checks.iter().map(|c| c.max_abs_diff).fold(0.0, f64::max);
    let secs = t.elapsed().as_secs_f64();
    (r.pass && secs < 30.0, format!("{} identities, max diff {worst:.1e}, {secs:.1} s", r.checks.len()))
}

fn c6_rows() -> Outcome {
    let r = verify_row_iid(&toys::binary_adder_mac(1000), 100).unwrap();
    let row = r.row.as_ref().unwrap();
    let col = &r.column[0];
    let ok = r.rows == 100_000 && row.tv <= 0.02 && col.tv <= 0.02 && row.p_value > 0.01 && col.p_value > 0.01;
    (ok, format!("{} rows: row TV {:.4} (p {:.2}), column TV {:.4} (p {:.2})", r.rows, row.tv, row.p_value, col.tv, col.p_value))
}

fn nonincreasing(r: &[RateCi]) -> bool {
    let rises: Vec<_> = r.windows(2).filter(|w| w[1].rate > w[0].rate).collect();
    rises.len() <= 1 && rises.iter().all(|w| w[0].lo <= w[1].hi && w[1].lo <= w[0].hi)
}

fn c7_trend() -> Outcome {
    let s: Vec<_> = [16, 32, 64]
        .iter()
        .map(|&m| {
            let mut spec = toys::gkw_noiseless_mac(m);
            spec.calibration_m = Some(16);
            estimate_error(&spec, 400).unwrap()
        })
        .collect();
    let success = 1.0 - s[2].failure.rate;
    let stages = [|x: &fbl_core::sim::ErrorSummary| x.e1, |x: &fbl_core::sim::ErrorSummary| x.e2, |x: &fbl_core::sim::ErrorSummary| x.e3];
    let trend = stages.iter().all(|f| nonincreasing(&s.iter().map(f).collect::<Vec<_>>()));
    let fails: Vec<String> = s.iter().map(|x| format!("{:.4}", x.failure.rate)).collect();
    (success >= 0.95 && trend, format!("success at m=64 {success:.4}, failure over m=16,32,64: {}", fails.join(", ")))
}

fn c8_inner() -> Outcome {
    let w = Channel::bsc(0.05).unwrap();
    let e = inner_code_experiment(&w, &Pmf::uniform(2), 0.2, 0.05, &[8, 16, 32], 20_000, 8).unwrap();
    let errs: Vec<String> = e.points.iter().map(|p| format!("{:.4}", p.error.rate)).collect();
    (
        e.decreasing && (0.5..=2.0).contains(&e.slope_ratio),
        format!("errors {}, slope {:.4} vs -E_r {:.4}", errs.join(", "), e.slope, -e.exponent),
    )
}

fn c9_disagreement() -> Outcome {
    let mut ok = true;
    let mut worst = f64::NEG_INFINITY;
    for name in toys::NAMES {
        for m in [16, 64] {
            let s = estimate_error(&toys::by_name(name, m).unwrap(), 200).unwrap();
            let margin = s.disagreement.rate - (s.disagreement_bound + 3.0 * s.disagreement_sigma);
            worst = worst.max(margin);
            ok &= margin <= 0.0;
        }
    }
    (ok, format!("{} configs, worst margin {worst:.3e}", toys::NAMES.len() * 2))
}

fn c10_determinism() -> Outcome {
    let runs: [&[&str]; 9] = [
        &["info", "--pmf", "0.2,0.3,0.5"],
        &["exponent", "--channel", "bsc:0.1", "--rate", "0.1", "--pu", "uniform"],
        &["dueck", "stats", "--a", "2", "--k", "2", "--eta", "6"],
        &["check", "isolated", "--a", "890454", "--k", "21"],
        &["scan", "--amax", "65536", "--kmax", "12"],
        &["simulate", "mac1", "--toy", "gkw-noiseless", "--m", "32", "--trials", "100"],
        &["verify", "lemmas", "--which", "all"],
        &["verify", "rows", "--toy", "binary-adder", "--m", "200", "--trials", "20"],
        &["verify", "inner", "--trials", "2000"],
    ];
    let mut same = 0;
    for args in runs {
        let out = |threads: &str| {
            Command::new(env!("CARGO_BIN_EXE_fbl"))
                .args(["--threads", threads])
                .args(args)
                .output()
                .expect("run fbl")
        };
        let (a, b) = (out("1"), out("3"));
        if a.status.success() && a.stdout == b.stdout && a.status.code() == b.status.code() {
            same += 1;
        }
    }
    (same == runs.len(), format!("{same}/{} commands byte-identical at 1 and 3 threads", runs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("closed forms vs brute force", c1_closed_forms),
        ("error exponent dual vs primal", c2_exponent),
        ("separation scan", c3_scan),
        ("isolated-channel feasibility", c4_isolated),
        ("exact lemma suite", c5_lemmas),
        ("row and column distributions", c6_rows),
        ("simulator trend", c7_trend),
        ("inner-code exponent slope", c8_inner),
        ("disagreement bound", c9_disagreement),
        ("CLI determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (ok, detail) = f();
        failed += usize::from(!ok);
        println!("criterion {:>2} {}: {name} ({detail})", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
