// SPDX-License-Identifier: Apache-2.0
// Dual solver against the primal grid oracle on random channels.

use fbl_core::exponents::{error_exponent, error_exponent_primal};
use fbl_core::info_core::{mutual_information_pw, Channel, Pmf};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

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

/// Worst dual-primal gap over `count` random `n x n` channels at five rates each.
fn worst_gap(n: usize, count: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let w = random_channel(&mut rng, n);
        let p = Pmf::uniform(n);
        let cap = mutual_information_pw(&p, &w);
        for f in [0.0, 0.2, 0.4, 0.6, 0.8] {
            let r = f * cap;
            let d = error_exponent(r, &p, &w).unwrap();
            let o = error_exponent_primal(r, &p, &w, 1e-3).unwrap();
            assert!(d.converged);
            worst = worst.max((d.value - o.value).abs());
        }
    }
    worst
}

#[test]
fn binary_channels_agree() {
    let g = worst_gap(2, 50, 2024);
    assert!(g < 1e-3, "gap {g}");
}

#[test]
fn ternary_channels_agree() {
    let g = worst_gap(3, 10, 2025);
    assert!(g < 1e-3, "gap {g}");
}

#[test]
fn noiseless_uniform_identity() {
    for a in [2usize, 4, 8] {
        let la = (a as f64).ln();
        for f in [0.1, 0.5, 0.9] {
            let e = error_exponent(f * la, &Pmf::uniform(a), &Channel::noiseless(a)).unwrap();
            assert!((e.value - (la - f * la)).abs() < 1e-9);
        }
    }
}
