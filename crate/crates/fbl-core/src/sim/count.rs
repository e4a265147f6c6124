// SPDX-License-Identifier: Apache-2.0
//! Box-constrained multinomial sums in the log domain.

use crate::error::{FblError, Result};

/// Same slack as the typicality test in `info_core`.
const COUNT_EPS: f64 = 1e-9;

/// Counts `N` of a cell with probability `q` in a length-`n` sequence that
/// pass `|N - n q| <= delta n q + eps`. Zero-probability cells admit only 0.
pub(crate) fn cell_box(q: f64, n: usize, delta: f64) -> (usize, usize) {
    if q <= 0.0 {
        return (0, 0);
    }
    let e = n as f64 * q;
    let lo = (e - delta * e - COUNT_EPS).ceil().max(0.0) as usize;
    let hi = (e + delta * e + COUNT_EPS).floor().min(n as f64) as usize;
    (lo, hi)
}

pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n + 1];
    for i in 1..=n {
        t[i] = t[i - 1] + (i as f64).ln();
    }
    t
}

/// `ln sum n!/prod x_c! prod w_c^{x_c}` over count vectors with
/// `lo_c <= x_c <= hi_c` and `sum x_c = n`. Each cell is `(ln w_c, lo, hi)`.
/// With all weights 1 this counts sequences; with a pmf it is a probability.
pub fn ln_box_sum(n: usize, cells: &[(f64, usize, usize)]) -> f64 {
    let lf = ln_factorials(n);
    ln_box_sum_with(n, cells, &lf)
}

/// As [`ln_box_sum`] with a precomputed `ln x!` table of length `> n`.
/// Runs in the linear domain, rescaling after every cell. Weights are first
/// tilted by `n / sum w` so each cell peaks near its typical count.
pub(crate) fn ln_box_sum_with(n: usize, cells: &[(f64, usize, usize)], lf: &[f64]) -> f64 {
    let min_total: usize = cells.iter().map(|c| c.1).sum();
    if min_total > n || cells.iter().any(|c| c.1 > c.2) {
        return f64::NEG_INFINITY;
    }
    if n == 0 {
        return 0.0;
    }
    let w_max = cells.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max);
    let ln_w_sum = w_max + cells.iter().map(|c| (c.0 - w_max).exp()).sum::<f64>().ln();
    let tilt = (n as f64).ln() - ln_w_sum;
    let mut g = vec![0.0; n + 1];
    let mut h = vec![0.0; n + 1];
    let mut terms = vec![0.0; n + 1];
    g[0] = 1.0;
    let mut ln_scale = 0.0;
    let mut reach = 0usize;
    let mut floor = 0usize;
    for &(lw, lo, hi) in cells {
        let top = hi.min(n);
        if lo > top {
            return f64::NEG_INFINITY;
        }
        let lw = lw + tilt;
        let t = |x: usize| if x == 0 { 0.0 } else { x as f64 * lw - lf[x] };
        let tmax = (lo..=top).map(t).fold(f64::NEG_INFINITY, f64::max);
        for x in lo..=top {
            terms[x] = (t(x) - tmax).exp();
        }
        h[floor..=n].iter_mut().for_each(|v| *v = 0.0);
        let new_floor = floor + lo;
        let new_reach = (reach + top).min(n);
        for r in floor..=reach {
            let gr = g[r];
            if gr == 0.0 {
                continue;
            }
            let xmax = top.min(n - r);
            for x in lo..=xmax {
                h[r + x] += gr * terms[x];
            }
        }
        let hmax = h[new_floor..=new_reach].iter().copied().fold(0.0, f64::max);
        if hmax == 0.0 {
            return f64::NEG_INFINITY;
        }
        for v in &mut h[new_floor..=new_reach] {
            *v /= hmax;
        }
        ln_scale += tmax + hmax.ln();
        std::mem::swap(&mut g, &mut h);
        floor = new_floor;
        reach = new_reach;
        if floor > n {
            return f64::NEG_INFINITY;
        }
    }
    if g[n] == 0.0 || reach < n {
        f64::NEG_INFINITY
    } else {
        lf[n] + ln_scale + g[n].ln() - n as f64 * tilt
    }
}

/// Probability that `m` IID draws from `probs` are typical with tolerance `delta`.
pub(crate) fn prob_typical(probs: &[f64], m: usize, delta: f64) -> f64 {
    let cells: Vec<(f64, usize, usize)> = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| {
            let (lo, hi) = cell_box(p, m, delta);
            (p.ln(), lo, hi)
        })
        .collect();
    ln_box_sum(m, &cells).exp().min(1.0)
}

/// Smallest `delta` (to a relative precision of about 1e-9) at which `m`
/// IID draws from `probs` are typical with probability at least `target`.
pub fn calibrate_delta(probs: &[f64], m: usize, target: f64) -> Result<f64> {
    let p_min = probs.iter().copied().filter(|&p| p > 0.0).fold(f64::INFINITY, f64::min);
    if !p_min.is_finite() || m == 0 {
        return Err(FblError::Param("calibration needs a nonempty pmf and m >= 1".into()));
    }
    // At this value every box is [0, m].
    let mut hi = (1.0 / p_min).max(2.0);
    if prob_typical(probs, m, hi) < target {
        return Err(FblError::Param("calibration target unreachable".into()));
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if prob_typical(probs, m, mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-9 * hi {
            break;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info_core::counts_typical;

    /// All count vectors of `k` cells summing to `n`.
    fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 1 {
            return vec![vec![n]];
        }
        let mut out = Vec::new();
        for x in 0..=n {
            for mut rest in compositions(n - x, k - 1) {
                rest.insert(0, x);
                out.push(rest);
            }
        }
        out
    }

    fn ln_multinomial(n: usize, x: &[usize]) -> f64 {
        let lf = ln_factorials(n);
        lf[n] - x.iter().map(|&c| lf[c]).sum::<f64>()
    }

    #[test]
    fn box_matches_typicality_test() {
        let probs = [0.5, 0.3, 0.2, 0.0];
        for m in [1, 5, 12] {
            for delta in [0.1, 0.5, 1.0, 3.0] {
                let boxes: Vec<_> = probs.iter().map(|&q| cell_box(q, m, delta)).collect();
                for x in compositions(m, 4) {
                    let in_box = x.iter().zip(&boxes).all(|(c, b)| *c >= b.0 && *c <= b.1);
                    assert_eq!(in_box, counts_typical(&x, &probs, delta), "{x:?} {delta}");
                }
            }
        }
    }

    #[test]
    fn box_sum_matches_enumeration() {
        let probs = [0.5, 0.3, 0.2];
        let n = 9;
        let delta = 0.6;
        let cells: Vec<_> = probs
            .iter()
            .map(|&q| {
                let (lo, hi) = cell_box(q, n, delta);
                (q.ln(), lo, hi)
            })
            .collect();
        let mut p = 0.0;
        let mut count = 0.0;
        for x in compositions(n, 3) {
            if counts_typical(&x, &probs, delta) {
                let lm = ln_multinomial(n, &x);
                count += lm.exp();
                p += (lm + x.iter().zip(&probs).map(|(&c, q)| c as f64 * q.ln()).sum::<f64>()).exp();
            }
        }
        assert!((ln_box_sum(n, &cells).exp() - p).abs() < 1e-12);
        let unit: Vec<_> = cells.iter().map(|c| (0.0, c.1, c.2)).collect();
        assert!((ln_box_sum(n, &unit).exp() / count - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_boxes_give_total_mass() {
        let cells = [(0.25f64.ln(), 0, 7), (0.75f64.ln(), 0, 7)];
        assert!(ln_box_sum(7, &cells).abs() < 1e-12);
        // Unit weights over 3 cells count 3^n sequences.
        let unit = [(0.0, 0, 5), (0.0, 0, 5), (0.0, 0, 5)];
        assert!((ln_box_sum(5, &unit) - 5.0 * 3f64.ln()).abs() < 1e-12);
        assert_eq!(ln_box_sum(3, &[(0.0, 2, 3), (0.0, 2, 3)]), f64::NEG_INFINITY);
        assert_eq!(ln_box_sum(0, &[(0.0, 0, 3)]), 0.0);
    }

    #[test]
    fn large_n_does_not_underflow() {
        let probs = [0.125f64, 0.125, 0.25, 0.25, 0.125, 0.125];
        for n in [200, 1000, 5000] {
            let full: Vec<_> = probs.iter().map(|p| (p.ln(), 0, n)).collect();
            assert!(ln_box_sum(n, &full).abs() < 1e-9, "{n}");
            // Counting: 6^n sequences.
            let unit: Vec<_> = probs.iter().map(|_| (0.0, 0, n)).collect();
            assert!((ln_box_sum(n, &unit) / (n as f64 * 6f64.ln()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn calibration_reaches_target_minimally() {
        let probs = [0.6, 0.3, 0.1];
        for m in [4, 16, 64] {
            let d = calibrate_delta(&probs, m, 0.99).unwrap();
            assert!(prob_typical(&probs, m, d) >= 0.99);
            assert!(prob_typical(&probs, m, d * (1.0 - 1e-6)) < 0.99 || d < 1e-6);
        }
        assert!(calibrate_delta(&[0.0, 0.0], 4, 0.99).is_err());
    }
}
