// SPDX-License-Identifier: Apache-2.0
//! Aggregation over trials and goodness-of-fit against the exact pmfs.

use super::trial::{Simulator, TrialOutcome};
use super::{key, seq_key, CodeEnsembleSpec};
use crate::error::{FblError, Result};
use crate::exponents::{block_disagreement, tau_bound};
use crate::LogReal;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::collections::BTreeMap;

const TAG_TRIAL: u64 = 0x7121A1;
/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959963984540054;
/// Smallest expected count per chi-square bin.
const MIN_EXPECTED: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateCi {
    pub k: u64,
    pub n: u64,
    pub rate: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Wilson score interval at 95%.
pub fn wilson(k: u64, n: u64) -> RateCi {
    if n == 0 {
        return RateCi { k, n, rate: f64::NAN, lo: 0.0, hi: 1.0 };
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = Z95 * Z95;
    let den = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / den;
    let half = Z95 * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / den;
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (centre + half).min(1.0) };
    RateCi { k, n, rate: p, lo, hi }
}

/// Seed of trial `i`.
pub fn trial_seed(spec: &CodeEnsembleSpec, i: u64) -> u64 {
    key(&[spec.seed, TAG_TRIAL, i])
}

/// Trials `0..n` in order. Parallel, with a result independent of the pool.
pub fn run_trials(sim: &Simulator, n: u64) -> Vec<TrialOutcome> {
    (0..n).into_par_iter().map(|i| sim.run_trial(trial_seed(&sim.spec, i)).0).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorSummary {
    pub trials: u64,
    pub m: usize,
    pub l: usize,
    pub failure: RateCi,
    pub e1: RateCi,
    pub e2: RateCi,
    pub e3: RateCi,
    /// Pooled over rows and receivers.
    pub inner_row_error: RateCi,
    /// Pooled over rows.
    pub disagreement: RateCi,
    pub p_disagree_exact: f64,
    /// `xi^[l] + tau`.
    pub disagreement_bound: f64,
    /// Binomial standard deviation of the pooled disagreement rate.
    pub disagreement_sigma: f64,
    pub disagreement_within_bound: bool,
    pub budget_aborts: u64,
    pub delta_outer: Vec<f64>,
    pub delta_sw: Vec<f64>,
}

/// Per-letter `P(K1 != K2)`.
pub(crate) fn letter_disagreement(spec: &CodeEnsembleSpec) -> f64 {
    let maps = spec.maps();
    spec.source().support().iter().filter(|(s, _)| maps[0][s[0]] != maps[1][s[1]]).map(|(_, p)| p).sum()
}

/// `xi^[l] + tau_{delta,l}(K_a)` as a plain number, capped at 1.
pub fn disagreement_bound(sim: &Simulator) -> Result<f64> {
    let l = LogReal::new(sim.spec.l() as f64);
    let xi = block_disagreement(LogReal::new(letter_disagreement(&sim.spec)), l);
    let tau = tau_bound(l, sim.spec.params.delta, &sim.codes.p_ka)?;
    Ok((xi.to_f64() + tau.to_f64()).min(1.0))
}

pub fn summarize(sim: &Simulator, outcomes: &[TrialOutcome]) -> Result<ErrorSummary> {
    let n = outcomes.len() as u64;
    if n == 0 {
        return Err(FblError::Param("at least one trial is needed".into()));
    }
    let m = sim.spec.m;
    let count = |f: &dyn Fn(&TrialOutcome) -> bool| outcomes.iter().filter(|o| f(o)).count() as u64;
    let rows = n * m as u64;
    let dis: u64 = outcomes.iter().map(|o| o.disagreements as u64).sum();
    let inner: u64 = outcomes.iter().flat_map(|o| o.inner_errors.iter()).map(|&x| x as u64).sum();
    let receivers = outcomes[0].inner_errors.len() as u64;
    let bound = disagreement_bound(sim)?;
    let p_hat = dis as f64 / rows as f64;
    // Sigma at the bound, so a zero count still gets a sensible width.
    let sigma = (bound * (1.0 - bound) / rows as f64).sqrt();
    Ok(ErrorSummary {
        trials: n,
        m,
        l: sim.spec.l(),
        failure: wilson(count(&|o| !o.success), n),
        e1: wilson(count(&|o| o.e1), n),
        e2: wilson(count(&|o| o.e2), n),
        e3: wilson(count(&|o| o.e3), n),
        inner_row_error: wilson(inner, rows * receivers),
        disagreement: wilson(dis, rows),
        p_disagree_exact: sim.pmfs.p_disagree,
        disagreement_bound: bound,
        disagreement_sigma: sigma,
        disagreement_within_bound: p_hat <= bound + 3.0 * sigma,
        budget_aborts: count(&|o| o.budget_abort),
        delta_outer: sim.delta_outer(),
        delta_sw: sim.delta_sw(),
    })
}

/// Stage-wise error rates with 95% intervals over `n` trials.
pub fn estimate_error(spec: &CodeEnsembleSpec, n: u64) -> Result<ErrorSummary> {
    if n == 0 {
        return Err(FblError::Param("n_trials must be at least 1".into()));
    }
    let sim = Simulator::new(spec)?;
    summarize(&sim, &run_trials(&sim, n))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistCheck {
    pub samples: u64,
    pub support: usize,
    pub tv: f64,
    pub chi2: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Bins after merging cells with small expected counts.
    pub bins: usize,
    /// Samples outside the exact support.
    pub outside: u64,
}

/// Empirical counts against an exact pmf.
pub fn dist_check<K: Ord + Clone>(counts: &BTreeMap<K, u64>, exact: &BTreeMap<K, f64>) -> DistCheck {
    let n: u64 = counts.values().sum();
    let nf = n as f64;
    let mut tv = 0.0;
    for (k, &p) in exact {
        let e = counts.get(k).copied().unwrap_or(0) as f64 / nf.max(1.0);
        tv += (e - p).abs();
    }
    let outside: u64 = counts.iter().filter(|(k, _)| !exact.contains_key(k)).map(|(_, &c)| c).sum();
    tv += outside as f64 / nf.max(1.0);
    tv *= 0.5;
    // Merge cells in increasing order of expected count.
    let mut cells: Vec<(f64, u64)> =
        exact.iter().map(|(k, &p)| (p * nf, counts.get(k).copied().unwrap_or(0))).collect();
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut bins: Vec<(f64, u64)> = Vec::new();
    let mut acc = (0.0, 0u64);
    for (e, o) in cells {
        acc.0 += e;
        acc.1 += o;
        if acc.0 >= MIN_EXPECTED {
            bins.push(acc);
            acc = (0.0, 0);
        }
    }
    if acc.0 > 0.0 || acc.1 > 0 {
        match bins.last_mut() {
            Some(b) => {
                b.0 += acc.0;
                b.1 += acc.1;
            }
            None => bins.push(acc),
        }
    }
    let mut chi2: f64 = bins.iter().filter(|b| b.0 > 0.0).map(|&(e, o)| (o as f64 - e).powi(2) / e).sum();
    if outside > 0 {
        chi2 = f64::INFINITY;
    }
    let dof = bins.len().saturating_sub(1);
    let p_value = if chi2.is_infinite() {
        0.0
    } else if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64).map(|d| 1.0 - d.cdf(chi2)).unwrap_or(f64::NAN)
    };
    DistCheck { samples: n, support: exact.len(), tv, chi2, dof, p_value, bins: bins.len(), outside }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowIidReport {
    pub trials: u64,
    pub rows: u64,
    /// Full rows against the exact row pmf, when it is available.
    pub row: Option<DistCheck>,
    /// Per receiver, pooled interleaved columns against the interleaved pmf.
    pub column: Vec<DistCheck>,
    /// Per receiver, source rows with reconstructions against the SW pmf.
    pub sw: Vec<DistCheck>,
}

/// Pool rows over `trials` trials and compare with the exact pmfs.
pub fn verify_row_iid(spec: &CodeEnsembleSpec, trials: u64) -> Result<RowIidReport> {
    if trials == 0 {
        return Err(FblError::Param("trials must be at least 1".into()));
    }
    let sim = Simulator::new(spec)?;
    let pm = &sim.pmfs;
    let src = spec.source();
    let sizes = src.sizes();
    let k_size = sim.codes.p_ka.len();
    let receivers = pm.sw_pmf.len();
    let is_mac = matches!(spec.assignment, super::Assignment::Mac(_));
    let (nu, nv, nx, n_out) = dims(spec);
    let blocks: Vec<_> = (0..trials).into_par_iter().map(|i| sim.run_trial(trial_seed(spec, i)).1).collect();
    let mut row: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    let mut col: Vec<BTreeMap<usize, u64>> = vec![BTreeMap::new(); pm.interleaved_pmf.len()];
    let mut sw: Vec<BTreeMap<Vec<u64>, u64>> = vec![BTreeMap::new(); receivers];
    for b in &blocks {
        for t in 0..spec.m {
            if pm.row_pmf.is_some() {
                let k = vec![
                    seq_key(&b.u[0][t], nu),
                    seq_key(&b.u[1][t], nu),
                    seq_key(&b.v[0][t], nv[0]),
                    seq_key(&b.v[1][t], nv[1]),
                    seq_key(&b.x[0][t], nx[0]),
                    seq_key(&b.x[1][t], nx[1]),
                    seq_key(&b.y[t], n_out),
                ];
                *row.entry(k).or_insert(0) += 1;
            }
            let s1 = seq_key(&b.s[0][t], sizes[0]);
            let s2 = seq_key(&b.s[1][t], sizes[1]);
            for r in 0..receivers {
                let kh = seq_key(&b.khat[r][t], k_size);
                let k = if is_mac { vec![s1, s2, kh] } else { vec![if r == 0 { s1 } else { s2 }, kh] };
                *sw[r].entry(k).or_insert(0) += 1;
            }
            for (r, c) in col.iter_mut().enumerate() {
                let q = &pm.interleaved_pmf[r];
                for i in 0..spec.l() {
                    let cc = b.pi[t][i];
                    let idx = if is_mac {
                        q.index_of(&[b.v[0][t][cc], b.v[1][t][cc], b.y[t][cc]])
                    } else {
                        let uh = sim.codes.codebook[b.ahat[r][t]][cc];
                        q.index_of(&[b.v[r][t][cc], b.y_r[r][t][cc], uh])
                    };
                    *c.entry(idx).or_insert(0) += 1;
                }
            }
        }
    }
    let row_check = pm.row_pmf.as_ref().map(|p| dist_check(&row, &p.cells));
    let column = col
        .iter()
        .zip(&pm.interleaved_pmf)
        .map(|(c, q)| {
            let exact: BTreeMap<usize, f64> =
                q.probs().iter().enumerate().filter(|(_, &p)| p > 0.0).map(|(i, &p)| (i, p)).collect();
            dist_check(c, &exact)
        })
        .collect();
    let sw = sw.iter().zip(&pm.sw_pmf).map(|(c, p)| dist_check(c, &p.cells)).collect();
    Ok(RowIidReport { trials, rows: trials * spec.m as u64, row: row_check, column, sw })
}

fn dims(spec: &CodeEnsembleSpec) -> (usize, [usize; 2], [usize; 2], usize) {
    match &spec.assignment {
        super::Assignment::Mac(a) => (
            a.p_u.len(),
            [a.p_v1.len(), a.p_v2.len()],
            [a.x1_mapper.n_out(), a.x2_mapper.n_out()],
            a.channel.n_out(),
        ),
        super::Assignment::Ic(a) => (
            a.p_u.len(),
            [a.p_v1.len(), a.p_v2.len()],
            [a.x1_mapper.n_out(), a.x2_mapper.n_out()],
            a.channel.law.n_out(),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::super::toys;
    use super::*;

    /// Wilson bounds are the roots of `(p - x)^2 = z^2 x (1 - x) / n`.
    #[test]
    fn wilson_bounds_solve_the_score_equation() {
        for (k, n) in [(0u64, 10u64), (3, 10), (10, 10), (57, 400)] {
            let ci = wilson(k, n);
            let p = k as f64 / n as f64;
            for x in [ci.lo, ci.hi] {
                if x > 0.0 && x < 1.0 {
                    let lhs = (p - x).powi(2);
                    let rhs = Z95 * Z95 * x * (1.0 - x) / n as f64;
                    assert!((lhs - rhs).abs() < 1e-12, "{k}/{n}: {lhs} vs {rhs}");
                }
            }
            assert!(ci.lo <= p && p <= ci.hi);
        }
        assert_eq!(wilson(0, 10).lo, 0.0);
    }

    #[test]
    fn zero_trials_are_rejected() {
        assert!(estimate_error(&toys::binary_adder_mac(4), 0).is_err());
        assert!(verify_row_iid(&toys::binary_adder_mac(4), 0).is_err());
    }

    #[test]
    fn estimates_are_deterministic() {
        let spec = toys::binary_adder_mac(8);
        let a = estimate_error(&spec, 40).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| estimate_error(&spec, 40).unwrap());
        assert_eq!(a, b);
        assert!(a.disagreement_within_bound);
    }

    #[test]
    fn dist_check_on_exact_counts() {
        let exact: BTreeMap<u8, f64> = [(0, 0.5), (1, 0.25), (2, 0.25)].into_iter().collect();
        let counts: BTreeMap<u8, u64> = [(0, 50), (1, 25), (2, 25)].into_iter().collect();
        let c = dist_check(&counts, &exact);
        assert_eq!(c.tv, 0.0);
        assert_eq!(c.chi2, 0.0);
        assert_eq!(c.dof, 2);
        assert!((c.p_value - 1.0).abs() < 1e-12);
        let stray: BTreeMap<u8, u64> = [(0, 50), (9, 1)].into_iter().collect();
        let s = dist_check(&stray, &exact);
        assert_eq!(s.outside, 1);
        assert_eq!(s.p_value, 0.0);
    }

    #[test]
    fn small_expected_cells_are_merged() {
        let exact: BTreeMap<u8, f64> = [(0, 0.97), (1, 0.01), (2, 0.01), (3, 0.01)].into_iter().collect();
        let counts: BTreeMap<u8, u64> = [(0, 97), (1, 1), (2, 1), (3, 1)].into_iter().collect();
        let c = dist_check(&counts, &exact);
        assert_eq!(c.bins, 1);
        assert_eq!(c.dof, 0);
    }

    #[test]
    fn deterministic_rows_match_after_one_trial() {
        // Singleton typical set and a noiseless, input-free layout: every row
        // is the same, so one trial already reproduces the pmf.
        let mut spec = toys::binary_adder_mac(16);
        if let crate::sim::Assignment::Mac(a) = &mut spec.assignment {
            a.p_v1 = crate::info_core::Pmf::new(vec![1.0, 0.0]).unwrap();
            a.p_v2 = crate::info_core::Pmf::new(vec![1.0, 0.0]).unwrap();
            a.source = crate::info_core::JointPmf::new(&[2, 2], vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        }
        spec.params.delta = 3.0;
        spec.codebook = Some(vec![vec![0, 1], vec![1, 0], vec![0, 1], vec![1, 0]]);
        let r = verify_row_iid(&spec, 1).unwrap();
        assert_eq!(r.row.as_ref().unwrap().tv, 0.0);
        assert!(r.column.iter().all(|c| c.outside == 0));
    }
}
