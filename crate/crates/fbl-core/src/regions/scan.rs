// SPDX-License-Identifier: Apache-2.0
//! Grid search for the smallest Dueck parameters at which the classical
//! conditions provably fail while the prescribed Step-1 assignment succeeds.

use super::dueck_checks::{check_isolated_default, dueck_step1, lemma_violation, phi_chain, LemmaResult, PhiChain};
use super::ConditionReport;
use crate::dueck::{DueckParams, Mode};
use crate::error::Result;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub mode: Mode,
    pub k: u32,
    pub a: u64,
    pub lemma_holds: bool,
    pub lemma_slack: f64,
    pub step1_holds: bool,
    pub ln_phi: f64,
    pub min_slack: f64,
}

impl ScanRow {
    pub const CSV_HEADER: &'static str = "mode,k,a,lemma_holds,lemma_slack,step1_holds,ln_phi,min_slack";

    pub fn passes(&self) -> bool {
        self.lemma_holds && self.step1_holds
    }

    pub fn to_csv(&self) -> String {
        let mode = match self.mode {
            Mode::Mac => "mac",
            Mode::Ic => "ic",
        };
        format!(
            "{mode},{},{},{},{:.11e},{},{:.11e},{:.11e}",
            self.k, self.a, self.lemma_holds, self.lemma_slack, self.step1_holds, self.ln_phi, self.min_slack
        )
    }
}

fn evaluate(p: &DueckParams, mode: Mode) -> (ScanRow, LemmaResult, ConditionReport) {
    let lemma = lemma_violation(p, mode);
    let step1 = dueck_step1(p, mode);
    let ln_phi = step1.phi.iter().map(|e| e.phi.ln()).fold(f64::NEG_INFINITY, f64::max);
    let row = ScanRow {
        mode,
        k: p.k,
        a: p.a,
        lemma_holds: lemma.holds,
        lemma_slack: lemma.slack,
        step1_holds: step1.overall,
        ln_phi,
        min_slack: step1.min_slack(),
    };
    (row, lemma, step1)
}

fn passes(eta: u32, k: u32, a: u64, mode: Mode) -> bool {
    DueckParams::new(a, k, eta).map(|p| evaluate(&p, mode).0.passes()).unwrap_or(false)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanWitness {
    pub k: u32,
    /// Smallest passing power of two at `k`.
    pub a_grid: u64,
    /// Smallest passing integer in `(a_grid/2, a_grid]`.
    pub a: u64,
    pub lemma: LemmaResult,
    pub step1: ConditionReport,
    pub isolated: ConditionReport,
    pub phi_chain: PhiChain,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub eta: u32,
    pub mode: Mode,
    pub amax: u64,
    pub kmax: u32,
    pub found: Option<ScanWitness>,
    /// Every grid point, ordered by `(k, a)`.
    pub rows: Vec<ScanRow>,
}

fn powers_of_two(amax: u64) -> Vec<u64> {
    (1..64).map(|e| 1u64 << e).take_while(|&a| a <= amax).collect()
}

/// Smallest integer `a` in `(a_grid/2, a_grid]` that passes, assuming
/// `a_grid` itself passes.
fn refine(eta: u32, k: u32, a_grid: u64, mode: Mode) -> u64 {
    let lo = a_grid / 2 + 1;
    (lo.max(2)..=a_grid)
        .into_par_iter()
        .find_first(|&a| passes(eta, k, a, mode))
        .unwrap_or(a_grid)
}

/// Scan `a in {2, 4, ..} <= amax`, `k in 2..=kmax` and return the
/// lexicographically smallest `(k, a)` where the violation lemma and the
/// prescribed Step-1 check both hold, refined to an integer `a`.
pub fn dueck_separation_scan(eta: u32, amax: u64, kmax: u32, mode: Mode) -> Result<ScanResult> {
    DueckParams::new(2, 2, eta)?;
    let grid: Vec<(u32, u64)> = (2..=kmax)
        .flat_map(|k| powers_of_two(amax).into_iter().map(move |a| (k, a)))
        .collect();
    let rows: Vec<ScanRow> = grid
        .par_iter()
        .map(|&(k, a)| evaluate(&DueckParams::new(a, k, eta).expect("validated"), mode).0)
        .collect();
    let found = rows.iter().find(|r| r.passes()).map(|r| {
        let a = refine(eta, r.k, r.a, mode);
        let p = DueckParams::new(a, r.k, eta).expect("validated");
        let (_, lemma, step1) = evaluate(&p, mode);
        ScanWitness {
            k: r.k,
            a_grid: r.a,
            a,
            lemma,
            step1,
            isolated: check_isolated_default(&p, mode),
            phi_chain: phi_chain(&p, mode),
        }
    });
    Ok(ScanResult { eta, mode, amax, kmax, found, rows })
}

/// Smallest passing `a <= amax` at a fixed `k`, searched over powers of two
/// and then refined.
pub fn minimal_a_for_k(eta: u32, k: u32, mode: Mode, amax: u64) -> Result<Option<u64>> {
    DueckParams::new(2, k.max(2), eta)?;
    let grid = powers_of_two(amax);
    let first = grid.par_iter().copied().find_first(|&a| passes(eta, k, a, mode));
    Ok(first.map(|a| refine(eta, k, a, mode)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_range_is_not_found() {
        let r = dueck_separation_scan(6, 1, 64, Mode::Mac).unwrap();
        assert!(r.found.is_none() && r.rows.is_empty());
        let r = dueck_separation_scan(6, 1 << 20, 1, Mode::Ic).unwrap();
        assert!(r.found.is_none());
    }

    #[test]
    fn small_grid_finds_nothing() {
        let r = dueck_separation_scan(6, 64, 6, Mode::Mac).unwrap();
        assert!(r.found.is_none());
        assert_eq!(r.rows.len(), 5 * 6);
    }

    #[test]
    fn rows_are_ordered_and_csv_has_all_columns() {
        let r = dueck_separation_scan(6, 16, 3, Mode::Ic).unwrap();
        let keys: Vec<(u32, u64)> = r.rows.iter().map(|x| (x.k, x.a)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        let cols = ScanRow::CSV_HEADER.split(',').count();
        assert!(r.rows.iter().all(|x| x.to_csv().split(',').count() == cols));
    }

    #[test]
    fn bad_eta_is_rejected() {
        assert!(dueck_separation_scan(5, 64, 4, Mode::Mac).is_err());
    }
}
