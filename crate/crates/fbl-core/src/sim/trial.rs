// SPDX-License-Identifier: Apache-2.0
//! One trial of the matrix scheme.

use super::codes::{build_codes, tie_success, CodeBundle};
use super::count::{calibrate_delta, cell_box, ln_box_sum_with, ln_factorials};
use super::pmfs::{build_with, DecodingPmfs, Model, SparsePmf};
use super::{draw, key, seq_key, unit, CodeEnsembleSpec, SimMode};
use crate::error::{FblError, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

const TAG_OUTER: u64 = 0x0D7E;
const TAG_X: u64 = 0x0A11;
const TAG_BIN: u64 = 0xB175;
/// Stage-1 event: more bad rows than `(1 + E1_MARGIN)` times their mean.
pub const E1_MARGIN: f64 = 0.5;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub m: usize,
    /// Rows with `A1 != A2`.
    pub disagreements: usize,
    /// Per receiver, rows with `Ahat != A_a`.
    pub inner_errors: Vec<usize>,
    /// Per receiver, rows with `A1 != A2` or `Ahat != A_a`.
    pub bad_rows: Vec<usize>,
    /// Per receiver and column stream, whether the column decoder erred.
    pub outer_errors: Vec<Vec<bool>>,
    /// Per receiver.
    pub sw_success: Vec<bool>,
    pub success: bool,
    pub e1: bool,
    pub e2: bool,
    pub e3: bool,
    /// A search exceeded the budget and fell back to counting.
    pub budget_abort: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MatrixBlock {
    pub s: [Vec<Vec<usize>>; 2],
    pub k: [Vec<Vec<usize>>; 2],
    pub a: [Vec<usize>; 2],
    pub u: [Vec<Vec<usize>>; 2],
    pub v: [Vec<Vec<usize>>; 2],
    pub x: [Vec<Vec<usize>>; 2],
    /// Channel output; the `(y1, y2)` index for the IC.
    pub y: Vec<Vec<usize>>,
    /// Per receiver: what it observes.
    pub y_r: Vec<Vec<Vec<usize>>>,
    pub ahat: Vec<Vec<usize>>,
    pub khat: Vec<Vec<Vec<usize>>>,
    /// `pi[t][i]` is the column of row `t` carrying stream `i`.
    pub pi: Vec<Vec<usize>>,
    pub outer_messages: [Vec<u64>; 2],
    /// `outer_codewords[j][i]` is the length-`m` codeword of stream `i`.
    pub outer_codewords: [Vec<Vec<usize>>; 2],
}

/// `ln floor(exp(x))`, and the integer itself when it fits.
fn ln_floor_exp(x: f64) -> (f64, Option<u64>) {
    if x < 43.0 {
        let v = x.exp().floor().max(1.0) as u64;
        ((v as f64).ln(), Some(v))
    } else {
        (x, None)
    }
}

/// `ln(exp(x) - 1)` for `x >= 0`.
fn ln_minus_one(x: f64) -> f64 {
    if x <= 1e-12 {
        f64::NEG_INFINITY
    } else {
        x + (-(-x).exp()).ln_1p()
    }
}

/// Number of successes among `exp(ln_n)` candidates, each with probability
/// `exp(ln_p)`.
fn sample_count(ln_n: f64, ln_p: f64, rng: &mut ChaCha8Rng) -> u64 {
    if ln_n == f64::NEG_INFINITY || ln_p == f64::NEG_INFINITY {
        return 0;
    }
    let p = ln_p.min(0.0).exp();
    if ln_n < 16.0 {
        let n = ln_n.exp().round() as u64;
        return Binomial::new(n, p).map(|b| b.sample(rng)).unwrap_or(0);
    }
    let lambda = (ln_n + ln_p).exp();
    if lambda < 1e-6 {
        return u64::from(rng.random::<f64>() < lambda);
    }
    if lambda > 1e12 {
        return u64::MAX / 4;
    }
    Poisson::new(lambda).map(|d| d.sample(rng) as u64).unwrap_or(0)
}

/// Dense column decoder against an interleaved pmf.
#[derive(Clone, Debug)]
struct OuterStage {
    sizes: Vec<usize>,
    boxes: Vec<(usize, usize)>,
    delta: f64,
}

impl OuterStage {
    fn new(q: &crate::info_core::JointPmf, m: usize, delta: f64) -> Self {
        OuterStage {
            sizes: q.sizes(),
            boxes: q.probs().iter().map(|&p| cell_box(p, m, delta)).collect(),
            delta,
        }
    }

    fn typical(&self, counts: &[usize]) -> bool {
        counts.iter().zip(&self.boxes).all(|(&c, b)| c >= b.0 && c <= b.1)
    }

    /// `ln P` that IID draws of factor `free` (with pmf `p`) complete the
    /// observed other factors to a typical column. `counts` is over all cells.
    fn ln_p_fill(&self, counts: &[usize], free: &[usize], p: &[Vec<f64>], lf: &[f64]) -> f64 {
        let s = &self.sizes;
        let n_cells = counts.len();
        let nf = s.len();
        // Enumerate classes: assignments to the non-free factors.
        let fixed: Vec<usize> = (0..nf).filter(|f| !free.contains(f)).collect();
        let free_card: usize = free.iter().map(|&f| s[f]).product();
        let class_card: usize = fixed.iter().map(|&f| s[f]).product();
        let mut idx = vec![0usize; nf];
        let mut total = 0.0;
        for c in 0..class_card {
            let mut rem = c;
            for &f in fixed.iter().rev() {
                idx[f] = rem % s[f];
                rem /= s[f];
            }
            let mut n_c = 0;
            let mut cells = Vec::with_capacity(free_card);
            let mut impossible = false;
            for z in 0..free_card {
                let mut rem = z;
                let mut w = 1.0;
                for &f in free.iter().rev() {
                    idx[f] = rem % s[f];
                    w *= p[free.iter().position(|&g| g == f).unwrap()][idx[f]];
                    rem /= s[f];
                }
                let flat = idx.iter().zip(s).fold(0, |a, (&i, &n)| a * n + i);
                n_c += counts[flat];
                let (lo, hi) = self.boxes[flat];
                if w > 0.0 {
                    cells.push((w.ln(), lo, hi));
                } else if lo > 0 {
                    impossible = true;
                }
            }
            if impossible {
                return f64::NEG_INFINITY;
            }
            if n_c == 0 {
                if cells.iter().any(|c| c.1 > 0) {
                    return f64::NEG_INFINITY;
                }
                continue;
            }
            let v = ln_box_sum_with(n_c, &cells, lf);
            if v == f64::NEG_INFINITY {
                return v;
            }
            total += v;
        }
        debug_assert!(n_cells == s.iter().product::<usize>());
        total
    }
}

/// Slepian-Wolf decoder against a sparse super-symbol pmf.
#[derive(Clone, Debug)]
struct SwStage {
    boxes: BTreeMap<Vec<u64>, (usize, usize)>,
    delta: f64,
    /// For each free-coordinate set, cells grouped by the remaining coordinates.
    groups: Vec<(Vec<usize>, BTreeMap<Vec<u64>, Vec<(usize, usize)>>)>,
}

impl SwStage {
    fn new(p: &SparsePmf, m: usize, delta: f64, free_sets: &[Vec<usize>]) -> Self {
        let boxes: BTreeMap<Vec<u64>, (usize, usize)> =
            p.cells.iter().map(|(k, &q)| (k.clone(), cell_box(q, m, delta))).collect();
        let groups = free_sets
            .iter()
            .map(|free| {
                let mut g: BTreeMap<Vec<u64>, Vec<(usize, usize)>> = BTreeMap::new();
                for (k, &b) in &boxes {
                    g.entry(class_of(k, free)).or_default().push(b);
                }
                (free.clone(), g)
            })
            .collect();
        SwStage { boxes, delta, groups }
    }

    fn typical(&self, counts: &BTreeMap<Vec<u64>, usize>) -> bool {
        for (k, &c) in counts {
            match self.boxes.get(k) {
                Some(&(lo, hi)) if c >= lo && c <= hi => {}
                _ => return false,
            }
        }
        self.boxes.iter().all(|(k, &(lo, _))| lo == 0 || counts.contains_key(k))
    }

    /// `ln` of the number of sequences typical with the observed classes,
    /// varying the coordinates of group `g`.
    fn ln_count(&self, g: usize, counts: &BTreeMap<Vec<u64>, usize>, lf: &[f64]) -> f64 {
        let (free, groups) = &self.groups[g];
        let mut class_n: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
        for (k, &c) in counts {
            *class_n.entry(class_of(k, free)).or_insert(0) += c;
        }
        let mut total = 0.0;
        for (class, cells) in groups {
            let n = class_n.get(class).copied().unwrap_or(0);
            if n == 0 {
                if cells.iter().any(|c| c.0 > 0) {
                    return f64::NEG_INFINITY;
                }
                continue;
            }
            let cs: Vec<(f64, usize, usize)> = cells.iter().map(|&(lo, hi)| (0.0, lo, hi)).collect();
            let v = ln_box_sum_with(n, &cs, lf);
            if v == f64::NEG_INFINITY {
                return v;
            }
            total += v;
        }
        // Observed classes outside the support admit nothing.
        if class_n.keys().any(|c| !groups.contains_key(c)) {
            return f64::NEG_INFINITY;
        }
        total
    }
}

fn class_of(k: &[u64], free: &[usize]) -> Vec<u64> {
    k.iter().enumerate().filter(|(i, _)| !free.contains(i)).map(|(_, &v)| v).collect()
}

/// Prepared codes, pmfs and decoder tables for one spec.
#[derive(Clone, Debug)]
pub struct Simulator {
    pub spec: CodeEnsembleSpec,
    pub codes: CodeBundle,
    pub pmfs: DecodingPmfs,
    model: Model,
    outer: Vec<OuterStage>,
    sw: Vec<SwStage>,
    /// `ln M_Vj` and `M_Vj` when it fits in 64 bits.
    ln_m: [f64; 2],
    m_int: [Option<u64>; 2],
    lf: Vec<f64>,
}

impl Simulator {
    pub fn new(spec: &CodeEnsembleSpec) -> Result<Self> {
        spec.validate()?;
        let codes = build_codes(spec, spec.seed)?;
        let model = Model::new(&spec.assignment)?;
        let pmfs = build_with(spec, &codes, &model)?;
        let m = spec.m;
        let m_cal = spec.calibration_m.unwrap_or(m);
        let calib = |probs: &[f64]| -> Result<f64> {
            match spec.delta_dec {
                Some(d) => Ok(d),
                None => calibrate_delta(probs, m_cal, spec.target_typical),
            }
        };
        let outer = pmfs
            .interleaved_pmf
            .iter()
            .map(|q| Ok(OuterStage::new(q, m, calib(q.probs())?)))
            .collect::<Result<Vec<_>>>()?;
        let sw = pmfs
            .sw_pmf
            .iter()
            .map(|p| {
                let probs: Vec<f64> = p.cells.values().copied().collect();
                let free: Vec<Vec<usize>> =
                    if model.is_mac { vec![vec![0], vec![1], vec![0, 1]] } else { vec![vec![0]] };
                Ok(SwStage::new(p, m, calib(&probs)?, &free))
            })
            .collect::<Result<Vec<_>>>()?;
        let (l0, m0) = ln_floor_exp(m as f64 * spec.rates[0]);
        let (l1, m1) = ln_floor_exp(m as f64 * spec.rates[1]);
        Ok(Simulator {
            spec: spec.clone(),
            codes,
            pmfs,
            model,
            outer,
            sw,
            ln_m: [l0, l1],
            m_int: [m0, m1],
            lf: ln_factorials(m),
        })
    }

    pub fn delta_outer(&self) -> Vec<f64> {
        self.outer.iter().map(|o| o.delta).collect()
    }

    pub fn delta_sw(&self) -> Vec<f64> {
        self.sw.iter().map(|s| s.delta).collect()
    }

    /// `ln` of the number of bins per encoder, `l ln M_Vj`.
    pub fn ln_bins(&self) -> [f64; 2] {
        let l = self.spec.l() as f64;
        [l * self.ln_m[0], l * self.ln_m[1]]
    }

    pub fn run_trial(&self, trial_seed: u64) -> (TrialOutcome, MatrixBlock) {
        let spec = &self.spec;
        let model = &self.model;
        let (m, l) = (spec.m, spec.l());
        let nu = model.nu;
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        let outer_seed = key(&[trial_seed, TAG_OUTER]);
        let x_seed = key(&[trial_seed, TAG_X]);
        let bin_seed = key(&[trial_seed, TAG_BIN]);
        let src = spec.source();
        let n2 = src.sizes()[1];
        let maps = spec.maps();
        let side = spec.params.side_a as usize - 1;
        let mut b = MatrixBlock::default();
        let mut budget_abort = false;

        // Sources, source code, inner code.
        for j in 0..2 {
            b.s[j] = vec![vec![0; l]; m];
            b.k[j] = vec![vec![0; l]; m];
        }
        for t in 0..m {
            for c in 0..l {
                let z = draw(src.probs(), rng.random());
                let (s1, s2) = (z / n2, z % n2);
                b.s[0][t][c] = s1;
                b.s[1][t][c] = s2;
                b.k[0][t][c] = maps[0][s1];
                b.k[1][t][c] = maps[1][s2];
            }
        }
        for j in 0..2 {
            b.a[j] = b.k[j].iter().map(|k| self.codes.encode(k)).collect();
            b.u[j] = b.a[j].iter().map(|&a| self.codes.codebook[a].clone()).collect();
        }

        // Bins and outer messages.
        let digits = self.outer_messages(&b, bin_seed, &mut rng, &mut budget_abort);
        b.outer_messages = digits;
        b.pi = (0..m)
            .map(|_| {
                let mut p: Vec<usize> = (0..l).collect();
                p.shuffle(&mut rng);
                p
            })
            .collect();
        for j in 0..2 {
            b.outer_codewords[j] = (0..l)
                .map(|i| self.codeword(outer_seed, j, i, b.outer_messages[j][i]))
                .collect();
            b.v[j] = vec![vec![0; l]; m];
            for t in 0..m {
                for i in 0..l {
                    b.v[j][t][b.pi[t][i]] = b.outer_codewords[j][i][t];
                }
            }
        }

        // Mappers and channel.
        for j in 0..2 {
            b.x[j] = vec![vec![0; l]; m];
            for t in 0..m {
                for c in 0..l {
                    let (u, v) = (b.u[j][t][c], b.v[j][t][c]);
                    let row = model.mappers[j].row(u * model.nv[j] + v);
                    let h = key(&[x_seed, j as u64, t as u64, c as u64, u as u64, v as u64]);
                    b.x[j][t][c] = draw(row, unit(h));
                }
            }
        }
        b.y = (0..m)
            .map(|t| {
                (0..l)
                    .map(|c| draw(model.law.row(b.x[0][t][c] * model.nx[1] + b.x[1][t][c]), rng.random()))
                    .collect()
            })
            .collect();

        // Stage 1: rows.
        let receivers = model.receivers();
        let k_size = self.codes.p_ka.len();
        let mut out = TrialOutcome { m, ..Default::default() };
        out.disagreements = (0..m).filter(|&t| b.a[0][t] != b.a[1][t]).count();
        for r in 0..receivers {
            let yr: Vec<Vec<usize>> =
                b.y.iter().map(|row| row.iter().map(|&y| model.proj[r][y]).collect()).collect();
            let ah: Vec<usize> =
                yr.iter().map(|row| model.decoders[r].decode(&self.codes.codebook, row, &mut rng)).collect();
            let aa = &b.a[side];
            out.inner_errors.push((0..m).filter(|&t| ah[t] != aa[t]).count());
            out.bad_rows.push((0..m).filter(|&t| ah[t] != aa[t] || b.a[0][t] != b.a[1][t]).count());
            b.khat.push(ah.iter().map(|&a| self.codes.decode(a).to_vec()).collect());
            b.ahat.push(ah);
            b.y_r.push(yr);
        }
        out.e1 = (0..receivers)
            .any(|r| out.bad_rows[r] as f64 > (1.0 + E1_MARGIN) * self.pmfs.p_bad_row[r] * m as f64);

        // Stage 2: interleaved columns.
        for r in 0..receivers {
            let stage = &self.outer[r];
            let mut errs = Vec::with_capacity(l);
            for i in 0..l {
                let mut counts = vec![0usize; stage.boxes.len()];
                let cells: Vec<usize> = (0..m)
                    .map(|t| {
                        let c = b.pi[t][i];
                        let flat = if model.is_mac {
                            (b.v[0][t][c] * model.nv[1] + b.v[1][t][c]) * model.n_out() + b.y[t][c]
                        } else {
                            let uh = self.codes.codebook[b.ahat[r][t]][c];
                            (b.v[r][t][c] * model.ny[r] + b.y_r[r][t][c]) * nu + uh
                        };
                        counts[flat] += 1;
                        flat
                    })
                    .collect();
                let truth = stage.typical(&counts);
                let ok = match self.enumerate_outer(r, i, &b, &cells, outer_seed, &mut budget_abort) {
                    Some((member, others)) => tie_success(member, others, spec.tie, &mut rng),
                    None => {
                        let wrong = self.outer_wrong(r, &counts, &mut rng);
                        tie_success(truth, wrong, spec.tie, &mut rng)
                    }
                };
                errs.push(!ok);
            }
            out.outer_errors.push(errs);
        }
        let outer_ok = |r: usize| !out.outer_errors[r].iter().any(|&e| e);
        out.e2 = (0..receivers).any(|r| !outer_ok(r));

        // Stage 3: Slepian-Wolf.
        let skeys: [Vec<u64>; 2] = [
            b.s[0].iter().map(|s| seq_key(s, src.sizes()[0])).collect(),
            b.s[1].iter().map(|s| seq_key(s, src.sizes()[1])).collect(),
        ];
        for r in 0..receivers {
            if !outer_ok(r) {
                out.sw_success.push(false);
                continue;
            }
            let kh: Vec<u64> = b.khat[r].iter().map(|k| seq_key(k, k_size)).collect();
            let mut counts: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
            for t in 0..m {
                let tuple = if model.is_mac { vec![skeys[0][t], skeys[1][t], kh[t]] } else { vec![skeys[r][t], kh[t]] };
                *counts.entry(tuple).or_insert(0) += 1;
            }
            let stage = &self.sw[r];
            let truth = stage.typical(&counts);
            let ok = match self.enumerate_sw(r, &b, &skeys, &kh, bin_seed, &mut budget_abort) {
                Some((member, others)) => tie_success(member, others, spec.tie, &mut rng),
                None => {
                    let wrong = if truth { self.sw_wrong(r, &counts, &mut rng) } else { 0 };
                    tie_success(truth, wrong, spec.tie, &mut rng)
                }
            };
            out.sw_success.push(ok);
        }
        out.e3 = !out.e2 && out.sw_success.iter().any(|&s| !s);
        out.success = !out.e2 && out.sw_success.iter().all(|&s| s);
        out.budget_abort = budget_abort;
        (out, b)
    }

    /// Outer codeword symbol `t` of message `msg` on stream `i` of encoder `j`.
    fn codeword(&self, outer_seed: u64, j: usize, i: usize, msg: u64) -> Vec<usize> {
        (0..self.spec.m)
            .map(|t| draw(&self.model.p_v[j], unit(key(&[outer_seed, j as u64, i as u64, msg, t as u64]))))
            .collect()
    }

    fn end_to_end(&self) -> bool {
        self.spec.mode == SimMode::EndToEnd
    }

    /// Bin index of each source matrix, written in base `M_Vj` as `l` digits.
    /// Component mode draws uniform digits instead.
    fn outer_messages(&self, b: &MatrixBlock, bin_seed: u64, rng: &mut ChaCha8Rng, abort: &mut bool) -> [Vec<u64>; 2] {
        let l = self.spec.l();
        let mut out: [Vec<u64>; 2] = [Vec::new(), Vec::new()];
        for j in 0..2 {
            let digits = match (self.end_to_end(), self.m_int[j]) {
                (true, Some(mj)) => match bin_of(&b.s[j], bin_seed, j, mj, l) {
                    Some(d) => Some(d),
                    None => {
                        *abort = true;
                        None
                    }
                },
                (true, None) => {
                    *abort = true;
                    None
                }
                _ => None,
            };
            out[j] = digits.unwrap_or_else(|| {
                (0..l)
                    .map(|_| match self.m_int[j] {
                        Some(mj) => rng.random_range(0..mj),
                        None => rng.random(),
                    })
                    .collect()
            });
        }
        out
    }

    /// Wrong candidates of a column decoder that pass the typicality test.
    fn outer_wrong(&self, r: usize, counts: &[usize], rng: &mut ChaCha8Rng) -> u64 {
        let stage = &self.outer[r];
        let pv = &self.model.p_v;
        if self.model.is_mac {
            let ln_w1 = ln_minus_one(self.ln_m[0]);
            let ln_w2 = ln_minus_one(self.ln_m[1]);
            let p1 = stage.ln_p_fill(counts, &[0], &[pv[0].clone()], &self.lf);
            let p2 = stage.ln_p_fill(counts, &[1], &[pv[1].clone()], &self.lf);
            let p12 = stage.ln_p_fill(counts, &[0, 1], &[pv[0].clone(), pv[1].clone()], &self.lf);
            sample_count(ln_w1, p1, rng)
                .saturating_add(sample_count(ln_w2, p2, rng))
                .saturating_add(sample_count(ln_w1 + ln_w2, p12, rng))
        } else {
            let p = stage.ln_p_fill(counts, &[0], &[pv[r].clone()], &self.lf);
            sample_count(ln_minus_one(self.ln_m[r]), p, rng)
        }
    }

    /// Wrong source candidates that are typical and land in the true bins.
    fn sw_wrong(&self, r: usize, counts: &BTreeMap<Vec<u64>, usize>, rng: &mut ChaCha8Rng) -> u64 {
        let stage = &self.sw[r];
        let lb = self.ln_bins();
        if self.model.is_mac {
            let c1 = stage.ln_count(0, counts, &self.lf);
            let c2 = stage.ln_count(1, counts, &self.lf);
            let c12 = stage.ln_count(2, counts, &self.lf);
            // Pairs with both coordinates wrong: C12 - C1 - C2 + 1.
            let ln_single = log_add(c1, c2);
            let ln_sub = ln_minus_one(ln_single.max(0.0));
            let both = if c12 <= ln_sub + 1e-12 { f64::NEG_INFINITY } else { c12 + (-(ln_sub - c12).exp()).ln_1p() };
            sample_count(ln_minus_one(c1.max(0.0)), -lb[0], rng)
                .saturating_add(sample_count(ln_minus_one(c2.max(0.0)), -lb[1], rng))
                .saturating_add(sample_count(both, -lb[0] - lb[1], rng))
        } else {
            let c = stage.ln_count(0, counts, &self.lf);
            sample_count(ln_minus_one(c.max(0.0)), -lb[r], rng)
        }
    }

    /// Exhaustive column decoding: `Some((true message typical, other
    /// typical candidates))`, or `None` in component mode or past the budget.
    fn enumerate_outer(
        &self,
        r: usize,
        i: usize,
        b: &MatrixBlock,
        cells: &[usize],
        outer_seed: u64,
        abort: &mut bool,
    ) -> Option<(bool, u64)> {
        if !self.end_to_end() {
            return None;
        }
        let model = &self.model;
        let stage = &self.outer[r];
        let m = self.spec.m;
        let users: Vec<usize> = if model.is_mac { vec![0, 1] } else { vec![r] };
        let sizes: Vec<u64> = users.iter().map(|&j| self.m_int[j].unwrap_or(u64::MAX)).collect();
        let total = sizes.iter().fold(1u128, |t, &s| t.saturating_mul(s as u128));
        if total > self.spec.search_budget as u128 {
            *abort = true;
            return None;
        }
        let books: Vec<Vec<Vec<usize>>> = users
            .iter()
            .zip(&sizes)
            .map(|(&j, &n)| (0..n).map(|msg| self.codeword(outer_seed, j, i, msg)).collect())
            .collect();
        let truth: Vec<u64> = users.iter().map(|&j| b.outer_messages[j][i]).collect();
        // Observed part of each cell, with the candidate coordinates zeroed.
        let mut member = false;
        let mut others = 0u64;
        let mut counts = vec![0usize; stage.boxes.len()];
        let mut cand = vec![0u64; users.len()];
        loop {
            counts.iter_mut().for_each(|c| *c = 0);
            for t in 0..m {
                let flat = if model.is_mac {
                    let y = cells[t] % model.n_out();
                    (books[0][cand[0] as usize][t] * model.nv[1] + books[1][cand[1] as usize][t]) * model.n_out() + y
                } else {
                    let rest = cells[t] % (model.ny[r] * model.nu);
                    books[0][cand[0] as usize][t] * model.ny[r] * model.nu + rest
                };
                counts[flat] += 1;
            }
            if stage.typical(&counts) {
                if cand == truth {
                    member = true;
                } else {
                    others += 1;
                }
            }
            let mut d = cand.len();
            loop {
                if d == 0 {
                    return Some((member, others));
                }
                d -= 1;
                cand[d] += 1;
                if cand[d] < sizes[d] {
                    break;
                }
                cand[d] = 0;
            }
        }
    }

    /// Exhaustive Slepian-Wolf decoding over candidate source matrices that
    /// agree with the support row by row.
    fn enumerate_sw(
        &self,
        r: usize,
        b: &MatrixBlock,
        skeys: &[Vec<u64>; 2],
        kh: &[u64],
        bin_seed: u64,
        abort: &mut bool,
    ) -> Option<(bool, u64)> {
        if !self.end_to_end() {
            return None;
        }
        let model = &self.model;
        let m = self.spec.m;
        let l = self.spec.l();
        let stage = &self.sw[r];
        let users: Vec<usize> = if model.is_mac { vec![0, 1] } else { vec![r] };
        let mut mj = Vec::new();
        for &j in &users {
            match self.m_int[j] {
                Some(v) => mj.push(v),
                None => {
                    *abort = true;
                    return None;
                }
            }
        }
        // Per-row candidate tuples.
        let mut rows: Vec<Vec<Vec<u64>>> = Vec::with_capacity(m);
        for t in 0..m {
            let c: Vec<Vec<u64>> = stage
                .boxes
                .keys()
                .filter(|k| *k.last().unwrap() == kh[t])
                .map(|k| k[..k.len() - 1].to_vec())
                .collect();
            rows.push(c);
        }
        let total = rows.iter().fold(1u128, |t, c| t.saturating_mul(c.len() as u128));
        if total > self.spec.search_budget as u128 || total == 0 {
            if total > 0 {
                *abort = true;
                return None;
            }
            return Some((false, 0));
        }
        let sizes = self.spec.source().sizes();
        let true_bins: Vec<Vec<u64>> = users.iter().map(|&j| b.outer_messages[j].clone()).collect();
        let truth: Vec<Vec<u64>> = (0..m)
            .map(|t| users.iter().map(|&j| skeys[j][t]).collect())
            .collect();
        let mut idx = vec![0usize; m];
        let mut member = false;
        let mut others = 0u64;
        loop {
            let cand: Vec<&Vec<u64>> = (0..m).map(|t| &rows[t][idx[t]]).collect();
            let bins_match = users.iter().enumerate().all(|(ui, &j)| {
                let mat: Vec<Vec<usize>> = cand.iter().map(|c| super::key_seq(c[ui], sizes[j], l)).collect();
                bin_of(&mat, bin_seed, j, mj[ui], l).as_ref() == Some(&true_bins[ui])
            });
            if bins_match {
                let mut counts: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
                for t in 0..m {
                    let mut k = cand[t].clone();
                    k.push(kh[t]);
                    *counts.entry(k).or_insert(0) += 1;
                }
                if stage.typical(&counts) {
                    if (0..m).all(|t| *cand[t] == truth[t]) {
                        member = true;
                    } else {
                        others += 1;
                    }
                }
            }
            let mut d = m;
            loop {
                if d == 0 {
                    return Some((member, others));
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < rows[d].len() {
                    break;
                }
                idx[d] = 0;
            }
        }
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Uniform bin of a source matrix among `mj^l` bins, as `l` base-`mj` digits.
/// `None` when the bin count does not fit in 128 bits.
fn bin_of(s: &[Vec<usize>], bin_seed: u64, j: usize, mj: u64, l: usize) -> Option<Vec<u64>> {
    let bins = (mj as u128).checked_pow(l as u32)?;
    let mut h1 = key(&[bin_seed, j as u64, 1]);
    let mut h2 = key(&[bin_seed, j as u64, 2]);
    for row in s {
        for &x in row {
            h1 = key(&[h1, x as u64]);
            h2 = key(&[h2, x as u64, 7]);
        }
    }
    let mut v = (((h1 as u128) << 64) | h2 as u128) % bins;
    let mut d = vec![0u64; l];
    for i in (0..l).rev() {
        d[i] = (v % mj as u128) as u64;
        v /= mj as u128;
    }
    Some(d)
}

pub fn run_mac_trial(spec: &CodeEnsembleSpec, seed: u64) -> Result<(TrialOutcome, MatrixBlock)> {
    if !matches!(spec.assignment, super::Assignment::Mac(_)) {
        return Err(FblError::Config("run_mac_trial needs a MAC assignment".into()));
    }
    Ok(Simulator::new(spec)?.run_trial(seed))
}

pub fn run_ic_trial(spec: &CodeEnsembleSpec, seed: u64) -> Result<(TrialOutcome, MatrixBlock)> {
    if !matches!(spec.assignment, super::Assignment::Ic(_)) {
        return Err(FblError::Config("run_ic_trial needs an IC assignment".into()));
    }
    Ok(Simulator::new(spec)?.run_trial(seed))
}

#[cfg(test)]
mod tests {
    use super::super::toys;
    use super::*;
    use crate::info_core::sequence_type;

    #[test]
    fn trial_is_deterministic_and_consistent() {
        let spec = toys::gkw_noiseless_mac(16);
        let sim = Simulator::new(&spec).unwrap();
        let (o1, b1) = sim.run_trial(5);
        let (o2, b2) = sim.run_trial(5);
        assert_eq!(o1, o2);
        assert_eq!(b1, b2);
        let l = spec.l();
        for j in 0..2 {
            for t in 0..spec.m {
                assert_eq!(sequence_type(&b1.u[j][t], 4).counts, vec![1, 1, 1, 1]);
                for i in 0..l {
                    assert_eq!(b1.v[j][t][b1.pi[t][i]], b1.outer_codewords[j][i][t]);
                }
            }
        }
        assert!(!o1.success || o1.sw_success.iter().all(|&s| s));
    }

    #[test]
    fn noiseless_common_part_has_no_row_errors() {
        let sim = Simulator::new(&toys::gkw_noiseless_mac(16)).unwrap();
        for seed in 0..20 {
            let (o, b) = sim.run_trial(seed);
            assert_eq!(o.disagreements, 0);
            assert_eq!(o.inner_errors, vec![0]);
            assert_eq!(b.khat[0], b.k[0]);
            assert!(!o.e1);
        }
    }

    #[test]
    fn zero_rates_fail_slepian_wolf() {
        let mut spec = toys::gkw_noiseless_mac(16);
        spec.rates = [0.0, 0.0];
        let sim = Simulator::new(&spec).unwrap();
        let fails = (0..20).filter(|&s| !sim.run_trial(s).0.success).count();
        assert_eq!(fails, 20);
    }

    #[test]
    fn ic_trial_runs() {
        let spec = toys::gkw_noiseless_ic(16);
        let (o, b) = run_ic_trial(&spec, 3).unwrap();
        assert_eq!(o.sw_success.len(), 2);
        assert_eq!(o.outer_errors.len(), 2);
        assert_eq!(b.y_r.len(), 2);
        assert!(run_mac_trial(&spec, 3).is_err());
    }

    #[test]
    fn end_to_end_runs_at_tiny_m() {
        let mut spec = toys::binary_adder_mac(2);
        spec.mode = SimMode::EndToEnd;
        spec.rates = [0.6, 0.6];
        let sim = Simulator::new(&spec).unwrap();
        let mut aborts = 0;
        for seed in 0..10 {
            let (o, _) = sim.run_trial(seed);
            aborts += o.budget_abort as usize;
        }
        assert_eq!(aborts, 0);
    }

    #[test]
    fn count_sampler_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(sample_count(f64::NEG_INFINITY, 0.0, &mut rng), 0);
        assert_eq!(sample_count(3f64.ln(), 0.0, &mut rng), 3);
        assert!(sample_count(200.0, -10.0, &mut rng) > 1000);
        assert_eq!(ln_floor_exp(0.0), (0.0, Some(1)));
        assert!(ln_minus_one(0.0) == f64::NEG_INFINITY);
        assert!((ln_minus_one(2f64.ln())).abs() < 1e-15);
    }
}
