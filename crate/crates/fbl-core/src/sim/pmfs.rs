// SPDX-License-Identifier: Apache-2.0
//! Exact pmfs the decoders test against.

use super::codes::{build_codes, CodeBundle, RowDecoder};
use super::{checked_pow, seq_key, Assignment, CodeEnsembleSpec};
use crate::error::{FblError, Result};
use crate::info_core::{budget_cells, Channel, JointPmf};
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;

/// Row enumerations above this many cells leave `row_pmf` empty.
pub(crate) const ROW_PMF_CAP: u128 = 1 << 20;

/// A pmf over tuples of super-symbols, stored by support.
#[derive(Clone, Debug, PartialEq)]
pub struct SparsePmf {
    pub names: Vec<String>,
    pub cells: BTreeMap<Vec<u64>, f64>,
}

impl SparsePmf {
    pub fn new(names: &[&str]) -> Self {
        SparsePmf { names: names.iter().map(|s| s.to_string()).collect(), cells: BTreeMap::new() }
    }

    pub(crate) fn add(&mut self, k: Vec<u64>, p: f64) {
        if p > 0.0 {
            *self.cells.entry(k).or_insert(0.0) += p;
        }
    }

    pub fn prob(&self, k: &[u64]) -> f64 {
        self.cells.get(k).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.cells.values().sum()
    }

    pub fn support_size(&self) -> usize {
        self.cells.len()
    }
}

impl Serialize for SparsePmf {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let cells: Vec<(&Vec<u64>, &f64)> = self.cells.iter().collect();
        let mut st = s.serialize_struct("SparsePmf", 2)?;
        st.serialize_field("names", &self.names)?;
        st.serialize_field("cells", &cells)?;
        st.end()
    }
}

/// Per-letter laws of an assignment, flattened for fast lookup.
#[derive(Clone, Debug)]
pub(crate) struct Model {
    pub nu: usize,
    pub nv: [usize; 2],
    pub nx: [usize; 2],
    pub p_v: [Vec<f64>; 2],
    pub mappers: [Channel; 2],
    /// MAC channel, or the joint IC law over `(y1, y2)`.
    pub law: Channel,
    /// Receiver `r` sees `proj[r][y]` of the law output `y`.
    pub proj: Vec<Vec<usize>>,
    pub ny: Vec<usize>,
    /// `p(v1, v2, y | u1, u2)` flattened as `(v1 nv2 + v2) n_out + y`.
    pub full: Vec<Vec<f64>>,
    /// `p(y_r | u1, u2)`, indexed `[r][u1 nu + u2][y_r]`.
    pub y_given_uu: Vec<Vec<Vec<f64>>>,
    /// `p(v_r | y_r, u1, u2)` for IC receivers, `[r][u1 nu + u2][y_r nv + v]`.
    pub v_given_yuu: Vec<Vec<Vec<f64>>>,
    pub decoders: Vec<RowDecoder>,
    pub is_mac: bool,
}

impl Model {
    pub fn new(a: &Assignment) -> Result<Self> {
        a.validate()?;
        let (p_u, p_v1, p_v2, m1, m2, law, proj, ny, is_mac) = match a {
            Assignment::Mac(m) => (
                &m.p_u,
                &m.p_v1,
                &m.p_v2,
                &m.x1_mapper,
                &m.x2_mapper,
                m.channel.clone(),
                vec![(0..m.channel.n_out()).collect::<Vec<_>>()],
                vec![m.channel.n_out()],
                true,
            ),
            Assignment::Ic(m) => {
                let (n1, n2) = (m.channel.y1_size, m.channel.y2_size);
                let p0 = (0..n1 * n2).map(|y| y / n2).collect();
                let p1 = (0..n1 * n2).map(|y| y % n2).collect();
                (
                    &m.p_u,
                    &m.p_v1,
                    &m.p_v2,
                    &m.x1_mapper,
                    &m.x2_mapper,
                    m.channel.law.clone(),
                    vec![p0, p1],
                    vec![n1, n2],
                    false,
                )
            }
        };
        let nu = p_u.len();
        let nv = [p_v1.len(), p_v2.len()];
        let nx = [m1.n_out(), m2.n_out()];
        let n_out = law.n_out();
        let p_v = [p_v1.probs().to_vec(), p_v2.probs().to_vec()];
        let mut full = vec![vec![0.0; nv[0] * nv[1] * n_out]; nu * nu];
        for u1 in 0..nu {
            for u2 in 0..nu {
                let f = &mut full[u1 * nu + u2];
                for v1 in 0..nv[0] {
                    for v2 in 0..nv[1] {
                        let pv = p_v[0][v1] * p_v[1][v2];
                        if pv == 0.0 {
                            continue;
                        }
                        let base = (v1 * nv[1] + v2) * n_out;
                        for x1 in 0..nx[0] {
                            let a = m1.get(u1 * nv[0] + v1, x1);
                            if a == 0.0 {
                                continue;
                            }
                            for x2 in 0..nx[1] {
                                let b = m2.get(u2 * nv[1] + v2, x2);
                                if b == 0.0 {
                                    continue;
                                }
                                for (y, &w) in law.row(x1 * nx[1] + x2).iter().enumerate() {
                                    f[base + y] += pv * a * b * w;
                                }
                            }
                        }
                    }
                }
            }
        }
        let receivers = proj.len();
        let mut y_given_uu = vec![vec![Vec::new(); nu * nu]; receivers];
        let mut v_given_yuu = vec![vec![Vec::new(); nu * nu]; receivers];
        for r in 0..receivers {
            let nvr = nv[r];
            for uu in 0..nu * nu {
                let mut py = vec![0.0; ny[r]];
                let mut pvy = vec![0.0; ny[r] * nvr];
                for v1 in 0..nv[0] {
                    for v2 in 0..nv[1] {
                        let vr = if r == 0 { v1 } else { v2 };
                        let base = (v1 * nv[1] + v2) * n_out;
                        for y in 0..n_out {
                            let p = full[uu][base + y];
                            let yr = proj[r][y];
                            py[yr] += p;
                            pvy[yr * nvr + vr] += p;
                        }
                    }
                }
                for yr in 0..ny[r] {
                    if py[yr] > 0.0 {
                        for v in 0..nvr {
                            pvy[yr * nvr + v] /= py[yr];
                        }
                    }
                }
                y_given_uu[r][uu] = py;
                v_given_yuu[r][uu] = pvy;
            }
        }
        let decoders = (0..receivers)
            .map(|r| {
                let w: Vec<Vec<f64>> = (0..nu).map(|u| y_given_uu[r][u * nu + u].clone()).collect();
                RowDecoder::new(&w)
            })
            .collect();
        Ok(Model {
            nu,
            nv,
            nx,
            p_v,
            mappers: [m1.clone(), m2.clone()],
            law,
            proj,
            ny,
            full,
            y_given_uu,
            v_given_yuu,
            decoders,
            is_mac,
        })
    }

    pub fn receivers(&self) -> usize {
        self.proj.len()
    }

    pub fn n_out(&self) -> usize {
        self.law.n_out()
    }
}

/// Visit every sequence in the product of per-coordinate supports, with its
/// probability. Errors when the product exceeds `cap`.
pub(crate) fn for_each_product(
    lists: &[Vec<(usize, f64)>],
    cap: u128,
    what: &str,
    mut f: impl FnMut(&[usize], f64),
) -> Result<()> {
    let total = lists.iter().fold(1u128, |t, l| t.saturating_mul(l.len() as u128));
    if total > cap {
        return Err(FblError::Budget { what: what.into(), needed: total, budget: cap });
    }
    if total == 0 {
        return Ok(());
    }
    let n = lists.len();
    let mut idx = vec![0usize; n];
    let mut seq: Vec<usize> = lists.iter().map(|l| l[0].0).collect();
    loop {
        let p: f64 = (0..n).map(|i| lists[i][idx[i]].1).product();
        f(&seq, p);
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < lists[i].len() {
                seq[i] = lists[i][idx[i]].0;
                break;
            }
            idx[i] = 0;
            seq[i] = lists[i][0].0;
        }
    }
}

/// Source rows in the support: `(s1 key, s2 key, a1, a2, p)`.
pub(crate) fn source_rows(spec: &CodeEnsembleSpec, codes: &CodeBundle) -> Result<Vec<(u64, u64, usize, usize, f64)>> {
    let l = spec.l();
    let src = spec.source();
    let sizes = src.sizes();
    checked_pow(sizes[0], l, "source super-alphabet")?;
    checked_pow(sizes[1], l, "source super-alphabet")?;
    let maps = spec.maps();
    let support = src.support();
    let list: Vec<(usize, f64)> = support.iter().enumerate().map(|(i, (_, p))| (i, *p)).collect();
    let lists = vec![list; l];
    let mut out = Vec::new();
    let (mut s1, mut s2, mut k1, mut k2) = (vec![0; l], vec![0; l], vec![0; l], vec![0; l]);
    for_each_product(&lists, budget_cells(), "source rows", |seq, p| {
        for (i, &c) in seq.iter().enumerate() {
            let s = &support[c].0;
            s1[i] = s[0];
            s2[i] = s[1];
            k1[i] = maps[0][s[0]];
            k2[i] = maps[1][s[1]];
        }
        out.push((seq_key(&s1, sizes[0]), seq_key(&s2, sizes[1]), codes.encode(&k1), codes.encode(&k2), p));
    })?;
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct DecodingPmfs {
    /// `P(A1 = a1, A2 = a2)`.
    pub messages: BTreeMap<(usize, usize), f64>,
    /// `P(Ahat_r = a | a1, a2)` per receiver, over the message support.
    pub decode: Vec<BTreeMap<(usize, usize), Vec<(usize, f64)>>>,
    /// MAC: `(V1, V2, Y)`. IC: `(V_r, Y_r, Uhat_r)` per receiver.
    pub interleaved_pmf: Vec<JointPmf>,
    /// MAC: `(S1^l, S2^l, Khat^l)`. IC: `(S_r^l, Khat_r^l)` per receiver.
    pub sw_pmf: Vec<SparsePmf>,
    /// `(U1^l, U2^l, V1^l, V2^l, X1^l, X2^l, Y^l)` when small enough.
    pub row_pmf: Option<SparsePmf>,
    /// `P(A1 != A2)`.
    pub p_disagree: f64,
    /// Per receiver, `P(A1 != A2 or Ahat_r != A1)`.
    pub p_bad_row: Vec<f64>,
    /// Row-averaged coordinate pmf of `(U1, U2)`, flattened `u1 nu + u2`.
    pub coord_uu: Vec<f64>,
}

/// Exact decoder pmfs for the spec's code bundle (seeded by `spec.seed`).
pub fn build_decoding_pmfs(spec: &CodeEnsembleSpec) -> Result<DecodingPmfs> {
    let codes = build_codes(spec, spec.seed)?;
    let model = Model::new(&spec.assignment)?;
    build_with(spec, &codes, &model)
}

pub(crate) fn build_with(spec: &CodeEnsembleSpec, codes: &CodeBundle, model: &Model) -> Result<DecodingPmfs> {
    let l = spec.l();
    let nu = model.nu;
    let rows = source_rows(spec, codes)?;
    let mut messages: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for r in &rows {
        *messages.entry((r.2, r.3)).or_insert(0.0) += r.4;
    }
    let mut coord_uu = vec![0.0; nu * nu];
    for (&(a1, a2), &p) in &messages {
        for i in 0..l {
            coord_uu[codes.codebook[a1][i] * nu + codes.codebook[a2][i]] += p / l as f64;
        }
    }
    let receivers = model.receivers();
    let mut decode = vec![BTreeMap::new(); receivers];
    let mut interleaved = Vec::new();
    let k_size = codes.p_ka.len();
    let mut ic_q: Vec<Vec<f64>> =
        (0..receivers).map(|r| vec![0.0; model.nv[r] * model.ny[r] * nu]).collect();
    for r in 0..receivers {
        let ny = model.ny[r];
        let nvr = model.nv[r];
        for (&(a1, a2), &pa) in &messages {
            let (c1, c2) = (&codes.codebook[a1], &codes.codebook[a2]);
            let lists: Vec<Vec<(usize, f64)>> = (0..l)
                .map(|i| {
                    let py = &model.y_given_uu[r][c1[i] * nu + c2[i]];
                    (0..ny).filter(|&y| py[y] > 0.0).map(|y| (y, py[y])).collect()
                })
                .collect();
            let mut dist = vec![0.0; codes.messages()];
            let dec = &model.decoders[r];
            for_each_product(&lists, budget_cells(), "output sequences", |y, py| {
                let set = dec.argmax(&codes.codebook, y);
                let w = py / set.len() as f64;
                for &a in &set {
                    dist[a] += w;
                }
                if !model.is_mac {
                    for i in 0..l {
                        let pv = &model.v_given_yuu[r][c1[i] * nu + c2[i]];
                        for v in 0..nvr {
                            let q = pv[y[i] * nvr + v];
                            if q == 0.0 {
                                continue;
                            }
                            for &a in &set {
                                let uh = codes.codebook[a][i];
                                ic_q[r][(v * ny + y[i]) * nu + uh] += pa * w * q / l as f64;
                            }
                        }
                    }
                }
            })?;
            let d: Vec<(usize, f64)> = dist.into_iter().enumerate().filter(|(_, p)| *p > 0.0).collect();
            decode[r].insert((a1, a2), d);
        }
        if !model.is_mac {
            interleaved.push(JointPmf::new(&[nvr, ny, nu], std::mem::take(&mut ic_q[r]))?);
        }
    }
    if model.is_mac {
        let n_out = model.n_out();
        let mut q = vec![0.0; model.nv[0] * model.nv[1] * n_out];
        for (uu, &p) in coord_uu.iter().enumerate() {
            if p > 0.0 {
                for (c, &f) in model.full[uu].iter().enumerate() {
                    q[c] += p * f;
                }
            }
        }
        interleaved.push(JointPmf::new(&[model.nv[0], model.nv[1], n_out], q)?);
    }
    // Slepian-Wolf pmfs.
    let mut sw: Vec<SparsePmf> = if model.is_mac {
        vec![SparsePmf::new(&["s1", "s2", "khat"])]
    } else {
        vec![SparsePmf::new(&["s1", "khat1"]), SparsePmf::new(&["s2", "khat2"])]
    };
    let khat_keys: Vec<u64> = codes.typical.iter().map(|k| seq_key(k, k_size)).collect();
    for &(s1, s2, a1, a2, p) in &rows {
        for r in 0..receivers {
            for &(ah, w) in &decode[r][&(a1, a2)] {
                let kh = khat_keys[ah];
                if model.is_mac {
                    sw[0].add(vec![s1, s2, kh], p * w);
                } else {
                    sw[r].add(vec![if r == 0 { s1 } else { s2 }, kh], p * w);
                }
            }
        }
    }
    let p_disagree: f64 = messages.iter().filter(|((a1, a2), _)| a1 != a2).map(|(_, p)| p).sum();
    let p_bad_row = (0..receivers)
        .map(|r| {
            let good: f64 = messages
                .iter()
                .filter(|((a1, a2), _)| a1 == a2)
                .map(|(&(a1, a2), &p)| {
                    p * decode[r][&(a1, a2)].iter().find(|(a, _)| *a == a1).map_or(0.0, |x| x.1)
                })
                .sum();
            (1.0 - good).max(0.0)
        })
        .collect();
    let row_pmf = row_pmf(spec, codes, model, &messages).ok();
    Ok(DecodingPmfs {
        messages,
        decode,
        interleaved_pmf: interleaved,
        sw_pmf: sw,
        row_pmf,
        p_disagree,
        p_bad_row,
        coord_uu,
    })
}

/// Exact row pmf over `(U1^l, U2^l, V1^l, V2^l, X1^l, X2^l, Y^l)`, with `Y`
/// the full channel output (the `(y1, y2)` pair for the IC).
pub(crate) fn row_pmf(
    spec: &CodeEnsembleSpec,
    codes: &CodeBundle,
    model: &Model,
    messages: &BTreeMap<(usize, usize), f64>,
) -> Result<SparsePmf> {
    let l = spec.l();
    let (nu, nv, nx, n_out) = (model.nu, model.nv, model.nx, model.n_out());
    for n in [nu, nv[0], nv[1], nx[0], nx[1], n_out] {
        checked_pow(n, l, "row super-alphabet")?;
    }
    // Per-letter cells (v1, v2, x1, x2, y) given (u1, u2), encoded in one index.
    let cell = |v1: usize, v2: usize, x1: usize, x2: usize, y: usize| {
    ((((v1 * nv[1] + v2) * nx[0] + x1) * nx[1] + x2) * n_out) + y
    };
    let mut letter: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nu * nu];
    for u1 in 0..nu {
        for u2 in 0..nu {
            let out = &mut letter[u1 * nu + u2];
            for v1 in 0..nv[0] {
                for v2 in 0..nv[1] {
                    let pv = model.p_v[0][v1] * model.p_v[1][v2];
                    for x1 in 0..nx[0] {
                        for x2 in 0..nx[1] {
                            let px = model.mappers[0].get(u1 * nv[0] + v1, x1)
                                * model.mappers[1].get(u2 * nv[1] + v2, x2);
                            for y in 0..n_out {
                                let p = pv * px * model.law.get(x1 * nx[1] + x2, y);
                                if p > 0.0 {
                                    out.push((cell(v1, v2, x1, x2, y), p));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let mut pmf = SparsePmf::new(&["u1", "u2", "v1", "v2", "x1", "x2", "y"]);
    let mut total_cells: u128 = 0;
    for (&(a1, a2), _) in messages.iter() {
        let (c1, c2) = (&codes.codebook[a1], &codes.codebook[a2]);
        total_cells += (0..l).fold(1u128, |t, i| t.saturating_mul(letter[c1[i] * nu + c2[i]].len() as u128));
    }
    if total_cells > ROW_PMF_CAP {
        return Err(FblError::Budget { what: "row pmf".into(), needed: total_cells, budget: ROW_PMF_CAP });
    }
    let mut parts = vec![vec![0usize; l]; 5];
    for (&(a1, a2), &pa) in messages.iter() {
        let (c1, c2) = (&codes.codebook[a1], &codes.codebook[a2]);
        let lists: Vec<Vec<(usize, f64)>> = (0..l).map(|i| letter[c1[i] * nu + c2[i]].clone()).collect();
        let (k1, k2) = (seq_key(c1, nu), seq_key(c2, nu));
        for_each_product(&lists, ROW_PMF_CAP, "row pmf", |seq, p| {
            for (i, &c) in seq.iter().enumerate() {
                let mut c = c;
                parts[4][i] = c % n_out;
                c /= n_out;
                parts[3][i] = c % nx[1];
                c /= nx[1];
                parts[2][i] = c % nx[0];
                c /= nx[0];
                parts[1][i] = c % nv[1];
                parts[0][i] = c / nv[1];
            }
            pmf.add(
                vec![
                    k1,
                    k2,
                    seq_key(&parts[0], nv[0]),
                    seq_key(&parts[1], nv[1]),
                    seq_key(&parts[2], nx[0]),
                    seq_key(&parts[3], nx[1]),
                    seq_key(&parts[4], n_out),
                ],
                pa * p,
            );
        })?;
    }
    Ok(pmf)
}
