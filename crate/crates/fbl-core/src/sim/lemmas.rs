// SPDX-License-Identifier: Apache-2.0
//! Exact checks of the interleaving and decoding-pmf identities by full
//! enumeration on micro instances.

use super::codes::build_codes;
use super::pmfs::{build_with, Model};
use super::{key_seq, toys, Assignment, CodeEnsembleSpec};
use crate::error::{FblError, Result};
use crate::info_core::{counts_typical, Channel, JointPmf, Pmf};
use crate::regions::MacAssignment;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::str::FromStr;

/// Agreement required of both sides.
pub const LEMMA_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaCheck {
    pub name: String,
    pub instance: String,
    pub max_abs_diff: f64,
    pub pass: bool,
}

impl LemmaCheck {
    fn new(name: &str, instance: String, diff: f64) -> Self {
        LemmaCheck { name: name.into(), instance, max_abs_diff: diff, pass: diff <= LEMMA_TOL }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LemmaReport {
    pub checks: Vec<LemmaCheck>,
    pub pass: bool,
}

impl LemmaReport {
    fn from(checks: Vec<LemmaCheck>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        LemmaReport { checks, pass }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LemmaGroup {
    /// Interleaving and constant composition.
    A,
    /// Decoding pmfs.
    B,
    /// The interleaving construct identity.
    G,
    All,
}

impl FromStr for LemmaGroup {
    type Err = FblError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(LemmaGroup::A),
            "b" => Ok(LemmaGroup::B),
            "g" => Ok(LemmaGroup::G),
            "all" => Ok(LemmaGroup::All),
            _ => Err(FblError::Param(format!("unknown lemma group '{s}' (a, b, g, all)"))),
        }
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Row-major digits of `idx` in base `n`, `len` of them.
fn digits(mut idx: usize, n: usize, len: usize) -> Vec<usize> {
    let mut d = vec![0; len];
    for i in (0..len).rev() {
        d[i] = idx % n;
        idx /= n;
    }
    d
}

fn flat(d: &[usize], n: usize) -> usize {
    d.iter().fold(0, |a, &x| a * n + x)
}

/// `(1/l) sum_i p_{A_i}` for a pmf on `A^l` stored row-major.
fn coordinate_mixture(p: &[f64], a: usize, l: usize) -> Vec<f64> {
    let mut mix = vec![0.0; a];
    for (idx, &q) in p.iter().enumerate() {
        for s in digits(idx, a, l) {
            mix[s] += q / l as f64;
        }
    }
    mix
}

fn product_pmf(single: &[f64], m: usize) -> Vec<f64> {
    let a = single.len();
    (0..a.pow(m as u32)).map(|x| digits(x, a, m).iter().map(|&s| single[s]).product()).collect()
}

fn check_row_pmf(p: &JointPmf) -> Result<(usize, usize)> {
    let s = p.sizes();
    let a = s[0];
    if s.iter().any(|&n| n != a) {
        return Err(FblError::Shape("row pmf needs equal alphabets".into()));
    }
    Ok((a, s.len()))
}

/// Independent uniform coordinates `Lambda_t` of IID rows give IID symbols
/// with the coordinate mixture.
pub fn lemma3(p: &JointPmf, m: usize) -> Result<LemmaCheck> {
    let (a, l) = check_row_pmf(p)?;
    let probs = p.probs();
    let mut lhs = vec![0.0; a.pow(m as u32)];
    let rows = probs.len();
    // Sum over matrices (one row index per t) and coordinate choices.
    for mat in 0..rows.pow(m as u32) {
        let r = digits(mat, rows, m);
        let pm: f64 = r.iter().map(|&x| probs[x]).product();
        if pm == 0.0 {
            continue;
        }
        let rd: Vec<Vec<usize>> = r.iter().map(|&x| digits(x, a, l)).collect();
        for lam in 0..l.pow(m as u32) {
            let ls = digits(lam, l, m);
            let out: Vec<usize> = (0..m).map(|t| rd[t][ls[t]]).collect();
            lhs[flat(&out, a)] += pm / (l.pow(m as u32)) as f64;
        }
    }
    let rhs = product_pmf(&coordinate_mixture(probs, a, l), m);
    Ok(LemmaCheck::new("lemma3", format!("|A|={a} l={l} m={m}"), max_diff(&lhs, &rhs)))
}

/// Uniform random permutations per row: every interleaved column has the
/// product of coordinate mixtures.
pub fn lemma4(p: &JointPmf, m: usize) -> Result<LemmaCheck> {
    let (a, l) = check_row_pmf(p)?;
    let probs = p.probs();
    let perms = toys::permutations(l);
    let np = perms.len();
    let rows = probs.len();
    let mut lhs = vec![vec![0.0; a.pow(m as u32)]; l];
    let w = 1.0 / (np.pow(m as u32)) as f64;
    for mat in 0..rows.pow(m as u32) {
        let r = digits(mat, rows, m);
        let pm: f64 = r.iter().map(|&x| probs[x]).product();
        if pm == 0.0 {
            continue;
        }
        let rd: Vec<Vec<usize>> = r.iter().map(|&x| digits(x, a, l)).collect();
        for lam in 0..np.pow(m as u32) {
            let ls = digits(lam, np, m);
            for (i, col) in lhs.iter_mut().enumerate() {
                let out: Vec<usize> = (0..m).map(|t| rd[t][perms[ls[t]][i]]).collect();
                col[flat(&out, a)] += pm * w;
            }
        }
    }
    let rhs = product_pmf(&coordinate_mixture(probs, a, l), m);
    let diff = lhs.iter().map(|c| max_diff(c, &rhs)).fold(0.0, f64::max);
    Ok(LemmaCheck::new("lemma4", format!("|A|={a} l={l} m={m}"), diff))
}

/// A uniform coordinate of a constant-composition codeword has the type,
/// whatever the message pmf.
pub fn lemma5(codebook: &[Vec<usize>], msg: &[f64], p_u: &Pmf) -> Result<LemmaCheck> {
    let l = codebook.first().map_or(0, |c| c.len());
    if l == 0 || codebook.len() != msg.len() {
        return Err(FblError::Shape("codebook and message pmf disagree".into()));
    }
    let mut lhs = vec![0.0; p_u.len()];
    for (c, &q) in codebook.iter().zip(msg) {
        for &u in c {
            lhs[u] += q / l as f64;
        }
    }
    Ok(LemmaCheck::new(
        "lemma5",
        format!("M={} l={l}", codebook.len()),
        max_diff(&lhs, p_u.probs()),
    ))
}

/// Items 1 to 4 of the decoding-pmf properties, from the exact row pmf of a
/// MAC spec against independently assembled single-letter laws.
pub fn lemma6(spec: &CodeEnsembleSpec) -> Result<Vec<LemmaCheck>> {
    let a = match &spec.assignment {
        Assignment::Mac(a) => a.clone(),
        Assignment::Ic(_) => return Err(FblError::Config("lemma6 takes a MAC spec".into())),
    };
    let codes = build_codes(spec, spec.seed)?;
    let model = Model::new(&spec.assignment)?;
    let pm = build_with(spec, &codes, &model)?;
    let row = pm.row_pmf.ok_or(FblError::Budget {
        what: "row pmf".into(),
        needed: 0,
        budget: super::pmfs::ROW_PMF_CAP,
    })?;
    let l = spec.l();
    let nu = a.p_u.len();
    let (nv1, nv2) = (a.p_v1.len(), a.p_v2.len());
    let (nx1, nx2, ny) = (a.x1_mapper.n_out(), a.x2_mapper.n_out(), a.channel.n_out());
    let tag = |s: &str| format!("{s} l={l}");
    let mut out = Vec::new();

    // Item 1: V1^l V2^l is IID p_V1 p_V2.
    let mut pv = BTreeMap::new();
    for (k, &p) in &row.cells {
        *pv.entry((k[2], k[3])).or_insert(0.0) += p;
    }
    let mut d1 = 0.0f64;
    for k1 in 0..nv1.pow(l as u32) as u64 {
        for k2 in 0..nv2.pow(l as u32) as u64 {
            let v1 = key_seq(k1, nv1, l);
            let v2 = key_seq(k2, nv2, l);
            let q: f64 = (0..l).map(|i| a.p_v1.probs()[v1[i]] * a.p_v2.probs()[v2[i]]).product();
            d1 = d1.max((pv.get(&(k1, k2)).copied().unwrap_or(0.0) - q).abs());
        }
    }
    out.push(LemmaCheck::new("lemma6.1", tag("V1^l V2^l product"), d1));

    // Item 2: a uniform coordinate has the script mixture, built here from
    // the coordinate pmf of (U1, U2) and the single-letter laws.
    let letter = |u1: usize, u2: usize, v1: usize, v2: usize, x1: usize, x2: usize, y: usize| {
        a.p_v1.probs()[v1]
            * a.p_v2.probs()[v2]
            * a.x1_mapper.get(u1 * nv1 + v1, x1)
            * a.x2_mapper.get(u2 * nv2 + v2, x2)
            * a.channel.get(x1 * nx2 + x2, y)
    };
    let sizes = [nu, nu, nv1, nv2, nx1, nx2, ny];
    let script = JointPmf::from_fn(&sizes, |s| {
        pm.coord_uu[s[0] * nu + s[1]] * letter(s[0], s[1], s[2], s[3], s[4], s[5], s[6])
    })?;
    let mut coord = vec![0.0; script.probs().len()];
    let digit_sizes = [nu, nu, nv1, nv2, nx1, nx2, ny];
    for (k, &p) in &row.cells {
        let seqs: Vec<Vec<usize>> = k.iter().zip(digit_sizes).map(|(&kk, n)| key_seq(kk, n, l)).collect();
        for i in 0..l {
            let sym: Vec<usize> = seqs.iter().map(|s| s[i]).collect();
            coord[script.index_of(&sym)] += p / l as f64;
        }
    }
    out.push(LemmaCheck::new("lemma6.2", tag("random coordinate"), max_diff(&coord, script.probs())));

    // Item 3: the script V_j marginals are p_Vj.
    let sp = JointPmf::new(&sizes, coord)?;
    let d3 = max_diff(&sp.marginal_probs(&[2])?, a.p_v1.probs()).max(max_diff(&sp.marginal_probs(&[3])?, a.p_v2.probs()));
    out.push(LemmaCheck::new("lemma6.3", tag("script V marginals"), d3));

    // Item 4: conditionals given U1^l = U2^l = u^l.
    let mut puu: BTreeMap<(u64, u64), f64> = BTreeMap::new();
    let mut pyuu: BTreeMap<(u64, u64, u64), f64> = BTreeMap::new();
    for (k, &p) in &row.cells {
        *puu.entry((k[0], k[1])).or_insert(0.0) += p;
        *pyuu.entry((k[0], k[1], k[6])).or_insert(0.0) += p;
    }
    // p_{U1^l U2^l} is the message pmf pushed through the codebook.
    let mut d4a = 0.0f64;
    let mut from_msgs: BTreeMap<(u64, u64), f64> = BTreeMap::new();
    for (&(a1, a2), &p) in &pm.messages {
        let k = (super::seq_key(&codes.codebook[a1], nu), super::seq_key(&codes.codebook[a2], nu));
        *from_msgs.entry(k).or_insert(0.0) += p;
    }
    for (k, &p) in &from_msgs {
        d4a = d4a.max((puu.get(k).copied().unwrap_or(0.0) - p).abs());
    }
    out.push(LemmaCheck::new("lemma6.4a", tag("U1^l U2^l marginal"), d4a));
    let p_y_u = |u: usize, y: usize| -> f64 {
        let mut s = 0.0;
        for v1 in 0..nv1 {
            for v2 in 0..nv2 {
                for x1 in 0..nx1 {
                    for x2 in 0..nx2 {
                        s += letter(u, u, v1, v2, x1, x2, y);
                    }
                }
            }
        }
        s
    };
    let mut d4b = 0.0f64;
    let mut d4c = 0.0f64;
    for (&(k1, k2), &pu) in &puu {
        if k1 != k2 || pu == 0.0 {
            continue;
        }
        let u = key_seq(k1, nu, l);
        for (k, &p) in row.cells.range(vec![k1, k2]..vec![k1, k2 + 1]) {
            let seqs: Vec<Vec<usize>> = k.iter().zip(digit_sizes).map(|(&kk, n)| key_seq(kk, n, l)).collect();
            let q: f64 = (0..l)
                .map(|i| letter(u[i], u[i], seqs[2][i], seqs[3][i], seqs[4][i], seqs[5][i], seqs[6][i]))
                .product();
            d4b = d4b.max((p / pu - q).abs());
        }
        for yk in 0..ny.pow(l as u32) as u64 {
            let y = key_seq(yk, ny, l);
            let q: f64 = (0..l).map(|i| p_y_u(u[i], y[i])).product();
            let lhs = pyuu.get(&(k1, k2, yk)).copied().unwrap_or(0.0) / pu;
            d4c = d4c.max((lhs - q).abs());
        }
    }
    out.push(LemmaCheck::new("lemma6.4b", tag("p(v,x,y|u,u) product"), d4b));
    out.push(LemmaCheck::new("lemma6.4c", tag("p(y^l|u^l,u^l) product"), d4c));
    Ok(out)
}

/// Single-letter pieces `p_A`, `p_{B1|A}`, `p_{B2|A}`, `p_{C|B1 B2}`.
#[derive(Clone, Debug)]
pub struct Lemma7Instance {
    pub p_a: Pmf,
    pub b1: Channel,
    pub b2: Channel,
    pub c: Channel,
    pub codebook: Vec<Vec<usize>>,
    /// `P(M1 = i, M2 = j)` at `i * M + j`.
    pub messages: Vec<f64>,
}

/// Conditioned on `A1^l = A2^l`, a uniform coordinate has the single-letter
/// joint `p_A p_{B1|A} p_{B2|A} p_{C|B1 B2}`.
pub fn lemma7(inst: &Lemma7Instance) -> Result<LemmaCheck> {
    let na = inst.p_a.len();
    let (nb1, nb2, nc) = (inst.b1.n_out(), inst.b2.n_out(), inst.c.n_out());
    let nm = inst.codebook.len();
    let l = inst.codebook.first().map_or(0, |c| c.len());
    if nm == 0 || inst.messages.len() != nm * nm {
        return Err(FblError::Shape("message pmf must be M x M".into()));
    }
    let sizes = [na, na, nb1, nb2, nc];
    let mut lhs = vec![0.0; sizes.iter().product()];
    let idx = |s: &[usize]| s.iter().zip(&sizes).fold(0, |acc, (&x, &n)| acc * n + x);
    let mut p_j = 0.0;
    let cell_card = nb1 * nb2 * nc;
    for m1 in 0..nm {
        for m2 in 0..nm {
            let pmsg = inst.messages[m1 * nm + m2];
            let (a1, a2) = (&inst.codebook[m1], &inst.codebook[m2]);
            if pmsg == 0.0 || a1 != a2 {
                continue;
            }
            p_j += pmsg;
            // Full enumeration over (b1^l, b2^l, c^l).
            for z in 0..cell_card.pow(l as u32) {
                let cells = digits(z, cell_card, l);
                let sym: Vec<(usize, usize, usize)> =
                    cells.iter().map(|&c| (c / (nb2 * nc), (c / nc) % nb2, c % nc)).collect();
                let p: f64 = (0..l)
                    .map(|i| {
                        let (x1, x2, y) = sym[i];
                        inst.b1.get(a1[i], x1) * inst.b2.get(a2[i], x2) * inst.c.get(x1 * nb2 + x2, y)
                    })
                    .product();
                if p == 0.0 {
                    continue;
                }
                for i in 0..l {
                    let (x1, x2, y) = sym[i];
                    lhs[idx(&[a1[i], a2[i], x1, x2, y])] += pmsg * p / l as f64;
                }
            }
        }
    }
    if p_j == 0.0 {
        return Err(FblError::Param("P(A1^l = A2^l) is zero".into()));
    }
    lhs.iter_mut().for_each(|v| *v /= p_j);
    let mut rhs = vec![0.0; lhs.len()];
    for a in 0..na {
        for x1 in 0..nb1 {
            for x2 in 0..nb2 {
                for y in 0..nc {
                    rhs[idx(&[a, a, x1, x2, y])] =
                        inst.p_a.probs()[a] * inst.b1.get(a, x1) * inst.b2.get(a, x2) * inst.c.get(x1 * nb2 + x2, y);
                }
            }
        }
    }
    Ok(LemmaCheck::new("lemma7", format!("M={nm} l={l} |A|={na}"), max_diff(&lhs, &rhs)))
}

/// Interleaving construct: the probability that a column picked by uniform
/// coordinates is atypical equals the IID probability under the mixture.
pub fn appendix_g_identity(p: &JointPmf, m: usize, delta: f64) -> Result<LemmaCheck> {
    // Factors alternate A_1, B_1, A_2, B_2, ...
    let s = p.sizes();
    if s.len() % 2 != 0 || s.is_empty() {
        return Err(FblError::Shape("pmf must be on (A x B)^l".into()));
    }
    let l = s.len() / 2;
    let (na, nb) = (s[0], s[1]);
    if (0..l).any(|i| s[2 * i] != na || s[2 * i + 1] != nb) {
        return Err(FblError::Shape("alphabets must repeat across coordinates".into()));
    }
    let nab = na * nb;
    let probs = p.probs();
    // Mixture over (a, b).
    let mut mix = vec![0.0; nab];
    for (r, &q) in probs.iter().enumerate() {
        for pair in digits(r, nab, l) {
            mix[pair] += q / l as f64;
        }
    }
    let atypical = |col: &[usize]| {
        let mut c = vec![0usize; nab];
        for &x in col {
            c[x] += 1;
        }
        !counts_typical(&c, &mix, delta)
    };
    let rows = probs.len();
    let mut lhs = 0.0;
    let lm = l.pow(m as u32);
    for mat in 0..rows.pow(m as u32) {
        let r = digits(mat, rows, m);
        let pm: f64 = r.iter().map(|&x| probs[x]).product();
        if pm == 0.0 {
            continue;
        }
        let rd: Vec<Vec<usize>> = r.iter().map(|&x| digits(x, nab, l)).collect();
        for alpha in 0..lm {
            let al = digits(alpha, l, m);
            let col: Vec<usize> = (0..m).map(|t| rd[t][al[t]]).collect();
            if atypical(&col) {
                lhs += pm / lm as f64;
            }
        }
    }
    let mut rhs = 0.0;
    for x in 0..nab.pow(m as u32) {
        let col = digits(x, nab, m);
        if atypical(&col) {
            rhs += col.iter().map(|&c| mix[c]).product::<f64>();
        }
    }
    Ok(LemmaCheck::new(
        "appendix_g",
        format!("|A|={na} |B|={nb} l={l} m={m} delta={delta}"),
        (lhs - rhs).abs(),
    ))
}

fn random_probs(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| 0.05 + rng.random::<f64>()).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

fn random_channel(n_in: usize, n_out: usize, rng: &mut ChaCha8Rng) -> Result<Channel> {
    Channel::new((0..n_in).map(|_| random_probs(n_out, rng)).collect())
}

/// Random row pmf on `A^l` with a few zero cells.
fn random_row_pmf(a: usize, l: usize, rng: &mut ChaCha8Rng) -> Result<JointPmf> {
    let n = a.pow(l as u32);
    let mut w = random_probs(n, rng);
    if n > 3 {
        w[rng.random_range(0..n)] = 0.0;
    }
    let s: f64 = w.iter().sum();
    JointPmf::new(&vec![a; l], w.iter().map(|x| x / s).collect())
}

pub fn verify_interleaving_lemmas(seed: u64) -> Result<LemmaReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    for (a, l, m) in [(2, 2, 2), (3, 2, 2), (2, 3, 3), (3, 3, 2), (3, 2, 3)] {
        let p = random_row_pmf(a, l, &mut rng)?;
        checks.push(lemma3(&p, m)?);
    }
    for (a, l, m) in [(2, 2, 2), (3, 2, 3), (2, 3, 3), (3, 3, 2)] {
        let p = random_row_pmf(a, l, &mut rng)?;
        checks.push(lemma4(&p, m)?);
    }
    // Type (1/2, 1/2) at l = 2, and a ternary type at l = 3.
    checks.push(lemma5(&[vec![0, 1], vec![1, 0]], &random_probs(2, &mut rng), &Pmf::uniform(2))?);
    let perms = toys::permutations(3);
    checks.push(lemma5(&perms, &random_probs(perms.len(), &mut rng), &Pmf::uniform(3))?);
    let cb = vec![vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]];
    checks.push(lemma5(&cb, &random_probs(3, &mut rng), &Pmf::new(vec![2.0 / 3.0, 1.0 / 3.0])?)?);
    Ok(LemmaReport::from(checks))
}

pub fn verify_appendix_g(seed: u64) -> Result<LemmaReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6);
    let mut checks = Vec::new();
    for (na, nb, l, m, delta) in [(2, 2, 2, 2, 0.5), (2, 2, 2, 3, 0.3), (2, 3, 2, 2, 0.8), (2, 2, 3, 2, 0.4), (3, 2, 2, 2, 1.0)] {
        let sizes: Vec<usize> = (0..2 * l).map(|i| if i % 2 == 0 { na } else { nb }).collect();
        let n: usize = sizes.iter().product();
        let p = JointPmf::new(&sizes, random_probs(n, &mut rng))?;
        checks.push(appendix_g_identity(&p, m, delta)?);
    }
    Ok(LemmaReport::from(checks))
}

/// A noisy binary MAC with a symmetric correlated source, `l = 2`.
pub fn micro_mac_spec(seed: u64) -> Result<CodeEnsembleSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = 0.05 + 0.4 * rng.random::<f64>();
    let mut spec = toys::binary_adder_mac(2);
    let a = MacAssignment {
        source: JointPmf::new(&[2, 2], vec![c, 0.5 - c, 0.5 - c, c])?,
        f1: vec![0, 1],
        f2: vec![0, 1],
        p_u: Pmf::uniform(2),
        p_v1: Pmf::new(random_probs(2, &mut rng))?,
        p_v2: Pmf::new(random_probs(2, &mut rng))?,
        x1_mapper: random_channel(4, 2, &mut rng)?,
        x2_mapper: random_channel(4, 2, &mut rng)?,
        channel: random_channel(4, 3, &mut rng)?,
    };
    spec.assignment = Assignment::Mac(a);
    spec.seed = seed;
    spec.validate()?;
    Ok(spec)
}

pub fn verify_decoding_pmf_lemmas(seed: u64) -> Result<LemmaReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xB);
    let mut checks = Vec::new();
    checks.extend(lemma6(&toys::binary_adder_mac(2))?);
    for s in 0..2 {
        checks.extend(lemma6(&micro_mac_spec(seed.wrapping_add(s))?)?);
    }
    // Singleton message set.
    let single = Lemma7Instance {
        p_a: Pmf::uniform(2),
        b1: random_channel(2, 2, &mut rng)?,
        b2: random_channel(2, 2, &mut rng)?,
        c: random_channel(4, 2, &mut rng)?,
        codebook: vec![vec![0, 1]],
        messages: vec![1.0],
    };
    checks.push(lemma7(&single)?);
    // Two codewords of type (1/2, 1/2), arbitrary joint message pmf.
    let two = Lemma7Instance { codebook: vec![vec![0, 1], vec![1, 0]], messages: random_probs(4, &mut rng), ..single };
    checks.push(lemma7(&two)?);
    // Ternary type at l = 3.
    let perms = toys::permutations(3);
    let three = Lemma7Instance {
        p_a: Pmf::uniform(3),
        b1: random_channel(3, 2, &mut rng)?,
        b2: random_channel(3, 2, &mut rng)?,
        c: random_channel(4, 3, &mut rng)?,
        codebook: perms[..3].to_vec(),
        messages: random_probs(9, &mut rng),
    };
    checks.push(lemma7(&three)?);
    Ok(LemmaReport::from(checks))
}

pub fn verify_lemmas(group: LemmaGroup, seed: u64) -> Result<LemmaReport> {
    let mut checks = Vec::new();
    if matches!(group, LemmaGroup::A | LemmaGroup::All) {
        checks.extend(verify_interleaving_lemmas(seed)?.checks);
    }
    if matches!(group, LemmaGroup::B | LemmaGroup::All) {
        checks.extend(verify_decoding_pmf_lemmas(seed)?.checks);
    }
    if matches!(group, LemmaGroup::G | LemmaGroup::All) {
        checks.extend(verify_appendix_g(seed)?.checks);
    }
    Ok(LemmaReport::from(checks))
}
