// SPDX-License-Identifier: Apache-2.0
//! Finite-alphabet probability algebra.
//!
//! Everything is in nats. `0 log 0 = 0`.

mod gkw;
mod joint;
mod typical;

pub use gkw::{gkw_decomposition, GkwPart};
pub use joint::JointPmf;
pub use typical::{
    counts_typical, is_integer_type, is_typical, sequence_type, typical_set, SequenceType,
};

use crate::error::{FblError, Result};
use serde::{Deserialize, Serialize};

/// Renormalization tolerance for user-supplied probability vectors.
pub const NORM_TOL: f64 = 1e-9;
pub const DEFAULT_BUDGET_CELLS: u128 = 1 << 24;

/// Dense-table budget, overridable through `FBL_BUDGET_CELLS`.
pub fn budget_cells() -> u128 {
    std::env::var("FBL_BUDGET_CELLS")
        .ok()
        .and_then(|v| v.trim().parse::<u128>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_BUDGET_CELLS)
}

pub(crate) fn check_budget(what: &str, needed: u128) -> Result<()> {
    let budget = budget_cells();
    if needed > budget {
        return Err(FblError::Budget { what: what.to_string(), needed, budget });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    size: usize,
    labels: Option<Vec<String>>,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(FblError::Shape("alphabet size must be at least 1".into()));
        }
        Ok(Alphabet { size, labels: None })
    }

    pub fn labeled(labels: Vec<String>) -> Result<Self> {
        if labels.is_empty() {
            return Err(FblError::Shape("alphabet size must be at least 1".into()));
        }
        let mut sorted = labels.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != labels.len() {
            return Err(FblError::Shape("alphabet labels must be distinct".into()));
        }
        // Default labels are stored as unlabeled so serialization is canonical.
        if labels.iter().enumerate().all(|(i, l)| *l == i.to_string()) {
            return Ok(Alphabet { size: labels.len(), labels: None });
        }
        Ok(Alphabet { size: labels.len(), labels: Some(labels) })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.size).map(|i| self.label(i)).collect()
    }
}

fn validate_probs(probs: &[f64]) -> Result<Vec<f64>> {
    if probs.is_empty() {
        return Err(FblError::InvalidPmf("empty probability vector".into()));
    }
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(FblError::InvalidPmf(format!("entry {p} is not a probability")));
    }
    let s: f64 = probs.iter().sum();
    if (s - 1.0).abs() > NORM_TOL {
        return Err(FblError::InvalidPmf(format!("probabilities sum to {s}")));
    }
    Ok(renormalize(probs, s))
}

/// Divide by the sum unless it is already 1 up to rounding, so decimal
/// inputs echo exactly on re-serialization.
pub(crate) fn renormalize(probs: &[f64], s: f64) -> Vec<f64> {
    if (s - 1.0).abs() <= 4.0 * f64::EPSILON * probs.len() as f64 {
        probs.to_vec()
    } else {
        probs.iter().map(|p| p / s).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Pmf {
    alphabet: Alphabet,
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let probs = validate_probs(&probs)?;
        Ok(Pmf { alphabet: Alphabet::new(probs.len())?, probs })
    }

    pub fn with_alphabet(alphabet: Alphabet, probs: Vec<f64>) -> Result<Self> {
        if alphabet.size() != probs.len() {
            return Err(FblError::Shape(format!(
                "alphabet has {} symbols but {} probabilities given",
                alphabet.size(),
                probs.len()
            )));
        }
        let probs = validate_probs(&probs)?;
        Ok(Pmf { alphabet, probs })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1);
        Pmf { alphabet: Alphabet { size: n, labels: None }, probs: vec![1.0 / n as f64; n] }
    }

    pub fn point(n: usize, at: usize) -> Self {
        let mut probs = vec![0.0; n];
        probs[at] = 1.0;
        Pmf { alphabet: Alphabet { size: n, labels: None }, probs }
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        Pmf::new(vec![1.0 - p, p])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Least positive probability, if any.
    pub fn min_positive(&self) -> Option<f64> {
        self.probs.iter().cloned().filter(|&p| p > 0.0).fold(None, |acc, p| {
            Some(match acc {
                Some(a) if a <= p => a,
                _ => p,
            })
        })
    }
}

pub fn entropy(p: &Pmf) -> f64 {
    entropy_of_slice(p.probs())
}

pub(crate) fn entropy_of_slice(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

/// `h_b(mu)` in nats.
pub fn binary_entropy(mu: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(FblError::Param(format!("binary entropy argument {mu} outside [0,1]")));
    }
    Ok(hb(mu))
}

pub(crate) fn hb(mu: f64) -> f64 {
    if mu <= 0.0 || mu >= 1.0 {
        return 0.0;
    }
    -mu * mu.ln() - (1.0 - mu) * (-mu).ln_1p()
}

/// Divergence result; `Infinite` when absolute continuity fails on the support of p.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Divergence {
    Finite(f64),
    Infinite,
}

impl Divergence {
    pub fn value(self) -> f64 {
        match self {
            Divergence::Finite(v) => v,
            Divergence::Infinite => f64::INFINITY,
        }
    }
}

/// Stochastic matrix. Row `x` is the conditional pmf of the output given input `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    input: Alphabet,
    output: Alphabet,
    rows: Vec<Vec<f64>>,
}

impl Channel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_out = rows.first().map(|r| r.len()).unwrap_or(0);
        let input = Alphabet::new(rows.len())
            .map_err(|_| FblError::InvalidChannel("no rows".into()))?;
        let output = Alphabet::new(n_out)
            .map_err(|_| FblError::InvalidChannel("empty rows".into()))?;
        Self::with_alphabets(input, output, rows)
    }

    pub fn with_alphabets(input: Alphabet, output: Alphabet, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != input.size() {
            return Err(FblError::InvalidChannel(format!(
                "{} rows for an input alphabet of size {}",
                rows.len(),
                input.size()
            )));
        }
        let mut clean = Vec::with_capacity(rows.len());
        for (x, r) in rows.iter().enumerate() {
            if r.len() != output.size() {
                return Err(FblError::InvalidChannel(format!(
                    "row {x} has {} entries, expected {}",
                    r.len(),
                    output.size()
                )));
            }
            clean.push(
                validate_probs(r).map_err(|e| FblError::InvalidChannel(format!("row {x}: {e}")))?,
            );
        }
        Ok(Channel { input, output, rows: clean })
    }

    /// Build from a function giving `W(y|x)`; rows must already be normalized.
    pub fn from_fn(n_in: usize, n_out: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        Channel::new((0..n_in).map(|x| (0..n_out).map(|y| f(x, y)).collect()).collect())
    }

    pub fn noiseless(n: usize) -> Self {
        Channel::deterministic(n, n, |x| x)
    }

    pub fn deterministic(n_in: usize, n_out: usize, f: impl Fn(usize) -> usize) -> Self {
        let rows = (0..n_in)
            .map(|x| {
                let mut r = vec![0.0; n_out];
                r[f(x)] = 1.0;
                r
            })
            .collect();
        Channel {
            input: Alphabet { size: n_in, labels: None },
            output: Alphabet { size: n_out, labels: None },
            rows,
        }
    }

    pub fn bsc(eps: f64) -> Result<Self> {
        Channel::new(vec![vec![1.0 - eps, eps], vec![eps, 1.0 - eps]])
    }

    pub fn n_in(&self) -> usize {
        self.input.size()
    }

    pub fn n_out(&self) -> usize {
        self.output.size()
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.rows[x]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.rows[x][y]
    }

    pub fn output_dist(&self, p: &Pmf) -> Vec<f64> {
        let mut q = vec![0.0; self.n_out()];
        for (x, px) in p.probs().iter().enumerate() {
            if *px > 0.0 {
                for (y, w) in self.rows[x].iter().enumerate() {
                    q[y] += px * w;
                }
            }
        }
        q
    }

    /// Relabel outputs: new output `perm[y]` receives the mass of old `y`.
    pub fn permute_outputs(&self, perm: &[usize]) -> Channel {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut n = vec![0.0; r.len()];
                for (y, w) in r.iter().enumerate() {
                    n[perm[y]] = *w;
                }
                n
            })
            .collect();
        Channel { input: self.input.clone(), output: Alphabet { size: self.n_out(), labels: None }, rows }
    }
}

pub fn mutual_information_pw(p: &Pmf, w: &Channel) -> f64 {
    let q = w.output_dist(p);
    let mut i = 0.0;
    for (x, px) in p.probs().iter().enumerate() {
        if *px <= 0.0 {
            continue;
        }
        for (y, wyx) in w.row(x).iter().enumerate() {
            if *wyx > 0.0 {
                i += px * wyx * (wyx / q[y]).ln();
            }
        }
    }
    i.max(0.0)
}

/// `sum_u p(u) D(V(.|u) || W(.|u))`.
pub fn conditional_kl(v: &Channel, w: &Channel, p: &Pmf) -> Result<Divergence> {
    if v.n_in() != w.n_in() || v.n_out() != w.n_out() || p.len() != v.n_in() {
        return Err(FblError::Shape("conditional_kl operands have different shapes".into()));
    }
    let mut d = 0.0;
    for (u, pu) in p.probs().iter().enumerate() {
        if *pu <= 0.0 {
            continue;
        }
        for y in 0..v.n_out() {
            let a = v.get(u, y);
            if a <= 0.0 {
                continue;
            }
            let b = w.get(u, y);
            if b <= 0.0 {
                return Ok(Divergence::Infinite);
            }
            d += pu * a * (a / b).ln();
        }
    }
    Ok(Divergence::Finite(d.max(0.0)))
}

// ---- JSON forms -------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct PmfJson {
    alphabet: Vec<serde_json::Value>,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ChannelJson {
    input: Vec<serde_json::Value>,
    output: Vec<serde_json::Value>,
    rows: Vec<Vec<f64>>,
}

fn labels_from_json(v: &[serde_json::Value]) -> Result<Alphabet> {
    let labels = v
        .iter()
        .map(|x| match x {
            serde_json::Value::String(s) => s.clone(),
            other => other.to_string(),
        })
        .collect();
    Alphabet::labeled(labels)
}

fn labels_to_json(a: &Alphabet) -> Vec<serde_json::Value> {
    match &a.labels {
        Some(l) => l.iter().map(|s| serde_json::Value::String(s.clone())).collect(),
        None => (0..a.size()).map(|i| serde_json::Value::from(i as u64)).collect(),
    }
}

impl Serialize for Pmf {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PmfJson { alphabet: labels_to_json(&self.alphabet), probs: self.probs.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Pmf {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PmfJson::deserialize(d)?;
        let a = labels_from_json(&j.alphabet).map_err(serde::de::Error::custom)?;
        Pmf::with_alphabet(a, j.probs).map_err(serde::de::Error::custom)
    }
}

impl Serialize for Channel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ChannelJson {
            input: labels_to_json(&self.input),
            output: labels_to_json(&self.output),
            rows: self.rows.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Channel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ChannelJson::deserialize(d)?;
        let i = labels_from_json(&j.input).map_err(serde::de::Error::custom)?;
        let o = labels_from_json(&j.output).map_err(serde::de::Error::custom)?;
        Channel::with_alphabets(i, o, j.rows).map_err(serde::de::Error::custom)
    }
}
