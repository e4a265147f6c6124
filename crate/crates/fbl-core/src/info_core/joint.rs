// SPDX-License-Identifier: Apache-2.0
//! Dense joint pmfs over product alphabets.
//!
//! Cells are row-major with the last factor varying fastest.

use super::{check_budget, entropy_of_slice, renormalize, Alphabet, Pmf, NORM_TOL};
use crate::error::{FblError, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq)]
pub struct JointPmf {
    factors: Vec<Alphabet>,
    probs: Vec<f64>,
}

fn cells_of(sizes: &[usize]) -> u128 {
    sizes.iter().map(|&s| s as u128).product()
}

impl JointPmf {
    pub fn new(sizes: &[usize], probs: Vec<f64>) -> Result<Self> {
        let factors = sizes.iter().map(|&s| Alphabet::new(s)).collect::<Result<Vec<_>>>()?;
        Self::with_factors(factors, probs)
    }

    pub fn with_factors(factors: Vec<Alphabet>, probs: Vec<f64>) -> Result<Self> {
        let sizes: Vec<usize> = factors.iter().map(|a| a.size()).collect();
        let n = cells_of(&sizes);
        check_budget("joint pmf", n)?;
        if probs.len() as u128 != n {
            return Err(FblError::Shape(format!(
                "joint over {sizes:?} needs {n} cells, got {}",
                probs.len()
            )));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(FblError::InvalidPmf("negative or non-finite cell".into()));
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > NORM_TOL {
            return Err(FblError::InvalidPmf(format!("joint cells sum to {s}")));
        }
        Ok(JointPmf { factors, probs: renormalize(&probs, s) })
    }

    /// Fill a joint from a function of the symbol tuple. The caller is
    /// responsible for normalization up to `NORM_TOL`.
    pub fn from_fn(sizes: &[usize], f: impl Fn(&[usize]) -> f64) -> Result<Self> {
        let n = cells_of(sizes);
        check_budget("joint pmf", n)?;
        let mut probs = Vec::with_capacity(n as usize);
        let mut idx = vec![0usize; sizes.len()];
        for _ in 0..n {
            probs.push(f(&idx));
            advance(&mut idx, sizes);
        }
        Self::new(sizes, probs)
    }

    pub fn from_pmf(p: &Pmf) -> Self {
        JointPmf { factors: vec![p.alphabet().clone()], probs: p.probs().to_vec() }
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.factors.iter().map(|a| a.size()).collect()
    }

    pub fn factors(&self) -> &[Alphabet] {
        &self.factors
    }

    pub fn n_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn index_of(&self, symbols: &[usize]) -> usize {
        let mut i = 0;
        for (s, a) in symbols.iter().zip(&self.factors) {
            i = i * a.size() + s;
        }
        i
    }

    pub fn prob(&self, symbols: &[usize]) -> f64 {
        self.probs[self.index_of(symbols)]
    }

    /// Iterate `(symbols, prob)` over cells with positive mass.
    pub fn support(&self) -> Vec<(Vec<usize>, f64)> {
        let sizes = self.sizes();
        let mut idx = vec![0usize; sizes.len()];
        let mut out = Vec::new();
        for &p in &self.probs {
            if p > 0.0 {
                out.push((idx.clone(), p));
            }
            advance(&mut idx, &sizes);
        }
        out
    }

    /// Marginal table over `keep` (in the given order), as a flat vector.
    pub fn marginal_probs(&self, keep: &[usize]) -> Result<Vec<f64>> {
        let sizes = self.sizes();
        for &k in keep {
            if k >= sizes.len() {
                return Err(FblError::Shape(format!("factor {k} out of range")));
            }
        }
        let mut dup = keep.to_vec();
        dup.sort_unstable();
        dup.dedup();
        if dup.len() != keep.len() {
            return Err(FblError::OverlappingFactors(keep.to_vec()));
        }
        let out_sizes: Vec<usize> = keep.iter().map(|&k| sizes[k]).collect();
        let mut out = vec![0.0; out_sizes.iter().product()];
        // Stride of each kept factor inside the output table.
        let mut out_stride = vec![0usize; sizes.len()];
        let mut s = 1;
        for (pos, &k) in keep.iter().enumerate().rev() {
            out_stride[k] = s;
            s *= out_sizes[pos];
        }
        let mut idx = vec![0usize; sizes.len()];
        let mut o = 0usize;
        for &p in &self.probs {
            if p > 0.0 {
                out[o] += p;
            }
            // Advance idx and keep o in sync.
            for d in (0..sizes.len()).rev() {
                idx[d] += 1;
                o += out_stride[d];
                if idx[d] < sizes[d] {
                    break;
                }
                o -= out_stride[d] * sizes[d];
                idx[d] = 0;
            }
        }
        Ok(out)
    }

    pub fn marginal(&self, keep: &[usize]) -> Result<JointPmf> {
        let probs = self.marginal_probs(keep)?;
        let factors = keep.iter().map(|&k| self.factors[k].clone()).collect();
        Ok(JointPmf { factors, probs })
    }

    pub fn marginal_pmf(&self, factor: usize) -> Result<Pmf> {
        let probs = self.marginal_probs(&[factor])?;
        Pmf::with_alphabet(self.factors[factor].clone(), probs)
    }

    pub fn entropy(&self) -> f64 {
        entropy_of_slice(&self.probs)
    }

    pub fn entropy_of(&self, set: &[usize]) -> Result<f64> {
        if set.is_empty() {
            return Ok(0.0);
        }
        Ok(entropy_of_slice(&self.marginal_probs(set)?))
    }

    /// `H(target | given)`.
    pub fn conditional_entropy(&self, target: &[usize], given: &[usize]) -> Result<f64> {
        disjoint(&[target, given])?;
        let both: Vec<usize> = target.iter().chain(given).cloned().collect();
        Ok(self.entropy_of(&both)? - self.entropy_of(given)?)
    }

    /// `I(a; b | given) = H(a,g) + H(b,g) - H(a,b,g) - H(g)`.
    pub fn mutual_information(&self, a: &[usize], b: &[usize], given: &[usize]) -> Result<f64> {
        disjoint(&[a, b, given])?;
        let ag: Vec<usize> = a.iter().chain(given).cloned().collect();
        let bg: Vec<usize> = b.iter().chain(given).cloned().collect();
        let abg: Vec<usize> = a.iter().chain(b).chain(given).cloned().collect();
        Ok(self.entropy_of(&ag)? + self.entropy_of(&bg)? - self.entropy_of(&abg)?
            - self.entropy_of(given)?)
    }

    /// Total-variation distance between two joints of identical shape.
    pub fn tv_distance(&self, other: &JointPmf) -> Result<f64> {
        if self.sizes() != other.sizes() {
            return Err(FblError::Shape("tv_distance on joints of different shapes".into()));
        }
        Ok(0.5 * self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).sum::<f64>())
    }

    /// Append a factor `Z` with conditional law `ch(z | symbols)`.
    pub fn extend(&self, n_new: usize, cond: impl Fn(&[usize], usize) -> f64) -> Result<JointPmf> {
        let mut sizes = self.sizes();
        sizes.push(n_new);
        check_budget("joint pmf", cells_of(&sizes))?;
        let mut probs = Vec::with_capacity(self.probs.len() * n_new);
        let old = self.sizes();
        let mut idx = vec![0usize; old.len()];
        for &p in &self.probs {
            for z in 0..n_new {
                probs.push(if p > 0.0 { p * cond(&idx, z) } else { 0.0 });
            }
            advance(&mut idx, &old);
        }
        let mut factors = self.factors.clone();
        factors.push(Alphabet::new(n_new)?);
        JointPmf::with_factors(factors, probs)
    }

    /// Reorder factors.
    pub fn permute(&self, order: &[usize]) -> Result<JointPmf> {
        if order.len() != self.n_factors() {
            return Err(FblError::Shape("permutation length mismatch".into()));
        }
        self.marginal(order)
    }
}

pub(crate) fn advance(idx: &mut [usize], sizes: &[usize]) {
    for d in (0..sizes.len()).rev() {
        idx[d] += 1;
        if idx[d] < sizes[d] {
            return;
        }
        idx[d] = 0;
    }
}

fn disjoint(sets: &[&[usize]]) -> Result<()> {
    let mut all: Vec<usize> = sets.iter().flat_map(|s| s.iter().cloned()).collect();
    let n = all.len();
    all.sort_unstable();
    all.dedup();
    if all.len() != n {
        let mut v: Vec<usize> = sets.iter().flat_map(|s| s.iter().cloned()).collect();
        v.sort_unstable();
        let dups: Vec<usize> = v.windows(2).filter(|w| w[0] == w[1]).map(|w| w[0]).collect();
        return Err(FblError::OverlappingFactors(dups));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct JointJson {
    factors: Vec<Vec<serde_json::Value>>,
    probs: Vec<f64>,
}

impl Serialize for JointPmf {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        JointJson {
            factors: self
                .factors
                .iter()
                .map(|a| a.labels().into_iter().map(serde_json::Value::String).collect())
                .collect(),
            probs: self.probs.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for JointPmf {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = JointJson::deserialize(d)?;
        let factors = j
            .factors
            .iter()
            .map(|v| {
                Alphabet::labeled(
                    v.iter()
                        .map(|x| match x {
                            serde_json::Value::String(s) => s.clone(),
                            o => o.to_string(),
                        })
                        .collect(),
                )
            })
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        JointPmf::with_factors(factors, j.probs).map_err(serde::de::Error::custom)
    }
}
