// SPDX-License-Identifier: Apache-2.0
//! Source code on the typical set and the constant-composition inner code.

use super::{key, CodeEnsembleSpec, TieMode};
use crate::error::{FblError, Result};
use crate::info_core::{is_integer_type, typical_set, Pmf};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

const TAG_CODEBOOK: u64 = 0xC0DE;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodeBundle {
    /// `T_delta^l(K_a)` in lexicographic order; message `a` is entry `a`.
    pub typical: Vec<Vec<usize>>,
    /// One codeword per message, each of exact type `p_U`.
    pub codebook: Vec<Vec<usize>>,
    pub p_ka: Pmf,
    pub seed: u64,
    #[serde(skip)]
    index: BTreeMap<Vec<usize>, usize>,
}

impl CodeBundle {
    /// `e_K`: index in the typical set, message 0 for atypical input.
    pub fn encode(&self, k: &[usize]) -> usize {
        self.index.get(k).copied().unwrap_or(0)
    }

    /// `d_K`.
    pub fn decode(&self, a: usize) -> &[usize] {
        &self.typical[a]
    }

    pub fn messages(&self) -> usize {
        self.typical.len()
    }
}

/// Composition of a type at length `l`.
pub(crate) fn composition(p: &Pmf, l: usize) -> Result<Vec<usize>> {
    if !is_integer_type(p, l as u64) {
        return Err(FblError::NotAType(format!("{:?} at l = {l}", p.probs())));
    }
    Ok(p.probs().iter().map(|q| (q * l as f64).round() as usize).collect())
}

/// Random codeword of the given composition.
pub(crate) fn shuffled(comp: &[usize], rng: &mut impl Rng) -> Vec<usize> {
    let mut w: Vec<usize> = comp.iter().enumerate().flat_map(|(u, &c)| std::iter::repeat_n(u, c)).collect();
    w.shuffle(rng);
    w
}

/// Typical-set source code for `K_a` and an inner codebook with one
/// codeword per typical sequence. Deterministic given `seed`.
pub fn build_codes(spec: &CodeEnsembleSpec, seed: u64) -> Result<CodeBundle> {
    spec.validate()?;
    let l = spec.l();
    let side = spec.params.side_a as usize - 1;
    let maps = spec.maps();
    let source = spec.source();
    let k_size = maps[0].iter().chain(maps[1]).max().map_or(1, |m| m + 1);
    let mut pk = vec![0.0; k_size];
    for (s, p) in source.support() {
        pk[maps[side][s[side]]] += p;
    }
    let p_ka = Pmf::new(pk)?;
    let typical = typical_set(&p_ka, l, spec.params.delta)?;
    if typical.is_empty() {
        return Err(FblError::EmptyTypicalSet);
    }
    let p_u = match &spec.assignment {
        super::Assignment::Mac(a) => &a.p_u,
        super::Assignment::Ic(a) => &a.p_u,
    };
    let comp = composition(p_u, l)?;
    let codebook = match &spec.codebook {
        Some(cb) => {
            if cb.len() < typical.len() {
                return Err(FblError::Config(format!(
                    "codebook has {} words, the typical set needs {}",
                    cb.len(),
                    typical.len()
                )));
            }
            for w in cb {
                let mut c = vec![0usize; comp.len()];
                for &u in w {
                    if u >= c.len() {
                        return Err(FblError::Config(format!("codebook symbol {u} out of range")));
                    }
                    c[u] += 1;
                }
                if w.len() != l || c != comp {
                    return Err(FblError::NotAType(format!("codeword {w:?} has the wrong composition")));
                }
            }
            cb[..typical.len()].to_vec()
        }
        None => (0..typical.len())
            .map(|a| {
                let mut rng = ChaCha8Rng::seed_from_u64(key(&[seed, TAG_CODEBOOK, a as u64]));
                shuffled(&comp, &mut rng)
            })
            .collect(),
    };
    let index = typical.iter().enumerate().map(|(a, k)| (k.clone(), a)).collect();
    Ok(CodeBundle { typical, codebook, p_ka, seed, index })
}

/// Maximum-likelihood row decoder for a memoryless metric `ln p(y|u)`.
#[derive(Clone, Debug)]
pub(crate) struct RowDecoder {
    ln_w: Vec<Vec<f64>>,
}

impl RowDecoder {
    /// `w[u][y]`.
    pub fn new(w: &[Vec<f64>]) -> Self {
        RowDecoder { ln_w: w.iter().map(|r| r.iter().map(|p| p.ln()).collect()).collect() }
    }

    /// The argmax set of the likelihood. If every codeword is impossible the
    /// whole codebook ties.
    pub fn argmax(&self, codebook: &[Vec<usize>], y: &[usize]) -> Vec<usize> {
        let scores: Vec<f64> = codebook
            .iter()
            .map(|c| c.iter().zip(y).map(|(&u, &yy)| self.ln_w[u][yy]).sum())
            .collect();
        let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if best == f64::NEG_INFINITY {
            return (0..codebook.len()).collect();
        }
        let tol = 1e-12 * best.abs().max(1.0);
        (0..codebook.len()).filter(|&a| scores[a] >= best - tol).collect()
    }

    pub fn decode(&self, codebook: &[Vec<usize>], y: &[usize], rng: &mut impl Rng) -> usize {
        let set = self.argmax(codebook, y);
        if set.len() == 1 {
            set[0]
        } else {
            set[rng.random_range(0..set.len())]
        }
    }
}

/// A decoder facing `n_wrong` extra candidates next to the true one decides
/// correctly with this probability.
pub(crate) fn tie_success(true_member: bool, n_wrong: u64, tie: TieMode, rng: &mut impl Rng) -> bool {
    if !true_member {
        return false;
    }
    match tie {
        TieMode::Strict => n_wrong == 0,
        TieMode::Uniform => n_wrong == 0 || rng.random::<f64>() * (n_wrong as f64 + 1.0) < 1.0,
    }
}
