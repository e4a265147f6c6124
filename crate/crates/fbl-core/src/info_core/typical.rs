// SPDX-License-Identifier: Apache-2.0
//! Types and relative-tolerance typical sets.
//!
//! `u^l` is typical when `|N(b|u^l) - l p(b)| <= delta l p(b)` for every
//! symbol `b`. A zero-probability symbol therefore must not occur at all.

use super::{check_budget, Pmf};
use crate::error::{FblError, Result};
use serde::{Deserialize, Serialize};

const COUNT_EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceType {
    pub counts: Vec<usize>,
    pub length: usize,
}

pub fn sequence_type(x: &[usize], alphabet_size: usize) -> SequenceType {
    let mut counts = vec![0; alphabet_size];
    for &s in x {
        counts[s] += 1;
    }
    SequenceType { counts, length: x.len() }
}

/// True iff `l p(u)` is an integer for every `u`.
pub fn is_integer_type(p: &Pmf, l: u64) -> bool {
    p.probs().iter().all(|&q| {
        let c = q * l as f64;
        (c - c.round()).abs() <= COUNT_EPS * (1.0 + c.abs())
    })
}

/// Typicality of a count vector against arbitrary cell probabilities.
pub fn counts_typical(counts: &[usize], probs: &[f64], delta: f64) -> bool {
    let n: usize = counts.iter().sum();
    counts.iter().zip(probs).all(|(&c, &p)| {
        let e = n as f64 * p;
        (c as f64 - e).abs() <= delta * e + COUNT_EPS
    })
}

pub fn is_typical(seq: &[usize], p: &Pmf, delta: f64) -> bool {
    counts_typical(&sequence_type(seq, p.len()).counts, p.probs(), delta)
}

/// All typical sequences, in lexicographic order.
pub fn typical_set(p: &Pmf, l: usize, delta: f64) -> Result<Vec<Vec<usize>>> {
    if l == 0 || delta <= 0.0 {
        return Err(FblError::Param("typical_set needs l >= 1 and delta > 0".into()));
    }
    let a = p.len();
    let total = (a as u128).checked_pow(l as u32).unwrap_or(u128::MAX);
    check_budget("typical-set enumeration", total)?;
    // Admissible count range per symbol; recurse over compositions first so the
    // enumeration cost tracks |T| rather than a^l when the set is small.
    let lf = l as f64;
    let ranges: Vec<(usize, usize)> = p
        .probs()
        .iter()
        .map(|&q| {
            let lo = (lf * q * (1.0 - delta) - COUNT_EPS).ceil().max(0.0) as usize;
            let hi = (lf * q * (1.0 + delta) + COUNT_EPS).floor().min(lf) as usize;
            (lo, hi)
        })
        .collect();
    let mut out = Vec::new();
    let mut counts = vec![0usize; a];
    let mut seq = Vec::with_capacity(l);
    fn rec(
        l: usize,
        ranges: &[(usize, usize)],
        counts: &mut Vec<usize>,
        seq: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if seq.len() == l {
            if counts.iter().zip(ranges).all(|(c, (lo, hi))| c >= lo && c <= hi) {
                out.push(seq.clone());
            }
            return;
        }
        let remaining = l - seq.len();
        // Prune: remaining positions must be able to fill every lower bound.
        let deficit: usize =
            counts.iter().zip(ranges).map(|(c, (lo, _))| lo.saturating_sub(*c)).sum();
        if deficit > remaining {
            return;
        }
        for s in 0..ranges.len() {
            if counts[s] < ranges[s].1 {
                counts[s] += 1;
                seq.push(s);
                rec(l, ranges, counts, seq, out);
                seq.pop();
                counts[s] -= 1;
            }
        }
    }
    rec(l, &ranges, &mut counts, &mut seq, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all_sequences(a: usize, l: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..l {
            out = out
                .into_iter()
                .flat_map(|s| {
                    (0..a).map(move |x| {
                        let mut t = s.clone();
                        t.push(x);
                        t
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn sequence_type_counts() {
        assert_eq!(sequence_type(&[0, 0, 1], 2).counts, vec![2, 1]);
    }

    #[test]
    fn integer_type_checks() {
        assert!(!is_integer_type(&Pmf::uniform(2), 3));
        assert!(is_integer_type(&Pmf::uniform(2), 4));
        assert!(is_integer_type(&Pmf::new(vec![0.75, 0.25]).unwrap(), 4));
    }

    #[test]
    fn quarter_three_quarter_example() {
        let p = Pmf::new(vec![0.75, 0.25]).unwrap();
        let t = typical_set(&p, 4, 0.5).unwrap();
        let expect: Vec<Vec<usize>> = all_sequences(2, 4)
            .into_iter()
            .filter(|s| sequence_type(s, 2).counts == vec![3, 1])
            .collect();
        assert_eq!(t, expect);
    }

    #[test]
    fn large_delta_gives_everything() {
        let p = Pmf::new(vec![0.5, 0.3, 0.2]).unwrap();
        assert_eq!(typical_set(&p, 3, 10.0).unwrap().len(), 27);
    }

    #[test]
    fn zero_probability_symbol_excluded() {
        let p = Pmf::new(vec![0.5, 0.5, 0.0]).unwrap();
        let t = typical_set(&p, 3, 10.0).unwrap();
        assert_eq!(t.len(), 8);
        assert!(t.iter().all(|s| !s.contains(&2)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn predicate_agrees_with_enumeration(
            raw in proptest::collection::vec(0.0f64..1.0, 1..=4),
            l in 1usize..=6,
            delta in 0.01f64..1.5,
        ) {
            let s: f64 = raw.iter().sum();
            prop_assume!(s > 1e-3);
            let p = Pmf::new(raw.iter().map(|x| x / s).collect()).unwrap();
            let a = p.len();
            prop_assume!(a.pow(l as u32) <= 100_000);
            let t = typical_set(&p, l, delta).unwrap();
            let brute: Vec<Vec<usize>> =
                all_sequences(a, l).into_iter().filter(|s| is_typical(s, &p, delta)).collect();
            prop_assert_eq!(t, brute);
        }
    }
}
