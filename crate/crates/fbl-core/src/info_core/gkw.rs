// SPDX-License-Identifier: Apache-2.0
//! Gacs-Korner-Witsenhausen common part via connected components of the
//! bipartite support graph.

use super::JointPmf;
use crate::error::{FblError, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GkwPart {
    /// Number of values of K, including the reserved component if used.
    pub k_size: usize,
    pub f1: Vec<usize>,
    pub f2: Vec<usize>,
    /// Component that collects zero-marginal symbols, when any exist.
    pub reserved: Option<usize>,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let n = self.0[c];
            self.0[c] = r;
            c = n;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

pub fn gkw_decomposition(j: &JointPmf) -> Result<GkwPart> {
    let sizes = j.sizes();
    if sizes.len() != 2 {
        return Err(FblError::Shape("GKW part needs a two-factor joint".into()));
    }
    let (n1, n2) = (sizes[0], sizes[1]);
    // Nodes 0..n1 are S1 symbols, n1..n1+n2 are S2 symbols.
    let mut dsu = Dsu((0..n1 + n2).collect());
    let mut live = vec![false; n1 + n2];
    for s1 in 0..n1 {
        for s2 in 0..n2 {
            if j.prob(&[s1, s2]) > 0.0 {
                dsu.union(s1, n1 + s2);
                live[s1] = true;
                live[n1 + s2] = true;
            }
        }
    }
    let mut ids = std::collections::BTreeMap::new();
    let mut label = vec![usize::MAX; n1 + n2];
    for v in 0..n1 + n2 {
        if live[v] {
            let r = dsu.find(v);
            let next = ids.len();
            label[v] = *ids.entry(r).or_insert(next);
        }
    }
    let mut k_size = ids.len();
    let reserved = if live.iter().any(|x| !x) {
        k_size += 1;
        Some(k_size - 1)
    } else {
        None
    };
    for v in 0..n1 + n2 {
        if !live[v] {
            label[v] = reserved.unwrap();
        }
    }
    Ok(GkwPart { k_size, f1: label[..n1].to_vec(), f2: label[n1..].to_vec(), reserved })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn diagonal_support() {
        let j = JointPmf::from_fn(&[3, 3], |s| if s[0] == s[1] { 1.0 / 3.0 } else { 0.0 }).unwrap();
        let g = gkw_decomposition(&j).unwrap();
        assert_eq!(g.k_size, 3);
        assert_eq!(g.f1, vec![0, 1, 2]);
        assert_eq!(g.f2, vec![0, 1, 2]);
    }

    #[test]
    fn full_support_is_trivial() {
        let j = JointPmf::from_fn(&[2, 3], |_| 1.0 / 6.0).unwrap();
        assert_eq!(gkw_decomposition(&j).unwrap().k_size, 1);
    }

    #[test]
    fn zero_marginal_symbols_reserved() {
        let j = JointPmf::from_fn(&[3, 2], |s| if s[0] == s[1] { 0.5 } else { 0.0 }).unwrap();
        let g = gkw_decomposition(&j).unwrap();
        assert_eq!(g.k_size, 3);
        assert_eq!(g.reserved, Some(2));
        assert_eq!(g.f1[2], 2);
    }

    fn set_partitions(n: usize) -> Vec<Vec<usize>> {
        // Restricted growth strings.
        let mut out = Vec::new();
        let mut cur = vec![0usize; n];
        fn rec(i: usize, mx: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if i == cur.len() {
                out.push(cur.clone());
                return;
            }
            for b in 0..=mx + 1 {
                cur[i] = b;
                rec(i + 1, mx.max(b), cur, out);
            }
        }
        if n == 0 {
            return vec![vec![]];
        }
        rec(1, 0, &mut cur, &mut out);
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn gkw_is_common_and_maximal(
            n1 in 1usize..=5,
            n2 in 1usize..=5,
            mask in proptest::collection::vec(0.0f64..1.0, 25),
        ) {
            let raw: Vec<f64> = (0..n1 * n2)
                .map(|i| if mask[i] < 0.55 { 0.0 } else { mask[i] })
                .collect();
            let s: f64 = raw.iter().sum();
            prop_assume!(s > 0.0);
            let j = JointPmf::new(&[n1, n2], raw.iter().map(|x| x / s).collect()).unwrap();
            let g = gkw_decomposition(&j).unwrap();
            // Agreement almost surely.
            for (sym, _) in j.support() {
                prop_assert_eq!(g.f1[sym[0]], g.f2[sym[1]]);
            }
            // Any common function g1(S1)=g2(S2) a.s. is constant on each component,
            // so nothing strictly finer than the GKW part agrees a.s.
            for part in set_partitions(n1) {
                let mut g2: Vec<Option<usize>> = vec![None; n2];
                let mut ok = true;
                for (sym, _) in j.support() {
                    let want = part[sym[0]];
                    match g2[sym[1]] {
                        None => g2[sym[1]] = Some(want),
                        Some(v) if v != want => { ok = false; break; }
                        _ => {}
                    }
                }
                if !ok { continue; }
                for a in 0..n1 {
                    for b in 0..n1 {
                        let live = |x: usize| (0..n2).any(|y| j.prob(&[x, y]) > 0.0);
                        if live(a) && live(b) && g.f1[a] == g.f1[b] {
                            prop_assert_eq!(part[a], part[b]);
                        }
                    }
                }
            }
        }
    }
}
