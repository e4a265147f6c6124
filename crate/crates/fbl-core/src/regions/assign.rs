// SPDX-License-Identifier: Apache-2.0
//! Test-channel assignments and scheme parameters.
//!
//! Mapper channels index their conditioning tuple row-major, last component
//! fastest: `p_{X_j|U V_j}` has input `u * |V_j| + v`, the CHK mapper
//! `p_{X_j|U V_j W_j}` has input `(u * |V_j| + v) * |W_j| + w`, and channel
//! laws take `x1 * |X_2| + x2`.

use crate::error::{FblError, Result};
use crate::info_core::{Channel, JointPmf, Pmf};
use serde::{Deserialize, Serialize};

fn shape(msg: String) -> FblError {
    FblError::Shape(msg)
}

fn expect_rows(ch: &Channel, n: usize, what: &str) -> Result<()> {
    if ch.n_in() != n {
        return Err(shape(format!("{what} needs {n} input rows, has {}", ch.n_in())));
    }
    Ok(())
}

/// Two-receiver channel law `W_{Y1 Y2|X1 X2}` with output index `y1 * |Y2| + y2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IcChannel {
    pub y1_size: usize,
    pub y2_size: usize,
    pub law: Channel,
}

impl IcChannel {
    pub fn new(y1_size: usize, y2_size: usize, law: Channel) -> Result<Self> {
        let c = IcChannel { y1_size, y2_size, law };
        c.validate()?;
        Ok(c)
    }

    /// Two independent point-to-point channels `W_{Y1|X1} W_{Y2|X2}`.
    pub fn orthogonal(w1: &Channel, w2: &Channel) -> Self {
        let (n2, m2) = (w2.n_in(), w2.n_out());
        let law = Channel::from_fn(w1.n_in() * n2, w1.n_out() * m2, |x, y| {
            w1.get(x / n2, y / m2) * w2.get(x % n2, y % m2)
        })
        .expect("product of valid rows is valid");
        IcChannel { y1_size: w1.n_out(), y2_size: m2, law }
    }

    pub fn validate(&self) -> Result<()> {
        if self.y1_size * self.y2_size != self.law.n_out() {
            return Err(shape(format!(
                "IC law has {} outputs, expected {} x {}",
                self.law.n_out(),
                self.y1_size,
                self.y2_size
            )));
        }
        Ok(())
    }

    pub fn y_size(&self, j: usize) -> usize {
        if j == 0 {
            self.y1_size
        } else {
            self.y2_size
        }
    }

    /// `W(y1, y2 | x)` for a flat input index.
    pub fn get(&self, x: usize, y1: usize, y2: usize) -> f64 {
        self.law.get(x, y1 * self.y2_size + y2)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    pub alpha: f64,
    pub beta: f64,
    pub rho: f64,
    pub delta: f64,
    pub l: u64,
    /// Which encoder's `K_a` the conditions use (1 or 2).
    #[serde(default = "one")]
    pub side_a: u8,
}

fn one() -> u8 {
    1
}

impl SchemeParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(FblError::Param(m.into()));
        if !(self.alpha >= 0.0 && self.beta >= 0.0) {
            return bad("alpha and beta must be >= 0");
        }
        if !(self.rho > 0.0) {
            return bad("rho must be > 0");
        }
        if !(self.delta > 0.0) {
            return bad("delta must be > 0");
        }
        if self.l < 1 {
            return bad("l must be >= 1");
        }
        if self.side_a != 1 && self.side_a != 2 {
            return bad("side_a must be 1 or 2");
        }
        Ok(())
    }

    pub(crate) fn side(&self) -> usize {
        self.side_a as usize - 1
    }
}

/// Source-side quantities shared by every theorem.
#[derive(Clone, Debug)]
pub(crate) struct SourceTerms {
    pub p_ka: Pmf,
    pub h_ka: f64,
    /// `H(S_j | S_jbar, K_a)`.
    pub h_sj_given_other: [f64; 2],
    /// `H(S_j | K_a)`.
    pub h_sj_given_ka: [f64; 2],
    pub h_s_given_ka: f64,
    /// `P(K_1 != K_2)`.
    pub xi_k: f64,
    pub ln_card_s: [f64; 2],
}

fn source_terms(source: &JointPmf, f: [&[usize]; 2], side: usize) -> Result<SourceTerms> {
    let sizes = source.sizes();
    if sizes.len() != 2 {
        return Err(shape("source must be a two-factor joint".into()));
    }
    for j in 0..2 {
        if f[j].len() != sizes[j] {
            return Err(shape(format!("f{} has {} entries, |S{}| = {}", j + 1, f[j].len(), j + 1, sizes[j])));
        }
    }
    let k_size = f[0].iter().chain(f[1]).max().map_or(1, |m| m + 1);
    let fa = f[side];
    let with_k = source.extend(k_size, |s, k| if fa[s[side]] == k { 1.0 } else { 0.0 })?;
    let mut xi = 0.0;
    for (s, p) in source.support() {
        if f[0][s[0]] != f[1][s[1]] {
            xi += p;
        }
    }
    let p_ka = with_k.marginal_pmf(2)?;
    Ok(SourceTerms {
        h_ka: crate::info_core::entropy(&p_ka),
        p_ka,
        h_sj_given_other: [
            with_k.conditional_entropy(&[0], &[1, 2])?,
            with_k.conditional_entropy(&[1], &[0, 2])?,
        ],
        h_sj_given_ka: [
            with_k.conditional_entropy(&[0], &[2])?,
            with_k.conditional_entropy(&[1], &[2])?,
        ],
        h_s_given_ka: with_k.conditional_entropy(&[0, 1], &[2])?,
        xi_k: xi,
        ln_card_s: [(sizes[0] as f64).ln(), (sizes[1] as f64).ln()],
    })
}

/// `p_{Y|U}` from a joint, with uniform rows where `p(u) = 0`.
pub(crate) fn conditional_channel(j: &JointPmf, u: usize, y: usize) -> Result<Channel> {
    let sizes = j.sizes();
    let (nu, ny) = (sizes[u], sizes[y]);
    let m = j.marginal_probs(&[u, y])?;
    let rows = (0..nu)
        .map(|a| {
            let s: f64 = m[a * ny..(a + 1) * ny].iter().sum();
            if s > 0.0 {
                m[a * ny..(a + 1) * ny].iter().map(|p| p / s).collect()
            } else {
                vec![1.0 / ny as f64; ny]
            }
        })
        .collect();
    Channel::new(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MacAssignment {
    pub source: JointPmf,
    pub f1: Vec<usize>,
    pub f2: Vec<usize>,
    pub p_u: Pmf,
    pub p_v1: Pmf,
    pub p_v2: Pmf,
    pub x1_mapper: Channel,
    pub x2_mapper: Channel,
    pub channel: Channel,
}

impl MacAssignment {
    pub fn validate(&self) -> Result<()> {
        let nu = self.p_u.len();
        expect_rows(&self.x1_mapper, nu * self.p_v1.len(), "x1_mapper")?;
        expect_rows(&self.x2_mapper, nu * self.p_v2.len(), "x2_mapper")?;
        expect_rows(&self.channel, self.x1_mapper.n_out() * self.x2_mapper.n_out(), "channel")?;
        if self.source.n_factors() != 2 {
            return Err(shape("source must be a two-factor joint".into()));
        }
        Ok(())
    }

    pub(crate) fn source_terms(&self, side: usize) -> Result<SourceTerms> {
        source_terms(&self.source, [&self.f1, &self.f2], side)
    }

    /// `p_U p_V1 p_V2 p_{X1|U V1} p_{X2|U V2} W_{Y|X1 X2}` over
    /// `(U, V1, V2, X1, X2, Y)`.
    pub fn decoding_joint(&self) -> Result<JointPmf> {
        self.validate()?;
        let (nv1, nv2) = (self.p_v1.len(), self.p_v2.len());
        let nx2 = self.x2_mapper.n_out();
        let sizes = [
            self.p_u.len(),
            nv1,
            nv2,
            self.x1_mapper.n_out(),
            nx2,
            self.channel.n_out(),
        ];
        JointPmf::from_fn(&sizes, |s| {
            self.p_u.probs()[s[0]]
                * self.p_v1.probs()[s[1]]
                * self.p_v2.probs()[s[2]]
                * self.x1_mapper.get(s[0] * nv1 + s[1], s[3])
                * self.x2_mapper.get(s[0] * nv2 + s[2], s[4])
                * self.channel.get(s[3] * nx2 + s[4], s[5])
        })
    }

    /// Relabel channel outputs.
    pub fn permute_outputs(&self, perm: &[usize]) -> Self {
        MacAssignment { channel: self.channel.permute_outputs(perm), ..self.clone() }
    }
}

/// Han-Kobayashi split for the CHK checker.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChkPart {
    pub p_w1: Pmf,
    pub p_w2: Pmf,
    /// `p_{X1|U V1 W1}`.
    pub x1_mapper: Channel,
    pub x2_mapper: Channel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IcAssignment {
    pub source: JointPmf,
    pub f1: Vec<usize>,
    pub f2: Vec<usize>,
    pub p_u: Pmf,
    pub p_v1: Pmf,
    pub p_v2: Pmf,
    pub x1_mapper: Channel,
    pub x2_mapper: Channel,
    pub channel: IcChannel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chk: Option<ChkPart>,
}

impl IcAssignment {
    pub fn validate(&self) -> Result<()> {
        let nu = self.p_u.len();
        expect_rows(&self.x1_mapper, nu * self.p_v1.len(), "x1_mapper")?;
        expect_rows(&self.x2_mapper, nu * self.p_v2.len(), "x2_mapper")?;
        self.channel.validate()?;
        expect_rows(
            &self.channel.law,
            self.x1_mapper.n_out() * self.x2_mapper.n_out(),
            "channel",
        )?;
        if let Some(c) = &self.chk {
            expect_rows(&c.x1_mapper, nu * self.p_v1.len() * c.p_w1.len(), "chk.x1_mapper")?;
            expect_rows(&c.x2_mapper, nu * self.p_v2.len() * c.p_w2.len(), "chk.x2_mapper")?;
            expect_rows(
                &self.channel.law,
                c.x1_mapper.n_out() * c.x2_mapper.n_out(),
                "channel (chk inputs)",
            )?;
        }
        Ok(())
    }

    pub(crate) fn source_terms(&self, side: usize) -> Result<SourceTerms> {
        source_terms(&self.source, [&self.f1, &self.f2], side)
    }

    /// Joint over `(U, V1, V2, X1, X2, Y1, Y2)`.
    pub fn decoding_joint(&self) -> Result<JointPmf> {
        self.validate()?;
        let (nv1, nv2) = (self.p_v1.len(), self.p_v2.len());
        let nx2 = self.x2_mapper.n_out();
        let ch = &self.channel;
        let sizes = [
            self.p_u.len(),
            nv1,
            nv2,
            self.x1_mapper.n_out(),
            nx2,
            ch.y1_size,
            ch.y2_size,
        ];
        JointPmf::from_fn(&sizes, |s| {
            self.p_u.probs()[s[0]]
                * self.p_v1.probs()[s[1]]
                * self.p_v2.probs()[s[2]]
                * self.x1_mapper.get(s[0] * nv1 + s[1], s[3])
                * self.x2_mapper.get(s[0] * nv2 + s[2], s[4])
                * ch.get(s[3] * nx2 + s[4], s[5], s[6])
        })
    }

    /// Joint over `(U, V1, W1, V2, W2, X1, X2, Y1, Y2)`.
    pub fn chk_joint(&self) -> Result<JointPmf> {
        self.validate()?;
        let c = self.chk.as_ref().ok_or_else(|| {
            FblError::Config("CHK check needs the `chk` block (p_w1, p_w2, mappers)".into())
        })?;
        let (nv1, nv2, nw1, nw2) = (self.p_v1.len(), self.p_v2.len(), c.p_w1.len(), c.p_w2.len());
        let nx2 = c.x2_mapper.n_out();
        let ch = &self.channel;
        let sizes = [
            self.p_u.len(),
            nv1,
            nw1,
            nv2,
            nw2,
            c.x1_mapper.n_out(),
            nx2,
            ch.y1_size,
            ch.y2_size,
        ];
        JointPmf::from_fn(&sizes, |s| {
            self.p_u.probs()[s[0]]
                * self.p_v1.probs()[s[1]]
                * c.p_w1.probs()[s[2]]
                * self.p_v2.probs()[s[3]]
                * c.p_w2.probs()[s[4]]
                * c.x1_mapper.get((s[0] * nv1 + s[1]) * nw1 + s[2], s[5])
                * c.x2_mapper.get((s[0] * nv2 + s[3]) * nw2 + s[4], s[6])
                * ch.get(s[5] * nx2 + s[6], s[7], s[8])
        })
    }

    /// Relabel the outputs of both receivers.
    pub fn permute_outputs(&self, perm1: &[usize], perm2: &[usize]) -> Self {
        let n2 = self.channel.y2_size;
        let flat: Vec<usize> =
            (0..self.channel.law.n_out()).map(|y| perm1[y / n2] * n2 + perm2[y % n2]).collect();
        let mut out = self.clone();
        out.channel.law = self.channel.law.permute_outputs(&flat);
        out
    }
}

/// CES assignment: `W_S p_U p_{X1|U S1} p_{X2|U S2} W_{Y|X1 X2}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CesAssignment {
    pub source: JointPmf,
    pub p_u: Pmf,
    /// `p_{X1|U S1}`, input `u * |S1| + s1`.
    pub x1_mapper: Channel,
    pub x2_mapper: Channel,
    pub channel: Channel,
}

impl CesAssignment {
    pub fn validate(&self) -> Result<()> {
        let s = self.source.sizes();
        if s.len() != 2 {
            return Err(shape("source must be a two-factor joint".into()));
        }
        let nu = self.p_u.len();
        expect_rows(&self.x1_mapper, nu * s[0], "x1_mapper")?;
        expect_rows(&self.x2_mapper, nu * s[1], "x2_mapper")?;
        expect_rows(&self.channel, self.x1_mapper.n_out() * self.x2_mapper.n_out(), "channel")
    }

    /// Joint over `(S1, S2, U, X1, X2, Y)`.
    pub fn joint(&self) -> Result<JointPmf> {
        self.validate()?;
        let s = self.source.sizes();
        let nx2 = self.x2_mapper.n_out();
        let sizes =
            [s[0], s[1], self.p_u.len(), self.x1_mapper.n_out(), nx2, self.channel.n_out()];
        JointPmf::from_fn(&sizes, |c| {
            self.source.prob(&c[..2])
                * self.p_u.probs()[c[2]]
                * self.x1_mapper.get(c[2] * s[0] + c[0], c[3])
                * self.x2_mapper.get(c[2] * s[1] + c[1], c[4])
                * self.channel.get(c[3] * nx2 + c[4], c[5])
        })
    }
}

/// LC assignment: `W_S p_Q p_{W1|Q} p_{W2|Q} p_{X1|Q W1 S1} p_{X2|Q W2 S2} W_{Y1 Y2|X1 X2}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LcAssignment {
    pub source: JointPmf,
    pub p_q: Pmf,
    pub w1_given_q: Channel,
    pub w2_given_q: Channel,
    /// `p_{X1|Q W1 S1}`, input `(q * |W1| + w1) * |S1| + s1`.
    pub x1_mapper: Channel,
    pub x2_mapper: Channel,
    pub channel: IcChannel,
}

impl LcAssignment {
    pub fn validate(&self) -> Result<()> {
        let s = self.source.sizes();
        if s.len() != 2 {
            return Err(shape("source must be a two-factor joint".into()));
        }
        let nq = self.p_q.len();
        expect_rows(&self.w1_given_q, nq, "w1_given_q")?;
        expect_rows(&self.w2_given_q, nq, "w2_given_q")?;
        expect_rows(&self.x1_mapper, nq * self.w1_given_q.n_out() * s[0], "x1_mapper")?;
        expect_rows(&self.x2_mapper, nq * self.w2_given_q.n_out() * s[1], "x2_mapper")?;
        self.channel.validate()?;
        expect_rows(
            &self.channel.law,
            self.x1_mapper.n_out() * self.x2_mapper.n_out(),
            "channel",
        )
    }

    /// Joint over `(S1, S2, Q, W1, W2, X1, X2, Y1, Y2)`.
    pub fn joint(&self) -> Result<JointPmf> {
        self.validate()?;
        let s = self.source.sizes();
        let (nw1, nw2) = (self.w1_given_q.n_out(), self.w2_given_q.n_out());
        let nx2 = self.x2_mapper.n_out();
        let ch = &self.channel;
        let sizes = [
            s[0],
            s[1],
            self.p_q.len(),
            nw1,
            nw2,
            self.x1_mapper.n_out(),
            nx2,
            ch.y1_size,
            ch.y2_size,
        ];
        JointPmf::from_fn(&sizes, |c| {
            self.source.prob(&c[..2])
                * self.p_q.probs()[c[2]]
                * self.w1_given_q.get(c[2], c[3])
                * self.w2_given_q.get(c[2], c[4])
                * self.x1_mapper.get((c[2] * nw1 + c[3]) * s[0] + c[0], c[5])
                * self.x2_mapper.get((c[2] * nw2 + c[4]) * s[1] + c[1], c[6])
                * ch.get(c[5] * nx2 + c[6], c[7], c[8])
        })
    }
}
