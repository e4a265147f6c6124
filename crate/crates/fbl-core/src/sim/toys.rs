// SPDX-License-Identifier: Apache-2.0
//! Small configurations used by tests, the CLI and the acceptance suite.

use super::{Assignment, CodeEnsembleSpec, SimMode, TieMode};
use crate::dueck::{build_source, DueckParams};
use crate::info_core::{Channel, JointPmf, Pmf};
use crate::regions::{IcAssignment, IcChannel, MacAssignment, SchemeParams};

pub const NAMES: [&str; 4] = ["binary-adder", "gkw-noiseless", "gkw-noiseless-ic", "dueck-small"];

pub fn by_name(name: &str, m: usize) -> Option<CodeEnsembleSpec> {
    match name {
        "binary-adder" => Some(binary_adder_mac(m)),
        "gkw-noiseless" => Some(gkw_noiseless_mac(m)),
        "gkw-noiseless-ic" => Some(gkw_noiseless_ic(m)),
        "dueck-small" => Some(dueck_mac(m)),
        _ => None,
    }
}

fn spec(assignment: Assignment, l: u64, delta: f64, m: usize, rates: [f64; 2], codebook: Vec<Vec<usize>>) -> CodeEnsembleSpec {
    let alpha = (codebook.len() as f64).ln() / l as f64;
    CodeEnsembleSpec {
        assignment,
        params: SchemeParams { alpha, beta: 0.0, rho: 0.05, delta, l, side_a: 1 },
        m,
        rates,
        seed: 20_240_601,
        mode: SimMode::Component,
        tie: TieMode::Uniform,
        delta_dec: None,
        target_typical: 0.99,
        calibration_m: None,
        search_budget: 1 << 20,
        codebook: Some(codebook),
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in permutations(n - 1) {
            let mut w = vec![first];
            w.extend(rest.into_iter().map(|x| if x >= first { x + 1 } else { x }));
            out.push(w);
        }
    }
    out
}

/// `X_j = (u, v_j)` on `nu nv` symbols.
fn pair_mapper(nu: usize, nv: usize) -> Channel {
    Channel::noiseless(nu * nv)
}

/// `y0 = u` when both inputs carry the same `u`, else the collision symbol `nu`.
fn common_symbol(x1: usize, x2: usize, nv: usize, nu: usize) -> usize {
    let (u1, u2) = (x1 / nv, x2 / nv);
    if u1 == u2 {
        u1
    } else {
        nu
    }
}

/// `S1 = S2 = K` a uniform bit, binary `U` and `V_j`, `X_j = U xor V_j`,
/// adder MAC `Y = X1 + X2`, `l = 2`. `Y` says nothing about `U`, so the
/// scheme almost always fails here; the toy exists for distribution checks.
pub fn binary_adder_mac(m: usize) -> CodeEnsembleSpec {
    let a = MacAssignment {
        source: JointPmf::from_fn(&[2, 2], |s| if s[0] == s[1] { 0.5 } else { 0.0 }).unwrap(),
        f1: vec![0, 1],
        f2: vec![0, 1],
        p_u: Pmf::uniform(2),
        p_v1: Pmf::uniform(2),
        p_v2: Pmf::uniform(2),
        x1_mapper: Channel::deterministic(4, 2, |r| (r / 2) ^ (r % 2)),
        x2_mapper: Channel::deterministic(4, 2, |r| (r / 2) ^ (r % 2)),
        channel: Channel::deterministic(4, 3, |x| x / 2 + x % 2),
    };
    spec(Assignment::Mac(a), 2, 0.5, m, [0.15, 0.15], vec![vec![0, 1], vec![1, 0]])
}

/// `S_j = (K, E_j)` with a uniform common bit `K` and private uniform bits,
/// quaternary `U` and `V_j`, `X_j = (u, v_j)` and `Y = (y0, v1, v2)`.
/// Rates sit 10% above `H(S_j | S_jbar, K) = ln 2`.
pub fn gkw_noiseless_mac(m: usize) -> CodeEnsembleSpec {
    let (nu, nv) = (4, 4);
    let a = MacAssignment {
        source: gkw_source(),
        f1: vec![0, 0, 1, 1],
        f2: vec![0, 0, 1, 1],
        p_u: Pmf::uniform(nu),
        p_v1: Pmf::uniform(nv),
        p_v2: Pmf::uniform(nv),
        x1_mapper: pair_mapper(nu, nv),
        x2_mapper: pair_mapper(nu, nv),
        channel: Channel::deterministic(nu * nv * nu * nv, (nu + 1) * nv * nv, |x| {
            let (x1, x2) = (x / (nu * nv), x % (nu * nv));
            (common_symbol(x1, x2, nv, nu) * nv + x1 % nv) * nv + x2 % nv
        }),
    };
    let rate = 1.1 * 2f64.ln();
    spec(Assignment::Mac(a), 4, 1.0, m, [rate, rate], permutations(4)[..16].to_vec())
}

fn gkw_source() -> JointPmf {
    JointPmf::from_fn(&[4, 4], |s| if s[0] / 2 == s[1] / 2 { 0.125 } else { 0.0 }).unwrap()
}

/// Interference version of [`gkw_noiseless_mac`]: receiver `j` sees `(y0, v_j)`.
pub fn gkw_noiseless_ic(m: usize) -> CodeEnsembleSpec {
    let (nu, nv) = (4, 4);
    let ny = (nu + 1) * nv;
    let law = Channel::deterministic(nu * nv * nu * nv, ny * ny, |x| {
        let (x1, x2) = (x / (nu * nv), x % (nu * nv));
        let y0 = common_symbol(x1, x2, nv, nu);
        (y0 * nv + x1 % nv) * ny + y0 * nv + x2 % nv
    });
    let a = IcAssignment {
        source: gkw_source(),
        f1: vec![0, 0, 1, 1],
        f2: vec![0, 0, 1, 1],
        p_u: Pmf::uniform(nu),
        p_v1: Pmf::uniform(nv),
        p_v2: Pmf::uniform(nv),
        x1_mapper: pair_mapper(nu, nv),
        x2_mapper: pair_mapper(nu, nv),
        channel: IcChannel::new(ny, ny, law).unwrap(),
        chk: None,
    };
    let rate = 1.1 * 2f64.ln();
    spec(Assignment::Ic(a), 4, 1.0, m, [rate, rate], permutations(4)[..16].to_vec())
}

/// The Dueck source at `(a, k, eta) = (2, 2, 6)` with `K_j = S_j`, `l = 4`,
/// `delta = 0.6`, ternary `V_j` and the collision channel of the GKW toys.
/// The typical set is the 24 arrangements of the four symbols. Most rows
/// are atypical, so the outer code carries nearly all of `H(S)`.
pub fn dueck_mac(m: usize) -> CodeEnsembleSpec {
    let (nu, nv) = (4, 3);
    let p = DueckParams::new(2, 2, 6).unwrap();
    let a = MacAssignment {
        source: build_source(&p).unwrap(),
        f1: vec![0, 1, 2, 3],
        f2: vec![0, 1, 2, 3],
        p_u: Pmf::uniform(nu),
        p_v1: Pmf::uniform(nv),
        p_v2: Pmf::uniform(nv),
        x1_mapper: pair_mapper(nu, nv),
        x2_mapper: pair_mapper(nu, nv),
        channel: Channel::deterministic(nu * nv * nu * nv, (nu + 1) * nv * nv, |x| {
            let (x1, x2) = (x / (nu * nv), x % (nu * nv));
            (common_symbol(x1, x2, nv, nu) * nv + x1 % nv) * nv + x2 % nv
        }),
    };
    spec(Assignment::Mac(a), 4, 0.6, m, [0.8, 0.8], permutations(4))
}
