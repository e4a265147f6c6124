// SPDX-License-Identifier: Apache-2.0
//! Random coding exponent for constant-composition codes and the bound
//! functionals built on it.
//!
//! `E_r(R, p, W) = min_V D(V||W|p) + |I(p;V) - R|^+`.
//!
//! The production solver works on the dual
//! `max_{s in [0,1]} F(s) - sR` with `F(s) = min_V D(V||W|p) + s I(p;V)`.
//! For fixed output law `q` the inner minimizer is the tilted channel
//! `V_s(y|u) ∝ W(y|u)^{1/(1+s)} q(y)^{s/(1+s)}`; alternating between `V_s`
//! and `q = pV_s` converges to `F(s)`. `F` is concave so golden section
//! over `s` is safe.

use crate::error::{FblError, Result};
use crate::info_core::{conditional_kl, hb, mutual_information_pw, Channel, Pmf};
use crate::logreal::LogReal;
use serde::{Deserialize, Serialize};

pub const FIXED_POINT_TOL: f64 = 1e-10;
pub const FIXED_POINT_MAX_ITERS: usize = 10_000;
const GOLDEN_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    PrimalGrid,
    DualFixedPoint,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExponentResult {
    pub value: f64,
    pub minimizer: Channel,
    /// Maximizing Lagrange parameter; absent for the primal oracle.
    pub dual_s: Option<f64>,
    pub method: Method,
    pub converged: bool,
}

fn check_shapes(p: &Pmf, w: &Channel) -> Result<()> {
    if p.len() != w.n_in() {
        return Err(FblError::Shape(format!(
            "p has {} symbols, channel has {} inputs",
            p.len(),
            w.n_in()
        )));
    }
    Ok(())
}

/// Inner problem at fixed `s`: returns `(F(s), V_s, converged)`.
fn tilted_fixed_point(s: f64, p: &Pmf, w: &Channel) -> (f64, Vec<Vec<f64>>, bool) {
    let (nu, ny) = (w.n_in(), w.n_out());
    let a = 1.0 / (1.0 + s);
    let b = s / (1.0 + s);
    let mut q = w.output_dist(p);
    let mut v: Vec<Vec<f64>> = w.rows().to_vec();
    let mut converged = false;
    let mut value = 0.0;
    for _ in 0..FIXED_POINT_MAX_ITERS {
        let mut change: f64 = 0.0;
        value = 0.0;
        for u in 0..nu {
            let pu = p.probs()[u];
            let mut z = 0.0;
            let mut row = vec![0.0; ny];
            for y in 0..ny {
                let wy = w.get(u, y);
                if wy > 0.0 && q[y] > 0.0 {
                    row[y] = wy.powf(a) * q[y].powf(b);
                    z += row[y];
                }
            }
            if pu > 0.0 {
                value -= (1.0 + s) * pu * z.ln();
            }
            for y in 0..ny {
                let nv = row[y] / z;
                change = change.max((nv - v[u][y]).abs());
                v[u][y] = nv;
            }
        }
        // q update from the new V.
        q.iter_mut().for_each(|x| *x = 0.0);
        for u in 0..nu {
            let pu = p.probs()[u];
            for y in 0..ny {
                q[y] += pu * v[u][y];
            }
        }
        if change < FIXED_POINT_TOL {
            converged = true;
            break;
        }
    }
    (value, v, converged)
}

/// Dual solver.
pub fn error_exponent(r: f64, p: &Pmf, w: &Channel) -> Result<ExponentResult> {
    check_shapes(p, w)?;
    let cap = mutual_information_pw(p, w);
    if r >= cap {
        return Ok(ExponentResult {
            value: 0.0,
            minimizer: w.clone(),
            dual_s: Some(0.0),
            method: Method::DualFixedPoint,
            converged: true,
        });
    }
    let mut all_converged = true;
    let mut eval = |s: f64| {
        let (f, v, c) = tilted_fixed_point(s, p, w);
        all_converged &= c;
        (f - s * r, v)
    };
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x1 = hi - gr * (hi - lo);
    let mut x2 = lo + gr * (hi - lo);
    let mut f1 = eval(x1).0;
    let mut f2 = eval(x2).0;
    while hi - lo > GOLDEN_TOL {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = eval(x2).0;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = eval(x1).0;
        }
    }
    let mut best_s = 0.5 * (lo + hi);
    let (mut best, mut best_v) = eval(best_s);
    for s in [0.0, 1.0] {
        let (f, v) = eval(s);
        if f > best {
            best = f;
            best_v = v;
            best_s = s;
        }
    }
    Ok(ExponentResult {
        value: best.max(0.0),
        minimizer: Channel::new(best_v)?,
        dual_s: Some(best_s),
        method: Method::DualFixedPoint,
        converged: all_converged,
    })
}

// ---- primal grid oracle ----------------------------------------------------

/// Objective `D(V||W|p) + |I(p;V) - R|^+` for a candidate V.
fn primal_objective(rows: &[Vec<f64>], p: &Pmf, w: &Channel, r: f64) -> f64 {
    let ny = w.n_out();
    let mut q = vec![0.0; ny];
    let mut d = 0.0;
    for (u, row) in rows.iter().enumerate() {
        let pu = p.probs()[u];
        if pu <= 0.0 {
            continue;
        }
        for y in 0..ny {
            let v = row[y];
            if v > 0.0 {
                d += pu * v * (v / w.get(u, y)).ln();
                q[y] += pu * v;
            }
        }
    }
    let mut i = 0.0;
    for (u, row) in rows.iter().enumerate() {
        let pu = p.probs()[u];
        if pu <= 0.0 {
            continue;
        }
        for y in 0..ny {
            let v = row[y];
            if v > 0.0 {
                i += pu * v * (v / q[y]).ln();
            }
        }
    }
    d + (i - r).max(0.0)
}

/// Compositions of `n` into `k` nonnegative parts.
fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exhaustive (or zooming exhaustive) grid minimization of the primal.
///
/// Rows of V live on the simplex restricted to the support of the
/// corresponding row of W, discretized with resolution `grid_step`.
/// When the full product grid is small it is searched outright; otherwise a
/// coarse product grid is searched and then refined by halving the step,
/// each time searching the full product neighbourhood of the incumbent.
/// The objective is convex in V, so the refinement tracks the minimizer.
pub fn error_exponent_primal(r: f64, p: &Pmf, w: &Channel, grid_step: f64) -> Result<ExponentResult> {
    check_shapes(p, w)?;
    if w.n_in() * w.n_out() > 9 {
        return Err(FblError::Param(format!(
            "primal oracle limited to |U||Y| <= 9, got {}",
            w.n_in() * w.n_out()
        )));
    }
    if grid_step <= 0.0 || grid_step > 0.5 {
        return Err(FblError::Param("grid_step must lie in (0, 0.5]".into()));
    }
    let cap = mutual_information_pw(p, w);
    if r >= cap {
        return Ok(ExponentResult {
            value: 0.0,
            minimizer: w.clone(),
            dual_s: Some(0.0),
            method: Method::PrimalGrid,
            converged: true,
        });
    }
    let nu = w.n_in();
    let supports: Vec<Vec<usize>> =
        (0..nu).map(|u| (0..w.n_out()).filter(|&y| w.get(u, y) > 0.0).collect()).collect();
    let active: Vec<usize> = (0..nu).filter(|&u| p.probs()[u] > 0.0).collect();

    let to_rows = |counts: &[Vec<usize>], n: usize| -> Vec<Vec<f64>> {
        let mut rows = w.rows().to_vec();
        for (k, &u) in active.iter().enumerate() {
            let mut row = vec![0.0; w.n_out()];
            for (j, &y) in supports[u].iter().enumerate() {
                row[y] = counts[k][j] as f64 / n as f64;
            }
            rows[u] = row;
        }
        rows
    };

    let n_fine = (1.0 / grid_step).round() as usize;
    let full_size: f64 = active
        .iter()
        .map(|&u| binom(n_fine + supports[u].len() - 1, supports[u].len() - 1))
        .product();

    let product_search = |choices: &[Vec<Vec<usize>>], n: usize| -> (f64, Vec<Vec<usize>>) {
        let mut best = (f64::INFINITY, Vec::new());
        let mut idx = vec![0usize; choices.len()];
        loop {
            let pick: Vec<Vec<usize>> =
                idx.iter().enumerate().map(|(k, &i)| choices[k][i].clone()).collect();
            let val = primal_objective(&to_rows(&pick, n), p, w, r);
            if val < best.0 {
                best = (val, pick);
            }
            let mut d = choices.len();
            loop {
                if d == 0 {
                    return best;
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < choices[d].len() {
                    break;
                }
                idx[d] = 0;
            }
        }
    };

    let (val, counts, n) = if full_size <= 2.0e4 {
        let choices: Vec<Vec<Vec<usize>>> =
            active.iter().map(|&u| compositions(n_fine, supports[u].len())).collect();
        let (v, c) = product_search(&choices, n_fine);
        (v, c, n_fine)
    } else {
        let mut n = 10usize;
        let choices: Vec<Vec<Vec<usize>>> =
            active.iter().map(|&u| compositions(n, supports[u].len())).collect();
        let (mut v, mut c) = product_search(&choices, n);
        loop {
            let refine = n < n_fine;
            if refine {
                n *= 2;
                c = c.iter().map(|row| row.iter().map(|x| 2 * x).collect()).collect();
            }
            // Search the +-1 neighbourhood of the incumbent until it is stable.
            loop {
                let choices: Vec<Vec<Vec<usize>>> =
                    c.iter().map(|row| neighbours(row, n)).collect();
                let (nv, nc) = product_search(&choices, n);
                if nv < v - 1e-15 {
                    v = nv;
                    c = nc;
                } else {
                    break;
                }
            }
            if !refine {
                break;
            }
        }
        (v, c, n)
    };
    Ok(ExponentResult {
        value: val.max(0.0),
        minimizer: Channel::new(to_rows(&counts, n))?,
        dual_s: None,
        method: Method::PrimalGrid,
        converged: true,
    })
}

/// Grid points within one step (in every free coordinate) of `row`.
fn neighbours(row: &[usize], n: usize) -> Vec<Vec<usize>> {
    let k = row.len();
    if k == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    let mut d = vec![-1i64; k - 1];
    loop {
        let free: Vec<i64> = (0..k - 1).map(|i| row[i] as i64 + d[i]).collect();
        let s: i64 = free.iter().sum();
        if free.iter().all(|&x| x >= 0) && s <= n as i64 {
            let mut v: Vec<usize> = free.iter().map(|&x| x as usize).collect();
            v.push(n - s as usize);
            out.push(v);
        }
        let mut i = 0;
        loop {
            if i == k - 1 {
                return out;
            }
            d[i] += 1;
            if d[i] <= 1 {
                break;
            }
            d[i] = -1;
            i += 1;
        }
    }
}

// ---- bound functionals ------------------------------------------------------

/// Least `l >= 1` with `l rho >= ln 4 + (4A + 4AB) ln(l+1)`.
///
/// The gap is convex in `l` and negative at `l = 0`, so the feasible set is
/// a half-line; doubling then bisection finds its left end. Cardinalities
/// may be non-integral upper bounds.
pub fn l_star(rho: f64, card_a: f64, card_b: f64) -> Result<u128> {
    if !(rho > 0.0) || card_a < 1.0 || card_b < 1.0 {
        return Err(FblError::Param("l* needs rho > 0 and cardinalities >= 1".into()));
    }
    let c = 4.0 * card_a + 4.0 * card_a * card_b;
    let ok = |l: u128| (l as f64) * rho >= 4f64.ln() + c * ((l as f64) + 1.0).ln();
    if ok(1) {
        return Ok(1);
    }
    let mut hi: u128 = 2;
    while !ok(hi) {
        hi = hi.checked_mul(2).ok_or_else(|| FblError::Param("l* exceeds u128".into()))?;
    }
    let mut lo = hi / 2; // !ok(lo)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Whether `l >= l*` for a possibly astronomically large `l`.
pub fn meets_l_star(l: LogReal, rho: f64, card_a: f64, card_b: f64) -> Result<bool> {
    let ls = l_star(rho, card_a, card_b)?;
    Ok(l.ln() >= (ls as f64).ln() - 1e-12 * (ls as f64).ln().abs())
}

/// `ln(l + 1)` for a LogReal `l`.
fn ln_l_plus_one(l: LogReal) -> f64 {
    let x = l.ln();
    if x > 30.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `g = (l+1)^{2|U||Y|} exp(-l E)` from a known exponent value.
pub fn cc_bound_from_exponent(er: f64, l: LogReal, card_u: f64, card_y: f64) -> LogReal {
    let poly = 2.0 * card_u * card_y * ln_l_plus_one(l);
    let decay = if er <= 0.0 { 0.0 } else { (l.ln() + er.ln()).exp() };
    LogReal::from_ln(poly - decay)
}

/// `g(R, l)` with the exponent solved numerically.
pub fn cc_error_bound(r: f64, l: LogReal, p: &Pmf, w: &Channel) -> Result<(LogReal, bool)> {
    let e = error_exponent(r, p, w)?;
    Ok((cc_bound_from_exponent(e.value, l, p.len() as f64, w.n_out() as f64), e.converged))
}

/// `tau = 2|K| exp(-2 delta^2 p*^2 l)` from the raw ingredients.
pub fn tau_from_parts(l: LogReal, delta: f64, ln_card_k: f64, p_min: LogReal) -> LogReal {
    let ln_rate = 2f64.ln() + 2.0 * delta.ln() + 2.0 * p_min.ln() + l.ln();
    LogReal::from_ln(2f64.ln() + ln_card_k - ln_rate.exp())
}

pub fn tau_bound(l: LogReal, delta: f64, p_k: &Pmf) -> Result<LogReal> {
    let pm = p_k.min_positive().ok_or(FblError::Param("p_K has empty support".into()))?;
    Ok(tau_from_parts(l, delta, (p_k.len() as f64).ln(), LogReal::new(pm)))
}

/// `xi^[l] = 1 - (1 - xi)^l`, stable for tiny `xi` and huge `l`.
pub fn block_disagreement(xi: LogReal, l: LogReal) -> LogReal {
    if xi.is_zero() || l.is_zero() {
        return LogReal::ZERO;
    }
    let lx = xi.ln();
    if lx >= 0.0 {
        return LogReal::ONE;
    }
    // v = -ln(1 - xi) in log form.
    let ln_v = if lx < -30.0 {
        lx + 0.5 * lx.exp()
    } else {
        (-(-lx.exp()).ln_1p()).ln()
    };
    let ln_mt = l.ln() + ln_v; // ln(-t), t = l ln(1 - xi)
    if ln_mt > (1e-3f64).ln() {
        let mt = ln_mt.exp();
        LogReal::from_ln((-(-mt).exp_m1()).ln())
    } else {
        let mt = ln_mt.exp();
        LogReal::from_ln(ln_mt + (-mt / 2.0 + mt * mt / 6.0).ln_1p())
    }
}

/// `h_b(mu)` for a LogReal argument that may underflow f64.
pub fn hb_log(mu: LogReal) -> f64 {
    let lm = mu.ln();
    if mu.is_zero() {
        return 0.0;
    }
    if lm > -600.0 {
        return hb(mu.to_f64().min(1.0));
    }
    // mu (1 - ln mu) up to O(mu^2).
    (lm + (1.0 - lm).ln()).exp()
}

/// `L_l(mu, |B|) = h_b(mu)/l + mu ln|B|`.
pub fn excess_rate(mu: f64, card: f64, l: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&mu) || card < 1.0 || l < 1.0 {
        return Err(FblError::Param("excess_rate needs mu in [0,1], card >= 1, l >= 1".into()));
    }
    Ok(hb(mu) / l + mu * card.ln())
}

/// `L_l` with log-domain `mu`, `ln|B|` and `l`.
pub fn excess_rate_log(mu: LogReal, ln_card: f64, l: LogReal) -> f64 {
    let lin = if ln_card > 0.0 { (mu.ln() + ln_card.ln()).exp() } else { 0.0 };
    hb_log(mu) * (-l.ln()).exp() + lin
}

pub fn conditional_divergence(v: &Channel, w: &Channel, p: &Pmf) -> Result<f64> {
    Ok(conditional_kl(v, w, p)?.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_channel(rng: &mut ChaCha8Rng, n_in: usize, n_out: usize) -> Channel {
        Channel::new(
            (0..n_in)
                .map(|_| {
                    let r: Vec<f64> = (0..n_out).map(|_| 0.05 + rng.random::<f64>()).collect();
                    let s: f64 = r.iter().sum();
                    r.into_iter().map(|x| x / s).collect()
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn above_capacity_is_zero_with_v_equal_w() {
        let w = Channel::bsc(0.1).unwrap();
        let p = Pmf::uniform(2);
        let e = error_exponent(0.7, &p, &w).unwrap();
        assert_eq!(e.value, 0.0);
        assert_eq!(e.minimizer, w);
        let o = error_exponent_primal(0.7, &p, &w, 1e-3).unwrap();
        assert_eq!(o.value, 0.0);
    }

    #[test]
    fn noiseless_uniform_is_log_a_minus_r() {
        for a in [2usize, 4, 8] {
            for f in [0.0, 0.1, 0.5, 0.9] {
                let r = f * (a as f64).ln();
                let e = error_exponent(r, &Pmf::uniform(a), &Channel::noiseless(a)).unwrap();
                assert!((e.value - ((a as f64).ln() - r)).abs() < 1e-9, "a={a} f={f}");
            }
        }
    }

    // Frozen from the primal oracle at grid 1e-3; agrees with the Gallager
    // E0 form for a symmetric channel with uniform input.
    const BSC01_R01: f64 = 0.123_143_551_314_21;

    #[test]
    fn bsc_fixture_primal_and_dual() {
        let w = Channel::bsc(0.1).unwrap();
        let p = Pmf::uniform(2);
        let o = error_exponent_primal(0.1, &p, &w, 1e-3).unwrap();
        let d = error_exponent(0.1, &p, &w).unwrap();
        assert!((o.value - BSC01_R01).abs() < 1e-6, "primal {}", o.value);
        assert!((d.value - o.value).abs() < 1e-3);
        assert!(d.converged);
    }

    #[test]
    fn dual_matches_primal_on_random_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..4 {
            let w = random_channel(&mut rng, 2, 2);
            let p = Pmf::new(vec![0.4, 0.6]).unwrap();
            let cap = mutual_information_pw(&p, &w);
            for f in [0.0, 0.3, 0.7] {
                let r = f * cap;
                let d = error_exponent(r, &p, &w).unwrap().value;
                let o = error_exponent_primal(r, &p, &w, 1e-3).unwrap().value;
                assert!((d - o).abs() < 1e-3, "dual {d} primal {o}");
                // The grid can only overestimate the true minimum.
                assert!(o >= d - 1e-7);
            }
        }
    }

    #[test]
    fn exponent_nonincreasing_and_convex_in_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = random_channel(&mut rng, 3, 3);
        let p = Pmf::new(vec![0.2, 0.3, 0.5]).unwrap();
        let cap = mutual_information_pw(&p, &w);
        let vals: Vec<f64> = (0..20)
            .map(|i| error_exponent(cap * 1.1 * i as f64 / 19.0, &p, &w).unwrap().value)
            .collect();
        for win in vals.windows(2) {
            assert!(win[1] <= win[0] + 1e-9);
        }
        for win in vals.windows(3) {
            assert!(win[0] - 2.0 * win[1] + win[2] >= -1e-6);
        }
        assert_eq!(error_exponent(cap + 1e-9, &p, &w).unwrap().value, 0.0);
    }

    #[test]
    fn l_star_matches_linear_scan() {
        let scan = |rho: f64, a: f64, b: f64| -> u128 {
            (1u128..)
                .find(|&l| l as f64 * rho >= 4f64.ln() + (4.0 * a + 4.0 * a * b) * (l as f64 + 1.0).ln())
                .unwrap()
        };
        assert_eq!(l_star(0.5, 2.0, 2.0).unwrap(), scan(0.5, 2.0, 2.0));
        assert_eq!(l_star(0.5, 2.0, 2.0).unwrap(), L_STAR_2_2_HALF);
        assert_eq!(l_star(1.0, 3.0, 2.0).unwrap(), scan(1.0, 3.0, 2.0));
        let huge = 4f64.ln() + 8.0 * 2.0 * 2f64.ln() + 100.0;
        assert_eq!(l_star(huge, 1.0, 1.0).unwrap(), 1);
        assert!(l_star(0.25, 2.0, 2.0).unwrap() >= l_star(0.5, 2.0, 2.0).unwrap());
    }

    const L_STAR_2_2_HALF: u128 = 273;

    #[test]
    fn tau_scalar() {
        let t = tau_bound(LogReal::new(100.0), 0.1, &Pmf::uniform(2)).unwrap();
        assert!((t.to_f64() - 4.0 * (-0.5f64).exp()).abs() < 1e-14);
        let t2 = tau_bound(LogReal::new(200.0), 0.1, &Pmf::uniform(2)).unwrap();
        assert!(t2 < t);
    }

    #[test]
    fn block_disagreement_cases() {
        assert!(block_disagreement(LogReal::ZERO, LogReal::new(5.0)).is_zero());
        let x = block_disagreement(LogReal::new(0.3), LogReal::ONE).to_f64();
        assert!((x - 0.3).abs() < 1e-15);
        let y = block_disagreement(LogReal::new(0.01), LogReal::new(50.0)).to_f64();
        assert!((y - (1.0 - 0.99f64.powi(50))).abs() < 1e-14);
        // Tiny xi, huge l: approximately l xi.
        let z = block_disagreement(LogReal::from_ln(-900.0), LogReal::from_ln(400.0));
        assert!((z.ln() - (-500.0)).abs() < 1e-12);
        // Monotone in l.
        let a = block_disagreement(LogReal::new(1e-5), LogReal::new(10.0));
        let b = block_disagreement(LogReal::new(1e-5), LogReal::new(20.0));
        assert!(b > a);
    }

    #[test]
    fn excess_rate_basics() {
        assert_eq!(excess_rate(0.0, 10.0, 3.0).unwrap(), 0.0);
        let mut prev = 0.0;
        for i in 1..=50 {
            let v = excess_rate(i as f64 / 100.0, 4.0, 1.0).unwrap();
            assert!(v > prev);
            prev = v;
        }
        let a = excess_rate_log(LogReal::new(0.2), 4f64.ln(), LogReal::new(3.0));
        assert!((a - excess_rate(0.2, 4.0, 3.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn cc_bound_vacuous_above_capacity() {
        let (g, ok) =
            cc_error_bound(1.0, LogReal::new(10.0), &Pmf::uniform(2), &Channel::bsc(0.1).unwrap())
                .unwrap();
        assert!(ok);
        assert!(g.ln() >= 0.0);
    }
}
