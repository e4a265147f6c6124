// SPDX-License-Identifier: Apache-2.0
//! Block error of the random constant-composition ensemble under ML decoding.

use super::codes::{composition, shuffled, RowDecoder};
use super::key;
use super::stats::{wilson, RateCi};
use crate::error::{FblError, Result};
use crate::exponents::{cc_error_bound, error_exponent};
use crate::info_core::{Channel, Pmf};
use crate::LogReal;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

const TAG_INNER: u64 = 0x1AAE;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InnerPoint {
    pub l: usize,
    /// `ceil(exp(l R))`.
    pub messages: usize,
    pub error: RateCi,
    /// `g(R + rho, l)` from the exponent, and whether it is below 1.
    pub bound: f64,
    pub bound_informative: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InnerExperiment {
    pub rate: f64,
    pub rho: f64,
    /// `E_r(R + rho)` for the input type and channel.
    pub exponent: f64,
    pub points: Vec<InnerPoint>,
    /// Least-squares slope of `ln P_e` against `l`.
    pub slope: f64,
    /// `-slope / E_r`; the slope is within a factor 2 when this is in `[1/2, 2]`.
    pub slope_ratio: f64,
    pub decreasing: bool,
    /// Every informative bound dominates the measured error.
    pub bound_respected: bool,
}

/// One fresh codebook per trial, message 0 sent, ML decoding with uniform
/// tie breaking. Deterministic in `seed`.
pub fn inner_code_experiment(
    w: &Channel,
    p_u: &Pmf,
    rate: f64,
    rho: f64,
    ls: &[usize],
    trials: u64,
    seed: u64,
) -> Result<InnerExperiment> {
    if trials == 0 || ls.is_empty() {
        return Err(FblError::Param("need at least one trial and one block length".into()));
    }
    if !(rate >= 0.0 && rate.is_finite()) {
        return Err(FblError::Param(format!("rate {rate} must be finite and >= 0")));
    }
    let exponent = error_exponent(rate + rho, p_u, w)?.value;
    let rows: Vec<Vec<f64>> = (0..p_u.len()).map(|u| w.row(u).to_vec()).collect();
    let dec = RowDecoder::new(&rows);
    let mut points = Vec::new();
    for &l in ls {
        let comp = composition(p_u, l)?;
        let messages = ((l as f64 * rate).exp().ceil() as usize).max(1);
        let errors: u64 = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(key(&[seed, TAG_INNER, l as u64, t]));
                let book: Vec<Vec<usize>> = (0..messages).map(|_| shuffled(&comp, &mut rng)).collect();
                let y: Vec<usize> = book[0]
                    .iter()
                    .map(|&u| super::draw(w.row(u), rng.random()))
                    .collect();
                u64::from(dec.decode(&book, &y, &mut rng) != 0)
            })
            .sum();
        let (g, _) = cc_error_bound(rate + rho, LogReal::new(l as f64), p_u, w)?;
        let bound = g.to_f64().min(f64::MAX);
        points.push(InnerPoint {
            l,
            messages,
            error: wilson(errors, trials),
            bound,
            bound_informative: g.ln() < 0.0,
        });
    }
    // Zero counts get half an error so the fit stays finite.
    let xs: Vec<f64> = points.iter().map(|p| p.l as f64).collect();
    let ys: Vec<f64> = points
        .iter()
        .map(|p| ((p.error.k as f64).max(0.5) / p.error.n as f64).ln())
        .collect();
    let slope = if xs.len() < 2 { f64::NAN } else { least_squares_slope(&xs, &ys) };
    let decreasing = points.windows(2).all(|w| w[1].error.rate < w[0].error.rate);
    let bound_respected = points.iter().all(|p| !p.bound_informative || p.error.rate <= p.bound);
    Ok(InnerExperiment {
        rate,
        rho,
        exponent,
        slope_ratio: if exponent > 0.0 { -slope / exponent } else { f64::NAN },
        points,
        slope,
        decreasing,
        bound_respected,
    })
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_line() {
        assert!((least_squares_slope(&[8.0, 16.0, 32.0], &[-1.0, -2.0, -4.0]) + 0.125).abs() < 1e-15);
    }

    #[test]
    fn noiseless_channel_never_errs_at_low_rate() {
        // Two codewords of length 4 and type (1/2, 1/2) collide with
        // probability 1/6, so the error is 1/12 of the trials on average.
        let w = Channel::noiseless(2);
        let e = inner_code_experiment(&w, &Pmf::uniform(2), 0.1, 0.0, &[4], 6000, 3).unwrap();
        let p = &e.points[0];
        assert_eq!(p.messages, 2);
        assert!(p.error.lo < 1.0 / 12.0 && 1.0 / 12.0 < p.error.hi, "{:?}", p.error);
    }

    #[test]
    fn experiment_is_deterministic() {
        let w = Channel::bsc(0.1).unwrap();
        let a = inner_code_experiment(&w, &Pmf::uniform(2), 0.2, 0.05, &[8, 16], 500, 11).unwrap();
        let b = inner_code_experiment(&w, &Pmf::uniform(2), 0.2, 0.05, &[8, 16], 500, 11).unwrap();
        assert_eq!(a, b);
        assert!(inner_code_experiment(&w, &Pmf::uniform(2), 0.2, 0.05, &[8], 0, 1).is_err());
    }
}
