// SPDX-License-Identifier: Apache-2.0
//! Config files and inline channel / pmf specs.

use anyhow::{anyhow, bail, Context, Result};
use fbl_core::info_core::{Channel, JointPmf, Pmf};
use fbl_core::regions::{CesAssignment, IcAssignment, LcAssignment, MacAssignment, SchemeParams};
use fbl_core::sim::{toys, CodeEnsembleSpec, SimMode, TieMode};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use std::path::Path;

use crate::args::{SimModeArg, SpecArgs, TieArg};

/// Parse a JSON file into `T`; errors name the file and the offending field.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| anyhow!("config {}: {e}", path.display()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InfoConfig {
    pub pmf: Option<Pmf>,
    pub joint: Option<JointPmf>,
    pub channel: Option<Channel>,
    /// Input pmf for `channel`; uniform when absent.
    pub input: Option<Pmf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CesConfig {
    pub assignment: CesAssignment,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LcConfig {
    pub assignment: LcAssignment,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MacConfig {
    pub assignment: MacAssignment,
    pub params: Option<SchemeParams>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IcConfig {
    pub assignment: IcAssignment,
    pub params: Option<SchemeParams>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsolatedConfig {
    pub a: u64,
    pub k: u32,
    #[serde(default = "six")]
    pub eta: u32,
    #[serde(default)]
    pub mode: Option<fbl_core::dueck::Mode>,
    pub ln_l: Option<f64>,
    pub delta: Option<f64>,
}

fn six() -> u32 {
    6
}

/// `params` from the override file, else from the config.
pub fn params(from_config: Option<SchemeParams>, override_path: Option<&Path>) -> Result<SchemeParams> {
    match override_path {
        Some(p) => load(p),
        None => from_config.ok_or_else(|| anyhow!("config: missing field `params` (or pass --params)")),
    }
}

fn probs_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("bad probability {t:?}")))
        .collect()
}

/// `uniform:N`, `uniform` (needs `n`), a comma list or a pmf JSON file.
pub fn parse_pmf(s: &str, n: Option<usize>) -> Result<Pmf> {
    if s == "uniform" {
        let n = n.ok_or_else(|| anyhow!("`uniform` needs a known alphabet size; use uniform:N"))?;
        return Ok(Pmf::uniform(n));
    }
    if let Some(rest) = s.strip_prefix("uniform:") {
        let n: usize = rest.parse().with_context(|| format!("bad alphabet size {rest:?}"))?;
        if n == 0 {
            bail!("alphabet size must be >= 1");
        }
        return Ok(Pmf::uniform(n));
    }
    if s.contains(',') || s.parse::<f64>().is_ok() {
        return Ok(Pmf::new(probs_list(s)?)?);
    }
    load(Path::new(s))
}

/// `bsc:EPS`, `bec:EPS`, `z:P`, `noiseless:N` or a channel JSON file.
pub fn parse_channel(s: &str) -> Result<Channel> {
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    let x = || arg.parse::<f64>().with_context(|| format!("bad channel parameter in {s:?}"));
    Ok(match kind {
        "bsc" => Channel::bsc(x()?)?,
        "bec" => {
            let e = x()?;
            Channel::new(vec![vec![1.0 - e, e, 0.0], vec![0.0, e, 1.0 - e]])?
        }
        "z" => {
            let p = x()?;
            Channel::new(vec![vec![1.0, 0.0], vec![p, 1.0 - p]])?
        }
        "noiseless" => {
            let n: usize = arg.parse().with_context(|| format!("bad alphabet size in {s:?}"))?;
            if n == 0 {
                bail!("alphabet size must be >= 1");
            }
            Channel::noiseless(n)
        }
        _ => load(Path::new(s))?,
    })
}

/// Spec from a file or a toy, with command-line overrides applied and validated.
pub fn sim_spec(a: &SpecArgs) -> Result<CodeEnsembleSpec> {
    let mut spec: CodeEnsembleSpec = match (&a.config, &a.toy) {
        (Some(p), _) => load(p)?,
        (None, Some(t)) => toys::by_name(t, a.m.unwrap_or(64))
            .ok_or_else(|| anyhow!("unknown toy {t:?}; known: {}", toys::NAMES.join(", ")))?,
        (None, None) => bail!("pass --config or --toy"),
    };
    if let Some(m) = a.m {
        spec.m = m;
    }
    if let Some(s) = a.seed {
        spec.seed = s;
    }
    if let Some(m) = a.mode {
        spec.mode = match m {
            SimModeArg::Component => SimMode::Component,
            SimModeArg::EndToEnd => SimMode::EndToEnd,
        };
    }
    if let Some(t) = a.tie {
        spec.tie = match t {
            TieArg::Uniform => TieMode::Uniform,
            TieArg::Strict => TieMode::Strict,
        };
    }
    if a.calibration_m.is_some() {
        spec.calibration_m = a.calibration_m;
    }
    spec.validate()?;
    Ok(spec)
}
