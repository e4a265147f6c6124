// SPDX-License-Identifier: Apache-2.0
//! One function per subcommand. Each returns the report text and whether
//! the checked conditions held.

use anyhow::{bail, Result};
use fbl_core::dueck::{dueck_report, DueckParams, Mode};
use fbl_core::exponents::{error_exponent, error_exponent_primal};
use fbl_core::info_core::{entropy, gkw_decomposition, mutual_information_pw, JointPmf, Pmf};
use fbl_core::regions::{
    check_ces, check_ic_chk, check_ic_step1, check_ic_step2, check_isolated, check_isolated_default,
    check_lc, check_mac_step1, check_mac_step2, dueck_separation_scan, ConditionReport, ScanRow,
};
use fbl_core::sim::{
    inner_code_experiment, run_trials, summarize, trial_seed, verify_lemmas, verify_row_iid, Assignment,
    ErrorSummary, LemmaGroup, Simulator, TrialOutcome,
};
use fbl_core::LogReal;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::*;
use crate::config::{self, load, parse_channel, parse_pmf};
use crate::emit::{self, num};

pub struct Report {
    pub text: String,
    /// False when a checked condition failed; only matters under `--strict`.
    pub ok: bool,
    pub strict: bool,
}

impl Report {
    fn json<T: Serialize>(v: &T, ok: bool, strict: bool) -> Result<Self> {
        Ok(Report { text: emit::json(v)?, ok, strict })
    }
}

fn mode(m: ModeArg) -> Mode {
    match m {
        ModeArg::Mac => Mode::Mac,
        ModeArg::Ic => Mode::Ic,
    }
}

fn json_only(format: Format, what: &str) -> Result<()> {
    if format == Format::Csv {
        bail!("{what} has no CSV form");
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<Report> {
    let f = cli.format;
    match &cli.command {
        Command::Info(a) => {
            json_only(f, "info")?;
            info(a)
        }
        Command::Exponent(a) => {
            json_only(f, "exponent")?;
            exponent(a)
        }
        Command::Dueck(DueckCommand::Stats(a)) => {
            json_only(f, "dueck stats")?;
            let p = DueckParams::new(a.a, a.k, a.eta)?;
            Report::json(&dueck_report(&p, mode(a.mode)), true, false)
        }
        Command::Check(a) => {
            json_only(f, "check")?;
            check(a)
        }
        Command::Scan(a) => scan(a, f),
        Command::Simulate(a) => simulate(a, f),
        Command::Verify(v) => verify(v, f),
        Command::Toy(a) => {
            json_only(f, "toy")?;
            toy(a)
        }
    }
}

fn entropy_of_map(p: &Pmf, f: &[usize], size: usize) -> f64 {
    let mut q = vec![0.0; size];
    for (s, &k) in f.iter().enumerate() {
        q[k] += p.probs()[s];
    }
    q.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

fn joint_info(j: &JointPmf) -> Result<Value> {
    let n = j.n_factors();
    let marg: Vec<f64> = (0..n).map(|i| j.entropy_of(&[i])).collect::<fbl_core::Result<_>>()?;
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            pairs.push(json!({"a": a, "b": b, "value": j.mutual_information(&[a], &[b], &[])?}));
        }
    }
    let mut out = json!({
        "sizes": j.sizes(),
        "entropy": j.entropy(),
        "marginal_entropy": marg,
        "mutual_information": pairs,
    });
    if n == 2 {
        let g = gkw_decomposition(j)?;
        let h_k = entropy_of_map(&j.marginal_pmf(0)?, &g.f1, g.k_size);
        out["gkw"] = json!({"part": g, "entropy_k": h_k});
    }
    Ok(out)
}

fn info(a: &InfoArgs) -> Result<Report> {
    let mut out = Map::new();
    match (&a.config, &a.pmf) {
        (Some(path), _) => {
            let c: config::InfoConfig = load(path)?;
            if c.pmf.is_none() && c.joint.is_none() && c.channel.is_none() {
                bail!("config {}: expected at least one of `pmf`, `joint`, `channel`", path.display());
            }
            if let Some(p) = &c.pmf {
                out.insert("pmf".into(), json!({"size": p.len(), "entropy": entropy(p)}));
            }
            if let Some(j) = &c.joint {
                out.insert("joint".into(), joint_info(j)?);
            }
            if let Some(w) = &c.channel {
                let p = c.input.clone().unwrap_or_else(|| Pmf::uniform(w.n_in()));
                if p.len() != w.n_in() {
                    bail!("config {}: `input` has {} symbols, channel has {} inputs", path.display(), p.len(), w.n_in());
                }
                out.insert(
                    "channel".into(),
                    json!({
                        "input": p.probs(),
                        "output": w.output_dist(&p),
                        "mutual_information": mutual_information_pw(&p, w),
                    }),
                );
            }
        }
        (None, Some(s)) => {
            let p = parse_pmf(s, None)?;
            out.insert("pmf".into(), json!({"size": p.len(), "entropy": entropy(&p)}));
        }
        (None, None) => bail!("pass --config or --pmf"),
    }
    Report::json(&Value::Object(out), true, false)
}

fn exponent(a: &ExponentArgs) -> Result<Report> {
    let w = parse_channel(&a.channel)?;
    let p = parse_pmf(&a.pu, Some(w.n_in()))?;
    let r = if a.primal { error_exponent_primal(a.rate, &p, &w, a.grid_step)? } else { error_exponent(a.rate, &p, &w)? };
    Report::json(&r, true, false)
}

fn check(a: &CheckArgs) -> Result<Report> {
    let need = || -> Result<&std::path::Path> {
        a.config.as_deref().ok_or_else(|| anyhow::anyhow!("check {:?} needs --config", a.kind))
    };
    let r: ConditionReport = match a.kind {
        CheckKind::Ces => check_ces(&load::<config::CesConfig>(need()?)?.assignment)?,
        CheckKind::Lc => check_lc(&load::<config::LcConfig>(need()?)?.assignment)?,
        CheckKind::Mac1 | CheckKind::Mac2 => {
            let c: config::MacConfig = load(need()?)?;
            let s = config::params(c.params, a.params.as_deref())?;
            if a.kind == CheckKind::Mac1 {
                check_mac_step1(&c.assignment, &s)?
            } else {
                check_mac_step2(&c.assignment, &s)?
            }
        }
        CheckKind::Ic1 | CheckKind::Ic2 | CheckKind::Chk => {
            let c: config::IcConfig = load(need()?)?;
            let s = config::params(c.params, a.params.as_deref())?;
            match a.kind {
                CheckKind::Ic1 => check_ic_step1(&c.assignment, &s)?,
                CheckKind::Ic2 => check_ic_step2(&c.assignment, &s)?,
                _ => check_ic_chk(&c.assignment, &s)?,
            }
        }
        CheckKind::Isolated => {
            let (p, m, ln_l, delta) = match &a.config {
                Some(path) => {
                    let c: config::IsolatedConfig = load(path)?;
                    (DueckParams::new(c.a, c.k, c.eta)?, c.mode.unwrap_or(mode(a.mode)), c.ln_l.or(a.ln_l), c.delta.or(a.delta))
                }
                None => match (a.a, a.k) {
                    (Some(x), Some(k)) => (DueckParams::new(x, k, a.eta)?, mode(a.mode), a.ln_l, a.delta),
                    _ => bail!("check isolated needs --config or both --a and --k"),
                },
            };
            match (ln_l, delta) {
                (None, None) => check_isolated_default(&p, m),
                _ => {
                    let l = ln_l.map(LogReal::from_ln).unwrap_or_else(|| p.proof_block_length());
                    check_isolated(&p, l, delta.unwrap_or(1.0 / p.kf()), m)
                }
            }
        }
    };
    Report::json(&r, r.overall, a.strict)
}

fn scan_csv(rows: &[ScanRow]) -> String {
    let mut s = String::from(ScanRow::CSV_HEADER);
    s.push('\n');
    for r in rows {
        let mode = match r.mode {
            Mode::Mac => "mac",
            Mode::Ic => "ic",
        };
        s += &format!(
            "{mode},{},{},{},{},{},{},{}\n",
            r.k,
            r.a,
            r.lemma_holds,
            num(r.lemma_slack),
            r.step1_holds,
            num(r.ln_phi),
            num(r.min_slack)
        );
    }
    s
}

fn scan(a: &ScanArgs, f: Format) -> Result<Report> {
    let res = dueck_separation_scan(a.eta, a.amax, a.kmax, mode(a.mode))?;
    let ok = res.found.is_some();
    let csv = scan_csv(&res.rows);
    if let Some(p) = &a.csv {
        std::fs::write(p, &csv)?;
    }
    if f == Format::Csv {
        return Ok(Report { text: csv, ok, strict: a.strict });
    }
    let summary = json!({
        "eta": res.eta,
        "mode": res.mode,
        "amax": res.amax,
        "kmax": res.kmax,
        "grid_points": res.rows.len(),
        "found": res.found,
    });
    Report::json(&summary, ok, a.strict)
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

fn trials_csv(seeds: &[u64], outcomes: &[TrialOutcome]) -> String {
    let mut s = String::from("trial,seed,disagreements,inner_errors,bad_rows,outer_errors,sw_success,success,e1,e2,e3,budget_abort\n");
    for (i, (seed, o)) in seeds.iter().zip(outcomes).enumerate() {
        let outer: Vec<usize> = o.outer_errors.iter().map(|r| r.iter().filter(|&&e| e).count()).collect();
        s += &format!(
            "{i},{seed},{},{},{},{},{},{},{},{},{},{}\n",
            o.disagreements,
            join(&o.inner_errors),
            join(&o.bad_rows),
            join(&outer),
            join(&o.sw_success),
            o.success,
            o.e1,
            o.e2,
            o.e3,
            o.budget_abort
        );
    }
    s
}

#[derive(Serialize)]
struct SimulationReport<'a> {
    variant: &'static str,
    seed: u64,
    mode: fbl_core::sim::SimMode,
    tie: fbl_core::sim::TieMode,
    rates: [f64; 2],
    summary: &'a ErrorSummary,
}

fn simulate(a: &SimulateArgs, f: Format) -> Result<Report> {
    let spec = config::sim_spec(&a.spec)?;
    let variant = match (a.variant, &spec.assignment) {
        (Variant::Mac1, Assignment::Mac(_)) => "mac1",
        (Variant::Ic2, Assignment::Ic(_)) => "ic2",
        (Variant::Mac1, _) => bail!("simulate mac1 needs a MAC assignment"),
        (Variant::Ic2, _) => bail!("simulate ic2 needs an IC assignment"),
    };
    if a.trials == 0 {
        bail!("--trials must be at least 1");
    }
    let sim = Simulator::new(&spec)?;
    let outcomes = run_trials(&sim, a.trials);
    let seeds: Vec<u64> = (0..a.trials).map(|i| trial_seed(&spec, i)).collect();
    let csv = trials_csv(&seeds, &outcomes);
    if let Some(p) = &a.trials_csv {
        std::fs::write(p, &csv)?;
    }
    let summary = summarize(&sim, &outcomes)?;
    if f == Format::Csv {
        return Ok(Report { text: csv, ok: true, strict: false });
    }
    let r = SimulationReport {
        variant,
        seed: spec.seed,
        mode: spec.mode,
        tie: spec.tie,
        rates: spec.rates,
        summary: &summary,
    };
    Report::json(&r, true, false)
}

fn toy(a: &ToyArgs) -> Result<Report> {
    let spec = fbl_core::sim::toys::by_name(&a.name, a.m).ok_or_else(|| {
        anyhow::anyhow!("unknown toy {:?}; known: {}", a.name, fbl_core::sim::toys::NAMES.join(", "))
    })?;
    if !a.check {
        return Report::json(&spec, true, false);
    }
    let assignment = match &spec.assignment {
        Assignment::Mac(m) => serde_json::to_value(m)?,
        Assignment::Ic(i) => serde_json::to_value(i)?,
    };
    Report::json(&json!({"assignment": assignment, "params": spec.params}), true, false)
}

fn verify(v: &VerifyCommand, f: Format) -> Result<Report> {
    match v {
        VerifyCommand::Lemmas { which, seed, strict } => {
            let g = match which {
                Which::A => LemmaGroup::A,
                Which::B => LemmaGroup::B,
                Which::G => LemmaGroup::G,
                Which::All => LemmaGroup::All,
            };
            let r = verify_lemmas(g, *seed)?;
            if f == Format::Csv {
                let mut s = String::from("name,instance,max_abs_diff,pass\n");
                for c in &r.checks {
                    s += &format!("{},\"{}\",{},{}\n", c.name, c.instance.replace('"', "'"), num(c.max_abs_diff), c.pass);
                }
                return Ok(Report { text: s, ok: r.pass, strict: *strict });
            }
            Report::json(&r, r.pass, *strict)
        }
        VerifyCommand::Rows { spec, trials } => {
            json_only(f, "verify rows")?;
            let spec = config::sim_spec(spec)?;
            Report::json(&verify_row_iid(&spec, *trials)?, true, false)
        }
        VerifyCommand::Inner { channel, pu, rate, rho, ls, trials, seed } => {
            json_only(f, "verify inner")?;
            let w = parse_channel(channel)?;
            let p = parse_pmf(pu, Some(w.n_in()))?;
            Report::json(&inner_code_experiment(&w, &p, *rate, *rho, ls, *trials, *seed)?, true, false)
        }
    }
}
