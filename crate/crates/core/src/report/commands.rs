use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exponents::{self, Scenario};
use crate::lab::{
    check_a_scaling, compare_to_theory, fit_power_law, plot_rows, run_sweep_with, write_plot_csv, SweepPlan,
    SweepPoint, SweepResult, TheoryPrediction,
};
use crate::odi::{certify, integrate_extremal, sample_problem, verify_certificate, Verdict};
use crate::report::config::{
    CheckName, Command, ExperimentConfig, ExponentsConfig, OdiConfig, SimulateConfig, SweepConfig, Tolerances,
};
use crate::report::record::{append_record, now, read_jsonl, truncate_partial_line, RunRecord};
use crate::wave::checks::*;
use crate::wave::{geometry_for, solve};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedVerdict {
    pub name: String,
    /// `PASS`, `FAIL` or `VACUOUS`.
    pub verdict: String,
}

impl NamedVerdict {
    fn new(name: impl Into<String>, verdict: impl std::fmt::Display) -> Self {
        Self {
            name: name.into(),
            verdict: verdict.to_string(),
        }
    }

    fn pass_fail(name: impl Into<String>, passed: bool) -> Self {
        Self::new(name, if passed { "PASS" } else { "FAIL" })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandOutput {
    pub command: String,
    pub config_hash: String,
    pub dir: PathBuf,
    pub summary: Value,
    pub verdicts: Vec<NamedVerdict>,
    pub files: Vec<PathBuf>,
}

impl CommandOutput {
    pub fn any_fail(&self) -> bool {
        self.verdicts.iter().any(|v| v.verdict == "FAIL")
    }
}

struct Artifacts {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Artifacts {
    fn new(dir: PathBuf) -> Result<Self> {
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Self { dir, files: vec![] })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        if !self.files.contains(&p) {
            self.files.push(p.clone());
        }
        p
    }

    fn create(&mut self, name: &str) -> Result<std::fs::File> {
        let p = self.path(name);
        std::fs::File::create(&p).map_err(|e| Error::io(&p, e))
    }
}

/// Run the configured command, write its artifacts and append a run record.
pub fn execute(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let started = now();
    let hash = cfg.hash();
    let mut art = Artifacts::new(cfg.artifact_dir())?;
    let (body, verdicts) = match &cfg.command {
        Command::Exponents(c) => run_exponents(c)?,
        Command::Odi(c) => run_odi(c, cfg.seed, &mut art)?,
        Command::Simulate(c) => run_simulate(c, &cfg.tolerances, &mut art)?,
        Command::Sweep(c) => run_sweep_command(c, cfg, &hash, &mut art)?,
    };
    let summary = json!({
        "config_hash": hash,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "verdicts": verdicts,
        "result": body,
    });
    let path = art.path("summary.json");
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    let record = RunRecord {
        config_hash: hash.clone(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        command: cfg.command.name().into(),
        started_at: started,
        finished_at: now(),
        outputs: json!({ "dir": art.dir, "files": art.files }),
        verdicts: verdicts.clone(),
    };
    append_record(&cfg.output_root().join("runs.jsonl"), &record)?;
    Ok(CommandOutput {
        command: cfg.command.name().into(),
        config_hash: hash,
        dir: art.dir,
        summary,
        verdicts,
        files: art.files,
    })
}

type Body = (Value, Vec<NamedVerdict>);

fn run_exponents(c: &ExponentsConfig) -> Result<Body> {
    let mut out = serde_json::Map::new();
    let mut verdicts = vec![];
    if let Some(eps) = c.a_of_eps {
        let a = exponents::solve_a_of_eps(eps)?;
        let residual = a * a * eps * eps * (1.0 + a).ln() - 1.0;
        out.insert("a_of_eps".into(), json!({ "eps": eps, "a": a, "residual": residual }));
    }
    if let Some((lo, hi)) = c.table {
        if lo < 2 || hi < lo {
            return Err(Error::Domain(format!("table range {lo}..{hi} needs 2 <= lo <= hi")));
        }
        let rows: Vec<(u32, f64)> = (lo..=hi).map(|n| Ok((n, exponents::p0(n)?))).collect::<Result<_>>()?;
        let decreasing = rows.windows(2).all(|w| w[1].1 < w[0].1);
        let table: Vec<Value> = rows.iter().map(|(n, p0)| json!({ "n": n, "p0": p0 })).collect();
        out.insert("table".into(), json!({ "rows": table, "strictly_decreasing": decreasing }));
        verdicts.push(NamedVerdict::pass_fail("p0_decreasing", decreasing));
    }
    match (c.n, c.p) {
        (Some(n), Some(p)) => {
            let rep = exponents::report(p, n)?;
            let scenarios: serde_json::Map<String, Value> = Scenario::ALL
                .iter()
                .filter_map(|s| {
                    exponents::lifespan_exponent(p, n, *s)
                        .ok()
                        .map(|k| (s.name().to_string(), json!(k)))
                })
                .collect();
            out.insert("report".into(), serde_json::to_value(rep)?);
            out.insert("scenario_exponents".into(), Value::Object(scenarios));
        }
        (None, None) => {}
        _ => return Err(Error::Config("give both n and p, or neither".into())),
    }
    if out.is_empty() {
        return Err(Error::Config("nothing to compute: give n and p, a table range, or a_of_eps".into()));
    }
    Ok((Value::Object(out), verdicts))
}

fn run_odi(c: &OdiConfig, seed: u64, art: &mut Artifacts) -> Result<Body> {
    if let Some(batch) = &c.random {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cases = Vec::with_capacity(batch.count);
        let (mut pass, mut vacuous, mut fail) = (0, 0, 0);
        let mut min_slack = f64::INFINITY;
        for _ in 0..batch.count {
            let case = sample_problem(&mut rng, batch.mode, &c.controls)?;
            match case.verification.verdict {
                Verdict::Pass => {
                    pass += 1;
                    min_slack = min_slack.min(case.verification.slack);
                }
                Verdict::Vacuous => vacuous += 1,
                Verdict::Fail => fail += 1,
            }
            cases.push(json!({
                "problem": case.problem,
                "certificate": case.certificate,
                "verification": case.verification,
                "bracket_width": case.result.bracket_width(),
            }));
        }
        let body = json!({
            "mode": batch.mode,
            "count": batch.count,
            "pass": pass,
            "vacuous": vacuous,
            "fail": fail,
            "min_pass_slack": if min_slack.is_finite() { json!(min_slack) } else { Value::Null },
            "cases": cases,
        });
        return Ok((body, vec![NamedVerdict::pass_fail("odi_random", fail == 0)]));
    }
    let prob = c
        .problem
        .as_ref()
        .ok_or_else(|| Error::Config("odi needs a problem or a random batch".into()))?;
    let cert = certify(prob, c.mode)?;
    let ode = integrate_extremal(prob, &c.controls)?;
    let verification = verify_certificate(&cert, &ode)?;
    let mut w = csv::Writer::from_writer(art.create("trajectory.csv")?);
    w.write_record(["t", "F", "Fp"])?;
    for pt in &ode.trajectory {
        w.write_record(&[format!("{:.12e}", pt.t), format!("{:.12e}", pt.f), format!("{:.12e}", pt.fp)])?;
    }
    w.flush().map_err(|e| Error::io(&art.dir, e))?;
    let body = json!({
        "problem": prob,
        "certificate": cert,
        "verification": verification,
        "ode": {
            "t_blow_lo": ode.t_blow_lo,
            "t_blow_hi": ode.t_blow_hi,
            "bracket_width": ode.bracket_width(),
            "reach_times": ode.reach_times,
            "growth_hypothesis_ok": ode.growth_hypothesis_ok,
            "growth_margin": if ode.growth_margin.is_finite() { json!(ode.growth_margin) } else { Value::Null },
            "steps": ode.steps,
        },
    });
    Ok((body, vec![NamedVerdict::new("odi", verification.verdict)]))
}

fn applicable(check: CheckName, prob: &crate::wave::WaveProblem) -> bool {
    match check {
        CheckName::Pointwise2d => prob.n == 2 && prob.f.is_zero() && !prob.g.is_zero(),
        CheckName::Odi | CheckName::Convexity => prob.data_nonnegative(),
        CheckName::Step0 | CheckName::ConditionF | CheckName::ConditionFExcess => {
            prob.data_nonnegative() && !(prob.f.is_zero() && prob.g.is_zero())
        }
        _ => true,
    }
}

fn run_simulate(c: &SimulateConfig, tol: &Tolerances, art: &mut Artifacts) -> Result<Body> {
    let prob = &c.problem;
    let sol = solve(prob, geometry_for(prob), &c.snapshots)?;
    let tr = &sol.trace;
    tr.write_csv(art.create("trace.csv")?)?;
    if !sol.snapshots.is_empty() {
        let mut w = csv::Writer::from_writer(art.create("snapshots.csv")?);
        w.write_record(["t", "x", "u"])?;
        for s in &sol.snapshots {
            for (x, u) in s.positions.iter().zip(&s.values) {
                w.write_record(&[format!("{:.12e}", s.t), format!("{x:.12e}"), format!("{u:.12e}")])?;
            }
        }
        w.flush().map_err(|e| Error::io(&art.dir, e))?;
    }
    let explicit = !c.checks.is_empty();
    let list: Vec<CheckName> = if explicit {
        c.checks.clone()
    } else {
        CheckName::ALL.iter().copied().filter(|k| applicable(*k, prob)).collect()
    };
    let mut checks = serde_json::Map::new();
    let mut skipped = serde_json::Map::new();
    let mut verdicts = vec![];
    for check in list {
        let outcome: Result<(Value, bool)> = (|| {
            Ok(match check {
                CheckName::Convexity => {
                    let r = check_convexity_and_positivity(tr, tol.convexity);
                    (serde_json::to_value(&r)?, r.passed)
                }
                CheckName::Step0 => {
                    let r = check_step0(tr)?;
                    (serde_json::to_value(&r)?, r.passed)
                }
                CheckName::ConditionF => {
                    let r = check_condition_f(tr)?;
                    (serde_json::to_value(&r)?, r.passed)
                }
                CheckName::ConditionFExcess => {
                    let r = check_condition_f_excess(tr)?;
                    (serde_json::to_value(&r)?, r.passed)
                }
                CheckName::Identity => {
                    let r = check_f_second_identity(tr, 1e3, tol.identity);
                    (serde_json::to_value(&r)?, r.passed)
                }
                CheckName::Odi => {
                    let r = check_odi_consistency(tr, prob, tol.odi);
                    (serde_json::to_value(&r)?, r.passed)
                }
                CheckName::FiniteSpeed => {
                    let reports: Vec<CheckReport> = sol
                        .snapshots
                        .iter()
                        .map(|s| check_finite_speed(s, prob.radius, tr.dx, tol.finite_speed_cells, tol.finite_speed))
                        .collect();
                    let ok = reports.iter().all(|r| r.passed);
                    (serde_json::to_value(&reports)?, ok)
                }
                CheckName::Pointwise2d => {
                    let reports: Vec<CheckReport> = sol
                        .snapshots
                        .iter()
                        .filter(|s| explicit || s.t >= 2.0 * prob.radius)
                        .map(|s| check_pointwise_2d(s, prob, tol.pointwise))
                        .collect::<Result<_>>()?;
                    let ok = reports.iter().all(|r| r.passed);
                    (serde_json::to_value(&reports)?, ok)
                }
            })
        })();
        match outcome {
            Ok((v, ok)) => {
                checks.insert(check.name().into(), v);
                verdicts.push(NamedVerdict::pass_fail(check.name(), ok));
            }
            Err(e @ Error::Insufficient(_)) if !explicit => {
                skipped.insert(check.name().into(), json!(e.to_string()));
            }
            Err(e) => return Err(e),
        }
    }
    let body = json!({
        "estimate": sol.estimate,
        "samples": tr.len(),
        "f_prime0": tr.f_prime0,
        "snapshot_times": sol.snapshots.iter().map(|s| s.t).collect::<Vec<_>>(),
        "checks": checks,
        "skipped": skipped,
    });
    Ok((body, verdicts))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SweepRecord {
    config_hash: String,
    #[serde(flatten)]
    point: SweepPoint,
}

fn run_sweep_command(c: &SweepConfig, cfg: &ExperimentConfig, hash: &str, art: &mut Artifacts) -> Result<Body> {
    let plan = SweepPlan {
        scenario: c.scenario,
        eps_list: c.eps.clone(),
        base: c.base.clone(),
        workers: c.workers,
    };
    let pred = TheoryPrediction::for_scenario(c.scenario, c.base.p, c.base.n)?;
    let jsonl = art.path("sweep.jsonl");
    let result = match &c.synthetic {
        Some(law) => {
            plan.validate()?;
            let mut points = vec![];
            for &e in &c.eps {
                points.push(SweepPoint::exact(e, law.eval(e)?));
            }
            let result = SweepResult::new(c.scenario, c.base.n, c.base.p, points);
            write_records(&jsonl, hash, &result.points)?;
            result
        }
        None => {
            truncate_partial_line(&jsonl)?;
            let done: Vec<SweepPoint> = read_jsonl::<SweepRecord>(&jsonl)?
                .into_iter()
                .filter(|r| r.config_hash == hash)
                .map(|r| r.point)
                .collect();
            run_sweep_with(&plan, &done, |pt| {
                append_record(
                    &jsonl,
                    &SweepRecord {
                        config_hash: hash.to_string(),
                        point: pt.clone(),
                    },
                )
            })?
        }
    };
    let fit = fit_power_law(&result, pred.slope(), cfg.tolerances.slope, cfg.seed)?;
    let comparison = compare_to_theory(&fit, &pred)?;
    let ratio = if c.scenario == Scenario::TwoDP2FZero {
        Some(check_a_scaling(&result)?)
    } else {
        None
    };
    write_plot_csv(&plot_rows(&result, Some(&fit), &pred), art.create("plot.csv")?)?;
    let mut verdicts = vec![];
    match &ratio {
        Some(r) => verdicts.push(NamedVerdict::pass_fail("a_scaling", r.passed)),
        None => verdicts.push(NamedVerdict::new("slope", comparison.verdict)),
    }
    verdicts.push(NamedVerdict::pass_fail("monotone", result.is_monotone()));
    let body = json!({
        "prediction": pred,
        "fit": fit,
        "comparison": comparison,
        "a_scaling": ratio,
        "monotone": result.is_monotone(),
        "converged": result.converged_pairs().len(),
        "points": result.points,
        "note": "the predicted exponents bound T(eps) from above; matching lower bounds make the slope the quantity compared",
    });
    Ok((body, verdicts))
}

fn write_records(path: &Path, hash: &str, points: &[SweepPoint]) -> Result<()> {
    let mut text = String::new();
    for pt in points {
        text.push_str(&serde_json::to_string(&SweepRecord {
            config_hash: hash.to_string(),
            point: pt.clone(),
        })?);
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::config::{SweepConfig, SyntheticLaw};
    use crate::wave::{Profile, WaveProblem};

    fn in_dir(dir: &Path, command: Command) -> ExperimentConfig {
        ExperimentConfig {
            output_dir: Some(dir.to_path_buf()),
            ..ExperimentConfig::new(command)
        }
    }

    #[test]
    fn exponents_command() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = in_dir(
            dir.path(),
            Command::Exponents(ExponentsConfig {
                n: Some(3),
                p: Some(2.0),
                table: Some((2, 6)),
                a_of_eps: Some(0.1),
            }),
        );
        let out = execute(&cfg).unwrap();
        let r = &out.summary["result"];
        assert_eq!(r["report"]["gamma"], json!(2.0));
        assert_eq!(r["scenario_exponents"]["general_nd"], json!(2.0));
        assert!(r["a_of_eps"]["residual"].as_f64().unwrap().abs() < 1e-12);
        assert!(!out.any_fail());
        let runs: Vec<RunRecord> = read_jsonl(&dir.path().join("runs.jsonl")).unwrap();
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].config_hash, cfg.hash());
    }

    #[test]
    fn synthetic_sweep_is_exact_and_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let base = WaveProblem::new(3, 2.0, 0.1, Profile::Zero, Profile::unit_bump());
        let cfg = in_dir(
            dir.path(),
            Command::Sweep(SweepConfig {
                scenario: Scenario::GeneralNd,
                eps: crate::lab::default_eps_list(0.02, 0.2, 8),
                base,
                workers: None,
                synthetic: Some(SyntheticLaw::Power {
                    coefficient: 7.0,
                    kappa: 2.0,
                }),
            }),
        );
        let out = execute(&cfg).unwrap();
        let slope = out.summary["result"]["fit"]["slope"].as_f64().unwrap();
        assert!((slope + 2.0).abs() < 1e-12);
        let first: Vec<Vec<u8>> = out.files.iter().map(|f| std::fs::read(f).unwrap()).collect();
        let again = execute(&cfg).unwrap();
        let second: Vec<Vec<u8>> = again.files.iter().map(|f| std::fs::read(f).unwrap()).collect();
        assert_eq!(first, second);
    }
}
