use std::collections::HashSet;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{solve_a_of_eps, Scenario};
use crate::lab::fit::{FitResult, TheoryPrediction};
use crate::wave::{geometry_for, solve, BlowupEstimate, RunOutcome, WaveProblem};

/// Points needed for a fit.
pub const MIN_CONVERGED: usize = 5;

/// `count` log-spaced values from `hi` down to `lo`.
pub fn default_eps_list(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (l0, l1) = (hi.ln(), lo.ln());
    (0..count)
        .map(|i| (l0 + (l1 - l0) * i as f64 / (count - 1).max(1) as f64).exp())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    pub scenario: Scenario,
    /// Decreasing amplitudes.
    pub eps_list: Vec<f64>,
    /// Template problem; its `eps` is replaced for each run.
    pub base: WaveProblem,
    /// Worker threads; `None` uses the rayon default.
    #[serde(default)]
    pub workers: Option<usize>,
}

impl SweepPlan {
    pub fn new(scenario: Scenario, base: WaveProblem, eps_list: Vec<f64>) -> Self {
        Self {
            scenario,
            eps_list,
            base,
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let eps = &self.eps_list;
        if eps.len() < MIN_CONVERGED {
            return Err(Error::Insufficient(format!(
                "a sweep needs at least {MIN_CONVERGED} amplitudes, got {}",
                eps.len()
            )));
        }
        if eps.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(Error::Config("amplitudes must be positive".into()));
        }
        if eps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config("amplitudes must be strictly decreasing".into()));
        }
        let span = eps[0] / eps[eps.len() - 1];
        if span < 10.0 * (1.0 - 1e-9) {
            return Err(Error::Config(format!(
                "amplitudes must span at least one decade, got a ratio of {span:.3}"
            )));
        }
        self.check_scenario()?;
        self.base.validate()
    }

    /// Data and dimension constraints of each scenario.
    fn check_scenario(&self) -> Result<()> {
        let b = &self.base;
        let fail = |why: &str| Err(Error::Config(format!("scenario {}: {why}", self.scenario)));
        if let Some(n) = self.scenario.dimension() {
            if b.n != n {
                return fail(&format!("needs n = {n}, got {}", b.n));
            }
        } else if b.n < 2 {
            return fail("needs n >= 2");
        }
        if !b.data_nonnegative() || (b.f.is_zero() && b.g.is_zero()) {
            return fail("needs nonnegative data that is not identically zero");
        }
        match self.scenario {
            Scenario::GeneralNd => {
                let p0 = crate::exponents::p0(b.n)?;
                if !(b.p > 1.0 && b.p < p0) {
                    return fail(&format!("needs 1 < p < p0(n) = {p0}"));
                }
                if b.g.is_zero() {
                    return fail("needs g not identically zero");
                }
            }
            Scenario::OneDGPositive => {
                if b.g.is_zero() {
                    return fail("needs g >= 0 not identically zero");
                }
            }
            Scenario::OneDFOnly => {
                if !b.g.is_zero() || b.f.is_zero() {
                    return fail("needs g = 0 and f >= 0 not identically zero");
                }
            }
            Scenario::TwoDP2FZero | Scenario::TwoDSub2FZero => {
                if !b.f.is_zero() {
                    return fail("needs f = 0");
                }
                let ok = match self.scenario {
                    Scenario::TwoDP2FZero => b.p == 2.0,
                    _ => b.p > 1.0 && b.p < 2.0,
                };
                if !ok {
                    return fail(&format!("p = {} is outside the scenario", b.p));
                }
            }
        }
        Ok(())
    }

    pub fn problem_for(&self, eps: f64) -> WaveProblem {
        WaveProblem {
            eps,
            ..self.base.clone()
        }
    }
}

/// Result for one amplitude; also the JSONL record of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub eps: f64,
    pub estimate: BlowupEstimate,
    #[serde(rename = "T_lo")]
    pub t_lo: f64,
    /// `None` when the horizon was reached.
    #[serde(rename = "T_hi")]
    pub t_hi: Option<f64>,
    #[serde(rename = "T_extrap")]
    pub t_extrap: Option<f64>,
    pub converged: bool,
}

impl SweepPoint {
    pub fn from_estimate(eps: f64, estimate: BlowupEstimate) -> Self {
        Self {
            eps,
            t_lo: estimate.t_lo(),
            t_hi: estimate.t_hi(),
            t_extrap: estimate.lifespan().ok(),
            converged: estimate.converged,
            estimate,
        }
    }

    /// A point with an exactly known lifespan, for synthetic sweeps.
    pub fn exact(eps: f64, t: f64) -> Self {
        let estimate = BlowupEstimate {
            outcome: RunOutcome::BlowUp { t_lo: t, t_hi: t },
            refinement: vec![],
            observed_order: None,
            extrapolated: Some(t),
            converged: true,
        };
        Self::from_estimate(eps, estimate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub scenario: Scenario,
    pub n: u32,
    pub p: f64,
    /// Sorted by decreasing `eps`.
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn new(scenario: Scenario, n: u32, p: f64, mut points: Vec<SweepPoint>) -> Self {
        points.sort_by(|a, b| b.eps.total_cmp(&a.eps));
        Self { scenario, n, p, points }
    }

    /// Exact power law `T = c ε^{-κ}` (or any other law) without running the solver.
    pub fn synthetic(scenario: Scenario, n: u32, p: f64, eps_list: &[f64], law: impl Fn(f64) -> f64) -> Self {
        let points = eps_list.iter().map(|&e| SweepPoint::exact(e, law(e))).collect();
        Self::new(scenario, n, p, points)
    }

    pub fn converged(&self) -> impl Iterator<Item = &SweepPoint> {
        self.points.iter().filter(|pt| pt.converged && pt.t_extrap.is_some())
    }

    /// `(ε, T)` for converged points.
    pub fn converged_pairs(&self) -> Vec<(f64, f64)> {
        self.converged().map(|pt| (pt.eps, pt.t_extrap.expect("filtered"))).collect()
    }

    /// Whether `T` is nonincreasing in `ε` over converged points.
    pub fn is_monotone(&self) -> bool {
        let pairs = self.converged_pairs();
        pairs.windows(2).all(|w| w[1].1 >= w[0].1)
    }

    pub fn require_converged(&self) -> Result<Vec<(f64, f64)>> {
        let pairs = self.converged_pairs();
        if pairs.len() < MIN_CONVERGED {
            return Err(Error::Insufficient(format!(
                "only {} of {} amplitudes converged; a fit needs {MIN_CONVERGED}",
                pairs.len(),
                self.points.len()
            )));
        }
        Ok(pairs)
    }
}

/// Run every amplitude of the plan.
pub fn run_sweep(plan: &SweepPlan) -> Result<SweepResult> {
    run_sweep_with(plan, &[], |_| Ok(()))
}

/// Run the amplitudes of `plan` not already present in `done`, calling
/// `on_point` for each new point as soon as it finishes (in completion order).
///
/// Fails if fewer than [`MIN_CONVERGED`] points converge overall; every
/// finished point has been passed to `on_point` by then.
pub fn run_sweep_with<F>(plan: &SweepPlan, done: &[SweepPoint], on_point: F) -> Result<SweepResult>
where
    F: Fn(&SweepPoint) -> Result<()> + Sync,
{
    plan.validate()?;
    let finished: HashSet<u64> = done.iter().map(|pt| pt.eps.to_bits()).collect();
    let todo: Vec<f64> = plan
        .eps_list
        .iter()
        .copied()
        .filter(|e| !finished.contains(&e.to_bits()))
        .collect();
    let sink = Mutex::new(());
    let work = || -> Result<Vec<SweepPoint>> {
        todo.par_iter()
            .map(|&eps| {
                let prob = plan.problem_for(eps);
                let sol = solve(&prob, geometry_for(&prob), &[])?;
                let point = SweepPoint::from_estimate(eps, sol.estimate);
                let _guard = sink.lock().expect("sink lock");
                on_point(&point)?;
                Ok(point)
            })
            .collect()
    };
    let fresh = match plan.workers {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    let planned: HashSet<u64> = plan.eps_list.iter().map(|e| e.to_bits()).collect();
    let points: Vec<SweepPoint> = done
        .iter()
        .filter(|pt| planned.contains(&pt.eps.to_bits()))
        .cloned()
        .chain(fresh)
        .collect();
    let result = SweepResult::new(plan.scenario, plan.base.n, plan.base.p, points);
    result.require_converged()?;
    Ok(result)
}

/// One row of the plot-data CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotRow {
    pub eps: f64,
    #[serde(rename = "T_lo")]
    pub t_lo: f64,
    #[serde(rename = "T_hi")]
    pub t_hi: Option<f64>,
    #[serde(rename = "T_extrap")]
    pub t_extrap: Option<f64>,
    pub a_of_eps: Option<f64>,
    pub theory_curve: Option<f64>,
}

/// Plot rows with the predicted law scaled to pass through the fitted line
/// at the mean `log ε` (for the log-corrected law: scaled by the geometric
/// mean of `T/a(ε)`).
pub fn plot_rows(result: &SweepResult, fit: Option<&FitResult>, pred: &TheoryPrediction) -> Vec<PlotRow> {
    let a_of = |e: f64| solve_a_of_eps(e).ok();
    let curve: Option<Box<dyn Fn(f64) -> f64>> = if pred.log_corrected {
        let pairs = result.converged_pairs();
        let logs: Vec<f64> = pairs
            .iter()
            .filter_map(|&(e, t)| a_of(e).map(|a| (t / a).ln()))
            .collect();
        (!logs.is_empty()).then(|| {
            let c = (logs.iter().sum::<f64>() / logs.len() as f64).exp();
            Box::new(move |e: f64| c * solve_a_of_eps(e).unwrap_or(f64::NAN)) as Box<dyn Fn(f64) -> f64>
        })
    } else {
        fit.map(|f| {
            let slope = -pred.kappa;
            let mean_x = f.mean_log_eps;
            let y_at_mean = f.intercept + f.slope * mean_x;
            let c = y_at_mean - slope * mean_x;
            Box::new(move |e: f64| (c + slope * e.ln()).exp()) as Box<dyn Fn(f64) -> f64>
        })
    };
    result
        .points
        .iter()
        .map(|pt| PlotRow {
            eps: pt.eps,
            t_lo: pt.t_lo,
            t_hi: pt.t_hi,
            t_extrap: pt.t_extrap,
            a_of_eps: if result.n == 2 { a_of(pt.eps) } else { None },
            theory_curve: curve.as_ref().map(|c| c(pt.eps)),
        })
        .collect()
}

/// Write the `eps,T_lo,T_hi,T_extrap,a_of_eps,theory_curve` CSV; missing values are empty.
pub fn write_plot_csv<W: std::io::Write>(rows: &[PlotRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["eps", "T_lo", "T_hi", "T_extrap", "a_of_eps", "theory_curve"])?;
    let fmt = |v: Option<f64>| v.map(|x| format!("{x:.12e}")).unwrap_or_default();
    for r in rows {
        w.write_record([
            format!("{:.12e}", r.eps),
            format!("{:.12e}", r.t_lo),
            fmt(r.t_hi),
            fmt(r.t_extrap),
            fmt(r.a_of_eps),
            fmt(r.theory_curve),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wave::Profile;

    fn base_1d() -> WaveProblem {
        WaveProblem::new(1, 2.0, 0.1, Profile::Zero, Profile::unit_bump())
            .with_grid(0.05, 0.9)
            .with_caps(1e6, 200.0)
    }

    #[test]
    fn eps_list_is_decreasing_and_spans() {
        let e = default_eps_list(0.02, 0.2, 8);
        assert_eq!(e.len(), 8);
        assert!((e[0] - 0.2).abs() < 1e-15 && (e[7] - 0.02).abs() < 1e-15);
        assert!(e.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn plan_validation() {
        let ok = SweepPlan::new(Scenario::OneDGPositive, base_1d(), default_eps_list(0.02, 0.2, 6));
        assert!(ok.validate().is_ok());
        let one = SweepPlan::new(Scenario::OneDGPositive, base_1d(), vec![0.1]);
        assert!(matches!(one.validate(), Err(Error::Insufficient(_))));
        let narrow = SweepPlan::new(Scenario::OneDGPositive, base_1d(), default_eps_list(0.05, 0.2, 6));
        assert!(narrow.validate().is_err());
        let wrong = SweepPlan::new(Scenario::OneDFOnly, base_1d(), default_eps_list(0.02, 0.2, 6));
        assert!(wrong.validate().is_err());
        let two_d = SweepPlan::new(Scenario::TwoDP2FZero, base_1d(), default_eps_list(0.02, 0.2, 6));
        assert!(two_d.validate().is_err());
    }

    #[test]
    fn synthetic_results_are_sorted() {
        let r = SweepResult::synthetic(Scenario::GeneralNd, 3, 2.0, &[0.1, 0.2, 0.05, 0.4, 0.8], |e| e.powi(-2));
        assert!(r.points.windows(2).all(|w| w[0].eps > w[1].eps));
        assert!(r.is_monotone());
        assert_eq!(r.require_converged().unwrap().len(), 5);
    }
}
