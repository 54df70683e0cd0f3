use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{gamma, lifespan_exponent, Scenario};
use crate::lab::sweep::SweepResult;

/// Default relative slope tolerance.
pub const DEFAULT_TOL: f64 = 0.15;
pub const RESAMPLES: usize = 1000;
pub const DEFAULT_SEED: u64 = 0x6b61_746f;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FitVerdict {
    Pass,
    Fail,
}

impl std::fmt::Display for FitVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FitVerdict::Pass => "PASS",
            FitVerdict::Fail => "FAIL",
        })
    }
}

/// Predicted lifespan law `T(ε) ~ ε^{-κ}` for a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryPrediction {
    pub scenario: Scenario,
    pub n: u32,
    pub p: f64,
    pub kappa: f64,
    /// Human-readable form of the law.
    pub source: String,
    /// `T ~ a(ε)` rather than a pure power; `kappa` is then the nominal 1.
    pub log_corrected: bool,
    /// Competing exponent reported alongside, without being authoritative
    /// (the general `2p(p-1)/γ(p,n)` for 2D with `1 < p < 2`).
    pub alternative_kappa: Option<f64>,
}

impl TheoryPrediction {
    pub fn for_scenario(scenario: Scenario, p: f64, n: u32) -> Result<Self> {
        let kappa = lifespan_exponent(p, n, scenario)?;
        let source = match scenario {
            Scenario::GeneralNd => "2p(p-1)/gamma(p,n)",
            Scenario::OneDGPositive => "(p-1)/2",
            Scenario::OneDFOnly => "p(p-1)/(p+1)",
            Scenario::TwoDP2FZero => "a(eps) with a^2 eps^2 log(1+a) = 1",
            Scenario::TwoDSub2FZero => "(p-1)/(3-p)",
        }
        .to_string();
        let alternative_kappa = match scenario {
            Scenario::TwoDSub2FZero => Some(2.0 * p * (p - 1.0) / gamma(p, 2)?),
            _ => None,
        };
        Ok(Self {
            scenario,
            n,
            p,
            kappa,
            source,
            log_corrected: scenario.log_corrected(),
            alternative_kappa,
        })
    }

    pub fn slope(&self) -> f64 {
        -self.kappa
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub scenario: Scenario,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Bootstrap 95% percentile interval of the slope.
    pub slope_ci: (f64, f64),
    pub theory_slope: f64,
    pub tol: f64,
    pub verdict: FitVerdict,
    pub points: usize,
    pub mean_log_eps: f64,
    pub seed: u64,
}

/// Ordinary least squares of `y` on `x`: `(slope, intercept, r²)`.
pub fn fit_log_log(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 1e-300) {
        return Err(Error::Insufficient("degenerate fit: no spread in log eps".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok((slope, intercept, r2))
}

/// Fit `log T = intercept + slope log ε` on the converged points and judge
/// `|slope - theory| <= tol |theory|`.
pub fn fit_power_law(result: &SweepResult, theory_slope: f64, tol: f64, seed: u64) -> Result<FitResult> {
    let pairs = result.require_converged()?;
    let xs: Vec<f64> = pairs.iter().map(|(e, _)| e.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|(_, t)| t.ln()).collect();
    let (slope, intercept, r2) = fit_log_log(&xs, &ys)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = xs.len();
    let mut slopes = Vec::with_capacity(RESAMPLES);
    let (mut bx, mut by) = (vec![0.0; k], vec![0.0; k]);
    while slopes.len() < RESAMPLES {
        for i in 0..k {
            let j = rng.gen_range(0..k);
            bx[i] = xs[j];
            by[i] = ys[j];
        }
        // Resamples without spread in x are redrawn.
        if let Ok((s, _, _)) = fit_log_log(&bx, &by) {
            slopes.push(s);
        }
    }
    slopes.sort_by(f64::total_cmp);
    let pick = |q: f64| slopes[((q * (RESAMPLES - 1) as f64).round() as usize).min(RESAMPLES - 1)];

    let verdict = if (slope - theory_slope).abs() <= tol * theory_slope.abs() {
        FitVerdict::Pass
    } else {
        FitVerdict::Fail
    };
    Ok(FitResult {
        scenario: result.scenario,
        slope,
        intercept,
        r2,
        slope_ci: (pick(0.025), pick(0.975)),
        theory_slope,
        tol,
        verdict,
        points: k,
        mean_log_eps: xs.iter().sum::<f64>() / k as f64,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub scenario: Scenario,
    pub verdict: FitVerdict,
    pub slope: f64,
    pub theory_slope: f64,
    pub tol: f64,
    pub relative_error: f64,
    pub alternative_slope: Option<f64>,
    pub alternative_relative_error: Option<f64>,
    /// For the log-corrected law: the pure-power slope is shallower than `-1`.
    pub shallower_than_nominal: Option<bool>,
}

/// Judge a fit against a prediction for the same scenario.
pub fn compare_to_theory(fit: &FitResult, pred: &TheoryPrediction) -> Result<Comparison> {
    if fit.scenario != pred.scenario {
        return Err(Error::Mismatch(format!(
            "fit is for {} but the prediction is for {}",
            fit.scenario, pred.scenario
        )));
    }
    let theory = pred.slope();
    let rel = |target: f64| (fit.slope - target).abs() / target.abs();
    let relative_error = rel(theory);
    Ok(Comparison {
        scenario: fit.scenario,
        verdict: if relative_error <= fit.tol {
            FitVerdict::Pass
        } else {
            FitVerdict::Fail
        },
        slope: fit.slope,
        theory_slope: theory,
        tol: fit.tol,
        relative_error,
        alternative_slope: pred.alternative_kappa.map(|k| -k),
        alternative_relative_error: pred.alternative_kappa.map(|k| rel(-k)),
        shallower_than_nominal: pred.log_corrected.then_some(fit.slope > -1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::sweep::default_eps_list;

    #[test]
    fn exact_power_law_is_recovered() {
        let eps = default_eps_list(0.02, 0.2, 8);
        let r = SweepResult::synthetic(Scenario::GeneralNd, 3, 2.0, &eps, |e| 7.0 * e.powi(-2));
        let fit = fit_power_law(&r, -2.0, DEFAULT_TOL, DEFAULT_SEED).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-12);
        assert!((fit.intercept - 7.0_f64.ln()).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
        assert_eq!(fit.verdict, FitVerdict::Pass);
        assert!((fit.slope_ci.0 + 2.0).abs() < 1e-10 && (fit.slope_ci.1 + 2.0).abs() < 1e-10);
    }

    #[test]
    fn bootstrap_is_reproducible() {
        let eps = default_eps_list(0.02, 0.2, 8);
        let r = SweepResult::synthetic(Scenario::OneDGPositive, 1, 2.0, &eps, |e| {
            e.powf(-0.5) * (1.0 + 0.05 * (100.0 * e).sin())
        });
        let a = fit_power_law(&r, -0.5, DEFAULT_TOL, 3).unwrap();
        let b = fit_power_law(&r, -0.5, DEFAULT_TOL, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.slope_ci.0 <= a.slope && a.slope <= a.slope_ci.1);
    }

    #[test]
    fn theory_slopes() {
        let p = TheoryPrediction::for_scenario(Scenario::OneDGPositive, 3.0, 1).unwrap();
        assert_eq!(p.slope(), -1.0);
        let p = TheoryPrediction::for_scenario(Scenario::OneDFOnly, 2.0, 1).unwrap();
        assert!((p.slope() + 2.0 / 3.0).abs() < 1e-15);
        let p = TheoryPrediction::for_scenario(Scenario::TwoDSub2FZero, 1.5, 2).unwrap();
        assert!((p.slope() + 1.0 / 3.0).abs() < 1e-15);
        assert!(p.alternative_kappa.unwrap() > 0.0);
    }

    #[test]
    fn comparison_verdicts() {
        let eps = default_eps_list(0.02, 0.2, 6);
        let pred = TheoryPrediction::for_scenario(Scenario::GeneralNd, 2.0, 3).unwrap();
        for (slope, verdict) in [(-1.98, FitVerdict::Pass), (-1.2, FitVerdict::Fail)] {
            let r = SweepResult::synthetic(Scenario::GeneralNd, 3, 2.0, &eps, |e| e.powf(slope));
            let fit = fit_power_law(&r, pred.slope(), DEFAULT_TOL, DEFAULT_SEED).unwrap();
            assert_eq!(compare_to_theory(&fit, &pred).unwrap().verdict, verdict);
        }
        let other = TheoryPrediction::for_scenario(Scenario::OneDGPositive, 2.0, 1).unwrap();
        let r = SweepResult::synthetic(Scenario::GeneralNd, 3, 2.0, &eps, |e| e.powi(-2));
        let fit = fit_power_law(&r, -2.0, DEFAULT_TOL, DEFAULT_SEED).unwrap();
        assert!(matches!(compare_to_theory(&fit, &other), Err(Error::Mismatch(_))));
    }

    #[test]
    fn degenerate_fit() {
        assert!(fit_log_log(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    }
}
