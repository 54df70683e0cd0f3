use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{solve_a_of_eps, Scenario};
use crate::lab::fit::fit_log_log;
use crate::lab::sweep::SweepResult;

/// Largest admissible `max/min` of `T / reference` over a sweep.
pub const BOUNDED_RATIO: f64 = 2.5;
/// Log-log slope of the ratio beyond which a monotone ratio counts as drifting.
pub const DRIFT_TOL: f64 = 0.1;

/// `T(ε) / reference(ε)` over a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSeries {
    pub reference: String,
    /// `(ε, T, reference, ratio)`, decreasing `ε`.
    pub rows: Vec<(f64, f64, f64, f64)>,
    pub max_over_min: f64,
    /// `max/min <= BOUNDED_RATIO`.
    pub bounded: bool,
    /// Ratio strictly monotone in `ε`.
    pub monotone: bool,
    /// Least-squares slope of `log ratio` against `log ε`.
    pub log_slope: f64,
    /// Monotone with `|log_slope| > DRIFT_TOL`.
    pub drifts: bool,
}

pub fn ratio_series(reference: &str, pairs: &[(f64, f64)], law: impl Fn(f64) -> Result<f64>) -> Result<RatioSeries> {
    let mut rows = Vec::with_capacity(pairs.len());
    for &(e, t) in pairs {
        let r = law(e)?;
        rows.push((e, t, r, t / r));
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r.3).collect();
    let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    let decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
    let xs: Vec<f64> = rows.iter().map(|r| r.0.ln()).collect();
    let ys: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let (log_slope, _, _) = fit_log_log(&xs, &ys)?;
    let monotone = increasing || decreasing;
    Ok(RatioSeries {
        reference: reference.to_string(),
        rows,
        max_over_min: max / min,
        bounded: max / min <= BOUNDED_RATIO,
        monotone,
        log_slope,
        drifts: monotone && log_slope.abs() > DRIFT_TOL,
    })
}

/// Ratios against `a(ε)` and against `ε^{-1}` for a 2D `p = 2` sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub a_of_eps: RatioSeries,
    pub eps_inverse: RatioSeries,
    /// The ratio to `a(ε)` is bounded.
    pub passed: bool,
    /// The ratio to `ε^{-1}` fails the bounded test, so the data tell the two laws apart.
    pub distinguishes: bool,
}

pub fn check_a_scaling(result: &SweepResult) -> Result<RatioReport> {
    if result.scenario != Scenario::TwoDP2FZero {
        return Err(Error::Mismatch(format!(
            "a(eps) scaling applies to {}, not {}",
            Scenario::TwoDP2FZero,
            result.scenario
        )));
    }
    let pairs = result.require_converged()?;
    let a_of_eps = ratio_series("a(eps)", &pairs, solve_a_of_eps)?;
    let eps_inverse = ratio_series("1/eps", &pairs, |e| Ok(1.0 / e))?;
    Ok(RatioReport {
        passed: a_of_eps.bounded,
        distinguishes: a_of_eps.bounded && !eps_inverse.bounded,
        a_of_eps,
        eps_inverse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::sweep::default_eps_list;

    #[test]
    fn constant_multiple_of_a() {
        let eps = default_eps_list(0.02, 0.2, 8);
        let r = SweepResult::synthetic(Scenario::TwoDP2FZero, 2, 2.0, &eps, |e| 3.0 * solve_a_of_eps(e).unwrap());
        let rep = check_a_scaling(&r).unwrap();
        assert!(rep.passed);
        assert!(rep.a_of_eps.rows.iter().all(|row| (row.3 - 3.0).abs() < 1e-12));
        assert!(!rep.a_of_eps.drifts);
    }

    #[test]
    fn pure_inverse_power_drifts() {
        let eps = default_eps_list(0.02, 0.2, 8);
        let r = SweepResult::synthetic(Scenario::TwoDP2FZero, 2, 2.0, &eps, |e| 1.0 / e);
        let rep = check_a_scaling(&r).unwrap();
        // ε a(ε) = 1/√log(1+a) falls slowly as ε -> 0, so T/a rises monotonically.
        assert!(rep.a_of_eps.monotone);
        assert!(rep.a_of_eps.drifts);
        assert!(rep.a_of_eps.rows.windows(2).all(|w| w[1].3 > w[0].3));
    }

    #[test]
    fn wrong_scenario() {
        let eps = default_eps_list(0.02, 0.2, 8);
        let r = SweepResult::synthetic(Scenario::GeneralNd, 3, 2.0, &eps, |e| 1.0 / e);
        assert!(matches!(check_a_scaling(&r), Err(Error::Mismatch(_))));
    }
}
