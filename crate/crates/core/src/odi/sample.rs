use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::odi::certificate::{certify, KatoCertificate};
use crate::odi::extremal::{integrate_extremal, ExtremalControls, OdeBlowupResult};
use crate::odi::problem::{LemmaMode, OdiProblem};
use crate::odi::verify::{verify_certificate, Verification};

/// A randomly drawn problem together with its certificate, integration and verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledCase {
    pub problem: OdiProblem,
    pub certificate: KatoCertificate,
    pub result: OdeBlowupResult,
    pub verification: Verification,
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

/// Draw an admissible problem whose extremal solution blows up, with `A`
/// set just below the infimum of `F(t)/t^a` on `[T0, T_blow]`, so that the
/// growth hypothesis holds for the extremal solution itself.
///
/// Draws whose extremal solution does not blow up within the horizon are
/// redrawn (up to 100 times).
pub fn sample_problem<R: Rng>(rng: &mut R, mode: LemmaMode, controls: &ExtremalControls) -> Result<SampledCase> {
    let mut last_err = None;
    for _ in 0..100 {
        let p: f64 = rng.gen_range(1.2..4.0);
        let q: f64 = rng.gen_range(0.1..3.0);
        let a = ((q - 2.0) / (p - 1.0)).max(0.0) + rng.gen_range(0.2..2.0);
        let mut prob = OdiProblem {
            p,
            a,
            q,
            coef_a: 1.0,
            coef_b: log_uniform(rng, 0.1, 10.0),
            shift: rng.gen_range(0.5..3.0),
            t_growth: 1.0,
            f0: 0.0,
            f0p: 0.0,
            t_double: None,
        };
        match mode {
            LemmaMode::Lemma1 => {
                prob.f0 = if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..2.0) };
                prob.f0p = log_uniform(rng, 0.1, 3.0);
            }
            LemmaMode::Lemma2 => {
                prob.f0 = log_uniform(rng, 0.2, 5.0);
                prob.t_double = Some(1.0);
            }
        }
        let first = match integrate_extremal(&prob, controls) {
            Ok(r) => r,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        if mode == LemmaMode::Lemma2 {
            let level = 2.0 * prob.f0;
            let k = first.trajectory.partition_point(|pt| pt.f < level);
            let (mut lo, mut hi) = (first.trajectory[k - 1].t, first.trajectory[k].t);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if first.f_at(mid) >= level {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            prob.t_double = Some(hi);
        }
        prob.t_growth = rng.gen_range(0.05..0.9) * first.t_blow_lo;
        let ratio = first
            .min_growth_ratio(prob.a, prob.t_growth, controls.growth_samples)
            .expect("T0 is below the blow-up time");
        prob.coef_a = 0.999 * ratio;
        let certificate = certify(&prob, mode)?;
        let result = integrate_extremal(&prob, controls)?;
        let verification = verify_certificate(&certificate, &result)?;
        return Ok(SampledCase {
            problem: prob,
            certificate,
            result,
            verification,
        });
    }
    Err(last_err.expect("at least one draw failed"))
}
