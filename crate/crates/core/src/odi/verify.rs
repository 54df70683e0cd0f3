use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::odi::certificate::KatoCertificate;
use crate::odi::extremal::OdeBlowupResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    /// Both hypotheses hold and the numerical blow-up precedes the bound.
    Pass,
    /// A hypothesis fails, so the lemma says nothing.
    Vacuous,
    /// Both hypotheses hold but the bound is exceeded.
    Fail,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Vacuous => "VACUOUS",
            Verdict::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub verdict: Verdict,
    pub hypothesis_ok: bool,
    pub growth_hypothesis_ok: bool,
    pub bound: f64,
    pub t_blow_lo: f64,
    pub t_blow_hi: f64,
    /// `bound / t_blow_hi`; above 1 when the bound holds.
    pub slack: f64,
    pub fingerprint: String,
}

/// Compare a certificate with the extremal ODE computed from the same problem.
pub fn verify_certificate(cert: &KatoCertificate, ode: &OdeBlowupResult) -> Result<Verification> {
    if cert.fingerprint != ode.fingerprint {
        return Err(Error::Mismatch(format!(
            "certificate is for problem {} but the integration is for {}",
            cert.fingerprint, ode.fingerprint
        )));
    }
    let verdict = if !(cert.hypothesis_ok && ode.growth_hypothesis_ok) {
        Verdict::Vacuous
    } else if ode.t_blow_hi < cert.bound {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(Verification {
        verdict,
        hypothesis_ok: cert.hypothesis_ok,
        growth_hypothesis_ok: ode.growth_hypothesis_ok,
        bound: cert.bound,
        t_blow_lo: ode.t_blow_lo,
        t_blow_hi: ode.t_blow_hi,
        slack: cert.bound / ode.t_blow_hi,
        fingerprint: cert.fingerprint.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::odi::problem::LemmaMode;

    fn cert(hyp: bool, bound: f64) -> KatoCertificate {
        KatoCertificate {
            mode: LemmaMode::Lemma1,
            m: 1.0,
            delta: 0.1,
            delta_interior: false,
            c0: 1.0,
            t_ref: bound / 4.0,
            threshold: 1.0,
            hypothesis_ok: hyp,
            bound,
            fingerprint: "x".into(),
        }
    }

    fn ode(growth: bool, hi: f64) -> OdeBlowupResult {
        OdeBlowupResult {
            t_blow_lo: hi * 0.9999,
            t_blow_hi: hi,
            reach_times: vec![],
            growth_hypothesis_ok: growth,
            growth_margin: 1.0,
            steps: 0,
            trajectory: vec![],
            fingerprint: "x".into(),
        }
    }

    #[test]
    fn verdict_table() {
        assert_eq!(verify_certificate(&cert(true, 10.0), &ode(true, 5.0)).unwrap().verdict, Verdict::Pass);
        assert_eq!(verify_certificate(&cert(false, 10.0), &ode(true, 50.0)).unwrap().verdict, Verdict::Vacuous);
        assert_eq!(verify_certificate(&cert(true, 10.0), &ode(false, 50.0)).unwrap().verdict, Verdict::Vacuous);
        assert_eq!(verify_certificate(&cert(true, 10.0), &ode(true, 50.0)).unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn mismatched_problems_are_rejected() {
        let mut o = ode(true, 5.0);
        o.fingerprint = "y".into();
        assert!(matches!(verify_certificate(&cert(true, 10.0), &o), Err(Error::Mismatch(_))));
    }
}
