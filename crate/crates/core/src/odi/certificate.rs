use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::odi::problem::{LemmaMode, OdiProblem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KatoCertificate {
    pub mode: LemmaMode,
    #[serde(rename = "M")]
    pub m: f64,
    pub delta: f64,
    /// True when the golden-section minimiser was interior and used as is;
    /// false when it hit an endpoint and the midpoint rule was applied.
    pub delta_interior: bool,
    #[serde(rename = "C0")]
    pub c0: f64,
    /// `T1` for the first lemma, `T2` for the second.
    #[serde(rename = "T_ref")]
    pub t_ref: f64,
    /// `C0 A^{-(p-1)/(2M)}`.
    pub threshold: f64,
    pub hypothesis_ok: bool,
    /// `2^{2/M} T_ref`; only meaningful when `hypothesis_ok`.
    pub bound: f64,
    pub fingerprint: String,
}

impl KatoCertificate {
    /// Smallest `A` for which the hypothesis on `T_ref` holds:
    /// `(T_ref / C0)^{-2M/(p-1)}`.
    pub fn a_threshold(&self, p: f64) -> f64 {
        (self.t_ref / self.c0).powf(-2.0 * self.m / (p - 1.0))
    }
}

/// Admissible `δ` range `(0, min((p-1)/2, M/(2a)))`.
pub fn delta_interval(p: f64, a: f64, m: f64) -> (f64, f64) {
    (0.0, ((p - 1.0) / 2.0).min(m / (2.0 * a)))
}

/// `C0(δ) = (2^{-q/2} δ/(M - δa) √(B/(p+1)))^{-1/M}`.
pub fn c0(p: f64, a: f64, q: f64, b: f64, delta: f64) -> f64 {
    let m = (p - 1.0) * a / 2.0 - q / 2.0 + 1.0;
    let inner = 2.0_f64.powf(-q / 2.0) * delta / (m - delta * a) * (b / (p + 1.0)).sqrt();
    inner.powf(-1.0 / m)
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Minimise `C0` over the open `δ` interval; fall back to its midpoint when
/// the minimiser sits within `1e-9` (relative) of an endpoint.
fn choose_delta(p: f64, a: f64, q: f64, b: f64, m: f64) -> (f64, bool) {
    let (lo, hi) = delta_interval(p, a, m);
    let objective = |d: f64| c0(p, a, q, b, d).ln();
    let (mut x0, mut x1) = (lo, hi);
    let mut c = x1 - GOLDEN * (x1 - x0);
    let mut d = x0 + GOLDEN * (x1 - x0);
    let (mut fc, mut fd) = (objective(c), objective(d));
    for _ in 0..200 {
        if (x1 - x0) <= 1e-12 * hi {
            break;
        }
        if fc < fd {
            x1 = d;
            d = c;
            fd = fc;
            c = x1 - GOLDEN * (x1 - x0);
            fc = objective(c);
        } else {
            x0 = c;
            c = d;
            fc = fd;
            d = x0 + GOLDEN * (x1 - x0);
            fd = objective(d);
        }
    }
    let best = 0.5 * (x0 + x1);
    let width = hi - lo;
    if best - lo <= 1e-9 * width || hi - best <= 1e-9 * width {
        (0.5 * hi, false)
    } else {
        (best, true)
    }
}

/// Certificate in the given mode.
pub fn certify(prob: &OdiProblem, mode: LemmaMode) -> Result<KatoCertificate> {
    prob.validate(mode)?;
    let m = prob.m();
    if m <= 0.0 {
        return Err(Error::InvalidProblem(format!(
            "M = (p-1)a/2 - q/2 + 1 = {m} must be positive"
        )));
    }
    let (delta, delta_interior) = choose_delta(prob.p, prob.a, prob.q, prob.coef_b, m);
    let c0 = c0(prob.p, prob.a, prob.q, prob.coef_b, delta);
    let t_ref = match mode {
        LemmaMode::Lemma1 => prob.t_growth.max(prob.f0 / prob.f0p).max(prob.shift),
        LemmaMode::Lemma2 => prob
            .t_growth
            .max(prob.t_double.expect("validated"))
            .max(prob.shift),
    };
    let threshold = c0 * prob.coef_a.powf(-(prob.p - 1.0) / (2.0 * m));
    Ok(KatoCertificate {
        mode,
        m,
        delta,
        delta_interior,
        c0,
        t_ref,
        threshold,
        hypothesis_ok: t_ref >= threshold,
        bound: 2.0_f64.powf(2.0 / m) * t_ref,
        fingerprint: prob.fingerprint(),
    })
}

/// Certificate for `F(0) >= 0`, `F'(0) > 0` with `T1 = max{T0, F(0)/F'(0), R}`.
pub fn certify_lemma1(prob: &OdiProblem) -> Result<KatoCertificate> {
    certify(prob, LemmaMode::Lemma1)
}

/// Certificate for `F(0) > 0`, `F'(0) = 0` with `T2 = max{T0, t0, R}`.
pub fn certify_lemma2(prob: &OdiProblem) -> Result<KatoCertificate> {
    certify(prob, LemmaMode::Lemma2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn m_examples() {
        let prob = OdiProblem::lemma1(2.0, 3.0, 3.0, 0.0, 1.0);
        assert_eq!(certify_lemma1(&prob).unwrap().m, 1.0);
        // The wave-equation choice a = n+1-(n-1)p/2, q = n(p-1) gives γ(p,n)/4.
        let prob = OdiProblem::lemma1(2.0, 2.0, 3.0, 0.0, 1.0);
        let gamma = crate::exponents::gamma(2.0, 3).unwrap();
        assert_eq!(certify_lemma1(&prob).unwrap().m, gamma / 4.0);
        let prob = OdiProblem::lemma1(3.0, 1.0, 5.0, 0.0, 1.0);
        assert!(matches!(certify_lemma1(&prob), Err(Error::InvalidProblem(_))));
    }

    #[test]
    fn bound_is_power_of_two_times_t_ref() {
        // p = 2, a = 2, q = 2 gives M = 1.
        let mut prob = OdiProblem::lemma1(2.0, 2.0, 2.0, 0.0, 1.0);
        prob.t_growth = 10.0;
        let cert = certify_lemma1(&prob).unwrap();
        assert_eq!(cert.m, 1.0);
        assert_eq!(cert.t_ref, 10.0);
        assert!((cert.bound - 40.0).abs() < 1e-12);
    }

    #[test]
    fn c0_hand_evaluation() {
        let mut prob = OdiProblem::lemma1(2.0, 2.0, 2.0, 0.0, 1.0);
        prob.coef_b = 1.0 / PI;
        let cert = certify_lemma1(&prob).unwrap();
        // C0 decreases in δ, so the endpoint rule applies: δ = min(1/2, 1/4) / 2.
        assert!(!cert.delta_interior);
        assert_eq!(cert.delta, 0.125);
        let by_hand = 1.0 / (0.5 * (0.125 / 0.75) * (1.0 / (3.0 * PI)).sqrt());
        assert!((cert.c0 - by_hand).abs() < 1e-12 * by_hand);
        assert!((cert.c0 - 36.8403).abs() < 1e-3);
    }

    #[test]
    fn t_ref_rules() {
        let mut prob = OdiProblem::lemma1(2.0, 2.0, 2.0, 3.0, 0.5);
        prob.t_growth = 2.0;
        assert_eq!(certify_lemma1(&prob).unwrap().t_ref, 6.0);
        let mut prob = OdiProblem::lemma2(2.0, 2.0, 2.0, 1.0, 12.0);
        prob.t_growth = 5.0;
        assert_eq!(certify_lemma2(&prob).unwrap().t_ref, 12.0);
        let l1 = certify_lemma1(&OdiProblem::lemma1(2.0, 2.0, 2.0, 1.0, 1.0)).unwrap();
        assert_eq!(certify_lemma2(&prob).unwrap().c0, l1.c0);
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        let prob = OdiProblem::lemma2(2.0, 2.0, 2.0, 1.0, 12.0);
        assert!(certify_lemma1(&prob).is_err());
        let prob = OdiProblem { t_double: None, ..prob };
        assert!(certify_lemma2(&prob).is_err());
    }

    #[test]
    fn hypothesis_flips_at_threshold() {
        let mut prob = OdiProblem::lemma2(2.0, 2.0, 2.0, 1.0, 12.0);
        let cert = certify_lemma2(&prob).unwrap();
        let a_star = cert.a_threshold(prob.p);
        prob.coef_a = a_star * 0.99;
        assert!(!certify_lemma2(&prob).unwrap().hypothesis_ok);
        prob.coef_a = a_star * 1.01;
        assert!(certify_lemma2(&prob).unwrap().hypothesis_ok);
    }
}
