use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaMode {
    /// `F(0) >= 0`, `F'(0) > 0`.
    Lemma1,
    /// `F(0) > 0`, `F'(0) = 0`, with `F(t0) >= 2 F(0)`.
    Lemma2,
}

/// Data of the differential inequality
///
/// ```text
/// F(t) >= A t^a              (t >= T0)
/// F''(t) >= B (t+R)^{-q} |F(t)|^p   (t >= 0)
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdiProblem {
    pub p: f64,
    pub a: f64,
    pub q: f64,
    #[serde(rename = "A")]
    pub coef_a: f64,
    #[serde(rename = "B")]
    pub coef_b: f64,
    #[serde(rename = "R")]
    pub shift: f64,
    #[serde(rename = "T0")]
    pub t_growth: f64,
    #[serde(rename = "F0")]
    pub f0: f64,
    #[serde(rename = "F0p")]
    pub f0p: f64,
    /// Time with `F(t0) >= 2 F(0)` (second lemma only).
    #[serde(rename = "t0", default, skip_serializing_if = "Option::is_none")]
    pub t_double: Option<f64>,
}

impl OdiProblem {
    /// First-lemma problem with `T0 = R = 1` and `A = B = 1`; adjust fields as needed.
    pub fn lemma1(p: f64, a: f64, q: f64, f0: f64, f0p: f64) -> Self {
        Self {
            p,
            a,
            q,
            coef_a: 1.0,
            coef_b: 1.0,
            shift: 1.0,
            t_growth: 1.0,
            f0,
            f0p,
            t_double: None,
        }
    }

    pub fn lemma2(p: f64, a: f64, q: f64, f0: f64, t_double: f64) -> Self {
        Self {
            t_double: Some(t_double),
            ..Self::lemma1(p, a, q, f0, 0.0)
        }
    }

    /// Mode implied by the initial data.
    pub fn mode(&self) -> LemmaMode {
        if self.f0p == 0.0 && self.t_double.is_some() {
            LemmaMode::Lemma2
        } else {
            LemmaMode::Lemma1
        }
    }

    /// Parameter constraints common to both lemmas.
    pub fn validate_parameters(&self) -> Result<()> {
        let named = [
            ("p - 1", self.p - 1.0),
            ("a", self.a),
            ("q", self.q),
            ("A", self.coef_a),
            ("B", self.coef_b),
            ("R", self.shift),
            ("T0", self.t_growth),
        ];
        for (name, v) in named {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidProblem(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !self.f0.is_finite() || !self.f0p.is_finite() {
            return Err(Error::InvalidProblem("initial data must be finite".into()));
        }
        Ok(())
    }

    /// Full validation for the given mode.
    pub fn validate(&self, mode: LemmaMode) -> Result<()> {
        self.validate_parameters()?;
        match mode {
            LemmaMode::Lemma1 => {
                if self.f0 < 0.0 {
                    return Err(Error::InvalidProblem(format!("first lemma needs F(0) >= 0, got {}", self.f0)));
                }
                if self.f0p <= 0.0 {
                    return Err(Error::InvalidProblem(format!("first lemma needs F'(0) > 0, got {}", self.f0p)));
                }
            }
            LemmaMode::Lemma2 => {
                if self.f0 <= 0.0 {
                    return Err(Error::InvalidProblem(format!("second lemma needs F(0) > 0, got {}", self.f0)));
                }
                if self.f0p != 0.0 {
                    return Err(Error::InvalidProblem(format!("second lemma needs F'(0) = 0, got {}", self.f0p)));
                }
                match self.t_double {
                    Some(t) if t > 0.0 && t.is_finite() => {}
                    Some(t) => return Err(Error::InvalidProblem(format!("t0 must be positive, got {t}"))),
                    None => return Err(Error::InvalidProblem("second lemma needs t0".into())),
                }
            }
        }
        Ok(())
    }

    /// `M = (p-1) a / 2 - q / 2 + 1`.
    pub fn m(&self) -> f64 {
        (self.p - 1.0) * self.a / 2.0 - self.q / 2.0 + 1.0
    }

    /// SHA-256 of the canonical JSON encoding, used to tie certificates and
    /// integrations to the problem they were computed from.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_vec(self).expect("problem serializes");
        hex::encode(Sha256::digest(json))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_and_validation() {
        let p1 = OdiProblem::lemma1(2.0, 3.0, 3.0, 0.0, 1.0);
        assert_eq!(p1.mode(), LemmaMode::Lemma1);
        assert!(p1.validate(LemmaMode::Lemma1).is_ok());
        assert!(p1.validate(LemmaMode::Lemma2).is_err());
        let p2 = OdiProblem::lemma2(2.0, 3.0, 3.0, 1.0, 2.0);
        assert_eq!(p2.mode(), LemmaMode::Lemma2);
        assert!(p2.validate(LemmaMode::Lemma2).is_ok());
        let bad = OdiProblem { f0p: 0.5, ..p2.clone() };
        assert!(bad.validate(LemmaMode::Lemma2).is_err());
        let bad = OdiProblem { p: 1.0, ..p1 };
        assert!(bad.validate(LemmaMode::Lemma1).is_err());
    }

    #[test]
    fn fingerprint_tracks_fields() {
        let p = OdiProblem::lemma1(2.0, 3.0, 3.0, 0.0, 1.0);
        assert_eq!(p.fingerprint(), p.clone().fingerprint());
        let other = OdiProblem { coef_a: 2.0, ..p.clone() };
        assert_ne!(p.fingerprint(), other.fingerprint());
    }

    #[test]
    fn json_names() {
        let p = OdiProblem::lemma2(2.0, 3.0, 3.0, 1.0, 4.0);
        let v: serde_json::Value = serde_json::to_value(&p).unwrap();
        for key in ["p", "a", "q", "A", "B", "R", "T0", "F0", "F0p", "t0"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        let back: OdiProblem = serde_json::from_value(v).unwrap();
        assert_eq!(back, p);
    }
}
