//! Critical exponents and predicted lifespan exponents.
//!
//! Every function here is pure and works in standard double precision.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A validated `(p, n)` pair: power of the nonlinearity and space dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerDim {
    p: f64,
    n: u32,
}

impl PowerDim {
    pub fn new(p: f64, n: u32) -> Result<Self> {
        check_power(p)?;
        if n < 1 {
            return Err(Error::Domain(format!("dimension n must be >= 1, got {n}")));
        }
        Ok(Self { p, n })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }
}

fn check_power(p: f64) -> Result<()> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::Domain(format!("power p must be > 1, got {p}")));
    }
    Ok(())
}

/// `γ(p, n) = 2 + (n+1)p - (n-1)p²`.
pub fn gamma(p: f64, n: u32) -> Result<f64> {
    let pd = PowerDim::new(p, n)?;
    Ok(gamma_unchecked(pd.p, pd.n))
}

fn gamma_unchecked(p: f64, n: u32) -> f64 {
    let n = n as f64;
    2.0 + (n + 1.0) * p - (n - 1.0) * p * p
}

/// Strauss exponent: the positive root of `γ(·, n)` for `n >= 2`.
///
/// For `n = 1` there is no finite root (every `p > 1` blows up), which is
/// reported as a domain error rather than `∞`.
pub fn p0(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "Strauss exponent needs n >= 2 (got n = {n}); in one dimension every p > 1 blows up"
        )));
    }
    let nf = n as f64;
    Ok((nf + 1.0 + (nf * nf + 10.0 * nf - 7.0).sqrt()) / (2.0 * (nf - 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
    OneDim,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub p: f64,
    pub n: u32,
    pub gamma: f64,
    /// `None` for `n = 1`.
    pub p0: Option<f64>,
    pub regime: Regime,
    /// `2p(p-1)/γ(p,n)`, present only when `γ > 0`.
    pub lifespan_exp: Option<f64>,
}

/// Relative width of the band around `p0(n)` classified as critical.
const CRITICAL_BAND: f64 = 1e-12;

pub fn report(p: f64, n: u32) -> Result<ExponentReport> {
    let g = gamma(p, n)?;
    let p0 = if n >= 2 { Some(p0(n)?) } else { None };
    let regime = match p0 {
        None => Regime::OneDim,
        Some(p0) if (p - p0).abs() <= CRITICAL_BAND * p0 => Regime::Critical,
        Some(p0) if p < p0 => Regime::Subcritical,
        Some(_) => Regime::Supercritical,
    };
    let lifespan_exp = (g > 0.0 && regime != Regime::Critical).then(|| 2.0 * p * (p - 1.0) / g);
    Ok(ExponentReport {
        p,
        n,
        gamma: g,
        p0,
        regime,
        lifespan_exp,
    })
}

/// Data/dimension combinations for which an upper lifespan bound is available.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Any `n`, `γ(p,n) > 0`: `T ≲ ε^{-2p(p-1)/γ}`.
    GeneralNd,
    /// `n = 1`, `∫g > 0`: `T ≲ ε^{-(p-1)/2}`.
    OneDGPositive,
    /// `n = 1`, `g ≡ 0`, `f ≥ 0`: `T ≲ ε^{-p(p-1)/(p+1)}`.
    OneDFOnly,
    /// `n = 2`, `p = 2`, `f ≡ 0`: `T ≲ a(ε)`, leading power `ε^{-1}`.
    TwoDP2FZero,
    /// `n = 2`, `1 < p < 2`, `f ≡ 0`: `T ≲ ε^{-(p-1)/(3-p)}`.
    TwoDSub2FZero,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::GeneralNd,
        Scenario::OneDGPositive,
        Scenario::OneDFOnly,
        Scenario::TwoDP2FZero,
        Scenario::TwoDSub2FZero,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::GeneralNd => "general_nd",
            Scenario::OneDGPositive => "one_d_g_positive",
            Scenario::OneDFOnly => "one_d_f_only",
            Scenario::TwoDP2FZero => "two_d_p2_f_zero",
            Scenario::TwoDSub2FZero => "two_d_sub2_f_zero",
        }
    }

    /// Fixed dimension of the scenario, if any.
    pub fn dimension(&self) -> Option<u32> {
        match self {
            Scenario::GeneralNd => None,
            Scenario::OneDGPositive | Scenario::OneDFOnly => Some(1),
            Scenario::TwoDP2FZero | Scenario::TwoDSub2FZero => Some(2),
        }
    }

    /// Whether the log-corrected scale `a(ε)` replaces a pure power.
    pub fn log_corrected(&self) -> bool {
        matches!(self, Scenario::TwoDP2FZero)
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown scenario '{s}'")))
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Magnitude `κ` of the predicted lifespan scaling `T(ε) ≲ ε^{-κ}`.
///
/// For [`Scenario::TwoDP2FZero`] the bound is `a(ε)`; the returned `κ = 1` is
/// its leading power, the logarithmic factor being handled by [`solve_a_of_eps`].
pub fn lifespan_exponent(p: f64, n: u32, case: Scenario) -> Result<f64> {
    let pd = PowerDim::new(p, n)?;
    if let Some(d) = case.dimension() {
        if d != n {
            return Err(Error::Domain(format!(
                "scenario {case} requires n = {d}, got n = {n}"
            )));
        }
    }
    match case {
        Scenario::GeneralNd => {
            let g = gamma_unchecked(pd.p, pd.n);
            if g <= 0.0 {
                return Err(Error::Domain(format!(
                    "gamma({p}, {n}) = {g} <= 0: no subcritical lifespan exponent"
                )));
            }
            Ok(2.0 * p * (p - 1.0) / g)
        }
        Scenario::OneDGPositive => Ok((p - 1.0) / 2.0),
        Scenario::OneDFOnly => Ok(p * (p - 1.0) / (p + 1.0)),
        Scenario::TwoDP2FZero => {
            if p != 2.0 {
                return Err(Error::Domain(format!(
                    "scenario {case} requires p = 2, got p = {p}"
                )));
            }
            Ok(1.0)
        }
        Scenario::TwoDSub2FZero => {
            if p >= 2.0 {
                return Err(Error::Domain(format!(
                    "scenario {case} requires 1 < p < 2, got p = {p}"
                )));
            }
            Ok((p - 1.0) / (3.0 - p))
        }
    }
}

fn a_map(a: f64, eps: f64) -> f64 {
    a * a * eps * eps * a.ln_1p()
}

/// The unique `a > 0` with `a²ε²log(1+a) = 1`.
///
/// Bracketed from `1e-12` upward by doubling, then refined by a safeguarded
/// Newton iteration that falls back to bisection whenever a Newton step leaves
/// the bracket.
pub fn solve_a_of_eps(eps: f64) -> Result<f64> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::Domain(format!("eps must be > 0, got {eps}")));
    }
    let mut lo = 1e-12;
    let mut hi = 1.0;
    while a_map(hi, eps) < 1.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Domain(format!("a(eps) overflows for eps = {eps}")));
        }
    }
    let mut a = 0.5 * (lo + hi);
    for _ in 0..200 {
        let r = a_map(a, eps) - 1.0;
        if r.abs() < 1e-15 {
            break;
        }
        if r > 0.0 {
            hi = a;
        } else {
            lo = a;
        }
        let dr = eps * eps * (2.0 * a * a.ln_1p() + a * a / (1.0 + a));
        let newton = a - r / dr;
        a = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    Ok(a)
}

/// Inverse of [`solve_a_of_eps`]: `ε(a) = 1 / (a √log(1+a))`.
pub fn eps_of_a(a: f64) -> Result<f64> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::Domain(format!("a must be > 0, got {a}")));
    }
    Ok(1.0 / (a * a.ln_1p().sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma(2.0, 3).unwrap(), 2.0);
        assert_eq!(gamma(2.0, 1).unwrap(), 6.0);
        assert!(gamma(3.0_f64.sqrt() + 0.0, 3).unwrap() > 0.0);
        assert!(gamma(p0(3).unwrap(), 3).unwrap().abs() < 1e-12);
    }

    #[test]
    fn gamma_domain_errors() {
        assert!(matches!(gamma(1.0, 3), Err(Error::Domain(_))));
        assert!(matches!(gamma(0.5, 3), Err(Error::Domain(_))));
        assert!(matches!(gamma(2.0, 0), Err(Error::Domain(_))));
        assert!(gamma(f64::NAN, 2).is_err());
    }

    #[test]
    fn p0_examples() {
        assert!((p0(3).unwrap() - (1.0 + 2.0_f64.sqrt())).abs() < 1e-12);
        assert!((p0(2).unwrap() - (3.0 + 17.0_f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!((p0(3).unwrap() - 2.414213562).abs() < 1e-9);
        assert!((p0(2).unwrap() - 3.561552813).abs() < 1e-9);
        assert!(p0(4).unwrap() < p0(3).unwrap());
        assert!(matches!(p0(1), Err(Error::Domain(_))));
    }

    #[test]
    fn regime_classification() {
        assert_eq!(report(2.0, 3).unwrap().regime, Regime::Subcritical);
        assert_eq!(report(3.0, 3).unwrap().regime, Regime::Supercritical);
        assert_eq!(report(p0(3).unwrap(), 3).unwrap().regime, Regime::Critical);
        let one = report(2.0, 1).unwrap();
        assert_eq!(one.regime, Regime::OneDim);
        assert_eq!(one.p0, None);
        assert!(report(3.0, 3).unwrap().lifespan_exp.is_none());
        assert_eq!(report(2.0, 3).unwrap().lifespan_exp, Some(2.0));
    }

    #[test]
    fn lifespan_exponent_examples() {
        assert_eq!(lifespan_exponent(2.0, 3, Scenario::GeneralNd).unwrap(), 2.0);
        let f_only = lifespan_exponent(2.0, 1, Scenario::OneDFOnly).unwrap();
        assert!((f_only - 2.0 / 3.0).abs() < 1e-15);
        let sub2 = lifespan_exponent(1.5, 2, Scenario::TwoDSub2FZero).unwrap();
        assert!((sub2 - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(lifespan_exponent(3.0, 1, Scenario::OneDGPositive).unwrap(), 1.0);
    }

    #[test]
    fn lifespan_exponent_rejects_unsupported() {
        assert!(lifespan_exponent(3.0, 3, Scenario::GeneralNd).is_err());
        assert!(lifespan_exponent(2.0, 3, Scenario::OneDFOnly).is_err());
        assert!(lifespan_exponent(2.0, 2, Scenario::TwoDSub2FZero).is_err());
        assert!(lifespan_exponent(1.5, 2, Scenario::TwoDP2FZero).is_err());
        assert!(lifespan_exponent(1.5, 3, Scenario::TwoDSub2FZero).is_err());
    }

    #[test]
    fn scenario_names_round_trip() {
        for s in Scenario::ALL {
            assert_eq!(s.name().parse::<Scenario>().unwrap(), s);
            let json = serde_json::to_string(&s).unwrap();
            assert_eq!(json, format!("\"{}\"", s.name()));
        }
        assert!("three_d".parse::<Scenario>().is_err());
    }

    #[test]
    fn a_of_eps_at_one() {
        let eps = 1.0 / 2.0_f64.ln().sqrt();
        assert!((eps - 1.201122409).abs() < 1e-9);
        let a = solve_a_of_eps(eps).unwrap();
        assert!((a - 1.0).abs() < 1e-12);
    }

    /// Plain bisection on the increasing map, used as an independent reference.
    fn bisect_a(eps: f64) -> f64 {
        let (mut lo, mut hi) = (0.0_f64, 1e6_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * mid * eps * eps * (1.0 + mid).ln() < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn a_of_eps_matches_bisection() {
        for eps in [0.1, 0.02, 0.2, 1e-3, 3.0] {
            let a = solve_a_of_eps(eps).unwrap();
            let reference = bisect_a(eps);
            assert!((a - reference).abs() <= 1e-10 * reference, "eps {eps}: {a} vs {reference}");
            assert!((a_map(a, eps) - 1.0).abs() < 1e-12);
        }
        assert!(solve_a_of_eps(0.05).unwrap() > solve_a_of_eps(0.1).unwrap());
        assert!(solve_a_of_eps(0.0).is_err());
        assert!(solve_a_of_eps(-1.0).is_err());
    }
}
