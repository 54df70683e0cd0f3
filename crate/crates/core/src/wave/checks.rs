//! Checks of the inequalities satisfied by `F(t) = ∫u dx` on solver output.
//!
//! Each check returns a report with the measured quantity and the list of
//! violations instead of failing early, so a single run can be audited
//! against every bound at once.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wave::problem::WaveProblem;
use crate::wave::trace::{FunctionalTrace, Snapshot};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub t: f64,
    /// Spatial position for pointwise checks.
    pub position: Option<f64>,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    /// Number of samples examined.
    pub checked: usize,
    pub violations: Vec<Violation>,
    /// Largest error (identity checks) or smallest margin (inequality checks).
    pub worst: f64,
    pub worst_at: f64,
    pub tolerance: f64,
}

/// Empirical constant in a lower bound `Q(t) >= C ε^p t^e`: `C* = inf Q / (ε^p t^e)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundFitReport {
    pub name: String,
    pub exponent: f64,
    /// `C*`.
    pub constant: f64,
    /// Time at which the infimum is attained.
    pub argmin: f64,
    pub range: (f64, f64),
    pub samples: usize,
    pub passed: bool,
}

impl BoundFitReport {
    /// Whether two measurements of the same constant agree within the
    /// relative band `[1/(1+band), 1+band]`.
    pub fn stable_with(&self, other: &BoundFitReport, band: f64) -> bool {
        let r = self.constant / other.constant;
        r.is_finite() && r >= 1.0 / (1.0 + band) && r <= 1.0 + band
    }
}

/// `F'' >= 0` and `F(t) >= F'(0) t + F(0)` along the trace.
///
/// `tol` is relative to `max |F|` over the trace.
pub fn check_convexity_and_positivity(trace: &FunctionalTrace, tol: f64) -> CheckReport {
    let scale = trace.f.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let abs_tol = tol * scale;
    let f0 = trace.f.first().copied().unwrap_or(0.0);
    let mut violations = Vec::new();
    let mut worst = f64::INFINITY;
    let mut worst_at = 0.0;
    for k in 0..trace.len() {
        let t = trace.times[k];
        if trace.fpp[k] < -abs_tol {
            violations.push(Violation {
                t,
                position: None,
                value: trace.fpp[k],
                bound: 0.0,
            });
        }
        let line = f0 + trace.f_prime0 * t;
        let margin = trace.f[k] - line;
        if margin < worst {
            worst = margin;
            worst_at = t;
        }
        if margin < -abs_tol {
            violations.push(Violation {
                t,
                position: None,
                value: trace.f[k],
                bound: line,
            });
        }
    }
    CheckReport {
        name: "convexity_and_positivity".into(),
        passed: violations.is_empty(),
        checked: trace.len(),
        violations,
        worst: if worst.is_finite() { worst } else { 0.0 },
        worst_at,
        tolerance: abs_tol,
    }
}

fn bound_fit(
    name: &str,
    trace: &FunctionalTrace,
    values: &[f64],
    exponent: f64,
    t_start: f64,
    t_end: f64,
) -> Result<BoundFitReport> {
    let scale = trace.eps.powf(trace.p);
    let mut best = f64::INFINITY;
    let mut argmin = t_start;
    let mut samples = 0;
    for k in trace.indices_in(t_start, t_end) {
        let t = trace.times[k];
        let ratio = values[k] / (scale * t.powf(exponent));
        samples += 1;
        if ratio < best {
            best = ratio;
            argmin = t;
        }
    }
    if samples < 2 {
        return Err(Error::Insufficient(format!(
            "{name}: trace covers [0, {}] but the bound needs samples in [{t_start}, {t_end})",
            trace.last_time()
        )));
    }
    Ok(BoundFitReport {
        name: name.into(),
        exponent,
        constant: best,
        argmin,
        range: (t_start, t_end.min(trace.last_time())),
        samples,
        passed: best > 0.0 && best.is_finite(),
    })
}

/// `F''(t) >= C₁ ε^p t^{(n-1)(1-p/2)}` for `t >= R`, over the whole trace.
pub fn check_step0(trace: &FunctionalTrace) -> Result<BoundFitReport> {
    check_step0_until(trace, f64::INFINITY)
}

/// As [`check_step0`] restricted to `t < t_end`.
pub fn check_step0_until(trace: &FunctionalTrace, t_end: f64) -> Result<BoundFitReport> {
    let e = (trace.n as f64 - 1.0) * (1.0 - trace.p / 2.0);
    bound_fit("step0", trace, &trace.fpp, e, trace.radius, t_end)
}

/// `F(t) >= C₂ ε^p t^{n+1-(n-1)p/2}` for `t >= 4R`.
pub fn check_condition_f(trace: &FunctionalTrace) -> Result<BoundFitReport> {
    check_condition_f_until(trace, f64::INFINITY)
}

pub fn check_condition_f_until(trace: &FunctionalTrace, t_end: f64) -> Result<BoundFitReport> {
    bound_fit("condition_F", trace, &trace.f, condition_f_exponent(trace), 4.0 * trace.radius, t_end)
}

/// The same bound applied to the excess `F(t) - F(0) - F'(0) t`, which is the
/// part produced by the nonlinearity. For nonnegative data it is smaller than
/// `F`, and its constant does not carry the `ε^{1-p}` drift of the linear part.
pub fn check_condition_f_excess(trace: &FunctionalTrace) -> Result<BoundFitReport> {
    check_condition_f_excess_until(trace, f64::INFINITY)
}

pub fn check_condition_f_excess_until(trace: &FunctionalTrace, t_end: f64) -> Result<BoundFitReport> {
    let f0 = trace.f.first().copied().unwrap_or(0.0);
    let excess: Vec<f64> = trace
        .times
        .iter()
        .zip(&trace.f)
        .map(|(&t, &f)| f - f0 - trace.f_prime0 * t)
        .collect();
    bound_fit(
        "condition_F_excess",
        trace,
        &excess,
        condition_f_exponent(trace),
        4.0 * trace.radius,
        t_end,
    )
}

fn condition_f_exponent(trace: &FunctionalTrace) -> f64 {
    let n = trace.n as f64;
    n + 1.0 - (n - 1.0) * trace.p / 2.0
}

/// Right-hand side of the 2D pointwise bound
/// `u(r,t) >= ε‖g‖₁ / (2√2 π √(t+R) √(t-r+R))` on `R <= r <= t-R`.
pub fn pointwise_2d_bound(prob: &WaveProblem, r: f64, t: f64) -> f64 {
    let radius = prob.radius;
    prob.eps * prob.g.mass()
        / (2.0 * 2.0_f64.sqrt() * PI * (t + radius).sqrt() * (t - r + radius).sqrt())
}

/// Compare a 2D snapshot against [`pointwise_2d_bound`] at every grid
/// radius in `[R, t-R]`; values below `bound - tol` are violations.
pub fn check_pointwise_2d(snap: &Snapshot, prob: &WaveProblem, tol: f64) -> Result<CheckReport> {
    if prob.n != 2 {
        return Err(Error::InvalidProblem(format!("pointwise bound is for n = 2, got {}", prob.n)));
    }
    if !prob.f.is_zero() || prob.g.mass() < 0.0 {
        return Err(Error::InvalidProblem("pointwise bound needs f = 0 and g >= 0".into()));
    }
    let radius = prob.radius;
    let t = snap.t;
    if t < 2.0 * radius {
        return Err(Error::Insufficient(format!(
            "region R <= r <= t - R is empty at t = {t} < 2R"
        )));
    }
    let mut violations = Vec::new();
    let mut worst = f64::INFINITY;
    let mut worst_at = radius;
    let mut checked = 0;
    let mut consider = |r: f64, u: f64| {
        let bound = pointwise_2d_bound(prob, r, t);
        let margin = u - bound;
        checked += 1;
        if margin < worst {
            worst = margin;
            worst_at = r;
        }
        if margin < -tol {
            violations.push(Violation {
                t,
                position: Some(r),
                value: u,
                bound,
            });
        }
    };
    let mut any = false;
    for (&r, &u) in snap.positions.iter().zip(&snap.values) {
        if r >= radius && r <= t - radius {
            consider(r, u);
            any = true;
        }
    }
    if !any {
        // Degenerate region (t close to 2R): evaluate at r = R by interpolation.
        consider(radius, snap.value_at(radius));
    }
    Ok(CheckReport {
        name: "pointwise_2d".into(),
        passed: violations.is_empty(),
        checked,
        violations,
        worst,
        worst_at,
        tolerance: tol,
    })
}

/// Centred second difference of `F` against the quadrature of `∫|u|^p`.
///
/// Two samples are skipped at each end, and only times before `sup|u|`
/// first exceeds `sup_cap` are used. Samples where the step size changes
/// (near blow-up) are skipped as well.
pub fn check_f_second_identity(trace: &FunctionalTrace, sup_cap: f64, rel_tol: f64) -> CheckReport {
    let mut worst = 0.0_f64;
    let mut worst_at = 0.0;
    let mut violations = Vec::new();
    let mut checked = 0;
    let len = trace.len();
    let cutoff = trace
        .sup_u
        .iter()
        .position(|&s| s > sup_cap)
        .unwrap_or(len);
    let end = cutoff.min(len.saturating_sub(2));
    for k in 2..end {
        let h1 = trace.times[k] - trace.times[k - 1];
        let h2 = trace.times[k + 1] - trace.times[k];
        if (h1 - h2).abs() > 1e-9 * h1 {
            continue;
        }
        let d2 = trace.second_difference(k);
        let q = trace.fpp[k];
        let err = if d2 == q {
            0.0
        } else {
            (d2 - q).abs() / q.abs().max(f64::MIN_POSITIVE)
        };
        checked += 1;
        if err > worst {
            worst = err;
            worst_at = trace.times[k];
        }
        if err > rel_tol {
            violations.push(Violation {
                t: trace.times[k],
                position: None,
                value: d2,
                bound: q,
            });
        }
    }
    CheckReport {
        name: "F_second_identity".into(),
        passed: violations.is_empty(),
        checked,
        violations,
        worst,
        worst_at,
        tolerance: rel_tol,
    }
}

/// `F'' >= B (t+R)^{-q} |F|^p` with the Hölder constants of the problem.
pub fn check_odi_consistency(trace: &FunctionalTrace, prob: &WaveProblem, rel_tol: f64) -> CheckReport {
    let (b, q) = prob.holder_constants();
    let mut violations = Vec::new();
    let mut worst = f64::INFINITY;
    let mut worst_at = 0.0;
    for k in 0..trace.len() {
        let t = trace.times[k];
        let rhs = b * (t + prob.radius).powf(-q) * trace.f[k].abs().powf(prob.p);
        let lhs = trace.fpp[k];
        let margin = if rhs > 0.0 { lhs / rhs - 1.0 } else { f64::INFINITY };
        if margin < worst {
            worst = margin;
            worst_at = t;
        }
        if lhs < rhs * (1.0 - rel_tol) {
            violations.push(Violation {
                t,
                position: None,
                value: lhs,
                bound: rhs,
            });
        }
    }
    CheckReport {
        name: "odi_consistency".into(),
        passed: violations.is_empty(),
        checked: trace.len(),
        violations,
        worst: if worst.is_finite() { worst } else { 0.0 },
        worst_at,
        tolerance: rel_tol,
    }
}

/// `|u| <= threshold` outside `|x| <= t + R + margin_cells * dx`.
///
/// The leapfrog scheme is exactly supported in the light cone only for the
/// 1D stencil at `cfl = 1`. Otherwise a dispersive precursor runs ahead of the
/// front; it decays faster than exponentially but needs a margin of 10 to 20
/// cells at moderate times.
pub fn check_finite_speed(
    snap: &Snapshot,
    radius: f64,
    dx: f64,
    margin_cells: f64,
    threshold: f64,
) -> CheckReport {
    let edge = snap.t + radius + margin_cells * dx;
    let mut violations = Vec::new();
    let mut worst = 0.0_f64;
    let mut worst_at = edge;
    let mut checked = 0;
    for (&x, &u) in snap.positions.iter().zip(&snap.values) {
        if x.abs() > edge {
            checked += 1;
            if u.abs() > worst {
                worst = u.abs();
                worst_at = x;
            }
            if u.abs() > threshold {
                violations.push(Violation {
                    t: snap.t,
                    position: Some(x),
                    value: u,
                    bound: threshold,
                });
            }
        }
    }
    CheckReport {
        name: "finite_speed".into(),
        passed: violations.is_empty(),
        checked,
        violations,
        worst,
        worst_at,
        tolerance: threshold,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(f: Vec<f64>, fpp: Vec<f64>, dt: f64, fp0: f64) -> FunctionalTrace {
        let len = f.len();
        FunctionalTrace {
            n: 1,
            p: 2.0,
            eps: 0.1,
            radius: 1.0,
            dx: dt,
            dt,
            times: (0..len).map(|k| k as f64 * dt).collect(),
            sup_u: vec![0.0; len],
            f,
            fpp,
            f_prime0: fp0,
            g_half: 0.5,
            quadrature: "synthetic".into(),
        }
    }

    #[test]
    fn zero_trace_passes_everything() {
        let t = synthetic(vec![0.0; 20], vec![0.0; 20], 0.1, 0.0);
        assert!(check_convexity_and_positivity(&t, 1e-9).passed);
        let id = check_f_second_identity(&t, 1e3, 1e-2);
        assert!(id.passed);
        assert_eq!(id.worst, 0.0);
    }

    #[test]
    fn negated_trace_is_flagged() {
        let dt = 0.1;
        let f: Vec<f64> = (0..30).map(|k| 1.0 + k as f64 * dt + (k as f64 * dt).powi(2)).collect();
        let fpp = vec![2.0; 30];
        let good = synthetic(f.clone(), fpp.clone(), dt, 1.0);
        assert!(check_convexity_and_positivity(&good, 1e-9).passed);
        let bad = synthetic(
            f.iter().map(|v| -v).collect(),
            fpp.iter().map(|v| -v).collect(),
            dt,
            1.0,
        );
        let rep = check_convexity_and_positivity(&bad, 1e-9);
        assert!(!rep.passed);
        assert!(!rep.violations.is_empty());
    }

    #[test]
    fn identity_on_exact_quadratic() {
        let dt = 0.05;
        let f: Vec<f64> = (0..40).map(|k| 3.0 * (k as f64 * dt).powi(2)).collect();
        let t = synthetic(f, vec![6.0; 40], dt, 0.0);
        let rep = check_f_second_identity(&t, 1e3, 1e-2);
        assert!(rep.passed);
        assert!(rep.worst < 1e-9);
        let t = synthetic((0..40).map(|k| (k as f64 * dt).powi(3)).collect(), vec![6.0; 40], dt, 0.0);
        assert!(!check_f_second_identity(&t, 1e3, 1e-2).passed);
    }

    #[test]
    fn pointwise_bound_increases_in_r() {
        let prob = WaveProblem::new(2, 2.0, 0.1, crate::wave::Profile::Zero, crate::wave::Profile::unit_bump());
        let t = 6.0;
        let mut prev = 0.0;
        for k in 0..=40 {
            let r = 1.0 + k as f64 * 0.1;
            let b = pointwise_2d_bound(&prob, r, t);
            assert!(b > prev);
            prev = b;
        }
    }

    #[test]
    fn pointwise_region_degenerates_at_two_r() {
        let prob = WaveProblem::new(2, 2.0, 0.1, crate::wave::Profile::Zero, crate::wave::Profile::unit_bump());
        let snap = Snapshot {
            t: 2.0,
            positions: vec![0.5, 1.5, 2.5],
            values: vec![1.0, 1.0, 1.0],
        };
        let rep = check_pointwise_2d(&snap, &prob, 0.0).unwrap();
        assert_eq!(rep.checked, 1);
        assert_eq!(rep.worst_at, 1.0);
        let early = Snapshot { t: 1.5, ..snap };
        assert!(matches!(check_pointwise_2d(&early, &prob, 0.0), Err(Error::Insufficient(_))));
    }

    #[test]
    fn bound_fit_needs_range() {
        let t = synthetic(vec![1.0; 5], vec![1.0; 5], 0.1, 0.0);
        assert!(matches!(check_condition_f(&t), Err(Error::Insufficient(_))));
    }

    #[test]
    fn stability_band() {
        let mk = |c: f64| BoundFitReport {
            name: "x".into(),
            exponent: 0.0,
            constant: c,
            argmin: 1.0,
            range: (1.0, 2.0),
            samples: 3,
            passed: true,
        };
        assert!(mk(1.0).stable_with(&mk(1.2), 0.25));
        assert!(!mk(1.0).stable_with(&mk(1.3), 0.25));
        assert!(mk(1.3).stable_with(&mk(1.05), 0.25));
    }
}
