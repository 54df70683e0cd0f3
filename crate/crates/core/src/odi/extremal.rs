use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::odi::problem::OdiProblem;
use crate::special::adaptive_simpson;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalControls {
    /// Relative local error tolerance of the Dormand-Prince pair.
    pub rtol: f64,
    pub atol: f64,
    /// First level used to locate the blow-up; raised tenfold until the
    /// bracket is narrow enough.
    pub f_max: f64,
    /// Required relative bracket width `(hi - lo) / lo`.
    pub bracket_tol: f64,
    pub horizon: f64,
    pub max_steps: usize,
    /// Log-uniform sample count for the growth hypothesis check.
    pub growth_samples: usize,
}

impl Default for ExtremalControls {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            f_max: 1e8,
            bracket_tol: 1e-3,
            horizon: 1e7,
            max_steps: 5_000_000,
            growth_samples: 1000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "Fp")]
    pub fp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeBlowupResult {
    /// Time at which `F` reached the last level (a lower bound for blow-up).
    pub t_blow_lo: f64,
    /// Comparison upper bound on the blow-up time.
    pub t_blow_hi: f64,
    /// `(level, reach time)` for every level tried.
    pub reach_times: Vec<(f64, f64)>,
    /// Whether `F(t) >= A t^a` held at every sample in `[T0, t_blow_lo]`.
    pub growth_hypothesis_ok: bool,
    /// Smallest sampled `F(t) / (A t^a)` on `[T0, t_blow_lo]` (infinite if the interval is empty).
    pub growth_margin: f64,
    pub steps: usize,
    pub trajectory: Vec<TrajectoryPoint>,
    pub fingerprint: String,
}

impl OdeBlowupResult {
    pub fn bracket_width(&self) -> f64 {
        (self.t_blow_hi - self.t_blow_lo) / self.t_blow_lo
    }

    /// Cubic Hermite interpolation of `F` from the stored trajectory.
    pub fn f_at(&self, t: f64) -> f64 {
        let tr = &self.trajectory;
        let k = tr.partition_point(|pt| pt.t <= t).clamp(1, tr.len() - 1);
        let (a, b) = (&tr[k - 1], &tr[k]);
        let h = b.t - a.t;
        let s = ((t - a.t) / h).clamp(0.0, 1.0);
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        h00 * a.f + h10 * h * a.fp + h01 * b.f + h11 * h * b.fp
    }

    /// Minimum of `F(t) / t^a` over the stored nodes and `samples`
    /// log-uniform points of `[t_from, t_blow_lo]`.
    pub fn min_growth_ratio(&self, a: f64, t_from: f64, samples: usize) -> Option<f64> {
        let t_to = self.t_blow_lo;
        if !(t_from < t_to) {
            return None;
        }
        let mut best = f64::INFINITY;
        for pt in self.trajectory.iter().filter(|pt| pt.t >= t_from && pt.t <= t_to) {
            best = best.min(pt.f / pt.t.powf(a));
        }
        let (l0, l1) = (t_from.ln(), t_to.ln());
        let count = samples.max(2);
        for i in 0..count {
            let t = (l0 + (l1 - l0) * i as f64 / (count - 1) as f64).exp().clamp(t_from, t_to);
            best = best.min(self.f_at(t) / t.powf(a));
        }
        Some(best)
    }
}

type State = [f64; 2];

struct Rhs {
    p: f64,
    q: f64,
    b: f64,
    shift: f64,
}

impl Rhs {
    fn eval(&self, t: f64, y: &State) -> State {
        [y[1], self.b * (t + self.shift).powf(-self.q) * y[0].abs().powf(self.p)]
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One Dormand-Prince step; returns the fifth-order solution and the error estimate.
fn dp_step(rhs: &Rhs, t: f64, y: &State, h: f64) -> (State, State) {
    let mut k = [[0.0; 2]; 7];
    k[0] = rhs.eval(t, y);
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            ys[0] += h * A[s][j] * kj[0];
            ys[1] += h * A[s][j] * kj[1];
        }
        k[s] = rhs.eval(t + C[s] * h, &ys);
    }
    let mut out = *y;
    let mut err = [0.0; 2];
    for s in 0..7 {
        out[0] += h * B5[s] * k[s][0];
        out[1] += h * B5[s] * k[s][1];
        err[0] += h * E[s] * k[s][0];
        err[1] += h * E[s] * k[s][1];
    }
    (out, err)
}

/// Upper bound on the time `F` needs to go from `(F1, V1)` at `t1` to infinity.
///
/// On `[t1, t1 + τ]` the coefficient is at least `b = B (t1+τ+R)^{-q}`, and
/// the solution of `G'' = b G^p` with the same data blows up after `F`. Its
/// blow-up time follows from energy conservation; `τ` is enlarged until the
/// comparison blow-up happens inside `[t1, t1 + τ]`.
fn tail_bound(rhs: &Rhs, t1: f64, f1: f64, v1: f64) -> Option<f64> {
    if !(f1 > 0.0 && v1 > 0.0) {
        return None;
    }
    let p = rhs.p;
    let k = 2.0 * (p + 1.0) / (p - 1.0);
    let time_for = |b: f64| -> f64 {
        let kk = 2.0 * b * f1.powf(p + 1.0) / (p + 1.0);
        let v = v1 * v1 / kk;
        let g = |w: f64| 1.0 / (1.0 - (1.0 - v) * w.powf(k)).sqrt();
        let j = 2.0 / (p - 1.0) * adaptive_simpson(&g, 0.0, 1.0, 1e-12);
        f1 / kk.sqrt() * j
    };
    let mut tau = time_for(rhs.b * (t1 + rhs.shift).powf(-rhs.q));
    for _ in 0..200 {
        let b = rhs.b * (t1 + tau + rhs.shift).powf(-rhs.q);
        let tail = time_for(b);
        if !tail.is_finite() {
            return None;
        }
        if tail <= tau {
            return Some(tail);
        }
        tau = tail * 1.01;
    }
    None
}

/// Integrate `F'' = B (t+R)^{-q} |F|^p` from the problem's initial data and
/// bracket the blow-up time.
pub fn integrate_extremal(prob: &OdiProblem, controls: &ExtremalControls) -> Result<OdeBlowupResult> {
    prob.validate_parameters()?;
    let rhs = Rhs {
        p: prob.p,
        q: prob.q,
        b: prob.coef_b,
        shift: prob.shift,
    };
    let mut t = 0.0;
    let mut y: State = [prob.f0, prob.f0p];
    let mut trajectory = vec![TrajectoryPoint { t, f: y[0], fp: y[1] }];
    let scale0 = y[0].abs().max(y[1].abs()).max(1.0);
    let mut h = 1e-3 * scale0.recip().max(1e-3);
    let mut level = controls.f_max;
    let mut reach_times = Vec::new();
    let mut steps = 0;

    let (t_lo, t_hi) = loop {
        if steps >= controls.max_steps {
            return Err(Error::StepCollapse { t, step: h, level });
        }
        if t > controls.horizon {
            return Err(Error::NoBlowup { horizon: controls.horizon });
        }
        if h < 1e-15 * t.max(1.0) {
            return Err(Error::StepCollapse { t, step: h, level });
        }
        let (y_new, err) = dp_step(&rhs, t, &y, h);
        steps += 1;
        let sc = |i: usize| controls.atol + controls.rtol * y[i].abs().max(y_new[i].abs());
        let en = ((err[0] / sc(0)).powi(2) + (err[1] / sc(1)).powi(2)).sqrt() / 2.0_f64.sqrt();
        let finite = y_new[0].is_finite() && y_new[1].is_finite();
        if !finite || en > 1.0 {
            let factor = if finite { (0.9 * en.powf(-0.2)).max(0.2) } else { 0.1 };
            h *= factor;
            continue;
        }
        if y_new[0] >= level {
            // Bisect the step length for the crossing of `level`.
            let (mut lo, mut hi) = (0.0, h);
            let mut at = y_new;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let (ym, _) = dp_step(&rhs, t, &y, mid);
                if ym[0] >= level {
                    hi = mid;
                    at = ym;
                } else {
                    lo = mid;
                }
                if hi - lo <= 1e-15 * (t + hi) {
                    break;
                }
            }
            t += hi;
            y = at;
            trajectory.push(TrajectoryPoint { t, f: y[0], fp: y[1] });
            reach_times.push((level, t));
            if let Some(tail) = tail_bound(&rhs, t, y[0], y[1]) {
                // The comparison starts from the integrated state, so allow
                // for the global error of the reach time as well.
                let allowance = 1e3 * controls.rtol * t;
                if (tail + allowance) / t < controls.bracket_tol {
                    break (t, t + tail + allowance);
                }
            }
            level *= 10.0;
            if level > 1e290 {
                return Err(Error::Insufficient(format!(
                    "blow-up bracket did not narrow below {} before F = 1e290",
                    controls.bracket_tol
                )));
            }
            continue;
        }
        t += h;
        y = y_new;
        trajectory.push(TrajectoryPoint { t, f: y[0], fp: y[1] });
        h *= (0.9 * en.max(1e-10).powf(-0.2)).min(5.0);
    };

    let mut result = OdeBlowupResult {
        t_blow_lo: t_lo,
        t_blow_hi: t_hi,
        reach_times,
        growth_hypothesis_ok: true,
        growth_margin: f64::INFINITY,
        steps,
        trajectory,
        fingerprint: prob.fingerprint(),
    };
    if let Some(ratio) = result.min_growth_ratio(prob.a, prob.t_growth, controls.growth_samples) {
        result.growth_margin = ratio / prob.coef_a;
        result.growth_hypothesis_ok = result.growth_margin >= 1.0;
    }
    Ok(result)
}
