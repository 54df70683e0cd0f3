//! Explicit leapfrog for `u_tt = Δu + |u|^p` on a 1D line or a radial grid.
//!
//! The radial grid is cell-centred, `r_i = (i + 1/2) dr`, and the Laplacian
//! is written in flux form over cells `[i dr, (i+1) dr]`:
//! `(A_{i+1}(u_{i+1}-u_i) - A_i(u_i-u_{i-1})) / (dr V_i)` with face areas
//! `A_i = ω (i dr)^{n-1}` and cell volumes `V_i`. The mirror ghost
//! `u_{-1} = u_0` makes the flux through `r = 0` vanish, which is the
//! regularity condition `u_r(0,t) = 0`. The quadrature weights for `∫ · dx`
//! are the cell volumes, so summing the discrete Laplacian against them
//! telescopes to zero and the discrete functional obeys `F'' = ∫|u|^p`
//! exactly at the level of the scheme.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::wave::problem::WaveProblem;
use crate::wave::trace::{FunctionalTrace, RunOutcome, Snapshot};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    /// Full line `x in [-L, L]`.
    Line,
    /// Radial grid `r in [0, L]` in dimension `n >= 2`.
    Radial(u32),
}

/// Single-resolution solver output.
#[derive(Debug, Clone)]
pub struct Run {
    pub trace: FunctionalTrace,
    pub snapshots: Vec<Snapshot>,
    pub outcome: RunOutcome,
}

struct Stencil {
    positions: Vec<f64>,
    /// Coefficient of `u_{i+1} - u_i`.
    up: Vec<f64>,
    /// Coefficient of `u_{i-1} - u_i`.
    down: Vec<f64>,
    weights: Vec<f64>,
    /// Index of `x = 0` (line) or `r = 0` (radial).
    center: usize,
}

impl Stencil {
    fn new(geometry: Geometry, dx: f64, length: f64) -> Self {
        let cells = (length / dx).ceil() as usize + 2;
        let inv = 1.0 / (dx * dx);
        match geometry {
            Geometry::Line => {
                let size = 2 * cells + 1;
                let positions = (0..size).map(|i| (i as f64 - cells as f64) * dx).collect();
                Self {
                    positions,
                    up: vec![inv; size],
                    down: vec![inv; size],
                    weights: vec![dx; size],
                    center: cells,
                }
            }
            Geometry::Radial(n) => {
                let size = cells + 1;
                let area = crate::special::unit_sphere_area(n);
                let nf = n as f64;
                let ni = n as i32;
                // Cell i covers [i dr, (i+1) dr]; faces carry area ω r^{n-1}.
                let volume = |i: usize| {
                    area * dx.powi(ni) * ((i as f64 + 1.0).powi(ni) - (i as f64).powi(ni)) / nf
                };
                let face = |i: usize| area * (i as f64 * dx).powi(ni - 1);
                let mut up = vec![0.0; size];
                let mut down = vec![0.0; size];
                let mut weights = vec![0.0; size];
                for i in 0..size {
                    let v = volume(i);
                    weights[i] = v;
                    up[i] = face(i + 1) / (dx * v);
                    down[i] = if i == 0 { 0.0 } else { face(i) / (dx * v) };
                }
                Self {
                    positions: (0..size).map(|i| (i as f64 + 0.5) * dx).collect(),
                    up,
                    down,
                    weights,
                    center: 0,
                }
            }
        }
    }

    fn len(&self) -> usize {
        self.positions.len()
    }
}

/// Largest stable Courant ratio of the leapfrog scheme for the stencil.
///
/// For the line this is 1. For radial grids the spectral radius of the
/// discrete Laplacian (in units of `1/dr²`) is found by power iteration in
/// the weighted inner product in which the operator is symmetric; the
/// leapfrog bound is `2 / sqrt(spectral radius)`. The origin mode is
/// localised, so a modest grid gives the grid-independent value.
pub fn cfl_limit(geometry: Geometry) -> f64 {
    match geometry {
        Geometry::Line => 1.0,
        Geometry::Radial(n) => {
            static CACHE: OnceLock<std::sync::Mutex<Vec<(u32, f64)>>> = OnceLock::new();
            let cache = CACHE.get_or_init(Default::default);
            if let Some(&(_, v)) = cache.lock().unwrap().iter().find(|(k, _)| *k == n) {
                return v;
            }
            let v = 2.0 / radial_spectral_radius(n).sqrt();
            cache.lock().unwrap().push((n, v));
            v
        }
    }
}

fn radial_spectral_radius(n: u32) -> f64 {
    let st = Stencil::new(Geometry::Radial(n), 1.0, 200.0);
    let size = st.len();
    let apply = |u: &[f64], out: &mut [f64]| {
        for i in 0..size - 1 {
            let below = if i == 0 { u[0] } else { u[i - 1] };
            out[i] = st.up[i] * (u[i + 1] - u[i]) + st.down[i] * (below - u[i]);
        }
        // Dirichlet closure at the far end.
        out[size - 1] = -(st.up[size - 1] + st.down[size - 1]) * u[size - 1]
            + st.down[size - 1] * u[size - 2];
    };
    let dot = |a: &[f64], b: &[f64]| -> f64 {
        a.iter().zip(b).zip(&st.weights).map(|((x, y), w)| x * y * w).sum()
    };
    let mut u: Vec<f64> = (0..size)
        .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 } / (1.0 + i as f64))
        .collect();
    let mut v = vec![0.0; size];
    let mut rho = 0.0;
    for _ in 0..4000 {
        apply(&u, &mut v);
        let norm = dot(&v, &v).sqrt();
        let next = dot(&u, &v).abs() / dot(&u, &u);
        for (a, b) in u.iter_mut().zip(&v) {
            *a = b / norm;
        }
        if (next - rho).abs() < 1e-13 * next {
            rho = next;
            break;
        }
        rho = next;
    }
    rho
}

/// Steps per local blow-up time scale below which `dt` is halved.
const TIME_SCALE_FACTOR: f64 = 0.1;

#[derive(Clone, Copy)]
enum Power {
    Two,
    Three,
    General(f64),
}

impl Power {
    fn new(p: f64) -> Self {
        if p == 2.0 {
            Power::Two
        } else if p == 3.0 {
            Power::Three
        } else {
            Power::General(p)
        }
    }

    #[inline(always)]
    fn abs_pow(self, u: f64) -> f64 {
        match self {
            Power::Two => u * u,
            Power::Three => (u * u * u).abs(),
            Power::General(p) => u.abs().powf(p),
        }
    }
}

/// Integrate one problem at spatial step `dx` until blow-up or the horizon,
/// recording the trace at every level and the field at the levels nearest to
/// `snapshot_times`.
pub fn run(
    prob: &WaveProblem,
    geometry: Geometry,
    dx: f64,
    snapshot_times: &[f64],
) -> Result<Run> {
    prob.validate()?;
    let limit = cfl_limit(geometry);
    if prob.grid.cfl > limit {
        return Err(Error::InvalidProblem(format!(
            "cfl {} exceeds the stability limit {limit:.6} of the stencil",
            prob.grid.cfl
        )));
    }
    let dim = match geometry {
        Geometry::Line => 1,
        Geometry::Radial(n) => n,
    };
    let length = prob.domain_length();
    let st = Stencil::new(geometry, dx, length);
    let size = st.len();
    let dt = prob.grid.cfl * dx;
    let dt2 = dt * dt;
    let pow = Power::new(prob.p);
    let source = if prob.source { 1.0 } else { 0.0 };
    let radius = prob.radius;

    let u0: Vec<f64> = st
        .positions
        .iter()
        .map(|&x| prob.eps * prob.f.eval(dim, radius, x))
        .collect();
    let v0: Vec<f64> = st
        .positions
        .iter()
        .map(|&x| prob.eps * prob.g.eval(dim, radius, x))
        .collect();

    // Active index range: everything outside is exactly zero for the discrete
    // scheme, and it widens by one cell per step.
    let support_cells = (radius / dx).ceil() as usize + 1;
    let (mut lo, mut hi) = match geometry {
        Geometry::Line => (
            st.center.saturating_sub(support_cells).max(1),
            (st.center + support_cells).min(size - 2),
        ),
        Geometry::Radial(_) => (0, support_cells.min(size - 2)),
    };

    let lap = |u: &[f64], i: usize| -> f64 {
        let below = if i == 0 { u[0] } else { u[i - 1] };
        st.up[i] * (u[i + 1] - u[i]) + st.down[i] * (below - u[i])
    };

    let mut prev = u0.clone();
    let mut cur = vec![0.0; size];
    let mut next = vec![0.0; size];

    let mut times = Vec::new();
    let mut fs = Vec::new();
    let mut fpps = Vec::new();
    let mut sups = Vec::new();

    let mut snap_steps: Vec<(usize, f64)> = snapshot_times
        .iter()
        .map(|&t| ((t / dt).round() as usize, t))
        .collect();
    snap_steps.sort_by(|a, b| a.0.cmp(&b.0));
    let mut snapshots = Vec::new();
    let mut snap_cursor = 0;
    let mut take_snapshots = |step: usize, u: &[f64], lo: usize, hi: usize| {
        while snap_cursor < snap_steps.len() && snap_steps[snap_cursor].0 == step {
            snapshots.push(Snapshot {
                t: step as f64 * dt,
                positions: st.positions[lo..=hi].to_vec(),
                values: u[lo..=hi].to_vec(),
            });
            snap_cursor += 1;
        }
    };

    // Level 0 diagnostics and the Taylor start
    // u^1 = u^0 + dt v^0 + dt²/2 (Δu^0 + |u^0|^p).
    let mut f_acc = 0.0;
    let mut fpp_acc = 0.0;
    let mut sup = 0.0_f64;
    let mut f_prime0 = 0.0;
    for i in lo..=hi {
        let w = st.weights[i];
        let s = pow.abs_pow(prev[i]);
        f_acc += w * prev[i];
        fpp_acc += w * s;
        f_prime0 += w * v0[i];
        sup = sup.max(prev[i].abs());
        cur[i] = prev[i] + dt * v0[i] + 0.5 * dt2 * (lap(&prev, i) + source * s);
    }
    times.push(0.0);
    fs.push(f_acc);
    fpps.push(fpp_acc);
    sups.push(sup);
    take_snapshots(0, &prev, lo, hi);
    if lo > 0 {
        lo -= 1;
    }
    hi = (hi + 1).min(size - 2);

    let t_horizon = prob.caps.t_horizon;
    let u_max = prob.caps.u_max;
    let dt_grid = dt;
    let mut dt = dt;
    let mut t = 0.0;
    let mut step = 1usize;
    let mut sup_next = 0.0_f64;
    for i in lo..=hi {
        sup_next = sup_next.max(cur[i].abs());
    }
    let outcome = loop {
        t += dt;
        // Shrink the step once the local blow-up time scale |u|^{-(p-1)/2}
        // drops below the grid step; restart leapfrog from a Taylor expansion.
        let scale = TIME_SCALE_FACTOR * sup_next.powf(-(prob.p - 1.0) / 2.0);
        if source > 0.0 && scale < 0.5 * dt && sup_next.is_finite() {
            let new_dt = dt * 0.5;
            let old_dt = dt;
            for i in lo..=hi {
                let acc = lap(&cur, i) + pow.abs_pow(cur[i]);
                let vel = (cur[i] - prev[i]) / old_dt + 0.5 * old_dt * acc;
                next[i] = cur[i] - new_dt * vel + 0.5 * new_dt * new_dt * acc;
            }
            std::mem::swap(&mut prev, &mut next);
            dt = new_dt;
        }
        let dt2 = dt * dt;
        let mut f_acc = 0.0;
        let mut fpp_acc = 0.0;
        let mut sup = 0.0_f64;
        sup_next = 0.0;
        for i in lo..=hi {
            let u = cur[i];
            let s = pow.abs_pow(u);
            let w = st.weights[i];
            f_acc += w * u;
            fpp_acc += w * s;
            sup = sup.max(u.abs());
            let v = 2.0 * u - prev[i] + dt2 * (lap(&cur, i) + source * s);
            sup_next = sup_next.max(v.abs());
            next[i] = v;
        }
        if !sup.is_finite() || !f_acc.is_finite() || sup > u_max {
            break RunOutcome::BlowUp {
                t_lo: *times.last().expect("level 0 recorded"),
                t_hi: t,
            };
        }
        times.push(t);
        fs.push(f_acc);
        fpps.push(fpp_acc);
        sups.push(sup);
        if dt == dt_grid {
            take_snapshots(step, &cur, lo, hi);
        }
        if t >= t_horizon {
            break RunOutcome::Horizon { t_end: t };
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
        if lo > 1 {
            lo -= 1;
        }
        if hi < size - 2 {
            hi += 1;
        }
        if sup_next.is_nan() {
            sup_next = f64::INFINITY;
        }
        step += 1;
    };

    let g_half = 0.5 * prob.g.mass();
    Ok(Run {
        trace: FunctionalTrace {
            n: dim,
            p: prob.p,
            eps: prob.eps,
            radius,
            dx,
            dt: dt_grid,
            times,
            f: fs,
            fpp: fpps,
            sup_u: sups,
            f_prime0,
            g_half,
            quadrature: match geometry {
                Geometry::Line => "midpoint sum on uniform x grid".into(),
                Geometry::Radial(_) => {
                    "cell volumes omega_{n-1} r^{n-1} dr, origin cell (dr/2)^n/n".into()
                }
            },
        },
        snapshots,
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wave::problem::Profile;

    #[test]
    fn line_limit_is_one_and_radial_limits_are_close_to_one() {
        assert_eq!(cfl_limit(Geometry::Line), 1.0);
        for n in 2..=4 {
            let c = cfl_limit(Geometry::Radial(n));
            assert!(c > 0.9 && c < 1.01, "n = {n}: {c}");
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let prob = WaveProblem::new(1, 2.0, 0.1, Profile::Zero, Profile::Zero).with_caps(1e6, 5.0);
        let run = run(&prob, Geometry::Line, 0.1, &[2.0]).unwrap();
        assert!(matches!(run.outcome, RunOutcome::Horizon { .. }));
        assert!(run.trace.f.iter().all(|&f| f == 0.0));
        assert!(run.snapshots[0].values.iter().all(|&u| u == 0.0));
    }

    #[test]
    fn rejects_unstable_cfl() {
        let prob = WaveProblem::new(3, 2.0, 0.1, Profile::Zero, Profile::unit_bump())
            .with_grid(0.1, 0.99)
            .with_caps(1e6, 1.0);
        assert!(matches!(
            run(&prob, Geometry::Radial(3), 0.1, &[]),
            Err(Error::InvalidProblem(_))
        ));
    }
}
