use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{gamma_half, unit_sphere_area};

/// Initial-data profile, radial in `|x|` and supported in `|x| <= R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    Zero,
    /// `c (1 - (|x|/R)²)⁴` on `|x| <= R`, with `c` chosen so that `∫ profile dx = mass`.
    Bump { mass: f64 },
}

impl Profile {
    pub fn unit_bump() -> Self {
        Profile::Bump { mass: 1.0 }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            Profile::Zero => true,
            Profile::Bump { mass } => mass == 0.0,
        }
    }

    /// `∫_{R^n} profile dx`.
    pub fn mass(&self) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Bump { mass } => mass,
        }
    }

    /// Amplitude `c` of the bump in dimension `n` with support radius `radius`.
    pub fn amplitude(&self, n: u32, radius: f64) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Bump { mass } => mass / bump_integral(n, radius),
        }
    }

    /// Profile value at distance `r >= 0` from the origin.
    pub fn eval(&self, n: u32, radius: f64, r: f64) -> f64 {
        let r = r.abs();
        if r >= radius {
            return 0.0;
        }
        let s = 1.0 - (r / radius).powi(2);
        self.amplitude(n, radius) * s.powi(4)
    }
}

/// `∫_{R^n} (1 - (|x|/R)²)⁴ dx = π^{n/2} R^n Γ(5) / Γ(n/2 + 5)`.
pub fn bump_integral(n: u32, radius: f64) -> f64 {
    std::f64::consts::PI.powf(n as f64 / 2.0) * radius.powi(n as i32) * 24.0 / gamma_half(n + 10)
}

/// Spatial discretisation controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Coarsest spatial step.
    pub dx: f64,
    /// Courant ratio `dt / dx`.
    pub cfl: f64,
    /// Half-length (1D) or radius (radial) of the domain. Defaults to
    /// `t_horizon + R + margin`, which keeps the outer boundary outside the
    /// light cone for the whole run.
    #[serde(default)]
    pub length: Option<f64>,
    /// Number of grid levels `dx, dx/2, dx/4, ...` used for the lifespan estimate.
    #[serde(default = "default_levels")]
    pub levels: usize,
}

fn default_levels() -> usize {
    3
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            dx: 0.05,
            cfl: 0.9,
            length: None,
            levels: default_levels(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    /// Blow-up threshold on `sup|u|`.
    pub u_max: f64,
    pub t_horizon: f64,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            u_max: 1e6,
            t_horizon: 200.0,
        }
    }
}

/// `u_tt - Δu = |u|^p` in `R^n` with data `(ε f, ε g)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveProblem {
    pub n: u32,
    pub p: f64,
    pub eps: f64,
    pub f: Profile,
    pub g: Profile,
    /// Support radius `R` of both profiles.
    pub radius: f64,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub caps: Caps,
    /// When false the right-hand side `|u|^p` is dropped (linear wave equation).
    #[serde(default = "default_true")]
    pub source: bool,
}

fn default_true() -> bool {
    true
}

impl WaveProblem {
    /// Problem with unit-mass bump data as selected and default controls.
    pub fn new(n: u32, p: f64, eps: f64, f: Profile, g: Profile) -> Self {
        Self {
            n,
            p,
            eps,
            f,
            g,
            radius: 1.0,
            grid: GridSpec::default(),
            caps: Caps::default(),
            source: true,
        }
    }

    pub fn with_grid(mut self, dx: f64, cfl: f64) -> Self {
        self.grid.dx = dx;
        self.grid.cfl = cfl;
        self
    }

    pub fn with_levels(mut self, levels: usize) -> Self {
        self.grid.levels = levels;
        self
    }

    pub fn with_caps(mut self, u_max: f64, t_horizon: f64) -> Self {
        self.caps = Caps { u_max, t_horizon };
        self
    }

    pub fn linear(mut self) -> Self {
        self.source = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidProblem(msg));
        if self.n < 1 {
            return bad(format!("dimension must be >= 1, got {}", self.n));
        }
        if !(self.p.is_finite() && self.p > 1.0) {
            return bad(format!("power must be > 1, got {}", self.p));
        }
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return bad(format!("eps must be > 0, got {}", self.eps));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return bad(format!("support radius must be > 0, got {}", self.radius));
        }
        for (name, prof) in [("f", self.f), ("g", self.g)] {
            if let Profile::Bump { mass } = prof {
                if !mass.is_finite() {
                    return bad(format!("{name} mass must be finite"));
                }
            }
        }
        let g = &self.grid;
        if !(g.dx.is_finite() && g.dx > 0.0 && g.dx < self.radius) {
            return bad(format!("dx must lie in (0, R), got {}", g.dx));
        }
        if !(g.cfl.is_finite() && g.cfl > 0.0) {
            return bad(format!("cfl must be > 0, got {}", g.cfl));
        }
        if g.levels == 0 {
            return bad("at least one grid level is required".into());
        }
        let c = &self.caps;
        if !(c.u_max.is_finite() && c.u_max > 0.0) {
            return bad(format!("u_max must be > 0, got {}", c.u_max));
        }
        if !(c.t_horizon.is_finite() && c.t_horizon > 0.0) {
            return bad(format!("t_horizon must be > 0, got {}", c.t_horizon));
        }
        if let Some(len) = g.length {
            if len < c.t_horizon + self.radius {
                return bad(format!(
                    "domain length {len} < t_horizon + R = {}; the boundary would enter the light cone",
                    c.t_horizon + self.radius
                ));
            }
        }
        Ok(())
    }

    pub fn data_nonnegative(&self) -> bool {
        self.f.mass() >= 0.0 && self.g.mass() >= 0.0
    }

    /// `ε ∫ f dx`.
    pub fn f_integral(&self) -> f64 {
        self.eps * self.f.mass()
    }

    /// `ε ∫ g dx`.
    pub fn g_integral(&self) -> f64 {
        self.eps * self.g.mass()
    }

    /// Domain length actually used by the solver. The discrete scheme moves
    /// one cell per step, so the default covers `t_horizon / cfl`.
    pub fn domain_length(&self) -> f64 {
        self.grid
            .length
            .unwrap_or(self.caps.t_horizon / self.grid.cfl + self.radius + 10.0 * self.grid.dx)
    }

    /// Hölder constants `(B, q)` with `∫|u|^p >= B (t+R)^{-q} |∫u|^p` on `|x| <= t+R`.
    pub fn holder_constants(&self) -> (f64, f64) {
        let vol = crate::special::unit_ball_volume(self.n);
        (vol.powf(1.0 - self.p), self.n as f64 * (self.p - 1.0))
    }

    /// Weight `ω_{n-1}` that turns `∫ h(r) r^{n-1} dr` into `∫_{R^n} h dx`.
    pub fn sphere_area(&self) -> f64 {
        unit_sphere_area(self.n)
    }
}

/// Closed-form solutions of the linear problem used as references.
pub mod linear {
    use super::*;

    /// Antiderivative of `(1 - y²)⁴` vanishing at `y = 0`, clamped to `|y| <= 1`.
    fn bump_primitive(y: f64) -> f64 {
        let y = y.clamp(-1.0, 1.0);
        let y2 = y * y;
        y * (1.0 + y2 * (-4.0 / 3.0 + y2 * (6.0 / 5.0 + y2 * (-4.0 / 7.0 + y2 / 9.0))))
    }

    /// d'Alembert solution of `u_tt = u_xx` with data `(ε f, ε g)`.
    pub fn dalembert_1d(prob: &WaveProblem, x: f64, t: f64) -> f64 {
        let r = prob.radius;
        let f = |y: f64| prob.f.eval(1, r, y);
        let cg = prob.g.amplitude(1, r);
        let g_int = cg * r * (bump_primitive((x + t) / r) - bump_primitive((x - t) / r));
        prob.eps * (0.5 * (f(x + t) + f(x - t)) + 0.5 * g_int)
    }

    /// Radial solution of the 3D linear wave equation with `f = 0`:
    /// `u(r,t) = (H(r+t) - H(r-t)) / (2r)` with `H' (s) = s g(|s|)`.
    pub fn radial_3d_g_only(prob: &WaveProblem, r: f64, t: f64) -> f64 {
        let rad = prob.radius;
        let c = prob.g.amplitude(3, rad);
        if r < 1e-12 {
            return prob.eps * t * prob.g.eval(3, rad, t);
        }
        let h = |s: f64| {
            let y = (s.abs() / rad).min(1.0);
            -c * rad * rad / 10.0 * (1.0 - y * y).powi(5)
        };
        prob.eps * (h(r + t) - h(r - t)) / (2.0 * r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::adaptive_simpson;

    #[test]
    fn bump_mass_is_normalised() {
        for n in 1..=4u32 {
            let prof = Profile::Bump { mass: 1.7 };
            let radius = 1.3;
            let area = if n == 1 { 2.0 } else { unit_sphere_area(n) };
            let integral = area
                * adaptive_simpson(
                    &|r: f64| prof.eval(n, radius, r) * r.powi(n as i32 - 1),
                    0.0,
                    radius,
                    1e-12,
                );
            assert!((integral - 1.7).abs() < 1e-9, "n = {n}: {integral}");
        }
    }

    #[test]
    fn profile_vanishes_outside_support() {
        let prof = Profile::unit_bump();
        assert_eq!(prof.eval(2, 1.0, 1.0), 0.0);
        assert_eq!(prof.eval(2, 1.0, 3.0), 0.0);
        assert!(prof.eval(2, 1.0, 0.999) > 0.0);
        assert_eq!(Profile::Zero.eval(3, 1.0, 0.0), 0.0);
    }

    #[test]
    fn validation_rejects_bad_inputs() {
        let base = WaveProblem::new(1, 2.0, 0.1, Profile::Zero, Profile::unit_bump());
        assert!(base.validate().is_ok());
        let mut p = base.clone();
        p.p = 1.0;
        assert!(p.validate().is_err());
        let mut p = base.clone();
        p.eps = 0.0;
        assert!(p.validate().is_err());
        let mut p = base.clone();
        p.grid.length = Some(10.0);
        assert!(p.validate().is_err());
        let mut p = base;
        p.grid.dx = 2.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn dalembert_initial_data() {
        let prob = WaveProblem::new(1, 2.0, 0.3, Profile::unit_bump(), Profile::unit_bump());
        let x = 0.4;
        let u0 = linear::dalembert_1d(&prob, x, 0.0);
        assert!((u0 - 0.3 * prob.f.eval(1, 1.0, x)).abs() < 1e-14);
        let h = 1e-5;
        let ut = (linear::dalembert_1d(&prob, x, h) - linear::dalembert_1d(&prob, x, -h)) / (2.0 * h);
        assert!((ut - 0.3 * prob.g.eval(1, 1.0, x)).abs() < 1e-8);
    }

    #[test]
    fn radial_3d_reference_has_linear_mass_growth() {
        let prob = WaveProblem::new(3, 2.0, 0.5, Profile::Zero, Profile::unit_bump());
        for t in [0.5, 2.0, 5.0] {
            let mass = 4.0
                * std::f64::consts::PI
                * adaptive_simpson(
                    &|r: f64| linear::radial_3d_g_only(&prob, r, t) * r * r,
                    0.0,
                    t + 1.0,
                    1e-12,
                );
            assert!((mass - 0.5 * t).abs() < 1e-8, "t = {t}: {mass}");
        }
    }
}
