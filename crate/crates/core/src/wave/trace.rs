use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Time series of the functional `F(t) = ∫u dx` and related quantities, one
/// sample per time level of the solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalTrace {
    pub n: u32,
    pub p: f64,
    pub eps: f64,
    pub radius: f64,
    pub dx: f64,
    /// Grid time step `cfl * dx` (the step is only refined near blow-up).
    pub dt: f64,
    pub times: Vec<f64>,
    /// `∫ u dx`.
    pub f: Vec<f64>,
    /// `∫ |u|^p dx`.
    pub fpp: Vec<f64>,
    pub sup_u: Vec<f64>,
    /// `F'(0) = ε ∫ g dx` by the same quadrature as `F`.
    pub f_prime0: f64,
    /// `G = (1/2) ∫ g dx` (without the factor `ε`).
    pub g_half: f64,
    /// Quadrature used for `F` and `Fpp`.
    pub quadrature: String,
}

impl FunctionalTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    /// Centred second difference of `F` at interior index `k`. The spacing
    /// is uniform (`dt`) except close to blow-up, where the solver refines
    /// the time step; the three-point formula handles both.
    pub fn second_difference(&self, k: usize) -> f64 {
        let h1 = self.times[k] - self.times[k - 1];
        let h2 = self.times[k + 1] - self.times[k];
        2.0 * ((self.f[k + 1] - self.f[k]) / h2 - (self.f[k] - self.f[k - 1]) / h1) / (h1 + h2)
    }

    /// Indices `k` with `times[k]` in `[t0, t1)`.
    pub fn indices_in(&self, t0: f64, t1: f64) -> impl Iterator<Item = usize> + '_ {
        self.times
            .iter()
            .enumerate()
            .filter(move |(_, &t)| t >= t0 && t < t1)
            .map(|(k, _)| k)
    }

    /// Write the `t,F,Fpp,sup_u` CSV table.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "F", "Fpp", "sup_u"])?;
        for k in 0..self.len() {
            w.write_record(&[
                format!("{:.12e}", self.times[k]),
                format!("{:.12e}", self.f[k]),
                format!("{:.12e}", self.fpp[k]),
                format!("{:.12e}", self.sup_u[k]),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// Radial (or 1D) solution values at one time level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    /// Grid coordinates: `x` in 1D, `r` for radial runs.
    pub positions: Vec<f64>,
    pub values: Vec<f64>,
}

impl Snapshot {
    /// Linear interpolation of the field at `pos`; zero outside the stored range.
    pub fn value_at(&self, pos: f64) -> f64 {
        let xs = &self.positions;
        if xs.is_empty() || pos < xs[0] || pos > xs[xs.len() - 1] {
            return 0.0;
        }
        let k = xs.partition_point(|&x| x <= pos).saturating_sub(1);
        if k + 1 >= xs.len() {
            return self.values[k];
        }
        let w = (pos - xs[k]) / (xs[k + 1] - xs[k]);
        (1.0 - w) * self.values[k] + w * self.values[k + 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunOutcome {
    /// `sup|u|` exceeded the cap (or became non-finite) between `t_lo` and `t_hi`.
    BlowUp { t_lo: f64, t_hi: f64 },
    /// The horizon was reached without crossing the cap; the run is inconclusive.
    Horizon { t_end: f64 },
}

impl RunOutcome {
    pub fn midpoint(&self) -> Option<f64> {
        match *self {
            RunOutcome::BlowUp { t_lo, t_hi } => Some(0.5 * (t_lo + t_hi)),
            RunOutcome::Horizon { .. } => None,
        }
    }
}

/// Numerical lifespan with its grid-refinement history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupEstimate {
    /// Outcome on the finest grid.
    pub outcome: RunOutcome,
    /// `(dx, T(dx))` for every level that blew up, coarse to fine.
    pub refinement: Vec<(f64, f64)>,
    pub observed_order: Option<f64>,
    pub extrapolated: Option<f64>,
    pub converged: bool,
}

/// Relative agreement of the two finest levels required for `converged`.
pub const CONVERGED_REL: f64 = 0.02;

/// Relative level difference treated as bracket noise.
pub const NOISE_REL: f64 = 1e-4;

impl BlowupEstimate {
    /// Build from per-level outcomes (coarse to fine).
    pub fn from_levels(levels: &[(f64, RunOutcome)]) -> Self {
        let outcome = levels
            .last()
            .map(|(_, o)| *o)
            .unwrap_or(RunOutcome::Horizon { t_end: 0.0 });
        let all_blew_up = levels.iter().all(|(_, o)| o.midpoint().is_some());
        let refinement: Vec<(f64, f64)> = levels
            .iter()
            .filter_map(|(dx, o)| o.midpoint().map(|t| (*dx, t)))
            .collect();
        if !all_blew_up || refinement.len() < 2 {
            return Self {
                outcome,
                refinement,
                observed_order: None,
                extrapolated: None,
                converged: false,
            };
        }
        let (observed_order, extrapolated) = richardson(&refinement);
        let k = refinement.len();
        let last = (refinement[k - 1].1 - refinement[k - 2].1).abs();
        // Once the levels agree to the bracket resolution the differences are
        // noise and need not shrink.
        let shrinking = k < 3
            || last <= (refinement[k - 2].1 - refinement[k - 3].1).abs()
            || last <= NOISE_REL * refinement[k - 1].1.abs();
        let converged = last <= CONVERGED_REL * refinement[k - 1].1.abs() && shrinking;
        Self {
            outcome,
            refinement,
            observed_order,
            extrapolated: Some(extrapolated),
            converged,
        }
    }

    pub fn t_lo(&self) -> f64 {
        match self.outcome {
            RunOutcome::BlowUp { t_lo, .. } => t_lo,
            RunOutcome::Horizon { t_end } => t_end,
        }
    }

    pub fn t_hi(&self) -> Option<f64> {
        match self.outcome {
            RunOutcome::BlowUp { t_hi, .. } => Some(t_hi),
            RunOutcome::Horizon { .. } => None,
        }
    }

    /// Best lifespan value: extrapolated when available, otherwise the finest midpoint.
    pub fn lifespan(&self) -> Result<f64> {
        match self.outcome {
            RunOutcome::Horizon { t_end } => Err(Error::NoBlowup { horizon: t_end }),
            RunOutcome::BlowUp { .. } => Ok(self
                .extrapolated
                .or_else(|| self.outcome.midpoint())
                .expect("blow-up outcome has a midpoint")),
        }
    }
}

/// Richardson extrapolation of `T(dx)` for grids halved at each level.
///
/// With three or more levels the order is estimated from the last three; if
/// the differences are not of one sign, or the estimate is outside `[0.5, 4]`,
/// the nominal order 2 is used. Returns `(observed order, extrapolated value)`.
pub fn richardson(levels: &[(f64, f64)]) -> (Option<f64>, f64) {
    let k = levels.len();
    assert!(k >= 2, "richardson needs two levels");
    let t_fine = levels[k - 1].1;
    let t_mid = levels[k - 2].1;
    let observed = if k >= 3 {
        let d1 = levels[k - 2].1 - levels[k - 3].1;
        let d2 = t_fine - t_mid;
        (d1 * d2 > 0.0)
            .then(|| (d1 / d2).log2())
            .filter(|q| (0.5..=4.0).contains(q))
    } else {
        None
    };
    let ratio = levels[k - 2].0 / levels[k - 1].0;
    let order = observed.unwrap_or(2.0);
    let extrapolated = t_fine + (t_fine - t_mid) / (ratio.powf(order) - 1.0);
    (observed, extrapolated)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_recovers_quadratic_error() {
        let levels: Vec<(f64, f64)> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&h| (h, 3.0 + 7.0 * h * h))
            .collect();
        let (order, t) = richardson(&levels);
        assert!((order.unwrap() - 2.0).abs() < 1e-9);
        assert!((t - 3.0).abs() < 1e-12);
    }

    #[test]
    fn richardson_first_order() {
        let levels: Vec<(f64, f64)> = [0.2, 0.1, 0.05]
            .iter()
            .map(|&h| (h, 10.0 - 4.0 * h))
            .collect();
        let (order, t) = richardson(&levels);
        assert!((order.unwrap() - 1.0).abs() < 1e-9);
        assert!((t - 10.0).abs() < 1e-12);
    }

    #[test]
    fn estimate_convergence_flags() {
        let blow = |t: f64| RunOutcome::BlowUp { t_lo: t - 0.01, t_hi: t + 0.01 };
        let est = BlowupEstimate::from_levels(&[(0.1, blow(10.4)), (0.05, blow(10.1)), (0.025, blow(10.025))]);
        assert!(est.converged);
        assert!((est.lifespan().unwrap() - 10.0).abs() < 1e-9);

        let est = BlowupEstimate::from_levels(&[(0.1, blow(10.0)), (0.05, blow(12.0))]);
        assert!(!est.converged);

        let est = BlowupEstimate::from_levels(&[(0.1, blow(10.0)), (0.05, blow(10.0001)), (0.025, blow(10.0))]);
        assert!(est.converged);
        let est = BlowupEstimate::from_levels(&[(0.1, blow(10.0)), (0.05, blow(10.005)), (0.025, blow(9.995))]);
        assert!(!est.converged);

        let est = BlowupEstimate::from_levels(&[(0.1, blow(10.0)), (0.05, RunOutcome::Horizon { t_end: 50.0 })]);
        assert!(!est.converged);
        assert!(matches!(est.lifespan(), Err(Error::NoBlowup { .. })));
    }

    #[test]
    fn snapshot_interpolation() {
        let s = Snapshot {
            t: 1.0,
            positions: vec![0.0, 1.0, 2.0],
            values: vec![0.0, 2.0, 4.0],
        };
        assert_eq!(s.value_at(0.5), 1.0);
        assert_eq!(s.value_at(2.0), 4.0);
        assert_eq!(s.value_at(3.0), 0.0);
    }
}
