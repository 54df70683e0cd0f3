//! Finite-difference solvers for `u_tt - Δu = |u|^p` with small compactly
//! supported data, and checks of the inequalities satisfied by `F(t) = ∫u dx`.

pub mod checks;
pub mod problem;
pub mod solver;
pub mod trace;

pub use checks::{BoundFitReport, CheckReport, Violation};
pub use problem::{Caps, GridSpec, Profile, WaveProblem};
pub use solver::{cfl_limit, Geometry, Run};
pub use trace::{BlowupEstimate, FunctionalTrace, RunOutcome, Snapshot};

use crate::error::{Error, Result};

/// Output of a full solve: the finest-grid run plus the refinement estimate.
#[derive(Debug, Clone)]
pub struct Solution {
    pub trace: FunctionalTrace,
    pub snapshots: Vec<Snapshot>,
    pub estimate: BlowupEstimate,
}

/// Solve on `dx, dx/2, ...` (`grid.levels` levels) and combine the lifespans.
pub fn solve(prob: &WaveProblem, geometry: Geometry, snapshot_times: &[f64]) -> Result<Solution> {
    prob.validate()?;
    let mut outcomes = Vec::with_capacity(prob.grid.levels);
    let mut finest = None;
    for level in 0..prob.grid.levels {
        let dx = prob.grid.dx / f64::powi(2.0, level as i32);
        let last = level + 1 == prob.grid.levels;
        let run = solver::run(prob, geometry, dx, if last { snapshot_times } else { &[] })?;
        outcomes.push((dx, run.outcome));
        if last {
            finest = Some(run);
        }
    }
    let run = finest.expect("at least one level");
    Ok(Solution {
        trace: run.trace,
        snapshots: run.snapshots,
        estimate: BlowupEstimate::from_levels(&outcomes),
    })
}

/// 1D problem on the full line.
pub fn solve_1d(prob: &WaveProblem) -> Result<(FunctionalTrace, BlowupEstimate)> {
    if prob.n != 1 {
        return Err(Error::InvalidProblem(format!("solve_1d needs n = 1, got {}", prob.n)));
    }
    let sol = solve(prob, Geometry::Line, &[])?;
    Ok((sol.trace, sol.estimate))
}

/// Radially symmetric problem in dimension `n >= 2`.
pub fn solve_radial(prob: &WaveProblem) -> Result<(FunctionalTrace, BlowupEstimate)> {
    let sol = solve_radial_with_snapshots(prob, &[])?;
    Ok((sol.trace, sol.estimate))
}

/// As [`solve_radial`], also returning the radial field at the requested times.
pub fn solve_radial_with_snapshots(prob: &WaveProblem, snapshot_times: &[f64]) -> Result<Solution> {
    if prob.n < 2 {
        return Err(Error::InvalidProblem(format!(
            "solve_radial needs n >= 2, got {}",
            prob.n
        )));
    }
    solve(prob, Geometry::Radial(prob.n), snapshot_times)
}

/// Geometry matching the problem's dimension.
pub fn geometry_for(prob: &WaveProblem) -> Geometry {
    if prob.n == 1 {
        Geometry::Line
    } else {
        Geometry::Radial(prob.n)
    }
}
