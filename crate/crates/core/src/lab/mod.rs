//! ε-sweeps of the wave solver, power-law fits of the lifespan and their
//! comparison with the predicted exponents.
//!
//! The predictions are upper bounds `T(ε) <= C ε^{-κ}`; matching lower bounds
//! are known in the same regimes, so the test applied here is on the fitted
//! slope rather than on a one-sided inequality.

mod fit;
mod ratio;
mod sweep;

pub use fit::{
    compare_to_theory, fit_log_log, fit_power_law, Comparison, FitResult, FitVerdict, TheoryPrediction,
    DEFAULT_SEED, DEFAULT_TOL, RESAMPLES,
};
pub use ratio::{check_a_scaling, ratio_series, RatioReport, RatioSeries, BOUNDED_RATIO, DRIFT_TOL};
pub use sweep::{
    default_eps_list, plot_rows, run_sweep, run_sweep_with, write_plot_csv, PlotRow, SweepPlan, SweepPoint,
    SweepResult, MIN_CONVERGED,
};
