// ε-sweep of the 1D lifespan with a log-log fit against the predicted slope.
//
// ```bash
// cargo run --release --example lifespan_sweep
// ```

use kato_lab::exponents::Scenario;
use kato_lab::lab::*;
use kato_lab::wave::{Profile, WaveProblem};

pub fn run_example() -> kato_lab::Result<()> {
    for (scenario, p, f, g) in [
        (Scenario::OneDGPositive, 2.0, Profile::Zero, Profile::unit_bump()),
        (Scenario::OneDGPositive, 3.0, Profile::Zero, Profile::unit_bump()),
        (Scenario::OneDFOnly, 2.0, Profile::unit_bump(), Profile::Zero),
    ] {
        let base = WaveProblem::new(1, p, 0.1, f, g)
            .with_grid(0.05, 0.9)
            .with_caps(1e6, 1000.0);
        let plan = SweepPlan::new(scenario, base, default_eps_list(0.02, 0.2, 8));
        let result = run_sweep(&plan)?;
        let pred = TheoryPrediction::for_scenario(scenario, p, 1)?;
        let fit = fit_power_law(&result, pred.slope(), DEFAULT_TOL, DEFAULT_SEED)?;
        let cmp = compare_to_theory(&fit, &pred)?;
        println!(
            "{scenario} p = {p}: slope {:.4} [{:.4}, {:.4}] vs {:.4} ({}), r2 {:.6}",
            fit.slope, fit.slope_ci.0, fit.slope_ci.1, pred.slope(), cmp.verdict, fit.r2
        );
        if p == 2.0 && scenario == Scenario::OneDGPositive {
            let mut out = Vec::new();
            write_plot_csv(&plot_rows(&result, Some(&fit), &pred), &mut out)?;
            print!("{}", String::from_utf8_lossy(&out));
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> kato_lab::Result<()> {
    run_example()
}
