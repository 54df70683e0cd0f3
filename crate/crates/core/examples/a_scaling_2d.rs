// The 2D, p = 2 lifespan against a(ε) and against ε^{-1}.
//
// Without arguments this uses synthetic data to show how the ratio test
// reacts to each law; pass `--simulate` for a real sweep (about a minute).
//
// ```bash
// cargo run --release --example a_scaling_2d -- --simulate
// ```

use kato_lab::exponents::{solve_a_of_eps, Scenario};
use kato_lab::lab::*;
use kato_lab::wave::{Profile, WaveProblem};

fn show(label: &str, result: &SweepResult) -> kato_lab::Result<()> {
    let rep = check_a_scaling(result)?;
    println!("{label}");
    for s in [&rep.a_of_eps, &rep.eps_inverse] {
        println!(
            "  T/{:<7} max/min {:.3}  bounded {:<5}  monotone {:<5}  log-slope {:+.4}",
            s.reference, s.max_over_min, s.bounded, s.monotone, s.log_slope
        );
    }
    Ok(())
}

pub fn run_with(simulate: bool) -> kato_lab::Result<()> {
    let eps = default_eps_list(0.02, 0.2, 8);
    let a_law = SweepResult::synthetic(Scenario::TwoDP2FZero, 2, 2.0, &eps, |e| {
        3.0 * solve_a_of_eps(e).expect("eps > 0")
    });
    show("synthetic T = 3 a(eps)", &a_law)?;
    let power = SweepResult::synthetic(Scenario::TwoDP2FZero, 2, 2.0, &eps, |e| 10.0 / e);
    show("synthetic T = 10/eps", &power)?;

    if simulate {
        let base = WaveProblem::new(2, 2.0, 0.1, Profile::Zero, Profile::unit_bump())
            .with_grid(0.05, 0.9)
            .with_caps(1e6, 2000.0);
        let result = run_sweep(&SweepPlan::new(Scenario::TwoDP2FZero, base, eps))?;
        for pt in &result.points {
            let a = solve_a_of_eps(pt.eps)?;
            println!(
                "  eps {:.4}: T {:.3}  T/a {:.3}  T*eps {:.3}",
                pt.eps,
                pt.t_extrap.unwrap_or(f64::NAN),
                pt.t_extrap.unwrap_or(f64::NAN) / a,
                pt.t_extrap.unwrap_or(f64::NAN) * pt.eps
            );
        }
        show("simulated", &result)?;
    }
    Ok(())
}

pub fn run_example() -> kato_lab::Result<()> {
    run_with(false)
}

#[allow(dead_code)]
fn main() -> kato_lab::Result<()> {
    run_with(std::env::args().any(|a| a == "--simulate"))
}
