// One-dimensional blow-up with grid refinement, and the linear solver
// against d'Alembert's formula.
//
// ```bash
// cargo run --release --example blowup_1d
// ```

use kato_lab::wave::problem::linear;
use kato_lab::wave::{solve, Geometry, Profile, WaveProblem};

pub fn run_example() -> kato_lab::Result<()> {
    // Linear check: u = ε (f(x+t) + f(x-t)) / 2.
    let prob = WaveProblem::new(1, 2.0, 0.1, Profile::unit_bump(), Profile::Zero)
        .with_caps(1e6, 4.0)
        .with_levels(1)
        .linear();
    for dx in [0.04, 0.02, 0.01] {
        let prob = prob.clone().with_grid(dx, 0.9);
        let sol = solve(&prob, Geometry::Line, &[3.0])?;
        let snap = &sol.snapshots[0];
        let err = snap
            .positions
            .iter()
            .zip(&snap.values)
            .map(|(&x, &u)| (u - linear::dalembert_1d(&prob, x, snap.t)).abs())
            .fold(0.0, f64::max);
        println!("linear dx = {dx}: max error at t = {:.3} is {err:.3e}", snap.t);
    }

    // Nonlinear: p = 2, g = bump.
    for eps in [0.2, 0.1, 0.05] {
        let prob = WaveProblem::new(1, 2.0, eps, Profile::Zero, Profile::unit_bump())
            .with_grid(0.05, 0.9)
            .with_caps(1e6, 200.0);
        let sol = solve(&prob, Geometry::Line, &[])?;
        let est = &sol.estimate;
        let levels: Vec<String> = est
            .refinement
            .iter()
            .map(|(dx, t)| format!("T({dx}) = {t:.5}"))
            .collect();
        println!(
            "eps = {eps}: {}; order {:.2}, extrapolated {:.5}, converged {}",
            levels.join(", "),
            est.observed_order.unwrap_or(f64::NAN),
            est.lifespan()?,
            est.converged
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> kato_lab::Result<()> {
    run_example()
}
