// Inequalities for `F(t) = ∫u dx` measured on radial runs.
//
// ```bash
// cargo run --release --example radial_checks
// ```

use kato_lab::wave::checks::*;
use kato_lab::wave::{cfl_limit, solve, Geometry, Profile, WaveProblem};

fn radial(n: u32, p: f64, eps: f64, horizon: f64) -> WaveProblem {
    WaveProblem::new(n, p, eps, Profile::Zero, Profile::unit_bump())
        .with_grid(0.1, 0.9 * cfl_limit(Geometry::Radial(n)))
        .with_levels(1)
        .with_caps(1e6, horizon)
}

pub fn run_example() -> kato_lab::Result<()> {
    for (n, p) in [(3, 2.0), (2, 1.5)] {
        println!("n = {n}, p = {p}");
        for eps in [0.05, 0.1] {
            let prob = radial(n, p, eps, 40.0);
            let sol = solve(&prob, Geometry::Radial(n), &[8.0])?;
            let tr = &sol.trace;
            let c1 = check_step0(tr)?;
            let c2 = check_condition_f(tr)?;
            let c2x = check_condition_f_excess(tr)?;
            let id = check_f_second_identity(tr, 1e3, 1e-2);
            let odi = check_odi_consistency(tr, &prob, 1e-3);
            let fs = check_finite_speed(&sol.snapshots[0], prob.radius, tr.dx, 20.0, 1e-12);
            println!(
                "  eps {eps}: C1* {:.4} (t = {:.2})  C2* {:.4}  excess C2* {:.4}  identity err {:.1e}  odi {}  finite speed {}",
                c1.constant, c1.argmin, c2.constant, c2x.constant, id.worst, odi.passed, fs.passed
            );
        }
    }

    // The 2D pointwise lower bound for f = 0, p = 2.
    let prob = radial(2, 2.0, 0.1, 10.0);
    let sol = solve(&prob, Geometry::Radial(2), &[4.0, 6.0, 8.0])?;
    for snap in &sol.snapshots {
        let rep = check_pointwise_2d(snap, &prob, 0.0)?;
        println!(
            "  2D pointwise bound at t = {:.2}: {} radii, smallest margin {:.3e} at r = {:.2}",
            snap.t, rep.checked, rep.worst, rep.worst_at
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> kato_lab::Result<()> {
    run_example()
}
