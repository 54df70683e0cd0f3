// Critical exponents, regimes and predicted lifespan exponents.
//
// ```bash
// cargo run --example exponents_table
// ```

use kato_lab::exponents::{self, Scenario};

pub fn run_example() -> kato_lab::Result<()> {
    println!("{:>3} {:>10} {:>14}", "n", "p0(n)", "gamma(p0, n)");
    for n in 2..=10 {
        let p0 = exponents::p0(n)?;
        println!("{n:>3} {p0:>10.6} {:>14.2e}", exponents::gamma(p0, n)?);
    }

    for (p, n) in [(2.0, 3), (1.5, 2), (2.0, 2), (3.0, 3), (3.0, 1)] {
        let rep = exponents::report(p, n)?;
        print!("\np = {p}, n = {n}: gamma = {:.4}, regime {:?}", rep.gamma, rep.regime);
        for case in Scenario::ALL {
            if let Ok(kappa) = exponents::lifespan_exponent(p, n, case) {
                print!("\n  {:<20} kappa = {kappa:.6}", case.name());
            }
        }
        println!();
    }

    // The 2D p = 2 lifespan scale a(ε) solves a²ε²log(1+a) = 1.
    println!("\n{:>8} {:>12} {:>10}", "eps", "a(eps)", "eps*a");
    for eps in [0.2, 0.1, 0.05, 0.02, 0.01, 0.001] {
        let a = exponents::solve_a_of_eps(eps)?;
        println!("{eps:>8} {a:>12.6} {:>10.6}", eps * a);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> kato_lab::Result<()> {
    run_example()
}
