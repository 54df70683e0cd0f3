// Certificate for the improved Kato lemma, checked against the extremal ODE.
//
// The growth constant `A` is read off the extremal solution itself: for
// each `T0` it is set just below `min F(t)/t^a` on `[T0, T_blow]`. Starting
// the growth window later raises `A` until the certificate applies.
//
// ```bash
// cargo run --release --example kato_certificate
// ```

use kato_lab::odi::{certify, integrate_extremal, verify_certificate, ExtremalControls, OdiProblem};

fn scan(label: &str, mut prob: OdiProblem, controls: &ExtremalControls) -> kato_lab::Result<()> {
    let ode = integrate_extremal(&prob, controls)?;
    println!(
        "{label}: M = {:.3}, blow-up in [{:.6}, {:.6}] after {} steps",
        prob.m(),
        ode.t_blow_lo,
        ode.t_blow_hi,
        ode.steps
    );
    println!("  {:>6} {:>11} {:>11} {:>9} {:>9}  verdict", "T0", "A", "threshold", "bound", "slack");
    for frac in [0.05, 0.2, 0.4, 0.6, 0.8] {
        prob.t_growth = frac * ode.t_blow_lo;
        let ratio = ode
            .min_growth_ratio(prob.a, prob.t_growth, controls.growth_samples)
            .unwrap_or(0.0);
        prob.coef_a = 0.999 * ratio;
        let cert = certify(&prob, prob.mode())?;
        let ode = integrate_extremal(&prob, controls)?;
        let v = verify_certificate(&cert, &ode)?;
        println!(
            "  {:>6.3} {:>11.4e} {:>11.4e} {:>9.4} {:>9.3}  {}",
            prob.t_growth, prob.coef_a, cert.threshold, v.bound, v.slack, v.verdict
        );
    }
    Ok(())
}

pub fn run_example() -> kato_lab::Result<()> {
    let controls = ExtremalControls::default();

    let mut first = OdiProblem::lemma1(2.0, 1.0, 0.5, 0.5, 1.0);
    first.shift = 1.0;
    scan("F(0) = 0.5, F'(0) = 1", first, &controls)?;

    // Second lemma: F'(0) = 0 and t0 is the time at which F reaches 2F(0).
    let mut second = OdiProblem::lemma2(3.0, 0.5, 1.0, 1.0, 1.0);
    let ode = integrate_extremal(&second, &controls)?;
    second.t_double = ode.trajectory.iter().find(|pt| pt.f >= 2.0).map(|pt| pt.t);
    scan("F(0) = 1, F'(0) = 0", second, &controls)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> kato_lab::Result<()> {
    run_example()
}
