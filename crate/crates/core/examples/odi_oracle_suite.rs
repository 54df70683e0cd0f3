// Randomised check of the Kato lemmas: draw admissible problems, certify
// them and compare with the extremal ODE. A FAIL would mean a bug.
//
// ```bash
// cargo run --release --example odi_oracle_suite -- 500
// ```

use kato_lab::odi::{sample_problem, ExtremalControls, LemmaMode, Verdict};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_with(count: usize) -> kato_lab::Result<usize> {
    let controls = ExtremalControls::default();
    let mut fails = 0;
    for (mode, seed) in [(LemmaMode::Lemma1, 1), (LemmaMode::Lemma2, 2)] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut pass, mut vacuous) = (0, 0);
        let mut slack = f64::INFINITY;
        let mut width = 0.0_f64;
        for _ in 0..count {
            let case = sample_problem(&mut rng, mode, &controls)?;
            width = width.max(case.result.bracket_width());
            match case.verification.verdict {
                Verdict::Pass => {
                    pass += 1;
                    slack = slack.min(case.verification.slack);
                }
                Verdict::Vacuous => vacuous += 1,
                Verdict::Fail => {
                    fails += 1;
                    println!("FAIL: {:?}", case.problem);
                }
            }
        }
        println!(
            "{mode:?}: {pass} pass, {vacuous} vacuous; smallest bound/T_hi = {slack:.3}; widest bracket {width:.1e}"
        );
    }
    Ok(fails)
}

pub fn run_example() -> kato_lab::Result<()> {
    let fails = run_with(50)?;
    assert_eq!(fails, 0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> kato_lab::Result<()> {
    let count = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    let fails = run_with(count)?;
    if fails > 0 {
        std::process::exit(1);
    }
    Ok(())
}
