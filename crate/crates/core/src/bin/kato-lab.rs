use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kato_lab::exponents::Scenario;
use kato_lab::lab::default_eps_list;
use kato_lab::odi::{ExtremalControls, LemmaMode, OdiProblem};
use kato_lab::report::{
    execute, CheckName, Command, ExperimentConfig, ExponentsConfig, OdiConfig, RandomOdi, SimulateConfig,
    SweepConfig, SyntheticLaw,
};
use kato_lab::wave::{Profile, WaveProblem};
use kato_lab::{Error, Result};

/// Blow-up certificates and lifespan experiments for u_tt - Δu = |u|^p.
///
/// Exit status: 0 when every verdict passes, 1 when any verdict is FAIL,
/// 2 for usage, configuration or domain errors.
#[derive(Parser)]
#[command(name = "kato-lab", version)]
struct Cli {
    /// Read the experiment from a TOML file instead of the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output root (default: $KATO_LAB_OUT or ./kato-lab-out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Critical exponents, lifespan exponents and a(ε).
    Exponents(ExponentsArgs),
    /// Certify a Kato-type ODI problem and check it against the extremal ODE.
    Odi(OdiArgs),
    /// Solve one wave problem and run the checks on F(t) = ∫u.
    Simulate(SimulateArgs),
    /// Lifespan sweep over ε with a power-law fit.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct ExponentsArgs {
    /// Dimension, or a range such as 2..6 together with --table.
    #[arg(long, value_parser = parse_range)]
    n: Option<(u32, u32)>,
    #[arg(long)]
    p: Option<f64>,
    /// Tabulate p0 over the --n range.
    #[arg(long)]
    table: bool,
    #[arg(long)]
    a_of_eps: Option<f64>,
}

#[derive(Args)]
struct OdiArgs {
    #[arg(long, conflicts_with = "lemma2")]
    lemma1: bool,
    #[arg(long)]
    lemma2: bool,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 2.0)]
    a: f64,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    #[arg(long = "A", default_value_t = 1.0)]
    coef_a: f64,
    #[arg(long = "B", default_value_t = 1.0)]
    coef_b: f64,
    #[arg(long = "R", default_value_t = 1.0)]
    shift: f64,
    #[arg(long = "T0", default_value_t = 1.0)]
    t_growth: f64,
    #[arg(long = "F0", default_value_t = 0.0)]
    f0: f64,
    #[arg(long = "F0p", default_value_t = 1.0)]
    f0p: f64,
    #[arg(long)]
    t0: Option<f64>,
    /// Draw this many random problems instead (seeded by --seed).
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = 1e-3)]
    bracket_tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Zero,
    Bump,
}

impl From<ProfileArg> for Profile {
    fn from(p: ProfileArg) -> Self {
        match p {
            ProfileArg::Zero => Profile::Zero,
            ProfileArg::Bump => Profile::unit_bump(),
        }
    }
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = 0.05)]
    dx: f64,
    /// Courant number; defaults to 0.9 of the stencil's stability limit.
    #[arg(long)]
    cfl: Option<f64>,
    /// Grid levels dx, dx/2, ... used for Richardson extrapolation.
    #[arg(long, default_value_t = 3)]
    levels: usize,
    #[arg(long, default_value_t = 200.0)]
    horizon: f64,
    #[arg(long, default_value_t = 1e6)]
    u_max: f64,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    eps: f64,
    #[arg(long, value_enum, default_value = "zero")]
    f: ProfileArg,
    #[arg(long, value_enum, default_value = "bump")]
    g: ProfileArg,
    /// Drop the nonlinear term.
    #[arg(long)]
    linear: bool,
    #[command(flatten)]
    grid: GridArgs,
    /// Snapshot time (repeatable).
    #[arg(long = "snapshot")]
    snapshots: Vec<f64>,
    /// Check to run (repeatable); all applicable checks by default.
    #[arg(long = "check", value_parser = parse_check)]
    checks: Vec<CheckName>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_parser = parse_scenario)]
    scenario: Scenario,
    #[arg(long)]
    p: f64,
    /// Dimension; implied by the scenario except for general_nd.
    #[arg(long)]
    n: Option<u32>,
    /// Comma-separated amplitudes (decreasing).
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.02)]
    eps_min: f64,
    #[arg(long, default_value_t = 0.2)]
    eps_max: f64,
    #[arg(long, default_value_t = 8)]
    count: usize,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    workers: Option<usize>,
    /// Skip the solver and inject T = C ε^{-kappa}.
    #[arg(long)]
    synthetic_kappa: Option<f64>,
    /// Skip the solver and inject T = C a(ε).
    #[arg(long, conflicts_with = "synthetic_kappa")]
    synthetic_a: bool,
    /// Coefficient C of the injected law.
    #[arg(long, default_value_t = 1.0)]
    synthetic_c: f64,
}

fn parse_range(s: &str) -> std::result::Result<(u32, u32), String> {
    let num = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("{t:?}: {e}"));
    match s.split_once("..") {
        Some((lo, hi)) => Ok((num(lo)?, num(hi.trim_start_matches('='))?)),
        None => num(s).map(|n| (n, n)),
    }
}

fn parse_check(s: &str) -> std::result::Result<CheckName, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_scenario(s: &str) -> std::result::Result<Scenario, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn wave_problem(n: u32, p: f64, eps: f64, f: Profile, g: Profile, grid: &GridArgs) -> WaveProblem {
    let mut prob = WaveProblem::new(n, p, eps, f, g)
        .with_levels(grid.levels)
        .with_caps(grid.u_max, grid.horizon);
    prob.radius = grid.radius;
    let geometry = kato_lab::wave::geometry_for(&prob);
    let cfl = grid.cfl.unwrap_or(0.9 * kato_lab::wave::cfl_limit(geometry));
    prob.with_grid(grid.dx, cfl)
}

fn command_from(cmd: Cmd) -> Result<Command> {
    Ok(match cmd {
        Cmd::Exponents(a) => {
            let (n, table) = match (a.n, a.table) {
                (Some(range), true) => (None, Some(range)),
                (None, true) => return Err(Error::Config("--table needs --n LO..HI".into())),
                (Some((lo, hi)), false) if lo != hi => {
                    return Err(Error::Config("a dimension range needs --table".into()))
                }
                (range, false) => (range.map(|r| r.0), None),
            };
            let n = if table.is_some() && a.p.is_some() {
                return Err(Error::Config("--table takes no --p".into()));
            } else {
                n
            };
            Command::Exponents(ExponentsConfig {
                n,
                p: a.p,
                table,
                a_of_eps: a.a_of_eps,
            })
        }
        Cmd::Odi(a) => {
            let mode = if a.lemma2 { LemmaMode::Lemma2 } else { LemmaMode::Lemma1 };
            let controls = ExtremalControls {
                bracket_tol: a.bracket_tol,
                ..ExtremalControls::default()
            };
            match a.random {
                Some(count) => Command::Odi(OdiConfig {
                    mode,
                    problem: None,
                    random: Some(RandomOdi { count, mode }),
                    controls,
                }),
                None => Command::Odi(OdiConfig {
                    mode,
                    problem: Some(OdiProblem {
                        p: a.p,
                        a: a.a,
                        q: a.q,
                        coef_a: a.coef_a,
                        coef_b: a.coef_b,
                        shift: a.shift,
                        t_growth: a.t_growth,
                        f0: a.f0,
                        f0p: a.f0p,
                        t_double: a.t0,
                    }),
                    random: None,
                    controls,
                }),
            }
        }
        Cmd::Simulate(a) => {
            let mut problem = wave_problem(a.n, a.p, a.eps, a.f.into(), a.g.into(), &a.grid);
            if a.linear {
                problem = problem.linear();
            }
            Command::Simulate(SimulateConfig {
                problem,
                snapshots: a.snapshots,
                checks: a.checks,
            })
        }
        Cmd::Sweep(a) => {
            let n = match (a.scenario.dimension(), a.n) {
                (Some(d), Some(n)) if d != n => {
                    return Err(Error::Config(format!("scenario {} is for n = {d}, got --n {n}", a.scenario)))
                }
                (Some(d), _) => d,
                (None, Some(n)) => n,
                (None, None) => return Err(Error::Config(format!("scenario {} needs --n", a.scenario))),
            };
            let (f, g) = match a.scenario {
                Scenario::OneDFOnly => (Profile::unit_bump(), Profile::Zero),
                _ => (Profile::Zero, Profile::unit_bump()),
            };
            let eps = a.eps.unwrap_or_else(|| default_eps_list(a.eps_min, a.eps_max, a.count));
            let synthetic = match (a.synthetic_kappa, a.synthetic_a) {
                (Some(kappa), _) => Some(SyntheticLaw::Power {
                    coefficient: a.synthetic_c,
                    kappa,
                }),
                (None, true) => Some(SyntheticLaw::AOfEps {
                    coefficient: a.synthetic_c,
                }),
                (None, false) => None,
            };
            Command::Sweep(SweepConfig {
                scenario: a.scenario,
                base: wave_problem(n, a.p, eps[0], f, g, &a.grid),
                eps,
                workers: a.workers,
                synthetic,
            })
        }
    })
}

fn run(cli: Cli) -> Result<bool> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => {
            let command = cli
                .command
                .ok_or_else(|| Error::Config("a subcommand or --config is required".into()))?;
            ExperimentConfig {
                seed: cli.seed,
                ..ExperimentConfig::new(command_from(command)?)
            }
        }
    };
    if cli.out.is_some() {
        cfg.output_dir = cli.out;
    }
    let out = execute(&cfg)?;
    // A closed pipe on stdout is not an error of the experiment.
    let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(&out.summary["result"])?);
    for v in &out.verdicts {
        eprintln!("{}: {}", v.name, v.verdict);
    }
    eprintln!("artifacts: {}", out.dir.display());
    Ok(!out.any_fail())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
