// Experiments as TOML configs: artifacts, config hashes and run records.
//
// ```bash
// cargo run --release --example experiment_config
// ```

use kato_lab::report::{execute, read_jsonl, ExperimentConfig, RunRecord};

const CONFIG: &str = r#"
seed = 11

[command.sweep]
scenario = "one_d_g_positive"
eps = [0.2, 0.15, 0.1, 0.07, 0.05, 0.03, 0.02]

[command.sweep.base]
n = 1
p = 2.0
eps = 0.2
radius = 1.0
f = { kind = "zero" }
g = { kind = "bump", mass = 1.0 }
grid = { dx = 0.05, cfl = 0.9 }
caps = { u_max = 1e6, t_horizon = 400.0 }
"#;

pub fn run_example() -> kato_lab::Result<()> {
    let dir = std::env::temp_dir().join(format!("kato-lab-example-{}", std::process::id()));
    let mut cfg = ExperimentConfig::from_toml(CONFIG)?;
    cfg.output_dir = Some(dir.clone());
    println!("config hash {}", cfg.hash());

    let first = execute(&cfg)?;
    for v in &first.verdicts {
        println!("{}: {}", v.name, v.verdict);
    }
    println!("slope {}", first.summary["result"]["fit"]["slope"]);

    // A second run resumes from sweep.jsonl and reproduces the artifacts.
    let second = execute(&cfg)?;
    for f in &first.files {
        let name = f.file_name().unwrap().to_string_lossy();
        let same = std::fs::read(f).ok() == second.files.iter().find(|g| g == &f).and_then(|g| std::fs::read(g).ok());
        println!("{name}: identical on rerun: {same}");
    }

    let runs: Vec<RunRecord> = read_jsonl(&dir.join("runs.jsonl"))?;
    println!("{} run records, all for {}", runs.len(), &runs[0].config_hash[..16]);
    std::fs::remove_dir_all(&dir).ok();
    Ok(())
}

#[allow(dead_code)]
fn main() -> kato_lab::Result<()> {
    run_example()
}
