macro_rules! example {
    ($module:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(exponents_table, "exponents_table.rs");
example!(kato_certificate, "kato_certificate.rs");
example!(odi_oracle_suite, "odi_oracle_suite.rs");
example!(blowup_1d, "blowup_1d.rs");
example!(radial_checks, "radial_checks.rs");
example!(lifespan_sweep, "lifespan_sweep.rs");
example!(a_scaling_2d, "a_scaling_2d.rs");
example!(experiment_config, "experiment_config.rs");

#[test]
fn exponents_table_runs() {
    exponents_table::run_example().unwrap();
}

#[test]
fn kato_certificate_runs() {
    kato_certificate::run_example().unwrap();
}

#[test]
fn odi_oracle_suite_runs() {
    odi_oracle_suite::run_example().unwrap();
}

#[test]
fn blowup_1d_runs() {
    blowup_1d::run_example().unwrap();
}

#[test]
fn radial_checks_runs() {
    radial_checks::run_example().unwrap();
}

#[test]
fn lifespan_sweep_runs() {
    lifespan_sweep::run_example().unwrap();
}

#[test]
fn a_scaling_2d_runs() {
    a_scaling_2d::run_example().unwrap();
}

#[test]
fn experiment_config_runs() {
    experiment_config::run_example().unwrap();
}
