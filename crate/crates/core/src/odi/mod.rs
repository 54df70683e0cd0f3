//! Improved Kato lemmas for the differential inequality
//! `F'' >= B (t+R)^{-q} |F|^p` under the growth condition `F(t) >= A t^a`.
//!
//! [`certify_lemma1`] and [`certify_lemma2`] compute the explicit bound
//! `2^{2/M} T_ref` on the blow-up time, [`integrate_extremal`] solves the
//! equality case numerically, and [`verify_certificate`] joins the two.

mod certificate;
mod extremal;
mod problem;
mod sample;
mod verify;

pub use certificate::{certify, certify_lemma1, certify_lemma2, c0, delta_interval, KatoCertificate};
pub use extremal::{integrate_extremal, ExtremalControls, OdeBlowupResult, TrajectoryPoint};
pub use problem::{LemmaMode, OdiProblem};
pub use sample::{sample_problem, SampledCase};
pub use verify::{verify_certificate, Verdict, Verification};
