//! Blow-up lemmas for ordinary differential inequalities and a desk-scale
//! laboratory for the lifespan of small-data solutions of
//! `u_tt - Δu = |u|^p`.
//!
//! The crate is organised bottom-up:
//!
//! - [`exponents`]: critical exponents, lifespan exponents and the root `a(ε)`
//!   of `a²ε²log(1+a) = 1`.
//! - [`odi`]: certificates for the improved Kato lemmas together with an
//!   adaptive integrator for the extremal ODE `F'' = B(t+R)^{-q}|F|^p`.
//! - [`wave`]: leapfrog solvers (1D and radial n-D), the functional
//!   `F(t) = ∫u dx`, and checks of the inequalities used to bound `F`.
//! - [`lab`]: ε-sweeps, Richardson-extrapolated lifespans, log-log fits and
//!   comparison with predicted exponents.
//! - [`report`]: experiment configs, run records and CSV/JSON artifacts used
//!   by the `kato-lab` binary.

pub mod error;
pub mod exponents;
pub mod lab;
pub mod odi;
pub mod report;
pub mod special;
pub mod wave;

pub use error::{Error, Result};
