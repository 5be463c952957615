//! Quantum dynamics of a driven parametric oscillator in a Kerr medium.
//!
//! States live on a truncated number basis ([`fock`]). On top of it sit the
//! mass/time reparametrization ([`reparam`]), the driven-oscillator
//! eigenproblem ([`driven`]), Wei-Norman and linearized dynamics
//! ([`evolution`]), Kerr states ([`kerr`]), phase-space diagnostics
//! ([`observables`]) and a reference integrator ([`oracle`]).

pub mod cli;
pub mod driven;
pub mod error;
pub mod evolution;
pub mod fock;
pub mod kerr;
pub mod linalg;
pub mod numerics;
pub mod observables;
pub mod ode;
pub mod oracle;
pub mod reparam;

pub use error::{Error, Result};
