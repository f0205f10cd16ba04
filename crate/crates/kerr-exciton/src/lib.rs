//! Nonclassicality toolkit for a cavity photon coupled to an exciton mode
//! with a Kerr-type exciton-exciton interaction.
//!
//! The model is a two-mode bosonic Hamiltonian (hbar = 1)
//!
//! ```text
//! H = omega1 a'a + omega2 c'c - g (a'c + c'a) + chi a'a'aa
//! ```
//!
//! where `a` annihilates an exciton, `c` annihilates a photon, `g` is the
//! exciton-photon coupling and `chi` the Kerr strength. Times are quoted in
//! units of the coupling (the dimensionless product `gt`).
//!
//! Two independent solution paths are provided and cross-validated:
//!
//! * [`analytic`]: a closed-form second-order perturbative solution of the
//!   Heisenberg equations, valid for `gt < 1` and `chi t < 1`, with witness
//!   expressions evaluated directly from the coefficient functions.
//! * [`dynamics`]: exact evolution in a truncated Fock space, either unitary
//!   (eigendecomposition of the Hamiltonian) or dissipative (Lindblad master
//!   equation with exciton thermal damping and photon vacuum damping).
//!
//! [`witnesses`] extracts the same named quantities from either path:
//! single-mode and intermodal quadrature variances, Mandel-type antibunching
//! parameters, Hillery-Zubairy entanglement witnesses, the Duan collective
//! quadrature criterion, and quantum steering witnesses.
//!
//! The crate is primarily a library; see the `examples/` directory for one
//! runnable example per capability, or the thin `kerr-exciton` binary for
//! config-driven runs (`run`, `compare`, `presets`, `version`).

pub mod analytic;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod params;
pub mod witnesses;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

pub use error::{Error, Result};
pub use params::{InitialAmplitudes, SystemParams};
