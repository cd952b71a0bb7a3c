//! Propagator kernels, Green functions and point-interaction diagnostics for
//! the three-dimensional Rashba Hamiltonian
//!
//! `h = -Δ ⊗ 1 + α (D⁻ ⊗ S⁺ − D⁺ ⊗ S⁻) + 2β (1 ⊗ S³)`
//!
//! Every closed form in [`kernel`], [`green`] and [`perturb`] ships with an
//! independent numerical route (FFT symbol, regularized time quadrature,
//! Q→0 limits) so the two can be compared in tests and from the CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::should_implement_trait)]

pub mod error;
pub mod evolve;
pub mod green;
pub mod kernel;
pub mod par;
pub mod perturb;
pub mod quad;
pub mod specfun;
pub mod spinalg;
pub mod verify;

pub use error::{Error, Result};
pub use kernel::Coupling;
pub use num_complex::Complex64 as C64;
pub use par::Exec;
