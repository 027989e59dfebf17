//! Pseudospectral simulation and invariant monitoring for the non-local
//! evolution equation
//!
//! ```text
//! u_t − 2uu_x = ∂ₓΛ⁻²(u² + (u²)_x),   Λ² = 1 − ∂ₓ²,
//! ```
//!
//! on the unit circle or on a truncated real line. The crate evolves the
//! equation with a Fourier method of lines and adaptive RK4, computes the
//! energy hierarchy `J_m`, `I_m`, `k_m`, and checks conservation laws,
//! operator identities and the energy inequalities along the flow.

pub mod cli;
pub mod corpus;
pub mod diagnostics;
pub mod energy;
pub mod error;
pub mod evolution;
pub mod field;
pub mod grid;
pub mod initdata;
pub mod kernel;
pub mod spectral;
pub mod verify;

pub use error::{FlowError, Result};
pub use field::{lp_norm, Field, Norm};
pub use grid::{DomainKind, Grid1D};
