//! Weyl symbols of truncated quantum observables.
//!
//! `weylsym` builds truncated observables `Π_N H Π_N` in two exactly solvable
//! eigenbases (the harmonic oscillator and a particle in a box), evaluates
//! their Weyl symbols on phase space, and measures how those symbols approach
//! their semiclassical limits as `ħ → 0`, `N → ∞` with `ħN = μ` held fixed.
//!
//! Module map:
//!
//! * [`scale`] – the `(ħ, N, μ)` triple, phase-space grids and sampled fields.
//! * [`basis`] – Hermite and box eigenfunctions, eigenvalues.
//! * [`kernel`] – projection kernels, Dirichlet and sine kernels.
//! * [`weyl`] – kernel → symbol quadrature and closed-form box symbols.
//! * [`moyal`] – star products by operator composition and by direct quadrature.
//! * [`truncate`] – coefficient matrices of truncated observables.
//! * [`limits`] – classical regions, bulk and edge limit profiles, `Si`.
//! * [`diag`] – trace-identity norms, window-plus-tail distances, sweeps.
//! * [`cli`] – the command-line front end used by the `weylsym` binary.

pub mod basis;
pub mod cli;
pub mod diag;
mod error;
pub mod export;
pub mod kernel;
pub mod limits;
pub mod moyal;
pub mod quad;
pub mod scale;
pub mod truncate;
pub mod weyl;

pub use error::{Error, Result};

pub use basis::{EigenBasis, Model};
pub use kernel::{Kernel, KernelEval, KernelMode};
pub use limits::{ClassicalRegion, LimitProfile};
pub use scale::{PhaseGrid, SemiclassicalScale, SymbolField};
pub use truncate::OperatorMatrix;
pub use weyl::WeylQuadratureSpec;

/// Library version, echoed into every CLI manifest.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
