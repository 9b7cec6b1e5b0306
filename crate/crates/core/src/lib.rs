//! Magnetic and optical response of electron and trion states in
//! droplet-etched GaAs quantum dots.
//!
//! The crate is organised bottom-up:
//!
//! - [`spinmodel`]: signed g-tensors, the electron Zeeman Hamiltonian and its
//!   eigenstates, Landé and Roth g-factor formulas.
//! - [`holemix`]: heavy-hole pseudo-spin Hamiltonians in the Voigt plane and
//!   the resulting trion in-plane g-factor and phase.
//! - [`optics`]: transition dipoles, Stokes vectors, the four trion
//!   transition energies and the closed-form selection rules.
//! - [`hyperfine`]: Overhauser shifts, a nuclear dragging sweep simulator,
//!   lineshape classification and g-factor sign inference.
//! - [`envelope`]: a single-band effective-mass design solver that maps
//!   nanohole geometry to emission wavelength and an electron g estimate.
//! - [`extract`]: line fitting, g-factor extraction, Stokes and FSS
//!   estimation from measured or synthetic data.
//! - [`cli`]: the `qdspin` command-line front end.
//!
//! All energies are in μeV unless a name says otherwise. Frequencies quoted
//! in GHz are converted with Planck's constant `h`, not `ħ`.

// `!(x > 0.0)` is used on purpose so NaN fails validation too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod csvio;
pub mod envelope;
pub mod extract;
pub mod holemix;
pub mod hyperfine;
pub mod optics;
pub mod spinmodel;

pub use spinmodel::{FieldConfiguration, GTensor, PhysicalConstants, Spin, SpinEigenpair};

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of a formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// The two spin levels are (numerically) degenerate, so eigenvectors and
    /// their phase are undefined.
    #[error("degenerate spin states: splitting {splitting:.3e} μeV is below threshold")]
    Degenerate { splitting: f64 },

    /// An iterative solver hit its iteration cap.
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },

    /// A double-line fit could not separate two components.
    #[error("unresolved doublet: {0}")]
    UnresolvedDoublet(String),

    /// Observations that cannot come from any sign configuration.
    #[error("inconsistent observation: {0}")]
    Inconsistent(String),

    /// Non-finite values during integration or fitting.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
