//! Single-band effective-mass design solver for nanohole-filled dots.
//!
//! This is a deliberately reduced model: electrons and heavy holes are
//! solved separately in a scalar effective-mass picture on a finite-difference
//! grid, and the electron g-factor is estimated from the two-band formula at
//! the confined transition energy, blended with the barrier's bulk g by the
//! fraction of the electron that sits in AlGaAs. It reproduces trends
//! (wavelength vs filling, the sign change of g) rather than multiband values.

mod design;
mod geometry;
mod material;
mod solver;

pub use design::{
    design_sweep, electron_g_surrogate, emission_energy, evaluate_design, g_from_parts, linspace,
    zero_crossing, DesignPoint, DesignSettings, SweepCell, SWEEP_HEADER,
};
pub use geometry::{
    build_potential, composition, smooth, Band, Grid3, NanoholeProfile, PotentialGrid, QDGeometry,
    AFM_HEADER,
};
pub use material::{material_interp, MaterialRecord, MaterialTable, ALAS, GAAS};
pub use solver::{
    solve_ground_state, solve_with, EnvelopeSolution, Hamiltonian, SolverSettings, HBAR2_2M0,
};
