//! Transition dipoles, Stokes vectors and trion selection rules.
//!
//! The dipole operator for light linearly polarized at lab angle
//! `β = φ + α` (α measured from the in-plane field) couples the electron
//! spinor `a` to the trion spinor `b` as
//!
//! ```text
//! M = a₁* b₁ e^{+iβ} − a₂* b₂ e^{−iβ}
//! ```
//!
//! in units where the interband momentum element is 1. `M(α)` is linear in
//! the polarization vector, so `M(α) = M(0)·cos α + M(π/2)·sin α` and the two
//! amplitudes fix the full Stokes vector.

mod transitions;

pub use transitions::{
    build_transition_set, faraday_bright_pair, faraday_handedness, polarization_map,
    polarization_rows, transition_energies, voigt_tdm_angles, Handedness, PolarRow,
    TransitionLabel, TransitionSet, POLAR_MAP_HEADER,
};

use num_complex::Complex64;

use crate::spinmodel::SpinEigenpair;
use crate::{domain, Result};

/// Default homogeneous linewidth for rendered spectra (GHz).
pub const DEFAULT_LINEWIDTH_GHZ: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StokesVector {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl StokesVector {
    pub fn is_dark(&self) -> bool {
        self.s0 == 0.0
    }

    pub fn degree_of_polarization(&self) -> f64 {
        if self.s0 == 0.0 {
            return 0.0;
        }
        (self.s1 * self.s1 + self.s2 * self.s2 + self.s3 * self.s3).sqrt() / self.s0
    }

    /// Normalized `(s1, s2, s3)`.
    pub fn normalized(&self) -> [f64; 3] {
        if self.s0 == 0.0 {
            return [0.0; 3];
        }
        [self.s1 / self.s0, self.s2 / self.s0, self.s3 / self.s0]
    }

    /// Orientation of the linear component relative to the in-plane field,
    /// in `[0, π)`.
    pub fn linear_angle(&self) -> f64 {
        (0.5 * self.s2.atan2(self.s1)).rem_euclid(std::f64::consts::PI)
    }

    /// Intensity transmitted by a linear analyzer at angle `alpha` from the
    /// in-plane field.
    pub fn rate_at(&self, alpha: f64) -> f64 {
        let (s, c) = (2.0 * alpha).sin_cos();
        0.5 * (self.s0 + self.s1 * c + self.s2 * s)
    }
}

/// Dipole amplitude between an electron and a trion state for analyzer angle
/// `alpha_pol` relative to the field azimuth `phi`.
pub fn dipole_matrix_element(
    e_state: &SpinEigenpair,
    h_state: &SpinEigenpair,
    phi: f64,
    alpha_pol: f64,
) -> Complex64 {
    let a = e_state.spinor();
    let b = h_state.spinor();
    let beta = phi + alpha_pol;
    a[0].conj() * b[0] * Complex64::from_polar(1.0, beta)
        - a[1].conj() * b[1] * Complex64::from_polar(1.0, -beta)
}

/// Rates `|M|²` for the four (electron, trion) pairings
/// `[(e⁺,T⁺), (e⁻,T⁻), (e⁺,T⁻), (e⁻,T⁺)]`: the two same-index pairs first.
pub fn transition_rates(
    e_pair: &(SpinEigenpair, SpinEigenpair),
    h_pair: &(SpinEigenpair, SpinEigenpair),
    phi: f64,
    alpha_pol: f64,
) -> [f64; 4] {
    let m = |e: &SpinEigenpair, h: &SpinEigenpair| dipole_matrix_element(e, h, phi, alpha_pol).norm_sqr();
    [
        m(&e_pair.0, &h_pair.0),
        m(&e_pair.1, &h_pair.1),
        m(&e_pair.0, &h_pair.1),
        m(&e_pair.1, &h_pair.0),
    ]
}

/// Closed-form Voigt rates `(same-index, cross)` for in-plane states with
/// electron phase `θ_e` and trion phase `θ_t`.
pub fn voigt_closed_form_rates(theta_e: f64, theta_t: f64, phi: f64, alpha_pol: f64) -> (f64, f64) {
    let x = phi + alpha_pol + 0.5 * (theta_e - theta_t);
    let s = x.sin();
    (s * s, 1.0 - s * s)
}

/// Stokes vector from the amplitudes at analyzer angles 0 and π/2.
///
/// `s3 = +1` is the `e^{+iβ}` (σ⁺) component. Two zero amplitudes give the
/// all-zero vector of a dark transition.
pub fn stokes_from_amplitudes(m0: Complex64, m90: Complex64) -> StokesVector {
    let a = m0.norm_sqr();
    let b = m90.norm_sqr();
    let x = m0 * m90.conj();
    StokesVector {
        s0: a + b,
        s1: a - b,
        s2: 2.0 * x.re,
        s3: -2.0 * x.im,
    }
}

/// Upper bound on the optically visible light-hole fraction for an emission
/// ellipse with axis ratio `epsilon`.
pub fn visible_lh_bound(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return domain(format!("axis ratio must lie in (0, 1], got {epsilon}"));
    }
    let r = epsilon.sqrt();
    Ok(3.0 * (1.0 - r).powi(2) / (1.0 + r).powi(2))
}

/// Cyclicity `T_pump/T_1` and the implied dark-transition amplitude
/// fraction `√3/√c`.
pub fn cyclicity_and_dark_fraction(t_pump: f64, t_1: f64) -> Result<(f64, f64)> {
    if !(t_pump > 0.0 && t_1 > 0.0) {
        return domain(format!(
            "pump time and lifetime must be positive, got {t_pump} ns and {t_1} ns"
        ));
    }
    let c = t_pump / t_1;
    Ok((c, 3f64.sqrt() / c.sqrt()))
}
