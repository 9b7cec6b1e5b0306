//! Fermi-contact hyperfine energetics and dynamic nuclear polarization.
//!
//! With the field along x, a single nuclear spin flip `δI_x = +1` costs
//! `−γ_n B_x + a·S_x`, and a net polarization `I_x` shifts the electron level
//! by `a·S_x·I_x`. Since the trion's hole barely couples to the nuclei, the
//! optical line of a transition with ground spin `S_x` moves by `−a·S_x·I_x`.

mod drag;
mod signs;

pub use drag::{
    classify_lineshape, drag_sweep, fwhm, lorentzian, reference_area, DragLabel, DragScan,
    SweepDirection, SweepSpec, DRAG_SCAN_HEADER,
};
pub use signs::{
    infer_signs, simulate_labels, MagnitudeOrder, SignRelation,
};

use crate::spinmodel::{Spin, PLANCK_H};
use crate::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NuclearBathParameters {
    /// Hyperfine energy per unit polarization (μeV).
    pub a: f64,
    /// Nuclear Zeeman splitting `γ_n B` at the working field (μeV).
    pub gamma_n_b: f64,
    /// Nuclear relaxation rate Γ_d (1/s).
    pub relax_rate: f64,
    /// Peak sideband pumping rate W₀ (1/s).
    pub sideband_rate: f64,
    /// Optical FWHM (μeV).
    pub optical_linewidth: f64,
}

impl Default for NuclearBathParameters {
    fn default() -> Self {
        Self {
            a: 0.1,
            gamma_n_b: 0.25,
            relax_rate: 0.25,
            sideband_rate: 500.0,
            optical_linewidth: 0.7 * PLANCK_H,
        }
    }
}

impl NuclearBathParameters {
    /// Validated constructor; Ga and As have `a > 0`.
    pub fn new(
        a: f64,
        gamma_n_b: f64,
        relax_rate: f64,
        sideband_rate: f64,
        optical_linewidth: f64,
    ) -> Result<Self> {
        let p = Self {
            a,
            gamma_n_b,
            relax_rate,
            sideband_rate,
            optical_linewidth,
        };
        if !(a > 0.0) {
            return domain(format!("hyperfine constant must be positive, got {a}"));
        }
        p.validate()?;
        Ok(p)
    }

    /// Checks everything except the sign of `a`.
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.a,
            self.gamma_n_b,
            self.relax_rate,
            self.sideband_rate,
            self.optical_linewidth,
        ];
        if !all.iter().all(|v| v.is_finite()) {
            return domain("bath parameters must be finite");
        }
        if self.relax_rate < 0.0 || self.sideband_rate < 0.0 {
            return domain("rates must be non-negative");
        }
        if !(self.optical_linewidth > 0.0) {
            return domain("optical linewidth must be positive");
        }
        Ok(())
    }

    /// The same bath with the hyperfine and nuclear Zeeman energies negated.
    pub fn mirrored(&self) -> Self {
        Self {
            a: -self.a,
            gamma_n_b: -self.gamma_n_b,
            ..*self
        }
    }
}

/// Magnitude of the energy of one nuclear flip, `|−γ_n B_x + a·S_x|`.
pub fn manifold_spacing(s_x: f64, gamma_n_b: f64, a: f64) -> f64 {
    flip_energy(s_x, gamma_n_b, a).abs()
}

/// Signed energy of a `δI_x = +1` flip.
pub fn flip_energy(s_x: f64, gamma_n_b: f64, a: f64) -> f64 {
    -gamma_n_b + a * s_x
}

/// Optical shift (μeV) of a transition with the given ground spin under
/// polarization `i_x`.
pub fn overhauser_shift(i_x: f64, a: f64, ground_spin: Spin) -> f64 {
    -a * 0.5 * ground_spin.sign() * i_x
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn spacing_examples() {
        assert_eq!(manifold_spacing(0.5, 0.3, 0.0), 0.3);
        assert_eq!(manifold_spacing(0.5, 0.0, 0.12), 0.06);
        let d = flip_energy(0.5, 0.3, 0.12) - flip_energy(-0.5, 0.3, 0.12);
        assert_relative_eq!(d, 0.12, epsilon = 1e-15);
    }

    #[test]
    fn overhauser_examples() {
        assert_eq!(overhauser_shift(0.0, 0.1, Spin::Up), 0.0);
        assert_relative_eq!(
            overhauser_shift(20.0, 0.1, Spin::Up),
            2.0 * overhauser_shift(10.0, 0.1, Spin::Up)
        );
        assert_eq!(
            overhauser_shift(7.0, 0.1, Spin::Up),
            -overhauser_shift(7.0, 0.1, Spin::Down)
        );
    }

    #[test]
    fn bath_validation() {
        assert!(NuclearBathParameters::new(-0.1, 0.2, 1.0, 1.0, 1.0).is_err());
        assert!(NuclearBathParameters::new(0.1, 0.2, -1.0, 1.0, 1.0).is_err());
        assert!(NuclearBathParameters::new(0.1, 0.2, 1.0, 1.0, 0.0).is_err());
        assert!(NuclearBathParameters::default().mirrored().validate().is_ok());
    }
}
