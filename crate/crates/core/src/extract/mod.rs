//! Spectrum analysis: doublet fitting, g-factor and Stokes estimates, fine
//! structure fits and a synthetic resonance-fluorescence map generator.

mod fit;
mod fss;
mod rfmap;

use std::path::Path;

pub use fit::{
    extract_g_factors, find_peaks, fit_double_gaussian, fit_single_gaussian, gaussian, DoubletFit,
    GExtraction, SingletFit,
};
pub use fss::{fss_fit, FssFit};
pub use rfmap::{synth_rf_map, RfMap, RfMapSpec, RF_MAP_HEADER};

use crate::csvio::{io_err, parse_numeric};
use crate::spinmodel::MU_B;
use crate::{domain, Error, Result};

/// Energy unit declared in a spectrum file header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyUnit {
    ElectronVolt,
    MicroElectronVolt,
}

impl EnergyUnit {
    pub fn column(self) -> &'static str {
        match self {
            EnergyUnit::ElectronVolt => "energy_eV",
            EnergyUnit::MicroElectronVolt => "energy_ueV",
        }
    }

    fn to_uev(self) -> f64 {
        match self {
            EnergyUnit::ElectronVolt => 1e6,
            EnergyUnit::MicroElectronVolt => 1.0,
        }
    }
}

/// Counts on a strictly increasing energy grid, held in μeV.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub energy: Vec<f64>,
    pub counts: Vec<f64>,
}

impl Spectrum {
    pub fn new(energy: Vec<f64>, counts: Vec<f64>) -> Result<Self> {
        if energy.len() != counts.len() {
            return domain("energy and counts must have equal length");
        }
        if energy.len() < 2 {
            return domain("a spectrum needs at least two points");
        }
        if !energy.windows(2).all(|w| w[1] > w[0]) {
            return domain("energy grid must be strictly increasing");
        }
        if counts.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return domain("counts must be finite and non-negative");
        }
        Ok(Self { energy, counts })
    }

    /// Build from energies in `unit`.
    pub fn with_unit(energy: Vec<f64>, counts: Vec<f64>, unit: EnergyUnit) -> Result<Self> {
        let k = unit.to_uev();
        Self::new(energy.into_iter().map(|e| e * k).collect(), counts)
    }

    pub fn from_csv_text(text: &str) -> Result<Self> {
        let t = parse_numeric(text)?;
        let unit = if t.header.iter().any(|h| h == "energy_eV") {
            EnergyUnit::ElectronVolt
        } else if t.header.iter().any(|h| h == "energy_ueV") {
            EnergyUnit::MicroElectronVolt
        } else {
            return Err(Error::Parse(
                "spectrum needs an energy_eV or energy_ueV column".into(),
            ));
        };
        let counts = t
            .column("counts")
            .ok_or_else(|| Error::Parse("spectrum needs a counts column".into()))?;
        let energy = t.column(unit.column()).unwrap_or_default();
        Self::with_unit(energy, counts, unit)
    }

    pub fn from_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(&path.display().to_string()))?;
        Self::from_csv_text(&text)
    }

    pub fn len(&self) -> usize {
        self.energy.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energy.is_empty()
    }

    /// Sub-spectrum with `lo ≤ E ≤ hi` (μeV).
    pub fn window(&self, lo: f64, hi: f64) -> Result<Self> {
        let (e, c): (Vec<f64>, Vec<f64>) = self
            .energy
            .iter()
            .zip(&self.counts)
            .filter(|(e, _)| **e >= lo && **e <= hi)
            .map(|(e, c)| (*e, *c))
            .unzip();
        Self::new(e, c)
    }
}

/// Peak positions or intensities sampled against a polarizer angle.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationSeries {
    /// Polarizer angles (rad).
    pub angle: Vec<f64>,
    pub value: Vec<f64>,
}

impl PolarizationSeries {
    /// At least 8 samples whose coverage, counting one mean spacing for the
    /// last sample, reaches π.
    pub fn new(angle: Vec<f64>, value: Vec<f64>) -> Result<Self> {
        if angle.len() != value.len() {
            return domain("angles and values must have equal length");
        }
        let n = angle.len();
        if n < 8 {
            return domain(format!("need at least 8 samples, got {n}"));
        }
        if angle.iter().chain(&value).any(|v| !v.is_finite()) {
            return domain("series values must be finite");
        }
        let lo = angle.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = angle.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let span = hi - lo;
        if span + span / ((n - 1) as f64) < std::f64::consts::PI - 1e-9 {
            return domain("angles must span at least π");
        }
        Ok(Self { angle, value })
    }
}

/// `(|g_e|, |g_t|)` from the four ascending Voigt line energies (eV) at
/// field `b` (T). Signs are not recoverable from energies alone.
///
/// The assignment assumes `|g_e| < |g_t|`; otherwise the two results swap.
pub fn g_from_centers(w: [f64; 4], b: f64) -> Result<(f64, f64)> {
    if !(b > 0.0) {
        return domain(format!("field must be positive, got {b} T"));
    }
    let omega_e = 1e6 * ((w[1] - w[0]) / 2.0 + (w[3] - w[2]) / 2.0);
    let omega_t = 1e6 * ((w[0] + w[1]) / 2.0 - (w[2] + w[3]) / 2.0);
    Ok((omega_e.abs() / (MU_B * b), omega_t.abs() / (MU_B * b)))
}

/// Lower bound on the rectilinear Stokes component from the intensity areas
/// in two orthogonal polarizations, as `A1 / (A1 + A2)`.
///
/// This is not the textbook `(A1 − A2)/(A1 + A2)`; see
/// [`rectilinear_contrast`] for that. The orthogonal line is assigned the
/// negated value.
pub fn rectilinear_stokes_from_areas(a1: f64, a2: f64) -> Result<f64> {
    check_areas(a1, a2)?;
    Ok(a1 / (a1 + a2))
}

/// Conventional linear contrast `(A1 − A2)/(A1 + A2)`.
pub fn rectilinear_contrast(a1: f64, a2: f64) -> Result<f64> {
    check_areas(a1, a2)?;
    Ok((a1 - a2) / (a1 + a2))
}

fn check_areas(a1: f64, a2: f64) -> Result<()> {
    if !(a1 >= 0.0 && a2 >= 0.0) || !(a1 + a2).is_finite() {
        return domain("areas must be finite and non-negative");
    }
    if a1 + a2 == 0.0 {
        return domain("at least one area must be positive");
    }
    Ok(())
}
