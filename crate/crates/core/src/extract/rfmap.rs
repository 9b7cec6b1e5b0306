//! Synthetic resonance-fluorescence maps against gate voltage.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::Spectrum;
use crate::optics::TransitionSet;
use crate::spinmodel::PLANCK_H;
use crate::{domain, Result};

pub const RF_MAP_HEADER: [&str; 3] = ["gate_V", "detuning_ueV", "intensity"];

#[derive(Debug, Clone, PartialEq)]
pub struct RfMapSpec {
    /// Linear Stark shift (GHz/V).
    pub stark_slope: f64,
    /// Gate ranges `(lo, hi)` in which the charge state is stable.
    pub windows: Vec<(f64, f64)>,
    /// Lorentzian FWHM (GHz).
    pub linewidth: f64,
    /// Gate voltages at which rows are computed.
    pub gate: Vec<f64>,
    /// Laser detuning from the set's centre (μeV).
    pub detuning: Vec<f64>,
    /// Gate voltage at which the lines sit at their unshifted energies.
    pub gate_ref: f64,
    /// Standard deviation of additive noise relative to peak intensity.
    pub noise: f64,
    pub seed: u64,
}

impl RfMapSpec {
    /// One bright window `[0, 1]` V, 101 gate points and a detuning axis
    /// covering all four lines with 10 linewidths of margin.
    pub fn around(set: &TransitionSet, stark_slope: f64, linewidth: f64) -> Self {
        let lo = set.energies[0] - set.omega_center;
        let hi = set.energies[3] - set.omega_center;
        let margin = 10.0 * linewidth * PLANCK_H;
        let n = 801;
        let detuning = (0..n)
            .map(|i| lo - margin + (hi - lo + 2.0 * margin) * i as f64 / (n - 1) as f64)
            .collect();
        Self {
            stark_slope,
            windows: vec![(0.0, 1.0)],
            linewidth,
            gate: (0..101).map(|i| -0.25 + 1.5 * i as f64 / 100.0).collect(),
            detuning,
            gate_ref: 0.5,
            noise: 0.0,
            seed: 0,
        }
    }
}

/// Intensity table, row `i` at `gate[i]`, column `j` at `detuning[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RfMap {
    pub gate: Vec<f64>,
    pub detuning: Vec<f64>,
    pub intensity: Vec<Vec<f64>>,
    /// Absolute energy of zero detuning (μeV).
    pub omega_center: f64,
}

impl RfMap {
    /// The row closest to gate voltage `v` as a spectrum on absolute energy.
    pub fn spectrum_at(&self, v: f64) -> Result<Spectrum> {
        let i = (0..self.gate.len())
            .min_by(|&a, &b| (self.gate[a] - v).abs().total_cmp(&(self.gate[b] - v).abs()))
            .ok_or_else(|| crate::Error::Domain("empty map".into()))?;
        Spectrum::new(
            self.detuning.iter().map(|d| d + self.omega_center).collect(),
            self.intensity[i].clone(),
        )
    }

    pub fn rows(&self) -> Vec<[f64; 3]> {
        let mut out = Vec::with_capacity(self.gate.len() * self.detuning.len());
        for (i, v) in self.gate.iter().enumerate() {
            for (j, d) in self.detuning.iter().enumerate() {
                out.push([*v, *d, self.intensity[i][j]]);
            }
        }
        out
    }
}

/// Four Lorentzian ridges weighted by each transition's total dipole
/// strength, shifted linearly with gate voltage and present only inside the
/// bright windows.
pub fn synth_rf_map(set: &TransitionSet, spec: &RfMapSpec) -> Result<RfMap> {
    if spec.windows.is_empty() {
        return domain("at least one bright window is required");
    }
    if spec.windows.iter().any(|(a, b)| !(b > a)) {
        return domain("windows must have hi > lo");
    }
    if !(spec.linewidth > 0.0) {
        return domain("linewidth must be positive");
    }
    if !(spec.noise >= 0.0) {
        return domain("noise must be non-negative");
    }
    let gamma = spec.linewidth * PLANCK_H;
    let peak = set.max_s0().max(1e-300);
    let weights: Vec<f64> = set.stokes.iter().map(|s| s.s0 / peak).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise = Normal::new(0.0, spec.noise).map_err(|e| crate::Error::Domain(e.to_string()))?;
    let mut intensity = Vec::with_capacity(spec.gate.len());
    for &v in &spec.gate {
        let bright = spec.windows.iter().any(|(a, b)| v >= *a && v <= *b);
        let shift = spec.stark_slope * PLANCK_H * (v - spec.gate_ref);
        let row = spec
            .detuning
            .iter()
            .map(|d| {
                let signal = if bright {
                    set.energies
                        .iter()
                        .zip(&weights)
                        .map(|(e, w)| {
                            let u = 2.0 * (d - (e - set.omega_center + shift)) / gamma;
                            w / (1.0 + u * u)
                        })
                        .sum()
                } else {
                    0.0
                };
                let n = if spec.noise > 0.0 { noise.sample(&mut rng) } else { 0.0 };
                (signal + n).max(0.0)
            })
            .collect();
        intensity.push(row);
    }
    Ok(RfMap {
        gate: spec.gate.clone(),
        detuning: spec.detuning.clone(),
        intensity,
        omega_center: set.omega_center,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::extract_g_factors;
    use crate::holemix::HoleModel;
    use crate::optics::build_transition_set;
    use crate::spinmodel::{FieldConfiguration, GTensor};

    fn example_set() -> TransitionSet {
        let field = FieldConfiguration::voigt(5.8, 0.3).unwrap();
        build_transition_set(
            &GTensor::new(0.3, 0.08, 0.0).unwrap(),
            &field,
            &HoleModel::GTensor(GTensor::new(0.5, 0.13, 0.0).unwrap()),
            1.6e6,
        )
        .unwrap()
    }

    #[test]
    fn zero_slope_gives_vertical_ridges() {
        let set = example_set();
        let spec = RfMapSpec::around(&set, 0.0, 0.72);
        let map = synth_rf_map(&set, &spec).unwrap();
        let first = map.intensity.iter().position(|r| r.iter().any(|v| *v > 0.0)).unwrap();
        for row in &map.intensity[first..] {
            if row.iter().any(|v| *v > 0.0) {
                assert_eq!(row, &map.intensity[first]);
            }
        }
        // outside the window nothing is emitted
        assert!(map.intensity[0].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn window_cross_section_round_trip() {
        let set = example_set();
        let mut spec = RfMapSpec::around(&set, 2.0, 0.72);
        spec.noise = 0.01;
        spec.seed = 5;
        let map = synth_rf_map(&set, &spec).unwrap();
        let r = extract_g_factors(&map.spectrum_at(0.7).unwrap(), 5.8, None).unwrap();
        assert!((r.g_e - 0.08).abs() < 0.002, "{}", r.g_e);
        assert!((r.g_t - 0.13).abs() < 0.002, "{}", r.g_t);
        let stark = 2.0 * PLANCK_H * 0.2;
        let expected = set.energies[0] + stark;
        assert!((r.centers[0] - expected).abs() < 0.2);
    }

    #[test]
    fn rejects_bad_specs() {
        let set = example_set();
        let mut spec = RfMapSpec::around(&set, 0.0, 0.72);
        spec.windows.clear();
        assert!(synth_rf_map(&set, &spec).is_err());
        let mut spec = RfMapSpec::around(&set, 0.0, 0.72);
        spec.linewidth = 0.0;
        assert!(synth_rf_map(&set, &spec).is_err());
    }

    #[test]
    fn seeded_noise_is_reproducible() {
        let set = example_set();
        let mut spec = RfMapSpec::around(&set, 1.0, 0.72);
        spec.noise = 0.05;
        spec.seed = 42;
        assert_eq!(synth_rf_map(&set, &spec).unwrap(), synth_rf_map(&set, &spec).unwrap());
    }
}
