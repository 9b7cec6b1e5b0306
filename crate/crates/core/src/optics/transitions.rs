use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{dipole_matrix_element, stokes_from_amplitudes, StokesVector};
use crate::holemix::{trion_eigenpair, HoleModel};
use crate::spinmodel::{
    electron_eigenpair, normalize_axis, spin_along, FieldConfiguration, GTensor, Spin,
    SpinEigenpair,
};
use crate::Result;

pub const POLAR_MAP_HEADER: [&str; 4] = ["phi_rad", "alpha_rad", "transition", "rate_norm"];

/// Which electron and trion level a transition connects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TransitionLabel {
    /// `true` for the upper electron level `e⁺`.
    pub electron_upper: bool,
    /// `true` for the upper trion level `T⁺`.
    pub trion_upper: bool,
}

impl TransitionLabel {
    fn canonical() -> [TransitionLabel; 4] {
        let l = |e, t| TransitionLabel {
            electron_upper: e,
            trion_upper: t,
        };
        [l(true, false), l(false, false), l(true, true), l(false, true)]
    }

    pub fn same_index(&self) -> bool {
        self.electron_upper == self.trion_upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Handedness {
    SigmaPlus,
    SigmaMinus,
}

/// The four trion transitions `E1 ≤ E2 ≤ E3 ≤ E4` at one field.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSet {
    pub omega_center: f64,
    pub omega_e: f64,
    pub omega_t: f64,
    pub energies: [f64; 4],
    pub stokes: [StokesVector; 4],
    pub ground_spin: [Spin; 4],
    pub labels: [TransitionLabel; 4],
    /// Dipole amplitudes at analyzer angles 0 and π/2 from the field.
    pub amplitudes: [(Complex64, Complex64); 4],
    pub field: FieldConfiguration,
}

impl TransitionSet {
    /// Lab-frame orientation of each transition's linear polarization axis,
    /// in `[0, π)`.
    pub fn tdm_angles(&self) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (o, s) in out.iter_mut().zip(&self.stokes) {
            *o = normalize_axis(self.field.phi + s.linear_angle());
        }
        out
    }

    pub fn rates_at(&self, alpha: f64) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (o, s) in out.iter_mut().zip(&self.stokes) {
            *o = s.rate_at(alpha);
        }
        out
    }

    pub fn max_s0(&self) -> f64 {
        self.stokes.iter().map(|s| s.s0).fold(0.0, f64::max)
    }
}

/// The four transition energies with their level labels, sorted ascending.
///
/// With `E_T(±) = ±ω_t/2` and `E_e(±) = ±ω_e/2` the photon energy is
/// `ω' + E_T − E_e`. Ground-spin labels assume the upper electron level is
/// spin-up along the field, which holds for a positive electron g.
pub fn transition_energies(
    omega_center: f64,
    omega_e: f64,
    omega_t: f64,
) -> ([f64; 4], [Spin; 4], [TransitionLabel; 4]) {
    let mut items: Vec<(f64, TransitionLabel)> = TransitionLabel::canonical()
        .into_iter()
        .map(|l| {
            let et = if l.trion_upper { 0.5 } else { -0.5 } * omega_t;
            let ee = if l.electron_upper { 0.5 } else { -0.5 } * omega_e;
            (omega_center + et - ee, l)
        })
        .collect();
    items.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut e = [0.0; 4];
    let mut s = [Spin::Up; 4];
    let mut l = [TransitionLabel::canonical()[0]; 4];
    for (k, (en, lab)) in items.into_iter().enumerate() {
        e[k] = en;
        s[k] = if lab.electron_upper { Spin::Up } else { Spin::Down };
        l[k] = lab;
    }
    (e, s, l)
}

/// Build the full transition set: energies, Stokes vectors and ground-spin
/// orientation for electron tensor `g_e` and trion model `hole`.
pub fn build_transition_set(
    g_e: &GTensor,
    field: &FieldConfiguration,
    hole: &HoleModel,
    omega_center: f64,
) -> Result<TransitionSet> {
    let e_pair = electron_eigenpair(g_e, field)?;
    let t_pair = trion_eigenpair(hole, field)?;
    Ok(assemble(field, omega_center, &e_pair, &t_pair))
}

fn assemble(
    field: &FieldConfiguration,
    omega_center: f64,
    e_pair: &(SpinEigenpair, SpinEigenpair),
    t_pair: &(SpinEigenpair, SpinEigenpair),
) -> TransitionSet {
    let omega_e = e_pair.0.splitting;
    let omega_t = t_pair.0.splitting;
    let (energies, _, labels) = transition_energies(omega_center, omega_e, omega_t);
    let mut stokes = [StokesVector::default(); 4];
    let mut amplitudes = [(Complex64::default(), Complex64::default()); 4];
    let mut ground_spin = [Spin::Up; 4];
    for k in 0..4 {
        let e = if labels[k].electron_upper { &e_pair.0 } else { &e_pair.1 };
        let t = if labels[k].trion_upper { &t_pair.0 } else { &t_pair.1 };
        let m0 = dipole_matrix_element(e, t, field.phi, 0.0);
        let m90 = dipole_matrix_element(e, t, field.phi, PI / 2.0);
        amplitudes[k] = (m0, m90);
        stokes[k] = stokes_from_amplitudes(m0, m90);
        ground_spin[k] = spin_along(e, field);
    }
    TransitionSet {
        omega_center,
        omega_e,
        omega_t,
        energies,
        stokes,
        ground_spin,
        labels,
        amplitudes,
        field: *field,
    }
}

/// Lab-frame TDM angles `(β1, β2)` of the Voigt transitions, modulo π.
/// `β1` belongs to E1 and E4, `β2` to E2 and E3.
pub fn voigt_tdm_angles(sign_e: i8, sign_t: i8, phi: f64) -> (f64, f64) {
    let a = normalize_axis(-phi);
    let b = normalize_axis(-phi + PI / 2.0);
    if (sign_e > 0) == (sign_t > 0) {
        (a, b)
    } else {
        (b, a)
    }
}

/// Bright Faraday lines (1-based) and their circular handedness, lower line
/// first. Handedness is given for the usual ordering `|g_z^e| < |g_z^t|`;
/// see [`faraday_handedness`] for the general case.
pub fn faraday_bright_pair(sign_gz_e: i8, sign_gz_t: i8) -> ([usize; 2], [Handedness; 2]) {
    let lines = if (sign_gz_e > 0) == (sign_gz_t > 0) {
        [2, 3]
    } else {
        [1, 4]
    };
    let lower = if sign_gz_t > 0 {
        Handedness::SigmaMinus
    } else {
        Handedness::SigmaPlus
    };
    (lines, [lower, opposite(lower)])
}

fn opposite(h: Handedness) -> Handedness {
    match h {
        Handedness::SigmaPlus => Handedness::SigmaMinus,
        Handedness::SigmaMinus => Handedness::SigmaPlus,
    }
}

/// Handedness of the two bright Faraday lines for signed out-of-plane g
/// factors, lower line first.
///
/// The σ⁺ line connects the spin-up electron to the spin-up trion level, so
/// it sits `(g_z^t − g_z^e)·μ_B B/2` from the center.
pub fn faraday_handedness(g_z_e: f64, g_z_t: f64) -> [Handedness; 2] {
    let lower = if g_z_t - g_z_e < 0.0 {
        Handedness::SigmaPlus
    } else {
        Handedness::SigmaMinus
    };
    [lower, opposite(lower)]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarRow {
    pub phi: f64,
    pub alpha: f64,
    /// 1-based transition index in ascending energy.
    pub transition: usize,
    pub rate_norm: f64,
}

/// Rows for one transition set: rates normalized to the brightest line.
pub fn polarization_rows(set: &TransitionSet, alphas: &[f64]) -> Vec<PolarRow> {
    let norm = set.max_s0();
    let mut rows = Vec::with_capacity(alphas.len() * 4);
    for k in 0..4 {
        for &a in alphas {
            let r = set.stokes[k].rate_at(a);
            rows.push(PolarRow {
                phi: set.field.phi,
                alpha: a,
                transition: k + 1,
                rate_norm: if norm > 0.0 { r / norm } else { 0.0 },
            });
        }
    }
    rows
}

/// Polar data over a grid of field azimuths and analyzer angles. The
/// transition set is rebuilt at every azimuth; output order follows `phis`.
pub fn polarization_map(
    g_e: &GTensor,
    hole: &HoleModel,
    b: f64,
    chi: f64,
    phis: &[f64],
    alphas: &[f64],
) -> Result<Vec<PolarRow>> {
    let blocks: Result<Vec<Vec<PolarRow>>> = phis
        .par_iter()
        .map(|&phi| {
            let field = FieldConfiguration::new(b, chi, phi)?;
            let set = build_transition_set(g_e, &field, hole, 0.0)?;
            let mut rows = polarization_rows(&set, alphas);
            for r in &mut rows {
                r.phi = phi;
            }
            Ok(rows)
        })
        .collect();
    Ok(blocks?.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holemix::{HoleMixingParameters, MixingKind};
    use crate::spinmodel::{axis_distance, MU_B};
    use approx::assert_relative_eq;
    use std::f64::consts::TAU;

    fn voigt_set(ge: f64, gt: f64, phi: f64) -> TransitionSet {
        let field = FieldConfiguration::voigt(5.8, phi).unwrap();
        build_transition_set(
            &GTensor::new(0.0, ge, 0.0).unwrap(),
            &field,
            &HoleModel::GTensor(GTensor::new(0.0, gt, 0.0).unwrap()),
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn energy_examples() {
        let (e, s, _) = transition_energies(0.0, 6.0, 10.0);
        assert_eq!(e, [-8.0, -2.0, 2.0, 8.0]);
        assert_eq!(s, [Spin::Up, Spin::Down, Spin::Up, Spin::Down]);
        let (e, _, _) = transition_energies(1.0, 0.0, 10.0);
        assert_eq!(e[0], e[1]);
        assert_eq!(e[2], e[3]);
        let (e, _, _) = transition_energies(1.0, 4.0, 4.0);
        assert_eq!(e[1], e[2]);
        let (e, s, _) = transition_energies(0.0, 10.0, 6.0);
        assert_eq!(e, [-8.0, -2.0, 2.0, 8.0]);
        assert_eq!(s, [Spin::Up, Spin::Up, Spin::Down, Spin::Down]);
    }

    #[test]
    fn example_dot_splittings() {
        let set = voigt_set(0.08, 0.13, 0.0);
        assert_relative_eq!(set.omega_e, 0.08 * MU_B * 5.8, epsilon = 1e-9);
        assert_relative_eq!(set.omega_t, 0.13 * MU_B * 5.8, epsilon = 1e-9);
        let e = set.energies;
        assert_relative_eq!(e[0] + e[3], e[1] + e[2], epsilon = 1e-10);
    }

    #[test]
    fn voigt_angles_examples() {
        assert_eq!(voigt_tdm_angles(1, 1, 0.0).0, 0.0);
        let (_, b2) = voigt_tdm_angles(1, 1, PI / 4.0);
        assert!(axis_distance(b2, PI / 4.0) < 1e-12);
        assert_relative_eq!(voigt_tdm_angles(1, -1, 0.0).0, PI / 2.0);
    }

    #[test]
    fn voigt_pipeline_matches_closed_form_angles() {
        for (ge, gt) in [(0.08, 0.13), (-0.08, -0.13), (0.08, -0.13), (-0.2, 0.13), (0.2, 0.13)] {
            for i in 0..16 {
                let phi = i as f64 * TAU / 16.0 + 0.01;
                let set = voigt_set(ge, gt, phi);
                let (b1, b2) = voigt_tdm_angles(ge.signum() as i8, gt.signum() as i8, phi);
                let a = set.tdm_angles();
                assert!(axis_distance(a[0], b1) < 1e-9, "{ge} {gt} {phi}");
                assert!(axis_distance(a[3], b1) < 1e-9);
                assert!(axis_distance(a[1], b2) < 1e-9);
                assert!(axis_distance(a[2], b2) < 1e-9);
                for s in &set.stokes {
                    assert_relative_eq!(s.s0, set.stokes[0].s0, epsilon = 1e-10);
                    assert_relative_eq!(s.degree_of_polarization(), 1.0, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn q_only_hole_aligns_outer_lines_with_field() {
        let field = FieldConfiguration::voigt(5.8, 0.0).unwrap();
        let hole = HoleModel::Mixing {
            g_z: 0.0,
            params: HoleMixingParameters::new(1.28, 0.0867, 0.0, 3101.75).unwrap(),
            enabled: vec![MixingKind::NonZeemanQ],
        };
        let set = build_transition_set(&GTensor::new(0.0, 0.08, 0.0).unwrap(), &field, &hole, 0.0)
            .unwrap();
        assert_relative_eq!(set.stokes[0].normalized()[0], 1.0, epsilon = 1e-10);
        assert_relative_eq!(set.stokes[3].normalized()[0], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn faraday_selection() {
        for (ge, gt) in [(0.1, 0.5), (-0.1, -0.5), (0.1, -0.5), (-0.1, 0.5), (0.7, 0.5), (-0.7, 0.5)] {
            let field = FieldConfiguration::faraday(3.0).unwrap();
            let set = build_transition_set(
                &GTensor::new(ge, 0.0, 0.0).unwrap(),
                &field,
                &HoleModel::GTensor(GTensor::new(gt, 0.0, 0.0).unwrap()),
                0.0,
            )
            .unwrap();
            let (lines, hand) = faraday_bright_pair(ge.signum() as i8, gt.signum() as i8);
            let bright = set.max_s0();
            for k in 0..4 {
                if lines.contains(&(k + 1)) {
                    assert_relative_eq!(set.stokes[k].s0, bright, epsilon = 1e-12);
                } else {
                    assert!(set.stokes[k].s0 < 1e-12 * bright);
                }
            }
            let l = set.stokes[lines[0] - 1].normalized()[2];
            let u = set.stokes[lines[1] - 1].normalized()[2];
            assert_relative_eq!(l * u, -1.0, epsilon = 1e-12);
            let expect = faraday_handedness(ge, gt);
            let got = if l > 0.0 { Handedness::SigmaPlus } else { Handedness::SigmaMinus };
            assert_eq!(got, expect[0], "{ge} {gt}");
            if ge.abs() < gt.abs() {
                assert_eq!(expect, hand);
            }
        }
    }

    #[test]
    fn ground_spins_pair_up() {
        for (ge, gt) in [(0.08, 0.13), (-0.08, 0.13), (0.3, -0.13)] {
            let set = voigt_set(ge, gt, 0.4);
            let ups = set.ground_spin.iter().filter(|s| **s == Spin::Up).count();
            assert_eq!(ups, 2);
            for k in 0..4 {
                let expect = if set.labels[k].electron_upper == (ge > 0.0) { Spin::Up } else { Spin::Down };
                assert_eq!(set.ground_spin[k], expect);
            }
        }
    }

    #[test]
    fn polar_map_counter_rotates() {
        let hole = HoleModel::Mixing {
            g_z: 0.0,
            params: HoleMixingParameters::new(1.28, 0.1, 0.0, 3101.75).unwrap(),
            enabled: vec![MixingKind::NonZeemanQ],
        };
        let g = GTensor::new(0.0, 0.08, 0.0).unwrap();
        let phis: Vec<f64> = (0..16).map(|i| i as f64 * PI / 32.0).collect();
        let mut prev = None;
        for &phi in &phis {
            let set = build_transition_set(&g, &FieldConfiguration::voigt(5.8, phi).unwrap(), &hole, 0.0).unwrap();
            let a = set.tdm_angles()[0];
            if let Some((p0, a0)) = prev {
                let slope = -axis_distance(a, a0) / (phi - p0);
                assert_relative_eq!(slope, -1.0, epsilon = 1e-9);
                assert!(axis_distance(a, a0 - (phi - p0)) < 1e-9);
            }
            prev = Some((phi, a));
        }
        let alphas: Vec<f64> = (0..360).map(|i| i as f64 * TAU / 360.0).collect();
        let rows = polarization_map(&g, &hole, 5.8, PI / 2.0, &[0.0], &alphas).unwrap();
        assert_eq!(rows.len(), 4 * 360);
        let m = rows.iter().filter(|r| r.transition == 1).map(|r| r.rate_norm).fold(0.0, f64::max);
        assert_relative_eq!(m, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn circular_map_is_flat() {
        let g = GTensor::new(0.1, 0.0, 0.0).unwrap();
        let hole = HoleModel::GTensor(GTensor::new(0.5, 0.0, 0.0).unwrap());
        let alphas: Vec<f64> = (0..36).map(|i| i as f64 * 0.1).collect();
        let rows = polarization_map(&g, &hole, 2.0, 0.0, &[0.0], &alphas).unwrap();
        for r in rows.iter().filter(|r| r.transition == 2) {
            assert_relative_eq!(r.rate_norm, 0.5, epsilon = 1e-12);
        }
    }
}
