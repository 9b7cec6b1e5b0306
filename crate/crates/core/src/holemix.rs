//! Heavy-hole pseudo-spin response to an in-plane field.
//!
//! A pure heavy hole has no first-order coupling to an in-plane field, so its
//! Voigt-plane splitting comes from three weaker mechanisms:
//!
//! - third-order Zeeman coupling through the light holes, `∝ κ³B³/Δ_LH²`,
//!   with phase winding `3φ`;
//! - the cubic (non-Zeeman) Luttinger term `q`, linear in B, counter-rotating
//!   with the field;
//! - strain-induced HH-LH coupling `t`, linear in B, with a phase pinned to
//!   the crystal axes.
//!
//! The matrices below are written in the valence-electron basis. The trion
//! state is a hole, i.e. a missing valence electron, so its Hamiltonian is the
//! negative of the valence one.

use std::f64::consts::{PI, TAU};

use crate::spinmodel::{
    eigenpairs_from_field, matrix_from_field, normalize_angle, CMatrix2, FieldConfiguration,
    GTensor, SpinEigenpair, DEGENERACY_THRESHOLD, MU_B, PLANCK_H,
};
use crate::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MixingKind {
    ThirdOrderZeeman,
    NonZeemanQ,
    HhLhT,
}

impl MixingKind {
    pub const ALL: [MixingKind; 3] = [
        MixingKind::ThirdOrderZeeman,
        MixingKind::NonZeemanQ,
        MixingKind::HhLhT,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MixingKind::ThirdOrderZeeman => "third_order_zeeman",
            MixingKind::NonZeemanQ => "non_zeeman_q",
            MixingKind::HhLhT => "hh_lh_t",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "third_order_zeeman" | "third" | "k3" => Ok(MixingKind::ThirdOrderZeeman),
            "non_zeeman_q" | "q" => Ok(MixingKind::NonZeemanQ),
            "hh_lh_t" | "t" => Ok(MixingKind::HhLhT),
            other => Err(Error::Parse(format!("unknown mixing term '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoleMixingParameters {
    pub kappa: f64,
    pub q_eff: f64,
    pub t_eff: f64,
    /// HH-LH splitting (μeV).
    pub delta_lh: f64,
}

impl Default for HoleMixingParameters {
    fn default() -> Self {
        Self {
            kappa: 1.28,
            q_eff: 0.12,
            t_eff: 0.0,
            delta_lh: 750.0 * PLANCK_H,
        }
    }
}

impl HoleMixingParameters {
    pub fn new(kappa: f64, q_eff: f64, t_eff: f64, delta_lh: f64) -> Result<Self> {
        if ![kappa, q_eff, t_eff, delta_lh].iter().all(|v| v.is_finite()) {
            return domain("hole-mixing parameters must be finite");
        }
        if delta_lh <= 0.0 {
            return domain(format!("HH-LH splitting must be positive, got {delta_lh} μeV"));
        }
        Ok(Self {
            kappa,
            q_eff,
            t_eff,
            delta_lh,
        })
    }

    /// Effective in-plane g produced by a single term acting alone.
    pub fn term_g(&self, kind: MixingKind, b: f64) -> f64 {
        match kind {
            MixingKind::ThirdOrderZeeman => {
                3.0 * (MU_B * self.kappa * b).powi(3) / (self.delta_lh * self.delta_lh) / (MU_B * b)
            }
            MixingKind::NonZeemanQ => 1.5 * self.q_eff,
            MixingKind::HhLhT => 3.0 * self.t_eff,
        }
        .abs()
    }
}

/// Pseudo-field (μeV) of one mixing term for an in-plane field `b` at
/// azimuth `phi`, valence-electron picture.
pub fn mixing_field(kind: MixingKind, b: f64, phi: f64, p: &HoleMixingParameters) -> [f64; 3] {
    let (s, c) = phi.sin_cos();
    match kind {
        MixingKind::ThirdOrderZeeman => {
            let k = 1.5 * (MU_B * p.kappa * b).powi(3) / (p.delta_lh * p.delta_lh);
            let (s3, c3) = (3.0 * phi).sin_cos();
            [k * c3, k * s3, 0.0]
        }
        MixingKind::NonZeemanQ => {
            let k = -0.75 * p.q_eff * MU_B * b;
            [k * c, -k * s, 0.0]
        }
        MixingKind::HhLhT => {
            let k = -1.5 * MU_B * b * p.t_eff;
            [k * s, -k * c, 0.0]
        }
    }
}

pub fn mixing_term(kind: MixingKind, b: f64, phi: f64, p: &HoleMixingParameters) -> CMatrix2 {
    matrix_from_field(mixing_field(kind, b, phi, p))
}

fn summed_field(b: f64, phi: f64, p: &HoleMixingParameters, enabled: &[MixingKind]) -> [f64; 3] {
    let mut h = [0.0; 3];
    let mut seen = [false; 3];
    for &k in enabled {
        let idx = k as usize;
        if seen[idx] {
            continue;
        }
        seen[idx] = true;
        let f = mixing_field(k, b, phi, p);
        for i in 0..3 {
            h[i] += f[i];
        }
    }
    h
}

/// Sum of the enabled mixing terms (valence-electron picture).
pub fn hole_effective_hamiltonian(
    b: f64,
    phi: f64,
    p: &HoleMixingParameters,
    enabled: &[MixingKind],
) -> CMatrix2 {
    matrix_from_field(summed_field(b, phi, p, enabled))
}

/// How the trion's hole spin couples to the field.
#[derive(Debug, Clone, PartialEq)]
pub enum HoleModel {
    /// Phenomenological signed g-tensor for the trion.
    GTensor(GTensor),
    /// Out-of-plane `g_z` plus in-plane response from the mixing terms.
    Mixing {
        g_z: f64,
        params: HoleMixingParameters,
        enabled: Vec<MixingKind>,
    },
}

/// Pseudo-field of the trion Hamiltonian.
///
/// For a g-tensor the in-plane part is `½μ_B g_⊥(φ) B_⊥ (σ_x cos φ − σ_y sin φ)`,
/// the same counter-rotating form a positive `q` produces.
pub fn trion_field(model: &HoleModel, field: &FieldConfiguration) -> [f64; 3] {
    let bz = field.b_z();
    let bp = field.b_perp();
    let phi = field.phi;
    match model {
        HoleModel::GTensor(g) => {
            let k = 0.5 * MU_B * g.g_perp(phi) * bp;
            [k * phi.cos(), -k * phi.sin(), 0.5 * MU_B * g.g_z * bz]
        }
        HoleModel::Mixing {
            g_z,
            params,
            enabled,
        } => {
            let v = summed_field(bp, phi, params, enabled);
            [-v[0], -v[1], 0.5 * MU_B * g_z * bz]
        }
    }
}

/// Trion eigenstates `(|T⁺⟩, |T⁻⟩)`, higher energy first.
pub fn trion_eigenpair(
    model: &HoleModel,
    field: &FieldConfiguration,
) -> Result<(SpinEigenpair, SpinEigenpair)> {
    let hint = match model {
        HoleModel::GTensor(g) if g.g_perp(field.phi) < 0.0 => normalize_angle(PI - field.phi),
        _ => normalize_angle(-field.phi),
    };
    eigenpairs_from_field(trion_field(model, field), hint)
}

/// In-plane trion g-factor (≥ 0) and eigenvector phase θ at azimuth `phi`.
pub fn trion_inplane_response(
    b: f64,
    phi: f64,
    p: &HoleMixingParameters,
    enabled: &[MixingKind],
) -> Result<(f64, f64)> {
    if !(b > 0.0) {
        return Err(Error::Degenerate { splitting: 0.0 });
    }
    let v = summed_field(b, phi, p, enabled);
    let h = [-v[0], -v[1], 0.0];
    let (up, _) = eigenpairs_from_field(h, 0.0)?;
    if up.splitting < DEGENERACY_THRESHOLD {
        return Err(Error::Degenerate {
            splitting: up.splitting,
        });
    }
    Ok((up.splitting / (MU_B * b), normalize_angle(up.theta)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnisotropyScan {
    /// `(φ, g_t, θ)` samples over `[0, 2π)`.
    pub rows: Vec<(f64, f64, f64)>,
    pub g_max: f64,
    pub g_min: f64,
    pub delta_g: f64,
    pub phi_max: f64,
    pub phi_min: f64,
}

impl AnisotropyScan {
    pub fn mean_g(&self) -> f64 {
        self.rows.iter().map(|r| r.1).sum::<f64>() / self.rows.len() as f64
    }
}

fn golden_extremum(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, maximize: bool) -> f64 {
    let sgn = if maximize { -1.0 } else { 1.0 };
    let g = |x: f64| sgn * f(x);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (g(c), g(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-13 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = g(d);
        }
    }
    0.5 * (a + b)
}

/// Sample the in-plane response around the full circle and locate its
/// extrema. Extremal angles are refined between grid points and reported in
/// `[0, π)`.
pub fn anisotropy_scan(
    b: f64,
    p: &HoleMixingParameters,
    enabled: &[MixingKind],
    n_phi: usize,
) -> Result<AnisotropyScan> {
    if n_phi < 8 {
        return domain(format!("anisotropy scan needs at least 8 angles, got {n_phi}"));
    }
    let step = TAU / n_phi as f64;
    let mut rows = Vec::with_capacity(n_phi);
    for i in 0..n_phi {
        let phi = i as f64 * step;
        let (g, theta) = trion_inplane_response(b, phi, p, enabled)?;
        rows.push((phi, g, theta));
    }
    let (imax, _) = rows
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |acc, (i, r)| if r.1 > acc.1 { (i, r.1) } else { acc });
    let (imin, _) = rows
        .iter()
        .enumerate()
        .fold((0, f64::MAX), |acc, (i, r)| if r.1 < acc.1 { (i, r.1) } else { acc });
    let g_of = |phi: f64| {
        trion_inplane_response(b, phi, p, enabled)
            .map(|r| r.0)
            .unwrap_or(0.0)
    };
    let phi_max = golden_extremum(g_of, rows[imax].0 - step, rows[imax].0 + step, true);
    let phi_min = golden_extremum(g_of, rows[imin].0 - step, rows[imin].0 + step, false);
    let g_max = g_of(phi_max).max(rows[imax].1);
    let g_min = g_of(phi_min).min(rows[imin].1);
    Ok(AnisotropyScan {
        rows,
        g_max,
        g_min,
        delta_g: g_max - g_min,
        phi_max: phi_max.rem_euclid(PI),
        phi_min: phi_min.rem_euclid(PI),
    })
}

/// Closed-form in-plane g for the combined `q` and `t` terms.
pub fn qt_closed_form_g(q: f64, t: f64, phi: f64) -> f64 {
    2.0 * (0.5625 * q * q + 2.25 * t * t + 2.25 * q * t * (2.0 * phi).sin())
        .max(0.0)
        .sqrt()
}

/// Choose `q_eff` and `t_eff` so the combined `q + t` response has the given
/// azimuthal mean and peak-to-peak anisotropy. Uses the branch `q ≥ 2t`.
pub fn calibrate_qt(mean_g: f64, delta_g: f64) -> Result<(f64, f64)> {
    if !(mean_g > 0.0) || !(delta_g >= 0.0) {
        return domain("calibration targets must be positive");
    }
    let t = delta_g / 6.0;
    let n = 720;
    let mean_for = |q: f64| {
        (0..n)
            .map(|i| qt_closed_form_g(q, t, TAU * i as f64 / n as f64))
            .sum::<f64>()
            / n as f64
    };
    let (mut lo, mut hi) = (2.0 * t, 2.0 * t + 2.0 * mean_g + 1.0);
    if mean_for(lo) > mean_g {
        return domain(format!(
            "anisotropy {delta_g} too large for mean g {mean_g} on the q >= 2t branch"
        ));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_for(mid) < mean_g {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), t))
}

/// Which single term gives the largest splitting at field `b`. Ties go to
/// the earlier of third-order, `q`, `t`.
pub fn regime_classify(b: f64, p: &HoleMixingParameters) -> MixingKind {
    let mut best = MixingKind::ThirdOrderZeeman;
    let mut best_g = p.term_g(best, b);
    for k in [MixingKind::NonZeemanQ, MixingKind::HhLhT] {
        let g = p.term_g(k, b);
        if g > best_g {
            best = k;
            best_g = g;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinmodel::{axis_distance, field_from_matrix};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn gap(m: &CMatrix2) -> f64 {
        let e = m.symmetric_eigen().eigenvalues;
        (e[0] - e[1]).abs()
    }

    fn fig_s1() -> HoleMixingParameters {
        HoleMixingParameters::new(1.28, 0.03, 0.0, 750.0 * PLANCK_H).unwrap()
    }

    fn angle_diff(a: f64, b: f64) -> f64 {
        let d = (a - b).rem_euclid(TAU);
        d.min(TAU - d)
    }

    #[test]
    fn q_term_example() {
        let p = fig_s1();
        let m = mixing_term(MixingKind::NonZeemanQ, 4.0, 0.0, &p);
        assert_relative_eq!(m[(0, 1)].re, -0.75 * 0.03 * MU_B * 4.0, epsilon = 1e-12);
        assert_relative_eq!(gap(&m), 10.42, epsilon = 1e-2);
        assert_relative_eq!(gap(&m) / (MU_B * 4.0), 0.045, epsilon = 1e-12);
    }

    #[test]
    fn third_order_examples() {
        let p = fig_s1();
        let g12 = gap(&mixing_term(MixingKind::ThirdOrderZeeman, 12.0, 0.3, &p)) / (MU_B * 12.0);
        let g4 = gap(&mixing_term(MixingKind::ThirdOrderZeeman, 4.0, 0.3, &p)) / (MU_B * 4.0);
        assert_relative_eq!(g12, 0.316, max_relative = 1e-2);
        assert_relative_eq!(g4, 0.0351, max_relative = 1e-2);
        assert_relative_eq!(g12 / g4, 9.0, max_relative = 1e-10);
        let m = mixing_term(MixingKind::ThirdOrderZeeman, 12.0, 0.0, &p);
        assert_eq!(field_from_matrix(&m)[1], 0.0);
    }

    #[test]
    fn terms_are_hermitian_and_traceless() {
        let p = HoleMixingParameters::new(1.1, 0.2, 0.05, 2000.0).unwrap();
        for k in MixingKind::ALL {
            let m = mixing_term(k, 7.0, 1.3, &p);
            assert!((m - m.adjoint()).norm() < 1e-14);
            assert!(m.trace().norm() < 1e-14);
        }
    }

    #[test]
    fn single_term_phases() {
        let p = HoleMixingParameters::new(1.28, 0.1, 0.05, 3000.0).unwrap();
        for i in 0..16 {
            let phi = 0.1 + i as f64 * TAU / 16.0;
            let (_, th) = trion_inplane_response(5.0, phi, &p, &[MixingKind::NonZeemanQ]).unwrap();
            assert!(angle_diff(th, -phi) < 1e-9);
            let (_, th) = trion_inplane_response(5.0, phi, &p, &[MixingKind::HhLhT]).unwrap();
            assert!(axis_distance(th, phi + PI / 2.0) < 1e-9);
            let (_, th) =
                trion_inplane_response(5.0, phi, &p, &[MixingKind::ThirdOrderZeeman]).unwrap();
            assert!(axis_distance(th, 3.0 * phi) < 1e-9);
        }
    }

    #[test]
    fn q_only_g_and_linear_scaling() {
        let p = HoleMixingParameters::new(1.28, 0.13 / 1.5, 0.0, 3000.0).unwrap();
        for b in [0.5, 3.0, 9.0] {
            let (g, _) = trion_inplane_response(b, 0.4, &p, &[MixingKind::NonZeemanQ]).unwrap();
            assert_relative_eq!(g, 0.13, max_relative = 1e-12);
        }
    }

    #[test]
    fn combined_qt_extrema() {
        let p = HoleMixingParameters::new(1.28, 0.1, 0.01, 3000.0).unwrap();
        let en = [MixingKind::NonZeemanQ, MixingKind::HhLhT];
        let (g45, _) = trion_inplane_response(3.0, PI / 4.0, &p, &en).unwrap();
        let (g135, _) = trion_inplane_response(3.0, 3.0 * PI / 4.0, &p, &en).unwrap();
        assert_relative_eq!(g45, 0.18, max_relative = 1e-12);
        assert_relative_eq!(g135, 0.12, max_relative = 1e-12);
        let scan = anisotropy_scan(3.0, &p, &en, 64).unwrap();
        assert!(axis_distance(scan.phi_max, PI / 4.0) < 1e-6);
        assert!(axis_distance(scan.phi_min, 3.0 * PI / 4.0) < 1e-6);
        assert_relative_eq!(scan.delta_g, 0.06, max_relative = 1e-10);
    }

    #[test]
    fn isotropic_without_t() {
        let p = HoleMixingParameters::new(1.28, 0.1, 0.0, 3000.0).unwrap();
        let scan = anisotropy_scan(3.0, &p, &[MixingKind::NonZeemanQ], 32).unwrap();
        assert!(scan.delta_g.abs() < 1e-12);
        assert!(anisotropy_scan(3.0, &p, &[MixingKind::NonZeemanQ], 4).is_err());
    }

    #[test]
    fn zero_field_or_empty_set_is_degenerate() {
        let p = HoleMixingParameters::default();
        assert!(trion_inplane_response(0.0, 0.0, &p, &[MixingKind::NonZeemanQ]).is_err());
        assert!(trion_inplane_response(1.0, 0.0, &p, &[]).is_err());
        assert_eq!(hole_effective_hamiltonian(1.0, 0.0, &p, &[]).norm(), 0.0);
    }

    #[test]
    fn regimes() {
        let p = fig_s1();
        assert_eq!(regime_classify(12.0, &p), MixingKind::ThirdOrderZeeman);
        assert_eq!(regime_classify(4.0, &p), MixingKind::NonZeemanQ);
        let p = HoleMixingParameters::new(0.0, 0.05, 0.05, 3000.0).unwrap();
        assert_eq!(regime_classify(4.0, &p), MixingKind::HhLhT);
        let tie = HoleMixingParameters::new(0.0, 0.1, 0.05, 3000.0).unwrap();
        assert_eq!(regime_classify(4.0, &tie), MixingKind::NonZeemanQ);
    }

    #[test]
    fn calibration_round_trip() {
        let (q, t) = calibrate_qt(0.25, 0.15).unwrap();
        let p = HoleMixingParameters::new(1.28, q, t, 3000.0).unwrap();
        let scan = anisotropy_scan(2.0, &p, &[MixingKind::NonZeemanQ, MixingKind::HhLhT], 720)
            .unwrap();
        assert_relative_eq!(scan.mean_g(), 0.25, max_relative = 1e-6);
        assert_relative_eq!(scan.delta_g, 0.15, max_relative = 1e-6);
    }

    #[test]
    fn g_tensor_hole_matches_q_model() {
        let q = 0.1;
        let f = FieldConfiguration::voigt(4.0, 0.7).unwrap();
        let a = trion_field(&HoleModel::GTensor(GTensor::new(0.0, 1.5 * q, 0.0).unwrap()), &f);
        let b = trion_field(
            &HoleModel::Mixing {
                g_z: 0.0,
                params: HoleMixingParameters::new(1.28, q, 0.0, 3000.0).unwrap(),
                enabled: vec![MixingKind::NonZeemanQ],
            },
            &f,
        );
        for i in 0..3 {
            assert_relative_eq!(a[i], b[i], epsilon = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn qt_matches_closed_form(q in 0.001..0.5f64, t in 0.0..0.2f64, phi in 0.0..TAU, b in 0.1..10.0f64) {
            let p = HoleMixingParameters::new(1.0, q, t, 3000.0).unwrap();
            let (g, _) = trion_inplane_response(b, phi, &p, &[MixingKind::NonZeemanQ, MixingKind::HhLhT]).unwrap();
            prop_assert!((g - qt_closed_form_g(q, t, phi)).abs() < 1e-10);
        }

        #[test]
        fn third_order_scales_quadratically(b in 0.5..12.0f64, phi in 0.0..TAU) {
            let p = fig_s1();
            let g1 = trion_inplane_response(b, phi, &p, &[MixingKind::ThirdOrderZeeman]).unwrap().0;
            let g2 = trion_inplane_response(2.0 * b, phi, &p, &[MixingKind::ThirdOrderZeeman]).unwrap().0;
            prop_assert!((g2 / g1 - 4.0).abs() < 1e-10);
        }
    }
}
