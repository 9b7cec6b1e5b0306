//! Absolute g-factor signs from dragging labels.
//!
//! The lowest line E1 always connects the upper electron level `e⁺` to the
//! lower trion level. With `a > 0` a line drags exactly when its ground spin
//! points along the field, and `e⁺` points along the field exactly when
//! `g_⊥^e > 0`. So E1 being `D` means a positive electron g. The Voigt TDM
//! orientation then says whether the trion g has the same sign.

use rayon::prelude::*;

use super::{classify_lineshape, drag_sweep, DragLabel, NuclearBathParameters, SweepSpec};
use crate::optics::TransitionSet;
use crate::spinmodel::{axis_distance, Spin};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignRelation {
    Same,
    Opposite,
}

impl SignRelation {
    /// Decide from the measured lab angle of the E1/E4 dipoles at field
    /// azimuth `phi`: same signs put them at `−φ`, opposite signs at
    /// `−φ + π/2`.
    pub fn from_tdm_angle(beta14: f64, phi: f64) -> Self {
        let same = axis_distance(beta14, -phi);
        let opposite = axis_distance(beta14, -phi + std::f64::consts::FRAC_PI_2);
        if same <= opposite {
            SignRelation::Same
        } else {
            SignRelation::Opposite
        }
    }

    /// For a field along [100]: E1/E4 parallel to the field means equal signs.
    pub fn from_tdm_14_parallel_b(parallel: bool) -> Self {
        if parallel {
            SignRelation::Same
        } else {
            SignRelation::Opposite
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MagnitudeOrder {
    /// `|g_⊥^e| < |g_⊥^t|`
    ElectronSmaller,
    /// `|g_⊥^e| > |g_⊥^t|`
    ElectronLarger,
}

impl MagnitudeOrder {
    pub fn from_g(g_e: f64, g_t: f64) -> Self {
        if g_e.abs() < g_t.abs() {
            MagnitudeOrder::ElectronSmaller
        } else {
            MagnitudeOrder::ElectronLarger
        }
    }
}

fn fmt_labels(labels: &[DragLabel; 4]) -> String {
    labels
        .iter()
        .map(|l| l.symbol())
        .collect::<Vec<_>>()
        .join(",")
}

/// Signs `(sign g_⊥^e, sign g_⊥^t)` from the TDM relation, the four dragging
/// labels in ascending energy order, and the magnitude ordering.
pub fn infer_signs(
    relation: SignRelation,
    labels: &[DragLabel; 4],
    order: MagnitudeOrder,
) -> Result<(i8, i8)> {
    let d_count = labels.iter().filter(|l| **l == DragLabel::D).count();
    let a_count = labels.iter().filter(|l| **l == DragLabel::A).count();
    if d_count != 2 || a_count != 2 {
        return Err(Error::Inconsistent(format!(
            "labels ({}) must contain exactly two D and two A",
            fmt_labels(labels)
        )));
    }
    // Positions that share the E1 ground state.
    let (partner, name) = match order {
        MagnitudeOrder::ElectronSmaller => (2, "|g_e| < |g_t| requires the pattern X,Y,X,Y"),
        MagnitudeOrder::ElectronLarger => (1, "|g_e| > |g_t| requires the pattern X,X,Y,Y"),
    };
    if labels[partner] != labels[0] {
        return Err(Error::Inconsistent(format!(
            "labels ({}) violate the level structure: {name}",
            fmt_labels(labels)
        )));
    }
    let sign_e: i8 = if labels[0] == DragLabel::D { 1 } else { -1 };
    let sign_t = match relation {
        SignRelation::Same => sign_e,
        SignRelation::Opposite => -sign_e,
    };
    Ok((sign_e, sign_t))
}

/// Drag labels for each line of a transition set, obtained by simulating
/// up and down sweeps and classifying the pair.
pub fn simulate_labels(
    set: &TransitionSet,
    bath: &NuclearBathParameters,
    sweep: &SweepSpec,
) -> Result<[DragLabel; 4]> {
    let spins: Vec<Spin> = set.ground_spin.to_vec();
    let labels: Result<Vec<DragLabel>> = spins
        .par_iter()
        .map(|&s| {
            let up = drag_sweep(bath, s, &sweep.with_direction(super::SweepDirection::Up))?;
            let down = drag_sweep(bath, s, &sweep.with_direction(super::SweepDirection::Down))?;
            classify_lineshape(&up, &down, bath.optical_linewidth)
        })
        .collect();
    let l = labels?;
    Ok([l[0], l[1], l[2], l[3]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use DragLabel::{A, D};

    #[test]
    fn truth_table() {
        use MagnitudeOrder::*;
        use SignRelation::*;
        assert_eq!(infer_signs(Same, &[D, A, D, A], ElectronSmaller).unwrap(), (1, 1));
        assert_eq!(infer_signs(Same, &[A, D, A, D], ElectronSmaller).unwrap(), (-1, -1));
        assert_eq!(infer_signs(Opposite, &[D, A, D, A], ElectronSmaller).unwrap(), (1, -1));
        assert_eq!(infer_signs(Opposite, &[A, D, A, D], ElectronSmaller).unwrap(), (-1, 1));
        assert_eq!(infer_signs(Same, &[D, D, A, A], ElectronLarger).unwrap(), (1, 1));
        assert_eq!(infer_signs(Opposite, &[A, A, D, D], ElectronLarger).unwrap(), (-1, 1));
    }

    #[test]
    fn inconsistent_patterns() {
        let e = infer_signs(SignRelation::Same, &[D, D, A, A], MagnitudeOrder::ElectronSmaller)
            .unwrap_err();
        assert!(e.to_string().contains("X,Y,X,Y"));
        let e = infer_signs(SignRelation::Same, &[D, A, D, A], MagnitudeOrder::ElectronLarger)
            .unwrap_err();
        assert!(e.to_string().contains("X,X,Y,Y"));
        assert!(infer_signs(SignRelation::Same, &[D, D, D, A], MagnitudeOrder::ElectronLarger).is_err());
        assert!(infer_signs(
            SignRelation::Same,
            &[D, DragLabel::Neutral, D, A],
            MagnitudeOrder::ElectronSmaller
        )
        .is_err());
    }

    #[test]
    fn relation_from_angles() {
        assert_eq!(SignRelation::from_tdm_angle(0.0, 0.0), SignRelation::Same);
        assert_eq!(
            SignRelation::from_tdm_angle(std::f64::consts::FRAC_PI_2, 0.0),
            SignRelation::Opposite
        );
        assert_eq!(SignRelation::from_tdm_angle(std::f64::consts::PI - 0.3 - 1e-6, 0.3), SignRelation::Same);
    }
}
