//! Fine structure splitting from the polarization dependence of a line.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::PolarizationSeries;
use crate::spinmodel::PLANCK_H;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FssFit {
    /// Peak-to-peak splitting (μeV), zero when flagged.
    #[serde(rename = "fss_ueV")]
    pub fss_uev: f64,
    #[serde(rename = "fss_GHz")]
    pub fss_ghz: f64,
    /// Axis angle in `[0°, 180°)`; `None` when the splitting is unresolved.
    pub eta_deg: Option<f64>,
    pub offset: f64,
    /// Standard error of the fitted half-amplitude (μeV).
    pub amplitude_error: f64,
    /// Set when the amplitude is below three standard errors.
    pub zero: bool,
}

impl FssFit {
    pub fn eta(&self) -> Option<f64> {
        self.eta_deg.map(f64::to_radians)
    }
}

/// Linear least squares on `offset + A cos 2β + B sin 2β`, read as
/// `offset + (fss/2) cos 2(β − η)`.
pub fn fss_fit(series: &PolarizationSeries) -> Result<FssFit> {
    let n = series.angle.len();
    let mut x = DMatrix::zeros(n, 3);
    for (i, b) in series.angle.iter().enumerate() {
        x[(i, 0)] = 1.0;
        x[(i, 1)] = (2.0 * b).cos();
        x[(i, 2)] = (2.0 * b).sin();
    }
    let y = DVector::from_column_slice(&series.value);
    let xtx = x.transpose() * &x;
    let inv = xtx
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("polarization angles do not determine a cosine".into()))?;
    let coef = &inv * (x.transpose() * &y);
    let resid = &y - &x * &coef;
    let dof = (n - 3).max(1) as f64;
    let var = resid.norm_squared() / dof;
    let (off, a, b) = (coef[0], coef[1], coef[2]);
    let amp = a.hypot(b);
    // delta-method error on sqrt(A² + B²)
    let amp_var = if amp > 0.0 {
        (a * a * inv[(1, 1)] + b * b * inv[(2, 2)] + 2.0 * a * b * inv[(1, 2)]) / (amp * amp) * var
    } else {
        0.5 * (inv[(1, 1)] + inv[(2, 2)]) * var
    };
    let se = amp_var.max(0.0).sqrt();
    let scale = series.value.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let zero = amp <= 3.0 * se || amp <= 1e-12 * scale.max(1e-300);
    if zero {
        return Ok(FssFit {
            fss_uev: 0.0,
            fss_ghz: 0.0,
            eta_deg: None,
            offset: off,
            amplitude_error: se,
            zero: true,
        });
    }
    let eta = (0.5 * b.atan2(a)).rem_euclid(std::f64::consts::PI);
    let fss = 2.0 * amp;
    Ok(FssFit {
        fss_uev: fss,
        fss_ghz: fss / PLANCK_H,
        eta_deg: Some(eta.to_degrees() % 180.0),
        offset: off,
        amplitude_error: se,
        zero: false,
    })
}
