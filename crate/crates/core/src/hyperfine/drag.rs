//! Mean-field dragging model.
//!
//! The laser sits at `x` from the unshifted resonance, so its detuning from
//! the shifted line is `Δ = x + a·S·I`. Optical sidebands at `Δ = ∓δ` with
//! `δ = γ_n B − a·S` flip nuclei up or down:
//!
//! ```text
//! dI/dt = W₀ [L(Δ + δ) − L(Δ − δ)] − Γ_d I,   L(u) = 1 / (1 + (2u/Γ)²)
//! ```
//!
//! When `a·S·δ > 0` the polarization moves the line towards the laser and it
//! follows the sweep (dragging); otherwise the line is pushed away.

use super::NuclearBathParameters;
use crate::spinmodel::Spin;
use crate::{domain, Error, Result};

pub const DRAG_SCAN_HEADER: [&str; 4] = ["omega_L_ueV", "intensity", "I_x", "direction"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepDirection {
    Up,
    Down,
}

impl SweepDirection {
    pub fn name(self) -> &'static str {
        match self {
            SweepDirection::Up => "up",
            SweepDirection::Down => "down",
        }
    }
}

/// Laser sweep over `[start, stop]` (μeV from the unshifted resonance).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub start: f64,
    pub stop: f64,
    /// Sweep speed (μeV/s).
    pub rate: f64,
    pub direction: SweepDirection,
    /// Number of recorded samples, evenly spaced along the sweep.
    pub samples: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            start: -40.0,
            stop: 40.0,
            rate: 0.5,
            direction: SweepDirection::Up,
            samples: 801,
        }
    }
}

impl SweepSpec {
    pub fn with_direction(self, direction: SweepDirection) -> Self {
        Self { direction, ..self }
    }

    /// Recorded laser positions in ascending order.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.samples;
        let (lo, hi) = (self.start.min(self.stop), self.start.max(self.stop));
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

/// One simulated sweep. Samples are stored in sweep order.
#[derive(Debug, Clone, PartialEq)]
pub struct DragScan {
    pub direction: SweepDirection,
    pub omega_l: Vec<f64>,
    pub intensity: Vec<f64>,
    pub i_x: Vec<f64>,
}

impl DragScan {
    /// `(omega_l, intensity)` sorted by ascending laser energy.
    pub fn ascending(&self) -> (Vec<f64>, Vec<f64>) {
        let mut w = self.omega_l.clone();
        let mut y = self.intensity.clone();
        if self.direction == SweepDirection::Down {
            w.reverse();
            y.reverse();
        }
        (w, y)
    }

    pub fn area(&self) -> f64 {
        let (w, y) = self.ascending();
        trapezoid(&w, &y)
    }
}

pub fn lorentzian(u: f64, fwhm: f64) -> f64 {
    let y = 2.0 * u / fwhm;
    1.0 / (1.0 + y * y)
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1]))
        .sum()
}

/// Simulate one laser sweep across the transition whose ground spin is
/// `ground_spin`, starting from an unpolarized bath.
pub fn drag_sweep(
    bath: &NuclearBathParameters,
    ground_spin: Spin,
    sweep: &SweepSpec,
) -> Result<DragScan> {
    bath.validate()?;
    if !(sweep.rate > 0.0) {
        return domain(format!("sweep rate must be positive, got {}", sweep.rate));
    }
    if sweep.samples < 2 || !(sweep.stop != sweep.start) {
        return domain("sweep needs a non-empty range and at least two samples");
    }
    let s = 0.5 * ground_spin.sign();
    let a_s = bath.a * s;
    let delta = bath.gamma_n_b - a_s;
    let gamma = bath.optical_linewidth;
    let w0 = bath.sideband_rate;
    let gd = bath.relax_rate;

    let rhs = |x: f64, i: f64| {
        let d = x + a_s * i;
        w0 * (lorentzian(d + delta, gamma) - lorentzian(d - delta, gamma)) - gd * i
    };

    let mut grid = sweep.grid();
    if sweep.direction == SweepDirection::Down {
        grid.reverse();
    }
    let sign = if sweep.direction == SweepDirection::Up { 1.0 } else { -1.0 };
    let bin = (sweep.stop - sweep.start).abs() / (sweep.samples - 1) as f64;
    let max_rate = w0.max(gd).max(1e-300);
    let dt_max = 0.1 / max_rate;
    let span = bin / sweep.rate;
    let steps = (span / dt_max).ceil().max(1.0) as usize;
    let dt = span / steps as f64;
    let v = sign * sweep.rate;

    let mut i_x = 0.0f64;
    let mut omega_l = Vec::with_capacity(grid.len());
    let mut intensity = Vec::with_capacity(grid.len());
    let mut trace = Vec::with_capacity(grid.len());
    for &xc in &grid {
        // Each sample is the count rate averaged over the time the laser
        // spends in the bin centred on it.
        let x0 = xc - 0.5 * sign * bin;
        let mut acc = 0.0;
        for n in 0..steps {
            let x = x0 + v * (n as f64 * dt);
            let xm = x + v * 0.5 * dt;
            let k1 = rhs(x, i_x);
            let k2 = rhs(xm, i_x + 0.5 * dt * k1);
            let k3 = rhs(xm, i_x + 0.5 * dt * k2);
            let k4 = rhs(x + v * dt, i_x + dt * k3);
            let i_mid = i_x + 0.5 * dt * k2;
            acc += lorentzian(xm + a_s * i_mid, gamma);
            i_x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        if !i_x.is_finite() {
            return Err(Error::Numerical(format!(
                "polarization diverged at omega_L = {xc:.4} μeV (a = {}, W0 = {w0}, step = {dt:.3e} s)",
                bath.a
            )));
        }
        omega_l.push(xc);
        intensity.push(acc / steps as f64);
        trace.push(i_x);
    }

    Ok(DragScan {
        direction: sweep.direction,
        omega_l,
        intensity,
        i_x: trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DragLabel {
    /// Dragging: flat-top line that follows the laser.
    D,
    /// Anti-dragging: suppressed, hysteretic line.
    A,
    Neutral,
}

impl DragLabel {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "D" | "d" => Ok(DragLabel::D),
            "A" | "a" => Ok(DragLabel::A),
            "N" | "n" | "neutral" => Ok(DragLabel::Neutral),
            other => Err(Error::Parse(format!("unknown drag label '{other}'"))),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            DragLabel::D => "D",
            DragLabel::A => "A",
            DragLabel::Neutral => "neutral",
        }
    }
}

/// Widest contiguous window where the trace stays at or above `frac` of its
/// peak (μeV).
fn plateau_width(w: &[f64], y: &[f64], frac: f64) -> f64 {
    let peak = y.iter().cloned().fold(0.0, f64::max);
    if peak <= 0.0 {
        return 0.0;
    }
    let mut best = 0.0f64;
    let mut start: Option<usize> = None;
    for i in 0..y.len() {
        if y[i] >= frac * peak {
            let s = *start.get_or_insert(i);
            best = best.max(w[i] - w[s]);
        } else {
            start = None;
        }
    }
    best
}

/// Full width at half maximum by linear interpolation of the crossings.
pub fn fwhm(scan: &DragScan) -> f64 {
    let (w, y) = scan.ascending();
    let (imax, peak) = y
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |acc, (i, v)| if *v > acc.1 { (i, *v) } else { acc });
    let half = 0.5 * peak;
    let mut left = w[0];
    for i in (0..imax).rev() {
        if y[i] < half {
            left = w[i] + (half - y[i]) / (y[i + 1] - y[i]) * (w[i + 1] - w[i]);
            break;
        }
    }
    let mut right = w[w.len() - 1];
    for i in imax + 1..y.len() {
        if y[i] < half {
            right = w[i - 1] + (y[i - 1] - half) / (y[i - 1] - y[i]) * (w[i] - w[i - 1]);
            break;
        }
    }
    right - left
}

/// Area of the feedback-free Lorentzian on the scan's grid.
pub fn reference_area(scan: &DragScan, linewidth: f64) -> f64 {
    let (w, _) = scan.ascending();
    let y: Vec<f64> = w.iter().map(|&x| lorentzian(x, linewidth)).collect();
    trapezoid(&w, &y)
}

/// Area of a trace within one linewidth of the unshifted resonance.
fn core_area(w: &[f64], y: &[f64], linewidth: f64) -> f64 {
    let (cw, cy): (Vec<f64>, Vec<f64>) = w
        .iter()
        .zip(y)
        .filter(|(x, _)| x.abs() <= linewidth)
        .map(|(x, v)| (*x, *v))
        .unzip();
    trapezoid(&cw, &cy)
}

/// Classify a pair of opposite sweeps.
///
/// - `D` when both directions show a plateau (≥ 80 % of peak) wider than
///   three linewidths.
/// - `A` when the mean area within one linewidth of the unshifted resonance
///   falls below 80 % of the feedback-free line's and the two directions
///   differ by more than 0.1 somewhere.
/// - `Neutral` otherwise.
pub fn classify_lineshape(
    scan_up: &DragScan,
    scan_down: &DragScan,
    linewidth: f64,
) -> Result<DragLabel> {
    let (wu, yu) = scan_up.ascending();
    let (wd, yd) = scan_down.ascending();
    if wu.len() != wd.len() || wu.iter().zip(&wd).any(|(a, b)| (a - b).abs() > 1e-9) {
        return domain("up and down sweeps must share a grid");
    }
    let min_plateau = 3.0 * linewidth;
    if plateau_width(&wu, &yu, 0.8) > min_plateau && plateau_width(&wd, &yd, 0.8) > min_plateau {
        return Ok(DragLabel::D);
    }
    let lw: Vec<f64> = wu.iter().map(|&x| lorentzian(x, linewidth)).collect();
    let reference = core_area(&wu, &lw, linewidth);
    let area = 0.5 * (core_area(&wu, &yu, linewidth) + core_area(&wd, &yd, linewidth));
    let hysteresis = yu
        .iter()
        .zip(&yd)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if area < 0.8 * reference && hysteresis > 0.1 {
        return Ok(DragLabel::A);
    }
    Ok(DragLabel::Neutral)
}
