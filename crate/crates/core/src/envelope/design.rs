//! Geometry → wavelength and electron g estimate, and (h, r) design sweeps.

use rayon::prelude::*;

use super::geometry::{build_potential, Band, NanoholeProfile, QDGeometry};
use super::material::MaterialTable;
use super::solver::{solve_with, EnvelopeSolution, SolverSettings};
use crate::spinmodel::{roth_g, HC};
use crate::{domain, Result};

pub const SWEEP_HEADER: [&str; 5] = ["h_nm", "r", "lambda_nm", "g_e_estimate", "barrier_occupancy"];

#[derive(Debug, Clone, PartialEq)]
pub struct DesignSettings {
    /// Solver grid points along x, y, z.
    pub grid: [usize; 3],
    /// Barrier added above and below the dot (nm).
    pub padding: f64,
    /// Width of the Gaussian interface smoothing (nm).
    pub interface_sigma: f64,
    pub solver: SolverSettings,
    /// Exciton binding energy subtracted from the emission energy (meV).
    pub binding_energy: f64,
    pub materials: MaterialTable,
}

impl Default for DesignSettings {
    fn default() -> Self {
        Self {
            grid: [64, 64, 64],
            padding: 15.0,
            interface_sigma: 1.5,
            solver: SolverSettings::default(),
            binding_energy: 0.0,
            materials: MaterialTable::default(),
        }
    }
}

/// `(E_X [eV], λ [nm])` with `E_X = E_g(GaAs) + E_e + E_h − E_B`.
pub fn emission_energy(
    e_sol: &EnvelopeSolution,
    h_sol: &EnvelopeSolution,
    settings: &DesignSettings,
) -> (f64, f64) {
    emission_from_energies(e_sol.energy, h_sol.energy, settings)
}

fn emission_from_energies(e_e: f64, e_h: f64, settings: &DesignSettings) -> (f64, f64) {
    let e_x = settings.materials.gaas.e_g + 1e-3 * (e_e + e_h - settings.binding_energy);
    (e_x, HC / e_x)
}

/// Surrogate electron g: the two-band formula at the confined transition
/// energy, blended with the barrier's bulk g by the electron's barrier
/// occupancy.
pub fn electron_g_surrogate(
    e_sol: &EnvelopeSolution,
    h_sol: &EnvelopeSolution,
    geom: &QDGeometry,
    materials: &MaterialTable,
) -> Result<f64> {
    g_from_parts(e_sol.energy, h_sol.energy, e_sol.barrier_occupancy, geom.al_fraction, materials)
}

/// The same blend from raw numbers: confinement energies in meV, barrier
/// occupancy `p_b` and barrier Al fraction `r`.
pub fn g_from_parts(e_e: f64, e_h: f64, p_b: f64, r: f64, materials: &MaterialTable) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_b) {
        return domain(format!("barrier occupancy must lie in [0, 1], got {p_b}"));
    }
    let gaas = materials.gaas;
    let dot_g = roth_g(gaas.e_p, gaas.e_g + 1e-3 * (e_e + e_h), gaas.delta_so)?;
    let bulk_g = materials.interp(r)?.g;
    Ok((1.0 - p_b) * dot_g + p_b * bulk_g)
}

/// One evaluated design cell.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignPoint {
    pub h: f64,
    pub r: f64,
    /// Electron and hole confinement energies (meV).
    pub electron_energy: f64,
    pub hole_energy: f64,
    pub emission_ev: f64,
    pub lambda_nm: f64,
    pub g_e: f64,
    pub barrier_occupancy: f64,
}

impl DesignPoint {
    pub fn csv_row(&self) -> Vec<String> {
        vec![
            format!("{:.4}", self.h),
            format!("{:.4}", self.r),
            format!("{:.4}", self.lambda_nm),
            format!("{:.6}", self.g_e),
            format!("{:.6}", self.barrier_occupancy),
        ]
    }
}

/// Solve both carriers for one geometry and derive λ and g.
pub fn evaluate_design(geom: &QDGeometry, settings: &DesignSettings) -> Result<DesignPoint> {
    let solve = |band| {
        let pot = build_potential(geom, band, &settings.materials, settings.grid, settings.padding);
        solve_with(&pot, &settings.solver)
    };
    let e = solve(Band::Conduction)?;
    let h = solve(Band::Valence)?;
    let (emission_ev, lambda_nm) = emission_energy(&e, &h, settings);
    let g_e = electron_g_surrogate(&e, &h, geom, &settings.materials)?;
    Ok(DesignPoint {
        h: geom.fill_height,
        r: geom.al_fraction,
        electron_energy: e.energy,
        hole_energy: h.energy,
        emission_ev,
        lambda_nm,
        g_e,
        barrier_occupancy: e.barrier_occupancy,
    })
}

/// A sweep cell: the design point or the reason it could not be computed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub h: f64,
    pub r: f64,
    pub result: std::result::Result<DesignPoint, String>,
}

/// Evaluate every `(h, r)` pair, in parallel, returned in `h`-major order.
pub fn design_sweep(
    profile: &NanoholeProfile,
    h_values: &[f64],
    r_values: &[f64],
    settings: &DesignSettings,
) -> Result<Vec<SweepCell>> {
    if h_values.is_empty() || r_values.is_empty() {
        return domain("sweep ranges must be non-empty");
    }
    let cells: Vec<(f64, f64)> = h_values
        .iter()
        .flat_map(|&h| r_values.iter().map(move |&r| (h, r)))
        .collect();
    Ok(cells
        .par_iter()
        .map(|&(h, r)| {
            let result = QDGeometry::with_sigma(profile.clone(), h, r, settings.interface_sigma)
                .and_then(|g| evaluate_design(&g, settings))
                .map_err(|e| e.to_string());
            SweepCell { h, r, result }
        })
        .collect())
}

/// `n` evenly spaced values from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Wavelength at which `g` changes sign, by linear interpolation between
/// consecutive points ordered by wavelength.
pub fn zero_crossing(points: &[DesignPoint]) -> Option<f64> {
    let mut p: Vec<&DesignPoint> = points.iter().collect();
    p.sort_by(|a, b| a.lambda_nm.total_cmp(&b.lambda_nm));
    p.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        if a.g_e == 0.0 {
            Some(a.lambda_nm)
        } else if a.g_e * b.g_e < 0.0 {
            Some(a.lambda_nm + (b.lambda_nm - a.lambda_nm) * a.g_e / (a.g_e - b.g_e))
        } else {
            None
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn quick() -> DesignSettings {
        DesignSettings {
            grid: [24, 24, 32],
            ..Default::default()
        }
    }

    #[test]
    fn emission_examples() {
        let s = DesignSettings::default();
        let (e, l) = emission_from_energies(91.0, 0.0, &s);
        assert_relative_eq!(e, 1.610, epsilon = 1e-12);
        assert_relative_eq!(l, 770.088, epsilon = 1e-2);
        let (_, l0) = emission_from_energies(0.0, 0.0, &s);
        assert_relative_eq!(l0, 816.223, epsilon = 1e-2);
        let b = DesignSettings {
            binding_energy: 10.0,
            ..Default::default()
        };
        assert!(emission_from_energies(91.0, 0.0, &b).1 > l);
    }

    #[test]
    fn g_surrogate_limits() {
        let m = MaterialTable::default();
        assert_relative_eq!(g_from_parts(0.0, 0.0, 0.0, 0.25, &m).unwrap(), -0.3174, epsilon = 1e-4);
        assert_relative_eq!(g_from_parts(0.0, 0.0, 1.0, 0.25, &m).unwrap(), 0.05, epsilon = 1e-12);
        let lo = g_from_parts(20.0, 5.0, 0.05, 0.25, &m).unwrap();
        let hi = g_from_parts(80.0, 20.0, 0.05, 0.25, &m).unwrap();
        assert!(hi > lo);
        assert!(g_from_parts(0.0, 0.0, 1.5, 0.25, &m).is_err());
    }

    #[test]
    fn thicker_fill_lowers_confinement() {
        let p = NanoholeProfile::default_afm();
        let s = quick();
        let a = evaluate_design(&QDGeometry::new(p.clone(), 0.4, 0.25).unwrap(), &s).unwrap();
        let b = evaluate_design(&QDGeometry::new(p, 0.8, 0.25).unwrap(), &s).unwrap();
        assert!(b.electron_energy < a.electron_energy);
        assert!(b.lambda_nm > a.lambda_nm);
        assert!(a.electron_energy > 0.0 && a.hole_energy > 0.0);
        assert!((0.0..=1.0).contains(&a.barrier_occupancy));
    }

    #[test]
    fn sweep_cell_matches_direct_call() {
        let p = NanoholeProfile::default_afm();
        let s = quick();
        let rows = design_sweep(&p, &[0.6], &[0.25], &s).unwrap();
        let direct = evaluate_design(&QDGeometry::new(p, 0.6, 0.25).unwrap(), &s).unwrap();
        assert_eq!(rows[0].result.as_ref().unwrap(), &direct);
    }

    #[test]
    fn sweep_order_and_failures() {
        let p = NanoholeProfile::default_afm();
        let s = DesignSettings {
            grid: [16, 16, 16],
            ..Default::default()
        };
        let rows = design_sweep(&p, &[0.5, -1.0], &[0.2, 0.3], &s).unwrap();
        let order: Vec<(f64, f64)> = rows.iter().map(|c| (c.h, c.r)).collect();
        assert_eq!(order, vec![(0.5, 0.2), (0.5, 0.3), (-1.0, 0.2), (-1.0, 0.3)]);
        assert!(rows[0].result.is_ok());
        assert!(rows[2].result.as_ref().unwrap_err().contains("filling height"));
        assert!(design_sweep(&p, &[], &[0.2], &s).is_err());
    }

    #[test]
    fn crossing_interpolation() {
        let mk = |l: f64, g: f64| DesignPoint {
            h: 0.0,
            r: 0.0,
            electron_energy: 0.0,
            hole_energy: 0.0,
            emission_ev: 0.0,
            lambda_nm: l,
            g_e: g,
            barrier_occupancy: 0.0,
        };
        let z = zero_crossing(&[mk(760.0, -0.1), mk(740.0, 0.1)]).unwrap();
        assert_relative_eq!(z, 750.0);
        assert!(zero_crossing(&[mk(740.0, 0.1), mk(760.0, 0.05)]).is_none());
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }
}
