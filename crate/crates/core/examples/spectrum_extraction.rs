//! Analysis of measured-style data: |g| from a noisy gate-voltage map cut,
//! fine structure from a polarization series, and the Stokes bound from
//! two line areas.
//!
//! cargo run --release --example spectrum_extraction

use std::f64::consts::PI;

use qdspin::extract::{
    extract_g_factors, fss_fit, rectilinear_stokes_from_areas, synth_rf_map, PolarizationSeries,
    RfMapSpec,
};
use qdspin::holemix::HoleModel;
use qdspin::optics::build_transition_set;
use qdspin::spinmodel::{FieldConfiguration, GTensor, CONSTANTS};

fn main() -> qdspin::Result<()> {
    let b = 5.8;
    let set = build_transition_set(
        &GTensor::new(0.3, 0.08, 0.0)?,
        &FieldConfiguration::voigt(b, 0.3)?,
        &HoleModel::GTensor(GTensor::new(0.5, 0.13, 0.0)?),
        1.6e6,
    )?;
    let mut spec = RfMapSpec::around(&set, 2.0, 0.72);
    spec.noise = 0.02;
    spec.seed = 3;
    let map = synth_rf_map(&set, &spec)?;
    let cut = map.spectrum_at(0.6)?;
    let g = extract_g_factors(&cut, b, None)?;
    println!("map cut at 0.6 V: |g_e| = {:.4}, |g_t| = {:.4} (true 0.08, 0.13)", g.g_e, g.g_t);
    for (i, c) in g.centers.iter().enumerate() {
        println!("  E{} at {:+.3} ueV from centre", i + 1, c - set.omega_center);
    }

    // line position wobbling by FSS/2 as the polarizer turns
    let fss = CONSTANTS.ghz_to_uev(3.0);
    let eta = 20f64.to_radians();
    let angle: Vec<f64> = (0..18).map(|i| i as f64 * PI / 18.0).collect();
    let value: Vec<f64> = angle.iter().map(|a| 0.5 * fss * (2.0 * (a - eta)).cos()).collect();
    let f = fss_fit(&PolarizationSeries::new(angle, value)?)?;
    println!(
        "FSS {:.3} ueV = {:.3} GHz, axis {:.1} deg",
        f.fss_uev,
        f.fss_ghz,
        f.eta_deg.unwrap_or(f64::NAN)
    );

    println!("rectilinear Stokes >= {}", rectilinear_stokes_from_areas(17.0, 3.0)?);
    Ok(())
}
