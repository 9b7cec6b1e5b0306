//! The four trion lines of a singly charged dot in Voigt and Faraday
//! geometry: energies, Stokes vectors and dipole orientations.
//!
//! cargo run --example transitions_and_stokes

use qdspin::holemix::HoleModel;
use qdspin::optics::{build_transition_set, polarization_rows, TransitionSet};
use qdspin::spinmodel::{FieldConfiguration, GTensor};

fn show(title: &str, set: &TransitionSet) {
    println!("{title}: omega_e = {:.3} ueV, omega_t = {:.3} ueV", set.omega_e, set.omega_t);
    let tdm = set.tdm_angles();
    for k in 0..4 {
        let s = set.stokes[k];
        println!(
            "  E{} {:+9.3} ueV  spin {:>4}  S = ({:.3}, {:+.3}, {:+.3}, {:+.3})  tdm {:6.1} deg",
            k + 1,
            set.energies[k] - set.omega_center,
            set.ground_spin[k].symbol(),
            s.s0,
            s.s1,
            s.s2,
            s.s3,
            tdm[k].to_degrees()
        );
    }
}

fn main() -> qdspin::Result<()> {
    let g_e = GTensor::isotropic(0.08);
    let hole = HoleModel::GTensor(GTensor::isotropic(0.13));
    let phi = 30f64.to_radians();

    let voigt = build_transition_set(&g_e, &FieldConfiguration::voigt(5.8, phi)?, &hole, 1.6e6)?;
    show("Voigt, phi = 30 deg", &voigt);

    let opposite = HoleModel::GTensor(GTensor::isotropic(-0.13));
    let flipped = build_transition_set(&g_e, &FieldConfiguration::voigt(5.8, phi)?, &opposite, 1.6e6)?;
    show("Voigt, opposite trion sign", &flipped);

    let faraday = build_transition_set(&g_e, &FieldConfiguration::faraday(5.8)?, &hole, 1.6e6)?;
    show("Faraday", &faraday);

    println!("\nE1 rate against analyser angle (Voigt):");
    let alphas: Vec<f64> = (0..12).map(|i| i as f64 * 15f64.to_radians()).collect();
    for row in polarization_rows(&voigt, &alphas).iter().filter(|r| r.transition == 1) {
        println!("  {:6.1} deg  {:.3}", row.alpha.to_degrees(), row.rate_norm);
    }
    Ok(())
}
