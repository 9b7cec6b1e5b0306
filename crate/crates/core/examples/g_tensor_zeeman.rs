//! Zeeman splitting of an anisotropic electron g-tensor as the field is
//! tilted from the growth axis into the plane, plus the bulk reference
//! values the surrogate models start from.
//!
//! cargo run --example g_tensor_zeeman

use qdspin::envelope::GAAS;
use qdspin::spinmodel::{
    electron_eigenpair, lande_g, roth_g, spin_along, zeeman_splitting, FieldConfiguration,
    GTensor, CONSTANTS,
};

fn main() -> qdspin::Result<()> {
    println!("free-atom heavy hole (J=3/2, m=3/2): g = {:.3}", lande_g(0.5, 1.0, 1.5, 1.5)?);
    println!("bulk GaAs electron, two-band: g = {:.4}", roth_g(GAAS.e_p, GAAS.e_g, GAAS.delta_so)?);

    let g = GTensor::new(-0.1, 0.08, 0.02)?;
    let b = 5.8;
    println!("\ng_z = {}, g_perp = {} +- {}/2 at {b} T", g.g_z, g.g_perp_mean, g.delta_g_perp);
    println!("{:>7} {:>7} {:>12} {:>10} {:>6}", "chi", "phi", "split_ueV", "split_GHz", "e+");
    for chi_deg in [0.0f64, 30.0, 60.0, 90.0] {
        for phi_deg in [0.0f64, 45.0, 135.0] {
            let field = FieldConfiguration::new(b, chi_deg.to_radians(), phi_deg.to_radians())?;
            let w = zeeman_splitting(&g, &field);
            let (upper, _) = electron_eigenpair(&g, &field)?;
            println!(
                "{chi_deg:7.1} {phi_deg:7.1} {w:12.4} {:10.4} {:>6}",
                CONSTANTS.uev_to_ghz(w),
                spin_along(&upper, &field).symbol()
            );
        }
    }
    Ok(())
}
