//! Sweep the GaAs filling height of the built-in nanohole at fixed Al
//! fraction and print wavelength and electron g estimate for each fill.
//!
//! cargo run --release --example design_sweep

use qdspin::envelope::{design_sweep, linspace, zero_crossing, DesignSettings, NanoholeProfile};

fn main() -> qdspin::Result<()> {
    let profile = NanoholeProfile::default_afm();
    let settings = DesignSettings::default();
    let hs = linspace(0.2, 2.5, 12);
    let cells = design_sweep(&profile, &hs, &[0.25], &settings)?;

    println!("{:>6} {:>10} {:>9} {:>9} {:>9} {:>8}", "h_nm", "lambda_nm", "E_e", "E_h", "g_e", "P_b");
    let mut points = Vec::new();
    for c in cells {
        match c.result {
            Ok(p) => {
                println!(
                    "{:6.2} {:10.2} {:9.2} {:9.2} {:9.4} {:8.4}",
                    p.h, p.lambda_nm, p.electron_energy, p.hole_energy, p.g_e, p.barrier_occupancy
                );
                points.push(p);
            }
            Err(e) => println!("{:6.2} failed: {e}", c.h),
        }
    }
    match zero_crossing(&points) {
        Some(l) => println!("g_e changes sign at {l:.1} nm"),
        None => println!("no sign change in this range"),
    }
    Ok(())
}
