//! Slow laser sweeps across a trion line with nuclear feedback: the line
//! whose ground spin points along the field locks to the laser, the other
//! is pushed away.
//!
//! cargo run --release --example dnp_dragging

use qdspin::hyperfine::{
    classify_lineshape, drag_sweep, fwhm, NuclearBathParameters, SweepDirection, SweepSpec,
};
use qdspin::spinmodel::Spin;

fn main() -> qdspin::Result<()> {
    let bath = NuclearBathParameters::default();
    let sweep = SweepSpec::default();
    println!(
        "a = {} ueV, linewidth = {:.3} ueV, sweep {}..{} ueV at {} ueV/s",
        bath.a, bath.optical_linewidth, sweep.start, sweep.stop, sweep.rate
    );
    for spin in [Spin::Up, Spin::Down] {
        let up = drag_sweep(&bath, spin, &sweep)?;
        let down = drag_sweep(&bath, spin, &sweep.with_direction(SweepDirection::Down))?;
        let label = classify_lineshape(&up, &down, bath.optical_linewidth)?;
        let pol = up.i_x.iter().cloned().fold(0.0f64, |m, v| m.max(v.abs()));
        println!(
            "ground spin {}: {}  (up FWHM {:.2} ueV, down FWHM {:.2} ueV, max |I_x| {:.1})",
            spin.symbol(),
            label.symbol(),
            fwhm(&up),
            fwhm(&down),
            pol
        );
    }

    let off = NuclearBathParameters { a: 0.0, ..bath };
    let up = drag_sweep(&off, Spin::Up, &sweep)?;
    println!("without feedback: FWHM {:.3} ueV", fwhm(&up));
    Ok(())
}
