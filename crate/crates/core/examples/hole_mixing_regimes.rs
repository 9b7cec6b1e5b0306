//! Which heavy/light-hole mixing mechanism sets the in-plane trion g at a
//! given field, and the in-plane anisotropy from the q and t terms.
//!
//! cargo run --example hole_mixing_regimes

use qdspin::holemix::{
    anisotropy_scan, calibrate_qt, regime_classify, HoleMixingParameters, MixingKind,
};
use qdspin::spinmodel::PLANCK_H;

fn main() -> qdspin::Result<()> {
    let p = HoleMixingParameters::new(1.28, 0.03, 0.0, 750.0 * PLANCK_H)?;
    println!("{:>5} {:>10} {:>10} {:>20}", "B_T", "g_third", "g_q", "dominant");
    for b in [1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0] {
        println!(
            "{b:5.1} {:10.4} {:10.4} {:>20}",
            p.term_g(MixingKind::ThirdOrderZeeman, b),
            p.term_g(MixingKind::NonZeemanQ, b),
            regime_classify(b, &p).name()
        );
    }

    // choose q and t for a mean in-plane g of 0.13 with 0.03 anisotropy
    let (q, t) = calibrate_qt(0.13, 0.03)?;
    println!("\ncalibrated q = {q:.5}, t = {t:.5}");
    let p = HoleMixingParameters::new(1.28, q, t, 750.0 * PLANCK_H)?;
    let scan = anisotropy_scan(5.8, &p, &[MixingKind::NonZeemanQ, MixingKind::HhLhT], 72)?;
    println!(
        "g_t max {:.4} at {:.2} deg, min {:.4} at {:.2} deg, mean {:.4}",
        scan.g_max,
        scan.phi_max.to_degrees(),
        scan.g_min,
        scan.phi_min.to_degrees(),
        scan.mean_g()
    );
    Ok(())
}
