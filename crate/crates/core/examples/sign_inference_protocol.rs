//! Recover the absolute signs of the in-plane electron and trion g from the
//! dipole orientation of E1 and the dragging pattern of the four lines.
//!
//! cargo run --release --example sign_inference_protocol

use qdspin::holemix::HoleModel;
use qdspin::hyperfine::{
    infer_signs, simulate_labels, MagnitudeOrder, NuclearBathParameters, SignRelation, SweepSpec,
};
use qdspin::optics::build_transition_set;
use qdspin::spinmodel::{FieldConfiguration, GTensor};

fn main() -> qdspin::Result<()> {
    let phi = 0.3;
    let field = FieldConfiguration::voigt(5.8, phi)?;
    let bath = NuclearBathParameters::default();
    let sweep = SweepSpec::default();
    println!("{:>7} {:>7} {:>10} {:>12} {:>9}", "g_e", "g_t", "relation", "labels", "inferred");
    for (ge, gt) in [(0.08, 0.13), (-0.08, -0.13), (0.08, -0.13), (-0.08, 0.13), (0.13, -0.08)] {
        let set = build_transition_set(
            &GTensor::isotropic(ge),
            &field,
            &HoleModel::GTensor(GTensor::isotropic(gt)),
            1.6e6,
        )?;
        let relation = SignRelation::from_tdm_angle(set.tdm_angles()[0], phi);
        let labels = simulate_labels(&set, &bath, &sweep)?;
        let (se, st) = infer_signs(relation, &labels, MagnitudeOrder::from_g(ge, gt))?;
        let text: Vec<&str> = labels.iter().map(|l| l.symbol()).collect();
        println!(
            "{ge:+7.2} {gt:+7.2} {:>10} {:>12} {:>5}{:+}{:+}",
            format!("{relation:?}"),
            text.join(","),
            "",
            se,
            st
        );
    }
    Ok(())
}
