//! The encoder written out in the full 12-dimensional space: tensor with the
//! ancilla, project with P_j, relabel with U, then read off the qutrit. The
//! result matches the closed form.
//!
//! ```bash
//! cargo run --example twelve_dim_pipeline
//! ```

use qutrit_codec::protocol::{
    ancilla, encode_branch, encoder_input, encoding_projector, extract_qutrit, joint_state,
    relabel_unitary, Outcome, QubitPair,
};
use qutrit_codec::state::{phase_aligned_distance, project, tensor_product};

fn main() -> qutrit_codec::Result<()> {
    let pair = QubitPair::from_angles(1.2, 0.3, 0.8, 2.9)?;
    let input = tensor_product(&ancilla(), &joint_state(&pair));
    assert_eq!(input, encoder_input(&pair));

    let u = relabel_unitary();
    println!("relabeling map |i>|k> -> |i>|k-i mod 4>: {:?}", u.map());

    for outcome in Outcome::all() {
        let proj = encoding_projector(outcome);
        let projection = project(&input, &proj)?;
        let Some(collapsed) = projection.collapsed else {
            println!("j={}: branch cannot occur", outcome.index());
            continue;
        };
        let qutrit = extract_qutrit(&collapsed, outcome)?;
        let closed = encode_branch(&pair, outcome).qutrit.expect("same branch");
        println!(
            "j={} P_j indices {:?}: p = {:.6}, qutrit {:?}, |closed form - pipeline| = {:.1e}",
            outcome.index(),
            proj.indices(),
            projection.probability,
            qutrit,
            phase_aligned_distance(&closed, &qutrit)?
        );
    }
    Ok(())
}
