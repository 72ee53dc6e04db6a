//! Encode one pair of qubits into a qutrit and decode the first one.
//!
//! ```bash
//! cargo run --example encode_decode
//! ```

use std::f64::consts::PI;

use qutrit_codec::mc::TrialStream;
use qutrit_codec::protocol::{
    decode, encode, encode_branch, joint_state, Outcome, QubitPair, Target,
};
use qutrit_codec::state::{fidelity, make_qubit_state};

fn main() -> qutrit_codec::Result<()> {
    let pair = QubitPair::from_angles(PI / 3.0, 0.4, 2.0 * PI / 3.0, 1.7)?;
    println!("joint state |Psi> = {:?}", joint_state(&pair));

    for outcome in Outcome::all() {
        let branch = encode_branch(&pair, outcome);
        println!("  p(j={}) = {:.6}", outcome.index(), branch.probability);
    }

    let mut rng = TrialStream::new(7, 0);
    let record = encode(&pair, rng.next_unit())?;
    println!(
        "measured j = {} (bits {:?}), qutrit = {:?}",
        record.outcome.index(),
        record.outcome.classical_bits(),
        record.qutrit
    );

    let result = decode(
        &record.qutrit,
        record.outcome,
        Target::First,
        rng.next_unit(),
    )?;
    match result.reconstructed {
        Some(state) => {
            let f = fidelity(&state, &make_qubit_state(pair.q1))?;
            println!(
                "decoded qubit 1 with probability {:.6}: fidelity {f:.15}",
                result.probability
            );
        }
        None => println!(
            "decoding failed (probability {:.6}); qutrit collapsed to level {}",
            result.probability,
            result.failure_level.unwrap()
        ),
    }
    Ok(())
}
