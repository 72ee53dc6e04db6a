//! The qubit to recover is chosen after encoding. The same stored record
//! (qutrit plus two classical bits) serves either choice.
//!
//! ```bash
//! cargo run --example deferred_choice
//! ```

use qutrit_codec::protocol::{
    conditional_success_probability, decode_branch, decode_projectors, encode, QubitPair, Target,
};
use qutrit_codec::state::{fidelity, make_qubit_state};

fn main() -> qutrit_codec::Result<()> {
    let pair = QubitPair::from_angles(2.1, 0.0, 1.0, 4.0)?;
    let record = encode(&pair, 0.61)?;
    println!(
        "stored: j = {}, qutrit {:?}",
        record.outcome.index(),
        record.qutrit
    );

    for target in Target::BOTH {
        let (q_s, q_f) = decode_projectors(record.outcome, target);
        let branch = decode_branch(&record.qutrit, record.outcome, target)?;
        let closed = conditional_success_probability(&pair, record.outcome, target)?;
        print!(
            "qubit {}: Q_S = {:?}, Q_F = {:?}, p_success = {:.6} (closed form {:.6})",
            target.label(),
            q_s.indices(),
            q_f.indices(),
            branch.p_success,
            closed
        );
        if let Some(state) = branch.reconstructed {
            let f = fidelity(&state, &make_qubit_state(pair.qubit(target)))?;
            print!(", fidelity on success {f:.15}");
        }
        println!();
    }
    Ok(())
}
