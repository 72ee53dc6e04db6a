//! Information (in bits) gained about the polar angles at each stage:
//! after encoding, after successful decoding and after failed decoding.
//!
//! ```bash
//! cargo run --release --example information_gain [nodes]
//! ```

use qutrit_codec::bayes::gain_report;
use qutrit_codec::quadrature::{Quadrature, DEFAULT_NODES};

fn main() -> qutrit_codec::Result<()> {
    let nodes = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("node count"))
        .unwrap_or(DEFAULT_NODES);
    let report = gain_report(&Quadrature::new(nodes)?)?;

    println!("p(j)                 {:?}", report.outcome_prior);
    println!("average success      {:.12}", report.avg_success[0]);
    println!("I_E   (pair)         {:+.6}", report.i_e);
    for a in 0..2 {
        println!(
            "qubit {}: I_E {:+.6}  I_D {:+.6}  I_F {:+.6}  I_E+I_D {:+.6}  I_E+I_F {:+.6}",
            a + 1,
            report.i_e_marginal[a],
            report.i_d[a],
            report.i_f[a],
            report.total_success[a],
            report.total_failure[a]
        );
    }
    println!("direct measurement   {:+.6}", report.i_direct);
    println!(
        "superadditivity      I_E - (I_E1 + I_E2) = {:+.6}",
        report.i_e - report.i_e_marginal.iter().sum::<f64>()
    );
    Ok(())
}
