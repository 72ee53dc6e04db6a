//! Seeded Monte Carlo of the full protocol.
//!
//! ```bash
//! cargo run --release --example monte_carlo -- 1000000 42 random
//! ```

use qutrit_codec::mc::{run_trials, TargetPolicy, TrialConfig};

fn main() -> qutrit_codec::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials = args
        .next()
        .map_or(100_000, |s| s.parse().expect("trial count"));
    let seed = args.next().map_or(0, |s| s.parse().expect("seed"));
    let policy: TargetPolicy = args.next().as_deref().unwrap_or("alternate").parse()?;

    let stats = run_trials(&TrialConfig::new(trials, seed, policy)?)?;
    println!("outcomes        {:?}", stats.outcome_counts);
    println!(
        "success rate    {:.6} +/- {:.6} (expected 2/3)",
        stats.mean_success_rate, stats.standard_error
    );
    println!("min fidelity    {:.15}", stats.min_success_fidelity);
    Ok(())
}
