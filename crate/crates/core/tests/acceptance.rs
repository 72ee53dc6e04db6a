//! Exit criteria for the crate. Runs as a plain binary under `cargo test` and
//! prints one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use qutrit_codec::bayes::{gain_report, gain_report_at, largest_shift, GainReport};
use qutrit_codec::mc::{run_trials, sample_bloch, TargetPolicy, TrialConfig, TrialStream};
use qutrit_codec::protocol::{
    decode_branch, encode_branch, pipeline_branch, Outcome, QubitPair, Target,
};
use qutrit_codec::quadrature::Quadrature;
use qutrit_codec::report::{cmd_verify, VerifyParams};
use qutrit_codec::state::{fidelity, make_qubit_state, phase_aligned_distance};

struct Check {
    ok: bool,
    detail: String,
}

fn within(label: &str, value: f64, reference: f64, tol: f64) -> Check {
    let ok = (value - reference).abs() <= tol;
    Check {
        ok,
        detail: if value.abs() < 1e-6 {
            format!("{label} = {value:.3e} (ref {reference}, tol {tol:e})")
        } else {
            format!("{label} = {value:.12} (ref {reference}, tol {tol:e})")
        },
    }
}

fn all(checks: Vec<Check>) -> Check {
    Check {
        ok: checks.iter().all(|c| c.ok),
        detail: checks
            .iter()
            .map(|c| c.detail.as_str())
            .collect::<Vec<_>>()
            .join("; "),
    }
}

fn criterion_1(r: &GainReport) -> Check {
    let mut checks = vec![within(
        "q_S(j=0,a=1)",
        r.avg_success_for(Outcome::new(0).unwrap(), Target::First),
        2.0 / 3.0,
        1e-9,
    )];
    let worst = r
        .avg_success
        .iter()
        .map(|q| (q - 2.0 / 3.0).abs())
        .fold(0.0, f64::max);
    checks.push(within(
        "max |q_S(j,a) - 2/3| over 8 pairs",
        worst,
        0.0,
        1e-9,
    ));
    all(checks)
}

fn criterion_2(r: &GainReport) -> Check {
    within("I_E", r.i_e, 0.0735, 5e-4)
}

fn criterion_3(r: &GainReport) -> Check {
    all(vec![
        within("I_E_1", r.i_e_marginal[0], 0.027, 5e-4),
        within("I_E_2", r.i_e_marginal[1], 0.027, 5e-4),
        within(
            "I_E_1 - I_E_2",
            r.i_e_marginal[0] - r.i_e_marginal[1],
            0.0,
            1e-9,
        ),
    ])
}

fn criterion_4(r: &GainReport) -> Check {
    all(vec![
        within("I_D_1", r.i_d[0], -0.027, 5e-4),
        within("I_E_1 + I_D_1", r.total_success[0], 0.0, 1e-9),
        within("I_D_2", r.i_d[1], 0.252, 5e-4),
        within("I_E_2 + I_D_2", r.total_success[1], 0.279, 1e-3),
    ])
}

fn criterion_5(r: &GainReport) -> Check {
    all(vec![
        within("I_F_1", r.i_f[0], 0.252, 5e-4),
        within("I_F_2", r.i_f[1], 0.252, 5e-4),
        within(
            "I_E_1 + I_F_1 - I_direct",
            r.total_failure[0] - r.i_direct,
            0.0,
            1e-9,
        ),
        within(
            "I_E_2 + I_F_2 - I_direct",
            r.total_failure[1] - r.i_direct,
            0.0,
            1e-9,
        ),
    ])
}

fn criterion_6(r: &GainReport) -> Check {
    within(
        "I_E_2 + I_D_2 - I_direct",
        r.total_success[1] - r.i_direct,
        0.0,
        1e-9,
    )
}

fn criterion_7(r: &GainReport) -> Check {
    let excess = r.i_e - (r.i_e_marginal[0] + r.i_e_marginal[1]);
    Check {
        ok: excess >= 0.015,
        detail: format!("I_E - (I_E_1 + I_E_2) = {excess:.12} (need >= 0.015)"),
    }
}

fn criterion_8() -> Check {
    let mut accepted = 0;
    let mut attempt = 0u64;
    let mut worst_fidelity: f64 = 1.0;
    let mut worst_pipeline: f64 = 0.0;
    while accepted < 1000 {
        let mut s = TrialStream::new(2024, attempt);
        attempt += 1;
        let pair = QubitPair::new(
            sample_bloch(s.next_unit(), s.next_unit()),
            sample_bloch(s.next_unit(), s.next_unit()),
        );
        let outcome = Outcome::new((s.next_unit() * 4.0) as usize).unwrap();
        let target = if s.next_unit() < 0.5 {
            Target::First
        } else {
            Target::Second
        };

        let closed = encode_branch(&pair, outcome);
        if closed.probability <= 1e-6 {
            continue;
        }
        let qutrit = closed.qutrit.expect("non-degenerate branch");
        let decoded = decode_branch(&qutrit, outcome, target).unwrap();
        if decoded.p_success <= 1e-6 {
            continue;
        }
        accepted += 1;
        let original = make_qubit_state(pair.qubit(target));
        let f = fidelity(decoded.reconstructed.as_ref().unwrap(), &original).unwrap();
        worst_fidelity = worst_fidelity.min(f);

        let long = pipeline_branch(&pair, outcome).unwrap();
        let d = phase_aligned_distance(&qutrit, long.qutrit.as_ref().unwrap()).unwrap();
        worst_pipeline = worst_pipeline
            .max(d)
            .max((closed.probability - long.probability).abs());
    }
    Check {
        ok: worst_fidelity >= 1.0 - 1e-12 && worst_pipeline <= 1e-12,
        detail: format!(
            "1000 instances ({attempt} drawn): min fidelity {worst_fidelity:.15}, \
             max pipeline deviation {worst_pipeline:e}"
        ),
    }
}

fn criterion_9() -> Check {
    let config = TrialConfig::new(1_000_000, 20240601, TargetPolicy::Alternate).unwrap();
    let stats = run_trials(&config).unwrap();
    let rerun = run_trials(&config).unwrap();
    let mut checks: Vec<Check> = (0..4)
        .map(|j| {
            within(
                &format!("freq(j={j})"),
                stats.outcome_frequency(j),
                0.25,
                0.0015,
            )
        })
        .collect();
    checks.push(within(
        "success rate",
        stats.mean_success_rate,
        2.0 / 3.0,
        0.0017,
    ));
    checks.push(Check {
        ok: stats.min_success_fidelity >= 1.0 - 1e-12,
        detail: format!("min success fidelity {:.15}", stats.min_success_fidelity),
    });
    checks.push(Check {
        ok: stats == rerun,
        detail: format!("rerun bit-identical: {}", stats == rerun),
    });
    all(checks)
}

fn criterion_10(coarse: &GainReport) -> Check {
    let fine = gain_report_at(&Quadrature::new(512).unwrap()).unwrap();
    let (name, shift) = largest_shift(coarse, &fine);
    all(vec![
        Check {
            ok: shift < 1e-9,
            detail: format!("largest 256->512 shift {shift:e} ({name}), need < 1e-9"),
        },
        within("sum_j p(j)", coarse.outcome_prior.iter().sum(), 1.0, 1e-12),
    ])
}

fn verify_runtime() -> Check {
    let start = Instant::now();
    let doc = cmd_verify(&VerifyParams::default()).unwrap();
    let elapsed = start.elapsed();
    let failing: Vec<&str> = doc.failing_rows().map(|r| r.name.as_str()).collect();
    Check {
        ok: doc.overall_pass == Some(true) && elapsed < Duration::from_secs(60),
        detail: format!("default verify took {elapsed:.1?}, failing rows {failing:?}"),
    }
}

fn main() -> ExitCode {
    let report = match gain_report(&Quadrature::default()) {
        Ok(r) => r,
        Err(e) => {
            println!("FAIL  gain report: {e}");
            return ExitCode::FAILURE;
        }
    };
    type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);
    let criteria: Vec<Criterion<'_>> = vec![
        (
            "1  average success probability",
            Box::new(|| criterion_1(&report)),
        ),
        ("2  encoding gain", Box::new(|| criterion_2(&report))),
        (
            "3  marginal encoding gains",
            Box::new(|| criterion_3(&report)),
        ),
        ("4  decode gains", Box::new(|| criterion_4(&report))),
        ("5  failure gains", Box::new(|| criterion_5(&report))),
        (
            "6  direct-measurement identity",
            Box::new(|| criterion_6(&report)),
        ),
        ("7  superadditivity", Box::new(|| criterion_7(&report))),
        ("8  round-trip fidelity and pipeline", Box::new(criterion_8)),
        ("9  Monte Carlo", Box::new(criterion_9)),
        (
            "10 quadrature robustness",
            Box::new(|| criterion_10(&report)),
        ),
        ("-- verify command end to end", Box::new(verify_runtime)),
    ];

    let mut failures = 0;
    for (name, run) in &criteria {
        let check = run();
        if !check.ok {
            failures += 1;
        }
        println!(
            "{}  {name}: {}",
            if check.ok { "PASS" } else { "FAIL" },
            check.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
