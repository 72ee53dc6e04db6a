//! Report documents behind the `qutrit-codec` command line.
//!
//! Every command produces a [`ReportDocument`]. Verification-style commands
//! (`verify`, `mc`) fill `rows` and `overall_pass`; trace commands (`demo`,
//! `encode`, `decode`) fill `trace`. JSON is the normative rendering; CSV and
//! Markdown are views of the same model.
//!
//! Numbers are rounded to 12 significant digits when they enter a document, so
//! every rendering shows the same digits and a JSON document parses back into
//! an identical value.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::bayes::{gain_report_at, largest_shift, GainReport};
use crate::error::{domain, Result};
use crate::mc::{run_trials, TargetPolicy, TrialConfig, TrialStats, TrialStream};
use crate::protocol::{
    decode, decode_projectors, encode, encode_branch, joint_state, EncodeRecord, Outcome,
    QubitPair, Target,
};
use crate::quadrature::{Quadrature, DEFAULT_NODES};
use crate::state::{fidelity, make_qubit_state, PureState};

pub const SCHEMA_VERSION: &str = "1";

/// Reference values the verification table compares against.
pub mod reference {
    pub const AVERAGE_SUCCESS: f64 = 2.0 / 3.0;
    pub const ENCODING_GAIN: f64 = 0.0735;
    pub const MARGINAL_ENCODING_GAIN: f64 = 0.027;
    pub const DECODED_QUBIT_GAIN: f64 = -0.027;
    pub const OTHER_QUBIT_GAIN: f64 = 0.252;
    pub const TOTAL_OTHER_QUBIT_GAIN: f64 = 0.279;
    pub const FAILURE_GAIN: f64 = 0.252;

    pub const REFERENCE_TOL: f64 = 5e-4;
    pub const TOTAL_TOL: f64 = 1e-3;
    pub const IDENTITY_TOL: f64 = 1e-9;
    pub const COMPLETENESS_TOL: f64 = 1e-12;
    pub const NODE_DOUBLING_TOL: f64 = 1e-9;
    pub const FIDELITY_TOL: f64 = 1e-12;
    pub const SUCCESS_SIGMAS: f64 = 3.0;
    pub const HISTOGRAM_SIGMAS: f64 = 3.5;
}

/// Rounds to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowSource {
    /// Tabulated reference value, limited by its printed precision.
    #[serde(rename = "paper")]
    Reference,
    /// Exact mathematical identity.
    Identity,
    /// Statistical comparison of a Monte Carlo estimate.
    Mc,
}

impl RowSource {
    fn as_str(self) -> &'static str {
        match self {
            RowSource::Reference => "paper",
            RowSource::Identity => "identity",
            RowSource::Mc => "mc",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyRow {
    pub name: String,
    pub computed: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub source: RowSource,
    pub pass: bool,
}

impl VerifyRow {
    /// `pass` is decided on the rounded values that the row stores.
    pub fn new(
        name: impl Into<String>,
        computed: f64,
        reference: f64,
        tolerance: f64,
        source: RowSource,
    ) -> Self {
        let (computed, reference, tolerance) =
            (sig12(computed), sig12(reference), sig12(tolerance));
        Self {
            name: name.into(),
            computed,
            reference,
            tolerance,
            source,
            pass: (computed - reference).abs() <= tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub command: String,
    pub params: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<VerifyRow>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overall_pass: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Value>,
    /// Raw Monte Carlo statistics (`mc` only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<Value>,
}

impl ReportDocument {
    fn with_rows(command: &str, params: Value, rows: Vec<VerifyRow>) -> Self {
        let overall_pass = rows.iter().all(|r| r.pass);
        Self {
            schema_version: SCHEMA_VERSION.into(),
            command: command.into(),
            params,
            rows: Some(rows),
            overall_pass: Some(overall_pass),
            trace: None,
            stats: None,
        }
    }

    fn with_trace(command: &str, params: Value, trace: Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            command: command.into(),
            params,
            rows: None,
            overall_pass: None,
            trace: Some(trace),
            stats: None,
        }
    }

    /// 0 when every row passes (or for traces), 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self.overall_pass {
            Some(false) => 1,
            _ => 0,
        }
    }

    pub fn failing_rows(&self) -> impl Iterator<Item = &VerifyRow> {
        self.rows.iter().flatten().filter(|r| !r.pass)
    }

    pub fn row(&self, name: &str) -> Option<&VerifyRow> {
        self.rows.iter().flatten().find(|r| r.name == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Md,
}

impl std::str::FromStr for Format {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "md" => Ok(Format::Md),
            other => Err(domain(format!("unknown format `{other}`"))),
        }
    }
}

pub fn render(doc: &ReportDocument, format: Format) -> String {
    match format {
        Format::Json => {
            let mut out = serde_json::to_string_pretty(doc).expect("documents serialize");
            out.push('\n');
            out
        }
        Format::Csv => render_csv(doc),
        Format::Md => render_md(doc),
    }
}

/// Plain decimal, or exponent form for very small or large magnitudes.
fn num(x: f64) -> String {
    let a = x.abs();
    if x != 0.0 && !(1e-4..1e12).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

const CSV_HEADER: &str = "name,computed,reference,tolerance,source,pass";

fn render_csv(doc: &ReportDocument) -> String {
    let mut out = String::new();
    if let Some(rows) = &doc.rows {
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.name,
                num(r.computed),
                num(r.reference),
                num(r.tolerance),
                r.source.as_str(),
                r.pass
            );
        }
    } else {
        out.push_str("key,value\n");
        for (key, value) in flatten(doc.trace.as_ref().unwrap_or(&Value::Null)) {
            let _ = writeln!(out, "{key},{value}");
        }
    }
    out
}

fn render_md(doc: &ReportDocument) -> String {
    let mut out = format!("# qutrit-codec {}\n\n", doc.command);
    if let Some(rows) = &doc.rows {
        out.push_str("| name | computed | reference | tolerance | source | pass |\n");
        out.push_str("|---|---|---|---|---|---|\n");
        for r in rows {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} |",
                r.name,
                num(r.computed),
                num(r.reference),
                num(r.tolerance),
                r.source.as_str(),
                if r.pass { "PASS" } else { "FAIL" }
            );
        }
        let verdict = if doc.overall_pass == Some(true) {
            "PASS"
        } else {
            "FAIL"
        };
        let _ = write!(out, "\noverall: {verdict}\n");
    } else {
        out.push_str("| key | value |\n|---|---|\n");
        for (key, value) in flatten(doc.trace.as_ref().unwrap_or(&Value::Null)) {
            let _ = writeln!(out, "| {key} | {value} |");
        }
    }
    out
}

/// Dotted-path leaves of a JSON value, in document order.
fn flatten(value: &Value) -> Vec<(String, String)> {
    fn walk(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
        let join = |key: &str| {
            if prefix.is_empty() {
                key.to_string()
            } else {
                format!("{prefix}.{key}")
            }
        };
        match value {
            Value::Object(map) => map.iter().for_each(|(k, v)| walk(&join(k), v, out)),
            Value::Array(items) => items
                .iter()
                .enumerate()
                .for_each(|(i, v)| walk(&join(&i.to_string()), v, out)),
            leaf => out.push((prefix.to_string(), leaf.to_string())),
        }
    }
    let mut out = Vec::new();
    walk("", value, &mut out);
    out
}

fn amplitudes_json(state: &PureState) -> Value {
    Value::Array(
        state
            .amplitudes()
            .iter()
            .map(|a| json!([sig12(a.re), sig12(a.im)]))
            .collect(),
    )
}

fn rounded(values: impl IntoIterator<Item = f64>) -> Value {
    values.into_iter().map(sig12).collect()
}

fn pair_json(pair: &QubitPair) -> Value {
    json!({
        "q1": { "theta": sig12(pair.q1.theta()), "phi": sig12(pair.q1.phi()) },
        "q2": { "theta": sig12(pair.q2.theta()), "phi": sig12(pair.q2.phi()) },
    })
}

fn projectors_json(outcome: Outcome, target: Target) -> Value {
    let (q_s, q_f) = decode_projectors(outcome, target);
    json!({ "success": q_s.indices(), "failure": q_f.indices() })
}

/// Angles shared by the trace commands.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceParams {
    pub theta1: f64,
    pub phi1: f64,
    pub theta2: f64,
    pub phi2: f64,
    pub seed: u64,
    /// Forces the encoding branch instead of sampling it.
    pub outcome: Option<usize>,
    pub target: u8,
}

impl TraceParams {
    fn pair(&self) -> Result<QubitPair> {
        QubitPair::from_angles(self.theta1, self.phi1, self.theta2, self.phi2)
    }

    fn echo(&self) -> Value {
        json!({
            "theta1": self.theta1,
            "phi1": self.phi1,
            "theta2": self.theta2,
            "phi2": self.phi2,
            "seed": self.seed,
            "outcome": self.outcome,
            "target": self.target,
        })
    }
}

struct EncodeStep {
    record: EncodeRecord,
    forced: bool,
    u: Option<f64>,
}

fn run_encode(
    pair: &QubitPair,
    params: &TraceParams,
    stream: &mut TrialStream,
) -> Result<EncodeStep> {
    let u = stream.next_unit();
    match params.outcome {
        Some(j) => {
            let outcome = Outcome::new(j)?;
            let branch = encode_branch(pair, outcome);
            let qutrit = branch.qutrit.ok_or_else(|| {
                domain(format!("outcome {j} has zero probability for these angles"))
            })?;
            Ok(EncodeStep {
                record: EncodeRecord {
                    outcome,
                    probability: branch.probability,
                    qutrit,
                },
                forced: true,
                u: None,
            })
        }
        None => Ok(EncodeStep {
            record: encode(pair, u)?,
            forced: false,
            u: Some(u),
        }),
    }
}

fn encoding_json(pair: &QubitPair, step: &EncodeStep) -> Value {
    let bits = step.record.outcome.classical_bits();
    json!({
        "outcome_probabilities": rounded(Outcome::all().map(|o| encode_branch(pair, o).probability)),
        "forced": step.forced,
        "u": step.u.map(sig12),
        "outcome": step.record.outcome.index(),
        "classical_bits": [u8::from(bits[0]), u8::from(bits[1])],
        "probability": sig12(step.record.probability),
        "qutrit": amplitudes_json(&step.record.qutrit),
    })
}

fn decode_json(pair: &QubitPair, record: &EncodeRecord, target: Target, u: f64) -> Result<Value> {
    let result = decode(&record.qutrit, record.outcome, target, u)?;
    let fid = result
        .reconstructed
        .as_ref()
        .map(|s| fidelity(s, &make_qubit_state(pair.qubit(target))))
        .transpose()?;
    Ok(json!({
        "target": target.label(),
        "u": sig12(u),
        "success": result.success,
        "probability": sig12(result.probability),
        "reconstructed": result.reconstructed.as_ref().map(amplitudes_json),
        "original": amplitudes_json(&make_qubit_state(pair.qubit(target))),
        "failure_level": result.failure_level,
        "fidelity": fid.map(sig12),
    }))
}

/// A narrated single run: preparation, encoding, both decoders' projectors and
/// one decode.
pub fn cmd_demo(params: &TraceParams) -> Result<ReportDocument> {
    let pair = params.pair()?;
    let target = Target::from_label(params.target)?;
    let mut stream = TrialStream::new(params.seed, 0);
    let step = run_encode(&pair, params, &mut stream)?;
    let u_decode = stream.next_unit();
    let outcome = step.record.outcome;
    let trace = json!({
        "input": pair_json(&pair),
        "joint_state": amplitudes_json(&joint_state(&pair)),
        "encoding": encoding_json(&pair, &step),
        "decode_projectors": {
            "target_1": projectors_json(outcome, Target::First),
            "target_2": projectors_json(outcome, Target::Second),
        },
        "decode": decode_json(&pair, &step.record, target, u_decode)?,
    });
    Ok(ReportDocument::with_trace("demo", params.echo(), trace))
}

pub fn cmd_encode(params: &TraceParams) -> Result<ReportDocument> {
    let pair = params.pair()?;
    let mut stream = TrialStream::new(params.seed, 0);
    let step = run_encode(&pair, params, &mut stream)?;
    let trace = json!({
        "input": pair_json(&pair),
        "joint_state": amplitudes_json(&joint_state(&pair)),
        "encoding": encoding_json(&pair, &step),
    });
    Ok(ReportDocument::with_trace("encode", params.echo(), trace))
}

pub fn cmd_decode(params: &TraceParams) -> Result<ReportDocument> {
    let pair = params.pair()?;
    let target = Target::from_label(params.target)?;
    let mut stream = TrialStream::new(params.seed, 0);
    let step = run_encode(&pair, params, &mut stream)?;
    let u_decode = stream.next_unit();
    let trace = json!({
        "input": pair_json(&pair),
        "encoding": encoding_json(&pair, &step),
        "decode_projectors": projectors_json(step.record.outcome, target),
        "decode": decode_json(&pair, &step.record, target, u_decode)?,
    });
    Ok(ReportDocument::with_trace("decode", params.echo(), trace))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyParams {
    pub nodes: usize,
    pub trials: u64,
    pub seed: u64,
}

impl Default for VerifyParams {
    fn default() -> Self {
        Self {
            nodes: DEFAULT_NODES,
            trials: 1_000_000,
            seed: 0,
        }
    }
}

/// Rows comparing the quadrature report with the reference values and the
/// exact identities between gains.
pub fn gain_rows(report: &GainReport) -> Vec<VerifyRow> {
    use reference::*;
    use RowSource::{Identity, Reference};

    let mut rows = Vec::new();
    for outcome in Outcome::all() {
        for target in Target::BOTH {
            rows.push(VerifyRow::new(
                format!("q_success_j{}_a{}", outcome.index(), target.label()),
                report.avg_success_for(outcome, target),
                AVERAGE_SUCCESS,
                IDENTITY_TOL,
                Reference,
            ));
        }
    }
    rows.push(VerifyRow::new(
        "i_e",
        report.i_e,
        ENCODING_GAIN,
        REFERENCE_TOL,
        Reference,
    ));
    for a in 0..2 {
        rows.push(VerifyRow::new(
            format!("i_e_{}", a + 1),
            report.i_e_marginal[a],
            MARGINAL_ENCODING_GAIN,
            REFERENCE_TOL,
            Reference,
        ));
    }
    rows.push(VerifyRow::new(
        "i_e_1_vs_i_e_2",
        report.i_e_marginal[0],
        report.i_e_marginal[1],
        IDENTITY_TOL,
        Identity,
    ));
    rows.push(VerifyRow::new(
        "i_d_1",
        report.i_d[0],
        DECODED_QUBIT_GAIN,
        REFERENCE_TOL,
        Reference,
    ));
    rows.push(VerifyRow::new(
        "i_d_2",
        report.i_d[1],
        OTHER_QUBIT_GAIN,
        REFERENCE_TOL,
        Reference,
    ));
    rows.push(VerifyRow::new(
        "i_e_2_plus_i_d_2",
        report.total_success[1],
        TOTAL_OTHER_QUBIT_GAIN,
        TOTAL_TOL,
        Reference,
    ));
    for a in 0..2 {
        rows.push(VerifyRow::new(
            format!("i_f_{}", a + 1),
            report.i_f[a],
            FAILURE_GAIN,
            REFERENCE_TOL,
            Reference,
        ));
    }
    rows.push(VerifyRow::new(
        "i_e_1_plus_i_d_1_vanishes",
        report.total_success[0],
        0.0,
        IDENTITY_TOL,
        Identity,
    ));
    rows.push(VerifyRow::new(
        "i_e_2_plus_i_d_2_equals_direct",
        report.total_success[1],
        report.i_direct,
        IDENTITY_TOL,
        Identity,
    ));
    for a in 0..2 {
        rows.push(VerifyRow::new(
            format!("i_e_{0}_plus_i_f_{0}_equals_direct", a + 1),
            report.total_failure[a],
            report.i_direct,
            IDENTITY_TOL,
            Identity,
        ));
    }
    rows.push(VerifyRow::new(
        "sum_p_outcome",
        report.outcome_prior.iter().sum::<f64>(),
        1.0,
        COMPLETENESS_TOL,
        Identity,
    ));
    rows
}

/// Monte Carlo rows: success rate (3σ), per-outcome frequency (3.5σ) and the
/// worst fidelity of a successful decode.
pub fn mc_rows(
    stats: &TrialStats,
    expected_success: f64,
    outcome_prior: &[f64; 4],
) -> Vec<VerifyRow> {
    use reference::*;
    let mut rows = vec![VerifyRow::new(
        "mc_success_rate",
        stats.mean_success_rate,
        expected_success,
        SUCCESS_SIGMAS * stats.standard_error.max(f64::MIN_POSITIVE),
        RowSource::Mc,
    )];
    for (j, &p) in outcome_prior.iter().enumerate() {
        rows.push(VerifyRow::new(
            format!("mc_outcome_{j}_frequency"),
            stats.outcome_frequency(j),
            p,
            HISTOGRAM_SIGMAS * stats.outcome_standard_error(p),
            RowSource::Mc,
        ));
    }
    rows.push(VerifyRow::new(
        "mc_min_success_fidelity",
        stats.min_success_fidelity,
        1.0,
        FIDELITY_TOL,
        RowSource::Mc,
    ));
    rows
}

/// Success probability a policy should show, averaged over outcomes.
fn expected_success(report: &GainReport, policy: TargetPolicy) -> f64 {
    let per_target = |target| {
        Outcome::all()
            .map(|o| report.outcome_prior[o.index()] * report.avg_success_for(o, target))
            .sum::<f64>()
    };
    match policy {
        TargetPolicy::Always1 => per_target(Target::First),
        TargetPolicy::Always2 => per_target(Target::Second),
        TargetPolicy::Alternate | TargetPolicy::Random => {
            0.5 * (per_target(Target::First) + per_target(Target::Second))
        }
    }
}

/// Recomputes every reference constant and identity; see [`ReportDocument::exit_code`].
pub fn cmd_verify(params: &VerifyParams) -> Result<ReportDocument> {
    let quad = Quadrature::new(params.nodes)?;
    let config = TrialConfig::new(params.trials, params.seed, TargetPolicy::Alternate)?;

    let report = gain_report_at(&quad)?;
    let refined = gain_report_at(&quad.doubled())?;
    let (_, shift) = largest_shift(&report, &refined);

    let mut rows = gain_rows(&report);
    rows.push(VerifyRow::new(
        "node_doubling_max_shift",
        shift,
        0.0,
        reference::NODE_DOUBLING_TOL,
        RowSource::Identity,
    ));
    let stats = run_trials(&config)?;
    rows.extend(mc_rows(
        &stats,
        expected_success(&report, config.target_policy),
        &report.outcome_prior,
    ));

    let echo = json!({
        "nodes": params.nodes,
        "trials": params.trials,
        "seed": params.seed,
        "target_policy": config.target_policy,
    });
    Ok(ReportDocument::with_rows("verify", echo, rows))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McParams {
    pub trials: u64,
    pub seed: u64,
    pub policy: TargetPolicy,
}

pub fn cmd_mc(params: &McParams) -> Result<ReportDocument> {
    let config = TrialConfig::new(params.trials, params.seed, params.policy)?;
    let report = gain_report_at(&Quadrature::default())?;
    let stats = run_trials(&config)?;
    let rows = mc_rows(
        &stats,
        expected_success(&report, params.policy),
        &report.outcome_prior,
    );
    let echo = json!({
        "trials": params.trials,
        "seed": params.seed,
        "target_policy": params.policy,
    });
    let mut doc = ReportDocument::with_rows("mc", echo, rows);
    doc.stats = Some(stats_json(&stats));
    Ok(doc)
}

fn stats_json(stats: &TrialStats) -> Value {
    let mut map = Map::new();
    map.insert("trials".into(), json!(stats.trials));
    map.insert("outcome_counts".into(), json!(stats.outcome_counts));
    map.insert("success_count".into(), json!(stats.success_count));
    map.insert("failure_count".into(), json!(stats.failure_count));
    map.insert(
        "min_success_fidelity".into(),
        json!(sig12(stats.min_success_fidelity)),
    );
    map.insert(
        "mean_success_rate".into(),
        json!(sig12(stats.mean_success_rate)),
    );
    map.insert("standard_error".into(), json!(sig12(stats.standard_error)));
    Value::Object(map)
}
