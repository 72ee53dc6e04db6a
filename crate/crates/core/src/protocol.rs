//! Encoding two product-state qubits into a qutrit and decoding either one.
//!
//! Basis convention for the two-qubit register: index `k = b1 + 2*b2`, so
//! `|0⟩ = |0⟩₁|0⟩₂`, `|1⟩ = |1⟩₁|0⟩₂`, `|2⟩ = |0⟩₁|1⟩₂`, `|3⟩ = |1⟩₁|1⟩₂`.
//! The 12-dimensional space is `qutrit ⊗ register` with the qutrit as the slow
//! index, i.e. combined index `4*level + k`.
//!
//! Encoding measures `{P_j}`, `P_j = Σ_i |i⟩⟨i| ⊗ |(i+j+1) mod 4⟩⟨(i+j+1) mod 4|`,
//! on `ancilla ⊗ |Ψ⟩`. Outcome `j` removes the `c_j` term; after the relabeling
//! `|i⟩|k⟩ → |i⟩|k−i mod 4⟩` the register is left in `|(j+1) mod 4⟩` and qutrit
//! level `i` carries `c_{(i+j+1) mod 4}`. The two classical bits for `j` must be
//! kept alongside the qutrit.
//!
//! Decoding qubit `a` splits the register indices into the two blocks that
//! agree on every bit except `b_a`. Outcome `j` destroyed one member of one
//! block; the levels carrying the other block form `Q_S` and hold the target
//! qubit (times a fixed amplitude of the other qubit), while the leftover level
//! forms `Q_F`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::state::{
    apply_permutation, make_qubit_state, project, sample_complete_measurement, tensor_product,
    DiagonalProjector, PermutationUnitary, PureState, COLLAPSE_THRESHOLD,
};

/// Number of encoding outcomes.
pub const OUTCOMES: usize = 4;
/// Qutrit dimension.
pub const QUTRIT_DIM: usize = 3;
/// Two-qubit register dimension.
pub const REGISTER_DIM: usize = 4;
/// Dimension of `qutrit ⊗ register`.
pub const JOINT_DIM: usize = QUTRIT_DIM * REGISTER_DIM;

/// Polar and azimuthal angle of a qubit on the Bloch sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochAngles {
    theta: f64,
    phi: f64,
}

impl BlochAngles {
    /// `theta` must lie in `[0, π]`; `phi` is reduced into `[0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(domain(format!("theta = {theta} is outside [0, pi]")));
        }
        if !phi.is_finite() {
            return Err(domain(format!("phi = {phi} is not finite")));
        }
        let phi = phi.rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU for tiny negative inputs.
        let phi = if phi >= TAU { 0.0 } else { phi };
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Qubit selector for decoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    First,
    Second,
}

impl Target {
    pub const BOTH: [Target; 2] = [Target::First, Target::Second];

    /// Accepts the 1-based qubit label.
    pub fn from_label(label: u8) -> Result<Self> {
        match label {
            1 => Ok(Target::First),
            2 => Ok(Target::Second),
            other => Err(domain(format!("target qubit must be 1 or 2, got {other}"))),
        }
    }

    pub fn label(self) -> u8 {
        match self {
            Target::First => 1,
            Target::Second => 2,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Target::First => Target::Second,
            Target::Second => Target::First,
        }
    }

    fn position(self) -> usize {
        usize::from(self.label() - 1)
    }
}

/// Index `k = b1 + 2*b2` of the two-qubit computational basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwoQubitIndex(u8);

impl TwoQubitIndex {
    pub fn new(k: usize) -> Result<Self> {
        if k >= REGISTER_DIM {
            return Err(domain(format!("two-qubit index {k} out of range 0..4")));
        }
        Ok(Self(k as u8))
    }

    pub fn from_bits(b1: u8, b2: u8) -> Self {
        Self((b1 & 1) | ((b2 & 1) << 1))
    }

    pub fn value(self) -> usize {
        usize::from(self.0)
    }

    /// The bit of qubit `target`.
    pub fn bit(self, target: Target) -> u8 {
        (self.0 >> target.position()) & 1
    }

    /// The index with the bit of `target` flipped.
    pub fn flip(self, target: Target) -> Self {
        Self(self.0 ^ (1 << target.position()))
    }
}

/// Encoding outcome `j ∈ {0, 1, 2, 3}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Outcome(u8);

impl Outcome {
    pub fn new(j: usize) -> Result<Self> {
        if j >= OUTCOMES {
            return Err(domain(format!("encoding outcome {j} out of range 0..4")));
        }
        Ok(Self(j as u8))
    }

    pub fn all() -> impl Iterator<Item = Outcome> {
        (0..OUTCOMES as u8).map(Outcome)
    }

    pub fn index(self) -> usize {
        usize::from(self.0)
    }

    /// The two classical bits that must be stored with the qutrit.
    pub fn classical_bits(self) -> [bool; 2] {
        [self.0 & 1 == 1, self.0 & 2 == 2]
    }

    /// Register index whose amplitude qutrit level `level` carries.
    pub fn carried_index(self, level: usize) -> TwoQubitIndex {
        TwoQubitIndex(((level + self.index() + 1) % REGISTER_DIM) as u8)
    }

    /// Qutrit level that carries `index`, or `None` for the removed index `j`.
    pub fn level_of(self, index: TwoQubitIndex) -> Option<usize> {
        (0..QUTRIT_DIM).find(|&level| self.carried_index(level) == index)
    }

    fn removed_index(self) -> TwoQubitIndex {
        TwoQubitIndex(self.0)
    }
}

/// Preparation of two independent qubits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitPair {
    pub q1: BlochAngles,
    pub q2: BlochAngles,
}

impl QubitPair {
    pub fn new(q1: BlochAngles, q2: BlochAngles) -> Self {
        Self { q1, q2 }
    }

    pub fn from_angles(theta1: f64, phi1: f64, theta2: f64, phi2: f64) -> Result<Self> {
        Ok(Self::new(
            BlochAngles::new(theta1, phi1)?,
            BlochAngles::new(theta2, phi2)?,
        ))
    }

    pub fn qubit(&self, target: Target) -> BlochAngles {
        match target {
            Target::First => self.q1,
            Target::Second => self.q2,
        }
    }

    /// `|c_k|²` for every register index; depends on the polar angles only.
    pub fn weights(&self) -> [f64; REGISTER_DIM] {
        register_weights(self.q1.theta(), self.q2.theta())
    }
}

/// `|c_k|²` of the product state with polar angles `theta1`, `theta2`.
pub fn register_weights(theta1: f64, theta2: f64) -> [f64; REGISTER_DIM] {
    let (s1, c1) = (theta1 / 2.0).sin_cos();
    let (s2, c2) = (theta2 / 2.0).sin_cos();
    let (up1, down1) = (c1 * c1, s1 * s1);
    let (up2, down2) = (c2 * c2, s2 * s2);
    [up1 * up2, down1 * up2, up1 * down2, down1 * down2]
}

/// The product state `|ψ₁⟩|ψ₂⟩` in the `k = b1 + 2*b2` basis.
pub fn joint_state(pair: &QubitPair) -> PureState {
    // Qubit 2 is the slow index of k.
    tensor_product(&make_qubit_state(pair.q2), &make_qubit_state(pair.q1))
}

/// The ancilla `(|0⟩ + |1⟩ + |2⟩)/√3`.
pub fn ancilla() -> PureState {
    let r = 1.0 / 3f64.sqrt();
    PureState::normalized(vec![Complex64::new(r, 0.0); QUTRIT_DIM])
        .expect("uniform qutrit is a valid state")
}

pub fn encoding_projector(outcome: Outcome) -> DiagonalProjector {
    DiagonalProjector::new(
        JOINT_DIM,
        (0..QUTRIT_DIM).map(|i| REGISTER_DIM * i + outcome.carried_index(i).value()),
    )
    .expect("encoding projector indices are distinct and in range")
}

pub fn encoding_projectors() -> Vec<DiagonalProjector> {
    Outcome::all().map(encoding_projector).collect()
}

/// `|i⟩|k⟩ → |i⟩|(k − i) mod 4⟩`.
pub fn relabel_unitary() -> PermutationUnitary {
    let map = (0..JOINT_DIM)
        .map(|idx| {
            let (i, k) = (idx / REGISTER_DIM, idx % REGISTER_DIM);
            REGISTER_DIM * i + (k + REGISTER_DIM - i % REGISTER_DIM) % REGISTER_DIM
        })
        .collect();
    PermutationUnitary::new(map).expect("relabeling is a bijection")
}

/// One encoding branch: its probability and, when the branch can occur, the
/// qutrit left behind.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodeBranch {
    pub probability: f64,
    pub qutrit: Option<PureState>,
}

/// Closed form of branch `outcome`: probability `(1 − |c_j|²)/3` and the
/// qutrit `Σ_i c_{(i+j+1) mod 4} |i⟩`, normalized.
pub fn encode_branch(pair: &QubitPair, outcome: Outcome) -> EncodeBranch {
    let psi = joint_state(pair);
    let remaining: f64 = (0..QUTRIT_DIM)
        .map(|i| psi.amplitude(outcome.carried_index(i).value()).norm_sqr())
        .sum();
    let probability = remaining / 3.0;
    if probability <= COLLAPSE_THRESHOLD {
        return EncodeBranch {
            probability,
            qutrit: None,
        };
    }
    let amplitudes = (0..QUTRIT_DIM)
        .map(|i| psi.amplitude(outcome.carried_index(i).value()))
        .collect();
    EncodeBranch {
        probability,
        qutrit: Some(PureState::normalized(amplitudes).expect("nonzero branch")),
    }
}

/// The full 12-dimensional product `ancilla ⊗ |Ψ⟩`.
pub fn encoder_input(pair: &QubitPair) -> PureState {
    tensor_product(&ancilla(), &joint_state(pair))
}

/// Applies the relabeling to a post-measurement 12-dimensional state and reads
/// the qutrit off the slice where the register holds `|(j+1) mod 4⟩`.
pub fn extract_qutrit(collapsed: &PureState, outcome: Outcome) -> Result<PureState> {
    let relabeled = apply_permutation(collapsed, &relabel_unitary())?;
    let register = (outcome.index() + 1) % REGISTER_DIM;
    let slice = (0..QUTRIT_DIM)
        .map(|i| relabeled.amplitude(REGISTER_DIM * i + register))
        .collect();
    PureState::normalized(slice)
}

/// Branch `outcome` computed the long way: tensor with the ancilla, project
/// with `P_j`, relabel, slice.
pub fn pipeline_branch(pair: &QubitPair, outcome: Outcome) -> Result<EncodeBranch> {
    let projection = project(&encoder_input(pair), &encoding_projector(outcome))?;
    let qutrit = projection
        .collapsed
        .as_ref()
        .map(|c| extract_qutrit(c, outcome))
        .transpose()?;
    Ok(EncodeBranch {
        probability: projection.probability,
        qutrit,
    })
}

/// Result of running the encoder once.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodeRecord {
    /// Classical record of the measured outcome; never inferred from the qutrit.
    pub outcome: Outcome,
    pub probability: f64,
    pub qutrit: PureState,
}

/// Runs the encoding measurement with sampling variate `u ∈ [0, 1)`.
pub fn encode(pair: &QubitPair, u: f64) -> Result<EncodeRecord> {
    let input = encoder_input(pair);
    let projectors = encoding_projectors();
    let (m, collapsed) = sample_complete_measurement(&input, &projectors, u)?;
    let outcome = Outcome::new(m)?;
    let probability = project(&input, &projectors[m])?.probability;
    let qutrit = extract_qutrit(&collapsed, outcome)?;
    Ok(EncodeRecord {
        outcome,
        probability,
        qutrit,
    })
}

/// The success/failure pair `(Q_S, Q_F)` on the qutrit for decoding `target`
/// after outcome `outcome`.
pub fn decode_projectors(
    outcome: Outcome,
    target: Target,
) -> (DiagonalProjector, DiagonalProjector) {
    let damaged_partner = outcome.removed_index().flip(target);
    let failure_level = outcome
        .level_of(damaged_partner)
        .expect("the partner of the removed index is carried");
    let success_levels = (0..QUTRIT_DIM).filter(|&level| level != failure_level);
    (
        DiagonalProjector::new(QUTRIT_DIM, success_levels).expect("two distinct levels"),
        DiagonalProjector::new(QUTRIT_DIM, [failure_level]).expect("one level"),
    )
}

/// Register indices of the block that survives outcome `outcome` intact for
/// `target`, ordered so the first has target bit 0.
pub fn intact_block(outcome: Outcome, target: Target) -> [TwoQubitIndex; 2] {
    let removed = outcome.removed_index();
    let mut block: Vec<TwoQubitIndex> = (0..REGISTER_DIM)
        .map(|k| TwoQubitIndex(k as u8))
        .filter(|&k| k != removed && k != removed.flip(target))
        .collect();
    block.sort_by_key(|k| k.bit(target));
    [block[0], block[1]]
}

/// Register index lost to the failure level (the partner of the removed one).
pub fn failure_index(outcome: Outcome, target: Target) -> TwoQubitIndex {
    outcome.removed_index().flip(target)
}

/// Probabilities and reconstructed qubit of one decoding measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodeBranch {
    pub p_success: f64,
    pub reconstructed: Option<PureState>,
    pub p_fail: f64,
}

pub fn decode_branch(qutrit: &PureState, outcome: Outcome, target: Target) -> Result<DecodeBranch> {
    if qutrit.dim() != QUTRIT_DIM {
        return Err(domain(format!(
            "expected a qutrit, got dim {}",
            qutrit.dim()
        )));
    }
    let (q_s, _) = decode_projectors(outcome, target);
    let success = project(qutrit, &q_s)?;
    let reconstructed = success.collapsed.map(|collapsed| {
        let amplitudes = intact_block(outcome, target)
            .iter()
            .map(|&k| collapsed.amplitude(outcome.level_of(k).expect("intact index is carried")))
            .collect();
        PureState::normalized(amplitudes).expect("collapsed state is nonzero on Q_S")
    });
    Ok(DecodeBranch {
        p_success: success.probability,
        reconstructed,
        p_fail: 1.0 - success.probability,
    })
}

/// Result of running the decoder once.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodeRecord {
    pub target: Target,
    pub success: bool,
    /// Probability of the observed result (success or failure).
    pub probability: f64,
    pub reconstructed: Option<PureState>,
    pub failure_level: Option<usize>,
}

/// Measures `{Q_S, Q_F}` with variate `u`; success iff `u < p_success`.
///
/// Only the qutrit and the stored outcome are needed, so the choice of target
/// can be made any time after encoding.
pub fn decode(
    qutrit: &PureState,
    outcome: Outcome,
    target: Target,
    u: f64,
) -> Result<DecodeRecord> {
    if !(0.0..1.0).contains(&u) {
        return Err(domain(format!("sampling variate {u} not in [0, 1)")));
    }
    let branch = decode_branch(qutrit, outcome, target)?;
    if u < branch.p_success {
        Ok(DecodeRecord {
            target,
            success: true,
            probability: branch.p_success,
            reconstructed: branch.reconstructed,
            failure_level: None,
        })
    } else {
        let (_, q_f) = decode_projectors(outcome, target);
        Ok(DecodeRecord {
            target,
            success: false,
            probability: branch.p_fail,
            reconstructed: None,
            failure_level: Some(q_f.indices()[0]),
        })
    }
}

/// `Σ_{k ∈ intact block} |c_k|² / (1 − |c_j|²)`: probability of decoding
/// `target` given the preparation and the outcome.
pub fn conditional_success_probability(
    pair: &QubitPair,
    outcome: Outcome,
    target: Target,
) -> Result<f64> {
    let weights = pair.weights();
    let denominator = 1.0 - weights[outcome.index()];
    if denominator <= COLLAPSE_THRESHOLD {
        return Err(domain(format!(
            "outcome {} cannot occur for this preparation",
            outcome.index()
        )));
    }
    let numerator: f64 = intact_block(outcome, target)
        .iter()
        .map(|k| weights[k.value()])
        .sum();
    Ok((numerator / denominator).clamp(0.0, 1.0))
}
