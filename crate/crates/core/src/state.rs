//! Pure-state linear algebra for the small fixed dimensions used by the
//! protocol (2, 3, 4 and 12).
//!
//! Only what the protocol needs is here: unit-norm amplitude vectors, tensor
//! products with the first factor as the slow index, diagonal projectors in the
//! computational basis, basis permutations and the fidelity between pure states.
//! Every value is immutable once built.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;

use crate::error::{contract, domain, Result};
use crate::protocol::BlochAngles;

/// Tolerance on the squared norm of a state at construction.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Projections whose Born probability is at or below this value have no
/// collapsed state.
pub const COLLAPSE_THRESHOLD: f64 = 1e-15;

/// Maximum deviation of the total probability of a measurement family from one.
pub const COMPLETENESS_TOLERANCE: f64 = 1e-10;

/// A unit-norm vector of complex amplitudes.
///
/// The global phase is whatever the constructing operation produced; compare
/// states with [`fidelity`] or [`equal_up_to_global_phase`].
#[derive(Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Builds a state from amplitudes that must already have unit norm.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        check_amplitudes(&amplitudes)?;
        let norm_sqr = squared_norm(&amplitudes);
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(domain(format!(
                "amplitudes have squared norm {norm_sqr}, expected 1"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        check_amplitudes(&amplitudes)?;
        let norm = squared_norm(&amplitudes).sqrt();
        if norm == 0.0 {
            return Err(domain("cannot normalize the zero vector"));
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(),
        })
    }

    /// Shorthand for real amplitude vectors.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// The computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(domain(format!(
                "basis index {index} out of range for dim {dim}"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    /// Multiplies every amplitude by `e^{i angle}`.
    pub fn with_global_phase(&self, angle: f64) -> Self {
        let phase = Complex64::from_polar(1.0, angle);
        Self {
            amplitudes: self.amplitudes.iter().map(|&a| a * phase).collect(),
        }
    }

    /// Born probability of each computational basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

impl fmt::Debug for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.amplitudes.iter().map(|a| (a.re, a.im)))
            .finish()
    }
}

fn check_amplitudes(amplitudes: &[Complex64]) -> Result<()> {
    if amplitudes.is_empty() {
        return Err(domain("a state needs at least one amplitude"));
    }
    if amplitudes
        .iter()
        .any(|a| !a.re.is_finite() || !a.im.is_finite())
    {
        return Err(domain("amplitudes must be finite"));
    }
    Ok(())
}

fn squared_norm(amplitudes: &[Complex64]) -> f64 {
    amplitudes.iter().map(|a| a.norm_sqr()).sum()
}

/// Projector onto a set of computational basis states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalProjector {
    dim: usize,
    indices: Vec<usize>,
}

impl DiagonalProjector {
    pub fn new(dim: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let indices: Vec<usize> = indices.into_iter().collect();
        if indices.is_empty() {
            return Err(domain("a projector needs at least one basis index"));
        }
        let distinct: BTreeSet<usize> = indices.iter().copied().collect();
        if distinct.len() != indices.len() {
            return Err(domain(format!("repeated basis index in {indices:?}")));
        }
        if let Some(&bad) = distinct.iter().find(|&&k| k >= dim) {
            return Err(domain(format!(
                "basis index {bad} out of range for dim {dim}"
            )));
        }
        Ok(Self {
            dim,
            indices: distinct.into_iter().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Basis indices in ascending order.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }
}

/// A basis permutation `|k⟩ → |map[k]⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationUnitary {
    map: Vec<usize>,
}

impl PermutationUnitary {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let dim = map.len();
        let mut seen = vec![false; dim];
        for &image in &map {
            if image >= dim || std::mem::replace(&mut seen[image], true) {
                return Err(domain(format!("{map:?} is not a permutation of 0..{dim}")));
            }
        }
        Ok(Self { map })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            map: (0..dim).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.map.len()
    }

    pub fn image(&self, index: usize) -> usize {
        self.map[index]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }
}

/// Outcome of projecting a state: the Born probability and, unless the
/// subspace is numerically empty, the renormalized post-measurement state.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub probability: f64,
    pub collapsed: Option<PureState>,
}

/// `(cos(θ/2), e^{iφ} sin(θ/2))`.
pub fn make_qubit_state(angles: BlochAngles) -> PureState {
    let half = angles.theta() / 2.0;
    PureState {
        amplitudes: vec![
            Complex64::new(half.cos(), 0.0),
            Complex64::from_polar(half.sin(), angles.phi()),
        ],
    }
}

/// Kronecker product; the first factor is the slow index, so the combined
/// index of `(p, q)` is `p * b.dim() + q`.
pub fn tensor_product(a: &PureState, b: &PureState) -> PureState {
    let amplitudes = a
        .amplitudes
        .iter()
        .flat_map(|&x| b.amplitudes.iter().map(move |&y| x * y))
        .collect();
    PureState { amplitudes }
}

pub fn project(state: &PureState, proj: &DiagonalProjector) -> Result<Projection> {
    if proj.dim != state.dim() {
        return Err(domain(format!(
            "projector dim {} does not match state dim {}",
            proj.dim,
            state.dim()
        )));
    }
    let probability: f64 = proj
        .indices
        .iter()
        .map(|&k| state.amplitudes[k].norm_sqr())
        .sum();
    if probability <= COLLAPSE_THRESHOLD {
        return Ok(Projection {
            probability,
            collapsed: None,
        });
    }
    let scale = probability.sqrt();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); state.dim()];
    for &k in &proj.indices {
        amplitudes[k] = state.amplitudes[k] / scale;
    }
    Ok(Projection {
        probability,
        collapsed: Some(PureState { amplitudes }),
    })
}

/// Samples one outcome of a complete projective measurement.
///
/// The outcome is the first `m` (in the order of `projectors`) whose
/// cumulative probability strictly exceeds `u`.
pub fn sample_complete_measurement(
    state: &PureState,
    projectors: &[DiagonalProjector],
    u: f64,
) -> Result<(usize, PureState)> {
    if !(0.0..1.0).contains(&u) {
        return Err(domain(format!("sampling variate {u} not in [0, 1)")));
    }
    let mut covered = vec![false; state.dim()];
    for proj in projectors {
        for &k in proj.indices() {
            if k < covered.len() && std::mem::replace(&mut covered[k], true) {
                return Err(contract(format!(
                    "basis index {k} is covered by more than one projector"
                )));
            }
        }
    }
    let projections = projectors
        .iter()
        .map(|p| project(state, p))
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = projections.iter().map(|p| p.probability).sum();
    if (total - 1.0).abs() > COMPLETENESS_TOLERANCE || covered.iter().any(|c| !c) {
        return Err(contract(format!(
            "measurement is not complete: outcome probabilities sum to {total}"
        )));
    }

    let mut cumulative = 0.0;
    let mut chosen = None;
    for (m, p) in projections.iter().enumerate() {
        cumulative += p.probability;
        if cumulative > u {
            chosen = Some(m);
            break;
        }
    }
    // Rounding can leave the final cumulative sum just below u.
    let outcome = chosen
        .or_else(|| projections.iter().rposition(|p| p.collapsed.is_some()))
        .ok_or_else(|| contract("no outcome has nonzero probability"))?;
    let collapsed = projections[outcome]
        .collapsed
        .clone()
        .ok_or_else(|| contract(format!("sampled outcome {outcome} has null probability")))?;
    Ok((outcome, collapsed))
}

/// Moves the amplitude at `k` to `map(k)`.
pub fn apply_permutation(state: &PureState, u: &PermutationUnitary) -> Result<PureState> {
    if u.dim() != state.dim() {
        return Err(domain(format!(
            "permutation dim {} does not match state dim {}",
            u.dim(),
            state.dim()
        )));
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); state.dim()];
    for (k, &a) in state.amplitudes.iter().enumerate() {
        amplitudes[u.map[k]] = a;
    }
    Ok(PureState { amplitudes })
}

/// `⟨a|b⟩ = Σ conj(a_k) b_k`.
pub fn inner_product(a: &PureState, b: &PureState) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(domain(format!(
            "cannot compare states of dim {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// `|⟨a|b⟩|²`, clamped to `[0, 1]`.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(inner_product(a, b)?.norm_sqr().clamp(0.0, 1.0))
}

pub fn equal_up_to_global_phase(a: &PureState, b: &PureState, tol: f64) -> Result<bool> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(domain(format!("tolerance must be positive, got {tol}")));
    }
    Ok(fidelity(a, b)? >= 1.0 - tol)
}

/// Largest componentwise distance between `a` and `b` after rotating `b` onto
/// the global phase of `a`.
pub fn phase_aligned_distance(a: &PureState, b: &PureState) -> Result<f64> {
    let overlap = inner_product(b, a)?;
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    Ok(a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| (x - y * phase).norm())
        .fold(0.0, f64::max))
}
