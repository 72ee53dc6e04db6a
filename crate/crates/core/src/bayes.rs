//! Bayesian bookkeeping of what the encoding and decoding measurements reveal
//! about the polar angles `(θ₁, θ₂)` of the two input qubits.
//!
//! Every likelihood in the protocol depends on the preparation only through
//! `|c_k|²`, which is independent of the azimuthal angles. With a φ-uniform
//! prior the φ's integrate out, so all densities here live on `[0, π]` or
//! `[0, π]²` and are measured per radian.
//!
//! Information gains are differential-entropy differences in bits, with
//! `0 · log 0 = 0` at the zeros of `sin θ` on the boundary.

use std::f64::consts::LN_2;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::protocol::{failure_index, intact_block, register_weights, Outcome, Target};
use crate::quadrature::{pairwise_sum, Quadrature};

/// Largest shift of any reported scalar tolerated when the node count doubles.
pub const CONVERGENCE_LIMIT: f64 = 1e-7;

type Eval1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type Eval2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A probability density over one polar angle.
#[derive(Clone)]
pub struct Density1D {
    eval: Eval1,
}

impl Density1D {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(f) }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        (self.eval)(theta)
    }

    pub fn total(&self, quad: &Quadrature) -> f64 {
        quad.integrate(|t| self.eval(t))
    }
}

/// A probability density over `(θ₁, θ₂)`.
#[derive(Clone)]
pub struct Density2D {
    eval: Eval2,
}

impl Density2D {
    pub fn new(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(f) }
    }

    pub fn eval(&self, theta1: f64, theta2: f64) -> f64 {
        (self.eval)(theta1, theta2)
    }

    pub fn total(&self, quad: &Quadrature) -> f64 {
        quad.integrate_2d(|x, y| self.eval(x, y))
    }

    /// Marginal density of the angle belonging to `qubit`, integrating the
    /// other angle with `quad`.
    pub fn marginal(&self, qubit: Target, quad: &Quadrature) -> Density1D {
        let joint = self.eval.clone();
        let quad = quad.clone();
        match qubit {
            Target::First => Density1D::new(move |t| quad.integrate(|s| joint(t, s))),
            Target::Second => Density1D::new(move |t| quad.integrate(|s| joint(s, t))),
        }
    }
}

/// Differential entropy in bits.
pub trait Entropy {
    fn entropy_bits(&self, quad: &Quadrature) -> Result<f64>;
}

impl Entropy for Density1D {
    fn entropy_bits(&self, quad: &Quadrature) -> Result<f64> {
        let values: Vec<f64> = quad.nodes().par_iter().map(|&t| self.eval(t)).collect();
        let terms = values
            .iter()
            .zip(quad.weights())
            .map(|(&p, &w)| Ok(w * neg_p_log2_p(p)?))
            .collect::<Result<Vec<f64>>>()?;
        Ok(pairwise_sum(&terms))
    }
}

impl Entropy for Density2D {
    fn entropy_bits(&self, quad: &Quadrature) -> Result<f64> {
        let n = quad.nodes_per_axis();
        let (nodes, weights) = (quad.nodes(), quad.weights());
        let terms = (0..n * n)
            .into_par_iter()
            .map(|idx| {
                let (i, k) = (idx / n, idx % n);
                let p = self.eval(nodes[i], nodes[k]);
                Ok(weights[i] * weights[k] * neg_p_log2_p(p)?)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(pairwise_sum(&terms))
    }
}

pub fn entropy_bits<D: Entropy + ?Sized>(density: &D, quad: &Quadrature) -> Result<f64> {
    density.entropy_bits(quad)
}

fn neg_p_log2_p(p: f64) -> Result<f64> {
    if p.is_nan() || p < 0.0 {
        return Err(contract(format!("density value {p} at a quadrature node")));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    Ok(-p * p.ln() / LN_2)
}

fn prior_value(theta: f64) -> f64 {
    0.5 * theta.sin()
}

/// `(1/2) sin θ`: the polar marginal of the uniform distribution on the sphere.
pub fn prior_theta() -> Density1D {
    Density1D::new(prior_value)
}

/// Product of two independent priors.
pub fn prior_pair() -> Density2D {
    Density2D::new(|a, b| prior_value(a) * prior_value(b))
}

/// `p(j | θ₁, θ₂) = (1 − |c_j|²) / 3`.
pub fn outcome_likelihood(outcome: Outcome, theta1: f64, theta2: f64) -> f64 {
    (1.0 - register_weights(theta1, theta2)[outcome.index()]) / 3.0
}

/// `p(j, S | θ)`: outcome `j` followed by successful decoding of `target`.
/// Equal to `p(j | θ)` times the conditional success probability, written
/// without the division so it stays finite where `|c_j| = 1`.
fn success_likelihood(outcome: Outcome, target: Target, theta1: f64, theta2: f64) -> f64 {
    let w = register_weights(theta1, theta2);
    intact_block(outcome, target)
        .iter()
        .map(|k| w[k.value()])
        .sum::<f64>()
        / 3.0
}

/// `p(j, F | θ)`: the failure level carries a single register amplitude.
fn failure_likelihood(outcome: Outcome, target: Target, theta1: f64, theta2: f64) -> f64 {
    register_weights(theta1, theta2)[failure_index(outcome, target).value()] / 3.0
}

fn evidence(quad: &Quadrature, likelihood: impl Fn(f64, f64) -> f64 + Sync) -> f64 {
    quad.integrate_2d(|a, b| likelihood(a, b) * prior_value(a) * prior_value(b))
}

/// `p(j) = ∫∫ p(j | θ) p(θ₁) p(θ₂)`.
pub fn outcome_prior(outcome: Outcome, quad: &Quadrature) -> f64 {
    evidence(quad, |a, b| outcome_likelihood(outcome, a, b))
}

/// A posterior over `(θ₁, θ₂)` together with the probability of the
/// conditioning event relative to the preceding stage.
#[derive(Clone)]
pub struct Posterior {
    pub density: Density2D,
    /// `p(j)` for the encoding posterior, `q̄_S` or `q̄_F` for decoding posteriors.
    pub branch_probability: f64,
    quad: Quadrature,
}

impl Posterior {
    fn from_likelihood(
        quad: &Quadrature,
        likelihood: impl Fn(f64, f64) -> f64 + Send + Sync + Clone + 'static,
        stage_evidence: f64,
    ) -> Self {
        let total = evidence(quad, likelihood.clone());
        let density =
            Density2D::new(move |a, b| likelihood(a, b) * prior_value(a) * prior_value(b) / total);
        Self {
            density,
            branch_probability: total / stage_evidence,
            quad: quad.clone(),
        }
    }

    pub fn marginal(&self, qubit: Target) -> Density1D {
        self.density.marginal(qubit, &self.quad)
    }
}

/// `p(θ₁, θ₂ | j)` by Bayes' theorem.
pub fn encode_posterior(outcome: Outcome, quad: &Quadrature) -> Posterior {
    Posterior::from_likelihood(quad, move |a, b| outcome_likelihood(outcome, a, b), 1.0)
}

/// `p(θ₁, θ₂ | j, S)` for decoding `target`.
pub fn decode_posterior_success(outcome: Outcome, target: Target, quad: &Quadrature) -> Posterior {
    let p_j = outcome_prior(outcome, quad);
    Posterior::from_likelihood(
        quad,
        move |a, b| success_likelihood(outcome, target, a, b),
        p_j,
    )
}

/// `p(θ₁, θ₂ | j, F)` for decoding `target`.
pub fn decode_posterior_failure(outcome: Outcome, target: Target, quad: &Quadrature) -> Posterior {
    let p_j = outcome_prior(outcome, quad);
    Posterior::from_likelihood(
        quad,
        move |a, b| failure_likelihood(outcome, target, a, b),
        p_j,
    )
}

/// `q̄_S(j, a) = ∫∫ ⟨Φ_j|Q_S|Φ_j⟩ p(θ₁, θ₂ | j)`.
pub fn average_success_probability(outcome: Outcome, target: Target, quad: &Quadrature) -> f64 {
    evidence(quad, |a, b| success_likelihood(outcome, target, a, b)) / outcome_prior(outcome, quad)
}

/// Gain from measuring a single qubit directly in the computational basis,
/// `H(prior) − Σ_r p(r) H(p(θ | r))` with `p(0 | θ) = cos²(θ/2)`.
pub fn direct_measurement_gain(quad: &Quadrature) -> Result<f64> {
    let prior_entropy = prior_theta().entropy_bits(quad)?;
    let responses: [fn(f64) -> f64; 2] = [|t| (t / 2.0).cos().powi(2), |t| (t / 2.0).sin().powi(2)];
    let mut expected_posterior_entropy = 0.0;
    for response in responses {
        let p_r = quad.integrate(|t| response(t) * prior_value(t));
        let posterior = Density1D::new(move |t| response(t) * prior_value(t) / p_r);
        expected_posterior_entropy += p_r * posterior.entropy_bits(quad)?;
    }
    Ok(prior_entropy - expected_posterior_entropy)
}

/// Gains for one encoding outcome and one decoding target. Arrays are indexed
/// by qubit (`[θ₁, θ₂]`), regardless of which qubit is decoded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeGains {
    pub outcome: usize,
    pub target: u8,
    /// Gain on the pair from learning `j`.
    pub encode_joint: f64,
    /// Gain on each qubit alone from learning `j`.
    pub encode_marginal: [f64; 2],
    /// Further gain on each qubit from a successful decode.
    pub success: [f64; 2],
    /// Further gain on each qubit from a failed decode.
    pub failure: [f64; 2],
}

pub fn outcome_gains(outcome: Outcome, target: Target, quad: &Quadrature) -> Result<OutcomeGains> {
    let prior_1d = prior_theta().entropy_bits(quad)?;
    let prior_2d = prior_pair().entropy_bits(quad)?;

    let encoded = encode_posterior(outcome, quad);
    let success = decode_posterior_success(outcome, target, quad);
    let failure = decode_posterior_failure(outcome, target, quad);

    let mut gains = OutcomeGains {
        outcome: outcome.index(),
        target: target.label(),
        encode_joint: prior_2d - encoded.density.entropy_bits(quad)?,
        encode_marginal: [0.0; 2],
        success: [0.0; 2],
        failure: [0.0; 2],
    };
    for (slot, qubit) in Target::BOTH.into_iter().enumerate() {
        let after_encoding = encoded.marginal(qubit).entropy_bits(quad)?;
        gains.encode_marginal[slot] = prior_1d - after_encoding;
        gains.success[slot] = after_encoding - success.marginal(qubit).entropy_bits(quad)?;
        gains.failure[slot] = after_encoding - failure.marginal(qubit).entropy_bits(quad)?;
    }
    Ok(gains)
}

/// Every scalar result of the information-gain analysis. Gains are in bits and
/// refer to outcome `j = 0` with qubit 1 decoded; the other outcomes give the
/// same values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GainReport {
    pub nodes_per_axis: usize,
    /// `p(j)` for `j = 0..3`.
    pub outcome_prior: [f64; 4],
    /// `q̄_S(j, a)` at index `2*j + (a − 1)`.
    pub avg_success: [f64; 8],
    pub i_e: f64,
    pub i_e_marginal: [f64; 2],
    pub i_d: [f64; 2],
    pub i_f: [f64; 2],
    pub i_direct: f64,
    /// `I_E_a + I_D_a`.
    pub total_success: [f64; 2],
    /// `I_E_a + I_F_a`.
    pub total_failure: [f64; 2],
}

impl GainReport {
    pub fn avg_success_for(&self, outcome: Outcome, target: Target) -> f64 {
        self.avg_success[2 * outcome.index() + usize::from(target.label() - 1)]
    }

    /// Named scalars, in a fixed order.
    pub fn scalars(&self) -> Vec<(String, f64)> {
        let mut out = Vec::new();
        for (j, p) in self.outcome_prior.iter().enumerate() {
            out.push((format!("p_outcome_{j}"), *p));
        }
        for (idx, q) in self.avg_success.iter().enumerate() {
            out.push((format!("q_success_j{}_a{}", idx / 2, idx % 2 + 1), *q));
        }
        out.push(("i_e".into(), self.i_e));
        for a in 0..2 {
            out.push((format!("i_e_{}", a + 1), self.i_e_marginal[a]));
            out.push((format!("i_d_{}", a + 1), self.i_d[a]));
            out.push((format!("i_f_{}", a + 1), self.i_f[a]));
            out.push((format!("total_success_{}", a + 1), self.total_success[a]));
            out.push((format!("total_failure_{}", a + 1), self.total_failure[a]));
        }
        out.push(("i_direct".into(), self.i_direct));
        out
    }
}

/// Computes the report at a single resolution.
pub fn gain_report_at(quad: &Quadrature) -> Result<GainReport> {
    let mut outcome_prior = [0.0; 4];
    let mut avg_success = [0.0; 8];
    for outcome in Outcome::all() {
        outcome_prior[outcome.index()] = self::outcome_prior(outcome, quad);
        for target in Target::BOTH {
            avg_success[2 * outcome.index() + usize::from(target.label() - 1)] =
                average_success_probability(outcome, target, quad);
        }
    }
    let first = Outcome::new(0)?;
    let gains = outcome_gains(first, Target::First, quad)?;
    let add = |a: [f64; 2], b: [f64; 2]| [a[0] + b[0], a[1] + b[1]];
    Ok(GainReport {
        nodes_per_axis: quad.nodes_per_axis(),
        outcome_prior,
        avg_success,
        i_e: gains.encode_joint,
        i_e_marginal: gains.encode_marginal,
        i_d: gains.success,
        i_f: gains.failure,
        i_direct: direct_measurement_gain(quad)?,
        total_success: add(gains.encode_marginal, gains.success),
        total_failure: add(gains.encode_marginal, gains.failure),
    })
}

/// The scalar that moved most between two reports, with its absolute shift.
pub fn largest_shift(a: &GainReport, b: &GainReport) -> (String, f64) {
    a.scalars()
        .into_iter()
        .zip(b.scalars())
        .map(|((name, x), (_, y))| (name, (x - y).abs()))
        .fold((String::new(), 0.0), |best, cur| {
            if cur.1 > best.1 || cur.1.is_nan() {
                cur
            } else {
                best
            }
        })
}

/// Computes the report at `quad` and checks it against twice the resolution.
pub fn gain_report(quad: &Quadrature) -> Result<GainReport> {
    let report = gain_report_at(quad)?;
    let refined = gain_report_at(&quad.doubled())?;
    let (quantity, shift) = largest_shift(&report, &refined);
    if shift.is_nan() || shift > CONVERGENCE_LIMIT {
        return Err(Error::Convergence {
            quantity,
            shift,
            limit: CONVERGENCE_LIMIT,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn j(k: usize) -> Outcome {
        Outcome::new(k).unwrap()
    }

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| PI * (i as f64 + 0.5) / n as f64).collect()
    }

    #[test]
    fn prior_values() {
        let p = prior_theta();
        assert_eq!(p.eval(0.0), 0.0);
        assert_abs_diff_eq!(p.eval(FRAC_PI_2), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.total(&Quadrature::default()), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn likelihood_examples() {
        assert_eq!(outcome_likelihood(j(0), 0.0, 0.0), 0.0);
        assert_abs_diff_eq!(outcome_likelihood(j(2), 0.0, PI), 0.0, epsilon = 1e-15);
        for (t1, t2) in [(0.3f64, 2.0f64), (1.0, 1.0), (3.0, 0.1)] {
            let closed = (1.0 - ((t1 / 2.0).cos() * (t2 / 2.0).cos()).powi(2)) / 3.0;
            assert_abs_diff_eq!(outcome_likelihood(j(0), t1, t2), closed, epsilon = 1e-15);
            let total: f64 = Outcome::all().map(|o| outcome_likelihood(o, t1, t2)).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-15);
            for o in Outcome::all() {
                let v = outcome_likelihood(o, t1, t2);
                assert!((0.0..=1.0 / 3.0 + 1e-16).contains(&v));
            }
        }
    }

    #[test]
    fn outcome_priors_are_a_quarter() {
        let q = Quadrature::new(64).unwrap();
        let fine = Quadrature::default();
        let mut total = 0.0;
        for o in Outcome::all() {
            let p = outcome_prior(o, &q);
            assert_abs_diff_eq!(p, 0.25, epsilon = 1e-12);
            assert_abs_diff_eq!(p, outcome_prior(o, &fine), epsilon = 1e-12);
            total += p;
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn encode_posterior_matches_closed_form() {
        let q = Quadrature::default();
        let post = encode_posterior(j(0), &q);
        assert_abs_diff_eq!(post.branch_probability, 0.25, epsilon = 1e-12);
        for &a in &grid(32) {
            for &b in &grid(32) {
                let closed =
                    (1.0 - ((a / 2.0).cos() * (b / 2.0).cos()).powi(2)) / 3.0 * a.sin() * b.sin();
                assert_abs_diff_eq!(post.density.eval(a, b), closed, epsilon = 1e-12);
            }
        }
        assert_eq!(post.density.eval(0.0, 0.0), 0.0);
        assert_abs_diff_eq!(post.density.total(&q), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn encode_posterior_reflection_symmetry() {
        let q = Quadrature::default();
        let p0 = encode_posterior(j(0), &q);
        let p3 = encode_posterior(j(3), &q);
        for &a in &grid(24) {
            for &b in &grid(24) {
                assert_abs_diff_eq!(
                    p3.density.eval(a, b),
                    p0.density.eval(PI - a, PI - b),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn success_posterior_factorizes() {
        let q = Quadrature::default();
        let post = decode_posterior_success(j(0), Target::First, &q);
        assert_abs_diff_eq!(post.branch_probability, 2.0 / 3.0, epsilon = 1e-9);
        for &a in &grid(32) {
            for &b in &grid(32) {
                let closed = 0.5 * a.sin() * (b / 2.0).sin().powi(2) * b.sin();
                assert_abs_diff_eq!(post.density.eval(a, b), closed, epsilon = 1e-9);
            }
        }
        let m1 = post.marginal(Target::First);
        let m2 = post.marginal(Target::Second);
        for &t in q.nodes() {
            assert_abs_diff_eq!(m1.eval(t), 0.5 * t.sin(), epsilon = 1e-9);
            assert_abs_diff_eq!(
                m2.eval(t),
                (t / 2.0).sin().powi(2) * t.sin(),
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn failure_posterior_factorizes() {
        let q = Quadrature::default();
        let post = decode_posterior_failure(j(0), Target::First, &q);
        assert_abs_diff_eq!(post.branch_probability, 1.0 / 3.0, epsilon = 1e-9);
        let m1 = post.marginal(Target::First);
        let m2 = post.marginal(Target::Second);
        for &a in &grid(32) {
            for &b in &grid(32) {
                let closed = (a / 2.0).sin().powi(2) * (b / 2.0).cos().powi(2) * a.sin() * b.sin();
                let v = post.density.eval(a, b);
                assert_abs_diff_eq!(v, closed, epsilon = 1e-9);
                assert_abs_diff_eq!(v, m1.eval(a) * m2.eval(b), epsilon = 1e-9);
            }
        }
        for &b in &grid(8) {
            assert_eq!(post.density.eval(0.0, b), 0.0);
        }
    }

    #[test]
    fn entropy_examples() {
        let q = Quadrature::default();
        let uniform = Density1D::new(|_| 1.0 / PI);
        assert_abs_diff_eq!(
            uniform.entropy_bits(&q).unwrap(),
            PI.log2(),
            epsilon = 1e-12
        );

        // Convergence oracle: the prior entropy barely moves on node doubling
        // and approaches the closed form 1/ln 2.
        let coarse = prior_theta().entropy_bits(&q).unwrap();
        let fine = prior_theta().entropy_bits(&q.doubled()).unwrap();
        assert!((coarse - fine).abs() < 1e-9);
        assert_abs_diff_eq!(fine, 1.0 / LN_2, epsilon = 1e-9);

        let product = prior_pair().entropy_bits(&q).unwrap();
        assert_abs_diff_eq!(product, 2.0 * coarse, epsilon = 1e-9);

        let negative = Density1D::new(|t| t - 1.0);
        assert!(matches!(negative.entropy_bits(&q), Err(Error::Contract(_))));
    }

    #[test]
    fn average_success_is_two_thirds_everywhere() {
        let q = Quadrature::default();
        for o in Outcome::all() {
            for t in Target::BOTH {
                let s = average_success_probability(o, t, &q);
                assert_abs_diff_eq!(s, 2.0 / 3.0, epsilon = 1e-9);
                let f = decode_posterior_failure(o, t, &q).branch_probability;
                assert_abs_diff_eq!(f, 1.0 / 3.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn direct_gain_closed_form() {
        // Both posteriors have entropy 1/ln2 + 1/(2 ln2) - 1 bits.
        let exact = 1.0 - 1.0 / (2.0 * LN_2);
        let gain = direct_measurement_gain(&Quadrature::default()).unwrap();
        assert_abs_diff_eq!(gain, exact, epsilon = 1e-9);
    }
}
