//! Trajectories, stationary distributions, mixing times and conductance.
//!
//! The averaging dynamics is `x(t+1) = P_α x(t)`. On a strongly connected
//! graph the chain has a unique stationary distribution `π` (the left
//! fixed point of `P`, shared by every `P_α`), states contract towards the
//! consensus value `π′x(0)`, and the speed of contraction is captured by
//! the mixing time of `P_α` and bounded through the conductance of the
//! chain `(P, π)`.

use crate::components::is_connected;
use crate::error::{Error, Result};
use crate::graph::DerivedMatrices;
use crate::tol;
use nalgebra::{DMatrix, DVector};

/// Threshold on worst-row total-variation-style distance that defines the
/// mixing time: `max_i Σ_j |(P_α^t)_ij − π_j| ≤ 1/(2e)`.
pub fn mixing_threshold() -> f64 {
    1.0 / (2.0 * std::f64::consts::E)
}

// ---------------------------------------------------------------------------
// Simulation
// ---------------------------------------------------------------------------

/// A recorded orbit of the averaging map.
#[derive(Debug, Clone)]
pub struct Trajectory {
    states: Vec<DVector<f64>>,
    alpha: f64,
    converged_at: Option<usize>,
}

impl Trajectory {
    /// All recorded states, `states()[t]` being `x(t)`.
    pub fn states(&self) -> &[DVector<f64>] {
        &self.states
    }

    /// The inertia the trajectory was generated with.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// First step `t` at which `‖x(t) − x(t−1)‖_∞` fell below the stop
    /// tolerance, if that happened within the step budget.
    pub fn converged_at(&self) -> Option<usize> {
        self.converged_at
    }

    /// The last recorded state.
    pub fn last(&self) -> &DVector<f64> {
        self.states.last().expect("trajectory has at least x(0)")
    }
}

/// Runs `x(t+1) = P_α x(t)` from `x0` by repeated matrix–vector products,
/// recording every state. Stops after `t_max` steps or as soon as one step
/// changes the state by less than `stop_tol` in sup norm (pass `0.0` to
/// always run the full horizon).
pub fn simulate(m: &DerivedMatrices, x0: &DVector<f64>, t_max: usize, stop_tol: f64) -> Trajectory {
    assert_eq!(x0.len(), m.n(), "initial state has wrong dimension");
    let mut states = Vec::with_capacity(t_max + 1);
    states.push(x0.clone());
    let mut converged_at = None;
    for t in 1..=t_max {
        let prev = states.last().expect("non-empty");
        let next = m.p_alpha() * prev;
        let step = (&next - prev).amax();
        states.push(next);
        if step < stop_tol {
            converged_at = Some(t);
            break;
        }
    }
    Trajectory {
        states,
        alpha: m.alpha(),
        converged_at,
    }
}

/// Serializes a trajectory as CSV with header `t,x_0,…,x_{n−1}`.
pub fn write_trajectory_csv(traj: &Trajectory) -> String {
    let n = traj.states()[0].len();
    let mut out = String::from("t");
    for j in 0..n {
        out.push_str(&format!(",x_{j}"));
    }
    out.push('\n');
    for (t, x) in traj.states().iter().enumerate() {
        out.push_str(&t.to_string());
        for v in x.iter() {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// Stationary distribution
// ---------------------------------------------------------------------------

/// Stationary distribution of a strongly connected graph: the unique
/// probability vector with `π′P = π′`.
///
/// Computed by power iteration on the transpose of the half-lazy matrix
/// `(I + P)/2`, which is aperiodic for every graph and has the same left
/// fixed point as `P` and every `P_α`. Iteration stops when the l1 change
/// per step drops below [`tol::POWER_ITERATION`]; if the budget (a coarse
/// diffusive worst case of `10·n²` steps) runs out first, the computation
/// falls back to a direct linear solve.
pub fn centrality(m: &DerivedMatrices) -> Result<DVector<f64>> {
    if !is_connected(m.graph()) {
        return Err(Error::NotConnected);
    }
    let n = m.n();
    if n == 1 {
        return Ok(DVector::from_element(1, 1.0));
    }

    let mut half_lazy_t = m.p().transpose() * 0.5;
    for i in 0..n {
        half_lazy_t[(i, i)] += 0.5;
    }

    let mut v = DVector::from_element(n, 1.0 / n as f64);
    let budget = (10 * n * n).max(10_000);
    for _ in 0..budget {
        let next = &half_lazy_t * &v;
        let change: f64 = (&next - &v).abs().sum();
        v = next;
        if change < tol::POWER_ITERATION {
            let total: f64 = v.sum();
            return Ok(v / total);
        }
    }
    centrality_direct(m)
}

/// Stationary distribution via a direct solve of `(P′ − I)π = 0` with the
/// normalization `Σπ = 1` replacing the last (redundant) equation.
///
/// This route shares no code with the power iteration in [`centrality`]
/// and serves as its cross-check.
pub fn centrality_direct(m: &DerivedMatrices) -> Result<DVector<f64>> {
    if !is_connected(m.graph()) {
        return Err(Error::NotConnected);
    }
    let n = m.n();
    let mut a = m.p().transpose();
    for i in 0..n {
        a[(i, i)] -= 1.0;
    }
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    a.lu().solve(&b).ok_or(Error::SingularSystem)
}

/// The consensus value `π′ x0` reached from `x0` on a strongly connected
/// graph with stationary distribution `π`.
pub fn consensus_value(pi: &DVector<f64>, x0: &DVector<f64>) -> f64 {
    pi.dot(x0)
}

// ---------------------------------------------------------------------------
// Mixing time
// ---------------------------------------------------------------------------

/// Mixing time of `P_α`: the smallest `t ≥ 0` with
/// `max_i Σ_j |(P_α^t)_ij − π_j| ≤ 1/(2e)`, evaluated by explicit matrix
/// powers, with the default step budget of [`tol::STEP_CAP`].
pub fn mixing_time(m: &DerivedMatrices, pi: &DVector<f64>) -> Result<usize> {
    mixing_time_capped(m, pi, tol::STEP_CAP)
}

/// [`mixing_time`] with an explicit step budget.
pub fn mixing_time_capped(m: &DerivedMatrices, pi: &DVector<f64>, cap: usize) -> Result<usize> {
    if !is_connected(m.graph()) {
        return Err(Error::NotConnected);
    }
    let n = m.n();
    let threshold = mixing_threshold();
    let mut power = DMatrix::<f64>::identity(n, n);
    for t in 0..=cap {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let mut dist = 0.0;
            for j in 0..n {
                dist += (power[(i, j)] - pi[j]).abs();
            }
            worst = worst.max(dist);
        }
        if worst <= threshold {
            return Ok(t);
        }
        if t < cap {
            power *= m.p_alpha();
        }
    }
    Err(Error::MixingCapExceeded { cap })
}

// ---------------------------------------------------------------------------
// Conductance
// ---------------------------------------------------------------------------

/// Conductance of the chain `(P, π)`:
/// `Φ = min_U  (Σ_{i∈U, j∉U} π_i P_ij) / (π(U) · π(V∖U))`
/// over proper non-empty node subsets, together with a minimizing subset.
///
/// Because `π` is stationary, the flow out of `U` equals the flow out of
/// its complement, so the ratio is complement-symmetric and only subsets
/// containing node 0 need enumeration. Among cuts within `1e-9` relative
/// of the minimum, the lexicographically smallest subset is reported.
/// Exhaustive enumeration is limited to [`tol::EXHAUSTIVE_CUT_LIMIT`]
/// nodes.
pub fn conductance(m: &DerivedMatrices, pi: &DVector<f64>) -> Result<(f64, Vec<usize>)> {
    let n = m.n();
    assert!(n >= 2, "conductance needs at least two nodes");
    if n > tol::EXHAUSTIVE_CUT_LIMIT {
        return Err(Error::TooLargeForExhaustive {
            n,
            max: tol::EXHAUSTIVE_CUT_LIMIT,
        });
    }

    // flow[i][j] = π_i P_ij off the diagonal; self-loops never cross a cut.
    let mut flow = vec![vec![0.0f64; n]; n];
    let mut out_flow = vec![0.0f64; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let f = pi[i] * m.p()[(i, j)];
                flow[i][j] = f;
                out_flow[i] += f;
            }
        }
    }

    let members = |mask: u64| -> Vec<usize> { (0..n).filter(|&i| mask >> i & 1 == 1).collect() };
    let ratio_of = |mask: u64| -> f64 {
        let mut cut = 0.0;
        let mut pi_u = 0.0;
        for i in 0..n {
            if mask >> i & 1 == 1 {
                cut += out_flow[i];
                pi_u += pi[i];
                for j in 0..n {
                    if i != j && mask >> j & 1 == 1 {
                        cut -= flow[i][j];
                    }
                }
            }
        }
        cut / (pi_u * (1.0 - pi_u))
    };

    // Proper subsets containing node 0: odd masks below the full set.
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut best = f64::INFINITY;
    let mut mask = 1u64;
    while mask < full {
        best = best.min(ratio_of(mask));
        mask += 2;
    }

    let tie_band = best.abs().max(1.0) * 1e-9;
    let mut best_subset: Option<Vec<usize>> = None;
    let mut mask = 1u64;
    while mask < full {
        if ratio_of(mask) <= best + tie_band {
            let subset = members(mask);
            if best_subset.as_ref().is_none_or(|cur| subset < *cur) {
                best_subset = Some(subset);
            }
        }
        mask += 2;
    }

    Ok((best, best_subset.expect("at least one proper subset")))
}

// ---------------------------------------------------------------------------
// Conductance bound on the mixing time
// ---------------------------------------------------------------------------

/// Outcome of checking the two-sided conductance bound
/// `(1 − 2/e)/Φ ≤ τ_{1/2} ≤ (1/Φ²)·ln(e²/π_*)`.
#[derive(Debug, Clone, Copy)]
pub struct ConductanceBoundCheck {
    /// Value of the lower bound `(1 − 2/e)/Φ`.
    pub lower: f64,
    /// Value of the upper bound, present only when it is informative
    /// (`Φ ≤ 1`; beyond that the bounding argument does not apply).
    pub upper: Option<f64>,
    /// Whether `lower ≤ τ` holds.
    pub lower_holds: bool,
    /// Whether `τ ≤ upper` holds, when the upper bound applies.
    pub upper_holds: Option<bool>,
}

impl ConductanceBoundCheck {
    /// Lower bound holds, and the upper bound holds whenever it applies.
    pub fn holds(&self) -> bool {
        self.lower_holds && self.upper_holds.unwrap_or(true)
    }
}

/// Checks the conductance bound for a mixing time `tau_half` computed at
/// `α = 1/2`, a conductance `phi` and the smallest stationary mass
/// `pi_star`.
pub fn check_conductance_bound(tau_half: usize, phi: f64, pi_star: f64) -> ConductanceBoundCheck {
    let t = tau_half as f64;
    let slack = 1e-9;
    let lower = (1.0 - 2.0 / std::f64::consts::E) / phi;
    let lower_holds = lower <= t + slack;
    if phi <= 1.0 {
        let upper = (std::f64::consts::E.powi(2) / pi_star).ln() / (phi * phi);
        ConductanceBoundCheck {
            lower,
            upper: Some(upper),
            lower_holds,
            upper_holds: Some(t <= upper + slack),
        }
    } else {
        ConductanceBoundCheck {
            lower,
            upper: None,
            lower_holds,
            upper_holds: None,
        }
    }
}

// ---------------------------------------------------------------------------
// Contraction envelope
// ---------------------------------------------------------------------------

/// Checks the geometric contraction envelope
/// `‖x(t) − 1·x̄‖_∞ ≤ ‖x(0) − 1·x̄‖_∞ · exp(−⌊t/τ⌋)` with `x̄ = π′x(0)`
/// at every recorded step of `traj`. A `1e-12`-scale slack absorbs
/// rounding.
pub fn check_convergence_envelope(traj: &Trajectory, pi: &DVector<f64>, tau: usize) -> bool {
    let x0 = &traj.states()[0];
    let xbar = consensus_value(pi, x0);
    let m0 = x0.add_scalar(-xbar).amax();
    let slack = 1e-12 * m0.max(1.0);
    for (t, x) in traj.states().iter().enumerate() {
        let lhs = x.add_scalar(-xbar).amax();
        let rhs = if tau == 0 {
            // Only the degenerate single-node chain mixes instantly; the
            // envelope then demands exact consensus at every step.
            if t == 0 {
                m0
            } else {
                0.0
            }
        } else {
            m0 * (-((t / tau) as f64)).exp()
        };
        if lhs > rhs + slack {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Summary
// ---------------------------------------------------------------------------

/// Stationary and mixing diagnostics of a strongly connected system.
#[derive(Debug, Clone)]
pub struct SpectralSummary {
    /// Stationary distribution.
    pub pi: DVector<f64>,
    /// Mixing time of `P_α` at the system's `α`.
    pub tau_alpha: usize,
    /// Conductance of `(P, π)`.
    pub phi: f64,
    /// Smallest stationary mass `min_i π_i`.
    pub pi_star: f64,
}

/// Computes [`SpectralSummary`] for a strongly connected graph small
/// enough for exhaustive cut enumeration.
pub fn spectral_summary(m: &DerivedMatrices) -> Result<SpectralSummary> {
    let pi = centrality(m)?;
    let tau_alpha = mixing_time(m, &pi)?;
    let (phi, _) = conductance(m, &pi)?;
    let pi_star = pi.min();
    Ok(SpectralSummary {
        pi,
        tau_alpha,
        phi,
        pi_star,
    })
}
