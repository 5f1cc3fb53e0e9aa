//! Network representation and the four-outcome dyad model.
//!
//! A directed graph on `n` nodes is stored as one [`DyadState`] per unordered
//! pair `{i, j}` with `i < j`, giving O(1) dyad lookup for the tetrad and
//! likelihood machinery. The joint distribution of a dyad is a multinomial
//! over the four directed outcomes with weights
//!
//! ```text
//! w00 = 1
//! w10 = exp(mu + alpha_i + beta_j)
//! w01 = exp(mu + alpha_j + beta_i)
//! w11 = exp(2 mu + alpha_i + alpha_j + beta_i + beta_j + rho + v' gamma)
//! ```
//!
//! normalized to probabilities. Sampling draws dyads independently in
//! lexicographic pair order from a seeded stream cipher generator, so a seed
//! pins the graph exactly.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest exponent magnitude fed to `exp` before raising a parameter-range
/// error instead of silently overflowing.
pub const EXP_GUARD: f64 = 700.0;

/// Joint state of the unordered pair `{i, j}` with `i < j`.
///
/// `Forward` is an edge from the lower to the higher label only; `Backward`
/// the reverse; `Mutual` both; `Null` neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum DyadState {
    Null = 0,
    Forward = 1,
    Backward = 2,
    Mutual = 3,
}

impl DyadState {
    /// Builds the state from the ordered indicator pair `(A_ij, A_ji)` where
    /// `i` is the lower label.
    pub fn from_arrows(lo_to_hi: bool, hi_to_lo: bool) -> Self {
        match (lo_to_hi, hi_to_lo) {
            (false, false) => DyadState::Null,
            (true, false) => DyadState::Forward,
            (false, true) => DyadState::Backward,
            (true, true) => DyadState::Mutual,
        }
    }

    /// The ordered indicator pair `(A_ij, A_ji)` with `i` the lower label.
    pub fn arrows(self) -> (bool, bool) {
        match self {
            DyadState::Null => (false, false),
            DyadState::Forward => (true, false),
            DyadState::Backward => (false, true),
            DyadState::Mutual => (true, true),
        }
    }

    /// Viewed from the opposite orientation: swaps Forward and Backward.
    pub fn reversed(self) -> Self {
        match self {
            DyadState::Forward => DyadState::Backward,
            DyadState::Backward => DyadState::Forward,
            s => s,
        }
    }
}

/// Index of the unordered pair `{i, j}`, `i < j`, in a row-major triangular
/// layout over `n` nodes.
#[inline]
pub(crate) fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (n - 1) - i * (i + 1) / 2 + (j - 1)
}

/// Number of unordered pairs over `n` nodes.
#[inline]
pub(crate) fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// A simple directed graph stored as a dense triangular array of dyad states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    n: usize,
    dyads: Vec<DyadState>,
}

impl DirectedGraph {
    /// An empty graph on `n` nodes.
    pub fn empty(n: usize) -> Self {
        DirectedGraph {
            n,
            dyads: vec![DyadState::Null; pair_count(n)],
        }
    }

    /// Builds a graph from directed edges, collapsing duplicates. Self-loops
    /// and out-of-range endpoints are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = DirectedGraph::empty(n);
        for &(src, dst) in edges {
            if src >= n || dst >= n {
                return Err(Error::Validation(format!(
                    "edge ({src}, {dst}) out of range for n = {n}"
                )));
            }
            if src == dst {
                return Err(Error::Validation(format!("self-loop at node {src}")));
            }
            g.add_edge(src, dst);
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// State of the unordered pair `{i, j}` as seen from the order `(i, j)`:
    /// `Forward` means an edge `i -> j` only, whatever the label order.
    #[inline]
    pub fn state(&self, i: usize, j: usize) -> DyadState {
        debug_assert!(i != j);
        if i < j {
            self.dyads[pair_index(self.n, i, j)]
        } else {
            self.dyads[pair_index(self.n, j, i)].reversed()
        }
    }

    /// Whether the directed edge `i -> j` is present.
    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        matches!(self.state(i, j), DyadState::Forward | DyadState::Mutual)
    }

    /// Sets the state of the pair as seen from the order `(i, j)`.
    pub fn set_state(&mut self, i: usize, j: usize, state: DyadState) {
        assert!(i != j && i < self.n && j < self.n, "invalid pair ({i}, {j})");
        if i < j {
            self.dyads[pair_index(self.n, i, j)] = state;
        } else {
            self.dyads[pair_index(self.n, j, i)] = state.reversed();
        }
    }

    /// Inserts the directed edge `i -> j`, keeping any existing reverse edge.
    pub fn add_edge(&mut self, i: usize, j: usize) {
        let (lo_to_hi, hi_to_lo) = self.state(i.min(j), i.max(j)).arrows();
        let state = if i < j {
            DyadState::from_arrows(true, hi_to_lo)
        } else {
            DyadState::from_arrows(lo_to_hi, true)
        };
        self.set_state(i.min(j), i.max(j), state);
    }

    /// Raw triangular dyad array in lexicographic pair order.
    pub fn dyad_states(&self) -> &[DyadState] {
        &self.dyads
    }

    /// Applies a node relabeling: node `i` becomes `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut g = DirectedGraph::empty(self.n);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                g.set_state(perm[i], perm[j], self.state(i, j));
            }
        }
        g
    }
}

/// Out-degrees, in-degrees, edge total and mutual-dyad count of a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSummary {
    pub out_degrees: Vec<u64>,
    pub in_degrees: Vec<u64>,
    pub edge_total: u64,
    pub mutual_count: u64,
}

/// Computes the bi-degree sequence, total edge count and mutual-dyad count.
pub fn degree_sequences(g: &DirectedGraph) -> DegreeSummary {
    let n = g.node_count();
    let mut out_degrees = vec![0u64; n];
    let mut in_degrees = vec![0u64; n];
    let mut edge_total = 0u64;
    let mut mutual_count = 0u64;
    for i in 0..n {
        for j in (i + 1)..n {
            let (fwd, bwd) = g.state(i, j).arrows();
            if fwd {
                out_degrees[i] += 1;
                in_degrees[j] += 1;
                edge_total += 1;
            }
            if bwd {
                out_degrees[j] += 1;
                in_degrees[i] += 1;
                edge_total += 1;
            }
            if fwd && bwd {
                mutual_count += 1;
            }
        }
    }
    DegreeSummary {
        out_degrees,
        in_degrees,
        edge_total,
        mutual_count,
    }
}

/// Symmetric per-pair covariate vectors `V_ij` of uniform dimension `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeCovariates {
    n: usize,
    q: usize,
    values: Vec<f64>,
}

impl EdgeCovariates {
    /// Zero covariates of dimension `q` for every pair over `n` nodes.
    pub fn zeros(n: usize, q: usize) -> Self {
        EdgeCovariates {
            n,
            q,
            values: vec![0.0; pair_count(n) * q],
        }
    }

    /// Builds from a row of length `q` per unordered pair in lexicographic
    /// order. All entries must be finite.
    pub fn from_rows(n: usize, q: usize, rows: &[Vec<f64>]) -> Result<Self> {
        if rows.len() != pair_count(n) {
            return Err(Error::DimensionMismatch {
                context: "covariate rows".into(),
                expected: pair_count(n),
                actual: rows.len(),
            });
        }
        let mut values = Vec::with_capacity(pair_count(n) * q);
        for row in rows {
            if row.len() != q {
                return Err(Error::DimensionMismatch {
                    context: "covariate row width".into(),
                    expected: q,
                    actual: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Validation("non-finite covariate value".into()));
            }
            values.extend_from_slice(row);
        }
        Ok(EdgeCovariates { n, q, values })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.q
    }

    /// The covariate vector of the unordered pair `{i, j}`.
    #[inline]
    pub fn pair(&self, i: usize, j: usize) -> &[f64] {
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let idx = pair_index(self.n, lo, hi);
        &self.values[idx * self.q..(idx + 1) * self.q]
    }

    /// Sets the covariate vector of the unordered pair `{i, j}`.
    pub fn set_pair(&mut self, i: usize, j: usize, v: &[f64]) {
        assert_eq!(v.len(), self.q);
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let idx = pair_index(self.n, lo, hi);
        self.values[idx * self.q..(idx + 1) * self.q].copy_from_slice(v);
    }

    /// Relabels pairs consistently with [`DirectedGraph::relabel`].
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut out = EdgeCovariates::zeros(self.n, self.q);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                out.set_pair(perm[i], perm[j], self.pair(i, j));
            }
        }
        out
    }

    /// Adds a constant vector to every pair covariate.
    pub fn shifted(&self, c: &[f64]) -> Self {
        assert_eq!(c.len(), self.q);
        let mut out = self.clone();
        for row in out.values.chunks_mut(self.q.max(1)) {
            for (x, d) in row.iter_mut().zip(c) {
                *x += d;
            }
        }
        out
    }
}

/// Full model parameterization: density, reciprocity, covariate effects and
/// per-node sender/receiver propensities.
#[derive(Debug, Clone, PartialEq)]
pub struct FullParams {
    pub mu: f64,
    pub rho: f64,
    pub gamma: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

impl FullParams {
    /// Homogeneous parameters: all node effects zero.
    pub fn homogeneous(n: usize, mu: f64, rho: f64, gamma: Vec<f64>) -> Self {
        FullParams {
            mu,
            rho,
            gamma,
            alpha: vec![0.0; n],
            beta: vec![0.0; n],
        }
    }

    pub fn node_count(&self) -> usize {
        self.alpha.len()
    }

    pub fn validate(&self, n: usize, q: usize) -> Result<()> {
        if self.gamma.len() != q {
            return Err(Error::DimensionMismatch {
                context: "gamma".into(),
                expected: q,
                actual: self.gamma.len(),
            });
        }
        if self.alpha.len() != n || self.beta.len() != n {
            return Err(Error::DimensionMismatch {
                context: "node effects".into(),
                expected: n,
                actual: self.alpha.len(),
            });
        }
        let all = self
            .gamma
            .iter()
            .chain(self.alpha.iter())
            .chain(self.beta.iter())
            .chain([&self.mu, &self.rho]);
        for v in all {
            if !v.is_finite() {
                return Err(Error::Validation("non-finite parameter".into()));
            }
        }
        Ok(())
    }
}

/// The estimation target: baseline reciprocity and covariate effects.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalParams {
    pub rho: f64,
    pub gamma: Vec<f64>,
}

impl GlobalParams {
    pub fn zeros(q: usize) -> Self {
        GlobalParams {
            rho: 0.0,
            gamma: vec![0.0; q],
        }
    }

    pub fn dim(&self) -> usize {
        1 + self.gamma.len()
    }

    /// Stacked `(rho, gamma)` vector.
    pub fn as_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.dim());
        v.push(self.rho);
        v.extend_from_slice(&self.gamma);
        v
    }

    pub fn from_slice(v: &[f64]) -> Self {
        GlobalParams {
            rho: v[0],
            gamma: v[1..].to_vec(),
        }
    }
}

fn guarded_exp(exponent: f64, context: &str) -> Result<f64> {
    if !exponent.is_finite() || exponent.abs() > EXP_GUARD {
        return Err(Error::ParameterRange {
            context: context.to_string(),
            value: exponent,
            limit: EXP_GUARD,
        });
    }
    Ok(exponent.exp())
}

/// The four dyad outcome probabilities `(p00, p10, p01, p11)` for the pair
/// `(i, j)` with covariate vector `v`.
///
/// `p10` is the probability of an edge `i -> j` only. Swapping `i` and `j`
/// exchanges `p10` and `p01`.
pub fn dyad_probabilities(
    params: &FullParams,
    i: usize,
    j: usize,
    v: &[f64],
) -> Result<[f64; 4]> {
    if i == j {
        return Err(Error::Validation(format!("dyad ({i}, {i}) is a self-pair")));
    }
    if v.len() != params.gamma.len() {
        return Err(Error::DimensionMismatch {
            context: "dyad covariates".into(),
            expected: params.gamma.len(),
            actual: v.len(),
        });
    }
    let vtg: f64 = v.iter().zip(&params.gamma).map(|(a, b)| a * b).sum();
    let e10 = params.mu + params.alpha[i] + params.beta[j];
    let e01 = params.mu + params.alpha[j] + params.beta[i];
    let e11 = 2.0 * params.mu
        + params.alpha[i]
        + params.alpha[j]
        + params.beta[i]
        + params.beta[j]
        + params.rho
        + vtg;
    // Check the raw exponents, then normalize on the shifted scale so the
    // division below never sees an infinity.
    guarded_exp(e10, "w10 (mu + alpha_i + beta_j)")?;
    guarded_exp(e01, "w01 (mu + alpha_j + beta_i)")?;
    guarded_exp(e11, "w11 (2 mu + alpha_i + alpha_j + beta_i + beta_j + rho + v'gamma)")?;
    let m = 0f64.max(e10).max(e01).max(e11);
    let w = [
        (0.0 - m).exp(),
        (e10 - m).exp(),
        (e01 - m).exp(),
        (e11 - m).exp(),
    ];
    let z: f64 = w.iter().sum();
    Ok([w[0] / z, w[1] / z, w[2] / z, w[3] / z])
}

/// Draws a network with independent dyads in lexicographic pair order from a
/// seeded generator. The same seed always yields the same graph.
pub fn sample_network(
    params: &FullParams,
    covariates: &EdgeCovariates,
    seed: u64,
) -> Result<DirectedGraph> {
    let n = params.node_count();
    if n < 2 {
        return Err(Error::Validation(format!("need at least 2 nodes, got {n}")));
    }
    if covariates.node_count() != n {
        return Err(Error::DimensionMismatch {
            context: "covariate node count".into(),
            expected: n,
            actual: covariates.node_count(),
        });
    }
    params.validate(n, covariates.dim())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = DirectedGraph::empty(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let p = dyad_probabilities(params, i, j, covariates.pair(i, j))?;
            let u = uniform_f64(&mut rng);
            let state = if u < p[0] {
                DyadState::Null
            } else if u < p[0] + p[1] {
                DyadState::Forward
            } else if u < p[0] + p[1] + p[2] {
                DyadState::Backward
            } else {
                DyadState::Mutual
            };
            g.set_state(i, j, state);
        }
    }
    Ok(g)
}

/// Uniform in `[0, 1)` with 53 random bits, independent of `rand`'s float
/// conventions so the draw sequence is stable.
#[inline]
pub(crate) fn uniform_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_index_is_lexicographic() {
        let n = 6;
        let mut expect = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                assert_eq!(pair_index(n, i, j), expect);
                expect += 1;
            }
        }
        assert_eq!(expect, pair_count(n));
    }

    #[test]
    fn dyad_state_roundtrips_through_arrows() {
        for s in [
            DyadState::Null,
            DyadState::Forward,
            DyadState::Backward,
            DyadState::Mutual,
        ] {
            let (a, b) = s.arrows();
            assert_eq!(DyadState::from_arrows(a, b), s);
        }
    }

    #[test]
    fn ordered_state_view_swaps_orientation() {
        let mut g = DirectedGraph::empty(4);
        g.set_state(1, 3, DyadState::Forward);
        assert_eq!(g.state(1, 3), DyadState::Forward);
        assert_eq!(g.state(3, 1), DyadState::Backward);
        assert!(g.has_edge(1, 3));
        assert!(!g.has_edge(3, 1));
    }

    #[test]
    fn probabilities_all_zero_params() {
        let p = FullParams::homogeneous(3, 0.0, 0.0, vec![]);
        let probs = dyad_probabilities(&p, 0, 1, &[]).unwrap();
        for v in probs {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn probabilities_mu_log_two() {
        // Weights 1, 2, 2, 4 normalize to (1/9, 2/9, 2/9, 4/9).
        let p = FullParams::homogeneous(3, 2f64.ln(), 0.0, vec![]);
        let probs = dyad_probabilities(&p, 0, 1, &[]).unwrap();
        let expect = [1.0 / 9.0, 2.0 / 9.0, 2.0 / 9.0, 4.0 / 9.0];
        for (a, b) in probs.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn probabilities_sparse_limit() {
        let p = FullParams::homogeneous(3, -50.0, 0.0, vec![]);
        let probs = dyad_probabilities(&p, 0, 1, &[]).unwrap();
        assert!((probs[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn probabilities_swap_symmetry() {
        let mut p = FullParams::homogeneous(4, 0.3, -0.2, vec![0.5]);
        p.alpha = vec![0.1, -0.4, 0.2, 0.0];
        p.beta = vec![-0.3, 0.6, 0.0, 0.1];
        let a = dyad_probabilities(&p, 1, 2, &[0.7]).unwrap();
        let b = dyad_probabilities(&p, 2, 1, &[0.7]).unwrap();
        assert!((a[0] - b[0]).abs() < 1e-15);
        assert!((a[1] - b[2]).abs() < 1e-15);
        assert!((a[2] - b[1]).abs() < 1e-15);
        assert!((a[3] - b[3]).abs() < 1e-15);
    }

    #[test]
    fn exponent_guard_fires() {
        let p = FullParams::homogeneous(3, 400.0, 0.0, vec![]);
        // w11 exponent is 800, past the guard.
        let err = dyad_probabilities(&p, 0, 1, &[]).unwrap_err();
        assert!(matches!(err, Error::ParameterRange { .. }));
        assert!(err.to_string().contains("w11"));
    }

    #[test]
    fn degree_sequences_counts() {
        // Empty graph.
        let g = DirectedGraph::empty(5);
        let s = degree_sequences(&g);
        assert_eq!(s.out_degrees, vec![0; 5]);
        assert_eq!(s.in_degrees, vec![0; 5]);
        assert_eq!(s.edge_total, 0);
        assert_eq!(s.mutual_count, 0);

        // Single mutual dyad {0, 1} with n = 3.
        let mut g = DirectedGraph::empty(3);
        g.set_state(0, 1, DyadState::Mutual);
        let s = degree_sequences(&g);
        assert_eq!(s.out_degrees, vec![1, 1, 0]);
        assert_eq!(s.in_degrees, vec![1, 1, 0]);
        assert_eq!(s.edge_total, 2);
        assert_eq!(s.mutual_count, 1);

        // Directed 4-cycle.
        let g = DirectedGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let s = degree_sequences(&g);
        assert_eq!(s.out_degrees, vec![1; 4]);
        assert_eq!(s.in_degrees, vec![1; 4]);
        assert_eq!(s.edge_total, 4);
        assert_eq!(s.mutual_count, 0);
    }

    #[test]
    fn sampler_is_deterministic() {
        let p = FullParams::homogeneous(20, -0.5, 0.4, vec![]);
        let cov = EdgeCovariates::zeros(20, 0);
        let a = sample_network(&p, &cov, 99).unwrap();
        let b = sample_network(&p, &cov, 99).unwrap();
        assert_eq!(a, b);
        let c = sample_network(&p, &cov, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sampler_degenerate_sparse_limit() {
        let p = FullParams::homogeneous(50, -50.0, 0.0, vec![]);
        let cov = EdgeCovariates::zeros(50, 0);
        let g = sample_network(&p, &cov, 7).unwrap();
        assert_eq!(degree_sequences(&g).edge_total, 0);
    }

    #[test]
    fn sampler_matches_dyad_marginals() {
        // One dyad, all parameters zero: each outcome has probability 1/4.
        let p = FullParams::homogeneous(2, 0.0, 0.0, vec![]);
        let cov = EdgeCovariates::zeros(2, 0);
        let reps = 100_000u64;
        let mut counts = [0u64; 4];
        for s in 0..reps {
            let g = sample_network(&p, &cov, s).unwrap();
            counts[g.state(0, 1) as usize] += 1;
        }
        let tol = 4.0 * (0.25 * 0.75 / reps as f64).sqrt();
        for c in counts {
            let freq = c as f64 / reps as f64;
            assert!(
                (freq - 0.25).abs() < tol,
                "frequency {freq} outside {tol} of 0.25"
            );
        }
    }

    #[test]
    fn shift_invariance_of_mu_against_alpha() {
        // mu + c with alpha - c leaves every probability unchanged.
        let mut p = FullParams::homogeneous(3, 0.2, 0.5, vec![1.0]);
        p.alpha = vec![0.3, -0.1, 0.2];
        p.beta = vec![0.1, 0.4, -0.2];
        let base = dyad_probabilities(&p, 0, 2, &[0.3]).unwrap();
        let c = 0.77;
        let mut shifted = p.clone();
        shifted.mu += c;
        for a in &mut shifted.alpha {
            *a -= c;
        }
        let moved = dyad_probabilities(&shifted, 0, 2, &[0.3]).unwrap();
        for (x, y) in base.iter().zip(moved) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
