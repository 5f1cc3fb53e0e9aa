//! Tetrad conditional negative log-likelihood, gradient and Hessian.
//!
//! For a contributing ordered tuple `(i, j, k, l)` write, with `W_ab = (1,
//! V_ab)` stacked so that the first coordinate tracks `rho`,
//!
//! ```text
//! A = W_ij + W_kl,   B = W_il + W_jk,
//! f = exp(A' theta), g = exp(B' theta),  r = f + g.
//! ```
//!
//! The tuple's loss is `ln(1 + r)` minus `A' theta` for class `PlusOne`,
//! minus `B' theta` for class `MinusOne`, and minus nothing for `Zero`. This
//! is the log-partition of a three-outcome family with natural statistics
//! `{0, A, B}`, so the score is `(A f + B g) / (1 + r)` minus the observed
//! statistic and the Hessian is the outcome covariance
//! `(A A' f + B B' g) / (1+r) - m m'` with `m = (A f + B g) / (1+r)` —
//! positive semidefinite and independent of the observed class.
//!
//! The full objective averages the symmetrized per-subset losses: total loss
//! equals `1 / (24 C(n,4))` times the sum over contributing ordered tuples.
//! Evaluation walks canonical configurations (each standing for 4 or 8
//! ordered tuples with identical contributions), partitioned deterministically
//! for data-parallel execution; partial sums are compensated and merged in
//! fixed partition order, so results are bitwise reproducible at any worker
//! count.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::exec::map_partitions;
use crate::graph::{DirectedGraph, EdgeCovariates, GlobalParams, EXP_GUARD};
use crate::tetrad::{TetradCensus, TetradClass, TetradConfig, TetradIndex};

/// Exponential weights of the two informative rewirings of a tetrad.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TetradWeights {
    /// `exp(2 rho + (V_ij + V_kl)' gamma)`.
    pub f: f64,
    /// `exp(2 rho + (V_il + V_jk)' gamma)`.
    pub gw: f64,
    /// `f + gw`.
    pub r: f64,
}

/// The stacked covariate sums of a tetrad: `a = W_ij + W_kl` and
/// `b = W_il + W_jk`, each of length `q + 1` with leading entry 2.
#[derive(Debug, Clone, PartialEq)]
pub struct TetradSums {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl TetradSums {
    /// Gathers the sums for the ordered tuple `(i, j, k, l)`.
    pub fn gather(cov: &EdgeCovariates, i: usize, j: usize, k: usize, l: usize) -> Self {
        let q = cov.dim();
        let mut a = Vec::with_capacity(q + 1);
        let mut b = Vec::with_capacity(q + 1);
        a.push(2.0);
        b.push(2.0);
        let (v_ij, v_kl) = (cov.pair(i, j), cov.pair(k, l));
        let (v_il, v_jk) = (cov.pair(i, l), cov.pair(j, k));
        for m in 0..q {
            a.push(v_ij[m] + v_kl[m]);
            b.push(v_il[m] + v_jk[m]);
        }
        TetradSums { a, b }
    }
}

impl TetradWeights {
    /// Evaluates the weights at `theta`, guarding both exponents.
    pub fn evaluate(sums: &TetradSums, theta: &GlobalParams) -> Result<Self> {
        let tv = theta.as_vec();
        let u = dot(&sums.a, &tv);
        let v = dot(&sums.b, &tv);
        check_exponent(u, "tetrad weight f")?;
        check_exponent(v, "tetrad weight g")?;
        let f = u.exp();
        let gw = v.exp();
        Ok(TetradWeights { f, gw, r: f + gw })
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn check_exponent(value: f64, context: &str) -> Result<()> {
    if !value.is_finite() || value.abs() > EXP_GUARD {
        return Err(Error::ParameterRange {
            context: context.to_string(),
            value,
            limit: EXP_GUARD,
        });
    }
    Ok(())
}

/// Negative log-likelihood of one contributing ordered tuple.
pub fn tetrad_loss(
    class: TetradClass,
    w: &TetradWeights,
    sums: &TetradSums,
    theta: &GlobalParams,
) -> f64 {
    debug_assert_ne!(class, TetradClass::NonInformative);
    let tv = theta.as_vec();
    let linear = match class {
        TetradClass::PlusOne => dot(&sums.a, &tv),
        TetradClass::MinusOne => dot(&sums.b, &tv),
        _ => 0.0,
    };
    w.r.ln_1p() - linear
}

/// Gradient of [`tetrad_loss`] in `(rho, gamma)`.
pub fn tetrad_score(
    class: TetradClass,
    w: &TetradWeights,
    sums: &TetradSums,
    _theta: &GlobalParams,
) -> Vec<f64> {
    debug_assert_ne!(class, TetradClass::NonInformative);
    let denom = 1.0 + w.r;
    let (pa, pb) = (w.f / denom, w.gw / denom);
    sums.a
        .iter()
        .zip(&sums.b)
        .map(|(&a, &b)| {
            let mut s = pa * a + pb * b;
            match class {
                TetradClass::PlusOne => s -= a,
                TetradClass::MinusOne => s -= b,
                _ => {}
            }
            s
        })
        .collect()
}

/// Hessian of [`tetrad_loss`]; the same for every class.
pub fn tetrad_hessian(w: &TetradWeights, sums: &TetradSums) -> DMatrix<f64> {
    let d = sums.a.len();
    let denom = 1.0 + w.r;
    let (pa, pb) = (w.f / denom, w.gw / denom);
    let mean: Vec<f64> = sums
        .a
        .iter()
        .zip(&sums.b)
        .map(|(&a, &b)| pa * a + pb * b)
        .collect();
    DMatrix::from_fn(d, d, |r, c| {
        pa * sums.a[r] * sums.a[c] + pb * sums.b[r] * sums.b[c] - mean[r] * mean[c]
    })
}

/// Which pieces [`evaluate`] should produce.
#[derive(Debug, Clone, Copy)]
pub struct EvalWants {
    pub gradient: bool,
    pub hessian: bool,
}

impl EvalWants {
    pub fn all() -> Self {
        EvalWants {
            gradient: true,
            hessian: true,
        }
    }

    pub fn value_only() -> Self {
        EvalWants {
            gradient: false,
            hessian: false,
        }
    }
}

/// Value, derivatives and tuple counts of the conditional likelihood.
#[derive(Debug, Clone)]
pub struct LikelihoodEval {
    /// Normalized negative log-likelihood.
    pub value: f64,
    /// Gradient in `(rho, gamma)`, normalized; zeros when not requested.
    pub gradient: DVector<f64>,
    /// Hessian, normalized; zeros when not requested.
    pub hessian: DMatrix<f64>,
    /// Contributing ordered-tuple counts per class.
    pub counts: TetradCensus,
    /// `24 C(n, 4)`: multiply value or derivatives by this to undo the
    /// normalization.
    pub normalizer: f64,
}

/// Compensated (Kahan) accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    #[inline]
    fn add(&mut self, value: f64) {
        let y = value - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

struct Partial {
    value: Kahan,
    grad: Vec<Kahan>,
    // Upper triangle of the symmetric Hessian, row-major.
    hess: Vec<f64>,
    counts: TetradCensus,
}

impl Partial {
    fn new(d: usize, wants: EvalWants) -> Self {
        Partial {
            value: Kahan::default(),
            grad: vec![Kahan::default(); if wants.gradient { d } else { 0 }],
            hess: vec![0.0; if wants.hessian { d * (d + 1) / 2 } else { 0 }],
            counts: TetradCensus::default(),
        }
    }
}

/// Per-configuration scratch shared by the likelihood and the projected-score
/// accumulation.
pub(crate) struct ConfigScratch {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl ConfigScratch {
    pub(crate) fn new(q: usize) -> Self {
        ConfigScratch {
            a: vec![0.0; q + 1],
            b: vec![0.0; q + 1],
        }
    }
}

/// Weighted contribution of one canonical configuration.
pub(crate) struct ConfigTerm {
    /// 4 for cycles, 8 for mutual pairings.
    pub mult: f64,
    /// Linear statistic subtracted per tuple: `A` for the mutual pairing
    /// representative, nothing for cycles.
    pub is_pair: bool,
    pub f: f64,
    pub g: f64,
}

impl ConfigTerm {
    /// Fills `scratch.a`, `scratch.b` with the stacked sums of `cfg` and
    /// evaluates the exponential weights at `theta_vec`.
    pub(crate) fn prepare(
        cfg: TetradConfig,
        cov: &EdgeCovariates,
        theta_vec: &[f64],
        scratch: &mut ConfigScratch,
    ) -> Result<Self> {
        let [i, j, k, l] = cfg.nodes().map(|x| x as usize);
        let q = cov.dim();
        scratch.a[0] = 2.0;
        scratch.b[0] = 2.0;
        let (v_ij, v_kl) = (cov.pair(i, j), cov.pair(k, l));
        let (v_il, v_jk) = (cov.pair(i, l), cov.pair(j, k));
        for m in 0..q {
            scratch.a[m + 1] = v_ij[m] + v_kl[m];
            scratch.b[m + 1] = v_il[m] + v_jk[m];
        }
        let u = dot(&scratch.a, theta_vec);
        let v = dot(&scratch.b, theta_vec);
        check_exponent(u, "tetrad weight f")?;
        check_exponent(v, "tetrad weight g")?;
        Ok(ConfigTerm {
            mult: cfg.multiplicity() as f64,
            is_pair: matches!(cfg, TetradConfig::MutualPair(_)),
            f: u.exp(),
            g: v.exp(),
        })
    }

    /// Loss of one representative tuple (identical across the group).
    #[inline]
    pub(crate) fn loss(&self, theta_vec: &[f64], scratch: &ConfigScratch) -> f64 {
        let r = self.f + self.g;
        let linear = if self.is_pair {
            dot(&scratch.a, theta_vec)
        } else {
            0.0
        };
        r.ln_1p() - linear
    }

    /// Writes the representative tuple's score into `out`.
    #[inline]
    pub(crate) fn score(&self, scratch: &ConfigScratch, out: &mut [f64]) {
        let denom = 1.0 + self.f + self.g;
        let (pa, pb) = (self.f / denom, self.g / denom);
        for ((o, &a), &b) in out.iter_mut().zip(&scratch.a).zip(&scratch.b) {
            *o = pa * a + pb * b;
            if self.is_pair {
                *o -= a;
            }
        }
    }
}

/// Evaluates the conditional likelihood at `theta`.
pub fn evaluate(
    g: &DirectedGraph,
    cov: &EdgeCovariates,
    theta: &GlobalParams,
    wants: EvalWants,
) -> Result<LikelihoodEval> {
    let index = TetradIndex::new(g);
    evaluate_with_index(&index, cov, theta, wants)
}

pub(crate) fn evaluate_with_index(
    index: &TetradIndex<'_>,
    cov: &EdgeCovariates,
    theta: &GlobalParams,
    wants: EvalWants,
) -> Result<LikelihoodEval> {
    let n = index.graph().node_count();
    if cov.node_count() != n {
        return Err(Error::DimensionMismatch {
            context: "covariate node count".into(),
            expected: n,
            actual: cov.node_count(),
        });
    }
    if cov.dim() + 1 != theta.dim() {
        return Err(Error::DimensionMismatch {
            context: "theta dimension".into(),
            expected: cov.dim() + 1,
            actual: theta.dim(),
        });
    }
    let d = theta.dim();
    let theta_vec = theta.as_vec();

    let partials = map_partitions(index.partitions(), |p| -> Result<Partial> {
        let mut acc = Partial::new(d, wants);
        let mut scratch = ConfigScratch::new(cov.dim());
        let mut score = vec![0.0; d];
        let mut err = None;
        index.visit_partition(p, |cfg| {
            if err.is_some() {
                return;
            }
            let term = match ConfigTerm::prepare(cfg, cov, &theta_vec, &mut scratch) {
                Ok(t) => t,
                Err(e) => {
                    err = Some(e);
                    return;
                }
            };
            match cfg {
                TetradConfig::Cycle(_) => acc.counts.n_zero += 4,
                TetradConfig::MutualPair(_) => {
                    acc.counts.n_plus += 4;
                    acc.counts.n_minus += 4;
                }
            }
            acc.value.add(term.mult * term.loss(&theta_vec, &scratch));
            if wants.gradient {
                term.score(&scratch, &mut score);
                for (g, &s) in acc.grad.iter_mut().zip(&score) {
                    g.add(term.mult * s);
                }
            }
            if wants.hessian {
                let denom = 1.0 + term.f + term.g;
                let (pa, pb) = (term.f / denom, term.g / denom);
                let mut idx = 0;
                for r in 0..d {
                    let mr = pa * scratch.a[r] + pb * scratch.b[r];
                    for c in r..d {
                        let mc = pa * scratch.a[c] + pb * scratch.b[c];
                        acc.hess[idx] += term.mult
                            * (pa * scratch.a[r] * scratch.a[c] + pb * scratch.b[r] * scratch.b[c]
                                - mr * mc);
                        idx += 1;
                    }
                }
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(acc),
        }
    });

    // Merge in partition order, compensated, so the result is independent of
    // scheduling.
    let mut value = Kahan::default();
    let mut grad = vec![Kahan::default(); d];
    let mut hess = vec![0.0; d * (d + 1) / 2];
    let mut counts = TetradCensus::default();
    for partial in partials {
        let partial = partial?;
        value.add(partial.value.sum);
        if wants.gradient {
            for (g, p) in grad.iter_mut().zip(&partial.grad) {
                g.add(p.sum);
            }
        }
        if wants.hessian {
            for (h, p) in hess.iter_mut().zip(&partial.hess) {
                *h += p;
            }
        }
        counts.n_zero += partial.counts.n_zero;
        counts.n_plus += partial.counts.n_plus;
        counts.n_minus += partial.counts.n_minus;
    }

    let normalizer = 24.0 * choose4(n);
    let scale = if normalizer > 0.0 { 1.0 / normalizer } else { 0.0 };
    let gradient = DVector::from_iterator(d, grad.iter().map(|k| k.sum * scale));
    let mut hessian = DMatrix::zeros(d, d);
    if wants.hessian {
        let mut idx = 0;
        for r in 0..d {
            for c in r..d {
                hessian[(r, c)] = hess[idx] * scale;
                hessian[(c, r)] = hessian[(r, c)];
                idx += 1;
            }
        }
    }
    Ok(LikelihoodEval {
        value: value.sum * scale,
        gradient,
        hessian,
        counts,
        normalizer,
    })
}

/// `C(n, 4)` as a float.
pub(crate) fn choose4(n: usize) -> f64 {
    if n < 4 {
        0.0
    } else {
        let n = n as f64;
        n * (n - 1.0) * (n - 2.0) * (n - 3.0) / 24.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{sample_network, DyadState, FullParams};
    use crate::tetrad::enumerate_naive;

    fn weights_at(sums: &TetradSums, theta: &GlobalParams) -> TetradWeights {
        TetradWeights::evaluate(sums, theta).unwrap()
    }

    fn zero_sums(q: usize) -> TetradSums {
        TetradSums {
            a: std::iter::once(2.0).chain(std::iter::repeat(0.0)).take(q + 1).collect(),
            b: std::iter::once(2.0).chain(std::iter::repeat(0.0)).take(q + 1).collect(),
        }
    }

    #[test]
    fn loss_definition_cases() {
        let theta = GlobalParams::zeros(0);
        let sums = zero_sums(0);
        let w = weights_at(&sums, &theta);
        assert!((w.r - 2.0).abs() < 1e-15);
        let loss_zero = tetrad_loss(TetradClass::Zero, &w, &sums, &theta);
        assert!((loss_zero - 3f64.ln()).abs() < 1e-15);
        let loss_plus = tetrad_loss(TetradClass::PlusOne, &w, &sums, &theta);
        assert!((loss_plus - 3f64.ln()).abs() < 1e-15);

        // q = 0, rho = 1: log(1 + 2 e^2) - 2.
        let theta = GlobalParams {
            rho: 1.0,
            gamma: vec![],
        };
        let w = weights_at(&sums, &theta);
        let loss = tetrad_loss(TetradClass::PlusOne, &w, &sums, &theta);
        let expect = (1.0 + 2.0 * 2f64.exp()).ln() - 2.0;
        assert!((loss - expect).abs() < 1e-14);
    }

    #[test]
    fn score_definition_cases() {
        let theta = GlobalParams::zeros(0);
        let sums = zero_sums(0);
        let w = weights_at(&sums, &theta);
        let s = tetrad_score(TetradClass::Zero, &w, &sums, &theta);
        assert!((s[0] - 4.0 / 3.0).abs() < 1e-15);
        let s = tetrad_score(TetradClass::PlusOne, &w, &sums, &theta);
        assert!((s[0] + 2.0 / 3.0).abs() < 1e-15);

        // gamma components vanish when all covariates are zero.
        let theta = GlobalParams::zeros(2);
        let sums = zero_sums(2);
        let w = weights_at(&sums, &theta);
        let s = tetrad_score(TetradClass::Zero, &w, &sums, &theta);
        assert!((s[0] - 4.0 / 3.0).abs() < 1e-15);
        assert!(s[1].abs() < 1e-15 && s[2].abs() < 1e-15);
    }

    fn fd_gradient(
        class: TetradClass,
        sums: &TetradSums,
        theta: &GlobalParams,
        h: f64,
    ) -> Vec<f64> {
        let d = theta.dim();
        let mut out = vec![0.0; d];
        for m in 0..d {
            let mut up = theta.as_vec();
            let mut dn = theta.as_vec();
            up[m] += h;
            dn[m] -= h;
            let (tu, td) = (GlobalParams::from_slice(&up), GlobalParams::from_slice(&dn));
            let lu = tetrad_loss(class, &weights_at(sums, &tu), sums, &tu);
            let ld = tetrad_loss(class, &weights_at(sums, &td), sums, &td);
            out[m] = (lu - ld) / (2.0 * h);
        }
        out
    }

    #[test]
    fn score_matches_finite_differences() {
        let sums = TetradSums {
            a: vec![2.0, 0.7, -1.2],
            b: vec![2.0, -0.4, 0.9],
        };
        let theta = GlobalParams {
            rho: 0.3,
            gamma: vec![-0.5, 0.8],
        };
        let w = weights_at(&sums, &theta);
        for class in [TetradClass::Zero, TetradClass::PlusOne, TetradClass::MinusOne] {
            let analytic = tetrad_score(class, &w, &sums, &theta);
            let numeric = fd_gradient(class, &sums, &theta, 1e-6);
            for (a, n) in analytic.iter().zip(&numeric) {
                let denom = n.abs().max(1.0);
                assert!(
                    ((a - n) / denom).abs() < 1e-5,
                    "score mismatch: {a} vs {n}"
                );
            }
        }
    }

    #[test]
    fn hessian_matches_finite_differences_of_score() {
        let sums = TetradSums {
            a: vec![2.0, 0.7, -1.2],
            b: vec![2.0, -0.4, 0.9],
        };
        let theta = GlobalParams {
            rho: 0.2,
            gamma: vec![0.6, -0.3],
        };
        let w = weights_at(&sums, &theta);
        let analytic = tetrad_hessian(&w, &sums);
        let h = 1e-6;
        for m in 0..theta.dim() {
            let mut up = theta.as_vec();
            let mut dn = theta.as_vec();
            up[m] += h;
            dn[m] -= h;
            let (tu, td) = (GlobalParams::from_slice(&up), GlobalParams::from_slice(&dn));
            let su = tetrad_score(TetradClass::Zero, &weights_at(&sums, &tu), &sums, &tu);
            let sd = tetrad_score(TetradClass::Zero, &weights_at(&sums, &td), &sums, &td);
            for r in 0..theta.dim() {
                let numeric = (su[r] - sd[r]) / (2.0 * h);
                let denom = numeric.abs().max(1.0);
                assert!(
                    ((analytic[(r, m)] - numeric) / denom).abs() < 1e-4,
                    "hessian mismatch at ({r}, {m})"
                );
            }
        }
    }

    #[test]
    fn exponent_guard_propagates() {
        let sums = zero_sums(0);
        let theta = GlobalParams {
            rho: 400.0,
            gamma: vec![],
        };
        assert!(TetradWeights::evaluate(&sums, &theta).is_err());
    }

    fn seeded_instance(n: usize, q: usize, seed: u64) -> (DirectedGraph, EdgeCovariates) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut cov = EdgeCovariates::zeros(n, q);
        for i in 0..n {
            for j in (i + 1)..n {
                let row: Vec<f64> = (0..q).map(|_| rng.random_range(-1.0..1.0)).collect();
                cov.set_pair(i, j, &row);
            }
        }
        let params = FullParams {
            mu: -0.6,
            rho: 0.4,
            gamma: vec![0.5; q],
            alpha: (0..n).map(|_| rng.random_range(0.0..1.0)).collect(),
            beta: (0..n).map(|_| rng.random_range(0.0..1.0)).collect(),
        };
        let g = sample_network(&params, &cov, seed ^ 0xD00D).unwrap();
        (g, cov)
    }

    /// Literal transcription: sum `g_ijkl` over unordered subsets with all
    /// 24 permutations classified exhaustively.
    fn naive_symmetrized_value(
        g: &DirectedGraph,
        cov: &EdgeCovariates,
        theta: &GlobalParams,
    ) -> f64 {
        let tuples = enumerate_naive(g).unwrap();
        let mut total = 0.0;
        for t in &tuples {
            let [i, j, k, l] = t.nodes;
            let sums = TetradSums::gather(cov, i, j, k, l);
            let w = TetradWeights::evaluate(&sums, theta).unwrap();
            total += tetrad_loss(t.class, &w, &sums, theta);
        }
        total / (24.0 * choose4(g.node_count()))
    }

    #[test]
    fn evaluate_matches_naive_symmetrized_sum() {
        let (g, cov) = seeded_instance(10, 1, 31);
        let theta = GlobalParams {
            rho: 0.25,
            gamma: vec![-0.4],
        };
        let eval = evaluate(&g, &cov, &theta, EvalWants::all()).unwrap();
        assert!(eval.counts.total() > 0, "instance must have tuples");
        let naive = naive_symmetrized_value(&g, &cov, &theta);
        assert!(
            (eval.value - naive).abs() < 1e-10,
            "value {} vs naive {}",
            eval.value,
            naive
        );
    }

    #[test]
    fn evaluate_zero_contributions() {
        let mut g = DirectedGraph::empty(6);
        g.set_state(0, 1, DyadState::Forward);
        let cov = EdgeCovariates::zeros(6, 1);
        let theta = GlobalParams::zeros(1);
        let eval = evaluate(&g, &cov, &theta, EvalWants::all()).unwrap();
        assert_eq!(eval.value, 0.0);
        assert_eq!(eval.gradient.amax(), 0.0);
        assert_eq!(eval.hessian.amax(), 0.0);
        assert_eq!(eval.counts.total(), 0);
    }

    #[test]
    fn evaluate_gradient_matches_finite_differences() {
        let (g, cov) = seeded_instance(12, 2, 7);
        let theta = GlobalParams {
            rho: 0.3,
            gamma: vec![0.5, -0.2],
        };
        let eval = evaluate(&g, &cov, &theta, EvalWants::all()).unwrap();
        let h = 1e-6;
        for m in 0..theta.dim() {
            let mut up = theta.as_vec();
            let mut dn = theta.as_vec();
            up[m] += h;
            dn[m] -= h;
            let vu = evaluate(&g, &cov, &GlobalParams::from_slice(&up), EvalWants::value_only())
                .unwrap()
                .value;
            let vd = evaluate(&g, &cov, &GlobalParams::from_slice(&dn), EvalWants::value_only())
                .unwrap()
                .value;
            let numeric = (vu - vd) / (2.0 * h);
            let denom = numeric.abs().max(1e-3);
            assert!(
                ((eval.gradient[m] - numeric) / denom).abs() < 1e-5,
                "component {m}: analytic {} vs numeric {}",
                eval.gradient[m],
                numeric
            );
        }
    }

    #[test]
    fn evaluate_hessian_is_symmetric_psd() {
        let (g, cov) = seeded_instance(12, 2, 11);
        for rho in [-0.5, 0.0, 0.8] {
            let theta = GlobalParams {
                rho,
                gamma: vec![0.3, -0.6],
            };
            let eval = evaluate(&g, &cov, &theta, EvalWants::all()).unwrap();
            let h = &eval.hessian;
            for r in 0..h.nrows() {
                for c in 0..h.ncols() {
                    assert!((h[(r, c)] - h[(c, r)]).abs() < 1e-12);
                }
            }
            let eig = h.clone().symmetric_eigen();
            let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(min >= -1e-10, "min eigenvalue {min}");
        }
    }

    #[test]
    fn evaluate_is_relabel_invariant() {
        let (g, cov) = seeded_instance(11, 2, 13);
        let theta = GlobalParams {
            rho: 0.2,
            gamma: vec![0.4, -0.3],
        };
        let base = evaluate(&g, &cov, &theta, EvalWants::all()).unwrap();
        let perm: Vec<usize> = vec![4, 7, 0, 10, 2, 9, 1, 3, 8, 5, 6];
        let pg = g.relabel(&perm);
        let pc = cov.relabel(&perm);
        let moved = evaluate(&pg, &pc, &theta, EvalWants::all()).unwrap();
        assert!((base.value - moved.value).abs() < 1e-10);
        assert!((base.gradient.clone() - moved.gradient.clone()).amax() < 1e-10);
        assert!((base.hessian.clone() - moved.hessian.clone()).amax() < 1e-10);
        assert_eq!(base.counts, moved.counts);
    }

    #[test]
    fn evaluate_covariate_shift_moves_rho() {
        let (g, cov) = seeded_instance(11, 2, 17);
        let theta = GlobalParams {
            rho: 0.3,
            gamma: vec![0.7, -0.1],
        };
        let base = evaluate(&g, &cov, &theta, EvalWants::value_only()).unwrap();
        let c = [0.9, -0.4];
        let shifted_cov = cov.shifted(&c);
        let shifted_theta = GlobalParams {
            rho: theta.rho - (c[0] * theta.gamma[0] + c[1] * theta.gamma[1]),
            gamma: theta.gamma.clone(),
        };
        let moved = evaluate(&g, &shifted_cov, &shifted_theta, EvalWants::value_only()).unwrap();
        assert!((base.value - moved.value).abs() < 1e-10);
    }
}
