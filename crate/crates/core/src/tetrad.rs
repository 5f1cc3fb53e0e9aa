//! Tetrad classification and enumeration.
//!
//! An ordered 4-tuple `(i, j, k, l)` of distinct nodes is classified by the
//! states of its four boundary dyads `(i,j), (j,k), (k,l), (l,i)`:
//!
//! * `Zero` — an asymmetric directed cycle `i -> j -> k -> l -> i`;
//! * `PlusOne` — `(i,j)` and `(k,l)` mutual, `(j,k)` and `(l,i)` null;
//! * `MinusOne` — `(j,k)` and `(l,i)` mutual, `(i,j)` and `(k,l)` null;
//! * `NonInformative` — anything else.
//!
//! The diagonal dyads `(i,k)` and `(j,l)` are never inspected.
//!
//! Contributing tuples are found by pattern-driven search, never by scanning
//! all `n(n-1)(n-2)(n-3)` orderings: asymmetric cycles by walk extension over
//! the asymmetric-edge adjacency, mutual-pair patterns by pairing mutual
//! dyads and testing the two required null dyads. An exhaustive enumerator
//! over all orderings serves as the testing oracle for small graphs.

use crate::error::{Error, Result};
use crate::exec::map_partitions;
use crate::graph::{DirectedGraph, DyadState};

/// Classification of an ordered tuple under the main tetrad statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TetradClass {
    Zero,
    PlusOne,
    MinusOne,
    NonInformative,
}

/// Classification under the alternative (check) statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckTetradClass {
    Zero,
    One,
    NonInformative,
}

/// An ordered tuple together with its informative class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ContributingTetrad {
    pub nodes: [usize; 4],
    pub class: TetradClass,
}

/// An ordered tuple contributing to the check statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CheckTetrad {
    pub nodes: [usize; 4],
    pub class: CheckTetradClass,
}

/// Ordered-tuple counts per informative class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TetradCensus {
    pub n_zero: u64,
    pub n_plus: u64,
    pub n_minus: u64,
}

impl TetradCensus {
    pub fn n_pm(&self) -> u64 {
        self.n_plus + self.n_minus
    }

    pub fn total(&self) -> u64 {
        self.n_zero + self.n_plus + self.n_minus
    }
}

/// Ordered-tuple counts for the check statistic.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckCensus {
    pub n_zero: u64,
    pub n_one: u64,
}

fn validate_tuple(g: &DirectedGraph, i: usize, j: usize, k: usize, l: usize) -> Result<()> {
    let n = g.node_count();
    if i >= n || j >= n || k >= n || l >= n {
        return Err(Error::InvalidTetrad {
            i,
            j,
            k,
            l,
            n,
            reason: "node index out of range",
        });
    }
    if i == j || i == k || i == l || j == k || j == l || k == l {
        return Err(Error::InvalidTetrad {
            i,
            j,
            k,
            l,
            n,
            reason: "nodes must be pairwise distinct",
        });
    }
    Ok(())
}

#[inline]
fn classify_states(s_ij: DyadState, s_jk: DyadState, s_kl: DyadState, s_li: DyadState) -> TetradClass {
    use DyadState::*;
    match (s_ij, s_jk, s_kl, s_li) {
        (Forward, Forward, Forward, Forward) => TetradClass::Zero,
        (Mutual, Null, Mutual, Null) => TetradClass::PlusOne,
        (Null, Mutual, Null, Mutual) => TetradClass::MinusOne,
        _ => TetradClass::NonInformative,
    }
}

#[inline]
pub(crate) fn classify_unchecked(
    g: &DirectedGraph,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> TetradClass {
    classify_states(g.state(i, j), g.state(j, k), g.state(k, l), g.state(l, i))
}

/// Classifies the ordered tuple `(i, j, k, l)` under the main statistic.
pub fn classify(g: &DirectedGraph, i: usize, j: usize, k: usize, l: usize) -> Result<TetradClass> {
    validate_tuple(g, i, j, k, l)?;
    Ok(classify_unchecked(g, i, j, k, l))
}

#[inline]
pub(crate) fn classify_check_unchecked(
    g: &DirectedGraph,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> CheckTetradClass {
    use DyadState::*;
    match (g.state(i, j), g.state(j, k), g.state(k, l), g.state(l, i)) {
        // Path l -> i -> j -> k with (k, l) unlinked.
        (Forward, Forward, Null, Forward) => CheckTetradClass::Zero,
        // (i, j) mutual, edge l -> k only, both connecting dyads unlinked.
        (Mutual, Null, Backward, Null) => CheckTetradClass::One,
        _ => CheckTetradClass::NonInformative,
    }
}

/// Classifies the ordered tuple `(i, j, k, l)` under the check statistic.
pub fn classify_check(
    g: &DirectedGraph,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> Result<CheckTetradClass> {
    validate_tuple(g, i, j, k, l)?;
    Ok(classify_check_unchecked(g, i, j, k, l))
}

/// A canonical representative of a group of contributing tuples that share
/// identical likelihood contributions.
///
/// * `Cycle(t)` stands for the 4 rotations of an asymmetric 4-cycle, all of
///   class `Zero`; `t` is the rotation led by the smallest node.
/// * `MutualPair(t)` stands for the 8 orderings generated by one
///   null-compatible pairing of two mutual dyads: 4 of class `PlusOne`
///   (of which `t` is one) and their 4 single-step rotations of class
///   `MinusOne`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum TetradConfig {
    Cycle([u32; 4]),
    MutualPair([u32; 4]),
}

impl TetradConfig {
    pub(crate) fn nodes(&self) -> [u32; 4] {
        match self {
            TetradConfig::Cycle(t) | TetradConfig::MutualPair(t) => *t,
        }
    }

    /// Number of ordered tuples this configuration stands for.
    pub(crate) fn multiplicity(&self) -> u64 {
        match self {
            TetradConfig::Cycle(_) => 4,
            TetradConfig::MutualPair(_) => 8,
        }
    }
}

struct BitMatrix {
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        BitMatrix {
            words,
            bits: vec![0; words * n],
        }
    }

    #[inline]
    fn set(&mut self, row: usize, col: usize) {
        self.bits[row * self.words + col / 64] |= 1u64 << (col % 64);
    }

    #[inline]
    fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.words + col / 64] >> (col % 64) & 1 == 1
    }
}

/// Adjacency structures for pattern-driven enumeration. Built once per graph
/// and shared by repeated likelihood evaluations.
pub(crate) struct TetradIndex<'g> {
    g: &'g DirectedGraph,
    /// `asym_out[v]`: sorted nodes `u` with an edge `v -> u` only.
    asym_out: Vec<Vec<u32>>,
    /// `asym_in[v]`: sorted nodes `u` with an edge `u -> v` only.
    asym_in: Vec<Vec<u32>>,
    /// Bit-matrix view of `asym_in` for O(1) membership tests.
    asym_in_bits: BitMatrix,
    /// Mutual dyads `(a, b)` with `a < b`, lexicographically sorted.
    mutual: Vec<(u32, u32)>,
}

impl<'g> TetradIndex<'g> {
    pub(crate) fn new(g: &'g DirectedGraph) -> Self {
        let n = g.node_count();
        let mut asym_out = vec![Vec::new(); n];
        let mut asym_in = vec![Vec::new(); n];
        let mut asym_in_bits = BitMatrix::new(n);
        let mut mutual = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                match g.state(i, j) {
                    DyadState::Forward => {
                        asym_out[i].push(j as u32);
                        asym_in[j].push(i as u32);
                        asym_in_bits.set(j, i);
                    }
                    DyadState::Backward => {
                        asym_out[j].push(i as u32);
                        asym_in[i].push(j as u32);
                        asym_in_bits.set(i, j);
                    }
                    DyadState::Mutual => mutual.push((i as u32, j as u32)),
                    DyadState::Null => {}
                }
            }
        }
        TetradIndex {
            g,
            asym_out,
            asym_in,
            asym_in_bits,
            mutual,
        }
    }

    pub(crate) fn graph(&self) -> &DirectedGraph {
        self.g
    }

    /// Total number of enumeration partitions: one per node for the cycle
    /// walk, then one per mutual dyad for the pairing scan.
    pub(crate) fn partitions(&self) -> usize {
        self.g.node_count() + self.mutual.len()
    }

    #[inline]
    fn is_null(&self, a: u32, b: u32) -> bool {
        self.g.state(a as usize, b as usize) == DyadState::Null
    }

    /// Visits every canonical configuration in partition `p`, in a fixed
    /// order that does not depend on the worker count.
    pub(crate) fn visit_partition(&self, p: usize, mut sink: impl FnMut(TetradConfig)) {
        let n = self.g.node_count();
        if p < n {
            // Asymmetric 4-cycles whose smallest node is `p`. The pattern
            // itself rules out repeated nodes: each boundary dyad is
            // asymmetric in the walk direction, so no node can reappear.
            let i = p as u32;
            for &j in &self.asym_out[p] {
                if j <= i {
                    continue;
                }
                for &k in &self.asym_out[j as usize] {
                    if k <= i {
                        continue;
                    }
                    for &l in &self.asym_out[k as usize] {
                        if l > i && self.asym_in_bits.get(p, l as usize) {
                            sink(TetradConfig::Cycle([i, j, k, l]));
                        }
                    }
                }
            }
        } else {
            // Pairings of mutual dyad `p - n` with every later mutual dyad.
            let (a, b) = self.mutual[p - n];
            for &(c, d) in &self.mutual[p - n + 1..] {
                if c == a || c == b || d == a || d == b {
                    continue;
                }
                if self.is_null(b, c) && self.is_null(a, d) {
                    sink(TetradConfig::MutualPair([a, b, c, d]));
                }
                if self.is_null(b, d) && self.is_null(a, c) {
                    sink(TetradConfig::MutualPair([a, b, d, c]));
                }
            }
        }
    }

    /// Ordered-tuple census over all partitions.
    pub(crate) fn census(&self) -> TetradCensus {
        let partials = map_partitions(self.partitions(), |p| {
            let mut c = TetradCensus::default();
            self.visit_partition(p, |cfg| match cfg {
                TetradConfig::Cycle(_) => c.n_zero += 4,
                TetradConfig::MutualPair(_) => {
                    c.n_plus += 4;
                    c.n_minus += 4;
                }
            });
            c
        });
        let mut total = TetradCensus::default();
        for c in partials {
            total.n_zero += c.n_zero;
            total.n_plus += c.n_plus;
            total.n_minus += c.n_minus;
        }
        total
    }

    /// Expands one configuration into its ordered contributing tuples.
    fn expand(cfg: TetradConfig, out: &mut Vec<ContributingTetrad>) {
        let t = cfg.nodes().map(|x| x as usize);
        match cfg {
            TetradConfig::Cycle(_) => {
                let [i, j, k, l] = t;
                for rot in [[i, j, k, l], [j, k, l, i], [k, l, i, j], [l, i, j, k]] {
                    out.push(ContributingTetrad {
                        nodes: rot,
                        class: TetradClass::Zero,
                    });
                }
            }
            TetradConfig::MutualPair(_) => {
                let [a, b, c, d] = t;
                for plus in [[a, b, c, d], [b, a, d, c], [c, d, a, b], [d, c, b, a]] {
                    out.push(ContributingTetrad {
                        nodes: plus,
                        class: TetradClass::PlusOne,
                    });
                    out.push(ContributingTetrad {
                        nodes: [plus[1], plus[2], plus[3], plus[0]],
                        class: TetradClass::MinusOne,
                    });
                }
            }
        }
    }
}

/// Enumerates every contributing ordered tuple by pattern-driven search.
///
/// The output order is canonical: a fixed function of the graph alone,
/// independent of worker count. For censuses of large graphs prefer
/// [`census`], which counts without materializing tuples.
pub fn enumerate_contributing(g: &DirectedGraph) -> Vec<ContributingTetrad> {
    let index = TetradIndex::new(g);
    let buckets = map_partitions(index.partitions(), |p| {
        let mut out = Vec::new();
        index.visit_partition(p, |cfg| TetradIndex::expand(cfg, &mut out));
        out
    });
    buckets.into_iter().flatten().collect()
}

/// Fast ordered-tuple census per class.
pub fn census(g: &DirectedGraph) -> TetradCensus {
    TetradIndex::new(g).census()
}

pub const NAIVE_CAP_DEFAULT: usize = 40;

/// Exhaustive-classification oracle over all ordered tuples.
pub fn enumerate_naive(g: &DirectedGraph) -> Result<Vec<ContributingTetrad>> {
    enumerate_naive_with_cap(g, NAIVE_CAP_DEFAULT)
}

/// Exhaustive enumeration with an explicit node cap.
pub fn enumerate_naive_with_cap(g: &DirectedGraph, cap: usize) -> Result<Vec<ContributingTetrad>> {
    let n = g.node_count();
    if n > cap {
        return Err(Error::NaiveCapExceeded { n, cap });
    }
    let mut out = Vec::new();
    for_each_ordered_tuple(n, |i, j, k, l| {
        let class = classify_unchecked(g, i, j, k, l);
        if class != TetradClass::NonInformative {
            out.push(ContributingTetrad {
                nodes: [i, j, k, l],
                class,
            });
        }
    });
    Ok(out)
}

/// Check-statistic analogue of [`enumerate_naive`].
pub fn enumerate_check_naive(g: &DirectedGraph, cap: usize) -> Result<Vec<CheckTetrad>> {
    let n = g.node_count();
    if n > cap {
        return Err(Error::NaiveCapExceeded { n, cap });
    }
    let mut out = Vec::new();
    for_each_ordered_tuple(n, |i, j, k, l| {
        let class = classify_check_unchecked(g, i, j, k, l);
        if class != CheckTetradClass::NonInformative {
            out.push(CheckTetrad {
                nodes: [i, j, k, l],
                class,
            });
        }
    });
    Ok(out)
}

fn for_each_ordered_tuple(n: usize, mut f: impl FnMut(usize, usize, usize, usize)) {
    for i in 0..n {
        for j in 0..n {
            if j == i {
                continue;
            }
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                for l in 0..n {
                    if l == i || l == j || l == k {
                        continue;
                    }
                    f(i, j, k, l);
                }
            }
        }
    }
}

/// Index over check-statistic contributing tuples.
pub(crate) struct CheckIndex<'g> {
    index: TetradIndex<'g>,
}

impl<'g> CheckIndex<'g> {
    pub(crate) fn new(g: &'g DirectedGraph) -> Self {
        CheckIndex {
            index: TetradIndex::new(g),
        }
    }

    pub(crate) fn partitions(&self) -> usize {
        // One partition per leading node for the path pattern, then one per
        // mutual dyad for the mutual pattern.
        self.index.g.node_count() + self.index.mutual.len()
    }

    /// Visits contributing tuples of partition `p` in a fixed order.
    pub(crate) fn visit_partition(&self, p: usize, mut sink: impl FnMut(CheckTetrad)) {
        let n = self.index.g.node_count();
        let idx = &self.index;
        if p < n {
            // Zero pattern: i -> j -> k asymmetric, l -> i asymmetric,
            // (k, l) null. l != j is implied (j -> i cannot hold), but
            // l == k must be ruled out explicitly.
            let i = p;
            for &j in &idx.asym_out[i] {
                for &k in &idx.asym_out[j as usize] {
                    for &l in &idx.asym_in[i] {
                        if l != k && idx.is_null(k, l) {
                            sink(CheckTetrad {
                                nodes: [i, j as usize, k as usize, l as usize],
                                class: CheckTetradClass::Zero,
                            });
                        }
                    }
                }
            }
        } else {
            // One pattern: (i, j) mutual in either orientation, edge
            // l -> k only, (j, k) and (l, i) null.
            let (a, b) = idx.mutual[p - n];
            for (i, j) in [(a, b), (b, a)] {
                for l in 0..n as u32 {
                    if l == i || l == j {
                        continue;
                    }
                    for &k in &idx.asym_out[l as usize] {
                        if k == i || k == j {
                            continue;
                        }
                        if idx.is_null(j, k) && idx.is_null(l, i) {
                            sink(CheckTetrad {
                                nodes: [i as usize, j as usize, k as usize, l as usize],
                                class: CheckTetradClass::One,
                            });
                        }
                    }
                }
            }
        }
    }

    pub(crate) fn census(&self) -> CheckCensus {
        let partials = map_partitions(self.partitions(), |p| {
            let mut c = CheckCensus::default();
            self.visit_partition(p, |t| match t.class {
                CheckTetradClass::Zero => c.n_zero += 1,
                CheckTetradClass::One => c.n_one += 1,
                CheckTetradClass::NonInformative => unreachable!(),
            });
            c
        });
        let mut total = CheckCensus::default();
        for c in partials {
            total.n_zero += c.n_zero;
            total.n_one += c.n_one;
        }
        total
    }
}

/// Pattern-driven enumeration of check-statistic contributing tuples.
pub fn enumerate_check_contributing(g: &DirectedGraph) -> Vec<CheckTetrad> {
    let index = CheckIndex::new(g);
    let buckets = map_partitions(index.partitions(), |p| {
        let mut out = Vec::new();
        index.visit_partition(p, |t| out.push(t));
        out
    });
    buckets.into_iter().flatten().collect()
}

/// Fast check-statistic census.
pub fn check_census(g: &DirectedGraph) -> CheckCensus {
    CheckIndex::new(g).census()
}
