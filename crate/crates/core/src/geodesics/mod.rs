//! Closed geodesics on metric ribbon graphs.
//!
//! A geodesic is a closed non-backtracking walk, stored as a sequence of
//! directed edges (half-edges at their tails). Two walks that differ by a
//! rotation describe the same geodesic; reversing a walk gives the same
//! unoriented curve.

mod derived;
mod intersect;

pub use derived::{derived_geodesic, derived_geodesics, integer_rank, s_matrix, traversal_counts};
pub use intersect::{
    ideal_wolpert_edgerule, ideal_wolpert_pairs, intersection_number, intersections, is_simple,
    multi_iw, GraphIntersection,
};

use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use num_integer::Integer;
use rayon::prelude::*;
use thiserror::Error;

use crate::ribbon::{HalfEdge, MetricRibbonGraph, RibbonError, RibbonGraph};

pub const DEFAULT_BUDGET: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeodesicError {
    #[error("graph is not trivalent")]
    NotTrivalent,
    #[error("walk reduces to a point")]
    NullHomotopic,
    #[error("not a closed walk: {0}")]
    NotAWalk(String),
    #[error("more than {0} geodesics below the length bound")]
    BudgetExceeded(usize),
    #[error("exact counting needs rational edge lengths")]
    NotRational,
    #[error("exact counting table too large ({0} length units)")]
    TableTooLarge(u64),
    #[error(transparent)]
    Ribbon(#[from] RibbonError),
}

/// Whether a curve and its reverse are counted once or twice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Orientation {
    #[default]
    Unoriented,
    Oriented,
}

/// Directed edges that may follow `d` in a non-backtracking walk: every
/// half-edge at the head of `d` except the one `d` arrives on.
pub fn successors(g: &RibbonGraph, d: HalfEdge) -> impl Iterator<Item = HalfEdge> + '_ {
    let arrive = g.twin(d);
    let mut h = g.next(arrive);
    std::iter::from_fn(move || {
        if h == arrive {
            None
        } else {
            let out = h;
            h = g.next(h);
            Some(out)
        }
    })
}

#[inline]
pub fn follows(g: &RibbonGraph, d: HalfEdge, s: HalfEdge) -> bool {
    g.vertex_of(s) == g.vertex_of(g.twin(d)) && s != g.twin(d)
}

/// Reverse walk: `(h1, ..., hk)` becomes `(twin hk, ..., twin h1)`.
pub fn reverse_steps(g: &RibbonGraph, steps: &[HalfEdge]) -> Vec<HalfEdge> {
    steps.iter().rev().map(|&h| g.twin(h)).collect()
}

/// Index of the lexicographically smallest rotation.
pub fn least_rotation(s: &[HalfEdge]) -> usize {
    let n = s.len();
    let mut best = 0;
    for cand in 1..n {
        for k in 0..n {
            let (x, y) = (s[(cand + k) % n], s[(best + k) % n]);
            if x != y {
                if x < y {
                    best = cand;
                }
                break;
            }
        }
    }
    best
}

pub fn min_rotation(s: &[HalfEdge]) -> Vec<HalfEdge> {
    let r = least_rotation(s);
    s[r..].iter().chain(&s[..r]).copied().collect()
}

/// Smallest period `p` with `s` equal to its rotation by `p`.
pub fn period(s: &[HalfEdge]) -> usize {
    let n = s.len();
    (1..=n)
        .filter(|&p| n.is_multiple_of(p))
        .find(|&p| (0..n).all(|i| s[i] == s[(i + p) % n]))
        .unwrap_or(n)
}

/// A closed geodesic in canonical rotation, with its orientation.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicPath {
    steps: Vec<HalfEdge>,
    metric_length: f64,
}

impl GeodesicPath {
    /// Wraps a closed non-backtracking walk, rotating it into canonical form.
    pub fn new(g: &MetricRibbonGraph, steps: &[HalfEdge]) -> Result<Self, GeodesicError> {
        check_closed_walk(g.graph(), steps)?;
        if let Some(i) = (0..steps.len()).find(|&i| steps[(i + 1) % steps.len()] == g.graph().twin(steps[i])) {
            return Err(GeodesicError::NotAWalk(format!("backtracks after step {i}")));
        }
        Ok(Self::from_canonical_unchecked(g, min_rotation(steps)))
    }

    fn from_canonical_unchecked(g: &MetricRibbonGraph, steps: Vec<HalfEdge>) -> Self {
        let metric_length = steps.iter().map(|&h| g.length_of(h)).sum();
        Self {
            steps,
            metric_length,
        }
    }

    pub fn steps(&self) -> &[HalfEdge] {
        &self.steps
    }

    pub fn metric_length(&self) -> f64 {
        self.metric_length
    }

    pub fn combinatorial_length(&self) -> usize {
        self.steps.len()
    }

    pub fn reversed(&self, g: &MetricRibbonGraph) -> Self {
        Self::from_canonical_unchecked(g, min_rotation(&reverse_steps(g.graph(), &self.steps)))
    }

    /// Canonical steps of whichever orientation is lexicographically smaller;
    /// equal for a curve and its reverse.
    pub fn unoriented_key(&self, g: &RibbonGraph) -> Vec<HalfEdge> {
        let rev = min_rotation(&reverse_steps(g, &self.steps));
        if rev < self.steps {
            rev
        } else {
            self.steps.clone()
        }
    }

    pub fn is_primitive(&self) -> bool {
        period(&self.steps) == self.steps.len()
    }

    /// Primitive root and how many times it is repeated.
    pub fn primitive_root(&self, g: &MetricRibbonGraph) -> (Self, usize) {
        let p = period(&self.steps);
        (
            Self::from_canonical_unchecked(g, self.steps[..p].to_vec()),
            self.steps.len() / p,
        )
    }

    /// Steps written as `h1 h2 ...`.
    pub fn format_steps(&self) -> String {
        self.steps
            .iter()
            .map(|h| h.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn check_closed_walk(g: &RibbonGraph, steps: &[HalfEdge]) -> Result<(), GeodesicError> {
    if steps.is_empty() {
        return Err(GeodesicError::NotAWalk("empty walk".into()));
    }
    if let Some(&h) = steps.iter().find(|&&h| h >= g.n_half_edges()) {
        return Err(GeodesicError::NotAWalk(format!("half-edge {h} out of range")));
    }
    for i in 0..steps.len() {
        let (d, s) = (steps[i], steps[(i + 1) % steps.len()]);
        if g.vertex_of(g.twin(d)) != g.vertex_of(s) {
            return Err(GeodesicError::NotAWalk(format!(
                "step {} does not start where step {i} ends",
                (i + 1) % steps.len()
            )));
        }
    }
    Ok(())
}

/// Tightens a closed walk to the geodesic in its free homotopy class by
/// cancelling backtracks, including across the wrap-around.
pub fn geodesic_representative(
    g: &MetricRibbonGraph,
    walk: &[HalfEdge],
) -> Result<GeodesicPath, GeodesicError> {
    let rg = g.graph();
    check_closed_walk(rg, walk)?;
    let mut stack: Vec<HalfEdge> = Vec::with_capacity(walk.len());
    for &h in walk {
        if stack.last().is_some_and(|&p| rg.twin(p) == h) {
            stack.pop();
        } else {
            stack.push(h);
        }
    }
    let (mut lo, mut hi) = (0, stack.len());
    while hi - lo >= 2 && rg.twin(stack[hi - 1]) == stack[lo] {
        lo += 1;
        hi -= 1;
    }
    if hi == lo {
        return Err(GeodesicError::NullHomotopic);
    }
    let reduced = &stack[lo..hi];
    debug_assert!((0..reduced.len()).all(|i| !follows_back(rg, reduced, i)));
    Ok(GeodesicPath::from_canonical_unchecked(g, min_rotation(reduced)))
}

fn follows_back(g: &RibbonGraph, s: &[HalfEdge], i: usize) -> bool {
    s[(i + 1) % s.len()] == g.twin(s[i])
}

/// Options for [`enumerate_geodesics_with`].
#[derive(Clone, Copy, Debug)]
pub struct EnumerateOptions {
    pub orientation: Orientation,
    pub budget: usize,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        Self {
            orientation: Orientation::Unoriented,
            budget: DEFAULT_BUDGET,
        }
    }
}

/// Relative slack when comparing accumulated lengths with a bound, so that
/// for example three steps of `1/3` count as length `1`.
fn slack(x: f64) -> f64 {
    x + 1e-12 * x.abs().max(1.0)
}

/// Primitive closed geodesics of length at most `x_max`, one per unoriented
/// class, sorted by length and then steps.
pub fn enumerate_geodesics(g: &MetricRibbonGraph, x_max: f64) -> Result<Vec<GeodesicPath>, GeodesicError> {
    enumerate_geodesics_with(g, x_max, EnumerateOptions::default())
}

/// Depth-first search over directed edges. A walk is grown from its smallest
/// directed edge `d0` using only directed edges `>= d0`, so each geodesic is
/// produced from its canonical rotation alone.
pub fn enumerate_geodesics_with(
    g: &MetricRibbonGraph,
    x_max: f64,
    opts: EnumerateOptions,
) -> Result<Vec<GeodesicPath>, GeodesicError> {
    let rg = g.graph();
    let bound = slack(x_max);
    let emitted = AtomicUsize::new(0);
    let per_start: Vec<Result<Vec<Vec<HalfEdge>>, GeodesicError>> = (0..rg.n_half_edges())
        .into_par_iter()
        .map(|d0| {
            let mut search = Search {
                g,
                d0,
                bound,
                opts,
                emitted: &emitted,
                path: vec![d0],
                out: Vec::new(),
            };
            if g.length_of(d0) <= bound {
                search.grow(g.length_of(d0))?;
            }
            Ok(search.out)
        })
        .collect();
    let mut all = Vec::new();
    for r in per_start {
        all.extend(r?);
    }
    let mut paths: Vec<GeodesicPath> = all
        .into_iter()
        .map(|steps| GeodesicPath::from_canonical_unchecked(g, steps))
        .collect();
    paths.sort_by(|a, b| {
        a.metric_length
            .total_cmp(&b.metric_length)
            .then_with(|| a.steps.cmp(&b.steps))
    });
    Ok(paths)
}

struct Search<'a> {
    g: &'a MetricRibbonGraph,
    d0: HalfEdge,
    bound: f64,
    opts: EnumerateOptions,
    emitted: &'a AtomicUsize,
    path: Vec<HalfEdge>,
    out: Vec<Vec<HalfEdge>>,
}

impl Search<'_> {
    fn grow(&mut self, len: f64) -> Result<(), GeodesicError> {
        let rg = self.g.graph();
        let last = *self.path.last().unwrap();
        if follows(rg, last, self.d0) && is_emittable(rg, &self.path, self.opts.orientation) {
            self.out.push(self.path.clone());
            if self.emitted.fetch_add(1, AtomicOrdering::Relaxed) >= self.opts.budget {
                return Err(GeodesicError::BudgetExceeded(self.opts.budget));
            }
        }
        for s in successors(rg, last) {
            if s < self.d0 {
                continue;
            }
            let next_len = len + self.g.length_of(s);
            if next_len <= self.bound {
                self.path.push(s);
                self.grow(next_len)?;
                self.path.pop();
            }
        }
        Ok(())
    }
}

fn is_emittable(g: &RibbonGraph, path: &[HalfEdge], orientation: Orientation) -> bool {
    if least_rotation(path) != 0 || period(path) != path.len() {
        return false;
    }
    match orientation {
        Orientation::Oriented => true,
        Orientation::Unoriented => {
            let rev = min_rotation(&reverse_steps(g, path));
            path < rev.as_slice()
        }
    }
}

/// Number of primitive geodesics of length at most `x`.
pub fn count_geodesics(g: &MetricRibbonGraph, x: f64) -> Result<usize, GeodesicError> {
    Ok(enumerate_geodesics(g, x)?.len())
}

/// Exact lengths as integers over a common denominator: `(k, D)` with
/// `length(e) = k[e] / D` and `gcd(k) = 1` not assumed.
pub fn integer_lengths(g: &MetricRibbonGraph) -> Result<(Vec<i64>, i64), GeodesicError> {
    let ex = g.exact_lengths().ok_or(GeodesicError::NotRational)?;
    let d = ex.iter().fold(1i64, |acc, r| acc.lcm(r.denom()));
    Ok((ex.iter().map(|r| r.numer() * (d / r.denom())).collect(), d))
}

fn mobius(mut n: u64) -> i64 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Number of primitive geodesics at each length up to `x_max`, for graphs
/// with rational lengths, by dynamic programming instead of listing walks.
///
/// For every start `d0` the table counts non-backtracking walks from `d0` by
/// total length in units of `1/D`. Weighting closed walks by the length of
/// their first step gives `W(t) = sum over s | t of s N(s)`, where `N(s)` is
/// the number of oriented primitive geodesics of length `s`, and Möbius
/// inversion recovers `N`. No geodesic equals its own reverse, so unoriented
/// counts are exactly half.
///
/// Returns `(length, count)` for every length with a nonzero count.
pub fn primitive_counts_exact(
    g: &MetricRibbonGraph,
    x_max: f64,
    orientation: Orientation,
) -> Result<Vec<(f64, f64)>, GeodesicError> {
    let rg = g.graph();
    let (k, d) = integer_lengths(g)?;
    let t_max = (slack(x_max) * d as f64).floor().max(0.0) as u64;
    if t_max > 5_000_000 {
        return Err(GeodesicError::TableTooLarge(t_max));
    }
    let t_len = t_max as usize + 1;
    let n_dir = rg.n_half_edges();
    let unit = |h: HalfEdge| k[rg.edge_of(h)] as usize;
    let succ: Vec<Vec<HalfEdge>> = (0..n_dir).map(|h| successors(rg, h).collect()).collect();

    let weighted: Vec<Vec<f64>> = (0..n_dir)
        .into_par_iter()
        .map(|d0| {
            let mut table = vec![0.0f64; n_dir * t_len];
            let mut closed = vec![0.0f64; t_len];
            if unit(d0) < t_len {
                table[d0 * t_len + unit(d0)] = 1.0;
            }
            for t in 0..t_len {
                for d in 0..n_dir {
                    let v = table[d * t_len + t];
                    if v == 0.0 {
                        continue;
                    }
                    for &s in &succ[d] {
                        if s == d0 {
                            closed[t] += v;
                        }
                        let nt = t + unit(s);
                        if nt < t_len {
                            table[s * t_len + nt] += v;
                        }
                    }
                }
            }
            closed.iter().map(|c| c * unit(d0) as f64).collect()
        })
        .collect();
    let mut w = vec![0.0f64; t_len];
    for row in &weighted {
        for (acc, v) in w.iter_mut().zip(row) {
            *acc += v;
        }
    }

    let mut out = Vec::new();
    for t in 1..t_len {
        let mut s = 0.0;
        for m in 1..=t {
            if t % m == 0 {
                let mu = mobius(m as u64);
                if mu != 0 {
                    s += mu as f64 * w[t / m];
                }
            }
        }
        let mut n = (s / t as f64).round().max(0.0);
        if orientation == Orientation::Unoriented {
            n /= 2.0;
        }
        if n > 0.0 {
            out.push((t as f64 / d as f64, n));
        }
    }
    Ok(out)
}

/// Shortest closed geodesic length, by Dijkstra over directed edges from
/// every start. The shortest closed non-backtracking walk through `d0` is a
/// shortest path from `d0` back to a predecessor of `d0`.
pub fn systole(g: &MetricRibbonGraph) -> f64 {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    #[derive(PartialEq)]
    struct Key(f64);
    impl Eq for Key {}
    impl PartialOrd for Key {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Key {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&other.0)
        }
    }

    let rg = g.graph();
    let n = rg.n_half_edges();
    let mut best = f64::INFINITY;
    for d0 in 0..n {
        let mut dist = vec![f64::INFINITY; n];
        let mut heap = BinaryHeap::new();
        dist[d0] = g.length_of(d0);
        heap.push(Reverse((Key(dist[d0]), d0)));
        while let Some(Reverse((Key(dd), d))) = heap.pop() {
            if dd > dist[d] || dd >= best {
                continue;
            }
            if follows(rg, d, d0) {
                best = best.min(dd);
            }
            for s in successors(rg, d) {
                let nd = dd + g.length_of(s);
                if nd < dist[s] {
                    dist[s] = nd;
                    heap.push(Reverse((Key(nd), s)));
                }
            }
        }
    }
    best
}
