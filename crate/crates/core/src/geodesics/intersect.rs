//! Intersections of geodesics on trivalent ribbon graphs.
//!
//! Two geodesics meet along maximal shared runs of directed edges, taking the
//! second one in either orientation. At each end of a run the two curves
//! leave along different half-edges. Looking along the run, a curve arrives
//! from the left if the half-edge it arrives on follows the first run
//! half-edge counterclockwise, and leaves to the right if the half-edge it
//! leaves on follows the last run half-edge (seen from the far end)
//! counterclockwise. A run is a crossing when the first curve arrives and
//! leaves on opposite sides; it counts `+1` when it passes from left to right
//! and `-1` from right to left.

use crate::ribbon::{HalfEdge, MetricRibbonGraph, RibbonGraph};

use super::{reverse_steps, GeodesicError, GeodesicPath};

/// A crossing between two geodesics along a shared run of edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphIntersection {
    /// Shared directed edges, in the direction of travel of the first curve.
    pub body: Vec<HalfEdge>,
    /// Half-edges the first and second curve arrive on, then leave on.
    pub tails: [HalfEdge; 4],
    /// Whether the second curve runs along the body against its orientation.
    pub opposite: bool,
    pub sign: i8,
}

fn require_trivalent(g: &RibbonGraph) -> Result<(), GeodesicError> {
    if g.is_trivalent() {
        Ok(())
    } else {
        Err(GeodesicError::NotTrivalent)
    }
}

struct Run {
    i: usize,
    j: usize,
    len: usize,
}

/// Maximal common runs of two cyclic step sequences. With `same` set the two
/// sequences are the same curve and runs aligned with themselves are skipped.
fn maximal_runs(a: &[HalfEdge], b: &[HalfEdge], same: bool) -> Vec<Run> {
    let (m1, m2) = (a.len(), b.len());
    let cap = m1 + m2;
    let mut runs = Vec::new();
    for i in 0..m1 {
        for j in 0..m2 {
            if (same && i == j) || a[i] != b[j] || a[(i + m1 - 1) % m1] == b[(j + m2 - 1) % m2] {
                continue;
            }
            let mut len = 1;
            while len < cap && a[(i + len) % m1] == b[(j + len) % m2] {
                len += 1;
            }
            runs.push(Run { i, j, len });
        }
    }
    runs
}

fn run_intersection(g: &RibbonGraph, a: &[HalfEdge], b: &[HalfEdge], run: &Run, opposite: bool) -> GraphIntersection {
    let (m1, m2) = (a.len(), b.len());
    let first = a[run.i];
    let a_in = g.twin(a[(run.i + m1 - 1) % m1]);
    let b_in = g.twin(b[(run.j + m2 - 1) % m2]);
    let last = g.twin(a[(run.i + run.len - 1) % m1]);
    let a_out = a[(run.i + run.len) % m1];
    let b_out = b[(run.j + run.len) % m2];
    let from_left = a_in == g.next(first);
    let to_right = a_out == g.next(last);
    let sign = match (from_left, to_right) {
        (true, true) => 1,
        (false, false) => -1,
        _ => 0,
    };
    GraphIntersection {
        body: (0..run.len).map(|k| a[(run.i + k) % m1]).collect(),
        tails: [a_in, b_in, a_out, b_out],
        opposite,
        sign,
    }
}

/// All maximal shared runs of `gamma` with `eta` (in both orientations),
/// crossing or not.
fn maximal_pairs(g: &MetricRibbonGraph, gamma: &GeodesicPath, eta: &GeodesicPath) -> Vec<GraphIntersection> {
    let rg = g.graph();
    let a = gamma.steps();
    let mut out = Vec::new();
    for opposite in [false, true] {
        let b = if opposite {
            reverse_steps(rg, eta.steps())
        } else {
            eta.steps().to_vec()
        };
        for run in maximal_runs(a, &b, false) {
            out.push(run_intersection(rg, a, &b, &run, opposite));
        }
    }
    out
}

/// Crossings of two geodesics.
pub fn intersections(
    g: &MetricRibbonGraph,
    gamma: &GeodesicPath,
    eta: &GeodesicPath,
) -> Result<Vec<GraphIntersection>, GeodesicError> {
    require_trivalent(g.graph())?;
    Ok(maximal_pairs(g, gamma, eta)
        .into_iter()
        .filter(|p| p.sign != 0)
        .collect())
}

/// Geometric intersection count `i(gamma, eta)`.
pub fn intersection_number(
    g: &MetricRibbonGraph,
    gamma: &GeodesicPath,
    eta: &GeodesicPath,
) -> Result<usize, GeodesicError> {
    Ok(intersections(g, gamma, eta)?.len())
}

/// Ideal Wolpert number as the sum of the signs of all maximal shared runs.
pub fn ideal_wolpert_pairs(
    g: &MetricRibbonGraph,
    gamma: &GeodesicPath,
    eta: &GeodesicPath,
) -> Result<i64, GeodesicError> {
    require_trivalent(g.graph())?;
    Ok(maximal_pairs(g, gamma, eta)
        .iter()
        .map(|p| p.sign as i64)
        .sum())
}

/// How `steps` passes through its `j`-th edge: `-1` when it arrives from the
/// left and leaves to the right, `+1` for the mirror image, `0` when it turns
/// the same way at both ends.
fn hop(g: &RibbonGraph, steps: &[HalfEdge], j: usize) -> i64 {
    let m = steps.len();
    let h = steps[j];
    let from_left = g.twin(steps[(j + m - 1) % m]) == g.next(h);
    let to_right = steps[(j + 1) % m] == g.next(g.twin(h));
    match (from_left, to_right) {
        (true, true) => -1,
        (false, false) => 1,
        _ => 0,
    }
}

/// Ideal Wolpert number computed edge by edge: every traversal of an edge by
/// `eta` contributes its hop times the number of times `gamma` runs along
/// that edge in either direction.
pub fn ideal_wolpert_edgerule(
    g: &MetricRibbonGraph,
    gamma: &GeodesicPath,
    eta: &GeodesicPath,
) -> Result<i64, GeodesicError> {
    let rg = g.graph();
    require_trivalent(rg)?;
    let counts = super::traversal_counts(rg, gamma.steps());
    let b = eta.steps();
    Ok((0..b.len())
        .map(|j| hop(rg, b, j) * counts[rg.edge_of(b[j])] as i64)
        .sum())
}

/// Ideal Wolpert number of two multi-geodesics, additive over components.
pub fn multi_iw(
    g: &MetricRibbonGraph,
    a: &[GeodesicPath],
    b: &[GeodesicPath],
) -> Result<i64, GeodesicError> {
    let mut total = 0;
    for x in a {
        for y in b {
            total += ideal_wolpert_edgerule(g, x, y)?;
        }
    }
    Ok(total)
}

/// A geodesic is simple when no two of its own subarcs cross. A geodesic
/// that runs along every edge at most once has no pair of subarcs to
/// compare, so it is simple on any graph; otherwise the graph must be
/// trivalent.
pub fn is_simple(g: &MetricRibbonGraph, gamma: &GeodesicPath) -> Result<bool, GeodesicError> {
    let rg = g.graph();
    let a = gamma.steps();
    if super::traversal_counts(rg, a).iter().all(|&c| c <= 1) {
        return Ok(true);
    }
    require_trivalent(rg)?;
    if maximal_runs(a, a, true)
        .iter()
        .any(|r| run_intersection(rg, a, a, r, false).sign != 0)
    {
        return Ok(false);
    }
    let rev = reverse_steps(rg, a);
    Ok(!maximal_runs(a, &rev, false)
        .iter()
        .any(|r| run_intersection(rg, a, &rev, r, true).sign != 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesics::enumerate_geodesics;
    use crate::ribbon::{rose_graph, theta_11, theta_graph};

    #[test]
    fn theta_pairs() {
        let g = theta_11(1.0, 1.0, 1.0).unwrap();
        let gs = enumerate_geodesics(&g, 2.0).unwrap();
        assert_eq!(gs.len(), 3);
        for a in &gs {
            assert!(is_simple(&g, a).unwrap());
            for b in &gs {
                let i = intersection_number(&g, a, b).unwrap();
                let iw = ideal_wolpert_pairs(&g, a, b).unwrap();
                if a == b {
                    assert_eq!((i, iw), (0, 0));
                } else {
                    // distinct 2-edge curves on the one-holed torus meet once
                    assert_eq!(i, 1);
                    assert_eq!(iw.abs(), 1);
                    assert_eq!(iw, ideal_wolpert_edgerule(&g, a, b).unwrap());
                }
            }
        }
    }

    #[test]
    fn planar_theta_curves_do_not_cross() {
        let g = crate::MetricRibbonGraph::new(theta_graph(false), vec![1.0; 3]).unwrap();
        let gs = enumerate_geodesics(&g, 2.0).unwrap();
        for a in &gs {
            for b in &gs {
                assert_eq!(intersection_number(&g, a, b).unwrap(), 0);
            }
        }
    }

    #[test]
    fn self_crossing_detected() {
        let g = theta_11(1.0, 1.0, 1.0).unwrap();
        let gs = enumerate_geodesics(&g, 6.0).unwrap();
        assert!(gs.iter().any(|p| !is_simple(&g, p).unwrap()));
        assert!(gs
            .iter()
            .filter(|p| p.combinatorial_length() == 2)
            .all(|p| is_simple(&g, p).unwrap()));
    }

    #[test]
    fn non_trivalent_rose() {
        let g = crate::MetricRibbonGraph::new(rose_graph(2), vec![1.0, 1.0]).unwrap();
        let gs = enumerate_geodesics(&g, 2.0).unwrap();
        let loop_curve = gs.iter().find(|p| p.combinatorial_length() == 1).unwrap();
        assert!(is_simple(&g, loop_curve).unwrap());
        assert_eq!(
            intersections(&g, &gs[0], &gs[1]),
            Err(GeodesicError::NotTrivalent)
        );
    }
}
