//! Upper bound on the critical exponent by contraction to a rose.
//!
//! Contracting a non-loop edge cannot decrease the critical exponent, and
//! shortening edges cannot decrease it either. Contracting down to a single
//! vertex with `k` loops and then shrinking every loop to the shortest one,
//! of length `eps`, gives a rose whose exponent is `ln(2k - 1) / eps`.

use crate::ribbon::MetricRibbonGraph;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpperBound {
    pub value: f64,
    pub loops: usize,
    pub min_loop: f64,
}

/// Contracts the shortest non-loop edge until one vertex remains.
pub fn upper_bound_delta(g: &MetricRibbonGraph) -> UpperBound {
    let mut cur = g.clone();
    while cur.graph().n_vertices() > 1 {
        let rg = cur.graph();
        let e = (0..rg.n_edges())
            .filter(|&e| !rg.is_loop(e))
            .min_by(|&a, &b| cur.edge_length(a).total_cmp(&cur.edge_length(b)))
            .expect("a connected graph with two vertices has a non-loop edge");
        cur = cur.contract_edge(e).expect("non-loop edge contracts");
    }
    let loops = cur.graph().n_edges();
    let min_loop = cur.lengths().iter().copied().fold(f64::INFINITY, f64::min);
    let value = ((2 * loops) as f64 - 1.0).ln() / min_loop;
    UpperBound {
        value,
        loops,
        min_loop,
    }
}

/// A constant `K` with `upper_bound_delta(g) <= K / systole(g)` for every
/// trivalent graph with `vertices` vertices and `loops = E - V + 1`.
///
/// Each loop of the final rose closes up, in the original graph, into a
/// cycle made of that edge and at most `V - 1` contracted edges, each no
/// longer than it when contracted. That cycle is a geodesic, so the loop is
/// at least `systole / V`.
pub fn upper_bound_constant(vertices: usize, loops: usize) -> f64 {
    vertices as f64 * ((2 * loops) as f64 - 1.0).ln()
}
