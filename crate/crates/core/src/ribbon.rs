//! Combinatorial and metric ribbon graphs.
//!
//! A ribbon graph is stored on a dense set of half-edges `0..2E` by two
//! permutations: `twin`, a fixed-point-free involution pairing the two sides
//! of every edge, and `next`, whose cycles are the counterclockwise cyclic
//! orders around the vertices. Faces are the cycles of `next ∘ twin`, so a
//! face visits every edge once per side.
//!
//! A half-edge doubles as a directed edge leaving the vertex it is attached
//! to: half-edge `h` runs from `vertex_of(h)` to `vertex_of(twin(h))`.

use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

pub type HalfEdge = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RibbonError {
    #[error("graph has no half-edges")]
    Empty,
    #[error("twin and next_at_vertex must be permutations of the same index set: {0}")]
    PermutationInvalid(String),
    #[error("twin is not an involution at half-edge {0}")]
    NotInvolution(HalfEdge),
    #[error("twin fixes half-edge {0}")]
    FixedPointInTwin(HalfEdge),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("Euler characteristic V - E + F = {0} does not give a non-negative integer genus")]
    InvalidEuler(i64),
    #[error("expected {expected} edge lengths, got {got}")]
    LengthCountMismatch { expected: usize, got: usize },
    #[error("edge {edge} has non-positive or non-finite length {length}")]
    NonPositiveLength { edge: usize, length: f64 },
    #[error("cannot contract loop edge {0}")]
    LoopContraction(usize),
    #[error("edge index {0} out of range")]
    NoSuchEdge(usize),
    #[error("scale factor must be positive and finite, got {0}")]
    NonPositiveScale(f64),
    #[error("inadmissible topological type (g, n) = ({0}, {1})")]
    InadmissibleType(i64, i64),
}

/// A validated connected ribbon graph with its derived cell structure.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RibbonGraph {
    twin: Vec<HalfEdge>,
    next: Vec<HalfEdge>,
    prev: Vec<HalfEdge>,
    vertex_of: Vec<usize>,
    vertices: Vec<Vec<HalfEdge>>,
    edge_of: Vec<usize>,
    edges: Vec<(HalfEdge, HalfEdge)>,
    face_of: Vec<usize>,
    faces: Vec<Vec<HalfEdge>>,
    genus: usize,
}

fn check_permutation(name: &str, perm: &[usize]) -> Result<(), RibbonError> {
    let mut seen = vec![false; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        if p >= perm.len() {
            return Err(RibbonError::PermutationInvalid(format!(
                "{name}[{i}] = {p} is out of range"
            )));
        }
        if seen[p] {
            return Err(RibbonError::PermutationInvalid(format!(
                "{name} maps two half-edges to {p}"
            )));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Cycles of a permutation, each rotated to start at its smallest element,
/// listed in order of that element.
fn cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut cyc = Vec::new();
        let mut h = start;
        while !seen[h] {
            seen[h] = true;
            cyc.push(h);
            h = perm[h];
        }
        out.push(cyc);
    }
    out
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl RibbonGraph {
    /// Validates `twin` and `next_at_vertex` and derives vertices, edges and
    /// faces.
    pub fn new(twin: Vec<HalfEdge>, next_at_vertex: Vec<HalfEdge>) -> Result<Self, RibbonError> {
        let n = twin.len();
        if n == 0 {
            return Err(RibbonError::Empty);
        }
        if next_at_vertex.len() != n {
            return Err(RibbonError::PermutationInvalid(format!(
                "twin has {} entries but next_at_vertex has {}",
                n,
                next_at_vertex.len()
            )));
        }
        check_permutation("next_at_vertex", &next_at_vertex)?;
        for (h, &t) in twin.iter().enumerate() {
            if t >= n {
                return Err(RibbonError::PermutationInvalid(format!(
                    "twin[{h}] = {t} is out of range"
                )));
            }
        }
        for (h, &t) in twin.iter().enumerate() {
            if t == h {
                return Err(RibbonError::FixedPointInTwin(h));
            }
            if twin[t] != h {
                return Err(RibbonError::NotInvolution(h));
            }
        }

        let mut parent: Vec<usize> = (0..n).collect();
        for h in 0..n {
            for other in [twin[h], next_at_vertex[h]] {
                let (a, b) = (find(&mut parent, h), find(&mut parent, other));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        let root = find(&mut parent, 0);
        if (0..n).any(|h| find(&mut parent, h) != root) {
            return Err(RibbonError::Disconnected);
        }

        let vertices = cycles(&next_at_vertex);
        let mut vertex_of = vec![0; n];
        for (v, cyc) in vertices.iter().enumerate() {
            for &h in cyc {
                vertex_of[h] = v;
            }
        }
        let mut prev = vec![0; n];
        for (h, &s) in next_at_vertex.iter().enumerate() {
            prev[s] = h;
        }

        let mut edges = Vec::with_capacity(n / 2);
        let mut edge_of = vec![0; n];
        for h in 0..n {
            if h < twin[h] {
                edge_of[h] = edges.len();
                edge_of[twin[h]] = edges.len();
                edges.push((h, twin[h]));
            }
        }

        let face_perm: Vec<usize> = (0..n).map(|h| next_at_vertex[twin[h]]).collect();
        let faces = cycles(&face_perm);
        let mut face_of = vec![0; n];
        for (f, cyc) in faces.iter().enumerate() {
            for &h in cyc {
                face_of[h] = f;
            }
        }

        let chi = vertices.len() as i64 - edges.len() as i64 + faces.len() as i64;
        if chi > 2 || (2 - chi) % 2 != 0 {
            return Err(RibbonError::InvalidEuler(chi));
        }
        let genus = ((2 - chi) / 2) as usize;

        Ok(Self {
            twin,
            next: next_at_vertex,
            prev,
            vertex_of,
            vertices,
            edge_of,
            edges,
            face_of,
            faces,
            genus,
        })
    }

    /// Builds a graph from vertex cycles (counterclockwise) and twin pairs.
    pub fn from_cycles(
        n_half_edges: usize,
        twin_pairs: &[(HalfEdge, HalfEdge)],
        vertex_cycles: &[Vec<HalfEdge>],
    ) -> Result<Self, RibbonError> {
        let mut twin = vec![usize::MAX; n_half_edges];
        for &(a, b) in twin_pairs {
            if a >= n_half_edges || b >= n_half_edges {
                return Err(RibbonError::PermutationInvalid(format!(
                    "twin pair ({a}, {b}) out of range"
                )));
            }
            if twin[a] != usize::MAX || twin[b] != usize::MAX {
                return Err(RibbonError::NotInvolution(if twin[a] != usize::MAX { a } else { b }));
            }
            twin[a] = b;
            twin[b] = a;
        }
        if let Some(h) = twin.iter().position(|&t| t == usize::MAX) {
            return Err(RibbonError::PermutationInvalid(format!(
                "half-edge {h} has no twin"
            )));
        }
        let mut next = vec![usize::MAX; n_half_edges];
        for cyc in vertex_cycles {
            for (i, &h) in cyc.iter().enumerate() {
                if h >= n_half_edges || next[h] != usize::MAX {
                    return Err(RibbonError::PermutationInvalid(format!(
                        "half-edge {h} appears in more than one vertex or is out of range"
                    )));
                }
                next[h] = cyc[(i + 1) % cyc.len()];
            }
        }
        if let Some(h) = next.iter().position(|&t| t == usize::MAX) {
            return Err(RibbonError::PermutationInvalid(format!(
                "half-edge {h} is not attached to a vertex"
            )));
        }
        Self::new(twin, next)
    }

    pub fn n_half_edges(&self) -> usize {
        self.twin.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    #[inline]
    pub fn twin(&self, h: HalfEdge) -> HalfEdge {
        self.twin[h]
    }

    /// Counterclockwise successor of `h` around its vertex.
    #[inline]
    pub fn next(&self, h: HalfEdge) -> HalfEdge {
        self.next[h]
    }

    #[inline]
    pub fn prev(&self, h: HalfEdge) -> HalfEdge {
        self.prev[h]
    }

    #[inline]
    pub fn vertex_of(&self, h: HalfEdge) -> usize {
        self.vertex_of[h]
    }

    #[inline]
    pub fn edge_of(&self, h: HalfEdge) -> usize {
        self.edge_of[h]
    }

    #[inline]
    pub fn face_of(&self, h: HalfEdge) -> usize {
        self.face_of[h]
    }

    pub fn twin_map(&self) -> &[HalfEdge] {
        &self.twin
    }

    pub fn next_map(&self) -> &[HalfEdge] {
        &self.next
    }

    /// Vertex cycles, each starting at its smallest half-edge.
    pub fn vertices(&self) -> &[Vec<HalfEdge>] {
        &self.vertices
    }

    /// Edges as `(smaller, larger)` half-edge pairs, ordered by the smaller one.
    pub fn edges(&self) -> &[(HalfEdge, HalfEdge)] {
        &self.edges
    }

    /// Face cycles of `next ∘ twin`, each starting at its smallest half-edge.
    pub fn faces(&self) -> &[Vec<HalfEdge>] {
        &self.faces
    }

    pub fn degree(&self, v: usize) -> usize {
        self.vertices[v].len()
    }

    pub fn is_trivalent(&self) -> bool {
        self.vertices.iter().all(|c| c.len() == 3)
    }

    pub fn is_loop(&self, edge: usize) -> bool {
        let (a, b) = self.edges[edge];
        self.vertex_of[a] == self.vertex_of[b]
    }

    /// `(genus, number of faces)`.
    pub fn topological_type(&self) -> (usize, usize) {
        (self.genus, self.faces.len())
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// How many sides of `edge` lie on each face (0, 1 or 2).
    pub fn face_incidence(&self) -> Vec<Vec<u8>> {
        let mut inc = vec![vec![0u8; self.n_edges()]; self.n_faces()];
        for h in 0..self.n_half_edges() {
            inc[self.face_of[h]][self.edge_of[h]] += 1;
        }
        inc
    }

    /// Same underlying graph with new counterclockwise orders drawn uniformly
    /// at random at every vertex. Half-edge and edge labels are unchanged.
    pub fn rerandomize_cyclic_orders<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        let mut next = vec![0; self.n_half_edges()];
        for cyc in &self.vertices {
            let mut order = cyc.clone();
            order.shuffle(rng);
            for (i, &h) in order.iter().enumerate() {
                next[h] = order[(i + 1) % order.len()];
            }
        }
        Self::new(self.twin.clone(), next).expect("reordering keeps a valid connected graph")
    }
}

/// A ribbon graph with a positive length on every edge.
///
/// `lengths` are indexed by edge number (see [`RibbonGraph::edges`]). When the
/// graph was read with exact rational lengths they are kept alongside so the
/// polynomial route of the zeta module can use them.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricRibbonGraph {
    graph: RibbonGraph,
    lengths: Vec<f64>,
    exact: Option<Vec<Rational64>>,
}

impl MetricRibbonGraph {
    pub fn new(graph: RibbonGraph, lengths: Vec<f64>) -> Result<Self, RibbonError> {
        if lengths.len() != graph.n_edges() {
            return Err(RibbonError::LengthCountMismatch {
                expected: graph.n_edges(),
                got: lengths.len(),
            });
        }
        for (edge, &length) in lengths.iter().enumerate() {
            if !(length > 0.0 && length.is_finite()) {
                return Err(RibbonError::NonPositiveLength { edge, length });
            }
        }
        Ok(Self {
            graph,
            lengths,
            exact: None,
        })
    }

    pub fn with_exact_lengths(
        graph: RibbonGraph,
        lengths: Vec<Rational64>,
    ) -> Result<Self, RibbonError> {
        let floats = lengths
            .iter()
            .map(|r| *r.numer() as f64 / *r.denom() as f64)
            .collect();
        let mut g = Self::new(graph, floats)?;
        g.exact = Some(lengths);
        Ok(g)
    }

    pub fn graph(&self) -> &RibbonGraph {
        &self.graph
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn exact_lengths(&self) -> Option<&[Rational64]> {
        self.exact.as_deref()
    }

    #[inline]
    pub fn edge_length(&self, edge: usize) -> f64 {
        self.lengths[edge]
    }

    /// Length of the edge under half-edge `h`.
    #[inline]
    pub fn length_of(&self, h: HalfEdge) -> f64 {
        self.lengths[self.graph.edge_of(h)]
    }

    pub fn total_length(&self) -> f64 {
        self.lengths.iter().sum()
    }

    pub fn mean_edge_length(&self) -> f64 {
        self.total_length() / self.lengths.len() as f64
    }

    /// Face lengths, one per face of [`RibbonGraph::faces`]; each face counts
    /// every edge side it runs along.
    pub fn face_lengths(&self) -> Vec<f64> {
        self.graph
            .faces()
            .iter()
            .map(|f| f.iter().map(|&h| self.length_of(h)).sum())
            .collect()
    }

    /// Multiplies every edge length by `alpha`.
    pub fn scale(&self, alpha: f64) -> Result<Self, RibbonError> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(RibbonError::NonPositiveScale(alpha));
        }
        Ok(Self {
            graph: self.graph.clone(),
            lengths: self.lengths.iter().map(|l| l * alpha).collect(),
            exact: None,
        })
    }

    /// Exact rescaling; keeps rational lengths when present.
    pub fn scale_exact(&self, alpha: Rational64) -> Result<Self, RibbonError> {
        if *alpha.numer() <= 0 {
            return Err(RibbonError::NonPositiveScale(
                *alpha.numer() as f64 / *alpha.denom() as f64,
            ));
        }
        let a = *alpha.numer() as f64 / *alpha.denom() as f64;
        let mut scaled = self.scale(a)?;
        if let Some(ex) = &self.exact {
            let ex: Vec<Rational64> = ex.iter().map(|r| r * alpha).collect();
            scaled.lengths = ex
                .iter()
                .map(|r| *r.numer() as f64 / *r.denom() as f64)
                .collect();
            scaled.exact = Some(ex);
        }
        Ok(scaled)
    }

    pub fn rerandomize_cyclic_orders<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        Self {
            graph: self.graph.rerandomize_cyclic_orders(rng),
            lengths: self.lengths.clone(),
            exact: self.exact.clone(),
        }
    }

    /// Contracts a non-loop edge, merging its endpoints. The merged vertex
    /// reads the cyclic order of the tail vertex after the edge followed by
    /// that of the head vertex after the edge. Half-edges are relabelled
    /// densely in their original order; remaining lengths are carried over.
    pub fn contract_edge(&self, edge: usize) -> Result<Self, RibbonError> {
        let g = &self.graph;
        if edge >= g.n_edges() {
            return Err(RibbonError::NoSuchEdge(edge));
        }
        if g.is_loop(edge) {
            return Err(RibbonError::LoopContraction(edge));
        }
        let (a, b) = g.edges()[edge];
        let mut new_next = g.next.clone();
        let (pa, pb) = (g.prev[a], g.prev[b]);
        let (na, nb) = (g.next[a], g.next[b]);
        // Splice: ... pa -> nb ... pb -> na ..., dropping a and b.
        if pa != a {
            new_next[pa] = if nb != b { nb } else { na };
        }
        if pb != b {
            new_next[pb] = if na != a { na } else { nb };
        }

        let n = g.n_half_edges();
        let mut relabel = vec![usize::MAX; n];
        let mut k = 0;
        for (h, slot) in relabel.iter_mut().enumerate() {
            if h != a && h != b {
                *slot = k;
                k += 1;
            }
        }
        let mut twin = vec![0; k];
        let mut next = vec![0; k];
        for h in 0..n {
            if h == a || h == b {
                continue;
            }
            twin[relabel[h]] = relabel[g.twin[h]];
            next[relabel[h]] = relabel[new_next[h]];
        }
        let graph = RibbonGraph::new(twin, next)?;
        let mut lengths = vec![0.0; graph.n_edges()];
        let mut exact = self.exact.as_ref().map(|_| vec![Rational64::from_integer(0); graph.n_edges()]);
        for (old_edge, &(h, _)) in g.edges().iter().enumerate() {
            if old_edge == edge {
                continue;
            }
            let new_edge = graph.edge_of(relabel[h]);
            lengths[new_edge] = self.lengths[old_edge];
            if let (Some(dst), Some(src)) = (exact.as_mut(), self.exact.as_ref()) {
                dst[new_edge] = src[old_edge];
            }
        }
        Ok(Self {
            graph,
            lengths,
            exact,
        })
    }
}

/// Theta graph on half-edges `0..6` with edges `(0 3)`, `(1 4)`, `(2 5)`.
///
/// With `one_face = true` the vertex orders are `(0 1 2)(3 4 5)`, giving a
/// single face (type (1,1)); otherwise `(0 1 2)(3 5 4)` with three faces
/// (type (0,3)).
pub fn theta_graph(one_face: bool) -> RibbonGraph {
    let second = if one_face { vec![3, 4, 5] } else { vec![3, 5, 4] };
    RibbonGraph::from_cycles(6, &[(0, 3), (1, 4), (2, 5)], &[vec![0, 1, 2], second])
        .expect("theta graph is valid")
}

/// One vertex with `loops` loops, half-edges `2i, 2i+1` forming loop `i`.
/// The cyclic order `0, 2, 1, 3, 4, 6, 5, 7, ...` interleaves consecutive
/// pairs of loops.
pub fn rose_graph(loops: usize) -> RibbonGraph {
    assert!(loops >= 1);
    let pairs: Vec<(usize, usize)> = (0..loops).map(|i| (2 * i, 2 * i + 1)).collect();
    let mut order = Vec::with_capacity(2 * loops);
    let mut i = 0;
    while i + 1 < loops {
        order.extend([2 * i, 2 * i + 2, 2 * i + 1, 2 * i + 3]);
        i += 2;
    }
    if i < loops {
        order.extend([2 * i, 2 * i + 1]);
    }
    RibbonGraph::from_cycles(2 * loops, &pairs, &[order]).expect("rose graph is valid")
}

/// Metric theta graph of type (1,1) with edge lengths `x, y, z` on edges
/// `0, 1, 2`.
pub fn theta_11(x: f64, y: f64, z: f64) -> Result<MetricRibbonGraph, RibbonError> {
    MetricRibbonGraph::new(theta_graph(true), vec![x, y, z])
}
