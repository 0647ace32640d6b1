//! Isomorphism of ribbon graphs and enumeration of trivalent types.
//!
//! An isomorphism is a bijection of half-edges commuting with `twin` and
//! `next`. Since the group generated by the two permutations acts
//! transitively on a connected graph, an isomorphism is fixed by the image of
//! a single half-edge. The canonical code relabels half-edges in breadth-first
//! order from a root (following `next` before `twin`) and records both
//! permutations in the new labels; the canonical form is the smallest code
//! over all roots and the roots attaining it are the automorphisms.

use crate::ribbon::{HalfEdge, RibbonError, RibbonGraph};

/// Relabelling code of `g` rooted at `root`: for each new label `i`,
/// `(next(i), twin(i))` in new labels, flattened.
fn rooted_code(g: &RibbonGraph, root: HalfEdge, label: &mut [usize], order: &mut Vec<HalfEdge>) -> Vec<u32> {
    let n = g.n_half_edges();
    label.iter_mut().for_each(|l| *l = usize::MAX);
    order.clear();
    label[root] = 0;
    order.push(root);
    let mut head = 0;
    while head < order.len() {
        let h = order[head];
        head += 1;
        for x in [g.next(h), g.twin(h)] {
            if label[x] == usize::MAX {
                label[x] = order.len();
                order.push(x);
            }
        }
    }
    debug_assert_eq!(order.len(), n);
    let mut code = Vec::with_capacity(2 * n);
    for &h in order.iter() {
        code.push(label[g.next(h)] as u32);
        code.push(label[g.twin(h)] as u32);
    }
    code
}

/// Smallest rooted code and the number of roots attaining it.
fn canonical_with_count(g: &RibbonGraph) -> (Vec<u32>, usize) {
    let n = g.n_half_edges();
    let mut label = vec![0; n];
    let mut order = Vec::with_capacity(n);
    let mut best = rooted_code(g, 0, &mut label, &mut order);
    let mut count = 1;
    for root in 1..n {
        let code = rooted_code(g, root, &mut label, &mut order);
        match code.cmp(&best) {
            std::cmp::Ordering::Less => {
                best = code;
                count = 1;
            }
            std::cmp::Ordering::Equal => count += 1,
            std::cmp::Ordering::Greater => {}
        }
    }
    (best, count)
}

/// Canonical code: equal for two graphs iff they are isomorphic.
pub fn canonical_code(g: &RibbonGraph) -> Vec<u32> {
    canonical_with_count(g).0
}

pub fn is_isomorphic(a: &RibbonGraph, b: &RibbonGraph) -> bool {
    a.n_half_edges() == b.n_half_edges()
        && a.n_vertices() == b.n_vertices()
        && a.n_faces() == b.n_faces()
        && canonical_code(a) == canonical_code(b)
}

/// Number of automorphisms (half-edge bijections commuting with `twin` and
/// `next`).
pub fn automorphisms(g: &RibbonGraph) -> usize {
    canonical_with_count(g).1
}

/// The graph rebuilt from a canonical code.
fn graph_from_code(code: &[u32]) -> RibbonGraph {
    let n = code.len() / 2;
    let next = (0..n).map(|i| code[2 * i] as usize).collect();
    let twin = (0..n).map(|i| code[2 * i + 1] as usize).collect();
    RibbonGraph::new(twin, next).expect("canonical code describes a valid graph")
}

/// An isomorphism class of trivalent ribbon graphs; indexes a top-dimensional
/// cell of the combinatorial moduli space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellDescriptor {
    /// Representative in canonical labelling.
    pub representative: RibbonGraph,
    pub automorphism_count: usize,
    pub genus: usize,
    pub n_faces: usize,
}

pub fn check_admissible(g: i64, n: i64) -> Result<(), RibbonError> {
    if g < 0 || n < 1 || (g == 0 && n < 3) || 6 * g - 6 + 3 * n <= 0 {
        return Err(RibbonError::InadmissibleType(g, n));
    }
    Ok(())
}

/// Calls `f` on every perfect matching of `0..n` (as a twin array).
fn for_each_matching(n: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(twin: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        let Some(first) = twin.iter().position(|&t| t == usize::MAX) else {
            f(twin);
            return;
        };
        for other in first + 1..twin.len() {
            if twin[other] == usize::MAX {
                twin[first] = other;
                twin[other] = first;
                rec(twin, f);
                twin[first] = usize::MAX;
                twin[other] = usize::MAX;
            }
        }
    }
    let mut twin = vec![usize::MAX; n];
    rec(&mut twin, f);
}

/// All isomorphism classes of connected trivalent ribbon graphs of type
/// `(g, n)`, sorted by canonical code.
///
/// Vertex cycles are fixed to `(3k, 3k+1, 3k+2)` and every perfect matching
/// of the half-edges is tried as `twin`; every trivalent graph is isomorphic
/// to one of these.
pub fn enumerate_trivalent_types(g: i64, n: i64) -> Result<Vec<CellDescriptor>, RibbonError> {
    check_admissible(g, n)?;
    let n_edges = (6 * g - 6 + 3 * n) as usize;
    let n_vertices = (4 * g - 4 + 2 * n) as usize;
    let n_half = 2 * n_edges;
    let next: Vec<usize> = (0..n_half)
        .map(|h| if h % 3 == 2 { h - 2 } else { h + 1 })
        .collect();
    debug_assert_eq!(n_half, 3 * n_vertices);

    let mut found: std::collections::BTreeMap<Vec<u32>, usize> = Default::default();
    for_each_matching(n_half, &mut |twin| {
        let Ok(graph) = RibbonGraph::new(twin.to_vec(), next.clone()) else {
            return;
        };
        if graph.topological_type() != (g as usize, n as usize) {
            return;
        }
        let (code, count) = canonical_with_count(&graph);
        found.entry(code).or_insert(count);
    });

    Ok(found
        .into_iter()
        .map(|(code, automorphism_count)| CellDescriptor {
            representative: graph_from_code(&code),
            automorphism_count,
            genus: g as usize,
            n_faces: n as usize,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ribbon::{rose_graph, theta_graph};

    #[test]
    fn theta_isomorphism() {
        let a = theta_graph(true);
        let b = theta_graph(false);
        assert!(is_isomorphic(&a, &a));
        assert!(!is_isomorphic(&a, &b));
        // relabel by a permutation of half-edges
        let p = [4, 0, 5, 2, 1, 3];
        let mut twin = vec![0; 6];
        let mut next = vec![0; 6];
        for h in 0..6 {
            twin[p[h]] = p[a.twin(h)];
            next[p[h]] = p[a.next(h)];
        }
        let c = RibbonGraph::new(twin, next).unwrap();
        assert!(is_isomorphic(&a, &c));
    }

    #[test]
    fn canonical_representative_is_isomorphic() {
        for cell in enumerate_trivalent_types(0, 4).unwrap() {
            assert!(is_isomorphic(&cell.representative, &cell.representative));
            assert_eq!(canonical_code(&cell.representative), {
                let (c, _) = canonical_with_count(&cell.representative);
                c
            });
        }
    }

    #[test]
    fn admissibility() {
        assert_eq!(enumerate_trivalent_types(0, 2), Err(RibbonError::InadmissibleType(0, 2)));
        assert!(enumerate_trivalent_types(1, 0).is_err());
        assert!(enumerate_trivalent_types(-1, 3).is_err());
    }

    #[test]
    fn small_counts() {
        let c11 = enumerate_trivalent_types(1, 1).unwrap();
        assert_eq!(c11.len(), 1);
        assert_eq!(c11[0].automorphism_count, 6);
        assert_eq!(enumerate_trivalent_types(0, 3).unwrap().len(), 2);
    }

    #[test]
    fn rose_automorphisms() {
        // rotation by a quarter turn maps the genus-one two-loop rose to itself
        assert_eq!(automorphisms(&rose_graph(2)), 4);
    }
}
