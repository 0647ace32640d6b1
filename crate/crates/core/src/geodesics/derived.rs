//! Multi-geodesics derived from edges, and their ideal Wolpert matrix.

use crate::ribbon::{HalfEdge, MetricRibbonGraph, RibbonGraph};

use super::{geodesic_representative, multi_iw, GeodesicError, GeodesicPath};

/// Number of times a walk runs along each edge, in either direction.
pub fn traversal_counts(g: &RibbonGraph, steps: &[HalfEdge]) -> Vec<u32> {
    let mut counts = vec![0; g.n_edges()];
    for &h in steps {
        counts[g.edge_of(h)] += 1;
    }
    counts
}

/// The simple multi-geodesic around the face or faces along edge `e`.
///
/// If the two sides of `e` lie on different faces, the curve runs around
/// both faces with `e` removed: the rest of one face followed by the rest of
/// the other. If both sides lie on one face, the face reads `e, P, e', Q`
/// and the two closed walks `P` and `Q` are the components. Each walk is
/// tightened to its geodesic; a component that wraps `k` times around a
/// primitive curve is listed as `k` copies of it.
pub fn derived_geodesic(g: &MetricRibbonGraph, e: usize) -> Result<Vec<GeodesicPath>, GeodesicError> {
    let rg = g.graph();
    if !rg.is_trivalent() {
        return Err(GeodesicError::NotTrivalent);
    }
    if e >= rg.n_edges() {
        return Err(crate::ribbon::RibbonError::NoSuchEdge(e).into());
    }
    let (h, t) = rg.edges()[e];
    let rest_of_face = |start: HalfEdge| -> Vec<HalfEdge> {
        let face = &rg.faces()[rg.face_of(start)];
        let pos = face.iter().position(|&x| x == start).unwrap();
        face[pos + 1..].iter().chain(&face[..pos]).copied().collect()
    };
    let walks: Vec<Vec<HalfEdge>> = if rg.face_of(h) != rg.face_of(t) {
        let mut w = rest_of_face(h);
        w.extend(rest_of_face(t));
        vec![w]
    } else {
        let after_h = rest_of_face(h);
        let cut = after_h.iter().position(|&x| x == t).unwrap();
        vec![after_h[..cut].to_vec(), after_h[cut + 1..].to_vec()]
    };
    let mut components = Vec::new();
    for w in walks {
        if w.is_empty() {
            continue;
        }
        match geodesic_representative(g, &w) {
            Ok(p) => {
                let (root, k) = p.primitive_root(g);
                components.extend(std::iter::repeat_n(root, k));
            }
            Err(GeodesicError::NullHomotopic) => {}
            Err(err) => return Err(err),
        }
    }
    Ok(components)
}

/// Derived multi-geodesics for every edge, in edge order.
pub fn derived_geodesics(g: &MetricRibbonGraph) -> Result<Vec<Vec<GeodesicPath>>, GeodesicError> {
    (0..g.graph().n_edges())
        .map(|e| derived_geodesic(g, e))
        .collect()
}

/// Skew-symmetric matrix of ideal Wolpert numbers between multi-geodesics.
pub fn s_matrix(g: &MetricRibbonGraph, multis: &[Vec<GeodesicPath>]) -> Result<Vec<Vec<i64>>, GeodesicError> {
    let n = multis.len();
    let mut s = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s[i][j] = multi_iw(g, &multis[i], &multis[j])?;
            }
        }
    }
    Ok(s)
}

/// Rank of an integer matrix by fraction-free elimination.
pub fn integer_rank(m: &[Vec<i64>]) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut rank = 0;
    let mut prev = 1i128;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| a[r][c] != 0) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..rows {
            for k in c + 1..cols {
                a[r][k] = (a[rank][c] * a[r][k] - a[r][c] * a[rank][k]) / prev;
            }
            a[r][c] = 0;
        }
        prev = a[rank][c];
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesics::is_simple;
    use crate::ribbon::{theta_11, theta_graph};

    #[test]
    fn ranks() {
        assert_eq!(integer_rank(&[vec![0, 1], vec![-1, 0]]), 2);
        assert_eq!(integer_rank(&[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]), 2);
        assert_eq!(integer_rank(&[vec![0, 0], vec![0, 0]]), 0);
        assert_eq!(
            integer_rank(&[vec![2, 4, 1], vec![6, 3, 5], vec![1, 1, 1]]),
            3
        );
    }

    #[test]
    fn theta_derived() {
        let g = theta_11(1.0, 1.0, 1.0).unwrap();
        let d = derived_geodesics(&g).unwrap();
        for comps in &d {
            assert!(!comps.is_empty());
            for c in comps {
                assert!(is_simple(&g, c).unwrap());
            }
        }
        let s = s_matrix(&g, &d).unwrap();
        assert_eq!(integer_rank(&s), 2);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(s[i][j], -s[j][i]);
            }
        }

        let planar = MetricRibbonGraph::new(theta_graph(false), vec![1.0; 3]).unwrap();
        let d = derived_geodesics(&planar).unwrap();
        let s = s_matrix(&planar, &d).unwrap();
        assert_eq!(integer_rank(&s), 0);
    }
}
