//! Density of the Kontsevich volume form on a cell.
//!
//! The lengths `k_i` of the derived multi-geodesics are linear in the edge
//! lengths. For a selection `I` of `d = dim` of them whose ideal Wolpert
//! matrix `S_I` is invertible, the volume form is `det(S_I)^(-1/2)` times
//! `dk_I`. Pulled back to an orthonormal chart of the cell this is the
//! constant `|det(C_I N)| / sqrt(det S_I)`, where `C` holds the coefficients
//! of the `k_i` and `N` spans the directions inside the cell.

use itertools::Itertools;
use nalgebra::DMatrix;

use super::polytope::{null_basis, numeric_rank};
use super::KontsevichError;
use crate::enumerate::CellDescriptor;
use crate::geodesics::{derived_geodesics, integer_rank, s_matrix, traversal_counts, GeodesicPath};
use crate::ribbon::MetricRibbonGraph;

#[derive(Clone, Debug)]
pub struct DerivedData {
    pub multis: Vec<Vec<GeodesicPath>>,
    pub s: Vec<Vec<i64>>,
    /// `coefficients[i][e]`: how often derived multi-geodesic `i` runs along
    /// edge `e`.
    pub coefficients: Vec<Vec<u32>>,
    pub rank: usize,
    /// Dimension of the cell.
    pub dimension: usize,
}

pub fn derived_data(cell: &CellDescriptor) -> Result<DerivedData, KontsevichError> {
    let rg = &cell.representative;
    let unit = MetricRibbonGraph::new(rg.clone(), vec![1.0; rg.n_edges()])?;
    let multis = derived_geodesics(&unit)?;
    let s = s_matrix(&unit, &multis)?;
    let coefficients = multis
        .iter()
        .map(|comps| {
            let mut c = vec![0u32; rg.n_edges()];
            for p in comps {
                for (acc, v) in c.iter_mut().zip(traversal_counts(rg, p.steps())) {
                    *acc += v;
                }
            }
            c
        })
        .collect();
    let rank = integer_rank(&s);
    let dimension = rg.n_edges() - numeric_rank(&incidence(cell));
    Ok(DerivedData {
        multis,
        s,
        coefficients,
        rank,
        dimension,
    })
}

fn incidence(cell: &CellDescriptor) -> DMatrix<f64> {
    let inc = cell.representative.face_incidence();
    DMatrix::from_fn(inc.len(), cell.representative.n_edges(), |f, e| inc[f][e] as f64)
}

fn principal(s: &[Vec<i64>], subset: &[usize]) -> Vec<Vec<i64>> {
    subset
        .iter()
        .map(|&i| subset.iter().map(|&j| s[i][j]).collect())
        .collect()
}

/// Selections of `dimension` derived geodesics with invertible `S_I`.
pub fn full_rank_subsets(data: &DerivedData) -> Vec<Vec<usize>> {
    (0..data.s.len())
        .combinations(data.dimension)
        .filter(|sub| integer_rank(&principal(&data.s, sub)) == sub.len())
        .collect()
}

pub fn cell_constant_for_subset(
    cell: &CellDescriptor,
    data: &DerivedData,
    subset: &[usize],
) -> Result<f64, KontsevichError> {
    if subset.is_empty() {
        return Ok(1.0);
    }
    let d = subset.len();
    let s_sub = principal(&data.s, subset);
    let s_det = DMatrix::from_fn(d, d, |i, j| s_sub[i][j] as f64).determinant();
    if s_det.abs() < 0.5 {
        return Err(KontsevichError::RankDeficient);
    }
    let null = null_basis(&incidence(cell));
    let e = cell.representative.n_edges();
    let c = DMatrix::from_fn(d, e, |i, k| data.coefficients[subset[i]][k] as f64);
    let jac = (c * null).determinant().abs();
    Ok(jac / s_det.abs().sqrt())
}

/// Constant density of the volume form in the cell's edge-length chart,
/// using the first invertible selection in lexicographic order.
pub fn cell_constant(cell: &CellDescriptor) -> Result<f64, KontsevichError> {
    let data = derived_data(cell)?;
    if data.dimension == 0 {
        return Ok(1.0);
    }
    let subset = full_rank_subsets(&data)
        .into_iter()
        .next()
        .ok_or(KontsevichError::RankDeficient)?;
    cell_constant_for_subset(cell, &data, &subset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_trivalent_types;

    #[test]
    fn one_holed_torus_constant() {
        let cell = &enumerate_trivalent_types(1, 1).unwrap()[0];
        let data = derived_data(cell).unwrap();
        assert_eq!(data.rank, 2);
        let subsets = full_rank_subsets(&data);
        assert!(!subsets.is_empty());
        let first = cell_constant_for_subset(cell, &data, &subsets[0]).unwrap();
        for s in &subsets {
            let c = cell_constant_for_subset(cell, &data, s).unwrap();
            assert!((c - first).abs() < 1e-9 * first);
        }
        assert!(first > 0.0);
    }

    #[test]
    fn pair_of_pants_constant_is_one() {
        for cell in enumerate_trivalent_types(0, 3).unwrap() {
            assert_eq!(cell_constant(&cell).unwrap(), 1.0);
        }
    }
}
