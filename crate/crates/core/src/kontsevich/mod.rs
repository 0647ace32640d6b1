//! Sampling the Kontsevich measure on spaces of metric ribbon graphs with
//! fixed boundary lengths.
//!
//! A trivalent ribbon graph with labelled faces spans a top-dimensional cell
//! whose points are its positive edge lengths with prescribed face lengths.
//! On a cell the Kontsevich volume form is a constant multiple of Lebesgue
//! measure in those coordinates.

mod constant;
mod polytope;
mod sampler;

pub use constant::{cell_constant, cell_constant_for_subset, derived_data, full_rank_subsets, DerivedData};
pub use polytope::{HitAndRun, Polytope};
pub use sampler::{
    sample_space, short_geodesic_probability, KontsevichSampler, ProbabilityEstimate, SamplePoint,
    SamplerOptions,
};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::enumerate::CellDescriptor;
use crate::geodesics::GeodesicError;
use crate::ribbon::{MetricRibbonGraph, RibbonError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KontsevichError {
    #[error("cell is empty for these boundary lengths")]
    EmptyCell,
    #[error("cell is a single point")]
    ZeroDimensional,
    #[error("no invertible selection of derived geodesics")]
    RankDeficient,
    #[error("invalid boundary lengths: {0}")]
    InvalidBoundary(String),
    #[error("the paper-11 constraint applies to type (1,1) only")]
    ModeUnsupported,
    #[error("sample count must be at least {0}")]
    TooFewSamples(usize),
    #[error(transparent)]
    Ribbon(#[from] RibbonError),
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
}

/// How face lengths constrain edge lengths.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ConstraintMode {
    /// Every face length is the sum over the edge sides it runs along.
    #[default]
    Standard,
    /// Type (1,1) only: the three edge lengths sum to the boundary length.
    Paper11,
}

impl ConstraintMode {
    pub fn name(self) -> &'static str {
        match self {
            ConstraintMode::Standard => "standard",
            ConstraintMode::Paper11 => "paper-11",
        }
    }
}

/// Edge-length polytope of one cell with one assignment of boundary lengths
/// to faces.
#[derive(Clone, Debug)]
pub struct CellPolytope {
    pub cell: CellDescriptor,
    /// `labeling[f]` is the boundary component assigned to face `f`.
    pub labeling: Vec<usize>,
    pub mode: ConstraintMode,
    pub polytope: Polytope,
}

impl CellPolytope {
    pub fn dimension(&self) -> usize {
        self.polytope.dimension
    }

    pub fn constraint_matrix(&self) -> &DMatrix<f64> {
        &self.polytope.constraint
    }

    pub fn target(&self) -> &DVector<f64> {
        &self.polytope.target
    }

    /// The representative graph carrying the given edge lengths.
    pub fn graph_with(&self, lengths: &DVector<f64>) -> Result<MetricRibbonGraph, RibbonError> {
        MetricRibbonGraph::new(self.cell.representative.clone(), lengths.iter().copied().collect())
    }
}

fn check_boundary(lengths: &[f64], n: usize) -> Result<(), KontsevichError> {
    if lengths.len() != n {
        return Err(KontsevichError::InvalidBoundary(format!(
            "expected {n} boundary lengths, got {}",
            lengths.len()
        )));
    }
    if let Some(l) = lengths.iter().find(|&&l| !(l > 0.0 && l.is_finite())) {
        return Err(KontsevichError::InvalidBoundary(format!(
            "boundary length {l} is not positive"
        )));
    }
    Ok(())
}

/// Builds the constraint system of a cell. In standard mode face `f` gets
/// boundary length `boundary[labeling[f]]`.
pub fn cell_polytope(
    cell: &CellDescriptor,
    boundary: &[f64],
    mode: ConstraintMode,
    labeling: &[usize],
) -> Result<CellPolytope, KontsevichError> {
    let rg = &cell.representative;
    let e = rg.n_edges();
    let (a, b) = match mode {
        ConstraintMode::Standard => {
            check_boundary(boundary, rg.n_faces())?;
            let inc = rg.face_incidence();
            let mut a = DMatrix::zeros(rg.n_faces(), e);
            let mut b = DVector::zeros(rg.n_faces());
            for (f, row) in inc.iter().enumerate() {
                for (c, &v) in row.iter().enumerate() {
                    a[(f, c)] = v as f64;
                }
                b[f] = boundary[labeling[f]];
            }
            (a, b)
        }
        ConstraintMode::Paper11 => {
            if (cell.genus, cell.n_faces) != (1, 1) {
                return Err(KontsevichError::ModeUnsupported);
            }
            check_boundary(boundary, 1)?;
            (DMatrix::from_element(1, e, 1.0), DVector::from_element(1, boundary[0]))
        }
    };
    Ok(CellPolytope {
        cell: cell.clone(),
        labeling: labeling.to_vec(),
        mode,
        polytope: Polytope::new(a, b)?,
    })
}
