//! Critical exponent over the simplex of one-holed-torus metrics with unit
//! total edge length.

use rayon::prelude::*;

use super::DistributionError;
use crate::ribbon::{theta_11, RibbonError};
use crate::zeta::{delta_spectral, ZetaError};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub delta: f64,
}

/// Interior grid points `(i/r, j/r, 1 - (i+j)/r)` with `i, j >= 1` and
/// `i + j < r`, in lexicographic order of `(i, j)`.
pub fn grid_delta(resolution: usize, tol: f64) -> Result<Vec<GridPoint>, GridError> {
    if resolution < 8 {
        return Err(DistributionError::ResolutionTooSmall(resolution).into());
    }
    let r = resolution as f64;
    let nodes: Vec<(usize, usize)> = (1..resolution)
        .flat_map(|i| (1..resolution - i).map(move |j| (i, j)))
        .collect();
    nodes
        .into_par_iter()
        .map(|(i, j)| {
            let (x, y) = (i as f64 / r, j as f64 / r);
            let z = (resolution - i - j) as f64 / r;
            let g = theta_11(x, y, z)?;
            let d = delta_spectral(&g, tol)?;
            Ok(GridPoint { x, y, z, delta: d.delta })
        })
        .collect()
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum GridError {
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
    #[error(transparent)]
    Ribbon(#[from] RibbonError),
}
