//! Critical exponents of metric graphs through the non-backtracking edge
//! matrix.
//!
//! The directed-edge matrix `M(z)` has entry `z^l(i)` at `(i, j)` when `j`
//! may follow `i` in a non-backtracking walk. The reciprocal of
//! `p(z) = det(M(z) - I)` is the graph zeta function and the growth rate of
//! geodesic counts is `-ln` of the smallest modulus of a zero of `p`.

mod bounds;
mod oracle;
mod polynomial;
mod spectral;

pub use bounds::{upper_bound_constant, upper_bound_delta, UpperBound};
pub use oracle::{delta_oracle, delta_oracle_with, OracleOptions};
pub use polynomial::{delta_polynomial, zeta_polynomial, ZetaPolynomial, DEFAULT_DEGREE_CAP};
pub use spectral::{delta_spectral, perron_root, spectral_radius_at};

pub use crate::geodesics::systole;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::geodesics::{successors, GeodesicError};
use crate::ribbon::{HalfEdge, MetricRibbonGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZetaError {
    #[error("directed-edge graph is not strongly connected")]
    NotIrreducible,
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("polynomial degree {degree} exceeds the cap {cap}")]
    DegreeOverflow { degree: usize, cap: usize },
    #[error("polynomial route needs rational edge lengths")]
    NotRational,
    #[error("only {found} geodesics below the cutoff, need {needed}")]
    InsufficientData { found: usize, needed: usize },
    #[error("smallest-modulus zero {modulus} does not sit on the positive axis (positive zero {positive})")]
    PositiveAxisMismatch { modulus: f64, positive: f64 },
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Spectral,
    Polynomial,
    Oracle,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Spectral => "spectral",
            Method::Polynomial => "polynomial",
            Method::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalExponent {
    pub delta: f64,
    pub method: Method,
    /// Method-specific accuracy: bracket width for the spectral route,
    /// root-polishing residual for the polynomial route, slope standard
    /// error for the oracle.
    pub residual: f64,
}

/// Sparse non-backtracking support with per-row lengths.
#[derive(Clone, Debug)]
pub struct EdgeMatrix {
    support: Vec<Vec<HalfEdge>>,
    row_length: Vec<f64>,
}

impl EdgeMatrix {
    pub fn dimension(&self) -> usize {
        self.support.len()
    }

    /// Columns with a nonzero entry in row `i`.
    pub fn row_support(&self, i: usize) -> &[HalfEdge] {
        &self.support[i]
    }

    pub fn row_length(&self, i: usize) -> f64 {
        self.row_length[i]
    }

    pub fn entry(&self, i: usize, j: usize, z: Complex64) -> Complex64 {
        if self.support[i].contains(&j) {
            z.powf(self.row_length[i])
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    pub fn at(&self, z: Complex64) -> DMatrix<Complex64> {
        let n = self.dimension();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            let v = if z == Complex64::new(0.0, 0.0) {
                Complex64::new(0.0, 0.0)
            } else {
                z.powf(self.row_length[i])
            };
            for &j in &self.support[i] {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// `A(s) = M(e^{-s})` as a nonnegative real matrix.
    pub fn real_at(&self, s: f64) -> DMatrix<f64> {
        let n = self.dimension();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            let v = (-s * self.row_length[i]).exp();
            for &j in &self.support[i] {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Whether every directed edge can reach every other.
    pub fn is_irreducible(&self) -> bool {
        let n = self.dimension();
        let mut reverse = vec![Vec::new(); n];
        for (i, row) in self.support.iter().enumerate() {
            for &j in row {
                reverse[j].push(i);
            }
        }
        let reach = |adj: &[Vec<usize>]| {
            let mut seen = vec![false; n];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        n > 0 && reach(&self.support) && reach(&reverse)
    }
}

pub fn edge_matrix(g: &MetricRibbonGraph) -> EdgeMatrix {
    let rg = g.graph();
    let n = rg.n_half_edges();
    EdgeMatrix {
        support: (0..n)
            .map(|h| {
                let mut s: Vec<HalfEdge> = successors(rg, h).collect();
                s.sort_unstable();
                s
            })
            .collect(),
        row_length: (0..n).map(|h| g.length_of(h)).collect(),
    }
}

/// `p(z) = det(M(z) - I)`, using principal powers for non-integer lengths.
pub fn p_gamma(g: &MetricRibbonGraph, z: Complex64) -> Complex64 {
    let m = edge_matrix(g).at(z);
    let n = m.nrows();
    (m - DMatrix::<Complex64>::identity(n, n)).determinant()
}

/// Critical exponent by the chosen method with default settings.
pub fn delta(g: &MetricRibbonGraph, method: Method, tol: f64) -> Result<CriticalExponent, ZetaError> {
    match method {
        Method::Spectral => delta_spectral(g, tol),
        Method::Polynomial => delta_polynomial(g, tol),
        Method::Oracle => delta_oracle(g, 25.0 * g.mean_edge_length()),
    }
}
