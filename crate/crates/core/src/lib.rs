//! Metric ribbon graphs, their geodesics and critical exponents, and sampling
//! of the Kontsevich measure on combinatorial moduli spaces.

pub mod distributions;
pub mod enumerate;
pub mod geodesics;
pub mod io;
pub mod kontsevich;
pub mod ribbon;
pub mod zeta;

pub use enumerate::{automorphisms, canonical_code, enumerate_trivalent_types, is_isomorphic, CellDescriptor};
pub use ribbon::{MetricRibbonGraph, RibbonError, RibbonGraph};
