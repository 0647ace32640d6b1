//! Draws from the normalised Kontsevich measure on a whole moduli space.
//!
//! Every trivalent type and every assignment of boundary lengths to its faces
//! is a cell. A cell is chosen with probability proportional to its volume
//! constant times its polytope volume, divided by the automorphism count of
//! the graph unless that weighting is switched off; then a point is drawn
//! uniformly inside it.
//!
//! Draws are made in batches of [`BATCH`]; batch `b` uses its own ChaCha8
//! stream seeded with `seed ^ b`, so output is identical for any thread
//! count.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{cell_constant, cell_polytope, CellPolytope, ConstraintMode, KontsevichError};
use crate::enumerate::{enumerate_trivalent_types, CellDescriptor};
use crate::geodesics::systole;
use crate::ribbon::MetricRibbonGraph;

pub const BATCH: usize = 1024;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SamplerOptions {
    pub mode: ConstraintMode,
    /// Skip the division by the automorphism count.
    pub no_aut_weight: bool,
}

#[derive(Clone, Debug)]
pub struct SamplePoint {
    pub graph: MetricRibbonGraph,
    /// Index into the list of trivalent types.
    pub cell_id: usize,
    /// Boundary component of each face.
    pub labeling: Vec<usize>,
    pub weight: f64,
}

#[derive(Clone, Debug)]
struct WeightedCell {
    cell_id: usize,
    polytope: CellPolytope,
    weight: f64,
}

/// Precomputed cells and weights for one `(g, n, L)`.
#[derive(Clone, Debug)]
pub struct KontsevichSampler {
    cells: Vec<CellDescriptor>,
    weighted: Vec<WeightedCell>,
    cumulative: Vec<f64>,
}

impl KontsevichSampler {
    pub fn new(g: i64, n: i64, boundary: &[f64], opts: SamplerOptions) -> Result<Self, KontsevichError> {
        let cells = enumerate_trivalent_types(g, n)?;
        let mut weighted = Vec::new();
        for (cell_id, cell) in cells.iter().enumerate() {
            let labelings: Vec<Vec<usize>> = match opts.mode {
                ConstraintMode::Paper11 => vec![vec![0]],
                ConstraintMode::Standard => (0..n as usize).permutations(n as usize).collect(),
            };
            let constant = cell_constant(cell)?;
            for labeling in labelings {
                let polytope = match cell_polytope(cell, boundary, opts.mode, &labeling) {
                    Ok(p) => p,
                    Err(KontsevichError::EmptyCell) => continue,
                    Err(err) => return Err(err),
                };
                let mut weight = constant * polytope.polytope.volume();
                if !opts.no_aut_weight {
                    weight /= cell.automorphism_count as f64;
                }
                weighted.push(WeightedCell {
                    cell_id,
                    polytope,
                    weight,
                });
            }
        }
        if weighted.is_empty() {
            return Err(KontsevichError::EmptyCell);
        }
        let mut cumulative = Vec::with_capacity(weighted.len());
        let mut total = 0.0;
        for w in &weighted {
            total += w.weight;
            cumulative.push(total);
        }
        Ok(Self {
            cells,
            weighted,
            cumulative,
        })
    }

    pub fn cells(&self) -> &[CellDescriptor] {
        &self.cells
    }

    /// `(cell_id, labeling, probability)` for every nonempty labelled cell.
    pub fn cell_probabilities(&self) -> Vec<(usize, Vec<usize>, f64)> {
        let total = *self.cumulative.last().unwrap();
        self.weighted
            .iter()
            .map(|w| (w.cell_id, w.polytope.labeling.clone(), w.weight / total))
            .collect()
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SamplePoint, KontsevichError> {
        let total = *self.cumulative.last().unwrap();
        let u = rng.random::<f64>() * total;
        let idx = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.weighted.len() - 1);
        let w = &self.weighted[idx];
        let lengths = match w.polytope.polytope.point() {
            Some(p) => p.clone(),
            None => w.polytope.polytope.sample(rng)?,
        };
        Ok(SamplePoint {
            graph: w.polytope.graph_with(&lengths)?,
            cell_id: w.cell_id,
            labeling: w.polytope.labeling.clone(),
            weight: 1.0,
        })
    }

    /// `count` draws in batch order; see the module documentation for the
    /// seeding scheme.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<SamplePoint>, KontsevichError> {
        let batches = count.div_ceil(BATCH);
        let parts: Vec<Result<Vec<SamplePoint>, KontsevichError>> = (0..batches)
            .into_par_iter()
            .map(|b| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ b as u64);
                let size = BATCH.min(count - b * BATCH);
                (0..size).map(|_| self.draw(&mut rng)).collect()
            })
            .collect();
        let mut out = Vec::with_capacity(count);
        for p in parts {
            out.extend(p?);
        }
        let w = 1.0 / count as f64;
        for p in &mut out {
            p.weight = w;
        }
        Ok(out)
    }

    /// Applies `f` to `count` draws without keeping them, in draw order.
    pub fn map_samples<T: Send>(
        &self,
        count: usize,
        seed: u64,
        f: impl Fn(&SamplePoint) -> T + Sync,
    ) -> Result<Vec<T>, KontsevichError> {
        let batches = count.div_ceil(BATCH);
        let parts: Vec<Result<Vec<T>, KontsevichError>> = (0..batches)
            .into_par_iter()
            .map(|b| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ b as u64);
                let size = BATCH.min(count - b * BATCH);
                (0..size).map(|_| self.draw(&mut rng).map(|p| f(&p))).collect()
            })
            .collect();
        let mut out = Vec::with_capacity(count);
        for p in parts {
            out.extend(p?);
        }
        Ok(out)
    }
}

pub fn sample_space(
    g: i64,
    n: i64,
    boundary: &[f64],
    count: usize,
    seed: u64,
    opts: SamplerOptions,
) -> Result<Vec<SamplePoint>, KontsevichError> {
    if count == 0 {
        return Err(KontsevichError::TooFewSamples(1));
    }
    KontsevichSampler::new(g, n, boundary, opts)?.sample(count, seed)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbabilityEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub hits: usize,
    pub samples: usize,
}

/// Monte-Carlo probability that the shortest geodesic has length at most
/// `eps`, with binomial standard error.
pub fn short_geodesic_probability(
    g: i64,
    n: i64,
    boundary: &[f64],
    eps: f64,
    count: usize,
    seed: u64,
    opts: SamplerOptions,
) -> Result<ProbabilityEstimate, KontsevichError> {
    if count < 1000 {
        return Err(KontsevichError::TooFewSamples(1000));
    }
    let sampler = KontsevichSampler::new(g, n, boundary, opts)?;
    let hits = sampler
        .map_samples(count, seed, |p| systole(&p.graph) <= eps)?
        .into_iter()
        .filter(|&h| h)
        .count();
    let p = hits as f64 / count as f64;
    Ok(ProbabilityEstimate {
        estimate: p,
        stderr: (p * (1.0 - p) / count as f64).sqrt(),
        hits,
        samples: count,
    })
}
