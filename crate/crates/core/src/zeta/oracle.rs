//! Critical exponent estimated from geodesic counts alone.
//!
//! Counting follows `L(x) ~ e^(delta x) / (delta x)`, so `ln(x L(x))` is
//! close to linear in `x` with slope `delta`. The slope is fitted by least
//! squares on an evenly spaced grid over the top part of `[0, x_max]`.

use super::{CriticalExponent, Method, ZetaError};
use crate::geodesics::{enumerate_geodesics_with, primitive_counts_exact, EnumerateOptions, Orientation};
use crate::ribbon::MetricRibbonGraph;

#[derive(Clone, Copy, Debug)]
pub struct OracleOptions {
    /// Fraction of `[0, x_max]`, ending at `x_max`, used for the fit.
    pub window: f64,
    pub orientation: Orientation,
    pub min_count: usize,
    pub grid_points: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            window: 0.5,
            orientation: Orientation::Unoriented,
            min_count: 200,
            grid_points: 512,
        }
    }
}

pub fn delta_oracle(g: &MetricRibbonGraph, x_max: f64) -> Result<CriticalExponent, ZetaError> {
    delta_oracle_with(g, x_max, OracleOptions::default())
}

/// Sorted `(length, count)` pairs for primitive geodesics up to `x_max`:
/// counted exactly when lengths are rational, listed otherwise.
fn spectrum(g: &MetricRibbonGraph, x_max: f64, orientation: Orientation) -> Result<Vec<(f64, f64)>, ZetaError> {
    if g.exact_lengths().is_some() {
        return Ok(primitive_counts_exact(g, x_max, orientation)?);
    }
    let paths = enumerate_geodesics_with(
        g,
        x_max,
        EnumerateOptions {
            orientation,
            ..Default::default()
        },
    )?;
    Ok(paths.iter().map(|p| (p.metric_length(), 1.0)).collect())
}

pub fn delta_oracle_with(
    g: &MetricRibbonGraph,
    x_max: f64,
    opts: OracleOptions,
) -> Result<CriticalExponent, ZetaError> {
    let spec = spectrum(g, x_max, opts.orientation)?;
    let total: f64 = spec.iter().map(|s| s.1).sum();
    if total < opts.min_count as f64 {
        return Err(ZetaError::InsufficientData {
            found: total as usize,
            needed: opts.min_count,
        });
    }
    let x_lo = x_max * (1.0 - opts.window);
    let mut cumulative = Vec::with_capacity(spec.len());
    let mut acc = 0.0;
    for &(len, n) in &spec {
        acc += n;
        cumulative.push((len, acc));
    }
    let counting = |x: f64| -> f64 {
        let idx = cumulative.partition_point(|&(len, _)| len <= x * (1.0 + 1e-12));
        if idx == 0 {
            0.0
        } else {
            cumulative[idx - 1].1
        }
    };

    let mut xs = Vec::with_capacity(opts.grid_points);
    let mut ys = Vec::with_capacity(opts.grid_points);
    for i in 0..opts.grid_points {
        let x = x_lo + (x_max - x_lo) * i as f64 / (opts.grid_points - 1) as f64;
        let l = counting(x);
        if x > 0.0 && l > 0.0 {
            xs.push(x);
            ys.push((x * l).ln());
        }
    }
    if xs.len() < 3 {
        return Err(ZetaError::InsufficientData {
            found: xs.len(),
            needed: 3,
        });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    let stderr = (sse / (n - 2.0) / sxx).sqrt();
    Ok(CriticalExponent {
        delta: slope,
        method: Method::Oracle,
        residual: stderr,
    })
}
