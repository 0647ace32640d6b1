use std::fmt::Write;

use super::{DistributionError, EmpiricalDistribution};

/// Fixed-width histogram of a weighted sample. Bins are half-open except the
/// last, which includes its right edge.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    /// Probability mass per bin.
    pub masses: Vec<f64>,
    /// Mass below `lo` and above `hi`.
    pub underflow: f64,
    pub overflow: f64,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.masses.len()
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins() as f64
    }

    pub fn edges(&self) -> Vec<f64> {
        let w = self.width();
        (0..=self.bins()).map(|i| self.lo + i as f64 * w).collect()
    }

    pub fn centers(&self) -> Vec<f64> {
        let w = self.width();
        (0..self.bins()).map(|i| self.lo + (i as f64 + 0.5) * w).collect()
    }

    /// Mass divided by bin width.
    pub fn densities(&self) -> Vec<f64> {
        let w = self.width();
        self.masses.iter().map(|m| m / w).collect()
    }

    /// `left,right,mass,density` rows without a header.
    pub fn to_csv_rows(&self) -> String {
        let edges = self.edges();
        let w = self.width();
        let mut out = String::new();
        for (i, m) in self.masses.iter().enumerate() {
            writeln!(out, "{},{},{},{}", edges[i], edges[i + 1], m, m / w).unwrap();
        }
        out
    }
}

/// Histogram with `bins` bins over `range`, or over `[min, max]` of the
/// sample when no range is given.
pub fn histogram(
    dist: &EmpiricalDistribution,
    bins: usize,
    range: Option<(f64, f64)>,
) -> Result<Histogram, DistributionError> {
    if bins < 2 {
        return Err(DistributionError::TooFewBins(bins));
    }
    let (lo, mut hi) = range.unwrap_or((dist.min(), dist.max()));
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(DistributionError::InvalidRange(lo, hi));
    }
    if hi == lo {
        hi = lo + 1.0;
    }
    let w = (hi - lo) / bins as f64;
    let mut h = Histogram {
        lo,
        hi,
        masses: vec![0.0; bins],
        underflow: 0.0,
        overflow: 0.0,
    };
    for (&v, &m) in dist.values().iter().zip(dist.weights()) {
        if v < lo {
            h.underflow += m;
        } else if v > hi {
            h.overflow += m;
        } else {
            let k = (((v - lo) / w) as usize).min(bins - 1);
            h.masses[k] += m;
        }
    }
    Ok(h)
}

/// Gaussian kernel density estimate at `points`. A non-positive bandwidth
/// selects Silverman's rule.
pub fn kde(dist: &EmpiricalDistribution, bandwidth: f64, points: &[f64]) -> Vec<f64> {
    let h = if bandwidth > 0.0 {
        bandwidth
    } else {
        let mean = dist.mean();
        let var = dist.integrate(|x| (x - mean) * (x - mean));
        let sd = var.sqrt().max(1e-12);
        1.06 * sd * (dist.len() as f64).powf(-0.2)
    };
    let norm = 1.0 / (h * (2.0 * std::f64::consts::PI).sqrt());
    points
        .iter()
        .map(|&x| {
            dist.integrate(|v| {
                let t = (x - v) / h;
                (-0.5 * t * t).exp()
            }) * norm
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binning() {
        let d = EmpiricalDistribution::from_samples(&[0.0, 0.1, 0.5, 0.99, 1.0]).unwrap();
        let h = histogram(&d, 2, None).unwrap();
        assert!((h.masses[0] - 0.4).abs() < 1e-15 && (h.masses[1] - 0.6).abs() < 1e-15);
        assert_eq!(h.edges(), vec![0.0, 0.5, 1.0]);
        let h = histogram(&d, 4, Some((0.2, 0.6))).unwrap();
        assert!((h.underflow - 0.4).abs() < 1e-15);
        assert!((h.overflow - 0.4).abs() < 1e-15);
        assert!((h.masses.iter().sum::<f64>() - 0.2).abs() < 1e-15);
        assert!(histogram(&d, 1, None).is_err());
        assert!(histogram(&d, 4, Some((1.0, 0.0))).is_err());
    }

    #[test]
    fn kde_integrates_to_one() {
        let d = EmpiricalDistribution::from_samples(&[1.0, 1.5, 2.0, 4.0]).unwrap();
        let xs: Vec<f64> = (0..4000).map(|i| -5.0 + i as f64 * 0.0035).collect();
        let total: f64 = kde(&d, 0.3, &xs).iter().sum::<f64>() * 0.0035;
        assert!((total - 1.0).abs() < 1e-3);
    }
}
