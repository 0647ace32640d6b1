//! Empirical distributions of critical exponents, histograms, the
//! Wasserstein-1 distance and its Kantorovich dual bound.

mod grid;
mod histogram;

pub use grid::{grid_delta, GridError, GridPoint};
pub use histogram::{histogram, kde, Histogram};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistributionError {
    #[error("no samples")]
    Empty,
    #[error("weight {0} is not positive")]
    NonPositiveWeight(f64),
    #[error("sample value {0} is not finite")]
    NonFinite(f64),
    #[error("{values} values but {weights} weights")]
    LengthMismatch { values: usize, weights: usize },
    #[error("test function has slope {0}, exceeding 1 in absolute value")]
    LipschitzViolation(f64),
    #[error("breakpoints must be finite and strictly increasing")]
    UnsortedBreakpoints,
    #[error("need at least 2 bins, got {0}")]
    TooFewBins(usize),
    #[error("grid resolution must be at least 8, got {0}")]
    ResolutionTooSmall(usize),
    #[error("invalid histogram range [{0}, {1}]")]
    InvalidRange(f64, f64),
}

/// Sorted atoms with positive weights summing to one; equal values merged.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalDistribution {
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(values: &[f64], weights: &[f64]) -> Result<Self, DistributionError> {
        if values.len() != weights.len() {
            return Err(DistributionError::LengthMismatch {
                values: values.len(),
                weights: weights.len(),
            });
        }
        if values.is_empty() {
            return Err(DistributionError::Empty);
        }
        if let Some(&v) = values.iter().find(|v| !v.is_finite()) {
            return Err(DistributionError::NonFinite(v));
        }
        if let Some(&w) = weights.iter().find(|&&w| !(w > 0.0 && w.is_finite())) {
            return Err(DistributionError::NonPositiveWeight(w));
        }
        let mut pairs: Vec<(f64, f64)> = values.iter().copied().zip(weights.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        let mut vs: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut ws: Vec<f64> = Vec::with_capacity(pairs.len());
        for (v, w) in pairs {
            if vs.last() == Some(&v) {
                *ws.last_mut().unwrap() += w / total;
            } else {
                vs.push(v);
                ws.push(w / total);
            }
        }
        Ok(Self {
            values: vs,
            weights: ws,
        })
    }

    /// Equal weights.
    pub fn from_samples(values: &[f64]) -> Result<Self, DistributionError> {
        Self::new(values, &vec![1.0; values.len()])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// Expectation of `f`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.values.iter().zip(&self.weights).map(|(&v, w)| f(v) * w).sum()
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.values.partition_point(|&v| v <= x);
        self.weights[..k].iter().sum()
    }
}

/// Wasserstein-1 distance as the integral of `|F_mu - F_nu|` over the merged
/// breakpoints; on the line this equals the optimal coupling cost.
pub fn wasserstein1(mu: &EmpiricalDistribution, nu: &EmpiricalDistribution) -> f64 {
    let (mut i, mut j) = (0, 0);
    let (mut fm, mut fn_) = (0.0f64, 0.0f64);
    let mut prev: Option<f64> = None;
    let mut total = 0.0;
    while i < mu.values.len() || j < nu.values.len() {
        let x = match (mu.values.get(i), nu.values.get(j)) {
            (Some(&a), Some(&b)) => a.min(b),
            (Some(&a), None) => a,
            (None, Some(&b)) => b,
            (None, None) => unreachable!(),
        };
        if let Some(p) = prev {
            total += (fm - fn_).abs() * (x - p);
        }
        while i < mu.values.len() && mu.values[i] == x {
            fm += mu.weights[i];
            i += 1;
        }
        while j < nu.values.len() && nu.values[j] == x {
            fn_ += nu.weights[j];
            j += 1;
        }
        prev = Some(x);
    }
    total
}

/// Piecewise-linear function through breakpoints, constant beyond the first
/// and last ones.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, DistributionError> {
        if xs.is_empty() || xs.len() != ys.len() {
            return Err(DistributionError::LengthMismatch {
                values: xs.len(),
                weights: ys.len(),
            });
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) || xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DistributionError::UnsortedBreakpoints);
        }
        Ok(Self { xs, ys })
    }

    /// Like [`PiecewiseLinear::new`] but rejects slopes steeper than one.
    pub fn lipschitz(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, DistributionError> {
        let f = Self::new(xs, ys)?;
        let slope = f.max_slope();
        if slope > 1.0 + 1e-12 {
            return Err(DistributionError::LipschitzViolation(slope));
        }
        Ok(f)
    }

    pub fn max_slope(&self) -> f64 {
        self.xs
            .windows(2)
            .zip(self.ys.windows(2))
            .map(|(x, y)| ((y[1] - y[0]) / (x[1] - x[0])).abs())
            .fold(0.0, f64::max)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.xs.partition_point(|&b| b <= x);
        if k == 0 {
            return self.ys[0];
        }
        if k == self.xs.len() {
            return *self.ys.last().unwrap();
        }
        let (x0, x1) = (self.xs[k - 1], self.xs[k]);
        let (y0, y1) = (self.ys[k - 1], self.ys[k]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}

/// `∫ f d(mu - nu)` for a 1-Lipschitz test function; never exceeds
/// [`wasserstein1`].
pub fn kantorovich_bound(
    mu: &EmpiricalDistribution,
    nu: &EmpiricalDistribution,
    f: &PiecewiseLinear,
) -> Result<f64, DistributionError> {
    let slope = f.max_slope();
    if slope > 1.0 + 1e-12 {
        return Err(DistributionError::LipschitzViolation(slope));
    }
    Ok(mu.integrate(|x| f.eval(x)) - nu.integrate(|x| f.eval(x)))
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_statistic(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
    let (mut i, mut j) = (0, 0);
    let (mut fa, mut fb) = (0.0f64, 0.0f64);
    let mut d: f64 = 0.0;
    while i < a.values.len() || j < b.values.len() {
        let x = match (a.values.get(i), b.values.get(j)) {
            (Some(&u), Some(&v)) => u.min(v),
            (Some(&u), None) => u,
            (None, Some(&v)) => v,
            (None, None) => unreachable!(),
        };
        while i < a.values.len() && a.values[i] == x {
            fa += a.weights[i];
            i += 1;
        }
        while j < b.values.len() && b.values[j] == x {
            fb += b.weights[j];
            j += 1;
        }
        d = d.max((fa - fb).abs());
    }
    d
}

/// Asymptotic critical value of the two-sample statistic at level `alpha`
/// for sample sizes `n` and `m`.
pub fn ks_critical(alpha: f64, n: usize, m: usize) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction() {
        let d = EmpiricalDistribution::new(&[2.0, 1.0, 2.0], &[1.0, 2.0, 1.0]).unwrap();
        assert_eq!(d.values(), &[1.0, 2.0]);
        assert_eq!(d.weights(), &[0.5, 0.5]);
        let p = EmpiricalDistribution::from_samples(&[3.5]).unwrap();
        assert_eq!((p.values(), p.weights()), (&[3.5][..], &[1.0][..]));
        assert_eq!(EmpiricalDistribution::from_samples(&[]), Err(DistributionError::Empty));
        assert_eq!(
            EmpiricalDistribution::new(&[1.0], &[0.0]),
            Err(DistributionError::NonPositiveWeight(0.0))
        );
    }

    #[test]
    fn point_masses() {
        let a = EmpiricalDistribution::from_samples(&[1.0]).unwrap();
        let b = EmpiricalDistribution::from_samples(&[0.99]).unwrap();
        assert!((wasserstein1(&a, &b) - 0.01).abs() < 1e-15);
        assert_eq!(wasserstein1(&a, &a), 0.0);
        let id = PiecewiseLinear::lipschitz(vec![0.0, 2.0], vec![0.0, 2.0]).unwrap();
        assert!((kantorovich_bound(&a, &b, &id).unwrap() - 0.01).abs() < 1e-15);
        let c = PiecewiseLinear::lipschitz(vec![0.0], vec![5.0]).unwrap();
        assert_eq!(kantorovich_bound(&a, &b, &c).unwrap(), 0.0);
    }

    #[test]
    fn lipschitz_checked() {
        assert!(matches!(
            PiecewiseLinear::lipschitz(vec![0.0, 1.0], vec![0.0, 2.0]),
            Err(DistributionError::LipschitzViolation(_))
        ));
        assert!(PiecewiseLinear::new(vec![1.0, 0.0], vec![0.0, 0.0]).is_err());
        let f = PiecewiseLinear::new(vec![0.0, 1.0, 3.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(f.eval(-1.0), 0.0);
        assert_eq!(f.eval(0.5), 0.5);
        assert_eq!(f.eval(2.0), 0.5);
        assert_eq!(f.eval(9.0), 0.0);
    }

    #[test]
    fn ks_values() {
        let a = EmpiricalDistribution::from_samples(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = EmpiricalDistribution::from_samples(&[3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(ks_statistic(&a, &b), 0.5);
        assert!((ks_critical(0.01, 100, 100) - 1.6276 * 0.02f64.sqrt()).abs() < 1e-4);
    }
}
