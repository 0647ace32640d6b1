//! Critical exponent from the roots of the zeta polynomial, for rational
//! edge lengths.
//!
//! With lengths `k_e / D` and `g = gcd(k_e)`, every entry of `M(z)` is a
//! power of `u = z^(g/D)`, so `p` is an integer polynomial in `u` of degree
//! at most `2 * sum(k_e / g)`. Its coefficients are recovered exactly by
//! evaluating the determinant at roots of unity and inverting the discrete
//! Fourier transform; its roots are the eigenvalues of the companion matrix.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use num_integer::Integer;
use rustfft::FftPlanner;

use super::{edge_matrix, CriticalExponent, Method, ZetaError};
use crate::geodesics::integer_lengths;
use crate::ribbon::MetricRibbonGraph;

pub const DEFAULT_DEGREE_CAP: usize = 10_000;

/// `p` as a polynomial in `u = z^exponent`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZetaPolynomial {
    /// Integer coefficients, constant term first.
    pub coefficients: Vec<f64>,
    /// `z = u^(1/exponent)`; equals `g / D`.
    pub exponent: f64,
}

impl ZetaPolynomial {
    pub fn eval(&self, u: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * u + c)
    }

    fn eval_with_derivative(&self, u: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coefficients.iter().rev() {
            dp = dp * u + p;
            p = p * u + c;
        }
        (p, dp)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    /// All complex roots, each refined by a few Newton steps.
    pub fn roots(&self) -> Vec<Complex64> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let lead = self.coefficients[n];
        let mut companion = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            companion[(i, n - 1)] = -self.coefficients[i] / lead;
        }
        let raw = companion_eigenvalues(&companion).unwrap_or_else(|| self.aberth());
        raw.into_iter().map(|r| self.polish(r)).collect()
    }

    /// Simultaneous Aberth-Ehrlich iteration from points on a circle.
    fn aberth(&self) -> Vec<Complex64> {
        let n = self.degree();
        let lead = self.coefficients[n].abs();
        let radius = self.coefficients[..n]
            .iter()
            .map(|c| c.abs() / lead)
            .fold(0.0, f64::max)
            + 1.0;
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(radius, std::f64::consts::TAU * (k as f64 + 0.25) / n as f64))
            .collect();
        for _ in 0..500 {
            let mut moved = 0.0f64;
            for i in 0..n {
                let (p, dp) = self.eval_with_derivative(z[i]);
                if p.norm() == 0.0 {
                    continue;
                }
                let ratio = p / dp;
                let sum: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
                let step = ratio / (1.0 - ratio * sum);
                z[i] -= step;
                moved = moved.max(step.norm() / z[i].norm().max(1e-300));
            }
            if moved < 1e-15 {
                break;
            }
        }
        z
    }

    fn polish(&self, mut u: Complex64) -> Complex64 {
        for _ in 0..50 {
            let (p, dp) = self.eval_with_derivative(u);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            u -= step;
            if step.norm() <= 1e-16 * u.norm().max(1e-300) {
                break;
            }
        }
        u
    }
}

/// Eigenvalues by real Schur decomposition with a bounded iteration count.
/// Companion matrices whose roots are symmetric under rotation can stall the
/// shifted QR iteration, so on failure the matrix is replaced by a fixed
/// orthogonal conjugate (same spectrum) and retried.
fn companion_eigenvalues(c: &DMatrix<f64>) -> Option<Vec<Complex64>> {
    let n = c.nrows();
    let max_iter = 100 * n.max(10);
    if let Some(s) = Schur::try_new(c.clone(), f64::EPSILON, max_iter) {
        return Some(s.complex_eigenvalues().iter().copied().collect());
    }
    for attempt in 1..=3 {
        let seed = DMatrix::<f64>::from_fn(n, n, |i, j| ((i * n + j + 1) as f64 * 0.618 * attempt as f64).sin());
        let q = seed.qr().q();
        let m = q.transpose() * c * &q;
        if let Some(s) = Schur::try_new(m, f64::EPSILON, max_iter) {
            return Some(s.complex_eigenvalues().iter().copied().collect());
        }
    }
    None
}

/// Builds the zeta polynomial of a graph with exact rational lengths.
pub fn zeta_polynomial(g: &MetricRibbonGraph, degree_cap: usize) -> Result<ZetaPolynomial, ZetaError> {
    let (k, d) = integer_lengths(g).map_err(|_| ZetaError::NotRational)?;
    let gcd = k.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    let units: Vec<i64> = k.iter().map(|x| x / gcd).collect();
    let rg = g.graph();
    let bound: i64 = 2 * units.iter().sum::<i64>();
    if bound as usize > degree_cap {
        return Err(ZetaError::DegreeOverflow {
            degree: bound as usize,
            cap: degree_cap,
        });
    }
    let m = bound as usize + 1;
    let support = edge_matrix(g);
    let n = support.dimension();
    let row_units: Vec<i64> = (0..n).map(|h| units[rg.edge_of(h)]).collect();

    let mut values: Vec<Complex64> = (0..m)
        .map(|idx| {
            let mut a = DMatrix::<Complex64>::zeros(n, n);
            for i in 0..n {
                let phase = ((idx as i64 * row_units[i]) % m as i64) as f64 / m as f64;
                let v = Complex64::from_polar(1.0, std::f64::consts::TAU * phase);
                for &j in support.row_support(i) {
                    a[(i, j)] = v;
                }
                a[(i, i)] -= 1.0;
            }
            a.determinant()
        })
        .collect();
    FftPlanner::<f64>::new().plan_fft_forward(m).process(&mut values);

    let scale = values.iter().map(|v| v.norm()).fold(1.0, f64::max) / m as f64;
    let mut coefficients = Vec::with_capacity(m);
    for v in &values {
        let c = v / m as f64;
        let r = c.re.round();
        if (c.re - r).abs() > 1e-6 * scale.max(1.0) || c.im.abs() > 1e-6 * scale.max(1.0) {
            return Err(ZetaError::NoConvergence(format!(
                "coefficient {c} is not close to an integer"
            )));
        }
        coefficients.push(r);
    }
    while coefficients.len() > 1 && *coefficients.last().unwrap() == 0.0 {
        coefficients.pop();
    }
    Ok(ZetaPolynomial {
        coefficients,
        exponent: gcd as f64 / d as f64,
    })
}

/// Critical exponent as `-ln` of the smallest modulus among the zeros of `p`.
///
/// The positive real zero found by bisection must have that same modulus to
/// within `1e-10` relative; otherwise the result is rejected.
pub fn delta_polynomial(g: &MetricRibbonGraph, tol: f64) -> Result<CriticalExponent, ZetaError> {
    let poly = zeta_polynomial(g, DEFAULT_DEGREE_CAP)?;
    let roots = poly.roots();
    let min_mod = roots
        .iter()
        .map(|r| r.norm())
        .fold(f64::INFINITY, f64::min);
    if !min_mod.is_finite() {
        return Err(ZetaError::NoConvergence("polynomial has no roots".into()));
    }
    let (lo, hi) = positive_root(&poly, min_mod)?;
    let positive = 0.5 * (lo + hi);
    if (positive - min_mod).abs() > 1e-10 * min_mod {
        return Err(ZetaError::PositiveAxisMismatch {
            modulus: min_mod,
            positive,
        });
    }
    let delta = -positive.ln() / poly.exponent;
    let residual = (hi / lo).ln() / poly.exponent;
    if residual > tol.max(1e-15 * delta) {
        return Err(ZetaError::NoConvergence(format!(
            "root bracket gives delta only to {residual:e}"
        )));
    }
    Ok(CriticalExponent {
        delta,
        method: Method::Polynomial,
        residual,
    })
}

/// Bracket around the smallest positive zero of `p`, located near `guess` by
/// a sign change and refined by bisection to machine precision.
fn positive_root(poly: &ZetaPolynomial, guess: f64) -> Result<(f64, f64), ZetaError> {
    let f = |u: f64| poly.eval(Complex64::new(u, 0.0)).re;
    let f0 = f(0.0);
    let mut lo = guess * (1.0 - 1e-6);
    let mut hi = guess * (1.0 + 1e-6);
    // Walk outward until the sign changes, staying on the near side of zero.
    let mut widen = 0;
    while f(lo).signum() != f0.signum() || f(hi).signum() == f0.signum() {
        if f(lo).signum() != f0.signum() {
            lo *= 0.5;
        } else {
            hi *= 1.0 + 1e-3 * 2f64.powi(widen);
        }
        widen += 1;
        if widen > 200 {
            return Err(ZetaError::NoConvergence("no sign change on the positive axis".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid).signum() == f0.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_graph;

    fn theta(lengths: [&str; 3], one_face: bool) -> MetricRibbonGraph {
        let second = if one_face { "3 4 5" } else { "3 5 4" };
        parse_graph(&format!(
            "halfedges 6\ntwin: 0 3\ntwin: 1 4\ntwin: 2 5\nvertex: 0 1 2\nvertex: {second}\nlength: 0 {}\nlength: 1 {}\nlength: 2 {}\n",
            lengths[0], lengths[1], lengths[2]
        ))
        .unwrap()
    }

    #[test]
    fn aberth_matches_companion() {
        // (u^2 - 1/4)(u^4 - 1): roots symmetric under rotation
        let p = ZetaPolynomial {
            coefficients: vec![0.25, 0.0, -1.0, 0.0, -0.25, 0.0, 1.0],
            exponent: 1.0,
        };
        let mut a: Vec<f64> = p.roots().iter().map(|r| r.norm()).collect();
        let mut b: Vec<f64> = p.aberth().iter().map(|&r| p.polish(r).norm()).collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
        assert!((a[0] - 0.5).abs() < 1e-12 && (a[5] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equilateral_theta_polynomial() {
        let g = theta(["1/3", "1/3", "1/3"], true);
        let p = zeta_polynomial(&g, DEFAULT_DEGREE_CAP).unwrap();
        assert_eq!(p.coefficients[0], 1.0);
        assert!(p.eval(Complex64::new(0.5, 0.0)).norm() < 1e-12);
        let d = delta_polynomial(&g, 1e-12).unwrap();
        assert!((d.delta - 3.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn integer_lengths_give_polynomial_in_z() {
        let g = theta(["1", "2", "3"], false);
        let p = zeta_polynomial(&g, DEFAULT_DEGREE_CAP).unwrap();
        assert_eq!(p.exponent, 1.0);
        for z in [0.1, 0.37, 0.8] {
            let direct = super::super::p_gamma(&g, Complex64::new(z, 0.0));
            assert!((direct - p.eval(Complex64::new(z, 0.0))).norm() < 1e-10);
        }
    }

    #[test]
    fn degree_cap_enforced() {
        let g = theta(["1", "1/997", "1/991"], true);
        assert!(matches!(
            zeta_polynomial(&g, 1000),
            Err(ZetaError::DegreeOverflow { .. })
        ));
    }

    #[test]
    fn float_lengths_rejected() {
        let g = crate::ribbon::theta_11(0.3, 0.3, 0.4).unwrap();
        assert_eq!(delta_polynomial(&g, 1e-10), Err(ZetaError::NotRational));
    }
}
