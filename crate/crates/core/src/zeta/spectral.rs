//! Critical exponent as the point where the Perron root of `A(s)` is one.

use nalgebra::{DMatrix, DVector};

use super::{edge_matrix, upper_bound_delta, CriticalExponent, EdgeMatrix, Method, ZetaError};
use crate::ribbon::MetricRibbonGraph;

/// Lower and upper bounds on the Perron root of a nonnegative irreducible
/// matrix.
///
/// Powers of `B = A + I` (primitive, same Perron vector) are formed by
/// repeated squaring; `B^(2^k) 1` approaches the Perron vector and the
/// Collatz-Wielandt ratios of `B` on it bracket `rho(B) = rho(A) + 1`.
pub fn perron_root(a: &DMatrix<f64>) -> (f64, f64) {
    let n = a.nrows();
    let b = a + DMatrix::<f64>::identity(n, n);
    let mut p = b.clone();
    let mut best = (0.0f64, f64::INFINITY);
    for _ in 0..64 {
        let x: DVector<f64> = &p * DVector::from_element(n, 1.0);
        let bx = &b * &x;
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            if x[i] > 0.0 {
                let r = bx[i] / x[i];
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
        if hi - lo < best.1 - best.0 {
            best = (lo, hi);
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
        p = &p * &p;
        let scale = p.max();
        if scale > 0.0 {
            p /= scale;
        }
    }
    (best.0 - 1.0, best.1 - 1.0)
}

/// Perron root of `A(s)`, midpoint of the bracket.
pub fn spectral_radius_at(g: &MetricRibbonGraph, s: f64) -> f64 {
    let (lo, hi) = perron_root(&edge_matrix(g).real_at(s));
    0.5 * (lo + hi)
}

/// Sign of `ln rho(A(s))`, or `None` when the bracket straddles 1.
fn log_radius(m: &EdgeMatrix, s: f64) -> (f64, Option<bool>) {
    let (lo, hi) = perron_root(&m.real_at(s));
    let mid = 0.5 * (lo + hi);
    let sign = if lo > 1.0 {
        Some(true)
    } else if hi < 1.0 {
        Some(false)
    } else {
        None
    };
    (mid.ln(), sign)
}

/// The unique `s > 0` with `rho(A(s)) = 1`.
///
/// `ln rho(A(s))` is convex and strictly decreasing in `s`, so the root is
/// bracketed between `1e-6` and the contraction upper bound plus one, then
/// located by Illinois false position with bisection safeguards.
pub fn delta_spectral(g: &MetricRibbonGraph, tol: f64) -> Result<CriticalExponent, ZetaError> {
    let m = edge_matrix(g);
    if !m.is_irreducible() {
        return Err(ZetaError::NotIrreducible);
    }
    let tol = tol.max(1e-15);
    let mut a = 1e-6;
    let (mut fa, sa) = log_radius(&m, a);
    if sa == Some(false) {
        return Err(ZetaError::NoConvergence(
            "spectral radius below one at the left end of the bracket".into(),
        ));
    }
    let mut b = upper_bound_delta(g).value + 1.0;
    let (mut fb, mut sb) = log_radius(&m, b);
    let mut expansions = 0;
    while sb != Some(false) {
        b *= 2.0;
        (fb, sb) = log_radius(&m, b);
        expansions += 1;
        if expansions > 60 {
            return Err(ZetaError::NoConvergence("could not bracket the root".into()));
        }
    }
    let mut side = 0i8;
    for _ in 0..400 {
        if b - a <= tol * b.max(1.0) * 0.5 {
            break;
        }
        let secant = b - fb * (b - a) / (fb - fa);
        let mid = 0.5 * (a + b);
        let c = if secant.is_finite() && secant > a && secant < b {
            secant
        } else {
            mid
        };
        let (fc, sc) = log_radius(&m, c);
        match sc {
            None => {
                a = c;
                b = c;
                break;
            }
            Some(true) => {
                a = c;
                fa = fc;
                if side == 1 {
                    fb *= 0.5;
                }
                side = 1;
            }
            Some(false) => {
                b = c;
                fb = fc;
                if side == -1 {
                    fa *= 0.5;
                }
                side = -1;
            }
        }
    }
    if b - a > tol * b.max(1.0) {
        return Err(ZetaError::NoConvergence(format!(
            "bracket [{a}, {b}] wider than tolerance"
        )));
    }
    Ok(CriticalExponent {
        delta: 0.5 * (a + b),
        method: Method::Spectral,
        residual: 0.5 * (b - a),
    })
}
