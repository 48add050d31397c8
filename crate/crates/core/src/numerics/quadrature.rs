//! Gauss-Chebyshev quadrature for integrands with inverse square-root endpoint
//! singularities.
//!
//! With `x = (a + b)/2 + (b - a)/2 cos(t)` the weight `sqrt((x - a)(b - x))`
//! becomes `(b - a)/2 sin(t)`; an integrand behaving like
//! `g(x) / sqrt((x - a)(b - x))` turns into the smooth periodic `g(x(t))`,
//! for which the midpoint rule in `t` converges geometrically.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

const START_NODES: usize = 32;
const MAX_NODES: usize = 1 << 21;
const TARGET: f64 = 1e-14;
/// Accepted once doubling stops helping (rounding floor) or at `MAX_NODES`.
const FALLBACK: f64 = 1e-9;

/// Fixed `nodes`-point Gauss-Chebyshev approximation of `int_a^b f(x) dx`.
pub fn gauss_chebyshev<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, nodes: usize) -> f64 {
    chebyshev_sums(&f, a, b, nodes).0
}

/// Signed and absolute sums; the latter sets the scale for odd integrands.
fn chebyshev_sums<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, nodes: usize) -> (f64, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let h = PI / nodes as f64;
    let mut sum = 0.0;
    let mut abs = 0.0;
    for k in 0..nodes {
        let t = (k as f64 + 0.5) * h;
        let v = f(mid + half * t.cos()) * t.sin();
        sum += v;
        abs += v.abs();
    }
    (sum * half * h, abs * half * h)
}

/// `int_a^b f(x) dx`, doubling the node count until successive estimates agree.
pub fn singular_quadrature<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(invalid(format!("quadrature needs finite a < b, got [{a}, {b}]")));
    }
    let mut nodes = START_NODES;
    let mut prev = gauss_chebyshev(&f, a, b, nodes);
    let mut prev_change = f64::INFINITY;
    loop {
        nodes *= 2;
        let (next, abs) = chebyshev_sums(&f, a, b, nodes);
        if !next.is_finite() {
            return Err(Error::NumericalFailure {
                index: nodes,
                reason: "non-finite integrand value".into(),
            });
        }
        let change = (next - prev).abs();
        let scale = next.abs().max(abs).max(f64::MIN_POSITIVE);
        if change <= TARGET * scale {
            return Ok(next);
        }
        if change <= FALLBACK * scale && change >= 0.5 * prev_change {
            return Ok(next);
        }
        if nodes >= MAX_NODES {
            if change <= FALLBACK * scale {
                return Ok(next);
            }
            return Err(Error::NumericalFailure {
                index: nodes,
                reason: format!("quadrature not converged (relative change {:e})", change / scale),
            });
        }
        prev = next;
        prev_change = change;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arcsine() {
        let v = singular_quadrature(|x| 1.0 / (1.0 - x * x).sqrt(), -1.0, 1.0).unwrap();
        assert!((v - PI).abs() < 1e-13);
    }

    #[test]
    fn shifted_arcsine() {
        let (x0, r) = (0.6, -0.2);
        let v = singular_quadrature(|x| 1.0 / ((x0 - x) * (x - r)).sqrt(), r, x0).unwrap();
        assert!((v - PI).abs() < 1e-13);
    }

    #[test]
    fn smooth_integrand() {
        let v = singular_quadrature(|x| x * x, 0.0, 3.0).unwrap();
        assert!((v - 9.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_empty_interval() {
        assert!(singular_quadrature(|x| x, 1.0, 1.0).is_err());
        assert!(singular_quadrature(|x| x, 2.0, 1.0).is_err());
    }

    #[test]
    fn doubling_is_stable() {
        let f = |x: f64| x * x / ((0.36 - x * x) * (x * x + 0.04)).sqrt();
        let a = gauss_chebyshev(f, -0.6, 0.6, 512);
        let b = gauss_chebyshev(f, -0.6, 0.6, 1024);
        assert!(((a - b) / b).abs() < 1e-8);
    }
}
