//! Complete elliptic integrals through Carlson's symmetric forms.
//!
//! Parameter convention throughout: `K(m) = int_0^{pi/2} (1 - m sin^2 t)^{-1/2} dt`.
//! Negative parameters are handled by the same code path.

use crate::error::{domain, Result};

const RF_TOLERANCE: f64 = 1e-3;
const RD_TOLERANCE: f64 = 5e-4;

/// Carlson's `R_F(x, y, z)`; at most one argument may be zero.
pub fn carlson_rf(x: f64, y: f64, z: f64) -> Result<f64> {
    if x < 0.0 || y < 0.0 || z < 0.0 || !(x + y + z).is_finite() {
        return Err(domain(format!("R_F({x}, {y}, {z}) needs finite nonnegative arguments")));
    }
    if (x == 0.0) as u8 + (y == 0.0) as u8 + (z == 0.0) as u8 > 1 {
        return Err(domain("R_F diverges with two zero arguments"));
    }
    let (mut x, mut y, mut z) = (x, y, z);
    let (mut mean, mut dx, mut dy, mut dz);
    loop {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        mean = (x + y + z) / 3.0;
        dx = (mean - x) / mean;
        dy = (mean - y) / mean;
        dz = (mean - z) / mean;
        if dx.abs().max(dy.abs()).max(dz.abs()) < RF_TOLERANCE {
            break;
        }
    }
    let e2 = dx * dy - dz * dz;
    let e3 = dx * dy * dz;
    Ok((1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) / mean.sqrt())
}

/// Carlson's `R_D(x, y, z)`; `z > 0` and at most one of `x, y` zero.
pub fn carlson_rd(x: f64, y: f64, z: f64) -> Result<f64> {
    if x < 0.0 || y < 0.0 || z <= 0.0 || x + y == 0.0 || !(x + y + z).is_finite() {
        return Err(domain(format!("R_D({x}, {y}, {z}) outside its domain")));
    }
    const C1: f64 = 3.0 / 14.0;
    const C2: f64 = 1.0 / 6.0;
    const C3: f64 = 9.0 / 22.0;
    const C4: f64 = 3.0 / 26.0;
    const C5: f64 = 0.25 * C3;
    const C6: f64 = 1.5 * C4;

    let (mut x, mut y, mut z) = (x, y, z);
    let mut sum = 0.0;
    let mut fac = 1.0;
    let (mut mean, mut dx, mut dy, mut dz);
    loop {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * (sy + sz) + sy * sz;
        sum += fac / (sz * (z + lambda));
        fac *= 0.25;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        mean = 0.2 * (x + y + 3.0 * z);
        dx = (mean - x) / mean;
        dy = (mean - y) / mean;
        dz = (mean - z) / mean;
        if dx.abs().max(dy.abs()).max(dz.abs()) < RD_TOLERANCE {
            break;
        }
    }
    let ea = dx * dy;
    let eb = dz * dz;
    let ec = ea - eb;
    let ed = ea - 6.0 * eb;
    let ee = ed + ec + ec;
    let series = 1.0
        + ed * (-C1 + C5 * ed - C6 * dz * ee)
        + dz * (C2 * ee + dz * (-C3 * ec + dz * C4 * ea));
    Ok(3.0 * sum + fac * series / (mean * mean.sqrt()))
}

/// Complete elliptic integral of the first kind, `m < 1`.
pub fn elliptic_k(m: f64) -> Result<f64> {
    if !(m < 1.0) {
        return Err(domain(format!("K(m) requires m < 1, got {m}")));
    }
    carlson_rf(0.0, 1.0 - m, 1.0)
}

/// Complete elliptic integral of the second kind, `m <= 1`.
pub fn elliptic_e(m: f64) -> Result<f64> {
    if !(m <= 1.0) {
        return Err(domain(format!("E(m) requires m <= 1, got {m}")));
    }
    if m == 1.0 {
        return Ok(1.0);
    }
    let y = 1.0 - m;
    Ok(carlson_rf(0.0, y, 1.0)? - m / 3.0 * carlson_rd(0.0, y, 1.0)?)
}
