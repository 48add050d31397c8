//! Mean-field effective potentials and the semiclassical long-time averaged QFI.
//!
//! The classical motion obeys `xdot^2 + V_eff(x) = 0`; the long-time averaged
//! distribution is the inverse-speed density between two turning points.
//! Two situations are covered:
//!
//! * single well whose active pair of turning points jumps at the critical
//!   point (static condensate), with density `1 / (pi sqrt((x0 - x)(x - r)))`;
//! * symmetric double well with turning points `+-x0`, `+-r` (driven condensate
//!   and LMG), with density `N / sqrt((x0^2 - x^2)(x^2 - r^2))` and the
//!   elliptic parameter `m = x0^2 / (x0^2 - r^2)` separating trapped (`m > 1`)
//!   from untrapped (`m < 1`) motion.
//!
//! Unless stated otherwise, "scaled" coordinates are `x = (label - Delta_ave) / Delta_D`,
//! i.e. `x = 2 rho0 - 1` for the condensate and `x = z` for LMG.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{domain, invalid, Result};
use crate::hilbert::SectorBasis;
use crate::models::ModelParams;
use crate::numerics::{elliptic_e, elliptic_k, singular_quadrature};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    /// Single well, abrupt change of the active root pair.
    StaticBec,
    /// Symmetric double well in `x = 2 rho0 - 1`.
    DrivenBec,
    /// Symmetric double well in `z`.
    Lmg,
}

impl PotentialKind {
    pub fn is_double_well(&self) -> bool {
        !matches!(self, PotentialKind::StaticBec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Single well, control parameter below the critical value.
    BelowCritical,
    /// Single well, control parameter above the critical value.
    AboveCritical,
    /// Double well, motion confined to one well (`m > 1`).
    Trapped,
    /// Double well, both wells explored (`m < 1`).
    Untrapped,
    /// Exactly at the critical value; predictions are one-sided limits.
    Critical,
}

/// Effective potential of one quench with its roots and dynamical phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialModel {
    kind: PotentialKind,
    params: ModelParams,
    x0: f64,
    roots: Vec<Complex64>,
    active_pair: (f64, f64),
    critical_value: f64,
    phase: Phase,
    m: Option<f64>,
    r_squared: Option<f64>,
    degenerate: bool,
}

impl PotentialModel {
    /// Builds the potential for a parameter set; requires zero initial momentum.
    pub fn from_params(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        match *params {
            ModelParams::StaticBec { c, q, rho0, theta } => {
                zero_momentum(theta)?;
                static_potential(c, q, rho0)
            }
            ModelParams::DrivenBec { g0, gj, rho0, theta } => {
                zero_momentum(theta)?;
                driven_potential(gj / g0, rho0)
            }
            ModelParams::Lmg { chi, omega, z0, phi } => {
                zero_momentum(phi)?;
                if !(omega > 0.0) {
                    return Err(invalid("semiclassical LMG analysis needs Omega > 0"));
                }
                lmg_potential(chi / omega, z0)
            }
        }
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Initial position in the potential's own coordinate (`rho0` for the static
    /// condensate, `2 rho0 - 1` for the driven one, `z0` for LMG).
    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// All roots, real or complex, in the potential's own coordinate.
    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    /// The two turning points bounding the motion, in the potential's own coordinate.
    pub fn active_pair(&self) -> (f64, f64) {
        self.active_pair
    }

    /// `q_c`, `eta_c` or `chi_c`.
    pub fn critical_value(&self) -> f64 {
        self.critical_value
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Elliptic parameter (double wells only); `+inf` when the well has zero width.
    pub fn m(&self) -> Option<f64> {
        self.m
    }

    /// `r^2`, negative when the inner roots are imaginary (double wells only).
    pub fn r_squared(&self) -> Option<f64> {
        self.r_squared
    }

    /// Set for the driven condensate at `rho0 = 1/2`, where `x0 = 0` and `eta_c = 0`.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Converts a coordinate of this potential to the scaled coordinate in `[-1, 1]`.
    pub fn to_scaled(&self, x: f64) -> f64 {
        match self.kind {
            PotentialKind::StaticBec => 2.0 * x - 1.0,
            _ => x,
        }
    }

    /// Active turning points in scaled coordinates, `(x0, r)` with `x0` first.
    pub fn scaled_turning_points(&self) -> (f64, f64) {
        (self.to_scaled(self.active_pair.0), self.to_scaled(self.active_pair.1))
    }

    /// Scaled initial position.
    pub fn scaled_x0(&self) -> f64 {
        self.to_scaled(self.x0)
    }

    /// Range of valid coordinates for [`potential_eval`].
    pub fn domain(&self) -> (f64, f64) {
        match self.kind {
            PotentialKind::StaticBec => (0.0, 1.0),
            _ => (-1.0, 1.0),
        }
    }
}

fn zero_momentum(p: f64) -> Result<()> {
    if p != 0.0 {
        return Err(invalid(
            "semiclassical predictions assume zero initial momentum (theta = phi = 0)",
        ));
    }
    Ok(())
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Signed square root: real for `r2 >= 0`, imaginary otherwise.
fn root_of(r2: f64) -> Complex64 {
    if r2 >= 0.0 {
        real(r2.sqrt())
    } else {
        Complex64::new(0.0, (-r2).sqrt())
    }
}

/// Static condensate: roots `rho0`, `1 - rho0 - q/2c`, `rho0 - (2c/q) rho0 (1 - rho0)`
/// and `q_c = 2c (1 - rho0)`.
pub fn static_potential(c: f64, q: f64, rho0: f64) -> Result<PotentialModel> {
    if !(c > 0.0) {
        return Err(invalid("static potential needs c > 0"));
    }
    if !(rho0 > 0.0 && rho0 < 1.0) {
        return Err(invalid(format!("static potential needs 0 < rho0 < 1, got {rho0}")));
    }
    if !(q >= 0.0) || !q.is_finite() {
        return Err(invalid(format!("static potential needs finite q >= 0, got {q}")));
    }
    let qc = 2.0 * c * (1.0 - rho0);
    let r1 = rho0;
    let r2 = 1.0 - rho0 - q / (2.0 * c);
    let mut roots = vec![real(r1), real(r2)];
    let r3 = (q > 0.0).then(|| rho0 - (2.0 * c / q) * rho0 * (1.0 - rho0));
    if let Some(r3) = r3 {
        roots.push(real(r3));
    }
    let (phase, partner) = if q < qc {
        (Phase::BelowCritical, r2)
    } else if q > qc {
        (Phase::AboveCritical, r3.expect("q > q_c > 0"))
    } else {
        (Phase::Critical, r2)
    };
    Ok(PotentialModel {
        kind: PotentialKind::StaticBec,
        params: ModelParams::StaticBec { c, q, rho0, theta: 0.0 },
        x0: r1,
        roots,
        active_pair: (r1, partner),
        critical_value: qc,
        phase,
        m: None,
        r_squared: None,
        degenerate: false,
    })
}

/// `eta_c = 2 (1 - 2 rho0)^2 / (1 + 4 rho0 - 4 rho0^2)`.
pub fn driven_critical_eta(rho0: f64) -> f64 {
    2.0 * (1.0 - 2.0 * rho0).powi(2) / (1.0 + 4.0 * rho0 - 4.0 * rho0 * rho0)
}

/// Driven condensate with `eta = Gj / G0`, in the shifted coordinate `x = 2 rho0 - 1`.
pub fn driven_potential(eta: f64, rho0: f64) -> Result<PotentialModel> {
    if !(0.0..2.0).contains(&eta) {
        return Err(invalid(format!("driven potential needs 0 <= eta < 2, got {eta}")));
    }
    if !(rho0 > 0.0 && rho0 < 1.0) {
        return Err(invalid(format!("driven potential needs 0 < rho0 < 1, got {rho0}")));
    }
    let u0 = rho0 * (1.0 - rho0);
    let x0 = 2.0 * rho0 - 1.0;
    let x0_sq = 1.0 - 4.0 * u0;
    let r_sq = 1.0 - 4.0 * ((2.0 + eta) / (2.0 - eta)) * u0;
    let eta_c = driven_critical_eta(rho0);
    let degenerate = rho0 == 0.5;

    let (phase, m) = if degenerate {
        (Phase::Untrapped, 0.0)
    } else if eta == eta_c {
        (Phase::Critical, 1.0)
    } else if eta == 0.0 {
        (Phase::Trapped, f64::INFINITY)
    } else {
        // x0^2 - r^2 = 8 u0 eta / (2 - eta)
        let m = x0_sq * (2.0 - eta) / (8.0 * u0 * eta);
        (if eta < eta_c { Phase::Trapped } else { Phase::Untrapped }, m)
    };
    double_well(
        PotentialKind::DrivenBec,
        ModelParams::DrivenBec { g0: 1.0, gj: eta, rho0, theta: 0.0 },
        x0,
        r_sq,
        eta_c,
        phase,
        m,
        degenerate,
    )
}

/// `chi_c = 2 (1 + sqrt(1 - z0^2)) / z0^2`.
pub fn lmg_critical_chi(z0: f64) -> f64 {
    2.0 * (1.0 + (1.0 - z0 * z0).sqrt()) / (z0 * z0)
}

/// Mean-field energy per particle `chi z0^2 / 2 - sqrt(1 - z0^2)` (Omega = 1, phi = 0).
pub fn lmg_energy(chi: f64, z0: f64) -> f64 {
    chi * z0 * z0 / 2.0 - (1.0 - z0 * z0).sqrt()
}

/// LMG with `Omega = 1` and `phi(0) = 0`.
pub fn lmg_potential(chi: f64, z0: f64) -> Result<PotentialModel> {
    if !(chi >= 0.0) || !chi.is_finite() {
        return Err(invalid(format!("LMG potential needs chi >= 0, got {chi}")));
    }
    if !(z0.abs() > 0.0 && z0.abs() < 1.0) {
        return Err(invalid(format!("LMG potential needs 0 < |z0| < 1, got {z0}")));
    }
    let x0_sq = z0 * z0;
    let chi_c = lmg_critical_chi(z0);
    let params = ModelParams::Lmg { chi, omega: 1.0, z0, phi: 0.0 };
    if chi == 0.0 {
        // Free precession: only the outer pair of roots survives.
        return double_well(
            PotentialKind::Lmg,
            params,
            z0,
            f64::NEG_INFINITY,
            chi_c,
            Phase::Untrapped,
            0.0,
            false,
        );
    }
    // The quartic in z^2 has roots z0^2 and r^2; their product is 4 (E0^2 - 1) / chi^2.
    let e0 = lmg_energy(chi, z0);
    let r_sq = 4.0 * (e0 * e0 - 1.0) / (chi * chi * x0_sq);
    let (phase, m) = if chi == chi_c {
        (Phase::Critical, 1.0)
    } else {
        let m = x0_sq / (x0_sq - r_sq);
        (if chi > chi_c { Phase::Trapped } else { Phase::Untrapped }, m)
    };
    double_well(PotentialKind::Lmg, params, z0, r_sq, chi_c, phase, m, false)
}

#[allow(clippy::too_many_arguments)]
fn double_well(
    kind: PotentialKind,
    params: ModelParams,
    x0: f64,
    r_sq: f64,
    critical_value: f64,
    phase: Phase,
    m: f64,
    degenerate: bool,
) -> Result<PotentialModel> {
    let roots = if r_sq.is_finite() {
        let r = root_of(r_sq);
        vec![real(x0), r, -r, real(-x0)]
    } else {
        vec![real(x0), real(-x0)]
    };
    let partner = match phase {
        Phase::Trapped => r_sq.max(0.0).sqrt().copysign(x0),
        Phase::Critical => 0.0,
        _ => -x0,
    };
    Ok(PotentialModel {
        kind,
        params,
        x0,
        roots,
        active_pair: (x0, partner),
        critical_value,
        phase,
        m: Some(m),
        r_squared: Some(r_sq),
        degenerate,
    })
}

/// `V_eff(x)` in the potential's own coordinate.
pub fn potential_eval(model: &PotentialModel, x: f64) -> Result<f64> {
    let (lo, hi) = model.domain();
    if !(lo..=hi).contains(&x) {
        return Err(invalid(format!("coordinate {x} outside [{lo}, {hi}]")));
    }
    Ok(match *model.params() {
        ModelParams::StaticBec { c, q, rho0, .. } => {
            let u = x * (1.0 - x);
            let inner = c * (1.0 - rho0) * rho0 + (1.0 - rho0) * (q + c * rho0)
                - (1.0 - x) * (q + c * x);
            4.0 * c * c * u * u - 4.0 * inner * inner
        }
        ModelParams::DrivenBec { gj: eta, rho0, .. } => {
            let rho = (x + 1.0) / 2.0;
            let u = rho * (1.0 - rho);
            let u0 = rho0 * (1.0 - rho0);
            let well = 2.0 * u - (2.0 + eta) * u0;
            -eta * eta * u * u + well * well
        }
        ModelParams::Lmg { chi, z0, .. } => {
            let e0 = lmg_energy(chi, z0);
            let w = chi * x * x / 2.0 - e0;
            x * x - 1.0 + w * w
        }
    })
}

/// Single-well density `1 / (pi sqrt((x0 - x)(x - r)))` on the open interval between the roots.
pub fn density_type_a(x: f64, x0: f64, r: f64) -> Result<f64> {
    let (lo, hi) = if x0 < r { (x0, r) } else { (r, x0) };
    if !(x > lo && x < hi) {
        return Err(domain(format!("x = {x} outside the open interval ({lo}, {hi})")));
    }
    Ok(1.0 / (PI * ((hi - x) * (x - lo)).sqrt()))
}

/// Normalized double-well density `N / sqrt((x0^2 - x^2)(x^2 - r^2))`.
///
/// Trapped (`0 < r^2 < x0^2`): supported on the well containing `x0`.
/// Untrapped (`r^2 < 0`): supported on `(-|x0|, |x0|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypeBDensity {
    x0: f64,
    r_squared: f64,
    lo: f64,
    hi: f64,
    normalization: f64,
}

impl TypeBDensity {
    pub fn new(x0: f64, r_squared: f64) -> Result<Self> {
        let x0_sq = x0 * x0;
        if !(x0_sq > 0.0) || !r_squared.is_finite() {
            return Err(domain("double-well density needs x0 != 0 and finite r^2"));
        }
        if r_squared == 0.0 {
            return Err(domain("density is not normalizable at the separatrix (r = 0)"));
        }
        if r_squared >= x0_sq {
            return Err(domain("r^2 >= x0^2 leaves no classically allowed region"));
        }
        let a = x0.abs();
        let (lo, hi) = if r_squared > 0.0 {
            let r = r_squared.sqrt();
            if x0 > 0.0 {
                (r, a)
            } else {
                (-a, -r)
            }
        } else {
            (-a, a)
        };
        let raw = |x: f64| 1.0 / ((x0_sq - x * x) * (x * x - r_squared)).sqrt();
        let z = singular_quadrature(raw, lo, hi)?;
        Ok(Self {
            x0,
            r_squared,
            lo,
            hi,
            normalization: 1.0 / z,
        })
    }

    /// Endpoints of the support (both turning points).
    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn is_trapped(&self) -> bool {
        self.r_squared > 0.0
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    fn raw(&self, x: f64) -> f64 {
        1.0 / ((self.x0 * self.x0 - x * x) * (x * x - self.r_squared)).sqrt()
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > self.lo && x < self.hi) {
            return Err(domain(format!(
                "x = {x} outside the open interval ({}, {})",
                self.lo, self.hi
            )));
        }
        Ok(self.normalization * self.raw(x))
    }

    /// `int x^k P(x) dx` by singular quadrature.
    pub fn moment(&self, k: i32) -> Result<f64> {
        let f = |x: f64| x.powi(k) * self.raw(x);
        Ok(self.normalization * singular_quadrature(f, self.lo, self.hi)?)
    }

    /// Variance from quadrature moments, in scaled units.
    pub fn variance(&self) -> Result<f64> {
        let m1 = self.moment(1)?;
        Ok(self.moment(2)? - m1 * m1)
    }
}

/// Point value of the normalized double-well density.
pub fn density_type_b(x: f64, x0: f64, r_squared: f64) -> Result<f64> {
    TypeBDensity::new(x0, r_squared)?.eval(x)
}

/// `sigma^2 = (Delta_D^2 / 8) (x0 - r)^2`.
pub fn variance_type_a(x0: f64, r: f64, delta_d: f64) -> f64 {
    delta_d * delta_d / 8.0 * (x0 - r).powi(2)
}

/// Trapped double-well variance
/// `(Delta_D x0 / K(1/m))^2 [E(1/m) K(1/m) - (pi/2)^2]`, `m > 1`.
pub fn variance_type_b_trapped(m: f64, x0: f64, delta_d: f64) -> Result<f64> {
    if !(m > 1.0) {
        return Err(domain(format!("trapped variance needs m > 1, got {m}")));
    }
    let p = 1.0 / m;
    let k = elliptic_k(p)?;
    let e = elliptic_e(p)?;
    Ok((delta_d * x0 / k).powi(2) * (e * k - FRAC_PI_2 * FRAC_PI_2))
}

/// Untrapped double-well variance
/// `(Delta_D x0)^2 ((1 - m)/m) [E(m/(m-1)) / K(m/(m-1)) - 1]`, `0 < m < 1`.
pub fn variance_type_b_untrapped(m: f64, x0: f64, delta_d: f64) -> Result<f64> {
    if !(m > 0.0 && m < 1.0) {
        return Err(domain(format!("untrapped variance needs 0 < m < 1, got {m}")));
    }
    let p = m / (m - 1.0);
    let ratio = elliptic_e(p)? / elliptic_k(p)?;
    Ok((delta_d * x0).powi(2) * ((1.0 - m) / m) * (ratio - 1.0))
}

/// `F / (Delta_D x0)^2` for a symmetric double well, a function of `m` alone.
///
/// `m = 1` returns the common one-sided limit 0; `m = 0` the free-rotor limit 2.
pub fn universal_scaled_qfi(m: f64) -> Result<f64> {
    if m.is_nan() || m < 0.0 {
        return Err(domain(format!("elliptic parameter must be >= 0, got {m}")));
    }
    if m == 0.0 {
        return Ok(2.0);
    }
    if m == 1.0 {
        return Ok(0.0);
    }
    if m.is_infinite() {
        return Ok(0.0);
    }
    if m > 1.0 {
        Ok(4.0 * variance_type_b_trapped(m, 1.0, 1.0)?)
    } else {
        Ok(4.0 * variance_type_b_untrapped(m, 1.0, 1.0)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymptoticRegime {
    /// `m << 1`.
    DeepUntrapped,
    /// `m >> 1`.
    DeepTrapped,
    /// `m -> 1^-`.
    NearCriticalBelow,
}

/// Leading-order approximations of [`universal_scaled_qfi`].
pub fn qfi_asymptotics(m: f64, regime: AsymptoticRegime) -> f64 {
    match regime {
        AsymptoticRegime::DeepUntrapped => 2.0 * (1.0 - m / 8.0),
        AsymptoticRegime::DeepTrapped => 1.0 / (8.0 * m * m),
        AsymptoticRegime::NearCriticalBelow => {
            2.0 * (m - 1.0 + (m + 3.0) / (16.0 / (1.0 - m)).ln())
        }
    }
}

/// Semiclassical value of a long-time averaged quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Prediction {
    Value(f64),
    /// Exactly at the critical point: the two one-sided limits.
    Critical { below: f64, above: f64 },
}

impl Prediction {
    /// The value, or the mean of the one-sided limits at criticality.
    pub fn central(&self) -> f64 {
        match *self {
            Prediction::Value(v) => v,
            Prediction::Critical { below, above } => 0.5 * (below + above),
        }
    }

    pub fn is_critical(&self) -> bool {
        matches!(self, Prediction::Critical { .. })
    }

    fn map(self, f: impl Fn(f64) -> f64) -> Self {
        match self {
            Prediction::Value(v) => Prediction::Value(f(v)),
            Prediction::Critical { below, above } => Prediction::Critical {
                below: f(below),
                above: f(above),
            },
        }
    }
}

/// Semiclassical `F / Delta_D^2` (single well) or `F / (Delta_D x0)^2` (double well).
pub fn scaled_semiclassical_qfi(model: &PotentialModel) -> Result<Prediction> {
    match model.kind() {
        PotentialKind::StaticBec => {
            // 4 sigma^2 / Delta_D^2 with sigma^2 = Delta_D^2 (x0 - r)^2 / 8 in x = 2 rho - 1.
            let branch = |r: f64| 4.0 * variance_type_a(2.0 * model.x0 - 1.0, 2.0 * r - 1.0, 1.0);
            let (x0, partner) = model.active_pair();
            debug_assert_eq!(x0, model.x0);
            Ok(match model.phase() {
                Phase::Critical => {
                    let v = branch(partner);
                    Prediction::Critical { below: v, above: v }
                }
                _ => Prediction::Value(branch(partner)),
            })
        }
        _ => {
            let m = model.m().expect("double wells carry m");
            Ok(match model.phase() {
                Phase::Critical => Prediction::Critical { below: 0.0, above: 0.0 },
                _ => Prediction::Value(universal_scaled_qfi(m)?),
            })
        }
    }
}

/// Semiclassical long-time averaged QFI `4 sigma_X^2` for a sector of half-span `delta_d`.
pub fn semiclassical_qfi(model: &PotentialModel, delta_d: f64) -> Result<Prediction> {
    let scale = match model.kind() {
        PotentialKind::StaticBec => delta_d * delta_d,
        _ => (delta_d * model.scaled_x0()).powi(2),
    };
    Ok(scaled_semiclassical_qfi(model)?.map(|v| v * scale))
}

/// Semiclassical `Pbar(x_i) ~ P(x_i) Delta_x / Delta_D` on every basis state.
///
/// States outside the open interval between the turning points get 0.
pub fn discretized_density(model: &PotentialModel, basis: &SectorBasis) -> Result<Vec<f64>> {
    let weight = basis.step() / basis.delta_d();
    let xs = basis.scaled_coordinates();
    match model.kind() {
        PotentialKind::StaticBec => {
            let (x0, r) = model.scaled_turning_points();
            Ok(xs
                .iter()
                .map(|&x| density_type_a(x, x0, r).map_or(0.0, |p| p * weight))
                .collect())
        }
        _ => {
            let r_sq = model.r_squared().unwrap_or(f64::NAN);
            if !r_sq.is_finite() {
                // chi = 0: arcsine law on (-x0, x0).
                let x0 = model.x0();
                return Ok(xs
                    .iter()
                    .map(|&x| density_type_a(x, x0, -x0).map_or(0.0, |p| p * weight))
                    .collect());
            }
            let density = TypeBDensity::new(model.scaled_x0(), r_sq)?;
            Ok(xs.iter().map(|&x| density.eval(x).map_or(0.0, |p| p * weight)).collect())
        }
    }
}

/// Driving ratio `eta` giving elliptic parameter `m` for the driven condensate.
pub fn eta_for_m(m: f64, rho0: f64) -> Result<f64> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(invalid(format!("m must be positive and finite, got {m}")));
    }
    if !(rho0 > 0.0 && rho0 < 1.0) || rho0 == 0.5 {
        return Err(invalid("eta(m) needs 0 < rho0 < 1, rho0 != 1/2"));
    }
    let u0 = rho0 * (1.0 - rho0);
    let x0_sq = 1.0 - 4.0 * u0;
    let eta = 2.0 * x0_sq / (8.0 * u0 * m + x0_sq);
    Ok(eta)
}

/// Interaction `chi` giving elliptic parameter `m` for LMG (Omega = 1).
pub fn chi_for_m(m: f64, z0: f64) -> Result<f64> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(invalid(format!("m must be positive and finite, got {m}")));
    }
    if !(z0.abs() > 0.0 && z0.abs() < 1.0) {
        return Err(invalid("chi(m) needs 0 < |z0| < 1"));
    }
    // r^2 = z0^2 (1 - 1/m) reduces to chi^2 z0^2 / m - 4 s chi - 4 = 0, s = sqrt(1 - z0^2).
    let z_sq = z0 * z0;
    let s = (1.0 - z_sq).sqrt();
    Ok(2.0 * m * (s + (s * s + z_sq / m).sqrt()) / z_sq)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn static_critical_value() {
        let p = static_potential(1.0, 0.5, 0.6).unwrap();
        assert!((p.critical_value() - 0.8).abs() < 1e-15);
        assert_eq!(p.phase(), Phase::BelowCritical);
        let p = static_potential(1.0, 1.0, 0.6).unwrap();
        assert_eq!(p.phase(), Phase::AboveCritical);
        let p = static_potential(1.0, 0.8, 0.6).unwrap();
        assert_eq!(p.phase(), Phase::Critical);
    }

    #[test]
    fn static_roots_vanish_potential() {
        let p = static_potential(1.0, 0.5, 0.6).unwrap();
        assert_eq!(p.roots().len(), 3);
        for r in p.roots() {
            if (0.0..=1.0).contains(&r.re) {
                assert!(potential_eval(&p, r.re).unwrap().abs() < 1e-12);
            }
        }
        // r3 lies outside [0, 1]; check the polynomial directly.
        let ModelParams::StaticBec { c, q, rho0, .. } = *p.params() else { unreachable!() };
        let r3 = p.roots()[2].re;
        let inner = c * (1.0 - rho0) * rho0 + (1.0 - rho0) * (q + c * rho0) - (1.0 - r3) * (q + c * r3);
        let v = 4.0 * c * c * (r3 * (1.0 - r3)).powi(2) - 4.0 * inner * inner;
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn static_roots_merge_at_criticality() {
        for i in 1..20 {
            let rho = i as f64 / 20.0;
            let qc = 2.0 * (1.0 - rho);
            let p = static_potential(1.0, qc, rho).unwrap();
            let r = p.roots();
            assert!((r[1].re - r[2].re).abs() < 1e-14, "rho {rho}");
        }
    }

    #[test]
    fn static_q_zero_has_two_roots() {
        let p = static_potential(1.0, 0.0, 0.6).unwrap();
        assert_eq!(p.roots().len(), 2);
        assert_eq!(p.active_pair(), (0.6, 0.4));
        assert!(static_potential(1.0, -0.1, 0.6).is_err());
        assert!(static_potential(0.0, 0.1, 0.6).is_err());
        assert!(static_potential(1.0, 0.1, 1.0).is_err());
    }

    #[test]
    fn driven_critical_eta_value() {
        let p = driven_potential(0.3, 0.8).unwrap();
        assert!((p.critical_value() - 0.72 / 1.64).abs() < 1e-15);
        let c = driven_potential(p.critical_value(), 0.8).unwrap();
        assert_eq!(c.phase(), Phase::Critical);
        assert_eq!(c.m(), Some(1.0));
        assert!(c.r_squared().unwrap().abs() < 1e-15);
    }

    #[test]
    fn driven_m_closed_form() {
        for i in 1..40 {
            let eta = i as f64 * 0.049;
            let p = driven_potential(eta, 0.8).unwrap();
            let m = p.m().unwrap();
            assert!((m - 0.36 * (2.0 - eta) / (1.28 * eta)).abs() < 1e-12 * m);
            let r2 = p.r_squared().unwrap();
            let from_roots = 0.36 / (0.36 - r2);
            assert!((m - from_roots).abs() < 1e-10 * m);
        }
    }

    #[test]
    fn driven_degenerate_center() {
        let p = driven_potential(0.5, 0.5).unwrap();
        assert!(p.is_degenerate());
        assert_eq!(p.critical_value(), 0.0);
        assert_eq!(p.phase(), Phase::Untrapped);
        assert!(driven_potential(2.0, 0.8).is_err());
    }

    #[test]
    fn lmg_critical_chi_value() {
        assert!((lmg_critical_chi(0.6) - 10.0).abs() < 1e-14);
        let p = lmg_potential(10.0, 0.6).unwrap();
        assert_eq!(p.phase(), Phase::Critical);
        assert!(p.r_squared().unwrap().abs() < 1e-14);
    }

    #[test]
    fn lmg_roots_match_explicit_formula() {
        // r^2 = (2 / chi^2) (chi E0 - 1 - sqrt(1 - 2 chi E0 + chi^2)).
        for &z0 in &[0.3, 0.6, 0.9] {
            for i in 1..30 {
                let chi = i as f64;
                let e0 = lmg_energy(chi, z0);
                let explicit =
                    2.0 / (chi * chi) * (chi * e0 - 1.0 - (1.0 - 2.0 * chi * e0 + chi * chi).sqrt());
                let p = lmg_potential(chi, z0).unwrap();
                assert!((p.r_squared().unwrap() - explicit).abs() < 1e-12, "z0 {z0} chi {chi}");
            }
        }
    }

    #[test]
    fn lmg_outer_roots_vanish() {
        for &z0 in &[0.2, 0.6, -0.7] {
            for &chi in &[0.5, 4.0, 12.0, 40.0] {
                let p = lmg_potential(chi, z0).unwrap();
                assert!(potential_eval(&p, z0).unwrap().abs() < 1e-12);
                assert!(potential_eval(&p, -z0).unwrap().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lmg_free_rotor() {
        let p = lmg_potential(0.0, 0.6).unwrap();
        assert_eq!(p.m(), Some(0.0));
        assert_eq!(p.phase(), Phase::Untrapped);
        assert_eq!(p.roots().len(), 2);
    }

    #[test]
    fn potential_domain_checked() {
        let p = lmg_potential(3.0, 0.6).unwrap();
        assert!(potential_eval(&p, 1.5).is_err());
        let s = static_potential(1.0, 0.3, 0.6).unwrap();
        assert!(potential_eval(&s, -0.1).is_err());
    }

    #[test]
    fn double_wells_are_symmetric() {
        let models = [driven_potential(0.3, 0.8).unwrap(), lmg_potential(7.0, 0.6).unwrap()];
        for p in &models {
            for i in 0..=20 {
                let x = i as f64 / 20.0;
                let a = potential_eval(p, x).unwrap();
                let b = potential_eval(p, -x).unwrap();
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn type_a_density_values() {
        let (x0, r) = (0.6, -0.2);
        assert!((density_type_a(0.2, x0, r).unwrap() - 2.0 / (PI * 0.8)).abs() < 1e-15);
        assert!(density_type_a(0.6, x0, r).is_err());
        assert!(density_type_a(-0.3, x0, r).is_err());
    }

    #[test]
    fn type_a_variance_limits() {
        assert_eq!(variance_type_a(0.4, 0.4, 10.0), 0.0);
        assert!((variance_type_a(1.0, -1.0, 3.0) - 4.5).abs() < 1e-15);
    }

    #[test]
    fn type_b_domain_errors() {
        assert!(variance_type_b_trapped(1.0, 0.6, 1.0).is_err());
        assert!(variance_type_b_untrapped(1.0, 0.6, 1.0).is_err());
        assert!(variance_type_b_untrapped(0.0, 0.6, 1.0).is_err());
        assert!(TypeBDensity::new(0.6, 0.0).is_err());
        assert!(TypeBDensity::new(0.6, 0.5).is_err());
    }

    #[test]
    fn trapped_variance_positive() {
        for &m in &[1.0001, 1.1, 2.0, 10.0, 1e3] {
            assert!(variance_type_b_trapped(m, 0.6, 1.0).unwrap() > 0.0);
        }
    }

    #[test]
    fn untrapped_density_is_centered() {
        let d = TypeBDensity::new(0.6, -0.04).unwrap();
        assert!(d.moment(1).unwrap().abs() < 1e-14);
        assert!((d.moment(0).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn mirror_well_has_same_variance() {
        let a = TypeBDensity::new(0.6, 0.2).unwrap();
        let b = TypeBDensity::new(-0.6, 0.2).unwrap();
        assert!((a.variance().unwrap() - b.variance().unwrap()).abs() < 1e-14);
        assert!((a.eval(0.5).unwrap() - b.eval(-0.5).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn static_prediction_branches() {
        let d = 500.0;
        let rho = 0.6;
        let qc = 0.8;
        for &ratio in &[0.2, 0.5, 0.9] {
            let q = ratio * qc;
            let p = static_potential(1.0, q, rho).unwrap();
            let f = semiclassical_qfi(&p, d).unwrap().central();
            let want = 2.0 * d * d * (rho + (q - qc) / 2.0).powi(2);
            assert!((f - want).abs() < 1e-9 * want);
        }
        for &ratio in &[1.1, 1.7, 2.2] {
            let q = ratio * qc;
            let p = static_potential(1.0, q, rho).unwrap();
            let f = semiclassical_qfi(&p, d).unwrap().central();
            let want = 2.0 * d * d * (qc * rho / q).powi(2);
            assert!((f - want).abs() < 1e-9 * want);
        }
        let p = static_potential(1.0, qc, rho).unwrap();
        match semiclassical_qfi(&p, d).unwrap() {
            Prediction::Critical { below, above } => {
                let want = 2.0 * d * d * rho * rho;
                assert!((below - want).abs() < 1e-9 * want);
                assert!((above - want).abs() < 1e-9 * want);
            }
            other => panic!("expected critical, got {other:?}"),
        }
        let frozen = static_potential(1.0, 1e9, rho).unwrap();
        assert!(semiclassical_qfi(&frozen, d).unwrap().central() < 1e-9);
    }

    #[test]
    fn inversions_round_trip() {
        for i in 1..=40 {
            let m = i as f64 * 0.1;
            let eta = eta_for_m(m, 0.8).unwrap();
            let got = driven_potential(eta, 0.8).unwrap().m().unwrap();
            assert!((got - m).abs() < 1e-12, "driven m {m}: {got}");
            let chi = chi_for_m(m, 0.6).unwrap();
            let got = lmg_potential(chi, 0.6).unwrap().m().unwrap();
            assert!((got - m).abs() < 1e-12, "lmg m {m}: {got}");
        }
        assert!((eta_for_m(1.0, 0.8).unwrap() - driven_critical_eta(0.8)).abs() < 1e-15);
        assert!((chi_for_m(1.0, 0.6).unwrap() - 10.0).abs() < 1e-13);
        assert!(eta_for_m(0.0, 0.8).is_err());
        assert!(eta_for_m(1.0, 0.5).is_err());
    }

    #[test]
    fn from_params_requires_zero_momentum() {
        let p = ModelParams::Lmg { chi: 3.0, omega: 1.0, z0: 0.6, phi: 0.2 };
        assert!(PotentialModel::from_params(&p).is_err());
        let p = ModelParams::Lmg { chi: 6.0, omega: 2.0, z0: 0.6, phi: 0.0 };
        let model = PotentialModel::from_params(&p).unwrap();
        assert_eq!(model.params(), &ModelParams::Lmg { chi: 3.0, omega: 1.0, z0: 0.6, phi: 0.0 });
    }
}
