//! Marginal densities and distribution functions of the trace `s₁`.
//!
//! Three routes compute the density `f(s₁)` of each group:
//!
//! * **quadrature**: integrate the joint density over the fibre `s₁ = ε − 4`
//!   in the `(ε, λ)` chart. After `λ = sin φ` the integrand is smooth on the
//!   whole fibre, so this route is the reference.
//! * **series**: the same fibre integral expanded in `ρ = ε/(8 − ε)` with
//!   Catalan-number coefficients, truncated with an explicit tail majorant.
//! * **closed form**: semicircle for the diagonal group, `₂F₁(1/2, 3/2; 3; m)`
//!   for `SU(2)×SU(2)`, and complete elliptic integrals for `USp(4)`,
//!   with `m = 1 − s₁²/16`.
//!
//! Every density is even in `s₁`; the series and quadrature routes are
//! anchored at `s₁ = −4` and evaluate at `−|s₁|`, the closed forms depend on
//! `s₁²` only.

use std::cell::Cell;
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{self, GroupKind};
use crate::quad::{self, GaussLegendre, QuadResult};
use crate::specfun::{self, EllipticParam, SeriesControl};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DensityRoute {
    Series,
    Quadrature,
    ClosedForm,
}

impl DensityRoute {
    pub const ALL: [DensityRoute; 3] = [
        DensityRoute::Series,
        DensityRoute::Quadrature,
        DensityRoute::ClosedForm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DensityRoute::Series => "series",
            DensityRoute::Quadrature => "quadrature",
            DensityRoute::ClosedForm => "closed",
        }
    }
}

impl std::str::FromStr for DensityRoute {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "series" => Ok(DensityRoute::Series),
            "quadrature" | "quad" => Ok(DensityRoute::Quadrature),
            "closed" | "closed-form" => Ok(DensityRoute::ClosedForm),
            other => Err(Error::Parse(format!("unknown route '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureControl {
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureControl {
    pub fn new(abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > 0.0) {
            return Err(Error::Domain {
                name: "abs_tol",
                value: abs_tol,
                reason: "must be positive",
            });
        }
        if max_subdivisions == 0 {
            return Err(Error::Domain {
                name: "max_subdivisions",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        Ok(Self {
            abs_tol,
            max_subdivisions,
        })
    }
}

impl Default for QuadratureControl {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            max_subdivisions: 400,
        }
    }
}

/// Accuracy settings shared by the density routes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DensityControl {
    pub series: SeriesControl,
    pub quad: QuadratureControl,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityValue {
    pub value: f64,
    /// Route that actually produced the value (closed forms may delegate).
    pub route: DensityRoute,
    pub est_error: f64,
}

fn check_trace(s1: f64) -> Result<f64> {
    if (-4.0..=4.0).contains(&s1) {
        Ok(s1)
    } else {
        Err(Error::Domain {
            name: "s1",
            value: s1,
            reason: "trace must lie in [-4, 4]",
        })
    }
}

/// `ε⁴(8 − ε)/(32π²)` resp. `ε²(8 − ε)/(16π²)`: the fibre-integral prefactors.
fn lambda_prefactor(group: GroupKind, eps: f64) -> f64 {
    let pi2 = PI * PI;
    match group {
        GroupKind::Usp4 => eps.powi(4) * (8.0 - eps) / (32.0 * pi2),
        _ => eps * eps * (8.0 - eps) / (16.0 * pi2),
    }
}

/// Density of the trace of `group` at `s1`, by the requested route.
pub fn density(
    group: GroupKind,
    s1: f64,
    route: DensityRoute,
    ctrl: &DensityControl,
) -> Result<DensityValue> {
    let s1 = check_trace(s1)?;
    match route {
        DensityRoute::Quadrature => quadrature_density(group, s1, &ctrl.quad),
        DensityRoute::Series => series_density(group, s1, &ctrl.series),
        DensityRoute::ClosedForm => closed_form_density(group, s1, ctrl),
    }
}

fn quadrature_density(group: GroupKind, s1: f64, ctrl: &QuadratureControl) -> Result<DensityValue> {
    let eps = 4.0 - s1.abs();
    if group == GroupKind::DiagonalSu2 {
        // Pull back the SU(2) semicircle along s₁ = 2t.
        return Ok(DensityValue {
            value: 0.5 * measures::semicircle_density(0.5 * (eps - 4.0)),
            route: DensityRoute::Quadrature,
            est_error: 0.0,
        });
    }
    let pref = lambda_prefactor(group, eps);
    if pref == 0.0 {
        return Ok(DensityValue {
            value: 0.0,
            route: DensityRoute::Quadrature,
            est_error: 0.0,
        });
    }
    let rho = eps / (8.0 - eps);
    let weight_lambda_sq = group == GroupKind::Usp4;
    // λ = sin φ: ∫₀¹ w(λ)√((1−λ²)(1−ρ²λ²)) dλ = ∫₀^{π/2} w(sin φ) cos²φ √(1 − ρ² sin²φ) dφ
    let r = quad::adaptive(
        |phi| {
            let (s, c) = phi.sin_cos();
            let w = if weight_lambda_sq { s * s } else { 1.0 };
            w * c * c * (1.0 - rho * rho * s * s).max(0.0).sqrt()
        },
        0.0,
        FRAC_PI_2,
        &[],
        ctrl.abs_tol / pref,
        ctrl.max_subdivisions,
    )?;
    Ok(DensityValue {
        value: pref * r.value,
        route: DensityRoute::Quadrature,
        est_error: pref * r.est_error,
    })
}

/// Bracket `1 − (ρ²/8) Σ C_n C_{n+k}/16ⁿ ρ^{2n}` together with a bound on
/// the discarded tail (`k = 2` for `G`, `k = 1` for `H`).
///
/// With `C_n/4ⁿ ≤ 1/(√π n^{3/2})` the summands are at most `c/(π n³)ρ^{2n}`
/// (`c = 16` resp. `4`), so the tail after `N` terms is bounded by both
/// `c/(2π(N−1)²)` and `cρ^{2N}/(πN³(1−ρ²))`.
fn inner_sum_with_bound(
    group: GroupKind,
    rho: f64,
    tol: f64,
    max_terms: usize,
) -> Result<(f64, f64)> {
    let (shift, c) = match group {
        GroupKind::Usp4 => (2usize, 16.0),
        GroupKind::Su2xSu2 => (1usize, 4.0),
        GroupKind::DiagonalSu2 => {
            return Err(Error::Domain {
                name: "group",
                value: f64::NAN,
                reason: "Catalan product sums exist for G and H only",
            })
        }
    };
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Domain {
            name: "rho",
            value: rho,
            reason: "rho must lie in [0, 1]",
        });
    }
    let rho2 = rho * rho;
    if rho2 == 0.0 {
        return Ok((1.0, 0.0));
    }
    let mut lead = specfun::CatalanRatios::new();
    let mut ahead = specfun::CatalanRatios::new();
    for _ in 0..shift {
        ahead.next();
    }
    // Neumaier summation: up to ~10⁶ terms are needed at ρ = 1.
    let mut sum = 0.0;
    let mut carry = 0.0;
    let mut pow = 1.0;
    let mut bound = f64::INFINITY;
    for n in 0..max_terms {
        let (rn, rk) = (lead.next().unwrap_or(0.0), ahead.next().unwrap_or(0.0));
        let term = c * rn * rk * pow;
        let t = sum + term;
        carry += if sum.abs() >= term.abs() {
            (sum - t) + term
        } else {
            (term - t) + sum
        };
        sum = t;
        pow *= rho2;
        let big_n = (n + 1) as f64;
        if n >= 1 {
            let poly = c / (2.0 * PI * (big_n - 1.0).powi(2));
            let geo = if rho2 < 1.0 {
                c * pow / (PI * big_n.powi(3) * (1.0 - rho2))
            } else {
                f64::INFINITY
            };
            bound = rho2 / 8.0 * poly.min(geo);
            if bound <= tol {
                return Ok((1.0 - rho2 / 8.0 * (sum + carry), bound));
            }
        }
    }
    Err(Error::NonConvergence {
        max_terms,
        tol,
        tail: bound,
    })
}

/// The bracketed Catalan series of the fibre integral, truncated once the
/// tail bound is below `ctrl.tol`.
pub fn series_inner_sum(group: GroupKind, rho: f64, ctrl: &SeriesControl) -> Result<f64> {
    inner_sum_with_bound(group, rho, ctrl.tol, ctrl.max_terms).map(|(v, _)| v)
}

fn series_density(group: GroupKind, s1: f64, ctrl: &SeriesControl) -> Result<DensityValue> {
    let eps = 4.0 - s1.abs();
    let route = DensityRoute::Series;
    if group == GroupKind::DiagonalSu2 {
        // ε^{1/2}/(√8 π) · √(1 − ε/8), square root by its Catalan series.
        let pref = eps.sqrt() / (8f64.sqrt() * PI);
        if pref == 0.0 {
            return Ok(DensityValue {
                value: 0.0,
                route,
                est_error: 0.0,
            });
        }
        let inner = SeriesControl {
            tol: ctrl.tol / pref,
            ..*ctrl
        };
        let v = specfun::sqrt_one_minus_series(eps / 8.0, inner)?;
        return Ok(DensityValue {
            value: pref * v,
            route,
            est_error: ctrl.tol,
        });
    }
    // ε⁴(8−ε)/(512π) resp. ε²(8−ε)/(64π): prefactor times the λ⁰ moment.
    let pref = match group {
        GroupKind::Usp4 => eps.powi(4) * (8.0 - eps) / (512.0 * PI),
        _ => eps * eps * (8.0 - eps) / (64.0 * PI),
    };
    if pref == 0.0 {
        return Ok(DensityValue {
            value: 0.0,
            route,
            est_error: 0.0,
        });
    }
    let rho = eps / (8.0 - eps);
    let (bracket, tail) = inner_sum_with_bound(group, rho, ctrl.tol / pref, ctrl.max_terms)?;
    Ok(DensityValue {
        value: pref * bracket,
        route,
        est_error: pref * tail,
    })
}

/// `USp(4)` density in elliptic integrals as printed,
/// `(64/15π)((m² − 16m + 16)E(m) − 8(m² − 3m + 2)K(m))`, uncalibrated.
///
/// The `K` term is evaluated as `(m − 1)(m − 2)K(m)`, whose limit at `m = 1` is 0.
pub fn elliptic_form_uncalibrated(x: f64) -> Result<f64> {
    let m = EllipticParam::from_trace(x)?;
    let mv = m.value();
    let e = specfun::elliptic_e(m);
    let k_term = if mv == 1.0 {
        0.0
    } else {
        (mv - 1.0) * (mv - 2.0) * specfun::elliptic_k(m)?
    };
    Ok(64.0 / (15.0 * PI) * ((mv * mv - 16.0 * mv + 16.0) * e - 8.0 * k_term))
}

/// Which argument the Legendre-function form is evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LegendreArgument {
    /// `z = (x² + 16)/(4x)`.
    Printed,
    /// `z = (x² + 16)/(8x)`.
    Rescaled,
}

/// `−(64/15π)√x (1 − x²/16)² P²_{1/2}(z)` on `0 < x ≤ 4`.
///
/// The branch of `P²_{1/2}` for `x < 0` is not defined here; negative traces
/// are reached through evenness of the density.
pub fn legendre_form_density(x: f64, arg: LegendreArgument) -> Result<f64> {
    if !(x > 0.0 && x <= 4.0) {
        return Err(Error::Domain {
            name: "x",
            value: x,
            reason: "Legendre form evaluated on (0, 4] only",
        });
    }
    let p = match arg {
        LegendreArgument::Printed => specfun::legendre_p2_half((x * x + 16.0) / (4.0 * x))?,
        LegendreArgument::Rescaled => {
            specfun::legendre_p2_half_integral((x * x + 16.0) / (8.0 * x))
        }
    };
    Ok(-64.0 / (15.0 * PI) * x.sqrt() * (1.0 - x * x / 16.0).powi(2) * p)
}

/// Maximum relative spread tolerated for a fitted constant to count as constant.
pub const CALIBRATION_TOL: f64 = 1e-6;

/// Scalar `c` fitted so that `c · candidate ≈ quadrature` on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub constant: f64,
    /// `max |ratio/c − 1|` over the fitted points.
    pub max_rel_deviation: f64,
    pub points: usize,
}

impl Calibration {
    pub fn is_constant(&self) -> bool {
        self.max_rel_deviation <= CALIBRATION_TOL
    }
}

/// The 33-point grid of `[−4, 0]` used for route comparisons.
pub fn comparison_grid() -> Vec<f64> {
    (0..=32).map(|i| -4.0 + i as f64 / 8.0).collect()
}

/// Least-squares scalar between `candidate(x)` and the quadrature density of
/// `group` over `xs`; points where the reference density is below `1e-8`
/// carry no usable ratio and are skipped.
pub fn fit_constant<F>(
    group: GroupKind,
    xs: &[f64],
    mut candidate: F,
    ctrl: &DensityControl,
) -> Result<Calibration>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut pairs = Vec::with_capacity(xs.len());
    for &x in xs {
        let reference = quadrature_density(group, check_trace(x)?, &ctrl.quad)?.value;
        if reference < 1e-8 {
            continue;
        }
        pairs.push((reference, candidate(x)?));
    }
    if pairs.is_empty() {
        return Err(Error::CalibrationRequired(
            "no usable calibration points".into(),
        ));
    }
    let num: f64 = pairs.iter().map(|(r, c)| r * c).sum();
    let den: f64 = pairs.iter().map(|(_, c)| c * c).sum();
    let constant = num / den;
    let max_rel_deviation = pairs
        .iter()
        .map(|(r, c)| (r / (constant * c) - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(Calibration {
        constant,
        max_rel_deviation,
        points: pairs.len(),
    })
}

/// Fits the constant of [`elliptic_form_uncalibrated`] against quadrature.
pub fn calibrate_elliptic_form(ctrl: &DensityControl) -> Result<Calibration> {
    let xs: Vec<f64> = comparison_grid().into_iter().map(f64::abs).collect();
    fit_constant(GroupKind::Usp4, &xs, elliptic_form_uncalibrated, ctrl)
}

/// Fits the constant of [`legendre_form_density`] on `(0, 4)`.
pub fn calibrate_legendre_form(
    arg: LegendreArgument,
    ctrl: &DensityControl,
) -> Result<Calibration> {
    let xs: Vec<f64> = (1..32).map(|i| i as f64 / 8.0).collect();
    fit_constant(
        GroupKind::Usp4,
        &xs,
        |x| legendre_form_density(x, arg),
        ctrl,
    )
}

/// Process-wide calibration of the `USp(4)` elliptic form; computed once,
/// immutable afterwards.
pub fn elliptic_calibration() -> Result<Calibration> {
    static CAL: OnceLock<Result<Calibration>> = OnceLock::new();
    let cal = CAL.get_or_init(|| calibrate_elliptic_form(&DensityControl::default()));
    match cal {
        Ok(c) if c.is_constant() => Ok(*c),
        Ok(c) => Err(Error::CalibrationRequired(format!(
            "fitted constant {} varies by {:e} across the grid",
            c.constant, c.max_rel_deviation
        ))),
        Err(e) => Err(Error::CalibrationRequired(e.to_string())),
    }
}

fn closed_form_density(group: GroupKind, s1: f64, ctrl: &DensityControl) -> Result<DensityValue> {
    let route = DensityRoute::ClosedForm;
    match group {
        GroupKind::DiagonalSu2 => Ok(DensityValue {
            value: measures::mu_delta_density(s1),
            route,
            est_error: 0.0,
        }),
        GroupKind::Su2xSu2 => {
            let m = EllipticParam::from_trace(s1)?.value();
            if m > specfun::HYP2F1_SERIES_LIMIT {
                return quadrature_density(group, s1, &ctrl.quad);
            }
            let v = m * m / (2.0 * PI) * specfun::hyp2f1_half_threehalf_three(m)?;
            Ok(DensityValue {
                value: v,
                route,
                est_error: 1e-13,
            })
        }
        GroupKind::Usp4 => {
            let cal = elliptic_calibration()?;
            let v = cal.constant * elliptic_form_uncalibrated(s1)?;
            Ok(DensityValue {
                value: v.max(0.0),
                route,
                est_error: 1e-13 + v.abs() * cal.max_rel_deviation,
            })
        }
    }
}

/// Breakpoints (in `θ`, where `s₁ = −4 cos θ`) used for cumulative integrals:
/// the kink of the densities at `s₁ = 0` and `s₁ = ±(4 − 10⁻³)`.
fn theta_breakpoints() -> [f64; 3] {
    let edge = (1.0 - 1e-3 / 4.0f64).acos();
    [edge, FRAC_PI_2, PI - edge]
}

/// `∫_a^b f` with the density of the given route.
///
/// The integral runs in `θ` with `s₁ = −4 cos θ`, which turns the
/// `√ε` endpoint behaviour of the diagonal density into a smooth integrand.
pub fn mass_between(
    group: GroupKind,
    a: f64,
    b: f64,
    route: DensityRoute,
    ctrl: &DensityControl,
) -> Result<QuadResult> {
    let to_theta = |s: f64| (-s / 4.0).clamp(-1.0, 1.0).acos();
    let (theta_a, theta_b) = (to_theta(check_trace(a)?), to_theta(check_trace(b)?));
    let inner = DensityControl {
        quad: QuadratureControl {
            abs_tol: ctrl.quad.abs_tol * 0.1,
            ..ctrl.quad
        },
        ..*ctrl
    };
    let failure: Cell<Option<Error>> = Cell::new(None);
    let r = quad::adaptive(
        |theta| {
            let s = (-4.0 * theta.cos()).clamp(-4.0, 4.0);
            match density(group, s, route, &inner) {
                Ok(d) => d.value * 4.0 * theta.sin(),
                Err(e) => {
                    failure.set(Some(e));
                    0.0
                }
            }
        },
        theta_a,
        theta_b,
        &theta_breakpoints(),
        ctrl.quad.abs_tol,
        ctrl.quad.max_subdivisions,
    )?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(r)
}

/// `F(s₁) = ∫_{−4}^{s₁} f` with the density of the given route.
pub fn cdf_by_route(
    group: GroupKind,
    s1: f64,
    route: DensityRoute,
    ctrl: &DensityControl,
) -> Result<QuadResult> {
    mass_between(group, -4.0, s1, route, ctrl)
}

/// Cumulative distribution of the trace, integrating the quadrature-route density.
pub fn cdf(group: GroupKind, s1: f64, ctrl: &DensityControl) -> Result<f64> {
    cdf_by_route(group, s1, DensityRoute::Quadrature, ctrl).map(|r| r.value)
}

/// Tabulated distribution function for bulk evaluation.
///
/// Nodes are uniform in `θ` (`s₁ = −4 cos θ`); values come from 10-point
/// Gauss–Legendre panels of the quadrature-route density and are
/// interpolated by cubic Hermite polynomials using the density itself as
/// derivative. With the default 2048 panels the interpolation error is
/// below 1e-8.
#[derive(Debug, Clone)]
pub struct CdfTable {
    group: GroupKind,
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl CdfTable {
    pub const DEFAULT_PANELS: usize = 2048;

    pub fn build(group: GroupKind, panels: usize, ctrl: &DensityControl) -> Result<Self> {
        let panels = panels.max(2);
        let step = PI / panels as f64;
        let rule = GaussLegendre::new(10);
        let f = |theta: f64| -> Result<f64> {
            let s = (-4.0 * theta.cos()).clamp(-4.0, 4.0);
            Ok(density(group, s, DensityRoute::Quadrature, ctrl)?.value * 4.0 * theta.sin())
        };
        let mut values = Vec::with_capacity(panels + 1);
        let mut slopes = Vec::with_capacity(panels + 1);
        let mut acc = 0.0;
        for i in 0..=panels {
            let theta = i as f64 * step;
            values.push(acc);
            slopes.push(f(theta)?);
            if i < panels {
                let mut err = None;
                acc += rule.integrate(
                    |t| {
                        f(t).unwrap_or_else(|e| {
                            err = Some(e);
                            0.0
                        })
                    },
                    theta,
                    theta + step,
                );
                if let Some(e) = err {
                    return Err(e);
                }
            }
        }
        Ok(Self {
            group,
            step,
            values,
            slopes,
        })
    }

    pub fn group(&self) -> GroupKind {
        self.group
    }

    /// Total mass, `F(4)`.
    pub fn total(&self) -> f64 {
        *self.values.last().expect("table is never empty")
    }

    pub fn eval(&self, s1: f64) -> f64 {
        if s1 <= -4.0 {
            return 0.0;
        }
        if s1 >= 4.0 {
            return self.total();
        }
        let theta = (-s1 / 4.0).acos();
        let last = self.values.len() - 1;
        let i = ((theta / self.step) as usize).min(last - 1);
        let h = self.step;
        let t = (theta - i as f64 * h) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * d0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * d1
    }
}

/// Shared default-resolution table per group, built on first use.
pub fn cdf_table(group: GroupKind) -> Result<&'static CdfTable> {
    static TABLES: [OnceLock<Result<CdfTable>>; 3] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let idx = match group {
        GroupKind::Usp4 => 0,
        GroupKind::Su2xSu2 => 1,
        GroupKind::DiagonalSu2 => 2,
    };
    TABLES[idx]
        .get_or_init(|| {
            CdfTable::build(group, CdfTable::DEFAULT_PANELS, &DensityControl::default())
        })
        .as_ref()
        .map_err(Clone::clone)
}

/// Leading term of the density at `ε = s₁ + 4 → 0`.
pub fn leading_density(group: GroupKind, eps: f64) -> f64 {
    match group {
        GroupKind::Usp4 => eps.powi(4) / (64.0 * PI),
        GroupKind::Su2xSu2 => eps * eps / (8.0 * PI),
        GroupKind::DiagonalSu2 => eps.sqrt() / (8f64.sqrt() * PI),
    }
}

/// Antiderivative of [`leading_density`] vanishing at `ε = 0`.
pub fn leading_cdf(group: GroupKind, eps: f64) -> f64 {
    match group {
        GroupKind::Usp4 => eps.powi(5) / (320.0 * PI),
        GroupKind::Su2xSu2 => eps.powi(3) / (24.0 * PI),
        GroupKind::DiagonalSu2 => eps.powf(1.5) / (3.0 * SQRT_2 * PI),
    }
}

/// `F_Δ/F_H ≈ 4√2 q^{3/4}/d^{3/2}` at `ε = d/√q`.
pub fn ratio_delta_over_h(d: f64, q: f64) -> f64 {
    4.0 * SQRT_2 * q.powf(0.75) / d.powf(1.5)
}

/// `F_H/F_G ≈ 40q/(3d²)` at `ε = d/√q`.
pub fn ratio_h_over_g(d: f64, q: f64) -> f64 {
    40.0 * q / (3.0 * d * d)
}

/// Expected numbers of extremal points within defect `d`, weighting each
/// leading-order cumulative density by the size of its moduli space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dominance {
    /// `F_G(ε)·q³`, generic curves.
    pub generic: f64,
    /// `F_H(ε)·q²`, one Humbert surface.
    pub humbert: f64,
    /// `F_Δ(ε)·q`, one Shimura curve.
    pub shimura: f64,
}

pub fn dominance_table(d: f64, q: f64) -> Dominance {
    let eps = d / q.sqrt();
    Dominance {
        generic: leading_cdf(GroupKind::Usp4, eps) * q.powi(3),
        humbert: leading_cdf(GroupKind::Su2xSu2, eps) * q * q,
        shimura: leading_cdf(GroupKind::DiagonalSu2, eps) * q,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctrl() -> DensityControl {
        DensityControl::default()
    }

    #[test]
    fn diagonal_closed_form_center() {
        let d = density(
            GroupKind::DiagonalSu2,
            0.0,
            DensityRoute::ClosedForm,
            &ctrl(),
        )
        .unwrap();
        assert!((d.value - 1.0 / (2.0 * PI)).abs() < 1e-16);
    }

    #[test]
    fn quadrature_center_values() {
        let g = density(GroupKind::Usp4, 0.0, DensityRoute::Quadrature, &ctrl()).unwrap();
        assert!((g.value - 64.0 / (15.0 * PI * PI)).abs() < 1e-12, "{g:?}");
        let h = density(GroupKind::Su2xSu2, 0.0, DensityRoute::Quadrature, &ctrl()).unwrap();
        assert!((h.value - 8.0 / (3.0 * PI * PI)).abs() < 1e-12, "{h:?}");
    }

    #[test]
    fn series_matches_quadrature_near_endpoint() {
        for g in [GroupKind::Usp4, GroupKind::Su2xSu2, GroupKind::DiagonalSu2] {
            let s = density(g, -3.9, DensityRoute::Series, &ctrl()).unwrap();
            let q = density(g, -3.9, DensityRoute::Quadrature, &ctrl()).unwrap();
            assert!((s.value - q.value).abs() < 1e-9, "{g}: {s:?} {q:?}");
        }
    }

    #[test]
    fn inner_sum_examples() {
        let c = SeriesControl::default();
        assert_eq!(series_inner_sum(GroupKind::Usp4, 0.0, &c).unwrap(), 1.0);
        let g1 =
            series_inner_sum(GroupKind::Usp4, 1.0, &SeriesControl { tol: 1e-11, ..c }).unwrap();
        assert!((g1 - 32.0 / (15.0 * PI)).abs() < 1e-10, "{g1}");
        let h1 =
            series_inner_sum(GroupKind::Su2xSu2, 1.0, &SeriesControl { tol: 1e-11, ..c }).unwrap();
        assert!((h1 - 8.0 / (3.0 * PI)).abs() < 1e-10, "{h1}");
        assert!(series_inner_sum(GroupKind::DiagonalSu2, 0.5, &c).is_err());
        assert!(series_inner_sum(GroupKind::Usp4, 1.5, &c).is_err());
        let tight = SeriesControl {
            max_terms: 10,
            tol: 1e-14,
        };
        assert!(matches!(
            series_inner_sum(GroupKind::Usp4, 1.0, &tight),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn out_of_range_trace_is_rejected() {
        for route in DensityRoute::ALL {
            assert!(density(GroupKind::Usp4, 4.5, route, &ctrl()).is_err());
        }
        assert!(cdf(GroupKind::Usp4, -4.01, &ctrl()).is_err());
    }

    #[test]
    fn endpoint_densities_vanish() {
        for g in GroupKind::ALL {
            for route in DensityRoute::ALL {
                let v = density(g, -4.0, route, &ctrl()).unwrap().value;
                assert!(v.abs() < 1e-15, "{g} {route:?}");
            }
        }
    }

    #[test]
    fn cdf_symmetry_and_total() {
        let c = ctrl();
        assert!(cdf(GroupKind::Usp4, -4.0, &c).unwrap().abs() < 1e-15);
        assert!((cdf(GroupKind::Usp4, 0.0, &c).unwrap() - 0.5).abs() < 1e-10);
        assert!((cdf(GroupKind::DiagonalSu2, 4.0, &c).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn leading_cdf_over_density() {
        for eps in [1e-3, 0.1, 0.5, 2.0] {
            let r = leading_cdf(GroupKind::Usp4, eps) / leading_density(GroupKind::Usp4, eps);
            assert!((r - eps / 5.0).abs() < 1e-15);
        }
    }

    #[test]
    fn ratio_examples() {
        let d = (40.0f64 / 3.0).sqrt();
        assert!((ratio_h_over_g(d, 1.0) - 1.0).abs() < 1e-14);
        assert!((ratio_delta_over_h(1.0, 16.0) - 32.0 * SQRT_2).abs() < 1e-12);
        assert!((ratio_h_over_g(1.0, 100.0) - 4000.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn dominance_examples() {
        let d = (40.0f64 / 3.0).sqrt();
        let t = dominance_table(d, 1e4);
        assert!((t.generic / t.humbert - 1.0).abs() < 1e-12);
        // Unweighted ratio 40q/3 at d = 1; the moduli weights remove one factor of q.
        let t = dominance_table(1.0, 1e4);
        assert!((t.humbert / t.generic - 40.0 / 3.0).abs() < 1e-10);
        let eps = 1.0 / 100.0;
        let r = leading_cdf(GroupKind::Su2xSu2, eps) / leading_cdf(GroupKind::Usp4, eps);
        assert!((r / ratio_h_over_g(1.0, 1e4) - 1.0).abs() < 1e-14);
        for (d, q) in [(1.0, 10.0), (2.5, 101.0), (0.3, 7.0)] {
            let t = dominance_table(d, q);
            let rq = f64::sqrt(q);
            assert!(
                (t.generic - d.powi(5) * rq / (320.0 * PI)).abs() <= 1e-12 * t.generic.max(1.0)
            );
            assert!((t.humbert - d.powi(3) * rq / (24.0 * PI)).abs() <= 1e-12 * t.humbert.max(1.0));
            let s = d.powf(1.5) * q.powf(0.25) / (3.0 * SQRT_2 * PI);
            assert!((t.shimura - s).abs() <= 1e-12 * s.max(1.0));
        }
    }

    #[test]
    fn legendre_form_domain() {
        assert!(legendre_form_density(0.0, LegendreArgument::Printed).is_err());
        assert!(legendre_form_density(-1.0, LegendreArgument::Rescaled).is_err());
        assert_eq!(
            legendre_form_density(4.0, LegendreArgument::Printed).unwrap(),
            0.0
        );
    }

    #[test]
    fn route_names_parse() {
        for r in DensityRoute::ALL {
            assert_eq!(r.name().parse::<DensityRoute>().unwrap(), r);
        }
    }
}
