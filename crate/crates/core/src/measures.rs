//! Conjugacy-class coordinates and the Haar densities on them.
//!
//! A class of `USp(4)` is recorded in one of five charts:
//!
//! | chart   | coordinates | domain |
//! |---------|-------------|--------|
//! | angle   | `(θ₁, θ₂)`  | `[0, π]²` |
//! | trace   | `(t₁, t₂) = (2cos θ₁, 2cos θ₂)` | `[−2, 2]²` |
//! | sym     | `(s₁, s₂) = (t₁ + t₂, t₁t₂)` | `Σ₂` |
//! | delta   | `(s₁, δ₀)`, `δ₀ = |t₁ − t₂|` | `δ₀ ± s₁ ≤ 4` |
//! | lambda  | `(ε, λ) ↦ (ε − 4, ελ)` | `[0, 4] × [0, 1]` (left half) |
//!
//! Volume elements are related by `ds₁ds₂ = √D₀ dt₁dt₂` (with the trace
//! chart covering `Σ₂` twice), `ds₁ds₂ = ½δ₀ dδ₀ds₁` and `dδ₀ds₁ = ε dλdε`.
//! Densities are functions of `(group, chart)`; points carry no group tag.

use std::f64::consts::{FRAC_1_PI, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on domain boundaries for rounding in chart maps.
const BOUNDARY_SLACK: f64 = 1e-12;

/// Sato–Tate group a density or sampler refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupKind {
    /// `G = USp(4)`, generic genus-2 curves.
    Usp4,
    /// `H = SU(2) × SU(2)`, real multiplication.
    Su2xSu2,
    /// `Δ`, diagonal image of `SU(2)`, quaternionic multiplication.
    DiagonalSu2,
}

impl GroupKind {
    pub const ALL: [GroupKind; 3] = [GroupKind::Usp4, GroupKind::Su2xSu2, GroupKind::DiagonalSu2];

    pub fn symbol(self) -> &'static str {
        match self {
            GroupKind::Usp4 => "G",
            GroupKind::Su2xSu2 => "H",
            GroupKind::DiagonalSu2 => "Delta",
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for GroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "G" | "g" | "USp4" | "usp4" => Ok(GroupKind::Usp4),
            "H" | "h" | "SU2xSU2" | "su2xsu2" => Ok(GroupKind::Su2xSu2),
            "Delta" | "delta" | "D" => Ok(GroupKind::DiagonalSu2),
            other => Err(Error::Parse(format!("unknown group '{other}'"))),
        }
    }
}

fn check_range(name: &'static str, v: f64, lo: f64, hi: f64, reason: &'static str) -> Result<f64> {
    if v.is_finite() && v >= lo - BOUNDARY_SLACK && v <= hi + BOUNDARY_SLACK {
        Ok(v.clamp(lo, hi))
    } else {
        Err(Error::Domain {
            name,
            value: v,
            reason,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnglePoint {
    pub theta1: f64,
    pub theta2: f64,
}

impl AnglePoint {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        let r = "angle must lie in [0, pi]";
        Ok(Self {
            theta1: check_range("theta1", theta1, 0.0, PI, r)?,
            theta2: check_range("theta2", theta2, 0.0, PI, r)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub t1: f64,
    pub t2: f64,
}

impl TracePoint {
    pub fn new(t1: f64, t2: f64) -> Result<Self> {
        let r = "real trace must lie in [-2, 2]";
        Ok(Self {
            t1: check_range("t1", t1, -2.0, 2.0, r)?,
            t2: check_range("t2", t2, -2.0, 2.0, r)?,
        })
    }
}

/// Point of `Σ₂ = {2|s₁| ≤ s₂ + 4, 4s₂ ≤ s₁²}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymPoint {
    pub s1: f64,
    pub s2: f64,
}

impl SymPoint {
    pub fn new(s1: f64, s2: f64) -> Result<Self> {
        let s1 = check_range("s1", s1, -4.0, 4.0, "trace must lie in [-4, 4]")?;
        if 2.0 * s1.abs() > s2 + 4.0 + BOUNDARY_SLACK {
            return Err(Error::Domain {
                name: "s2",
                value: s2,
                reason: "violates 2|s1| <= s2 + 4",
            });
        }
        if 4.0 * s2 > s1 * s1 + BOUNDARY_SLACK {
            return Err(Error::Domain {
                name: "s2",
                value: s2,
                reason: "violates 4 s2 <= s1^2",
            });
        }
        Ok(Self { s1, s2 })
    }
}

/// Point of `𝔇₂ = {(s₁, δ₀) : δ₀ ≥ 0, δ₀ ± s₁ ≤ 4}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaPoint {
    pub s1: f64,
    pub delta0: f64,
}

impl DeltaPoint {
    pub fn new(s1: f64, delta0: f64) -> Result<Self> {
        let s1 = check_range("s1", s1, -4.0, 4.0, "trace must lie in [-4, 4]")?;
        let delta0 = check_range("delta0", delta0, 0.0, 4.0, "delta0 must lie in [0, 4]")?;
        if delta0 + s1.abs() > 4.0 + BOUNDARY_SLACK {
            return Err(Error::Domain {
                name: "delta0",
                value: delta0,
                reason: "violates delta0 +- s1 <= 4",
            });
        }
        Ok(Self { s1, delta0 })
    }
}

/// Point of `Λ₂ = [0, 4] × [0, 1]`, parametrizing the left half of `𝔇₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaPoint {
    pub eps: f64,
    pub lambda: f64,
}

impl LambdaPoint {
    pub fn new(eps: f64, lambda: f64) -> Result<Self> {
        Ok(Self {
            eps: check_range("eps", eps, 0.0, 4.0, "eps must lie in [0, 4]")?,
            lambda: check_range("lambda", lambda, 0.0, 1.0, "lambda must lie in [0, 1]")?,
        })
    }

    /// `ρ = ε/(8 − ε) ∈ [0, 1]`.
    pub fn rho(&self) -> f64 {
        self.eps / (8.0 - self.eps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chart {
    Angle,
    Trace,
    Sym,
    Delta,
    Lambda,
}

impl Chart {
    pub fn name(self) -> &'static str {
        match self {
            Chart::Angle => "angle",
            Chart::Trace => "trace",
            Chart::Sym => "sym",
            Chart::Delta => "delta",
            Chart::Lambda => "lambda",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChartPoint {
    Angle(AnglePoint),
    Trace(TracePoint),
    Sym(SymPoint),
    Delta(DeltaPoint),
    Lambda(LambdaPoint),
}

impl ChartPoint {
    pub fn chart(&self) -> Chart {
        match self {
            ChartPoint::Angle(_) => Chart::Angle,
            ChartPoint::Trace(_) => Chart::Trace,
            ChartPoint::Sym(_) => Chart::Sym,
            ChartPoint::Delta(_) => Chart::Delta,
            ChartPoint::Lambda(_) => Chart::Lambda,
        }
    }

    /// The normalized trace `s₁` of the class.
    pub fn s1(&self) -> f64 {
        match self {
            ChartPoint::Angle(p) => 2.0 * p.theta1.cos() + 2.0 * p.theta2.cos(),
            ChartPoint::Trace(p) => p.t1 + p.t2,
            ChartPoint::Sym(p) => p.s1,
            ChartPoint::Delta(p) => p.s1,
            ChartPoint::Lambda(p) => p.eps - 4.0,
        }
    }
}

impl From<AnglePoint> for ChartPoint {
    fn from(p: AnglePoint) -> Self {
        ChartPoint::Angle(p)
    }
}
impl From<TracePoint> for ChartPoint {
    fn from(p: TracePoint) -> Self {
        ChartPoint::Trace(p)
    }
}
impl From<SymPoint> for ChartPoint {
    fn from(p: SymPoint) -> Self {
        ChartPoint::Sym(p)
    }
}
impl From<DeltaPoint> for ChartPoint {
    fn from(p: DeltaPoint) -> Self {
        ChartPoint::Delta(p)
    }
}
impl From<LambdaPoint> for ChartPoint {
    fn from(p: LambdaPoint) -> Self {
        ChartPoint::Lambda(p)
    }
}

pub fn angles_to_traces(p: AnglePoint) -> TracePoint {
    TracePoint {
        t1: 2.0 * p.theta1.cos(),
        t2: 2.0 * p.theta2.cos(),
    }
}

pub fn traces_to_sym(p: TracePoint) -> SymPoint {
    SymPoint {
        s1: p.t1 + p.t2,
        s2: p.t1 * p.t2,
    }
}

/// `(s₁, s₂) ↦ (s₁, +√(s₁² − 4s₂))`.
pub fn sym_to_delta(p: SymPoint) -> Result<DeltaPoint> {
    let d0 = p.s1.mul_add(p.s1, -4.0 * p.s2);
    if d0 < -BOUNDARY_SLACK {
        return Err(Error::Domain {
            name: "D0",
            value: d0,
            reason: "s1^2 - 4 s2 must be nonnegative",
        });
    }
    Ok(DeltaPoint {
        s1: p.s1,
        delta0: d0.max(0.0).sqrt(),
    })
}

pub fn delta_to_sym(p: DeltaPoint) -> SymPoint {
    SymPoint {
        s1: p.s1,
        s2: 0.25 * (p.s1 * p.s1 - p.delta0 * p.delta0),
    }
}

/// Inverse of `traces_to_sym ∘ sym_to_delta` on the branch `t₁ ≥ t₂`.
pub fn delta_to_traces(p: DeltaPoint) -> TracePoint {
    TracePoint {
        t1: 0.5 * (p.s1 + p.delta0),
        t2: 0.5 * (p.s1 - p.delta0),
    }
}

/// `(s₁, δ₀) ↦ (ε, λ) = (s₁ + 4, δ₀/ε)` on the left half `s₁ ≤ 0`.
///
/// The corner `ε = 0` maps to `λ = 0`.
pub fn delta_to_lambda(p: DeltaPoint) -> Result<LambdaPoint> {
    if p.s1 > BOUNDARY_SLACK {
        return Err(Error::Domain {
            name: "s1",
            value: p.s1,
            reason: "lambda chart covers s1 <= 0 only",
        });
    }
    let eps = (p.s1 + 4.0).clamp(0.0, 4.0);
    if eps == 0.0 {
        return if p.delta0 == 0.0 {
            Ok(LambdaPoint { eps, lambda: 0.0 })
        } else {
            Err(Error::DegenerateCorner { delta0: p.delta0 })
        };
    }
    Ok(LambdaPoint {
        eps,
        lambda: (p.delta0 / eps).min(1.0),
    })
}

pub fn lambda_to_delta(p: LambdaPoint) -> DeltaPoint {
    DeltaPoint {
        s1: p.eps - 4.0,
        delta0: p.eps * p.lambda,
    }
}

/// `D₀ = (t₁ − t₂)²`, evaluated with the chart's own formula.
pub fn disc_d0(p: &ChartPoint) -> f64 {
    match p {
        ChartPoint::Angle(a) => {
            let d = 2.0 * (a.theta1.cos() - a.theta2.cos());
            d * d
        }
        ChartPoint::Trace(t) => (t.t1 - t.t2).powi(2),
        ChartPoint::Sym(s) => s.s1 * s.s1 - 4.0 * s.s2,
        ChartPoint::Delta(d) => d.delta0 * d.delta0,
        ChartPoint::Lambda(l) => (l.eps * l.lambda).powi(2),
    }
}

/// `D₁ = (4 − t₁²)(4 − t₂²)`, evaluated with the chart's own formula.
pub fn disc_d1(p: &ChartPoint) -> f64 {
    match p {
        ChartPoint::Angle(a) => 16.0 * (a.theta1.sin() * a.theta2.sin()).powi(2),
        ChartPoint::Trace(t) => (4.0 - t.t1 * t.t1) * (4.0 - t.t2 * t.t2),
        ChartPoint::Sym(s) => (4.0 + s.s2).powi(2) - 4.0 * s.s1 * s.s1,
        ChartPoint::Delta(d) => {
            let dd = d.delta0 * d.delta0;
            ((4.0 + d.s1).powi(2) - dd) * ((4.0 - d.s1).powi(2) - dd) / 16.0
        }
        ChartPoint::Lambda(l) => {
            let (e, lam) = (l.eps, l.lambda);
            e * e * (1.0 - lam * lam) * ((8.0 - e).powi(2) - e * e * lam * lam) / 16.0
        }
    }
}

/// Weyl density of `USp(2g)` on the angle space `[0, π]^g`:
/// `2^{g²}/(g! π^g) ∏_{i<j}(cos θᵢ − cos θⱼ)² ∏ sin² θᵢ`.
pub fn weyl_density_angles(g: usize, thetas: &[f64]) -> Result<f64> {
    if g == 0 || thetas.len() != g {
        return Err(Error::Domain {
            name: "g",
            value: g as f64,
            reason: "need g >= 1 and exactly g angles",
        });
    }
    for &t in thetas {
        check_range("theta", t, 0.0, PI, "angle must lie in [0, pi]")?;
    }
    let gf = g as f64;
    let factorial: f64 = (1..=g).map(|k| k as f64).product();
    let mut v = 2f64.powf(gf * gf) / (factorial * PI.powi(g as i32));
    let cos: Vec<f64> = thetas.iter().map(|t| t.cos()).collect();
    for i in 0..g {
        for j in i + 1..g {
            v *= (cos[i] - cos[j]).powi(2);
        }
        v *= thetas[i].sin().powi(2);
    }
    Ok(v)
}

/// Semicircle density `√(4 − t²)/(2π)` of the `SU(2)` trace on `[−2, 2]`.
pub fn semicircle_density(t: f64) -> f64 {
    (4.0 - t * t).max(0.0).sqrt() / (2.0 * PI)
}

/// Density of the trace `s₁ = 2t` under the diagonal `SU(2)`:
/// `√(16 − s₁²)/(8π)`.
pub fn mu_delta_density(s1: f64) -> f64 {
    (16.0 - s1 * s1).max(0.0).sqrt() / (8.0 * PI)
}

/// Joint Haar density of `group` with respect to the volume element of `chart`.
///
/// The diagonal group has no 2-dimensional density; on its support `D₀ = 0`
/// the returned value is its density in `s₁`, elsewhere an error.
pub fn joint_density(group: GroupKind, p: &ChartPoint, chart: Chart) -> Result<f64> {
    if p.chart() != chart {
        return Err(Error::ChartMismatch {
            expected: chart.name(),
            found: p.chart().name(),
        });
    }
    let inv_pi2 = FRAC_1_PI * FRAC_1_PI;
    let sqrt_d1 = || disc_d1(p).max(0.0).sqrt();
    match group {
        GroupKind::DiagonalSu2 => {
            let d0 = disc_d0(p);
            if d0.abs() <= BOUNDARY_SLACK {
                Ok(mu_delta_density(p.s1()))
            } else {
                Err(Error::OffSupport { d0 })
            }
        }
        GroupKind::Usp4 => Ok(match p {
            ChartPoint::Angle(a) => {
                let c = a.theta1.cos() - a.theta2.cos();
                8.0 * inv_pi2 * c * c * (a.theta1.sin() * a.theta2.sin()).powi(2)
            }
            ChartPoint::Trace(_) => inv_pi2 / 8.0 * disc_d0(p) * sqrt_d1(),
            ChartPoint::Sym(_) => {
                inv_pi2 / 4.0 * (disc_d0(p).max(0.0) * disc_d1(p).max(0.0)).sqrt()
            }
            ChartPoint::Delta(d) => inv_pi2 / 8.0 * d.delta0 * d.delta0 * sqrt_d1(),
            ChartPoint::Lambda(l) => {
                let (e, lam, rho) = (l.eps, l.lambda, l.rho());
                e.powi(4) * (8.0 - e) * inv_pi2 / 32.0
                    * lam
                    * lam
                    * ((1.0 - lam * lam) * (1.0 - rho * rho * lam * lam))
                        .max(0.0)
                        .sqrt()
            }
        }),
        GroupKind::Su2xSu2 => match p {
            ChartPoint::Angle(a) => Ok(4.0 * inv_pi2 * (a.theta1.sin() * a.theta2.sin()).powi(2)),
            ChartPoint::Trace(_) | ChartPoint::Delta(_) => Ok(inv_pi2 / 4.0 * sqrt_d1()),
            ChartPoint::Sym(_) => {
                let d0 = disc_d0(p);
                if d0 <= 0.0 {
                    Err(Error::SingularLocus {
                        group: "H",
                        chart: "sym",
                    })
                } else {
                    Ok(inv_pi2 / 2.0 * (disc_d1(p).max(0.0) / d0).sqrt())
                }
            }
            ChartPoint::Lambda(l) => {
                let (e, lam, rho) = (l.eps, l.lambda, l.rho());
                Ok(e * e * (8.0 - e) * inv_pi2 / 16.0
                    * ((1.0 - lam * lam) * (1.0 - rho * rho * lam * lam))
                        .max(0.0)
                        .sqrt())
            }
        },
    }
}

/// `μ_G/μ_H = D₀/2`, identical in every chart where both densities exist.
pub fn measure_ratio_g_over_h(p: &ChartPoint) -> Result<f64> {
    let d0 = disc_d0(p).max(0.0);
    if d0 == 0.0 && p.chart() == Chart::Sym {
        return Err(Error::SingularLocus {
            group: "H",
            chart: "sym",
        });
    }
    Ok(d0 / 2.0)
}
