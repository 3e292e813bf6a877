//! Vertical Sato–Tate trace distributions for genus-2 families.
//!
//! The crate covers three compact groups acting on degree-4 Frobenius data:
//! the generic `USp(4)`, the real-multiplication group `SU(2)×SU(2)` and the
//! diagonal `SU(2)` attached to quaternionic multiplication. For each group
//! the marginal density of the normalized trace `s₁ ∈ [−4, 4]` is available
//! by three independent routes (Catalan series, λ-quadrature, closed forms in
//! elliptic and hypergeometric functions), a Monte Carlo sampler draws from
//! the Haar measures directly, and a finite-field census counts points on
//! genus-2 curves to confront the analytic picture with real Frobenius data.
//!
//! Module map:
//!
//! * [`specfun`]: Catalan numbers, square-root series, elliptic integrals,
//!   `₂F₁(1/2, 3/2; 3; m)` and the Legendre function `P²_{1/2}`.
//! * [`measures`]: coordinate charts for conjugacy classes, discriminants
//!   `D₀`, `D₁`, and joint Haar densities in every chart.
//! * [`tracedist`]: trace densities, cumulative distributions, leading-order
//!   endpoint approximations and the extremal-trace ratio formulas.
//! * [`sampler`]: seeded rejection samplers and Kolmogorov–Smirnov checks.
//! * [`census`]: genus-2 point counting over `𝔽_q`, Frobenius classes,
//!   real-multiplication strata and their exact integer checks.
//! * [`quad`]: Gauss–Legendre and globally adaptive quadrature.

pub mod census;
pub mod error;
pub mod measures;
pub mod quad;
pub mod sampler;
pub mod specfun;
pub mod tracedist;

pub use error::{Error, Result};
pub use measures::GroupKind;
