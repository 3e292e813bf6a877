//! Gauss–Legendre rules and a globally adaptive integrator built on them.
//!
//! The adaptive scheme compares an `n`-point rule on an interval with the
//! same rule applied to both halves; the halved value is kept and the
//! difference serves as the local error estimate. Intervals with the largest
//! estimate are bisected first until the summed estimate drops below the
//! requested absolute tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi's initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// The shared 20-point rule used by [`adaptive`].
pub fn gl20() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(20))
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub est_error: f64,
    pub subdivisions: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    halves: (f64, f64),
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn make_panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, whole: f64) -> Panel {
    let rule = gl20();
    let m = 0.5 * (a + b);
    let left = rule.integrate(&mut *f, a, m);
    let right = rule.integrate(&mut *f, m, b);
    let value = left + right;
    Panel {
        a,
        b,
        value,
        err: (value - whole).abs(),
        halves: (left, right),
    }
}

/// Globally adaptive integration of `f` over `[a, b]`.
///
/// `breakpoints` (strictly inside `(a, b)`) seed the initial partition;
/// use them for known kinks of the integrand.
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    abs_tol: f64,
    max_subdivisions: usize,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            est_error: 0.0,
            subdivisions: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut edges = vec![lo];
    edges.extend(breakpoints.iter().copied().filter(|&x| x > lo && x < hi));
    edges.push(hi);
    edges.sort_by(f64::total_cmp);

    let rule = gl20();
    let mut heap = BinaryHeap::new();
    for w in edges.windows(2) {
        let whole = rule.integrate(&mut f, w[0], w[1]);
        heap.push(make_panel(&mut f, w[0], w[1], whole));
    }
    let mut subdivisions = 0;
    loop {
        let total_err: f64 = heap.iter().map(|p| p.err).sum();
        if total_err <= abs_tol {
            let value: f64 = heap.iter().map(|p| p.value).sum();
            return Ok(QuadResult {
                value: sign * value,
                est_error: total_err,
                subdivisions,
            });
        }
        if subdivisions >= max_subdivisions {
            return Err(Error::ToleranceNotMet {
                requested: abs_tol,
                achieved: total_err,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // Interval exhausted at machine precision; keep it as is.
            let total: f64 = heap.iter().map(|p| p.value).sum::<f64>() + worst.value;
            let err = heap.iter().map(|p| p.err).sum::<f64>() + worst.err;
            return if err <= abs_tol {
                Ok(QuadResult {
                    value: sign * total,
                    est_error: err,
                    subdivisions,
                })
            } else {
                Err(Error::ToleranceNotMet {
                    requested: abs_tol,
                    achieved: err,
                    subdivisions,
                })
            };
        }
        heap.push(make_panel(&mut f, worst.a, m, worst.halves.0));
        heap.push(make_panel(&mut f, m, worst.b, worst.halves.1));
        subdivisions += 1;
    }
}

/// Tensor-product Gauss–Legendre over a rectangle.
pub fn tensor_2d<F: FnMut(f64, f64) -> f64>(
    mut f: F,
    (ax, bx): (f64, f64),
    (ay, by): (f64, f64),
    rule: &GaussLegendre,
) -> f64 {
    let hx = 0.5 * (bx - ax);
    let mx = 0.5 * (ax + bx);
    let hy = 0.5 * (by - ay);
    let my = 0.5 * (ay + by);
    let mut acc = 0.0;
    for (&xi, &wi) in rule.nodes().iter().zip(rule.weights()) {
        for (&yj, &wj) in rule.nodes().iter().zip(rule.weights()) {
            acc += wi * wj * f(mx + hx * xi, my + hy * yj);
        }
    }
    acc * hx * hy
}
