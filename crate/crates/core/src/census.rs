//! Point counts of genus-2 curves over small prime fields.
//!
//! Curves are `y² = f(x)` with `f` squarefree of degree 5 (monic) or,
//! optionally, degree 6 with leading coefficient 1 or a fixed non-residue.
//! Counts over `𝔽_q` and `𝔽_{q²}` come from quadratic-character sums and give
//! the Frobenius data `(a₁, a₂)`. Classes are grouped by the fundamental
//! discriminant of the real Weil polynomial.
//!
//! Stratum labels are computed from point counts alone: they are the
//! fundamental discriminant of `ℚ(√Δ)`, not the discriminant of the actual
//! endomorphism ring. Curve counts are not weighted by automorphisms.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::GroupKind;
use crate::sampler::{bin_index, HISTOGRAM_BINS};
use crate::tracedist;

/// Largest field accepted by [`build_field`].
pub const FIELD_LIMIT: u64 = 1 << 16;

/// Largest `q` for exhaustive enumeration.
pub const CENSUS_Q_LIMIT: u64 = 31;

pub const CENSUS_FORMAT: &str = "# satotate-census v1";

pub fn is_odd_prime(q: u64) -> bool {
    if q < 3 || q.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Tables for `𝔽_q` and `𝔽_{q²} = 𝔽_q[u]/(u² − n)`.
#[derive(Debug, Clone)]
pub struct PrimeFieldCtx {
    q: u64,
    chi: Vec<i8>,
    inv: Vec<u64>,
    nonresidue: u64,
}

pub fn build_field(q: u64) -> Result<PrimeFieldCtx> {
    if !is_odd_prime(q) {
        return Err(Error::NotOddPrime { q });
    }
    if q > FIELD_LIMIT {
        return Err(Error::FieldTooLarge {
            q,
            limit: FIELD_LIMIT,
        });
    }
    let mut chi = vec![-1i8; q as usize];
    chi[0] = 0;
    for x in 1..q {
        chi[(x * x % q) as usize] = 1;
    }
    let nonresidue = (2..q)
        .find(|&x| chi[x as usize] == -1)
        .expect("odd prime has a non-residue");
    let mut inv = vec![0; q as usize];
    for x in 1..q {
        inv[x as usize] = pow_mod(x, q - 2, q);
    }
    Ok(PrimeFieldCtx {
        q,
        chi,
        inv,
        nonresidue,
    })
}

fn pow_mod(mut b: u64, mut e: u64, q: u64) -> u64 {
    let mut r = 1;
    b %= q;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % q;
        }
        b = b * b % q;
        e >>= 1;
    }
    r
}

/// Element `a + b·u` of `𝔽_{q²}`.
pub type Fq2 = (u64, u64);

impl PrimeFieldCtx {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn nonresidue(&self) -> u64 {
        self.nonresidue
    }

    /// Quadratic character on `𝔽_q`.
    pub fn chi(&self, a: u64) -> i8 {
        self.chi[(a % self.q) as usize]
    }

    pub fn inv(&self, a: u64) -> u64 {
        self.inv[(a % self.q) as usize]
    }

    pub fn add2(&self, x: Fq2, y: Fq2) -> Fq2 {
        ((x.0 + y.0) % self.q, (x.1 + y.1) % self.q)
    }

    pub fn mul2(&self, x: Fq2, y: Fq2) -> Fq2 {
        let q = self.q;
        let bd = x.1 * y.1 % q;
        (
            (x.0 * y.0 + self.nonresidue * bd) % q,
            (x.0 * y.1 + x.1 * y.0) % q,
        )
    }

    /// Quadratic character on `𝔽_{q²}`: the `𝔽_q` character of the norm.
    pub fn chi2(&self, x: Fq2) -> i8 {
        let q = self.q;
        let norm = (x.0 * x.0 + (q - self.nonresidue) * (x.1 * x.1 % q)) % q;
        self.chi(norm)
    }

    /// `x` for `x ∈ 𝔽_q` first, then the rest of `𝔽_{q²}`.
    fn extension_points(&self) -> Vec<Fq2> {
        let q = self.q;
        let mut pts: Vec<Fq2> = (0..q).map(|a| (a, 0)).collect();
        for b in 1..q {
            pts.extend((0..q).map(|a| (a, b)));
        }
        pts
    }

    /// `χ_{q²}(a + b·u)` indexed by `b·q + a`.
    fn chi2_table(&self) -> Vec<i8> {
        let q = self.q;
        let mut t = vec![0; (q * q) as usize];
        for b in 0..q {
            for a in 0..q {
                t[(b * q + a) as usize] = self.chi2((a, b));
            }
        }
        t
    }
}

/// `y² = f(x)` with `f` given low-to-high; the last coefficient is the
/// (nonzero) leading one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CurveModel {
    pub q: u64,
    pub coeffs: Vec<u64>,
}

impl CurveModel {
    /// Monic quintic `x⁵ + c₄x⁴ + … + c₀` from `[c₀, …, c₄]`.
    pub fn quintic(q: u64, low: [u64; 5]) -> Self {
        let mut coeffs: Vec<u64> = low.iter().map(|c| c % q).collect();
        coeffs.push(1);
        Self { q, coeffs }
    }

    /// `lead·x⁶ + c₅x⁵ + … + c₀` from `[c₀, …, c₅]`.
    pub fn sextic(q: u64, lead: u64, low: [u64; 6]) -> Self {
        let mut coeffs: Vec<u64> = low.iter().map(|c| c % q).collect();
        coeffs.push(lead % q);
        Self { q, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> u64 {
        *self.coeffs.last().expect("model has coefficients")
    }

    pub fn is_squarefree(&self, ctx: &PrimeFieldCtx) -> bool {
        is_squarefree(&self.coeffs, ctx)
    }
}

fn trim(p: &mut Vec<u64>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

fn poly_rem(mut a: Vec<u64>, b: &[u64], ctx: &PrimeFieldCtx) -> Vec<u64> {
    let q = ctx.q;
    let lead_inv = ctx.inv(*b.last().expect("divisor is nonzero"));
    trim(&mut a);
    while a.len() >= b.len() {
        let shift = a.len() - b.len();
        let factor = a.last().copied().unwrap_or(0) * lead_inv % q;
        for (i, &bi) in b.iter().enumerate() {
            let j = i + shift;
            a[j] = (a[j] + q - factor * bi % q) % q;
        }
        trim(&mut a);
    }
    a
}

/// `gcd(f, f′) = 1` over `𝔽_q`.
fn is_squarefree(f: &[u64], ctx: &PrimeFieldCtx) -> bool {
    let q = ctx.q;
    let mut a: Vec<u64> = f.to_vec();
    trim(&mut a);
    let mut b: Vec<u64> = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| (i as u64 % q) * c % q)
        .collect();
    trim(&mut b);
    if b.is_empty() {
        return a.len() <= 1;
    }
    while !b.is_empty() {
        let r = poly_rem(a, &b, ctx);
        a = b;
        b = r;
    }
    a.len() == 1
}

fn eval2(coeffs: &[u64], x: Fq2, ctx: &PrimeFieldCtx) -> Fq2 {
    let mut acc: Fq2 = (0, 0);
    for &c in coeffs.iter().rev() {
        acc = ctx.add2(ctx.mul2(acc, x), (c, 0));
    }
    acc
}

/// Points at infinity over `𝔽_q` and `𝔽_{q²}`.
fn points_at_infinity(curve: &CurveModel, ctx: &PrimeFieldCtx) -> (i64, i64) {
    if curve.degree() % 2 == 1 {
        (1, 1)
    } else {
        // Two points when the leading coefficient is a square; over 𝔽_{q²} it always is.
        (1 + ctx.chi(curve.leading()) as i64, 2)
    }
}

/// `(N₁, N₂)`: projective point counts over `𝔽_q` and `𝔽_{q²}`.
pub fn count_points(ctx: &PrimeFieldCtx, curve: &CurveModel) -> (i64, i64) {
    let q = ctx.q as i64;
    let (inf1, inf2) = points_at_infinity(curve, ctx);
    let mut s1 = 0i64;
    let mut s2 = 0i64;
    for x in ctx.extension_points() {
        let y = eval2(&curve.coeffs, x, ctx);
        s2 += ctx.chi2(y) as i64;
        if x.1 == 0 {
            s1 += ctx.chi(y.0) as i64;
        }
    }
    (q + inf1 + s1, q * q + inf2 + s2)
}

/// Frobenius data of one isogeny class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FrobeniusClass {
    pub q: u64,
    pub a1: i64,
    pub a2: i64,
}

impl FrobeniusClass {
    /// Validating constructor: Weil bound, real roots, and roots inside `[-2√q, 2√q]`.
    pub fn new(q: u64, a1: i64, a2: i64) -> Result<Self> {
        let fc = Self { q, a1, a2 };
        if !fc.in_weil_region() {
            return Err(Error::Inconsistent(format!(
                "(a1, a2) = ({a1}, {a2}) violates the Weil bounds for q = {q}"
            )));
        }
        Ok(fc)
    }

    /// `a₁² − 4a₂ + 8q`, discriminant of `x² − a₁x + (a₂ − 2q)`.
    pub fn delta_real(&self) -> i64 {
        self.a1 * self.a1 - 4 * self.a2 + 8 * self.q as i64
    }

    pub fn s1(&self) -> f64 {
        self.a1 as f64 / (self.q as f64).sqrt()
    }

    pub fn s2(&self) -> f64 {
        (self.a2 - 2 * self.q as i64) as f64 / self.q as f64
    }

    pub fn delta0(&self) -> f64 {
        (self.delta_real().max(0) as f64 / self.q as f64).sqrt()
    }

    pub fn eps(&self) -> f64 {
        4.0 - self.s1().abs()
    }

    /// `4√q − |a₁|`.
    pub fn defect(&self) -> f64 {
        4.0 * (self.q as f64).sqrt() - self.a1.abs() as f64
    }

    /// Exact test that both real Weil roots lie in `[-2√q, 2√q]`.
    pub fn in_weil_region(&self) -> bool {
        let q = self.q as i128;
        let a1 = self.a1 as i128;
        let b = self.a2 as i128 + 2 * q;
        self.delta_real() >= 0 && a1 * a1 <= 16 * q && b >= 0 && 4 * a1 * a1 * q <= b * b
    }
}

/// `(a₁, a₂)` from the point counts.
pub fn frobenius_class(ctx: &PrimeFieldCtx, n1: i64, n2: i64) -> Result<FrobeniusClass> {
    let q = ctx.q as i64;
    let a1 = q + 1 - n1;
    let twice_a2 = a1 * a1 - (q * q + 1 - n2);
    if twice_a2 % 2 != 0 {
        return Err(Error::Inconsistent(format!(
            "non-integral a2 from N1 = {n1}, N2 = {n2} (q = {q})"
        )));
    }
    FrobeniusClass::new(ctx.q, a1, twice_a2 / 2)
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn squarefree_kernel(mut n: u64) -> u64 {
    let mut k = 1;
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e % 2 == 1 {
            k *= p;
        }
        p += 1;
    }
    k * n
}

/// `Δ = m₀²·D`: `(0, 0)` for `Δ = 0`, `(√Δ, 1)` for squares, otherwise `D`
/// is the fundamental discriminant of `ℚ(√Δ)`.
pub fn decompose_real_disc(delta: i64) -> Result<(u64, i64)> {
    if delta < 0 {
        return Err(Error::Domain {
            name: "delta_real",
            value: delta as f64,
            reason: "must be nonnegative",
        });
    }
    if delta == 0 {
        return Ok((0, 0));
    }
    if delta % 4 == 2 || delta % 4 == 3 {
        return Err(Error::InvalidDiscriminant(delta));
    }
    let n = delta as u64;
    let r = isqrt(n);
    if r * r == n {
        return Ok((r, 1));
    }
    let k = squarefree_kernel(n);
    let d = if k % 4 == 1 { k } else { 4 * k };
    if !n.is_multiple_of(d) {
        return Err(Error::InvalidDiscriminant(delta));
    }
    let m2 = n / d;
    let m0 = isqrt(m2);
    if m0 * m0 != m2 {
        return Err(Error::InvalidDiscriminant(delta));
    }
    Ok((m0, d as i64))
}

/// Individual outcomes of the band inequalities for one class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BandCheck {
    pub weil_bound: bool,
    /// `δ₀ ≤ ε`.
    pub delta_within_eps: bool,
    /// `D ≤ d²`.
    pub disc_within_defect: bool,
    /// `δ₀ ≠ 0 ⇒ Δ ≥ D ≥ 1`, i.e. `δ₀² ≥ D/q`.
    pub exclusion_zone: bool,
    pub decomposable: bool,
}

impl BandCheck {
    pub fn holds(&self) -> bool {
        self.weil_bound
            && self.delta_within_eps
            && self.disc_within_defect
            && self.exclusion_zone
            && self.decomposable
    }
}

/// Band inequalities in exact integer arithmetic.
pub fn verify_bands(fc: &FrobeniusClass) -> BandCheck {
    let q = fc.q as i128;
    let a = fc.a1.unsigned_abs() as i128;
    let delta = fc.delta_real() as i128;
    let weil_bound = a * a <= 16 * q;

    // |a₁| + √Δ ≤ 4√q  ⟺  2|a₁|√Δ ≤ 16q − a₁² − Δ
    let r = 16 * q - a * a - delta;
    let delta_within_eps = delta >= 0 && r >= 0 && 4 * a * a * delta <= r * r;

    let (decomposable, disc) = match decompose_real_disc(fc.delta_real()) {
        Ok((_, d)) => (true, d as i128),
        Err(_) => (false, 0),
    };
    // D ≤ (4√q − |a₁|)²  ⟺  8|a₁|√q ≤ 16q + a₁² − D
    let disc_within_defect = if disc == 0 {
        weil_bound
    } else {
        let r = 16 * q + a * a - disc;
        weil_bound && r >= 0 && 64 * a * a * q <= r * r
    };
    let exclusion_zone = delta == 0 || (delta >= disc && disc >= 1);
    BandCheck {
        weil_bound,
        delta_within_eps,
        disc_within_defect,
        exclusion_zone,
        decomposable,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusOptions {
    pub include_degree6: bool,
    pub threads: usize,
}

impl Default for CensusOptions {
    fn default() -> Self {
        Self {
            include_degree6: false,
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

/// Classes sharing one discriminant label, by cofactor `m₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct StratumRecord {
    pub disc: i64,
    pub bands: BTreeMap<u64, Vec<(FrobeniusClass, u64)>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CensusReport {
    pub q: u64,
    pub include_degree6: bool,
    pub model_count: u64,
    pub classes: BTreeMap<(i64, i64), u64>,
    pub strata: Vec<StratumRecord>,
    /// Classes for which [`verify_bands`] failed.
    pub band_failures: Vec<(FrobeniusClass, BandCheck)>,
    pub threads: usize,
    pub runtime: Duration,
}

type ClassCounts = BTreeMap<(i64, i64), u64>;

struct Enumeration<'a> {
    ctx: &'a PrimeFieldCtx,
    points: Vec<Fq2>,
    chi2: Vec<i8>,
}

impl Enumeration<'_> {
    /// Runs over all `c₀` for the fixed upper coefficients in `coeffs[1..]`.
    fn sweep_constant(
        &self,
        coeffs: &mut [u64],
        counts: &mut ClassCounts,
        models: &mut u64,
    ) -> Result<()> {
        let ctx = self.ctx;
        let q = ctx.q;
        coeffs[0] = 0;
        let base: Vec<Fq2> = self.points.iter().map(|&x| eval2(coeffs, x, ctx)).collect();
        let curve_inf = points_at_infinity(
            &CurveModel {
                q,
                coeffs: coeffs.to_vec(),
            },
            ctx,
        );
        let qi = q as i64;
        for c0 in 0..q {
            coeffs[0] = c0;
            if !is_squarefree(coeffs, ctx) {
                continue;
            }
            let mut s1 = 0i64;
            let mut s2 = 0i64;
            for (i, &(a, b)) in base.iter().enumerate() {
                let a = (a + c0) % q;
                let c = self.chi2[(b * q + a) as usize] as i64;
                s2 += c;
                if i < q as usize {
                    s1 += ctx.chi[a as usize] as i64;
                }
            }
            let fc = frobenius_class(ctx, qi + curve_inf.0 + s1, qi * qi + curve_inf.1 + s2)?;
            *counts.entry((fc.a1, fc.a2)).or_insert(0) += 1;
            *models += 1;
        }
        Ok(())
    }

    /// All models with `coeffs[deg] = lead` and `coeffs[deg-1], coeffs[deg-2]` as given.
    fn task(&self, deg: usize, lead: u64, hi: u64, mid: u64) -> Result<(ClassCounts, u64)> {
        let q = self.ctx.q;
        let mut coeffs = vec![0u64; deg + 1];
        coeffs[deg] = lead;
        coeffs[deg - 1] = hi;
        coeffs[deg - 2] = mid;
        let free = deg - 3; // coefficients 1..deg-3
        let mut counts = ClassCounts::new();
        let mut models = 0;
        let total = q.pow(free as u32);
        for idx in 0..total {
            let mut r = idx;
            for c in coeffs.iter_mut().skip(1).take(free) {
                *c = r % q;
                r /= q;
            }
            self.sweep_constant(&mut coeffs, &mut counts, &mut models)?;
        }
        Ok((counts, models))
    }
}

/// Exhaustive census of the model family over `𝔽_q`.
pub fn run_census(q: u64, options: &CensusOptions) -> Result<CensusReport> {
    let ctx = build_field(q)?;
    if q > CENSUS_Q_LIMIT {
        return Err(Error::BudgetExceeded {
            q,
            limit: CENSUS_Q_LIMIT,
        });
    }
    let start = Instant::now();
    let en = Enumeration {
        ctx: &ctx,
        points: ctx.extension_points(),
        chi2: ctx.chi2_table(),
    };
    let mut tasks: Vec<(usize, u64, u64, u64)> = Vec::new();
    let mut shapes = vec![(5usize, 1u64)];
    if options.include_degree6 {
        shapes.push((6, 1));
        shapes.push((6, ctx.nonresidue()));
    }
    for &(deg, lead) in &shapes {
        for hi in 0..q {
            for mid in 0..q {
                tasks.push((deg, lead, hi, mid));
            }
        }
    }
    let threads = options.threads.clamp(1, tasks.len());
    let next = AtomicUsize::new(0);
    let partials: Vec<Result<(ClassCounts, u64)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|_| {
                scope.spawn(|| {
                    let mut counts = ClassCounts::new();
                    let mut models = 0;
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        let Some(&(deg, lead, hi, mid)) = tasks.get(i) else {
                            break;
                        };
                        let (c, m) = en.task(deg, lead, hi, mid)?;
                        for (k, v) in c {
                            *counts.entry(k).or_insert(0) += v;
                        }
                        models += m;
                    }
                    Ok((counts, models))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("census worker panicked"))
            .collect()
    });
    let mut classes = ClassCounts::new();
    let mut model_count = 0;
    for p in partials {
        let (c, m) = p?;
        for (k, v) in c {
            *classes.entry(k).or_insert(0) += v;
        }
        model_count += m;
    }
    let (strata, band_failures) = build_strata(q, &classes)?;
    Ok(CensusReport {
        q,
        include_degree6: options.include_degree6,
        model_count,
        classes,
        strata,
        band_failures,
        threads,
        runtime: start.elapsed(),
    })
}

type Strata = (Vec<StratumRecord>, Vec<(FrobeniusClass, BandCheck)>);

fn build_strata(q: u64, classes: &ClassCounts) -> Result<Strata> {
    let mut by_disc: BTreeMap<i64, StratumRecord> = BTreeMap::new();
    let mut failures = Vec::new();
    for (&(a1, a2), &count) in classes {
        let fc = FrobeniusClass::new(q, a1, a2)?;
        let check = verify_bands(&fc);
        if !check.holds() {
            failures.push((fc, check));
        }
        let (m0, disc) = decompose_real_disc(fc.delta_real())?;
        by_disc
            .entry(disc)
            .or_insert_with(|| StratumRecord {
                disc,
                bands: BTreeMap::new(),
            })
            .bands
            .entry(m0)
            .or_default()
            .push((fc, count));
    }
    Ok((by_disc.into_values().collect(), failures))
}

/// One row of the census cache file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub q: u64,
    pub a1: i64,
    pub a2: i64,
    pub count: u64,
    pub delta_real: i64,
    pub m0: u64,
    #[serde(rename = "D")]
    pub disc: i64,
}

impl CensusReport {
    pub fn total_curves(&self) -> u64 {
        self.classes.values().sum()
    }

    pub fn all_bands_hold(&self) -> bool {
        self.band_failures.is_empty()
    }

    pub fn class_list(&self) -> Vec<(FrobeniusClass, u64)> {
        self.classes
            .iter()
            .map(|(&(a1, a2), &c)| (FrobeniusClass { q: self.q, a1, a2 }, c))
            .collect()
    }

    /// Rows sorted by `(a₁, a₂)`.
    pub fn rows(&self) -> Result<Vec<CensusRow>> {
        self.class_list()
            .into_iter()
            .map(|(fc, count)| {
                let (m0, disc) = decompose_real_disc(fc.delta_real())?;
                Ok(CensusRow {
                    q: fc.q,
                    a1: fc.a1,
                    a2: fc.a2,
                    count,
                    delta_real: fc.delta_real(),
                    m0,
                    disc,
                })
            })
            .collect()
    }

    /// Normalized trace histogram on the shared 512-bin grid.
    pub fn trace_histogram(&self) -> Vec<f64> {
        let mut h = vec![0.0; HISTOGRAM_BINS];
        let total = self.total_curves() as f64;
        for (fc, count) in self.class_list() {
            h[bin_index(fc.s1(), HISTOGRAM_BINS)] += count as f64 / total;
        }
        h
    }

    /// L¹ distance between the trace histogram and the `USp(4)` bin masses.
    pub fn histogram_l1_to_usp4(&self) -> Result<f64> {
        let table = tracedist::cdf_table(GroupKind::Usp4)?;
        let width = 8.0 / HISTOGRAM_BINS as f64;
        Ok(self
            .trace_histogram()
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let lo = -4.0 + i as f64 * width;
                (p - (table.eval(lo + width) - table.eval(lo))).abs()
            })
            .sum())
    }
}

pub fn write_census_csv<W: Write>(mut out: W, rows: &[CensusRow]) -> Result<()> {
    writeln!(out, "{CENSUS_FORMAT}")?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_census_csv<R: Read>(input: R) -> Result<Vec<CensusRow>> {
    let mut input = BufReader::new(input);
    let mut first = String::new();
    input.read_line(&mut first)?;
    if first.trim_end() != CENSUS_FORMAT {
        return Err(Error::Parse(format!(
            "expected '{CENSUS_FORMAT}', found '{}'",
            first.trim_end()
        )));
    }
    let mut rd = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    let rows = rd
        .deserialize()
        .collect::<std::result::Result<Vec<CensusRow>, _>>()?;
    for r in &rows {
        let fc = FrobeniusClass::new(r.q, r.a1, r.a2)?;
        if fc.delta_real() != r.delta_real || decompose_real_disc(r.delta_real)? != (r.m0, r.disc) {
            return Err(Error::Parse(format!(
                "row {r:?} is internally inconsistent"
            )));
        }
    }
    Ok(rows)
}

/// One point of a strata scatter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterRow {
    #[serde(rename = "D")]
    pub disc: i64,
    pub m0: u64,
    pub s1: f64,
    pub delta0: f64,
    pub count: u64,
}

fn scatter_row(fc: &FrobeniusClass, count: u64) -> Result<ScatterRow> {
    let (m0, disc) = decompose_real_disc(fc.delta_real())?;
    Ok(ScatterRow {
        disc,
        m0,
        s1: fc.s1(),
        delta0: fc.delta0(),
        count,
    })
}

/// All Weil-admissible `(a₁, a₂)` whose discriminant label is in `discs`.
///
/// Membership is decided by the Weil data alone; no curve or endomorphism
/// ring is constructed.
pub fn weil_class_scatter(q: u64, discs: &[i64]) -> Result<Vec<ScatterRow>> {
    if !is_odd_prime(q) {
        return Err(Error::NotOddPrime { q });
    }
    let qi = q as i64;
    let a1_max = isqrt(16 * q) as i64;
    let mut rows = Vec::new();
    for a1 in -a1_max..=a1_max {
        // a₂ ranges over [−2q, 2q + a₁²/4] from the root-location conditions
        for a2 in -2 * qi..=(2 * qi + a1 * a1 / 4) {
            let fc = FrobeniusClass { q, a1, a2 };
            if !fc.in_weil_region() {
                continue;
            }
            let (_, disc) = decompose_real_disc(fc.delta_real())?;
            if discs.contains(&disc) {
                rows.push(scatter_row(&fc, 1)?);
            }
        }
    }
    sort_scatter(&mut rows);
    Ok(rows)
}

/// Scatter of the census classes whose label is in `discs`, weighted by curve counts.
pub fn census_scatter(report: &CensusReport, discs: &[i64]) -> Result<Vec<ScatterRow>> {
    let mut rows = Vec::new();
    for (fc, count) in report.class_list() {
        let row = scatter_row(&fc, count)?;
        if discs.contains(&row.disc) {
            rows.push(row);
        }
    }
    sort_scatter(&mut rows);
    Ok(rows)
}

fn sort_scatter(rows: &mut [ScatterRow]) {
    rows.sort_by(|a, b| {
        (a.disc, a.m0)
            .cmp(&(b.disc, b.m0))
            .then(a.s1.total_cmp(&b.s1))
    });
}

pub fn write_scatter_csv<W: Write>(out: W, rows: &[ScatterRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_scatter_csv<R: Read>(input: R) -> Result<Vec<ScatterRow>> {
    let mut rd = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    Ok(rd
        .deserialize()
        .collect::<std::result::Result<Vec<ScatterRow>, _>>()?)
}

/// Curves with defect at most `d_max`, counted per stratum label.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalReport {
    pub d_max: f64,
    pub counts: BTreeMap<i64, u64>,
    /// Every counted class satisfies `D ≤ d_max²`.
    pub disc_bound_holds: bool,
}

pub fn extremal_report(report: &CensusReport, d_max: f64) -> Result<ExtremalReport> {
    let mut counts = BTreeMap::new();
    let mut disc_bound_holds = true;
    for (fc, count) in report.class_list() {
        if fc.defect() > d_max {
            continue;
        }
        let (_, disc) = decompose_real_disc(fc.delta_real())?;
        *counts.entry(disc).or_insert(0) += count;
        if disc as f64 > d_max * d_max {
            disc_bound_holds = false;
        }
    }
    Ok(ExtremalReport {
        d_max,
        counts,
        disc_bound_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_tables() {
        let f3 = build_field(3).unwrap();
        assert_eq!((f3.chi(1), f3.chi(2)), (1, -1));
        let f5 = build_field(5).unwrap();
        let nr: Vec<u64> = (1..5).filter(|&x| f5.chi(x) == -1).collect();
        assert_eq!(nr, vec![2, 3]);
        assert!(matches!(build_field(4), Err(Error::NotOddPrime { q: 4 })));
        assert!(build_field(2).is_err());
        assert!(build_field(9).is_err());
        assert!(matches!(
            build_field(65537),
            Err(Error::FieldTooLarge { .. })
        ));
    }

    #[test]
    fn extension_field_character() {
        let ctx = build_field(7).unwrap();
        let pts = ctx.extension_points();
        assert_eq!(pts.len(), 49);
        // Every element of 𝔽_q is a square in 𝔽_{q²}.
        for a in 1..7 {
            assert_eq!(ctx.chi2((a, 0)), 1);
        }
        for &x in &pts {
            if x != (0, 0) {
                assert_eq!(ctx.chi2(ctx.mul2(x, x)), 1);
            }
        }
        let squares = pts.iter().filter(|&&x| ctx.chi2(x) == 1).count();
        assert_eq!(squares, 24);
    }

    #[test]
    fn squarefree_detection() {
        let ctx = build_field(5).unwrap();
        // x⁵ + 1 = (x + 1)⁵ over 𝔽₅
        assert!(!CurveModel::quintic(5, [1, 0, 0, 0, 0]).is_squarefree(&ctx));
        assert!(CurveModel::quintic(5, [0, 1, 0, 0, 0]).is_squarefree(&ctx));
        // x³(x² + 1)
        assert!(!CurveModel::quintic(5, [0, 0, 0, 1, 0]).is_squarefree(&ctx));
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose_real_disc(20).unwrap(), (2, 5));
        assert_eq!(decompose_real_disc(36).unwrap(), (6, 1));
        assert_eq!(decompose_real_disc(12).unwrap(), (1, 12));
        assert_eq!(decompose_real_disc(0).unwrap(), (0, 0));
        assert_eq!(decompose_real_disc(8).unwrap(), (1, 8));
        assert_eq!(decompose_real_disc(45).unwrap(), (3, 5));
        assert!(matches!(
            decompose_real_disc(7),
            Err(Error::InvalidDiscriminant(7))
        ));
        assert!(decompose_real_disc(-4).is_err());
    }

    #[test]
    fn frobenius_zero_class() {
        let ctx = build_field(11).unwrap();
        let fc = frobenius_class(&ctx, 12, 122).unwrap();
        assert_eq!((fc.a1, fc.a2), (0, 0));
        assert_eq!(fc.delta_real(), 88);
        assert!(frobenius_class(&ctx, 12, 123).is_err());
    }

    #[test]
    fn band_check_synthetic_violation() {
        // Δ = 20 > d² at q = 5, a₁ = 8.
        let fc = FrobeniusClass {
            q: 5,
            a1: 8,
            a2: 21,
        };
        let c = verify_bands(&fc);
        assert!(!c.disc_within_defect);
        assert!(!c.holds());
        let zero = FrobeniusClass {
            q: 5,
            a1: 0,
            a2: 10,
        };
        assert_eq!(zero.delta_real(), 0);
        assert!(verify_bands(&zero).exclusion_zone);
    }

    #[test]
    fn census_q5_totals() {
        let r = run_census(
            5,
            &CensusOptions {
                include_degree6: false,
                threads: 3,
            },
        )
        .unwrap();
        assert_eq!(r.model_count, 5u64.pow(5) - 5u64.pow(4));
        assert_eq!(r.total_curves(), r.model_count);
        assert!(r.all_bands_hold());
    }

    #[test]
    fn sextic_count() {
        let r = run_census(
            3,
            &CensusOptions {
                include_degree6: true,
                threads: 2,
            },
        )
        .unwrap();
        let q = 3u64;
        assert_eq!(
            r.model_count,
            q.pow(5) - q.pow(4) + 2 * (q.pow(6) - q.pow(5))
        );
        assert!(r.all_bands_hold());
    }

    #[test]
    fn budget_enforced() {
        assert!(matches!(
            run_census(37, &CensusOptions::default()),
            Err(Error::BudgetExceeded { q: 37, .. })
        ));
    }

    #[test]
    fn census_csv_round_trip() {
        let r = run_census(
            3,
            &CensusOptions {
                include_degree6: false,
                threads: 1,
            },
        )
        .unwrap();
        let rows = r.rows().unwrap();
        let mut buf = Vec::new();
        write_census_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# satotate-census v1\nq,a1,a2,count,delta_real,m0,D\n"));
        assert_eq!(read_census_csv(&buf[..]).unwrap(), rows);
        assert!(read_census_csv(&b"q,a1\n"[..]).is_err());
    }
}
