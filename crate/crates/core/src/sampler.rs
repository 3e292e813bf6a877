//! Monte Carlo draws of the trace from each Haar measure.
//!
//! Draws are generated in fixed-size chunks; chunk `i` uses ChaCha stream
//! `i` of the configured seed. The output sequence therefore depends only
//! on the configuration, never on how many threads produced it.

use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::measures::GroupKind;
use crate::tracedist;

/// Number of uniform histogram bins on `[-4, 4]`.
pub const HISTOGRAM_BINS: usize = 512;

/// Draws per substream.
pub const CHUNK_LEN: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    pub seed: u64,
    pub n_samples: usize,
    pub group: GroupKind,
}

impl SamplerConfig {
    pub fn new(seed: u64, n_samples: usize, group: GroupKind) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::Domain {
                name: "n_samples",
                value: 0.0,
                reason: "at least one sample is required",
            });
        }
        Ok(Self {
            seed,
            n_samples,
            group,
        })
    }
}

/// Generator for substream `stream` of `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One semicircle proposal: uniform `t` on `[-2, 2]`, kept with probability
/// `√(4 − t²)/2`.
pub fn propose_semicircle<R: Rng + ?Sized>(rng: &mut R) -> Option<f64> {
    let t = 4.0 * rng.random::<f64>() - 2.0;
    let u: f64 = rng.random();
    (2.0 * u < (4.0 - t * t).sqrt()).then_some(t)
}

pub fn sample_semicircle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        if let Some(t) = propose_semicircle(rng) {
            return t;
        }
    }
}

/// Density bound used for `USp(4)` angle proposals.
const USP4_BOUND: f64 = 32.0 / (PI * PI);

/// One `USp(4)` proposal: angles uniform on `[0, π]²`, kept with probability
/// `density/(32/π²)`; returns the trace on acceptance.
pub fn propose_usp4<R: Rng + ?Sized>(rng: &mut R) -> Option<f64> {
    let th1 = PI * rng.random::<f64>();
    let th2 = PI * rng.random::<f64>();
    let u: f64 = rng.random();
    let (c1, c2) = (th1.cos(), th2.cos());
    let (s1, s2) = (th1.sin(), th2.sin());
    let d = c1 - c2;
    let density = 8.0 / (PI * PI) * d * d * s1 * s1 * s2 * s2;
    (u * USP4_BOUND < density).then_some(2.0 * (c1 + c2))
}

pub fn sample_trace<R: Rng + ?Sized>(group: GroupKind, rng: &mut R) -> f64 {
    match group {
        GroupKind::Usp4 => loop {
            if let Some(s) = propose_usp4(rng) {
                return s;
            }
        },
        GroupKind::Su2xSu2 => sample_semicircle(rng) + sample_semicircle(rng),
        GroupKind::DiagonalSu2 => 2.0 * sample_semicircle(rng),
    }
}

fn fill_chunk(cfg: &SamplerConfig, chunk: usize, out: &mut [f64]) {
    let mut rng = substream(cfg.seed, chunk as u64);
    for x in out {
        *x = sample_trace(cfg.group, &mut rng);
    }
}

/// All draws of `cfg` in canonical order, using up to `threads` workers.
pub fn draw(cfg: &SamplerConfig, threads: usize) -> Vec<f64> {
    let mut out = vec![0.0; cfg.n_samples];
    let chunks: Vec<(usize, &mut [f64])> = out.chunks_mut(CHUNK_LEN).enumerate().collect();
    let threads = threads.clamp(1, chunks.len().max(1));
    let mut buckets: Vec<Vec<(usize, &mut [f64])>> = (0..threads).map(|_| Vec::new()).collect();
    for (i, c) in chunks {
        buckets[i % threads].push((i, c));
    }
    std::thread::scope(|scope| {
        for bucket in buckets {
            scope.spawn(move || {
                for (i, c) in bucket {
                    fill_chunk(cfg, i, c);
                }
            });
        }
    });
    out
}

/// Sorted sample plus a fixed-grid histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSummary {
    sorted_traces: Vec<f64>,
    bin_counts: Vec<u64>,
}

/// Histogram bin of `s1` on the uniform `[-4, 4]` grid.
pub fn bin_index(s1: f64, bins: usize) -> usize {
    let pos = (s1 + 4.0) / 8.0 * bins as f64;
    (pos.max(0.0) as usize).min(bins - 1)
}

impl EmpiricalSummary {
    pub fn from_traces(mut traces: Vec<f64>) -> Self {
        traces.sort_by(f64::total_cmp);
        let mut bin_counts = vec![0; HISTOGRAM_BINS];
        for &s in &traces {
            bin_counts[bin_index(s, HISTOGRAM_BINS)] += 1;
        }
        Self {
            sorted_traces: traces,
            bin_counts,
        }
    }

    pub fn sorted_traces(&self) -> &[f64] {
        &self.sorted_traces
    }

    pub fn bin_counts(&self) -> &[u64] {
        &self.bin_counts
    }

    pub fn n(&self) -> usize {
        self.sorted_traces.len()
    }

    pub fn merge(mut self, other: EmpiricalSummary) -> Self {
        for (a, b) in self.bin_counts.iter_mut().zip(&other.bin_counts) {
            *a += b;
        }
        let mut merged = Vec::with_capacity(self.n() + other.n());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.sorted_traces, &other.sorted_traces);
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                merged.push(a[i]);
                i += 1;
            } else {
                merged.push(b[j]);
                j += 1;
            }
        }
        merged.extend_from_slice(&a[i..]);
        merged.extend_from_slice(&b[j..]);
        self.sorted_traces = merged;
        self
    }

    /// Fraction of draws `≤ x`.
    pub fn ecdf(&self, x: f64) -> f64 {
        self.sorted_traces.partition_point(|&s| s <= x) as f64 / self.n() as f64
    }
}

pub fn summarize(cfg: &SamplerConfig, threads: usize) -> EmpiricalSummary {
    EmpiricalSummary::from_traces(draw(cfg, threads))
}

/// Kolmogorov–Smirnov distance between the sample and the distribution of `group`.
pub fn ks_distance(emp: &EmpiricalSummary, group: GroupKind) -> Result<f64> {
    let n = emp.n();
    if n < 100 {
        return Err(Error::Domain {
            name: "n",
            value: n as f64,
            reason: "KS distance needs at least 100 samples",
        });
    }
    let table = tracedist::cdf_table(group)?;
    let nf = n as f64;
    let mut sup: f64 = 0.0;
    for (i, &s) in emp.sorted_traces().iter().enumerate() {
        let f = table.eval(s);
        sup = sup
            .max((f - i as f64 / nf).abs())
            .max(((i + 1) as f64 / nf - f).abs());
    }
    Ok(sup)
}

/// Writes draws as CSV with columns `index,s1`.
pub fn write_samples_csv<W: Write>(out: W, traces: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "s1"])?;
    for (i, s) in traces.iter().enumerate() {
        w.write_record([i.to_string(), format!("{s:.17e}")])?;
    }
    w.flush()?;
    Ok(())
}
