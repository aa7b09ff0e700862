//! `alpha`-approximation for insertion-deletion streams.
//!
//! Two strategies share one pass:
//!
//! * vertex sampling: before the stream, draw `A'` of size
//!   `sV = min{n, ceil(10 x ln n)}` and run `kA = ceil(10 (d/alpha) ln n)`
//!   l0-samplers on the edges of every `a` in `A'`;
//! * edge sampling: run `kE = ceil(10 (n d/alpha)(1/x + 1/alpha) ln(n m))`
//!   l0-samplers over all `n * m` edge slots,
//!
//! with `x = max{ceil(n/alpha), ceil(sqrt n)}`. After the stream every sampler
//! is queried, the sampled edges are pooled and deduplicated, and any center
//! with at least `ceil(d/alpha)` distinct witnesses is reported.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::l0::{L0Bank, L0Params, L0Sample};
use crate::model::{div_ceil, Neighbourhood, StreamUpdate};
use crate::seed;
use crate::stream::Stream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InsDelConfig {
    pub n: u32,
    pub m: u32,
    pub d: u32,
    pub alpha: u32,
    pub seed: u64,
    pub delta: f64,
}

impl InsDelConfig {
    /// Config with the default sampler failure probability `1/(n^10 d)`.
    pub fn new(n: u32, m: u32, d: u32, alpha: u32, seed: u64) -> Result<Self> {
        Self::with_delta(n, m, d, alpha, seed, default_delta(n, d))
    }

    pub fn with_delta(n: u32, m: u32, d: u32, alpha: u32, seed: u64, delta: f64) -> Result<Self> {
        let config = InsDelConfig {
            n,
            m,
            d,
            alpha,
            seed,
            delta,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 || self.d == 0 || self.alpha == 0 {
            return Err(Error::InvalidParameter(format!(
                "n, m, d, alpha must be positive, got n={} m={} d={} alpha={}",
                self.n, self.m, self.d, self.alpha
            )));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta={} outside (0, 1)",
                self.delta
            )));
        }
        Ok(())
    }

    /// `x = max{ceil(n/alpha), ceil(sqrt n)}`.
    pub fn x(&self) -> u64 {
        let by_alpha = div_ceil(u64::from(self.n), u64::from(self.alpha));
        let root = f64::from(self.n).sqrt().ceil() as u64;
        by_alpha.max(root)
    }

    fn ln_n(&self) -> f64 {
        f64::from(self.n).ln()
    }

    fn d_over_alpha(&self) -> f64 {
        f64::from(self.d) / f64::from(self.alpha)
    }

    /// Size of the vertex sample `A'`.
    pub fn vertex_sample_size(&self) -> usize {
        let want = (10.0 * self.x() as f64 * self.ln_n()).ceil() as usize;
        want.min(self.n as usize)
    }

    /// Samplers per sampled vertex.
    pub fn per_vertex_samplers(&self) -> usize {
        (10.0 * self.d_over_alpha() * self.ln_n()).ceil() as usize
    }

    /// Samplers over the whole edge space.
    pub fn edge_samplers(&self) -> usize {
        let n = f64::from(self.n);
        let factor = 1.0 / self.x() as f64 + 1.0 / f64::from(self.alpha);
        let ln_nm = (n * f64::from(self.m)).ln();
        (10.0 * n * self.d_over_alpha() * factor * ln_nm).ceil() as usize
    }

    /// Witness target `ceil(d/alpha)`.
    pub fn threshold(&self) -> usize {
        div_ceil(u64::from(self.d), u64::from(self.alpha)) as usize
    }

    pub fn sampler_counts(&self) -> SamplerCounts {
        SamplerCounts {
            vertex_sample: self.vertex_sample_size(),
            per_vertex: self.per_vertex_samplers(),
            edge: self.edge_samplers(),
        }
    }

    /// Closed-form cell count: `sV * kA` samplers over `m` coordinates plus
    /// `kE` samplers over `n * m` coordinates.
    pub fn expected_cells(&self) -> Result<usize> {
        let c = self.sampler_counts();
        let vertex = L0Params::new(u64::from(self.m), self.delta)?;
        let edge = L0Params::new(u64::from(self.n) * u64::from(self.m), self.delta)?;
        Ok(c.vertex_sample * c.per_vertex * vertex.cells() + c.edge * edge.cells())
    }
}

/// `1 / (n^10 d)`.
pub fn default_delta(n: u32, d: u32) -> f64 {
    1.0 / (f64::from(n).powi(10) * f64::from(d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerCounts {
    /// `sV`
    pub vertex_sample: usize,
    /// `kA`
    pub per_vertex: usize,
    /// `kE`
    pub edge: usize,
}

impl SamplerCounts {
    pub fn total(&self) -> usize {
        self.vertex_sample * self.per_vertex + self.edge
    }
}

/// The streaming algorithm state.
#[derive(Debug, Clone)]
pub struct InsertionDeletion {
    config: InsDelConfig,
    sampled: Vec<u32>,
    /// Maps an A-vertex to its position in `sampled`.
    slot: Vec<Option<usize>>,
    vertex_banks: Vec<L0Bank>,
    edge_bank: L0Bank,
}

impl InsertionDeletion {
    pub fn new(config: InsDelConfig) -> Result<Self> {
        config.validate()?;
        let counts = config.sampler_counts();
        let mut rng = seed::rng(seed::derive(config.seed, 0));
        let mut sampled: Vec<u32> = index::sample(&mut rng, config.n as usize, counts.vertex_sample)
            .into_iter()
            .map(|i| i as u32 + 1)
            .collect();
        sampled.sort_unstable();
        let mut slot = vec![None; config.n as usize];
        for (pos, &a) in sampled.iter().enumerate() {
            slot[(a - 1) as usize] = Some(pos);
        }
        let vertex_banks = sampled
            .iter()
            .map(|_| {
                L0Bank::new(
                    u64::from(config.m),
                    config.delta,
                    counts.per_vertex,
                    rng.gen(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let edge_bank = L0Bank::new(
            u64::from(config.n) * u64::from(config.m),
            config.delta,
            counts.edge,
            rng.gen(),
        )?;
        Ok(InsertionDeletion {
            config,
            sampled,
            slot,
            vertex_banks,
            edge_bank,
        })
    }

    /// The vertex sample `A'`, sorted.
    pub fn sampled_vertices(&self) -> &[u32] {
        &self.sampled
    }

    pub fn process_update(&mut self, update: &StreamUpdate) -> Result<()> {
        self.process_batch(std::slice::from_ref(update))
    }

    /// Feeds a run of consecutive updates. Equivalent to calling
    /// [`InsertionDeletion::process_update`] on each, since every sketch is
    /// linear; nothing changes if any update is out of range.
    pub fn process_batch(&mut self, updates: &[StreamUpdate]) -> Result<()> {
        let (n, m) = (self.config.n, self.config.m);
        let mut edge_updates = Vec::with_capacity(updates.len());
        let mut vertex_updates: BTreeMap<usize, Vec<(u64, i64)>> = BTreeMap::new();
        for update in updates {
            let (a, b) = (update.edge.a, update.edge.b);
            if a == 0 || a > n {
                return Err(Error::VertexOutOfRange { side: 'a', index: a, bound: n });
            }
            if b == 0 || b > m {
                return Err(Error::VertexOutOfRange { side: 'b', index: b, bound: m });
            }
            let delta = update.sign.delta();
            if let Some(pos) = self.slot[(a - 1) as usize] {
                vertex_updates.entry(pos).or_default().push((u64::from(b - 1), delta));
            }
            edge_updates.push((u64::from(a - 1) * u64::from(m) + u64::from(b - 1), delta));
        }
        for (pos, batch) in vertex_updates {
            self.vertex_banks[pos].update_batch(&batch)?;
        }
        self.edge_bank.update_batch(&edge_updates)
    }

    /// Queries every sampler and pools the results.
    pub fn finalize(&self) -> InsDelOutcome {
        let m = u64::from(self.config.m);
        let mut pool: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
        let mut failures = 0;
        for (&a, bank) in self.sampled.iter().zip(&self.vertex_banks) {
            for j in 0..bank.len() {
                match bank.sample(j) {
                    L0Sample::Coordinate(c) => {
                        pool.entry(a).or_default().insert(c as u32 + 1);
                    }
                    L0Sample::Empty => {}
                    L0Sample::Fail => failures += 1,
                }
            }
        }
        for j in 0..self.edge_bank.len() {
            match self.edge_bank.sample(j) {
                L0Sample::Coordinate(c) => {
                    let (a, b) = ((c / m) as u32 + 1, (c % m) as u32 + 1);
                    pool.entry(a).or_default().insert(b);
                }
                L0Sample::Empty => {}
                L0Sample::Fail => failures += 1,
            }
        }
        let threshold = self.config.threshold();
        let result = pool
            .iter()
            .find(|(_, witnesses)| witnesses.len() >= threshold)
            .map(|(&a, witnesses)| Neighbourhood::new(a, witnesses.iter().copied()));
        InsDelOutcome {
            result,
            samplers: self.config.sampler_counts(),
            sketch_cells: self.sketch_cells(),
            sketch_failures: failures,
        }
    }

    pub fn sketch_cells(&self) -> usize {
        self.vertex_banks.iter().map(L0Bank::cell_count).sum::<usize>() + self.edge_bank.cell_count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InsDelOutcome {
    pub result: Option<Neighbourhood>,
    pub samplers: SamplerCounts,
    pub sketch_cells: usize,
    /// Samplers that returned no verified coordinate on a nonzero vector.
    pub sketch_failures: usize,
}

/// Updates handed to the sketches at a time by [`run_insertion_deletion`].
const BATCH: usize = 512;

pub fn run_insertion_deletion(config: InsDelConfig, stream: &Stream) -> Result<InsDelOutcome> {
    if stream.dims.n != config.n || stream.dims.m != config.m {
        return Err(Error::InvalidParameter(format!(
            "config n={} m={} but stream has n={} m={}",
            config.n, config.m, stream.dims.n, stream.dims.m
        )));
    }
    let mut alg = InsertionDeletion::new(config)?;
    for chunk in stream.updates.chunks(BATCH) {
        alg.process_batch(chunk)?;
    }
    Ok(alg.finalize())
}

/// Monte Carlo estimate for the sampling lemma: draw
/// `ceil(C ln(n) n y / k)` uniform samples from `[n]` with repetition and
/// report the fraction of trials hitting at least `y` distinct elements of a
/// fixed `k`-subset.
pub fn validate_sampling_lemma(n: u64, k: u64, y: u64, c: u32, trials: usize, seed: u64) -> Result<f64> {
    if !(y <= k && k <= n) || y == 0 {
        return Err(Error::ParameterOrderViolation { y, k, n });
    }
    if c < 4 {
        return Err(Error::InvalidParameter(format!("C={c} must be at least 4")));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let draws = sampling_lemma_draws(n, k, y, c);
    let mut rng = seed::rng(seed);
    let mut hit = vec![false; k as usize];
    let mut successes = 0usize;
    for _ in 0..trials {
        hit.iter_mut().for_each(|h| *h = false);
        let mut distinct = 0;
        for _ in 0..draws {
            // The fixed subset is {0, ..., k-1}.
            let u = rng.gen_range(0..n);
            if u < k && !hit[u as usize] {
                hit[u as usize] = true;
                distinct += 1;
                if distinct == y {
                    break;
                }
            }
        }
        if distinct >= y {
            successes += 1;
        }
    }
    Ok(successes as f64 / trials as f64)
}

/// `ceil(C ln(n) n y / k)`.
pub fn sampling_lemma_draws(n: u64, k: u64, y: u64, c: u32) -> u64 {
    let (n, k, y) = (n as f64, k as f64, y as f64);
    (f64::from(c) * n.ln() * n * y / k).ceil() as u64
}
