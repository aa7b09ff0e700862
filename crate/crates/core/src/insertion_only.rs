//! `alpha`-approximation for insertion-only streams.
//!
//! Runs `alpha` reservoir samplers side by side with thresholds
//! `d1(i) = max{1, ceil(i*d/alpha)}` for `i = 0..alpha-1`, a common
//! `d2 = ceil(d/alpha)` and reservoir size `s = ceil(ln(n) * n^(1/alpha))`.
//! All runs see identical degrees, so they share one degree table.

use crate::deg_res::{DegreeTable, ReservoirState};
use crate::error::{Error, Result};
use crate::model::{div_ceil, Neighbourhood, Sign, StreamUpdate};
use crate::seed;
use crate::stream::Stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InsertionOnlyConfig {
    pub n: u32,
    pub d: u32,
    pub alpha: u32,
    pub seed: u64,
}

impl InsertionOnlyConfig {
    pub fn new(n: u32, d: u32, alpha: u32, seed: u64) -> Result<Self> {
        let config = InsertionOnlyConfig { n, d, alpha, seed };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 {
            return Err(Error::InvalidParameter(format!(
                "need n >= 1 and d >= 1, got n={} d={}",
                self.n, self.d
            )));
        }
        let max_alpha = ceil_log2(u64::from(self.n)) + 1;
        if self.alpha == 0 || self.alpha > max_alpha {
            return Err(Error::InvalidParameter(format!(
                "alpha={} outside [1, {max_alpha}] for n={}",
                self.alpha, self.n
            )));
        }
        Ok(())
    }

    /// Reservoir size `ceil(ln(n) * n^(1/alpha))`, at least 1.
    pub fn reservoir_size(&self) -> usize {
        reservoir_size(self.n, self.alpha)
    }

    /// Witness target `ceil(d/alpha)`.
    pub fn d2(&self) -> u32 {
        div_ceil(u64::from(self.d), u64::from(self.alpha)) as u32
    }

    /// Admission threshold of run `i`.
    pub fn d1(&self, run: u32) -> u32 {
        (div_ceil(u64::from(run) * u64::from(self.d), u64::from(self.alpha)) as u32).max(1)
    }

    /// Upper bound on retained edges, `alpha * s * ceil(d/alpha)`.
    pub fn edge_bound(&self) -> usize {
        self.alpha as usize * self.reservoir_size() * self.d2() as usize
    }
}

/// `ceil(ln(n) * n^(1/alpha))`, clamped to at least 1 (it is 0 at `n = 1`).
pub fn reservoir_size(n: u32, alpha: u32) -> usize {
    let n = f64::from(n);
    let s = (n.ln() * n.powf(1.0 / f64::from(alpha))).ceil();
    (s as usize).max(1)
}

pub(crate) fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Retained items after a run, counted in logical units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SpaceReport {
    pub stored_edges: usize,
    pub reservoir_entries: usize,
    pub degree_entries: usize,
    /// One candidate counter per run.
    pub counters: usize,
}

impl SpaceReport {
    /// Non-edge words: reservoir slots, degree counters and run counters.
    pub fn words(&self) -> usize {
        self.reservoir_entries + self.degree_entries + self.counters
    }
}

/// The streaming algorithm state: a shared degree table and `alpha` runs.
#[derive(Debug, Clone)]
pub struct InsertionOnly {
    config: InsertionOnlyConfig,
    degrees: DegreeTable,
    runs: Vec<ReservoirState>,
}

impl InsertionOnly {
    pub fn new(config: InsertionOnlyConfig) -> Result<Self> {
        config.validate()?;
        let s = config.reservoir_size();
        let runs = (0..config.alpha)
            .map(|i| {
                ReservoirState::new(
                    config.d1(i),
                    config.d2(),
                    s,
                    seed::derive(config.seed, u64::from(i)),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(InsertionOnly {
            config,
            degrees: DegreeTable::new(config.n),
            runs,
        })
    }

    pub fn process_update(&mut self, update: &StreamUpdate) -> Result<()> {
        if update.sign == Sign::Delete {
            return Err(Error::DeletionUnsupported);
        }
        let degree = self.degrees.increment(update.edge.a)?;
        for run in &mut self.runs {
            run.observe(update.edge, degree);
        }
        Ok(())
    }

    /// Result of the successful run with the smallest index, if any.
    pub fn finalize(&self) -> Option<Neighbourhood> {
        self.runs.iter().find_map(ReservoirState::finalize)
    }

    pub fn runs(&self) -> &[ReservoirState] {
        &self.runs
    }

    pub fn config(&self) -> &InsertionOnlyConfig {
        &self.config
    }

    pub fn space_report(&self) -> SpaceReport {
        SpaceReport {
            stored_edges: self.runs.iter().map(ReservoirState::stored_edges).sum(),
            reservoir_entries: self.runs.iter().map(ReservoirState::reservoir_len).sum(),
            degree_entries: self.degrees.len(),
            counters: self.runs.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InsertionOnlyOutcome {
    pub result: Option<Neighbourhood>,
    pub space: SpaceReport,
}

/// Runs the algorithm over a whole stream.
pub fn run_insertion_only(config: InsertionOnlyConfig, stream: &Stream) -> Result<InsertionOnlyOutcome> {
    if stream.dims.n != config.n {
        return Err(Error::InvalidParameter(format!(
            "config n={} but stream has n={}",
            config.n, stream.dims.n
        )));
    }
    let mut alg = InsertionOnly::new(config)?;
    for u in &stream.updates {
        alg.process_update(u)?;
    }
    Ok(InsertionOnlyOutcome {
        result: alg.finalize(),
        space: alg.space_report(),
    })
}
