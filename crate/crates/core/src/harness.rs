//! Seeded experiment runner.
//!
//! A config names a generator and an algorithm. Every trial draws a fresh
//! instance, runs the algorithm, checks the result against the exact oracle
//! and records space usage. Records serialize to CSV with the columns
//! `trial,seed,succeeded,witness_count,sound,stored_edges,sketch_cells,wall_ms`.
//!
//! Trial `t` uses seed `derive(master, t)`; its instance is generated from
//! `derive(seed, 0)` and the algorithm runs on `derive(seed, 1)`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::insertion_deletion::{default_delta, run_insertion_deletion, InsDelConfig};
use crate::insertion_only::{run_insertion_only, InsertionOnlyConfig};
use crate::instances::{
    gen_amri_stream, gen_bvl_graph, gen_layered_star, gen_set_disjointness, gen_star_graph,
    with_churn, AmriInstance, BvlInstance,
};
use crate::model::{div_ceil, ExactGraph, Neighbourhood};
use crate::seed;
use crate::star::{guess_grid, run_star_detection, GraphStream, StarConfig};
use crate::stream::{Stream, StreamMode};

/// Sampler failure probability used by experiments when none is configured
/// and `n <= 1000`; larger `n` falls back to `1/(n^10 d)`.
pub const EXPERIMENT_DELTA: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// One vertex of degree `d`, the rest at `background`.
    Planted,
    /// Planted center plus `heavy` vertices of degree `heavy_degree`.
    Layered,
    /// One vertex of degree `d`, every other vertex isolated.
    Sparse,
    Amri,
    SetDisjointness,
    Bvl,
    /// General graph with a planted star; only for the star algorithm.
    Star,
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "planted" => GeneratorKind::Planted,
            "layered" | "dense" => GeneratorKind::Layered,
            "sparse" => GeneratorKind::Sparse,
            "amri" => GeneratorKind::Amri,
            "setdisj" => GeneratorKind::SetDisjointness,
            "bvl" => GeneratorKind::Bvl,
            "star" => GeneratorKind::Star,
            other => return Err(invalid(format!("unknown generator {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmKind {
    InsertionOnly,
    InsertionDeletion,
    Star,
}

impl FromStr for AlgorithmKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ins" | "insertion-only" => AlgorithmKind::InsertionOnly,
            "insdel" | "insertion-deletion" => AlgorithmKind::InsertionDeletion,
            "star" => AlgorithmKind::Star,
            other => return Err(invalid(format!("unknown algorithm {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub generator: GeneratorKind,
    pub algorithm: AlgorithmKind,
    pub n: u32,
    pub m: u32,
    pub d: u32,
    pub alpha: u32,
    /// Guess-grid spacing for the star algorithm.
    pub epsilon: f64,
    pub delta: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub background: u32,
    pub heavy: u32,
    pub heavy_degree: u32,
    /// Transient insert/delete pairs mixed into planted streams.
    pub churn: usize,
    /// Party count for `setdisj` and `bvl`.
    pub parties: u32,
    /// Branch of `setdisj`.
    pub intersecting: bool,
    /// Detector mode for the star algorithm.
    pub star_mode: StreamMode,
    /// Fill `wall_ms`; off by default so reports are reproducible.
    pub record_time: bool,
}

impl ExperimentConfig {
    pub fn new(generator: GeneratorKind, algorithm: AlgorithmKind, n: u32, m: u32, d: u32, alpha: u32) -> Self {
        ExperimentConfig {
            generator,
            algorithm,
            n,
            m,
            d,
            alpha,
            epsilon: 1.0,
            delta: None,
            trials: 1,
            seed: 0,
            output: None,
            background: 0,
            heavy: 0,
            heavy_degree: 0,
            churn: 0,
            parties: 2,
            intersecting: true,
            star_mode: StreamMode::InsertionOnly,
            record_time: false,
        }
    }

    /// Parses flat `key=value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut generator = None;
        let mut algorithm = None;
        let mut cfg = ExperimentConfig::new(GeneratorKind::Planted, AlgorithmKind::InsertionOnly, 0, 0, 0, 0);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: lineno + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            fn num<T: FromStr>(v: &str) -> std::result::Result<T, String> {
                v.parse().map_err(|_| format!("bad number {v:?}"))
            }
            let res: std::result::Result<(), String> = (|| {
                match key {
                    "generator" => generator = Some(value.parse().map_err(|e: Error| e.to_string())?),
                    "algorithm" => algorithm = Some(value.parse().map_err(|e: Error| e.to_string())?),
                    "n" => cfg.n = num(value)?,
                    "m" => cfg.m = num(value)?,
                    "d" => cfg.d = num(value)?,
                    "alpha" => cfg.alpha = num(value)?,
                    "epsilon" => cfg.epsilon = num(value)?,
                    "delta" => cfg.delta = Some(num(value)?),
                    "trials" => cfg.trials = num(value)?,
                    "seed" => cfg.seed = num(value)?,
                    "output" => cfg.output = Some(PathBuf::from(value)),
                    "background" => cfg.background = num(value)?,
                    "heavy" => cfg.heavy = num(value)?,
                    "heavy_degree" => cfg.heavy_degree = num(value)?,
                    "churn" => cfg.churn = num(value)?,
                    "parties" => cfg.parties = num(value)?,
                    "intersecting" => cfg.intersecting = num(value)?,
                    "mode" => cfg.star_mode = value.parse().map_err(|e: Error| e.to_string())?,
                    "record_time" => cfg.record_time = num(value)?,
                    other => return Err(format!("unknown key {other:?}")),
                }
                Ok(())
            })();
            res.map_err(err)?;
        }
        cfg.generator = generator.ok_or_else(|| invalid("missing key: generator"))?;
        cfg.algorithm = algorithm.ok_or_else(|| invalid("missing key: algorithm"))?;
        if cfg.generator == GeneratorKind::Star && cfg.m == 0 {
            cfg.m = cfg.n;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if self.n == 0 || self.d == 0 || self.alpha == 0 {
            return Err(invalid(format!(
                "n, d, alpha must be positive, got n={} d={} alpha={}",
                self.n, self.d, self.alpha
            )));
        }
        let is_star_gen = self.generator == GeneratorKind::Star;
        if is_star_gen != (self.algorithm == AlgorithmKind::Star) {
            return Err(invalid("the star generator and the star algorithm go together"));
        }
        if self.algorithm == AlgorithmKind::InsertionOnly && self.has_deletions() {
            return Err(Error::DeletionUnsupported);
        }
        if matches!(self.generator, GeneratorKind::SetDisjointness | GeneratorKind::Bvl)
            && (self.parties < 2 || !self.d.is_multiple_of(self.parties))
        {
            return Err(invalid(format!(
                "d={} must be a multiple of parties={} >= 2",
                self.d, self.parties
            )));
        }
        if self.algorithm == AlgorithmKind::InsertionOnly {
            InsertionOnlyConfig::new(self.n, self.d, self.alpha, 0)?;
        }
        if self.algorithm == AlgorithmKind::InsertionDeletion {
            InsDelConfig::with_delta(self.n, self.m_effective(), self.d, self.alpha, 0, self.delta_effective())?;
        }
        Ok(())
    }

    fn has_deletions(&self) -> bool {
        self.generator == GeneratorKind::Amri || self.churn > 0
    }

    /// B-side size of the generated streams.
    pub fn m_effective(&self) -> u32 {
        match self.generator {
            GeneratorKind::Amri => 2 * self.d,
            GeneratorKind::Bvl => 2 * self.d,
            GeneratorKind::SetDisjointness => self.d,
            GeneratorKind::Star => self.n,
            _ => self.m,
        }
    }

    pub fn delta_effective(&self) -> f64 {
        self.delta.unwrap_or(if self.n <= 1000 {
            EXPERIMENT_DELTA
        } else {
            default_delta(self.n, self.d)
        })
    }

    /// Witnesses a successful trial must report.
    pub fn threshold(&self) -> usize {
        div_ceil(u64::from(self.d), u64::from(self.alpha)) as usize
    }

    fn star_config(&self, seed: u64) -> StarConfig {
        StarConfig {
            n: self.n,
            epsilon: self.epsilon,
            alpha: self.alpha,
            mode: self.star_mode,
            seed,
            delta: Some(self.delta_effective()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub succeeded: bool,
    pub witness_count: usize,
    pub sound: bool,
    pub stored_edges: usize,
    pub sketch_cells: usize,
    pub wall_ms: u64,
    /// Center of the reported neighbourhood.
    #[serde(skip)]
    pub center: Option<u32>,
    /// Vertex the generator made heavy, when it has one.
    #[serde(skip)]
    pub expected_center: Option<u32>,
}

/// Either a hard ceiling on stored edges or an exact sketch-cell count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceBound {
    EdgesAtMost(usize),
    CellsExactly(usize),
}

impl fmt::Display for SpaceBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceBound::EdgesAtMost(e) => write!(f, "stored_edges<={e}"),
            SpaceBound::CellsExactly(c) => write!(f, "sketch_cells=={c}"),
        }
    }
}

/// Theoretical space for one trial of `cfg`.
pub fn space_bound(cfg: &ExperimentConfig) -> Result<SpaceBound> {
    let m = cfg.m_effective();
    let delta = cfg.delta_effective();
    match cfg.algorithm {
        AlgorithmKind::InsertionOnly => Ok(SpaceBound::EdgesAtMost(
            InsertionOnlyConfig::new(cfg.n, cfg.d, cfg.alpha, 0)?.edge_bound(),
        )),
        AlgorithmKind::InsertionDeletion => Ok(SpaceBound::CellsExactly(
            InsDelConfig::with_delta(cfg.n, m, cfg.d, cfg.alpha, 0, delta)?.expected_cells()?,
        )),
        AlgorithmKind::Star => {
            let grid = guess_grid(cfg.n, cfg.epsilon)?;
            match cfg.star_mode {
                StreamMode::InsertionOnly => {
                    let mut total = 0;
                    for &d in &grid {
                        total += InsertionOnlyConfig::new(cfg.n, d, cfg.alpha, 0)?.edge_bound();
                    }
                    Ok(SpaceBound::EdgesAtMost(total))
                }
                StreamMode::InsertionDeletion => {
                    let mut total = 0;
                    for &d in &grid {
                        total += InsDelConfig::with_delta(cfg.n, cfg.n, d, cfg.alpha, 0, delta)?.expected_cells()?;
                    }
                    Ok(SpaceBound::CellsExactly(total))
                }
            }
        }
    }
}

/// Checks every record against [`space_bound`].
pub fn space_audit(cfg: &ExperimentConfig, records: &[TrialRecord]) -> Result<SpaceBound> {
    let bound = space_bound(cfg)?;
    for r in records {
        let ok = match bound {
            SpaceBound::EdgesAtMost(e) => r.stored_edges <= e,
            SpaceBound::CellsExactly(c) => r.sketch_cells == c,
        };
        if !ok {
            return Err(Error::SpaceBoundViolation(format!(
                "trial {}: stored_edges={} sketch_cells={} against {bound}",
                r.trial, r.stored_edges, r.sketch_cells
            )));
        }
    }
    Ok(bound)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary {
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_stored_edges: f64,
    pub mean_sketch_cells: f64,
    pub bound: SpaceBound,
}

impl fmt::Display for ExperimentSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "trials={} successes={} success_rate={:.4} mean_stored_edges={:.1} mean_sketch_cells={:.1} bound={}",
            self.trials,
            self.successes,
            self.success_rate,
            self.mean_stored_edges,
            self.mean_sketch_cells,
            self.bound
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub records: Vec<TrialRecord>,
    pub summary: ExperimentSummary,
    pub csv: String,
}

enum Instance {
    Bipartite(Stream),
    General(GraphStream),
}

fn generate(cfg: &ExperimentConfig, seed: u64) -> Result<(Instance, Option<u32>)> {
    let (stream, center) = match cfg.generator {
        GeneratorKind::Planted | GeneratorKind::Sparse | GeneratorKind::Layered => {
            let background = if cfg.generator == GeneratorKind::Sparse {
                0
            } else {
                cfg.background
            };
            let (heavy, heavy_degree) = if cfg.generator == GeneratorKind::Layered {
                (cfg.heavy, cfg.heavy_degree)
            } else {
                (0, 0)
            };
            let inst = gen_layered_star(cfg.n, cfg.m, cfg.d, heavy, heavy_degree, background, seed)?;
            let stream = if cfg.churn > 0 {
                with_churn(&inst.stream, cfg.churn, seed::derive(seed, 1))?
            } else {
                inst.stream
            };
            (stream, Some(inst.center))
        }
        GeneratorKind::Amri => {
            let k = cfg.d / cfg.alpha - 1;
            let inst = AmriInstance::random(cfg.n, 2 * cfg.d, k, seed)?.with_random_permutations(seed::derive(seed, 1));
            let target = inst.target();
            (gen_amri_stream(&inst, cfg.alpha)?.stream, Some(target))
        }
        GeneratorKind::SetDisjointness => {
            let k = cfg.d / cfg.parties;
            let inst = gen_set_disjointness(cfg.parties, k, cfg.n, cfg.intersecting, seed)?;
            (inst.concatenated()?, inst.planted)
        }
        GeneratorKind::Bvl => {
            let inst = BvlInstance::random(cfg.parties, cfg.n, cfg.d / cfg.parties, seed)?;
            let mut stream = Stream::new(inst.dims()?, StreamMode::InsertionOnly);
            for party in gen_bvl_graph(&inst)? {
                stream.extend_from(&party)?;
            }
            let top = inst.index_set(cfg.parties)[0];
            (stream, Some(top))
        }
        GeneratorKind::Star => {
            let (graph, hub) = gen_star_graph(cfg.n, cfg.d, seed)?;
            return Ok((Instance::General(graph), Some(hub)));
        }
    };
    Ok((Instance::Bipartite(stream), center))
}

struct Verdict {
    result: Option<Neighbourhood>,
    stored_edges: usize,
    sketch_cells: usize,
    threshold: usize,
    oracle: ExactGraph,
}

fn run_algorithm(cfg: &ExperimentConfig, instance: &Instance, seed: u64) -> Result<Verdict> {
    match (cfg.algorithm, instance) {
        (AlgorithmKind::InsertionOnly, Instance::Bipartite(stream)) => {
            let out = run_insertion_only(InsertionOnlyConfig::new(cfg.n, cfg.d, cfg.alpha, seed)?, stream)?;
            Ok(Verdict {
                result: out.result,
                stored_edges: out.space.stored_edges,
                sketch_cells: 0,
                threshold: cfg.threshold(),
                oracle: stream.replay()?,
            })
        }
        (AlgorithmKind::InsertionDeletion, Instance::Bipartite(stream)) => {
            let config = InsDelConfig::with_delta(cfg.n, stream.dims.m, cfg.d, cfg.alpha, seed, cfg.delta_effective())?;
            let out = run_insertion_deletion(config, stream)?;
            Ok(Verdict {
                result: out.result,
                stored_edges: 0,
                sketch_cells: out.sketch_cells,
                threshold: cfg.threshold(),
                oracle: stream.replay()?,
            })
        }
        (AlgorithmKind::Star, Instance::General(graph)) => {
            let out = run_star_detection(&cfg.star_config(seed), graph)?;
            let oracle = graph.replay()?;
            // Delta / (alpha (1 + eps)), rounded up.
            let target = oracle.max_degree() as f64 / (f64::from(cfg.alpha) * (1.0 + cfg.epsilon));
            Ok(Verdict {
                result: out.result,
                stored_edges: out.stored_edges,
                sketch_cells: out.sketch_cells,
                threshold: (target - 1e-9).ceil().max(1.0) as usize,
                oracle,
            })
        }
        _ => Err(invalid("generator does not fit the algorithm")),
    }
}

/// Runs one trial by index.
pub fn run_trial(cfg: &ExperimentConfig, trial: usize) -> Result<TrialRecord> {
    let trial_seed = seed::derive(cfg.seed, trial as u64);
    let start = Instant::now();
    let (instance, expected_center) = generate(cfg, seed::derive(trial_seed, 0))?;
    let verdict = run_algorithm(cfg, &instance, seed::derive(trial_seed, 1))?;
    let wall_ms = if cfg.record_time {
        start.elapsed().as_millis() as u64
    } else {
        0
    };
    let (sound, witness_count, center) = match &verdict.result {
        Some(nb) => {
            let sound = nb
                .witnesses()
                .iter()
                .all(|&b| verdict.oracle.contains(nb.center(), b));
            (sound, nb.size(), Some(nb.center()))
        }
        None => (true, 0, None),
    };
    if !sound {
        let nb = verdict.result.as_ref().expect("unsound implies a result");
        return Err(Error::UnsoundWitness {
            trial,
            detail: format!("center {} reported witnesses {:?}", nb.center(), nb.witnesses()),
        });
    }
    Ok(TrialRecord {
        trial,
        seed: trial_seed,
        succeeded: center.is_some() && witness_count >= verdict.threshold,
        witness_count,
        sound,
        stored_edges: verdict.stored_edges,
        sketch_cells: verdict.sketch_cells,
        wall_ms,
        center,
        expected_center,
    })
}

pub fn records_to_csv(records: &[TrialRecord]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for r in records {
        writer.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut records = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, t))
        .collect::<Result<Vec<_>>>()?;
    records.sort_by_key(|r| r.trial);
    let bound = space_audit(cfg, &records)?;
    let trials = records.len();
    let successes = records.iter().filter(|r| r.succeeded).count();
    let mean = |f: fn(&TrialRecord) -> usize| records.iter().map(f).sum::<usize>() as f64 / trials as f64;
    let summary = ExperimentSummary {
        trials,
        successes,
        success_rate: successes as f64 / trials as f64,
        mean_stored_edges: mean(|r| r.stored_edges),
        mean_sketch_cells: mean(|r| r.sketch_cells),
        bound,
    };
    let csv = records_to_csv(&records)?;
    if let Some(path) = &cfg.output {
        std::fs::write(path, &csv)?;
    }
    Ok(ExperimentReport { records, summary, csv })
}
