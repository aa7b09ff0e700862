//! Star detection in general graphs through the bipartite double cover.
//!
//! Every general edge `uv` becomes the two bipartite edges `(A:u, B:v)` and
//! `(A:v, B:u)`, so the A-degree of `v` in the cover equals its degree in the
//! original graph. One FEwW instance runs per guess `d` in the grid
//! `{floor((1+eps)^i) : i = 0..ceil(log_{1+eps} n)}`, and the successful run
//! with the largest guess wins.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::insertion_deletion::{InsDelConfig, InsertionDeletion};
use crate::insertion_only::{ceil_log2, InsertionOnly, InsertionOnlyConfig};
use crate::model::{Dims, ExactGraph, Neighbourhood, Sign, StreamUpdate};
use crate::seed;
use crate::stream::StreamMode;

/// One update of a general (undirected, simple) graph stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GraphUpdate {
    pub u: u32,
    pub v: u32,
    pub sign: Sign,
}

impl GraphUpdate {
    pub fn insert(u: u32, v: u32) -> Self {
        GraphUpdate { u, v, sign: Sign::Insert }
    }

    pub fn delete(u: u32, v: u32) -> Self {
        GraphUpdate { u, v, sign: Sign::Delete }
    }
}

/// A general-graph stream on vertices `1..=n`.
///
/// Text form mirrors the bipartite format with a single side:
///
/// ```text
/// # n=<n> mode=<ins|insdel>
/// I <u> <v>
/// D <u> <v>
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphStream {
    pub n: u32,
    pub mode: StreamMode,
    pub updates: Vec<GraphUpdate>,
}

impl GraphStream {
    pub fn new(n: u32, mode: StreamMode) -> Self {
        GraphStream {
            n,
            mode,
            updates: Vec::new(),
        }
    }

    pub fn push(&mut self, update: GraphUpdate) -> Result<()> {
        for w in [update.u, update.v] {
            if w == 0 || w > self.n {
                return Err(Error::VertexOutOfRange { side: 'v', index: w, bound: self.n });
            }
        }
        if update.u == update.v {
            return Err(Error::SelfLoop(update.u));
        }
        if self.mode == StreamMode::InsertionOnly && update.sign == Sign::Delete {
            return Err(Error::DeletionUnsupported);
        }
        self.updates.push(update);
        Ok(())
    }

    /// The bipartite double cover as an update sequence.
    pub fn doubled(&self) -> impl Iterator<Item = StreamUpdate> + '_ {
        self.updates.iter().flat_map(|u| double_update(*u))
    }

    /// Exact double cover, which also validates the simple-stream discipline.
    pub fn replay(&self) -> Result<ExactGraph> {
        let mut graph = ExactGraph::new(Dims::new(self.n, self.n)?);
        for u in self.doubled() {
            graph.apply_update(&u)?;
        }
        Ok(graph)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("# n={} mode={}\n", self.n, self.mode.as_str());
        for u in &self.updates {
            let tag = if u.sign == Sign::Insert { 'I' } else { 'D' };
            let _ = writeln!(out, "{tag} {} {}", u.u, u.v);
        }
        out
    }

    pub fn parse(text: &str) -> Result<GraphStream> {
        let perr = |line: usize, message: &str| Error::Parse {
            line,
            message: message.to_string(),
        };
        let mut lines = text.split('\n').enumerate();
        let header = lines.next().map(|(_, l)| l).unwrap_or("");
        let rest = header
            .strip_prefix("# ")
            .ok_or_else(|| perr(1, "header must start with `# `"))?;
        let (mut n, mut mode) = (None, None);
        for field in rest.split(' ') {
            match field.split_once('=') {
                Some(("n", v)) => n = v.parse::<u32>().ok(),
                Some(("mode", v)) => mode = StreamMode::from_str(v).ok(),
                _ => return Err(perr(1, &format!("unexpected header field {field:?}"))),
            }
        }
        let (Some(n), Some(mode)) = (n, mode) else {
            return Err(perr(1, "header needs n and mode"));
        };
        if n == 0 {
            return Err(perr(1, "n must be positive"));
        }
        let mut stream = GraphStream::new(n, mode);
        for (i, line) in lines {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(' ').collect();
            let (sign, u, v) = match fields.as_slice() {
                [tag, u, v] => {
                    let sign = match *tag {
                        "I" => Sign::Insert,
                        "D" => Sign::Delete,
                        _ => return Err(perr(i + 1, "expected `I <u> <v>` or `D <u> <v>`")),
                    };
                    let u = u.parse().map_err(|_| perr(i + 1, "bad vertex"))?;
                    let v = v.parse().map_err(|_| perr(i + 1, "bad vertex"))?;
                    (sign, u, v)
                }
                _ => return Err(perr(i + 1, "expected `I <u> <v>` or `D <u> <v>`")),
            };
            stream
                .push(GraphUpdate { u, v, sign })
                .map_err(|e| perr(i + 1, &e.to_string()))?;
        }
        Ok(stream)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<GraphStream> {
        GraphStream::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// The two cover edges of a general edge `uv`, as insertions.
pub fn double_edge(u: u32, v: u32) -> Result<[StreamUpdate; 2]> {
    if u == v {
        return Err(Error::SelfLoop(u));
    }
    Ok(double_update(GraphUpdate::insert(u, v)))
}

fn double_update(update: GraphUpdate) -> [StreamUpdate; 2] {
    let mk = |a, b| StreamUpdate {
        edge: crate::model::Edge::new(a, b),
        sign: update.sign,
    };
    [mk(update.u, update.v), mk(update.v, update.u)]
}

/// `{floor((1+eps)^i) : i = 0..=ceil(log_{1+eps} n)}`, deduplicated, ascending.
pub fn guess_grid(n: u32, epsilon: f64) -> Result<Vec<u32>> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon={epsilon} must be positive")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let base = 1.0 + epsilon;
    let target = f64::from(n);
    // Smallest i with (1+eps)^i >= n, tolerant of rounding in powi.
    let mut top = 0i32;
    while base.powi(top) < target * (1.0 - 1e-12) {
        top += 1;
    }
    let mut grid: Vec<u32> = (0..=top)
        .map(|i| (base.powi(i) + 1e-9).floor() as u32)
        .collect();
    grid.dedup();
    Ok(grid)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarConfig {
    pub n: u32,
    pub epsilon: f64,
    pub alpha: u32,
    pub mode: StreamMode,
    pub seed: u64,
    /// Sampler failure probability for insertion-deletion runs; `None`
    /// selects the default `1/(n^10 d)` per guess.
    pub delta: Option<f64>,
}

/// Parameters for a semi-streaming star detector: `alpha = ceil(log2 n)` for
/// insertion-only streams, `alpha = ceil(sqrt n)` for insertion-deletion
/// streams, and `eps = 1`.
pub fn semi_streaming_preset(n: u32, mode: StreamMode) -> Result<StarConfig> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n={n} must be at least 2")));
    }
    let alpha = match mode {
        StreamMode::InsertionOnly => ceil_log2(u64::from(n)),
        StreamMode::InsertionDeletion => ceil_sqrt(u64::from(n)) as u32,
    };
    Ok(StarConfig {
        n,
        epsilon: 1.0,
        alpha,
        mode,
        seed: 0,
        delta: None,
    })
}

fn ceil_sqrt(x: u64) -> u64 {
    let mut r = (x as f64).sqrt() as u64;
    while r * r > x {
        r -= 1;
    }
    while r * r < x {
        r += 1;
    }
    r
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarOutcome {
    pub result: Option<Neighbourhood>,
    /// The guess whose run produced `result`.
    pub guess: Option<u32>,
    pub grid: Vec<u32>,
    /// Per guess, whether its run succeeded.
    pub succeeded: Vec<bool>,
    pub stored_edges: usize,
    pub space_words: usize,
    pub sketch_cells: usize,
}

enum GuessRun {
    Ins(InsertionOnly),
    InsDel(InsertionDeletion),
}

pub fn run_star_detection(config: &StarConfig, stream: &GraphStream) -> Result<StarOutcome> {
    if stream.n != config.n {
        return Err(Error::InvalidParameter(format!(
            "config n={} but stream has n={}",
            config.n, stream.n
        )));
    }
    if config.alpha == 0 {
        return Err(Error::InvalidParameter("alpha must be positive".into()));
    }
    if config.mode == StreamMode::InsertionOnly && stream.mode != StreamMode::InsertionOnly {
        return Err(Error::InvalidParameter(
            "insertion-only detector given an insertion-deletion stream".into(),
        ));
    }
    let grid = guess_grid(config.n, config.epsilon)?;
    let mut runs = grid
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let run_seed = seed::derive(config.seed, i as u64);
            Ok(match config.mode {
                StreamMode::InsertionOnly => GuessRun::Ins(InsertionOnly::new(
                    InsertionOnlyConfig::new(config.n, d, config.alpha, run_seed)?,
                )?),
                StreamMode::InsertionDeletion => {
                    let c = match config.delta {
                        Some(delta) => {
                            InsDelConfig::with_delta(config.n, config.n, d, config.alpha, run_seed, delta)?
                        }
                        None => InsDelConfig::new(config.n, config.n, d, config.alpha, run_seed)?,
                    };
                    GuessRun::InsDel(InsertionDeletion::new(c)?)
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let doubled: Vec<StreamUpdate> = stream.doubled().collect();
    for chunk in doubled.chunks(512) {
        for run in &mut runs {
            match run {
                GuessRun::Ins(alg) => {
                    for update in chunk {
                        alg.process_update(update)?;
                    }
                }
                GuessRun::InsDel(alg) => alg.process_batch(chunk)?,
            }
        }
    }

    let mut outcome = StarOutcome {
        result: None,
        guess: None,
        grid: grid.clone(),
        succeeded: Vec::with_capacity(grid.len()),
        stored_edges: 0,
        space_words: 0,
        sketch_cells: 0,
    };
    for (run, &d) in runs.iter().zip(&grid) {
        let result = match run {
            GuessRun::Ins(alg) => {
                let space = alg.space_report();
                outcome.stored_edges += space.stored_edges;
                outcome.space_words += space.words();
                alg.finalize()
            }
            GuessRun::InsDel(alg) => {
                let out = alg.finalize();
                outcome.sketch_cells += out.sketch_cells;
                out.result
            }
        };
        outcome.succeeded.push(result.is_some());
        // Grid is ascending, so the last success carries the largest guess.
        if result.is_some() {
            outcome.result = result;
            outcome.guess = Some(d);
        }
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubling_an_edge() {
        let [x, y] = double_edge(1, 2).unwrap();
        assert_eq!(x, StreamUpdate::insert(1, 2));
        assert_eq!(y, StreamUpdate::insert(2, 1));
        assert_eq!(double_edge(3, 3), Err(Error::SelfLoop(3)));
    }

    #[test]
    fn triangle_cover_degrees() {
        let mut s = GraphStream::new(3, StreamMode::InsertionOnly);
        for (u, v) in [(1, 2), (1, 3), (2, 3)] {
            s.push(GraphUpdate::insert(u, v)).unwrap();
        }
        assert_eq!(s.doubled().count(), 6);
        assert_eq!(s.replay().unwrap().degrees(), vec![2, 2, 2]);
    }

    #[test]
    fn cover_degree_equals_graph_degree() {
        let mut s = GraphStream::new(5, StreamMode::InsertionDeletion);
        for (u, v) in [(1, 2), (1, 3), (1, 4), (4, 5)] {
            s.push(GraphUpdate::insert(u, v)).unwrap();
        }
        s.push(GraphUpdate::delete(1, 3)).unwrap();
        assert_eq!(s.replay().unwrap().degrees(), vec![2, 1, 0, 2, 1]);
    }

    #[test]
    fn duplicate_undirected_edge_is_detected() {
        let mut s = GraphStream::new(3, StreamMode::InsertionOnly);
        s.push(GraphUpdate::insert(1, 2)).unwrap();
        s.push(GraphUpdate::insert(2, 1)).unwrap();
        assert!(s.replay().is_err());
    }

    #[test]
    fn grid_values() {
        assert_eq!(guess_grid(16, 1.0).unwrap(), vec![1, 2, 4, 8, 16]);
        assert_eq!(guess_grid(17, 1.0).unwrap(), vec![1, 2, 4, 8, 16, 32]);
        assert_eq!(guess_grid(1, 1.0).unwrap(), vec![1]);
        assert_eq!(guess_grid(10, 0.5).unwrap(), vec![1, 2, 3, 5, 7, 11]);
        assert!(guess_grid(10, 0.0).is_err());
    }

    #[test]
    fn presets() {
        let ins = semi_streaming_preset(256, StreamMode::InsertionOnly).unwrap();
        assert_eq!((ins.alpha, ins.epsilon), (8, 1.0));
        let del = semi_streaming_preset(256, StreamMode::InsertionDeletion).unwrap();
        assert_eq!(del.alpha, 16);
        assert_eq!(semi_streaming_preset(2, StreamMode::InsertionOnly).unwrap().alpha, 1);
        // ceil(sqrt 2) = 2.
        assert_eq!(semi_streaming_preset(2, StreamMode::InsertionDeletion).unwrap().alpha, 2);
        assert!(semi_streaming_preset(1, StreamMode::InsertionOnly).is_err());
    }

    #[test]
    fn ceil_sqrt_values() {
        let got: Vec<u64> = [1, 2, 4, 5, 9, 10, 255, 256, 257].iter().map(|&x| ceil_sqrt(x)).collect();
        assert_eq!(got, vec![1, 2, 2, 3, 3, 4, 16, 16, 17]);
    }

    #[test]
    fn empty_graph_fails() {
        let s = GraphStream::new(16, StreamMode::InsertionOnly);
        let mut config = semi_streaming_preset(16, StreamMode::InsertionOnly).unwrap();
        config.alpha = 2;
        let out = run_star_detection(&config, &s).unwrap();
        assert_eq!(out.result, None);
        assert!(out.succeeded.iter().all(|s| !s));
    }

    #[test]
    fn text_round_trip() {
        let mut s = GraphStream::new(4, StreamMode::InsertionDeletion);
        s.push(GraphUpdate::insert(1, 4)).unwrap();
        s.push(GraphUpdate::delete(1, 4)).unwrap();
        let text = s.to_text();
        assert_eq!(text, "# n=4 mode=insdel\nI 1 4\nD 1 4\n");
        assert_eq!(GraphStream::parse(&text).unwrap(), s);
        assert!(GraphStream::parse("# n=4 mode=ins\nI 2 2\n").is_err());
        assert!(GraphStream::parse("# n=4 mode=ins\nD 1 2\n").is_err());
    }
}
