//! Bipartite graph streams and the exact oracle used to check algorithm output.
//!
//! Vertices are 1-based on both sides: A-vertices are `1..=n`, B-vertices are
//! `1..=m`. Streams are simple: an edge may only be inserted while absent and
//! deleted while present.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Default exponent `c` in the `m <= n^c` restriction.
pub const DEFAULT_POLY_EXPONENT: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    A,
    B,
}

impl Side {
    fn tag(self) -> char {
        match self {
            Side::A => 'a',
            Side::B => 'b',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId {
    pub side: Side,
    pub index: u32,
}

impl VertexId {
    pub fn a(index: u32) -> Self {
        VertexId { side: Side::A, index }
    }

    pub fn b(index: u32) -> Self {
        VertexId { side: Side::B, index }
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.side.tag(), self.index)
    }
}

/// Side sizes of a bipartite graph, `|A| = n` and `|B| = m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    pub n: u32,
    pub m: u32,
}

impl Dims {
    /// Checked constructor enforcing `m <= n^3`.
    pub fn new(n: u32, m: u32) -> Result<Self> {
        Self::with_exponent(n, m, DEFAULT_POLY_EXPONENT)
    }

    pub fn with_exponent(n: u32, m: u32, exponent: u32) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidParameter(format!(
                "both sides must be nonempty, got n={n} m={m}"
            )));
        }
        let cap = (n as u128).saturating_pow(exponent);
        if (m as u128) > cap {
            return Err(Error::InvalidParameter(format!(
                "m={m} exceeds n^{exponent} for n={n}"
            )));
        }
        Ok(Dims { n, m })
    }

    pub fn check(&self, v: VertexId) -> Result<()> {
        let bound = match v.side {
            Side::A => self.n,
            Side::B => self.m,
        };
        if v.index == 0 || v.index > bound {
            return Err(Error::VertexOutOfRange {
                side: v.side.tag(),
                index: v.index,
                bound,
            });
        }
        Ok(())
    }

    pub fn check_edge(&self, edge: Edge) -> Result<()> {
        self.check(VertexId::a(edge.a))?;
        self.check(VertexId::b(edge.b))
    }
}

/// An edge `ab` with `a` in A and `b` in B, both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub a: u32,
    pub b: u32,
}

impl Edge {
    pub fn new(a: u32, b: u32) -> Self {
        Edge { a, b }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Insert,
    Delete,
}

impl Sign {
    pub fn delta(self) -> i64 {
        match self {
            Sign::Insert => 1,
            Sign::Delete => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamUpdate {
    pub edge: Edge,
    pub sign: Sign,
}

impl StreamUpdate {
    pub fn insert(a: u32, b: u32) -> Self {
        StreamUpdate {
            edge: Edge::new(a, b),
            sign: Sign::Insert,
        }
    }

    pub fn delete(a: u32, b: u32) -> Self {
        StreamUpdate {
            edge: Edge::new(a, b),
            sign: Sign::Delete,
        }
    }
}

/// A neighbourhood `(a, S)`: an A-vertex with a set of claimed neighbours.
///
/// Witnesses are kept sorted and free of duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Neighbourhood {
    center: u32,
    witnesses: Vec<u32>,
}

impl Neighbourhood {
    pub fn new(center: u32, witnesses: impl IntoIterator<Item = u32>) -> Self {
        let set: BTreeSet<u32> = witnesses.into_iter().collect();
        Neighbourhood {
            center,
            witnesses: set.into_iter().collect(),
        }
    }

    pub fn center(&self) -> u32 {
        self.center
    }

    pub fn witnesses(&self) -> &[u32] {
        &self.witnesses
    }

    /// `|(a, S)| = |S|`.
    pub fn size(&self) -> usize {
        self.witnesses.len()
    }
}

/// Exact adjacency of the A-side, replayed update by update.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactGraph {
    dims: Dims,
    adjacency: Vec<BTreeSet<u32>>,
    edges: usize,
}

impl ExactGraph {
    pub fn new(dims: Dims) -> Self {
        ExactGraph {
            dims,
            adjacency: vec![BTreeSet::new(); dims.n as usize],
            edges: 0,
        }
    }

    /// Replays a whole update sequence, failing on the first malformed update.
    pub fn replay<'a>(dims: Dims, updates: impl IntoIterator<Item = &'a StreamUpdate>) -> Result<Self> {
        let mut graph = ExactGraph::new(dims);
        for u in updates {
            graph.apply_update(u)?;
        }
        Ok(graph)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn apply_update(&mut self, u: &StreamUpdate) -> Result<()> {
        self.dims.check_edge(u.edge)?;
        let Edge { a, b } = u.edge;
        let row = &mut self.adjacency[(a - 1) as usize];
        match u.sign {
            Sign::Insert => {
                if !row.insert(b) {
                    return Err(Error::DuplicateInsert { a, b });
                }
                self.edges += 1;
            }
            Sign::Delete => {
                if !row.remove(&b) {
                    return Err(Error::DeleteAbsent { a, b });
                }
                self.edges -= 1;
            }
        }
        Ok(())
    }

    pub fn degree(&self, a: u32) -> usize {
        self.adjacency
            .get((a as usize).wrapping_sub(1))
            .map_or(0, BTreeSet::len)
    }

    pub fn neighbours(&self, a: u32) -> Option<&BTreeSet<u32>> {
        self.adjacency.get((a as usize).wrapping_sub(1))
    }

    pub fn contains(&self, a: u32, b: u32) -> bool {
        self.neighbours(a).is_some_and(|row| row.contains(&b))
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    /// `Δ`, the largest A-degree (0 for an edgeless graph).
    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(BTreeSet::len).max().unwrap_or(0)
    }

    /// Degrees of all A-vertices, index 0 holding vertex 1.
    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(BTreeSet::len).collect()
    }

    /// Number of A-vertices with degree at least `threshold`.
    pub fn count_at_least(&self, threshold: usize) -> usize {
        self.adjacency.iter().filter(|row| row.len() >= threshold).count()
    }

    /// The degree-class counts `n_0, ..., n_alpha` used when analysing the
    /// insertion-only algorithm: `n_0` counts vertices of degree at least 1
    /// and `n_i` those of degree at least `ceil(i * d / alpha)`.
    pub fn degree_classes(&self, d: u32, alpha: u32) -> Vec<usize> {
        (0..=alpha)
            .map(|i| {
                let threshold = div_ceil(u64::from(i) * u64::from(d), u64::from(alpha)).max(1);
                self.count_at_least(threshold as usize)
            })
            .collect()
    }

    /// Iterates over all present edges in `(a, b)` order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&b| Edge::new(i as u32 + 1, b)))
    }
}

/// A vertex of maximum degree with its full neighbourhood, smallest index on ties.
pub fn exact_max_neighbourhood(graph: &ExactGraph) -> Result<Neighbourhood> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in graph.adjacency.iter().enumerate() {
        if row.is_empty() {
            continue;
        }
        if best.is_none_or(|(_, deg)| row.len() > deg) {
            best = Some((i, row.len()));
        }
    }
    let (i, _) = best.ok_or(Error::EmptyGraph)?;
    Ok(Neighbourhood::new(
        i as u32 + 1,
        graph.adjacency[i].iter().copied(),
    ))
}

/// True iff every witness is a neighbour of the center and there are at
/// least `threshold` of them.
pub fn verify_witness(graph: &ExactGraph, nb: &Neighbourhood, threshold: usize) -> bool {
    let Some(row) = graph.neighbours(nb.center()) else {
        return false;
    };
    nb.size() >= threshold && nb.witnesses().iter().all(|b| row.contains(b))
}

pub(crate) fn div_ceil(num: u64, den: u64) -> u64 {
    num.div_ceil(den)
}
