//! Degree-based reservoir sampling.
//!
//! A reservoir of capacity `s` holds a uniform sample of the A-vertices whose
//! degree has reached `d1`. Once a vertex sits in the reservoir, its incident
//! edges are collected until `d2` of them are stored; the edge that triggers
//! admission is itself collectible. A vertex evicted from the reservoir loses
//! its collected edges and never re-enters, since the `d1` trigger fires once.

use std::collections::BTreeMap;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::model::{Edge, Neighbourhood, Sign, StreamUpdate};
use crate::seed::{self, Rng};

/// Returns `true` with probability `p`.
pub fn coin<R: rand::Rng + ?Sized>(p: f64, rng: &mut R) -> Result<bool> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    Ok(rng.gen::<f64>() < p)
}

/// Reservoir, collected edges and candidate counter of one sampling run.
///
/// Degrees are supplied by the caller so several runs can share one degree
/// table; see [`DegResSampling`] for the self-contained version.
#[derive(Debug, Clone)]
pub struct ReservoirState {
    d1: u32,
    d2: u32,
    capacity: usize,
    members: Vec<u32>,
    collected: BTreeMap<u32, Vec<u32>>,
    candidates: u64,
    rng: Rng,
}

impl ReservoirState {
    pub fn new(d1: u32, d2: u32, capacity: usize, seed: u64) -> Result<Self> {
        if d1 == 0 || d2 == 0 || capacity == 0 {
            return Err(Error::InvalidParameter(format!(
                "reservoir needs d1, d2, s >= 1, got d1={d1} d2={d2} s={capacity}"
            )));
        }
        Ok(ReservoirState {
            d1,
            d2,
            capacity,
            members: Vec::with_capacity(capacity),
            collected: BTreeMap::new(),
            candidates: 0,
            rng: seed::rng(seed),
        })
    }

    /// Feeds edge `ab`; `degree` is `deg(a)` after counting this edge.
    pub fn observe(&mut self, edge: Edge, degree: u32) {
        let a = edge.a;
        if degree == self.d1 {
            self.candidates += 1;
            if self.members.len() < self.capacity {
                self.admit(a);
            } else {
                let p = self.capacity as f64 / self.candidates as f64;
                if coin(p, &mut self.rng).expect("s/x lies in [0, 1] once the reservoir is full") {
                    let slot = self.rng.gen_range(0..self.members.len());
                    let evicted = self.members.swap_remove(slot);
                    self.collected.remove(&evicted);
                    self.admit(a);
                }
            }
        }
        if let Some(edges) = self.collected.get_mut(&a) {
            if edges.len() < self.d2 as usize {
                edges.push(edge.b);
            }
        }
    }

    fn admit(&mut self, a: u32) {
        self.members.push(a);
        self.collected.insert(a, Vec::new());
    }

    /// A neighbourhood of exactly `d2` collected edges, smallest center first;
    /// `None` reports failure.
    pub fn finalize(&self) -> Option<Neighbourhood> {
        self.collected
            .iter()
            .find(|(_, edges)| edges.len() == self.d2 as usize)
            .map(|(&a, edges)| Neighbourhood::new(a, edges.iter().copied()))
    }

    pub fn d1(&self) -> u32 {
        self.d1
    }

    pub fn d2(&self) -> u32 {
        self.d2
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Vertices currently in the reservoir, sorted.
    pub fn reservoir(&self) -> Vec<u32> {
        self.collected.keys().copied().collect()
    }

    /// `x`: how many vertices have reached degree `d1` so far.
    pub fn candidates(&self) -> u64 {
        self.candidates
    }

    pub fn collected(&self, a: u32) -> Option<&[u32]> {
        self.collected.get(&a).map(Vec::as_slice)
    }

    pub fn stored_edges(&self) -> usize {
        self.collected.values().map(Vec::len).sum()
    }

    pub fn reservoir_len(&self) -> usize {
        self.members.len()
    }
}

/// Per-vertex degree counts for the A-side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeTable {
    degrees: Vec<u32>,
}

impl DegreeTable {
    pub fn new(n: u32) -> Self {
        DegreeTable {
            degrees: vec![0; n as usize],
        }
    }

    /// Increments `deg(a)` and returns the new value.
    pub fn increment(&mut self, a: u32) -> Result<u32> {
        let bound = self.degrees.len() as u32;
        let slot = a
            .checked_sub(1)
            .and_then(|i| self.degrees.get_mut(i as usize))
            .ok_or(Error::VertexOutOfRange {
                side: 'a',
                index: a,
                bound,
            })?;
        *slot += 1;
        Ok(*slot)
    }

    pub fn get(&self, a: u32) -> u32 {
        self.degrees.get((a as usize).wrapping_sub(1)).copied().unwrap_or(0)
    }

    /// Number of entries, always `n`.
    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }
}

/// A single sampling run with its own degree table.
#[derive(Debug, Clone)]
pub struct DegResSampling {
    degrees: DegreeTable,
    state: ReservoirState,
}

impl DegResSampling {
    pub fn new(n: u32, d1: u32, d2: u32, capacity: usize, seed: u64) -> Result<Self> {
        Ok(DegResSampling {
            degrees: DegreeTable::new(n),
            state: ReservoirState::new(d1, d2, capacity, seed)?,
        })
    }

    pub fn process_update(&mut self, update: &StreamUpdate) -> Result<()> {
        if update.sign == Sign::Delete {
            return Err(Error::DeletionUnsupported);
        }
        let degree = self.degrees.increment(update.edge.a)?;
        self.state.observe(update.edge, degree);
        Ok(())
    }

    pub fn finalize(&self) -> Option<Neighbourhood> {
        self.state.finalize()
    }

    pub fn state(&self) -> &ReservoirState {
        &self.state
    }

    pub fn degrees(&self) -> &DegreeTable {
        &self.degrees
    }
}
