//! Multi-party set-disjointness as a graph stream.
//!
//! Party `i` turns each element `u` of its set `S_i` into edges from `u` to
//! the B-block `(i-1)k+1 ..= ik` of `B = [kp]`. With pairwise disjoint sets
//! every vertex has degree `k`; if the sets share exactly one element, that
//! element has degree `kp`.

use rand::seq::index;

use crate::error::{invalid, Result};
use crate::model::{Dims, StreamUpdate};
use crate::seed;
use crate::stream::{Stream, StreamMode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetDisjointnessInstance {
    pub p: u32,
    pub k: u32,
    /// `S_1..S_p`, each sorted.
    pub sets: Vec<Vec<u32>>,
    /// The common element when the sets intersect.
    pub planted: Option<u32>,
    /// One stream per party, in party order.
    pub parties: Vec<Stream>,
}

impl SetDisjointnessInstance {
    /// `d = k * p`, the size of the B-side.
    pub fn d(&self) -> u32 {
        self.k * self.p
    }

    /// Party streams concatenated in party order.
    pub fn concatenated(&self) -> Result<Stream> {
        let mut out = Stream::new(self.parties[0].dims, StreamMode::InsertionOnly);
        for party in &self.parties {
            out.extend_from(party)?;
        }
        Ok(out)
    }
}

/// Each party's set has `t = (universe - 1) / p` elements. Disjoint sets are
/// drawn from a random partition; intersecting sets share one planted element
/// and are otherwise disjoint.
pub fn gen_set_disjointness(
    p: u32,
    k: u32,
    universe: u32,
    intersecting: bool,
    seed: u64,
) -> Result<SetDisjointnessInstance> {
    if p < 2 || k == 0 {
        return Err(invalid(format!("need p >= 2 and k >= 1, got p={p} k={k}")));
    }
    if universe < p + 1 {
        return Err(invalid(format!(
            "universe of {universe} elements is too small for {p} parties"
        )));
    }
    let d = k * p;
    let dims = Dims::new(universe, d)?;
    let per_party = ((universe - 1) / p) as usize;
    let mut rng = seed::rng(seed);
    let pool: Vec<u32> = index::sample(&mut rng, universe as usize, universe as usize)
        .into_iter()
        .map(|i| i as u32 + 1)
        .collect();
    let (planted, fresh) = if intersecting {
        (Some(pool[0]), &pool[1..])
    } else {
        (None, &pool[..])
    };
    let own = per_party - usize::from(intersecting);
    let mut sets = Vec::with_capacity(p as usize);
    let mut parties = Vec::with_capacity(p as usize);
    for i in 0..p as usize {
        let mut set: Vec<u32> = fresh[i * own..(i + 1) * own].to_vec();
        set.extend(planted);
        set.sort_unstable();
        let mut stream = Stream::new(dims, StreamMode::InsertionOnly);
        let first = i as u32 * k + 1;
        for &u in &set {
            for b in first..first + k {
                stream.push(StreamUpdate::insert(u, b))?;
            }
        }
        sets.push(set);
        parties.push(stream);
    }
    Ok(SetDisjointnessInstance {
        p,
        k,
        sets,
        planted,
        parties,
    })
}
