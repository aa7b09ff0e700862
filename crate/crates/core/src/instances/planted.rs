//! Positive instances with a known heavy vertex.

use std::collections::BTreeSet;

use rand::seq::{index, SliceRandom};
use rand::Rng as _;

use crate::error::{invalid, Result};
use crate::model::{Dims, Edge, StreamUpdate};
use crate::seed;
use crate::star::{GraphStream, GraphUpdate};
use crate::stream::{Stream, StreamMode};

/// A generated stream together with its planted center.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantedInstance {
    pub stream: Stream,
    pub center: u32,
}

/// One uniformly chosen A-vertex gets `d` distinct random neighbours, every
/// other A-vertex gets `background` of them; updates arrive shuffled.
pub fn gen_planted_star(n: u32, m: u32, d: u32, background: u32, seed: u64) -> Result<PlantedInstance> {
    gen_layered_star(n, m, d, 0, 0, background, seed)
}

/// Like [`gen_planted_star`], with `heavy_count` further vertices of degree
/// `heavy_degree`. Used to build instances with many moderately heavy vertices.
pub fn gen_layered_star(
    n: u32,
    m: u32,
    d: u32,
    heavy_count: u32,
    heavy_degree: u32,
    background: u32,
    seed: u64,
) -> Result<PlantedInstance> {
    let dims = Dims::new(n, m)?;
    if d == 0 || d > m {
        return Err(invalid(format!("need 1 <= d <= m, got d={d} m={m}")));
    }
    if background >= d {
        return Err(invalid(format!("background degree {background} must be below d={d}")));
    }
    if heavy_count >= n && heavy_count > 0 {
        return Err(invalid(format!("{heavy_count} heavy vertices do not fit beside the center")));
    }
    if heavy_degree > m {
        return Err(invalid(format!("heavy degree {heavy_degree} exceeds m={m}")));
    }
    let mut rng = seed::rng(seed);
    let order: Vec<u32> = index::sample(&mut rng, n as usize, n as usize)
        .into_iter()
        .map(|i| i as u32 + 1)
        .collect();
    let center = order[0];
    let mut edges = Vec::new();
    for (pos, &a) in order.iter().enumerate() {
        let degree = if pos == 0 {
            d
        } else if pos <= heavy_count as usize {
            heavy_degree
        } else {
            background
        };
        for b in index::sample(&mut rng, m as usize, degree as usize) {
            edges.push(Edge::new(a, b as u32 + 1));
        }
    }
    edges.shuffle(&mut rng);
    let mut stream = Stream::new(dims, StreamMode::InsertionOnly);
    for e in edges {
        stream.push(StreamUpdate::insert(e.a, e.b))?;
    }
    Ok(PlantedInstance { stream, center })
}

/// Interleaves `churn` transient edges into `base`: each is inserted and later
/// deleted, so the final graph is unchanged. Base updates keep their order.
pub fn with_churn(base: &Stream, churn: usize, seed: u64) -> Result<Stream> {
    let final_graph = base.replay()?;
    let dims = base.dims;
    let capacity = u64::from(dims.n) * u64::from(dims.m) - final_graph.edge_count() as u64;
    if churn as u64 > capacity {
        return Err(invalid(format!("no room for {churn} transient edges")));
    }
    let mut rng = seed::rng(seed);
    let mut transient = BTreeSet::new();
    let mut picked = Vec::with_capacity(churn);
    while picked.len() < churn {
        let e = Edge::new(rng.gen_range(1..=dims.n), rng.gen_range(1..=dims.m));
        if !final_graph.contains(e.a, e.b) && transient.insert(e) {
            picked.push(e);
        }
    }
    #[derive(Clone, Copy)]
    enum Slot {
        Base,
        Transient(usize),
    }
    let mut slots: Vec<Slot> = std::iter::repeat_n(Slot::Base, base.len()).collect();
    for k in 0..churn {
        slots.push(Slot::Transient(k));
        slots.push(Slot::Transient(k));
    }
    slots.shuffle(&mut rng);
    let mut out = Stream::new(dims, StreamMode::InsertionDeletion);
    let mut next_base = base.updates.iter();
    let mut inserted = vec![false; churn];
    for slot in slots {
        match slot {
            Slot::Base => out.push(*next_base.next().expect("one slot per base update"))?,
            Slot::Transient(k) => {
                let e = picked[k];
                if inserted[k] {
                    out.push(StreamUpdate::delete(e.a, e.b))?;
                } else {
                    inserted[k] = true;
                    out.push(StreamUpdate::insert(e.a, e.b))?;
                }
            }
        }
    }
    Ok(out)
}

/// A general graph on `n` vertices containing a star `K_{1,degree}` around a
/// uniformly chosen hub, edges shuffled. Returns the stream and the hub.
pub fn gen_star_graph(n: u32, degree: u32, seed: u64) -> Result<(GraphStream, u32)> {
    if n < 2 || degree == 0 || degree >= n {
        return Err(invalid(format!("need 1 <= degree < n, got degree={degree} n={n}")));
    }
    let mut rng = seed::rng(seed);
    let hub = rng.gen_range(1..=n);
    let mut leaves: Vec<u32> = index::sample(&mut rng, n as usize - 1, degree as usize)
        .into_iter()
        .map(|i| {
            let v = i as u32 + 1;
            if v >= hub {
                v + 1
            } else {
                v
            }
        })
        .collect();
    leaves.shuffle(&mut rng);
    let mut stream = GraphStream::new(n, StreamMode::InsertionOnly);
    for leaf in leaves {
        if rng.gen::<bool>() {
            stream.push(GraphUpdate::insert(hub, leaf))?;
        } else {
            stream.push(GraphUpdate::insert(leaf, hub))?;
        }
    }
    Ok((stream, hub))
}
