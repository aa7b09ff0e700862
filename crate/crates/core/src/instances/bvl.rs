//! Bit-vector-learning instances and their graph encoding.
//!
//! Party `i` holds the index set `X_i` (nested, `|X_i| = n^{1-(i-1)/(p-1)}`)
//! and a `k`-bit string `Y_i^j` for every `j` in `X_i`. It emits the edges
//!
//! ```text
//! (j, 2k(i-1) + 2(t-1) + Y_i^j[t] + 1)    for j in X_i, t in 1..=k
//! ```
//!
//! over `B = [2kp]`, so each B-column names a party, a bit position and a bit
//! value, and any neighbour of `j` reveals one bit of `Z^j = Y_1^j ... Y_p^j`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::index;
use rand::Rng as _;

use crate::error::{invalid, Error, Result};
use crate::model::{Dims, Neighbourhood, StreamUpdate};
use crate::seed;
use crate::stream::{Stream, StreamMode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BvlInstance {
    p: u32,
    n: u32,
    k: u32,
    /// `X_1..X_p`, each sorted.
    index_sets: Vec<Vec<u32>>,
    /// Per party, the strings `Y_i^j` keyed by `j`.
    strings: Vec<BTreeMap<u32, Vec<bool>>>,
}

impl BvlInstance {
    /// Random instance: `X_i` is a uniform subset of `X_{i-1}`, strings are
    /// uniform. Requires `n^{1/(p-1)}` to be an integer.
    pub fn random(p: u32, n: u32, k: u32, seed: u64) -> Result<Self> {
        let sizes = level_sizes(p, n)?;
        if k == 0 {
            return Err(invalid("k must be positive"));
        }
        let mut rng = seed::rng(seed);
        let mut index_sets: Vec<Vec<u32>> = vec![(1..=n).collect()];
        for &size in &sizes[1..] {
            let prev = index_sets.last().expect("X_1 is present");
            let mut next: Vec<u32> = index::sample(&mut rng, prev.len(), size as usize)
                .into_iter()
                .map(|i| prev[i])
                .collect();
            next.sort_unstable();
            index_sets.push(next);
        }
        let strings = index_sets
            .iter()
            .map(|set| {
                set.iter()
                    .map(|&j| (j, (0..k).map(|_| rng.gen::<bool>()).collect()))
                    .collect()
            })
            .collect();
        Ok(BvlInstance {
            p,
            n,
            k,
            index_sets,
            strings,
        })
    }

    /// Instance from explicit data; `strings[i]` maps each `j` in `X_{i+1}` to
    /// its `k`-bit string.
    pub fn from_parts(
        p: u32,
        n: u32,
        k: u32,
        index_sets: Vec<Vec<u32>>,
        strings: Vec<BTreeMap<u32, Vec<bool>>>,
    ) -> Result<Self> {
        let sizes = level_sizes(p, n)?;
        if index_sets.len() != p as usize || strings.len() != p as usize {
            return Err(invalid("need one index set and one string table per party"));
        }
        let mut index_sets = index_sets;
        for set in &mut index_sets {
            set.sort_unstable();
            set.dedup();
        }
        if index_sets[0] != (1..=n).collect::<Vec<_>>() {
            return Err(invalid("X_1 must be [n]"));
        }
        for i in 0..p as usize {
            if index_sets[i].len() != sizes[i] as usize {
                return Err(invalid(format!(
                    "|X_{}| = {} but should be {}",
                    i + 1,
                    index_sets[i].len(),
                    sizes[i]
                )));
            }
            if i > 0 && !index_sets[i].iter().all(|j| index_sets[i - 1].binary_search(j).is_ok()) {
                return Err(invalid(format!("X_{} is not a subset of X_{}", i + 1, i)));
            }
            let keys: Vec<u32> = strings[i].keys().copied().collect();
            if keys != index_sets[i] || strings[i].values().any(|s| s.len() != k as usize) {
                return Err(invalid(format!(
                    "party {} needs a {k}-bit string for exactly the indices in X_{}",
                    i + 1,
                    i + 1
                )));
            }
        }
        Ok(BvlInstance {
            p,
            n,
            k,
            index_sets,
            strings,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `X_i` for party `i` in `1..=p`.
    pub fn index_set(&self, party: u32) -> &[u32] {
        &self.index_sets[(party - 1) as usize]
    }

    /// `Y_i^j`, empty when `j` is not in `X_i`.
    pub fn string(&self, party: u32, j: u32) -> &[bool] {
        self.strings[(party - 1) as usize]
            .get(&j)
            .map_or(&[][..], Vec::as_slice)
    }

    /// `Z^j = Y_1^j ... Y_p^j`.
    pub fn z(&self, j: u32) -> Vec<bool> {
        (1..=self.p).flat_map(|i| self.string(i, j).iter().copied()).collect()
    }

    /// Number of parties holding index `j`.
    pub fn holders(&self, j: u32) -> u32 {
        self.strings.iter().filter(|t| t.contains_key(&j)).count() as u32
    }

    pub fn dims(&self) -> Result<Dims> {
        Dims::new(self.n, 2 * self.k * self.p)
    }

    /// Ground truth for round-trip checks:
    ///
    /// ```text
    /// # p=<p> n=<n> k=<k>
    /// X <i> <j> <j> ...
    /// Z <j> <bits>
    /// ```
    pub fn truth_text(&self) -> String {
        let mut out = format!("# p={} n={} k={}\n", self.p, self.n, self.k);
        for (i, set) in self.index_sets.iter().enumerate() {
            let _ = write!(out, "X {}", i + 1);
            for j in set {
                let _ = write!(out, " {j}");
            }
            out.push('\n');
        }
        for j in 1..=self.n {
            let _ = writeln!(out, "Z {j} {}", bits_to_string(&self.z(j)));
        }
        out
    }
}

/// `n_i = n^{1-(i-1)/(p-1)}` for `i = 1..=p`.
fn level_sizes(p: u32, n: u32) -> Result<Vec<u32>> {
    if p < 2 || n == 0 {
        return Err(invalid(format!("need p >= 2 and n >= 1, got p={p} n={n}")));
    }
    let root = integral_root(n, p - 1).ok_or_else(|| {
        Error::InvalidParameter(format!("n={n} is not a perfect {}-th power", p - 1))
    })?;
    Ok((1..=p).map(|i| root.pow(p - i)).collect())
}

fn integral_root(n: u32, e: u32) -> Option<u32> {
    let guess = f64::from(n).powf(1.0 / f64::from(e)).round() as u64;
    (guess.saturating_sub(1)..=guess + 1).find_map(|r| {
        (r.checked_pow(e) == Some(u64::from(n))).then_some(r as u32)
    })
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(invalid(format!("not a bit: {other:?}"))),
        })
        .collect()
}

/// B-column for bit `t` (1-based) with value `bit` held by party `i`.
pub fn bvl_column(k: u32, party: u32, t: u32, bit: bool) -> u32 {
    2 * k * (party - 1) + 2 * (t - 1) + u32::from(bit) + 1
}

/// One stream per party, in party order.
pub fn gen_bvl_graph(inst: &BvlInstance) -> Result<Vec<Stream>> {
    let dims = inst.dims()?;
    (1..=inst.p)
        .map(|i| {
            let mut stream = Stream::new(dims, StreamMode::InsertionOnly);
            for (&j, bits) in &inst.strings[(i - 1) as usize] {
                for (t, &bit) in bits.iter().enumerate() {
                    stream.push(StreamUpdate::insert(j, bvl_column(inst.k, i, t as u32 + 1, bit)))?;
                }
            }
            Ok(stream)
        })
        .collect()
}

/// A bit learnt from one witness column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct DecodedBit {
    pub party: u32,
    /// Position inside `Y_party`, 1-based.
    pub position: u32,
    pub bit: bool,
}

impl DecodedBit {
    /// Position inside `Z`, 1-based.
    pub fn z_position(&self, k: u32) -> u32 {
        k * (self.party - 1) + self.position
    }
}

/// Decodes every witness column of `nb` into the bit it encodes.
pub fn decode_bvl_witnesses(nb: &Neighbourhood, k: u32, p: u32) -> Result<(u32, Vec<DecodedBit>)> {
    let bound = 2 * k * p;
    let bits = nb
        .witnesses()
        .iter()
        .map(|&c| {
            if c == 0 || c > bound {
                return Err(Error::ColumnOutOfRange { column: c, bound });
            }
            let offset = c - 1;
            Ok(DecodedBit {
                party: offset / (2 * k) + 1,
                position: (offset % (2 * k)) / 2 + 1,
                bit: offset % 2 == 1,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((nb.center(), bits))
}

/// Rebuilds a bit string from decoded bits; `None` where a position was not
/// learnt. Length is `k` times the largest decoded party.
pub fn assemble_z(bits: &[DecodedBit], k: u32) -> Vec<Option<bool>> {
    let len = bits.iter().map(|b| b.party).max().unwrap_or(0) * k;
    let mut z = vec![None; len as usize];
    for b in bits {
        z[(b.z_position(k) - 1) as usize] = Some(b.bit);
    }
    z
}
