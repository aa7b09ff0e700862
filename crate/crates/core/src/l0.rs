//! l0-sampling over a turnstile vector.
//!
//! Each sampler keeps `reps` independent repetitions. A repetition hashes
//! every coordinate with a pairwise-independent function
//! `h(i) = (a*i + b) mod (2^61 - 1)` and assigns it to the nested levels
//! `0..=top(i)`, where level `l` admits coordinates with `h(i) < 2^(61-l)`, so
//! a coordinate reaches level `l` with probability about `2^-l`. Every level
//! is a one-sparse recovery cell holding
//!
//! * `count`: sum of updates,
//! * `index_sum`: sum of `delta * i`,
//! * `fingerprint`: sum of `delta * r^i` in the field of the smallest prime
//!   above `dim^3`.
//!
//! Sampling scans each repetition from its sparsest level down and returns
//! the first cell that verifies as one-sparse. All cells are linear in the
//! input, so two sketches built from the same seed can be merged cellwise.
//!
//! A [`L0Bank`] holds many samplers over the same coordinate space. The
//! samplers hash independently but share one fingerprint base per repetition,
//! which lets an update compute `r^i` once per repetition instead of once per
//! sampler.

use std::fmt::Write as _;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::insertion_only::ceil_log2;
use crate::seed;

const MERSENNE_61: u64 = (1 << 61) - 1;

/// Largest supported `dim^3`, keeping the fingerprint field below `2^63`.
const MAX_DIM_CUBED: u128 = 1 << 62;

/// Shape of one sampler: coordinate space, level count, repetitions and field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct L0Params {
    pub dim: u64,
    pub levels: usize,
    pub reps: usize,
    pub field: u64,
}

impl L0Params {
    pub fn new(dim: u64, delta: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("sketch dimension must be positive".into()));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "sampler failure probability {delta} outside (0, 1)"
            )));
        }
        let cubed = u128::from(dim).pow(3);
        if cubed >= MAX_DIM_CUBED {
            return Err(Error::DimensionTooLarge(dim));
        }
        Ok(L0Params {
            dim,
            levels: levels_for(dim),
            reps: repetitions_for(delta),
            field: next_prime_above(cubed as u64),
        })
    }

    /// Cells per sampler, `reps * levels`.
    pub fn cells(&self) -> usize {
        self.reps * self.levels
    }

    /// Machine words per sampler; each cell stores three.
    pub fn words(&self) -> usize {
        3 * self.cells()
    }
}

/// `ceil(log2 dim) + 1`.
pub fn levels_for(dim: u64) -> usize {
    ceil_log2(dim) as usize + 1
}

/// `ceil(ln(1/delta))`, at least 1.
pub fn repetitions_for(delta: f64) -> usize {
    ((1.0 / delta).ln().ceil() as usize).max(1)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Cell {
    pub count: i64,
    pub index_sum: i64,
    pub fingerprint: u64,
}

impl Cell {
    fn is_zero(&self) -> bool {
        *self == Cell::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum L0Sample {
    Coordinate(u64),
    /// The vector is zero.
    Empty,
    /// No level verified as one-sparse.
    Fail,
}

/// A set of independent l0-samplers over one coordinate space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct L0Bank {
    params: L0Params,
    samplers: usize,
    /// `(a, b)` per sampler and repetition, index `sampler * reps + rep`.
    hashes: Vec<(u64, u64)>,
    /// Fingerprint base `r` per repetition.
    bases: Vec<u64>,
    cells: Vec<Cell>,
}

impl L0Bank {
    pub fn new(dim: u64, delta: f64, samplers: usize, seed: u64) -> Result<Self> {
        let params = L0Params::new(dim, delta)?;
        let mut rng = seed::rng(seed);
        let bases = (0..params.reps)
            .map(|_| rng.gen_range(1..params.field))
            .collect();
        let hashes = (0..samplers * params.reps)
            .map(|_| (rng.gen_range(0..MERSENNE_61), rng.gen_range(0..MERSENNE_61)))
            .collect();
        Ok(L0Bank {
            params,
            samplers,
            hashes,
            bases,
            cells: vec![Cell::default(); samplers * params.cells()],
        })
    }

    pub fn params(&self) -> &L0Params {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.samplers
    }

    pub fn is_empty(&self) -> bool {
        self.samplers == 0
    }

    /// Total number of cells across all samplers.
    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    /// Adds `delta` (either +1 or -1) at `coordinate` in every sampler.
    pub fn update(&mut self, coordinate: u64, delta: i64) -> Result<()> {
        self.update_batch(&[(coordinate, delta)])
    }

    /// Applies a run of `(coordinate, delta)` updates. The result equals
    /// applying them one by one; the batch is checked before any cell changes.
    pub fn update_batch(&mut self, updates: &[(u64, i64)]) -> Result<()> {
        let field = self.params.field;
        let reps = self.params.reps;
        let levels = self.params.levels;
        for &(coordinate, delta) in updates {
            if coordinate >= self.params.dim {
                return Err(Error::CoordinateOutOfRange {
                    coordinate,
                    dim: self.params.dim,
                });
            }
            if delta != 1 && delta != -1 {
                return Err(Error::InvalidParameter(format!("update weight {delta} is not +1 or -1")));
            }
        }
        // terms[rep * len + u] = delta_u * r_rep^coordinate_u
        let mut terms = Vec::with_capacity(reps * updates.len());
        for &base in &self.bases {
            terms.extend(updates.iter().map(|&(coordinate, delta)| {
                let power = pow_mod(base, coordinate, field);
                if delta > 0 {
                    power
                } else {
                    field - power
                }
            }));
        }
        // Sampler-major order keeps each row in cache across the batch. Long
        // batches first bucket every update by its deepest level, then add
        // suffix sums, which gives the same cells without a branchy inner loop.
        let bucketed = updates.len() >= 8;
        let mut exact = vec![Cell::default(); levels];
        for (slot, (&(a, b), row)) in self.hashes.iter().zip(self.cells.chunks_exact_mut(levels)).enumerate() {
            let rep_terms = &terms[(slot % reps) * updates.len()..][..updates.len()];
            if bucketed {
                exact.fill(Cell::default());
                for (&(coordinate, delta), &term) in updates.iter().zip(rep_terms) {
                    let top = top_level(hash61(a, b, coordinate)).min(levels - 1);
                    let bucket = &mut exact[top];
                    bucket.count += delta;
                    bucket.index_sum += delta * coordinate as i64;
                    bucket.fingerprint = add_mod(bucket.fingerprint, term, field);
                }
                let mut suffix = Cell::default();
                for (cell, bucket) in row.iter_mut().zip(&exact).rev() {
                    suffix.count += bucket.count;
                    suffix.index_sum += bucket.index_sum;
                    suffix.fingerprint = add_mod(suffix.fingerprint, bucket.fingerprint, field);
                    cell.count += suffix.count;
                    cell.index_sum += suffix.index_sum;
                    cell.fingerprint = add_mod(cell.fingerprint, suffix.fingerprint, field);
                }
            } else {
                for (&(coordinate, delta), &term) in updates.iter().zip(rep_terms) {
                    let top = top_level(hash61(a, b, coordinate)).min(levels - 1);
                    let weighted = delta * coordinate as i64;
                    for cell in &mut row[..=top] {
                        cell.count += delta;
                        cell.index_sum += weighted;
                        cell.fingerprint = add_mod(cell.fingerprint, term, field);
                    }
                }
            }
        }
        Ok(())
    }

    /// Draws from sampler `index`.
    pub fn sample(&self, index: usize) -> L0Sample {
        let levels = self.params.levels;
        let reps = self.params.reps;
        let block = &self.cells[index * reps * levels..(index + 1) * reps * levels];
        if block[0].is_zero() {
            return L0Sample::Empty;
        }
        for rep in 0..reps {
            let row = &block[rep * levels..(rep + 1) * levels];
            for cell in row.iter().rev() {
                if let Some(i) = self.recover(cell, rep) {
                    return L0Sample::Coordinate(i);
                }
            }
        }
        L0Sample::Fail
    }

    /// One-sparse recovery with fingerprint verification.
    fn recover(&self, cell: &Cell, rep: usize) -> Option<u64> {
        if cell.count == 0 || cell.index_sum % cell.count != 0 {
            return None;
        }
        let i = cell.index_sum / cell.count;
        if i < 0 || i as u64 >= self.params.dim {
            return None;
        }
        let field = self.params.field;
        let count = cell.count.rem_euclid(field as i64) as u64;
        let expected = mul_mod(count, pow_mod(self.bases[rep], i as u64, field), field);
        (expected == cell.fingerprint).then_some(i as u64)
    }

    /// Cellwise sum with a bank built from the same parameters and seed.
    pub fn merge(&mut self, other: &L0Bank) -> Result<()> {
        if self.params != other.params
            || self.samplers != other.samplers
            || self.hashes != other.hashes
            || self.bases != other.bases
        {
            return Err(Error::IncompatibleSketch);
        }
        let field = self.params.field;
        for (mine, theirs) in self.cells.iter_mut().zip(&other.cells) {
            mine.count += theirs.count;
            mine.index_sum += theirs.index_sum;
            mine.fingerprint = add_mod(mine.fingerprint, theirs.fingerprint, field);
        }
        Ok(())
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn is_zero(&self) -> bool {
        self.cells.iter().all(Cell::is_zero)
    }

    /// Text dump of the nonzero cells:
    ///
    /// ```text
    /// # l0 dim=<dim> levels=<levels> reps=<reps> field=<prime> samplers=<count>
    /// <sampler> <rep> <level> <count> <index_sum> <fingerprint>
    /// ```
    pub fn dump(&self) -> String {
        let p = &self.params;
        let mut out = format!(
            "# l0 dim={} levels={} reps={} field={} samplers={}\n",
            p.dim, p.levels, p.reps, p.field, self.samplers
        );
        for (k, cell) in self.cells.iter().enumerate() {
            if cell.is_zero() {
                continue;
            }
            let level = k % p.levels;
            let rep = (k / p.levels) % p.reps;
            let sampler = k / p.cells();
            let _ = writeln!(
                out,
                "{sampler} {rep} {level} {} {} {}",
                cell.count, cell.index_sum, cell.fingerprint
            );
        }
        out
    }
}

/// A single l0-sampler.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct L0Sketch {
    bank: L0Bank,
}

impl L0Sketch {
    pub fn new(dim: u64, delta: f64, seed: u64) -> Result<Self> {
        Ok(L0Sketch {
            bank: L0Bank::new(dim, delta, 1, seed)?,
        })
    }

    pub fn update(&mut self, coordinate: u64, delta: i64) -> Result<()> {
        self.bank.update(coordinate, delta)
    }

    pub fn sample(&self) -> L0Sample {
        self.bank.sample(0)
    }

    pub fn merge(&mut self, other: &L0Sketch) -> Result<()> {
        self.bank.merge(&other.bank)
    }

    pub fn params(&self) -> &L0Params {
        self.bank.params()
    }

    pub fn cells(&self) -> &[Cell] {
        self.bank.cells()
    }

    pub fn is_zero(&self) -> bool {
        self.bank.is_zero()
    }

    pub fn dump(&self) -> String {
        self.bank.dump()
    }
}

fn hash61(a: u64, b: u64, x: u64) -> u64 {
    let v = u128::from(a) * u128::from(x) + u128::from(b);
    let folded = (v & u128::from(MERSENNE_61)) + (v >> 61);
    let folded = (folded & u128::from(MERSENNE_61)) + (folded >> 61);
    let h = folded as u64;
    if h >= MERSENNE_61 {
        h - MERSENNE_61
    } else {
        h
    }
}

/// Deepest level admitting a coordinate with hash `h < 2^61`.
fn top_level(h: u64) -> usize {
    (h.leading_zeros() - 3) as usize
}

#[inline(always)]
fn add_mod(x: u64, y: u64, q: u64) -> u64 {
    let s = x + y;
    s - q * u64::from(s >= q)
}

fn mul_mod(x: u64, y: u64, q: u64) -> u64 {
    ((u128::from(x) * u128::from(y)) % u128::from(q)) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc = 1 % q;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, q);
        }
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `x`.
pub fn next_prime_above(x: u64) -> u64 {
    let mut candidate = x + 1;
    while !is_prime(candidate) {
        candidate += 1;
    }
    candidate
}
