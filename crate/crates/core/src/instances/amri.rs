//! Augmented matrix row index as an insert/delete stream.
//!
//! Alice inserts the 1-entries of her `n x m` matrix (rows are A-vertices,
//! columns B-vertices) after permuting each row with its own permutation.
//! Bob, who knows `m - k` entries of every row except the target row `J`,
//! deletes the 1-entries among them. With `m = 2d` and `k = d/alpha - 1`,
//! every row except `J` ends with at most `d/alpha - 1` edges while row `J`
//! keeps all of its ones, so any `alpha`-approximate neighbourhood is
//! centered at `J`. When row `J` has fewer than `d` ones the protocol runs on
//! the bit-inverted matrix instead.

use rand::seq::{index, SliceRandom};
use rand::Rng as _;

use crate::error::{invalid, Result};
use crate::model::{Dims, StreamUpdate};
use crate::seed;
use crate::stream::{Stream, StreamMode};

/// Hidden constant in the `Θ(alpha log n)` repetition count.
pub const REPETITION_CONSTANT: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmriInstance {
    n: u32,
    m: u32,
    k: u32,
    matrix: Vec<Vec<bool>>,
    target: u32,
    /// Bob's known columns per row, 1-based and sorted; `None` for row `J`.
    known: Vec<Option<Vec<u32>>>,
    /// `permutations[i][j-1]` is the image of column `j` in row `i+1`.
    permutations: Vec<Vec<u32>>,
    invert: bool,
}

impl AmriInstance {
    /// Uniform matrix, target row and known sets; identity permutations.
    /// Inversion is switched on when row `J` has fewer than `m/2` ones.
    pub fn random(n: u32, m: u32, k: u32, seed: u64) -> Result<Self> {
        if k > m {
            return Err(invalid(format!("k={k} exceeds m={m}")));
        }
        Dims::new(n, m)?;
        let mut rng = seed::rng(seed);
        let matrix: Vec<Vec<bool>> = (0..n)
            .map(|_| (0..m).map(|_| rng.gen::<bool>()).collect())
            .collect();
        let target = rng.gen_range(1..=n);
        let known = (1..=n)
            .map(|i| {
                (i != target).then(|| {
                    let mut cols: Vec<u32> = index::sample(&mut rng, m as usize, (m - k) as usize)
                        .into_iter()
                        .map(|c| c as u32 + 1)
                        .collect();
                    cols.sort_unstable();
                    cols
                })
            })
            .collect();
        let ones = matrix[(target - 1) as usize].iter().filter(|&&b| b).count() as u32;
        let invert = 2 * ones < m;
        Self::from_parts(matrix, target, k, known, invert)
    }

    pub fn from_parts(
        matrix: Vec<Vec<bool>>,
        target: u32,
        k: u32,
        known: Vec<Option<Vec<u32>>>,
        invert: bool,
    ) -> Result<Self> {
        let n = matrix.len() as u32;
        let m = matrix.first().map_or(0, |r| r.len() as u32);
        Dims::new(n, m)?;
        if matrix.iter().any(|r| r.len() as u32 != m) {
            return Err(invalid("matrix rows differ in length"));
        }
        if target == 0 || target > n {
            return Err(invalid(format!("target row {target} outside [1, {n}]")));
        }
        if known.len() != n as usize {
            return Err(invalid("need one known-position entry per row"));
        }
        let mut known = known;
        for (i, entry) in known.iter_mut().enumerate() {
            let row = i as u32 + 1;
            match entry {
                None if row == target => {}
                Some(cols) if row != target => {
                    cols.sort_unstable();
                    cols.dedup();
                    if cols.len() as u32 != m - k || cols.iter().any(|&c| c == 0 || c > m) {
                        return Err(invalid(format!(
                            "row {row} needs {} distinct known columns in [1, {m}]",
                            m - k
                        )));
                    }
                }
                _ => return Err(invalid(format!("known positions must be absent exactly for row {target}"))),
            }
        }
        Ok(AmriInstance {
            n,
            m,
            k,
            matrix,
            target,
            known,
            permutations: (0..n).map(|_| (1..=m).collect()).collect(),
            invert,
        })
    }

    /// Replaces the row permutations with fresh uniform ones.
    pub fn with_random_permutations(mut self, seed: u64) -> Self {
        let mut rng = seed::rng(seed);
        for perm in &mut self.permutations {
            perm.shuffle(&mut rng);
        }
        self
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn target(&self) -> u32 {
        self.target
    }

    pub fn inverted(&self) -> bool {
        self.invert
    }

    pub fn known(&self, row: u32) -> Option<&[u32]> {
        self.known[(row - 1) as usize].as_deref()
    }

    /// Entry of the matrix the stream encodes (inverted if requested).
    pub fn effective(&self, row: u32, col: u32) -> bool {
        self.matrix[(row - 1) as usize][(col - 1) as usize] ^ self.invert
    }

    pub fn row(&self, row: u32) -> &[bool] {
        &self.matrix[(row - 1) as usize]
    }

    pub fn ones_in_effective_row(&self, row: u32) -> u32 {
        (1..=self.m).filter(|&c| self.effective(row, c)).count() as u32
    }

    /// Image of column `col` of row `row` under its permutation.
    pub fn permute(&self, row: u32, col: u32) -> u32 {
        self.permutations[(row - 1) as usize][(col - 1) as usize]
    }

    /// Inverse of [`AmriInstance::permute`].
    pub fn unpermute(&self, row: u32, permuted: u32) -> Option<u32> {
        self.permutations[(row - 1) as usize]
            .iter()
            .position(|&c| c == permuted)
            .map(|j| j as u32 + 1)
    }
}

/// Split of the generated stream into its two phases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmriStream {
    pub stream: Stream,
    /// Number of leading updates produced by Alice; the rest are Bob's.
    pub alice_len: usize,
}

/// `m = 2d`, `k = d/alpha - 1`, and row `J` of the effective matrix must have
/// at least `d` ones.
pub fn gen_amri_stream(inst: &AmriInstance, alpha: u32) -> Result<AmriStream> {
    if alpha == 0 || !inst.m.is_multiple_of(2) {
        return Err(invalid(format!("need alpha >= 1 and even m, got alpha={alpha} m={}", inst.m)));
    }
    let d = inst.m / 2;
    if !d.is_multiple_of(alpha) || inst.k + 1 != d / alpha {
        return Err(invalid(format!(
            "k={} must equal d/alpha - 1 with d={d} alpha={alpha}",
            inst.k
        )));
    }
    if inst.ones_in_effective_row(inst.target) < d {
        return Err(invalid(format!(
            "row {} has fewer than d={d} ones; set inversion",
            inst.target
        )));
    }
    let mut stream = Stream::new(Dims::new(inst.n, inst.m)?, StreamMode::InsertionDeletion);
    for row in 1..=inst.n {
        for col in 1..=inst.m {
            if inst.effective(row, col) {
                stream.push(StreamUpdate::insert(row, inst.permute(row, col)))?;
            }
        }
    }
    let alice_len = stream.len();
    for row in 1..=inst.n {
        let Some(cols) = inst.known(row) else { continue };
        for &col in cols {
            if inst.effective(row, col) {
                stream.push(StreamUpdate::delete(row, inst.permute(row, col)))?;
            }
        }
    }
    Ok(AmriStream { stream, alice_len })
}

/// `ceil(8 * alpha * ln n)` protocol repetitions, at least 1.
pub fn amri_repetitions(alpha: u32, n: u32) -> usize {
    ((REPETITION_CONSTANT * f64::from(alpha) * f64::from(n).ln()).ceil() as usize).max(1)
}
