//! Classical solvers for learning parity with noise.

use std::ops::Range;

use crate::error::{check_capacity, invalid, Error, Result};
use crate::gf2::BitString;
use crate::learners::LearnerReport;
use crate::oracle::{ClassicalExample, ClassicalSource};

/// Largest `n` for exhaustive maximum-likelihood decoding.
pub const MAX_BRUTEFORCE_N: usize = 24;

/// Largest BKW block; bucket tables hold `2^width` entries.
const MAX_BLOCK_WIDTH: usize = 24;

/// Number of examples whose label disagrees with `⟨candidate, x⟩`.
pub fn disagreements(candidate: &BitString, examples: &[ClassicalExample]) -> usize {
    examples
        .iter()
        .filter(|ex| candidate.parity_with(&ex.x) != ex.y)
        .count()
}

/// Maximum-likelihood estimate over all `2^n` candidates.
///
/// For `eta_prime < 1/2` this is the candidate with the fewest disagreements,
/// for `eta_prime > 1/2` the one with the most. Ties go to the
/// lexicographically smallest string. The disagreement counts of every
/// candidate come from one Walsh-Hadamard transform of the signed label
/// table, `Σ_i (−1)^{y_i ⊕ ⟨c, x_i⟩} = m − 2·disagreements(c)`.
pub fn learn_lpn_bruteforce(examples: &[ClassicalExample], eta_prime: f64) -> Result<BitString> {
    let first = examples
        .first()
        .ok_or_else(|| invalid("maximum-likelihood decoding needs at least one example"))?;
    let n = first.x.len();
    check_capacity("brute-force LPN", n, MAX_BRUTEFORCE_N)?;
    if eta_prime == 0.5 {
        return Err(Error::NoInformation);
    }
    if !(0.0..=1.0).contains(&eta_prime) {
        return Err(invalid(format!("eta' = {eta_prime} outside [0, 1]")));
    }
    if examples.len() >= i32::MAX as usize {
        return Err(invalid("too many examples for the correlation table"));
    }
    let mut table = vec![0i32; 1 << n];
    for ex in examples {
        if ex.x.len() != n {
            return Err(invalid("examples of different widths"));
        }
        table[ex.x.to_index() as usize] += if ex.y { -1 } else { 1 };
    }
    walsh_hadamard(&mut table);
    // Most agreement for eta' < 1/2, least for eta' > 1/2. `max_by_key`
    // keeps the last maximum, so scan from the top index down.
    let sign = if eta_prime < 0.5 { 1 } else { -1 };
    let best = (0..table.len())
        .rev()
        .max_by_key(|&c| sign * table[c])
        .expect("nonempty table");
    Ok(BitString::from_index(n, best as u64))
}

/// In-place unnormalized Walsh-Hadamard transform.
fn walsh_hadamard(v: &mut [i32]) {
    let mut h = 1;
    while h < v.len() {
        for chunk in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = chunk.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BkwOutcome {
    Recovered(LearnerReport),
    /// The sample budget ran out before every bit had enough votes.
    Failure {
        samples_used: u64,
    },
}

/// Blockwise xor-reduction (BKW) for LPN.
///
/// Coordinates are split into `block_count` contiguous blocks. To recover the
/// bits of a target block, every other block is zeroed in turn by bucketing
/// the samples on that block's value and xoring each sample into the first
/// one seen in its bucket (which is then dropped). Surviving samples whose
/// register is a unit vector `e_j` carry a noisy copy of `a_j`, settled by
/// majority.
///
/// A bit needs enough votes for the majority to be reliable at the worst-case
/// noise after `block_count − 1` xor levels, bias `(1−2η′)^{2^{block_count−1}}`.
/// The sample pool starts near the size that makes this likely and doubles up
/// to `sample_budget`; past that the solver reports [`BkwOutcome::Failure`].
pub fn learn_lpn_bkw<S>(
    oracle: &mut S,
    eta_prime: f64,
    block_count: usize,
    sample_budget: u64,
) -> Result<BkwOutcome>
where
    S: ClassicalSource + ?Sized,
{
    let n = oracle.n();
    if !(0.0..0.5).contains(&eta_prime) {
        return Err(invalid(format!(
            "BKW needs eta' in [0, 1/2), got {eta_prime}"
        )));
    }
    if block_count == 0 || block_count > n {
        return Err(invalid(format!("block count {block_count} for n = {n}")));
    }
    if sample_budget == 0 {
        return Err(invalid("sample budget must be positive"));
    }
    let blocks = partition(n, block_count);
    let widest = blocks.iter().map(|b| b.len()).max().unwrap_or(0);
    if widest > MAX_BLOCK_WIDTH {
        return Err(invalid(format!(
            "block width {widest} exceeds {MAX_BLOCK_WIDTH}; use more blocks"
        )));
    }
    let min_votes = required_votes(n, eta_prime, block_count);
    let start = ((2 * min_votes + block_count as u64) << widest).min(sample_budget);

    let mut pool = Pool::new(n);
    let mut target_size = start;
    loop {
        while (pool.len() as u64) < target_size {
            let ex = oracle.draw();
            pool.push(&ex.x, ex.y);
        }
        if let Some((a_hat, votes)) = solve_all_blocks(&pool, &blocks, min_votes) {
            return Ok(BkwOutcome::Recovered(LearnerReport {
                a_hat,
                queries_used: pool.len() as u64,
                retained: votes,
                succeeded_selfcheck: true,
            }));
        }
        if target_size >= sample_budget {
            return Ok(BkwOutcome::Failure {
                samples_used: pool.len() as u64,
            });
        }
        target_size = target_size.saturating_mul(2).min(sample_budget);
    }
}

/// Votes per bit so that, by Hoeffding, a majority at bias `ε` errs with
/// probability at most `0.05/n`: `2·ln(20n)/ε²`.
fn required_votes(n: usize, eta_prime: f64, block_count: usize) -> u64 {
    if eta_prime == 0.0 {
        return 1;
    }
    let levels = (block_count - 1) as i32;
    let bias = (1.0 - 2.0 * eta_prime).powi(1 << levels);
    let votes = 2.0 * (20.0 * n as f64).ln() / (bias * bias);
    (votes.ceil() as u64).max(1)
}

fn partition(n: usize, count: usize) -> Vec<Range<usize>> {
    let base = n / count;
    let extra = n % count;
    let mut start = 0;
    (0..count)
        .map(|i| {
            let len = base + usize::from(i < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}

fn solve_all_blocks(
    pool: &Pool,
    blocks: &[Range<usize>],
    min_votes: u64,
) -> Option<(BitString, u64)> {
    let n = pool.width;
    let mut a_hat = BitString::zeros(n);
    let mut total_votes = 0;
    for (t, target) in blocks.iter().enumerate() {
        let mut reduced = pool.clone();
        for (r, block) in blocks.iter().enumerate() {
            if r != t {
                reduced = reduced.zero_block(block);
            }
        }
        let width = target.len();
        let mut votes = vec![0u64; width];
        let mut ones = vec![0u64; width];
        for i in 0..reduced.len() {
            let v = reduced.block_value(i, target);
            if v.is_power_of_two() {
                let j = v.trailing_zeros() as usize;
                votes[j] += 1;
                ones[j] += reduced.labels[i] as u64;
            }
        }
        if votes.iter().any(|&v| v < min_votes) {
            return None;
        }
        for j in 0..width {
            a_hat.set(target.start + j, 2 * ones[j] > votes[j]);
        }
        total_votes += votes.iter().sum::<u64>();
    }
    Some((a_hat, total_votes))
}

/// Row-major packed sample matrix with labels.
#[derive(Debug, Clone)]
struct Pool {
    width: usize,
    stride: usize,
    words: Vec<u64>,
    labels: Vec<bool>,
}

impl Pool {
    fn new(width: usize) -> Self {
        Self {
            width,
            stride: width.div_ceil(64),
            words: Vec::new(),
            labels: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.labels.len()
    }

    fn push(&mut self, x: &BitString, y: bool) {
        self.words.extend_from_slice(x.words());
        self.labels.push(y);
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.words[i * self.stride..(i + 1) * self.stride]
    }

    /// Bits `range` of row `i`, first bit of the range in the lowest position.
    fn block_value(&self, i: usize, range: &Range<usize>) -> u64 {
        let row = self.row(i);
        let mut v = 0u64;
        let mut filled = 0;
        let mut pos = range.start;
        while pos < range.end {
            let (w, off) = (pos / 64, pos % 64);
            let take = (64 - off).min(range.end - pos);
            let chunk = (row[w] >> off) & low_mask(take);
            v |= chunk << filled;
            filled += take;
            pos += take;
        }
        v
    }

    /// One BKW level: the samples that survive with `block` zeroed.
    fn zero_block(&self, block: &Range<usize>) -> Pool {
        const EMPTY: u32 = u32::MAX;
        let mut buckets = vec![EMPTY; 1 << block.len()];
        let mut out = Pool::new(self.width);
        out.words.reserve(self.words.len());
        out.labels.reserve(self.len());
        for i in 0..self.len() {
            let v = self.block_value(i, block) as usize;
            if v == 0 {
                out.words.extend_from_slice(self.row(i));
                out.labels.push(self.labels[i]);
                continue;
            }
            match buckets[v] {
                EMPTY => buckets[v] = i as u32,
                rep => {
                    let rep = rep as usize;
                    let (row, rep_row) = (self.row(i), self.row(rep));
                    out.words
                        .extend(row.iter().zip(rep_row).map(|(a, b)| a ^ b));
                    out.labels.push(self.labels[i] ^ self.labels[rep]);
                }
            }
        }
        out
    }
}

#[inline]
fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}
