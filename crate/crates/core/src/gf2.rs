//! Bit-packed linear algebra over GF(2).
//!
//! Bit `i` of a [`BitString`] (zero based) is the coordinate usually written
//! `a_{i+1}`. Text renders bit 0 first, and the integer index of a string
//! ([`BitString::to_index`]) puts bit 0 in the most significant position, so
//! lexicographic order on text and numeric order on indices agree.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::rng::RandomStream;
use crate::scalar::{lit, Real};

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    len: usize,
    // Bits past `len` in the last word are always zero.
    words: Vec<u64>,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut s = Self {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        s.mask_tail();
        s
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for bit in bits {
            if len % WORD == 0 {
                words.push(0);
            }
            if bit {
                words[len / WORD] |= 1 << (len % WORD);
            }
            len += 1;
        }
        Self { len, words }
    }

    /// The string whose integer index (bit 0 most significant) is `index`.
    pub fn from_index(len: usize, index: u64) -> Self {
        debug_assert!(len <= 64);
        debug_assert!(len == 64 || index >> len == 0);
        Self::from_bits((0..len).map(|i| (index >> (len - 1 - i)) & 1 == 1))
    }

    /// Integer index with bit 0 most significant. Only for `len <= 64`.
    pub fn to_index(&self) -> u64 {
        assert!(self.len <= 64, "index form needs len <= 64");
        (0..self.len).fold(0u64, |acc, i| (acc << 1) | self.get(i) as u64)
    }

    /// Unit vector with bit `i` set.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut s = Self::zeros(len);
        s.set(i, true);
        s
    }

    pub fn random(len: usize, rng: &mut RandomStream) -> Self {
        let mut s = Self::zeros(len);
        s.fill_random(rng);
        s
    }

    /// Independent Bernoulli(`p`) bits.
    pub fn bernoulli(len: usize, p: f64, rng: &mut RandomStream) -> Self {
        let mut s = Self::zeros(len);
        s.fill_bernoulli(p, rng);
        s
    }

    pub fn fill_random(&mut self, rng: &mut RandomStream) {
        for w in &mut self.words {
            *w = rand::RngCore::next_u64(rng);
        }
        self.mask_tail();
    }

    pub fn fill_bernoulli(&mut self, p: f64, rng: &mut RandomStream) {
        for w in &mut self.words {
            *w = rng.bernoulli_word(p);
        }
        self.mask_tail();
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / WORD] ^= 1 << (i % WORD);
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Indices of set bits in increasing order.
    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let tz = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(k * WORD + tz)
                }
            })
        })
    }

    /// `self ^= other`. Panics on length mismatch.
    #[inline]
    pub fn xor_assign(&mut self, other: &BitString) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w ^= o;
        }
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        check_len(self, other)?;
        let mut out = self.clone();
        out.xor_assign(other);
        Ok(out)
    }

    /// Inner product mod 2. Panics on length mismatch; see [`dot`] for the checked form.
    #[inline]
    pub fn parity_with(&self, other: &BitString) -> bool {
        assert_eq!(self.len, other.len, "length mismatch");
        let acc = self
            .words
            .iter()
            .zip(&other.words)
            .fold(0u64, |acc, (a, b)| acc ^ (a & b));
        acc.count_ones() & 1 == 1
    }

    pub fn copy_from(&mut self, other: &BitString) {
        assert_eq!(self.len, other.len, "length mismatch");
        self.words.copy_from_slice(&other.words);
    }

    fn mask_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

fn check_len(a: &BitString, b: &BitString) -> Result<()> {
    if a.len() != b.len() {
        return Err(invalid(format!(
            "bit strings of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(invalid("empty bit string"));
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(invalid(format!(
                    "unexpected character {other:?} in bit string"
                ))),
            })
            .collect::<Result<Vec<bool>>>()
            .map(BitString::from_bits)
    }
}

/// `⟨a, x⟩ mod 2`.
pub fn dot(a: &BitString, x: &BitString) -> Result<bool> {
    check_len(a, x)?;
    Ok(a.parity_with(x))
}

pub fn hamming_weight(a: &BitString) -> usize {
    a.weight()
}

/// Rows `(x, y)` of a linear system `⟨a, x⟩ = y` over GF(2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2System {
    width: usize,
    rows: Vec<(BitString, bool)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    Unique(BitString),
    Underdetermined,
    Inconsistent,
}

impl Gf2System {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            rows: Vec::new(),
        }
    }

    pub fn with_rows<I>(width: usize, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BitString, bool)>,
    {
        let mut sys = Self::new(width);
        for (x, y) in rows {
            sys.push(x, y)?;
        }
        Ok(sys)
    }

    pub fn push(&mut self, x: BitString, y: bool) -> Result<()> {
        if x.len() != self.width {
            return Err(invalid(format!(
                "row of width {} in a system of width {}",
                x.len(),
                self.width
            )));
        }
        self.rows.push((x, y));
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows(&self) -> &[(BitString, bool)] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rank(&self) -> usize {
        Echelon::reduce(self).rank
    }

    pub fn solve(&self) -> Solution {
        let ech = Echelon::reduce(self);
        // Rows below the rank have all-zero coefficients.
        if ech.labels[ech.rank..].iter().any(|&y| y) {
            return Solution::Inconsistent;
        }
        if ech.rank < self.width {
            return Solution::Underdetermined;
        }
        // Full rank and reduced: row i has its single pivot in column i.
        Solution::Unique(BitString::from_bits(
            ech.labels[..self.width].iter().copied(),
        ))
    }
}

/// Reduced row echelon form of the augmented matrix, packed row-major.
struct Echelon {
    rank: usize,
    labels: Vec<bool>,
}

impl Echelon {
    fn reduce(sys: &Gf2System) -> Self {
        let stride = words_for(sys.width);
        let mut mat: Vec<u64> = Vec::with_capacity(stride * sys.rows.len());
        let mut labels: Vec<bool> = Vec::with_capacity(sys.rows.len());
        for (x, y) in &sys.rows {
            mat.extend_from_slice(x.words());
            labels.push(*y);
        }
        let nrows = labels.len();
        let mut rank = 0;
        for col in 0..sys.width {
            if rank == nrows {
                break;
            }
            let (wi, mask) = (col / WORD, 1u64 << (col % WORD));
            // Lowest-index row at or below `rank` with this column set.
            let Some(pivot) = (rank..nrows).find(|&r| mat[r * stride + wi] & mask != 0) else {
                continue;
            };
            if pivot != rank {
                for k in 0..stride {
                    mat.swap(pivot * stride + k, rank * stride + k);
                }
                labels.swap(pivot, rank);
            }
            let (head, tail) = mat.split_at_mut(rank * stride);
            let (prow, tail) = tail.split_at_mut(stride);
            let plabel = labels[rank];
            let eliminate = |row: &mut [u64], label: &mut bool| {
                if row[wi] & mask != 0 {
                    // Columns before `wi` are already zero in the pivot row.
                    for k in wi..stride {
                        row[k] ^= prow[k];
                    }
                    *label ^= plabel;
                }
            };
            let (lhead, ltail) = labels.split_at_mut(rank);
            for (row, label) in head.chunks_exact_mut(stride).zip(lhead.iter_mut()) {
                eliminate(row, label);
            }
            for (row, label) in tail.chunks_exact_mut(stride).zip(ltail[1..].iter_mut()) {
                eliminate(row, label);
            }
            rank += 1;
        }
        Self { rank, labels }
    }
}

pub fn rank(sys: &Gf2System) -> usize {
    sys.rank()
}

pub fn solve(sys: &Gf2System) -> Solution {
    sys.solve()
}

/// Probability that `n` uniform vectors in GF(2)^n are linearly independent,
/// `∏_{j=0}^{n-1} (1 - 2^{j-n})`.
pub fn independence_probability<T: Real>(n: usize) -> T {
    let two: T = lit(2.0);
    (0..n).fold(T::one(), |acc, j| {
        let exponent = j as i32 - n as i32;
        acc * (T::one() - two.powi(exponent))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn system(width: usize, rows: &[(&str, u8)]) -> Gf2System {
        Gf2System::with_rows(width, rows.iter().map(|&(x, y)| (bs(x), y == 1))).unwrap()
    }

    #[test]
    fn dot_examples() {
        assert!(!dot(&bs("000"), &bs("111")).unwrap());
        assert!(!dot(&bs("101"), &bs("101")).unwrap());
        assert!(dot(&bs("101"), &bs("100")).unwrap());
        assert!(matches!(
            dot(&bs("10"), &bs("100")),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn weight_examples() {
        assert_eq!(hamming_weight(&bs("0000")), 0);
        assert_eq!(hamming_weight(&bs("1111")), 4);
        assert_eq!(hamming_weight(&bs("1010")), 2);
    }

    #[test]
    fn text_and_index_order() {
        let s = bs("1101");
        assert_eq!(s.to_string(), "1101");
        assert_eq!(s.to_index(), 0b1101);
        assert_eq!(BitString::from_index(4, 0b1101), s);
        assert!(s.get(0) && s.get(1) && !s.get(2) && s.get(3));
        assert!("10x".parse::<BitString>().is_err());
        assert!("".parse::<BitString>().is_err());
    }

    #[test]
    fn long_strings_cross_words() {
        let mut a = BitString::zeros(130);
        a.set(0, true);
        a.set(64, true);
        a.set(129, true);
        assert_eq!(a.weight(), 3);
        assert_eq!(a.ones_iter().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(BitString::ones(130).weight(), 130);
        assert!(a.parity_with(&BitString::ones(130)));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&system(3, &[("110", 0), ("110", 0)])), 1);
        assert_eq!(rank(&system(3, &[("100", 0), ("010", 0), ("001", 0)])), 3);
        assert_eq!(rank(&system(3, &[("110", 0), ("011", 0), ("101", 0)])), 2);
        assert_eq!(rank(&Gf2System::new(4)), 0);
    }

    #[test]
    fn solve_examples() {
        assert_eq!(
            solve(&system(2, &[("10", 1), ("01", 0)])),
            Solution::Unique(bs("10"))
        );
        assert_eq!(solve(&system(2, &[("11", 1)])), Solution::Underdetermined);
        assert_eq!(
            solve(&system(2, &[("11", 0), ("11", 1)])),
            Solution::Inconsistent
        );
    }

    #[test]
    fn push_rejects_wrong_width() {
        let mut sys = Gf2System::new(3);
        assert!(sys.push(bs("10"), true).is_err());
    }

    #[test]
    fn independence_probability_examples() {
        assert_eq!(independence_probability::<f64>(1), 0.5);
        assert_eq!(independence_probability::<f64>(2), 0.375);
        // Direct product evaluated independently of the implementation.
        let direct: f64 = (1..=8).map(|k| 1.0 - 0.5f64.powi(k)).product();
        assert!((independence_probability::<f64>(8) - direct).abs() < 1e-15);
        assert!((independence_probability::<f64>(8) - 0.28992).abs() < 1e-5);
        assert!((independence_probability::<f32>(8) - 0.28992).abs() < 1e-5);
    }

    #[test]
    fn independence_probability_above_quarter_and_decreasing() {
        let mut prev = independence_probability::<f64>(1);
        for n in 2..=64 {
            let p = independence_probability::<f64>(n);
            assert!(p > 0.25, "n={n}");
            // The factors reach 1 in f64 once 2^{-n} drops below epsilon.
            if n <= 40 {
                assert!(p < prev, "n={n}");
            } else {
                assert!(p <= prev, "n={n}");
            }
            prev = p;
        }
    }

    #[test]
    fn dot_is_linear_exhaustive() {
        for n in 1..=8usize {
            let all: Vec<BitString> = (0..1u64 << n)
                .map(|i| BitString::from_index(n, i))
                .collect();
            // Exhaustive over (a, x, z) would be 2^24 at n = 8; a stride keeps it quick
            // while still touching every x and z.
            let step = if n > 6 { 17 } else { 1 };
            for a in all.iter().step_by(step) {
                for x in &all {
                    for z in &all {
                        let lhs = dot(a, &x.xor(z).unwrap()).unwrap();
                        assert_eq!(lhs, dot(a, x).unwrap() ^ dot(a, z).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn empirical_full_rank_frequency_n8() {
        let n = 8;
        let trials = 100_000;
        let mut rng = RandomStream::new(2024);
        let mut hits = 0u32;
        for _ in 0..trials {
            let sys =
                Gf2System::with_rows(n, (0..n).map(|_| (BitString::random(n, &mut rng), false)))
                    .unwrap();
            if sys.rank() == n {
                hits += 1;
            }
        }
        let p = independence_probability::<f64>(n);
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        let freq = hits as f64 / trials as f64;
        assert!((freq - p).abs() < 3.0 * sigma, "freq={freq} p={p}");
    }

    proptest! {
        #[test]
        fn solve_recovers_planted_concept(n in 1usize..=64, seed in any::<u64>()) {
            let mut rng = RandomStream::new(seed);
            let a = BitString::random(n, &mut rng);
            let mut sys = Gf2System::new(n);
            // Add rows until full rank; the solution must then be unique and equal to a.
            while sys.rank() < n {
                let x = BitString::random(n, &mut rng);
                let y = a.parity_with(&x);
                sys.push(x, y).unwrap();
            }
            prop_assert_eq!(sys.solve(), Solution::Unique(a));
        }

        #[test]
        fn rank_bounded(rows in 0usize..12, n in 1usize..12, seed in any::<u64>()) {
            let mut rng = RandomStream::new(seed);
            let sys = Gf2System::with_rows(
                n,
                (0..rows).map(|_| (BitString::random(n, &mut rng), false)),
            ).unwrap();
            prop_assert!(sys.rank() <= rows.min(n));
        }
    }
}
