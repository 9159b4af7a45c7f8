//! Bit-packed linear algebra and weight analysis over GF(2).
//!
//! Coordinates are packed little-endian: coordinate `i` of a vector lives in
//! bit `i % 64` of word `i / 64`. Codes up to length 128 take a fast path in
//! which every codeword is a single `u128`; the codes handled by this crate
//! never exceed length 44, so almost everything hot runs there.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

/// Default bound on the dimension for exhaustive codeword sweeps.
pub const DEFAULT_SWEEP_LIMIT: usize = 24;

/// Errors raised by the GF(2) layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vector length {found} does not match code length {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("dimension {k} exceeds the exhaustive sweep limit {limit}")]
    DimensionTooLarge { k: usize, limit: usize },
    #[error("length {0} exceeds the 128-coordinate fast path")]
    LengthTooLarge(usize),
    #[error("permutation of size {found} applied to a code of length {expected}")]
    PermutationSize { expected: usize, found: usize },
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A vector over GF(2) of fixed length.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            v.set(i, true);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Builds a vector from the low `len` bits of `bits`. Higher bits are dropped.
    pub fn from_u128(len: usize, bits: u128) -> Self {
        let mut v = Self::zeros(len);
        let masked = bits & low_mask(len.min(128));
        if !v.words.is_empty() {
            v.words[0] = masked as u64;
        }
        if v.words.len() > 1 {
            v.words[1] = (masked >> 64) as u64;
        }
        v
    }

    /// Packs into a `u128`; `None` when the vector is longer than 128.
    pub fn as_u128(&self) -> Option<u128> {
        if self.len > 128 {
            return None;
        }
        let lo = self.words.first().copied().unwrap_or(0) as u128;
        let hi = self.words.get(1).copied().unwrap_or(0) as u128;
        Some(lo | (hi << 64))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Standard inner product.
    pub fn dot(&self, other: &BitVector) -> bool {
        debug_assert_eq!(self.len, other.len);
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones % 2 == 1
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    /// Lowest set coordinate.
    pub fn leading_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(wi * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Moves coordinate `i` to position `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> BitVector {
        let mut out = BitVector::zeros(self.len);
        for i in self.support() {
            out.set(perm[i], true);
        }
        out
    }

    /// Restriction to `coords` (in the given order).
    pub fn gather(&self, coords: &[usize]) -> BitVector {
        let mut out = BitVector::zeros(coords.len());
        for (j, &c) in coords.iter().enumerate() {
            if self.get(c) {
                out.set(j, true);
            }
        }
        out
    }

    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.len + other.len);
        for i in self.support() {
            out.set(i, true);
        }
        for i in other.support() {
            out.set(self.len + i, true);
        }
        out
    }

    pub fn parse(s: &str) -> Result<BitVector, String> {
        let mut v = BitVector::zeros(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => v.set(i, true),
                other => {
                    return Err(format!(
                        "unexpected character {other:?} at column {}",
                        i + 1
                    ))
                }
            }
        }
        Ok(v)
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

pub(crate) fn low_mask(n: usize) -> u128 {
    if n >= 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

/// Reduced row-echelon form of a bit matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    /// Nonzero rows of the reduced matrix, ordered by pivot.
    pub rows: Vec<BitVector>,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Gauss-Jordan elimination with pivots chosen left to right.
pub fn rref(rows: &[BitVector], ncols: usize) -> Rref {
    let mut m: Vec<BitVector> = rows.to_vec();
    for r in &m {
        assert_eq!(r.len(), ncols, "row length mismatch in rref");
    }
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pr) = (rank..m.len()).find(|&r| m[r].get(col)) else {
            continue;
        };
        m.swap(rank, pr);
        let pivot_row = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row.get(col) {
                row.xor_assign(&pivot_row);
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    m.truncate(rank);
    Rref {
        rows: m,
        rank,
        pivots,
    }
}

/// In-place RREF on `u128` rows; returns the rank. Row `r < rank` has its
/// pivot at the `r`-th smallest pivot column. Rows past the rank are zero.
pub(crate) fn rref_u128(rows: &mut [u128], ncols: usize) -> usize {
    let mut rank = 0;
    for col in 0..ncols {
        let bit = 1u128 << col;
        let Some(pr) = (rank..rows.len()).find(|&r| rows[r] & bit != 0) else {
            continue;
        };
        rows.swap(rank, pr);
        let p = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && *row & bit != 0 {
                *row ^= p;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Moves bit `i` of `w` to bit `perm[i]`.
#[inline]
pub(crate) fn permute_u128(w: u128, perm: &[usize]) -> u128 {
    let mut out = 0u128;
    let mut rest = w;
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        out |= 1u128 << perm[i];
    }
    out
}

/// A linear code over GF(2) given by a basis of generator rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryCode {
    n: usize,
    rows: Vec<BitVector>,
    reduced_input: bool,
}

impl BinaryCode {
    /// Builds a code from generator rows. Dependent rows are dropped (the
    /// surviving rows keep their order) and [`BinaryCode::was_reduced`]
    /// reports that this happened.
    pub fn from_rows(n: usize, rows: Vec<BitVector>) -> Result<Self, Error> {
        for r in &rows {
            if r.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
        }
        let mut kept = Vec::with_capacity(rows.len());
        let mut echelon: Vec<BitVector> = Vec::new();
        let mut leads: Vec<usize> = Vec::new();
        let mut reduced = false;
        for r in rows {
            let mut v = r.clone();
            for (e, &l) in echelon.iter().zip(&leads) {
                if v.get(l) {
                    v.xor_assign(e);
                }
            }
            match v.leading_one() {
                None => reduced = true,
                Some(l) => {
                    for e in echelon.iter_mut() {
                        if e.get(l) {
                            e.xor_assign(&v);
                        }
                    }
                    echelon.push(v);
                    leads.push(l);
                    kept.push(r);
                }
            }
        }
        Ok(BinaryCode {
            n,
            rows: kept,
            reduced_input: reduced,
        })
    }

    pub fn from_u128_rows(n: usize, rows: &[u128]) -> Self {
        let rows = rows.iter().map(|&r| BitVector::from_u128(n, r)).collect();
        Self::from_rows(n, rows).expect("lengths agree by construction")
    }

    pub fn zero(n: usize) -> Self {
        BinaryCode {
            n,
            rows: Vec::new(),
            reduced_input: false,
        }
    }

    pub fn full(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                let mut v = BitVector::zeros(n);
                v.set(i, true);
                v
            })
            .collect();
        BinaryCode {
            n,
            rows,
            reduced_input: false,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    /// True when the generator rows handed to the constructor were dependent.
    pub fn was_reduced(&self) -> bool {
        self.reduced_input
    }

    /// Generator rows packed in `u128`s (length must be at most 128).
    pub fn rows_u128(&self) -> Result<Vec<u128>, Error> {
        if self.n > 128 {
            return Err(Error::LengthTooLarge(self.n));
        }
        Ok(self.rows.iter().map(|r| r.as_u128().unwrap()).collect())
    }

    pub fn rref(&self) -> Rref {
        rref(&self.rows, self.n)
    }

    /// The same code with its generator matrix in reduced row-echelon form.
    pub fn reduced(&self) -> BinaryCode {
        BinaryCode {
            n: self.n,
            rows: self.rref().rows,
            reduced_input: false,
        }
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        if v.len() != self.n {
            return false;
        }
        let r = self.rref();
        let mut w = v.clone();
        for (row, &p) in r.rows.iter().zip(&r.pivots) {
            if w.get(p) {
                w.xor_assign(row);
            }
        }
        w.is_zero()
    }

    /// Row-space equality.
    pub fn same_space(&self, other: &BinaryCode) -> bool {
        self.n == other.n && self.k() == other.k() && self.rref().rows == other.rref().rows
    }

    pub fn is_subcode_of(&self, other: &BinaryCode) -> bool {
        self.n == other.n && self.rows.iter().all(|r| other.contains(r))
    }

    /// Orthogonal complement under the standard inner product.
    pub fn dual(&self) -> BinaryCode {
        let r = self.rref();
        let mut is_pivot = vec![false; self.n];
        for &p in &r.pivots {
            is_pivot[p] = true;
        }
        let mut rows = Vec::with_capacity(self.n - r.rank);
        for free in (0..self.n).filter(|&c| !is_pivot[c]) {
            let mut v = BitVector::zeros(self.n);
            v.set(free, true);
            for (row, &p) in r.rows.iter().zip(&r.pivots) {
                if row.get(free) {
                    v.set(p, true);
                }
            }
            rows.push(v);
        }
        BinaryCode {
            n: self.n,
            rows,
            reduced_input: false,
        }
    }

    /// Sum of two codes of the same length.
    pub fn sum(&self, other: &BinaryCode) -> Result<BinaryCode, Error> {
        if self.n != other.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        let mut c = BinaryCode::from_rows(self.n, rows)?;
        c.reduced_input = false;
        Ok(c)
    }

    pub fn intersection(&self, other: &BinaryCode) -> Result<BinaryCode, Error> {
        Ok(self.dual().sum(&other.dual())?.dual())
    }

    pub fn is_self_orthogonal(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, a)| self.rows[i..].iter().all(|b| !a.dot(b)))
    }

    pub fn is_self_dual(&self) -> bool {
        2 * self.k() == self.n && self.is_self_orthogonal()
    }

    /// Applies a coordinate permutation: coordinate `i` moves to `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<BinaryCode, Error> {
        if perm.len() != self.n {
            return Err(Error::PermutationSize {
                expected: self.n,
                found: perm.len(),
            });
        }
        check_permutation(perm)?;
        Ok(BinaryCode {
            n: self.n,
            rows: self.rows.iter().map(|r| r.permuted(perm)).collect(),
            reduced_input: self.reduced_input,
        })
    }

    pub fn direct_sum(&self, other: &BinaryCode) -> BinaryCode {
        let zl = BitVector::zeros(self.n);
        let zr = BitVector::zeros(other.n);
        let mut rows: Vec<BitVector> = self.rows.iter().map(|r| r.concat(&zr)).collect();
        rows.extend(other.rows.iter().map(|r| zl.concat(r)));
        BinaryCode {
            n: self.n + other.n,
            rows,
            reduced_input: false,
        }
    }

    /// Whether the all-ones vector is a codeword.
    pub fn is_self_complementary(&self) -> bool {
        self.contains(&BitVector::ones(self.n))
    }

    pub fn weight_distribution(&self) -> Result<WeightDistribution, Error> {
        self.weight_distribution_with_limit(DEFAULT_SWEEP_LIMIT)
    }

    /// Exhaustive Gray-code sweep over all `2^k` codewords.
    pub fn weight_distribution_with_limit(
        &self,
        limit: usize,
    ) -> Result<WeightDistribution, Error> {
        let k = self.k();
        if k > limit {
            return Err(Error::DimensionTooLarge { k, limit });
        }
        let mut counts = vec![0u64; self.n + 1];
        if self.n <= 64 {
            let rows: Vec<u64> = self
                .rows
                .iter()
                .map(|r| r.words.first().copied().unwrap_or(0))
                .collect();
            sweep_counts_u64(&rows, &mut counts);
        } else if self.n <= 128 {
            let rows = self.rows_u128()?;
            sweep_counts_u128(&rows, &mut counts);
        } else {
            let mut cw = BitVector::zeros(self.n);
            counts[0] += 1;
            for i in 1u64..(1u64 << k) {
                cw.xor_assign(&self.rows[i.trailing_zeros() as usize]);
                counts[cw.weight()] += 1;
            }
        }
        Ok(WeightDistribution { counts })
    }

    /// Minimum nonzero weight with a witness codeword.
    ///
    /// With `early_exit_at = Some(t)` the sweep stops at the first codeword of
    /// weight below `t`, so the reported weight is then only an upper bound on
    /// the true minimum (but is guaranteed to be `< t`). Returns `None` for
    /// the zero code.
    pub fn min_weight(&self, early_exit_at: Option<usize>) -> Result<Option<MinWeight>, Error> {
        self.min_weight_with_limit(early_exit_at, DEFAULT_SWEEP_LIMIT)
    }

    pub fn min_weight_with_limit(
        &self,
        early_exit_at: Option<usize>,
        limit: usize,
    ) -> Result<Option<MinWeight>, Error> {
        let k = self.k();
        if k > limit {
            return Err(Error::DimensionTooLarge { k, limit });
        }
        if k == 0 {
            return Ok(None);
        }
        if self.n <= 128 {
            let rows = self.rows_u128()?;
            let (w, word) = min_weight_u128(&rows, early_exit_at.unwrap_or(0));
            return Ok(Some(MinWeight {
                weight: w,
                witness: BitVector::from_u128(self.n, word),
            }));
        }
        let mut cw = BitVector::zeros(self.n);
        let mut best: Option<MinWeight> = None;
        for i in 1u64..(1u64 << k) {
            cw.xor_assign(&self.rows[i.trailing_zeros() as usize]);
            let w = cw.weight();
            if best.as_ref().is_none_or(|b| w < b.weight) {
                best = Some(MinWeight {
                    weight: w,
                    witness: cw.clone(),
                });
                if early_exit_at.is_some_and(|t| w < t) {
                    break;
                }
            }
        }
        Ok(best)
    }

    /// All nonzero codewords of weight at most `max_weight`, in sweep order.
    pub(crate) fn words_up_to(&self, max_weight: usize, limit: usize) -> Result<Vec<u128>, Error> {
        let k = self.k();
        if k > limit {
            return Err(Error::DimensionTooLarge { k, limit });
        }
        let rows = self.rows_u128()?;
        let mut out = Vec::new();
        let mut cw = 0u128;
        for i in 1u64..(1u64 << k) {
            cw ^= rows[i.trailing_zeros() as usize];
            if (cw.count_ones() as usize) <= max_weight {
                out.push(cw);
            }
        }
        Ok(out)
    }

    /// Parses the generator-matrix text format: an optional `n k` header
    /// followed by rows of `0`/`1` characters. Blank lines and `#` comments
    /// are ignored.
    pub fn parse(text: &str) -> Result<BinaryCode, Error> {
        let mut header: Option<(usize, usize)> = None;
        let mut rows: Vec<BitVector> = Vec::new();
        let mut n: Option<usize> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            if line.split_whitespace().count() > 1 {
                if header.is_some() || !rows.is_empty() {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "header must precede all rows".into(),
                    });
                }
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("expected header `n k`, found {line:?}"),
                    });
                }
                let parse_num = |s: &str| {
                    s.parse::<usize>().map_err(|_| Error::Parse {
                        line: line_no,
                        msg: format!("invalid number {s:?} in header"),
                    })
                };
                let (hn, hk) = (parse_num(parts[0])?, parse_num(parts[1])?);
                header = Some((hn, hk));
                n = Some(hn);
                continue;
            }
            let v = BitVector::parse(line).map_err(|msg| Error::Parse { line: line_no, msg })?;
            match n {
                None => n = Some(v.len()),
                Some(expected) if expected != v.len() => {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("row has {} columns, expected {expected}", v.len()),
                    })
                }
                _ => {}
            }
            rows.push(v);
        }
        let Some(n) = n else {
            return Err(Error::Parse {
                line: 0,
                msg: "empty matrix without an `n k` header".into(),
            });
        };
        if let Some((_, hk)) = header {
            if hk != rows.len() {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("header declares {hk} rows but {} were given", rows.len()),
                });
            }
        }
        BinaryCode::from_rows(n, rows)
    }

    /// Serializes in the generator-matrix text format (with header).
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.k());
        for r in &self.rows {
            s.push_str(&r.to_string());
            s.push('\n');
        }
        s
    }

    /// A uniformly-ish random self-dual code of even length `n`, built by
    /// repeatedly adjoining a random even vector of the current dual.
    pub fn random_self_dual<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BinaryCode {
        assert!(n % 2 == 0, "self-dual codes have even length");
        let mut code = BinaryCode::zero(n);
        while 2 * code.k() < n {
            let dual = code.dual();
            loop {
                let mut v = BitVector::zeros(n);
                for r in dual.rows() {
                    if rng.gen::<bool>() {
                        v.xor_assign(r);
                    }
                }
                if v.weight() % 2 == 0 && !code.contains(&v) {
                    let mut rows = code.rows.clone();
                    rows.push(v);
                    code = BinaryCode::from_rows(n, rows).unwrap();
                    break;
                }
            }
        }
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        code.permute(&perm).unwrap()
    }
}

impl fmt::Debug for BinaryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryCode [{}, {}]", self.n, self.k())?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        Ok(())
    }
}

pub(crate) fn check_permutation(perm: &[usize]) -> Result<(), Error> {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return Err(Error::NotAPermutation(format!("{perm:?}")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Result of a minimum-weight sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinWeight {
    pub weight: usize,
    pub witness: BitVector,
}

/// Counts `A_0, ..., A_n` of codewords by weight.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightDistribution {
    counts: Vec<u64>,
}

impl WeightDistribution {
    pub fn from_counts(counts: Vec<u64>) -> Self {
        WeightDistribution { counts }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// `A_i`, zero outside `0..=n`.
    pub fn get(&self, i: usize) -> u64 {
        self.counts.get(i).copied().unwrap_or(0)
    }

    pub fn n(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn min_nonzero_weight(&self) -> Option<usize> {
        (1..self.counts.len()).find(|&i| self.counts[i] > 0)
    }
}

impl fmt::Display for WeightDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.counts.iter().enumerate() {
            if *c > 0 {
                writeln!(f, "A_{i} = {c}")?;
            }
        }
        Ok(())
    }
}

/// Extremal bound on the minimum weight of a binary self-dual code.
pub fn extremal_bound(n: usize) -> usize {
    let base = 4 * (n / 24);
    if n % 24 == 22 {
        base + 6
    } else {
        base + 4
    }
}

#[inline(always)]
fn sweep_counts_u64_body(rows: &[u64], counts: &mut [u64]) {
    let mut cw = 0u64;
    counts[0] += 1;
    let total = 1u64 << rows.len();
    for i in 1..total {
        cw ^= rows[i.trailing_zeros() as usize];
        counts[cw.count_ones() as usize] += 1;
    }
}

#[inline(always)]
fn sweep_counts_u128_body(rows: &[u128], counts: &mut [u64]) {
    let mut cw = 0u128;
    counts[0] += 1;
    let total = 1u64 << rows.len();
    for i in 1..total {
        cw ^= rows[i.trailing_zeros() as usize];
        counts[cw.count_ones() as usize] += 1;
    }
}

#[inline(always)]
fn min_weight_u128_body(rows: &[u128], stop_below: usize) -> (usize, u128) {
    let mut cw = 0u128;
    let mut best = usize::MAX;
    let mut best_word = 0u128;
    let total = 1u64 << rows.len();
    for i in 1..total {
        cw ^= rows[i.trailing_zeros() as usize];
        let w = cw.count_ones() as usize;
        if w < best {
            best = w;
            best_word = cw;
            if w < stop_below {
                break;
            }
        }
    }
    (best, best_word)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "popcnt")]
unsafe fn sweep_counts_u64_popcnt(rows: &[u64], counts: &mut [u64]) {
    sweep_counts_u64_body(rows, counts)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "popcnt")]
unsafe fn sweep_counts_u128_popcnt(rows: &[u128], counts: &mut [u64]) {
    sweep_counts_u128_body(rows, counts)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "popcnt")]
unsafe fn min_weight_u128_popcnt(rows: &[u128], stop_below: usize) -> (usize, u128) {
    min_weight_u128_body(rows, stop_below)
}

fn sweep_counts_u64(rows: &[u64], counts: &mut [u64]) {
    #[cfg(target_arch = "x86_64")]
    if std::arch::is_x86_feature_detected!("popcnt") {
        // SAFETY: the CPU supports popcnt, checked just above.
        unsafe { sweep_counts_u64_popcnt(rows, counts) };
        return;
    }
    sweep_counts_u64_body(rows, counts)
}

fn sweep_counts_u128(rows: &[u128], counts: &mut [u64]) {
    #[cfg(target_arch = "x86_64")]
    if std::arch::is_x86_feature_detected!("popcnt") {
        // SAFETY: the CPU supports popcnt, checked just above.
        unsafe { sweep_counts_u128_popcnt(rows, counts) };
        return;
    }
    sweep_counts_u128_body(rows, counts)
}

pub(crate) fn min_weight_u128(rows: &[u128], stop_below: usize) -> (usize, u128) {
    #[cfg(target_arch = "x86_64")]
    if std::arch::is_x86_feature_detected!("popcnt") {
        // SAFETY: the CPU supports popcnt, checked just above.
        return unsafe { min_weight_u128_popcnt(rows, stop_below) };
    }
    min_weight_u128_body(rows, stop_below)
}
