//! Dense GF(2) vectors and matrices.
//!
//! Bits are packed little-endian into `u64` words: bit `i` lives in word
//! `i / 64` at position `i % 64`. Unused high bits of the last word are kept
//! zero so that word-wise equality is bit-wise equality.

use std::fmt;
use std::ops::BitXor;

use rand::Rng;

use crate::error::{Error, Result};

/// Largest matrix side accepted by [`BitMatrix::kronecker`].
pub const MAX_SIDE: usize = 32768;

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Unit vector `e_k` of length `len`.
    pub fn unit(len: usize, k: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(k, true);
        v
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut v = Self::zeros(0);
        for b in bits {
            v.push(b);
        }
        v
    }

    /// Builds a vector from `0`/`1` bytes; any non-zero byte is a one.
    pub fn from_bits(bits: &[u8]) -> Self {
        Self::from_bools(bits.iter().map(|&b| b != 0))
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = Self::zeros(len);
        for w in v.words.iter_mut() {
            *w = rng.random();
        }
        v.clear_tail();
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn push(&mut self, value: bool) {
        if self.len % WORD == 0 {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, value);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Bits as `0`/`1` bytes in index order.
    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Hexadecimal rendering with bit `len - 1` first (big-endian nibbles).
    pub fn to_hex(&self) -> String {
        let digits = words_for_nibbles(self.len);
        let mut s = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let mut nibble = 0u8;
            for b in 0..4 {
                let i = d * 4 + b;
                if i < self.len && self.get(i) {
                    nibble |= 1 << b;
                }
            }
            s.push(char::from_digit(u32::from(nibble), 16).unwrap());
        }
        s
    }

    /// Parses a big-endian hex string into a `len`-bit vector. An optional
    /// `0x` prefix and `_` separators are accepted; bits at or above `len`
    /// must be zero.
    pub fn from_hex(text: &str, len: usize) -> Result<Self> {
        let bad = || Error::BadBitString(text.to_string());
        let body = text.trim();
        let body = body
            .strip_prefix("0x")
            .or_else(|| body.strip_prefix("0X"))
            .unwrap_or(body);
        let digits: Vec<u32> = body
            .chars()
            .filter(|&c| c != '_')
            .map(|c| c.to_digit(16))
            .collect::<Option<_>>()
            .ok_or_else(bad)?;
        if digits.is_empty() {
            return Err(bad());
        }
        let mut v = Self::zeros(len);
        for (pos, &d) in digits.iter().rev().enumerate() {
            for b in 0..4 {
                if (d >> b) & 1 == 1 {
                    let i = pos * 4 + b;
                    if i >= len {
                        return Err(Error::DimensionMismatch {
                            expected: len,
                            actual: i + 1,
                        });
                    }
                    v.set(i, true);
                }
            }
        }
        Ok(v)
    }

    /// Parses a binary string written most-significant bit first
    /// (`0b` prefix optional). The string must have exactly `len` digits.
    pub fn from_binary_msb_first(text: &str, len: usize) -> Result<Self> {
        let body = text.trim();
        let body = body.strip_prefix("0b").unwrap_or(body);
        let digits: Vec<char> = body.chars().filter(|&c| c != '_').collect();
        if digits.iter().any(|c| *c != '0' && *c != '1') || digits.is_empty() {
            return Err(Error::BadBitString(text.to_string()));
        }
        if digits.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                actual: digits.len(),
            });
        }
        Ok(Self::from_bools(digits.iter().rev().map(|&c| c == '1')))
    }

    /// Binary rendering with bit `len - 1` first, as in a VHDL
    /// `std_logic_vector(len-1 downto 0)` literal.
    pub fn to_binary_msb_first(&self) -> String {
        (0..self.len)
            .rev()
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

fn words_for_nibbles(bits: usize) -> usize {
    bits.div_ceil(4).max(1)
}

impl BitXor for &BitVector {
    type Output = BitVector;

    fn bitxor(self, rhs: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(rhs);
        out
    }
}

/// Index-order bit string, `u_0` first.
impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

/// Dense row-major GF(2) matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BitMatrix {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from `0`/`1` rows. All rows must share one length.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    actual: row.len(),
                });
            }
            for (j, &b) in row.iter().enumerate() {
                m.set(i, j, b != 0);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector {
            len: self.cols,
            words: self.row_words(r).to_vec(),
        }
    }

    /// Rows as `0`/`1` byte vectors; handy for comparisons in tests.
    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| u8::from(self.get(r, c))).collect())
            .collect()
    }

    /// Kronecker product `self ⊗ other` over GF(2).
    pub fn kronecker(&self, other: &BitMatrix) -> Result<BitMatrix> {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        if rows > MAX_SIDE {
            return Err(Error::SizeOverflow(rows));
        }
        if cols > MAX_SIDE {
            return Err(Error::SizeOverflow(cols));
        }
        let mut out = BitMatrix::zeros(rows, cols);
        for ar in 0..self.rows {
            for ac in 0..self.cols {
                if !self.get(ar, ac) {
                    continue;
                }
                for br in 0..other.rows {
                    let r = ar * other.rows + br;
                    for bc in 0..other.cols {
                        if other.get(br, bc) {
                            out.set(r, ac * other.cols + bc, true);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: other.rows,
            });
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    let src = other.row_words(k).to_vec();
                    let dst = &mut out.data[r * out.stride..(r + 1) * out.stride];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d ^= s;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `x_j = XOR_i u_i * g_ij`.
    pub fn vecmat(&self, u: &BitVector) -> Result<BitVector> {
        if u.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                actual: u.len(),
            });
        }
        let mut x = BitVector::zeros(self.cols);
        for (wi, &word) in u.words().iter().enumerate() {
            let mut w = word;
            while w != 0 {
                let r = wi * WORD + w.trailing_zeros() as usize;
                w &= w - 1;
                for (d, s) in x.words.iter_mut().zip(self.row_words(r)) {
                    *d ^= s;
                }
            }
        }
        Ok(x)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: String = (0..self.cols)
                .map(|c| if self.get(r, c) { '1' } else { '0' })
                .collect();
            writeln!(f, "  {line}")?;
        }
        write!(f, "]")
    }
}

/// `x = u · g` over GF(2).
pub fn gf2_vecmat(u: &BitVector, g: &BitMatrix) -> Result<BitVector> {
    g.vecmat(u)
}
