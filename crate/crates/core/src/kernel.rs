//! Kernel matrices, kernel orderings and the Kronecker generator matrix.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

pub const MIN_LENGTH: usize = 2;
pub const MAX_LENGTH: usize = 32768;

/// Which 3x3 matrix to return for a ternary kernel.
///
/// `T31`..`T33` are the three polarizing matrices used for reliability-class
/// analysis. `Net` is the matrix realized by the ternary butterfly
/// `(l^c, l^r, l^c^r)`, which is the kernel every encoder in this crate
/// implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelVariant {
    T31,
    T32,
    T33,
    Net,
}

impl FromStr for KernelVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "T3_1" | "T31" => Ok(KernelVariant::T31),
            "T3_2" | "T32" => Ok(KernelVariant::T32),
            "T3_3" | "T33" => Ok(KernelVariant::T33),
            "T3_NET" | "NET" => Ok(KernelVariant::Net),
            _ => Err(Error::UnknownVariant(s.to_string())),
        }
    }
}

/// Returns the kernel matrix of dimension `dim`. `variant` is ignored for
/// the binary kernel.
pub fn kernel_matrix(dim: usize, variant: KernelVariant) -> Result<BitMatrix> {
    let rows: &[&[u8]] = match (dim, variant) {
        (2, _) => &[&[1, 0], &[1, 1]],
        (3, KernelVariant::T31) => &[&[1, 0, 0], &[1, 1, 0], &[0, 0, 1]],
        (3, KernelVariant::T32) => &[&[1, 0, 0], &[1, 1, 0], &[1, 0, 1]],
        (3, KernelVariant::T33) => &[&[1, 0, 0], &[0, 1, 0], &[1, 1, 1]],
        (3, KernelVariant::Net) => &[&[1, 1, 1], &[1, 0, 1], &[0, 1, 1]],
        (d, _) => return Err(Error::UnsupportedDimension(d)),
    };
    BitMatrix::from_rows(rows)
}

/// The kernel an encoder stage of dimension `dim` implements.
pub fn stage_kernel(dim: usize) -> Result<BitMatrix> {
    kernel_matrix(dim, KernelVariant::Net)
}

/// Sequence of kernel dimensions, outermost Kronecker factor first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct KernelOrdering {
    dims: Vec<usize>,
}

impl KernelOrdering {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidOrdering("empty ordering".into()));
        }
        if let Some(&bad) = dims.iter().find(|&&d| d != 2 && d != 3) {
            return Err(Error::InvalidOrdering(format!(
                "kernel dimension {bad} is not 2 or 3"
            )));
        }
        let mut n = 1usize;
        for &d in &dims {
            n = n.saturating_mul(d);
        }
        if n > MAX_LENGTH {
            return Err(Error::UnsupportedLength(n));
        }
        Ok(KernelOrdering { dims })
    }

    /// Parses `"2,3,2"` (braces and whitespace tolerated).
    pub fn parse(text: &str) -> Result<Self> {
        let body = text.trim().trim_start_matches('{').trim_end_matches('}');
        let dims = body
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidOrdering(format!("cannot parse `{text}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dims)
    }

    /// Ordering for `n` binary and `m` ternary kernels, binary first.
    pub fn from_counts(n: usize, m: usize) -> Result<Self> {
        let mut dims = vec![2; n];
        dims.extend(std::iter::repeat_n(3, m));
        Self::new(dims)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Block length `N`, the product of all kernel dimensions.
    pub fn n(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn binary_count(&self) -> usize {
        self.dims.iter().filter(|&&d| d == 2).count()
    }

    pub fn ternary_count(&self) -> usize {
        self.dims.iter().filter(|&&d| d == 3).count()
    }

    pub fn is_pure_binary(&self) -> bool {
        self.ternary_count() == 0
    }

    pub fn is_pure_ternary(&self) -> bool {
        self.binary_count() == 0
    }

    /// Kernel dimensions in network order: innermost stage first.
    pub fn stages(&self) -> impl Iterator<Item = usize> + '_ {
        self.dims.iter().rev().copied()
    }

    /// Sub-encoder block size after each stage in network order.
    /// The last entry is `N`.
    pub fn stage_sizes(&self) -> Vec<usize> {
        self.stages()
            .scan(1usize, |acc, d| {
                *acc *= d;
                Some(*acc)
            })
            .collect()
    }

    /// Checks that the ordering encodes a block of exactly `n` bits.
    pub fn expect_length(&self, n: usize) -> Result<()> {
        if self.n() != n {
            return Err(Error::OrderingMismatch {
                ordering: self.dims.clone(),
                product: self.n(),
                expected: n,
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for KernelOrdering {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims)
    }
}

impl From<KernelOrdering> for Vec<usize> {
    fn from(o: KernelOrdering) -> Self {
        o.dims
    }
}

impl FromStr for KernelOrdering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for KernelOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl fmt::Debug for KernelOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KernelOrdering{self}")
    }
}

/// `G = T_{l_0} ⊗ T_{l_1} ⊗ ... ⊗ T_{l_s}`, built left to right from the
/// encoder stage kernels.
pub fn generator_matrix(ord: &KernelOrdering) -> Result<BitMatrix> {
    let mut g = BitMatrix::identity(1);
    for &d in ord.dims() {
        g = g.kronecker(&stage_kernel(d)?)?;
    }
    Ok(g)
}

/// Splits `n` into `(binary, ternary)` exponents if `n = 2^a * 3^b` is a
/// supported block length.
pub fn factor_length(n: usize) -> Option<(usize, usize)> {
    if !(MIN_LENGTH..=MAX_LENGTH).contains(&n) {
        return None;
    }
    let mut rest = n;
    let mut twos = 0;
    let mut threes = 0;
    while rest % 2 == 0 {
        rest /= 2;
        twos += 1;
    }
    while rest % 3 == 0 {
        rest /= 3;
        threes += 1;
    }
    (rest == 1).then_some((twos, threes))
}

/// A supported block length with its exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SupportedLength {
    pub n: usize,
    pub twos: usize,
    pub threes: usize,
}

/// All `N = 2^n * 3^m` with `2 <= N <= 32768`, ascending.
pub fn supported_lengths() -> Vec<SupportedLength> {
    (MIN_LENGTH..=MAX_LENGTH)
        .filter_map(|n| factor_length(n).map(|(twos, threes)| SupportedLength { n, twos, threes }))
        .collect()
}
