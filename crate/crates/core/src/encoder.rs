//! Bit-exact reference encoders.
//!
//! The non-systematic encoder runs the unrolled butterfly network in natural
//! index order, innermost kernel on the smallest blocks first:
//!
//! - binary node: `[l, r] -> [l ^ r, r]`
//! - ternary node: `[l, c, r] -> [l ^ c, l ^ r, l ^ c ^ r]`
//!
//! which computes `x = u * G` for `G` the Kronecker chain of the ordering.

use std::ops::BitXor;

use crate::code::CodeSpec;
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::kernel::KernelOrdering;

/// Runs the encoding network in place over any XOR-able lane type.
///
/// With `T = u64` every lane position carries an independent frame, which
/// encodes 64 frames per pass.
pub fn encode_lanes<T>(ord: &KernelOrdering, buf: &mut [T])
where
    T: Copy + BitXor<Output = T>,
{
    assert_eq!(buf.len(), ord.n(), "buffer length must equal N");
    let mut child = 1usize;
    for d in ord.stages() {
        let block = child * d;
        for base in (0..buf.len()).step_by(block) {
            for q in base..base + child {
                if d == 2 {
                    let (l, r) = (buf[q], buf[q + child]);
                    buf[q] = l ^ r;
                } else {
                    let (l, c, r) = (buf[q], buf[q + child], buf[q + 2 * child]);
                    buf[q] = l ^ c;
                    buf[q + child] = l ^ r;
                    buf[q + 2 * child] = l ^ (c ^ r);
                }
            }
        }
        child = block;
    }
}

/// Non-systematic encoding `x = u * G`.
pub fn encode(ord: &KernelOrdering, u: &BitVector) -> Result<BitVector> {
    if u.len() != ord.n() {
        return Err(Error::DimensionMismatch {
            expected: ord.n(),
            actual: u.len(),
        });
    }
    let mut buf = u.to_bits();
    encode_lanes(ord, &mut buf);
    Ok(BitVector::from_bits(&buf))
}

/// Places `info` at the positions of `info_set` (in order) in a length-`n`
/// zero vector.
pub fn scatter_into(info: &BitVector, info_set: &[usize], n: usize) -> Result<BitVector> {
    if info.len() != info_set.len() {
        return Err(Error::DimensionMismatch {
            expected: info_set.len(),
            actual: info.len(),
        });
    }
    let mut v = BitVector::zeros(n);
    for (bit, &pos) in info.iter().zip(info_set) {
        v.set(pos, bit);
    }
    Ok(v)
}

pub fn scatter(info: &BitVector, spec: &CodeSpec) -> Result<BitVector> {
    scatter_into(info, spec.info_set(), spec.n())
}

/// Reads the bits at `positions`, in order.
pub fn gather(v: &BitVector, positions: &[usize]) -> BitVector {
    BitVector::from_bools(positions.iter().map(|&p| v.get(p)))
}

/// Output of [`encode_systematic`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystematicCodeword {
    pub codeword: BitVector,
    /// Whether the codeword carries `info` verbatim at the information set.
    pub is_systematic: bool,
}

/// Encode, zero the frozen positions, encode again.
///
/// The information bits are checked against the result rather than assumed:
/// for pure-binary orderings the construction is always systematic, but not
/// necessarily once ternary kernels are involved.
pub fn encode_systematic(spec: &CodeSpec, info: &BitVector) -> Result<SystematicCodeword> {
    let v = scatter(info, spec)?;
    let mut y = encode(spec.ordering(), &v)?;
    for &f in spec.frozen_set() {
        y.set(f, false);
    }
    let codeword = encode(spec.ordering(), &y)?;
    let is_systematic = gather(&codeword, spec.info_set()) == *info;
    Ok(SystematicCodeword {
        codeword,
        is_systematic,
    })
}
