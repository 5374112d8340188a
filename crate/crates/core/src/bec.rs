//! Exhaustive erasure-pattern analysis of a GF(2) transform over the BEC.
//!
//! For a transform `x = u * M` sent over `l` independent erasure channels,
//! position `i` is decoded by a genie-aided successive canceller that knows
//! `u_0..u_{i-1}` and treats `u_{i+1}..` as unknown. `u_i` is recoverable
//! from the unerased outputs iff the unit vector `e_i` lies in the span of
//! the unerased columns of `M` restricted to the unknown rows. Counting the
//! failing patterns by their number of erasures gives the exact erasure
//! probability of every synthetic channel as a polynomial in `eps`.

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::gf2::BitMatrix;

/// Exact rational type used by the oracles.
pub type Rational = Ratio<i128>;

/// Erasure probability of one synthetic channel:
/// `sum_e counts[e] * eps^e * (1 - eps)^(l - e)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErasurePolynomial {
    /// `counts[e]` is the number of failing patterns with `e` erasures.
    pub counts: Vec<u64>,
}

impl ErasurePolynomial {
    pub fn eval(&self, eps: Rational) -> Rational {
        let l = self.counts.len() - 1;
        let q = Rational::one() - eps;
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(e, &c)| {
                Rational::from_integer(c as i128) * pow(eps, e) * pow(q, l - e)
            })
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Coefficients in the monomial basis, constant term first.
    pub fn coefficients(&self) -> Vec<i128> {
        let l = self.counts.len() - 1;
        let mut out = vec![0i128; l + 1];
        for (e, &c) in self.counts.iter().enumerate() {
            // eps^e * (1 - eps)^(l-e) = sum_k C(l-e, k) (-1)^k eps^(e+k)
            for k in 0..=(l - e) {
                let sign = if k % 2 == 0 { 1 } else { -1 };
                out[e + k] += sign * c as i128 * binomial(l - e, k);
            }
        }
        out
    }
}

fn pow(x: Rational, e: usize) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * x)
}

fn binomial(n: usize, k: usize) -> i128 {
    let mut r: i128 = 1;
    for i in 0..k {
        r = r * (n - i) as i128 / (i + 1) as i128;
    }
    r
}

/// Returns true if `target` is in the GF(2) span of `vectors`.
fn in_span(vectors: impl Iterator<Item = u64>, target: u64) -> bool {
    let mut basis = [0u64; 64];
    for mut v in vectors {
        while v != 0 {
            let top = 63 - v.leading_zeros() as usize;
            if basis[top] == 0 {
                basis[top] = v;
                break;
            }
            v ^= basis[top];
        }
    }
    let mut t = target;
    while t != 0 {
        let top = 63 - t.leading_zeros() as usize;
        if basis[top] == 0 {
            return false;
        }
        t ^= basis[top];
    }
    true
}

/// Erasure polynomials of every synthetic channel of a square `kernel`.
///
/// Cost is `O(l * 2^l)` rank tests, so this is meant for small kernels and
/// small full generator matrices (l up to ~16).
pub fn erasure_polynomials(kernel: &BitMatrix) -> Vec<ErasurePolynomial> {
    let l = kernel.rows();
    assert_eq!(l, kernel.cols(), "kernel must be square");
    assert!(l <= 20, "exhaustive enumeration limited to 20 channels");

    (0..l)
        .map(|i| {
            // column j restricted to unknown rows i..l, row i at bit 0
            let columns: Vec<u64> = (0..l)
                .map(|j| {
                    (i..l)
                        .filter(|&r| kernel.get(r, j))
                        .fold(0u64, |acc, r| acc | 1 << (r - i))
                })
                .collect();
            let mut counts = vec![0u64; l + 1];
            for erased in 0u32..(1 << l) {
                let available = (0..l)
                    .filter(|&j| erased >> j & 1 == 0)
                    .map(|j| columns[j]);
                if !in_span(available, 1) {
                    counts[erased.count_ones() as usize] += 1;
                }
            }
            ErasurePolynomial { counts }
        })
        .collect()
}

/// Exact erasure probability of each synthetic channel of `kernel` at
/// erasure probability `eps`.
pub fn brute_force_bec(kernel: &BitMatrix, eps: Rational) -> Vec<Rational> {
    erasure_polynomials(kernel)
        .iter()
        .map(|p| p.eval(eps))
        .collect()
}
