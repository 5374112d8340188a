//! Test-side oracles written from scratch, sharing nothing with the library
//! beyond `BitVector` for I/O.

#![allow(dead_code)]

use mkpolar::BitVector;

pub const T2: [[u8; 2]; 2] = [[1, 0], [1, 1]];
pub const T3: [[u8; 3]; 3] = [[1, 1, 1], [1, 0, 1], [0, 1, 1]];

/// Dense GF(2) matrix with rows packed into u64 words.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub n: usize,
    pub rows: Vec<Vec<u64>>,
}

impl Dense {
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r][c / 64] >> (c % 64) & 1 == 1
    }

    fn set(&mut self, r: usize, c: usize) {
        self.rows[r][c / 64] |= 1 << (c % 64);
    }

    fn zeros(n: usize) -> Self {
        Dense {
            n,
            rows: vec![vec![0; n.div_ceil(64)]; n],
        }
    }

    fn kernel(dim: usize) -> Self {
        let mut m = Dense::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                let bit = if dim == 2 { T2[r][c] } else { T3[r][c] };
                if bit == 1 {
                    m.set(r, c);
                }
            }
        }
        m
    }

    fn kron(&self, b: &Dense) -> Dense {
        let mut out = Dense::zeros(self.n * b.n);
        for i in 0..self.n {
            for j in 0..self.n {
                if !self.get(i, j) {
                    continue;
                }
                for k in 0..b.n {
                    for l in 0..b.n {
                        if b.get(k, l) {
                            out.set(i * b.n + k, j * b.n + l);
                        }
                    }
                }
            }
        }
        out
    }

    /// `G = K(d_0) x K(d_1) x ...` with the first dimension outermost.
    pub fn generator(dims: &[usize]) -> Dense {
        let mut g = Dense::kernel(dims[0]);
        for &d in &dims[1..] {
            g = g.kron(&Dense::kernel(d));
        }
        g
    }

    /// `x = u * G` as the XOR of the rows selected by `u`.
    pub fn vecmat(&self, u: &BitVector) -> BitVector {
        let mut acc = vec![0u64; self.n.div_ceil(64)];
        for (i, bit) in u.iter().enumerate() {
            if bit {
                for (a, w) in acc.iter_mut().zip(&self.rows[i]) {
                    *a ^= w;
                }
            }
        }
        BitVector::from_bools((0..self.n).map(|c| acc[c / 64] >> (c % 64) & 1 == 1))
    }

    /// Square submatrix on `idx` x `idx`, as plain rows.
    pub fn restrict(&self, idx: &[usize]) -> Vec<Vec<bool>> {
        idx.iter()
            .map(|&r| idx.iter().map(|&c| self.get(r, c)).collect())
            .collect()
    }
}

pub fn mat_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(false, |acc, k| acc ^ (a[i][k] & b[k][j])))
                .collect()
        })
        .collect()
}

pub fn is_identity(m: &[Vec<bool>]) -> bool {
    m.iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(j, &v)| v == (i == j)))
}

/// Every `N = 2^a 3^b` in `[2, limit]`, ascending, as `(N, a, b)`.
pub fn lengths_up_to(limit: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    let mut p2 = 1;
    let mut a = 0;
    while p2 <= limit {
        let mut n = p2;
        let mut b = 0;
        while n <= limit {
            if n >= 2 {
                out.push((n, a, b));
            }
            n *= 3;
            b += 1;
        }
        p2 *= 2;
        a += 1;
    }
    out.sort();
    out
}

/// Bit vector of the low `len` bits of `x`, bit 0 first.
pub fn from_u64(x: u64, len: usize) -> BitVector {
    BitVector::from_bools((0..len).map(|i| x >> i & 1 == 1))
}
