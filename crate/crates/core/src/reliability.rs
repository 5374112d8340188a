//! Code construction over the binary erasure channel.
//!
//! Each kernel stage splits a synthetic channel with erasure probability `z`
//! into 2 or 3 children. The child at the lowest index is always the worst
//! one, matching the successive-cancellation decoding order of both stage
//! kernels. Profiles are evolved outermost kernel first, so the outermost
//! kernel contributes the most significant digit of a channel index.

use std::fmt::{Debug, Write as _};

use num_traits::Num;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::KernelOrdering;

/// Numeric types the evolution formulas accept (`f64` and exact rationals).
pub trait Probability: Num + PartialOrd + Copy + Debug {}

impl<T: Num + PartialOrd + Copy + Debug> Probability for T {}

/// `1 - (1 - z)^k` without cancellation at either end of `[0, 1]`.
fn worst_child<T: Probability>(z: T, k: u32) -> T {
    let two = T::one() + T::one();
    let c = T::one() - z;
    if two * z <= T::one() {
        let three = two + T::one();
        match k {
            2 => z * (two - z),
            _ => z * (three - three * z + z * z),
        }
    } else {
        let mut p = c;
        for _ in 1..k {
            p = p * c;
        }
        T::one() - p
    }
}

fn check_unit<T: Probability>(z: T) -> Result<()> {
    if z < T::zero() || z > T::one() {
        return Err(Error::OutOfRange(format!("{z:?}")));
    }
    Ok(())
}

/// Binary stage: `(2z - z^2, z^2)` for child indices `(2i, 2i+1)`.
pub fn evolve_binary<T: Probability>(z: T) -> Result<(T, T)> {
    check_unit(z)?;
    Ok((worst_child(z, 2), z * z))
}

/// Ternary stage of the `(l^c, l^r, l^c^r)` kernel:
/// `(3z - 3z^2 + z^3, 2z^2 - z^3, z^2)` for child indices `(3i, 3i+1, 3i+2)`.
pub fn evolve_ternary_net<T: Probability>(z: T) -> Result<(T, T, T)> {
    check_unit(z)?;
    let two = T::one() + T::one();
    let sq = z * z;
    Ok((worst_child(z, 3), sq * (two - z), sq))
}

/// Classes of unordered Bhattacharyya parameters of the ternary polarizing
/// matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TernaryClass {
    F1,
    F2,
    F3,
}

impl TernaryClass {
    pub const ALL: [TernaryClass; 3] = [TernaryClass::F1, TernaryClass::F2, TernaryClass::F3];
}

/// The three parameters of a class, in the order they are tabulated (not
/// sorted by channel index).
pub fn table1_params(cls: TernaryClass, eps: f64) -> (f64, f64, f64) {
    let e = eps;
    let e2 = e * e;
    let e3 = e2 * e;
    match cls {
        TernaryClass::F1 => (e, e2, -e2 + 2.0 * e),
        TernaryClass::F2 => (e2, -e3 + 2.0 * e2, e3 - 3.0 * e2 + 3.0 * e),
        TernaryClass::F3 => (e3, -e2 + 2.0 * e, -e3 + e2 + e),
    }
}

/// Kernel families compared by the polarization measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolarizationKernel {
    Binary,
    Ternary(TernaryClass),
}

impl PolarizationKernel {
    pub fn dim(self) -> usize {
        match self {
            PolarizationKernel::Binary => 2,
            PolarizationKernel::Ternary(_) => 3,
        }
    }

    fn params(self, eps: f64) -> Vec<f64> {
        match self {
            PolarizationKernel::Binary => {
                vec![2.0 * eps - eps * eps, eps * eps]
            }
            PolarizationKernel::Ternary(cls) => {
                let (a, b, c) = table1_params(cls, eps);
                vec![a, b, c]
            }
        }
    }
}

/// Normalized polarization measure `(1/l) * sum_i Z_i^2`.
pub fn polarization_measure(kernel: PolarizationKernel, eps: f64) -> Result<f64> {
    check_unit(eps)?;
    let params = kernel.params(eps);
    Ok(params.iter().map(|z| z * z).sum::<f64>() / kernel.dim() as f64)
}

/// Expanded polynomial form of [`polarization_measure`].
pub fn polarization_closed_form(kernel: PolarizationKernel, eps: f64) -> f64 {
    let e = eps;
    let p = |k: i32| e.powi(k);
    match kernel {
        PolarizationKernel::Binary => (2.0 * p(4) - 4.0 * p(3) + 4.0 * p(2)) / 2.0,
        PolarizationKernel::Ternary(TernaryClass::F1) => {
            (2.0 * p(4) - 4.0 * p(3) + 5.0 * p(2)) / 3.0
        }
        PolarizationKernel::Ternary(TernaryClass::F2) => {
            (2.0 * p(6) - 10.0 * p(5) + 20.0 * p(4) - 18.0 * p(3) + 9.0 * p(2)) / 3.0
        }
        PolarizationKernel::Ternary(TernaryClass::F3) => {
            (2.0 * p(6) - 2.0 * p(5) - 2.0 * p(3) + 5.0 * p(2)) / 3.0
        }
    }
}

/// Per-channel erasure probabilities of a code at design erasure rate `eps`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReliabilityProfile {
    pub eps: f64,
    pub z: Vec<f64>,
}

impl ReliabilityProfile {
    pub fn n(&self) -> usize {
        self.z.len()
    }

    /// Mean of `z_i^2`; larger means stronger polarization.
    pub fn mean_square(&self) -> f64 {
        self.z.iter().map(|z| z * z).sum::<f64>() / self.z.len() as f64
    }

    /// CSV with header `index,z,frozen`, LF line endings.
    pub fn to_csv(&self, frozen: &[usize]) -> String {
        let mut is_frozen = vec![false; self.z.len()];
        for &f in frozen {
            is_frozen[f] = true;
        }
        let mut out = String::from("index,z,frozen\n");
        for (i, z) in self.z.iter().enumerate() {
            writeln!(out, "{i},{z},{}", u8::from(is_frozen[i])).unwrap();
        }
        out
    }
}

/// Evolves `eps` through every stage of `ord` in any numeric type.
pub fn evolve_profile<T: Probability>(ord: &KernelOrdering, eps: T) -> Result<Vec<T>> {
    check_unit(eps)?;
    let mut z = vec![eps];
    for &d in ord.dims() {
        let mut next = Vec::with_capacity(z.len() * d);
        for &parent in &z {
            if d == 2 {
                let (worst, best) = evolve_binary(parent)?;
                next.extend([worst, best]);
            } else {
                let (a, b, c) = evolve_ternary_net(parent)?;
                next.extend([a, b, c]);
            }
        }
        z = next;
    }
    Ok(z)
}

pub fn build_profile(ord: &KernelOrdering, eps: f64) -> Result<ReliabilityProfile> {
    Ok(ReliabilityProfile {
        eps,
        z: evolve_profile(ord, eps)?,
    })
}

/// Frozen and information index sets, both ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrozenSelection {
    pub frozen: Vec<usize>,
    pub info: Vec<usize>,
}

/// Freezes the `N - K` channels with the largest erasure probability. Equal
/// values freeze the larger index first.
pub fn select_frozen(profile: &ReliabilityProfile, k: usize) -> Result<FrozenSelection> {
    let n = profile.n();
    if k == 0 || k > n {
        return Err(Error::InvalidK { n, k });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        profile.z[b]
            .total_cmp(&profile.z[a])
            .then_with(|| b.cmp(&a))
    });
    let mut frozen: Vec<usize> = order[..n - k].to_vec();
    frozen.sort_unstable();
    let mut info: Vec<usize> = order[n - k..].to_vec();
    info.sort_unstable();
    Ok(FrozenSelection { frozen, info })
}

/// All distinct arrangements of `twos` 2s and `threes` 3s in lexicographic
/// order.
pub fn multiset_orderings(twos: usize, threes: usize) -> Vec<Vec<usize>> {
    fn rec(twos: usize, threes: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if twos == 0 && threes == 0 {
            out.push(prefix.clone());
            return;
        }
        if twos > 0 {
            prefix.push(2);
            rec(twos - 1, threes, prefix, out);
            prefix.pop();
        }
        if threes > 0 {
            prefix.push(3);
            rec(twos, threes - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(twos, threes, &mut Vec::new(), &mut out);
    out
}

/// Relative gap under which two candidate scores count as tied.
const SCORE_TIE: f64 = 1e-12;

/// Exhaustively scores every ordering of `twos` binary and `threes` ternary
/// kernels by the mean squared erasure probability at `eps` and returns the
/// best. Ties keep the lexicographically smallest ordering.
pub fn best_ordering(twos: usize, threes: usize, eps: f64) -> Result<KernelOrdering> {
    if twos + threes == 0 {
        return Err(Error::InvalidOrdering("n + m must be at least 1".into()));
    }
    check_unit(eps)?;
    let mut best: Option<(f64, KernelOrdering)> = None;
    for dims in multiset_orderings(twos, threes) {
        let ord = KernelOrdering::new(dims)?;
        let score = build_profile(&ord, eps)?.mean_square();
        let better = match &best {
            None => true,
            Some((s, _)) => score > s + SCORE_TIE * s.abs().max(1.0),
        };
        if better {
            best = Some((score, ord));
        }
    }
    Ok(best.expect("at least one candidate").1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bec::Rational;

    #[test]
    fn binary_evolution_values() {
        assert_eq!(evolve_binary(0.0).unwrap(), (0.0, 0.0));
        assert_eq!(evolve_binary(1.0).unwrap(), (1.0, 1.0));
        assert_eq!(evolve_binary(0.5).unwrap(), (0.75, 0.25));
        assert!(matches!(evolve_binary(1.5), Err(Error::OutOfRange(_))));
        assert!(evolve_binary(-0.1).is_err());
    }

    #[test]
    fn ternary_evolution_values() {
        assert_eq!(evolve_ternary_net(0.5).unwrap(), (0.875, 0.375, 0.25));
        assert_eq!(evolve_ternary_net(0.0).unwrap(), (0.0, 0.0, 0.0));
        let (a, b, c) = evolve_ternary_net(0.5).unwrap();
        assert_eq!(a + b + c, 1.5);
        assert!(evolve_ternary_net(2.0).is_err());
    }

    #[test]
    fn evolution_stays_in_range_and_precise() {
        let near_one = 1.0 - f64::EPSILON;
        let (w, _) = evolve_binary(near_one).unwrap();
        assert!(w <= 1.0);
        let (w, m, _) = evolve_ternary_net(near_one).unwrap();
        assert!(w <= 1.0 && m <= 1.0);
        let (w, _) = evolve_binary(1e-30).unwrap();
        assert_eq!(w, 2e-30);
        let (w, _, _) = evolve_ternary_net(1e-30f64).unwrap();
        assert!((w / 3e-30 - 1.0).abs() < 1e-15);
        let p = build_profile(&KernelOrdering::from_counts(8, 0).unwrap(), 0.5).unwrap();
        assert!(p.z.iter().all(|&z| z > 0.0 && z <= 1.0));
    }

    #[test]
    fn rational_evolution() {
        let (a, b, c) = evolve_ternary_net(Rational::new(1, 3)).unwrap();
        assert_eq!(a, Rational::new(19, 27));
        assert_eq!(b, Rational::new(5, 27));
        assert_eq!(c, Rational::new(1, 9));
        assert_eq!(a + b + c, Rational::from_integer(1));
    }

    #[test]
    fn table1_examples() {
        assert_eq!(table1_params(TernaryClass::F3, 0.5), (0.125, 0.75, 0.625));
        assert_eq!(table1_params(TernaryClass::F2, 0.5), (0.25, 0.375, 0.875));
        assert_eq!(table1_params(TernaryClass::F1, 0.0), (0.0, 0.0, 0.0));
    }

    #[test]
    fn measure_examples() {
        let m = |k| polarization_measure(k, 0.5).unwrap();
        assert_eq!(m(PolarizationKernel::Binary), 0.3125);
        let f2 = m(PolarizationKernel::Ternary(TernaryClass::F2));
        let f3 = m(PolarizationKernel::Ternary(TernaryClass::F3));
        assert!((f2 - 0.96875 / 3.0).abs() < 1e-15);
        assert!((f3 - 0.96875 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn profile_examples() {
        let p = build_profile(&KernelOrdering::parse("2").unwrap(), 0.5).unwrap();
        assert_eq!(p.z, vec![0.75, 0.25]);
        let p = build_profile(&KernelOrdering::parse("2,2").unwrap(), 0.5).unwrap();
        assert_eq!(p.z, vec![0.9375, 0.5625, 0.4375, 0.0625]);
    }

    #[test]
    fn frozen_examples() {
        let p = build_profile(&KernelOrdering::parse("2").unwrap(), 0.5).unwrap();
        assert_eq!(select_frozen(&p, 1).unwrap().frozen, vec![0]);
        let p = build_profile(&KernelOrdering::parse("2,2").unwrap(), 0.5).unwrap();
        assert!(select_frozen(&p, 4).unwrap().frozen.is_empty());
        let sel = select_frozen(&p, 2).unwrap();
        assert_eq!(sel.frozen, vec![0, 1]);
        assert_eq!(sel.info, vec![2, 3]);
        assert!(matches!(select_frozen(&p, 0), Err(Error::InvalidK { .. })));
        assert!(select_frozen(&p, 5).is_err());
    }

    #[test]
    fn frozen_ties_freeze_larger_index() {
        let p = ReliabilityProfile {
            eps: 0.5,
            z: vec![0.5, 0.5, 0.5],
        };
        assert_eq!(select_frozen(&p, 1).unwrap().frozen, vec![1, 2]);
    }

    #[test]
    fn ordering_enumeration() {
        assert_eq!(multiset_orderings(1, 0), vec![vec![2]]);
        assert_eq!(multiset_orderings(1, 1), vec![vec![2, 3], vec![3, 2]]);
        assert_eq!(multiset_orderings(4, 3).len(), 35);
    }

    #[test]
    fn best_ordering_examples() {
        assert_eq!(best_ordering(1, 0, 0.5).unwrap().dims(), &[2]);
        assert_eq!(best_ordering(0, 2, 0.5).unwrap().dims(), &[3, 3]);
        assert!(best_ordering(0, 0, 0.5).is_err());

        let score = |d: &str| {
            build_profile(&KernelOrdering::parse(d).unwrap(), 0.5)
                .unwrap()
                .mean_square()
        };
        let (s23, s32) = (score("2,3"), score("3,2"));
        let expected = if s32 > s23 { "{3,2}" } else { "{2,3}" };
        assert_eq!(best_ordering(1, 1, 0.5).unwrap().to_string(), expected);
    }

    #[test]
    fn best_ordering_is_deterministic() {
        let a = best_ordering(3, 2, 0.3).unwrap();
        for _ in 0..3 {
            assert_eq!(best_ordering(3, 2, 0.3).unwrap(), a);
        }
    }

    #[test]
    fn csv_export() {
        let p = build_profile(&KernelOrdering::parse("2").unwrap(), 0.5).unwrap();
        assert_eq!(p.to_csv(&[0]), "index,z,frozen\n0,0.75,1\n1,0.25,0\n");
    }
}
