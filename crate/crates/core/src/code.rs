use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::KernelOrdering;
use crate::reliability::{build_profile, select_frozen, ReliabilityProfile};

/// A constructed polar code: ordering, information/frozen split and design
/// erasure probability.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpec {
    ordering: KernelOrdering,
    k: usize,
    eps: f64,
    info_set: Vec<usize>,
    frozen_set: Vec<usize>,
    systematic: bool,
}

/// On-disk form: `{n, k, eps, ordering, frozen, systematic}`.
#[derive(Debug, Serialize, Deserialize)]
struct CodeSpecFile {
    n: usize,
    k: usize,
    eps: f64,
    ordering: KernelOrdering,
    frozen: Vec<usize>,
    systematic: bool,
}

impl CodeSpec {
    /// Builds the BEC profile of `ordering` at `eps` and freezes its
    /// `N - K` least reliable channels.
    pub fn construct(ordering: KernelOrdering, k: usize, eps: f64, systematic: bool) -> Result<Self> {
        let profile = build_profile(&ordering, eps)?;
        Self::from_profile(ordering, &profile, k, systematic)
    }

    pub fn from_profile(
        ordering: KernelOrdering,
        profile: &ReliabilityProfile,
        k: usize,
        systematic: bool,
    ) -> Result<Self> {
        ordering.expect_length(profile.n())?;
        let sel = select_frozen(profile, k)?;
        Ok(CodeSpec {
            ordering,
            k,
            eps: profile.eps,
            info_set: sel.info,
            frozen_set: sel.frozen,
            systematic,
        })
    }

    /// Builds a spec from an explicit frozen set.
    pub fn with_frozen(
        ordering: KernelOrdering,
        eps: f64,
        frozen: Vec<usize>,
        systematic: bool,
    ) -> Result<Self> {
        let n = ordering.n();
        let mut is_frozen = vec![false; n];
        for &f in &frozen {
            if f >= n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: f + 1,
                });
            }
            if is_frozen[f] {
                return Err(Error::InvalidConfig(format!("frozen index {f} repeated")));
            }
            is_frozen[f] = true;
        }
        let k = n - frozen.len();
        if k == 0 {
            return Err(Error::InvalidK { n, k });
        }
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::OutOfRange(eps.to_string()));
        }
        let mut frozen_set = frozen;
        frozen_set.sort_unstable();
        let info_set = (0..n).filter(|&i| !is_frozen[i]).collect();
        Ok(CodeSpec {
            ordering,
            k,
            eps,
            info_set,
            frozen_set,
            systematic,
        })
    }

    pub fn ordering(&self) -> &KernelOrdering {
        &self.ordering
    }

    pub fn n(&self) -> usize {
        self.ordering.n()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n() as f64
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn frozen_set(&self) -> &[usize] {
        &self.frozen_set
    }

    pub fn systematic(&self) -> bool {
        self.systematic
    }

    pub fn set_systematic(&mut self, systematic: bool) {
        self.systematic = systematic;
    }

    /// `true` at frozen positions.
    pub fn frozen_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.n()];
        for &f in &self.frozen_set {
            mask[f] = true;
        }
        mask
    }

    pub fn to_json(&self) -> String {
        let file = CodeSpecFile {
            n: self.n(),
            k: self.k,
            eps: self.eps,
            ordering: self.ordering.clone(),
            frozen: self.frozen_set.clone(),
            systematic: self.systematic,
        };
        let mut s = serde_json::to_string_pretty(&file).expect("spec serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CodeSpecFile = serde_json::from_str(text)?;
        file.ordering.expect_length(file.n)?;
        let spec = Self::with_frozen(file.ordering, file.eps, file.frozen, file.systematic)?;
        if spec.k != file.k {
            return Err(Error::InvalidK {
                n: file.n,
                k: file.k,
            });
        }
        Ok(spec)
    }
}
