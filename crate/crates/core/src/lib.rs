//! Multi-kernel polar code toolkit.
//!
//! Covers block lengths `N = 2^n * 3^m` built from binary and ternary
//! kernels: GF(2) generator matrices, BEC code construction, bit-exact
//! reference encoders, unrolled/pipelined netlist models with complexity
//! accounting and cycle-accurate simulation, and VHDL generation.

pub mod bec;
pub mod code;
pub mod encoder;
pub mod error;
pub mod gf2;
pub mod hdl;
pub mod kernel;
pub mod netlist;
pub mod reliability;

pub use code::CodeSpec;
pub use encoder::{encode, encode_systematic, scatter, SystematicCodeword};
pub use error::{Error, Result};
pub use gf2::{gf2_vecmat, BitMatrix, BitVector};
pub use kernel::{generator_matrix, kernel_matrix, KernelOrdering, KernelVariant};
pub use reliability::{best_ordering, build_profile, select_frozen, ReliabilityProfile};
