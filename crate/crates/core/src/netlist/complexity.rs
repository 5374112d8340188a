use serde::Serialize;

use super::ArchitectureConfig;
use crate::error::Result;
use crate::kernel::KernelOrdering;

/// Closed-form gate + register count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClosedForm {
    /// Pure-binary and pure-ternary encoders have an exact count.
    Exact { total: usize },
    /// Mixed orderings are only bracketed by the pure-kernel formulas.
    Bounds { lower: f64, upper: f64 },
}

impl ClosedForm {
    pub fn admits(&self, total: usize) -> bool {
        match *self {
            ClosedForm::Exact { total: t } => t == total,
            ClosedForm::Bounds { lower, upper } => {
                let t = total as f64;
                lower - 1e-9 <= t && t <= upper + 1e-9
            }
        }
    }
}

/// Complexity (XOR gates plus register bits) predicted by the closed-form
/// expressions, with `P` taken as the effective pipeline depth.
///
/// Non-systematic: `N(log2(N)/2 + P + 2)` binary, `N(4/3 log3(N) + P + 2)`
/// ternary. Systematic: `N(log2(N) + 2P + 3)` binary and
/// `N(8/3 log3(N) + 2P + 3)` ternary; these count the bank between the two
/// passes, so `N` is subtracted when the boundary is not registered.
/// Deep pipelining counts every stage boundary as a pipeline stage.
pub fn complexity_closed_form(ord: &KernelOrdering, cfg: &ArchitectureConfig) -> Result<ClosedForm> {
    let p = cfg.placement(ord)?.effective;
    let n = ord.n();
    let nf = n as f64;
    let pf = p as f64;
    let twos = ord.binary_count();
    let threes = ord.ternary_count();
    let boundary_adjust = if cfg.systematic && !cfg.pipln_bndry { n } else { 0 };

    if ord.is_pure_binary() || ord.is_pure_ternary() {
        // n*log2(N)/2 and 4n*log3(N)/3 are integral on their own lengths
        let xor_one_pass = if ord.is_pure_binary() {
            n * twos / 2
        } else {
            4 * n * threes / 3
        };
        let total = if cfg.systematic {
            2 * xor_one_pass + (2 * p + 3) * n - boundary_adjust
        } else {
            xor_one_pass + (p + 2) * n
        };
        return Ok(ClosedForm::Exact { total });
    }

    let log2 = nf.log2();
    let log3 = nf.ln() / 3f64.ln();
    let adjust = boundary_adjust as f64;
    let (lower, upper) = if cfg.systematic {
        (
            nf * (log2 + 2.0 * pf + 3.0) - adjust,
            nf * (8.0 / 3.0 * log3 + 2.0 * pf + 3.0) - adjust,
        )
    } else {
        (
            nf * (0.5 * log2 + pf + 2.0),
            nf * (4.0 / 3.0 * log3 + pf + 2.0),
        )
    };
    Ok(ClosedForm::Bounds { lower, upper })
}
