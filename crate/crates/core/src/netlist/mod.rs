//! Unrolled encoder netlists.
//!
//! A netlist is a chain of register banks (each `N` bits wide) separated by
//! combinational segments of two-input XOR gates. The first bank is the
//! input register and the last one the output register; everything in
//! between comes from pipeline cuts inside an encoder pass or from the
//! boundary register between the two passes of a systematic encoder.

mod complexity;
mod pipeline;
mod report;
mod sim;

pub use complexity::{complexity_closed_form, ClosedForm};
pub use pipeline::{max_legal_cuts, place_deep, place_pipelines, stage_depth, NpsSet, MIN_SEGMENT_DEPTH};
pub use report::PerformanceReport;
pub use sim::{simulate, SimOutput};

use serde::{Deserialize, Serialize};

use crate::code::CodeSpec;
use crate::error::{Error, Result};
use crate::kernel::KernelOrdering;

/// Architecture knobs, mirroring the compiler inputs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchitectureConfig {
    pub systematic: bool,
    pub pipelined: bool,
    /// Requested pipeline stages inside each non-systematic encoder pass.
    pub pip_depth: usize,
    /// Register bank between the two passes of a systematic encoder.
    pub pipln_bndry: bool,
    /// Register every stage boundary.
    pub deep: bool,
}

impl ArchitectureConfig {
    pub fn combinational() -> Self {
        Self::default()
    }

    pub fn pipelined(pip_depth: usize) -> Self {
        ArchitectureConfig {
            pipelined: true,
            pip_depth,
            ..Self::default()
        }
    }

    pub fn deep() -> Self {
        ArchitectureConfig {
            pipelined: true,
            deep: true,
            ..Self::default()
        }
    }

    pub fn with_systematic(mut self, boundary_register: bool) -> Self {
        self.systematic = true;
        self.pipln_bndry = boundary_register;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.pip_depth > 0 && !self.pipelined {
            return Err(Error::InvalidConfig(
                "pip_depth > 0 requires a pipelined architecture".into(),
            ));
        }
        if self.deep && !self.pipelined {
            return Err(Error::InvalidConfig(
                "deep pipelining requires a pipelined architecture".into(),
            ));
        }
        if self.pipln_bndry && !self.systematic {
            return Err(Error::InvalidConfig(
                "a boundary register only exists in systematic encoders".into(),
            ));
        }
        Ok(())
    }

    /// Pipeline cuts for one encoder pass of `ord`.
    pub fn placement(&self, ord: &KernelOrdering) -> Result<NpsSet> {
        self.validate()?;
        Ok(if self.deep {
            place_deep(ord, self.pip_depth)
        } else if self.pipelined {
            place_pipelines(ord, self.pip_depth)
        } else {
            place_pipelines(ord, 0)
        })
    }
}

/// A wire inside a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Signal {
    /// Bit of the register bank feeding the segment.
    Input(u32),
    /// Output of the gate with this index within the segment.
    Gate(u32),
    /// Constant zero (frozen positions between systematic passes).
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XorGate {
    pub a: Signal,
    pub b: Signal,
}

/// Combinational logic between two register banks. Gates are stored in
/// topological order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub gates: Vec<XorGate>,
    pub outputs: Vec<Signal>,
    /// First and last global stage (1-based) covered by this segment.
    pub stages: (usize, usize),
    /// Longest XOR path through the segment.
    pub depth: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    /// Between two stages of the same encoder pass.
    Internal,
    /// Between the two passes of a systematic encoder.
    Pass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StageBoundary {
    pub after_stage: usize,
    pub registered: bool,
    pub kind: BoundaryKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Netlist {
    n: usize,
    ordering: KernelOrdering,
    config: ArchitectureConfig,
    nps: NpsSet,
    frozen: Vec<usize>,
    segments: Vec<Segment>,
    boundaries: Vec<StageBoundary>,
}

struct SegmentBuilder {
    gates: Vec<XorGate>,
    levels: Vec<u32>,
    first_stage: usize,
}

impl SegmentBuilder {
    fn new(first_stage: usize) -> Self {
        SegmentBuilder {
            gates: Vec::new(),
            levels: Vec::new(),
            first_stage,
        }
    }

    fn level(&self, s: Signal) -> u32 {
        match s {
            Signal::Gate(i) => self.levels[i as usize],
            Signal::Input(_) | Signal::Zero => 0,
        }
    }

    fn xor(&mut self, a: Signal, b: Signal) -> Signal {
        let id = self.gates.len() as u32;
        self.levels.push(1 + self.level(a).max(self.level(b)));
        self.gates.push(XorGate { a, b });
        Signal::Gate(id)
    }

    /// Applies one kernel stage of dimension `dim` with child block `child`.
    fn stage(&mut self, wires: &mut [Signal], dim: usize, child: usize) {
        let block = dim * child;
        for base in (0..wires.len()).step_by(block) {
            for q in base..base + child {
                if dim == 2 {
                    wires[q] = self.xor(wires[q], wires[q + child]);
                } else {
                    let (l, c, r) = (wires[q], wires[q + child], wires[q + 2 * child]);
                    wires[q] = self.xor(l, c);
                    wires[q + child] = self.xor(l, r);
                    let cr = self.xor(c, r);
                    wires[q + 2 * child] = self.xor(l, cr);
                }
            }
        }
    }

    fn finish(self, outputs: Vec<Signal>, last_stage: usize) -> Segment {
        let depth = outputs
            .iter()
            .map(|&s| self.level(s))
            .max()
            .unwrap_or(0);
        Segment {
            gates: self.gates,
            outputs,
            stages: (self.first_stage, last_stage),
            depth,
        }
    }
}

fn inputs(n: usize) -> Vec<Signal> {
    (0..n as u32).map(Signal::Input).collect()
}

impl Netlist {
    /// Builds the netlist of a non-systematic encoder.
    pub fn build(ord: &KernelOrdering, config: &ArchitectureConfig) -> Result<Netlist> {
        if config.systematic {
            return Err(Error::InvalidConfig(
                "systematic netlists need a frozen set; use build_for_spec".into(),
            ));
        }
        Self::build_inner(ord, config, &[])
    }

    /// Builds the netlist for a code; the frozen set is used only by
    /// systematic configurations.
    pub fn build_for_spec(spec: &CodeSpec, config: &ArchitectureConfig) -> Result<Netlist> {
        Self::build_inner(spec.ordering(), config, spec.frozen_set())
    }

    fn build_inner(ord: &KernelOrdering, config: &ArchitectureConfig, frozen: &[usize]) -> Result<Netlist> {
        let nps = config.placement(ord)?;
        let n = ord.n();
        let stages: Vec<usize> = ord.stages().collect();
        let per_pass = stages.len();
        let passes = if config.systematic { 2 } else { 1 };
        let total = per_pass * passes;

        let mut segments = Vec::new();
        let mut boundaries = Vec::new();
        let mut wires = inputs(n);
        let mut seg = SegmentBuilder::new(1);

        for pass in 0..passes {
            let mut child = 1;
            for (k, &dim) in stages.iter().enumerate() {
                let global = pass * per_pass + k + 1;
                seg.stage(&mut wires, dim, child);
                child *= dim;
                if global == total {
                    break;
                }
                let (kind, registered) = if k + 1 == per_pass {
                    (BoundaryKind::Pass, config.pipln_bndry)
                } else {
                    (BoundaryKind::Internal, nps.cuts.contains(&(k + 1)))
                };
                if kind == BoundaryKind::Pass {
                    for &f in frozen {
                        wires[f] = Signal::Zero;
                    }
                }
                boundaries.push(StageBoundary {
                    after_stage: global,
                    registered,
                    kind,
                });
                if registered {
                    let done = std::mem::replace(&mut seg, SegmentBuilder::new(global + 1));
                    segments.push(done.finish(std::mem::replace(&mut wires, inputs(n)), global));
                }
            }
        }
        segments.push(seg.finish(wires, total));

        Ok(Netlist {
            n,
            ordering: ord.clone(),
            config: *config,
            nps,
            frozen: if config.systematic { frozen.to_vec() } else { Vec::new() },
            segments,
            boundaries,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ordering(&self) -> &KernelOrdering {
        &self.ordering
    }

    pub fn config(&self) -> &ArchitectureConfig {
        &self.config
    }

    pub fn nps(&self) -> &NpsSet {
        &self.nps
    }

    pub fn p_requested(&self) -> usize {
        self.nps.requested
    }

    pub fn p_effective(&self) -> usize {
        self.nps.effective
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn stage_boundaries(&self) -> &[StageBoundary] {
        &self.boundaries
    }

    pub fn frozen(&self) -> &[usize] {
        &self.frozen
    }

    pub fn xor_count(&self) -> usize {
        self.segments.iter().map(|s| s.gates.len()).sum()
    }

    /// Register banks including the input and output registers.
    pub fn register_banks(&self) -> usize {
        self.segments.len() + 1
    }

    pub fn register_bits(&self) -> usize {
        self.register_banks() * self.n
    }

    /// XOR gates plus register bits.
    pub fn total_complexity(&self) -> usize {
        self.xor_count() + self.register_bits()
    }

    /// Combinational depth of each inter-register segment.
    pub fn depth_units(&self) -> Vec<u32> {
        self.segments.iter().map(|s| s.depth).collect()
    }

    /// Clock cycles from input capture to output capture.
    pub fn latency_cc(&self) -> usize {
        self.segments.len()
    }

    /// Frames held in the pipeline when streaming one frame per cycle.
    pub fn frames_in_flight(&self) -> usize {
        self.latency_cc()
    }

    pub fn performance_report(&self, f_mhz: f64) -> Result<PerformanceReport> {
        PerformanceReport::new(self, f_mhz)
    }
}
