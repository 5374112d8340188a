use super::{Netlist, Segment, Signal};
use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// A frame leaving the output register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimOutput {
    /// Clock edge (0-based) at which the output register captured the frame.
    pub cycle: usize,
    /// Index of the input frame this output belongs to.
    pub frame: usize,
    pub bits: BitVector,
}

fn eval(seg: &Segment, bank: &[u8], scratch: &mut Vec<u8>) -> Vec<u8> {
    scratch.clear();
    let read = |s: Signal, gates: &[u8]| match s {
        Signal::Input(i) => bank[i as usize],
        Signal::Gate(g) => gates[g as usize],
        Signal::Zero => 0,
    };
    for gate in &seg.gates {
        let v = read(gate.a, scratch) ^ read(gate.b, scratch);
        scratch.push(v);
    }
    seg.outputs.iter().map(|&s| read(s, scratch)).collect()
}

/// Clocks `frames` through the netlist, one new frame per cycle.
///
/// Frame `k` is captured by the input register at edge `k`; every register
/// bank then advances one bank per edge, so its output is captured at edge
/// `k + latency_cc`. Idle cycles after the last frame flush the pipeline.
pub fn simulate(net: &Netlist, frames: &[BitVector]) -> Result<Vec<SimOutput>> {
    if let Some(bad) = frames.iter().find(|f| f.len() != net.n()) {
        return Err(Error::DimensionMismatch {
            expected: net.n(),
            actual: bad.len(),
        });
    }
    let segments = net.segments();
    let mut banks: Vec<Option<(usize, Vec<u8>)>> = vec![None; segments.len() + 1];
    let mut outputs = Vec::with_capacity(frames.len());
    let mut scratch = Vec::new();

    for cycle in 0..frames.len() + segments.len() {
        // every bank samples its predecessor's old value on the same edge
        for j in (0..segments.len()).rev() {
            banks[j + 1] = banks[j]
                .as_ref()
                .map(|(k, bits)| (*k, eval(&segments[j], bits, &mut scratch)));
        }
        banks[0] = frames.get(cycle).map(|f| (cycle, f.to_bits()));

        if let Some((frame, bits)) = &banks[segments.len()] {
            outputs.push(SimOutput {
                cycle,
                frame: *frame,
                bits: BitVector::from_bits(bits),
            });
        }
    }
    Ok(outputs)
}
