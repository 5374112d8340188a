use serde::Serialize;

use super::Netlist;
use crate::error::{Error, Result};

/// Throughput/latency summary of a netlist clocked at `f_mhz`.
///
/// Throughput is `N * f` bits per second: one frame per cycle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerformanceReport {
    pub n: usize,
    pub ordering: Vec<usize>,
    pub systematic: bool,
    pub p_requested: usize,
    pub p_effective: usize,
    pub nps: Vec<usize>,
    pub xor_count: usize,
    pub register_bits: usize,
    pub latency_cc: usize,
    pub frames_in_flight: usize,
    pub depth_units: Vec<u32>,
    pub f_mhz: f64,
    pub throughput_bps: f64,
    pub latency_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_c_s: Option<f64>,
}

impl PerformanceReport {
    pub fn new(net: &Netlist, f_mhz: f64) -> Result<Self> {
        if !(f_mhz.is_finite() && f_mhz > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "clock frequency must be positive, got {f_mhz} MHz"
            )));
        }
        let f_hz = f_mhz * 1e6;
        Ok(PerformanceReport {
            n: net.n(),
            ordering: net.ordering().dims().to_vec(),
            systematic: net.config().systematic,
            p_requested: net.p_requested(),
            p_effective: net.p_effective(),
            nps: net.nps().sizes.iter().copied().collect(),
            xor_count: net.xor_count(),
            register_bits: net.register_bits(),
            latency_cc: net.latency_cc(),
            frames_in_flight: net.frames_in_flight(),
            depth_units: net.depth_units(),
            f_mhz,
            throughput_bps: net.n() as f64 * f_hz,
            latency_s: net.latency_cc() as f64 / f_hz,
            t_c_s: None,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
