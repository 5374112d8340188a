//! VHDL generation.
//!
//! Modules are emitted innermost first: one processing element for the last
//! kernel of the ordering, one sub-encoder per larger block size (each
//! instantiating `d` copies of the previous entity and one inline kernel
//! stage), and a registered top-level wrapper. Block sizes that carry a
//! pipeline cut get a registered output.

mod validate;
pub mod vhdl;

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::code::CodeSpec;
use crate::encoder::{encode, encode_systematic, scatter};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::netlist::{simulate, ArchitectureConfig, Netlist};

pub use validate::{validate_files, validate_structure, Diagnostic, ValidationReport};
pub use vhdl::TopKind;

/// Seed for testbench vector selection.
pub const VECTOR_SEED: u64 = 0x706f_6c61_72;
/// Golden vectors per testbench.
pub const VECTOR_COUNT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModuleKind {
    Pe,
    SubEncoder,
    Top,
    Testbench,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PortInfo {
    pub name: String,
    pub direction: String,
    pub width: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModuleInfo {
    pub name: String,
    pub file: String,
    pub kind: ModuleKind,
    pub size: usize,
    /// Output registered (pipeline cut at this block size).
    pub pipelined: bool,
    pub children: Vec<String>,
    pub ports: Vec<PortInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifestParams {
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub ordering: Vec<usize>,
    pub systematic: bool,
    pub pipelined: bool,
    pub pip_depth: usize,
    pub pipln_bndry: bool,
    pub deep: bool,
    pub p_effective: usize,
    pub nps: Vec<usize>,
    pub top_kind: &'static str,
    pub latency_cc: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub top: String,
    pub modules: Vec<ModuleInfo>,
    pub params: ManifestParams,
    pub vectors_file: String,
    pub vector_count: usize,
    pub vector_seed: u64,
    /// Wall-clock generation time in seconds.
    pub elapsed_time_s: f64,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

/// Generated design: VHDL files plus `vectors.txt`, a manifest and the
/// golden vectors embedded in the testbench.
#[derive(Debug, Clone)]
pub struct HdlBundle {
    /// `(filename, text)` in emission order.
    pub files: Vec<(String, String)>,
    pub manifest: Manifest,
    pub testbench_vectors: Vec<(BitVector, BitVector)>,
    elapsed: Duration,
}

impl HdlBundle {
    /// Generation wall-clock time in seconds.
    pub fn elapsed_time(&self) -> f64 {
        self.elapsed.as_secs_f64()
    }

    pub fn file(&self, name: &str) -> Option<&str> {
        self.files
            .iter()
            .find(|(f, _)| f == name)
            .map(|(_, t)| t.as_str())
    }

    /// Writes every file and `manifest.json` into `dir` (created if
    /// missing).
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, text) in &self.files {
            let path = dir.join(name);
            fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        }
        let path = dir.join("manifest.json");
        fs::write(&path, self.manifest.to_json()).map_err(|e| Error::io(&path, e))
    }
}

fn ports(size: usize, clocked: bool) -> Vec<PortInfo> {
    let mut p = Vec::new();
    if clocked {
        p.push(PortInfo {
            name: "clk".into(),
            direction: "in".into(),
            width: 1,
        });
    }
    p.push(PortInfo {
        name: "u".into(),
        direction: "in".into(),
        width: size,
    });
    p.push(PortInfo {
        name: "x".into(),
        direction: "out".into(),
        width: size,
    });
    p
}

fn golden_vectors(spec: &CodeSpec, net: &Netlist) -> Result<Vec<(BitVector, BitVector)>> {
    let n = spec.n();
    let ord = spec.ordering();
    let width = if spec.systematic() { spec.k() } else { n };
    let mut rng = ChaCha8Rng::seed_from_u64(VECTOR_SEED);
    let mut seeds = vec![BitVector::zeros(width), BitVector::from_bools((0..width).map(|_| true))];
    seeds.push(BitVector::unit(width, 0));
    seeds.push(BitVector::unit(width, width - 1));
    while seeds.len() < VECTOR_COUNT {
        seeds.push(BitVector::random(width, &mut rng));
    }

    let mut pairs = Vec::with_capacity(seeds.len());
    for s in seeds {
        if spec.systematic() {
            let input = scatter(&s, spec)?;
            let expected = encode_systematic(spec, &s)?.codeword;
            pairs.push((input, expected));
        } else {
            let expected = encode(ord, &s)?;
            pairs.push((s, expected));
        }
    }

    // re-check against the gate-level model of the same architecture
    let inputs: Vec<BitVector> = pairs.iter().map(|p| p.0.clone()).collect();
    let outs = simulate(net, &inputs)?;
    for (o, (_, expected)) in outs.iter().zip(&pairs) {
        if o.bits != *expected {
            return Err(Error::InvalidConfig(format!(
                "golden vector {} disagrees with the netlist model",
                o.frame
            )));
        }
    }
    Ok(pairs)
}

/// Emits the design for `spec` under `cfg`. The systematic flag comes from
/// `cfg`.
pub fn generate(spec: &CodeSpec, cfg: &ArchitectureConfig) -> Result<HdlBundle> {
    let start = Instant::now();
    cfg.validate()?;
    let mut spec = spec.clone();
    spec.set_systematic(cfg.systematic);
    let ord = spec.ordering();
    let n = spec.n();
    let nps = cfg.placement(ord)?;
    let net = Netlist::build_for_spec(&spec, cfg)?;

    let stages: Vec<usize> = ord.stages().collect();
    let sizes = ord.stage_sizes();
    let mut files = Vec::new();
    let mut modules = Vec::new();

    // innermost processing element
    let pe_dim = stages[0];
    let pe_name = format!("pe{pe_dim}");
    let mut clocked = nps.contains(sizes[0]);
    files.push((format!("{pe_name}.vhd"), vhdl::processing_element(&pe_name, pe_dim, clocked)));
    modules.push(ModuleInfo {
        name: pe_name.clone(),
        file: format!("{pe_name}.vhd"),
        kind: ModuleKind::Pe,
        size: pe_dim,
        pipelined: clocked,
        children: Vec::new(),
        ports: ports(pe_dim, clocked),
    });

    let mut child_name = pe_name;
    for (i, &dim) in stages.iter().enumerate().skip(1) {
        let size = sizes[i];
        let registered = nps.contains(size);
        let arch = if registered { "pip" } else { "comb" };
        let name = format!("enc_{arch}_n{size}");
        let child = vhdl::Child {
            entity: &child_name,
            size: sizes[i - 1],
            clocked,
        };
        let this_clocked = clocked || registered;
        files.push((
            format!("{name}.vhd"),
            vhdl::sub_encoder(&name, dim, &child, this_clocked, registered),
        ));
        modules.push(ModuleInfo {
            name: name.clone(),
            file: format!("{name}.vhd"),
            kind: ModuleKind::SubEncoder,
            size,
            pipelined: registered,
            children: vec![child_name.clone()],
            ports: ports(size, this_clocked),
        });
        clocked = this_clocked;
        child_name = name;
    }

    let kind = match (cfg.systematic, cfg.pipln_bndry) {
        (false, _) => TopKind::CombEncReg,
        (true, false) => TopKind::CombSysEncReg,
        (true, true) => TopKind::PipSysEncReg,
    };
    let top_name = format!("top_n{n}");
    let mask = cfg.systematic.then(|| {
        let mut m = BitVector::zeros(n);
        for &i in spec.info_set() {
            m.set(i, true);
        }
        m
    });
    let enc = vhdl::Child {
        entity: &child_name,
        size: n,
        clocked,
    };
    files.push((format!("{top_name}.vhd"), vhdl::top(&top_name, kind, n, &enc, mask.as_ref())));
    modules.push(ModuleInfo {
        name: top_name.clone(),
        file: format!("{top_name}.vhd"),
        kind: ModuleKind::Top,
        size: n,
        pipelined: true,
        children: vec![child_name.clone()],
        ports: ports(n, true),
    });

    let vectors = golden_vectors(&spec, &net)?;
    let latency = net.latency_cc();
    files.push((
        "tb_top.vhd".into(),
        vhdl::testbench(&top_name, n, latency, &vectors),
    ));
    modules.push(ModuleInfo {
        name: "tb_top".into(),
        file: "tb_top.vhd".into(),
        kind: ModuleKind::Testbench,
        size: n,
        pipelined: false,
        children: vec![top_name.clone()],
        ports: Vec::new(),
    });
    let mut lines = String::new();
    for (i, e) in &vectors {
        lines.push_str(&format!("{} {}\n", i.to_hex(), e.to_hex()));
    }
    files.push(("vectors.txt".into(), lines));

    let params = ManifestParams {
        n,
        k: spec.k(),
        eps: spec.eps(),
        ordering: ord.dims().to_vec(),
        systematic: cfg.systematic,
        pipelined: cfg.pipelined,
        pip_depth: cfg.pip_depth,
        pipln_bndry: cfg.pipln_bndry,
        deep: cfg.deep,
        p_effective: nps.effective,
        nps: nps.sizes.iter().copied().collect(),
        top_kind: kind.label(),
        latency_cc: latency,
    };
    let elapsed = start.elapsed().max(Duration::from_nanos(1));
    let manifest = Manifest {
        top: top_name,
        modules,
        params,
        vectors_file: "vectors.txt".into(),
        vector_count: vectors.len(),
        vector_seed: VECTOR_SEED,
        elapsed_time_s: elapsed.as_secs_f64(),
    };
    Ok(HdlBundle {
        files,
        manifest,
        testbench_vectors: vectors,
        elapsed,
    })
}

/// [`generate`] followed by [`HdlBundle::write_to`]; the recorded time
/// includes writing.
pub fn generate_into(spec: &CodeSpec, cfg: &ArchitectureConfig, dir: &Path) -> Result<HdlBundle> {
    let start = Instant::now();
    let mut bundle = generate(spec, cfg)?;
    bundle.write_to(dir)?;
    bundle.elapsed = start.elapsed();
    bundle.manifest.elapsed_time_s = bundle.elapsed.as_secs_f64();
    let path = dir.join("manifest.json");
    fs::write(&path, bundle.manifest.to_json()).map_err(|e| Error::io(&path, e))?;
    Ok(bundle)
}
