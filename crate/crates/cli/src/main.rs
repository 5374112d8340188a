use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mkpolar::encoder::{encode, encode_systematic, gather, scatter};
use mkpolar::hdl::{self, validate_structure};
use mkpolar::kernel::{factor_length, supported_lengths};
use mkpolar::netlist::{complexity_closed_form, simulate, ArchitectureConfig, ClosedForm, Netlist};
use mkpolar::{best_ordering, build_profile, BitVector, CodeSpec, Error, KernelOrdering};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

/// `println!` that exits quietly when the reader has gone away.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        if let Err(e) = writeln!(std::io::stdout().lock(), $($arg)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
            panic!("writing to stdout: {e}");
        }
    }};
}

const BIT_ORDER_HELP: &str = "Bit vectors are written as hex with big-endian nibbles: the first \
character holds bits N-1..N-4, the last holds bit 0 (and any unused high bits of the first \
nibble are zero). A `0b` prefix selects binary, again bit N-1 first.

Errors go to stderr prefixed with ERR_LENGTH, ERR_ORDER, ERR_IO, ERR_INPUT, ERR_CONFIG or ERR_SIM.";

#[derive(Parser)]
#[command(name = "mkpolar", version, about = "Multi-kernel polar code construction, encoding and VHDL generation", after_help = BIT_ORDER_HELP)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List every supported length N = 2^n * 3^m.
    Lengths,
    /// Build a code: writes spec.json and reliability.csv.
    Construct {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Encode one vector (N bits, or K information bits with --sys).
    Encode {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        input: String,
        /// Write the codeword here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Emit the VHDL module set, testbench, vectors and manifest.
    Generate {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        arch: ArchArgs,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Clock random frames through the netlist model.
    Simulate {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        arch: ArchArgs,
        #[arg(long, default_value_t = 100)]
        frames: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Print only the summary line.
        #[arg(long)]
        quiet: bool,
    },
    /// Complexity, latency and throughput report (JSON).
    Report {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        arch: ArchArgs,
        #[arg(long)]
        freq_mhz: f64,
    },
}

#[derive(Args)]
struct CodeArgs {
    /// Block length.
    #[arg(long)]
    n: Option<usize>,
    /// Information length (default N/2).
    #[arg(long)]
    k: Option<usize>,
    /// Design erasure probability.
    #[arg(long, default_value_t = 0.5)]
    eps: f64,
    /// Kernel ordering, outermost first, e.g. 2,3,2.
    #[arg(long)]
    kernel_order: Option<String>,
    /// Load the code from a spec.json written by `construct`.
    #[arg(long, conflicts_with_all = ["n", "k", "kernel_order"])]
    spec: Option<PathBuf>,
    /// Systematic encoding.
    #[arg(long)]
    sys: bool,
}

#[derive(Args)]
struct ArchArgs {
    /// Pipelined architecture (implied by --pip-depth > 0 and --deep).
    #[arg(long)]
    pipelined: bool,
    /// Requested pipeline stages per encoder pass.
    #[arg(long, default_value_t = 0)]
    pip_depth: usize,
    /// Register bank between the two systematic passes.
    #[arg(long)]
    pipln_bndry: bool,
    /// Register every stage boundary.
    #[arg(long)]
    deep: bool,
}

impl ArchArgs {
    fn config(&self, systematic: bool) -> ArchitectureConfig {
        ArchitectureConfig {
            systematic,
            pipelined: self.pipelined || self.pip_depth > 0 || self.deep,
            pip_depth: self.pip_depth,
            pipln_bndry: self.pipln_bndry,
            deep: self.deep,
        }
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| {
        Error::Io {
            path: path.into(),
            source,
        }
        .into()
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| {
        Error::Io {
            path: path.into(),
            source,
        }
        .into()
    })
}

impl CodeArgs {
    fn ordering(&self) -> Result<KernelOrdering> {
        match (&self.kernel_order, self.n) {
            (Some(text), n) => {
                let ord = KernelOrdering::parse(text)?;
                if let Some(n) = n {
                    if factor_length(n).is_none() {
                        return Err(Error::UnsupportedLength(n).into());
                    }
                    ord.expect_length(n)?;
                }
                Ok(ord)
            }
            (None, Some(n)) => {
                let (twos, threes) = factor_length(n).ok_or(Error::UnsupportedLength(n))?;
                Ok(best_ordering(twos, threes, self.eps)?)
            }
            (None, None) => bail!(Error::InvalidConfig("give --n, --kernel-order or --spec".into())),
        }
    }

    fn resolve(&self) -> Result<CodeSpec> {
        if let Some(path) = &self.spec {
            let mut spec = CodeSpec::from_json(&read_file(path)?)
                .with_context(|| format!("reading {}", path.display()))?;
            if self.sys {
                spec.set_systematic(true);
            }
            return Ok(spec);
        }
        let ord = self.ordering()?;
        let k = self.k.unwrap_or(ord.n() / 2);
        Ok(CodeSpec::construct(ord, k, self.eps, self.sys)?)
    }
}

fn parse_bits(text: &str, len: usize) -> Result<BitVector> {
    let t = text.trim();
    let v = match t.strip_prefix("0b").or_else(|| t.strip_prefix("0B")) {
        Some(bin) => BitVector::from_binary_msb_first(bin, len)?,
        None => BitVector::from_hex(t, len)?,
    };
    Ok(v)
}

fn cmd_lengths() {
    out!("N\tn\tm");
    for l in supported_lengths() {
        out!("{}\t{}\t{}", l.n, l.twos, l.threes);
    }
}

fn cmd_construct(code: &CodeArgs, out_dir: &Path) -> Result<()> {
    let spec = code.resolve()?;
    let profile = build_profile(spec.ordering(), spec.eps())?;
    fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.into(),
        source,
    })?;
    write_file(&out_dir.join("spec.json"), &spec.to_json())?;
    write_file(&out_dir.join("reliability.csv"), &profile.to_csv(spec.frozen_set()))?;
    out!(
        "N={} K={} eps={} ordering={} systematic={}",
        spec.n(),
        spec.k(),
        spec.eps(),
        spec.ordering(),
        spec.systematic()
    );
    out!("wrote {}", out_dir.join("spec.json").display());
    out!("wrote {}", out_dir.join("reliability.csv").display());
    Ok(())
}

fn cmd_encode(code: &CodeArgs, input: &str, output: Option<&Path>) -> Result<()> {
    let spec = code.resolve()?;
    let mut text = String::new();
    if spec.systematic() {
        let info = parse_bits(input, spec.k())?;
        let out = encode_systematic(&spec, &info)?;
        text.push_str(&out.codeword.to_hex());
        text.push('\n');
        text.push_str(&format!("is_systematic {}\n", out.is_systematic));
        debug_assert_eq!(gather(&out.codeword, spec.info_set()) == info, out.is_systematic);
    } else {
        let u = parse_bits(input, spec.n())?;
        text.push_str(&encode(spec.ordering(), &u)?.to_hex());
        text.push('\n');
    }
    match output {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_generate(code: &CodeArgs, arch: &ArchArgs, out_dir: &Path) -> Result<()> {
    let spec = code.resolve()?;
    let cfg = arch.config(spec.systematic());
    let bundle = hdl::generate_into(&spec, &cfg, out_dir)?;
    let report = validate_structure(&bundle);
    for (name, _) in &bundle.files {
        out!("wrote {}", out_dir.join(name).display());
    }
    out!("wrote {}", out_dir.join("manifest.json").display());
    print!("{report}");
    out!(
        "modules={} nps={:?} latency_cc={} T_c={:.6} s",
        bundle.manifest.modules.len(),
        bundle.manifest.params.nps,
        bundle.manifest.params.latency_cc,
        bundle.elapsed_time()
    );
    if !report.passed() {
        bail!(Error::InvalidConfig("generated VHDL failed the structural check".into()));
    }
    Ok(())
}

fn cmd_simulate(code: &CodeArgs, arch: &ArchArgs, frames: usize, seed: u64, quiet: bool) -> Result<()> {
    let spec = code.resolve()?;
    let cfg = arch.config(spec.systematic());
    let net = Netlist::build_for_spec(&spec, &cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs = Vec::with_capacity(frames);
    let mut expected = Vec::with_capacity(frames);
    for _ in 0..frames {
        if spec.systematic() {
            let info = BitVector::random(spec.k(), &mut rng);
            expected.push(encode_systematic(&spec, &info)?.codeword);
            inputs.push(scatter(&info, &spec)?);
        } else {
            let u = BitVector::random(spec.n(), &mut rng);
            expected.push(encode(spec.ordering(), &u)?);
            inputs.push(u);
        }
    }
    let outs = simulate(&net, &inputs)?;
    let mut mismatches = 0;
    for o in &outs {
        let ok = o.bits == expected[o.frame];
        if !ok {
            mismatches += 1;
        }
        if !quiet {
            out!("cc={} frame={} {} {}", o.cycle, o.frame, o.bits.to_hex(), if ok { "ok" } else { "MISMATCH" });
        }
    }
    let first = outs.first().map_or("-".to_string(), |o| o.cycle.to_string());
    out!(
        "frames={} outputs={} latency_cc={} first_output_cc={} mismatches={}",
        frames,
        outs.len(),
        net.latency_cc(),
        first,
        mismatches
    );
    if mismatches > 0 {
        return Err(SimFailure(mismatches).into());
    }
    Ok(())
}

#[derive(Debug)]
struct SimFailure(usize);

impl std::fmt::Display for SimFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} frames disagree with the reference encoder", self.0)
    }
}

impl std::error::Error for SimFailure {}

fn cmd_report(code: &CodeArgs, arch: &ArchArgs, freq_mhz: f64) -> Result<()> {
    let spec = code.resolve()?;
    let cfg = arch.config(spec.systematic());
    let net = Netlist::build_for_spec(&spec, &cfg)?;
    let mut report = net.performance_report(freq_mhz)?;
    let bundle = hdl::generate(&spec, &cfg)?;
    report.t_c_s = Some(bundle.elapsed_time());
    let closed = match complexity_closed_form(spec.ordering(), &cfg)? {
        ClosedForm::Exact { total } => json!({ "exact": total }),
        ClosedForm::Bounds { lower, upper } => json!({ "lower": lower, "upper": upper }),
    };
    let mut value = serde_json::to_value(&report)?;
    value["k"] = json!(spec.k());
    value["total_complexity"] = json!(net.total_complexity());
    value["closed_form"] = closed;
    out!("{}", serde_json::to_string_pretty(&value)?);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Lengths => {
            cmd_lengths();
            Ok(())
        }
        Cmd::Construct { code, out_dir } => cmd_construct(&code, &out_dir),
        Cmd::Encode { code, input, output } => cmd_encode(&code, &input, output.as_deref()),
        Cmd::Generate { code, arch, out_dir } => cmd_generate(&code, &arch, &out_dir),
        Cmd::Simulate {
            code,
            arch,
            frames,
            seed,
            quiet,
        } => cmd_simulate(&code, &arch, frames, seed, quiet),
        Cmd::Report { code, arch, freq_mhz } => cmd_report(&code, &arch, freq_mhz),
    }
}

/// Stable prefix and exit status for an error chain.
fn classify(err: &anyhow::Error) -> (&'static str, u8) {
    if err.downcast_ref::<SimFailure>().is_some() {
        return ("ERR_SIM", 7);
    }
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::UnsupportedLength(_)) => ("ERR_LENGTH", 3),
        Some(
            Error::InvalidOrdering(_)
            | Error::OrderingMismatch { .. }
            | Error::UnsupportedDimension(_)
            | Error::SizeOverflow(_),
        ) => ("ERR_ORDER", 4),
        Some(Error::Io { .. }) => ("ERR_IO", 5),
        Some(Error::BadBitString(_) | Error::DimensionMismatch { .. }) => ("ERR_INPUT", 6),
        _ => ("ERR_CONFIG", 2),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            eprint!("ERR_CONFIG: {e}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (prefix, code) = classify(&err);
            eprintln!("{prefix}: {err:#}");
            ExitCode::from(code)
        }
    }
}
