//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p mkpolar --test acceptance`.

mod common;

use std::panic;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{from_u64, is_identity, lengths_up_to, mat_mul, Dense};
use mkpolar::bec::{brute_force_bec, Rational};
use mkpolar::encoder::{encode_systematic, gather, scatter};
use mkpolar::hdl::{self, validate_structure, ModuleKind};
use mkpolar::kernel::{kernel_matrix, supported_lengths, KernelVariant};
use mkpolar::netlist::{simulate, ArchitectureConfig, Netlist};
use mkpolar::reliability::{
    build_profile, evolve_binary, evolve_ternary_net, multiset_orderings, polarization_closed_form,
    polarization_measure, PolarizationKernel, TernaryClass,
};
use mkpolar::{best_ordering, encode, BitMatrix, BitVector, CodeSpec, KernelOrdering};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ORACLE_VECTORS: usize = 10_000;
const ORACLE_BUDGET: Duration = Duration::from_secs(60);
const COMPLEXITY_BUDGET: Duration = Duration::from_secs(5);
const CONSERVATION_TOL: f64 = 1e-9;
const MEASURE_TOL: f64 = 1e-12;
const FUZZ_CONFIGS: usize = 50;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn default_ordering(a: usize, b: usize) -> KernelOrdering {
    best_ordering(a, b, 0.5).unwrap()
}

fn literal(rows: &[&[u8]]) -> BitMatrix {
    BitMatrix::from_rows(rows).unwrap()
}

fn oracle_equivalence() -> Result<String, String> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    let mut lengths = 0;
    let mut vectors = 0usize;
    for (n, a, b) in lengths_up_to(1296) {
        let ord = default_ordering(a, b);
        let g = Dense::generator(ord.dims());
        let exhaustive = n <= 16;
        let count = if exhaustive { 1usize << n } else { ORACLE_VECTORS };
        for i in 0..count {
            let u = if exhaustive {
                from_u64(i as u64, n)
            } else {
                BitVector::random(n, &mut rng)
            };
            let x = encode(&ord, &u).map_err(|e| e.to_string())?;
            ensure(x == g.vecmat(&u), || format!("N={n} ordering {ord}: mismatch on input {}", u.to_hex()))?;
        }
        lengths += 1;
        vectors += count;
    }
    let t = start.elapsed();
    ensure(t < ORACLE_BUDGET, || format!("took {t:.1?}, budget {ORACLE_BUDGET:?}"))?;
    Ok(format!("{lengths} lengths, {vectors} vectors, exact, {t:.2?}"))
}

fn bec_exactness() -> Result<String, String> {
    let t2 = literal(&[&[1, 0], &[1, 1]]);
    let t3 = literal(&[&[1, 1, 1], &[1, 0, 1], &[0, 1, 1]]);
    let t33 = kernel_matrix(3, KernelVariant::T33).map_err(|e| e.to_string())?;
    let samples = [
        Rational::new(1, 7),
        Rational::new(1, 3),
        Rational::new(1, 2),
        Rational::new(2, 3),
        Rational::new(9, 10),
    ];
    let one = Rational::from_integer(1);
    let two = Rational::from_integer(2);
    for e in samples {
        let (w, b) = evolve_binary(e).map_err(|e| e.to_string())?;
        ensure(brute_force_bec(&t2, e) == vec![w, b], || format!("T2 at eps={e}"))?;
        let (x, y, z) = evolve_ternary_net(e).map_err(|e| e.to_string())?;
        ensure(brute_force_bec(&t3, e) == vec![x, y, z], || format!("ternary stage kernel at eps={e}"))?;
        let mut got = brute_force_bec(&t33, e);
        got.sort();
        let mut row = vec![e * e * e, two * e - e * e, e + e * e - e * e * e];
        row.sort();
        ensure(got == row, || format!("T3_3 set at eps={e}: {got:?} vs {row:?}"))?;
        ensure(e < one, || "sample outside (0,1)".into())?;
    }
    Ok(format!("T2, stage ternary kernel and T3_3 at {} rational points, exact", samples.len()))
}

fn conservation() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    let mut profiles = 0;
    for (n, a, b) in lengths_up_to(4096) {
        for eps in [0.1, 0.5, 0.9] {
            for dims in multiset_orderings(a, b) {
                let ord = KernelOrdering::new(dims).unwrap();
                let p = build_profile(&ord, eps).map_err(|e| e.to_string())?;
                let dev = (p.z.iter().sum::<f64>() - n as f64 * eps).abs();
                worst = worst.max(dev);
                profiles += 1;
                ensure(dev <= CONSERVATION_TOL, || format!("N={n} {ord} eps={eps}: deviation {dev:e}"))?;
            }
        }
    }
    Ok(format!("{profiles} profiles (every ordering), max |sum z - N eps| = {worst:.2e} <= {CONSERVATION_TOL:e}"))
}

/// Unordered erasure parameters straight from the kernel table.
fn table_params(k: PolarizationKernel, e: f64) -> Vec<f64> {
    let (e2, e3) = (e * e, e * e * e);
    match k {
        PolarizationKernel::Binary => vec![2.0 * e - e2, e2],
        PolarizationKernel::Ternary(TernaryClass::F1) => vec![e, e2, 2.0 * e - e2],
        PolarizationKernel::Ternary(TernaryClass::F2) => vec![e2, 2.0 * e2 - e3, 3.0 * e - 3.0 * e2 + e3],
        PolarizationKernel::Ternary(TernaryClass::F3) => vec![e3, 2.0 * e - e2, e + e2 - e3],
    }
}

fn polarization_measures() -> Result<String, String> {
    let kernels = [
        PolarizationKernel::Binary,
        PolarizationKernel::Ternary(TernaryClass::F1),
        PolarizationKernel::Ternary(TernaryClass::F2),
        PolarizationKernel::Ternary(TernaryClass::F3),
    ];
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let e = (i as f64 + 0.5) / 1000.0;
        for k in kernels {
            let p = table_params(k, e);
            let def = p.iter().map(|z| z * z).sum::<f64>() / p.len() as f64;
            let lib = polarization_measure(k, e).map_err(|e| e.to_string())?;
            let closed = polarization_closed_form(k, e);
            let dev = (def - closed).abs().max((lib - closed).abs());
            worst = worst.max(dev);
            ensure(dev <= MEASURE_TOL, || format!("{k:?} at eps={e}: deviation {dev:e}"))?;
        }
    }
    let f2 = PolarizationKernel::Ternary(TernaryClass::F2);
    let f3 = PolarizationKernel::Ternary(TernaryClass::F3);
    let target = 0.96875 / 3.0;
    for k in [f2, f3] {
        let m = polarization_closed_form(k, 0.5);
        ensure((m - target).abs() <= MEASURE_TOL, || format!("{k:?} at 0.5 = {m}, expected {target}"))?;
    }
    for i in 1..50 {
        let lo = i as f64 / 100.0;
        let hi = 1.0 - lo;
        ensure(polarization_closed_form(f2, lo) > polarization_closed_form(f3, lo), || {
            format!("F2 not above F3 at {lo}")
        })?;
        ensure(polarization_closed_form(f2, hi) < polarization_closed_form(f3, hi), || {
            format!("F2 not below F3 at {hi}")
        })?;
    }
    Ok(format!(
        "1000 samples x 4 kernels, max dev {worst:.1e}; M(F2)=M(F3)=0.96875/3 at 0.5; F2>F3 on (0,0.5), F2<F3 on (0.5,1)"
    ))
}

fn complexity_audit() -> Result<String, String> {
    let start = Instant::now();
    let binary = KernelOrdering::from_counts(10, 0).unwrap();
    let table = [
        (ArchitectureConfig::combinational(), 0usize, 2048usize, 1usize),
        (ArchitectureConfig::pipelined(1), 1, 3072, 2),
        (ArchitectureConfig::pipelined(2), 2, 4096, 3),
        (ArchitectureConfig::pipelined(4), 4, 6144, 5),
        (ArchitectureConfig { pip_depth: 9, ..ArchitectureConfig::deep() }, 9, 11264, 10),
    ];
    for (cfg, p, regs, lat) in table {
        let net = Netlist::build(&binary, &cfg).map_err(|e| e.to_string())?;
        ensure(net.register_bits() == regs && net.register_bits() == (p + 2) * 1024, || {
            format!("N=1024 P={p}: {} register bits, expected {regs}", net.register_bits())
        })?;
        ensure(net.latency_cc() == lat, || format!("N=1024 P={p}: latency {}", net.latency_cc()))?;
        ensure(net.xor_count() == 5120, || format!("N=1024 P={p}: {} XORs", net.xor_count()))?;
    }
    let t243 = Netlist::build(&KernelOrdering::from_counts(0, 5).unwrap(), &ArchitectureConfig::combinational())
        .map_err(|e| e.to_string())?;
    ensure(t243.register_bits() == 486, || format!("N=243: {} registers", t243.register_bits()))?;

    let mut pure = 0;
    let mut mixed = 0;
    for (n, a, b) in lengths_up_to(32768) {
        let ord = default_ordering(a, b);
        if a == 0 || b == 0 {
            let net = Netlist::build(&ord, &ArchitectureConfig::combinational()).map_err(|e| e.to_string())?;
            let expected = if b == 0 { n / 2 * a } else { 4 * n / 3 * b };
            ensure(net.xor_count() == expected, || format!("N={n}: {} XORs, expected {expected}", net.xor_count()))?;
            pure += 1;
        } else if n <= 4096 {
            let (nf, log2, log3) = (n as f64, (n as f64).log2(), (n as f64).ln() / 3f64.ln());
            for p in [0, 1, 2, 3] {
                let net = Netlist::build(&ord, &ArchitectureConfig::pipelined(p)).map_err(|e| e.to_string())?;
                let pe = net.p_effective() as f64;
                let total = net.total_complexity() as f64;
                let lower = nf * (0.5 * log2 + pe + 2.0);
                let upper = nf * (4.0 / 3.0 * log3 + pe + 2.0);
                ensure(lower <= total && total <= upper, || {
                    format!("N={n} {ord} P={p}: total {total} outside [{lower}, {upper}]")
                })?;
                mixed += 1;
            }
        }
    }
    let t = start.elapsed();
    ensure(t < COMPLEXITY_BUDGET, || format!("took {t:.1?}, budget {COMPLEXITY_BUDGET:?}"))?;
    Ok(format!(
        "N=1024 P{{0,1,2,4,9}} -> regs {{2048,3072,4096,6144,11264}}, CC {{1,2,3,5,10}}; N=243 -> 486; {pure} pure XOR counts exact; {mixed} mixed totals in bounds; {t:.2?}"
    ))
}

fn streaming() -> Result<String, String> {
    let ord = KernelOrdering::from_counts(10, 0).unwrap();
    let net = Netlist::build(&ord, &ArchitectureConfig::pipelined(4)).map_err(|e| e.to_string())?;
    let g = Dense::generator(ord.dims());
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let frames: Vec<BitVector> = (0..100).map(|_| BitVector::random(1024, &mut rng)).collect();
    let outs = simulate(&net, &frames).map_err(|e| e.to_string())?;
    ensure(outs.len() == 100, || format!("{} outputs", outs.len()))?;
    ensure(outs[0].cycle == 5, || format!("first output at cycle {}", outs[0].cycle))?;
    for (k, o) in outs.iter().enumerate() {
        ensure(o.cycle == 5 + k && o.frame == k, || format!("output {k} at cycle {} for frame {}", o.cycle, o.frame))?;
        ensure(o.bits == g.vecmat(&frames[k]), || format!("frame {k} differs from the oracle"))?;
        ensure(o.bits == encode(&ord, &frames[k]).unwrap(), || format!("frame {k} differs from encode"))?;
    }
    Ok("100 frames, outputs at cycles 5..=104, all equal to the reference".into())
}

fn systematic_property() -> Result<String, String> {
    let mut binary_specs = 0;
    for a in 1..=10 {
        let ord = KernelOrdering::from_counts(a, 0).unwrap();
        for k in 1..=ord.n().min(12) {
            let spec = CodeSpec::construct(ord.clone(), k, 0.5, true).map_err(|e| e.to_string())?;
            for x in 0..1u64 << k {
                let info = from_u64(x, k);
                let out = encode_systematic(&spec, &info).map_err(|e| e.to_string())?;
                ensure(out.is_systematic && gather(&out.codeword, spec.info_set()) == info, || {
                    format!("{ord} K={k}: input {} not reproduced", info.to_hex())
                })?;
            }
            binary_specs += 1;
        }
    }

    let (mut ternary_specs, mut fully_systematic) = (0, 0);
    for (n, a, b) in lengths_up_to(36) {
        if b == 0 {
            continue;
        }
        for dims in multiset_orderings(a, b) {
            let g = Dense::generator(&dims);
            let ord = KernelOrdering::new(dims).unwrap();
            for k in 1..=n.min(12) {
                let spec = CodeSpec::construct(ord.clone(), k, 0.5, true).map_err(|e| e.to_string())?;
                let mut all = true;
                for x in 0..1u64 << k {
                    let info = from_u64(x, k);
                    let v = scatter(&info, &spec).unwrap();
                    let mut y = g.vecmat(&v);
                    for &f in spec.frozen_set() {
                        y.set(f, false);
                    }
                    let oracle = g.vecmat(&y);
                    let oracle_flag = gather(&oracle, spec.info_set()) == info;
                    let out = encode_systematic(&spec, &info).map_err(|e| e.to_string())?;
                    ensure(out.codeword == oracle && out.is_systematic == oracle_flag, || {
                        format!("{ord} K={k} input {}: flag {} vs oracle {oracle_flag}", info.to_hex(), out.is_systematic)
                    })?;
                    all &= oracle_flag;
                }
                // systematic for every input iff (G_II)^2 = I
                let gii = g.restrict(spec.info_set());
                ensure(all == is_identity(&mat_mul(&gii, &gii)), || format!("{ord} K={k}: G_II^2 criterion disagrees"))?;
                ternary_specs += 1;
                fully_systematic += usize::from(all);
            }
        }
    }
    Ok(format!(
        "{binary_specs} binary specs exhaustive; {ternary_specs} ternary-containing specs match the brute-force flag ({fully_systematic} fully systematic)"
    ))
}

fn supported_count() -> Result<String, String> {
    let lib: Vec<(usize, usize, usize)> = supported_lengths().iter().map(|l| (l.n, l.twos, l.threes)).collect();
    let oracle = lengths_up_to(32768);
    ensure(lib == oracle, || "listing differs from direct enumeration".into())?;
    ensure(lib.len() == 83, || format!("{} lengths", lib.len()))?;
    ensure(lib.first().map(|l| l.0) == Some(2) && lib.last().map(|l| l.0) == Some(32768), || {
        "wrong extremes".into()
    })?;
    Ok("83 lengths, min 2, max 32768".into())
}

fn random_config(rng: &mut ChaCha8Rng) -> (CodeSpec, ArchitectureConfig) {
    let lengths = lengths_up_to(2048);
    let (n, a, b) = lengths[rng.random_range(0..lengths.len())];
    let orderings = multiset_orderings(a, b);
    let dims = orderings[rng.random_range(0..orderings.len())].clone();
    let ord = KernelOrdering::new(dims).unwrap();
    let k = rng.random_range(1..=n);
    let eps = rng.random_range(0.05..0.95);
    let systematic = rng.random_bool(0.4);
    let mut cfg = match rng.random_range(0..3) {
        0 => ArchitectureConfig::combinational(),
        1 => ArchitectureConfig::pipelined(rng.random_range(0..7)),
        _ => ArchitectureConfig::deep(),
    };
    if systematic {
        cfg = cfg.with_systematic(rng.random_bool(0.5));
    }
    (CodeSpec::construct(ord, k, eps, systematic).unwrap(), cfg)
}

fn hdl_structure() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4d4c);
    let mut vectors = 0;
    for i in 0..FUZZ_CONFIGS {
        let (spec, cfg) = random_config(&mut rng);
        let tag = format!("config {i}: {} K={} {cfg:?}", spec.ordering(), spec.k());
        let bundle = hdl::generate(&spec, &cfg).map_err(|e| format!("{tag}: {e}"))?;
        let report = validate_structure(&bundle);
        ensure(report.passed(), || format!("{tag}: {report}"))?;

        let again = hdl::generate(&spec, &cfg).unwrap();
        ensure(again.files == bundle.files, || format!("{tag}: regeneration differs"))?;

        let len = spec.ordering().len();
        let m = &bundle.manifest.modules;
        ensure(m.len() == 1 + (len - 1) + 1 + 1, || format!("{tag}: {} modules for {len} kernels", m.len()))?;
        let vhd = bundle.files.iter().filter(|f| f.0.ends_with(".vhd")).count();
        ensure(vhd == m.len(), || format!("{tag}: {vhd} VHDL files"))?;

        let nps = cfg.placement(spec.ordering()).unwrap();
        let registered: Vec<usize> = m
            .iter()
            .filter(|x| matches!(x.kind, ModuleKind::Pe | ModuleKind::SubEncoder) && x.pipelined)
            .map(|x| x.size)
            .collect();
        ensure(registered == nps.sizes.iter().copied().collect::<Vec<_>>(), || {
            format!("{tag}: registered sizes {registered:?} vs NPS {:?}", nps.sizes)
        })?;

        ensure(bundle.testbench_vectors.len() >= 16, || format!("{tag}: too few vectors"))?;
        for (input, expected) in &bundle.testbench_vectors {
            let reference = if cfg.systematic {
                let info = gather(input, spec.info_set());
                ensure(scatter(&info, &spec).unwrap() == *input, || format!("{tag}: frozen input bit set"))?;
                encode_systematic(&spec, &info).unwrap().codeword
            } else {
                encode(spec.ordering(), input).unwrap()
            };
            ensure(reference == *expected, || format!("{tag}: golden vector disagrees with the reference"))?;
            vectors += 1;
        }
    }

    // byte-identical files on disk
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let spec = CodeSpec::construct(KernelOrdering::parse("2,3,2,3").unwrap(), 18, 0.5, true).unwrap();
    let cfg = ArchitectureConfig::pipelined(2).with_systematic(true);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    hdl::generate_into(&spec, &cfg, &a).map_err(|e| e.to_string())?;
    hdl::generate_into(&spec, &cfg, &b).map_err(|e| e.to_string())?;
    let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    for name in &names {
        let (x, y) = (std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap());
        if name == "manifest.json" {
            let strip = |bytes: &[u8]| {
                let mut v: serde_json::Value = serde_json::from_slice(bytes).unwrap();
                v.as_object_mut().unwrap().remove("elapsed_time_s");
                v
            };
            ensure(strip(&x) == strip(&y), || "manifest differs beyond T_c".into())?;
        } else {
            ensure(x == y, || format!("{name:?} differs between runs"))?;
        }
    }
    Ok(format!(
        "{FUZZ_CONFIGS} fuzzed configs validate, regenerate identically, match module-count formula and NPS; {vectors} golden vectors re-verified; {} files byte-identical on disk",
        names.len()
    ))
}

fn throughput_and_timing() -> Result<String, String> {
    let cases = [(1024usize, 282.0f64, 2.88768e11), (1024, 1080.0, 1.10592e12), (243, 923.0, 2.24289e11), (32768, 1.0, 3.2768e10)];
    for (n, f, expected) in cases {
        let (a, b) = mkpolar::kernel::factor_length(n).unwrap();
        let ord = KernelOrdering::from_counts(a, b).unwrap();
        let net = Netlist::build(&ord, &ArchitectureConfig::combinational()).unwrap();
        let r = net.performance_report(f).map_err(|e| e.to_string())?;
        let exact = (n as u64 * (f as u64) * 1_000_000) as f64;
        ensure(r.throughput_bps == exact && exact == expected, || {
            format!("N={n} f={f}: {} bps, expected {expected}", r.throughput_bps)
        })?;
    }
    let spec = CodeSpec::construct(KernelOrdering::from_counts(12, 0).unwrap(), 2048, 0.5, false).unwrap();
    let bundle = hdl::generate(&spec, &ArchitectureConfig::combinational()).map_err(|e| e.to_string())?;
    let tc = bundle.elapsed_time();
    ensure(tc > 0.0 && bundle.manifest.elapsed_time_s > 0.0, || "T_c not positive".into())?;
    Ok(format!(
        "throughput = N*f exactly on {} cases; T_c(N=4096) = {:.3} ms. Not reproduced at desk scale: FPGA frequencies/LUTs, the 1080 Gbps headline, absolute compile timings, BER curves",
        cases.len(),
        tc * 1e3
    ))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Check); 10] = [
        (1, "oracle equivalence", oracle_equivalence),
        (2, "BEC evolution exactness", bec_exactness),
        (3, "conservation", conservation),
        (4, "polarization measures", polarization_measures),
        (5, "complexity audit", complexity_audit),
        (6, "cycle-accurate streaming", streaming),
        (7, "systematic property", systematic_property),
        (8, "supported lengths", supported_count),
        (9, "HDL determinism and structure", hdl_structure),
        (10, "throughput model and T_c", throughput_and_timing),
    ];
    let mut failed = 0;
    for (id, name, check) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(check).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("[PASS] {id:>2} {name}: {detail} [{t:.2?}]"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {id:>2} {name}: {detail} [{t:.2?}]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
