//! VHDL-93 text for the generated entities.

use std::fmt::Write;

use crate::gf2::BitVector;

const HEADER: &str = "-- Generated by mkpolar. Do not edit.\n";

fn preamble(out: &mut String, comment: &str) {
    out.push_str(HEADER);
    writeln!(out, "-- {comment}").unwrap();
    out.push_str("library ieee;\nuse ieee.std_logic_1164.all;\n\n");
}

fn slv(width: usize) -> String {
    format!("std_logic_vector({} downto 0)", width - 1)
}

fn slice(name: &str, lo: usize, width: usize) -> String {
    format!("{name}({} downto {lo})", lo + width - 1)
}

fn entity_decl(out: &mut String, name: &str, width: usize, clocked: bool) {
    writeln!(out, "entity {name} is").unwrap();
    out.push_str("  port (\n");
    if clocked {
        out.push_str("    clk : in  std_logic;\n");
    }
    writeln!(out, "    u   : in  {};", slv(width)).unwrap();
    writeln!(out, "    x   : out {}", slv(width)).unwrap();
    out.push_str("  );\n");
    writeln!(out, "end entity {name};\n").unwrap();
}

fn output_register(out: &mut String) {
    out.push_str("  reg : process (clk)\n  begin\n    if rising_edge(clk) then\n");
    out.push_str("      x <= y;\n    end if;\n  end process reg;\n");
}

/// Kernel processing element of dimension `dim`. A registered PE drives
/// `x` from a clocked process.
pub fn processing_element(name: &str, dim: usize, registered: bool) -> String {
    let mut out = String::new();
    let what = if dim == 2 { "binary" } else { "ternary" };
    preamble(&mut out, &format!("{what} kernel processing element"));
    entity_decl(&mut out, name, dim, registered);
    let target = if registered { "y" } else { "x" };
    writeln!(out, "architecture rtl of {name} is").unwrap();
    if registered {
        writeln!(out, "  signal y : {};", slv(dim)).unwrap();
    }
    if dim == 3 {
        out.push_str("  signal t : std_logic;\n");
    }
    out.push_str("begin\n");
    if dim == 2 {
        writeln!(out, "  {target}(0) <= u(0) xor u(1);").unwrap();
        writeln!(out, "  {target}(1) <= u(1);").unwrap();
    } else {
        out.push_str("  t <= u(1) xor u(2);\n");
        writeln!(out, "  {target}(0) <= u(0) xor u(1);").unwrap();
        writeln!(out, "  {target}(1) <= u(0) xor u(2);").unwrap();
        writeln!(out, "  {target}(2) <= u(0) xor t;").unwrap();
    }
    if registered {
        output_register(&mut out);
    }
    writeln!(out, "end architecture rtl;").unwrap();
    out
}

/// Description of a child instance.
pub struct Child<'a> {
    pub entity: &'a str,
    pub size: usize,
    pub clocked: bool,
}

/// Sub-encoder of `dim * child.size` bits: `dim` child encoders followed by
/// one inline kernel stage.
pub fn sub_encoder(name: &str, dim: usize, child: &Child<'_>, clocked: bool, registered: bool) -> String {
    let c = child.size;
    let size = dim * c;
    let mut out = String::new();
    let kind = if registered { "pipelined" } else { "combinational" };
    preamble(
        &mut out,
        &format!("{kind} sub-encoder, {dim} x {} + kernel {dim}", child.entity),
    );
    entity_decl(&mut out, name, size, clocked);
    writeln!(out, "architecture rtl of {name} is").unwrap();
    writeln!(out, "  signal b : {};", slv(size)).unwrap();
    if dim == 3 {
        writeln!(out, "  signal t : {};", slv(c)).unwrap();
    }
    if registered {
        writeln!(out, "  signal y : {};", slv(size)).unwrap();
    }
    out.push_str("begin\n");
    for i in 0..dim {
        writeln!(out, "  sub{i} : entity work.{}", child.entity).unwrap();
        let clk = if child.clocked { "clk => clk, " } else { "" };
        writeln!(
            out,
            "    port map ({clk}u => {}, x => {});",
            slice("u", i * c, c),
            slice("b", i * c, c)
        )
        .unwrap();
    }
    let y = if registered { "y" } else { "x" };
    writeln!(out, "  g_stage : for q in 0 to {} generate", c - 1).unwrap();
    if dim == 2 {
        writeln!(out, "    {y}(q) <= b(q) xor b(q + {c});").unwrap();
        writeln!(out, "    {y}(q + {c}) <= b(q + {c});").unwrap();
    } else {
        let c2 = 2 * c;
        writeln!(out, "    t(q) <= b(q + {c}) xor b(q + {c2});").unwrap();
        writeln!(out, "    {y}(q) <= b(q) xor b(q + {c});").unwrap();
        writeln!(out, "    {y}(q + {c}) <= b(q) xor b(q + {c2});").unwrap();
        writeln!(out, "    {y}(q + {c2}) <= b(q) xor t(q);").unwrap();
    }
    out.push_str("  end generate g_stage;\n");
    if registered {
        output_register(&mut out);
    }
    writeln!(out, "end architecture rtl;").unwrap();
    out
}

/// Top-level wrapper variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopKind {
    /// Non-systematic encoder between input and output registers.
    CombEncReg,
    /// Two encoder passes with frozen-position zeroing in between.
    CombSysEncReg,
    /// As `CombSysEncReg` with a register bank between the passes.
    PipSysEncReg,
}

impl TopKind {
    pub fn label(self) -> &'static str {
        match self {
            TopKind::CombEncReg => "comb_enc_reg",
            TopKind::CombSysEncReg => "comb_sys_enc_reg",
            TopKind::PipSysEncReg => "pip_sys_enc_reg",
        }
    }
}

/// Top-level entity with input and output registers. `info_mask` has a one
/// at every information position (systematic variants only).
pub fn top(name: &str, kind: TopKind, n: usize, enc: &Child<'_>, info_mask: Option<&BitVector>) -> String {
    let mut out = String::new();
    let what = match kind {
        TopKind::CombEncReg => "non-systematic encoder with input/output registers",
        TopKind::CombSysEncReg => "systematic encoder (encode, zero frozen, encode)",
        TopKind::PipSysEncReg => "systematic encoder with a register bank between passes",
    };
    preamble(&mut out, what);
    entity_decl(&mut out, name, n, true);
    let vec_t = slv(n);
    let clk = if enc.clocked { "clk => clk, " } else { "" };
    writeln!(out, "architecture rtl of {name} is").unwrap();
    writeln!(out, "  signal u_reg : {vec_t};").unwrap();
    match kind {
        TopKind::CombEncReg => {
            writeln!(out, "  signal y_enc : {vec_t};").unwrap();
            out.push_str("begin\n");
            writeln!(out, "  enc : entity work.{}", enc.entity).unwrap();
            writeln!(out, "    port map ({clk}u => u_reg, x => y_enc);").unwrap();
            out.push_str("  regs : process (clk)\n  begin\n    if rising_edge(clk) then\n");
            out.push_str("      u_reg <= u;\n      x <= y_enc;\n");
        }
        TopKind::CombSysEncReg | TopKind::PipSysEncReg => {
            let mask = info_mask.expect("systematic top needs the information mask");
            let boundary = kind == TopKind::PipSysEncReg;
            writeln!(out, "  signal y1 : {vec_t};").unwrap();
            writeln!(out, "  signal z1 : {vec_t};").unwrap();
            if boundary {
                writeln!(out, "  signal z_reg : {vec_t};").unwrap();
            }
            writeln!(out, "  signal y2 : {vec_t};").unwrap();
            writeln!(
                out,
                "  constant INFO_MASK : {vec_t} :=\n    \"{}\";",
                mask.to_binary_msb_first()
            )
            .unwrap();
            out.push_str("begin\n");
            writeln!(out, "  pass1 : entity work.{}", enc.entity).unwrap();
            writeln!(out, "    port map ({clk}u => u_reg, x => y1);").unwrap();
            out.push_str("  z1 <= y1 and INFO_MASK;\n");
            let second_in = if boundary { "z_reg" } else { "z1" };
            writeln!(out, "  pass2 : entity work.{}", enc.entity).unwrap();
            writeln!(out, "    port map ({clk}u => {second_in}, x => y2);").unwrap();
            out.push_str("  regs : process (clk)\n  begin\n    if rising_edge(clk) then\n");
            out.push_str("      u_reg <= u;\n");
            if boundary {
                out.push_str("      z_reg <= z1;\n");
            }
            out.push_str("      x <= y2;\n");
        }
    }
    out.push_str("    end if;\n  end process regs;\n");
    writeln!(out, "end architecture rtl;").unwrap();
    out
}

/// Self-checking testbench driving one vector per clock cycle into `top`
/// and comparing the output `latency` cycles later.
pub fn testbench(top: &str, n: usize, latency: usize, vectors: &[(BitVector, BitVector)]) -> String {
    let mut out = String::new();
    preamble(&mut out, &format!("self-checking testbench for {top}"));
    out.push_str("entity tb_top is\nend entity tb_top;\n\n");
    out.push_str("architecture sim of tb_top is\n");
    writeln!(out, "  constant N   : integer := {n};").unwrap();
    writeln!(out, "  constant LAT : integer := {latency};").unwrap();
    writeln!(out, "  constant NV  : integer := {};", vectors.len()).unwrap();
    out.push_str("  type vec_array is array (0 to NV - 1) of std_logic_vector(N - 1 downto 0);\n");
    for (name, pick) in [("VIN", 0usize), ("VEXP", 1)] {
        writeln!(out, "  constant {name} : vec_array := (").unwrap();
        for (i, pair) in vectors.iter().enumerate() {
            let v = if pick == 0 { &pair.0 } else { &pair.1 };
            let sep = if i + 1 == vectors.len() { "" } else { "," };
            writeln!(out, "    {i} => \"{}\"{sep}", v.to_binary_msb_first()).unwrap();
        }
        out.push_str("  );\n");
    }
    out.push_str(
        "  function to_str(v : std_logic_vector) return string is
    variable s : string(1 to v'length);
    variable k : integer := 1;
  begin
    for i in v'range loop
      if v(i) = '1' then
        s(k) := '1';
      else
        s(k) := '0';
      end if;
      k := k + 1;
    end loop;
    return s;
  end function to_str;
  signal clk  : std_logic := '0';
  signal done : std_logic := '0';
  signal u    : std_logic_vector(N - 1 downto 0) := (others => '0');
  signal x    : std_logic_vector(N - 1 downto 0);
begin
",
    );
    writeln!(out, "  dut : entity work.{top}").unwrap();
    out.push_str("    port map (clk => clk, u => u, x => x);\n");
    out.push_str(
        "  clk <= not clk after 5 ns when done = '0' else '0';
  stim : process
    variable errors : integer := 0;
  begin
    for k in 0 to NV + LAT - 1 loop
      if k < NV then
        u <= VIN(k);
      else
        u <= (others => '0');
      end if;
      wait until rising_edge(clk);
      wait for 1 ns;
      if k >= LAT then
        if x /= VEXP(k - LAT) then
          errors := errors + 1;
          report \"vector \" & integer'image(k - LAT) & \" expected \" & to_str(VEXP(k - LAT)) & \" got \" & to_str(x) severity error;
        end if;
      end if;
    end loop;
    assert errors = 0 report \"testbench failed\" severity failure;
    report \"all vectors passed\" severity note;
    done <= '1';
    wait;
  end process stim;
end architecture sim;
",
    );
    out
}
