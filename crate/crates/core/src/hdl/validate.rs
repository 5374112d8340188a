//! Structural checker for the emitted VHDL subset.
//!
//! Parses entity/architecture pairs, then checks port maps against entity
//! declarations, assignment and slice widths, index bounds inside generate
//! loops, identifier declarations and block nesting.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use super::HdlBundle;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub file: String,
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.file, self.line, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub files_checked: usize,
    pub entities: usize,
    pub instances: usize,
    pub diagnostics: Vec<Diagnostic>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(
            f,
            "{verdict}: {} files, {} entities, {} instances, {} diagnostics",
            self.files_checked,
            self.entities,
            self.instances,
            self.diagnostics.len()
        )?;
        for d in &self.diagnostics {
            writeln!(f, "  {d}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(i64),
    Str(String),
    Char(char),
    Sym(&'static str),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
}

const SYMBOLS: [&str; 19] = [
    "<=", "=>", ":=", "/=", ">=", "(", ")", ";", ":", ",", "+", "-", "*", "&", "'", "=", "<", ">", ".",
];

fn tokenize(text: &str, file: &str, diags: &mut Vec<Diagnostic>) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut out: Vec<Token> = Vec::new();
    let mut line = 1;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            i += 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            out.push(Token {
                tok: Tok::Ident(word.to_ascii_lowercase()),
                line,
            });
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let value = digits.parse().unwrap_or(i64::MAX);
            out.push(Token {
                tok: Tok::Num(value),
                line,
            });
        } else if c == '"' {
            let start = i + 1;
            i += 1;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                i += 1;
            }
            if i >= chars.len() || chars[i] != '"' {
                diags.push(Diagnostic {
                    file: file.into(),
                    line,
                    message: "unterminated string literal".into(),
                });
                return out;
            }
            out.push(Token {
                tok: Tok::Str(chars[start..i].iter().collect()),
                line,
            });
            i += 1;
        } else if c == '\''
            && chars.get(i + 2) == Some(&'\'')
            && !matches!(out.last().map(|t| &t.tok), Some(Tok::Ident(_)) | Some(Tok::Sym(")")))
        {
            out.push(Token {
                tok: Tok::Char(chars[i + 1]),
                line,
            });
            i += 3;
        } else if let Some(sym) = SYMBOLS.iter().find(|s| {
            let s: Vec<char> = s.chars().collect();
            chars[i..].starts_with(&s)
        }) {
            out.push(Token {
                tok: Tok::Sym(sym),
                line,
            });
            i += sym.len();
        } else {
            diags.push(Diagnostic {
                file: file.into(),
                line,
                message: format!("unexpected character `{c}`"),
            });
            i += 1;
        }
    }
    out
}

/// Words that never need a declaration.
const RESERVED: &[&str] = &[
    "abs", "after", "all", "and", "downto", "else", "elsif", "error", "failure", "false", "for", "if",
    "image", "in", "integer", "length", "mod", "nand", "nor", "not", "note", "ns", "or", "others",
    "range", "rem", "report", "rising_edge", "falling_edge", "severity", "std_logic",
    "std_logic_vector", "string", "then", "to", "true", "until", "wait", "warning", "when", "xnor",
    "xor",
];

#[derive(Debug, Clone, PartialEq)]
enum Ty {
    Bit,
    Vec { hi: i64, lo: i64 },
    Unconstrained,
    Int,
    Array { elem: Box<Ty> },
    Other,
}

impl Ty {
    fn width(&self) -> Option<usize> {
        match self {
            Ty::Bit => Some(1),
            Ty::Vec { hi, lo } => Some((hi - lo + 1).max(0) as usize),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
struct Port {
    name: String,
    ty: Ty,
}

#[derive(Debug, Clone)]
struct EntityDecl {
    file: String,
    line: usize,
    ports: Vec<Port>,
}

#[derive(Debug, Clone)]
struct Assoc {
    formal: String,
    width: Option<usize>,
    line: usize,
}

#[derive(Debug, Clone)]
struct Instance {
    file: String,
    line: usize,
    parent: String,
    entity: String,
    assocs: Vec<Assoc>,
}

/// Scope of one architecture body.
#[derive(Default)]
struct Scope {
    names: HashMap<String, Ty>,
    consts: HashMap<String, i64>,
    types: HashMap<String, Ty>,
    functions: HashSet<String>,
    /// Generate-loop variables with their inclusive ranges.
    loops: Vec<(String, i64, i64)>,
}

struct Parser<'a> {
    file: &'a str,
    toks: Vec<Token>,
    pos: usize,
    last_line: usize,
    diags: &'a mut Vec<Diagnostic>,
    entities: &'a mut BTreeMap<String, EntityDecl>,
    instances: &'a mut Vec<Instance>,
}

/// Aborts parsing of the current file.
struct Abort;

type PResult<T> = std::result::Result<T, Abort>;

impl<'a> Parser<'a> {
    fn line(&self) -> usize {
        self.toks.get(self.pos).map_or(self.last_line, |t| t.line)
    }

    fn report(&mut self, line: usize, message: impl Into<String>) {
        self.diags.push(Diagnostic {
            file: self.file.into(),
            line,
            message: message.into(),
        });
    }

    fn fail<T>(&mut self, message: impl Into<String>) -> PResult<T> {
        let line = self.line();
        let message = if self.pos >= self.toks.len() {
            format!("unexpected end of file: {}", message.into())
        } else {
            message.into()
        };
        self.report(line, message);
        Err(Abort)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == w)
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(x)) if *x == s)
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_word(&mut self, w: &str) -> PResult<()> {
        if self.eat_word(w) {
            Ok(())
        } else {
            self.fail(format!("expected `{w}`"))
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.fail(format!("expected `{s}`"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.fail("expected identifier"),
        }
    }

    /// `end [kw] [name] ;`
    fn end_of(&mut self, kw: &str, name: Option<&str>) -> PResult<()> {
        let line = self.line();
        self.expect_word("end")?;
        self.expect_word(kw)?;
        if let Some(Tok::Ident(s)) = self.peek() {
            let s = s.clone();
            self.pos += 1;
            if let Some(n) = name {
                if s != n {
                    self.report(line, format!("`end {kw} {s}` closes `{n}`"));
                }
            }
        }
        self.expect_sym(";")
    }

    /// Tokens up to (not including) the first depth-0 terminator.
    fn collect(&mut self, stop_syms: &[&str], stop_words: &[&str]) -> PResult<Vec<Token>> {
        let mut depth = 0i32;
        let start = self.pos;
        loop {
            match self.peek() {
                None => return self.fail("unterminated statement"),
                Some(Tok::Sym("(")) => depth += 1,
                Some(Tok::Sym(")")) => {
                    if depth == 0 && stop_syms.contains(&")") {
                        break;
                    }
                    depth -= 1;
                }
                Some(Tok::Sym(s)) if depth == 0 && stop_syms.contains(s) => break,
                Some(Tok::Ident(w)) if depth == 0 && stop_words.contains(&w.as_str()) => break,
                _ => {}
            }
            self.pos += 1;
        }
        Ok(self.toks[start..self.pos].to_vec())
    }

    fn parse_file(&mut self) -> PResult<()> {
        while self.peek().is_some() {
            if self.eat_word("library") {
                self.ident()?;
                self.expect_sym(";")?;
            } else if self.eat_word("use") {
                self.collect(&[";"], &[])?;
                self.expect_sym(";")?;
            } else if self.is_word("entity") {
                self.entity()?;
            } else if self.is_word("architecture") {
                self.architecture()?;
            } else {
                return self.fail("expected a design unit");
            }
        }
        Ok(())
    }

    fn entity(&mut self) -> PResult<()> {
        let line = self.line();
        self.expect_word("entity")?;
        let name = self.ident()?;
        self.expect_word("is")?;
        let mut ports: Vec<Port> = Vec::new();
        let scope = Scope::default();
        if self.eat_word("port") {
            self.expect_sym("(")?;
            loop {
                let mut names = vec![self.ident()?];
                while self.eat_sym(",") {
                    names.push(self.ident()?);
                }
                self.expect_sym(":")?;
                if !(self.eat_word("in") || self.eat_word("out") || self.eat_word("inout")) {
                    return self.fail("expected port direction");
                }
                let ty = self.ty(&scope)?;
                for n in names {
                    if ports.iter().any(|p| p.name == n) {
                        self.report(line, format!("port `{n}` declared twice"));
                    }
                    ports.push(Port { name: n, ty: ty.clone() });
                }
                if !self.eat_sym(";") {
                    break;
                }
            }
            self.expect_sym(")")?;
            self.expect_sym(";")?;
        }
        self.end_of("entity", Some(&name))?;
        if self.entities.contains_key(&name) {
            self.report(line, format!("entity `{name}` declared twice"));
        }
        self.entities.insert(
            name,
            EntityDecl {
                file: self.file.into(),
                line,
                ports,
            },
        );
        Ok(())
    }

    fn ty(&mut self, scope: &Scope) -> PResult<Ty> {
        let line = self.line();
        let name = self.ident()?;
        match name.as_str() {
            "std_logic" => Ok(Ty::Bit),
            "integer" => Ok(Ty::Int),
            "std_logic_vector" => {
                if !self.eat_sym("(") {
                    return Ok(Ty::Unconstrained);
                }
                let hi = self.collect(&[], &["downto", "to"])?;
                if !self.eat_word("downto") {
                    return self.fail("expected `downto` in vector range");
                }
                let lo = self.collect(&[")"], &[])?;
                self.expect_sym(")")?;
                match (eval(&hi, scope, &[]), eval(&lo, scope, &[])) {
                    (Some(hi), Some(lo)) if hi >= lo => Ok(Ty::Vec { hi, lo }),
                    (Some(hi), Some(lo)) => {
                        self.report(line, format!("null range {hi} downto {lo}"));
                        Ok(Ty::Other)
                    }
                    _ => {
                        self.report(line, "cannot evaluate vector bounds");
                        Ok(Ty::Other)
                    }
                }
            }
            "string" => {
                if self.eat_sym("(") {
                    let range = self.collect(&[")"], &[])?;
                    self.check_idents(&range, scope);
                    self.expect_sym(")")?;
                }
                Ok(Ty::Other)
            }
            other => match scope.types.get(other) {
                Some(t) => Ok(t.clone()),
                None => {
                    self.report(line, format!("unknown type `{other}`"));
                    Ok(Ty::Other)
                }
            },
        }
    }

    fn architecture(&mut self) -> PResult<()> {
        let line = self.line();
        self.expect_word("architecture")?;
        let arch = self.ident()?;
        self.expect_word("of")?;
        let ent = self.ident()?;
        self.expect_word("is")?;
        let mut scope = Scope::default();
        match self.entities.get(&ent) {
            Some(e) => {
                for p in &e.ports {
                    scope.names.insert(p.name.clone(), p.ty.clone());
                }
            }
            None => self.report(line, format!("architecture of undeclared entity `{ent}`")),
        }
        while !self.is_word("begin") {
            if self.peek().is_none() {
                return self.fail("missing `begin`");
            }
            self.declaration(&mut scope)?;
        }
        self.expect_word("begin")?;
        while !self.is_word("end") {
            if self.peek().is_none() {
                return self.fail("missing `end architecture`");
            }
            self.concurrent(&mut scope, &ent)?;
        }
        self.end_of("architecture", Some(&arch))
    }

    fn names(&mut self) -> PResult<Vec<String>> {
        let mut names = vec![self.ident()?];
        while self.eat_sym(",") {
            names.push(self.ident()?);
        }
        Ok(names)
    }

    fn declaration(&mut self, scope: &mut Scope) -> PResult<()> {
        let line = self.line();
        let kw = self.ident()?;
        match kw.as_str() {
            "signal" | "variable" => {
                let names = self.names()?;
                self.expect_sym(":")?;
                let ty = self.ty(scope)?;
                if self.eat_sym(":=") {
                    let init = self.collect(&[";"], &[])?;
                    self.check_idents(&init, scope);
                    self.check_literal_width(&init, &ty, line);
                }
                self.expect_sym(";")?;
                for n in names {
                    scope.names.insert(n, ty.clone());
                }
            }
            "constant" => {
                let name = self.ident()?;
                self.expect_sym(":")?;
                let ty = self.ty(scope)?;
                self.expect_sym(":=")?;
                let init = self.collect(&[";"], &[])?;
                self.expect_sym(";")?;
                self.check_idents(&init, scope);
                if ty == Ty::Int {
                    match eval(&init, scope, &[]) {
                        Some(v) => {
                            scope.consts.insert(name.clone(), v);
                        }
                        None => self.report(line, format!("cannot evaluate constant `{name}`")),
                    }
                } else {
                    self.check_literal_width(&init, &ty, line);
                }
                scope.names.insert(name, ty);
            }
            "type" => {
                let name = self.ident()?;
                self.expect_word("is")?;
                self.expect_word("array")?;
                self.expect_sym("(")?;
                let range = self.collect(&[")"], &[])?;
                self.check_idents(&range, scope);
                self.expect_sym(")")?;
                self.expect_word("of")?;
                let elem = self.ty(scope)?;
                self.expect_sym(";")?;
                scope.types.insert(name, Ty::Array { elem: Box::new(elem) });
            }
            "function" => {
                let name = self.ident()?;
                scope.functions.insert(name.clone());
                self.expect_sym("(")?;
                loop {
                    let names = self.names()?;
                    self.expect_sym(":")?;
                    let ty = self.ty(scope)?;
                    for n in names {
                        scope.names.insert(n, ty.clone());
                    }
                    if !self.eat_sym(";") {
                        break;
                    }
                }
                self.expect_sym(")")?;
                self.expect_word("return")?;
                self.ty(scope)?;
                self.expect_word("is")?;
                while !self.is_word("begin") {
                    if self.peek().is_none() {
                        return self.fail("missing `begin` in function");
                    }
                    self.declaration(scope)?;
                }
                self.expect_word("begin")?;
                self.sequence(scope, &["end"])?;
                self.end_of("function", Some(&name))?;
            }
            other => {
                self.pos -= 1;
                return self.fail(format!("unexpected `{other}` in declarations"));
            }
        }
        Ok(())
    }

    fn concurrent(&mut self, scope: &mut Scope, parent: &str) -> PResult<()> {
        let line = self.line();
        if matches!(self.peek_at(1), Some(Tok::Sym(":"))) {
            let label = self.ident()?;
            self.expect_sym(":")?;
            if self.eat_word("entity") {
                return self.instance(scope, parent, line);
            }
            if self.eat_word("for") {
                let var = self.ident()?;
                self.expect_word("in")?;
                let lo = self.collect(&[], &["to"])?;
                self.expect_word("to")?;
                let hi = self.collect(&[], &["generate"])?;
                self.expect_word("generate")?;
                let range = (eval(&lo, scope, &[]), eval(&hi, scope, &[]));
                let (Some(lo), Some(hi)) = range else {
                    self.report(line, "cannot evaluate generate range");
                    return Err(Abort);
                };
                scope.names.insert(var.clone(), Ty::Int);
                scope.loops.push((var.clone(), lo, hi));
                while !self.is_word("end") {
                    if self.peek().is_none() {
                        return self.fail("missing `end generate`");
                    }
                    self.concurrent(scope, parent)?;
                }
                scope.loops.pop();
                scope.names.remove(&var);
                return self.end_of("generate", Some(&label));
            }
            if self.is_word("process") {
                return self.process(scope, Some(&label));
            }
            return self.fail(format!("unexpected statement after label `{label}`"));
        }
        if self.is_word("process") {
            return self.process(scope, None);
        }
        self.assignment(scope, "<=")
    }

    fn instance(&mut self, scope: &Scope, parent: &str, line: usize) -> PResult<()> {
        self.expect_word("work")?;
        self.expect_sym(".")?;
        let entity = self.ident()?;
        let mut assocs = Vec::new();
        if self.eat_word("port") {
            self.expect_word("map")?;
            self.expect_sym("(")?;
            loop {
                let aline = self.line();
                let formal = self.ident()?;
                self.expect_sym("=>")?;
                let actual = self.collect(&[",", ")"], &[])?;
                self.check_idents(&actual, scope);
                let width = self.width(&actual, scope, aline);
                assocs.push(Assoc {
                    formal,
                    width,
                    line: aline,
                });
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.expect_sym(")")?;
        }
        self.expect_sym(";")?;
        self.instances.push(Instance {
            file: self.file.into(),
            line,
            parent: parent.into(),
            entity,
            assocs,
        });
        Ok(())
    }

    fn process(&mut self, scope: &mut Scope, label: Option<&str>) -> PResult<()> {
        self.expect_word("process")?;
        if self.eat_sym("(") {
            let sens = self.collect(&[")"], &[])?;
            self.check_idents(&sens, scope);
            self.expect_sym(")")?;
        }
        self.eat_word("is");
        while !self.is_word("begin") {
            if self.peek().is_none() {
                return self.fail("missing `begin` in process");
            }
            self.declaration(scope)?;
        }
        self.expect_word("begin")?;
        self.sequence(scope, &["end"])?;
        self.end_of("process", label)
    }

    /// Sequential statements up to one of `stops` (not consumed).
    fn sequence(&mut self, scope: &mut Scope, stops: &[&str]) -> PResult<()> {
        loop {
            match self.peek() {
                None => return self.fail("unterminated block"),
                Some(Tok::Ident(w)) if stops.contains(&w.as_str()) => return Ok(()),
                _ => {}
            }
            let line = self.line();
            if self.eat_word("if") {
                loop {
                    let cond = self.collect(&[], &["then"])?;
                    self.check_idents(&cond, scope);
                    self.expect_word("then")?;
                    self.sequence(scope, &["elsif", "else", "end"])?;
                    if !self.eat_word("elsif") {
                        break;
                    }
                }
                if self.eat_word("else") {
                    self.sequence(scope, &["end"])?;
                }
                self.end_of("if", None)?;
            } else if self.eat_word("for") {
                let var = self.ident()?;
                self.expect_word("in")?;
                let range = self.collect(&[], &["loop"])?;
                self.check_idents(&range, scope);
                self.expect_word("loop")?;
                let shadowed = scope.names.insert(var.clone(), Ty::Int);
                self.sequence(scope, &["end"])?;
                match shadowed {
                    Some(t) => scope.names.insert(var, t),
                    None => scope.names.remove(&var),
                };
                self.end_of("loop", None)?;
            } else if ["wait", "assert", "report", "return"]
                .iter()
                .any(|w| self.is_word(w))
            {
                self.pos += 1;
                let rest = self.collect(&[";"], &[])?;
                self.check_idents(&rest, scope);
                self.expect_sym(";")?;
            } else if matches!(self.peek(), Some(Tok::Ident(_))) {
                let op = if self.target_then(":=") { ":=" } else { "<=" };
                self.assignment(scope, op)?;
            } else {
                self.report(line, "unexpected token in sequential code");
                return Err(Abort);
            }
        }
    }

    /// Whether the statement at the cursor uses `op` as its assignment.
    fn target_then(&self, op: &str) -> bool {
        let mut depth = 0;
        for t in &self.toks[self.pos..] {
            match &t.tok {
                Tok::Sym("(") => depth += 1,
                Tok::Sym(")") => depth -= 1,
                Tok::Sym(s) if depth == 0 && (*s == "<=" || *s == ":=") => return *s == op,
                Tok::Sym(";") => return false,
                _ => {}
            }
        }
        false
    }

    fn assignment(&mut self, scope: &Scope, op: &str) -> PResult<()> {
        let line = self.line();
        let target = self.collect(&[op, ";"], &[])?;
        if !self.eat_sym(op) {
            return self.fail(format!("expected `{op}`"));
        }
        let value = self.collect(&[";"], &[])?;
        self.expect_sym(";")?;
        if target.is_empty() {
            self.report(line, "assignment without target");
            return Ok(());
        }
        self.check_idents(&target, scope);
        self.check_idents(&value, scope);
        let tw = self.width(&target, scope, line);
        let vw = self.width(&value, scope, line);
        if let (Some(t), Some(v)) = (tw, vw) {
            if t != v {
                self.report(line, format!("width mismatch in assignment: target is {t} bits, value is {v} bits"));
            }
        }
        Ok(())
    }

    fn check_idents(&mut self, toks: &[Token], scope: &Scope) {
        let mut after_tick = false;
        for (i, t) in toks.iter().enumerate() {
            if let Tok::Ident(name) = &t.tok {
                // named association inside aggregates
                let after_arrow_target = matches!(toks.get(i + 1).map(|t| &t.tok), Some(Tok::Sym("=>")));
                let known = after_tick
                    || RESERVED.contains(&name.as_str())
                    || scope.names.contains_key(name)
                    || scope.consts.contains_key(name)
                    || scope.functions.contains(name)
                    || scope.types.contains_key(name);
                if !known && !after_arrow_target {
                    self.report(t.line, format!("undeclared identifier `{name}`"));
                }
            }
            after_tick = t.tok == Tok::Sym("'");
        }
    }

    /// String-literal widths in an initializer must match the declared type.
    fn check_literal_width(&mut self, init: &[Token], ty: &Ty, line: usize) {
        let expect = match ty {
            Ty::Vec { .. } => ty.width(),
            Ty::Array { elem } => elem.width(),
            _ => None,
        };
        let Some(w) = expect else { return };
        for t in init {
            if let Tok::Str(s) = &t.tok {
                if s.len() != w {
                    self.report(t.line.max(line), format!("literal of {} bits where {w} expected", s.len()));
                }
                if let Some(bad) = s.chars().find(|c| !matches!(c, '0' | '1')) {
                    self.report(t.line, format!("invalid bit `{bad}` in literal"));
                }
            }
        }
    }

    /// Width of a simple expression: primaries joined by logical operators.
    /// `None` when the expression is outside that shape.
    fn width(&mut self, toks: &[Token], scope: &Scope, line: usize) -> Option<usize> {
        let mut widths = Vec::new();
        let mut depth = 0;
        let mut start = 0;
        for (i, t) in toks.iter().enumerate() {
            match &t.tok {
                Tok::Sym("(") => depth += 1,
                Tok::Sym(")") => depth -= 1,
                Tok::Ident(w) if depth == 0 && ["xor", "and", "or", "nand", "nor", "xnor"].contains(&w.as_str()) => {
                    widths.push(self.primary_width(&toks[start..i], scope, line));
                    start = i + 1;
                }
                _ => {}
            }
        }
        widths.push(self.primary_width(&toks[start..], scope, line));
        let known: Option<Vec<usize>> = widths.into_iter().collect();
        let known = known?;
        if known.windows(2).any(|w| w[0] != w[1]) {
            self.report(line, format!("operand widths differ: {known:?}"));
            return None;
        }
        known.first().copied()
    }

    fn primary_width(&mut self, toks: &[Token], scope: &Scope, line: usize) -> Option<usize> {
        let toks = match toks.first().map(|t| &t.tok) {
            Some(Tok::Ident(w)) if w == "not" => &toks[1..],
            _ => toks,
        };
        match toks {
            [t] => match &t.tok {
                Tok::Char(_) => Some(1),
                Tok::Str(s) => Some(s.len()),
                Tok::Ident(n) => scope.names.get(n).and_then(Ty::width),
                _ => None,
            },
            [name, open, inner @ .., close]
                if open.tok == Tok::Sym("(") && close.tok == Tok::Sym(")") =>
            {
                let Tok::Ident(n) = &name.tok else { return None };
                let ty = scope.names.get(n)?.clone();
                match ty {
                    Ty::Array { elem } => elem.width(),
                    Ty::Vec { hi, lo } => {
                        let split = inner.iter().position(|t| t.tok == Tok::Ident("downto".into()));
                        match split {
                            Some(p) => {
                                let a = self.check_index(n, &inner[..p], hi, lo, scope, line);
                                let b = self.check_index(n, &inner[p + 1..], hi, lo, scope, line);
                                match (a, b) {
                                    (Some(a), Some(b)) if a >= b => Some((a - b + 1) as usize),
                                    (Some(a), Some(b)) => {
                                        self.report(line, format!("null slice {n}({a} downto {b})"));
                                        None
                                    }
                                    _ => None,
                                }
                            }
                            None => {
                                self.check_index(n, inner, hi, lo, scope, line);
                                Some(1)
                            }
                        }
                    }
                    _ => None,
                }
            }
            _ => None,
        }
    }

    /// Checks an index expression against `hi downto lo` at every corner of
    /// the enclosing generate ranges. Returns the value when it does not
    /// depend on a loop variable.
    fn check_index(&mut self, name: &str, expr: &[Token], hi: i64, lo: i64, scope: &Scope, line: usize) -> Option<i64> {
        let corners = 1usize << scope.loops.len();
        let mut first = None;
        let mut constant = true;
        for mask in 0..corners {
            let env: Vec<(String, i64)> = scope
                .loops
                .iter()
                .enumerate()
                .map(|(i, (v, a, b))| (v.clone(), if mask >> i & 1 == 0 { *a } else { *b }))
                .collect();
            let v = eval(expr, scope, &env)?;
            if v < lo || v > hi {
                self.report(line, format!("index {v} out of range for {name}({hi} downto {lo})"));
                return None;
            }
            match first {
                None => first = Some(v),
                Some(f) if f != v => constant = false,
                _ => {}
            }
        }
        if constant {
            first
        } else {
            None
        }
    }
}

/// Integer expression over numbers, constants and loop variables with
/// `+ - *` and parentheses.
fn eval(toks: &[Token], scope: &Scope, env: &[(String, i64)]) -> Option<i64> {
    let mut pos = 0;
    let v = eval_sum(toks, &mut pos, scope, env)?;
    (pos == toks.len()).then_some(v)
}

fn eval_sum(toks: &[Token], pos: &mut usize, scope: &Scope, env: &[(String, i64)]) -> Option<i64> {
    let mut acc = eval_product(toks, pos, scope, env)?;
    while let Some(Tok::Sym(op @ ("+" | "-"))) = toks.get(*pos).map(|t| &t.tok) {
        *pos += 1;
        let rhs = eval_product(toks, pos, scope, env)?;
        acc = if *op == "+" { acc.checked_add(rhs)? } else { acc.checked_sub(rhs)? };
    }
    Some(acc)
}

fn eval_product(toks: &[Token], pos: &mut usize, scope: &Scope, env: &[(String, i64)]) -> Option<i64> {
    let mut acc = eval_atom(toks, pos, scope, env)?;
    while let Some(Tok::Sym("*")) = toks.get(*pos).map(|t| &t.tok) {
        *pos += 1;
        acc = acc.checked_mul(eval_atom(toks, pos, scope, env)?)?;
    }
    Some(acc)
}

fn eval_atom(toks: &[Token], pos: &mut usize, scope: &Scope, env: &[(String, i64)]) -> Option<i64> {
    let t = toks.get(*pos)?;
    *pos += 1;
    match &t.tok {
        Tok::Num(v) => Some(*v),
        Tok::Sym("-") => eval_atom(toks, pos, scope, env).map(|v| -v),
        Tok::Sym("(") => {
            let v = eval_sum(toks, pos, scope, env)?;
            match toks.get(*pos).map(|t| &t.tok) {
                Some(Tok::Sym(")")) => {
                    *pos += 1;
                    Some(v)
                }
                _ => None,
            }
        }
        Tok::Ident(n) => env
            .iter()
            .find(|(v, _)| v == n)
            .map(|(_, x)| *x)
            .or_else(|| scope.consts.get(n).copied()),
        _ => None,
    }
}

fn width_of(ty: &Ty) -> String {
    ty.width().map_or_else(|| "unconstrained".into(), |w| format!("{w}-bit"))
}

/// Checks every `.vhd` file of `bundle`.
pub fn validate_structure(bundle: &HdlBundle) -> ValidationReport {
    validate_files(
        bundle
            .files
            .iter()
            .map(|(n, t)| (n.as_str(), t.as_str())),
    )
}

/// As [`validate_structure`] over raw `(filename, text)` pairs.
pub fn validate_files<'a>(files: impl IntoIterator<Item = (&'a str, &'a str)>) -> ValidationReport {
    let mut diags = Vec::new();
    let mut entities = BTreeMap::new();
    let mut instances = Vec::new();
    let mut seen = HashSet::new();
    let mut checked = 0;

    for (name, text) in files {
        if !seen.insert(name.to_string()) {
            diags.push(Diagnostic {
                file: name.into(),
                line: 0,
                message: "duplicate filename".into(),
            });
        }
        if !name.ends_with(".vhd") {
            continue;
        }
        checked += 1;
        if !text.is_ascii() {
            diags.push(Diagnostic {
                file: name.into(),
                line: 1,
                message: "non-ASCII text".into(),
            });
        }
        if !text.ends_with('\n') {
            diags.push(Diagnostic {
                file: name.into(),
                line: text.lines().count().max(1),
                message: "missing final newline".into(),
            });
        }
        let toks = tokenize(text, name, &mut diags);
        let last_line = text.lines().count().max(1);
        let mut p = Parser {
            file: name,
            toks,
            pos: 0,
            last_line,
            diags: &mut diags,
            entities: &mut entities,
            instances: &mut instances,
        };
        let _ = p.parse_file();
    }

    for inst in &instances {
        let Some(decl) = entities.get(&inst.entity) else {
            diags.push(Diagnostic {
                file: inst.file.clone(),
                line: inst.line,
                message: format!("instantiates undeclared entity `{}`", inst.entity),
            });
            continue;
        };
        let mut bound = HashSet::new();
        for a in &inst.assocs {
            if !bound.insert(a.formal.as_str()) {
                diags.push(Diagnostic {
                    file: inst.file.clone(),
                    line: a.line,
                    message: format!("port `{}` associated twice", a.formal),
                });
            }
            match decl.ports.iter().find(|p| p.name == a.formal) {
                None => diags.push(Diagnostic {
                    file: inst.file.clone(),
                    line: a.line,
                    message: format!("entity `{}` has no port `{}`", inst.entity, a.formal),
                }),
                Some(port) => {
                    if let Some(w) = a.width {
                        if port.ty.width() != Some(w) {
                            diags.push(Diagnostic {
                                file: inst.file.clone(),
                                line: a.line,
                                message: format!(
                                    "width mismatch: port `{}` of `{}` ({}:{}) is {}, actual is {w}-bit",
                                    a.formal,
                                    inst.entity,
                                    decl.file,
                                    decl.line,
                                    width_of(&port.ty)
                                ),
                            });
                        }
                    }
                }
            }
        }
        for p in &decl.ports {
            if !bound.contains(p.name.as_str()) {
                diags.push(Diagnostic {
                    file: inst.file.clone(),
                    line: inst.line,
                    message: format!("port `{}` of `{}` left unconnected", p.name, inst.entity),
                });
            }
        }
    }

    // hierarchy must be acyclic
    let mut children: BTreeMap<&str, Vec<&Instance>> = BTreeMap::new();
    for inst in &instances {
        children.entry(inst.parent.as_str()).or_default().push(inst);
    }
    let mut state: HashMap<&str, u8> = HashMap::new();
    fn visit<'a>(
        node: &'a str,
        children: &BTreeMap<&'a str, Vec<&'a Instance>>,
        state: &mut HashMap<&'a str, u8>,
        diags: &mut Vec<Diagnostic>,
    ) {
        state.insert(node, 1);
        for inst in children.get(node).into_iter().flatten() {
            match state.get(inst.entity.as_str()) {
                Some(1) => diags.push(Diagnostic {
                    file: inst.file.clone(),
                    line: inst.line,
                    message: format!("instantiation cycle through `{}`", inst.entity),
                }),
                Some(_) => {}
                None => visit(&inst.entity, children, state, diags),
            }
        }
        state.insert(node, 2);
    }
    for &root in children.keys() {
        if !state.contains_key(root) {
            visit(root, &children, &mut state, &mut diags);
        }
    }

    ValidationReport {
        files_checked: checked,
        entities: entities.len(),
        instances: instances.len(),
        diagnostics: diags,
    }
}
