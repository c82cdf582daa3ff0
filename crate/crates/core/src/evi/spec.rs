//! Line-based verification spec files.
//!
//! ```text
//! germ-spec v1
//! layout pledge.layout
//! fuel 16
//! program pledge.ipl
//! var complete : bool = sym b1
//! var refnd : bool = false
//! assert case n == 0 || b1 : reverted && memory == init
//! assert else : read(refnd) == true
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

use crate::ipl::{Lit, Ty};
use crate::mem::is_identifier;

pub const SPEC_HEADER: &str = "germ-spec v1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {reason}")]
pub struct SpecParseError {
    pub line: usize,
    pub reason: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Init {
    Lit(Lit),
    Sym,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub ty: Ty,
    pub init: Init,
    /// Symbol name when `init` is [`Init::Sym`].
    pub symbol: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GuardAtom {
    IsZero(String),
    NonZero(String),
    IsTrue(String),
    IsFalse(String),
}

impl GuardAtom {
    pub fn symbol(&self) -> &str {
        match self {
            GuardAtom::IsZero(s) | GuardAtom::NonZero(s) | GuardAtom::IsTrue(s) | GuardAtom::IsFalse(s) => s,
        }
    }
}

/// `&&` binds tighter than `||`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Guard {
    Atom(GuardAtom),
    And(Box<Guard>, Box<Guard>),
    Or(Box<Guard>, Box<Guard>),
}

impl Guard {
    pub fn symbols(&self, out: &mut Vec<String>) {
        match self {
            Guard::Atom(a) => {
                if !out.iter().any(|s| s == a.symbol()) {
                    out.push(a.symbol().to_string());
                }
            }
            Guard::And(l, r) | Guard::Or(l, r) => {
                l.symbols(out);
                r.symbols(out);
            }
        }
    }

    /// Evaluates under a lookup; `None` if a symbol is missing.
    pub fn eval(&self, lookup: &dyn Fn(&str) -> Option<Lit>) -> Option<bool> {
        Some(match self {
            Guard::Atom(a) => match (a, lookup(a.symbol())?) {
                (GuardAtom::IsZero(_), Lit::Nat(n)) => n == 0,
                (GuardAtom::NonZero(_), Lit::Nat(n)) => n != 0,
                (GuardAtom::IsTrue(_), Lit::Bool(b)) => b,
                (GuardAtom::IsFalse(_), Lit::Bool(b)) => !b,
                _ => return None,
            },
            Guard::And(l, r) => l.eval(lookup)? && r.eval(lookup)?,
            Guard::Or(l, r) => l.eval(lookup)? || r.eval(lookup)?,
        })
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guard::Atom(GuardAtom::IsZero(s)) => write!(f, "{s} == 0"),
            Guard::Atom(GuardAtom::NonZero(s)) => write!(f, "{s} != 0"),
            Guard::Atom(GuardAtom::IsTrue(s)) => write!(f, "{s}"),
            Guard::Atom(GuardAtom::IsFalse(s)) => write!(f, "!{s}"),
            Guard::And(l, r) => write!(f, "{l} && {r}"),
            Guard::Or(l, r) => write!(f, "{l} || {r}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Assertion {
    Reverted,
    MemoryIsInit,
    ReadEq(String, Lit),
    FrameExcept(Vec<String>),
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assertion::Reverted => write!(f, "reverted"),
            Assertion::MemoryIsInit => write!(f, "memory == init"),
            Assertion::ReadEq(x, lit) => write!(f, "read({x}) == {lit}"),
            Assertion::FrameExcept(xs) => write!(f, "frame_except({})", xs.join(", ")),
        }
    }
}

/// Renders an assertion list the way it is written in a spec.
pub fn render_assertions(list: &[Assertion]) -> String {
    list.iter().map(ToString::to_string).collect::<Vec<_>>().join(" && ")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Case {
    pub guard: Guard,
    pub assertions: Vec<Assertion>,
}

/// One disjunct of a loop invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantClause {
    pub loop_label: String,
    pub assertions: Vec<Assertion>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spec {
    pub layout: PathBuf,
    pub fuel: u64,
    pub program: PathBuf,
    pub vars: Vec<VarDecl>,
    pub invariants: Vec<InvariantClause>,
    pub cases: Vec<Case>,
    pub else_case: Option<Vec<Assertion>>,
}

impl Spec {
    /// Declared symbols with their kinds, in first-use order.
    pub fn symbols(&self) -> Vec<(String, Ty)> {
        let mut out: Vec<(String, Ty)> = Vec::new();
        for v in &self.vars {
            if let Some(s) = &v.symbol {
                if !out.iter().any(|(n, _)| n == s) {
                    out.push((s.clone(), v.ty));
                }
            }
        }
        out
    }

    /// The loop the invariant clauses talk about, if any.
    pub fn invariant_loop(&self) -> Option<&str> {
        self.invariants.first().map(|c| c.loop_label.as_str())
    }

    pub fn parse(text: &str) -> Result<Spec, SpecParseError> {
        Parser::default().run(text)
    }
}

fn err(line: usize, reason: impl Into<String>) -> SpecParseError {
    SpecParseError {
        line,
        reason: reason.into(),
    }
}

fn parse_lit(s: &str) -> Option<Lit> {
    match s {
        "true" => Some(Lit::Bool(true)),
        "false" => Some(Lit::Bool(false)),
        _ if !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) => s.parse().ok().map(Lit::Nat),
        _ => None,
    }
}

fn parse_ty(s: &str) -> Option<Ty> {
    match s {
        "nat" => Some(Ty::Nat),
        "bool" => Some(Ty::Bool),
        _ => None,
    }
}

fn parse_guard_atom(s: &str) -> Option<GuardAtom> {
    let s = s.trim();
    if let Some((l, r)) = s.split_once("==") {
        let (l, r) = (l.trim(), r.trim());
        return (r == "0" && is_identifier(l)).then(|| GuardAtom::IsZero(l.into()));
    }
    if let Some((l, r)) = s.split_once("!=") {
        let (l, r) = (l.trim(), r.trim());
        return (r == "0" && is_identifier(l)).then(|| GuardAtom::NonZero(l.into()));
    }
    if let Some(rest) = s.strip_prefix('!') {
        let rest = rest.trim();
        return is_identifier(rest).then(|| GuardAtom::IsFalse(rest.into()));
    }
    is_identifier(s).then(|| GuardAtom::IsTrue(s.into()))
}

fn parse_guard(s: &str) -> Option<Guard> {
    let mut disj: Option<Guard> = None;
    for part in s.split("||") {
        let mut conj: Option<Guard> = None;
        for atom in part.split("&&") {
            let a = Guard::Atom(parse_guard_atom(atom)?);
            conj = Some(match conj {
                None => a,
                Some(c) => Guard::And(Box::new(c), Box::new(a)),
            });
        }
        let c = conj?;
        disj = Some(match disj {
            None => c,
            Some(d) => Guard::Or(Box::new(d), Box::new(c)),
        });
    }
    disj
}

fn parse_assertion(s: &str) -> Result<Assertion, String> {
    let s = s.trim();
    let compact: String = s.split_whitespace().collect::<Vec<_>>().join(" ");
    if compact == "reverted" {
        return Ok(Assertion::Reverted);
    }
    if compact == "memory == init" {
        return Ok(Assertion::MemoryIsInit);
    }
    if let Some(rest) = s.strip_prefix("read") {
        let rest = rest.trim_start();
        let inner = rest.strip_prefix('(').ok_or("expected `(` after `read`")?;
        let (name, tail) = inner.split_once(')').ok_or("unclosed `read(`")?;
        let name = name.trim();
        if !is_identifier(name) {
            return Err(format!("bad variable name `{name}`"));
        }
        let lit = tail.trim().strip_prefix("==").ok_or("expected `==` after `read(..)`")?.trim();
        let lit = parse_lit(lit).ok_or_else(|| format!("bad literal `{lit}`"))?;
        return Ok(Assertion::ReadEq(name.into(), lit));
    }
    if let Some(rest) = s.strip_prefix("frame_except") {
        let inner = rest
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or("expected `frame_except(<names>)`")?;
        let mut names = Vec::new();
        for n in inner.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            if !is_identifier(n) {
                return Err(format!("bad variable name `{n}`"));
            }
            names.push(n.to_string());
        }
        return Ok(Assertion::FrameExcept(names));
    }
    Err(format!("unknown assertion `{s}`"))
}

fn parse_assertions(s: &str) -> Result<Vec<Assertion>, String> {
    let list = s.split("&&").map(parse_assertion).collect::<Result<Vec<_>, _>>()?;
    Ok(list)
}

#[derive(Default)]
struct Parser {
    layout: Option<PathBuf>,
    fuel: Option<u64>,
    program: Option<PathBuf>,
    vars: Vec<VarDecl>,
    invariants: Vec<InvariantClause>,
    cases: Vec<Case>,
    else_case: Option<Vec<Assertion>>,
    /// Where each guard / assertion list was written, for late validation.
    guard_lines: Vec<usize>,
    assertion_lines: Vec<(usize, Vec<Assertion>)>,
}

impl Parser {
    fn run(mut self, text: &str) -> Result<Spec, SpecParseError> {
        let mut seen_header = false;
        let mut last_line = 0;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            last_line = line_no;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if !seen_header {
                if line != SPEC_HEADER {
                    return Err(err(line_no, format!("expected `{SPEC_HEADER}` header")));
                }
                seen_header = true;
                continue;
            }
            self.line(line_no, line)?;
        }
        if !seen_header {
            return Err(err(1, format!("expected `{SPEC_HEADER}` header")));
        }
        self.finish(last_line.max(1))
    }

    fn line(&mut self, n: usize, line: &str) -> Result<(), SpecParseError> {
        let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match kw {
            "layout" | "program" => {
                if rest.is_empty() {
                    return Err(err(n, format!("`{kw}` needs a path")));
                }
                let slot = if kw == "layout" { &mut self.layout } else { &mut self.program };
                if slot.replace(PathBuf::from(rest)).is_some() {
                    return Err(err(n, format!("duplicate `{kw}` directive")));
                }
            }
            "fuel" => {
                let f = rest.parse::<u64>().map_err(|_| err(n, format!("bad fuel `{rest}`")))?;
                if self.fuel.replace(f).is_some() {
                    return Err(err(n, "duplicate `fuel` directive"));
                }
            }
            "var" => self.var(n, rest)?,
            "invariant" => {
                let (label, body) = rest.split_once(':').ok_or_else(|| err(n, "expected `invariant <loop> : <assertions>`"))?;
                let label = label.trim();
                if !is_identifier(label) {
                    return Err(err(n, format!("bad loop label `{label}`")));
                }
                if let Some(first) = self.invariants.first() {
                    if first.loop_label != label {
                        return Err(err(n, "invariants for more than one loop"));
                    }
                }
                let assertions = parse_assertions(body).map_err(|r| err(n, r))?;
                self.assertion_lines.push((n, assertions.clone()));
                self.invariants.push(InvariantClause {
                    loop_label: label.into(),
                    assertions,
                });
            }
            "assert" => {
                let (head, body) = rest.split_once(':').ok_or_else(|| err(n, "expected `assert ... : <assertions>`"))?;
                let assertions = parse_assertions(body).map_err(|r| err(n, r))?;
                self.assertion_lines.push((n, assertions.clone()));
                let head = head.trim();
                if head == "else" {
                    if self.else_case.replace(assertions).is_some() {
                        return Err(err(n, "duplicate `assert else`"));
                    }
                } else if let Some(g) = head.strip_prefix("case") {
                    if self.else_case.is_some() {
                        return Err(err(n, "`assert case` after `assert else`"));
                    }
                    let guard = parse_guard(g).ok_or_else(|| err(n, format!("bad guard `{}`", g.trim())))?;
                    self.guard_lines.push(n);
                    self.cases.push(Case { guard, assertions });
                } else {
                    return Err(err(n, "expected `assert case` or `assert else`"));
                }
            }
            other => return Err(err(n, format!("unknown directive `{other}`"))),
        }
        Ok(())
    }

    fn var(&mut self, n: usize, rest: &str) -> Result<(), SpecParseError> {
        let (name, tail) = rest.split_once(':').ok_or_else(|| err(n, "expected `var <name> : <type> = <init>`"))?;
        let (ty, init) = tail.split_once('=').ok_or_else(|| err(n, "expected `= <init>`"))?;
        let name = name.trim();
        if !is_identifier(name) {
            return Err(err(n, format!("bad variable name `{name}`")));
        }
        if self.vars.iter().any(|v| v.name == name) {
            return Err(err(n, format!("duplicate variable `{name}`")));
        }
        let ty = parse_ty(ty.trim()).ok_or_else(|| err(n, format!("unknown type `{}`", ty.trim())))?;
        let init = init.trim();
        let decl = if let Some(sym) = init.strip_prefix("sym ") {
            let sym = sym.trim();
            if !is_identifier(sym) {
                return Err(err(n, format!("bad symbol name `{sym}`")));
            }
            if let Some(prev) = self.vars.iter().find(|v| v.symbol.as_deref() == Some(sym)) {
                if prev.ty != ty {
                    return Err(err(n, format!("symbol `{sym}` used at two types")));
                }
            }
            VarDecl {
                name: name.into(),
                ty,
                init: Init::Sym,
                symbol: Some(sym.into()),
            }
        } else {
            let lit = parse_lit(init).ok_or_else(|| err(n, format!("bad initializer `{init}`")))?;
            if lit.ty() != ty {
                return Err(err(n, format!("initializer `{init}` is not a {ty}")));
            }
            VarDecl {
                name: name.into(),
                ty,
                init: Init::Lit(lit),
                symbol: None,
            }
        };
        self.vars.push(decl);
        Ok(())
    }

    fn finish(self, last: usize) -> Result<Spec, SpecParseError> {
        let layout = self.layout.ok_or_else(|| err(last, "missing `layout` directive"))?;
        let fuel = self.fuel.ok_or_else(|| err(last, "missing `fuel` directive"))?;
        let program = self.program.ok_or_else(|| err(last, "missing `program` directive"))?;
        let syms: HashMap<&str, Ty> = self
            .vars
            .iter()
            .filter_map(|v| v.symbol.as_deref().map(|s| (s, v.ty)))
            .collect();
        for (case, line) in self.cases.iter().zip(&self.guard_lines) {
            check_guard(&case.guard, &syms, *line)?;
        }
        let vars: BTreeSet<&str> = self.vars.iter().map(|v| v.name.as_str()).collect();
        for (line, list) in &self.assertion_lines {
            for a in list {
                let names: Vec<&String> = match a {
                    Assertion::ReadEq(x, _) => vec![x],
                    Assertion::FrameExcept(xs) => xs.iter().collect(),
                    _ => Vec::new(),
                };
                for x in names {
                    if !vars.contains(x.as_str()) {
                        return Err(err(*line, format!("undeclared variable `{x}`")));
                    }
                }
                if let Assertion::ReadEq(x, lit) = a {
                    let ty = self.vars.iter().find(|v| &v.name == x).unwrap().ty;
                    if lit.ty() != ty {
                        return Err(err(*line, format!("`{x}` is a {ty}, not compared with {lit}")));
                    }
                }
            }
        }
        Ok(Spec {
            layout,
            fuel,
            program,
            vars: self.vars,
            invariants: self.invariants,
            cases: self.cases,
            else_case: self.else_case,
        })
    }
}

fn check_guard(g: &Guard, syms: &HashMap<&str, Ty>, line: usize) -> Result<(), SpecParseError> {
    match g {
        Guard::Atom(a) => {
            let ty = syms
                .get(a.symbol())
                .ok_or_else(|| err(line, format!("undeclared symbol `{}`", a.symbol())))?;
            let want = match a {
                GuardAtom::IsZero(_) | GuardAtom::NonZero(_) => Ty::Nat,
                _ => Ty::Bool,
            };
            if *ty != want {
                return Err(err(line, format!("symbol `{}` is a {ty}, used as a {want}", a.symbol())));
            }
            Ok(())
        }
        Guard::And(l, r) | Guard::Or(l, r) => {
            check_guard(l, syms, line)?;
            check_guard(r, syms, line)
        }
    }
}
