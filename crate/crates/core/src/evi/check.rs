//! Triple checking: precondition construction, guard dispatch, assertion
//! evaluation, and the head / step / tail split for loop invariants.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use super::exec::{apply_condition, split_on_condition, sym_exec_from, Decision, PathResult, PathState};
use super::path::{Atom, PathCondition};
use super::spec::{render_assertions, Assertion, Init, Spec, SpecParseError};
use super::sym::{Binding, SymData, SymId, SymKind, SymMemory, SymValue, Symbols};
use crate::interp::{val_to_value, Event, ExecConfig, ThrowFlag};
use crate::ipl::{parse_program, typecheck, Lit, SymbolError, SymbolTable, SyntaxError, Ty, TypeError, TypedStmt};
use crate::layout_gen::{parse_layout, LayoutParseError};
use crate::mem::{Data, LabelAddress, MemoryLayout};

/// Upper bound on bindings tried when deciding one assertion.
const MAX_BINDINGS: usize = 200_000;

#[derive(Debug, Error)]
pub enum PreconditionError {
    #[error("no free block left for variable `{0}`")]
    OutOfMemory(String),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("spec {0}")]
    Spec(#[from] SpecParseError),
    #[error("layout {0}")]
    Layout(#[from] LayoutParseError),
    #[error("program parse error: {0}")]
    Syntax(#[from] SyntaxError),
    #[error("program type error: {0}")]
    Type(#[from] TypeError),
    #[error("precondition: {0}")]
    Precondition(#[from] PreconditionError),
    #[error("layout has no throw flag")]
    NoThrowFlag,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error("no loop labelled `{0}`")]
    UnknownLoop(String),
    #[error("loop `{0}` is not a top-level statement")]
    NotTopLevel(String),
}

/// Initial symbolic memory plus the names it binds.
#[derive(Clone, Debug)]
pub struct Precondition {
    pub memory: SymMemory,
    pub table: SymbolTable,
    pub symbols: Symbols,
}

/// Allocates one block per declared variable, in declaration order, and
/// writes its initializer; symbolic initializers become fresh symbols.
pub fn build_precondition(spec: &Spec, layout: Arc<MemoryLayout>, cfg: &ExecConfig) -> Result<Precondition, PreconditionError> {
    let mut memory = SymMemory::initial(layout);
    let mut table = SymbolTable::new();
    let mut symbols = Symbols::new();
    for var in &spec.vars {
        let start = memory.layout().nat_to_label(0).expect("layouts have at least one block");
        let label = memory
            .allocate(start)
            .ok_or_else(|| PreconditionError::OutOfMemory(var.name.clone()))?;
        table.declare(var.name.clone(), label, var.ty)?;
        let value = match (var.init, &var.symbol) {
            (Init::Lit(lit), _) => val_to_value(cfg.env, cfg.blc, lit).expect("literal").into(),
            (Init::Sym, Some(name)) => {
                let kind = if var.ty == Ty::Nat { SymKind::Nat } else { SymKind::Bool };
                let id = symbols.lookup(name).unwrap_or_else(|| symbols.fresh(name.clone(), kind));
                let data = match kind {
                    SymKind::Nat => SymData::SymNat(id),
                    SymKind::Bool => SymData::SymBool(id),
                };
                SymValue::new(data, cfg.env, cfg.blc)
            }
            (Init::Sym, None) => unreachable!("symbolic initializer without a name"),
        };
        memory = memory.write_dir(label, value);
    }
    Ok(Precondition { memory, table, symbols })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Obligation {
    /// Whole program against the postconditions.
    Program,
    /// Precondition to loop entry establishes the invariant.
    Head,
    /// One body execution preserves the invariant.
    Step,
    /// Loop exit through the remainder meets the postconditions.
    Tail,
}

impl fmt::Display for Obligation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Obligation::Program => "program",
            Obligation::Head => "head",
            Obligation::Step => "step",
            Obligation::Tail => "tail",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Matched {
    Case(usize),
    Else,
    Invariant,
    Nothing,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail { assertion: String, witness: Vec<(String, Lit)> },
    Undecided(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Undecided,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Undecided => "UNDECIDED",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssertionOutcome {
    pub assertion: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathVerdict {
    pub obligation: Obligation,
    pub condition: PathCondition,
    pub condition_text: String,
    pub matched: Matched,
    /// Guard text, `else`, `invariant`, or `none`.
    pub matched_text: String,
    pub reverted: bool,
    pub assertions: Vec<AssertionOutcome>,
    pub outcome: Outcome,
    pub memory: SymMemory,
    pub diagnostics: Vec<Event>,
}

impl PathVerdict {
    pub fn status(&self) -> Status {
        match self.outcome {
            Outcome::Pass => Status::Pass,
            Outcome::Fail { .. } => Status::Fail,
            Outcome::Undecided(_) => Status::Undecided,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub paths: Vec<PathVerdict>,
    /// Every symbol mentioned by the paths, including loop-havoc ones.
    pub symbols: Symbols,
}

impl Verdict {
    /// PASS iff every path passes; any FAIL wins over UNDECIDED.
    pub fn status(&self) -> Status {
        self.paths.iter().map(PathVerdict::status).max().unwrap_or(Status::Pass)
    }

    pub fn passed(&self) -> bool {
        self.status() == Status::Pass
    }
}

/// A spec with its layout, typed program, and precondition, ready to check.
#[derive(Clone, Debug)]
pub struct Verifier {
    pub spec: Spec,
    pub layout: Arc<MemoryLayout>,
    pub program: TypedStmt,
    pub table: SymbolTable,
    pub symbols: Symbols,
    pub pre: SymMemory,
    pub cfg: ExecConfig,
}

fn read_file(path: &Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a spec file and the layout and program it names; relative paths
/// are resolved against the spec's directory.
pub fn load_spec(path: &Path) -> Result<Verifier, LoadError> {
    let spec = Spec::parse(&read_file(path)?)?;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let layout = parse_layout(&read_file(&dir.join(&spec.layout))?)?;
    let program = read_file(&dir.join(&spec.program))?;
    Verifier::new(spec, Arc::new(layout), &program)
}

impl Verifier {
    pub fn new(spec: Spec, layout: Arc<MemoryLayout>, program_src: &str) -> Result<Self, LoadError> {
        ThrowFlag::of(&layout).map_err(|_| LoadError::NoThrowFlag)?;
        let cfg = ExecConfig::new(spec.fuel);
        let pre = build_precondition(&spec, layout.clone(), &cfg)?;
        let program = typecheck(&parse_program(program_src)?, &pre.table)?;
        Ok(Self {
            spec,
            layout,
            program,
            table: pre.table,
            symbols: pre.symbols,
            pre: pre.memory,
            cfg,
        })
    }

    fn run(&self, cond: PathCondition, mem: &SymMemory, s: &TypedStmt) -> Vec<PathResult> {
        sym_exec_from(&self.cfg, cond, mem, s).expect("throw flag checked at load")
    }

    /// Runs the invariant split when the spec has invariant clauses,
    /// plain triple checking otherwise.
    pub fn check(&self) -> Result<Verdict, InvariantError> {
        match self.spec.invariant_loop() {
            None => Ok(self.check_triple()),
            Some(label) => {
                let clauses: Vec<Vec<Assertion>> = self.spec.invariants.iter().map(|c| c.assertions.clone()).collect();
                self.check_with_invariant(label, &clauses)
            }
        }
    }

    /// Symbolically executes the whole program and checks every path
    /// against the first guard it satisfies.
    pub fn check_triple(&self) -> Verdict {
        let mut ctx = Ctx::new(self, self.symbols.clone());
        let results = self.run(PathCondition::new(), &self.pre, &self.program);
        let mut paths = Vec::new();
        for r in results {
            paths.extend(ctx.check_post(Obligation::Program, r));
        }
        ctx.finish(paths)
    }

    /// Loop verification by invariant: `clauses` is a disjunction, each
    /// clause a conjunction of assertions.
    pub fn check_with_invariant(&self, loop_label: &str, clauses: &[Vec<Assertion>]) -> Result<Verdict, InvariantError> {
        let loops = self.program.loops();
        let target = loops
            .iter()
            .find(|(l, _)| l == loop_label)
            .map(|(_, s)| *s)
            .ok_or_else(|| InvariantError::UnknownLoop(loop_label.into()))?;
        let spine = self.program.spine();
        let at = spine
            .iter()
            .position(|s| std::ptr::eq(*s, target))
            .ok_or_else(|| InvariantError::NotTopLevel(loop_label.into()))?;
        let TypedStmt::While { cond, body } = target else {
            unreachable!("loops() only yields While nodes")
        };
        let prefix = TypedStmt::from_list(spine[..at].iter().map(|s| (*s).clone()).collect());
        let rest = TypedStmt::from_list(spine[at + 1..].iter().map(|s| (*s).clone()).collect());
        let modified = body.assigned_labels();

        let mut ctx = Ctx::new(self, self.symbols.clone());
        let mut paths = Vec::new();
        let mut entries = Vec::new();
        for r in self.run(PathCondition::new(), &self.pre, &prefix) {
            if r.undecided.is_some() || r.reverted {
                paths.extend(ctx.check_post(Obligation::Head, r));
                continue;
            }
            let v = ctx.check_invariant(Obligation::Head, &r, clauses);
            if v.status() == Status::Pass {
                entries.push((r.condition.clone(), r.memory.clone()));
            }
            paths.push(v);
        }

        for (entry_cond, entry_mem) in entries {
            for clause in clauses {
                let state = match ctx.assume(&entry_cond, &entry_mem, &modified, clause) {
                    Ok(Some(s)) => s,
                    Ok(None) => continue,
                    Err(reason) => {
                        paths.push(ctx.undecided(Obligation::Step, &entry_cond, &entry_mem, reason));
                        continue;
                    }
                };
                let start = PathState::new(state.0, state.1);
                for (p, decision) in split_on_condition(&self.cfg, start, cond) {
                    match decision {
                        Decision::True => {
                            for r in self.run(p.cond, &p.mem, body) {
                                if r.undecided.is_some() || r.reverted {
                                    paths.extend(ctx.check_post(Obligation::Step, r));
                                } else {
                                    paths.push(ctx.check_invariant(Obligation::Step, &r, clauses));
                                }
                            }
                        }
                        Decision::False | Decision::Silent => {
                            for r in self.run(p.cond, &p.mem, &rest) {
                                paths.extend(ctx.check_post(Obligation::Tail, r));
                            }
                        }
                        Decision::Undecided(reason) => {
                            paths.push(ctx.undecided(Obligation::Step, &p.cond, &p.mem, reason));
                        }
                    }
                }
            }
        }
        Ok(ctx.finish(paths))
    }
}

/// Result of searching for a falsifying binding.
enum Search {
    Holds,
    Fails(Binding),
    TooLarge,
}

struct Ctx<'a> {
    v: &'a Verifier,
    symbols: Symbols,
    /// Symbols introduced for loop-modified variables.
    havoc: Vec<SymId>,
    init: SymMemory,
}

impl<'a> Ctx<'a> {
    fn new(v: &'a Verifier, symbols: Symbols) -> Self {
        Self {
            v,
            symbols,
            havoc: Vec::new(),
            init: SymMemory::initial(v.layout.clone()),
        }
    }

    fn finish(self, mut paths: Vec<PathVerdict>) -> Verdict {
        paths.sort_by(|a, b| (a.obligation, &a.condition).cmp(&(b.obligation, &b.condition)));
        Verdict {
            paths,
            symbols: self.symbols,
        }
    }

    fn label(&self, var: &str) -> LabelAddress {
        self.v.table.lookup(var).expect("spec variables are declared").0
    }

    fn undecided(&self, obligation: Obligation, cond: &PathCondition, mem: &SymMemory, reason: String) -> PathVerdict {
        PathVerdict {
            obligation,
            condition: cond.clone(),
            condition_text: cond.display(&self.symbols).to_string(),
            matched: Matched::Nothing,
            matched_text: "none".into(),
            reverted: false,
            assertions: Vec::new(),
            outcome: Outcome::Undecided(reason),
            memory: mem.clone(),
            diagnostics: Vec::new(),
        }
    }

    /// Refines `cond` until the first-match guard is decided; each piece
    /// comes back with the case it lands in.
    fn dispatch(&self, cond: &PathCondition) -> Vec<(PathCondition, Matched)> {
        for (i, case) in self.v.spec.cases.iter().enumerate() {
            let mut names = Vec::new();
            case.guard.symbols(&mut names);
            let ids: Vec<SymId> = names.iter().filter_map(|n| self.symbols.lookup(n)).collect();
            let free: Vec<SymId> = ids.iter().copied().filter(|id| cond.get(*id).is_none()).collect();
            let mut seen = (false, false);
            for_each_assignment(&self.symbols, &free, &mut |extra| {
                let look = |name: &str| {
                    let id = self.symbols.lookup(name)?;
                    cond.get(id).map(Atom::minimal).or_else(|| extra.get(id))
                };
                match case.guard.eval(&look) {
                    Some(true) => seen.0 = true,
                    _ => seen.1 = true,
                }
            });
            match seen {
                (true, false) => return vec![(cond.clone(), Matched::Case(i))],
                (false, _) => continue,
                (true, true) => {
                    let id = free[0];
                    let atoms = match self.symbols.info(id).kind {
                        SymKind::Bool => [Atom::BoolIs(id, true), Atom::BoolIs(id, false)],
                        SymKind::Nat => [Atom::NatIsZero(id), Atom::NatIsSucc(id)],
                    };
                    return atoms
                        .into_iter()
                        .filter_map(|a| cond.with(a))
                        .flat_map(|c| self.dispatch(&c))
                        .collect();
                }
            }
        }
        let m = if self.v.spec.else_case.is_some() { Matched::Else } else { Matched::Nothing };
        vec![(cond.clone(), m)]
    }

    fn matched_text(&self, m: &Matched) -> String {
        match m {
            Matched::Case(i) => self.v.spec.cases[*i].guard.to_string(),
            Matched::Else => "else".into(),
            Matched::Invariant => "invariant".into(),
            Matched::Nothing => "none".into(),
        }
    }

    /// Checks a final state against the postcondition its guard selects.
    fn check_post(&mut self, obligation: Obligation, r: PathResult) -> Vec<PathVerdict> {
        if let Some(reason) = r.undecided {
            let mut v = self.undecided(obligation, &r.condition, &r.memory, reason);
            v.diagnostics = r.diagnostics;
            return vec![v];
        }
        let mut out = Vec::new();
        for (cond, matched) in self.dispatch(&r.condition) {
            let mem = apply_condition(&r.memory, &cond);
            let pre = apply_condition(&self.v.pre, &cond);
            let list: Option<&Vec<Assertion>> = match &matched {
                Matched::Case(i) => Some(&self.v.spec.cases[*i].assertions),
                Matched::Else => self.v.spec.else_case.as_ref(),
                _ => None,
            };
            let mut assertions = Vec::new();
            let outcome = match list {
                None => Outcome::Undecided("no guard matches this path".into()),
                Some(list) => {
                    let mut outcome = Outcome::Pass;
                    for a in list {
                        let search = self.search(&cond, &[&mem, &pre], &|b| self.holds(a, &mem, r.reverted, &pre, b));
                        let holds = matches!(search, Search::Holds);
                        assertions.push(AssertionOutcome {
                            assertion: a.to_string(),
                            holds,
                        });
                        if outcome != Outcome::Pass {
                            continue;
                        }
                        outcome = match search {
                            Search::Holds => Outcome::Pass,
                            Search::Fails(b) => Outcome::Fail {
                                assertion: a.to_string(),
                                witness: self.witness(&cond, &b),
                            },
                            Search::TooLarge => Outcome::Undecided(format!("too many symbols to decide `{a}`")),
                        };
                    }
                    outcome
                }
            };
            let condition_text = cond.display(&self.symbols).to_string();
            out.push(PathVerdict {
                obligation,
                condition_text,
                condition: cond,
                matched_text: self.matched_text(&matched),
                matched,
                reverted: r.reverted,
                assertions,
                outcome,
                memory: mem,
                diagnostics: r.diagnostics.clone(),
            });
        }
        out
    }

    fn check_invariant(&self, obligation: Obligation, r: &PathResult, clauses: &[Vec<Assertion>]) -> PathVerdict {
        let pre = apply_condition(&self.v.pre, &r.condition);
        let text = render_invariant(clauses);
        let search = self.search(&r.condition, &[&r.memory, &pre], &|b| {
            clauses
                .iter()
                .any(|c| c.iter().all(|a| self.holds(a, &r.memory, false, &pre, b)))
        });
        let outcome = match search {
            Search::Holds => Outcome::Pass,
            Search::Fails(b) => Outcome::Fail {
                assertion: text.clone(),
                witness: self.witness(&r.condition, &b),
            },
            Search::TooLarge => Outcome::Undecided("too many symbols to decide the invariant".into()),
        };
        PathVerdict {
            obligation,
            condition: r.condition.clone(),
            condition_text: r.condition.display(&self.symbols).to_string(),
            matched: Matched::Invariant,
            matched_text: "invariant".into(),
            reverted: r.reverted,
            assertions: vec![AssertionOutcome {
                assertion: text,
                holds: outcome == Outcome::Pass,
            }],
            outcome,
            memory: r.memory.clone(),
            diagnostics: r.diagnostics.clone(),
        }
    }

    /// Concrete truth of one assertion under a binding of every symbol
    /// the compared slots mention.
    fn holds(&self, a: &Assertion, mem: &SymMemory, reverted: bool, pre: &SymMemory, b: &Binding) -> bool {
        match a {
            Assertion::Reverted => reverted,
            Assertion::MemoryIsInit => mem
                .slots()
                .iter()
                .zip(self.init.slots())
                .all(|(x, y)| x.concretize(b).is_some() && x.concretize(b) == y.concretize(b)),
            Assertion::ReadEq(x, lit) => {
                let want = match lit {
                    Lit::Nat(n) => Data::Nat(Some(*n)),
                    Lit::Bool(v) => Data::Bool(Some(*v)),
                };
                mem.read_dir(self.label(x)).data.concretize(b) == Some(want)
            }
            Assertion::FrameExcept(xs) => {
                let skip: Vec<LabelAddress> = xs.iter().map(|x| self.label(x)).collect();
                self.v.layout.labels().filter(|l| !skip.contains(l)).all(|l| {
                    let got = mem.read_dir(l).concretize(b);
                    got.is_some() && got == pre.read_dir(l).concretize(b)
                })
            }
        }
    }

    /// Looks for a binding of the symbols in `mems` that falsifies `pred`.
    /// Nat symbols range over {0, 1, 2} (nonzero ones over {1, 2}) plus the
    /// spec's literals and two values above them, which separates every
    /// literal comparison and every symbol-to-symbol comparison the
    /// assertion language can express.
    fn search(&self, cond: &PathCondition, mems: &[&SymMemory], pred: &dyn Fn(&Binding) -> bool) -> Search {
        let mut ids: Vec<SymId> = mems.iter().flat_map(|m| super::sym::symbols_in(m)).collect();
        ids.sort();
        ids.dedup();
        let lits = self.nat_literals();
        let domains: Vec<Vec<Lit>> = ids
            .iter()
            .map(|id| match self.symbols.info(*id).kind {
                SymKind::Bool => vec![Lit::Bool(false), Lit::Bool(true)],
                SymKind::Nat => {
                    let nonzero = cond.get(*id) == Some(Atom::NatIsSucc(*id));
                    lits.iter()
                        .copied()
                        .filter(|n| !nonzero || *n > 0)
                        .map(Lit::Nat)
                        .collect()
                }
            })
            .collect();
        let total = domains.iter().try_fold(1usize, |acc, d| acc.checked_mul(d.len()));
        if total.is_none_or(|t| t > MAX_BINDINGS) {
            return Search::TooLarge;
        }
        let mut idx = vec![0usize; ids.len()];
        loop {
            let b: Binding = ids.iter().zip(&idx).zip(&domains).map(|((id, i), d)| (*id, d[*i])).collect();
            if !pred(&b) {
                return Search::Fails(b);
            }
            // Odometer, last symbol fastest.
            let mut k = ids.len();
            loop {
                if k == 0 {
                    return Search::Holds;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < domains[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    fn nat_literals(&self) -> Vec<u64> {
        let mut lits = vec![0, 1, 2];
        let all = self
            .v
            .spec
            .cases
            .iter()
            .map(|c| &c.assertions)
            .chain(self.v.spec.else_case.iter())
            .chain(self.v.spec.invariants.iter().map(|c| &c.assertions));
        for list in all {
            for a in list {
                if let Assertion::ReadEq(_, Lit::Nat(n)) = a {
                    lits.push(*n);
                }
            }
        }
        let max = *lits.iter().max().unwrap();
        lits.push(max.saturating_add(1));
        lits.push(max.saturating_add(2));
        lits.sort();
        lits.dedup();
        lits
    }

    /// Falsifying binding completed with the minimal instantiation of the
    /// path condition for every declared symbol.
    fn witness(&self, cond: &PathCondition, b: &Binding) -> Vec<(String, Lit)> {
        let mut out = Vec::new();
        for (id, info) in self.symbols.iter() {
            let value = b.get(id).or_else(|| cond.get(id).map(Atom::minimal));
            let value = match (value, info.kind) {
                (Some(v), _) => v,
                (None, _) if self.havoc.contains(&id) => continue,
                (None, SymKind::Bool) => Lit::Bool(false),
                (None, SymKind::Nat) => Lit::Nat(1),
            };
            out.push((info.name.clone(), value));
        }
        out
    }

    /// Builds the loop-head state described by one invariant clause:
    /// variables the body assigns become fresh symbols, then each
    /// assertion is assumed. `Ok(None)` means the clause is infeasible.
    fn assume(
        &mut self,
        cond: &PathCondition,
        entry: &SymMemory,
        modified: &[LabelAddress],
        clause: &[Assertion],
    ) -> Result<Option<(PathCondition, SymMemory)>, String> {
        let cfg = &self.v.cfg;
        let mut cond = cond.clone();
        let mut mem = entry.clone();
        let mut fresh: Vec<LabelAddress> = Vec::new();
        for l in modified {
            let Some(name) = self.v.table.name_of(*l) else { continue };
            let ty = self.v.table.lookup(name).unwrap().1;
            let kind = if ty == Ty::Nat { SymKind::Nat } else { SymKind::Bool };
            let id = self.symbols.fresh(format!("{name}'"), kind);
            self.havoc.push(id);
            let data = match kind {
                SymKind::Nat => SymData::SymNat(id),
                SymKind::Bool => SymData::SymBool(id),
            };
            mem = mem.write_dir(*l, SymValue::new(data, cfg.env, cfg.blc));
            fresh.push(*l);
        }
        for a in clause {
            match a {
                Assertion::Reverted => return Ok(None),
                Assertion::MemoryIsInit => {
                    mem = self.init.clone();
                    fresh.clear();
                }
                Assertion::ReadEq(x, lit) => {
                    let l = self.label(x);
                    let slot = mem.read_dir(l).clone();
                    let want = match lit {
                        Lit::Nat(n) => Data::Nat(Some(*n)),
                        Lit::Bool(v) => Data::Bool(Some(*v)),
                    };
                    if fresh.contains(&l) {
                        mem = mem.write_dir(l, SymValue::new(SymData::Conc(want), slot.env, slot.blc));
                        fresh.retain(|f| *f != l);
                        continue;
                    }
                    let atom = match (&slot.data, lit) {
                        (SymData::Conc(d), _) if *d == want => continue,
                        (SymData::Conc(_), _) => return Ok(None),
                        (SymData::SymBool(id), Lit::Bool(v)) => Atom::BoolIs(*id, *v),
                        (SymData::SymNat(id) | SymData::SymNatSucc(id), Lit::Nat(0)) => Atom::NatIsZero(*id),
                        (SymData::SymNatSucc(_), Lit::Nat(_)) | (SymData::SymNat(_), Lit::Nat(_)) => {
                            return Err(format!("cannot assume `{a}` on a symbolic nat"));
                        }
                        _ => return Ok(None),
                    };
                    let Some(c) = cond.with(atom) else { return Ok(None) };
                    cond = c;
                    mem = super::exec::apply_atom(&mem, atom);
                }
                Assertion::FrameExcept(xs) => {
                    let skip: Vec<LabelAddress> = xs.iter().map(|x| self.label(x)).collect();
                    let pre = apply_condition(&self.v.pre, &cond);
                    for l in self.v.layout.labels().filter(|l| !skip.contains(l)) {
                        let target = pre.read_dir(l).clone();
                        if fresh.contains(&l) {
                            mem = mem.write_dir(l, target);
                            fresh.retain(|f| *f != l);
                        } else if *mem.read_dir(l) != target {
                            return match (mem.read_dir(l).as_concrete(), target.as_concrete()) {
                                (Some(_), Some(_)) => Ok(None),
                                _ => Err(format!("cannot assume `{a}` on symbolic state")),
                            };
                        }
                    }
                }
            }
        }
        Ok(Some((cond, mem)))
    }
}

fn render_invariant(clauses: &[Vec<Assertion>]) -> String {
    if clauses.len() == 1 {
        return render_assertions(&clauses[0]);
    }
    clauses
        .iter()
        .map(|c| format!("({})", render_assertions(c)))
        .collect::<Vec<_>>()
        .join(" || ")
}

/// Calls `f` with every combination of representative values for `ids`
/// (both booleans; zero and one for nats).
fn for_each_assignment(symbols: &Symbols, ids: &[SymId], f: &mut dyn FnMut(&Binding)) {
    fn go(symbols: &Symbols, ids: &[SymId], acc: &mut Binding, f: &mut dyn FnMut(&Binding)) {
        let Some((first, rest)) = ids.split_first() else {
            f(acc);
            return;
        };
        let values = match symbols.info(*first).kind {
            SymKind::Bool => [Lit::Bool(true), Lit::Bool(false)],
            SymKind::Nat => [Lit::Nat(0), Lit::Nat(1)],
        };
        for v in values {
            acc.insert(*first, v);
            go(symbols, rest, acc, f);
        }
    }
    go(symbols, ids, &mut Binding::new(), f);
}
