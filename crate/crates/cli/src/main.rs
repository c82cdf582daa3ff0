use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use germ_core::evi::{concretize, load_spec, Binding, SymKind, Verifier};
use germ_core::interp::{run_program, Event};
use germ_core::ipl::{pretty, Lit};
use germ_core::layout_gen::{generate_layout, serialize_layout, Requirements};

mod render;
mod report;

use render::{memory_lines, Palette};
use report::Report;

#[derive(Parser)]
#[command(name = "germ", version, about = "Formal memory model, interpreter, and symbolic verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a memory layout file.
    GenLayout {
        /// Number of normal blocks.
        #[arg(long)]
        size: u32,
        /// Extra special block, appended after the built-in ones.
        #[arg(long = "special", value_name = "NAME")]
        specials: Vec<String>,
        #[arg(short = 'o', long = "output", value_name = "FILE")]
        output: PathBuf,
    },
    /// Typecheck a spec's program and print it back with loop labels.
    Parse {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Verify a program against its spec.
    Check {
        #[arg(long)]
        spec: PathBuf,
        /// Emit the report as JSON.
        #[arg(long)]
        json: bool,
        /// Include each path's final memory in the text report.
        #[arg(long)]
        memory: bool,
    },
    /// Run a spec's program concretely with every symbol bound.
    Run {
        #[arg(long)]
        spec: PathBuf,
        /// `symbol=value`, repeatable.
        #[arg(long = "bind", value_name = "SYM=VALUE")]
        binds: Vec<String>,
        /// Dump memory after the N-th top-level statement (0 = initial state).
        #[arg(long = "break", value_name = "N")]
        breakpoint: Option<usize>,
    },
}

/// Usage, parse, or type problem: exit code 2.
struct Usage(anyhow::Error);

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GenLayout { size, specials, output } => gen_layout(size, &specials, &output),
        Command::Parse { spec } => parse(&spec),
        Command::Check { spec, json, memory } => check(&spec, json, memory),
        Command::Run { spec, binds, breakpoint } => run(&spec, &binds, breakpoint),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn usage<T>(r: Result<T>) -> Result<T, Usage> {
    r.map_err(Usage)
}

fn gen_layout(size: u32, specials: &[String], output: &Path) -> Result<u8, Usage> {
    if size == 0 {
        return Err(Usage(anyhow!("--size must be at least 1")));
    }
    let req = Requirements::new(size).with_extra_specials(specials.iter().cloned());
    let layout = usage(generate_layout(&req).context("invalid layout requirements"))?;
    usage(std::fs::write(output, serialize_layout(&layout)).with_context(|| format!("cannot write {}", output.display())))?;
    Ok(0)
}

fn load(spec: &Path) -> Result<Verifier, Usage> {
    usage(load_spec(spec).map_err(anyhow::Error::from))
}

fn parse(spec: &Path) -> Result<u8, Usage> {
    let v = load(spec)?;
    print!("{}", pretty(&v.program));
    for (label, _) in v.program.loops() {
        println!("// {label}");
    }
    Ok(0)
}

fn check(spec: &Path, json: bool, memory: bool) -> Result<u8, Usage> {
    let started = Instant::now();
    let v = load(spec)?;
    let verdict = usage(v.check().map_err(anyhow::Error::from))?;
    let elapsed = started.elapsed().as_millis() as u64;
    let report = Report::new(&spec.display().to_string(), &v, &verdict, elapsed);
    if json {
        let text = usage(serde_json::to_string_pretty(&report).map_err(anyhow::Error::from))?;
        println!("{text}");
    } else {
        print!("{}", report.render(Palette::detect(), memory));
    }
    Ok(if verdict.passed() { 0 } else { 1 })
}

fn parse_binding(v: &Verifier, binds: &[String]) -> Result<Binding> {
    let mut b = Binding::new();
    for raw in binds {
        let (name, value) = raw.split_once('=').ok_or_else(|| anyhow!("expected SYM=VALUE, got `{raw}`"))?;
        let (name, value) = (name.trim(), value.trim());
        let id = v.symbols.lookup(name).ok_or_else(|| anyhow!("unknown symbol `{name}`"))?;
        let lit = match (v.symbols.info(id).kind, value) {
            (SymKind::Bool, "true") => Lit::Bool(true),
            (SymKind::Bool, "false") => Lit::Bool(false),
            (SymKind::Nat, n) => Lit::Nat(n.parse().map_err(|_| anyhow!("`{name}` is a nat, got `{value}`"))?),
            (SymKind::Bool, _) => bail!("`{name}` is a bool, got `{value}`"),
        };
        b.insert(id, lit);
    }
    for (id, info) in v.symbols.iter() {
        if b.get(id).is_none() {
            bail!("unbound symbol `{}`", info.name);
        }
    }
    Ok(b)
}

fn run(spec: &Path, binds: &[String], breakpoint: Option<usize>) -> Result<u8, Usage> {
    let v = load(spec)?;
    let binding = usage(parse_binding(&v, binds))?;
    let pre = concretize(&v.pre, &binding).expect("every symbol is bound");
    let out = usage(run_program(&v.cfg, &pre, &v.program, breakpoint).map_err(anyhow::Error::from))?;
    if let Some(n) = breakpoint {
        match out.breakpoint() {
            Some(m) => {
                println!("# breakpoint {n}");
                for line in memory_lines(m, &v.table) {
                    println!("{line}");
                }
            }
            None => println!("# breakpoint {n} not reached"),
        }
    }
    for e in &out.diagnostics {
        if !matches!(e, Event::BreakpointDump { .. }) {
            println!("# event: {e}");
        }
    }
    println!("# final state{}", if out.reverted { " (reverted)" } else { "" });
    for line in memory_lines(&out.memory, &v.table) {
        println!("{line}");
    }
    Ok(0)
}
