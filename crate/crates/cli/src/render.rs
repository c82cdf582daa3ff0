//! Plain-text memory dumps, one line per slot with specials first.

use std::io::IsTerminal;

use germ_core::evi::{Named, SymMemory, Symbols};
use germ_core::ipl::SymbolTable;
use germ_core::mem::{MemoryLayout, SlotIndex};
use germ_core::MemoryState;

fn annotate(layout: &MemoryLayout, table: &SymbolTable, s: SlotIndex, line: String) -> String {
    match layout.slot_to_label(s).and_then(|l| table.name_of(l)) {
        Some(name) => format!("{line}   // {name}"),
        None => line,
    }
}

pub fn memory_lines(m: &MemoryState, table: &SymbolTable) -> Vec<String> {
    let layout = m.layout();
    layout
        .slots()
        .map(|s| annotate(layout, table, s, format!("{} := {};", layout.slot_name(s), m.read_low(s))))
        .collect()
}

pub fn sym_memory_lines(m: &SymMemory, table: &SymbolTable, symbols: &Symbols) -> Vec<String> {
    let layout = m.layout();
    layout
        .slots()
        .map(|s| {
            let value = Named {
                value: m.read_low(s),
                symbols,
            };
            annotate(layout, table, s, format!("{} := {};", layout.slot_name(s), value))
        })
        .collect()
}

#[derive(Clone, Copy)]
pub struct Palette {
    enabled: bool,
}

impl Palette {
    pub fn detect() -> Self {
        let wanted = std::env::var("GERM_COLOR").map_or(true, |v| v != "0");
        Self {
            enabled: wanted && std::io::stdout().is_terminal(),
        }
    }

    fn paint(self, code: &str, text: &str) -> String {
        if self.enabled {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    pub fn status(self, status: &str) -> String {
        match status {
            "PASS" => self.paint("32", status),
            "FAIL" => self.paint("31", status),
            _ => self.paint("33", status),
        }
    }
}
