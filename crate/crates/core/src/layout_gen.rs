//! Layout generation from user requirements, and the layout descriptor
//! file format.
//!
//! ```text
//! germ-layout v1
//! normal 16
//! special m_0xinit
//! special m_throw
//! reserved _0xthrow -> m_throw
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::mem::{LayoutError, MemoryLayout, INIT_SPECIAL, THROW_LABEL, THROW_SPECIAL};

const HEADER: &str = "germ-layout v1";

/// What a user asks of a memory space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Requirements {
    pub normal_count: u32,
    pub special_names: Vec<String>,
    /// `(label, special)` bindings.
    pub reserved: Vec<(String, String)>,
}

impl Requirements {
    /// `normal_count` blocks with the default specials (`m_0xinit`,
    /// `m_throw`) and the throw label bound to `m_throw`.
    pub fn new(normal_count: u32) -> Self {
        Self {
            normal_count,
            special_names: vec![INIT_SPECIAL.to_owned(), THROW_SPECIAL.to_owned()],
            reserved: vec![(THROW_LABEL.to_owned(), THROW_SPECIAL.to_owned())],
        }
    }

    /// Replaces the special names. The throw binding stays, so the list
    /// must still contain `m_throw` for generation to succeed.
    pub fn with_specials<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.special_names = names.into_iter().map(Into::into).collect();
        self
    }

    /// Appends special names after the current ones.
    pub fn with_extra_specials<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.special_names.extend(names.into_iter().map(Into::into));
        self
    }
}

/// Builds the layout described by `req`. Labels run `_0x00000000` up to
/// `normal_count - 1` in order.
pub fn generate_layout(req: &Requirements) -> Result<MemoryLayout, LayoutError> {
    MemoryLayout::new(
        req.normal_count,
        req.special_names.iter().cloned(),
        req.reserved.iter().cloned(),
    )
}

pub fn serialize_layout(layout: &MemoryLayout) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(out, "normal {}", layout.normal_count());
    for name in layout.special_names() {
        let _ = writeln!(out, "special {name}");
    }
    for (label, special) in layout.reserved_bindings() {
        let _ = writeln!(out, "reserved {label} -> {special}");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct LayoutParseError {
    pub line: usize,
    pub reason: String,
}

fn fail<T>(line: usize, reason: impl Into<String>) -> Result<T, LayoutParseError> {
    Err(LayoutParseError {
        line,
        reason: reason.into(),
    })
}

pub fn parse_layout(text: &str) -> Result<MemoryLayout, LayoutParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()));

    match lines.next() {
        Some((_, HEADER)) => {}
        Some((n, other)) => return fail(n, format!("expected `{HEADER}`, found `{other}`")),
        None => return fail(1, "empty layout file"),
    }

    let mut normal: Option<(usize, u32)> = None;
    let mut specials: Vec<(usize, String)> = Vec::new();
    let mut reserved: Vec<(usize, String, String)> = Vec::new();

    for (n, line) in lines {
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match keyword {
            "normal" => {
                if normal.is_some() {
                    return fail(n, "duplicate `normal` line");
                }
                let count: u32 = rest
                    .parse()
                    .or_else(|_| fail(n, format!("invalid block count `{rest}`")))?;
                if count == 0 {
                    return fail(n, "normal block count must be at least 1");
                }
                normal = Some((n, count));
            }
            "special" => {
                if rest.is_empty() || rest.contains(char::is_whitespace) {
                    return fail(n, "expected `special <name>`");
                }
                if specials.iter().any(|(_, s)| s == rest) {
                    return fail(n, format!("duplicate special block `{rest}`"));
                }
                specials.push((n, rest.to_owned()));
            }
            "reserved" => {
                let Some((label, special)) = rest.split_once("->") else {
                    return fail(n, "expected `reserved <label> -> <special-name>`");
                };
                let (label, special) = (label.trim(), special.trim());
                if label.is_empty() || special.is_empty() {
                    return fail(n, "expected `reserved <label> -> <special-name>`");
                }
                reserved.push((n, label.to_owned(), special.to_owned()));
            }
            other => return fail(n, format!("unknown directive `{other}`")),
        }
    }

    let Some((normal_line, count)) = normal else {
        return fail(text.lines().count().max(1), "missing `normal <count>` line");
    };

    MemoryLayout::new(
        count,
        specials.iter().map(|(_, s)| s.clone()),
        reserved.iter().map(|(_, l, s)| (l.clone(), s.clone())),
    )
    .map_err(|e| {
        let line = match &e {
            LayoutError::NoNormalBlocks => normal_line,
            LayoutError::BadIdentifier(name)
            | LayoutError::DuplicateSpecial(name)
            | LayoutError::SpecialShadowsNormal(name) => specials
                .iter()
                .find(|(_, s)| s == name)
                .or_else(|| specials.first())
                .map(|(l, _)| *l)
                .or_else(|| reserved.iter().find(|(_, l, _)| l == name).map(|(l, _, _)| *l))
                .unwrap_or(normal_line),
            LayoutError::DuplicateReserved(name)
            | LayoutError::ReservedShadowsNormal(name)
            | LayoutError::UnknownSpecial { label: name, .. } => reserved
                .iter()
                .rev()
                .find(|(_, l, _)| l == name)
                .map(|(l, _, _)| *l)
                .unwrap_or(normal_line),
            LayoutError::SpecialBoundTwice(name) => reserved
                .iter()
                .rev()
                .find(|(_, _, s)| s == name)
                .map(|(l, _, _)| *l)
                .unwrap_or(normal_line),
            LayoutError::TooManyReserved => normal_line,
        };
        LayoutParseError {
            line,
            reason: e.to_string(),
        }
    })
}
