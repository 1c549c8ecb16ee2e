//! Function families `{f_k : Bⁿ → B}` and the mode-controlled oracle.
//!
//! A family assigns each mode label `k` (a fixed-width bit-string) a truth
//! table over `x ∈ Bⁿ`. Sharp oracles compute `y ⊕ f_k(x)` for one mode;
//! the superposed oracle computes `y ⊕ F(k, x)` with `F(k, x) = f_k(x)` and
//! `k` read from a quantum register.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;

pub const MAX_BALANCED_CONSTANT_ARITY: usize = 4;
pub const MAX_DELTA_ARITY: usize = 10;
/// Largest arity accepted from family files.
pub const MAX_FILE_ARITY: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeClass {
    Balanced,
    Constant,
    Other,
}

impl fmt::Display for ModeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModeClass::Balanced => "balanced",
            ModeClass::Constant => "constant",
            ModeClass::Other => "other",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("missing `n=<arity>` header")]
    MissingHeader,
    #[error("invalid header: {0}")]
    BadHeader(String),
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("non-binary character {0:?}")]
    NonBinary(char),
    #[error("label has width {found}, expected {expected}")]
    LabelWidth { expected: usize, found: usize },
    #[error("duplicate label {0}")]
    DuplicateLabel(String),
    #[error("table has {found} outputs, expected {expected}")]
    TableLength { expected: usize, found: usize },
    #[error("family declares no modes")]
    NoModes,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },
    #[error("family arity {n} outside supported range {min}..={max}")]
    Arity { n: usize, min: usize, max: usize },
    #[error("family has no modes")]
    Empty,
    #[error("duplicate label {0}")]
    DuplicateLabel(BitString),
    #[error("label {label} has width {}, expected {expected}", label.width())]
    LabelWidth { label: BitString, expected: usize },
    #[error("mode {label} has {found} outputs, expected {expected}")]
    TableLength {
        label: BitString,
        expected: usize,
        found: usize,
    },
    #[error("unknown mode label {0}")]
    UnknownLabel(BitString),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mode {
    label: BitString,
    table: Vec<bool>,
}

impl Mode {
    pub fn label(&self) -> BitString {
        self.label
    }

    /// `table()[x] = f(x)`, `x` in lexicographic order.
    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn ones(&self) -> usize {
        self.table.iter().filter(|&&b| b).count()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub balanced: usize,
    pub constant: usize,
    pub other: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionFamily {
    n: usize,
    label_width: usize,
    modes: Vec<Mode>,
}

impl FunctionFamily {
    /// Validates and builds a family. All labels must share one width.
    pub fn new(n: usize, modes: Vec<(BitString, Vec<bool>)>) -> Result<Self, FamilyError> {
        if n == 0 || n > MAX_FILE_ARITY {
            return Err(FamilyError::Arity {
                n,
                min: 1,
                max: MAX_FILE_ARITY,
            });
        }
        let first = modes.first().ok_or(FamilyError::Empty)?;
        let label_width = first.0.width();
        let size = 1usize << n;
        let mut seen = HashSet::with_capacity(modes.len());
        for (label, table) in &modes {
            if label.width() != label_width {
                return Err(FamilyError::LabelWidth {
                    label: *label,
                    expected: label_width,
                });
            }
            if !seen.insert(*label) {
                return Err(FamilyError::DuplicateLabel(*label));
            }
            if table.len() != size {
                return Err(FamilyError::TableLength {
                    label: *label,
                    expected: size,
                    found: table.len(),
                });
            }
        }
        Ok(FunctionFamily {
            n,
            label_width,
            modes: modes
                .into_iter()
                .map(|(label, table)| Mode { label, table })
                .collect(),
        })
    }

    /// Input arity: qubits in the `x` register.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Ancilla width: qubits in the `k` register.
    pub fn label_width(&self) -> usize {
        self.label_width
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// True when every label of width `label_width` is assigned.
    pub fn is_complete(&self) -> bool {
        self.label_width < usize::BITS as usize && self.modes.len() == 1usize << self.label_width
    }

    pub fn labels(&self) -> impl Iterator<Item = BitString> + '_ {
        self.modes.iter().map(|m| m.label)
    }

    pub fn mode(&self, label: BitString) -> Result<&Mode, FamilyError> {
        self.modes
            .iter()
            .find(|m| m.label == label)
            .ok_or(FamilyError::UnknownLabel(label))
    }

    pub fn classify(&self, label: BitString) -> Result<ModeClass, FamilyError> {
        Ok(classify_table(self.mode(label)?.table()))
    }

    pub fn class_counts(&self) -> ClassCounts {
        let mut counts = ClassCounts::default();
        for m in &self.modes {
            match classify_table(&m.table) {
                ModeClass::Balanced => counts.balanced += 1,
                ModeClass::Constant => counts.constant += 1,
                ModeClass::Other => counts.other += 1,
            }
        }
        counts
    }

    /// Truth table of `F(k, x)` indexed by `k‖x`. Unassigned labels map to 0.
    pub fn oracle_table(&self) -> Vec<bool> {
        let mut table = vec![false; 1usize << (self.label_width + self.n)];
        for m in &self.modes {
            let base = m.label.index() << self.n;
            table[base..base + m.table.len()].copy_from_slice(&m.table);
        }
        table
    }

    /// Family file text; modes in stored order.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for m in &self.modes {
            out.push_str(&m.label.to_string());
            out.push(':');
            for &b in &m.table {
                out.push_str(if b { " 1" } else { " 0" });
            }
            out.push('\n');
        }
        out
    }
}

pub fn classify_table(table: &[bool]) -> ModeClass {
    let ones = table.iter().filter(|&&b| b).count();
    if ones == 0 || ones == table.len() {
        ModeClass::Constant
    } else if 2 * ones == table.len() {
        ModeClass::Balanced
    } else {
        ModeClass::Other
    }
}

pub fn classify_mode(family: &FunctionFamily, label: BitString) -> Result<ModeClass, FamilyError> {
    family.classify(label)
}

pub fn mode_oracle_table(family: &FunctionFamily) -> Vec<bool> {
    family.oracle_table()
}

/// All four functions `B → B`, labelled by their truth table `f(0) f(1)`.
pub fn deutsch_family() -> FunctionFamily {
    let modes = (0..4u64)
        .map(|k| {
            let table = vec![k & 0b10 != 0, k & 0b01 != 0];
            (BitString::new(k, 2), table)
        })
        .collect();
    FunctionFamily::new(1, modes).expect("deutsch family is well formed")
}

fn check_arity(n: usize, max: usize) -> Result<(), FamilyError> {
    if n == 0 || n > max {
        return Err(FamilyError::Arity { n, min: 1, max });
    }
    Ok(())
}

fn label_width_for(count: usize) -> usize {
    (usize::BITS - (count.max(2) - 1).leading_zeros()) as usize
}

/// The two constant functions followed by every balanced function in
/// lexicographic table order; labels are assigned 0, 1, 2, … in that order.
pub fn balanced_constant_family(n: usize) -> Result<FunctionFamily, FamilyError> {
    check_arity(n, MAX_BALANCED_CONSTANT_ARITY)?;
    let size = 1usize << n;
    let mut tables = vec![vec![false; size], vec![true; size]];
    // b0 is the most significant bit of `v`, so increasing `v` walks tables
    // in lexicographic order.
    for v in 0u64..(1u64 << size) {
        if v.count_ones() as usize * 2 != size {
            continue;
        }
        tables.push((0..size).map(|i| (v >> (size - 1 - i)) & 1 == 1).collect());
    }
    let width = label_width_for(tables.len());
    let modes = tables
        .into_iter()
        .enumerate()
        .map(|(i, t)| (BitString::new(i as u64, width), t))
        .collect();
    FunctionFamily::new(n, modes)
}

/// `f_k(x) = δ_{k,x}` for every `k ∈ Bⁿ`.
pub fn delta_family(n: usize) -> Result<FunctionFamily, FamilyError> {
    check_arity(n, MAX_DELTA_ARITY)?;
    let size = 1usize << n;
    let modes = (0..size)
        .map(|k| {
            let table = (0..size).map(|x| x == k).collect();
            (BitString::new(k as u64, n), table)
        })
        .collect();
    FunctionFamily::new(n, modes)
}

fn parse_err(line: usize, kind: ParseErrorKind) -> FamilyError {
    FamilyError::Parse { line, kind }
}

/// Parses the family file format:
///
/// ```text
/// # comment
/// n=1
/// 00: 0 0
/// 01: 0 1
/// ```
pub fn parse_family_file(text: &str) -> Result<FunctionFamily, FamilyError> {
    let mut header: Option<(usize, usize)> = None;
    let mut label_width: Option<usize> = None;
    let mut seen: HashSet<BitString> = HashSet::new();
    let mut modes = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }

        let Some((_, n)) = header else {
            let Some(value) = content.strip_prefix("n=") else {
                return Err(parse_err(line, ParseErrorKind::MissingHeader));
            };
            let n: usize = value.trim().parse().map_err(|_| {
                parse_err(
                    line,
                    ParseErrorKind::BadHeader(format!("arity {:?} is not a number", value.trim())),
                )
            })?;
            if n == 0 || n > MAX_FILE_ARITY {
                return Err(parse_err(
                    line,
                    ParseErrorKind::BadHeader(format!("arity {n} outside 1..={MAX_FILE_ARITY}")),
                ));
            }
            header = Some((line, n));
            continue;
        };

        let (label_text, outputs) = content.split_once(':').ok_or_else(|| {
            parse_err(
                line,
                ParseErrorKind::Syntax("expected `<label>: <outputs>`".into()),
            )
        })?;
        let label_text = label_text.trim();
        if label_text.is_empty() {
            return Err(parse_err(
                line,
                ParseErrorKind::Syntax("empty label".into()),
            ));
        }
        if let Some(c) = label_text.chars().find(|c| *c != '0' && *c != '1') {
            return Err(parse_err(line, ParseErrorKind::NonBinary(c)));
        }
        let label: BitString = label_text
            .parse()
            .map_err(|e| parse_err(line, ParseErrorKind::Syntax(format!("{e}"))))?;
        match label_width {
            None => label_width = Some(label.width()),
            Some(w) if w != label.width() => {
                return Err(parse_err(
                    line,
                    ParseErrorKind::LabelWidth {
                        expected: w,
                        found: label.width(),
                    },
                ))
            }
            Some(_) => {}
        }
        if !seen.insert(label) {
            return Err(parse_err(
                line,
                ParseErrorKind::DuplicateLabel(label.to_string()),
            ));
        }

        let mut table = Vec::with_capacity(1 << n);
        for token in outputs.split_whitespace() {
            match token {
                "0" => table.push(false),
                "1" => table.push(true),
                other => {
                    if let Some(c) = other.chars().find(|c| *c != '0' && *c != '1') {
                        return Err(parse_err(line, ParseErrorKind::NonBinary(c)));
                    }
                    return Err(parse_err(
                        line,
                        ParseErrorKind::Syntax(format!(
                            "outputs must be separated by spaces, got {other:?}"
                        )),
                    ));
                }
            }
        }
        if table.len() != 1 << n {
            return Err(parse_err(
                line,
                ParseErrorKind::TableLength {
                    expected: 1 << n,
                    found: table.len(),
                },
            ));
        }
        modes.push((label, table));
    }

    let Some((header_line, n)) = header else {
        let line = text.lines().count().max(1);
        return Err(parse_err(line, ParseErrorKind::MissingHeader));
    };
    if modes.is_empty() {
        return Err(parse_err(header_line, ParseErrorKind::NoModes));
    }
    FunctionFamily::new(n, modes)
}
