//! Which infinite matrices come from bounded operators on `Q_p(N)`.
//!
//! A matrix is the matrix of an operator iff only finitely many entries lie
//! outside `Z_p` and every row and every column tends to zero. A raw matrix
//! here is a finite table plus declared tails: geometric runs along a row, a
//! column or a (shifted) diagonal.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::operator::{Operator, Repr};
use crate::padic::{Padic, Valuation};

/// The line a tail runs along.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Line {
    /// Entries `(row, start + t)`.
    Row(usize),
    /// Entries `(start + t, col)`.
    Column(usize),
    /// Entries `(start + t, start + t + shift)`.
    Diagonal { shift: i64 },
}

/// Entries `value * p^(decay * t)` for `t = 0, 1, 2, ...` along a line.
#[derive(Clone, Debug)]
pub struct Tail {
    pub line: Line,
    pub start: usize,
    pub value: Padic,
    pub decay: i64,
}

impl Tail {
    fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// Number of steps whose entry falls outside `Z_p`; `None` if infinite.
    fn exceptional_count(&self) -> Option<u64> {
        let Valuation::Finite(v) = self.value.valuation() else { return Some(0) };
        if self.decay <= 0 {
            if self.decay == 0 && v >= 0 {
                return Some(0);
            }
            return None;
        }
        if v >= 0 {
            return Some(0);
        }
        // v + decay * t < 0
        Some(((-v) + self.decay - 1) as u64 / self.decay as u64)
    }

    fn tends_to_zero(&self) -> bool {
        self.is_zero() || self.decay > 0
    }
}

#[derive(Clone, Debug, Default)]
pub struct RawMatrix {
    pub entries: BTreeMap<(usize, usize), Padic>,
    pub tails: Vec<Tail>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Infinitely many entries outside `Z_p`.
    InfinitelyManyExceptional { tail: usize },
    /// A row does not tend to zero.
    RowDoesNotDecay { tail: usize, row: usize },
    /// A column does not tend to zero.
    ColumnDoesNotDecay { tail: usize, col: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    /// Count of entries outside `Z_p` when finite.
    pub exceptional_count: Option<u64>,
    pub violations: Vec<Violation>,
    pub note: String,
}

/// Checks both conditions on a raw matrix with declared tails.
pub fn admissibility_check(m: &RawMatrix) -> AdmissibilityReport {
    let mut violations = Vec::new();
    let mut count: Option<u64> = Some(m.entries.values().filter(|x| !x.is_integral()).count() as u64);
    for (k, tail) in m.tails.iter().enumerate() {
        match tail.exceptional_count() {
            Some(c) => count = count.map(|n| n + c),
            None => {
                count = None;
                violations.push(Violation::InfinitelyManyExceptional { tail: k });
            }
        }
        if !tail.tends_to_zero() {
            match tail.line {
                Line::Row(row) => violations.push(Violation::RowDoesNotDecay { tail: k, row }),
                Line::Column(col) => violations.push(Violation::ColumnDoesNotDecay { tail: k, col }),
                // each row and column meets a diagonal once
                Line::Diagonal { .. } => {}
            }
        }
    }
    AdmissibilityReport {
        admissible: violations.is_empty(),
        exceptional_count: count,
        violations,
        note: String::from("checked from declared tails"),
    }
}

/// Structural representations satisfy both conditions by construction;
/// the report lists the exceptional set where it is known.
pub fn operator_admissibility(a: &Operator) -> AdmissibilityReport {
    let exceptional_count = a.exceptional_entries().ok().map(|e| e.len() as u64);
    let note = match a.repr() {
        Repr::Finite(_) => "finite matrix",
        Repr::IndexMap { .. } => "index map: one entry per column, finite preimages per row",
        Repr::Diagonal { .. } => "diagonal with contractive default",
        Repr::Identity => "identity",
        _ => "algebraic combination of admissible operators",
    };
    AdmissibilityReport { admissible: true, exceptional_count, violations: Vec::new(), note: String::from(note) }
}
