//! A checkable transcript showing an idempotent has trivial class: a
//! finite-rank part with its rank and diagonal form, and a contractive part
//! absorbed by the infinite repetition of the sum ring.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::Result;
use crate::idempotents::split::{finite_rank_reduce, idempotent_split, RankReport, SplitResult};
use crate::idempotents::sumring::{sum_ring_generators, RelationFailure, SumRing};
use crate::matrix::Matrix;
use crate::operator::{Operator, PairingScheme};

#[derive(Clone, Debug)]
pub struct K0Transcript {
    pub split: SplitResult,
    pub split_checks: Vec<(&'static str, bool)>,
    pub rank: RankReport,
    pub sum_ring: SumRing,
    pub depth: usize,
    /// `g^inf` truncated at `depth` blocks.
    pub g_infinite: Operator,
    /// Basis indices where the sum-ring relations were checked.
    pub checked: Vec<usize>,
    pub relation_failures: Vec<RelationFailure>,
    /// Indices where `g + g^inf = g^inf` failed.
    pub equation_failures: Vec<usize>,
}

/// Splits `e = f + g`, reduces `f` to its rank and attaches the sum-ring
/// witness for `g`, checked on the indices `< prefix` lying in blocks below
/// `depth`.
pub fn k0_trivialize(
    e: &Matrix,
    target: i64,
    max_m: u64,
    scheme: PairingScheme,
    depth: usize,
    prefix: usize,
) -> Result<K0Transcript> {
    let ctx = e.context();
    let split = idempotent_split(e, target)?;
    let split_checks = split.checks(e, target);
    let rank = finite_rank_reduce(&split.f, target, max_m)?;
    let sum_ring = sum_ring_generators(ctx, scheme);
    let g = Operator::from_matrix(&split.g);
    let g_infinite = sum_ring.infinite_sum(&g, depth)?;
    let checked: Vec<usize> = (0..prefix).filter(|&x| sum_ring.block(x) < depth).collect();
    let relation_failures = sum_ring.relation_failures(0..prefix);
    let lhs = sum_ring.boxplus(&g, &g_infinite);
    let equation_failures = checked.iter().copied().filter(|&x| lhs.column(x) != g_infinite.column(x)).collect();
    Ok(K0Transcript {
        split,
        split_checks,
        rank,
        sum_ring,
        depth,
        g_infinite,
        checked,
        relation_failures,
        equation_failures,
    })
}

impl K0Transcript {
    pub fn is_verified(&self, target: i64) -> bool {
        self.split_checks.iter().all(|(_, ok)| *ok)
            && self.rank.diagonal_form_is_standard(target)
            && self.relation_failures.is_empty()
            && self.equation_failures.is_empty()
    }

    /// Line-oriented `key<TAB>value` record of every certificate.
    pub fn to_text(&self, target: i64) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "split.n\t{}", self.split.n.map_or(String::from("none"), |n| alloc::format!("{n}")));
        let _ = writeln!(out, "split.spanning_columns\t{:?}", self.split.spanning_columns);
        for (name, ok) in &self.split_checks {
            let _ = writeln!(out, "split.check\t{name}\t{ok}");
        }
        let _ = writeln!(out, "f.rank\t{}", self.rank.rank);
        let _ = writeln!(out, "f.support\t{:?}", self.rank.support);
        let _ = writeln!(out, "f.diagonal_form\t{}", self.rank.diagonal_form);
        let _ = writeln!(out, "f.diagonal_form_standard\t{}", self.rank.diagonal_form_is_standard(target));
        let _ = writeln!(out, "g\t{}", self.split.g);
        let _ = writeln!(out, "g.norm\t{}", self.split.g.norm());
        let _ = writeln!(out, "sumring.scheme\t{:?}", self.sum_ring.scheme);
        let _ = writeln!(out, "sumring.depth\t{}", self.depth);
        let _ = writeln!(out, "sumring.checked\t{}", self.checked.len());
        let _ = writeln!(out, "sumring.relation_failures\t{}", self.relation_failures.len());
        let _ = writeln!(out, "sumring.equation_failures\t{}", self.equation_failures.len());
        let _ = writeln!(out, "verified\t{}", self.is_verified(target));
        out
    }
}
