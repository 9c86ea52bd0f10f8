//! Commuting probability: two independent evaluators, the closed forms for
//! special classes of groups, the bound suite, and the decomposition of a
//! group over an abelian normal subgroup into unit fractions.

mod bounds;
mod decompose;
mod formula;

pub(crate) use bounds::csv_field;
pub use bounds::{check_bounds, BoundContext, BoundResult, BoundStatus, PrReport};
pub use decompose::{abelian_decomposition, largest_abelian_normal, EgyptianForm};
pub(crate) use formula::prime_power;
pub use formula::{pr_central_pgroup_formula, verify_special_forms, FormulaTrace, KTerm, SpecialFormCheck};

use crate::algebra::{conjugacy_classes, AlgebraError, GroupTable, Subgroup};
use crate::exec::{self, Execution};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CommProbError {
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    /// An identity that must hold for every finite group did not.
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

/// Ordered commuting pairs `(x, y)` with `xy = yx`.
pub fn commuting_pairs(g: &GroupTable, exec: Execution) -> u64 {
    let n = g.order();
    exec::sum_range(exec, n, |x| {
        let x = x as u32;
        let row = g.row(x);
        (0..n as u32).filter(|&y| row[y as usize] == g.mul(y, x)).count() as u64
    })
}

/// `#{(x, y) : xy = yx} / |G|²`.
pub fn pr_direct(g: &GroupTable) -> Rational {
    pr_direct_with(g, Execution::default())
}

pub fn pr_direct_with(g: &GroupTable, exec: Execution) -> Rational {
    let n = g.order() as u64;
    Rational::new(commuting_pairs(g, exec), n * n)
}

/// `k(G) / |G|` via conjugacy classes.
pub fn pr_by_classes(g: &GroupTable) -> Rational {
    Rational::new(conjugacy_classes(g).len() as u64, g.order() as u64)
}

/// Commuting probability of a subgroup, computed inside the parent table.
pub fn pr_subgroup(h: &Subgroup<'_>) -> Rational {
    let n = h.order() as u64;
    Rational::new(h.commuting_pairs(), n * n)
}
