//! Commuting probability of a group with an abelian normal subgroup `H` of
//! index `n`, written as `(1/n²) Σ 1/x_k`.
//!
//! With coset representatives `x_1 = 1, …, x_n` and
//! `S_ij = {(h₁, h₂) ∈ H² : [h₁x_i, h₂x_j] = 1}`, each `|S_ij|` is either 0 or
//! `|H|² n_ij / (n_i n_j)`, where `n_i = |[H, x_i]|` and
//! `n_ij = |[H, x_i] ∩ [H, x_j]|`. The pair is empty exactly when
//! `[H, x_j] ∩ [x_j, x_i][H, x_i]` is empty. Every nonzero `|S_ij|` becomes one
//! term `x = n_i n_j / n_ij`.

use serde::Serialize;

use super::{pr_direct, CommProbError};
use crate::algebra::{normal_subgroups, Elem, ElemSet, GroupTable, Subgroup};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EgyptianForm {
    /// Index of `H` in `G`.
    pub n: u64,
    pub h_order: u64,
    /// Smallest element of each coset, cosets ordered by that element.
    pub coset_reps: Vec<Elem>,
    /// `n_i = |[H, x_i]|`
    pub sizes: Vec<u64>,
    /// `n_ij = |[H, x_i] ∩ [H, x_j]|`
    pub pair_sizes: Vec<Vec<u64>>,
    /// `|S_ij|`, counted by brute force.
    pub s_sizes: Vec<Vec<u64>>,
    /// Whether `[H, x_j] ∩ [x_j, x_i][H, x_i]` is empty.
    pub hat_empty: Vec<Vec<bool>>,
    /// Row-major over `(i, j)`, zero pairs omitted; `x_list[0] = 1`.
    pub x_list: Vec<u64>,
    pub pr: Rational,
}

impl EgyptianForm {
    /// `(1/n²) Σ 1/x_k`.
    pub fn reconstruct(&self) -> Rational {
        let s: Rational = self.x_list.iter().map(|&x| Rational::unit(x)).sum();
        s / Rational::from_integer(self.n * self.n)
    }
}

pub fn abelian_decomposition(g: &GroupTable, h: &Subgroup<'_>) -> Result<EgyptianForm, CommProbError> {
    if !h.is_abelian() {
        return Err(CommProbError::PreconditionFailed("H is not abelian".into()));
    }
    if !h.is_normal() {
        return Err(CommProbError::PreconditionFailed("H is not normal".into()));
    }
    let order = g.order();
    let (_, reps) = crate::algebra::subgroup_coset_labels(g, h);
    let n = reps.len();
    let hm = h.members();
    let ho = hm.len() as u64;

    let images: Vec<ElemSet> = reps
        .iter()
        .map(|&x| {
            let mut s = ElemSet::new(order);
            for &a in hm {
                s.insert(g.commutator(a, x));
            }
            s
        })
        .collect();
    let sizes: Vec<u64> = images.iter().map(|s| s.len() as u64).collect();

    let mut pair_sizes = vec![vec![0u64; n]; n];
    let mut s_sizes = vec![vec![0u64; n]; n];
    let mut hat_empty = vec![vec![false; n]; n];
    let mut x_list = Vec::new();
    for i in 0..n {
        let left: Vec<Elem> = hm.iter().map(|&a| g.mul(a, reps[i])).collect();
        for j in 0..n {
            let nij = images[i].intersect(&images[j]).len() as u64;
            pair_sizes[i][j] = nij;
            let right: Vec<Elem> = hm.iter().map(|&b| g.mul(b, reps[j])).collect();
            let count = left.iter().map(|&u| right.iter().filter(|&&v| g.commute(u, v)).count() as u64).sum::<u64>();
            s_sizes[i][j] = count;

            let hij = g.commutator(reps[j], reps[i]);
            let empty = !images[i].iter().any(|u| images[j].contains(g.mul(hij, u)));
            hat_empty[i][j] = empty;

            let num = ho * ho * nij;
            let den = sizes[i] * sizes[j];
            if !num.is_multiple_of(den) {
                return Err(CommProbError::Inconsistent(format!("|H|^2 n_ij / (n_i n_j) not integral at ({i}, {j})")));
            }
            let nonzero = num / den;
            if count != 0 && count != nonzero {
                return Err(CommProbError::Inconsistent(format!("|S_{i}{j}| = {count}, expected 0 or {nonzero}")));
            }
            if (count == 0) != empty {
                return Err(CommProbError::Inconsistent(format!(
                    "emptiness mismatch at ({i}, {j}): |S| = {count}, coset intersection empty = {empty}"
                )));
            }
            if count != 0 {
                x_list.push(sizes[i] * sizes[j] / nij);
            }
        }
    }

    let form = EgyptianForm {
        n: n as u64,
        h_order: ho,
        coset_reps: reps,
        sizes,
        pair_sizes,
        s_sizes,
        hat_empty,
        x_list,
        pr: pr_direct(g),
    };
    if form.x_list.first() != Some(&1) {
        return Err(CommProbError::Inconsistent("x_1 != 1".into()));
    }
    let rebuilt = form.reconstruct();
    if rebuilt != form.pr {
        return Err(CommProbError::Inconsistent(format!("reconstruction {rebuilt} differs from Pr = {}", form.pr)));
    }
    Ok(form)
}

/// Largest abelian normal subgroup; ties go to the lexicographically smallest
/// member list.
pub fn largest_abelian_normal(g: &GroupTable) -> Result<Subgroup<'_>, CommProbError> {
    let mut best: Option<Subgroup<'_>> = None;
    for n in normal_subgroups(g)? {
        if !n.is_abelian() {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => n.order() > b.order() || (n.order() == b.order() && n.members() < b.members()),
        };
        if better {
            best = Some(n);
        }
    }
    Ok(best.expect("trivial subgroup is abelian and normal"))
}
