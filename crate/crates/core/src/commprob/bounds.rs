//! The inequality suite evaluated on a single group.
//!
//! Every verdict is exact. The two bounds with irrational right-hand sides
//! are decided by equivalent integer or rational comparisons:
//!
//! * `erdos-turan`, `k ≥ log₂log₂|G|`, holds iff `|G| ≤ 2^(2^k)`. The
//!   reported `rhs` is a dyadic upper bound of `log₂log₂|G| / |G|`.
//! * `fitting`, `Pr ≤ (G:F)^{-1/2}`, is compared as `Pr² ≤ 1/(G:F)`.

use serde::{Deserialize, Serialize};

use super::{pr_by_classes, pr_subgroup};
use crate::algebra::{
    all_subgroups_with, center, conjugacy_classes, derived_subgroup, fitting_subgroup_with, orbit_count_on_normal,
    quotient, Elem, Fingerprint, GroupTable, Subgroup, DEFAULT_SUBGROUP_CUTOFF,
};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundStatus {
    Holds,
    Violated,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundResult {
    pub id: String,
    pub lhs: Option<Rational>,
    pub relation: String,
    pub rhs: Option<Rational>,
    pub status: BoundStatus,
    pub note: Option<String>,
}

impl BoundResult {
    fn evaluated(id: &str, lhs: Rational, relation: &str, rhs: Rational, holds: bool) -> Self {
        BoundResult {
            id: id.into(),
            lhs: Some(lhs),
            relation: relation.into(),
            rhs: Some(rhs),
            status: if holds { BoundStatus::Holds } else { BoundStatus::Violated },
            note: None,
        }
    }

    fn compare(id: &str, lhs: Rational, relation: &str, rhs: Rational) -> Self {
        let holds = match relation {
            "<=" => lhs <= rhs,
            "<" => lhs < rhs,
            ">=" => lhs >= rhs,
            ">" => lhs > rhs,
            _ => unreachable!("unknown relation {relation}"),
        };
        Self::evaluated(id, lhs, relation, rhs, holds)
    }

    fn skipped(id: &str, relation: &str, why: impl Into<String>) -> Self {
        BoundResult {
            id: id.into(),
            lhs: None,
            relation: relation.into(),
            rhs: None,
            status: BoundStatus::Skipped,
            note: Some(why.into()),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrReport {
    pub group: String,
    pub order: u64,
    pub k: u64,
    pub pr: Rational,
    pub bounds: Vec<BoundResult>,
}

impl PrReport {
    pub fn violations(&self) -> impl Iterator<Item = &BoundResult> {
        self.bounds.iter().filter(|b| b.status == BoundStatus::Violated)
    }

    pub fn bound(&self, id: &str) -> Option<&BoundResult> {
        self.bounds.iter().find(|b| b.id == id)
    }

    pub const CSV_HEADER: &'static str = "group,order,k,pr,bound,lhs,relation,rhs,status";

    /// One CSV line per bound, fields in [`PrReport::CSV_HEADER`] order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        let opt = |r: &Option<Rational>| r.as_ref().map(ToString::to_string).unwrap_or_default();
        for b in &self.bounds {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                csv_field(&self.group),
                self.order,
                self.k,
                self.pr,
                b.id,
                opt(&b.lhs),
                b.relation,
                opt(&b.rhs),
                serde_json::to_value(b.status).unwrap().as_str().unwrap()
            ));
        }
        out
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Optional inputs to [`check_bounds`].
#[derive(Clone, Debug)]
pub struct BoundContext {
    /// Minimum degree of a nonlinear irreducible representation, from metadata.
    pub min_degree: Option<u64>,
    /// A normal subgroup for the orbit and quotient bounds.
    pub normal: Option<Vec<Elem>>,
    /// Class bound `c` used when `G/N` is too large to enumerate.
    pub class_bound: Option<u64>,
    pub skip_fitting: bool,
    pub subgroup_cutoff: usize,
}

impl Default for BoundContext {
    fn default() -> Self {
        BoundContext {
            min_degree: None,
            normal: None,
            class_bound: None,
            skip_fitting: false,
            subgroup_cutoff: DEFAULT_SUBGROUP_CUTOFF,
        }
    }
}

/// Upper bound on `log₂log₂ n` on a 2⁻³² grid. The f64 error is far below
/// one grid step, so one extra step makes the bound safe.
fn loglog_upper(n: u64) -> Rational {
    let l = (n as f64).log2().log2();
    let steps = (l * 4_294_967_296.0).ceil() as i64 + 1;
    Rational::new(steps, 1u64 << 32)
}

/// `log₂log₂ n ≤ k` exactly.
fn erdos_turan_holds(n: u64, k: u64) -> bool {
    if k >= 7 {
        return true;
    }
    (n as u128) <= 1u128 << (1u32 << k)
}

pub fn check_bounds(g: &GroupTable, ctx: &BoundContext) -> PrReport {
    let n = g.order() as u64;
    let k = conjugacy_classes(g).len() as u64;
    let pr = pr_by_classes(g);
    let abelian = g.is_abelian();
    let d = derived_subgroup(g);
    let z = center(g);
    let mut bounds = Vec::new();

    if n <= 2 {
        bounds.push(BoundResult::skipped("erdos-turan", ">=", "order <= 2"));
    } else {
        let rhs = loglog_upper(n) / Rational::from_integer(n);
        bounds.push(
            BoundResult::evaluated("erdos-turan", pr.clone(), ">=", rhs, erdos_turan_holds(n, k))
                .with_note("verdict: |G| <= 2^(2^k); rhs is a dyadic upper bound"),
        );
    }

    if ctx.skip_fitting {
        bounds.push(BoundResult::skipped("fitting", "<=", "disabled"));
    } else {
        match fitting_subgroup_with(g, ctx.subgroup_cutoff) {
            Ok(f) => {
                let idx = (g.order() / f.order()) as u64;
                bounds.push(
                    BoundResult::compare("fitting", &pr * &pr, "<=", Rational::new(1u64, idx))
                        .with_note(format!("compared squared; (G:F) = {idx}")),
                );
            }
            Err(e) => bounds.push(BoundResult::skipped("fitting", "<=", e.to_string())),
        }
    }

    let elementary = Rational::new(1, 4) + Rational::new(3u64, 4 * d.order() as u64);
    bounds.push(BoundResult::compare("elementary", pr.clone(), "<=", elementary));

    let q = quotient(g, &z).expect("centre is normal");
    if abelian {
        bounds.push(BoundResult::skipped("gustafson", "<=", "abelian"));
        bounds.push(BoundResult::skipped("gustafson-equality", "iff", "abelian"));
    } else {
        let five_eighths = Rational::new(5, 8);
        bounds.push(BoundResult::compare("gustafson", pr.clone(), "<=", five_eighths.clone()));
        let klein = q.order() == 4 && Fingerprint::of(&q).exponent == 2;
        let at_max = pr == five_eighths;
        bounds.push(
            BoundResult::evaluated("gustafson-equality", pr.clone(), "iff", five_eighths, at_max == klein)
                .with_note(format!("Pr = 5/8: {at_max}; G/Z ~ C2xC2: {klein}")),
        );
    }

    match (ctx.min_degree, abelian) {
        (Some(dg), false) => {
            let inv_d2 = Rational::new(1u64, dg * dg);
            let inv_dd = Rational::new(1u64, d.order() as u64);
            let upper = &inv_d2 + (Rational::one() - &inv_d2) * &inv_dd;
            bounds.push(BoundResult::compare("degree-lower", pr.clone(), ">", inv_dd));
            bounds.push(BoundResult::compare("degree-upper", pr.clone(), "<=", upper).with_note(format!("d = {dg}")));
        }
        (Some(_), true) => {
            bounds.push(BoundResult::skipped("degree-lower", ">", "abelian"));
            bounds.push(BoundResult::skipped("degree-upper", "<=", "abelian"));
        }
        (None, _) => {
            bounds.push(BoundResult::skipped("degree-lower", ">", "no degree metadata"));
            bounds.push(BoundResult::skipped("degree-upper", "<=", "no degree metadata"));
        }
    }

    match ctx.normal.as_deref().map(|m| Subgroup::try_new(g, m)) {
        None => {
            bounds.push(BoundResult::skipped("orbit", "<=", "no normal subgroup supplied"));
            bounds.push(BoundResult::skipped("quotient", "<=", "no normal subgroup supplied"));
        }
        Some(None) => {
            bounds.push(BoundResult::skipped("orbit", "<=", "supplied set is not a subgroup"));
            bounds.push(BoundResult::skipped("quotient", "<=", "supplied set is not a subgroup"));
        }
        Some(Some(nsub)) if !nsub.is_normal() => {
            bounds.push(BoundResult::skipped("orbit", "<=", "supplied subgroup is not normal"));
            bounds.push(BoundResult::skipped("quotient", "<=", "supplied subgroup is not normal"));
        }
        Some(Some(nsub)) => {
            let gn = quotient(g, &nsub).expect("normal");
            let c = match all_subgroups_with(&gn, ctx.subgroup_cutoff) {
                Ok(subs) => Some(subs.iter().map(|h| conjugacy_classes(&h.to_table()).len() as u64).max().unwrap_or(1)),
                Err(_) => ctx.class_bound,
            };
            match c {
                Some(c) => {
                    let orbits = orbit_count_on_normal(g, &nsub).expect("normal") as u64;
                    let rhs = Rational::new(c, gn.order() as u64) * Rational::new(orbits, nsub.order() as u64);
                    bounds.push(
                        BoundResult::compare("orbit", pr.clone(), "<=", rhs)
                            .with_note(format!("c = {c}, k_G(N) = {orbits}, |N| = {}", nsub.order())),
                    );
                }
                None => bounds.push(BoundResult::skipped("orbit", "<=", "G/N too large and no class bound")),
            }
            let rhs = pr_subgroup(&nsub) * pr_by_classes(&gn);
            bounds.push(BoundResult::compare("quotient", pr.clone(), "<=", rhs));
        }
    }

    PrReport { group: g.name().unwrap_or("G").to_string(), order: n, k, pr, bounds }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{fitting_subgroup, normal_subgroups};
    use crate::constructions::{make, FamilySpec};

    fn build(f: &str, p: &[u64]) -> GroupTable {
        make(&FamilySpec::new(f, p)).unwrap().0
    }

    #[test]
    fn erdos_turan_exact() {
        // log2 log2 16 = 2
        assert!(erdos_turan_holds(16, 2));
        assert!(!erdos_turan_holds(17, 2));
        assert!(erdos_turan_holds(1 << 40, 7));
        let up = loglog_upper(16);
        assert!(up > Rational::from_integer(2u64) && up < Rational::new(2_000_001, 1_000_000));
    }

    #[test]
    fn d4_gustafson_equality() {
        let r = check_bounds(&build("dihedral", &[4]), &BoundContext::default());
        assert_eq!(r.pr, Rational::new(5, 8));
        assert_eq!(r.bound("gustafson").unwrap().status, BoundStatus::Holds);
        let eq = r.bound("gustafson-equality").unwrap();
        assert_eq!(eq.status, BoundStatus::Holds);
        assert!(eq.note.as_deref().unwrap().contains("Pr = 5/8: true; G/Z ~ C2xC2: true"));
        assert_eq!(r.violations().count(), 0);
    }

    #[test]
    fn s3_fitting_squared() {
        let g = build("symmetric", &[3]);
        assert_eq!(fitting_subgroup(&g).unwrap().order(), 3);
        let r = check_bounds(&g, &BoundContext::default());
        let f = r.bound("fitting").unwrap();
        assert_eq!(f.lhs, Some(Rational::new(1, 4)));
        assert_eq!(f.rhs, Some(Rational::new(1, 2)));
        assert_eq!(f.status, BoundStatus::Holds);
    }

    #[test]
    fn a5_elementary() {
        let r = check_bounds(&build("alternating", &[5]), &BoundContext::default());
        let e = r.bound("elementary").unwrap();
        assert_eq!(e.lhs, Some(Rational::new(1, 12)));
        assert_eq!(e.rhs, Some(Rational::new(21, 80)));
        assert_eq!(e.status, BoundStatus::Holds);
    }

    #[test]
    fn skipped_bounds_are_listed() {
        let r = check_bounds(&build("cyclic", &[2]), &BoundContext::default());
        assert_eq!(r.bound("erdos-turan").unwrap().status, BoundStatus::Skipped);
        assert_eq!(r.bound("gustafson").unwrap().status, BoundStatus::Skipped);
        assert_eq!(r.bound("orbit").unwrap().status, BoundStatus::Skipped);
        let ctx = BoundContext { skip_fitting: true, ..Default::default() };
        let r = check_bounds(&build("symmetric", &[3]), &ctx);
        assert_eq!(r.bound("fitting").unwrap().status, BoundStatus::Skipped);
    }

    #[test]
    fn degree_and_orbit_bounds() {
        let g = build("symmetric", &[4]);
        let ns = normal_subgroups(&g).unwrap();
        let ctx = BoundContext { min_degree: Some(2), normal: Some(ns[1].members().to_vec()), ..Default::default() };
        let r = check_bounds(&g, &ctx);
        for id in ["degree-lower", "degree-upper", "orbit", "quotient"] {
            assert_eq!(r.bound(id).unwrap().status, BoundStatus::Holds, "{id}");
        }
        assert!(r.to_csv().starts_with(PrReport::CSV_HEADER));
    }
}
