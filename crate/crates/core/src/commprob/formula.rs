//! Closed-form commuting probabilities for groups of special shape.

use serde::Serialize;

use super::{pr_direct, CommProbError};
use crate::algebra::{
    all_subgroups, center, centralizer, derived_subgroup, generate, quotient, Elem, ElemSet, Fingerprint, GroupTable,
    Subgroup,
};
use crate::rational::Rational;

/// One subgroup `K < G′` with cyclic `G′/K` in the class-2 p-group sum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KTerm {
    pub members: Vec<Elem>,
    /// `(G′ : K)`
    pub index: u64,
    /// `p^{s(K)} = |G| / |{x : [G, x] ⊆ K}|`
    pub s: u32,
    pub term: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormulaTrace {
    pub pattern: String,
    /// `None` only for the trivial group.
    pub p: Option<u64>,
    pub derived_order: u64,
    pub terms: Vec<KTerm>,
    /// Set when `|G′| = p` and `G/Z(G)` is elementary abelian of order `p^{2s}`;
    /// holds `(s, (1/p)(1 + (p-1)/p^{2s}))`.
    pub extraspecial_shortcut: Option<(u32, Rational)>,
    pub predicted: Rational,
}

/// If `n = p^a` with `a ≥ 1`, returns `(p, a)`.
pub(crate) fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n.is_multiple_of(*d)).unwrap();
    let mut m = n;
    let mut a = 0;
    while m.is_multiple_of(p) {
        m /= p;
        a += 1;
    }
    (m == 1).then_some((p, a))
}

fn exact_log(mut n: u64, p: u64) -> Option<u32> {
    let mut e = 0;
    while n > 1 {
        if !n.is_multiple_of(p) {
            return None;
        }
        n /= p;
        e += 1;
    }
    Some(e)
}

/// Commuting probability of a p-group with `G′ ⊆ Z(G)` from its character sum:
///
/// `Pr(G) = (1/|G′|)(1 + Σ_K (p-1)(G′:K) / p^{s(K)+1})`
///
/// over proper `K < G′` with `G′/K` cyclic.
pub fn pr_central_pgroup_formula(g: &GroupTable) -> Result<(Rational, FormulaTrace), CommProbError> {
    let n = g.order() as u64;
    let d = derived_subgroup(g);
    if n == 1 {
        let trace = FormulaTrace {
            pattern: "central-p-group".into(),
            p: None,
            derived_order: 1,
            terms: vec![],
            extraspecial_shortcut: None,
            predicted: Rational::one(),
        };
        return Ok((Rational::one(), trace));
    }
    let (p, _) =
        prime_power(n).ok_or_else(|| CommProbError::PreconditionFailed(format!("order {n} is not a prime power")))?;
    let z = center(g);
    if !d.is_subgroup_of(&z) {
        return Err(CommProbError::PreconditionFailed("derived subgroup is not central".into()));
    }

    let d_table = d.to_table();
    let mut terms = Vec::new();
    for k in all_subgroups(&d_table)? {
        if k.order() == d.order() {
            continue;
        }
        // G′/K cyclic iff some single element together with K generates G′.
        let k_in_g: Vec<Elem> = k.members().iter().map(|&i| d.members()[i as usize]).collect();
        let cyclic_quotient = d.members().iter().any(|&x| {
            let mut gens = k_in_g.clone();
            gens.push(x);
            generate(g, &gens).order() == d.order()
        });
        if !cyclic_quotient {
            continue;
        }
        let kset = ElemSet::from_members(g.order(), &k_in_g);
        let count = g.elements().filter(|&x| g.elements().all(|y| kset.contains(g.commutator(y, x)))).count() as u64;
        let s = exact_log(n / count, p)
            .ok_or_else(|| CommProbError::Inconsistent(format!("|G| / {count} is not a power of {p}")))?;
        let index = (d.order() / k.order()) as u64;
        let term = Rational::new((p - 1) * index, 1u64) / Rational::from_integer(p).pow(s as i32 + 1);
        terms.push(KTerm { members: k_in_g, index, s, term });
    }
    let predicted = (Rational::one() + terms.iter().map(|t| t.term.clone()).sum::<Rational>())
        / Rational::from_integer(d.order() as u64);

    let mut shortcut = None;
    if d.order() as u64 == p {
        let q = quotient(g, &z)?;
        let fp = Fingerprint::of(&q);
        if fp.abelian && fp.exponent as u64 == p {
            if let Some(e) = exact_log(q.order() as u64, p).filter(|e| e % 2 == 0 && *e > 0) {
                let s = e / 2;
                let v = (Rational::one() + Rational::from_integer(p - 1) / Rational::from_integer(p).pow(2 * s as i32))
                    / Rational::from_integer(p);
                shortcut = Some((s, v));
            }
        }
    }

    let trace = FormulaTrace {
        pattern: "central-p-group".into(),
        p: Some(p),
        derived_order: d.order() as u64,
        terms,
        extraspecial_shortcut: shortcut,
        predicted: predicted.clone(),
    };
    Ok((predicted, trace))
}

/// One applicable special-form prediction compared against brute force.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecialFormCheck {
    pub pattern: String,
    pub s: Option<u32>,
    pub predicted: Option<Rational>,
    pub actual: Rational,
    pub matches: bool,
}

/// Detects which structural hypotheses hold and evaluates their predictions.
///
/// Patterns:
/// * `derived-2`: `|G′| = 2`, `G/Z ≅ C_2^{2s}`: `½(1 + 2^{-2s})`
/// * `derived-3-s3`: `G′ ≅ C_3`, `G/Z ≅ S_3`: `1/2`
/// * `derived-4`: `|G′| = 4`, `|G′ ∩ Z| = 2`: `¼(1 + ¼ + 2^{-(2s+1)})` with
///   `2^{2s} = [C_G(G′) : Z(C_G(G′))]`
/// * `derived-6`: `G′ ≅ C_6`, `G′ ∩ Z ≅ C_2`: `Pr - ¼` must be `2^{-s}`, `s ≥ 3`
pub fn verify_special_forms(g: &GroupTable) -> Result<Vec<SpecialFormCheck>, CommProbError> {
    let actual = pr_direct(g);
    let d = derived_subgroup(g);
    let z = center(g);
    let dz = d.intersection(&z);
    let q = quotient(g, &z)?;
    let qfp = Fingerprint::of(&q);
    let dfp = Fingerprint::of(&d.to_table());
    let mut out = Vec::new();
    let two = Rational::from_integer(2u64);

    if d.order() == 2 && qfp.is_elementary_abelian_2() {
        if let Some(e) = exact_log(q.order() as u64, 4).filter(|&e| e >= 1) {
            let predicted = (Rational::one() + two.pow(-2 * e as i32)) / two.clone();
            out.push(check("derived-2", Some(e), Some(predicted), &actual));
        }
    }
    if d.order() == 3 && q.order() == 6 && !qfp.abelian {
        out.push(check("derived-3-s3", None, Some(Rational::new(1, 2)), &actual));
    }
    if d.order() == 4 && dz.order() == 2 {
        let c = centralizer(g, d.members());
        let zc = Subgroup::try_new(g, &centralizer_within(g, &c)).expect("centre of a subgroup");
        let idx = (c.order() / zc.order()) as u64;
        let (s, predicted) = match exact_log(idx, 2) {
            Some(e) => {
                let v =
                    (Rational::one() + Rational::new(1, 4) + two.pow(-(e as i32 + 1))) / Rational::from_integer(4u64);
                (e.is_multiple_of(2).then_some(e / 2), Some(v))
            }
            None => (None, None),
        };
        out.push(check("derived-4", s, predicted, &actual));
    }
    if d.order() == 6 && dfp.abelian && dz.order() == 2 {
        let rest = &actual - Rational::new(1, 4);
        let s = if rest.is_positive() && rest.numer() == &1.into() {
            rest.denom().to_string().parse::<u64>().ok().and_then(|den| exact_log(den, 2))
        } else {
            None
        };
        let s = s.filter(|&s| s >= 3);
        let predicted = s.map(|s| Rational::new(1, 4) + two.pow(-(s as i32)));
        out.push(check("derived-6", s, predicted, &actual));
    }
    Ok(out)
}

fn centralizer_within(g: &GroupTable, c: &Subgroup<'_>) -> Vec<Elem> {
    c.members().iter().copied().filter(|&x| c.members().iter().all(|&y| g.commute(x, y))).collect()
}

fn check(pattern: &str, s: Option<u32>, predicted: Option<Rational>, actual: &Rational) -> SpecialFormCheck {
    let matches = predicted.as_ref() == Some(actual);
    SpecialFormCheck { pattern: pattern.into(), s, predicted, actual: actual.clone(), matches }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{make, FamilySpec};

    fn build(f: &str, p: &[u64]) -> GroupTable {
        make(&FamilySpec::new(f, p)).unwrap().0
    }

    #[test]
    fn prime_power_detection() {
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(125), Some((5, 3)));
        assert_eq!(prime_power(12), None);
    }

    #[test]
    fn central_formula_examples() {
        let (v, t) = pr_central_pgroup_formula(&build("cyclic", &[8])).unwrap();
        assert_eq!(v, Rational::one());
        assert!(t.terms.is_empty());

        let (v, t) = pr_central_pgroup_formula(&build("extraspecial", &[3, 1])).unwrap();
        assert_eq!(v, Rational::new(11, 27));
        assert_eq!(t.extraspecial_shortcut, Some((1, Rational::new(11, 27))));

        let (v, t) = pr_central_pgroup_formula(&build("dihedral", &[4])).unwrap();
        assert_eq!(v, Rational::new(5, 8));
        assert_eq!(t.terms.len(), 1);
        assert_eq!(t.terms[0].s, 2);
    }

    #[test]
    fn central_formula_preconditions() {
        assert!(matches!(
            pr_central_pgroup_formula(&build("symmetric", &[3])),
            Err(CommProbError::PreconditionFailed(_))
        ));
        // D_8 has G′ = C_4 not central.
        assert!(matches!(
            pr_central_pgroup_formula(&build("dihedral", &[8])),
            Err(CommProbError::PreconditionFailed(_))
        ));
    }

    #[test]
    fn special_form_examples() {
        let d4 = verify_special_forms(&build("dihedral", &[4])).unwrap();
        assert_eq!(d4.len(), 1);
        assert_eq!(d4[0].pattern, "derived-2");
        assert_eq!(d4[0].s, Some(1));
        assert_eq!(d4[0].predicted, Some(Rational::new(5, 8)));
        assert!(d4[0].matches);

        let s3 = verify_special_forms(&build("symmetric", &[3])).unwrap();
        assert_eq!(s3.len(), 1);
        assert_eq!(s3[0].pattern, "derived-3-s3");
        assert!(s3[0].matches);

        let d8 = verify_special_forms(&build("dihedral", &[8])).unwrap();
        assert_eq!(d8.len(), 1);
        assert_eq!(d8[0].pattern, "derived-4");
        assert_eq!(d8[0].s, Some(0));
        assert_eq!(d8[0].predicted, Some(Rational::new(7, 16)));
        assert!(d8[0].matches);

        assert!(verify_special_forms(&build("cyclic", &[10])).unwrap().is_empty());
    }
}
