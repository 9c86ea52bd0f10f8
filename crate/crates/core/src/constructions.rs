//! Named group families with known-answer metadata.
//!
//! Each built group carries the commuting probability its family predicts
//! (when a closed form is known) and the minimum degree of a nonlinear
//! irreducible representation where character theory gives it. Both are
//! input data, never computed from the table.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraError, Elem, GroupTable, Permutation, DEFAULT_ORDER_CAP};
use crate::exec::{self, Execution};
use crate::rational::Rational;

const SYMMETRIC_MAX: u64 = 7;
const EXTRASPECIAL_MAX_ORDER: u64 = 3125;
const DEGREE_SOURCE: &str = "standard character theory";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Cyclic,
    Dihedral,
    Symmetric,
    Alternating,
    Dicyclic,
    Extraspecial,
    Product,
}

impl FromStr for Family {
    type Err = ConstructionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "cyclic" => Family::Cyclic,
            "dihedral" => Family::Dihedral,
            "symmetric" => Family::Symmetric,
            "alternating" => Family::Alternating,
            "dicyclic" => Family::Dicyclic,
            "extraspecial" => Family::Extraspecial,
            "product" => Family::Product,
            _ => return Err(ConstructionError::UnsupportedParams(format!("unknown family {s:?}"))),
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).unwrap();
        f.write_str(s.as_str().unwrap())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstructionError {
    #[error("unsupported parameters: {0}")]
    UnsupportedParams(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl ConstructionError {
    fn params(msg: impl Into<String>) -> Self {
        ConstructionError::UnsupportedParams(msg.into())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: Family,
    #[serde(default)]
    pub params: Vec<u64>,
    /// Factors of a `product`, in order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<FamilySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_pr: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_pr_source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_d: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_d_source: Option<String>,
}

impl FamilySpec {
    /// Panics on an unknown family name; use [`FamilySpec::parse`] for input.
    pub fn new(family: &str, params: &[u64]) -> Self {
        Self::of(family.parse().expect("known family"), params)
    }

    pub fn of(family: Family, params: &[u64]) -> Self {
        FamilySpec {
            family,
            params: params.to_vec(),
            factors: vec![],
            expected_pr: None,
            expected_pr_source: None,
            expected_d: None,
            expected_d_source: None,
        }
    }

    pub fn product(a: FamilySpec, b: FamilySpec) -> Self {
        let mut s = Self::of(Family::Product, &[]);
        s.factors = vec![a, b];
        s
    }

    /// Parses `family:p1,p2` terms joined by `*`, e.g. `dihedral:7` or
    /// `cyclic:7*extraspecial:7,1`.
    pub fn parse(text: &str) -> Result<Self, ConstructionError> {
        let parts: Vec<&str> = text.split('*').map(str::trim).collect();
        if parts.len() > 1 {
            let mut it = parts.into_iter().map(Self::parse);
            let first = it.next().unwrap()?;
            return it.try_fold(first, |acc, f| Ok(Self::product(acc, f?)));
        }
        let (name, params) = text.split_once(':').unwrap_or((text, ""));
        let params = params
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|p| p.parse::<u64>().map_err(|_| ConstructionError::params(format!("bad parameter {p:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::of(name.trim().parse()?, &params))
    }

    /// Short label such as `D7`, `Ex3^3` or `C2xS3`.
    pub fn label(&self) -> String {
        let p = &self.params;
        let get = |i: usize| p.get(i).copied().unwrap_or(0);
        match self.family {
            Family::Cyclic => format!("C{}", get(0)),
            Family::Dihedral => format!("D{}", get(0)),
            Family::Symmetric => format!("S{}", get(0)),
            Family::Alternating => format!("A{}", get(0)),
            Family::Dicyclic => format!("Dic{}", get(0)),
            Family::Extraspecial => format!("Ex{}^{}", get(0), 2 * get(1) + 1),
            Family::Product => self.factors.iter().map(FamilySpec::label).collect::<Vec<_>>().join("x"),
        }
    }

    fn single_param(&self, min: u64) -> Result<u64, ConstructionError> {
        match self.params.as_slice() {
            [n] if *n >= min => Ok(*n),
            _ => Err(ConstructionError::params(format!(
                "{} takes one parameter >= {min}, got {:?}",
                self.family, self.params
            ))),
        }
    }
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn perm_group(degree: usize, gens: &[Vec<Vec<u32>>]) -> Result<GroupTable, ConstructionError> {
    let gens = gens.iter().map(|c| Permutation::from_cycles(degree, c)).collect::<Result<Vec<_>, _>>()?;
    Ok(GroupTable::from_permutations(degree, &gens)?)
}

fn cyclic_table(n: usize) -> GroupTable {
    let op = (0..n * n).map(|i| ((i / n + i % n) % n) as Elem).collect();
    GroupTable::from_trusted(n, op)
}

fn dihedral_table(n: u64) -> Result<GroupTable, ConstructionError> {
    if n == 2 {
        return perm_group(4, &[vec![vec![0, 1], vec![2, 3]], vec![vec![0, 2], vec![1, 3]]]);
    }
    let n = n as usize;
    let rot: Vec<u32> = (0..n as u32).collect();
    let refl: Vec<Vec<u32>> = (1..n.div_ceil(2)).map(|i| vec![i as u32, (n - i) as u32]).collect();
    perm_group(n, &[vec![rot], refl])
}

fn symmetric_table(n: u64) -> Result<GroupTable, ConstructionError> {
    let n = n as usize;
    let gens = match n {
        0 | 1 => vec![],
        2 => vec![vec![vec![0, 1]]],
        _ => vec![vec![vec![0, 1]], vec![(0..n as u32).collect()]],
    };
    perm_group(n.max(1), &gens)
}

fn alternating_table(n: u64) -> Result<GroupTable, ConstructionError> {
    let n = n as usize;
    let gens: Vec<Vec<Vec<u32>>> = (2..n).map(|k| vec![vec![0, 1, k as u32]]).collect();
    perm_group(n.max(1), &gens)
}

/// `⟨a, x | a^{2m}, x² = a^m, x⁻¹ax = a⁻¹⟩`; `a^i x^e` has index `i + 2m·e`.
fn dicyclic_table(m: u64) -> GroupTable {
    let r = 2 * m as usize;
    let n = 2 * r;
    let mut op = vec![0 as Elem; n * n];
    for u in 0..n {
        let (i, e) = (u % r, u / r);
        for v in 0..n {
            let (j, f) = (v % r, v / r);
            let (k, h) = match (e, f) {
                (0, f) => ((i + j) % r, f),
                (_, 0) => ((i + r - j) % r, 1),
                _ => ((i + r - j + m as usize) % r, 0),
            };
            op[u * n + v] = (k + r * h) as Elem;
        }
    }
    GroupTable::from_trusted(n, op)
}

/// Exponent-p type (or the central product of `D_4`s for p = 2):
/// triples `(a, b, c) ∈ F_p^s × F_p^s × F_p` with
/// `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+a·b')`.
fn extraspecial_table(p: u64, s: u64) -> GroupTable {
    let p = p as usize;
    let s = s as usize;
    let ps = p.pow(s as u32);
    let n = ps * ps * p;
    let digits = |mut v: usize| -> Vec<usize> {
        (0..s)
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    };
    let pack = |d: &[usize]| d.iter().rev().fold(0, |acc, &x| acc * p + x);
    // index = c + p·(b + ps·a)
    let decode = |u: usize| (digits(u / p / ps), digits((u / p) % ps), u % p);
    let elems: Vec<_> = (0..n).map(decode).collect();
    let mut op = vec![0 as Elem; n * n];
    for (u, (a, b, c)) in elems.iter().enumerate() {
        for (v, (a2, b2, c2)) in elems.iter().enumerate() {
            let dot: usize = a.iter().zip(b2).map(|(x, y)| x * y).sum();
            let sa: Vec<usize> = a.iter().zip(a2).map(|(x, y)| (x + y) % p).collect();
            let sb: Vec<usize> = b.iter().zip(b2).map(|(x, y)| (x + y) % p).collect();
            let sc = (c + c2 + dot) % p;
            op[u * n + v] = (sc + p * (pack(&sb) + ps * pack(&sa))) as Elem;
        }
    }
    GroupTable::from_trusted(n, op)
}

fn dihedral_pr(n: u64) -> Rational {
    if n.is_multiple_of(2) {
        Rational::new(n + 6, 4 * n)
    } else {
        Rational::new(n + 3, 4 * n)
    }
}

/// Builds the group and returns the spec with expected values filled in.
pub fn make(spec: &FamilySpec) -> Result<(GroupTable, FamilySpec), ConstructionError> {
    let mut out = spec.clone();
    let set_pr = |o: &mut FamilySpec, v: Rational, src: &str| {
        o.expected_pr = Some(v);
        o.expected_pr_source = Some(src.into());
    };
    let set_d = |o: &mut FamilySpec, d: u64| {
        o.expected_d = Some(d);
        o.expected_d_source = Some(DEGREE_SOURCE.into());
    };
    let table = match spec.family {
        Family::Cyclic => {
            let n = spec.single_param(1)?;
            if n as usize > DEFAULT_ORDER_CAP {
                return Err(AlgebraError::OrderCapExceeded { cap: DEFAULT_ORDER_CAP }.into());
            }
            set_pr(&mut out, Rational::one(), "abelian");
            cyclic_table(n as usize)
        }
        Family::Dihedral => {
            let n = spec.single_param(2)?;
            if 2 * n as usize > DEFAULT_ORDER_CAP {
                return Err(AlgebraError::OrderCapExceeded { cap: DEFAULT_ORDER_CAP }.into());
            }
            let src = if n % 2 == 0 { "dihedral closed form, n even" } else { "dihedral closed form, n odd" };
            set_pr(&mut out, dihedral_pr(n), src);
            if n >= 3 {
                set_d(&mut out, 2);
            }
            dihedral_table(n)?
        }
        Family::Symmetric => {
            let n = spec.single_param(1)?;
            if n > SYMMETRIC_MAX {
                return Err(ConstructionError::params(format!("symmetric degree {n} > {SYMMETRIC_MAX}")));
            }
            match n {
                1 | 2 => set_pr(&mut out, Rational::one(), "abelian"),
                3 => set_pr(&mut out, dihedral_pr(3), "S3 = D3, dihedral closed form"),
                4 => set_pr(&mut out, Rational::new(5, 24), "octahedral group"),
                _ => {}
            }
            if let Some(d) = [(3, 2), (4, 2), (5, 4), (6, 5), (7, 6)].iter().find(|t| t.0 == n) {
                set_d(&mut out, d.1);
            }
            symmetric_table(n)?
        }
        Family::Alternating => {
            let n = spec.single_param(1)?;
            if n > SYMMETRIC_MAX {
                return Err(ConstructionError::params(format!("alternating degree {n} > {SYMMETRIC_MAX}")));
            }
            match n {
                1..=3 => set_pr(&mut out, Rational::one(), "abelian"),
                4 => set_pr(&mut out, Rational::new(1, 3), "tetrahedral group"),
                5 => set_pr(&mut out, Rational::new(1, 12), "icosahedral group"),
                _ => {}
            }
            if let Some(d) = [(4, 3), (5, 3), (6, 5), (7, 6)].iter().find(|t| t.0 == n) {
                set_d(&mut out, d.1);
            }
            alternating_table(n)?
        }
        Family::Dicyclic => {
            let m = spec.single_param(1)?;
            if 4 * m as usize > DEFAULT_ORDER_CAP {
                return Err(AlgebraError::OrderCapExceeded { cap: DEFAULT_ORDER_CAP }.into());
            }
            if m == 1 {
                set_pr(&mut out, Rational::one(), "Dic1 = C4");
            } else {
                set_d(&mut out, 2);
            }
            dicyclic_table(m)
        }
        Family::Extraspecial => {
            let (p, s) = match spec.params.as_slice() {
                [p, s] if is_prime(*p) && *s >= 1 => (*p, *s),
                _ => {
                    return Err(ConstructionError::params(format!(
                        "extraspecial takes a prime p and s >= 1, got {:?}",
                        spec.params
                    )))
                }
            };
            let order = p.checked_pow(2 * s as u32 + 1).filter(|&o| o <= EXTRASPECIAL_MAX_ORDER);
            if order.is_none() {
                return Err(ConstructionError::params(format!(
                    "extraspecial order {p}^{} exceeds {EXTRASPECIAL_MAX_ORDER}",
                    2 * s + 1
                )));
            }
            let pr = (Rational::one() + Rational::new(p - 1, p.pow(2 * s as u32))) / Rational::from_integer(p);
            set_pr(&mut out, pr, "central p-group closed form, |G'| = p");
            set_d(&mut out, p.pow(s as u32));
            extraspecial_table(p, s)
        }
        Family::Product => {
            if spec.factors.len() != 2 || !spec.params.is_empty() {
                return Err(ConstructionError::params("product takes exactly two factors and no params"));
            }
            let (a, sa) = make(&spec.factors[0])?;
            let (b, sb) = make(&spec.factors[1])?;
            out.factors = vec![sa.clone(), sb.clone()];
            if let (Some(x), Some(y)) = (&sa.expected_pr, &sb.expected_pr) {
                set_pr(&mut out, x * y, "product of factor values");
            }
            // Irreducibles of A x B are tensor products, so the smallest
            // nonlinear degree is the smaller of the factors'.
            let nonlinear = |s: &FamilySpec| -> Option<Option<u64>> {
                if s.expected_pr == Some(Rational::one()) {
                    Some(None)
                } else {
                    s.expected_d.map(Some)
                }
            };
            if let (Some(x), Some(y)) = (nonlinear(&sa), nonlinear(&sb)) {
                if let Some(d) = x.into_iter().chain(y).min() {
                    set_d(&mut out, d);
                }
            }
            GroupTable::direct_product(&a, &b)?
        }
    };
    let label = out.label();
    Ok((table.named(label), out))
}

fn base_members(max_order: u64) -> Vec<FamilySpec> {
    let mut v = Vec::new();
    for n in 1..=max_order {
        v.push(FamilySpec::of(Family::Cyclic, &[n]));
    }
    for n in (2..).take_while(|n| 2 * n <= max_order) {
        v.push(FamilySpec::of(Family::Dihedral, &[n]));
    }
    for m in (2..).take_while(|m| 4 * m <= max_order) {
        v.push(FamilySpec::of(Family::Dicyclic, &[m]));
    }
    let fact = |n: u64| (1..=n).product::<u64>();
    for n in 3..=SYMMETRIC_MAX {
        if fact(n) <= max_order {
            v.push(FamilySpec::of(Family::Symmetric, &[n]));
        }
    }
    for n in 4..=SYMMETRIC_MAX {
        if fact(n) / 2 <= max_order {
            v.push(FamilySpec::of(Family::Alternating, &[n]));
        }
    }
    for p in (2..=max_order.min(EXTRASPECIAL_MAX_ORDER)).filter(|&p| is_prime(p)) {
        for s in 1.. {
            match p.checked_pow(2 * s as u32 + 1) {
                Some(o) if o <= max_order && o <= EXTRASPECIAL_MAX_ORDER => {
                    v.push(FamilySpec::of(Family::Extraspecial, &[p, s]))
                }
                _ => break,
            }
        }
    }
    v
}

fn spec_order(s: &FamilySpec) -> u64 {
    let p = &s.params;
    match s.family {
        Family::Cyclic => p[0],
        Family::Dihedral => 2 * p[0],
        Family::Symmetric => (1..=p[0]).product(),
        Family::Alternating => ((1..=p[0]).product::<u64>() / 2).max(1),
        Family::Dicyclic => 4 * p[0],
        Family::Extraspecial => p[0].pow(2 * p[1] as u32 + 1),
        Family::Product => s.factors.iter().map(spec_order).product(),
    }
}

/// The specs of [`corpus`], without building tables.
pub fn corpus_specs(max_order: u64) -> Vec<FamilySpec> {
    let base = base_members(max_order);
    let mut out = base.clone();
    let nontrivial: Vec<&FamilySpec> = base.iter().filter(|s| spec_order(s) > 1).collect();
    for (i, a) in nontrivial.iter().enumerate() {
        for b in &nontrivial[i..] {
            if spec_order(a) * spec_order(b) <= max_order {
                out.push(FamilySpec::product((*a).clone(), (*b).clone()));
            }
        }
    }
    out
}

/// Every family member of order at most `max_order`, then all pairwise
/// products within the cap. Order is deterministic.
pub fn corpus(max_order: u64) -> Vec<(GroupTable, FamilySpec)> {
    corpus_with(max_order, Execution::default())
}

pub fn corpus_with(max_order: u64, exec: Execution) -> Vec<(GroupTable, FamilySpec)> {
    let specs = corpus_specs(max_order);
    exec::map_ordered(exec, &specs, |s| make(s).expect("corpus specs are valid"))
}
