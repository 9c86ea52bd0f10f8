//! Sums of unit fractions: exact solutions, the largest value strictly below
//! a probe, and gap certificates.
//!
//! `S_n` is the set of sums `1/x_1 + … + 1/x_n` with positive integers `x_i`.
//!
//! # Largest element below a probe
//!
//! Write `f(n, l) = max S_n ∩ (0, l)`. For one term it is `1/x` with
//! `x = ⌊1/l⌋ + 1`. For `n ≥ 2` let `m = f(n-1, l)`:
//!
//! * `g(x) = 1/x + f(n-1, l - 1/x)` is an element of `S_n` below `l` for
//!   every `x` with `1/x < l`, and `f(n, l)` is the largest such `g(x)`.
//! * Once `1/x < l - m`, the inner maximum is pinned at `m` (it is at least
//!   `m` because `m < l - 1/x`, at most `m` because `l - 1/x < l`). Among those
//!   branches the best is the smallest such `x`, `x_stab = ⌊1/(l-m)⌋ + 1`.
//! * `m + 1/x_stab > m`, so the optimum exceeds `m`; its largest term `1/a`
//!   is at least a `1/n` share of it, giving `a ≤ ⌊n/m⌋`.
//!
//! So only `x` in `[⌊1/l⌋+1, min(x_stab-1, ⌊n/m⌋)]` need recursion, plus the
//! single stabilized candidate. The recursion is memoized on `(n, l)`.

use std::num::NonZeroUsize;
use std::sync::LazyLock;

use lru::LruCache;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use parking_lot::Mutex;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::rational::Rational;

const MEMO_CAPACITY: usize = 1 << 16;
const TRACE_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EgyptianError {
    #[error("no element of the set lies below {0}")]
    NoElementBelow(Rational),
    #[error("intermediate value exceeds machine integer range")]
    Overflow,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Denominators of a unit-fraction sum, largest first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct UnitFractionMultiset {
    pub terms: Vec<u64>,
    pub value: Rational,
}

impl UnitFractionMultiset {
    pub fn new(mut terms: Vec<u64>) -> Self {
        assert!(terms.iter().all(|&x| x >= 1), "denominators must be positive");
        terms.sort_unstable_by(|a, b| b.cmp(a));
        let value = terms.iter().map(|&x| Rational::unit(x)).sum();
        UnitFractionMultiset { terms, value }
    }
}

/// One explored top-level branch `x ↦ 1/x + f(n-1, l - 1/x)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Branch {
    pub x: u64,
    pub value: Rational,
    pub stabilized: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapCertificate {
    pub n: usize,
    pub l: Rational,
    pub max_below: Option<Rational>,
    pub epsilon: Rational,
    pub witness: Option<UnitFractionMultiset>,
    /// At most 64 top-level branches, in the order explored.
    pub search_trace: Vec<Branch>,
}

impl Serialize for GapCertificate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(5))?;
        m.serialize_entry("n", &self.n)?;
        m.serialize_entry("l", &self.l)?;
        m.serialize_entry("max_below", &self.max_below)?;
        m.serialize_entry("epsilon", &self.epsilon)?;
        m.serialize_entry("witness", &self.witness.as_ref().map(|w| &w.terms))?;
        m.end()
    }
}

// ---------------------------------------------------------------------------
// Exact solutions

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn reduce(p: u128, q: u128) -> (u128, u128) {
    let g = gcd(p, q);
    (p / g, q / g)
}

fn factorize(mut n: u128) -> Vec<(u128, u32)> {
    let mut out = Vec::new();
    let mut d = 2u128;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Divisors of `q²` not exceeding `q`.
fn small_divisors_of_square(q: u128) -> Vec<u128> {
    let mut divs = vec![1u128];
    for (p, e) in factorize(q) {
        let mut next = Vec::with_capacity(divs.len() * (2 * e as usize + 1));
        for &d in &divs {
            let mut pk = 1u128;
            for _ in 0..=2 * e {
                match d.checked_mul(pk) {
                    Some(v) if v <= q => next.push(v),
                    _ => break,
                }
                pk = match pk.checked_mul(p) {
                    Some(v) => v,
                    None => break,
                };
            }
        }
        divs = next;
    }
    divs.sort_unstable();
    divs
}

struct Solver {
    out: Vec<Vec<u64>>,
    overflow: bool,
}

impl Solver {
    /// Extends `prefix` (non-decreasing denominators) by `k` terms summing to `p/q`.
    fn rec(&mut self, k: usize, p: u128, q: u128, min_a: u128, prefix: &mut Vec<u64>) {
        if self.overflow {
            return;
        }
        match k {
            1 => {
                if p == 1 && q >= min_a {
                    match u64::try_from(q) {
                        Ok(x) => {
                            prefix.push(x);
                            self.out.push(prefix.clone());
                            prefix.pop();
                        }
                        Err(_) => self.overflow = true,
                    }
                }
            }
            2 => {
                // (pa - q)(pb - q) = q², a ≤ b
                let Some(q2) = q.checked_mul(q) else {
                    self.overflow = true;
                    return;
                };
                for d in small_divisors_of_square(q) {
                    let e = q2 / d;
                    if !(q + d).is_multiple_of(p) || !(q + e).is_multiple_of(p) {
                        continue;
                    }
                    let a = (q + d) / p;
                    let b = (q + e) / p;
                    if a < min_a {
                        continue;
                    }
                    match (u64::try_from(a), u64::try_from(b)) {
                        (Ok(a), Ok(b)) => {
                            prefix.push(a);
                            prefix.push(b);
                            self.out.push(prefix.clone());
                            prefix.truncate(prefix.len() - 2);
                        }
                        _ => self.overflow = true,
                    }
                }
            }
            _ => {
                // 1/a < p/q and k/a ≥ p/q
                let lo = (q / p + 1).max(min_a);
                let Some(hi) = (k as u128).checked_mul(q).map(|kq| kq / p) else {
                    self.overflow = true;
                    return;
                };
                for a in lo..=hi {
                    let (Some(num), Some(den)) = (p.checked_mul(a).map(|pa| pa - q), q.checked_mul(a)) else {
                        self.overflow = true;
                        return;
                    };
                    let (np, nq) = reduce(num, den);
                    prefix.push(a as u64);
                    self.rec(k - 1, np, nq, a, prefix);
                    prefix.pop();
                }
            }
        }
    }
}

/// Every multiset of `n` unit fractions summing to `q`, each listed with
/// denominators in non-increasing order, sorted lexicographically.
pub fn solve_exact(n: usize, q: &Rational) -> Result<Vec<UnitFractionMultiset>, EgyptianError> {
    if n == 0 {
        return Err(EgyptianError::InvalidInput("term count must be at least 1".into()));
    }
    if !q.is_positive() || q > &Rational::from_integer(n as u64) {
        return Ok(vec![]);
    }
    let (p, d) = q.to_u128_parts().ok_or(EgyptianError::Overflow)?;
    let mut solver = Solver { out: Vec::new(), overflow: false };
    solver.rec(n, p, d, 1, &mut Vec::with_capacity(n));
    if solver.overflow {
        return Err(EgyptianError::Overflow);
    }
    let mut out: Vec<UnitFractionMultiset> = solver.out.into_iter().map(UnitFractionMultiset::new).collect();
    out.sort_by(|a, b| a.terms.cmp(&b.terms));
    out.dedup();
    Ok(out)
}

// ---------------------------------------------------------------------------
// Largest element below a probe

type Best = (Rational, Vec<u64>);

static MEMO: LazyLock<Mutex<LruCache<(usize, Rational), Best>>> =
    LazyLock::new(|| Mutex::new(LruCache::new(NonZeroUsize::new(MEMO_CAPACITY).unwrap())));

fn to_u64(v: BigInt) -> Result<u64, EgyptianError> {
    v.to_u64().ok_or(EgyptianError::Overflow)
}

/// Smallest `x ≥ 1` with `1/x < l`.
fn first_unit_below(l: &Rational) -> Result<u64, EgyptianError> {
    to_u64(l.recip().floor() + 1)
}

fn push_term(mut terms: Vec<u64>, x: u64) -> Vec<u64> {
    terms.push(x);
    terms
}

/// `f(n, l)` with witness denominators (unordered).
fn best_below(n: usize, l: &Rational) -> Result<Best, EgyptianError> {
    let key = (n, l.clone());
    if let Some(hit) = MEMO.lock().get(&key) {
        return Ok(hit.clone());
    }
    let best = if n == 1 {
        let x = first_unit_below(l)?;
        (Rational::unit(x), vec![x])
    } else {
        expand(n, l, None)?
    };
    MEMO.lock().put(key, best.clone());
    Ok(best)
}

/// One level of the recursion; optionally logs the branches it explores.
fn expand(n: usize, l: &Rational, mut trace: Option<&mut Vec<Branch>>) -> Result<Best, EgyptianError> {
    let (m, wm) = best_below(n - 1, l)?;
    let x_min = first_unit_below(l)?;
    let x_stab = first_unit_below(&(l - &m))?;
    let x_cap = to_u64((Rational::from_integer(n as u64) / &m).floor())?;

    let stab_value = &m + Rational::unit(x_stab);
    let mut best = (stab_value.clone(), push_term(wm, x_stab));
    let mut log = |b: Branch| {
        if let Some(t) = trace.as_deref_mut() {
            if t.len() < TRACE_LIMIT {
                t.push(b);
            }
        }
    };
    for x in x_min..=x_stab.saturating_sub(1).min(x_cap) {
        let unit = Rational::unit(x);
        let (v, w) = best_below(n - 1, &(l - &unit))?;
        let cand = unit + v;
        log(Branch { x, value: cand.clone(), stabilized: false });
        if cand > best.0 {
            best = (cand, push_term(w, x));
        }
    }
    log(Branch { x: x_stab, value: stab_value, stabilized: true });
    Ok(best)
}

/// `max S_n ∩ (0, l)` with its witness and ε = `l - max`.
pub fn max_below(n: usize, l: &Rational) -> Result<GapCertificate, EgyptianError> {
    if n == 0 {
        return Err(EgyptianError::InvalidInput("term count must be at least 1".into()));
    }
    if !l.is_positive() {
        return Err(EgyptianError::NoElementBelow(l.clone()));
    }
    let mut trace = Vec::new();
    let (v, w) = if n == 1 {
        let b = best_below(1, l)?;
        trace.push(Branch { x: b.1[0], value: b.0.clone(), stabilized: false });
        b
    } else {
        expand(n, l, Some(&mut trace))?
    };
    debug_assert!(&v < l);
    Ok(GapCertificate {
        n,
        l: l.clone(),
        epsilon: l - &v,
        max_below: Some(v),
        witness: Some(UnitFractionMultiset::new(w)),
        search_trace: trace,
    })
}

/// `v_1 = max S_n ∩ (0, l)`, `v_{k+1} = max S_n ∩ (0, v_k)`.
pub fn descend(n: usize, l: &Rational, count: usize) -> Result<Vec<Rational>, EgyptianError> {
    let mut out = Vec::with_capacity(count);
    let mut probe = l.clone();
    for _ in 0..count {
        let c = max_below(n, &probe)?;
        probe = c.max_below.expect("present for positive probes");
        out.push(probe.clone());
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LimitPoint {
    pub is_limit: bool,
    /// `(m, solution)` with `m < n` terms.
    pub witness: Option<(usize, UnitFractionMultiset)>,
}

/// Limit points of `S_n` are `{0} ∪ S_1 ∪ … ∪ S_{n-1}`.
pub fn is_limit_point(n: usize, q: &Rational) -> Result<LimitPoint, EgyptianError> {
    if n == 0 {
        return Err(EgyptianError::InvalidInput("term count must be at least 1".into()));
    }
    if q.is_zero() {
        return Ok(LimitPoint { is_limit: true, witness: None });
    }
    for m in 1..n {
        if let Some(sol) = solve_exact(m, q)?.into_iter().next() {
            return Ok(LimitPoint { is_limit: true, witness: Some((m, sol)) });
        }
    }
    Ok(LimitPoint { is_limit: false, witness: None })
}

// ---------------------------------------------------------------------------
// Candidate commuting-probability values

/// Gap below `l` in the candidate set `{(1/n²)(1 + s)}`, `s ∈ {0} ∪ S_1 ∪ … ∪ S_{n²-1}`.
///
/// Every group with an abelian normal subgroup of index `n` has its
/// commuting probability in this set, but not every candidate is attained,
/// so the reported ε is a lower bound on the true gap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectrumQuery {
    pub index: u64,
    pub probe: Rational,
    pub max_below: Rational,
    pub epsilon: Rational,
    /// Denominators of the maximizing candidate including the leading 1:
    /// the candidate is `(1/n²) Σ 1/x`.
    pub x_list: Vec<u64>,
    /// Certificate for the inner sum `s` below `n²·l - 1`, when `s > 0`.
    pub inner: Option<GapCertificate>,
    pub note: &'static str,
}

const CANDIDATE_NOTE: &str = "candidate set is a superset of attained values; epsilon is a lower bound";

pub fn candidate_gap(n: u64, l: &Rational) -> Result<SpectrumQuery, EgyptianError> {
    if n == 0 {
        return Err(EgyptianError::InvalidInput("index must be at least 1".into()));
    }
    let n2 = Rational::from_integer(n * n);
    let t = &n2 * l - Rational::one();
    if !t.is_positive() {
        return Err(EgyptianError::NoElementBelow(l.clone()));
    }
    let terms = (n * n - 1) as usize;
    let (s, x_list, inner) = if terms == 0 {
        (Rational::zero(), vec![1], None)
    } else {
        // f is non-decreasing in the term count, so the largest count wins.
        let cert = max_below(terms, &t)?;
        let s = cert.max_below.clone().unwrap();
        let mut xs = vec![1];
        xs.extend(cert.witness.as_ref().unwrap().terms.iter().rev());
        (s, xs, Some(cert))
    };
    let value = (Rational::one() + s) / n2;
    Ok(SpectrumQuery {
        index: n,
        probe: l.clone(),
        epsilon: l - &value,
        max_below: value,
        x_list,
        inner,
        note: CANDIDATE_NOTE,
    })
}

/// Whether `v` is `(1/n²)(1 + s)` for some `s ∈ {0} ∪ S_1 ∪ … ∪ S_{n²-1}`.
pub fn in_candidate_set(n: u64, v: &Rational) -> Result<bool, EgyptianError> {
    let s = Rational::from_integer(n * n) * v - Rational::one();
    if s.is_zero() {
        return Ok(true);
    }
    if !s.is_positive() {
        return Ok(false);
    }
    for m in 1..(n * n) as usize {
        if !solve_exact(m, &s)?.is_empty() {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    fn terms(v: &[UnitFractionMultiset]) -> Vec<Vec<u64>> {
        v.iter().map(|m| m.terms.clone()).collect()
    }

    #[test]
    fn solve_small() {
        assert_eq!(terms(&solve_exact(1, &r(1, 2)).unwrap()), vec![vec![2]]);
        assert_eq!(terms(&solve_exact(3, &r(1, 1)).unwrap()), vec![vec![3, 3, 3], vec![4, 4, 2], vec![6, 3, 2]]);
        assert!(solve_exact(2, &r(3, 1)).unwrap().is_empty());
        assert!(solve_exact(2, &r(0, 1)).unwrap().is_empty());
        assert!(solve_exact(2, &r(-1, 2)).unwrap().is_empty());
        assert_eq!(terms(&solve_exact(2, &r(2, 1)).unwrap()), vec![vec![1, 1]]);
        assert!(solve_exact(0, &r(1, 2)).is_err());
    }

    #[test]
    fn divisors_of_square() {
        assert_eq!(small_divisors_of_square(6), vec![1, 2, 3, 4, 6]);
        assert_eq!(small_divisors_of_square(1), vec![1]);
    }

    #[test]
    fn max_below_examples() {
        let c = max_below(1, &r(1, 2)).unwrap();
        assert_eq!(c.max_below, Some(r(1, 3)));
        assert_eq!(c.epsilon, r(1, 6));

        let c = max_below(2, &r(1, 1)).unwrap();
        assert_eq!(c.max_below, Some(r(5, 6)));
        assert_eq!(c.witness.as_ref().unwrap().terms, vec![3, 2]);

        let c = max_below(2, &r(1, 2)).unwrap();
        assert_eq!(c.max_below, Some(r(10, 21)));
        assert_eq!(c.epsilon, r(1, 42));
        assert_eq!(c.witness.as_ref().unwrap().terms, vec![7, 3]);
        assert!(!c.search_trace.is_empty());
    }

    #[test]
    fn max_below_above_one() {
        // 1 is the largest unit fraction; 1 + 1 < 5/2
        assert_eq!(max_below(2, &r(5, 2)).unwrap().max_below, Some(r(2, 1)));
        assert_eq!(max_below(1, &r(3, 1)).unwrap().max_below, Some(r(1, 1)));
    }

    #[test]
    fn max_below_rejects_non_positive() {
        assert!(matches!(max_below(2, &r(0, 1)), Err(EgyptianError::NoElementBelow(_))));
    }

    #[test]
    fn certificate_json_shape() {
        let c = max_below(2, &r(1, 2)).unwrap();
        assert_eq!(
            serde_json::to_string(&c).unwrap(),
            r#"{"n":2,"l":"1/2","max_below":"10/21","epsilon":"1/42","witness":[7,3]}"#
        );
    }

    #[test]
    fn descend_examples() {
        assert_eq!(descend(1, &r(1, 1), 3).unwrap(), vec![r(1, 2), r(1, 3), r(1, 4)]);
        assert_eq!(descend(2, &r(1, 1), 3).unwrap(), vec![r(5, 6), r(3, 4), r(7, 10)]);
    }

    #[test]
    fn limit_point_examples() {
        let a = is_limit_point(2, &r(1, 2)).unwrap();
        assert!(a.is_limit);
        assert_eq!(a.witness.as_ref().unwrap().0, 1);
        assert_eq!(a.witness.unwrap().1.terms, vec![2]);
        let b = is_limit_point(3, &r(10, 21)).unwrap();
        assert!(b.is_limit);
        assert_eq!(b.witness.as_ref().unwrap().0, 2);
        assert_eq!(b.witness.unwrap().1.terms, vec![7, 3]);
        assert!(!is_limit_point(2, &r(5, 6)).unwrap().is_limit);
        assert!(is_limit_point(2, &r(0, 1)).unwrap().is_limit);
    }

    #[test]
    fn candidate_gap_examples() {
        assert!(matches!(candidate_gap(1, &r(1, 1)), Err(EgyptianError::NoElementBelow(_))));
        let q = candidate_gap(2, &r(5, 8)).unwrap();
        assert_eq!(q.max_below, r(13, 21));
        assert_eq!(q.epsilon, r(1, 168));
        assert_eq!(q.x_list, vec![1, 1, 3, 7]);
        let q = candidate_gap(2, &r(1, 2)).unwrap();
        assert_eq!(q.max_below, r(83, 168));
        assert_eq!(q.epsilon, r(1, 168));
        assert_eq!(q.x_list, vec![1, 2, 3, 7]);
        // n = 1: the only candidate is 1
        assert_eq!(candidate_gap(1, &r(2, 1)).unwrap().max_below, r(1, 1));
    }

    #[test]
    fn candidate_membership() {
        assert!(in_candidate_set(2, &r(5, 8)).unwrap());
        assert!(in_candidate_set(2, &r(1, 2)).unwrap());
        assert!(in_candidate_set(2, &r(1, 4)).unwrap());
        assert!(!in_candidate_set(2, &r(1, 5)).unwrap());
        // 4·(7/12) - 1 = 4/3 = 1 + 1/3
        assert!(in_candidate_set(2, &r(7, 12)).unwrap());
    }
}
