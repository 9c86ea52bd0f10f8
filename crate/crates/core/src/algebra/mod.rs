//! Finite groups as validated Cayley tables.
//!
//! Elements are indices `0..order` and the identity is always `0`. The
//! commutator convention is `[x, y] = x⁻¹y⁻¹xy` with conjugation
//! `x^y = y⁻¹xy`; under it `[xy, zw] = [x,w]^y [x,z]^{wy} [y,w] [y,z]^w`
//! holds identically.

mod bitset;
mod perm;
mod subgroup;

use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};

pub(crate) use bitset::ElemSet;
pub use perm::Permutation;
pub(crate) use subgroup::coset_labels as subgroup_coset_labels;
pub use subgroup::{
    all_subgroups, all_subgroups_with, center, centralizer, conjugacy_classes, derived_subgroup, fitting_subgroup,
    fitting_subgroup_with, generate, is_nilpotent, normal_core, normal_subgroups, normal_subgroups_with,
    orbit_count_on_normal, quotient, ClassPartition, Fingerprint, Subgroup,
};

/// Element index inside a [`GroupTable`].
pub type Elem = u32;

/// Closure cap for permutation groups and products.
pub const DEFAULT_ORDER_CAP: usize = 20_000;
/// Largest order for which subgroup lattices are enumerated.
pub const DEFAULT_SUBGROUP_CUTOFF: usize = 192;
/// Largest order validated with the full cubic associativity check.
pub const FULL_ASSOCIATIVITY_CUTOFF: usize = 512;
const SAMPLED_TRIPLES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("table is not square (row {row} has {len} entries, expected {expected})")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("empty table")]
    Empty,
    #[error("not closed: entry ({row}, {col}) = {value} is out of range")]
    NotClosed { row: usize, col: usize, value: usize },
    #[error("no identity element")]
    NoIdentity,
    #[error("not associative at ({a}, {b}, {c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("not a Latin square: {line} {index} repeats value {value} at position {pos}")]
    NotLatinSquare { line: &'static str, index: usize, pos: usize, value: usize },
    #[error("order cap {cap} exceeded")]
    OrderCapExceeded { cap: usize },
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("bad permutation: {0}")]
    BadPermutation(String),
    #[error("cycle notation: {0}")]
    CycleParse(String),
    #[error("generator degree {found} does not match declared degree {expected}")]
    DegreeMismatch { expected: usize, found: usize },
}

/// How a table's group axioms were established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Validation {
    /// Every triple checked.
    Full,
    /// Associativity checked on a random sample only.
    SampledValid,
    /// Produced by a constructor that is associative by design.
    Constructed,
}

#[derive(Clone)]
pub struct GroupTable {
    order: usize,
    op: Vec<Elem>,
    inv: Vec<Elem>,
    name: Option<String>,
    validation: Validation,
}

impl fmt::Debug for GroupTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupTable")
            .field("name", &self.name)
            .field("order", &self.order)
            .field("validation", &self.validation)
            .finish()
    }
}

impl PartialEq for GroupTable {
    /// Tables compare by multiplication data, not by label.
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.op == other.op
    }
}

impl Eq for GroupTable {}

impl GroupTable {
    /// Trusted constructor for tables produced inside the crate. The identity
    /// must already be at index 0.
    pub(crate) fn from_trusted(order: usize, op: Vec<Elem>) -> Self {
        debug_assert_eq!(op.len(), order * order);
        let mut inv = vec![0; order];
        for x in 0..order {
            let row = &op[x * order..(x + 1) * order];
            inv[x] = row.iter().position(|&v| v == 0).expect("row without identity") as Elem;
        }
        GroupTable { order, op, inv, name: None, validation: Validation::Constructed }
    }

    pub fn trivial() -> Self {
        Self::from_trusted(1, vec![0]).named("1")
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn validation(&self) -> Validation {
        self.validation
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.op[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.inv[a as usize]
    }

    #[inline]
    pub fn row(&self, a: Elem) -> &[Elem] {
        &self.op[a as usize * self.order..(a as usize + 1) * self.order]
    }

    /// Row-major multiplication table.
    pub fn table(&self) -> &[Elem] {
        &self.op
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.order as Elem
    }

    /// `x^y = y⁻¹xy`.
    #[inline]
    pub fn conj(&self, x: Elem, y: Elem) -> Elem {
        self.mul(self.mul(self.inv(y), x), y)
    }

    /// `[x, y] = x⁻¹y⁻¹xy`.
    #[inline]
    pub fn commutator(&self, x: Elem, y: Elem) -> Elem {
        self.mul(self.mul(self.inv(x), self.inv(y)), self.mul(x, y))
    }

    #[inline]
    pub fn commute(&self, x: Elem, y: Elem) -> bool {
        self.mul(x, y) == self.mul(y, x)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order as Elem).all(|x| (x + 1..self.order as Elem).all(|y| self.commute(x, y)))
    }

    pub fn element_order(&self, x: Elem) -> usize {
        let mut k = 1;
        let mut y = x;
        while y != 0 {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    /// Validates a Cayley table and relabels its identity to index 0.
    ///
    /// Checks run in the order closure, Latin square, identity, associativity;
    /// each error names the first violating cell in row-major order.
    pub fn from_cayley(rows: &[Vec<usize>]) -> Result<Self, AlgebraError> {
        let n = rows.len();
        if n == 0 {
            return Err(AlgebraError::Empty);
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(AlgebraError::NotSquare { row: r, len: row.len(), expected: n });
            }
        }
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(AlgebraError::NotClosed { row: r, col: c, value: v });
                }
            }
        }
        let mut seen = vec![usize::MAX; n];
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if seen[v] == r {
                    return Err(AlgebraError::NotLatinSquare { line: "row", index: r, pos: c, value: v });
                }
                seen[v] = r;
            }
        }
        seen.fill(usize::MAX);
        for c in 0..n {
            for (r, row) in rows.iter().enumerate() {
                let v = row[c];
                if seen[v] == c {
                    return Err(AlgebraError::NotLatinSquare { line: "column", index: c, pos: r, value: v });
                }
                seen[v] = c;
            }
        }
        let e = (0..n).find(|&e| (0..n).all(|x| rows[e][x] == x && rows[x][e] == x)).ok_or(AlgebraError::NoIdentity)?;

        // Swap labels 0 and e.
        let relabel = |x: usize| -> usize {
            if x == e {
                0
            } else if x == 0 {
                e
            } else {
                x
            }
        };
        let mut op = vec![0 as Elem; n * n];
        for a in 0..n {
            for b in 0..n {
                op[relabel(a) * n + relabel(b)] = relabel(rows[a][b]) as Elem;
            }
        }
        let mut g = Self::from_trusted(n, op);
        g.validation = g.check_associativity()?;
        Ok(g)
    }

    fn check_associativity(&self) -> Result<Validation, AlgebraError> {
        let n = self.order;
        let assoc = |a: Elem, b: Elem, c: Elem| self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c));
        if n <= FULL_ASSOCIATIVITY_CUTOFF {
            for a in 0..n as Elem {
                for b in 0..n as Elem {
                    let ab = self.mul(a, b);
                    let row_ab = self.row(ab);
                    for c in 0..n as Elem {
                        if row_ab[c as usize] != self.mul(a, self.mul(b, c)) {
                            return Err(AlgebraError::NotAssociative { a: a as usize, b: b as usize, c: c as usize });
                        }
                    }
                }
            }
            Ok(Validation::Full)
        } else {
            let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed_ca1e);
            for _ in 0..SAMPLED_TRIPLES {
                let (a, b, c) = (rng.gen_range(0..n) as Elem, rng.gen_range(0..n) as Elem, rng.gen_range(0..n) as Elem);
                if !assoc(a, b, c) {
                    return Err(AlgebraError::NotAssociative { a: a as usize, b: b as usize, c: c as usize });
                }
            }
            log::warn!("order {n} above full validation cutoff; associativity sampled");
            Ok(Validation::SampledValid)
        }
    }

    /// Closure of permutation generators, default cap.
    pub fn from_permutations(degree: usize, gens: &[Permutation]) -> Result<Self, AlgebraError> {
        Self::from_permutations_capped(degree, gens, DEFAULT_ORDER_CAP)
    }

    /// Breadth-first closure. Element 0 is the identity and elements are
    /// numbered in discovery order, each element multiplied by the generators
    /// in their given order.
    pub fn from_permutations_capped(degree: usize, gens: &[Permutation], cap: usize) -> Result<Self, AlgebraError> {
        for g in gens {
            if g.degree() != degree {
                return Err(AlgebraError::DegreeMismatch { expected: degree, found: g.degree() });
            }
        }
        let mut elems = vec![Permutation::identity(degree)];
        let mut index: HashMap<Permutation, Elem> = HashMap::new();
        index.insert(elems[0].clone(), 0);
        // right_mul[x * k + j] = x * gens[j]
        let k = gens.len();
        let mut right_mul: Vec<Elem> = Vec::new();
        let mut parent: Vec<(Elem, usize)> = vec![(0, usize::MAX)];
        let mut head = 0;
        while head < elems.len() {
            for (j, g) in gens.iter().enumerate() {
                let p = elems[head].then(g);
                let id = match index.get(&p) {
                    Some(&id) => id,
                    None => {
                        if elems.len() >= cap {
                            return Err(AlgebraError::OrderCapExceeded { cap });
                        }
                        let id = elems.len() as Elem;
                        index.insert(p.clone(), id);
                        elems.push(p);
                        parent.push((head as Elem, j));
                        id
                    }
                };
                right_mul.push(id);
            }
            head += 1;
        }
        let n = elems.len();
        let mut op = vec![0 as Elem; n * n];
        for a in 0..n {
            op[a * n] = a as Elem;
            for b in 1..n {
                let (pb, j) = parent[b];
                let apb = op[a * n + pb as usize];
                op[a * n + b] = right_mul[apb as usize * k + j];
            }
        }
        Ok(Self::from_trusted(n, op))
    }

    /// Componentwise product; `(a, b)` has index `a·|B| + b`.
    pub fn direct_product(a: &GroupTable, b: &GroupTable) -> Result<Self, AlgebraError> {
        Self::direct_product_capped(a, b, DEFAULT_ORDER_CAP)
    }

    pub fn direct_product_capped(a: &GroupTable, b: &GroupTable, cap: usize) -> Result<Self, AlgebraError> {
        let (na, nb) = (a.order, b.order);
        let n = na * nb;
        if n > cap {
            return Err(AlgebraError::OrderCapExceeded { cap });
        }
        let mut op = vec![0 as Elem; n * n];
        for x in 0..n {
            let (xa, xb) = ((x / nb) as Elem, (x % nb) as Elem);
            let row = &mut op[x * n..(x + 1) * n];
            for ya in 0..na {
                let za = a.mul(xa, ya as Elem) as usize * nb;
                let brow = b.row(xb);
                for yb in 0..nb {
                    row[ya * nb + yb] = (za + brow[yb] as usize) as Elem;
                }
            }
        }
        let mut g = Self::from_trusted(n, op);
        if let (Some(x), Some(y)) = (a.name(), b.name()) {
            g.name = Some(format!("{x}x{y}"));
        }
        Ok(g)
    }

    /// Table with elements renumbered by `perm` (old index `i` becomes `perm[i]`).
    /// `perm[0]` must be 0.
    pub fn relabel(&self, perm: &[Elem]) -> Self {
        let n = self.order;
        assert_eq!(perm[0], 0);
        let mut op = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                op[perm[a] as usize * n + perm[b] as usize] = perm[self.op[a * n + b] as usize];
            }
        }
        let mut g = Self::from_trusted(n, op);
        g.name = self.name.clone();
        g
    }

    /// Cayley table as nested rows, the input format of [`GroupTable::from_cayley`].
    pub fn to_rows(&self) -> Vec<Vec<usize>> {
        (0..self.order).map(|a| self.row(a as Elem).iter().map(|&v| v as usize).collect()).collect()
    }
}
