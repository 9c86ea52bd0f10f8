//! Subgroups, conjugacy classes and the structural computations built on them.

use std::collections::{BTreeMap, HashSet};

use super::{AlgebraError, Elem, ElemSet, GroupTable, DEFAULT_SUBGROUP_CUTOFF};

/// A subgroup given by its sorted member list.
#[derive(Clone, Debug)]
pub struct Subgroup<'g> {
    parent: &'g GroupTable,
    members: Vec<Elem>,
}

impl PartialEq for Subgroup<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.parent, other.parent) && self.members == other.members
    }
}

impl Eq for Subgroup<'_> {}

impl<'g> Subgroup<'g> {
    /// Wraps a member list already known to be a subgroup.
    pub(crate) fn from_sorted(parent: &'g GroupTable, members: Vec<Elem>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(members.first(), Some(&0));
        debug_assert_eq!(parent.order() % members.len(), 0);
        Subgroup { parent, members }
    }

    fn from_set(parent: &'g GroupTable, set: &ElemSet) -> Self {
        Self::from_sorted(parent, set.to_vec())
    }

    pub fn whole(parent: &'g GroupTable) -> Self {
        Self::from_sorted(parent, parent.elements().collect())
    }

    pub fn trivial(parent: &'g GroupTable) -> Self {
        Self::from_sorted(parent, vec![0])
    }

    /// Checks closure and returns the subgroup, or `None` if `members` is not one.
    pub fn try_new(parent: &'g GroupTable, members: &[Elem]) -> Option<Self> {
        let set = ElemSet::from_members(parent.order(), members);
        if !set.contains(0) {
            return None;
        }
        let v = set.to_vec();
        let closed =
            v.iter().all(|&a| set.contains(parent.inv(a)) && v.iter().all(|&b| set.contains(parent.mul(a, b))));
        closed.then(|| Self::from_sorted(parent, v))
    }

    pub fn parent(&self) -> &'g GroupTable {
        self.parent
    }

    pub fn members(&self) -> &[Elem] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn index(&self) -> usize {
        self.parent.order() / self.members.len()
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub(crate) fn set(&self) -> ElemSet {
        ElemSet::from_members(self.parent.order(), &self.members)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup<'_>) -> bool {
        self.members.iter().all(|&x| other.contains(x))
    }

    pub fn is_abelian(&self) -> bool {
        let g = self.parent;
        self.members.iter().enumerate().all(|(i, &x)| self.members[i + 1..].iter().all(|&y| g.commute(x, y)))
    }

    pub fn is_normal(&self) -> bool {
        let g = self.parent;
        let set = self.set();
        g.elements().all(|y| self.members.iter().all(|&x| set.contains(g.conj(x, y))))
    }

    pub fn intersection(&self, other: &Subgroup<'g>) -> Subgroup<'g> {
        Subgroup::from_set(self.parent, &self.set().intersect(&other.set()))
    }

    /// The subgroup as a standalone table, members renumbered in sorted order.
    pub fn to_table(&self) -> GroupTable {
        let n = self.members.len();
        let mut pos = vec![u32::MAX; self.parent.order()];
        for (i, &m) in self.members.iter().enumerate() {
            pos[m as usize] = i as u32;
        }
        let mut op = Vec::with_capacity(n * n);
        for &a in &self.members {
            for &b in &self.members {
                op.push(pos[self.parent.mul(a, b) as usize]);
            }
        }
        GroupTable::from_trusted(n, op)
    }

    /// Number of ordered commuting pairs inside the subgroup.
    pub fn commuting_pairs(&self) -> u64 {
        let g = self.parent;
        let mut c = 0u64;
        for &x in &self.members {
            for &y in &self.members {
                if g.commute(x, y) {
                    c += 1;
                }
            }
        }
        c
    }
}

/// Subgroup generated by `gens`.
pub fn generate<'g>(g: &'g GroupTable, gens: &[Elem]) -> Subgroup<'g> {
    Subgroup::from_set(g, &closure(g, gens))
}

fn closure(g: &GroupTable, gens: &[Elem]) -> ElemSet {
    let mut set = ElemSet::new(g.order());
    set.insert(0);
    let gens: Vec<Elem> = gens.iter().copied().filter(|&x| x != 0).collect();
    let mut queue = vec![0 as Elem];
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        for &s in &gens {
            let y = g.mul(x, s);
            if set.insert(y) {
                queue.push(y);
            }
        }
    }
    set
}

/// Conjugacy classes; the class ids follow the smallest member, so the
/// identity class is id 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassPartition {
    pub classes: Vec<Vec<Elem>>,
    pub class_of: Vec<u32>,
}

impl ClassPartition {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }
}

pub fn conjugacy_classes(g: &GroupTable) -> ClassPartition {
    let n = g.order();
    let mut class_of = vec![u32::MAX; n];
    let mut classes = Vec::new();
    for x in g.elements() {
        if class_of[x as usize] != u32::MAX {
            continue;
        }
        let id = classes.len() as u32;
        let mut cls = Vec::new();
        for y in g.elements() {
            let c = g.conj(x, y);
            if class_of[c as usize] == u32::MAX {
                class_of[c as usize] = id;
                cls.push(c);
            }
        }
        cls.sort_unstable();
        classes.push(cls);
    }
    ClassPartition { classes, class_of }
}

/// `C_G(S)`; with `S = G` this is the centre.
pub fn centralizer<'g>(g: &'g GroupTable, s: &[Elem]) -> Subgroup<'g> {
    let members = g.elements().filter(|&x| s.iter().all(|&y| g.commute(x, y))).collect();
    Subgroup::from_sorted(g, members)
}

pub fn center(g: &GroupTable) -> Subgroup<'_> {
    let all: Vec<Elem> = g.elements().collect();
    centralizer(g, &all)
}

/// Subgroup generated by `[a, b]` for `a ∈ A`, `b ∈ B`.
fn commutator_subgroup<'g>(g: &'g GroupTable, a: &[Elem], b: &[Elem]) -> Subgroup<'g> {
    let mut comms = ElemSet::new(g.order());
    for &x in a {
        for &y in b {
            comms.insert(g.commutator(x, y));
        }
    }
    generate(g, &comms.to_vec())
}

pub fn derived_subgroup(g: &GroupTable) -> Subgroup<'_> {
    let all: Vec<Elem> = g.elements().collect();
    commutator_subgroup(g, &all, &all)
}

/// Lower central series of the subgroup `h` reaches the identity.
fn subgroup_is_nilpotent(h: &Subgroup<'_>) -> bool {
    let g = h.parent();
    let mut cur = h.clone();
    loop {
        if cur.order() == 1 {
            return true;
        }
        let next = commutator_subgroup(g, cur.members(), h.members());
        if next.order() == cur.order() {
            return false;
        }
        cur = next;
    }
}

pub fn is_nilpotent(g: &GroupTable) -> bool {
    subgroup_is_nilpotent(&Subgroup::whole(g))
}

/// All subgroups by cyclic extension, sorted by order then member list.
pub fn all_subgroups(g: &GroupTable) -> Result<Vec<Subgroup<'_>>, AlgebraError> {
    all_subgroups_with(g, DEFAULT_SUBGROUP_CUTOFF)
}

pub fn all_subgroups_with(g: &GroupTable, cutoff: usize) -> Result<Vec<Subgroup<'_>>, AlgebraError> {
    if g.order() > cutoff {
        return Err(AlgebraError::OrderCapExceeded { cap: cutoff });
    }
    let n = g.order();
    // Cyclic subgroups, one generator each.
    let mut cyclic: Vec<(Elem, ElemSet)> = Vec::new();
    let mut seen: HashSet<ElemSet> = HashSet::new();
    for x in g.elements() {
        let s = closure(g, &[x]);
        if seen.insert(s.clone()) {
            cyclic.push((x, s));
        }
    }
    let mut found: HashSet<ElemSet> = seen;
    let mut list: Vec<(Vec<Elem>, ElemSet)> = cyclic.iter().map(|(x, s)| (vec![*x], s.clone())).collect();
    let mut head = 0;
    while head < list.len() {
        let (gens, set) = list[head].clone();
        head += 1;
        if set.len() == n {
            continue;
        }
        for (c, cset) in &cyclic {
            if cset.is_subset(&set) {
                continue;
            }
            let mut ext = gens.clone();
            ext.push(*c);
            let s = closure(g, &ext);
            if found.insert(s.clone()) {
                list.push((ext, s));
            }
        }
    }
    Ok(sorted_subgroups(g, found))
}

fn sorted_subgroups(g: &GroupTable, sets: impl IntoIterator<Item = ElemSet>) -> Vec<Subgroup<'_>> {
    let mut out: Vec<Subgroup<'_>> = sets.into_iter().map(|s| Subgroup::from_set(g, &s)).collect();
    out.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.members().cmp(b.members())));
    out
}

/// Normal subgroups, found as subgroups generated by unions of classes.
pub fn normal_subgroups(g: &GroupTable) -> Result<Vec<Subgroup<'_>>, AlgebraError> {
    normal_subgroups_with(g, DEFAULT_SUBGROUP_CUTOFF)
}

pub fn normal_subgroups_with(g: &GroupTable, cutoff: usize) -> Result<Vec<Subgroup<'_>>, AlgebraError> {
    if g.order() > cutoff {
        return Err(AlgebraError::OrderCapExceeded { cap: cutoff });
    }
    let classes = conjugacy_classes(g);
    let trivial = closure(g, &[]);
    let mut found: HashSet<ElemSet> = HashSet::from([trivial.clone()]);
    // Each entry keeps a conjugation-invariant generating set.
    let mut list: Vec<(Vec<Elem>, ElemSet)> = vec![(vec![], trivial)];
    let mut head = 0;
    while head < list.len() {
        let (gens, set) = list[head].clone();
        head += 1;
        for cls in &classes.classes {
            if set.contains(cls[0]) {
                continue;
            }
            let mut ext = gens.clone();
            ext.extend_from_slice(cls);
            let s = closure(g, &ext);
            if found.insert(s.clone()) {
                list.push((ext, s));
            }
        }
    }
    Ok(sorted_subgroups(g, found))
}

/// Quotient table on cosets of a normal subgroup. Cosets are numbered by
/// their smallest element, so the identity coset is 0.
pub fn quotient(g: &GroupTable, n: &Subgroup<'_>) -> Result<GroupTable, AlgebraError> {
    if !n.is_normal() {
        return Err(AlgebraError::NotNormal);
    }
    let (coset_of, reps) = coset_labels(g, n);
    let k = reps.len();
    let mut op = Vec::with_capacity(k * k);
    for &a in &reps {
        for &b in &reps {
            op.push(coset_of[g.mul(a, b) as usize]);
        }
    }
    let mut q = GroupTable::from_trusted(k, op);
    if let Some(name) = g.name() {
        q = q.named(format!("{name}/N{}", n.order()));
    }
    Ok(q)
}

/// Right cosets `Nx` labelled by smallest element; returns (label per element, representatives).
pub(crate) fn coset_labels(g: &GroupTable, n: &Subgroup<'_>) -> (Vec<Elem>, Vec<Elem>) {
    let mut coset_of = vec![Elem::MAX; g.order()];
    let mut reps = Vec::new();
    for x in g.elements() {
        if coset_of[x as usize] != Elem::MAX {
            continue;
        }
        let id = reps.len() as Elem;
        reps.push(x);
        for &h in n.members() {
            coset_of[g.mul(h, x) as usize] = id;
        }
    }
    (coset_of, reps)
}

/// `Core_G(H)`, the intersection of all conjugates of `H`.
pub fn normal_core<'g>(g: &'g GroupTable, h: &Subgroup<'g>) -> Subgroup<'g> {
    let mut core = h.set();
    for y in g.elements() {
        let mut conj = ElemSet::new(g.order());
        for &x in h.members() {
            conj.insert(g.conj(x, y));
        }
        core = core.intersect(&conj);
    }
    Subgroup::from_set(g, &core)
}

/// Largest nilpotent normal subgroup.
pub fn fitting_subgroup(g: &GroupTable) -> Result<Subgroup<'_>, AlgebraError> {
    fitting_subgroup_with(g, DEFAULT_SUBGROUP_CUTOFF)
}

pub fn fitting_subgroup_with(g: &GroupTable, cutoff: usize) -> Result<Subgroup<'_>, AlgebraError> {
    if is_nilpotent(g) {
        return Ok(Subgroup::whole(g));
    }
    let mut gens = Vec::new();
    for n in normal_subgroups_with(g, cutoff)? {
        if subgroup_is_nilpotent(&n) {
            gens.extend_from_slice(n.members());
        }
    }
    gens.sort_unstable();
    gens.dedup();
    Ok(generate(g, &gens))
}

/// `k_G(N)`: number of orbits of `G` acting on `N` by conjugation.
pub fn orbit_count_on_normal(g: &GroupTable, n: &Subgroup<'_>) -> Result<usize, AlgebraError> {
    if !n.is_normal() {
        return Err(AlgebraError::NotNormal);
    }
    let classes = conjugacy_classes(g);
    Ok(classes.classes.iter().filter(|c| n.contains(c[0])).count())
}

/// Cheap isomorphism invariants, conclusive for the tiny targets they are used on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    pub order: usize,
    pub exponent: usize,
    pub abelian: bool,
    /// element order -> count
    pub order_counts: BTreeMap<usize, usize>,
}

impl Fingerprint {
    pub fn of(g: &GroupTable) -> Self {
        let mut order_counts = BTreeMap::new();
        let mut exponent = 1usize;
        for x in g.elements() {
            let o = g.element_order(x);
            *order_counts.entry(o).or_insert(0) += 1;
            exponent = num_integer::lcm(exponent, o);
        }
        Fingerprint { order: g.order(), exponent, abelian: g.is_abelian(), order_counts }
    }

    pub fn is_cyclic(&self) -> bool {
        self.exponent == self.order
    }

    /// Elementary abelian 2-group (or trivial).
    pub fn is_elementary_abelian_2(&self) -> bool {
        self.abelian && self.exponent <= 2
    }
}
