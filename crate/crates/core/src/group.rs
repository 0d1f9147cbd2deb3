//! Finite groups given by Cayley tables, plus a catalog of small groups.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("group table is empty")]
    Empty,
    #[error("row {row} of the table has {found} entries, expected {expected}")]
    NotSquare { row: usize, expected: usize, found: usize },
    #[error("table entry ({row}, {col}) = {value} is not an element index")]
    EntryOutOfRange { row: usize, col: usize, value: usize },
    #[error("element 0 is not the identity")]
    IdentityNotZero,
    #[error("multiplication is not associative at ({a}, {b}, {c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("element {0} has no two-sided inverse")]
    MissingInverse(usize),
    #[error("abelian invariants must be positive, got {0:?}")]
    BadInvariants(Vec<u64>),
    #[error("group of order {0} is too large for a Cayley table")]
    TooLarge(u128),
    #[error("element {0} out of range")]
    ElementOutOfRange(usize),
    #[error("tuple {tuple:?} does not match invariants {invariants:?}")]
    TupleMismatch { tuple: Vec<u64>, invariants: Vec<u64> },
    #[error("element tuples need a group built from abelian invariants")]
    NotAbelianPresentation,
    #[error("permutation generators must be nonempty and of one degree")]
    BadPermutations,
}

/// Largest group order accepted by the table constructors.
pub const MAX_ORDER: usize = 4096;

/// A finite group with elements `0..order`, element 0 the identity.
#[derive(Clone)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    inverse: Vec<usize>,
    label: String,
    invariants: Option<Vec<u64>>,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.table == other.table
    }
}

impl Eq for FiniteGroup {}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("label", &self.label)
            .field("order", &self.order)
            .finish()
    }
}

impl FiniteGroup {
    /// Validates a Cayley table: closure, identity at index 0, associativity
    /// and inverses.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        Self::from_table_labeled(table, None)
    }

    fn from_table_labeled(table: Vec<Vec<usize>>, label: Option<String>) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::Empty);
        }
        if n > MAX_ORDER {
            return Err(GroupError::TooLarge(n as u128));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::NotSquare {
                    row: i,
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(GroupError::EntryOutOfRange { row: i, col: j, value: v });
                }
            }
            flat.extend_from_slice(row);
        }
        let mul = |a: usize, b: usize| flat[a * n + b];
        if (0..n).any(|x| mul(0, x) != x || mul(x, 0) != x) {
            return Err(GroupError::IdentityNotZero);
        }
        let mut inverse = vec![usize::MAX; n];
        for a in 0..n {
            let Some(b) = (0..n).find(|&b| mul(a, b) == 0 && mul(b, a) == 0) else {
                return Err(GroupError::MissingInverse(a));
            };
            inverse[a] = b;
        }
        for a in 0..n {
            for b in 0..n {
                let ab = mul(a, b);
                for c in 0..n {
                    if mul(ab, c) != mul(a, mul(b, c)) {
                        return Err(GroupError::NotAssociative { a, b, c });
                    }
                }
            }
        }
        Ok(FiniteGroup {
            order: n,
            table: flat,
            inverse,
            label: label.unwrap_or_else(|| format!("G{n}")),
            invariants: None,
        })
    }

    /// Trusted constructor for tables produced by the builders below.
    fn from_fn(order: usize, label: String, invariants: Option<Vec<u64>>, mul: impl Fn(usize, usize) -> usize) -> Self {
        let mut table = Vec::with_capacity(order * order);
        for a in 0..order {
            for b in 0..order {
                table.push(mul(a, b));
            }
        }
        let mut inverse = vec![0; order];
        for a in 0..order {
            inverse[a] = (0..order).find(|&b| table[a * order + b] == 0).expect("group has inverses");
        }
        FiniteGroup {
            order,
            table,
            inverse,
            label,
            invariants,
        }
    }

    /// Product of cyclic groups `Z/k1 x ... x Z/kr`. Elements are indexed in
    /// row-major order of their tuples (last coordinate fastest).
    pub fn abelian(invariants: &[u64]) -> Result<Self, GroupError> {
        if invariants.contains(&0) {
            return Err(GroupError::BadInvariants(invariants.to_vec()));
        }
        let order: u128 = invariants.iter().map(|&k| k as u128).product();
        if order > MAX_ORDER as u128 {
            return Err(GroupError::TooLarge(order));
        }
        let order = order as usize;
        let inv: Vec<u64> = invariants.to_vec();
        let label = if inv.iter().all(|&k| k == 1) {
            "1".to_string()
        } else {
            inv.iter()
                .filter(|&&k| k > 1)
                .map(|k| format!("Z/{k}"))
                .collect::<Vec<_>>()
                .join("x")
        };
        let radix = inv.clone();
        let to_tuple = move |mut x: usize| -> Vec<u64> {
            let mut t = vec![0; radix.len()];
            for i in (0..radix.len()).rev() {
                t[i] = (x as u64) % radix[i];
                x /= radix[i] as usize;
            }
            t
        };
        let radix2 = inv.clone();
        let from_tuple = move |t: &[u64]| -> usize { t.iter().zip(&radix2).fold(0usize, |acc, (&a, &k)| acc * k as usize + a as usize) };
        let k = inv.clone();
        Ok(Self::from_fn(order, label, Some(inv), |a, b| {
            let (ta, tb) = (to_tuple(a), to_tuple(b));
            let sum: Vec<u64> = ta.iter().zip(&tb).zip(&k).map(|((x, y), m)| (x + y) % m).collect();
            from_tuple(&sum)
        }))
    }

    pub fn cyclic(n: u64) -> Result<Self, GroupError> {
        Self::abelian(&[n])
    }

    /// Dihedral group of order `2n`; element `a + n*b` is `r^a s^b`.
    pub fn dihedral(n: usize) -> Self {
        assert!(n >= 1);
        Self::from_fn(2 * n, format!("D{n}"), None, |x, y| {
            let (a1, b1) = (x % n, x / n);
            let (a2, b2) = (y % n, y / n);
            let a = if b1 == 0 { (a1 + a2) % n } else { (a1 + n - a2) % n };
            a + n * ((b1 + b2) % 2)
        })
    }

    /// Dicyclic group of order `4n`: `<a, x | a^{2n}, x^2 = a^n, x a x^-1 = a^-1>`.
    /// Element `k + 2n*j` is `a^k x^j`. `dicyclic(2)` is the quaternion group.
    pub fn dicyclic(n: usize) -> Self {
        assert!(n >= 1);
        let m = 2 * n;
        let label = if n == 2 { "Q8".to_string() } else { format!("Dic{n}") };
        Self::from_fn(2 * m, label, None, |x, y| {
            let (k1, j1) = (x % m, x / m);
            let (k2, j2) = (y % m, y / m);
            match (j1, j2) {
                (0, _) => (k1 + k2) % m + m * j2,
                (_, 0) => (k1 + m - k2) % m + m,
                _ => (k1 + m - k2 + n) % m,
            }
        })
    }

    /// Closure of a set of permutations of `0..degree`. The identity gets
    /// index 0; other elements follow in breadth-first order.
    pub fn from_permutations(gens: &[Vec<usize>], label: &str) -> Result<Self, GroupError> {
        let degree = gens.first().map(Vec::len).ok_or(GroupError::BadPermutations)?;
        if gens.iter().any(|g| g.len() != degree || !is_permutation(g)) {
            return Err(GroupError::BadPermutations);
        }
        let id: Vec<usize> = (0..degree).collect();
        let mut elems = vec![id.clone()];
        let mut index = std::collections::HashMap::new();
        index.insert(id, 0usize);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let p: Vec<usize> = (0..degree).map(|x| elems[i][g[x]]).collect();
                if !index.contains_key(&p) {
                    if elems.len() >= MAX_ORDER {
                        return Err(GroupError::TooLarge(elems.len() as u128 + 1));
                    }
                    index.insert(p.clone(), elems.len());
                    queue.push_back(elems.len());
                    elems.push(p);
                }
            }
        }
        let order = elems.len();
        Ok(Self::from_fn(order, label.to_string(), None, |a, b| {
            let p: Vec<usize> = (0..degree).map(|x| elems[a][elems[b][x]]).collect();
            index[&p]
        }))
    }

    pub fn direct_product(&self, other: &FiniteGroup) -> Self {
        let m = other.order;
        let invariants = match (&self.invariants, &other.invariants) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).copied().collect()),
            _ => None,
        };
        Self::from_fn(
            self.order * m,
            format!("{}x{}", self.label, other.label),
            invariants,
            |x, y| self.mul(x / m, y / m) * m + other.mul(x % m, y % m),
        )
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn invariants(&self) -> Option<&[u64]> {
        self.invariants.as_deref()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// The Cayley table as nested rows.
    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    pub fn element_order(&self, x: usize) -> usize {
        let mut k = 1;
        let mut y = x;
        while y != 0 {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    pub fn is_central(&self, x: usize) -> bool {
        (0..self.order).all(|y| self.mul(x, y) == self.mul(y, x))
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|x| self.is_central(x))
    }

    /// Central elements of order exactly 2, ascending.
    pub fn central_involutions(&self) -> Vec<usize> {
        (1..self.order)
            .filter(|&x| self.mul(x, x) == 0 && self.is_central(x))
            .collect()
    }

    /// Whether `set` (any order, duplicates allowed) is a subgroup.
    pub fn is_subgroup(&self, set: &[usize]) -> bool {
        let mut member = vec![false; self.order];
        for &x in set {
            if x >= self.order {
                return false;
            }
            member[x] = true;
        }
        member[0]
            && set.iter().all(|&a| member[self.inv(a)] && set.iter().all(|&b| member[self.mul(a, b)]))
    }

    /// Sorted elements of the subgroup generated by `gens`.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.order];
        member[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !member[y] {
                    member[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.order).filter(|&x| member[x]).collect()
    }

    /// Every subgroup as a sorted element list, by order then elements.
    pub fn subgroups(&self) -> Vec<Vec<usize>> {
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::from([vec![0]]);
        let mut queue = VecDeque::from([vec![0usize]]);
        while let Some(s) = queue.pop_front() {
            for g in 0..self.order {
                if s.binary_search(&g).is_ok() {
                    continue;
                }
                let mut gens = s.clone();
                gens.push(g);
                let t = self.generated_subgroup(&gens);
                if seen.insert(t.clone()) {
                    queue.push_back(t);
                }
            }
        }
        let mut out: Vec<Vec<usize>> = seen.into_iter().collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }

    /// One subgroup per conjugacy class, the first in [`Self::subgroups`] order.
    pub fn subgroup_classes(&self) -> Vec<Vec<usize>> {
        let mut taken: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut out = Vec::new();
        for h in self.subgroups() {
            if taken.contains(&h) {
                continue;
            }
            for g in 0..self.order {
                let gi = self.inv(g);
                let mut conj: Vec<usize> = h.iter().map(|&x| self.mul(self.mul(g, x), gi)).collect();
                conj.sort_unstable();
                taken.insert(conj);
            }
            out.push(h);
        }
        out
    }

    pub fn tuple_of(&self, x: usize) -> Option<Vec<u64>> {
        let inv = self.invariants.as_ref()?;
        let mut t = vec![0; inv.len()];
        let mut x = x as u64;
        for i in (0..inv.len()).rev() {
            t[i] = x % inv[i];
            x /= inv[i];
        }
        Some(t)
    }

    pub fn element_from_tuple(&self, tuple: &[u64]) -> Result<usize, GroupError> {
        let inv = self.invariants.as_ref().ok_or(GroupError::NotAbelianPresentation)?;
        if tuple.len() != inv.len() || tuple.iter().zip(inv).any(|(a, k)| a >= k) {
            return Err(GroupError::TupleMismatch {
                tuple: tuple.to_vec(),
                invariants: inv.clone(),
            });
        }
        Ok(tuple.iter().zip(inv).fold(0usize, |acc, (&a, &k)| acc * k as usize + a as usize))
    }

    /// Tuple notation for multi-factor abelian groups, the index otherwise.
    pub fn format_element(&self, x: usize) -> String {
        match self.tuple_of(x) {
            Some(t) if t.len() > 1 => {
                let parts: Vec<String> = t.iter().map(ToString::to_string).collect();
                format!("({})", parts.join(","))
            }
            _ => x.to_string(),
        }
    }

    /// All automorphisms, each as the image array of `0..order`.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let gens = self.generating_set();
        let orders: Vec<usize> = (0..self.order).map(|x| self.element_order(x)).collect();
        let candidates: Vec<Vec<usize>> = gens
            .iter()
            .map(|&g| (0..self.order).filter(|&y| orders[y] == orders[g]).collect())
            .collect();
        let mut out = Vec::new();
        let mut choice = vec![0usize; gens.len()];
        self.extend_automorphisms(&gens, &candidates, 0, &mut choice, &mut out);
        out.sort();
        out
    }

    fn extend_automorphisms(
        &self,
        gens: &[usize],
        candidates: &[Vec<usize>],
        depth: usize,
        choice: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if depth == gens.len() {
            if let Some(map) = self.homomorphism_from_generators(gens, choice) {
                out.push(map);
            }
            return;
        }
        for &c in &candidates[depth] {
            choice[depth] = c;
            self.extend_automorphisms(gens, candidates, depth + 1, choice, out);
        }
    }

    /// Extends `gens[i] -> images[i]` along the Cayley graph; `None` unless
    /// the result is a well-defined bijective homomorphism.
    fn homomorphism_from_generators(&self, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
        let mut map = vec![usize::MAX; self.order];
        map[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (&g, &img) in gens.iter().zip(images) {
                let y = self.mul(x, g);
                let fy = self.mul(map[x], img);
                if map[y] == usize::MAX {
                    map[y] = fy;
                    queue.push_back(y);
                } else if map[y] != fy {
                    return None;
                }
            }
        }
        let mut seen = vec![false; self.order];
        for &v in &map {
            if v == usize::MAX || seen[v] {
                return None;
            }
            seen[v] = true;
        }
        Some(map)
    }

    /// Greedy generating set: each new generator is the least element not
    /// yet generated.
    pub fn generating_set(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = vec![0usize];
        while span.len() < self.order {
            let next = (0..self.order).find(|x| span.binary_search(x).is_err()).expect("proper subgroup");
            gens.push(next);
            span = self.generated_subgroup(&gens);
        }
        gens
    }
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| x < p.len() && !std::mem::replace(&mut seen[x], true))
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Invariant factors `k1 | k2 | ... | kr` of every abelian group of order `n`.
pub fn abelian_invariant_lists(n: u64) -> Vec<Vec<u64>> {
    if n == 1 {
        return vec![vec![1]];
    }
    let mut lists: Vec<Vec<u64>> = vec![Vec::new()];
    for (p, e) in factorize(n) {
        let mut next = Vec::new();
        for list in &lists {
            for part in partitions(e, e) {
                // part is descending; align so the largest power joins the last factor
                let len = list.len().max(part.len());
                let mut merged = vec![1u64; len];
                for (i, &x) in list.iter().rev().enumerate() {
                    merged[len - 1 - i] *= x;
                }
                for (i, &k) in part.iter().enumerate() {
                    merged[len - 1 - i] *= p.pow(k);
                }
                next.push(merged);
            }
        }
        lists = next;
    }
    lists.sort();
    lists
}

/// Largest order for which [`small_groups`] lists every isomorphism class.
pub const COMPLETE_CATALOG_ORDER: usize = 15;

/// Groups of order `n`. Complete up to isomorphism for
/// `n <= COMPLETE_CATALOG_ORDER`; beyond that only abelian, dihedral and
/// dicyclic groups are produced, plus `Z/2 x A4` at order 24.
pub fn small_groups(n: usize) -> Vec<FiniteGroup> {
    let mut out: Vec<FiniteGroup> = abelian_invariant_lists(n as u64)
        .iter()
        .map(|inv| FiniteGroup::abelian(inv).expect("valid invariants"))
        .collect();
    if n >= 6 && n.is_multiple_of(2) {
        out.push(FiniteGroup::dihedral(n / 2));
    }
    if n >= 8 && n.is_multiple_of(4) {
        out.push(FiniteGroup::dicyclic(n / 4));
    }
    if n == 12 || n == 24 {
        let a4 = FiniteGroup::from_permutations(&[vec![1, 2, 0, 3], vec![1, 0, 3, 2]], "A4").expect("valid");
        out.push(if n == 12 {
            a4
        } else {
            FiniteGroup::cyclic(2).expect("valid").direct_product(&a4)
        });
    }
    out
}

pub fn catalog_is_complete(n: usize) -> bool {
    n <= COMPLETE_CATALOG_ORDER
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_validation() {
        assert!(FiniteGroup::from_table(vec![vec![0, 1], vec![1, 0]]).is_ok());
        assert_eq!(
            FiniteGroup::from_table(vec![vec![1, 0], vec![0, 1]]).unwrap_err(),
            GroupError::IdentityNotZero
        );
        assert!(matches!(
            FiniteGroup::from_table(vec![vec![0, 1, 2], vec![1, 1, 1], vec![2, 1, 0]]),
            Err(GroupError::MissingInverse(1))
        ));
        assert!(matches!(
            FiniteGroup::from_table(vec![vec![0, 5], vec![1, 0]]),
            Err(GroupError::EntryOutOfRange { .. })
        ));
    }

    #[test]
    fn builders_produce_valid_tables() {
        let groups = [
            FiniteGroup::abelian(&[2, 4]).unwrap(),
            FiniteGroup::dihedral(4),
            FiniteGroup::dicyclic(2),
            FiniteGroup::dicyclic(3),
            FiniteGroup::cyclic(3).unwrap().direct_product(&FiniteGroup::dihedral(2)),
        ];
        for g in groups {
            let checked = FiniteGroup::from_table(g.table_rows()).unwrap();
            assert_eq!(checked, g);
        }
    }

    #[test]
    fn abelian_tuples_round_trip() {
        let g = FiniteGroup::abelian(&[2, 2]).unwrap();
        assert_eq!(g.element_from_tuple(&[1, 0]).unwrap(), 2);
        assert_eq!(g.tuple_of(3).unwrap(), vec![1, 1]);
        assert_eq!(g.format_element(1), "(0,1)");
        assert!(g.element_from_tuple(&[2, 0]).is_err());
        assert_eq!(g.mul(1, 2), 3);
    }

    #[test]
    fn quaternion_center() {
        let q8 = FiniteGroup::dicyclic(2);
        assert!(!q8.is_abelian());
        assert_eq!(q8.central_involutions(), vec![2]);
        // every element of Q8 outside the center has order 4
        assert_eq!((0..8).filter(|&x| q8.element_order(x) == 4).count(), 6);
        assert_eq!(FiniteGroup::dihedral(3).central_involutions(), Vec::<usize>::new());
    }

    #[test]
    fn abelian_group_counts() {
        assert_eq!(abelian_invariant_lists(8), vec![vec![2, 2, 2], vec![2, 4], vec![8]]);
        assert_eq!(abelian_invariant_lists(12), vec![vec![2, 6], vec![12]]);
        assert_eq!(abelian_invariant_lists(16).len(), 5);
        assert_eq!(abelian_invariant_lists(1), vec![vec![1]]);
    }

    #[test]
    fn catalog_sizes_match_known_counts() {
        let known = [1, 1, 1, 2, 1, 2, 1, 5, 2, 2, 1, 5, 1, 2, 1];
        for (n, &count) in (1..=15).zip(&known) {
            let groups = small_groups(n);
            assert_eq!(groups.len(), count, "order {n}");
            assert!(groups.iter().all(|g| g.order() == n));
        }
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(FiniteGroup::cyclic(8).unwrap().automorphisms().len(), 4);
        assert_eq!(FiniteGroup::abelian(&[2, 2]).unwrap().automorphisms().len(), 6);
        assert_eq!(FiniteGroup::dihedral(4).automorphisms().len(), 8);
        assert_eq!(FiniteGroup::dicyclic(2).automorphisms().len(), 24);
    }
}
