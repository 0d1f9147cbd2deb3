//! Abstract CM data: a finite group with a central involution acting on
//! coset spaces, and CM types on those spaces.
//!
//! A coset space `G/H` stands for the embeddings of a CM field whose Galois
//! closure has group `G`; `G` acts by left translation. A CM type picks one
//! coset from each orbit `{xH, c·xH}` of the conjugation `c`.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::group::{FiniteGroup, GroupError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CmError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("{0:?} is not a subgroup")]
    NotSubgroup(Vec<usize>),
    #[error("invalid conjugation: {}", join_violations(.0))]
    InvalidConjugation(Vec<Violation>),
    #[error("a product needs at least one datum")]
    EmptyProduct,
    #[error("datum {0} does not share the group and conjugation of datum 0")]
    ProductMismatch(usize),
}

/// One broken CM-datum invariant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Violation {
    ConjOutOfRange(usize),
    ConjIsIdentity,
    ConjNotInvolution,
    ConjNotCentral,
    NoFactors,
    ForeignGroup { factor: usize },
    PhiOutOfRange { factor: usize, coset: usize },
    PhiRepeated { factor: usize, coset: usize },
    PhiIntersectsConjugate { factor: usize },
    PhiDoesNotCover { factor: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ConjOutOfRange(c) => write!(f, "conj {c} is not a group element"),
            Violation::ConjIsIdentity => write!(f, "conj is the identity"),
            Violation::ConjNotInvolution => write!(f, "conj not an involution"),
            Violation::ConjNotCentral => write!(f, "conj not central"),
            Violation::NoFactors => write!(f, "datum has no factors"),
            Violation::ForeignGroup { factor } => write!(f, "factor {factor}: coset space over a different group"),
            Violation::PhiOutOfRange { factor, coset } => write!(f, "factor {factor}: coset {coset} out of range"),
            Violation::PhiRepeated { factor, coset } => write!(f, "factor {factor}: coset {coset} listed twice"),
            Violation::PhiIntersectsConjugate { factor } => write!(f, "factor {factor}: phi and c·phi intersect"),
            Violation::PhiDoesNotCover { factor } => write!(f, "factor {factor}: phi and c·phi do not cover all cosets"),
        }
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

fn conjugation_violations(group: &FiniteGroup, conj: usize) -> Vec<Violation> {
    if conj >= group.order() {
        return vec![Violation::ConjOutOfRange(conj)];
    }
    let mut v = Vec::new();
    if conj == group.identity() {
        v.push(Violation::ConjIsIdentity);
    } else if group.mul(conj, conj) != group.identity() {
        v.push(Violation::ConjNotInvolution);
    }
    if !group.is_central(conj) {
        v.push(Violation::ConjNotCentral);
    }
    v
}

/// Left cosets `gH` of a subgroup, each identified by its least element,
/// with the left-translation action recorded as a table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetSpace {
    group: Arc<FiniteGroup>,
    subgroup: Vec<usize>,
    cosets: Vec<Vec<usize>>,
    coset_of: Vec<usize>,
    action: Vec<usize>,
}

impl CosetSpace {
    pub fn new(group: Arc<FiniteGroup>, subgroup: &[usize]) -> Result<Self, CmError> {
        let mut h = subgroup.to_vec();
        h.sort_unstable();
        h.dedup();
        if !group.is_subgroup(&h) {
            return Err(CmError::NotSubgroup(h));
        }
        let n = group.order();
        let mut coset_of = vec![usize::MAX; n];
        let mut cosets: Vec<Vec<usize>> = Vec::new();
        for x in 0..n {
            if coset_of[x] != usize::MAX {
                continue;
            }
            let mut c: Vec<usize> = h.iter().map(|&s| group.mul(x, s)).collect();
            c.sort_unstable();
            for &y in &c {
                coset_of[y] = cosets.len();
            }
            cosets.push(c);
        }
        let k = cosets.len();
        let mut action = Vec::with_capacity(n * k);
        for g in 0..n {
            for c in &cosets {
                action.push(coset_of[group.mul(g, c[0])]);
            }
        }
        Ok(CosetSpace {
            group,
            subgroup: h,
            cosets,
            coset_of,
            action,
        })
    }

    /// `G/{e}`: cosets are the group elements themselves.
    pub fn regular(group: Arc<FiniteGroup>) -> Self {
        Self::new(group, &[0]).expect("trivial subgroup")
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn subgroup(&self) -> &[usize] {
        &self.subgroup
    }

    pub fn has_trivial_subgroup(&self) -> bool {
        self.subgroup.len() == 1
    }

    pub fn len(&self) -> usize {
        self.cosets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosets.is_empty()
    }

    pub fn coset(&self, i: usize) -> &[usize] {
        &self.cosets[i]
    }

    pub fn representative(&self, i: usize) -> usize {
        self.cosets[i][0]
    }

    pub fn coset_of(&self, x: usize) -> usize {
        self.coset_of[x]
    }

    /// Index of `g · (coset i)`.
    pub fn act(&self, g: usize, coset: usize) -> usize {
        self.action[g * self.cosets.len() + coset]
    }
}

/// A subset `phi` of the cosets of one space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CmType {
    space: CosetSpace,
    phi: Vec<usize>,
}

impl CmType {
    /// `phi` lists coset indices; it is sorted but otherwise kept verbatim so
    /// that [`CmDatum::validate`] can report repeats and bad indices.
    pub fn new(space: CosetSpace, mut phi: Vec<usize>) -> Self {
        phi.sort_unstable();
        CmType { space, phi }
    }

    /// Builds `phi` from coset representatives (any element of each coset).
    pub fn from_elements(space: CosetSpace, elements: &[usize]) -> Result<Self, CmError> {
        let n = space.group.order();
        let mut phi = Vec::with_capacity(elements.len());
        for &x in elements {
            if x >= n {
                return Err(GroupError::ElementOutOfRange(x).into());
            }
            phi.push(space.coset_of(x));
        }
        Ok(Self::new(space, phi))
    }

    pub fn space(&self) -> &CosetSpace {
        &self.space
    }

    pub fn phi(&self) -> &[usize] {
        &self.phi
    }

    /// Dimension contributed by this factor.
    pub fn g(&self) -> usize {
        self.phi.len()
    }

    pub fn contains(&self, coset: usize) -> bool {
        self.phi.binary_search(&coset).is_ok()
    }

    /// The translate `g·phi`.
    pub fn translate(&self, g: usize) -> CmType {
        let phi = self.phi.iter().map(|&c| self.space.act(g, c)).collect();
        CmType::new(self.space.clone(), phi)
    }

    /// Representatives of `phi`, ascending.
    pub fn phi_elements(&self) -> Vec<usize> {
        self.phi.iter().map(|&c| self.space.representative(c)).collect()
    }

    fn violations(&self, factor: usize, conj: usize) -> Vec<Violation> {
        let k = self.space.len();
        let mut v = Vec::new();
        let mut seen = vec![false; k];
        for &c in &self.phi {
            if c >= k {
                v.push(Violation::PhiOutOfRange { factor, coset: c });
            } else if std::mem::replace(&mut seen[c], true) {
                v.push(Violation::PhiRepeated { factor, coset: c });
            }
        }
        if !v.is_empty() {
            return v;
        }
        let mut covered = seen.clone();
        let mut overlap = false;
        for &c in &self.phi {
            let cc = self.space.act(conj, c);
            overlap |= seen[cc];
            covered[cc] = true;
        }
        if overlap {
            v.push(Violation::PhiIntersectsConjugate { factor });
        }
        if covered.iter().any(|&b| !b) {
            v.push(Violation::PhiDoesNotCover { factor });
        }
        v
    }
}

/// A group, a conjugation and one CM type per simple factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CmDatum {
    group: Arc<FiniteGroup>,
    conj: usize,
    factors: Vec<CmType>,
}

impl CmDatum {
    /// Assembles a datum without checking it; see [`CmDatum::validate`].
    pub fn new(group: Arc<FiniteGroup>, conj: usize, factors: Vec<CmType>) -> Self {
        CmDatum { group, conj, factors }
    }

    /// Single factor over `G/{e}` with `phi` given by group elements.
    pub fn regular(group: Arc<FiniteGroup>, conj: usize, phi: &[usize]) -> Result<Self, CmError> {
        let space = CosetSpace::regular(group.clone());
        let t = CmType::from_elements(space, phi)?;
        Ok(CmDatum::new(group, conj, vec![t]))
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn conj(&self) -> usize {
        self.conj
    }

    pub fn factors(&self) -> &[CmType] {
        &self.factors
    }

    /// Total dimension `g = sum |phi_i|`.
    pub fn g(&self) -> usize {
        self.factors.iter().map(CmType::g).sum()
    }

    /// Every broken invariant; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = conjugation_violations(&self.group, self.conj);
        if v.contains(&Violation::ConjOutOfRange(self.conj)) {
            return v;
        }
        if self.factors.is_empty() {
            v.push(Violation::NoFactors);
        }
        for (i, t) in self.factors.iter().enumerate() {
            if *t.space.group != *self.group {
                v.push(Violation::ForeignGroup { factor: i });
                continue;
            }
            v.extend(t.violations(i, self.conj));
        }
        v
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// The datum with factor `i` replaced by its translate `g·phi_i`.
    pub fn with_factor(&self, i: usize, t: CmType) -> CmDatum {
        let mut factors = self.factors.clone();
        factors[i] = t;
        CmDatum::new(self.group.clone(), self.conj, factors)
    }

    /// Sub-datum keeping the listed factors.
    pub fn select_factors(&self, idx: &[usize]) -> CmDatum {
        let factors = idx.iter().map(|&i| self.factors[i].clone()).collect();
        CmDatum::new(self.group.clone(), self.conj, factors)
    }
}

/// Primitivity for a type on `G/{e}`: no nontrivial `s` with `phi·s = phi`.
///
/// Right translation is the relevant action here: `phi` is induced from a
/// subfield exactly when it is a union of left cosets of a nontrivial
/// subgroup, and this coincides with repeated characters in the torus. For
/// abelian groups it is the same as the translation stabilizer `g·phi = phi`.
pub fn is_primitive(t: &CmType) -> bool {
    right_stabilizer(t).len() == t.space.subgroup().len()
}

/// `{s : Φ̃·s = Φ̃}` where `Φ̃ ⊂ G` is the union of the cosets in `phi`.
/// Always contains `H`.
pub fn right_stabilizer(t: &CmType) -> Vec<usize> {
    let space = &t.space;
    let g = space.group();
    let lifted: Vec<usize> = t.phi.iter().flat_map(|&i| space.coset(i).iter().copied()).collect();
    (0..g.order())
        .filter(|&s| lifted.iter().all(|&x| t.contains(space.coset_of(g.mul(x, s)))))
        .collect()
}

/// Equivalence used when listing CM types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Equivalence {
    /// Every type separately.
    #[default]
    None,
    /// `phi ~ g·phi`.
    Translation,
    /// Translations combined with automorphisms of `G` fixing the conjugation.
    TranslationAndAutomorphism,
}

/// An equivalence class of types on `G/{e}`; `members[0]` is the
/// representative, each member a sorted element set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeClass {
    pub members: Vec<Vec<usize>>,
}

impl TypeClass {
    pub fn representative(&self) -> &[usize] {
        &self.members[0]
    }
}

/// All CM types on `G/{e}` for the conjugation `conj`, grouped by the chosen
/// equivalence. Raw types are ordered by a bitmask over the pairs
/// `{x, cx}` (`x < cx`, ascending), bit `i` selecting the larger element;
/// classes are ordered by their first member.
pub fn type_classes(group: &Arc<FiniteGroup>, conj: usize, eq: Equivalence) -> Result<Vec<TypeClass>, CmError> {
    let bad = conjugation_violations(group, conj);
    if !bad.is_empty() {
        return Err(CmError::InvalidConjugation(bad));
    }
    let pairs: Vec<(usize, usize)> = (0..group.order())
        .map(|x| (x, group.mul(conj, x)))
        .filter(|&(x, cx)| x < cx)
        .collect();
    let raw: Vec<Vec<usize>> = (0..1u64 << pairs.len())
        .map(|mask| {
            let mut phi: Vec<usize> = pairs
                .iter()
                .enumerate()
                .map(|(i, &(x, cx))| if mask >> i & 1 == 1 { cx } else { x })
                .collect();
            phi.sort_unstable();
            phi
        })
        .collect();
    if eq == Equivalence::None {
        return Ok(raw.into_iter().map(|phi| TypeClass { members: vec![phi] }).collect());
    }
    let position: HashMap<&[usize], usize> = raw.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
    let maps: Vec<Vec<usize>> = match eq {
        Equivalence::TranslationAndAutomorphism => group
            .automorphisms()
            .into_iter()
            .filter(|a| a[conj] == conj)
            .collect(),
        _ => vec![(0..group.order()).collect()],
    };
    let mut class_of = vec![usize::MAX; raw.len()];
    let mut classes = Vec::new();
    for start in 0..raw.len() {
        if class_of[start] != usize::MAX {
            continue;
        }
        let mut members = Vec::new();
        for map in &maps {
            for g in 0..group.order() {
                let mut img: Vec<usize> = raw[start].iter().map(|&x| map[group.mul(g, x)]).collect();
                img.sort_unstable();
                let i = position[img.as_slice()];
                if class_of[i] == usize::MAX {
                    class_of[i] = classes.len();
                    members.push(i);
                }
            }
        }
        members.sort_unstable();
        classes.push(TypeClass {
            members: members.into_iter().map(|i| raw[i].clone()).collect(),
        });
    }
    Ok(classes)
}

/// CM types on `G/{e}`: every type, or one representative per class.
pub fn enumerate_types(group: &Arc<FiniteGroup>, conj: usize, eq: Equivalence) -> Result<Vec<CmType>, CmError> {
    let space = CosetSpace::regular(group.clone());
    Ok(type_classes(group, conj, eq)?
        .into_iter()
        .map(|c| CmType::new(space.clone(), c.members[0].clone()))
        .collect())
}

/// CM types on an arbitrary coset space, ordered by a bitmask over the
/// coset pairs `{i, c·i}` as in [`type_classes`]. With `up_to_translation`
/// only the first type of each orbit `phi ~ g·phi` is kept. Empty when the
/// conjugation fixes a coset.
pub fn coset_types(space: &CosetSpace, conj: usize, up_to_translation: bool) -> Result<Vec<CmType>, CmError> {
    let group = space.group();
    let bad = conjugation_violations(group, conj);
    if !bad.is_empty() {
        return Err(CmError::InvalidConjugation(bad));
    }
    let k = space.len();
    if (0..k).any(|i| space.act(conj, i) == i) {
        return Ok(Vec::new());
    }
    let pairs: Vec<(usize, usize)> = (0..k)
        .map(|i| (i, space.act(conj, i)))
        .filter(|&(i, ci)| i < ci)
        .collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut out = Vec::new();
    for mask in 0..1u64 << pairs.len() {
        let mut phi: Vec<usize> = pairs
            .iter()
            .enumerate()
            .map(|(i, &(x, cx))| if mask >> i & 1 == 1 { cx } else { x })
            .collect();
        phi.sort_unstable();
        if up_to_translation {
            if seen.contains(&phi) {
                continue;
            }
            for g in 0..group.order() {
                let mut img: Vec<usize> = phi.iter().map(|&i| space.act(g, i)).collect();
                img.sort_unstable();
                seen.insert(img);
            }
        }
        out.push(CmType::new(space.clone(), phi));
    }
    Ok(out)
}

/// Concatenates the factors of data sharing one group and conjugation.
pub fn product(data: &[CmDatum]) -> Result<CmDatum, CmError> {
    let first = data.first().ok_or(CmError::EmptyProduct)?;
    let mut factors = Vec::new();
    for (i, d) in data.iter().enumerate() {
        if *d.group != *first.group || d.conj != first.conj {
            return Err(CmError::ProductMismatch(i));
        }
        factors.extend(d.factors.iter().cloned());
    }
    Ok(CmDatum::new(first.group.clone(), first.conj, factors))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic(n: u64) -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::cyclic(n).unwrap())
    }

    fn klein() -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::abelian(&[2, 2]).unwrap())
    }

    #[test]
    fn validate_examples() {
        let ok = CmDatum::regular(cyclic(2), 1, &[0]).unwrap();
        assert!(ok.validate().is_empty());

        let both = CmDatum::regular(cyclic(2), 1, &[0, 1]).unwrap();
        let v = both.validate();
        assert!(v.contains(&Violation::PhiIntersectsConjugate { factor: 0 }));
        assert_eq!(v[0].to_string(), "factor 0: phi and c·phi intersect");

        let z4 = CmDatum::regular(cyclic(4), 1, &[0, 1]).unwrap();
        assert_eq!(z4.validate()[0], Violation::ConjNotInvolution);
        assert_eq!(z4.validate()[0].to_string(), "conj not an involution");
    }

    #[test]
    fn validate_structural_faults() {
        let d = CmDatum::new(cyclic(2), 1, vec![]);
        assert_eq!(d.validate(), vec![Violation::NoFactors]);
        let d = CmDatum::new(cyclic(2), 0, vec![CmType::new(CosetSpace::regular(cyclic(2)), vec![0])]);
        assert!(d.validate().contains(&Violation::ConjIsIdentity));
        let d = CmDatum::new(cyclic(2), 1, vec![CmType::new(CosetSpace::regular(cyclic(2)), vec![0, 0])]);
        assert!(d.validate().contains(&Violation::PhiRepeated { factor: 0, coset: 0 }));
        let d = CmDatum::new(cyclic(2), 7, vec![]);
        assert_eq!(d.validate(), vec![Violation::ConjOutOfRange(7)]);
        let q8 = Arc::new(FiniteGroup::dicyclic(2));
        // element 1 is a, of order 4 and not central
        let d = CmDatum::regular(q8, 1, &[0]).unwrap();
        assert!(d.validate().contains(&Violation::ConjNotCentral));
    }

    #[test]
    fn coset_space_of_index_two() {
        let g = klein();
        let h = [0, 2]; // {(0,0),(1,0)}
        let s = CosetSpace::new(g.clone(), &h).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.coset(1), &[1, 3]);
        assert_eq!(s.act(3, 0), 1);
        assert!(CosetSpace::new(g, &[0, 1, 2]).is_err());
    }

    #[test]
    fn conjugation_fixing_a_coset_is_rejected() {
        // c = (1,0) lies in H = {(0,0),(1,0)}, so c fixes every coset
        let g = klein();
        let s = CosetSpace::new(g.clone(), &[0, 2]).unwrap();
        let d = CmDatum::new(g, 2, vec![CmType::new(s, vec![0])]);
        let v = d.validate();
        assert!(v.contains(&Violation::PhiDoesNotCover { factor: 0 }));
    }

    #[test]
    fn primitivity_examples() {
        let z4 = CmDatum::regular(cyclic(4), 2, &[0, 1]).unwrap();
        assert!(is_primitive(&z4.factors()[0]));
        let k = klein();
        let imprim = CmDatum::regular(k.clone(), 3, &[0, 2]).unwrap();
        assert!(!is_primitive(&imprim.factors()[0]));
        assert_eq!(right_stabilizer(&imprim.factors()[0]), vec![0, 2]);
        let e = CmDatum::regular(cyclic(2), 1, &[0]).unwrap();
        assert!(is_primitive(&e.factors()[0]));

        let s = CosetSpace::new(k, &[0, 1]).unwrap();
        assert!(is_primitive(&CmType::new(s, vec![0])));
    }

    #[test]
    fn types_on_cosets() {
        // Z/2 x A4 on the cosets of a subgroup of order 3
        let a4 = FiniteGroup::from_permutations(&[vec![1, 2, 0, 3], vec![1, 0, 3, 2]], "A4").unwrap();
        let g = Arc::new(FiniteGroup::cyclic(2).unwrap().direct_product(&a4));
        let h = g.subgroups().into_iter().find(|h| h.len() == 3).unwrap();
        let space = CosetSpace::new(g.clone(), &h).unwrap();
        let c = g.central_involutions()[0];
        let all = coset_types(&space, c, false).unwrap();
        assert_eq!(all.len(), 16);
        let reps = coset_types(&space, c, true).unwrap();
        assert!(reps.len() < all.len());
        for t in &all {
            assert!(CmDatum::new(g.clone(), c, vec![t.clone()]).is_valid());
        }

        let k = klein();
        let fixed = CosetSpace::new(k, &[0, 2]).unwrap();
        assert!(coset_types(&fixed, 2, false).unwrap().is_empty());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_types(&cyclic(2), 1, Equivalence::None).unwrap().len(), 2);
        assert_eq!(enumerate_types(&cyclic(2), 1, Equivalence::Translation).unwrap().len(), 1);

        let z4 = enumerate_types(&cyclic(4), 2, Equivalence::None).unwrap();
        assert_eq!(z4.len(), 4);
        let classes = type_classes(&cyclic(4), 2, Equivalence::Translation).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].members, vec![vec![0, 1], vec![1, 2], vec![0, 3], vec![2, 3]]);

        assert_eq!(enumerate_types(&klein(), 3, Equivalence::None).unwrap().len(), 4);
        assert_eq!(enumerate_types(&klein(), 3, Equivalence::Translation).unwrap().len(), 2);
    }

    #[test]
    fn enumeration_rejects_bad_conjugation() {
        assert!(matches!(
            enumerate_types(&cyclic(4), 1, Equivalence::None),
            Err(CmError::InvalidConjugation(_))
        ));
    }

    #[test]
    fn raw_type_count_is_two_to_the_g() {
        for n in 1..=16usize {
            for group in crate::group::small_groups(n) {
                let group = Arc::new(group);
                for c in group.central_involutions() {
                    let classes = type_classes(&group, c, Equivalence::Translation).unwrap();
                    let total: usize = classes.iter().map(|k| k.members.len()).sum();
                    assert_eq!(total, 1 << (n / 2), "{} c={c}", group.label());
                    for k in &classes {
                        assert_eq!(n % k.members.len(), 0);
                    }
                }
            }
        }
    }

    #[test]
    fn automorphism_classes_are_coarser() {
        let g = Arc::new(FiniteGroup::abelian(&[2, 4]).unwrap());
        for c in g.central_involutions() {
            let t = type_classes(&g, c, Equivalence::Translation).unwrap().len();
            let a = type_classes(&g, c, Equivalence::TranslationAndAutomorphism).unwrap().len();
            assert!(a <= t);
        }
    }

    #[test]
    fn product_checks() {
        let k = klein();
        let d1 = CmDatum::regular(k.clone(), 3, &[0, 2]).unwrap();
        let d2 = CmDatum::regular(k.clone(), 3, &[0, 1]).unwrap();
        let p = product(&[d1.clone(), d2]).unwrap();
        assert_eq!(p.g(), 4);
        assert!(p.is_valid());
        assert_eq!(product(&[]), Err(CmError::EmptyProduct));
        let other = CmDatum::regular(cyclic(2), 1, &[0]).unwrap();
        assert_eq!(product(&[d1, other]), Err(CmError::ProductMismatch(1)));
    }

    #[test]
    fn primitivity_is_translation_invariant() {
        for group in crate::group::small_groups(8) {
            let group = Arc::new(group);
            for c in group.central_involutions() {
                for t in enumerate_types(&group, c, Equivalence::None).unwrap() {
                    let p = is_primitive(&t);
                    for g in 0..group.order() {
                        assert_eq!(is_primitive(&t.translate(g)), p);
                    }
                }
            }
        }
    }
}
