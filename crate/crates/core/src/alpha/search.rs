//! Best-ratio search over closed character flats.
//!
//! A flat is a subspace spanned by characters and containing every character
//! it spans. Flats are grown one dimension at a time: every flat of
//! dimension `k+1` contains a flat of dimension `k` plus one more character,
//! so a level-by-level sweep from the single characters reaches all of them.
//! A flat is identified by the set of characters it contains.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::exec::Execution;
use crate::linalg::{canonical_span, CanonicalSubspace, RatMatrix, SmallEchelon};
use crate::torus::{lattice_characters_i64, CharacterSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Stop once no larger dimension can beat the incumbent, using
    /// `n(W) <= 2^(dim W - 1)`.
    pub prune: bool,
    pub exec: Execution,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            prune: true,
            exec: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// Distinct flats met at each dimension `1, 2, ...`.
    pub flats_per_level: Vec<usize>,
    /// Last dimension examined before the bound ended the sweep.
    pub stopped_after: Option<usize>,
    /// Flats with more than `2^(dim - 1)` characters.
    pub bound_violations: usize,
}

impl SearchStats {
    pub fn flats_visited(&self) -> usize {
        self.flats_per_level.iter().sum::<usize>() + 1
    }
}

/// A subspace realizing (or competing for) the best ratio.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceWitness {
    pub subspace: CanonicalSubspace,
    /// Every character lying in the subspace, ascending.
    pub generating_indices: Vec<usize>,
    pub n: usize,
    pub dim: usize,
    pub ratio: BigRational,
}

impl SubspaceWitness {
    fn new(subspace: CanonicalSubspace, closed: Vec<usize>) -> Self {
        let n = closed.len();
        let dim = subspace.dim();
        SubspaceWitness {
            subspace,
            generating_indices: closed,
            n,
            dim,
            ratio: BigRational::new(BigInt::from(n), BigInt::from(dim)),
        }
    }

    /// Strictly preferable: larger ratio, then smaller dimension, then the
    /// lexicographically smaller index set.
    pub fn beats(&self, other: &SubspaceWitness) -> bool {
        let other = Candidate {
            n: other.n,
            dim: other.dim,
            closed: other.generating_indices.clone(),
        };
        prefers(self.n, self.dim, &self.generating_indices, &other)
    }
}

impl Serialize for SubspaceWitness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View<'a> {
            generating_indices: &'a [usize],
            n: usize,
            dim: usize,
            #[serde(serialize_with = "crate::json::rational")]
            ratio: BigRational,
            basis: Vec<Vec<String>>,
        }
        View {
            generating_indices: &self.generating_indices,
            n: self.n,
            dim: self.dim,
            ratio: self.ratio.clone(),
            basis: crate::json::rational_rows(self.subspace.basis_rows()),
        }
        .serialize(s)
    }
}

fn prefers(n: usize, dim: usize, indices: &[usize], other: &Candidate) -> bool {
    let lhs = n * other.dim;
    let rhs = other.n * dim;
    if lhs != rhs {
        return lhs > rhs;
    }
    if dim != other.dim {
        return dim < other.dim;
    }
    indices < other.closed.as_slice()
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub witness: SubspaceWitness,
    pub stats: SearchStats,
}

fn rational_characters(cs: &CharacterSystem) -> Vec<Vec<BigRational>> {
    cs.characters()
        .iter()
        .map(|c| c.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
        .collect()
}

struct Candidate {
    n: usize,
    dim: usize,
    closed: Vec<usize>,
}

/// Span arithmetic on the character vectors, addressed by index. `None`
/// means the backend cannot answer (overflow).
trait Spans: Sync {
    type Span: Clone + Send + Sync;
    fn len(&self) -> usize;
    fn empty(&self) -> Self::Span;
    fn with(&self, s: &Self::Span, j: usize) -> Option<Self::Span>;
    fn contains(&self, s: &Self::Span, j: usize) -> Option<bool>;
}

struct SmallSpans<'a>(&'a [Vec<i64>]);

impl Spans for SmallSpans<'_> {
    type Span = SmallEchelon;
    fn len(&self) -> usize {
        self.0.len()
    }
    fn empty(&self) -> SmallEchelon {
        SmallEchelon::new()
    }
    fn with(&self, s: &SmallEchelon, j: usize) -> Option<SmallEchelon> {
        s.with(&self.0[j])
    }
    fn contains(&self, s: &SmallEchelon, j: usize) -> Option<bool> {
        s.contains(&self.0[j])
    }
}

struct ExactSpans(Vec<Vec<BigRational>>, usize);

impl Spans for ExactSpans {
    type Span = CanonicalSubspace;
    fn len(&self) -> usize {
        self.0.len()
    }
    fn empty(&self) -> CanonicalSubspace {
        CanonicalSubspace::zero(self.1)
    }
    fn with(&self, s: &CanonicalSubspace, j: usize) -> Option<CanonicalSubspace> {
        Some(s.extended(&self.0[j]).expect("ambient length"))
    }
    fn contains(&self, s: &CanonicalSubspace, j: usize) -> Option<bool> {
        Some(s.contains(&self.0[j]).expect("ambient length"))
    }
}

/// Grows `closed` by `j` and adds every character the new span picks up.
fn closure<A: Spans>(a: &A, span: &A::Span, closed: &[usize], j: usize) -> Option<Vec<usize>> {
    let mut out = Vec::with_capacity(closed.len() + 1);
    let mut old = closed.iter().peekable();
    for i in 0..a.len() {
        if old.peek() == Some(&&i) {
            old.next();
            out.push(i);
        } else if i == j || a.contains(span, i)? {
            out.push(i);
        }
    }
    Some(out)
}

type Level<S> = BTreeMap<Vec<usize>, S>;

fn successors<A: Spans>(a: &A, span: &A::Span, closed: &[usize]) -> Option<Vec<(Vec<usize>, A::Span)>> {
    let mut covered = vec![false; a.len()];
    for &i in closed {
        covered[i] = true;
    }
    let mut out = Vec::new();
    for j in 0..a.len() {
        if covered[j] {
            continue;
        }
        let grown = a.with(span, j)?;
        let cl = closure(a, &grown, closed, j)?;
        for &i in &cl {
            covered[i] = true;
        }
        out.push((cl, grown));
    }
    Some(out)
}

/// Whether some dimension in `(k, d)` could still hold a better flat.
fn can_improve(k: usize, d: usize, total: usize, best: &Candidate) -> bool {
    (k + 1..d).any(|kk| {
        let cap = if kk > usize::BITS as usize - 1 {
            total
        } else {
            total.min(1usize << (kk - 1))
        };
        let lhs = cap * best.dim;
        let rhs = best.n * kk;
        lhs > rhs || (lhs == rhs && kk <= best.dim)
    })
}

fn run<A: Spans>(a: &A, d: usize, cfg: SearchConfig) -> Option<(Candidate, SearchStats)> {
    let m = a.len();
    let mut best = Candidate {
        n: m,
        dim: d,
        closed: (0..m).collect(),
    };
    let mut stats = SearchStats::default();

    let mut level: Level<A::Span> = BTreeMap::new();
    let empty = a.empty();
    for j in 0..m {
        let s = a.with(&empty, j)?;
        let cl = closure(a, &s, &[], j)?;
        level.entry(cl).or_insert(s);
    }
    let mut k = 1;
    while k < d && !level.is_empty() {
        stats.flats_per_level.push(level.len());
        for closed in level.keys() {
            if k < usize::BITS as usize && closed.len() > 1usize << (k - 1) {
                stats.bound_violations += 1;
            }
            if prefers(closed.len(), k, closed, &best) {
                best = Candidate {
                    n: closed.len(),
                    dim: k,
                    closed: closed.clone(),
                };
            }
        }
        if k + 1 >= d {
            break;
        }
        if cfg.prune && !can_improve(k, d, m, &best) {
            stats.stopped_after = Some(k);
            break;
        }
        let flats: Vec<(Vec<usize>, A::Span)> = std::mem::take(&mut level).into_iter().collect();
        let grown = cfg.exec.map(&flats, |(cl, s)| successors(a, s, cl));
        for batch in grown {
            for (cl, s) in batch? {
                level.entry(cl).or_insert(s);
            }
        }
        k += 1;
    }
    Some((best, stats))
}

/// Maximizes `n(W)/dim W` over all nonzero character flats.
pub fn search(cs: &CharacterSystem, cfg: SearchConfig) -> SearchOutcome {
    let d = cs.d();
    let ambient = cs.datum().group().order();
    let exact = ExactSpans(rational_characters(cs), ambient);
    // same flats in the shorter lattice coordinates
    let small = lattice_characters_i64(cs);
    let small = small.as_deref().unwrap_or(cs.characters());
    let (best, stats) = run(&SmallSpans(small), d, cfg)
        .or_else(|| run(&exact, d, cfg))
        .expect("exact arithmetic always answers");
    let rows = best.closed.iter().map(|&i| exact.0[i].clone()).collect();
    let subspace = canonical_span(&RatMatrix::from_rows(ambient, rows).expect("uniform rows"));
    SearchOutcome {
        witness: SubspaceWitness::new(subspace, best.closed),
        stats,
    }
}

/// The flat spanned by the given characters, with every character it
/// contains. `None` for an empty list or an index out of range.
pub fn flat_of(cs: &CharacterSystem, indices: &[usize]) -> Option<SubspaceWitness> {
    if indices.is_empty() || indices.iter().any(|&i| i >= cs.len()) {
        return None;
    }
    let chars = rational_characters(cs);
    let rows = indices.iter().map(|&i| chars[i].clone()).collect();
    let span = canonical_span(&RatMatrix::from_rows(cs.datum().group().order(), rows).expect("uniform rows"));
    let closed = (0..chars.len())
        .filter(|&i| span.contains(&chars[i]).expect("ambient length"))
        .collect();
    Some(SubspaceWitness::new(span, closed))
}
