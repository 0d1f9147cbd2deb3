//! Family sweeps: classification tables and the exhaustive verification run.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::alpha::{
    abel_inequality_check, analyze, oracle_scan, ribet_dim_bound_holds, AlphaReport, SearchConfig, DEFAULT_ORACLE_CAP,
};
use crate::cm::{coset_types, is_primitive, type_classes, CmDatum, CmType, CosetSpace, Equivalence};
use crate::exec::Execution;
use crate::group::{catalog_is_complete, small_groups, FiniteGroup};
use crate::torus::{CharacterSystem, TorusError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerateOptions {
    pub primitive_only: bool,
    pub equivalence: Equivalence,
    pub exec: Execution,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            primitive_only: false,
            equivalence: Equivalence::Translation,
            exec: Execution::default(),
        }
    }
}

/// One CM type (or class representative) with its invariants.
#[derive(Clone, Debug, Serialize)]
pub struct ClassRow {
    pub group: String,
    pub order: usize,
    /// `H`; empty for `G/{e}`.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub subgroup: Vec<String>,
    pub conj: String,
    /// Coset representatives.
    pub phi: Vec<String>,
    pub class_size: usize,
    pub primitive: bool,
    pub g: usize,
    /// Absent when characters repeat.
    pub d: Option<usize>,
    pub defect: Option<i64>,
    #[serde(serialize_with = "crate::json::opt_rational")]
    pub alpha: Option<BigRational>,
    pub bounds_ok: Option<bool>,
}

impl ClassRow {
    pub fn alpha_text(&self) -> String {
        self.alpha.as_ref().map_or_else(|| "-".into(), ToString::to_string)
    }

    /// Primitive, `δ > 0` and `α = 2g/(2 + log2 g)`.
    pub fn is_degenerate_extremal(&self) -> bool {
        self.primitive
            && self.defect.is_some_and(|d| d > 0)
            && self.alpha.as_ref().is_some_and(|a| attains_upper_bound(a, self.g))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FamilySummary {
    pub classes: usize,
    pub primitive: usize,
    /// `d >= 2 + log2 g` on primitive classes.
    pub ribet_dim_bound_ok: bool,
    /// `g` prime implies `δ = 0` on primitive classes.
    pub prime_g_nondegenerate_ok: bool,
    /// `α <= 2g/(2 + log2 g)` everywhere `α` is defined.
    pub th2_bound_ok: bool,
    pub all_bounds_ok: bool,
    /// Primitive classes with `δ > 0`.
    pub degenerate_primitive: usize,
    /// Rows (by position) that are degenerate and attain the upper bound.
    pub degenerate_extremal: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnumerationTable {
    pub rows: Vec<ClassRow>,
    pub summary: FamilySummary,
}

fn class_row(conj: usize, t: CmType, class_size: usize) -> (ClassRow, Option<AlphaReport>) {
    let space = t.space().clone();
    let group = space.group().clone();
    let primitive = is_primitive(&t);
    let g = t.g();
    let phi = t.phi().iter().map(|&i| group.format_element(space.representative(i))).collect();
    let datum = CmDatum::new(group.clone(), conj, vec![t]);
    let report = CharacterSystem::build(&datum)
        .ok()
        .map(|cs| analyze(&cs, SearchConfig { prune: true, exec: Execution::Sequential }));
    let subgroup = if space.has_trivial_subgroup() {
        Vec::new()
    } else {
        space.subgroup().iter().map(|&x| group.format_element(x)).collect()
    };
    let row = ClassRow {
        group: group.label().to_string(),
        order: group.order(),
        subgroup,
        conj: group.format_element(conj),
        phi,
        class_size,
        primitive,
        g,
        d: report.as_ref().map(|r| r.d),
        defect: report.as_ref().map(|r| r.defect),
        alpha: report.as_ref().map(|r| r.alpha.clone()),
        bounds_ok: report.as_ref().map(|r| r.bound_checks.as_ref().is_some_and(|b| b.all_pass())),
    };
    (row, report)
}

fn tabulate(results: Vec<(ClassRow, Option<AlphaReport>)>, primitive_only: bool) -> EnumerationTable {
    let mut summary = FamilySummary {
        ribet_dim_bound_ok: true,
        prime_g_nondegenerate_ok: true,
        th2_bound_ok: true,
        all_bounds_ok: true,
        ..Default::default()
    };
    let mut rows = Vec::new();
    for (row, report) in results {
        if primitive_only && !row.primitive {
            continue;
        }
        summary.classes += 1;
        if let Some(r) = &report {
            let checks = r.bound_checks.as_ref().expect("analyzed");
            summary.th2_bound_ok &= checks.th2_bound;
            summary.all_bounds_ok &= checks.all_pass();
            if row.primitive {
                summary.primitive += 1;
                summary.ribet_dim_bound_ok &= ribet_dim_bound_holds(r.g, r.d);
                summary.prime_g_nondegenerate_ok &= checks.prime_g_nondegenerate.unwrap_or(true);
                if r.defect > 0 {
                    summary.degenerate_primitive += 1;
                }
            }
        }
        if row.is_degenerate_extremal() {
            summary.degenerate_extremal.push(rows.len());
        }
        rows.push(row);
    }
    EnumerationTable { rows, summary }
}

/// Classifies the CM types on `G/{e}` of each group under each central
/// involution.
pub fn enumerate_family(groups: &[Arc<FiniteGroup>], opts: EnumerateOptions) -> EnumerationTable {
    let mut jobs = Vec::new();
    for group in groups {
        let space = CosetSpace::regular(group.clone());
        for c in group.central_involutions() {
            for class in type_classes(group, c, opts.equivalence).expect("central involution") {
                let size = class.members.len();
                jobs.push((c, CmType::new(space.clone(), class.members[0].clone()), size));
            }
        }
    }
    let results = opts.exec.map(&jobs, |(c, t, size)| class_row(*c, t.clone(), *size));
    tabulate(results, opts.primitive_only)
}

/// CM types on `G/H` with `[G:H] = index`, one `H` per conjugacy class.
/// Automorphism equivalence is treated as translation.
pub fn enumerate_coset_family(groups: &[Arc<FiniteGroup>], index: usize, opts: EnumerateOptions) -> EnumerationTable {
    let mut jobs = Vec::new();
    for group in groups {
        if index == 0 || group.order() % index != 0 {
            continue;
        }
        for c in group.central_involutions() {
            for h in group.subgroup_classes() {
                if h.len() * index != group.order() {
                    continue;
                }
                let space = CosetSpace::new(group.clone(), &h).expect("subgroup");
                let up_to_translation = opts.equivalence != Equivalence::None;
                for t in coset_types(&space, c, up_to_translation).expect("central involution") {
                    let size = if up_to_translation { translation_orbit(&t) } else { 1 };
                    jobs.push((c, t, size));
                }
            }
        }
    }
    let results = opts.exec.map(&jobs, |(c, t, size)| class_row(*c, t.clone(), *size));
    tabulate(results, opts.primitive_only)
}

fn translation_orbit(t: &CmType) -> usize {
    let group = t.space().group();
    let orbit: HashSet<Vec<usize>> = (0..group.order()).map(|g| t.translate(g).phi().to_vec()).collect();
    orbit.len()
}

/// Every abelian group of order at most `max_order` plus the nonabelian ones
/// the catalog knows.
pub fn catalog_up_to(max_order: usize) -> Vec<Arc<FiniteGroup>> {
    (1..=max_order).flat_map(small_groups).map(Arc::new).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckTally {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
}

/// A datum attaining the upper bound `2g/(2 + log2 g)` with `δ > 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremalExample {
    pub group: String,
    pub conj: String,
    pub phi: Vec<String>,
    pub g: usize,
    pub d: usize,
    #[serde(serialize_with = "crate::json::rational")]
    pub alpha: BigRational,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub max_group_order: usize,
    pub catalog_complete: bool,
    pub groups: usize,
    pub data_examined: usize,
    pub analyzed: usize,
    pub repeated_characters: usize,
    pub translation_classes: usize,
    pub checks: Vec<CheckTally>,
    pub degenerate_extremal: Vec<ExtremalExample>,
    pub abel_instances: usize,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.failed == 0)
    }

    pub fn tally(&self, name: &str) -> Option<&CheckTally> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub max_group_order: usize,
    pub oracle_cap: usize,
    pub abel_instances: usize,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            max_group_order: 12,
            oracle_cap: DEFAULT_ORACLE_CAP,
            abel_instances: 1000,
            seed: 0x5eed,
            exec: Execution::default(),
        }
    }
}

struct Job {
    group: Arc<FiniteGroup>,
    conj: usize,
    phi: Vec<usize>,
    class: usize,
}

#[derive(Default)]
struct Outcome {
    results: Vec<(&'static str, bool)>,
    alpha: Option<BigRational>,
    extremal: Option<ExtremalExample>,
    repeated: bool,
}

const CHECK_NAMES: [&str; 18] = [
    "valid_datum",
    "repeated_iff_imprimitive",
    "weight_relation",
    "half_ones_per_column",
    "rank_bounds",
    "mod2_distinct",
    "c1new_visited",
    "c1new_all_subsets",
    "th2_bound",
    "lower_bound_2g_over_d",
    "masser_strict",
    "rational_form",
    "ribet_dim_bound",
    "prime_g_nondegenerate",
    "shortcut_agrees",
    "oracle_equivalence",
    "translation_invariance",
    "abel_inequality",
];

fn check_one(job: &Job, oracle_cap: usize) -> Outcome {
    let mut out = Outcome::default();
    let group = &job.group;
    let t = CmType::new(CosetSpace::regular(group.clone()), job.phi.clone());
    let primitive = is_primitive(&t);
    let datum = CmDatum::new(group.clone(), job.conj, vec![t]);
    out.results.push(("valid_datum", datum.is_valid()));
    let cs = match CharacterSystem::build(&datum) {
        Ok(cs) => cs,
        Err(TorusError::DuplicateCharacters { .. }) => {
            out.repeated = true;
            out.results.push(("repeated_iff_imprimitive", !primitive));
            return out;
        }
        Err(TorusError::InvalidDatum(_)) => return out,
    };
    out.results.push(("repeated_iff_imprimitive", primitive));

    let n = group.order() as i64;
    let weight_ok = (0..cs.len()).all(|i| {
        let j = cs.conjugate(i);
        cs.character(i).iter().zip(cs.character(j)).all(|(a, b)| a + b == 1)
    });
    out.results.push(("weight_relation", weight_ok));
    let half = cs.characters().iter().all(|c| 2 * c.iter().sum::<i64>() == n);
    out.results.push(("half_ones_per_column", half));
    out.results.push(("rank_bounds", cs.d() >= 2 && cs.d() <= cs.g() + 1));

    let r = analyze(&cs, SearchConfig { prune: true, exec: Execution::Sequential });
    let checks = r.bound_checks.clone().expect("analyzed");
    out.results.push(("mod2_distinct", checks.mod2_distinct));
    out.results.push(("c1new_visited", checks.c1new_all_subspaces));
    out.results.push(("th2_bound", checks.th2_bound));
    out.results.push(("lower_bound_2g_over_d", checks.lower_bound_2g_over_d));
    out.results.push(("masser_strict", checks.masser_bound));
    out.results.push(("rational_form", checks.rational_form));
    if let Some(ok) = checks.ribet_dim_bound {
        out.results.push(("ribet_dim_bound", ok));
    }
    if let Some(ok) = checks.prime_g_nondegenerate {
        out.results.push(("prime_g_nondegenerate", ok));
    }
    if let Some(ok) = checks.shortcut_agrees {
        out.results.push(("shortcut_agrees", ok));
    }
    if let Ok(scan) = oracle_scan(&cs, oracle_cap) {
        out.results.push(("oracle_equivalence", scan.alpha == r.alpha));
        out.results.push(("c1new_all_subsets", scan.bound_violations == 0));
    }
    if r.defect > 0 && attains_upper_bound(&r.alpha, r.g) {
        out.extremal = Some(ExtremalExample {
            group: group.label().to_string(),
            conj: group.format_element(job.conj),
            phi: job.phi.iter().map(|&x| group.format_element(x)).collect(),
            g: r.g,
            d: r.d,
            alpha: r.alpha.clone(),
        });
    }
    out.alpha = Some(r.alpha);
    out
}

/// `α = 2g/(2 + log2 g)`; only possible when `g` is a power of two.
pub fn attains_upper_bound(alpha: &BigRational, g: usize) -> bool {
    g.is_power_of_two() && *alpha == BigRational::new((2 * g).into(), (2 + g.trailing_zeros() as usize).into())
}

/// Random instances of the Abel summation inequality; returns failures.
pub fn abel_random_checks(instances: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..instances {
        let r = rng.gen_range(1..=8);
        let mut n: Vec<u64> = (0..r).map(|_| rng.gen_range(1..=20)).collect();
        n.sort_unstable_by(|a, b| b.cmp(a));
        let b: Vec<u64> = (0..r).map(|_| rng.gen_range(1..=50)).collect();
        let w: Vec<u64> = (0..r).map(|_| rng.gen_range(1..=50)).collect();
        if abel_inequality_check(&n, &b, &w) != Ok(true) {
            failures += 1;
        }
    }
    failures
}

/// Every single-factor datum on `G/{e}` for the cataloged groups of order at
/// most `max_group_order`, every central involution and every CM type.
pub fn verify(opts: VerifyOptions) -> VerifyReport {
    let groups = catalog_up_to(opts.max_group_order);
    let mut jobs = Vec::new();
    let mut classes = 0;
    for group in &groups {
        for c in group.central_involutions() {
            for class in type_classes(group, c, Equivalence::Translation).expect("central involution") {
                for phi in class.members {
                    jobs.push(Job {
                        group: group.clone(),
                        conj: c,
                        phi,
                        class: classes,
                    });
                }
                classes += 1;
            }
        }
    }
    let outcomes = opts.exec.map(&jobs, |j| check_one(j, opts.oracle_cap));

    let mut tallies: BTreeMap<&'static str, (usize, usize)> = BTreeMap::new();
    let mut bump = |name: &'static str, ok: bool| {
        let e = tallies.entry(name).or_default();
        if ok {
            e.0 += 1;
        } else {
            e.1 += 1;
        }
    };
    let mut class_alpha: HashMap<usize, BigRational> = HashMap::new();
    let mut analyzed = 0;
    let mut repeated = 0;
    let mut extremal = Vec::new();
    for (job, out) in jobs.iter().zip(&outcomes) {
        for &(name, ok) in &out.results {
            bump(name, ok);
        }
        repeated += usize::from(out.repeated);
        if let Some(a) = &out.alpha {
            analyzed += 1;
            match class_alpha.get(&job.class) {
                Some(prev) => bump("translation_invariance", prev == a),
                None => {
                    class_alpha.insert(job.class, a.clone());
                }
            }
        }
        if let Some(x) = &out.extremal {
            if !extremal.contains(x) {
                extremal.push(x.clone());
            }
        }
    }
    let abel_failures = abel_random_checks(opts.abel_instances, opts.seed);
    bump("abel_inequality", true);
    let e = tallies.get_mut("abel_inequality").expect("just inserted");
    *e = (opts.abel_instances - abel_failures, abel_failures);

    let checks = CHECK_NAMES
        .iter()
        .map(|&name| {
            let (passed, failed) = tallies.get(name).copied().unwrap_or_default();
            CheckTally { name, passed, failed }
        })
        .collect();
    VerifyReport {
        max_group_order: opts.max_group_order,
        catalog_complete: catalog_is_complete(opts.max_group_order),
        groups: groups.len(),
        data_examined: jobs.len(),
        analyzed,
        repeated_characters: repeated,
        translation_classes: classes,
        checks,
        degenerate_extremal: extremal,
        abel_instances: opts.abel_instances,
    }
}
