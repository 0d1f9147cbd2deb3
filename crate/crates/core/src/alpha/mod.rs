//! The torsion exponent `α = max n(W)/dim W` and the inequalities around it.

pub mod oracle;
pub mod search;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::cm::CmDatum;
use crate::torus::{check_mod2_distinct, classify, CharacterSystem, Classification, TorusError};

pub use oracle::{alpha_oracle, oracle_scan, rank_table, OracleError, OracleScan, DEFAULT_ORACLE_CAP};
pub use search::{flat_of, search, SearchConfig, SearchOutcome, SearchStats, SubspaceWitness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphaError {
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error("power must be at least 1")]
    ZeroPower,
    #[error("sequences have different lengths")]
    LengthMismatch,
    #[error("empty input")]
    Empty,
    #[error("entries must be positive")]
    NotPositive,
    #[error("multiplicities must be weakly decreasing")]
    NotDecreasing,
    #[error("{0} factors is too many for the subset scan")]
    TooManyFactors(usize),
}

/// Which closed formula, if any, predicts `α` without searching.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Shortcut {
    None,
    /// `δ = 0` gives `2g/d`.
    Nondegenerate,
    /// `δ = 1`, one primitive factor: `2`.
    DefectOne,
    /// One primitive factor with `g <= 7`: `2g/d`.
    PrimitiveSmallDimension,
}

/// Named inequalities, each evaluated exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundChecks {
    /// `α <= 2g/(2 + log2 g)`.
    pub th2_bound: bool,
    /// `α <= g`, strictly when `g >= 2`.
    pub masser_bound: bool,
    pub lower_bound_2g_over_d: bool,
    /// `n(W) <= 2^(dim W - 1)` on every flat visited.
    pub c1new_all_subspaces: bool,
    pub mod2_distinct: bool,
    /// `α = a/b` for some `2 <= a <= 2g`, `1 <= b <= d`.
    pub rational_form: bool,
    /// `d >= 2 + log2 g`; primitive single factors only.
    pub ribet_dim_bound: Option<bool>,
    /// `g` prime forces `δ = 0`; primitive single factors only.
    pub prime_g_nondegenerate: Option<bool>,
    pub shortcut_agrees: Option<bool>,
}

impl BoundChecks {
    pub fn all_pass(&self) -> bool {
        self.named().iter().all(|(_, v)| v.unwrap_or(true))
    }

    /// `(name, result)` pairs; `None` where a check does not apply.
    pub fn named(&self) -> Vec<(&'static str, Option<bool>)> {
        vec![
            ("th2_bound", Some(self.th2_bound)),
            ("masser_bound", Some(self.masser_bound)),
            ("lower_bound_2g_over_d", Some(self.lower_bound_2g_over_d)),
            ("c1new_all_subspaces", Some(self.c1new_all_subspaces)),
            ("mod2_distinct", Some(self.mod2_distinct)),
            ("rational_form", Some(self.rational_form)),
            ("ribet_dim_bound", self.ribet_dim_bound),
            ("prime_g_nondegenerate", self.prime_g_nondegenerate),
            ("shortcut_agrees", self.shortcut_agrees),
        ]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AlphaReport {
    #[serde(serialize_with = "crate::json::rational")]
    pub alpha: BigRational,
    #[serde(serialize_with = "crate::json::rational")]
    pub gamma: BigRational,
    pub witness: SubspaceWitness,
    pub g: usize,
    pub d: usize,
    pub defect: i64,
    /// Set for a single factor on `G/{e}`.
    pub primitive: Option<bool>,
    pub mod2_distinct: bool,
    pub shortcut_used: Shortcut,
    #[serde(serialize_with = "crate::json::opt_rational")]
    pub shortcut_value: Option<BigRational>,
    pub search: SearchStats,
    pub bound_checks: Option<BoundChecks>,
}

fn ratio(a: usize, b: usize) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn primitive_single(cs: &CharacterSystem) -> Option<bool> {
    match cs.datum().factors() {
        [t] => Some(crate::cm::is_primitive(t)),
        _ => None,
    }
}

/// Closed-form value of `α` when one applies.
pub fn shortcut_alpha(cls: &Classification, cs: &CharacterSystem) -> Option<(Shortcut, BigRational)> {
    let two_g_over_d = ratio(2 * cls.g, cls.d);
    if cls.nondegenerate {
        return Some((Shortcut::Nondegenerate, two_g_over_d));
    }
    if primitive_single(cs) != Some(true) {
        return None;
    }
    if cls.defect_one {
        return Some((Shortcut::DefectOne, BigRational::from_integer(2.into())));
    }
    if cls.g <= 7 {
        return Some((Shortcut::PrimitiveSmallDimension, two_g_over_d));
    }
    None
}

/// `α` by pruned search, without the bound checks.
pub fn alpha_exact(cs: &CharacterSystem) -> AlphaReport {
    alpha_exact_with(cs, SearchConfig::default())
}

pub fn alpha_exact_with(cs: &CharacterSystem, cfg: SearchConfig) -> AlphaReport {
    let out = search(cs, cfg);
    let cls = classify(cs);
    let shortcut = shortcut_alpha(&cls, cs);
    AlphaReport {
        alpha: out.witness.ratio.clone(),
        gamma: out.witness.ratio.clone(),
        witness: out.witness,
        g: cls.g,
        d: cls.d,
        defect: cls.defect,
        primitive: primitive_single(cs),
        mod2_distinct: check_mod2_distinct(cs),
        shortcut_used: shortcut.as_ref().map_or(Shortcut::None, |s| s.0),
        shortcut_value: shortcut.map(|s| s.1),
        search: out.stats,
        bound_checks: None,
    }
}

/// `α` plus every applicable inequality.
pub fn analyze(cs: &CharacterSystem, cfg: SearchConfig) -> AlphaReport {
    check_bounds(alpha_exact_with(cs, cfg))
}

/// `α <= 2g/(2 + log2 g)`, i.e. `g^p <= 2^(2gq - 2p)` for `α = p/q`.
pub fn th2_bound_holds(alpha: &BigRational, g: usize) -> bool {
    let p = alpha.numer();
    let q = alpha.denom();
    let e = BigInt::from(2 * g) * q - BigInt::from(2) * p;
    if e < BigInt::zero() {
        return false;
    }
    let (Some(p), Some(e)) = (p.to_u32(), e.to_u32()) else {
        return false;
    };
    BigUint::from(g).pow(p) <= BigUint::one() << e
}

/// `d >= 2 + log2 g`, i.e. `2^(d-2) >= g`.
pub fn ribet_dim_bound_holds(g: usize, d: usize) -> bool {
    d >= 2 && BigUint::one() << (d - 2) >= BigUint::from(g)
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}

/// Some scaling `k·a / k·b` of `α` has `2 <= k·a <= 2g` and `k·b <= d`.
pub fn rational_form_holds(alpha: &BigRational, g: usize, d: usize) -> bool {
    let (Some(a), Some(b)) = (alpha.numer().to_usize(), alpha.denom().to_usize()) else {
        return false;
    };
    a > 0 && (1..).take_while(|k| k * a <= 2 * g && k * b <= d).any(|k| k * a >= 2)
}

pub fn check_bounds(mut report: AlphaReport) -> AlphaReport {
    let g = report.g;
    let d = report.d;
    let alpha = &report.alpha;
    let g_q = BigRational::from_integer(BigInt::from(g));
    let masser = if g >= 2 { *alpha < g_q } else { *alpha <= g_q };
    let primitive = report.primitive == Some(true);
    report.bound_checks = Some(BoundChecks {
        th2_bound: th2_bound_holds(alpha, g),
        masser_bound: masser,
        lower_bound_2g_over_d: *alpha >= ratio(2 * g, d),
        c1new_all_subspaces: report.search.bound_violations == 0,
        mod2_distinct: report.mod2_distinct,
        rational_form: rational_form_holds(alpha, g, d),
        ribet_dim_bound: primitive.then(|| ribet_dim_bound_holds(g, d)),
        prime_g_nondegenerate: (primitive && is_prime(g)).then_some(report.defect == 0),
        shortcut_agrees: report.shortcut_value.as_ref().map(|v| v == alpha),
    });
    report
}

/// `γ(A^n) = n·γ(A)`.
pub fn alpha_power(alpha: &BigRational, n: u32) -> Result<BigRational, AlphaError> {
    if n == 0 {
        return Err(AlphaError::ZeroPower);
    }
    Ok(alpha * BigInt::from(n))
}

/// Bounds on `α` of `Π A_i^{n_i}` from the square-free pieces.
#[derive(Clone, Debug, Serialize)]
pub struct ProductEnvelope {
    /// `max_S (min_{i∈S} n_i)·α(Π_{i∈S} A_i)`.
    #[serde(serialize_with = "crate::json::rational")]
    pub lower: BigRational,
    pub lower_subset: Vec<usize>,
    /// `Σ n_i α(A_i)`.
    #[serde(serialize_with = "crate::json::rational")]
    pub upper: BigRational,
    #[serde(serialize_with = "crate::json::rationals")]
    pub factor_alphas: Vec<BigRational>,
    /// `max_S 2·Σ_{i∈S} n_i g_i / d_S`; an open guess, never a check.
    #[serde(serialize_with = "crate::json::rational")]
    pub question2: BigRational,
    pub question2_subset: Vec<usize>,
    pub question2_status: &'static str,
}

const MAX_ENVELOPE_FACTORS: usize = 16;

/// Envelope for the datum's factors taken with the given multiplicities.
pub fn product_envelope(datum: &CmDatum, multiplicities: &[u32], cfg: SearchConfig) -> Result<ProductEnvelope, AlphaError> {
    let r = datum.factors().len();
    if multiplicities.len() != r {
        return Err(AlphaError::LengthMismatch);
    }
    if r == 0 {
        return Err(AlphaError::Empty);
    }
    if r > MAX_ENVELOPE_FACTORS {
        return Err(AlphaError::TooManyFactors(r));
    }
    if multiplicities.contains(&0) {
        return Err(AlphaError::NotPositive);
    }
    let subsets: Vec<Vec<usize>> = (1..1usize << r)
        .map(|mask| (0..r).filter(|i| mask >> i & 1 == 1).collect())
        .collect();
    let systems = cfg.exec.map(&subsets, |s| {
        CharacterSystem::build(&datum.select_factors(s)).map(|cs| {
            let a = search(&cs, SearchConfig { exec: crate::exec::Execution::Sequential, ..cfg });
            (a.witness.ratio, cs.g(), cs.d())
        })
    });
    let mut results = Vec::with_capacity(systems.len());
    for s in systems {
        results.push(s?);
    }

    let mut factor_alphas = vec![BigRational::zero(); r];
    let mut lower: Option<(BigRational, &[usize])> = None;
    let mut q2: Option<(BigRational, &[usize])> = None;
    for (s, (alpha, _, d)) in subsets.iter().zip(&results) {
        if let [i] = s.as_slice() {
            factor_alphas[*i] = alpha.clone();
        }
        let nmin = s.iter().map(|&i| multiplicities[i]).min().expect("nonempty");
        let lo = alpha * BigInt::from(nmin);
        if lower.as_ref().is_none_or(|(v, _)| lo > *v) {
            lower = Some((lo, s));
        }
        let weighted: usize = s
            .iter()
            .map(|&i| multiplicities[i] as usize * datum.factors()[i].g())
            .sum();
        let q = ratio(2 * weighted, *d);
        if q2.as_ref().is_none_or(|(v, _)| q > *v) {
            q2 = Some((q, s));
        }
    }
    let upper = factor_alphas
        .iter()
        .zip(multiplicities)
        .map(|(a, &n)| a * BigInt::from(n))
        .fold(BigRational::zero(), |acc, x| acc + x);
    let (lower, lower_subset) = lower.expect("at least one subset");
    let (question2, q2_subset) = q2.expect("at least one subset");
    Ok(ProductEnvelope {
        lower,
        lower_subset: lower_subset.to_vec(),
        upper,
        factor_alphas,
        question2,
        question2_subset: q2_subset.to_vec(),
        question2_status: "conjectural",
    })
}

/// `Σ n_i b_i / Σ n_i w_i <= max_k (b_1+..+b_k)/(w_1+..+w_k)` for weakly
/// decreasing positive `n`.
pub fn abel_inequality_check(n: &[u64], b: &[u64], w: &[u64]) -> Result<bool, AlphaError> {
    if n.len() != b.len() || n.len() != w.len() {
        return Err(AlphaError::LengthMismatch);
    }
    if n.is_empty() {
        return Err(AlphaError::Empty);
    }
    if n.iter().chain(b).chain(w).any(|&x| x == 0) {
        return Err(AlphaError::NotPositive);
    }
    if n.windows(2).any(|p| p[0] < p[1]) {
        return Err(AlphaError::NotDecreasing);
    }
    let big = |x: u64| BigInt::from(x);
    let num: BigInt = n.iter().zip(b).map(|(&x, &y)| big(x) * big(y)).sum();
    let den: BigInt = n.iter().zip(w).map(|(&x, &y)| big(x) * big(y)).sum();
    let lhs = BigRational::new(num, den);
    let (mut bs, mut ws) = (BigInt::zero(), BigInt::zero());
    let mut best: Option<BigRational> = None;
    for (&bi, &wi) in b.iter().zip(w) {
        bs += big(bi);
        ws += big(wi);
        let q = BigRational::new(bs.clone(), ws.clone());
        if best.as_ref().is_none_or(|m| q > *m) {
            best = Some(q);
        }
    }
    Ok(lhs <= best.expect("nonempty"))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::cm::{CmType, CosetSpace};
    use crate::group::FiniteGroup;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn regular(inv: &[u64], conj: usize, phi: &[usize]) -> CharacterSystem {
        let g = Arc::new(FiniteGroup::abelian(inv).unwrap());
        CharacterSystem::build(&CmDatum::regular(g, conj, phi).unwrap()).unwrap()
    }

    #[test]
    fn elliptic_and_quartic_reports() {
        let e = analyze(&regular(&[2], 1, &[0]), SearchConfig::default());
        assert_eq!((e.alpha.clone(), e.d, e.defect), (q(1, 1), 2, 0));
        assert_eq!(e.shortcut_used, Shortcut::Nondegenerate);
        assert!(e.bound_checks.as_ref().unwrap().all_pass());

        let r = analyze(&regular(&[4], 2, &[0, 1]), SearchConfig::default());
        assert_eq!(r.alpha, q(4, 3));
        assert_eq!(r.gamma, q(4, 3));
        let checks = r.bound_checks.unwrap();
        assert!(checks.all_pass());
        assert_eq!(checks.ribet_dim_bound, Some(true));
        assert_eq!(checks.prime_g_nondegenerate, Some(true));
    }

    #[test]
    fn th2_examples() {
        // g = 2: 4/(2+1) = 4/3 attained
        assert!(th2_bound_holds(&q(4, 3), 2));
        assert!(!th2_bound_holds(&q(3, 2), 2));
        assert!(th2_bound_holds(&q(1, 1), 1));
        // g = 3: bound 6/(2+log2 3) ≈ 1.6737
        assert!(th2_bound_holds(&q(5, 3), 3));
        assert!(!th2_bound_holds(&q(27, 16), 3));
        // g = 4: 8/4 = 2
        assert!(th2_bound_holds(&q(2, 1), 4));
        assert!(!th2_bound_holds(&q(201, 100), 4));
    }

    #[test]
    fn ribet_and_rational_form() {
        assert!(ribet_dim_bound_holds(4, 4));
        assert!(!ribet_dim_bound_holds(5, 4));
        assert!(ribet_dim_bound_holds(1, 2));
        assert!(rational_form_holds(&q(1, 1), 1, 2));
        assert!(rational_form_holds(&q(4, 3), 2, 3));
        assert!(!rational_form_holds(&q(4, 3), 2, 2));
        assert!(!rational_form_holds(&q(5, 1), 2, 3));
    }

    #[test]
    fn power_examples() {
        assert_eq!(alpha_power(&q(1, 1), 3).unwrap(), q(3, 1));
        assert_eq!(alpha_power(&q(4, 3), 1).unwrap(), q(4, 3));
        assert_eq!(alpha_power(&q(4, 3), 2).unwrap(), q(8, 3));
        assert_eq!(alpha_power(&q(4, 3), 0), Err(AlphaError::ZeroPower));
    }

    #[test]
    fn abel_examples() {
        assert_eq!(abel_inequality_check(&[1], &[5], &[2]), Ok(true));
        assert_eq!(abel_inequality_check(&[3, 1], &[1, 4], &[1, 1]), Ok(true));
        assert_eq!(abel_inequality_check(&[1, 3], &[1, 4], &[1, 1]), Err(AlphaError::NotDecreasing));
        assert_eq!(abel_inequality_check(&[1], &[1, 2], &[1]), Err(AlphaError::LengthMismatch));
        assert_eq!(abel_inequality_check(&[], &[], &[]), Err(AlphaError::Empty));
    }

    fn two_elliptic_curves() -> CmDatum {
        let k = Arc::new(FiniteGroup::abelian(&[2, 2]).unwrap());
        let s1 = CosetSpace::new(k.clone(), &[0, 2]).unwrap();
        let s2 = CosetSpace::new(k.clone(), &[0, 1]).unwrap();
        CmDatum::new(k, 3, vec![CmType::new(s1, vec![0]), CmType::new(s2, vec![0])])
    }

    #[test]
    fn joint_elliptic_system() {
        let datum = two_elliptic_curves();
        assert!(datum.is_valid());
        let cs = CharacterSystem::build(&datum).unwrap();
        assert_eq!((cs.g(), cs.d()), (2, 3));
        let r = analyze(&cs, SearchConfig::default());
        assert_eq!(r.alpha, q(4, 3));
        assert_eq!(r.primitive, None);
        assert_eq!(alpha_oracle(&cs, DEFAULT_ORACLE_CAP).unwrap(), q(4, 3));
    }

    #[test]
    fn envelope_examples() {
        let datum = two_elliptic_curves();
        let single = datum.select_factors(&[0]);
        let env = product_envelope(&single, &[1], SearchConfig::default()).unwrap();
        assert_eq!((env.lower.clone(), env.upper.clone()), (q(1, 1), q(1, 1)));

        let env = product_envelope(&datum, &[1, 1], SearchConfig::default()).unwrap();
        assert_eq!(env.lower, q(4, 3));
        assert_eq!(env.upper, q(2, 1));
        assert_eq!(env.question2, q(4, 3));
        assert_eq!(env.question2_status, "conjectural");

        // E_1 × E_0^{n_0}
        for n0 in 2..6u32 {
            let env = product_envelope(&datum, &[1, n0], SearchConfig::default()).unwrap();
            assert_eq!(env.lower, q(n0 as i64, 1));
            assert_eq!(env.upper, q(n0 as i64 + 1, 1));
        }
        assert_eq!(
            product_envelope(&datum, &[1], SearchConfig::default()).unwrap_err(),
            AlphaError::LengthMismatch
        );
    }

    #[test]
    fn repeated_factor_is_refused() {
        let e = CmDatum::regular(Arc::new(FiniteGroup::cyclic(2).unwrap()), 1, &[0]).unwrap();
        let twice = crate::cm::product(&[e.clone(), e]).unwrap();
        assert!(matches!(
            CharacterSystem::build(&twice),
            Err(TorusError::DuplicateCharacters { first: 0, second: 2 })
        ));
    }
}
