//! Split-prime model of torsion fields at finite level.
//!
//! For a torus split at an odd prime `ℓ`, `T(Z/ℓ^n)` is `Hom(X*(T), (Z/ℓ^n)^×)`,
//! a product of `d` cyclic groups of order `(ℓ-1)ℓ^(n-1)`. A torsion subgroup
//! of split shape is cut out by characters `χ_i` with exponents `n_i`, and the
//! degree of its field is the size of the image of
//! `t ↦ (χ_i(t) mod ℓ^(n_i))_i`. That image is read off a Smith normal form;
//! no torus point is ever enumerated.

use std::io;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::alpha::SubspaceWitness;
use crate::exec::Execution;
use crate::linalg::{rank, saturate, smith_normal_form, IntMatrix};
use crate::torus::CharacterSystem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiniteLevelError {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("level must be at least 1")]
    ZeroLevel,
    #[error("expected {expected} exponents, found {found}")]
    SpecLength { expected: usize, found: usize },
    #[error("exponent {exponent} for character {index} exceeds level {level}")]
    ExponentAboveLevel { index: usize, exponent: u32, level: u32 },
    #[error("every exponent is zero")]
    EmptySpec,
    #[error("witness has dimension 0")]
    EmptyWitness,
}

pub fn is_odd_prime(p: u64) -> bool {
    p >= 3 && p % 2 == 1 && (3..).step_by(2).take_while(|k: &u64| k * k <= p).all(|k| !p.is_multiple_of(k))
}

/// `(Z/ℓ^n)^× ≅ Z/(ℓ-1) × Z/ℓ^(n-1)`, cyclic since `ℓ` is odd.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnitGroup {
    pub ell: u64,
    pub level: u32,
    #[serde(serialize_with = "crate::json::bigint")]
    pub tame_order: BigInt,
    #[serde(serialize_with = "crate::json::bigint")]
    pub wild_order: BigInt,
}

impl UnitGroup {
    pub fn new(ell: u64, level: u32) -> Result<Self, FiniteLevelError> {
        if !is_odd_prime(ell) {
            return Err(FiniteLevelError::NotOddPrime(ell));
        }
        if level == 0 {
            return Err(FiniteLevelError::ZeroLevel);
        }
        Ok(UnitGroup {
            ell,
            level,
            tame_order: BigInt::from(ell - 1),
            wild_order: BigInt::from(ell).pow(level - 1),
        })
    }

    pub fn order(&self) -> BigInt {
        &self.tame_order * &self.wild_order
    }
}

fn unit_order(ell: u64, n: u32) -> BigInt {
    BigInt::from(ell - 1) * BigInt::from(ell).pow(n - 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTorusModel {
    units: UnitGroup,
    d: usize,
    /// Row `i` is character `i` in a basis of `X*(T)`.
    characters: IntMatrix,
}

impl FiniteTorusModel {
    pub fn new(cs: &CharacterSystem, ell: u64, level: u32) -> Result<Self, FiniteLevelError> {
        Ok(FiniteTorusModel {
            units: UnitGroup::new(ell, level)?,
            d: cs.d(),
            characters: cs.lattice_characters(),
        })
    }

    /// A split torus of dimension `d` whose characters are the coordinates.
    pub fn standard(d: usize, ell: u64, level: u32) -> Result<Self, FiniteLevelError> {
        Ok(FiniteTorusModel {
            units: UnitGroup::new(ell, level)?,
            d,
            characters: IntMatrix::identity(d),
        })
    }

    pub fn ell(&self) -> u64 {
        self.units.ell
    }

    pub fn level(&self) -> u32 {
        self.units.level
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn unit_group(&self) -> &UnitGroup {
        &self.units
    }

    pub fn characters(&self) -> &IntMatrix {
        &self.characters
    }
}

/// `|T(Z/ℓ^n)| = ((ℓ-1)ℓ^(n-1))^d`.
pub fn torus_point_count(model: &FiniteTorusModel) -> BigInt {
    Pow::pow(model.units.order(), model.d)
}

/// `(1-1/ℓ)^d ℓ^(nd) <= count <= ℓ^(nd)`, cleared of denominators.
pub fn point_count_sandwich(model: &FiniteTorusModel, count: &BigInt) -> bool {
    let ell = BigInt::from(model.ell());
    let d = model.d;
    let top: BigInt = Pow::pow(&ell, model.level() as usize * d);
    let lower = Pow::pow(BigInt::from(model.ell() - 1), d) * &top;
    let scaled = Pow::pow(&ell, d) * count;
    lower <= scaled && *count <= top
}

/// Exponent `n_i` per character; the subgroup is `⊕ Z/ℓ^(n_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionSubgroupSpec {
    pub exponents: Vec<u32>,
}

impl TorsionSubgroupSpec {
    pub fn new(exponents: Vec<u32>) -> Self {
        TorsionSubgroupSpec { exponents }
    }

    /// Exponent `n` on the listed characters, 0 elsewhere.
    pub fn on(characters: usize, indices: &[usize], n: u32) -> Self {
        let mut exponents = vec![0; characters];
        for &i in indices {
            exponents[i] = n;
        }
        TorsionSubgroupSpec { exponents }
    }

    fn support(&self) -> Vec<usize> {
        (0..self.exponents.len()).filter(|&i| self.exponents[i] > 0).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteLevelReport {
    pub ell: u64,
    pub level: u32,
    pub exponents: Vec<u32>,
    /// `ℓ^(Σ n_i)`.
    #[serde(serialize_with = "crate::json::bigint")]
    pub subgroup_order: BigInt,
    /// Size of the image of `T(Z/ℓ^n)` under the chosen characters.
    #[serde(serialize_with = "crate::json::bigint")]
    pub degree: BigInt,
    /// Rank of the characters with `n_i > 0`.
    pub dim_w: usize,
    /// Number of characters with `n_i > 0`.
    pub n_w: usize,
    /// `E = Σ_k n^(k) w_k` over characters sorted by decreasing exponent,
    /// `w_k` the rank each one adds.
    pub staircase_exponent: u64,
    /// `Σ n_i / E`.
    #[serde(serialize_with = "crate::json::rational")]
    pub ratio_log: BigRational,
    /// Index of the lattice spanned by the chosen characters in its saturation.
    #[serde(serialize_with = "crate::json::bigint")]
    pub lattice_index: BigInt,
    /// `(ℓ-1)^r ℓ^(E-r) <= degree <= ℓ^E` with `r = dim_w`.
    pub bound_ok: bool,
    pub divides_point_count: bool,
    pub model: &'static str,
}

/// Exact degree and bookkeeping for one split torsion subgroup.
pub fn degree_of_subgroup(model: &FiniteTorusModel, spec: &TorsionSubgroupSpec) -> Result<FiniteLevelReport, FiniteLevelError> {
    let m = model.characters.rows();
    if spec.exponents.len() != m {
        return Err(FiniteLevelError::SpecLength {
            expected: m,
            found: spec.exponents.len(),
        });
    }
    for (index, &exponent) in spec.exponents.iter().enumerate() {
        if exponent > model.level() {
            return Err(FiniteLevelError::ExponentAboveLevel {
                index,
                exponent,
                level: model.level(),
            });
        }
    }
    let support = spec.support();
    if support.is_empty() {
        return Err(FiniteLevelError::EmptySpec);
    }
    let ell = model.ell();
    let a = model.characters.select_rows(&support);
    let k = support.len();
    let mut moduli = IntMatrix::zeros(k, k);
    let mut target = BigInt::one();
    for (r, &i) in support.iter().enumerate() {
        let n_i = unit_order(ell, spec.exponents[i]);
        target *= &n_i;
        moduli.set(r, r, n_i);
    }
    let presentation = a.hstack(&moduli).expect("same row count");
    let cokernel = smith_normal_form(&presentation).index();
    let degree = target / cokernel;

    let total: u64 = spec.exponents.iter().map(|&x| u64::from(x)).sum();
    let subgroup_order = Pow::pow(BigInt::from(ell), total);

    let mut order = support.clone();
    order.sort_by_key(|&i| std::cmp::Reverse(spec.exponents[i]));
    let mut staircase = 0u64;
    let mut prev_rank = 0;
    for j in 1..=order.len() {
        let r = rank(&model.characters.select_rows(&order[..j]));
        staircase += u64::from(spec.exponents[order[j - 1]]) * (r - prev_rank) as u64;
        prev_rank = r;
    }
    let dim_w = prev_rank;

    let ell_big = BigInt::from(ell);
    let upper: BigInt = Pow::pow(&ell_big, staircase);
    let lower = Pow::pow(BigInt::from(ell - 1), dim_w) * Pow::pow(&ell_big, staircase - dim_w as u64);
    let count = torus_point_count(model);
    Ok(FiniteLevelReport {
        ell,
        level: model.level(),
        exponents: spec.exponents.clone(),
        subgroup_order,
        bound_ok: lower <= degree && degree <= upper,
        divides_point_count: count.is_multiple_of(&degree),
        degree,
        dim_w,
        n_w: k,
        staircase_exponent: staircase,
        ratio_log: BigRational::new(BigInt::from(total), BigInt::from(staircase)),
        lattice_index: saturate(&a).index,
        model: "split",
    })
}

/// `ln x` for display; exact comparisons never go through this.
pub fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap_or(f64::NAN).ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Whether `ln s / ln d` lies within relative tolerance `tol` of `target`:
/// `d^(p(b-a)) <= s^(qb) <= d^(p(b+a))` for `target = p/q`, `tol = a/b`.
pub fn estimate_within(s: &BigInt, d: &BigInt, target: &BigRational, tol: &BigRational) -> bool {
    if *d <= BigInt::one() || *s < BigInt::one() || *target <= BigRational::zero() || *tol < BigRational::zero() {
        return false;
    }
    let (p, q) = (target.numer(), target.denom());
    let (a, b) = (tol.numer(), tol.denom());
    let (Some(lo), Some(mid), Some(hi)) = (
        (p * (b - a)).to_u64(),
        (q * b).to_u64(),
        (p * (b + a)).to_u64(),
    ) else {
        return false;
    };
    let s = s.to_biguint().expect("positive");
    let d = d.to_biguint().expect("positive");
    let pow = |x: &BigUint, e: u64| -> BigUint { Pow::pow(x, e) };
    let sm = pow(&s, mid);
    if a >= b {
        return sm <= pow(&d, hi);
    }
    pow(&d, lo) <= sm && sm <= pow(&d, hi)
}

/// `log(subgroup order) / log(degree)` carried as the integer pair plus a
/// decimal rendering.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogRatio {
    #[serde(serialize_with = "crate::json::bigint")]
    pub log_of: BigInt,
    #[serde(serialize_with = "crate::json::bigint")]
    pub over_log_of: BigInt,
    pub decimal: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub ell: u64,
    pub level: u32,
    #[serde(serialize_with = "crate::json::bigint")]
    pub subgroup_order: BigInt,
    #[serde(serialize_with = "crate::json::bigint")]
    pub degree: BigInt,
    pub dim_w: usize,
    pub n_w: usize,
    pub estimate: LogRatio,
    pub bound_ok: bool,
    /// The estimate is within 1% of `n(W)/dim W`.
    pub within_one_percent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepTable {
    #[serde(serialize_with = "crate::json::rational")]
    pub target: BigRational,
    pub rows: Vec<SweepRow>,
    /// Distance of the decimal estimate to the target never grows with `ℓ`.
    pub monotone: bool,
    pub model: &'static str,
}

impl SweepTable {
    pub fn all_bounds_ok(&self) -> bool {
        self.rows.iter().all(|r| r.bound_ok)
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["ell", "n", "subgroup_order", "degree", "dim_W", "n_W", "estimate_decimal", "bound_ok"])?;
        for r in &self.rows {
            w.write_record([
                r.ell.to_string(),
                r.level.to_string(),
                r.subgroup_order.to_string(),
                r.degree.to_string(),
                r.dim_w.to_string(),
                r.n_w.to_string(),
                r.estimate.decimal.clone(),
                r.bound_ok.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Exponent `level` on every character of the witness, one row per prime,
/// rows in the order the primes are given.
pub fn exponent_sweep(
    cs: &CharacterSystem,
    witness: &SubspaceWitness,
    primes: &[u64],
    level: u32,
    exec: Execution,
) -> Result<SweepTable, FiniteLevelError> {
    if witness.dim == 0 {
        return Err(FiniteLevelError::EmptyWitness);
    }
    let target = witness.ratio.clone();
    let tol = BigRational::new(BigInt::one(), BigInt::from(100));
    let spec = TorsionSubgroupSpec::on(cs.len(), &witness.generating_indices, level);
    let rows = exec.map(primes, |&ell| -> Result<SweepRow, FiniteLevelError> {
        let model = FiniteTorusModel::new(cs, ell, level)?;
        let rep = degree_of_subgroup(&model, &spec)?;
        let est = ln_big(&rep.subgroup_order) / ln_big(&rep.degree);
        Ok(SweepRow {
            ell,
            level,
            within_one_percent: estimate_within(&rep.subgroup_order, &rep.degree, &target, &tol),
            estimate: LogRatio {
                log_of: rep.subgroup_order.clone(),
                over_log_of: rep.degree.clone(),
                decimal: format!("{est:.6}"),
            },
            subgroup_order: rep.subgroup_order,
            degree: rep.degree,
            dim_w: rep.dim_w,
            n_w: rep.n_w,
            bound_ok: rep.bound_ok,
        })
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let t = target.numer().to_f64().unwrap_or(f64::NAN) / target.denom().to_f64().unwrap_or(f64::NAN);
    let mut by_ell: Vec<(u64, f64)> = rows
        .iter()
        .map(|r| (r.ell, (ln_big(&r.subgroup_order) / ln_big(&r.degree) - t).abs()))
        .collect();
    by_ell.sort_by_key(|x| x.0);
    let monotone = by_ell.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12);
    Ok(SweepTable {
        target,
        rows,
        monotone,
        model: "split",
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::cm::CmDatum;
    use crate::group::FiniteGroup;

    fn quartic() -> CharacterSystem {
        let g = Arc::new(FiniteGroup::cyclic(4).unwrap());
        CharacterSystem::build(&CmDatum::regular(g, 2, &[0, 1]).unwrap()).unwrap()
    }

    fn elliptic() -> CharacterSystem {
        let g = Arc::new(FiniteGroup::cyclic(2).unwrap());
        CharacterSystem::build(&CmDatum::regular(g, 1, &[0]).unwrap()).unwrap()
    }

    #[test]
    fn point_count_examples() {
        let m = FiniteTorusModel::standard(3, 5, 1).unwrap();
        assert_eq!(torus_point_count(&m), BigInt::from(64));
        let m = FiniteTorusModel::standard(1, 3, 2).unwrap();
        assert_eq!(torus_point_count(&m), BigInt::from(6));
        let m = FiniteTorusModel::standard(0, 11, 1).unwrap();
        assert_eq!(torus_point_count(&m), BigInt::one());
        assert!(point_count_sandwich(&m, &BigInt::one()));
    }

    #[test]
    fn primes_are_checked() {
        assert_eq!(UnitGroup::new(2, 1), Err(FiniteLevelError::NotOddPrime(2)));
        assert_eq!(UnitGroup::new(9, 1), Err(FiniteLevelError::NotOddPrime(9)));
        assert_eq!(UnitGroup::new(7, 0), Err(FiniteLevelError::ZeroLevel));
        let u = UnitGroup::new(7, 3).unwrap();
        assert_eq!((u.tame_order.clone(), u.wild_order.clone()), (BigInt::from(6), BigInt::from(49)));
    }

    #[test]
    fn quartic_degrees() {
        let cs = quartic();
        let m = FiniteTorusModel::new(&cs, 5, 1).unwrap();
        let all = degree_of_subgroup(&m, &TorsionSubgroupSpec::new(vec![1; 4])).unwrap();
        assert_eq!(all.degree, BigInt::from(64));
        assert_eq!(all.subgroup_order, BigInt::from(625));
        assert_eq!((all.dim_w, all.n_w, all.staircase_exponent), (3, 4, 3));
        assert_eq!(all.ratio_log, BigRational::new(4.into(), 3.into()));
        assert!(all.bound_ok && all.divides_point_count);

        let one = degree_of_subgroup(&m, &TorsionSubgroupSpec::new(vec![1, 0, 0, 0])).unwrap();
        assert_eq!(one.degree, BigInt::from(4));
    }

    #[test]
    fn elliptic_level_two() {
        let cs = elliptic();
        let m = FiniteTorusModel::new(&cs, 7, 2).unwrap();
        let r = degree_of_subgroup(&m, &TorsionSubgroupSpec::new(vec![2, 2])).unwrap();
        assert_eq!(r.degree, BigInt::from(1764));
        assert_eq!(r.subgroup_order, BigInt::from(2401));
    }

    #[test]
    fn spec_errors() {
        let cs = quartic();
        let m = FiniteTorusModel::new(&cs, 5, 1).unwrap();
        assert_eq!(
            degree_of_subgroup(&m, &TorsionSubgroupSpec::new(vec![0; 4])),
            Err(FiniteLevelError::EmptySpec)
        );
        assert!(matches!(
            degree_of_subgroup(&m, &TorsionSubgroupSpec::new(vec![2, 0, 0, 0])),
            Err(FiniteLevelError::ExponentAboveLevel { .. })
        ));
        assert!(matches!(
            degree_of_subgroup(&m, &TorsionSubgroupSpec::new(vec![1])),
            Err(FiniteLevelError::SpecLength { .. })
        ));
    }

    #[test]
    fn estimate_tolerance() {
        let q = BigRational::new(4.into(), 3.into());
        let pct = BigRational::new(1.into(), 100.into());
        let s = Pow::pow(BigInt::from(101), 4u32);
        let d = Pow::pow(BigInt::from(100), 3u32);
        assert!(estimate_within(&s, &d, &q, &pct));
        let tight = BigRational::new(1.into(), 1000.into());
        assert!(!estimate_within(&s, &d, &q, &tight));
        assert!(!estimate_within(&BigInt::from(625), &BigInt::from(64), &q, &pct));
    }

    #[test]
    fn ln_of_large_numbers() {
        let x = Pow::pow(BigInt::from(10), 400u32);
        assert!((ln_big(&x) - 400.0 * 10f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn sweep_csv_shape() {
        let cs = quartic();
        let w = crate::alpha::search(&cs, Default::default()).witness;
        let t = exponent_sweep(&cs, &w, &[5, 13, 101], 1, Execution::Sequential).unwrap();
        assert!(t.monotone && t.all_bounds_ok());
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("ell,n,subgroup_order,degree,dim_W,n_W,estimate_decimal,bound_ok"));
        assert!(lines.next().unwrap().starts_with("5,1,625,64,3,4,"));
    }
}
