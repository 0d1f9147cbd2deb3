use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use cm_torsion::alpha::{alpha_oracle, analyze, search, SearchConfig};
use cm_torsion::cm::{is_primitive, CmDatum, CmType, CosetSpace};
use cm_torsion::exec::Execution;
use cm_torsion::finite_level::{degree_of_subgroup, torus_point_count, FiniteTorusModel, TorsionSubgroupSpec};
use cm_torsion::group::FiniteGroup;
use cm_torsion::linalg::{
    canonical_span, hermite_normal_form, integer_kernel, rank, rank_of_rows, saturate, smith_normal_form, IntMatrix,
    RatMatrix, SmallEchelon,
};
use cm_torsion::torus::{annihilator, CharacterSystem};

fn matrix(max_rows: usize, max_cols: usize, bound: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(move |(r, c)| {
        prop::collection::vec(prop::collection::vec(-bound..=bound, c), r)
    })
}

fn int(rows: &[Vec<i64>]) -> IntMatrix {
    IntMatrix::from_rows(rows).unwrap()
}

/// A single-factor datum on `Z/n` (n even) with `phi` chosen by `mask`.
fn cyclic_datum(n: u64, mask: u64) -> CmDatum {
    let g = Arc::new(FiniteGroup::cyclic(n).unwrap());
    let c = (n / 2) as usize;
    let phi: Vec<usize> = (0..c).map(|x| if mask >> x & 1 == 1 { x + c } else { x }).collect();
    CmDatum::regular(g, c, &phi).unwrap()
}

proptest! {
    #[test]
    fn smith_diagonal_divides(rows in matrix(4, 4, 9)) {
        let m = int(&rows);
        let s = smith_normal_form(&m);
        prop_assert_eq!(s.rank(), rank(&m));
        for w in s.diag.windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
        prop_assert!(s.diag.iter().all(|x| x.is_positive()));
        // U m V = diag
        let prod = s.left.mul(&m).unwrap().mul(&s.right).unwrap();
        prop_assert_eq!(prod, s.diag_matrix());
    }

    #[test]
    fn smith_index_is_determinant(rows in matrix(3, 3, 6).prop_filter("square", |r| r.len() == r[0].len())) {
        let m = int(&rows);
        let det = m.det().unwrap();
        let s = smith_normal_form(&m);
        if det.is_zero() {
            prop_assert!(s.rank() < rows.len());
        } else {
            prop_assert_eq!(s.index(), det.abs());
        }
    }

    #[test]
    fn hermite_is_idempotent_and_keeps_rank(rows in matrix(4, 5, 9)) {
        let m = int(&rows);
        let h = hermite_normal_form(&m);
        prop_assert_eq!(rank(&h), rank(&m));
        prop_assert_eq!(hermite_normal_form(&h), h);
    }

    #[test]
    fn kernel_is_annihilated(rows in matrix(3, 5, 6)) {
        let m = int(&rows);
        let k = integer_kernel(&m);
        prop_assert_eq!(k.rows(), m.cols() - rank(&m));
        if k.rows() > 0 {
            prop_assert!(m.mul(&k.transpose()).unwrap().is_zero());
            prop_assert_eq!(saturate(&k).index, BigInt::one());
        }
    }

    #[test]
    fn saturation_is_idempotent(rows in matrix(3, 4, 9)) {
        let m = int(&rows);
        let s = saturate(&m);
        let again = saturate(&s.basis);
        prop_assert_eq!(again.index, BigInt::one());
        prop_assert_eq!(hermite_normal_form(&again.basis), hermite_normal_form(&s.basis));
        prop_assert_eq!(s.basis.rows(), rank(&m));
    }

    #[test]
    fn double_annihilator_is_saturation(rows in matrix(3, 4, 9)) {
        let m = int(&rows);
        let once = annihilator(m.cols(), &m);
        let twice = annihilator(m.cols(), &once);
        let sat = saturate(&m).basis;
        prop_assert_eq!(hermite_normal_form(&twice), hermite_normal_form(&sat));
    }

    #[test]
    fn canonical_span_is_canonical(rows in matrix(4, 4, 5), seed in any::<u64>()) {
        let q = RatMatrix::from_int_rows(&rows).unwrap();
        let w = canonical_span(&q);
        prop_assert_eq!(w.dim(), rank(&int(&rows)));
        prop_assert_eq!(canonical_span(&w.basis()), w.clone());
        let mut shuffled = rows.clone();
        let n = shuffled.len();
        for i in 0..n {
            shuffled.swap(i, (seed as usize).wrapping_add(i * 7) % n);
        }
        prop_assert_eq!(canonical_span(&RatMatrix::from_int_rows(&shuffled).unwrap()), w);
    }

    #[test]
    fn membership_matches_rank(rows in matrix(3, 4, 4), v in prop::collection::vec(-4i64..=4, 4)) {
        let rows: Vec<Vec<i64>> = rows.into_iter().map(|mut r| { r.resize(4, 0); r }).collect();
        let w = canonical_span(&RatMatrix::from_int_rows(&rows).unwrap());
        let big: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        let mut with = rows.clone();
        with.push(v.clone());
        let expected = rank_of_rows(&with.iter().map(Vec::as_slice).collect::<Vec<_>>()) == w.dim();
        prop_assert_eq!(w.contains_int(&big).unwrap(), expected);
        let mut e = SmallEchelon::new();
        for r in &rows {
            e = e.with(r).unwrap();
        }
        prop_assert_eq!(e.dim(), w.dim());
        prop_assert_eq!(e.contains(&v), Some(expected));
    }

    #[test]
    fn search_agrees_with_oracle(half in 1u64..=5, mask in any::<u64>()) {
        let datum = cyclic_datum(2 * half, mask);
        prop_assume!(is_primitive(&datum.factors()[0]));
        let cs = CharacterSystem::build(&datum).unwrap();
        let exact = search(&cs, SearchConfig { prune: true, exec: Execution::Sequential }).witness.ratio;
        let unpruned = search(&cs, SearchConfig { prune: false, exec: Execution::Parallel }).witness.ratio;
        prop_assert_eq!(&exact, &unpruned);
        prop_assert_eq!(alpha_oracle(&cs, 12).unwrap(), exact);
        let r = analyze(&cs, SearchConfig::default());
        prop_assert!(r.bound_checks.unwrap().all_pass());
    }

    #[test]
    fn translation_leaves_alpha_unchanged(half in 1u64..=6, mask in any::<u64>(), shift in 0usize..12) {
        let datum = cyclic_datum(2 * half, mask);
        let t = &datum.factors()[0];
        prop_assume!(is_primitive(t));
        let moved = t.translate(shift % (2 * half as usize));
        let a = analyze(&CharacterSystem::build(&datum).unwrap(), SearchConfig::default()).alpha;
        let b = analyze(&CharacterSystem::build(&datum.with_factor(0, moved)).unwrap(), SearchConfig::default()).alpha;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn degrees_divide_point_counts(exps in prop::collection::vec(0u32..=2, 4), ell in prop::sample::select(vec![3u64, 5, 7, 11])) {
        prop_assume!(exps.iter().any(|&e| e > 0));
        let cs = CharacterSystem::build(&cyclic_datum(4, 0)).unwrap();
        let model = FiniteTorusModel::new(&cs, ell, 2).unwrap();
        let rep = degree_of_subgroup(&model, &TorsionSubgroupSpec::new(exps)).unwrap();
        prop_assert!(rep.divides_point_count);
        prop_assert!((torus_point_count(&model) % &rep.degree).is_zero());
    }
}

#[test]
fn regular_space_matches_group() {
    let g = Arc::new(FiniteGroup::cyclic(6).unwrap());
    let s = CosetSpace::regular(g.clone());
    assert_eq!(s.len(), 6);
    let t = CmType::from_elements(s, &[0, 1, 2]).unwrap();
    assert!(is_primitive(&t));
}
