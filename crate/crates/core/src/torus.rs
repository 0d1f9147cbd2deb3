//! The Mumford–Tate torus of a CM datum, seen through its characters.
//!
//! The cocharacter `μ` of a type `Φ` is the indicator of `Φ`; its translate
//! by `g` is the indicator of `gΦ`. Stacking these gives the orbit matrix:
//! row `g`, column `σ` holds `<χ_σ, gμ>`. Columns are the characters,
//! written as pairing vectors. Rows span the cocharacter lattice of the torus
//! once saturated.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::cm::{CmDatum, Violation};
use crate::linalg::{integer_kernel, rank, saturate, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorusError {
    #[error("invalid datum: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidDatum(Vec<Violation>),
    #[error("characters {first} and {second} coincide (repeated factor)")]
    DuplicateCharacters { first: usize, second: usize },
}

/// Where a character comes from: factor index and coset index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CharacterLabel {
    pub factor: usize,
    pub coset: usize,
}

#[derive(Clone, Debug)]
pub struct CharacterSystem {
    datum: CmDatum,
    g: usize,
    orbit: IntMatrix,
    columns: Vec<Vec<i64>>,
    labels: Vec<CharacterLabel>,
    conj_pairing: Vec<usize>,
    d: usize,
    cocharacters: IntMatrix,
    orbit_index: BigInt,
}

impl CharacterSystem {
    /// Builds the system for a valid datum with pairwise distinct characters.
    pub fn build(datum: &CmDatum) -> Result<Self, TorusError> {
        let violations = datum.validate();
        if !violations.is_empty() {
            return Err(TorusError::InvalidDatum(violations));
        }
        let group = datum.group();
        let n = group.order();
        let conj = datum.conj();
        let mut columns = Vec::new();
        let mut labels = Vec::new();
        let mut offsets = Vec::new();
        for (f, t) in datum.factors().iter().enumerate() {
            let space = t.space();
            offsets.push(columns.len());
            for sigma in 0..space.len() {
                let col: Vec<i64> = (0..n)
                    .map(|g| i64::from(t.contains(space.act(group.inv(g), sigma))))
                    .collect();
                columns.push(col);
                labels.push(CharacterLabel { factor: f, coset: sigma });
            }
        }
        let conj_pairing = labels
            .iter()
            .map(|l| {
                let space = datum.factors()[l.factor].space();
                offsets[l.factor] + space.act(conj, l.coset)
            })
            .collect();

        let mut seen: HashMap<&[i64], usize> = HashMap::new();
        for (j, c) in columns.iter().enumerate() {
            if let Some(&i) = seen.get(c.as_slice()) {
                return Err(TorusError::DuplicateCharacters { first: i, second: j });
            }
            seen.insert(c, j);
        }

        let m = columns.len();
        let rows: Vec<Vec<i64>> = (0..n).map(|g| columns.iter().map(|c| c[g]).collect()).collect();
        let orbit = IntMatrix::from_rows(&rows).expect("uniform rows");
        let d = rank(&orbit);
        let sat = saturate(&orbit);
        debug_assert_eq!(sat.basis.rows(), d);
        debug_assert_eq!(sat.basis.cols(), m);
        Ok(CharacterSystem {
            datum: datum.clone(),
            g: m / 2,
            orbit,
            columns,
            labels,
            conj_pairing,
            d,
            cocharacters: sat.basis,
            orbit_index: sat.index,
        })
    }

    pub fn datum(&self) -> &CmDatum {
        &self.datum
    }

    pub fn g(&self) -> usize {
        self.g
    }

    /// Dimension of the torus.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of characters, `2g`.
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// `|G|` rows, `2g` columns of pairings `<χ, gμ>`.
    pub fn orbit_matrix(&self) -> &IntMatrix {
        &self.orbit
    }

    /// Character `i` as its pairing vector (length `|G|`).
    pub fn character(&self, i: usize) -> &[i64] {
        &self.columns[i]
    }

    pub fn characters(&self) -> &[Vec<i64>] {
        &self.columns
    }

    pub fn labels(&self) -> &[CharacterLabel] {
        &self.labels
    }

    /// Index of the conjugate character.
    pub fn conjugate(&self, i: usize) -> usize {
        self.conj_pairing[i]
    }

    pub fn conj_pairing(&self) -> &[usize] {
        &self.conj_pairing
    }

    /// The common sum `χ + conj(χ)`.
    pub fn weight(&self) -> Vec<i64> {
        self.columns[0]
            .iter()
            .zip(&self.columns[self.conj_pairing[0]])
            .map(|(a, b)| a + b)
            .collect()
    }

    /// Basis (`d` rows of length `2g`) of the saturated cocharacter lattice.
    pub fn cocharacter_basis(&self) -> &IntMatrix {
        &self.cocharacters
    }

    /// Index of the lattice spanned by the orbit inside its saturation.
    pub fn orbit_saturation_index(&self) -> &BigInt {
        &self.orbit_index
    }

    /// Characters in coordinates dual to [`Self::cocharacter_basis`]:
    /// row `i` is `χ_i` as a vector in `Z^d`. These rows generate `Z^d`.
    pub fn lattice_characters(&self) -> IntMatrix {
        self.cocharacters.transpose()
    }

    /// Whether the datum is a single primitive factor.
    pub fn is_primitive_single(&self) -> bool {
        match self.datum.factors() {
            [t] => crate::cm::is_primitive(t),
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub g: usize,
    pub d: usize,
    pub defect: i64,
    pub nondegenerate: bool,
    pub defect_one: bool,
}

pub fn classify(cs: &CharacterSystem) -> Classification {
    classify_dims(cs.g, cs.d)
}

pub fn classify_dims(g: usize, d: usize) -> Classification {
    let defect = g as i64 + 1 - d as i64;
    Classification {
        g,
        d,
        defect,
        nondegenerate: defect == 0,
        defect_one: defect == 1,
    }
}

/// First pair of characters whose classes in `X*(T)/2X*(T)` agree.
pub fn mod2_collision(cs: &CharacterSystem) -> Option<(usize, usize)> {
    let chars = cs.lattice_characters();
    let reduced: Vec<Vec<bool>> = (0..chars.rows())
        .map(|i| chars.row(i).iter().map(|x| x.is_odd()).collect())
        .collect();
    for i in 0..reduced.len() {
        for j in i + 1..reduced.len() {
            if reduced[i] == reduced[j] {
                return Some((i, j));
            }
        }
    }
    None
}

/// Characters pairwise distinct modulo 2 in the character lattice.
pub fn check_mod2_distinct(cs: &CharacterSystem) -> bool {
    mod2_collision(cs).is_none()
}

/// Cocharacters killed by the chosen characters: a basis (rows in `Z^d`)
/// of `{y : χ_i(y) = 0 for i in indices}`.
pub fn perp_lattice(cs: &CharacterSystem, indices: &[usize]) -> IntMatrix {
    let chars = cs.lattice_characters().select_rows(indices);
    integer_kernel(&chars)
}

/// Characters (rows in `Z^d`) vanishing on every row of `cocharacters`.
pub fn annihilator(d: usize, cocharacters: &IntMatrix) -> IntMatrix {
    if cocharacters.rows() == 0 {
        return IntMatrix::identity(d);
    }
    integer_kernel(cocharacters)
}

/// Pairing-vector form of an integer character combination; exposed for
/// tests that compare coordinate systems.
pub fn pairing_of(cs: &CharacterSystem, coefficients: &[i64]) -> Vec<BigInt> {
    let n = cs.datum.group().order();
    let mut out = vec![BigInt::zero(); n];
    for (i, &a) in coefficients.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (o, &x) in out.iter_mut().zip(&cs.columns[i]) {
            *o += a * x;
        }
    }
    out
}

/// Lattice coordinates as machine integers, if they fit.
pub fn lattice_characters_i64(cs: &CharacterSystem) -> Option<Vec<Vec<i64>>> {
    let m = cs.lattice_characters();
    (0..m.rows())
        .map(|r| m.row(r).iter().map(|x| x.to_i64()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::group::FiniteGroup;
    use crate::linalg::{canonical_span, smith_normal_form, RatMatrix};

    fn elliptic() -> CmDatum {
        CmDatum::regular(Arc::new(FiniteGroup::cyclic(2).unwrap()), 1, &[0]).unwrap()
    }

    fn quartic() -> CmDatum {
        CmDatum::regular(Arc::new(FiniteGroup::cyclic(4).unwrap()), 2, &[0, 1]).unwrap()
    }

    #[test]
    fn elliptic_system() {
        let cs = CharacterSystem::build(&elliptic()).unwrap();
        assert_eq!(cs.characters(), &[vec![1, 0], vec![0, 1]]);
        assert_eq!(cs.d(), 2);
        assert_eq!(cs.weight(), vec![1, 1]);
        assert_eq!(cs.conj_pairing(), &[1, 0]);
    }

    #[test]
    fn quartic_system() {
        let cs = CharacterSystem::build(&quartic()).unwrap();
        // χ_σ(g) = 1 iff g ∈ {σ-1, σ}
        assert_eq!(
            cs.characters(),
            &[vec![1, 0, 0, 1], vec![1, 1, 0, 0], vec![0, 1, 1, 0], vec![0, 0, 1, 1]]
        );
        assert_eq!(cs.d(), 3);
        for i in 0..4 {
            let j = cs.conjugate(i);
            let s: Vec<i64> = cs.character(i).iter().zip(cs.character(j)).map(|(a, b)| a + b).collect();
            assert_eq!(s, vec![1; 4]);
        }
        assert_eq!(classify(&cs), classify_dims(2, 3));
        assert!(classify(&cs).nondegenerate);
    }

    #[test]
    fn imprimitive_type_repeats_characters() {
        let k = Arc::new(FiniteGroup::abelian(&[2, 2]).unwrap());
        let d = CmDatum::regular(k, 3, &[0, 2]).unwrap();
        assert_eq!(
            CharacterSystem::build(&d).unwrap_err(),
            TorusError::DuplicateCharacters { first: 0, second: 2 }
        );
    }

    #[test]
    fn invalid_datum_is_rejected() {
        let d = CmDatum::regular(Arc::new(FiniteGroup::cyclic(2).unwrap()), 1, &[0, 1]).unwrap();
        assert!(matches!(CharacterSystem::build(&d), Err(TorusError::InvalidDatum(_))));
    }

    #[test]
    fn classification_flags() {
        let c = classify_dims(1, 2);
        assert_eq!((c.defect, c.nondegenerate), (0, true));
        let c = classify_dims(4, 4);
        assert_eq!((c.defect, c.defect_one, c.nondegenerate), (1, true, false));
    }

    #[test]
    fn mod2_examples() {
        assert!(check_mod2_distinct(&CharacterSystem::build(&elliptic()).unwrap()));
        assert!(check_mod2_distinct(&CharacterSystem::build(&quartic()).unwrap()));
    }

    #[test]
    fn lattice_characters_generate() {
        let cs = CharacterSystem::build(&quartic()).unwrap();
        let chars = cs.lattice_characters();
        assert_eq!((chars.rows(), chars.cols()), (4, 3));
        let snf = smith_normal_form(&chars);
        assert!(snf.diag.iter().all(|x| *x == BigInt::from(1)));
        assert_eq!(snf.rank(), 3);
    }

    #[test]
    fn perp_examples() {
        let cs = CharacterSystem::build(&quartic()).unwrap();
        assert_eq!(perp_lattice(&cs, &[0, 1, 2, 3]).rows(), 0);
        assert_eq!(perp_lattice(&cs, &[0]).rows(), 2);
        let p = perp_lattice(&cs, &[0, 2]);
        assert_eq!(p.rows(), 1);
        let back = annihilator(3, &p);
        // saturated span of χ_0, χ_2 inside Z^3
        let span = saturate(&cs.lattice_characters().select_rows(&[0, 2])).basis;
        assert_eq!(crate::linalg::hermite_normal_form(&back), crate::linalg::hermite_normal_form(&span));
    }

    #[test]
    fn lattice_and_pairing_coordinates_agree_on_spans() {
        let cs = CharacterSystem::build(&quartic()).unwrap();
        let chars = cs.lattice_characters();
        let idx = [0usize, 2];
        let in_lattice = canonical_span(&RatMatrix::from(chars.select_rows(&idx)));
        let in_pairing = canonical_span(&RatMatrix::from_int_rows(&[cs.character(0).to_vec(), cs.character(2).to_vec()]).unwrap());
        for j in 0..4 {
            let a = in_lattice.contains_int(chars.row(j)).unwrap();
            let b = in_pairing.contains_int(&pairing_of(&cs, &unit(4, j))).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn structure_over_small_groups() {
        use crate::cm::{enumerate_types, Equivalence};
        for n in 2..=12usize {
            for group in crate::group::small_groups(n) {
                let group = Arc::new(group);
                for c in group.central_involutions() {
                    for t in enumerate_types(&group, c, Equivalence::Translation).unwrap() {
                        let datum = CmDatum::new(group.clone(), c, vec![t]);
                        let Ok(cs) = CharacterSystem::build(&datum) else {
                            assert!(!cs_primitive(&datum));
                            continue;
                        };
                        assert!(cs_primitive(&datum));
                        assert!(check_mod2_distinct(&cs), "{} c={c}", group.label());
                        assert!(cs.d() >= 2 && cs.d() <= cs.g() + 1);
                        for col in cs.characters() {
                            assert_eq!(col.iter().sum::<i64>() as usize, n / 2);
                        }
                    }
                }
            }
        }
    }

    fn cs_primitive(d: &CmDatum) -> bool {
        crate::cm::is_primitive(&d.factors()[0])
    }

    fn unit(n: usize, i: usize) -> Vec<i64> {
        let mut v = vec![0; n];
        v[i] = 1;
        v
    }
}
