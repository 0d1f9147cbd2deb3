//! Exhaustive reference: every nonempty subset of characters, no pruning.
//!
//! Ranks come from a table over all `2^(2g)` subsets, filled along the
//! subset tree with a small-integer echelon basis. `n(span S)` is then the number
//! of characters whose addition leaves the rank unchanged.

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::linalg::{rank_of_rows, SmallEchelon};
use crate::torus::CharacterSystem;

pub const DEFAULT_ORACLE_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{characters} characters exceed the oracle cap of {cap}")]
    CapExceeded { characters: usize, cap: usize },
}

/// Result of the full subset scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleScan {
    pub alpha: BigRational,
    /// Subsets `S` with `n(span S) > 2^(rank S - 1)`.
    pub bound_violations: usize,
    pub subsets: usize,
}

fn fill(mask: usize, start: usize, basis: &SmallEchelon, vectors: &[Vec<i64>], table: &mut [u8]) -> Option<()> {
    for j in start..vectors.len() {
        let next = basis.with(&vectors[j])?;
        let m = mask | 1 << j;
        table[m] = next.dim() as u8;
        fill(m, j + 1, &next, vectors, table)?;
    }
    Some(())
}

/// Rank of every subset of `vectors`, indexed by bitmask.
pub fn rank_table(vectors: &[Vec<i64>]) -> Vec<u8> {
    let mut table = vec![0u8; 1 << vectors.len()];
    if fill(0, 0, &SmallEchelon::new(), vectors, &mut table).is_none() {
        for (mask, slot) in table.iter_mut().enumerate() {
            let rows: Vec<&[i64]> = (0..vectors.len())
                .filter(|j| mask >> j & 1 == 1)
                .map(|j| vectors[j].as_slice())
                .collect();
            *slot = rank_of_rows(&rows) as u8;
        }
    }
    table
}

pub fn alpha_oracle(cs: &CharacterSystem, cap: usize) -> Result<BigRational, OracleError> {
    Ok(oracle_scan(cs, cap)?.alpha)
}

/// Scans all nonempty subsets of the characters.
pub fn oracle_scan(cs: &CharacterSystem, cap: usize) -> Result<OracleScan, OracleError> {
    let m = cs.len();
    if m > cap || m >= usize::BITS as usize {
        return Err(OracleError::CapExceeded { characters: m, cap });
    }
    let table = rank_table(cs.characters());
    let (mut best_n, mut best_r) = (0usize, 1usize);
    let mut violations = 0;
    for mask in 1..table.len() {
        let r = table[mask] as usize;
        let n = (0..m).filter(|&j| table[mask | 1 << j] as usize == r).count();
        if n * best_r > best_n * r {
            (best_n, best_r) = (n, r);
        }
        if n > 1 << (r - 1) {
            violations += 1;
        }
    }
    Ok(OracleScan {
        alpha: BigRational::new(BigInt::from(best_n), BigInt::from(best_r)),
        bound_violations: violations,
        subsets: table.len() - 1,
    })
}
