use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{IntMatrix, LinalgError};

/// Dense rational matrix. `BigRational` keeps every entry in lowest terms
/// with a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigRational>) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::ShapeMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Ok(RatMatrix { rows, cols, entries })
    }

    pub fn empty(cols: usize) -> Self {
        RatMatrix {
            rows: 0,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<BigRational>>) -> Result<Self, LinalgError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for row in rows {
            if row.len() != cols {
                return Err(LinalgError::RaggedRows);
            }
            entries.extend(row);
        }
        Ok(RatMatrix {
            rows: n,
            cols,
            entries,
        })
    }

    pub fn from_int_rows<T: Into<BigInt> + Copy>(rows: &[Vec<T>]) -> Result<Self, LinalgError> {
        Ok(IntMatrix::from_rows(rows)?.into())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[BigRational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }
}

impl From<IntMatrix> for RatMatrix {
    fn from(m: IntMatrix) -> Self {
        let entries = m
            .entries()
            .iter()
            .map(|x| BigRational::from_integer(x.clone()))
            .collect();
        RatMatrix {
            rows: m.rows(),
            cols: m.cols(),
            entries,
        }
    }
}

/// A rational subspace stored as its reduced row-echelon basis.
///
/// Two subspaces are equal exactly when their values compare equal, so this
/// doubles as a hash/ordering key.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalSubspace {
    ambient_dim: usize,
    // rows sorted by pivot column; pivot entries are 1 and pivot columns are
    // zero in every other row
    basis: Vec<Vec<BigRational>>,
    pivots: Vec<usize>,
}

impl CanonicalSubspace {
    pub fn zero(ambient_dim: usize) -> Self {
        CanonicalSubspace {
            ambient_dim,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis_rows(&self) -> &[Vec<BigRational>] {
        &self.basis
    }

    pub fn basis(&self) -> RatMatrix {
        RatMatrix::from_rows(self.ambient_dim, self.basis.clone()).expect("rows have ambient length")
    }

    pub fn contains(&self, v: &[BigRational]) -> Result<bool, LinalgError> {
        self.check_len(v.len())?;
        Ok(self.residual(v).iter().all(Zero::is_zero))
    }

    /// Membership for integer vectors.
    pub fn contains_int(&self, v: &[BigInt]) -> Result<bool, LinalgError> {
        let q: Vec<BigRational> = v.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        self.contains(&q)
    }

    /// Span of this subspace and one more vector, kept in canonical form.
    pub fn extended(&self, v: &[BigRational]) -> Result<CanonicalSubspace, LinalgError> {
        self.check_len(v.len())?;
        let mut out = self.clone();
        out.absorb(self.residual(v));
        Ok(out)
    }

    fn check_len(&self, len: usize) -> Result<(), LinalgError> {
        if len != self.ambient_dim {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ambient_dim,
                found: len,
            });
        }
        Ok(())
    }

    /// `v` minus its projection along the pivot columns.
    fn residual(&self, v: &[BigRational]) -> Vec<BigRational> {
        let mut r = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if r[p].is_zero() {
                continue;
            }
            let f = r[p].clone();
            for (x, b) in r.iter_mut().zip(row) {
                if !b.is_zero() {
                    *x -= &f * b;
                }
            }
        }
        r
    }

    /// Inserts an already-reduced vector; a zero residual is a no-op.
    fn absorb(&mut self, mut r: Vec<BigRational>) {
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return;
        };
        let lead = r[p].clone();
        if !lead.is_one() {
            for x in r.iter_mut() {
                *x /= &lead;
            }
        }
        for row in self.basis.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, y) in row.iter_mut().zip(&r) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.basis.insert(at, r);
    }
}

/// Reduced row-echelon basis of the row span of `vectors`.
pub fn canonical_span(vectors: &RatMatrix) -> CanonicalSubspace {
    let mut w = CanonicalSubspace::zero(vectors.cols());
    for r in 0..vectors.rows() {
        let res = w.residual(vectors.row(r));
        w.absorb(res);
    }
    w
}

/// Row-span membership test.
pub fn contains(w: &CanonicalSubspace, v: &[BigRational]) -> Result<bool, LinalgError> {
    w.contains(v)
}
