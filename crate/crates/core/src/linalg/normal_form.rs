use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;

/// Smith normal form `left * A * right = diag(d_1, ..., d_r, 0, ...)` with
/// `d_1 | d_2 | ... | d_r`, all `d_i > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub diag: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    /// The diagonal matrix with the shape of the original input.
    pub fn diag_matrix(&self) -> IntMatrix {
        let mut d = IntMatrix::zeros(self.left.rows(), self.right.cols());
        for (i, x) in self.diag.iter().enumerate() {
            d.set(i, i, x.clone());
        }
        d
    }

    /// Product of the elementary divisors.
    pub fn index(&self) -> BigInt {
        self.diag.iter().product()
    }
}

/// Sublattice saturation: basis of `span_Q(L) ∩ Z^n` plus `[sat : L]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Saturation {
    pub basis: IntMatrix,
    pub index: BigInt,
}

type Rows = Vec<Vec<BigInt>>;

fn row_sub(a: &mut Rows, dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let (d, s) = if dst < src {
        let (lo, hi) = a.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    } else {
        let (lo, hi) = a.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in d.iter_mut().zip(s.iter()) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

fn col_sub(a: &mut Rows, dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for row in a.iter_mut() {
        if !row[src].is_zero() {
            let v = q * &row[src];
            row[dst] -= v;
        }
    }
}

fn col_swap(a: &mut Rows, i: usize, j: usize) {
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

fn identity_rows(n: usize) -> Rows {
    IntMatrix::identity(n).row_vecs()
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let rows = m.rows();
    let cols = m.cols();
    let mut a = m.row_vecs();
    let mut left = identity_rows(rows);
    // right is tracked transposed so column operations become row operations
    let mut right_t = identity_rows(cols);
    let mut diag = Vec::new();

    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = min_abs_entry(&a, t) else {
            break;
        };
        a.swap(t, pi);
        left.swap(t, pi);
        col_swap(&mut a, t, pj);
        right_t.swap(t, pj);

        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                row_sub(&mut a, i, t, &q);
                row_sub(&mut left, i, t, &q);
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                col_sub(&mut a, j, t, &q);
                row_sub(&mut right_t, j, t, &q);
                clean &= a[t][j].is_zero();
            }
            if !clean {
                // a remainder smaller than the pivot survived; promote it
                let (pi, pj) = min_abs_in_cross(&a, t);
                a.swap(t, pi);
                left.swap(t, pi);
                col_swap(&mut a, t, pj);
                right_t.swap(t, pj);
                continue;
            }
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match bad {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    row_sub(&mut a, t, i, &minus_one);
                    row_sub(&mut left, t, i, &minus_one);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -&*x;
            }
            for x in left[t].iter_mut() {
                *x = -&*x;
            }
        }
        diag.push(a[t][t].clone());
        t += 1;
    }

    let left = IntMatrix::from_big_rows(rows, left).expect("square");
    let right = IntMatrix::from_big_rows(cols, right_t).expect("square").transpose();
    SmithForm { diag, left, right }
}

fn min_abs_entry(a: &Rows, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, x) in row.iter().enumerate().skip(t) {
            if x.is_zero() {
                continue;
            }
            let ax = x.abs();
            if best.as_ref().is_none_or(|(_, _, b)| ax < *b) {
                best = Some((i, j, ax));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

fn min_abs_in_cross(a: &Rows, t: usize) -> (usize, usize) {
    let mut best = (t, t, a[t][t].abs());
    let consider = |i: usize, j: usize, best: &mut (usize, usize, BigInt)| {
        let x = &a[i][j];
        if !x.is_zero() && (best.2.is_zero() || x.abs() < best.2) {
            *best = (i, j, x.abs());
        }
    };
    for i in t + 1..a.len() {
        consider(i, t, &mut best);
    }
    for j in t + 1..a[t].len() {
        consider(t, j, &mut best);
    }
    (best.0, best.1)
}

/// Row-style Hermite normal form of the lattice spanned by the rows of `m`:
/// zero rows dropped, positive pivots, entries above each pivot reduced into
/// `[0, pivot)`.
pub fn hermite_normal_form(m: &IntMatrix) -> IntMatrix {
    let cols = m.cols();
    let mut a = m.row_vecs();
    let mut r = 0;
    for c in 0..cols {
        if r == a.len() {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in r..a.len() {
                if !a[i][c].is_zero() && best.is_none_or(|b| a[i][c].abs() < a[b][c].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            a.swap(r, b);
            let mut done = true;
            for i in r + 1..a.len() {
                if a[i][c].is_zero() {
                    continue;
                }
                let q = a[i][c].div_floor(&a[r][c]);
                row_sub(&mut a, i, r, &q);
                done &= a[i][c].is_zero();
            }
            if done {
                break;
            }
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            for x in a[r].iter_mut() {
                *x = -&*x;
            }
        }
        for i in 0..r {
            let q = a[i][c].div_floor(&a[r][c]);
            row_sub(&mut a, i, r, &q);
        }
        r += 1;
    }
    a.truncate(r);
    IntMatrix::from_big_rows(cols, a).expect("uniform rows")
}

/// Basis (as rows, in Hermite form) of `{x in Z^n : m x = 0}`. The result is
/// saturated by construction.
pub fn integer_kernel(m: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(m);
    let r = snf.rank();
    let n = m.cols();
    let kept: Vec<usize> = (r..n).collect();
    let k = snf.right.select_columns(&kept).transpose();
    hermite_normal_form(&k)
}

/// Saturation of the lattice spanned by the rows of `lattice_basis`.
pub fn saturate(lattice_basis: &IntMatrix) -> Saturation {
    let n = lattice_basis.cols();
    let index = smith_normal_form(lattice_basis).index();
    if lattice_basis.rows() == 0 || lattice_basis.is_zero() {
        return Saturation {
            basis: IntMatrix::zeros(0, n),
            index,
        };
    }
    let complement = integer_kernel(lattice_basis);
    let basis = if complement.rows() == 0 {
        IntMatrix::identity(n)
    } else {
        integer_kernel(&complement)
    };
    Saturation { basis, index }
}
