//! Fraction-free echelon basis over `i128` with overflow detection.
//!
//! Rows are kept primitive (content 1). Every operation returns `None`
//! instead of wrapping, so callers can fall back to the arbitrary precision
//! routines.

use num_integer::Integer;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SmallEchelon {
    rows: Vec<Vec<i128>>,
    pivots: Vec<usize>,
}

fn make_primitive(v: &mut [i128]) {
    let g = v.iter().fold(0i128, |g, &x| g.gcd(&x));
    if g > 1 {
        for x in v.iter_mut() {
            *x /= g;
        }
    }
}

impl SmallEchelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// `v` with the pivot columns cleared, up to a nonzero scalar.
    pub fn residual(&self, v: &[i64]) -> Option<Vec<i128>> {
        let mut v: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p] == 0 {
                continue;
            }
            let (a, b) = (row[p], v[p]);
            let g = a.gcd(&b);
            let (a, b) = (a / g, b / g);
            for (x, &y) in v.iter_mut().zip(row) {
                *x = a.checked_mul(*x)?.checked_sub(b.checked_mul(y)?)?;
            }
            make_primitive(&mut v);
        }
        Some(v)
    }

    pub fn contains(&self, v: &[i64]) -> Option<bool> {
        Some(self.residual(v)?.iter().all(|&x| x == 0))
    }

    /// Span with one more vector.
    pub fn with(&self, v: &[i64]) -> Option<SmallEchelon> {
        let r = self.residual(v)?;
        let mut out = self.clone();
        if let Some(q) = r.iter().position(|&x| x != 0) {
            let at = out.pivots.partition_point(|&p| p < q);
            out.pivots.insert(at, q);
            out.rows.insert(at, r);
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spans_and_membership() {
        let e = SmallEchelon::new().with(&[1, 1, 0]).unwrap().with(&[0, 1, 1]).unwrap();
        assert_eq!(e.dim(), 2);
        assert_eq!(e.contains(&[1, 2, 1]), Some(true));
        assert_eq!(e.contains(&[1, 0, 0]), Some(false));
        assert_eq!(e.with(&[1, 0, -1]).unwrap().dim(), 2);
    }

    #[test]
    fn overflow_is_reported() {
        let big = i64::MAX;
        let e = SmallEchelon::new().with(&[1, big, 0, 0]).unwrap().with(&[big, 1, 1, 0]).unwrap();
        assert_eq!(e.dim(), 2);
        assert_eq!(e.with(&[big, 0, 0, 1]), None);
    }
}
