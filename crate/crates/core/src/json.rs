//! Serde helpers: exact numbers travel as decimal strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Serialize, Serializer};

/// `{"num": "..", "den": ".."}` with the denominator positive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactRational {
    pub num: String,
    pub den: String,
}

impl From<&BigRational> for ExactRational {
    fn from(q: &BigRational) -> Self {
        ExactRational {
            num: q.numer().to_string(),
            den: q.denom().to_string(),
        }
    }
}

pub fn rational<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    ExactRational::from(q).serialize(s)
}

pub fn opt_rational<S: Serializer>(q: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    q.as_ref().map(ExactRational::from).serialize(s)
}

pub fn rationals<S: Serializer>(qs: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    qs.iter().map(ExactRational::from).collect::<Vec<_>>().serialize(s)
}

pub fn bigint<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Rational matrix rows as strings such as `"-3/2"`.
pub fn rational_rows(rows: &[Vec<BigRational>]) -> Vec<Vec<String>> {
    rows.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
}
