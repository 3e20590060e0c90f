//! Exact scalars and dense exact linear algebra.
//!
//! Every polyhedral quantity in the crate is a [`Rational`](crate::Rational).
//! The kernels here (rank, affine rank) are written against [`ExactField`] so
//! they also run over fixed-width ratios in tests; floating point types do not
//! satisfy the bound because they are not totally ordered.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_traits::{Num, Signed, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// An ordered field with exact arithmetic.
pub trait ExactField: Clone + Ord + Num + Signed + Debug {}

impl<T> ExactField for T where T: Clone + Ord + Num + Signed + Debug {}

/// Parses `p` or `p/q` with an optional leading `-` and `q > 0`.
///
/// The result is always in lowest terms.
pub fn parse_rational(text: &str) -> std::result::Result<Rational, String> {
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !digits(num) || !den.is_none_or(digits) {
        return Err(format!("malformed rational `{text}`"));
    }
    let mut numer: BigInt = num.parse().map_err(|_| format!("malformed rational `{text}`"))?;
    let denom: BigInt = match den {
        Some(d) => d.parse().map_err(|_| format!("malformed rational `{text}`"))?,
        None => BigInt::from(1),
    };
    if denom.is_zero() {
        return Err(format!("zero denominator in `{text}`"));
    }
    if negative {
        numer = -numer;
    }
    Ok(Rational::new(numer, denom))
}

/// Shorthand for small literals, mostly in tests and fixtures.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Incremental row echelon basis over an exact field.
///
/// Rows are reduced against the stored pivots as they arrive; a row that
/// survives reduction becomes a new pivot row. Pivots are chosen as the first
/// nonzero entry.
#[derive(Debug, Clone)]
pub struct EchelonBasis<T> {
    width: usize,
    // (pivot column, row normalized so that row[pivot] == 1)
    rows: Vec<(usize, Vec<T>)>,
}

impl<T: ExactField> EchelonBasis<T> {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.width
    }

    /// Adds a row; returns `true` if it increased the rank.
    pub fn insert(&mut self, mut row: Vec<T>) -> Result<bool> {
        if row.len() != self.width {
            return Err(Error::DimensionMismatch {
                expected: self.width,
                found: row.len(),
            });
        }
        for (pivot, basis_row) in &self.rows {
            if row[*pivot].is_zero() {
                continue;
            }
            let factor = row[*pivot].clone();
            for (entry, b) in row.iter_mut().zip(basis_row).skip(*pivot) {
                if !b.is_zero() {
                    *entry = entry.clone() - factor.clone() * b.clone();
                }
            }
        }
        let Some(pivot) = row.iter().position(|x| !x.is_zero()) else {
            return Ok(false);
        };
        let lead = row[pivot].clone();
        for entry in row.iter_mut().skip(pivot) {
            if !entry.is_zero() {
                *entry = entry.clone() / lead.clone();
            }
        }
        // Keep the basis fully reduced so that later insertions only need one pass.
        for (_, other) in self.rows.iter_mut() {
            if other[pivot].is_zero() {
                continue;
            }
            let factor = other[pivot].clone();
            for (entry, r) in other.iter_mut().zip(&row).skip(pivot) {
                if !r.is_zero() {
                    *entry = entry.clone() - factor.clone() * r.clone();
                }
            }
        }
        self.rows.push((pivot, row));
        Ok(true)
    }
}

/// Linear rank of a set of equal-length vectors.
pub fn rank<T: ExactField>(rows: &[Vec<T>]) -> Result<usize> {
    let Some(first) = rows.first() else {
        return Ok(0);
    };
    let mut basis = EchelonBasis::new(first.len());
    for row in rows {
        basis.insert(row.clone())?;
        if basis.is_full() {
            break;
        }
    }
    Ok(basis.rank())
}

/// Dimension of the affine hull of `points`: the rank of `{p_k - p_0}`.
pub fn affine_rank<T: ExactField>(points: &[Vec<T>]) -> Result<usize> {
    let (origin, rest) = points.split_first().ok_or(Error::NoPoints)?;
    let mut basis = EchelonBasis::new(origin.len());
    for p in rest {
        if p.len() != origin.len() {
            return Err(Error::DimensionMismatch {
                expected: origin.len(),
                found: p.len(),
            });
        }
        if basis.is_full() {
            continue;
        }
        let diff = p.iter().zip(origin).map(|(x, o)| x.clone() - o.clone()).collect();
        basis.insert(diff)?;
    }
    Ok(basis.rank())
}
