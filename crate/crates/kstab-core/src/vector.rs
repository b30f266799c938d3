//! Exact rational vectors in the character and cocharacter spaces.

use crate::error::{KstabError, Result};
use crate::rational::{format_ratio, parse_ratio, rat_int, Int, Ratio};
use num_traits::Zero;
use std::fmt;
use std::ops::{Add, Neg, Sub};

/// A vector with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QVec(pub Vec<Ratio>);

impl QVec {
    pub fn zeros(dim: usize) -> Self {
        QVec(vec![Ratio::zero(); dim])
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        QVec(coords.iter().map(|&c| rat_int(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn dot(&self, other: &QVec) -> Ratio {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a * b)
            .fold(Ratio::zero(), |acc, t| acc + t)
    }

    /// Pairing against an integer vector (facet normals, lattice points).
    pub fn dot_int(&self, other: &[Int]) -> Ratio {
        debug_assert_eq!(self.dim(), other.len());
        self.0
            .iter()
            .zip(other)
            .map(|(a, b)| a * Ratio::from_integer(b.clone()))
            .fold(Ratio::zero(), |acc, t| acc + t)
    }

    pub fn scale(&self, c: &Ratio) -> QVec {
        QVec(self.0.iter().map(|x| x * c).collect())
    }

    pub fn parse_json(value: &serde_json::Value, dim: Option<usize>) -> Result<QVec> {
        let arr = value
            .as_array()
            .ok_or_else(|| KstabError::InvalidInput(format!("expected array, got {value}")))?;
        if let Some(d) = dim {
            if arr.len() != d {
                return Err(KstabError::DimensionMismatch {
                    expected: d,
                    got: arr.len(),
                });
            }
        }
        Ok(QVec(arr.iter().map(parse_ratio).collect::<Result<_>>()?))
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(format_ratio).collect()
    }
}

impl fmt::Debug for QVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join(", "))
    }
}

impl fmt::Display for QVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join(", "))
    }
}

impl Add for &QVec {
    type Output = QVec;
    fn add(self, rhs: &QVec) -> QVec {
        debug_assert_eq!(self.dim(), rhs.dim());
        QVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &QVec {
    type Output = QVec;
    fn sub(self, rhs: &QVec) -> QVec {
        debug_assert_eq!(self.dim(), rhs.dim());
        QVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &QVec {
    type Output = QVec;
    fn neg(self) -> QVec {
        QVec(self.0.iter().map(|a| -a).collect())
    }
}

/// Integer lattice vector helpers.
pub fn int_vec_to_qvec(v: &[Int]) -> QVec {
    QVec(v.iter().map(|c| Ratio::from_integer(c.clone())).collect())
}

pub fn dot_int_int(a: &[Int], b: &[Int]) -> Int {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).fold(Int::zero(), |acc, t| acc + t)
}
