//! Exact arithmetic in GL(2,Z) and SL(2,Z).
//!
//! Entries are arbitrary-precision integers: words in the standard
//! generators grow quickly and homology computations multiply them further.

mod classify;
mod contfrac;

pub use classify::{
    classify, classify_with_conjugator, conjugate_in, eigenvector_eigenvalue_one, Ambient,
    ConjClass, CyclicWord, EigenOne, Letter,
};

use std::fmt;
use std::ops::{Mul, Neg};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gl2zError {
    #[error("determinant {det}, not unimodular")]
    NotUnimodular { det: BigInt },
    #[error("determinant {det}, not in SL(2,Z)")]
    NotInSl2z { det: BigInt },
}

/// A column vector of Z².
pub type Vec2 = [BigInt; 2];

pub fn vec2(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Vec2 {
    [x.into(), y.into()]
}

/// 2×2 integer matrix `(a b; c d)`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mat2 {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Self {
        Mat2 {
            a: a.into(),
            b: b.into(),
            c: c.into(),
            d: d.into(),
        }
    }

    pub fn identity() -> Self {
        Mat2::new(1, 0, 0, 1)
    }

    /// `R = (1 1; 0 1)`.
    pub fn r() -> Self {
        Mat2::new(1, 1, 0, 1)
    }

    /// `L = (1 0; 1 1)`.
    pub fn l() -> Self {
        Mat2::new(1, 0, 1, 1)
    }

    /// `S = (0 -1; 1 0)`, of order 4.
    pub fn s() -> Self {
        Mat2::new(0, -1, 1, 0)
    }

    /// Unipotent `(1 n; 0 1)`.
    pub fn unipotent(n: impl Into<BigInt>) -> Self {
        Mat2::new(1, n, 0, 1)
    }

    /// `diag(1, -1)`.
    pub fn reflection() -> Self {
        Mat2::new(1, 0, 0, -1)
    }

    /// `(0 1; 1 0)`, the coordinate swap.
    pub fn swap() -> Self {
        Mat2::new(0, 1, 1, 0)
    }

    /// Matrix with the given columns.
    pub fn from_columns(c0: &Vec2, c1: &Vec2) -> Self {
        Mat2::new(c0[0].clone(), c1[0].clone(), c0[1].clone(), c1[1].clone())
    }

    pub fn column(&self, j: usize) -> Vec2 {
        match j {
            0 => [self.a.clone(), self.c.clone()],
            _ => [self.b.clone(), self.d.clone()],
        }
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_one() && self.d.is_one() && self.b.is_zero() && self.c.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn is_diagonal(&self) -> bool {
        self.b.is_zero() && self.c.is_zero()
    }

    pub fn compose(&self, other: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &other.a + &self.b * &other.c,
            b: &self.a * &other.b + &self.b * &other.d,
            c: &self.c * &other.a + &self.d * &other.c,
            d: &self.c * &other.b + &self.d * &other.d,
        }
    }

    /// Adjugate `(d -b; -c a)`; equals `det · M⁻¹`.
    pub fn adjugate(&self) -> Mat2 {
        Mat2 {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
    }

    pub fn inverse(&self) -> Result<Mat2, Gl2zError> {
        let det = self.det();
        if det.is_one() {
            Ok(self.adjugate())
        } else if (-&det).is_one() {
            Ok(-self.adjugate())
        } else {
            Err(Gl2zError::NotUnimodular { det })
        }
    }

    /// Inverse of a matrix already known to be unimodular.
    pub(crate) fn inv(&self) -> Mat2 {
        self.inverse().expect("unimodular matrix")
    }

    /// `C · self · C⁻¹` for unimodular `C`.
    pub fn conjugated_by(&self, c: &Mat2) -> Mat2 {
        c.compose(self).compose(&c.inv())
    }

    pub fn add(&self, other: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a + &other.a,
            b: &self.b + &other.b,
            c: &self.c + &other.c,
            d: &self.d + &other.d,
        }
    }

    pub fn sub(&self, other: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a - &other.a,
            b: &self.b - &other.b,
            c: &self.c - &other.c,
            d: &self.d - &other.d,
        }
    }

    /// `self^k`; negative `k` requires a unimodular matrix.
    pub fn pow(&self, k: i64) -> Result<Mat2, Gl2zError> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Mat2::identity();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.compose(&sq);
            }
        }
        Ok(acc)
    }

    pub fn apply(&self, v: &Vec2) -> Vec2 {
        [
            &self.a * &v[0] + &self.b * &v[1],
            &self.c * &v[0] + &self.d * &v[1],
        ]
    }

    /// Entries as machine integers, if they fit.
    pub fn to_i64(&self) -> Option<[i64; 4]> {
        Some([
            self.a.to_i64()?,
            self.b.to_i64()?,
            self.c.to_i64()?,
            self.d.to_i64()?,
        ])
    }

    pub fn max_abs_entry(&self) -> BigInt {
        [&self.a, &self.b, &self.c, &self.d]
            .into_iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_default()
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: &Mat2) -> Mat2 {
        self.compose(rhs)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        self.compose(&rhs)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        Mat2 {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
        }
    }
}

impl Neg for &Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        -self.clone()
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

/// `[[a,b],[c,d]]`, whitespace tolerant.
impl std::str::FromStr for Mat2 {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = compact
            .strip_prefix("[[")
            .and_then(|r| r.strip_suffix("]]"))
            .ok_or_else(|| format!("expected [[a,b],[c,d]], found `{s}`"))?;
        let rows: Vec<&str> = inner.split("],[").collect();
        if rows.len() != 2 {
            return Err(format!("expected two rows, found {}", rows.len()));
        }
        let mut entries = Vec::with_capacity(4);
        for row in rows {
            let cells: Vec<&str> = row.split(',').collect();
            if cells.len() != 2 {
                return Err(format!(
                    "expected two entries per row, found {}",
                    cells.len()
                ));
            }
            for cell in cells {
                entries.push(
                    cell.parse::<BigInt>()
                        .map_err(|_| format!("invalid integer `{cell}`"))?,
                );
            }
        }
        let mut it = entries.into_iter();
        let mut next = || it.next().unwrap();
        Ok(Mat2::new(next(), next(), next(), next()))
    }
}
